"""Write Eschenburg and Bazaikin censuses and report |r| coincidences."""
import argparse
from collections import Counter
from pathlib import Path

from curvlab.census import baz_census, esch_census, find_coincidences, read_census, write_census


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--esch-bound", type=int, default=6)
    ap.add_argument("--baz-bound", type=int, default=9)
    ap.add_argument("--out", default="census")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    for name, records in [("eschenburg", esch_census(args.esch_bound)), ("bazaikin", baz_census(args.baz_bound))]:
        path = out / f"{name}.csv"
        n = write_census(records, path)
        recs = read_census(path)
        stats = Counter((r.free, r.positive) for r in recs)
        groups = find_coincidences(r for r in recs if r.positive)
        print(f"{name}: {n} records, {stats[(True, True)]} free and positive, "
              f"{stats[(True, False)]} free only; {len(groups)} |r| coincidences among positive records")
        for g in groups[:5]:
            print(f"  |r|={g.abs_r}: " + "  ".join(str(m.params) for m in g.members))


if __name__ == "__main__":
    main()
