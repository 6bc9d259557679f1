"""Enumeration of Eschenburg and Bazaikin parameters with their invariants."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .biquot import (BazaikinParams, EschenburgParams, baz_is_free, baz_is_positive, baz_order_h6,
                     esch_is_free, esch_is_positive, esch_order_h4, esch_warnings)

CSV_HEADER = ["kind", "k1", "k2", "k3", "l1", "l2", "l3", "q1", "q2", "q3", "q4", "q5",
              "free", "positive", "r", "warnings"]
INVERTED_WARNING = "positive via inverted presentation"


class CensusParseError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


@dataclass
class CensusRecord:
    kind: str
    params: tuple
    free: bool
    positive: bool
    r: Optional[int]
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if self.r is not None and not self.free:
            raise ValueError("order invariant is only defined for free actions")
        if self.positive and not self.free:
            raise ValueError("positive records must be free")

    @property
    def abs_r(self) -> Optional[int]:
        return None if self.r is None else abs(self.r)

    @property
    def k(self):
        return self.params[0] if self.kind == "eschenburg" else None

    @property
    def l(self):
        return self.params[1] if self.kind == "eschenburg" else None

    @property
    def q(self):
        return self.params if self.kind == "bazaikin" else None

    def as_json(self) -> dict:
        return {"kind": self.kind,
                "k": list(self.k) if self.k is not None else None,
                "l": list(self.l) if self.l is not None else None,
                "q": list(self.q) if self.q is not None else None,
                "free": self.free, "positive": self.positive, "r": self.r,
                "warnings": list(self.warnings)}


@dataclass
class CoincidenceGroup:
    abs_r: int
    kind: str
    members: list


# ---------------------------------------------------------------- Eschenburg


def esch_record(k, l) -> CensusRecord:
    """Record with all predicates; positivity is taken over both presentations.

    E_{k,l} and E_{l,k} are the same manifold (g -> g^-1), so a tuple counts
    as positive if either presentation meets the criterion.
    """
    p = EschenburgParams(k, l)
    free = esch_is_free(p)
    warnings = esch_warnings(p)
    positive = False
    if free:
        direct = esch_is_positive(p)
        inverted = esch_is_positive(p.swapped())
        positive = direct or inverted
        if inverted and not direct:
            warnings.append(INVERTED_WARNING)
    return CensusRecord("eschenburg", (p.k, p.l), free, positive, esch_order_h4(p) if free else None, warnings)


def esch_canonical(k, l) -> tuple:
    """Canonical representative under permutations, translation and k <-> l.

    Both triples sorted descending, translated so that min(l) = 0, and the
    lexicographically smaller of the two presentations kept.
    """
    def norm(a, b):
        a = sorted(a, reverse=True)
        b = sorted(b, reverse=True)
        c = b[-1]
        return tuple(x - c for x in a), tuple(x - c for x in b)

    return min(norm(k, l), norm(l, k))


def _triples_with_sum(s: int, lo: int, hi: int) -> Iterator[tuple]:
    """Descending triples a >= b >= c with entries in [lo, hi] and a + b + c = s."""
    for a in range(hi, lo - 1, -1):
        for b in range(min(a, s - a - lo), lo - 1, -1):
            c = s - a - b
            if c > b:
                break
            if lo <= c <= hi:
                yield (a, b, c)


def esch_tuples(bound: int, normalize: bool = True) -> Iterator[tuple]:
    """(k, l) pairs with entries in [-bound, bound] and equal sums.

    With ``normalize`` one canonical representative is produced for every
    symmetry class meeting the box.  A class meets the box iff the spread of
    its six entries is at most 2 * bound, so the representative itself may
    have entries up to 2 * bound.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if not normalize:
        rng = range(-bound, bound + 1)
        for k in itertools.product(rng, repeat=3):
            for l in itertools.product(rng, repeat=3):
                if sum(k) == sum(l):
                    yield k, l
        return
    width = 2 * bound
    for l1 in range(0, width + 1):
        for l2 in range(0, l1 + 1):
            l = (l1, l2, 0)
            for k in _triples_with_sum(l1 + l2, l1 - width, width):
                if max(k[0], l1) - min(k[2], 0) > width:
                    continue
                if esch_canonical(k, l) == (k, l):
                    yield k, l


def esch_census(bound: int, normalize: bool = True, filters: Iterable[str] = ()) -> Iterator[CensusRecord]:
    """Stream Eschenburg records; filters from {"free", "positive"}."""
    filters = set(filters)
    unknown = filters - {"free", "positive"}
    if unknown:
        raise ValueError(f"unknown filters {sorted(unknown)}")
    for k, l in esch_tuples(bound, normalize):
        rec = esch_record(k, l)
        if "free" in filters and not rec.free:
            continue
        if "positive" in filters and not rec.positive:
            continue
        yield rec


def brute_force_free_oracle(k, l, order_bound: Optional[int] = None) -> bool:
    """Freeness by searching for z != 1 with {z^k_i} = {z^l_i} as multisets.

    For z of exact order n the comparison is done on exponents mod n.  Any
    fixing z has order dividing gcd(k - l o sigma) for some permutation sigma,
    so ``order_bound`` must reach the largest such gcd (or 2 when one of them is 0).
    """
    k, l = tuple(k), tuple(l)
    gcds = [math.gcd(*(k[i] - l[s[i]] for i in range(3))) for s in itertools.permutations(range(3))]
    needed = max(max(gcds), 2 if 0 in gcds else 1)
    if order_bound is None:
        order_bound = needed
    if order_bound < needed:
        raise ValueError(f"order_bound {order_bound} below required {needed}")
    for n in range(2, order_bound + 1):
        if sorted(x % n for x in k) == sorted(x % n for x in l):
            return False
    return True


# ---------------------------------------------------------------- Bazaikin


def baz_record(q) -> CensusRecord:
    p = BazaikinParams(q)
    free = baz_is_free(p)
    positive = free and baz_is_positive(p)
    return CensusRecord("bazaikin", p.q, free, positive, baz_order_h6(p) if free else None, [])


def baz_canonical(q) -> tuple:
    a = tuple(sorted(q, reverse=True))
    b = tuple(sorted((-x for x in q), reverse=True))
    return max(a, b)


def baz_census(bound: int) -> Iterator[CensusRecord]:
    """Odd q in [-bound, bound]^5 up to permutation and overall sign."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    odds = [v for v in range(-bound, bound + 1) if v % 2]
    for q in itertools.combinations_with_replacement(sorted(odds, reverse=True), 5):
        if baz_canonical(q) == q:
            yield baz_record(q)


# ---------------------------------------------------------------- coincidences


def find_coincidences(records: Iterable[CensusRecord]) -> list[CoincidenceGroup]:
    """Group free records by |r|; groups with at least two members, sorted by |r|."""
    recs = [r for r in records if r.free and r.r is not None]
    kinds = {r.kind for r in recs}
    if len(kinds) > 1:
        raise ValueError("records of mixed kinds")
    recs.sort(key=lambda r: (r.abs_r, r.params))
    groups = []
    for key, members in itertools.groupby(recs, key=lambda r: r.abs_r):
        members = list(members)
        if len(members) >= 2:
            groups.append(CoincidenceGroup(key, members[0].kind, members))
    return groups


# ---------------------------------------------------------------- persistence


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def record_to_csv_row(rec: CensusRecord) -> list[str]:
    k = rec.k or (None,) * 3
    l = rec.l or (None,) * 3
    q = rec.q or (None,) * 5
    cells = [rec.kind] + ["" if v is None else str(v) for v in (*k, *l, *q)]
    cells += [_fmt_bool(rec.free), _fmt_bool(rec.positive), "" if rec.r is None else str(rec.r),
              ";".join(rec.warnings)]
    return cells


def write_census(records: Iterable[CensusRecord], path, format: str = "csv") -> int:
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {format!r}")
    n = 0
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if format == "csv":
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for rec in records:
                w.writerow(record_to_csv_row(rec))
                n += 1
        else:
            for rec in records:
                fh.write(json.dumps(rec.as_json(), separators=(",", ":")) + "\n")
                n += 1
    return n


def _parse_bool(s: str) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ValueError(f"bad boolean {s!r}")


def _record_from_parts(kind, k, l, q, free, positive, r, warnings) -> CensusRecord:
    if kind == "eschenburg":
        if k is None or l is None or q is not None:
            raise ValueError("eschenburg record needs k and l only")
        params = (tuple(int(v) for v in k), tuple(int(v) for v in l))
        if len(params[0]) != 3 or len(params[1]) != 3:
            raise ValueError("k and l must be triples")
    elif kind == "bazaikin":
        if q is None or k is not None or l is not None:
            raise ValueError("bazaikin record needs q only")
        params = tuple(int(v) for v in q)
        if len(params) != 5:
            raise ValueError("q must have five entries")
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if not isinstance(free, bool) or not isinstance(positive, bool):
        raise ValueError("free/positive must be booleans")
    return CensusRecord(kind, params, free, positive, None if r is None else int(r), list(warnings))


def read_census(path) -> list[CensusRecord]:
    """Read a csv or jsonl census; the format is detected from the first line."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if not text:
        return []
    first = text.split("\n", 1)[0]
    out = []
    if first.startswith("{"):
        for i, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not a JSON object")
                out.append(_record_from_parts(obj["kind"], obj.get("k"), obj.get("l"), obj.get("q"),
                                              obj["free"], obj["positive"], obj.get("r"), obj.get("warnings", [])))
            except (ValueError, KeyError, TypeError) as exc:
                raise CensusParseError(path, i, str(exc)) from None
        return out
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != CSV_HEADER:
        raise CensusParseError(path, 1, f"unexpected header {header}")
    for i, row in enumerate(reader, 2):
        try:
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"expected {len(CSV_HEADER)} fields, got {len(row)}")
            cell = dict(zip(CSV_HEADER, row))

            def ints(names):
                vals = [cell[n] for n in names]
                if all(v == "" for v in vals):
                    return None
                return [int(v) for v in vals]

            out.append(_record_from_parts(
                cell["kind"], ints(["k1", "k2", "k3"]), ints(["l1", "l2", "l3"]),
                ints(["q1", "q2", "q3", "q4", "q5"]), _parse_bool(cell["free"]), _parse_bool(cell["positive"]),
                None if cell["r"] == "" else int(cell["r"]),
                [w for w in cell["warnings"].split(";") if w]))
        except (ValueError, KeyError) as exc:
            raise CensusParseError(path, i, str(exc)) from None
    return out
