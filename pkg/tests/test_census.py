import itertools

import pytest
from hypothesis import given, settings, strategies as st

from curvlab.biquot import EschenburgParams, esch_is_free, esch_is_positive, esch_order_h4
from curvlab.census import (CSV_HEADER, INVERTED_WARNING, CensusParseError, CensusRecord, baz_census, baz_record,
                            brute_force_free_oracle, esch_canonical, esch_census, esch_record, esch_tuples,
                            find_coincidences, read_census, write_census)


def box(bound):
    return list(esch_tuples(bound, normalize=False))


# ---------------------------------------------------------------- Eschenburg


def test_simplest_record():
    rec = esch_record((1, 1, -2), (0, 0, 0))
    assert rec.free and rec.positive and rec.r == -3 and rec.abs_r == 3
    assert rec.warnings == []


def test_inverted_positivity_is_flagged():
    rec = esch_record((1, 1, 3), (0, 0, 5))
    assert rec.free and rec.positive
    assert INVERTED_WARNING in rec.warnings
    assert not esch_is_positive(EschenburgParams((1, 1, 3), (0, 0, 5)))


def test_record_invariants():
    with pytest.raises(ValueError):
        CensusRecord("eschenburg", ((2, 2, -4), (0, 0, 0)), False, False, 12)
    with pytest.raises(ValueError):
        CensusRecord("eschenburg", ((2, 2, -4), (0, 0, 0)), False, True, None)


def test_free_predicate_matches_oracle_on_box():
    tuples = box(2)
    assert len(tuples) > 1000
    for k, l in tuples:
        assert esch_is_free(EschenburgParams(k, l)) == brute_force_free_oracle(k, l), (k, l)


@pytest.mark.parametrize("k,l,free", [
    ((1, 1, -2), (0, 0, 0), True),
    ((2, 2, -4), (0, 0, 0), False),
    ((1, 0, -1), (1, 0, -1), False),
    ((0, 0, 0), (0, 0, 0), False),
])
def test_oracle_examples(k, l, free):
    assert brute_force_free_oracle(k, l) is free


def test_oracle_rejects_small_order_bound():
    with pytest.raises(ValueError):
        brute_force_free_oracle((5, 0, -5), (0, 0, 0), order_bound=3)


def test_free_count_at_bound_two_matches_oracle():
    recs = list(esch_census(2))
    n_free = sum(r.free for r in recs)
    n_oracle = sum(brute_force_free_oracle(*r.params) for r in recs)
    assert n_free == n_oracle > 0


def test_normalized_census_has_no_duplicates():
    for bound in (1, 2, 3):
        reps = list(esch_tuples(bound))
        assert len(reps) == len(set(reps))
        assert all(esch_canonical(k, l) == (k, l) for k, l in reps)


def test_normalized_census_covers_every_box_class():
    reps = set(esch_tuples(2))
    seen = set()
    for k, l in box(2):
        c = esch_canonical(k, l)
        assert c in reps
        seen.add(c)
    assert seen == reps


def test_symmetry_reduction_preserves_invariants():
    recs = {r.params: r for r in esch_census(2)}
    for k, l in box(2):
        rec = recs[esch_canonical(k, l)]
        p = EschenburgParams(k, l)
        assert rec.free == esch_is_free(p)
        if rec.free:
            assert rec.positive == (esch_is_positive(p) or esch_is_positive(p.swapped()))
            assert rec.abs_r == abs(esch_order_h4(p))


def test_filters_are_subsets():
    everything = [r.params for r in esch_census(3)]
    free = [r.params for r in esch_census(3, filters=["free"])]
    pos = [r.params for r in esch_census(3, filters=["free", "positive"])]
    assert set(pos) <= set(free) <= set(everything)
    assert free == [p for p in everything if esch_record(*p).free]
    assert len(pos) < len(free) < len(everything)
    with pytest.raises(ValueError):
        list(esch_census(2, filters=["shiny"]))


def test_census_rejects_bound():
    with pytest.raises(ValueError):
        list(esch_tuples(0))
    with pytest.raises(ValueError):
        list(baz_census(0))


# ---------------------------------------------------------------- Bazaikin


def test_baz_census_contains_berger_space():
    recs = {r.params: r for r in baz_census(3)}
    berger = recs[(1, 1, 1, 1, 1)]
    assert berger.free and berger.positive and berger.abs_r == 5
    assert (-1, -1, -1, -1, -1) not in recs  # identified by the overall sign


def test_baz_positive_records_have_uniform_pair_sums():
    recs = list(baz_census(5))
    assert any(r.positive for r in recs) and any(r.free and not r.positive for r in recs)
    for r in recs:
        sums = [a + b for a, b in itertools.combinations(r.q, 2)]
        uniform = all(s > 0 for s in sums) or all(s < 0 for s in sums)
        assert r.positive == (r.free and uniform)


# ---------------------------------------------------------------- coincidences


def test_known_pair_coincides():
    a = esch_record((79, 49, -50), (0, 46, 32))
    b = esch_record((75, 54, -51), (0, 46, 32))
    single = esch_record((1, 1, -2), (0, 0, 0))
    groups = find_coincidences([single, b, a])
    assert len(groups) == 1
    assert groups[0].abs_r == a.abs_r and {m.params for m in groups[0].members} == {a.params, b.params}


def test_coincidences_skip_singletons_and_non_free():
    recs = [esch_record((1, 1, -2), (0, 0, 0)), esch_record((2, 2, -4), (0, 0, 0))]
    assert find_coincidences(recs) == []
    assert find_coincidences([]) == []


def test_coincidences_reject_mixed_kinds():
    with pytest.raises(ValueError):
        find_coincidences([esch_record((1, 1, -2), (0, 0, 0)), baz_record((1, 1, 1, 1, 1)),
                           esch_record((2, 1, -3), (0, 0, 0))])


def test_coincidences_sorted_and_order_independent():
    recs = list(esch_census(3, filters=["free"]))
    g1 = find_coincidences(recs)
    g2 = find_coincidences(reversed(recs))
    assert [(g.abs_r, [m.params for m in g.members]) for g in g1] == \
           [(g.abs_r, [m.params for m in g.members]) for g in g2]
    assert [g.abs_r for g in g1] == sorted(g.abs_r for g in g1)


# ---------------------------------------------------------------- persistence


@st.composite
def records(draw):
    if draw(st.booleans()):
        k = tuple(draw(st.integers(-30, 30)) for _ in range(3))
        l1, l2 = draw(st.integers(-30, 30)), draw(st.integers(-30, 30))
        return esch_record(k, (l1, l2, sum(k) - l1 - l2))
    return baz_record(tuple(2 * draw(st.integers(-10, 10)) + 1 for _ in range(5)))


@settings(max_examples=30, deadline=None)
@given(st.lists(records(), max_size=40), st.sampled_from(["csv", "jsonl"]))
def test_round_trip(tmp_path_factory, recs, fmt):
    path = tmp_path_factory.mktemp("rt") / f"c.{fmt}"
    assert write_census(recs, path, fmt) == len(recs)
    back = read_census(path)
    if fmt == "jsonl" and not recs:
        assert back == []
    else:
        assert back == recs


def test_round_trip_thousand_records(tmp_path):
    recs = list(esch_census(6))[:1000]
    assert len(recs) == 1000
    for fmt in ("csv", "jsonl"):
        path = tmp_path / f"c.{fmt}"
        write_census(recs, path, fmt)
        assert read_census(path) == recs


def test_csv_header(tmp_path):
    path = tmp_path / "c.csv"
    write_census([esch_record((1, 1, -2), (0, 0, 0))], path)
    lines = path.read_bytes().split(b"\n")
    assert lines[0].decode() == ",".join(CSV_HEADER)
    assert lines[1] == b"eschenburg,1,1,-2,0,0,0,,,,,,true,true,-3,"
    assert b"\r" not in path.read_bytes()


@pytest.mark.parametrize("content,line", [
    ("kind,k1\n", 1),
    (",".join(CSV_HEADER) + "\neschenburg,1,1,-2,0,0,0,,,,,,true,true,-3,\neschenburg,1,1\n", 3),
    (",".join(CSV_HEADER) + "\neschenburg,1,1,-2,0,0,0,,,,,,yes,true,-3,\n", 2),
    (",".join(CSV_HEADER) + "\nwidget,1,1,-2,0,0,0,,,,,,true,true,-3,\n", 2),
    ('{"kind":"eschenburg","k":[1,1,-2],"l":[0,0,0],"free":true,"positive":true,"r":-3}\n{oops\n', 2),
    ('{"kind":"bazaikin","q":[1,1,1],"free":true,"positive":true,"r":-5}\n', 1),
])
def test_parse_errors_carry_line_numbers(tmp_path, content, line):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(CensusParseError) as exc:
        read_census(path)
    assert exc.value.line == line
    assert f":{line}:" in str(exc.value)


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    assert read_census(path) == []


def test_census_is_byte_identical(tmp_path):
    for fmt in ("csv", "jsonl"):
        a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
        write_census(esch_census(3), a, fmt)
        write_census(esch_census(3), b, fmt)
        assert a.read_bytes() == b.read_bytes()
