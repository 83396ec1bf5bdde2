import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsnim.core import (
    BudgetExceeded,
    GameSpec,
    Outcome,
    SpecError,
    SubtractionSet,
    TerminalRule,
    codes_from_string,
    options,
    oracle_outcome,
    outcome_table,
    parse_set,
)

from .conftest import subsets

TABLE_1 = "LRLNNLPLNNLPLNN"
TABLE_2 = "LRLNNLLNLLLLLLL"
ODDS_AND_FOUR = SubtractionSet(frozenset({4}), (3, 2))


def test_options_examples():
    assert options(GameSpec.lr([2, 3]), 6) == (3, 4)
    assert options(GameSpec.lr([2, 3]), 1) == ()
    assert options(GameSpec.lr(ODDS_AND_FOUR), 10) == (1, 3, 5, 6, 7)


def test_options_rejects_negative():
    with pytest.raises(SpecError):
        options(GameSpec.lr([2, 3]), -1)


@pytest.mark.parametrize(
    "members, horizon, expected",
    [
        ([2, 3], 15, TABLE_1),
        ([2, 3, 6], 15, TABLE_2),
        ([2, 4], 8, "LRLRLRLR"),
    ],
)
def test_outcome_table_examples(members, horizon, expected):
    assert outcome_table(GameSpec.lr(members), horizon).to_string() == expected


@pytest.mark.parametrize(
    "members, n, expected",
    [([2, 3], 6, Outcome.P), ([2, 3], 0, Outcome.L), ([2, 3, 6], 7, Outcome.N)],
)
def test_oracle_examples(members, n, expected):
    assert oracle_outcome(GameSpec.lr(members), n) is expected


def test_oracle_cap():
    with pytest.raises(BudgetExceeded):
        oracle_outcome(GameSpec.lr([2, 3]), 201)
    assert oracle_outcome(GameSpec.lr([2, 3]), 250, cap=300) is Outcome.L


def test_horizon_budget():
    with pytest.raises(BudgetExceeded):
        outcome_table(GameSpec.lr([2, 3]), 100, max_horizon=50)
    with pytest.raises(SpecError):
        outcome_table(GameSpec.lr([2, 3]), -1)
    assert len(outcome_table(GameSpec.lr([2, 3]), 0)) == 0


def closed_form_23(n):
    if n == 1:
        return "R"
    if n % 5 in (0, 2):
        return "L"
    if n % 5 in (3, 4):
        return "N"
    return "P"


def closed_form_236(n):
    if n == 1:
        return "R"
    if n in (3, 4, 7):
        return "N"
    return "L"


def closed_form_odds_and_four(n):
    if n == 1:
        return "R"
    if n in (0, 2, 3) or (n >= 7 and n % 2 == 1):
        return "L"
    return "N"


@pytest.mark.parametrize(
    "s, limit, formula",
    [
        (SubtractionSet.of(2, 3), 10000, closed_form_23),
        (SubtractionSet.of(2, 3, 6), 10000, closed_form_236),
        (ODDS_AND_FOUR, 5000, closed_form_odds_and_four),
    ],
)
def test_closed_forms(s, limit, formula):
    text = outcome_table(GameSpec.lr(s), limit + 1).to_string()
    assert text == "".join(formula(n) for n in range(limit + 1))


def test_generalized_terminal_rules():
    all_l = outcome_table(GameSpec.with_terminals([2, 3], "LN"), 200).to_string()
    assert all_l[:2] == "LN" and set(all_l[2:]) == {"L"}
    cycle = outcome_table(GameSpec.with_terminals([2, 3], "NL"), 200).to_string()
    assert cycle == ("NLPLN" * 40)


def test_recurrence_matches_oracle_small_sets():
    for s in subsets(2, 6):
        spec = GameSpec.lr(s)
        table = outcome_table(spec, 41).to_string()
        assert table == "".join(oracle_outcome(spec, n).value for n in range(41)), str(s)


@settings(max_examples=60, deadline=None)
@given(
    members=st.frozensets(st.integers(2, 10), min_size=1, max_size=5),
    terminal=st.data(),
)
def test_recurrence_matches_oracle_any_terminal_rule(members, terminal):
    s = SubtractionSet(members)
    rule = terminal.draw(st.lists(st.sampled_from(list(Outcome)), min_size=s.min(), max_size=s.min()))
    spec = GameSpec(s, TerminalRule(tuple(rule)))
    table = outcome_table(spec, 50)
    for n in range(50):
        assert table[n] is oracle_outcome(spec, n)


@settings(max_examples=40, deadline=None)
@given(members=st.frozensets(st.integers(2, 12), min_size=1, max_size=6), n1=st.integers(0, 80), n2=st.integers(0, 80))
def test_monotone_extension(members, n1, n2):
    spec = GameSpec.lr(members)
    lo, hi = sorted((n1, n2))
    assert outcome_table(spec, hi).to_string().startswith(outcome_table(spec, lo).to_string())


@settings(max_examples=40, deadline=None)
@given(members=st.frozensets(st.integers(2, 12), min_size=1, max_size=6))
def test_terminal_consistency(members):
    spec = GameSpec.lr(members)
    table = outcome_table(spec, 30)
    for m in range(spec.s.min()):
        assert table[m] is spec.terminal[m]


@settings(max_examples=60, deadline=None)
@given(
    base=st.frozensets(st.integers(2, 30), max_size=6),
    tail=st.none() | st.tuples(st.integers(2, 20), st.integers(1, 6)),
    n=st.integers(0, 80),
)
def test_members_up_to(base, tail, n):
    if not base and tail is None:
        return
    s = SubtractionSet(base, tail)
    expected = [m for m in range(n + 1) if m in base or (tail and m >= tail[0] and (m - tail[0]) % tail[1] == 0)]
    assert list(s.members_up_to(n)) == expected
    assert s.is_finite() == (tail is None)
    assert s.min() == min(list(base) + ([tail[0]] if tail else []))


def test_subtraction_set_invariants():
    with pytest.raises(SpecError):
        SubtractionSet(frozenset())
    with pytest.raises(SpecError):
        SubtractionSet.of(1, 2)
    with pytest.raises(SpecError):
        SubtractionSet(frozenset(), (1, 2))
    with pytest.raises(SpecError):
        ODDS_AND_FOUR.max()
    assert SubtractionSet.of(2, 3, 6).max() == 6


def test_parse_set():
    assert parse_set("{2,3,6}") == SubtractionSet.of(2, 3, 6)
    assert parse_set("{3..step2} ∪ {4}") == ODDS_AND_FOUR
    assert parse_set("{4} U {3..step2}") == ODDS_AND_FOUR
    assert parse_set("{2..}") == SubtractionSet(frozenset(), (2, 1))
    assert parse_set("{2..5}") == SubtractionSet.of(2, 3, 4, 5)
    assert parse_set(str(ODDS_AND_FOUR)) == ODDS_AND_FOUR
    for bad in ["2,3", "{2,x}", "{1}", "{}", "{2..step2,3..}"]:
        with pytest.raises(SpecError):
            parse_set(bad)


def test_terminal_rule():
    assert str(TerminalRule.lr(4)) == "LRLR"
    assert TerminalRule.from_mapping({0: "N", 1: "L"}) == TerminalRule.parse("NL")
    with pytest.raises(SpecError):
        TerminalRule.from_mapping({1: "L"})
    with pytest.raises(SpecError):
        GameSpec.with_terminals([2, 3], "LRL")
    with pytest.raises(SpecError):
        TerminalRule.parse("LX")


def test_serialisation():
    seq = outcome_table(GameSpec.lr([2, 3]), 7)
    assert str(seq) == "LRLNNLP"
    assert json.loads(seq.to_json()) == list("LRLNNLP")
    assert codes_from_string("LRNP") == bytes([0, 1, 2, 3])
    assert seq.values[6] is Outcome.P


@settings(max_examples=60, deadline=None)
@given(
    base=st.frozensets(st.integers(2, 14), max_size=3),
    tail=st.tuples(st.integers(2, 9), st.integers(1, 4)),
    rule=st.text("LRNP", min_size=14, max_size=14),
)
def test_infinite_sets_match_oracle(base, tail, rule):
    s = SubtractionSet(base, tail)
    spec = GameSpec.with_terminals(s, rule[: s.min()])
    table = outcome_table(spec, 70)
    assert table.to_string() == "".join(oracle_outcome(spec, n).value for n in range(70))
