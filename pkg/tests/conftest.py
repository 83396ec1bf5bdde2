from functools import lru_cache

import pytest

from epsnim.core import GameSpec, Outcome, SubtractionSet


def subsets(lo, hi):
    """Every nonempty finite set drawn from lo..hi, in bitmask order."""
    elements = list(range(lo, hi + 1))
    for mask in range(1, 1 << len(elements)):
        yield SubtractionSet(frozenset(e for i, e in enumerate(elements) if mask >> i & 1))


def brute_period(text: str, max_p: int):
    """Least (preperiod, period) by trying every pair against a long string.

    The periodic part must cover at least half the string, so the string has
    to be much longer than preperiod + period for the answer to mean anything.
    """
    n = len(text)
    for p in range(1, max_p + 1):
        for a in range(0, n // 2):
            if all(text[m + p] == text[m] for m in range(a, n - p)):
                return a, p
    return None


# Games as plain nested tuples (left, right), compared by the bare definition.
RAW_ZERO = ((), ())
RAW_ONE = ((RAW_ZERO,), ())
RAW_MINUS_ONE = ((), (RAW_ZERO,))


@lru_cache(maxsize=None)
def raw_leq(g, h):
    return not any(raw_leq(h, gl) for gl in g[0]) and not any(raw_leq(hr, g) for hr in h[1])


def raw_eq(g, h):
    return raw_leq(g, h) and raw_leq(h, g)


@lru_cache(maxsize=None)
def raw_neg(g):
    return (tuple(raw_neg(x) for x in g[1]), tuple(raw_neg(x) for x in g[0]))


@lru_cache(maxsize=None)
def raw_add(g, h):
    left = tuple(raw_add(x, h) for x in g[0]) + tuple(raw_add(g, x) for x in h[0])
    right = tuple(raw_add(x, h) for x in g[1]) + tuple(raw_add(g, x) for x in h[1])
    return (left, right)


def raw_outcome(g):
    ge = raw_leq(RAW_ZERO, g)
    le = raw_leq(g, RAW_ZERO)
    if ge and le:
        return Outcome.P
    if ge:
        return Outcome.L
    if le:
        return Outcome.R
    return Outcome.N


def raw_position_values(spec: GameSpec, horizon: int):
    """Unsimplified game trees of LR positions, options deduplicated structurally."""
    vals = []
    for n in range(horizon):
        if n < spec.s.min():
            vals.append(RAW_ONE if spec.terminal[n] is Outcome.L else RAW_MINUS_ONE)
        else:
            opts = tuple(dict.fromkeys(vals[n - s] for s in spec.s.members_up_to(n)))
            vals.append((opts, opts))
    return vals


def to_raw(g):
    return (tuple(to_raw(x) for x in g.left), tuple(to_raw(x) for x in g.right))


@pytest.fixture
def table():
    from epsnim.cgt import GameTable

    return GameTable()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter):
    try:
        from .test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS):
        ok, detail = RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
