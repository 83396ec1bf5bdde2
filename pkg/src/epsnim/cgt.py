"""Canonical short partizan games, hash-consed.

Every :class:`Game` lives in a :class:`GameTable` and is in canonical form
(no dominated or reversible options), so two games are equal exactly when
they are the same object. Comparison, negation and sums are memoised on the
table by game id.

LR positions become normal-play games by replacing a Left-winning terminal
with ``1 = {0|}`` and a Right-winning one with ``-1 = {|0}``.
"""

from __future__ import annotations

import json
import re
import sys
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import BudgetExceeded, GameSpec, Outcome, SpecError

DEFAULT_MAX_FORMS = 10**6
DEFAULT_MAX_OPTIONS = 10_000

if sys.getrecursionlimit() < 20_000:
    sys.setrecursionlimit(20_000)


class Game:
    __slots__ = ("left", "right", "uid", "table")

    def __init__(self, left: tuple["Game", ...], right: tuple["Game", ...], uid: int, table: "GameTable"):
        self.left = left
        self.right = right
        self.uid = uid
        self.table = table

    def __hash__(self) -> int:
        return self.uid

    def __eq__(self, other: object) -> bool:
        return self is other

    def __le__(self, other: "Game") -> bool:
        return self.table.leq(self, other)

    def __ge__(self, other: "Game") -> bool:
        return self.table.leq(other, self)

    def __lt__(self, other: "Game") -> bool:
        return self.table.leq(self, other) and self is not other

    def __gt__(self, other: "Game") -> bool:
        return self.table.leq(other, self) and self is not other

    def __neg__(self) -> "Game":
        return self.table.negate(self)

    def __add__(self, other: "Game") -> "Game":
        return self.table.add(self, other)

    def __sub__(self, other: "Game") -> "Game":
        return self.table.add(self, self.table.negate(other))

    def fuzzy(self, other: "Game") -> bool:
        return not self.table.leq(self, other) and not self.table.leq(other, self)

    def __repr__(self) -> str:
        return f"Game({to_bracket(self)})"

    def __str__(self) -> str:
        return to_bracket(self)


class _Raw:
    """A not-yet-canonical game whose options are canonical."""

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right


class GameTable:
    """Intern table and memo caches for canonical games.

    Insertions are serialised by a lock, so one table can be shared by
    threads; separate processes each build their own table and see the same
    results.
    """

    def __init__(self, max_forms: int = DEFAULT_MAX_FORMS, max_options: int = DEFAULT_MAX_OPTIONS):
        self.max_forms = max_forms
        self.max_options = max_options
        self._forms: dict[tuple[tuple[int, ...], tuple[int, ...]], Game] = {}
        self._leq: dict[tuple[int, int], bool] = {}
        self._neg: dict[int, Game] = {}
        self._sum: dict[tuple[int, int], Game] = {}
        self._lock = threading.RLock()
        self.zero = self._intern((), ())
        self.star = self._intern((self.zero,), (self.zero,))
        self._integers: dict[int, Game] = {0: self.zero}

    def __len__(self) -> int:
        return len(self._forms)

    def _intern(self, left: Iterable[Game], right: Iterable[Game]) -> Game:
        left = tuple(sorted(set(left), key=_uid))
        right = tuple(sorted(set(right), key=_uid))
        key = (tuple(g.uid for g in left), tuple(g.uid for g in right))
        game = self._forms.get(key)
        if game is not None:
            return game
        with self._lock:
            game = self._forms.get(key)
            if game is None:
                if len(self._forms) >= self.max_forms:
                    raise BudgetExceeded(f"more than {self.max_forms} distinct canonical forms")
                game = Game(left, right, len(self._forms), self)
                self._forms[key] = game
        return game

    # comparison ---------------------------------------------------------

    def leq(self, g: Game, h: Game) -> bool:
        """``g <= h``: no Left option of g is >= h and no Right option of h is <= g."""
        if g is h:
            return True
        key = (g.uid, h.uid)
        hit = self._leq.get(key)
        if hit is not None:
            return hit
        leq = self.leq
        result = not any(leq(h, gl) for gl in g.left) and not any(leq(hr, g) for hr in h.right)
        self._leq[key] = result
        return result

    def _leq_any(self, g, h, scratch: dict) -> bool:
        # like leq, but either side may be a _Raw game under simplification
        if isinstance(g, Game) and isinstance(h, Game):
            return self.leq(g, h)
        key = (id(g), id(h))
        hit = scratch.get(key)
        if hit is not None:
            return hit
        result = not any(self._leq_any(h, gl, scratch) for gl in g.left) and not any(
            self._leq_any(hr, g, scratch) for hr in h.right
        )
        scratch[key] = result
        return result

    # construction -------------------------------------------------------

    def canonical(self, left: Iterable[Game], right: Iterable[Game]) -> Game:
        """Canonical form of ``{left | right}`` whose options are already canonical."""
        left = list(dict.fromkeys(left))
        right = list(dict.fromkeys(right))
        if len(left) + len(right) > self.max_options:
            raise BudgetExceeded(f"game with {len(left) + len(right)} options exceeds max_options={self.max_options}")
        leq = self.leq
        while True:
            left = _maximal(left, leq)
            right = _minimal(right, leq)
            raw = _Raw(left, right)
            scratch: dict = {}
            changed = False
            new_left: list[Game] = []
            for a in left:
                # Left option a reverses through a^R when a^R <= G
                rev = next((ar for ar in a.right if self._leq_any(ar, raw, scratch)), None)
                if rev is None:
                    new_left.append(a)
                else:
                    new_left.extend(rev.left)
                    changed = True
            new_right: list[Game] = []
            for b in right:
                rev = next((bl for bl in b.left if self._leq_any(raw, bl, scratch)), None)
                if rev is None:
                    new_right.append(b)
                else:
                    new_right.extend(rev.right)
                    changed = True
            left = list(dict.fromkeys(new_left))
            right = list(dict.fromkeys(new_right))
            if not changed:
                return self._intern(left, right)

    def negate(self, g: Game) -> Game:
        hit = self._neg.get(g.uid)
        if hit is not None:
            return hit
        neg = self._intern([self.negate(r) for r in g.right], [self.negate(x) for x in g.left])
        self._neg[g.uid] = neg
        self._neg[neg.uid] = g
        return neg

    def add(self, g: Game, h: Game) -> Game:
        if g is self.zero:
            return h
        if h is self.zero:
            return g
        key = (g.uid, h.uid) if g.uid <= h.uid else (h.uid, g.uid)
        hit = self._sum.get(key)
        if hit is not None:
            return hit
        add = self.add
        left = [add(gl, h) for gl in g.left] + [add(g, hl) for hl in h.left]
        right = [add(gr, h) for gr in g.right] + [add(g, hr) for hr in h.right]
        result = self.canonical(left, right)
        self._sum[key] = result
        return result

    def sum(self, games: Iterable[Game]) -> Game:
        total = self.zero
        for g in games:
            total = self.add(total, g)
        return total

    def integer(self, n: int) -> Game:
        hit = self._integers.get(n)
        if hit is not None:
            return hit
        if n > 0:
            g = self._intern((self.integer(n - 1),), ())
        else:
            g = self._intern((), (self.integer(n + 1),))
        self._integers[n] = g
        return g

    def outcome(self, g: Game) -> Outcome:
        """Normal-play outcome: L if g > 0, R if g < 0, P if g = 0, N if g is fuzzy with 0."""
        right_first_loses = self.leq(self.zero, g)  # 0 <= g: Left wins moving second
        left_first_loses = self.leq(g, self.zero)
        if right_first_loses and left_first_loses:
            return Outcome.P
        if right_first_loses:
            return Outcome.L
        if left_first_loses:
            return Outcome.R
        return Outcome.N


def _uid(g: Game) -> int:
    return g.uid


def _maximal(options: list[Game], leq) -> list[Game]:
    return [a for a in options if not any(b is not a and leq(a, b) for b in options)]


def _minimal(options: list[Game], leq) -> list[Game]:
    return [a for a in options if not any(b is not a and leq(b, a) for b in options)]


_default = GameTable()


def default_table() -> GameTable:
    return _default


def reset_default_table(**kwargs) -> GameTable:
    global _default
    _default = GameTable(**kwargs)
    return _default


def _t(table: GameTable | None) -> GameTable:
    return _default if table is None else table


# module-level operations on the default table ----------------------------


def canonicalize(raw, table: GameTable | None = None) -> Game:
    """Canonical form of a game given as nested ``(left, right)`` option lists.

    Leaves may be :class:`Game` objects, ints, or bracket strings.
    """
    t = _t(table)
    if isinstance(raw, Game):
        if raw.table is t:
            return raw
        return t.canonical([canonicalize(x, t) for x in raw.left], [canonicalize(x, t) for x in raw.right])
    if isinstance(raw, int):
        return t.integer(raw)
    if isinstance(raw, str):
        return parse_game(raw, t)
    left, right = raw
    return t.canonical([canonicalize(x, t) for x in left], [canonicalize(x, t) for x in right])


def leq(g: Game, h: Game) -> bool:
    return g.table.leq(g, h)


def negate(g: Game) -> Game:
    return g.table.negate(g)


def game_sum(g: Game, h: Game) -> Game:
    return g.table.add(g, h)


def game_outcome(g: Game) -> Outcome:
    return g.table.outcome(g)


# text and JSON forms ------------------------------------------------------


def _integer_value(g: Game) -> int | None:
    n = 0
    while True:
        if not g.left and not g.right:
            return n
        if len(g.left) == 1 and not g.right and n >= 0:
            g, n = g.left[0], n + 1
        elif len(g.right) == 1 and not g.left and n <= 0:
            g, n = g.right[0], n - 1
        else:
            return None


def to_bracket(g: Game) -> str:
    """Nested ``{a,b|c}`` text; integers and ``*`` are written by name."""
    memo: dict[int, str] = {}

    def render(x: Game) -> str:
        hit = memo.get(x.uid)
        if hit is not None:
            return hit
        n = _integer_value(x)
        if n is not None:
            text = str(n)
        elif x is x.table.star:
            text = "*"
        else:
            text = "{" + ",".join(sorted(render(y) for y in x.left)) + "|" + ",".join(sorted(render(y) for y in x.right)) + "}"
        memo[x.uid] = text
        return text

    return render(g)


_TOKEN = re.compile(r"\s*(?:(-?\d+)|(\*)|([{}|,]))")


def parse_game(text: str, table: GameTable | None = None) -> Game:
    """Parse bracket text such as ``{-1,0|1}``, ``{0|}``, ``*`` or ``-2``."""
    t = _t(table)
    tokens: list[str] = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SpecError(f"bad game text at {pos}: {text!r}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    i = 0

    def game() -> Game:
        nonlocal i
        if i >= len(tokens):
            raise SpecError(f"unexpected end of game text: {text!r}")
        tok = tokens[i]
        i += 1
        if tok == "*":
            return t.star
        if tok not in "{}|,":
            return t.integer(int(tok))
        if tok != "{":
            raise SpecError(f"unexpected {tok!r} in {text!r}")
        sides: list[list[Game]] = [[], []]
        side = 0
        while True:
            if i >= len(tokens):
                raise SpecError(f"unbalanced braces in {text!r}")
            tok = tokens[i]
            if tok == "}":
                i += 1
                break
            if tok == "|":
                if side == 1:
                    raise SpecError(f"two bars in one game: {text!r}")
                side = 1
                i += 1
                continue
            if tok == ",":
                i += 1
                continue
            sides[side].append(game())
        return t.canonical(sides[0], sides[1])

    g = game()
    if i != len(tokens):
        raise SpecError(f"trailing text in {text!r}")
    return g


def to_dag(g: Game) -> dict:
    """Node table with edges; node ids are local and follow a depth-first order."""
    ids: dict[int, int] = {}
    nodes: list[dict] = []

    def visit(x: Game) -> int:
        hit = ids.get(x.uid)
        if hit is not None:
            return hit
        left = [visit(y) for y in x.left]
        right = [visit(y) for y in x.right]
        ids[x.uid] = len(nodes)
        nodes.append({"id": len(nodes), "left": sorted(left), "right": sorted(right)})
        return ids[x.uid]

    root = visit(g)
    return {"root": root, "nodes": nodes}


def from_dag(data: dict, table: GameTable | None = None) -> Game:
    t = _t(table)
    built: list[Game] = []
    for node in data["nodes"]:
        built.append(t.canonical([built[i] for i in node["left"]], [built[i] for i in node["right"]]))
    return built[data["root"]]


# LR-position values -------------------------------------------------------


@dataclass
class ValueSequence:
    spec: GameSpec
    values: list[Game]

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> Game:
        return self.values[n]

    def outcomes(self) -> str:
        return "".join(game_outcome(v).value for v in self.values)


def nowakowski_values(spec: GameSpec, horizon: int, table: GameTable | None = None) -> ValueSequence:
    """Normal-play values of positions ``0 .. horizon-1``."""
    t = _t(table)
    terminal = spec.terminal.assignment
    if any(o not in (Outcome.L, Outcome.R) for o in terminal):
        raise SpecError("values are defined only for terminal rules using L and R")
    one, minus_one = t.integer(1), t.integer(-1)
    values: list[Game] = []
    for n in range(horizon):
        if n < len(terminal):
            values.append(one if terminal[n] is Outcome.L else minus_one)
            continue
        opts = [values[n - s] for s in spec.s.members_up_to(n)]
        values.append(t.canonical(opts, opts))
    return ValueSequence(spec, values)


@dataclass
class ValuePeriodReport:
    period: int
    window: int
    passed: bool
    preperiod: int | None = None
    last_mismatch: int | None = None
    additive: dict | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "window": self.window,
            "passed": self.passed,
            "preperiod": self.preperiod,
            "last_mismatch": self.last_mismatch,
            "additive": self.additive,
            "note": self.note,
        }


def _first_run(flags: Sequence[bool], length: int) -> int | None:
    """Least A with ``flags[A .. A+length-1]`` all true."""
    run = 0
    for i, ok in enumerate(flags):
        run = run + 1 if ok else 0
        if run >= length:
            return i - length + 1
    return None


def check_value_period(
    values: ValueSequence, p: int, window: int, *, additive: bool = True
) -> ValuePeriodReport:
    """Least A with ``values[n+p] == values[n]`` for all n in ``[A, A+window]``.

    When literal equality fails and ``additive`` is set, also looks for an A
    where ``values[n+p] - values[n]`` is one fixed game across the window.
    """
    if p < 1 or window < 0:
        raise SpecError("period must be >= 1 and window >= 0")
    vals = values.values
    count = len(vals) - p
    if count < window + 1:
        raise SpecError(f"need at least {window + 1 + p} values, have {len(vals)}")
    flags = [vals[n + p] is vals[n] for n in range(count)]
    start = _first_run(flags, window + 1)
    if start is not None:
        return ValuePeriodReport(p, window, True, preperiod=start)
    last = max((n for n, ok in enumerate(flags) if not ok), default=None)
    report = ValuePeriodReport(p, window, False, last_mismatch=last, note="no literal period in range")
    if additive:
        try:
            diffs = [vals[n + p] - vals[n] for n in range(count)]
        except BudgetExceeded as exc:
            report.additive = {"passed": False, "note": str(exc)}
            return report
        same = [True] + [diffs[n] is diffs[n - 1] for n in range(1, count)]
        # a window of equal differences needs window+1 equal entries, i.e. window consecutive "same" flags after the first
        a = _first_run(same[1:], window) if window else 0
        if a is not None:
            report.additive = {"passed": True, "preperiod": a, "difference": to_bracket(diffs[a])}
        else:
            report.additive = {"passed": False}
    return report


def difference_outcomes(
    values: ValueSequence, coefficients: Sequence[tuple[int, int]], positions: Iterable[int]
) -> dict[int, Outcome]:
    """Outcome of ``sum(mult * values[n + offset])`` for each n.

    A multiplier ``c`` contributes ``|c|`` copies of the value, negated when
    ``c < 0``.
    """
    vals = values.values
    out: dict[int, Outcome] = {}
    for n in positions:
        terms = []
        for mult, offset in coefficients:
            idx = n + offset
            if idx < 0 or idx >= len(vals):
                raise SpecError(f"position {idx} is outside the computed values (0..{len(vals) - 1})")
            g = vals[idx]
            if mult < 0:
                g = -g
            terms.extend([g] * abs(mult))
        table = vals[0].table
        out[n] = table.outcome(table.sum(terms))
    return out
