"""Game specifications and outcome sequences for ending partizan subtraction nim.

Both players share one move map ``n -> {n - s : s in S, n - s >= 0}``; the
game is partizan only through the rule that decides the winner at a terminal
position.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

DEFAULT_MAX_HORIZON = 50_000_000
ORACLE_CAP = 200


class Outcome(str, enum.Enum):
    L = "L"
    R = "R"
    N = "N"
    P = "P"

    def __str__(self) -> str:
        return self.value

    @property
    def code(self) -> int:
        return _CODE[self]

    @classmethod
    def from_code(cls, code: int) -> "Outcome":
        return _BY_CODE[code]


_BY_CODE = (Outcome.L, Outcome.R, Outcome.N, Outcome.P)
_CODE = {o: i for i, o in enumerate(_BY_CODE)}
L_CODE, R_CODE, N_CODE, P_CODE = 0, 1, 2, 3


def _outcome_from_options(mask: int) -> int:
    """Outcome code of a position whose option outcomes form ``mask``.

    ``mask`` has bit ``c`` set when some option has outcome code ``c``.
    """
    has_l = bool(mask & (1 << L_CODE))
    has_r = bool(mask & (1 << R_CODE))
    has_p = bool(mask & (1 << P_CODE))
    if has_p or (has_l and has_r):
        return N_CODE
    if has_l:
        return L_CODE
    if has_r:
        return R_CODE
    return P_CODE  # only N among the options


# OUTCOME_OF_MASK[mask] for every nonempty option-outcome set.
OUTCOME_OF_MASK = bytes([0] + [_outcome_from_options(m) for m in range(1, 16)])


class SpecError(ValueError):
    """Invalid set, rule or parameter."""


class BudgetExceeded(RuntimeError):
    """A configured size or horizon budget would be exceeded."""


@dataclass(frozen=True)
class SubtractionSet:
    """A removable set: a finite base plus an optional arithmetic tail.

    The tail ``(start, step)`` stands for ``{start + k*step : k >= 0}``.
    """

    base: frozenset[int] = frozenset()
    tail: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", frozenset(int(b) for b in self.base))
        if self.tail is not None:
            start, step = (int(v) for v in self.tail)
            if start < 2 or step < 1:
                raise SpecError(f"tail needs start >= 2 and step >= 1, got {self.tail}")
            object.__setattr__(self, "tail", (start, step))
        if not self.base and self.tail is None:
            raise SpecError("removable set must be nonempty")
        bad = sorted(b for b in self.base if b < 2)
        if bad:
            raise SpecError(f"removable amounts must be >= 2, got {bad}")

    @classmethod
    def of(cls, *members: int) -> "SubtractionSet":
        return cls(frozenset(members))

    @classmethod
    def parse(cls, text: str) -> "SubtractionSet":
        return parse_set(text)

    def is_finite(self) -> bool:
        return self.tail is None

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, int):
            return False
        if n in self.base:
            return True
        if self.tail is None:
            return False
        start, step = self.tail
        return n >= start and (n - start) % step == 0

    def min(self) -> int:
        candidates = list(self.base)
        if self.tail is not None:
            candidates.append(self.tail[0])
        return min(candidates)

    def max(self) -> int:
        if self.tail is not None:
            raise SpecError("max() is undefined for an infinite removable set")
        return max(self.base)

    def members_up_to(self, n: int) -> tuple[int, ...]:
        """All members ``<= n`` in ascending order."""
        out = {b for b in self.base if b <= n}
        if self.tail is not None:
            start, step = self.tail
            out.update(range(start, n + 1, step))
        return tuple(sorted(out))

    def is_symmetric(self, p: int) -> bool:
        """True when ``p - s`` is a member for every member ``s``."""
        if not self.is_finite():
            return False
        return all((p - s) in self.base for s in self.base)

    def __str__(self) -> str:
        text = "{" + ",".join(str(b) for b in sorted(self.base)) + "}" if self.base else ""
        if self.tail is not None:
            start, step = self.tail
            tail = f"{{{start}..step{step}}}"
            text = f"{tail} ∪ {text}" if text else tail
        return text


_INT = re.compile(r"^-?\d+$")
_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")
_TAIL = re.compile(r"^(\d+)\.\.(?:step(\d+))?$")

SET_GRAMMAR = """\
set syntax:
  {2,3,6}              finite set
  {2..6}               inclusive range, same as {2,3,4,5,6}
  {3..step2}           infinite tail 3, 5, 7, ...
  {2..}                infinite tail 2, 3, 4, ...
  {3..step2} ∪ {4}     union of groups ('∪', 'U' or 'u' between groups)
at most one infinite tail; every member must be >= 2"""


def parse_set(text: str) -> SubtractionSet:
    groups = re.split(r"\s*(?:∪|\bU\b|\bu\b)\s*", text.strip())
    base: set[int] = set()
    tail: tuple[int, int] | None = None
    for group in groups:
        group = group.strip()
        if not (group.startswith("{") and group.endswith("}")):
            raise SpecError(f"bad set group {group!r}\n{SET_GRAMMAR}")
        body = group[1:-1].strip()
        if not body:
            continue
        for item in body.split(","):
            item = item.strip().replace(" ", "")
            if _INT.match(item):
                base.add(int(item))
            elif m := _RANGE.match(item):
                base.update(range(int(m.group(1)), int(m.group(2)) + 1))
            elif m := _TAIL.match(item):
                if tail is not None:
                    raise SpecError(f"more than one infinite tail in {text!r}\n{SET_GRAMMAR}")
                tail = (int(m.group(1)), int(m.group(2) or 1))
            else:
                raise SpecError(f"bad set element {item!r}\n{SET_GRAMMAR}")
    return SubtractionSet(frozenset(base), tail)


@dataclass(frozen=True)
class TerminalRule:
    """Outcome of each terminal position ``0 .. len(assignment)-1``."""

    assignment: tuple[Outcome, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(Outcome(o) for o in self.assignment))
        if not self.assignment:
            raise SpecError("terminal rule must cover position 0")

    @classmethod
    def lr(cls, min_s: int) -> "TerminalRule":
        """Left wins on an even remainder, Right on an odd one."""
        return cls(tuple(Outcome.L if m % 2 == 0 else Outcome.R for m in range(min_s)))

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Outcome | str]) -> "TerminalRule":
        if sorted(mapping) != list(range(len(mapping))):
            raise SpecError(f"terminal rule domain must be 0..k-1, got {sorted(mapping)}")
        return cls(tuple(Outcome(mapping[m]) for m in range(len(mapping))))

    @classmethod
    def parse(cls, text: str) -> "TerminalRule":
        """Parse an outcome string such as ``"NL"`` (position 0 first)."""
        try:
            return cls(tuple(Outcome(c) for c in text.strip().upper()))
        except ValueError as exc:
            raise SpecError(f"terminal rule must be a string over LRNP, got {text!r}") from exc

    def __getitem__(self, m: int) -> Outcome:
        return self.assignment[m]

    def __len__(self) -> int:
        return len(self.assignment)

    def is_lr(self) -> bool:
        return self.assignment == TerminalRule.lr(len(self.assignment)).assignment

    def __str__(self) -> str:
        return "".join(o.value for o in self.assignment)


@dataclass(frozen=True)
class GameSpec:
    s: SubtractionSet
    terminal: TerminalRule

    def __post_init__(self) -> None:
        if len(self.terminal) != self.s.min():
            raise SpecError(
                f"terminal rule covers {len(self.terminal)} positions, "
                f"but positions 0..{self.s.min() - 1} are terminal"
            )

    @classmethod
    def lr(cls, s: SubtractionSet | str | Iterable[int]) -> "GameSpec":
        s = _as_set(s)
        return cls(s, TerminalRule.lr(s.min()))

    @classmethod
    def with_terminals(cls, s: SubtractionSet | str | Iterable[int], terminal: str | Sequence) -> "GameSpec":
        s = _as_set(s)
        rule = TerminalRule.parse(terminal) if isinstance(terminal, str) else TerminalRule(tuple(terminal))
        return cls(s, rule)

    def is_lr(self) -> bool:
        return self.terminal.is_lr()

    def __str__(self) -> str:
        return str(self.s) if self.is_lr() else f"{self.s} W={self.terminal}"


def _as_set(s: SubtractionSet | str | Iterable[int]) -> SubtractionSet:
    if isinstance(s, SubtractionSet):
        return s
    if isinstance(s, str):
        return parse_set(s)
    return SubtractionSet(frozenset(s))


@dataclass(frozen=True)
class OutcomeSequence:
    """Outcomes at positions ``0 .. len(codes)-1``, stored as 2-bit codes."""

    spec: GameSpec
    codes: bytes = field(repr=False)

    def __len__(self) -> int:
        return len(self.codes)

    def __getitem__(self, n: int) -> Outcome:
        return _BY_CODE[self.codes[n]]

    @property
    def values(self) -> list[Outcome]:
        return [_BY_CODE[c] for c in self.codes]

    def to_string(self) -> str:
        return self.codes.translate(_CODE_TO_CHAR).decode("ascii")

    def to_json(self) -> str:
        return json.dumps(list(self.to_string()))

    def __str__(self) -> str:
        return self.to_string()


_CODE_TO_CHAR = bytes.maketrans(bytes(range(4)), b"LRNP")
_CHAR_TO_CODE = bytes.maketrans(b"LRNP", bytes(range(4)))


def codes_from_string(text: str) -> bytes:
    if set(text) - set("LRNP"):
        raise SpecError(f"outcome strings use only L, R, N, P: {text!r}")
    return text.encode("ascii").translate(_CHAR_TO_CODE)


def options(spec: GameSpec, n: int) -> tuple[int, ...]:
    if n < 0:
        raise SpecError(f"position must be >= 0, got {n}")
    return tuple(sorted(n - s for s in spec.s.members_up_to(n)))


def extend_codes(spec: GameSpec, codes: bytearray, horizon: int) -> None:
    """Append outcome codes to ``codes`` until it holds ``horizon`` positions."""
    start = len(codes)
    terminal = spec.terminal.assignment
    k = len(terminal)
    s = spec.s
    table = OUTCOME_OF_MASK
    if s.is_finite():
        members = sorted(s.base)
        for n in range(start, horizon):
            if n < k:
                codes.append(_CODE[terminal[n]])
                continue
            mask = 0
            for m in members:
                if m > n:
                    break
                mask |= 1 << codes[n - m]
            codes.append(table[mask])
        return
    base = sorted(s.base)
    tail_start, step = s.tail
    # reach[j]: outcome bits of positions j, j-step, j-2*step, ... >= 0,
    # which are exactly the tail options of n = j + tail_start
    reach = bytearray()
    for j, c in enumerate(codes):
        reach.append((1 << c) | (reach[j - step] if j >= step else 0))
    for n in range(start, horizon):
        if n < k:
            c = _CODE[terminal[n]]
        else:
            mask = reach[n - tail_start] if n >= tail_start else 0
            for m in base:
                if m > n:
                    break
                mask |= 1 << codes[n - m]
            c = table[mask]
        codes.append(c)
        reach.append((1 << c) | (reach[n - step] if n >= step else 0))


def outcome_table(spec: GameSpec, horizon: int, *, max_horizon: int = DEFAULT_MAX_HORIZON) -> OutcomeSequence:
    """Outcomes of positions ``0 .. horizon-1``, bottom-up."""
    if horizon < 0:
        raise SpecError(f"horizon must be >= 0, got {horizon}")
    if horizon > max_horizon:
        raise BudgetExceeded(f"horizon {horizon} exceeds the memory budget of {max_horizon} positions")
    codes = bytearray()
    extend_codes(spec, codes, horizon)
    return OutcomeSequence(spec, bytes(codes))


def oracle_outcome(spec: GameSpec, n: int, *, cap: int = ORACLE_CAP) -> Outcome:
    """Outcome of ``n`` by plain two-player search from the terminal winners.

    Deliberately avoids the outcome-set case split: it decides, for each
    player, whether that player wins when moving first, and combines the
    two answers.
    """
    if n < 0:
        raise SpecError(f"position must be >= 0, got {n}")
    if n > cap:
        raise BudgetExceeded(f"oracle is capped at n <= {cap}, got {n}")
    return _oracle_for(spec)(n)


@lru_cache(maxsize=256)
def _oracle_for(spec: GameSpec):
    terminal = spec.terminal.assignment
    # W_L(m) = Win for terminal outcomes L and N; W_R(m) = Win for R and N.
    left_wins_at_end = {m for m, o in enumerate(terminal) if o in (Outcome.L, Outcome.N)}
    right_wins_at_end = {m for m, o in enumerate(terminal) if o in (Outcome.R, Outcome.N)}

    @lru_cache(maxsize=None)
    def wins_moving_first(left: bool, n: int) -> bool:
        opts = [n - s for s in spec.s.members_up_to(n)]
        if not opts:
            return n in (left_wins_at_end if left else right_wins_at_end)
        return any(not wins_moving_first(not left, m) for m in opts)

    def outcome(n: int) -> Outcome:
        for m in range(n + 1):  # warm bottom-up to keep the recursion shallow
            wins_moving_first(True, m)
            wins_moving_first(False, m)
        left_first = wins_moving_first(True, n)
        right_first = wins_moving_first(False, n)
        if left_first and right_first:
            return Outcome.N
        if left_first:
            return Outcome.L
        if right_first:
            return Outcome.R
        return Outcome.P

    return outcome
