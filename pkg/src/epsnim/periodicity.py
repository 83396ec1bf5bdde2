"""Eventual periodicity of outcome sequences.

For a finite removable set with largest member ``k``, the outcome at any
``n >= k`` is a function of the ``k`` outcomes just before it, so two equal
windows of length ``k`` fix the rest of the sequence. Detection slides that
window along the sequence and stops at the first repeat.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .core import (
    OUTCOME_OF_MASK,
    GameSpec,
    Outcome,
    OutcomeSequence,
    SpecError,
    codes_from_string,
    extend_codes,
    outcome_table,
)

DEFAULT_HORIZON = 10**6
DEFAULT_INFINITE_HORIZON = 3000


class HorizonExceeded(Exception):
    """No period was found among the positions that were computed."""

    def __init__(self, spec: GameSpec, horizon: int):
        super().__init__(f"no period found for {spec} within {horizon} positions")
        self.spec = spec
        self.horizon = horizon


@dataclass(frozen=True)
class PeriodCertificate:
    """``O(m + period) == O(m)`` for every ``m >= preperiod``.

    ``window`` holds the outcomes at ``[preperiod, preperiod + period + k)``
    where ``k`` is the largest member of a finite set; when ``proved`` is set,
    equality of its first and last ``k`` entries forces periodicity forever.
    For an infinite set the certificate is only an observation over
    ``horizon`` positions.
    """

    preperiod: int
    period: int
    proved: bool
    window: str
    horizon: int = field(default=0, compare=False)

    def to_dict(self) -> dict:
        return {"preperiod": self.preperiod, "period": self.period, "proved": self.proved, "window": self.window}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PeriodCertificate":
        return cls(int(data["preperiod"]), int(data["period"]), bool(data["proved"]), str(data["window"]))

    def period_outcomes(self) -> str:
        return self.window[: self.period]


@dataclass(frozen=True)
class TailClass:
    kind: str  # "all_L", "mixed" or "horizon_exceeded"
    counts: tuple[tuple[str, int], ...] = ()
    certificate: PeriodCertificate | None = None

    ALL_L = "all_L"
    MIXED = "mixed"
    HORIZON_EXCEEDED = "horizon_exceeded"

    @property
    def multiset(self) -> dict[str, int]:
        return dict(self.counts)

    @property
    def classes(self) -> frozenset[str]:
        return frozenset(o for o, _ in self.counts)

    def __str__(self) -> str:
        if self.kind == self.MIXED:
            body = ",".join(f"{o}x{c}" for o, c in self.counts)
            return f"mixed{{{body}}}"
        return self.kind


@dataclass
class VerifyReport:
    passed: bool
    first_violation: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def _divisors(p: int) -> list[int]:
    small = [d for d in range(1, int(p**0.5) + 1) if p % d == 0]
    return sorted(set(small + [p // d for d in small]))


def _minimize(codes: bytes | bytearray, start: int, p: int) -> tuple[int, int]:
    """Least (preperiod, period) given that ``codes`` is ``p``-periodic from ``start``.

    Needs ``len(codes) >= start + 2*p``.
    """
    best = p
    for d in _divisors(p):
        if all(codes[m + d] == codes[m] for m in range(start, start + p)):
            best = d
            break
    a = start
    while a > 0 and codes[a - 1] == codes[a - 1 + best]:
        a -= 1
    return a, best


def _detect_finite(spec: GameSpec, horizon: int) -> tuple[PeriodCertificate, bytearray]:
    s = spec.s
    k = s.max()
    members = sorted(s.base)
    codes = bytearray()
    extend_codes(spec, codes, min(k, horizon))
    if horizon < k:
        raise HorizonExceeded(spec, horizon)
    keep = (1 << (2 * k)) - 1
    window = 0
    for c in codes:
        window = (window << 2) | c
    seen = {window: k}  # window of positions [n - k, n) keyed to n
    table = OUTCOME_OF_MASK
    offsets = [2 * (m - 1) for m in members]
    found = None
    for n in range(k, horizon):
        mask = 0
        for bit in offsets:
            mask |= 1 << ((window >> bit) & 3)
        c = table[mask]
        codes.append(c)
        window = ((window << 2) | c) & keep
        prev = seen.get(window)
        if prev is not None:
            found = (prev, n + 1)
            break
        seen[window] = n + 1
    if found is None:
        raise HorizonExceeded(spec, horizon)
    x, y = found
    p = y - x
    start = x - k
    # enough room to test every divisor over a full period and to cut the witness
    extend_codes(spec, codes, max(len(codes), start + 2 * p + k + 1))
    a, period = _minimize(codes, start, p)
    window_text = bytes(codes[a : a + period + k]).translate(_TO_CHAR).decode()
    cert = PeriodCertificate(a, period, True, window_text, horizon=len(codes))
    return cert, codes


_TO_CHAR = bytes.maketrans(bytes(range(4)), b"LRNP")


def _detect_observed(spec: GameSpec, horizon: int) -> PeriodCertificate:
    codes = outcome_table(spec, horizon).codes
    h = len(codes)
    for p in range(1, h // 3 + 1):
        # least A with codes[m + p] == codes[m] for all m in [A, h - p)
        a = h - p
        while a > 0 and codes[a - 1] == codes[a - 1 + p]:
            a -= 1
        if a <= h - 3 * p:
            text = bytes(codes[a : a + p]).translate(_TO_CHAR).decode()
            return PeriodCertificate(a, p, False, text, horizon=h)
    raise HorizonExceeded(spec, horizon)


def detect_period(spec: GameSpec, horizon: int | None = None) -> PeriodCertificate:
    """Least eventual period and preperiod of the outcome sequence.

    Finite sets yield a proved certificate. Infinite sets are scanned over
    ``horizon`` positions and the least ``(preperiod, period)`` with
    ``period <= horizon/3`` consistent with all of them is returned unproved.
    Raises :class:`HorizonExceeded` when nothing is found.
    """
    if spec.s.is_finite():
        h = DEFAULT_HORIZON if horizon is None else horizon
        if h < spec.s.min():
            raise SpecError(f"horizon must be >= min(S) = {spec.s.min()}")
        return _detect_finite(spec, h)[0]
    h = DEFAULT_INFINITE_HORIZON if horizon is None else horizon
    if h < spec.s.min():
        raise SpecError(f"horizon must be >= min(S) = {spec.s.min()}")
    return _detect_observed(spec, h)


def verify_certificate(
    spec: GameSpec, cert: PeriodCertificate, check_horizon: int, seq: OutcomeSequence | None = None
) -> VerifyReport:
    """Replay the sequence to ``check_horizon`` and test the claimed period.

    Checks ``O(m + p) == O(m)`` for ``m`` in ``[A, check_horizon - p]``; for a
    finite set it also checks that the stored witness matches the replay and
    that its two length-``max(S)`` windows agree.
    """
    a, p = cert.preperiod, cert.period
    if p < 1 or a < 0:
        return VerifyReport(False, None, f"invalid certificate (A={a}, p={p})")
    if check_horizon < a + 2 * p:
        raise SpecError(f"check_horizon must be >= A + 2p = {a + 2 * p}")
    if seq is None or len(seq) < check_horizon + 1:
        seq = outcome_table(spec, check_horizon + 1)
    codes = seq.codes
    for m in range(a, check_horizon - p + 1):
        if codes[m + p] != codes[m]:
            return VerifyReport(
                False, m, f"O({m})={Outcome.from_code(codes[m])} but O({m + p})={Outcome.from_code(codes[m + p])}"
            )
    if spec.s.is_finite() and cert.proved:
        k = spec.s.max()
        want = a + p + k
        if len(codes) < want:
            codes = outcome_table(spec, want).codes
        replay = codes[a:want]
        if cert.window and codes_from_string(cert.window) != replay:
            return VerifyReport(False, None, "witness window does not match the replayed outcomes")
        if replay[:k] != replay[p : p + k]:
            first = next(i for i in range(k) if replay[i] != replay[p + i])
            return VerifyReport(False, a + first, "witness windows at A and A+p differ")
    return VerifyReport(True)


def classify_tail(spec: GameSpec, horizon: int | None = None) -> TailClass:
    try:
        cert = detect_period(spec, horizon)
    except HorizonExceeded:
        return TailClass(TailClass.HORIZON_EXCEEDED)
    return tail_from_certificate(cert)


def tail_from_certificate(cert: PeriodCertificate) -> TailClass:
    period = cert.period_outcomes()
    counts = Counter(period)
    ordered = tuple((o.value, counts[o.value]) for o in Outcome if counts[o.value])
    kind = TailClass.ALL_L if set(period) == {"L"} else TailClass.MIXED
    return TailClass(kind, ordered, cert)
