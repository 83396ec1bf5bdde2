"""Checkers for the structural laws of LR outcome sequences.

Every checker works on an already computed :class:`OutcomeSequence` when one
is passed in, so a single table can feed all of them. Violations are data,
never exceptions.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable

from .core import GameSpec, Outcome, OutcomeSequence, SpecError, SubtractionSet, outcome_table
from .periodicity import HorizonExceeded, detect_period

L, R, N, P = Outcome.L, Outcome.R, Outcome.N, Outcome.P


@dataclass
class Violation:
    position: int
    constraint: str
    observed: str


@dataclass
class LawReport:
    law_id: str
    spec: str
    horizon: int
    violations: list[Violation] = field(default_factory=list)
    skipped: bool = False
    note: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


def _table(spec: GameSpec, length: int, seq: OutcomeSequence | None) -> str:
    if seq is not None and len(seq) >= length:
        return seq.to_string()
    return outcome_table(spec, length).to_string()


def _names(outcomes: Iterable[Outcome]) -> str:
    return "{" + ",".join(o.value for o in outcomes) + "}"


def _neighbour_law(
    law_id: str, spec: GameSpec, horizon: int, seq: str, premise: set[Outcome], allowed: set[Outcome]
) -> LawReport:
    report = LawReport(law_id, str(spec), horizon)
    constraint = f"O(n) in {_names(sorted(premise))} => O(n-1), O(n+1) in {_names(sorted(allowed))}"
    pre = {o.value for o in premise}
    ok = {o.value for o in allowed}
    for n in range(horizon):
        if seq[n] not in pre:
            continue
        for m in (n - 1, n + 1):
            if m >= 0 and seq[m] not in ok:
                report.violations.append(Violation(n, constraint, f"O({n})={seq[n]}, O({m})={seq[m]}"))
                break
    return report


def _runs(seq: str, symbol: str) -> list[tuple[int, int]]:
    """Maximal runs of ``symbol`` as half-open ``(start, end)`` intervals."""
    runs = []
    n = 0
    while n < len(seq):
        if seq[n] != symbol:
            n += 1
            continue
        start = n
        while n < len(seq) and seq[n] == symbol:
            n += 1
        runs.append((start, n))
    return runs


def check_structure(spec: GameSpec, horizon: int, seq: OutcomeSequence | None = None) -> list[LawReport]:
    """Neighbour and run-length laws for positions ``0 .. horizon-1``.

    Uses outcomes up to position ``horizon``. Runs that touch position 0 have
    no left flank and runs that reach the end of the table are open on the
    right; those flanks are not checked.
    """
    if not spec.is_lr():
        raise SpecError("structural laws are stated for the LR terminal rule")
    if horizon < 1:
        raise SpecError("horizon must be >= 1")
    s = _table(spec, horizon + 1, seq)[: horizon + 1]
    last = len(s)
    reports = [
        _neighbour_law("rn_neighbours", spec, horizon, s, {R, N}, {L, N}),
        _neighbour_law("rp_neighbours", spec, horizon, s, {R, P}, {L, P}),
        _neighbour_law("r_neighbours", spec, horizon, s, {R}, {L}),
        _neighbour_law("p_neighbours", spec, horizon, s, {P}, {L, P}),
        _neighbour_law("n_neighbours", spec, horizon, s, {N}, {L, N}),
    ]

    bound = spec.s.min() - 1
    p_runs = LawReport("p_runs", str(spec), horizon)
    for start, end in _runs(s, "P"):
        if end - start > bound:
            p_runs.violations.append(
                Violation(start, f"P-run length <= min(S)-1 = {bound}", f"run [{start},{end}) of length {end - start}")
            )
        if start > 0 and s[start - 1] != "L":
            p_runs.violations.append(Violation(start, "P-run left flank is L", f"O({start - 1})={s[start - 1]}"))
        if end < last and s[end] != "L":
            p_runs.violations.append(Violation(end - 1, "P-run right flank is L", f"O({end})={s[end]}"))
    reports.append(p_runs)

    n_runs = _runs(s, "N")
    flanks = LawReport("n_run_flanks", str(spec), horizon)
    open_runs = []
    for start, end in n_runs:
        if start > 0 and s[start - 1] != "L":
            flanks.violations.append(Violation(start, "N-run left flank is L", f"O({start - 1})={s[start - 1]}"))
        if end < last:
            if s[end] != "L":
                flanks.violations.append(Violation(end - 1, "N-run right flank is L", f"O({end})={s[end]}"))
        else:
            open_runs.append(start)
    if open_runs:
        flanks.note = f"N-run from {open_runs[0]} reaches the end of the table; right flank unchecked"
    reports.append(flanks)

    if spec.s.is_finite():
        n_bound = spec.s.max() - 1
        bound_report = LawReport("n_run_bound", str(spec), horizon)
        for start, end in n_runs:
            if end - start > n_bound:
                bound_report.violations.append(
                    Violation(
                        start, f"N-run length <= max(S)-1 = {n_bound}", f"run [{start},{end}) of length {end - start}"
                    )
                )
    else:
        bound_report = LawReport(
            "n_run_bound", str(spec), horizon, skipped=True, note="run-length bound needs a finite removable set"
        )
        if open_runs:
            bound_report.extra["unbounded_n_run_from"] = open_runs[0]
    reports.append(bound_report)
    return reports


def check_mirrored(spec: GameSpec, horizon: int, seq: OutcomeSequence | None = None) -> list[LawReport]:
    """The neighbour laws with Left and Right swapped.

    These do not hold in general; the reports are expected to show
    violations and serve as the asymmetry probe.
    """
    s = _table(spec, horizon + 1, seq)[: horizon + 1]
    return [
        _neighbour_law("mirror_ln_neighbours", spec, horizon, s, {L, N}, {R, N}),
        _neighbour_law("mirror_lp_neighbours", spec, horizon, s, {L, P}, {R, P}),
    ]


def check_psym(spec: GameSpec, p: int, horizon: int, seq: OutcomeSequence | None = None) -> list[LawReport]:
    """Laws that hold when ``p - s`` is in S for every ``s`` in S."""
    if not spec.s.is_finite() or not spec.s.is_symmetric(p):
        raise SpecError(f"{spec.s} is not {p}-symmetric")
    s = _table(spec, horizon, seq)[:horizon]
    tag = str(spec)

    def shift_law(law_id: str, premise: str, allowed: str, backwards: bool = False) -> LawReport:
        report = LawReport(law_id, tag, horizon)
        for m in range(horizon - p):
            a, b = s[m], s[m + p]
            if backwards:
                if b in premise and a not in allowed:
                    report.violations.append(Violation(m, f"O(m+p) in {premise} => O(m) in {allowed}", f"O({m})={a}, O({m + p})={b}"))
            elif a in premise and b not in allowed:
                report.violations.append(Violation(m, f"O(m) in {premise} => O(m+p) in {allowed}", f"O({m})={a}, O({m + p})={b}"))
        return report

    reports = [
        shift_law("psym_a", "L", "LP"),
        shift_law("psym_b", "R", "RP"),
        shift_law("psym_c", "P", "P"),
        shift_law("psym_d", "N", "N", backwards=True),
    ]

    period = LawReport("psym_e_period", tag, horizon)
    try:
        cert = detect_period(spec)
    except HorizonExceeded as exc:
        period.violations.append(Violation(0, f"{p} is an eventual period", str(exc)))
    else:
        period.extra = {"preperiod": cert.preperiod, "period": cert.period}
        if p % cert.period:
            period.violations.append(
                Violation(cert.preperiod, f"{p} is an eventual period", f"least period is {cert.period}")
            )
        for i in range(min(p, horizon)):
            column = s[i::p]
            changes = sum(1 for a, b in zip(column, column[1:]) if a != b)
            if changes > 2:
                period.violations.append(Violation(i, "column O(i+kp) settles after at most two changes", column))
    reports.append(period)

    if spec.is_lr():
        lr = LawReport("psym_f_lr", tag, horizon)
        for k in range((horizon - 2) // p + 1):
            m = 1 + k * p
            if m < horizon and s[m] not in "RP":
                lr.violations.append(Violation(m, "O(1+kp) in {R,P}", f"O({m})={s[m]}"))
        if lr.passed:
            try:
                cert = detect_period(spec)
                if cert.period == 1:
                    lr.violations.append(Violation(cert.preperiod, "least period >= 2", "period 1"))
            except HorizonExceeded:
                pass
    else:
        lr = LawReport("psym_f_lr", tag, horizon, skipped=True, note="stated for the LR terminal rule")
    reports.append(lr)

    terminals = set(spec.terminal.assignment)
    constant = LawReport("psym_g_not_constant", tag, horizon)
    if P in terminals or {L, R} <= terminals:
        if len(set(s)) == 1:
            constant.violations.append(Violation(0, "not purely periodic with period 1", s[:20]))
    else:
        constant.skipped = True
        constant.note = "terminal outcomes have no P and not both L and R"
    reports.append(constant)
    return reports


def normal_play_outcomes(s: SubtractionSet, horizon: int) -> list[Outcome]:
    """Last-player-wins outcomes (N or P) of positions ``0 .. horizon-1``."""
    if not s.is_finite():
        raise SpecError("normal-play table needs a finite removable set")
    members = sorted(s.base)
    out: list[Outcome] = []
    for n in range(horizon):
        out.append(N if any(out[n - m] is P for m in members if m <= n) else P)
    return out


def check_carret(
    s: SubtractionSet,
    horizon: int,
    lr: OutcomeSequence | str | None = None,
    normal: list[Outcome] | None = None,
) -> LawReport:
    """Compare LR outcomes with normal-play outcomes on ``0 .. horizon``.

    When every LR R-position is a normal-play P-position, LR P must be
    normal P and LR N must be normal N. Otherwise the report passes
    vacuously and records the least counterexample to the hypothesis.
    """
    spec = GameSpec.lr(s)
    length = horizon + 1
    if lr is None:
        lr_text = outcome_table(spec, length).to_string()
    else:
        lr_text = lr if isinstance(lr, str) else lr.to_string()
    if normal is None:
        normal = normal_play_outcomes(s, length)
    report = LawReport("carret", str(spec), horizon)
    for n in range(length):
        if lr_text[n] == "R" and normal[n] is not P:
            report.extra = {"hypothesis": False, "counterexample": n}
            report.note = f"hypothesis fails at {n} (LR R, normal N); conclusions hold vacuously"
            return report
    report.extra = {"hypothesis": True}
    for n in range(length):
        if lr_text[n] == "P" and normal[n] is not P:
            report.violations.append(Violation(n, "LR P => normal P", f"normal O({n})={normal[n].value}"))
        elif lr_text[n] == "N" and normal[n] is not N:
            report.violations.append(Violation(n, "LR N => normal N", f"normal O({n})={normal[n].value}"))
    return report
