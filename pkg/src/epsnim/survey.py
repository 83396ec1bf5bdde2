"""Sweep over removable sets with a fixed minimum, classifying each tail.

Sets are numbered by a bitmask over ``{min+1, ..., max_bound}``; the minimum
is always present. Work is cut into contiguous index chunks, results are
appended to a CSV in chunk order, and a checkpoint after every chunk lets an
interrupted run resume where it stopped.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import random
from collections import Counter
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Iterator

from .core import GameSpec, SpecError, SubtractionSet, oracle_outcome, outcome_table
from .periodicity import TailClass, classify_tail, verify_certificate

log = logging.getLogger(__name__)

CSV_HEADER = ("set_mask", "set_text", "preperiod", "period", "tail_class", "all_L")
DEFAULT_SURVEY_HORIZON = 10**5


@dataclass
class SurveyConfig:
    min_element: int = 2
    max_bound: int = 14
    horizon: int = DEFAULT_SURVEY_HORIZON
    workers: int = 1
    out: Path | None = None
    chunk_size: int = 256

    def __post_init__(self) -> None:
        if self.min_element < 2:
            raise SpecError("min_element must be >= 2")
        if self.max_bound < self.min_element:
            raise SpecError("max_bound must be >= min_element")
        if self.workers < 1 or self.chunk_size < 1 or self.horizon < 1:
            raise SpecError("workers, chunk_size and horizon must be positive")
        if self.out is not None:
            self.out = Path(self.out)

    @property
    def total(self) -> int:
        return 1 << (self.max_bound - self.min_element)

    def fingerprint(self) -> dict:
        return {"min_element": self.min_element, "max_bound": self.max_bound, "horizon": self.horizon}


def set_from_index(config: SurveyConfig, index: int) -> SubtractionSet:
    lo = config.min_element
    members = [lo] + [lo + 1 + i for i in range(config.max_bound - lo) if index >> i & 1]
    return SubtractionSet(frozenset(members))


def set_mask(s: SubtractionSet) -> int:
    return sum(1 << m for m in s.base)


def enumerate_sets(config: SurveyConfig) -> Iterator[SubtractionSet]:
    for index in range(config.total):
        yield set_from_index(config, index)


@dataclass
class SetClassification:
    s: SubtractionSet
    tail: TailClass
    preperiod: int | None
    period: int | None

    @property
    def all_L(self) -> bool:
        return self.tail.kind == TailClass.ALL_L

    def row(self) -> tuple:
        if self.tail.kind == TailClass.MIXED:
            tail = "mixed:" + "".join(f"{o}{c}" for o, c in self.tail.counts)
        else:
            tail = self.tail.kind
        return (
            set_mask(self.s),
            str(self.s),
            "" if self.preperiod is None else self.preperiod,
            "" if self.period is None else self.period,
            tail,
            int(self.all_L),
        )


def classify_set(s: SubtractionSet, horizon: int = DEFAULT_SURVEY_HORIZON) -> SetClassification:
    if not s.is_finite():
        raise SpecError("the survey covers finite removable sets only")
    tail = classify_tail(GameSpec.lr(s), horizon)
    cert = tail.certificate
    if cert is None:
        return SetClassification(s, tail, None, None)
    return SetClassification(s, tail, cert.preperiod, cert.period)


@dataclass
class SurveyReport:
    min_element: int
    max_bound: int
    horizon: int
    total_sets: int = 0
    all_L_count: int = 0
    mixed_count: int = 0
    horizon_exceeded_count: int = 0
    period_histogram: dict[int, int] = field(default_factory=dict)

    @property
    def fraction(self) -> float:
        return self.all_L_count / self.total_sets if self.total_sets else 0.0

    def merge(self, other: "SurveyReport") -> None:
        self.total_sets += other.total_sets
        self.all_L_count += other.all_L_count
        self.mixed_count += other.mixed_count
        self.horizon_exceeded_count += other.horizon_exceeded_count
        hist = Counter(self.period_histogram)
        hist.update(other.period_histogram)
        self.period_histogram = dict(sorted(hist.items()))

    def add(self, c: SetClassification) -> None:
        self.total_sets += 1
        if c.tail.kind == TailClass.ALL_L:
            self.all_L_count += 1
        elif c.tail.kind == TailClass.MIXED:
            self.mixed_count += 1
        else:
            self.horizon_exceeded_count += 1
        if c.period is not None:
            self.period_histogram[c.period] = self.period_histogram.get(c.period, 0) + 1

    def to_dict(self) -> dict:
        return {
            "min_element": self.min_element,
            "max_bound": self.max_bound,
            "horizon": self.horizon,
            "total_sets": self.total_sets,
            "all_L_count": self.all_L_count,
            "non_all_L_count": self.mixed_count,
            "horizon_exceeded_count": self.horizon_exceeded_count,
            "fraction": self.fraction,
            "period_histogram": {str(k): v for k, v in sorted(self.period_histogram.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurveyReport":
        return cls(
            data["min_element"],
            data["max_bound"],
            data["horizon"],
            data["total_sets"],
            data["all_L_count"],
            data["non_all_L_count"],
            data["horizon_exceeded_count"],
            {int(k): v for k, v in data["period_histogram"].items()},
        )


def _run_chunk(args: tuple[SurveyConfig, int, int]) -> tuple[list[tuple], dict]:
    config, start, stop = args
    part = SurveyReport(config.min_element, config.max_bound, config.horizon)
    rows = []
    for index in range(start, stop):
        c = classify_set(set_from_index(config, index), config.horizon)
        part.add(c)
        rows.append(c.row())
    return rows, part.to_dict()


def _chunks(config: SurveyConfig, first: int) -> list[tuple[SurveyConfig, int, int]]:
    size = config.chunk_size
    out = []
    for k in range(first, -(-config.total // size)):
        out.append((config, k * size, min(config.total, (k + 1) * size)))
    return out


def _write_json_atomic(path: Path, data: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def run_survey(config: SurveyConfig, resume: bool = True) -> SurveyReport:
    """Classify every set of the family and aggregate the counts.

    With ``config.out`` set, writes ``sets.csv``, ``checkpoint.json`` and
    ``summary.json`` there. A matching checkpoint is resumed unless
    ``resume`` is false.
    """
    report = SurveyReport(config.min_element, config.max_bound, config.horizon)
    first_chunk = 0
    csv_fh = None
    csv_path = ckpt_path = None
    if config.out is not None:
        config.out.mkdir(parents=True, exist_ok=True)
        csv_path = config.out / "sets.csv"
        ckpt_path = config.out / "checkpoint.json"
        ckpt = None
        if resume and ckpt_path.exists() and csv_path.exists():
            ckpt = json.loads(ckpt_path.read_text())
            if ckpt.get("config") != config.fingerprint() or ckpt.get("chunk_size") != config.chunk_size:
                raise SpecError(f"checkpoint in {config.out} belongs to a different survey; use a fresh directory")
        if ckpt is not None:
            first_chunk = ckpt["next_chunk"]
            report = SurveyReport.from_dict(ckpt["report"])
            csv_fh = open(csv_path, "r+", newline="")
            csv_fh.truncate(ckpt["csv_bytes"])
            csv_fh.seek(ckpt["csv_bytes"])
            log.info("resuming %s at chunk %d", config.out, first_chunk)
        else:
            csv_fh = open(csv_path, "w", newline="")
            csv.writer(csv_fh).writerow(CSV_HEADER)

    def record(k: int, rows: list[tuple], part: dict) -> None:
        report.merge(SurveyReport.from_dict(part))
        if csv_fh is None:
            return
        buf = io.StringIO()
        csv.writer(buf).writerows(rows)
        csv_fh.write(buf.getvalue())
        csv_fh.flush()
        os.fsync(csv_fh.fileno())
        _write_json_atomic(
            ckpt_path,
            {
                "config": config.fingerprint(),
                "chunk_size": config.chunk_size,
                "next_chunk": k + 1,
                "csv_bytes": csv_fh.tell(),
                "report": report.to_dict(),
            },
        )

    chunks = _chunks(config, first_chunk)
    try:
        if config.workers == 1:
            for k, job in enumerate(chunks, start=first_chunk):
                record(k, *_run_chunk(job))
        else:
            with get_context("spawn" if os.name == "nt" else "fork").Pool(config.workers) as pool:
                for k, result in enumerate(pool.imap(_run_chunk, chunks), start=first_chunk):
                    record(k, *result)
    finally:
        if csv_fh is not None:
            csv_fh.close()
    if config.out is not None:
        _write_json_atomic(config.out / "summary.json", report.to_dict())
    return report


def read_rows(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def spot_check(config: SurveyConfig, sample: int = 50, seed: int = 0, max_n: int = 60) -> list[str]:
    """Re-derive a random sample of classifications by independent routes.

    Each sampled set's table prefix is compared with the search oracle on
    ``0..max_n`` and its certificate is replayed to four times its length.
    Returns a list of problems (empty when everything agrees).
    """
    rng = random.Random(seed)
    indices = rng.sample(range(config.total), min(sample, config.total))
    problems = []
    for index in sorted(indices):
        s = set_from_index(config, index)
        spec = GameSpec.lr(s)
        c = classify_set(s, config.horizon)
        table = outcome_table(spec, max_n + 1).to_string()
        oracle = "".join(oracle_outcome(spec, n).value for n in range(max_n + 1))
        if table != oracle:
            problems.append(f"{s}: table and oracle disagree on 0..{max_n}")
        cert = c.tail.certificate
        if cert is None:
            problems.append(f"{s}: no certificate within horizon {config.horizon}")
            continue
        check = max(4 * cert.horizon, cert.preperiod + 2 * cert.period)
        verdict = verify_certificate(spec, cert, check)
        if not verdict:
            problems.append(f"{s}: certificate fails replay: {verdict.detail}")
        expect_all_l = set(table[cert.preperiod :]) == {"L"} if cert.preperiod <= max_n - cert.period else None
        if expect_all_l is not None and expect_all_l != c.all_L:
            problems.append(f"{s}: all_L={c.all_L} but oracle tail on 0..{max_n} says {expect_all_l}")
    return problems
