import csv
import json

import pytest

from epsnim.core import SpecError, SubtractionSet
from epsnim.periodicity import TailClass
from epsnim.survey import (
    CSV_HEADER,
    SurveyConfig,
    classify_set,
    enumerate_sets,
    read_rows,
    run_survey,
    set_from_index,
    spot_check,
)


def test_enumerate_examples():
    assert [str(s) for s in enumerate_sets(SurveyConfig(2, 3))] == ["{2}", "{2,3}"]
    assert [str(s) for s in enumerate_sets(SurveyConfig(2, 4))] == ["{2}", "{2,3}", "{2,4}", "{2,3,4}"]
    assert SurveyConfig(2, 29).total == 134217728
    assert SurveyConfig(3, 30).total == 134217728


def test_enumeration_is_exhaustive_and_unique():
    config = SurveyConfig(3, 9)
    sets = list(enumerate_sets(config))
    assert len(sets) == 2 ** 6 == len(set(sets))
    assert all(s.min() == 3 and s.max() <= 9 for s in sets)
    assert set_from_index(config, 0) == SubtractionSet.of(3)


def test_config_validation():
    with pytest.raises(SpecError):
        SurveyConfig(1, 5)
    with pytest.raises(SpecError):
        SurveyConfig(5, 4)
    with pytest.raises(SpecError):
        SurveyConfig(2, 5, workers=0)


def test_classify_examples():
    c = classify_set(SubtractionSet.of(2, 3, 6))
    assert c.all_L and (c.preperiod, c.period) == (8, 1)
    c = classify_set(SubtractionSet.of(2, 3))
    assert not c.all_L and c.tail.multiset == {"L": 2, "N": 2, "P": 1}
    c = classify_set(SubtractionSet.of(2, 4))
    assert not c.all_L and c.tail.multiset == {"L": 1, "R": 1}
    c = classify_set(SubtractionSet.of(2, 3, 29), horizon=10)
    assert c.tail.kind == TailClass.HORIZON_EXCEEDED and c.period is None
    with pytest.raises(SpecError):
        classify_set(SubtractionSet(frozenset(), (2, 1)))


def test_run_survey_bound_10(tmp_path):
    report = run_survey(SurveyConfig(2, 10, out=tmp_path))
    assert report.total_sets == 256
    assert report.all_L_count + report.mixed_count + report.horizon_exceeded_count == 256
    assert report.fraction == report.all_L_count / 256
    rows = read_rows(tmp_path / "sets.csv")
    assert len(rows) == 256 and tuple(rows[0]) == CSV_HEADER
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["all_L_count"] == report.all_L_count
    config = SurveyConfig(2, 10)
    for row in rows[::13]:
        s = SubtractionSet.parse(row["set_text"])
        c = classify_set(s)
        assert int(row["all_L"]) == c.all_L
        assert int(row["period"]) == c.period and int(row["preperiod"]) == c.preperiod
        assert int(row["set_mask"]) == sum(1 << m for m in s.base)


def test_workers_do_not_change_output(tmp_path):
    a = run_survey(SurveyConfig(2, 11, workers=1, out=tmp_path / "a", chunk_size=64))
    b = run_survey(SurveyConfig(2, 11, workers=3, out=tmp_path / "b", chunk_size=64))
    assert a.to_dict() == b.to_dict()
    assert (tmp_path / "a" / "sets.csv").read_bytes() == (tmp_path / "b" / "sets.csv").read_bytes()


def test_resume_after_interruption(tmp_path, monkeypatch):
    import epsnim.survey as survey

    config = SurveyConfig(2, 11, out=tmp_path, chunk_size=100)
    full = run_survey(SurveyConfig(2, 11, chunk_size=100))

    real = survey._run_chunk
    calls = {"n": 0}

    def flaky(job):
        calls["n"] += 1
        if calls["n"] == 4:
            raise OSError("disk went away")
        return real(job)

    monkeypatch.setattr(survey, "_run_chunk", flaky)
    with pytest.raises(OSError):
        run_survey(config)
    ckpt = json.loads((tmp_path / "checkpoint.json").read_text())
    assert ckpt["next_chunk"] == 3
    # simulate a partial write after the last checkpoint
    with open(tmp_path / "sets.csv", "a") as fh:
        fh.write("garbage,row\n")
    monkeypatch.setattr(survey, "_run_chunk", real)
    resumed = run_survey(config)
    assert resumed.to_dict() == full.to_dict()
    rows = read_rows(tmp_path / "sets.csv")
    assert len(rows) == 512
    assert [int(r["set_mask"]) for r in rows] == sorted(int(r["set_mask"]) for r in rows)


def test_checkpoint_from_other_config_is_refused(tmp_path):
    run_survey(SurveyConfig(2, 6, out=tmp_path))
    with pytest.raises(SpecError):
        run_survey(SurveyConfig(2, 7, out=tmp_path))
    report = run_survey(SurveyConfig(2, 7, out=tmp_path), resume=False)
    assert report.total_sets == 32


def test_spot_check_passes():
    assert spot_check(SurveyConfig(2, 12), sample=20, seed=3) == []
