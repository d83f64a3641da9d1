import datetime as dt
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gplus import (
    ControlMode,
    DimensionMismatch,
    Fingerprint,
    InsufficientData,
    SubtaskRecord,
    TimelinePoint,
    build_timeline,
    count_performable,
    derive_dwa_bounds,
    derive_task_bounds,
    evaluate_portfolio,
    forecast,
    gplus,
    saturation_target,
)
from gplus.portfolio import DAYS_PER_MONTH, select_records
from synth import oracle_count_performable, oracle_merge, random_dataset, random_levels

TELEOP, AUTO = ControlMode.ANALOGOUS_TELEOP, ControlMode.AUTONOMOUS
D0 = dt.date(2022, 1, 1)


def rec(sid, levels, date=D0, mode=TELEOP, ok=True):
    return SubtaskRecord(sid, sid, Fingerprint(levels), "UAT", date, mode, ok)


def test_two_records_by_hand():
    a = [1.0, 0.0, 3.5, 2.0]
    b = [0.5, 2.0, 3.0, 2.25]
    ev = evaluate_portfolio([rec("a", a), rec("b", b)], TELEOP)
    # componentwise max and its sum, computed by hand
    assert list(ev.work_fingerprint) == [1.0, 2.0, 3.5, 2.25]
    assert ev.gplus_score == pytest.approx(8.75 * 100 / 267.3)
    assert ev.contributing == ("a", "b")


def test_empty_portfolio():
    ev = evaluate_portfolio([], AUTO)
    assert ev.work_fingerprint == Fingerprint.zeros(120)
    assert ev.gplus_score == 0.0
    ev = evaluate_portfolio([rec("x", [1, 1], mode=TELEOP)], AUTO)
    assert ev.work_fingerprint == Fingerprint.zeros(2) and ev.contributing == ()


def test_fixture_ledger(ledger):
    tele = evaluate_portfolio(ledger, TELEOP)
    assert list(tele.work_fingerprint) == [2.0, 1.5, 1.25, 1.0, 0.0, 2.5]
    assert tele.contributing == ("S1", "S2", "S3", "S6")   # S4 failed
    auto = evaluate_portfolio(ledger, AUTO)
    assert list(auto.work_fingerprint) == [2.0, 1.0, 1.25, 0.0, 3.0, 0.0]
    early = evaluate_portfolio(ledger, TELEOP, as_of=dt.date(2022, 2, 1))
    assert list(early.work_fingerprint) == [2.0, 0.0, 1.25, 0.0, 0.0, 2.5]
    both = evaluate_portfolio(ledger, None)
    assert list(both.work_fingerprint) == [2.0, 1.5, 1.25, 1.0, 3.0, 2.5]


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        evaluate_portfolio([rec("a", [1, 2]), rec("b", [1, 2, 3])])
    with pytest.raises(DimensionMismatch):
        count_performable(Fingerprint([1, 2]), {1: Fingerprint([1, 2, 3])})


def test_count_performable_fixture(dataset):
    tb = derive_task_bounds(dataset, derive_dwa_bounds(dataset))
    everything = count_performable(Fingerprint.full(7, dataset.dim), tb, dataset=dataset)
    assert everything.count == 4
    assert [t.task_id for t in everything.tasks] == [1, 20, 694, 23955]
    work = Fingerprint([1.0, 1.5, 2.0, 2.5, 0.5, 0.0])   # exactly the 23955 bound
    hits = count_performable(work, tb, dataset=dataset)
    assert [(t.task_id, t.occupation) for t in hits.tasks] == [(694, "Retail Salespersons"), (23955, "Models")]
    assert hits.tasks[0].text.startswith("Greet customers")
    assert count_performable(Fingerprint.zeros(dataset.dim), tb).count == 0


def test_count_performable_matches_oracle_on_random_datasets():
    rng = random.Random(99)
    for _ in range(200):
        ds = random_dataset(rng)
        tb = derive_task_bounds(ds, derive_dwa_bounds(ds))
        work = random_levels(rng, ds.dim)
        got = count_performable(Fingerprint(work), tb)
        want = oracle_count_performable(work, {k: list(v) for k, v in tb.bounds.items()})
        assert [t.task_id for t in got.tasks] == want
        assert got.count == len(want)


def test_timeline_fixture(ledger, dataset):
    tb = derive_task_bounds(dataset, derive_dwa_bounds(dataset))
    pts = build_timeline(ledger, TELEOP, tb)
    assert [p.date.isoformat() for p in pts] == ["2022-01-10", "2022-03-01", "2022-05-05"]
    # two records share 2022-01-10 and collapse into one point
    assert pts[0].gplus_score == pytest.approx(5.75 * 100 / 267.3)
    assert pts[1].gplus_score == pytest.approx(8.25 * 100 / 267.3)
    assert pts[2].gplus_score == pts[1].gplus_score
    assert pts[-1].gplus_score == evaluate_portfolio(ledger, TELEOP).gplus_score
    auto = build_timeline(ledger, AUTO, tb)
    assert [p.gplus_score for p in auto] == pytest.approx([3.25 * 100 / 267.3, 7.25 * 100 / 267.3])


def test_single_record_timeline():
    pts = build_timeline([rec("a", [1, 2, 3], date=D0)], TELEOP, None)
    assert pts == [TimelinePoint(D0, gplus(Fingerprint([1, 2, 3])), 0)]
    assert build_timeline([], TELEOP, None) == []


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_monotone_accumulation(data):
    seed = data.draw(st.integers(0, 10_000))
    rng = random.Random(seed)
    ds = random_dataset(rng, dim=5)
    tb = derive_task_bounds(ds, derive_dwa_bounds(ds))
    records = []
    prev_fp, prev_score, prev_count = None, -1.0, -1
    for i in range(data.draw(st.integers(1, 8))):
        records.append(rec(f"r{i}", random_levels(rng, 5, grid=2), D0 + dt.timedelta(days=i)))
        ev = evaluate_portfolio(records, TELEOP)
        n = count_performable(ev.work_fingerprint, tb).count
        if prev_fp is not None:
            assert all(a >= b for a, b in zip(ev.work_fingerprint, prev_fp))
        assert ev.gplus_score >= prev_score
        assert n >= prev_count
        prev_fp, prev_score, prev_count = ev.work_fingerprint, ev.gplus_score, n
    pts = build_timeline(records, TELEOP, tb)
    assert all(a.gplus_score <= b.gplus_score for a, b in zip(pts, pts[1:]))
    assert all(a.performable_task_count <= b.performable_task_count for a, b in zip(pts, pts[1:]))


def test_date_filter_matches_naive_subset():
    rng = random.Random(5)
    for _ in range(200):
        records = [
            rec(f"r{i}", random_levels(rng, 4), D0 + dt.timedelta(days=rng.randint(0, 60)),
                rng.choice([TELEOP, AUTO]), rng.random() < 0.8)
            for i in range(rng.randint(1, 10))
        ]
        cut = D0 + dt.timedelta(days=rng.randint(0, 60))
        mode = rng.choice([TELEOP, AUTO])
        subset = [r for r in records if r.first_success_date <= cut and r.succeeded and r.control_mode is mode]
        got = evaluate_portfolio(records, mode, cut)
        want = oracle_merge([list(r.fingerprint) for r in subset]) if subset else [0.0] * 4
        assert list(got.work_fingerprint) == want
        assert select_records(records, mode, cut) == subset


# --- forecast ----------------------------------------------------------------------


def test_ols_line_two_points():
    from gplus.portfolio import fit_line
    slope, intercept = fit_line([0.0, 10.0], [10.0, 20.0])
    assert slope == pytest.approx(1.0) and intercept == pytest.approx(10.0)
    # months to a target of 30 from the last score 20
    assert (30 - 20) / slope == pytest.approx(10.0)


def test_forecast_two_points():
    # 487 days is exactly 16 mean-length months
    pts = [TimelinePoint(D0, 10.0, 0), TimelinePoint(D0 + dt.timedelta(days=487), 26.0, 0)]
    f = forecast(pts, 36.0)
    assert f.slope == pytest.approx(1.0, rel=1e-12)
    assert f.intercept == pytest.approx(10.0, rel=1e-12)
    assert f.current_score == 26.0
    assert f.months_to_saturation == pytest.approx(10.0, rel=1e-12)


def test_forecast_flat_and_insufficient():
    flat = forecast([TimelinePoint(D0, 50.0, 0), TimelinePoint(D0 + dt.timedelta(days=30), 50.0, 0)], 314.25)
    assert flat.slope == 0 and flat.months_to_saturation is None
    with pytest.raises(InsufficientData):
        forecast([TimelinePoint(D0, 5.0, 0)], 10)
    with pytest.raises(InsufficientData):
        forecast([TimelinePoint(D0, 5.0, 0), TimelinePoint(D0, 6.0, 0)], 10)


def test_full_scale_forecast_arithmetic():
    # slope 4/month ending at 78.2 against the all-sevens target
    target = saturation_target()
    assert target == pytest.approx(314.25, abs=5e-3)
    pts = [TimelinePoint(D0 + dt.timedelta(days=round(m * DAYS_PER_MONTH)), 78.2 - 4 * (20 - m), 0)
           for m in range(0, 21, 2)]
    f = forecast(pts, target)
    assert f.slope == pytest.approx(4.0, rel=1e-3)
    assert f.months_to_saturation == pytest.approx((target - 78.2) / 4, rel=1e-3)
    assert 58 < f.months_to_saturation < 60


@given(st.floats(-5, 5, allow_nan=False), st.floats(0, 100), st.lists(st.integers(1, 400), min_size=1, max_size=8, unique=True))
def test_forecast_recovers_collinear(slope, intercept, offsets):
    days = [0] + sorted(offsets)
    pts = [TimelinePoint(D0 + dt.timedelta(days=d), intercept + slope * d / DAYS_PER_MONTH, 0) for d in days]
    f = forecast(pts, 1000.0)
    assert f.slope == pytest.approx(slope, rel=1e-9, abs=1e-9)
    assert f.intercept == pytest.approx(intercept, rel=1e-9, abs=1e-9)
