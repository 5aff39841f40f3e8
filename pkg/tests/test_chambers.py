import csv
import io

import numpy as np
import pytest

from hdslice import chambers
from hdslice.chambers import (
    Grid,
    chamber_scan,
    classify_point,
    detmag_discriminants,
    detmag_predicted_count,
    parabola_evolute_margin,
    parabola_predicted_count,
    reports_to_csv,
)
from hdslice.errors import OnDiscriminant
from hdslice.slices import AllOnes, DetMagOne, FermatSphere, ParabolaPair


def test_detmag_discriminants():
    assert detmag_discriminants((0, 0)) == (-256, -256)
    assert detmag_discriminants((3, 3)) == (500, -8788)
    assert detmag_discriminants((1.5, -0.25)) == detmag_discriminants((-0.25, 1.5))


def test_detmag_predicted():
    assert detmag_predicted_count((3, 3)) == 6
    assert detmag_predicted_count((0, 0)) == 4
    assert detmag_predicted_count((0.1, 0.1)) == 4


def test_parabola_margins():
    assert parabola_evolute_margin((0, 0))[0] == -2
    assert parabola_evolute_margin((0, 1)) == (2, -29)
    assert parabola_evolute_margin((3, 3)) == (7, 7)
    assert [parabola_predicted_count(y) for y in ((0, 0), (0, 1), (3, 3))] == [2, 4, 6]


def test_on_discriminant_raises():
    with pytest.raises(OnDiscriminant):
        parabola_predicted_count((0.0, 0.5))


def test_classify_point_skips():
    assert classify_point(ParabolaPair(), (0.0, 0.5)).skipped
    rep = classify_point(ParabolaPair(), (0.0, 0.0))
    assert rep.skipped and "non-generic" in rep.skipped_reason
    rep = classify_point(DetMagOne(), (3.0, 3.0))
    assert rep.agree and rep.observed_count == 6


def test_fermat_unknown_prediction():
    rep = classify_point(FermatSphere(2, 4), (0.1, 0.05))
    assert rep.predicted_count is None and rep.agree is None and rep.observed_count == 8


def test_scan_detmag_grid():
    reps = chamber_scan(DetMagOne(), Grid((-5, 5), (-5, 5), 0.25))
    assert len(reps) == 41 * 41
    live = [r for r in reps if not r.skipped]
    assert len(live) > 1500 and all(r.agree for r in live)


def test_scan_deterministic_across_threads():
    g = Grid((-3, 4), (-3, 4), 0.5)
    a = reports_to_csv(chamber_scan(ParabolaPair(), g, threads=1))
    b = reports_to_csv(chamber_scan(ParabolaPair(), g, threads=4))
    assert a == b


def test_scan_rejects_other_families():
    with pytest.raises(ValueError):
        chamber_scan(AllOnes(2), Grid((0, 1), (0, 1), 0.5))


def test_csv_format():
    text = reports_to_csv(chamber_scan(DetMagOne(), Grid((2.75, 3), (3, 3.25), 0.25)))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == chambers.CSV_HEADER
    row = dict(zip(rows[0], rows[2]))
    assert float(row["y1"]) == 3.0 and float(row["Dplus"]) == 500.0
    assert row["m1"] == "" and row["predicted"] == "6" and row["agree"] == "true"


def test_chamber_constancy_along_segment():
    # D+ first reaches 0 on the diagonal at s = 2
    ss = np.linspace(0.05, 1.9, 40)
    counts = {classify_point(DetMagOne(), (s, s)).observed_count for s in ss}
    assert counts == {4}


def test_symmetry_of_counts():
    rng = np.random.default_rng(4)
    for y in rng.uniform(-4, 4, (30, 2)):
        a = classify_point(DetMagOne(), y)
        b = classify_point(DetMagOne(), (-y[1], y[0]))
        assert a.observed_count == b.observed_count
