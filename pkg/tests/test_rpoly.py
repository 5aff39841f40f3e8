import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hdslice.errors import WrongDegree
from hdslice.rpoly import (
    BiPoly,
    RPoly,
    cubic_discriminant,
    quartic_discriminant,
    real_roots,
    real_roots_detail,
    resultant_x2,
    sturm_chain,
    sturm_count,
)

x1, x2 = BiPoly.x1(), BiPoly.x2()
PHI = (1 + math.sqrt(5)) / 2


def from_roots(roots):
    return RPoly(np.polynomial.polynomial.polyfromroots(roots))


@pytest.mark.parametrize("coeffs, count", [
    ([-1, 0, 0, 0, 1], 2),
    ([-1, 3, 0, -3, 1], 4),
    ([-1, -3, 0, -3, 1], 2),
])
def test_sturm_count_examples(backend, coeffs, count):
    assert sturm_count(RPoly(coeffs), -10, 10) == count


def test_sturm_count_endpoint_root(backend):
    # (a, b] convention: root at b counted, root at a not
    p = RPoly([-1, 0, 1])
    assert sturm_count(p, -1, 1) == 1
    assert sturm_count(p, -2, 1) == 2


def test_real_roots_examples(backend):
    np.testing.assert_allclose(real_roots(RPoly([-4, 0, 1])), [-2, 2], atol=1e-14)
    np.testing.assert_allclose(real_roots(RPoly([-1, 3, 0, -3, 1])), [-1, 2 - PHI, 1, PHI + 1], atol=1e-12)
    np.testing.assert_allclose(real_roots(RPoly([0, 1, 0, 2])), [0.0], atol=1e-15)


def test_multiple_root_flag(backend):
    roots = real_roots_detail(RPoly(np.polynomial.polynomial.polyfromroots([1, 1, 2])))
    assert [r.multiple for r in roots] == [True, False]
    np.testing.assert_allclose([r.value for r in roots], [1, 2], atol=1e-6)


def test_sturm_backends_agree():
    from hdslice._backend import BACKENDS
    ch = sturm_chain(from_roots([-3.0, -0.5, 0.25, 2.0, 7.0]))
    xs = np.linspace(-8, 8, 97)
    ref = None
    for k in BACKENDS.values():
        v = [k.sign_variations(ch.seq, ch.degs, float(x)) for x in xs]
        iso = k.isolate_roots(ch.seq, ch.degs, -10.0, 10.0, 1e-12)
        if ref is None:
            ref = (v, iso)
        assert v == ref[0] and iso == ref[1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6),
       st.integers(0, 3), st.floats(0.5, 3))
def test_root_count_matches_sturm_and_scan(roots, n_complex, lead):
    roots = sorted(roots)
    assume(len(roots) < 2 or np.min(np.diff(roots)) > 0.05)
    assume(len(roots) + 2 * n_complex <= 8)
    c = lead * np.polynomial.polynomial.polyfromroots(roots)
    for k in range(n_complex):
        c = np.polynomial.polynomial.polymul(c, [1.0 + k, 0.3 * k, 1.0])
    p = RPoly(c)
    found = real_roots(p)
    B = p.cauchy_bound()
    assert len(found) == len(roots) == sturm_count(p, -B, B)
    np.testing.assert_allclose(found, roots, atol=1e-7)
    grid = np.linspace(-B, B, 200001) + 1e-7 * math.pi
    vals = p(grid)
    assert np.count_nonzero(np.sign(vals[1:]) != np.sign(vals[:-1])) == len(roots)


def test_tiny_coefficients_chain_is_consistent():
    # cancellation-heavy chain from a detmag quartic with tiny y1
    p = RPoly([-1.0, 0.7, 0.0, -1e-9, 1.0])
    assert len(real_roots(p)) == sturm_count(p, -10, 10) == 2


def test_quartic_discriminant():
    assert quartic_discriminant(RPoly([-1, 0, 0, 0, 1])) == -256
    assert quartic_discriminant(RPoly([-1, 3, 0, -3, 1])) == 500
    assert quartic_discriminant(RPoly(np.polynomial.polynomial.polymul([1, -2, 1], [1, 0, 1]))) == 0
    with pytest.raises(WrongDegree):
        quartic_discriminant(RPoly([1, 2, 3]))


def test_quartic_discriminant_matches_closed_form():
    from hdslice.chambers import detmag_discriminants
    rng = np.random.default_rng(3)
    for a, b in rng.uniform(-5, 5, (100, 2)):
        dp, dm = detmag_discriminants((a, b))
        qp = quartic_discriminant(RPoly([-1, b, 0, -a, 1]))
        qm = quartic_discriminant(RPoly([-1, -b, 0, -a, 1]))
        assert math.isclose(qp, dp, rel_tol=1e-9, abs_tol=1e-9)
        assert math.isclose(qm, dm, rel_tol=1e-9, abs_tol=1e-9)


def test_cubic_discriminant():
    assert cubic_discriminant(from_roots([0, 1, 2])) == pytest.approx(4.0)
    assert cubic_discriminant(RPoly([0, 1, 0, 1])) < 0


def test_resultant_lines():
    r = resultant_x2(x2 - x1, x2 + x1)
    assert r.degree == 1
    np.testing.assert_allclose(real_roots(r), [0.0], atol=1e-12)


def test_resultant_circle_axis():
    r = resultant_x2(x1 * x1 + x2 * x2 - BiPoly.const(1.0), x2)
    assert r.degree == 2
    np.testing.assert_allclose(real_roots(r), [-1, 1], atol=1e-12)


def test_resultant_fermat_quartic():
    f = BiPoly.from_terms({(4, 0): 1.0, (0, 4): 1.0, (0, 0): -1.0})
    g = BiPoly.from_terms({(3, 1): 1.0, (1, 3): -1.0})
    r = resultant_x2(f, g)
    # the abscissae at +-2^(-1/4) and 0 are multiple roots, so rounding may
    # push them a hair off the real axis; accept near-real roots
    z = np.polynomial.polynomial.polyroots(r.coeffs)
    near_real = z[np.abs(z.imag) <= 1e-4].real
    for want in (-1.0, -2 ** -0.25, 0.0, 2 ** -0.25, 1.0):
        assert abs(r(want)) <= 1e-9
        assert np.min(np.abs(near_real - want)) <= 1e-4


def test_resultant_vanishes_at_common_zeros():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(10):
        f = BiPoly(rng.standard_normal((3, 3)))
        g = BiPoly(rng.standard_normal((3, 3)))
        r = resultant_x2(f, g, radius=3.0)
        for P in rng.uniform(-3, 3, (40, 2)):
            for _ in range(40):
                J = np.array([[f.d1()(*P), f.d2()(*P)], [g.d1()(*P), g.d2()(*P)]])
                try:
                    P = P - np.linalg.solve(J, [f(*P), g(*P)])
                except np.linalg.LinAlgError:
                    break
            if np.all(np.isfinite(P)) and np.max(np.abs(P)) < 3 and abs(f(*P)) + abs(g(*P)) < 1e-12:
                hits += 1
                assert abs(r(P[0])) <= 1e-6 * r.scale_at(P[0])
    assert hits > 0


def test_bipoly_algebra():
    p = (x2 - x1 * x1) * (x1 - x2 * x2)
    assert p(2.0, 4.0) == 0.0
    assert p.d1()(0.5, 0.3) == pytest.approx(-2 * 0.5 * (0.5 - 0.09) + (0.3 - 0.25))
    np.testing.assert_allclose(p.at(np.array([1.0, 2.0]), np.array([1.0, 3.0])),
                               [p(1.0, 1.0), p(2.0, 3.0)])
