"""Forward-mode jets: truncated-Taylor arithmetic and the field combinators.

The only ground truth used here is central finite differencing of the
field's own values, so these tests cannot inherit a bug from the jet
arithmetic they are checking.
"""

import numpy as np
import pytest

from qheis.errors import DomainError
from qheis.jets import (
    AffineMap,
    ScalarField,
    affine_pullback,
    autodiff_lift,
    constant_field,
    eval_jet,
    exp,
    finite_diff_audit,
    log,
    power_compose,
    sqrt,
)


def _transcendental():
    def g(t1, x1, y1, z1, x, y, z):
        return exp(-(t1 * t1 + x1 * x1)) * (1.0 + y1 * z1) + log(2.0 + x * x) * sqrt(1.0 + y * y + z * z)

    return autodiff_lift(g, tag="mixed-transcendental")


def test_autodiff_matches_finite_differences():
    f = _transcendental()
    rng = np.random.default_rng(2)
    worst = max(finite_diff_audit(f, rng.uniform(-1.5, 1.5, 7), step=1e-4) for _ in range(20))
    assert worst < 1e-6


def test_jet_shapes_and_symmetry():
    f = _transcendental()
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1, 1, (17, 7))
    val, grad, hess = f.jet_batch(pts)
    assert val.shape == (17,) and grad.shape == (17, 7) and hess.shape == (17, 7, 7)
    np.testing.assert_allclose(hess, hess.transpose(0, 2, 1), atol=0)


def test_constant_field():
    c = constant_field(4.25)
    j = eval_jet(c, np.ones(7))
    assert j.value == 4.25
    assert not j.grad.any() and not j.hess.any()
    assert c.decay == (0.0, 0.0)


def test_log_domain_error():
    f = autodiff_lift(lambda t1, x1, y1, z1, x, y, z: log(t1), tag="log-t1")
    with pytest.raises(DomainError):
        f(np.array([-1.0, 0, 0, 0, 0, 0, 0]))


def test_affine_map_algebra():
    rng = np.random.default_rng(4)
    a = AffineMap(linear=rng.standard_normal((7, 7)), offset=rng.standard_normal(7))
    b = AffineMap(linear=rng.standard_normal((7, 7)), offset=rng.standard_normal(7))
    p = rng.standard_normal(7)
    # (a.after(b))(p) = a(b(p))
    comp = a.after(b)
    np.testing.assert_allclose(
        comp.linear @ p + comp.offset, a.linear @ (b.linear @ p + b.offset) + a.offset, atol=1e-12
    )
    assert AffineMap.identity().is_identity()
    assert not comp.is_identity()
    np.testing.assert_allclose(comp.det, np.linalg.det(a.linear) * np.linalg.det(b.linear), rtol=1e-9)


def test_affine_pullback_values_and_jets():
    f = _transcendental()
    rng = np.random.default_rng(5)
    lin = np.eye(7) + 0.1 * rng.standard_normal((7, 7))
    amap = AffineMap(linear=lin, offset=rng.standard_normal(7))
    g = affine_pullback(f, amap, amplitude=2.5)
    p = rng.uniform(-0.5, 0.5, 7)
    np.testing.assert_allclose(g(p), 2.5 * f(lin @ p + amap.offset), rtol=1e-12)
    assert finite_diff_audit(g, p, step=1e-4) < 1e-6


def test_power_compose_values_jets_decay():
    base = autodiff_lift(
        lambda t1, x1, y1, z1, x, y, z: 1.0 + t1 * t1 + x * x,
        tag="positive-quadratic",
        decay=(-2.0, -2.0),
    )
    f = power_compose(base, -1.5, 3.0, tag="inverse-power")
    p = np.array([0.5, 0, 0, 0, -0.25, 0, 0])
    np.testing.assert_allclose(f(p), 3.0 * (1.0 + 0.25 + 0.0625) ** -1.5, rtol=1e-13)
    assert f.decay == (3.0, 3.0)
    assert finite_diff_audit(f, p, step=1e-4) < 1e-6


def test_pullback_certificate_composition():
    base = autodiff_lift(
        lambda t1, x1, y1, z1, x, y, z: 1.0 / (1.0 + t1 * t1 + x1 * x1 + y1 * y1 + z1 * z1),
        tag="radial-bump",
        biradial_map=AffineMap.identity(),
        decay=(2.0, 0.0),
    )
    amap = AffineMap(linear=2.0 * np.eye(7), offset=np.ones(7))
    g = affine_pullback(base, amap)
    assert g.biradial_map is not None
    # the certificate tracks the total affine motion: jets of g at p depend
    # on p only through amap(p)
    np.testing.assert_allclose(g.biradial_map.linear, amap.linear, atol=0)
    np.testing.assert_allclose(g.biradial_map.offset, amap.offset, atol=0)
    lifted = autodiff_lift(lambda *c: 0.0, tag="no-cert")
    assert lifted.biradial_map is None
