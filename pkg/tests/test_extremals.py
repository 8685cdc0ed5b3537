"""Entire solutions, the deformation family, Cayley transform, Kelvin transform."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qheis.errors import DomainError, SingularityError
from qheis.extremals import (
    V_AMPLITUDE,
    FamilyParams,
    SpherePoint,
    cayley_contact_factor,
    cayley_forward,
    cayley_inverse,
    dilate_field,
    h_family,
    kelvin,
    pde_residual,
    sigma,
    translate_field,
    ubar_field,
    v_field,
)
from qheis.frame import frame_jets, sub_laplacian
from qheis.quaternions import GroupPoint, dilation, group_inv, group_mul

coords = st.floats(-2.0, 2.0, allow_nan=False)


def values(u, pts):
    return u.jets(np.atleast_2d(np.asarray(pts, dtype=float)))[0]


def rel_residual(u, pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    fj = frame_jets(u, pts)
    return np.abs(pde_residual(u, pts)) / fj.value**1.5


# ---------------------------------------------------------------------------
# Frozen values.


def test_ubar_frozen_values(ubar):
    assert values(ubar, np.zeros(7))[0] == 1024.0
    e1 = np.array([1.0, 0, 0, 0, 0, 0, 0])
    assert values(ubar, e1)[0] == 64.0
    np.testing.assert_allclose(sub_laplacian(ubar, np.zeros(7)), -32768.0, rtol=1e-13)


def test_v_amplitude():
    assert V_AMPLITUDE == 2.0**11 * math.sqrt(3.0) * math.pi ** (-3.0 / 5.0)
    assert values(v_field(), np.zeros(7))[0] == V_AMPLITUDE


def test_ubar_solves_pde(ubar, rng):
    pts = rng.uniform(-3.0, 3.0, (1000, 7))
    assert np.max(rel_residual(ubar, pts)) <= 1e-9


def test_pde_rejects_negative_fields():
    from qheis.jets import constant_field

    with pytest.raises(DomainError):
        pde_residual(constant_field(-2.0), np.zeros(7))


# ---------------------------------------------------------------------------
# Symmetries of the equation.


@settings(deadline=None, max_examples=25)
@given(g0=st.tuples(*[coords] * 7), lam=st.floats(0.3, 3.0))
def test_translated_dilated_fields_stay_solutions(ubar, g0, lam):
    u = dilate_field(translate_field(ubar, np.array(g0)), lam)
    pts = np.array([[0.0] * 7, [1.0, -0.5, 0.2, 0.1, 0.4, -0.3, 0.7]])
    assert np.max(rel_residual(u, pts)) <= 1e-9


def test_translate_semantics(ubar, rng, box_points):
    g0 = rng.uniform(-1.5, 1.5, 7)
    moved = translate_field(ubar, g0)
    direct = np.array([values(ubar, group_mul(g0, p))[0] for p in box_points[:20]])
    np.testing.assert_allclose(values(moved, box_points[:20]), direct, rtol=1e-14)
    # peak sits at the inverse of the translation parameter
    assert values(moved, group_inv(g0))[0] == 1024.0


def test_dilate_semantics(ubar, box_points):
    lam = 1.7
    scaled = dilate_field(ubar, lam)
    direct = lam**4 * np.array([values(ubar, dilation(lam, p))[0] for p in box_points[:20]])
    np.testing.assert_allclose(values(scaled, box_points[:20]), direct, rtol=1e-14)


def test_family_center_is_left_translation(rng, box_points):
    g0 = rng.uniform(-1.0, 1.0, 7)
    params = FamilyParams(c=0.7, nu=2.2)
    centered = h_family(FamilyParams(c=0.7, nu=2.2, center=g0))
    shifted = translate_field(h_family(params), g0)
    np.testing.assert_allclose(
        values(centered, box_points), values(shifted, box_points), rtol=1e-13
    )


@pytest.mark.parametrize("c,nu", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_family_params_must_be_positive(c, nu):
    with pytest.raises(DomainError):
        FamilyParams(c=c, nu=nu)


# ---------------------------------------------------------------------------
# Cayley transform and sphere points.


def test_sphere_point_normalizes():
    s = SpherePoint.from_arrays([2.0, 0, 0, 0], [0, 2.0, 0, 0])
    total = s.q.array @ s.q.array + s.p.array @ s.p.array
    np.testing.assert_allclose(total, 1.0, rtol=1e-15)


def test_sphere_point_rejects_zero():
    with pytest.raises(DomainError):
        SpherePoint.from_arrays(np.zeros(4), np.zeros(4))


def test_cayley_roundtrip_group_side(rng):
    pts = rng.uniform(-2.0, 2.0, (1000, 7))
    for p in pts[:1000]:
        back = cayley_forward(cayley_inverse(p))
        np.testing.assert_allclose(back.array, p, atol=1e-12)


def test_cayley_roundtrip_sphere_side(rng):
    for _ in range(50):
        s = SpherePoint.from_arrays(rng.standard_normal(4), rng.standard_normal(4))
        t = cayley_inverse(cayley_forward(s).array)
        np.testing.assert_allclose(t.q.array, s.q.array, atol=1e-12)
        np.testing.assert_allclose(t.p.array, s.p.array, atol=1e-12)


def test_cayley_pole():
    with pytest.raises(SingularityError):
        cayley_forward(SpherePoint.from_arrays([0.0, 0, 0, 0], [-1.0, 0, 0, 0]))


def test_contact_factor_frozen():
    assert cayley_contact_factor(np.zeros(7)) == 8.0
    assert cayley_contact_factor(np.array([1.0, 0, 0, 0, 0, 0, 0])) == 2.0


# ---------------------------------------------------------------------------
# Inversion and the Kelvin transform.


def test_sigma_is_an_involution(rng):
    pts = rng.uniform(-2.0, 2.0, (200, 7))
    np.testing.assert_allclose(sigma(sigma(pts)), pts, atol=1e-12)


def test_sigma_singular_at_identity():
    with pytest.raises(SingularityError):
        sigma(np.zeros(7))


def test_sigma_preserves_group_point_type():
    g = GroupPoint.from_array(np.array([1.0, 0.5, 0, 0, 0.3, 0, 0]))
    out = sigma(g)
    assert isinstance(out, GroupPoint)
    np.testing.assert_allclose(sigma(out).array, g.array, atol=1e-14)


def test_kelvin_is_an_involution(ubar, rng):
    pts = rng.uniform(0.4, 2.0, (50, 7))
    twice = kelvin(kelvin(ubar))
    np.testing.assert_allclose(values(twice, pts), values(ubar, pts), rtol=1e-12)


def test_kelvin_preserves_solutions(ubar, rng):
    pts = rng.uniform(-2.0, 2.0, (500, 7))
    pts = pts[np.einsum("ni,ni->n", pts[:, :4], pts[:, :4]) > 0.25]
    assert np.max(rel_residual(kelvin(ubar), pts)) <= 1e-8


def test_kelvin_singular_at_identity(ubar):
    with pytest.raises(SingularityError):
        values(kelvin(ubar), np.zeros(7))
