"""Left-invariant frame and horizontal differential operators.

The horizontal frame (T1, X1, Y1, Z1) and the vertical frame (xi1, xi2, xi3)
are obtained by left-translating the coordinate directions at the identity.
Nothing here is transcribed by hand: the group product is affine in its
second argument, so exact difference quotients of `group_mul` recover the
translation Jacobian, and the frame's affine coefficient rows, the structure
constants, the fundamental 2-forms and the almost complex structures are all
derived from it when the module is imported.  A startup audit checks the
quaternion relations (I_s^2 = -1, I1 I2 = I3, skewness, orthogonality) and
raises ConsistencyError on any failure.

Convention fixed by the commutators: [e_a, e_b] = -2 sum_s omega_s(e_a, e_b) xi_s
with xi_s = 2 d/dw_s, which lands on omega_1(T1, X1) = omega_1(Y1, Z1) = 1 and
cyclic; the I_s act as left multiplication by i, j, k on the frame basis.

The covariant Hessian uses the canonical connection of the flat model, in
which the left-invariant frame is parallel, so hess(f)(e_a, e_b) = e_a(e_b f).
The antisymmetry audit (`horizontal_hessian` vs the commutator relation) is
the runtime guard for that choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError
from .jets import ScalarField, _as_batch
from .quaternions import group_mul

__all__ = [
    "FrameCoeffs",
    "ComplexStructures",
    "FrameJet",
    "frame_at",
    "frame_rows",
    "frame_jets",
    "complex_structures",
    "horizontal_gradient",
    "vertical_derivatives",
    "horizontal_hessian",
    "mixed_vertical_hessian",
    "sub_laplacian",
    "commutator_audit",
    "structure_residuals",
]

_E7 = np.eye(7)

# Vertical normalization: xi_s = 2 d/dw_s (orthonormal for the model metric).
VERTICAL_SCALE = 2.0


def _translation_jacobian(g0: np.ndarray) -> np.ndarray:
    """d(g0 o y)/dy, exact because the product is affine in y.

    Column a is (g0 o e_a - g0 o (-e_a)) / 2.
    """
    plus = group_mul(g0, _E7)        # rows: g0 o e_a
    minus = group_mul(g0, -_E7)
    return (plus - minus).T / 2.0


def _derive_affine_frame():
    """Affine decomposition of the frame rows from the group law.

    Row a of the horizontal frame at p is column a of the translation
    Jacobian J(p); J is affine in p, so J(p) = J0 + sum_c p_c * JC[c], with
    all pieces extracted exactly from J at 0 and at the coordinate points.
    """
    j0 = _translation_jacobian(np.zeros(7))
    jc = np.array([_translation_jacobian(_E7[c]) - j0 for c in range(7)])
    # Affinity check at a point that is not a coordinate vector.
    probe = np.array([0.3, -1.1, 0.7, 2.0, -0.4, 1.3, 0.9])
    recon = j0 + np.einsum("c,cjk->jk", probe, jc)
    if np.max(np.abs(recon - _translation_jacobian(probe))) > 1e-14:
        raise ConsistencyError("translation Jacobian is not affine in the base point")
    base = j0[:, :4].T                      # (4,7): row a = e_a coefficients at 0
    # lin[a, j, c]: dependence of coefficient j of row a on coordinate c
    lin = np.transpose(jc[:, :, :4], (2, 1, 0))
    vertical = VERTICAL_SCALE * j0[:, 4:7].T  # (3,7), constant rows
    if np.any(jc[:, :, 4:7] != 0.0):
        raise ConsistencyError("vertical translation directions are not constant")
    if np.any(lin[:, :4, :] != 0.0) or np.any(lin[:, :, 4:] != 0.0):
        # Needed for the constant first-order Hessian correction below.
        raise ConsistencyError("frame rows have unexpected coordinate dependence")
    return base, lin, vertical


_BASE, _LIN, _VERTICAL = _derive_affine_frame()


def _derive_structures():
    """Structure constants, fundamental forms and complex structures.

    [e_a, e_b]^j = sum_i c_a^i d_i(c_b^j) - c_b^i d_i(c_a^j); with affine rows
    the derivative matrices are the constant _LIN blocks and the bracket is
    point-independent, which is verified below at pseudo-random points.
    """
    rng = np.random.default_rng(7)
    pts = np.vstack([np.zeros(7), rng.uniform(-2.0, 2.0, size=(4, 7))])
    rows = frame_rows(pts)  # (5,4,7)
    brackets = np.einsum("nai,bji->nabj", rows, _LIN) - np.einsum(
        "nbi,aji->nabj", rows, _LIN
    )
    spread = np.max(np.abs(brackets - brackets[0]))
    if spread > 1e-13:
        raise ConsistencyError(f"frame brackets are point-dependent (spread {spread})")
    bracket = brackets[0]  # (4,4,7)
    if np.max(np.abs(bracket[:, :, :4])) > 1e-14:
        raise ConsistencyError("horizontal bracket components should vanish")
    # [e_a,e_b] = -2 sum_s omega_s(e_a,e_b) xi_s and xi_s = 2 d/dw_s,
    # so the d/dw_s coefficient is -4 omega_s(e_a, e_b).
    omegas = tuple(-bracket[:, :, 4 + s] / 4.0 for s in range(3))
    # I_s e_a = sum_b omega_s[a, b] e_b, i.e. the matrix on coordinate
    # vectors is omega_s transposed.
    imats = tuple(om.T.copy() for om in omegas)
    return bracket, omegas, imats


def frame_rows(points) -> np.ndarray:
    """Horizontal frame coefficient rows at each point: shape (N, 4, 7)."""
    pts, _ = _as_batch(points)
    return _BASE + np.einsum("ajc,nc->naj", _LIN, pts)


_BRACKET, OMEGA, IMAT = _derive_structures()

# e_a(c_b^{w_s}) as constant 4x4 matrices, one per vertical direction:
# the only surviving first-order term of the frame Hessian.
_DC = np.array([[[_LIN[b, 4 + s, a] for b in range(4)] for a in range(4)] for s in range(3)])


def _verify_structures() -> dict[str, float]:
    eye = np.eye(4)
    res = {}
    i1, i2, i3 = IMAT
    res["square"] = max(np.max(np.abs(m @ m + eye)) for m in IMAT)
    res["i1i2_i3"] = np.max(np.abs(i1 @ i2 - i3))
    res["skew"] = max(np.max(np.abs(m + m.T)) for m in IMAT)
    res["orthogonal"] = max(np.max(np.abs(m.T @ m - eye)) for m in IMAT)
    res["form_vs_structure"] = max(
        np.max(np.abs(OMEGA[s] - IMAT[s].T)) for s in range(3)
    )
    worst = max(res.values())
    if worst > 1e-14:
        raise ConsistencyError(f"complex structure audit failed: {res}")
    return res


_STRUCTURE_RESIDUALS = _verify_structures()


def structure_residuals() -> dict[str, float]:
    """Residuals of the import-time quaternion-relation audit."""
    return dict(_STRUCTURE_RESIDUALS)


@dataclass(frozen=True)
class FrameCoeffs:
    """Coefficient rows of the frame at one point.

    horizontal[a] holds the 7 coordinate coefficients of the a-th horizontal
    field; vertical holds the constant rows 2*d/dx, 2*d/dy, 2*d/dz.
    """

    horizontal: np.ndarray
    vertical: np.ndarray


@dataclass(frozen=True)
class ComplexStructures:
    """The three almost complex structures and fundamental 2-forms.

    matrices[s] acts on frame-coordinate vectors; forms[s][a, b] is
    omega_s(e_a, e_b).  Derived from commutators at import, audited there.
    """

    matrices: tuple[np.ndarray, np.ndarray, np.ndarray]
    forms: tuple[np.ndarray, np.ndarray, np.ndarray]


def frame_at(p) -> FrameCoeffs:
    pts, _ = _as_batch(p)
    if pts.shape[0] != 1:
        raise ValueError("frame_at takes a single point; use frame_rows for batches")
    return FrameCoeffs(horizontal=frame_rows(pts)[0], vertical=_VERTICAL.copy())


def complex_structures() -> ComplexStructures:
    return ComplexStructures(
        matrices=tuple(m.copy() for m in IMAT),
        forms=tuple(om.copy() for om in OMEGA),
    )


def _squeeze(arr: np.ndarray, squeeze: bool):
    return arr[0] if squeeze else arr


def horizontal_gradient(f: ScalarField, p) -> np.ndarray:
    """(T1 f, X1 f, Y1 f, Z1 f) at p; shape (4,) or (N, 4)."""
    pts, squeeze = _as_batch(p)
    _, grad, _ = f.jet_batch(pts)
    out = np.einsum("naj,nj->na", frame_rows(pts), grad)
    return _squeeze(out, squeeze)


def vertical_derivatives(f: ScalarField, p) -> np.ndarray:
    """(xi1 f, xi2 f, xi3 f) = 2 * (d/dx, d/dy, d/dz) f."""
    pts, squeeze = _as_batch(p)
    _, grad, _ = f.jet_batch(pts)
    return _squeeze(VERTICAL_SCALE * grad[:, 4:7], squeeze)


def _hessian_batch(f: ScalarField, pts: np.ndarray):
    val, grad, hess = f.jet_batch(pts)
    rows = frame_rows(pts)
    chc = np.einsum("naj,njk,nbk->nab", rows, hess, rows, optimize=True)
    first_order = np.einsum("sab,ns->nab", _DC, grad[:, 4:7])
    return val, chc + first_order, grad, hess, rows


def horizontal_hessian(f: ScalarField, p) -> np.ndarray:
    """Frame Hessian M[a, b] = e_a(e_b f); shape (4, 4) or (N, 4, 4).

    Not symmetric in general: the antisymmetric part carries the commutators,
    M[a,b] - M[b,a] = -2 sum_s omega_s(e_a, e_b) * (xi_s f).
    """
    pts, squeeze = _as_batch(p)
    _, m, _, _, _ = _hessian_batch(f, pts)
    return _squeeze(m, squeeze)


def mixed_vertical_hessian(f: ScalarField, p) -> np.ndarray:
    """hess(f)(e_a, xi_s) = e_a(xi_s f); shape (4, 3) or (N, 4, 3)."""
    pts, squeeze = _as_batch(p)
    _, _, _, hess, rows = _hessian_batch(f, pts)
    out = VERTICAL_SCALE * np.einsum("naj,njk->nak", rows, hess)[:, :, 4:7]
    return _squeeze(out, squeeze)


@dataclass(frozen=True)
class FrameJet:
    """All frame derivatives of a field at a batch of points, in one pass.

    value (N,); grad (N, 4) = e_a f; vert (N, 3) = xi_s f;
    hess (N, 4, 4) = e_a(e_b f); mixed (N, 4, 3) = e_a(xi_s f).
    """

    value: np.ndarray
    grad: np.ndarray
    vert: np.ndarray
    hess: np.ndarray
    mixed: np.ndarray


def frame_jets(f: ScalarField, pts: np.ndarray) -> FrameJet:
    """Batched evaluation of every frame derivative from a single jet call."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    val, m, grad, hess, rows = _hessian_batch(f, pts)
    return FrameJet(
        value=val,
        grad=np.einsum("naj,nj->na", rows, grad),
        vert=VERTICAL_SCALE * grad[:, 4:7],
        hess=m,
        mixed=VERTICAL_SCALE * np.einsum("naj,njk->nak", rows, hess)[:, :, 4:7],
    )


def sub_laplacian(f: ScalarField, p) -> np.ndarray:
    """Trace of the horizontal Hessian: (T1^2 + X1^2 + Y1^2 + Z1^2) f."""
    pts, squeeze = _as_batch(p)
    _, m, _, _, _ = _hessian_batch(f, pts)
    out = np.trace(m, axis1=1, axis2=2)
    return float(out[0]) if squeeze else out


def commutator_audit(a: int, b: int, p) -> float:
    """Max-norm of [e_a, e_b](p) + 2 sum_s omega_s(e_a, e_b) xi_s.

    The bracket is recomputed honestly from the frame coefficients and their
    exact derivatives at p; the omegas are the import-time constants, so this
    checks the derived convention at arbitrary points.
    """
    pts, _ = _as_batch(p)
    rows = frame_rows(pts)[0]
    bracket = rows[a] @ _LIN[b].T - rows[b] @ _LIN[a].T   # (7,)
    expected = np.zeros(7)
    for s in range(3):
        expected -= 2.0 * OMEGA[s][a, b] * _VERTICAL[s]
    return float(np.max(np.abs(bracket - expected)))
