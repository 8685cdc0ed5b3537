"""Quaternion arithmetic and the 7-dimensional quaternionic Heisenberg group.

Conventions used everywhere in the package:

* a quaternion is an array of shape (..., 4) in (w, x, y, z) order,
  w the real part, with i*j = k;
* a group point is an array of shape (..., 7) in coordinate order
  (t1, x1, y1, z1, x, y, z): columns 0:4 are the quaternion part q,
  columns 4:7 the vertical (imaginary-quaternion) part w;
* the group product is (q0, w0) o (q, w) = (q0 + q, w + w0 + 2 Im(q0 * conj(q)))
  and the parabolic dilation scales q by lam and w by lam**2.

All functions broadcast over leading axes and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "Quaternion",
    "ImQuaternion",
    "GroupPoint",
    "quat_mul",
    "quat_conj",
    "quat_norm2",
    "quat_inv",
    "group_mul",
    "group_inv",
    "dilation",
    "as_quat",
    "as_point",
]


def as_quat(a) -> np.ndarray:
    """Coerce a Quaternion / array-like to a float array of shape (..., 4)."""
    a = np.asarray(getattr(a, "array", a), dtype=float)
    if a.shape[-1] != 4:
        raise ValueError(f"quaternion needs 4 components, got shape {a.shape}")
    return a


def as_point(g) -> np.ndarray:
    """Coerce a GroupPoint / array-like to a float array of shape (..., 7)."""
    g = np.asarray(getattr(g, "array", g), dtype=float)
    if g.shape[-1] != 7:
        raise ValueError(f"group point needs 7 coordinates, got shape {g.shape}")
    return g


def quat_mul(a, b) -> np.ndarray:
    """Hamilton product a*b, broadcasting over leading axes."""
    a = as_quat(a)
    b = as_quat(b)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def quat_conj(a) -> np.ndarray:
    a = as_quat(a)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def quat_norm2(a) -> np.ndarray:
    a = as_quat(a)
    return np.sum(a * a, axis=-1)


def quat_inv(a) -> np.ndarray:
    """Multiplicative inverse conj(a)/|a|^2; zero quaternion is a domain error."""
    a = as_quat(a)
    n2 = quat_norm2(a)
    if np.any(n2 == 0.0):
        raise DomainError("zero quaternion has no inverse")
    return quat_conj(a) / n2[..., None]


def group_mul(g0, g) -> np.ndarray:
    """Group product g0 o g; left translation of g by g0."""
    g0 = as_point(g0)
    g = as_point(g)
    q0, w0 = g0[..., 0:4], g0[..., 4:7]
    q, w = g[..., 0:4], g[..., 4:7]
    twist = quat_mul(q0, quat_conj(q))[..., 1:4]
    out = np.empty(np.broadcast_shapes(g0.shape, g.shape), dtype=float)
    out[..., 0:4] = q0 + q
    out[..., 4:7] = w + w0 + 2.0 * twist
    return out


def group_inv(g) -> np.ndarray:
    """Two-sided group inverse (-q, -w)."""
    return -as_point(g)


def dilation(lam, g) -> np.ndarray:
    """Parabolic dilation (q, w) -> (lam*q, lam^2*w), lam > 0."""
    lam = float(lam)
    if lam <= 0.0:
        raise DomainError(f"dilation factor must be positive, got {lam}")
    g = as_point(g)
    out = g.copy()
    out[..., 0:4] *= lam
    out[..., 4:7] *= lam * lam
    return out


@dataclass(frozen=True)
class Quaternion:
    """Scalar quaternion w + x*i + y*j + z*k. Thin wrapper over the array ops."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = as_quat(a)
        if a.ndim != 1:
            raise ValueError("from_array expects a single quaternion")
        return cls(*a.tolist())

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(quat_mul(self, other))

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inverse(self) -> "Quaternion":
        return Quaternion.from_array(quat_inv(self))

    def norm(self) -> float:
        return float(np.sqrt(quat_norm2(self)))


@dataclass(frozen=True)
class ImQuaternion:
    """Purely imaginary quaternion; real part is zero by construction."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @property
    def array(self) -> np.ndarray:
        # embeds into full quaternions as (0, x, y, z)
        return np.array([0.0, self.x, self.y, self.z], dtype=float)

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class GroupPoint:
    """A point (q, w) of the group; coordinates (t1, x1, y1, z1, x, y, z)."""

    q: Quaternion = field(default_factory=Quaternion)
    w: ImQuaternion = field(default_factory=ImQuaternion)

    @property
    def array(self) -> np.ndarray:
        return np.concatenate([self.q.array, self.w.vec])

    @classmethod
    def from_array(cls, g) -> "GroupPoint":
        g = as_point(g)
        if g.ndim != 1:
            raise ValueError("from_array expects a single point")
        return cls(Quaternion(*g[0:4].tolist()), ImQuaternion(*g[4:7].tolist()))

    def __matmul__(self, other: "GroupPoint") -> "GroupPoint":
        return GroupPoint.from_array(group_mul(self, other))

    def inverse(self) -> "GroupPoint":
        return GroupPoint.from_array(group_inv(self))
