"""Quaternions in their 2x2 complex representation.

A quaternion is stored as the pair ``(z, w)`` and stands for the matrix::

    [[z, -conj(w)],
     [w,  conj(z)]]

Positions ``Q`` and momenta ``P`` of the non-Hermitian flows are quaternions.
The momentum is stored so that the quaternionic resolvent is its transpose,
``G = P.T``; with that layout ``P = Quaternion(p_z, p_w)``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import SingularQuaternion


def as_complex(value, name="value") -> complex:
    """Coerce to ``complex`` and reject NaN or infinite components."""
    c = complex(value)
    if not (cmath.isfinite(c)):
        raise ValueError(f"{name} must be finite, got {c!r}")
    return c


@dataclass(frozen=True)
class Quaternion:
    z: complex
    w: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "z", as_complex(self.z, "z"))
        object.__setattr__(self, "w", as_complex(self.w, "w"))

    @classmethod
    def identity(cls) -> Quaternion:
        return cls(1.0, 0.0)

    @classmethod
    def from_matrix(cls, m) -> Quaternion:
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not (np.isclose(m[1, 1], np.conj(m[0, 0])) and np.isclose(m[0, 1], -np.conj(m[1, 0]))):
            raise ValueError("matrix is not of quaternion form [[z, -w*], [w, z*]]")
        return cls(m[0, 0], m[1, 0])

    def matrix(self) -> np.ndarray:
        z, w = self.z, self.w
        return np.array([[z, -w.conjugate()], [w, z.conjugate()]], dtype=complex)

    @property
    def det(self) -> float:
        # |z|^2 + |w|^2 written out so integer-valued inputs stay exact
        return self.z.real ** 2 + self.z.imag ** 2 + self.w.real ** 2 + self.w.imag ** 2

    def __matmul__(self, other: Quaternion) -> Quaternion:
        return quat_mul(self, other)

    def __mul__(self, scalar):
        if isinstance(scalar, Quaternion):
            return NotImplemented
        s = float(scalar)
        return Quaternion(self.z * s, self.w * s)

    __rmul__ = __mul__

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.z + other.z, self.w + other.w)

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(self.z - other.z, self.w - other.w)

    def __neg__(self) -> Quaternion:
        return Quaternion(-self.z, -self.w)


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Product of the 2x2 representations, returned in (z, w) form."""
    z = a.z * b.z - a.w.conjugate() * b.w
    w = a.w * b.z + a.z.conjugate() * b.w
    return Quaternion(z, w)


def quat_inverse(a: Quaternion) -> Quaternion:
    d = a.det
    if d == 0:
        raise SingularQuaternion("quaternion with |z|^2 + |w|^2 = 0 has no inverse")
    return Quaternion(a.z.conjugate() / d, -a.w / d)


def trace_pairing(r: np.ndarray, dq: np.ndarray) -> complex:
    """``R11 dQ11 + R21 dQ12 + R12 dQ21 + R22 dQ22`` for 2x2 arrays."""
    return r[0, 0] * dq[0, 0] + r[1, 0] * dq[0, 1] + r[0, 1] * dq[1, 0] + r[1, 1] * dq[1, 1]


@dataclass(frozen=True)
class QuaternionPair:
    """Canonical pair (position ``q``, momentum ``p``) with ``G = p.T``."""

    q: Quaternion
    p: Quaternion

    @property
    def z(self) -> complex:
        return self.q.z

    @property
    def w(self) -> complex:
        return self.q.w

    @property
    def p_z(self) -> complex:
        return self.green()[0, 0]

    @property
    def p_w(self) -> complex:
        return self.green()[0, 1]

    def green(self) -> np.ndarray:
        return self.p.matrix().T
