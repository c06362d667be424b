"""Atomic spectral measures used as initial and boundary data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AtomCollision


def _clean_weights(weights, n):
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size != n:
        raise ValueError("one weight per atom required")
    if n == 0:
        raise ValueError("a measure needs at least one atom")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("weights must be finite and positive")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must sum to 1, got {w.sum()!r}")
    return w


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Finite sum of weighted point masses in the complex plane."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(loc)):
            raise ValueError("atom locations must be finite")
        w = _clean_weights(self.weights, loc.size)
        loc.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, x=0.0) -> SpectralMeasure:
        return cls([x], [1.0])

    @classmethod
    def uniform(cls, locations) -> SpectralMeasure:
        loc = np.asarray(locations, dtype=complex).reshape(-1)
        return cls(loc, np.full(loc.size, 1.0 / loc.size))

    @classmethod
    def from_pairs(cls, pairs) -> SpectralMeasure:
        """Build from ``[[loc, weight], ...]``; ``loc`` is a number or ``[re, im]``."""
        locs, ws = [], []
        for loc, w in pairs:
            if isinstance(loc, (list, tuple)):
                loc = complex(loc[0], loc[1])
            locs.append(complex(loc))
            ws.append(float(w))
        ws = np.asarray(ws)
        if ws.size and abs(ws.sum() - 1.0) <= 1e-9:
            ws = ws / ws.sum()
        return cls(locs, ws)

    def to_pairs(self):
        out = []
        for loc, w in zip(self.locations, self.weights):
            out.append([float(loc.real) if loc.imag == 0 else [float(loc.real), float(loc.imag)], float(w)])
        return out

    @property
    def size(self) -> int:
        return self.locations.size

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.locations.imag == 0))

    @property
    def real_locations(self) -> np.ndarray:
        return self.locations.real.copy()

    def resolvent(self, z):
        """``sum_i w_i / (z - x_i)``, broadcast over ``z``."""
        z = np.asarray(z, dtype=complex)
        return np.sum(self.weights / (z[..., None] - self.locations), axis=-1)

    def resolvent_derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return -np.sum(self.weights / (z[..., None] - self.locations) ** 2, axis=-1)

    def log_potential(self, z):
        """``sum_i w_i log(z - x_i)`` with principal logarithms."""
        z = np.asarray(z, dtype=complex)
        return np.sum(self.weights * np.log(z[..., None] - self.locations), axis=-1)

    def denominator_numerator(self):
        """Polynomials ``D, N`` in the spectral variable with ``resolvent = N / D``."""
        from numpy.polynomial import Polynomial

        one = Polynomial([1.0 + 0j])
        factors = [Polynomial([-x, 1.0]) for x in self.locations]
        den = one
        for f in factors:
            den = den * f
        num = Polynomial([0j])
        for i, wi in enumerate(self.weights):
            term = one * wi
            for j, f in enumerate(factors):
                if j != i:
                    term = term * f
            num = num + term
        return den, num

    def moment(self, k: int) -> complex:
        return complex(np.sum(self.weights * self.locations ** k))


@dataclass(frozen=True, eq=False)
class AngularMeasure:
    """Weighted point masses on the unit circle, given by their phases."""

    phases: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.phases, dtype=float).reshape(-1)
        if not np.all(np.isfinite(th)):
            raise ValueError("phases must be finite")
        th = wrap_phase(th)
        w = _clean_weights(self.weights, th.size)
        th.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "phases", th)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, theta=0.0) -> AngularMeasure:
        return cls([theta], [1.0])

    @classmethod
    def uniform(cls, phases) -> AngularMeasure:
        th = np.asarray(phases, dtype=float).reshape(-1)
        return cls(th, np.full(th.size, 1.0 / th.size))

    def rotated(self, angle: float) -> AngularMeasure:
        return AngularMeasure(self.phases + angle, self.weights)

    def on_circle(self) -> SpectralMeasure:
        """The same measure as atoms ``exp(i theta)`` in the complex plane."""
        return SpectralMeasure(np.exp(1j * self.phases), self.weights)

    def cot_kernel(self, theta):
        """``J(theta) = 1/2 sum_i w_i cot((theta - theta_i)/2)``."""
        theta = np.asarray(theta, dtype=complex)
        c, _ = _cot_and_csc2(theta[..., None] - self.phases)
        return 0.5 * np.sum(self.weights * c, axis=-1)

    def cot_kernel_derivative(self, theta):
        theta = np.asarray(theta, dtype=complex)
        _, csc2 = _cot_and_csc2(theta[..., None] - self.phases)
        return -0.25 * np.sum(self.weights * csc2, axis=-1)


def _cot_and_csc2(delta):
    """``cot(delta/2)`` and ``1/sin(delta/2)**2`` without overflow off the real axis."""
    upper = delta.imag >= 0
    # e = exp(i delta) in the upper half-plane, exp(-i delta) in the lower: |e| <= 1
    with np.errstate(over="ignore"):
        e = np.where(upper, np.exp(1j * delta), np.exp(-1j * delta))
    d = e - 1.0
    if np.any(d == 0):
        raise AtomCollision("theta coincides with an atom of the measure")
    cot = np.where(upper, 1j * (e + 1.0) / d, -1j * (e + 1.0) / d)
    csc2 = -4.0 * e / d ** 2
    return cot, csc2


def wrap_phase(theta):
    """Map angles to (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    out = np.pi - np.mod(np.pi - theta, 2 * np.pi)
    return out
