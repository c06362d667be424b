"""Catalog of ensembles: Hamiltonians, R-transforms and characteristic maps.

Every ensemble lives on a phase space of complex coordinate slots ``q`` and
momenta ``p`` (arrays whose last axis has length ``dim``).  Gradients are
Wirtinger derivatives taken with conjugate variables held independent, so the
Hamilton equations read ``dq/dt = dH/dp`` and ``dp/dt = -dH/dq`` for
holomorphic and real-valued Hamiltonians alike.

Phase spaces by kind:

* ``scalar``        (z,) / (p,)
* ``quaternionic``  (z, w) / (p_z, p_w), momentum stored as ``P = (p_z, p_w)``
* ``radial``        (z, r) / (p, p_r), the Kemp-Hall chart with ``r = |w|``
* ``angular``       (theta,) / (J,)
* ``bridge``        (z, alpha) / (p, p_alpha), explicitly time dependent
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from numpy.polynomial import Polynomial

from .errors import BridgeTimeOverflow, KempHallAxis, UnsupportedVariant
from .quaternion import Quaternion, trace_pairing


@dataclass(frozen=True)
class HamiltonianValue:
    value: np.ndarray
    grad_p: np.ndarray
    grad_q: np.ndarray


def _split(q, p, dim):
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if q.shape[-1:] != (dim,) or p.shape[-1:] != (dim,):
        raise ValueError(f"phase point needs {dim} coordinate and momentum slots")
    return q, p


@dataclass(frozen=True)
class Ensemble:
    """Base class; subclasses fix the variant tag and phase space."""

    variant: ClassVar[str] = ""
    kind: ClassVar[str] = "scalar"
    hermitian: ClassVar[bool] = False
    additive: ClassVar[bool] = False
    autonomous: ClassVar[bool] = True

    @property
    def dim(self) -> int:
        return 1 if self.kind in ("scalar", "angular") else 2

    def params(self) -> dict:
        return {}

    def to_json(self) -> dict:
        return {"variant": self.variant, "params": self.params()}

    def hamiltonian(self, q, p, t=0.0) -> HamiltonianValue:
        raise NotImplementedError

    def r_transform(self, arg):
        raise UnsupportedVariant(f"{self.variant} is given by its Hamiltonian, not an R-transform")

    def flow(self, q, p, t):
        """Closed-form Hamilton flow from time 0 to ``t``; ``None`` if unavailable."""
        return None


# ---------------------------------------------------------------- scalar


@dataclass(frozen=True)
class HolomorphicEnsemble(Ensemble):
    """Hermitian-type ensembles evolved in the holomorphic sector only."""

    kind: ClassVar[str] = "scalar"
    hermitian: ClassVar[bool] = True

    def hamiltonian(self, q, p, t=0.0) -> HamiltonianValue:
        q, p = _split(q, p, 1)
        h, dp, dz = self._h(q[..., 0], p[..., 0])
        return HamiltonianValue(h, dp[..., None], dz[..., None])

    def _h(self, z, p):
        raise NotImplementedError

    # rational forward map z0 -> (z, p) for atomic data G0 = num/den
    def characteristic_polynomials(self, den: Polynomial, num: Polynomial, t: float):
        raise UnsupportedVariant(f"{self.variant} has no closed-form characteristic map")

    # backward map (z, p) -> (z0, p0) together with d z0/dp and d p0/dp
    def backward(self, z, p, t):
        raise UnsupportedVariant(f"{self.variant} has no closed-form characteristic map")


@dataclass(frozen=True)
class GUE(HolomorphicEnsemble):
    variant: ClassVar[str] = "GUE"
    additive: ClassVar[bool] = True

    def _h(self, z, p):
        return 0.5 * p * p, p, np.zeros_like(p)

    def r_transform(self, arg):
        return arg

    def r_transform_derivative(self, arg):
        return np.ones_like(np.asarray(arg, dtype=complex))

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        return q + p * t, p.copy()

    def characteristic_polynomials(self, den, num, t):
        z0 = Polynomial([0, 1])
        return z0 * den + num * t, den, num, den

    def backward(self, z, p, t):
        return z - t * p, p, -t * np.ones_like(p), np.ones_like(p)


@dataclass(frozen=True)
class OrnsteinUhlenbeck(HolomorphicEnsemble):
    variant: ClassVar[str] = "OrnsteinUhlenbeck"
    a: float = 1.0

    def params(self):
        return {"a": self.a}

    def _h(self, z, p):
        a = self.a
        return 0.5 * p * p + a * (1 - z * p), p - a * z, -a * p

    def _sinh_over_a(self, t):
        a = self.a
        return t if a == 0 else np.sinh(a * t) / a

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        a = self.a
        return q * np.exp(-a * t) + p * self._sinh_over_a(t), p * np.exp(a * t)

    def characteristic_polynomials(self, den, num, t):
        z0 = Polynomial([0, 1])
        zn = z0 * den * np.exp(-self.a * t) + num * self._sinh_over_a(t)
        return zn, den, num * np.exp(self.a * t), den

    def backward(self, z, p, t):
        s = self._sinh_over_a(t)
        ea = np.exp(self.a * t)
        return ea * z - s * p, p / ea, -s * np.ones_like(p), np.ones_like(p) / ea


@dataclass(frozen=True)
class Wishart(HolomorphicEnsemble):
    variant: ClassVar[str] = "Wishart"
    r: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("Wishart rectangularity r must be positive")

    def params(self):
        return {"r": self.r}

    def _h(self, z, p):
        r = self.r
        return (1 - r) * p + r * z * p * p, (1 - r) + 2 * r * z * p, r * p * p

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        r = self.r
        u = 1 + r * p * t
        return u * u * q + (1 - r) * t * u, p / u

    def characteristic_polynomials(self, den, num, t):
        r = self.r
        z0 = Polynomial([0, 1])
        u = den + num * (r * t)
        zn = z0 * u * u + u * den * ((1 - r) * t)
        return zn, den * den, num, u

    def backward(self, z, p, t):
        r = self.r
        v = 1 - r * t * p
        z0 = z * v * v - (1 - r) * t * v
        dz0 = -2 * r * t * z * v + (1 - r) * r * t * t
        return z0, p / v, dz0, 1 / (v * v)


@dataclass(frozen=True)
class Jacobi(HolomorphicEnsemble):
    variant: ClassVar[str] = "Jacobi"
    theta: float = 1.0
    lam: float = 0.5

    def params(self):
        return {"theta": self.theta, "lambda": self.lam}

    def _h(self, z, p):
        th, lam = self.theta, self.lam
        a = lam * th * z * (1 - z)
        b = th * (1 - lam) - (1 - 2 * lam * th) * z
        h = a * p * p + p * b
        dp = 2 * a * p + b
        dz = lam * th * (1 - 2 * z) * p * p - (1 - 2 * lam * th) * p
        return h, dp, dz


@dataclass(frozen=True)
class UnitaryZ(HolomorphicEnsemble):
    """Unitary diffusion written in ``z = exp(i theta)``."""

    variant: ClassVar[str] = "UnitaryZ"

    def _h(self, z, p):
        return -0.5 * z * z * p * p + 0.5 * z * p, -z * z * p + 0.5 * z, -z * p * p + 0.5 * p

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        c = q * p
        z = q * np.exp(t * (0.5 - c))
        return z, c / z


@dataclass(frozen=True)
class SingularValue(HolomorphicEnsemble):
    """Squared singular values of the multiplicative non-normal walk."""

    variant: ClassVar[str] = "SingularValue"

    def _h(self, z, p):
        return z * z * p * p - z * p, 2 * z * z * p - z, 2 * z * p * p - p

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        c = q * p
        z = q * np.exp(-2 * t * (0.5 - c))
        return z, c / z


@dataclass(frozen=True)
class FreeRotor(Ensemble):
    """Angle/angular-momentum pair with ``H = J^2/2``."""

    variant: ClassVar[str] = "FreeRotor"
    kind: ClassVar[str] = "angular"
    hermitian: ClassVar[bool] = True

    def hamiltonian(self, q, p, t=0.0):
        q, p = _split(q, p, 1)
        return HamiltonianValue(0.5 * p[..., 0] ** 2, p.copy(), np.zeros_like(q))

    def flow(self, q, p, t):
        q, p = _split(q, p, 1)
        return q + p * t, p.copy()


# ---------------------------------------------------------- quaternionic


def _poly_eval(coeffs, x):
    out = np.zeros_like(x)
    for c in reversed(coeffs):
        out = out * x + c
    return out


@dataclass(frozen=True)
class QuaternionicEnsemble(Ensemble):
    """Additive non-normal ensembles with ``R(Q) = (tau z, A(-|w|^2) w)``.

    Subclasses provide ``tau`` and ``a_coeffs``, the cumulants ``alpha_k`` of the
    generating sequence ``A(x) = sum alpha_k x^(k-1)``.
    """

    kind: ClassVar[str] = "quaternionic"
    additive: ClassVar[bool] = True
    tau: ClassVar[float] = 0.0
    a_coeffs: ClassVar[tuple] = (1.0,)

    def generating(self, x):
        """``A(x)``."""
        return _poly_eval(self.a_coeffs, np.asarray(x, dtype=float))

    def generating_derivative(self, x):
        return _poly_eval([k * a for k, a in enumerate(self.a_coeffs)][1:] or [0.0],
                          np.asarray(x, dtype=float))

    def generating_integral(self, x):
        """``int_0^x A(y) dy``."""
        x = np.asarray(x, dtype=float)
        return x * _poly_eval([a / (k + 1) for k, a in enumerate(self.a_coeffs)], x)

    def hamiltonian(self, q, p, t=0.0):
        q, p = _split(q, p, 2)
        pz, pw = p[..., 0], p[..., 1]
        x = -(pw.real ** 2 + pw.imag ** 2)
        h = self.generating_integral(x)
        dpw = self.generating(x) * -np.conj(pw)
        dpz = np.zeros_like(pz)
        if self.tau != 0:
            h = h + self.tau * (pz * pz).real
            dpz = self.tau * pz
        grad_p = np.stack([dpz, dpw], axis=-1)
        return HamiltonianValue(h, grad_p, np.zeros_like(q))

    def r_transform(self, arg):
        """Quaternionic R-transform evaluated at a ``Quaternion``."""
        if not isinstance(arg, Quaternion):
            arg = Quaternion(*arg)
        a = float(self.generating(-(abs(arg.w) ** 2)))
        return Quaternion(self.tau * arg.z, a * arg.w)

    def velocity(self, p):
        """``(dz/dt, dw/dt)`` for the constant momenta ``p = (p_z, p_w)``."""
        p = np.asarray(p, dtype=complex)
        return self.hamiltonian(np.zeros_like(p), p).grad_p

    def flow(self, q, p, t):
        q, p = _split(q, p, 2)
        return q + t * self.velocity(p), p.copy()


@dataclass(frozen=True)
class BiUnitary(QuaternionicEnsemble):
    """Rotationally invariant (single-ring) ensemble, ``R = A(-|w|^2) (0, w)``."""

    variant: ClassVar[str] = "BiUnitary"
    a_coeffs: tuple = (1.0,)

    def __post_init__(self):
        coeffs = tuple(float(a) for a in self.a_coeffs)
        if not coeffs:
            raise ValueError("a_coeffs must be non-empty")
        object.__setattr__(self, "a_coeffs", coeffs)

    def params(self):
        return {"a_coeffs": list(self.a_coeffs)}


@dataclass(frozen=True)
class Ginibre(QuaternionicEnsemble):
    variant: ClassVar[str] = "Ginibre"


@dataclass(frozen=True)
class Elliptic(QuaternionicEnsemble):
    """Elliptic law: ``H = tau/2 (p_z^2 + conj(p_z)^2) - |p_w|^2``."""

    variant: ClassVar[str] = "Elliptic"
    tau: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "tau", float(self.tau))
        if not -1.0 <= self.tau <= 1.0:
            raise ValueError("elliptic tau must lie in [-1, 1]")

    def params(self):
        return {"tau": self.tau}


@dataclass(frozen=True)
class KempHall(Ensemble):
    """Multiplicative non-normal walk in the radial chart ``(z, r=|w|)``."""

    variant: ClassVar[str] = "KempHall"
    kind: ClassVar[str] = "radial"

    def hamiltonian(self, q, p, t=0.0):
        q, p = _split(q, p, 2)
        z, r = q[..., 0], q[..., 1]
        pz, pr = p[..., 0], p[..., 1]
        if np.any(r == 0):
            raise KempHallAxis("r = |w| = 0 is outside the radial chart")
        zb, pzb = np.conj(z), np.conj(pz)
        m = z * pz + zb * pzb
        zz = z * zb
        h = 0.5 * r * pr + 0.25 * (zz - r * r) * pr * pr - 0.5 * r * pr * m
        dp = -0.5 * r * pr * z
        dpr = 0.5 * r + 0.5 * (zz - r * r) * pr - 0.5 * r * m
        dz = 0.25 * zb * pr * pr - 0.5 * r * pr * pz
        dr = 0.5 * pr - 0.5 * r * pr * pr - 0.5 * pr * m
        return HamiltonianValue(h, np.stack([dp, dpr], -1), np.stack([dz, dr], -1))


def to_radial_chart(z, w, p_z, p_w):
    """``(z, w, p_z, p_w) -> (z, r, p, p_r)`` with ``p_r = p_w e^{i arg w} + conj``."""
    w = complex(w)
    if w == 0:
        raise KempHallAxis("the phase of w is undefined at w = 0")
    r = abs(w)
    phase = w / r
    p_r = 2 * (complex(p_w) * phase).real
    return complex(z), r, complex(p_z), p_r


def from_radial_chart(z, r, p, p_r, arg_w=0.0):
    """Inverse of :func:`to_radial_chart` for a rotationally invariant potential."""
    if r <= 0:
        raise KempHallAxis("r must be positive")
    phase = np.exp(1j * arg_w)
    return complex(z), complex(r * phase), complex(p), complex(0.5 * p_r / phase)


# ----------------------------------------------------------------- bridge


@dataclass(frozen=True)
class Bridge(Ensemble):
    """Matrix Brownian bridge with auxiliary pair ``(alpha, p_alpha)``."""

    variant: ClassVar[str] = "Bridge"
    kind: ClassVar[str] = "bridge"
    hermitian: ClassVar[bool] = True
    autonomous: ClassVar[bool] = False
    t_f: float = 1.0

    def __post_init__(self):
        if not self.t_f > 0:
            raise ValueError("bridge final time t_f must be positive")

    def params(self):
        return {"t_f": self.t_f}

    def _remaining(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t >= self.t_f):
            raise BridgeTimeOverflow(f"bridge time must stay below t_f={self.t_f}")
        return self.t_f - t

    def hamiltonian(self, q, p, t=0.0):
        q, p = _split(q, p, 2)
        k = 1.0 / self._remaining(t)
        z, al = q[..., 0], q[..., 1]
        pz, pa = p[..., 0], p[..., 1]
        h = 0.5 * pz * pz + k * (1 - z * pz - (al - 1) * pa)
        grad_p = np.stack([pz - k * z, -k * (al - 1)], -1)
        grad_q = np.stack([-k * pz, -k * pa], -1)
        return HamiltonianValue(h, grad_p, grad_q)

    def flow(self, q, p, t):
        q, p = _split(q, p, 2)
        rem = self._remaining(t)
        tf = self.t_f
        z0, a0 = q[..., 0], q[..., 1]
        p0, pa0 = p[..., 0], p[..., 1]
        z = p0 * t + z0 * rem / tf
        al = t / tf + a0 * rem / tf
        scale = tf / rem
        return np.stack([z, al], -1), np.stack([p0 * scale, pa0 * scale], -1)


# -------------------------------------------------------- public surface

VARIANTS = {
    cls.variant: cls
    for cls in (GUE, Elliptic, Ginibre, BiUnitary, OrnsteinUhlenbeck, Wishart, Jacobi,
                UnitaryZ, SingularValue, FreeRotor, KempHall, Bridge)
}


def ensemble_from_json(obj) -> Ensemble:
    """Inverse of ``Ensemble.to_json``; the variant tag is matched case-insensitively."""
    if isinstance(obj, str):
        obj = {"variant": obj, "params": {}}
    name = str(obj.get("variant", ""))
    params = dict(obj.get("params") or {})
    lookup = {k.lower(): v for k, v in VARIANTS.items()}
    lookup.update({"ou": OrnsteinUhlenbeck, "unitary": UnitaryZ, "rdiagonal": BiUnitary})
    cls = lookup.get(name.lower())
    if cls is None:
        raise UnsupportedVariant(f"unknown ensemble variant {name!r}")
    if cls is Jacobi and "lambda" in params:
        params["lam"] = params.pop("lambda")
    if cls is BiUnitary and "a_coeffs" in params:
        params["a_coeffs"] = tuple(params["a_coeffs"])
    return cls(**params)


def r_transform_eval(spec: Ensemble, p):
    """R-transform of an additive ensemble at a scalar or ``Quaternion`` argument."""
    if not spec.additive:
        raise UnsupportedVariant(f"{spec.variant} is specified by its Hamiltonian directly")
    return spec.r_transform(p)


def hamiltonian_eval(spec: Ensemble, p, q, t=0.0) -> HamiltonianValue:
    return spec.hamiltonian(q, p, t)


def hamiltonian_from_r_transform(spec: Ensemble, p, steps: int = 10_000) -> complex:
    """Trapezoid quadrature of ``int_0^P Tr[R(Q) dQ]`` along the segment ``Q = sP``.

    For the cataloged R-transforms the integrand is exact and the path is
    immaterial; the straight segment is the fixed convention.
    """
    s = np.linspace(0.0, 1.0, steps + 1)
    if spec.kind == "quaternionic":
        pq = p if isinstance(p, Quaternion) else Quaternion(*p)
        dq = pq.matrix()
        vals = np.array([trace_pairing(spec.r_transform(pq * si).matrix(), dq) for si in s])
    else:
        p = complex(p)
        vals = np.asarray(spec.r_transform(s * p), dtype=complex) * p
    return complex(np.trapezoid(vals, s))
