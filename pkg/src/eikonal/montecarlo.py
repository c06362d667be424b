"""Finite-N Monte-Carlo oracle: samplers, matrix walks and spectral statistics.

Every replica draws from its own stream ``SeedSequence(seed, spawn_key=(i,))``,
so results do not depend on evaluation order or thread count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .ensembles import GUE, Elliptic, Ensemble, Ginibre, KempHall, SingularValue, UnitaryZ, Wishart
from .errors import BadDimension, DefectiveMatrix, EigFailure, UnsupportedVariant

OVERLAP_COND_LIMIT = 1e12


def replica_rng(seed: int, replica: int = 0) -> np.random.Generator:
    """Independent generator for replica ``replica`` of master seed ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(replica),)))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return replica_rng(seed, 0)


def thread_count() -> int:
    """Worker cap from ``RMT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("RMT_THREADS", "1")))
    except ValueError:
        return 1


def run_replicas(fn, seed: int, count: int, threads: int | None = None) -> list:
    """``[fn(replica_rng(seed, i)) for i in range(count)]``, optionally threaded."""
    threads = thread_count() if threads is None else max(1, int(threads))
    rngs = [replica_rng(seed, i) for i in range(count)]
    if threads == 1 or count == 1:
        return [fn(r) for r in rngs]
    with ThreadPoolExecutor(max_workers=min(threads, count)) as pool:
        return list(pool.map(fn, rngs))


# ------------------------------------------------------------- samples


@dataclass(frozen=True)
class MatrixSample:
    n: int
    entries: np.ndarray
    kind: str

    def __post_init__(self):
        a = self.entries
        if a.shape != (self.n, self.n):
            raise BadDimension(f"entries must be {self.n}x{self.n}")
        if self.kind not in ("hermitian", "general", "unitary"):
            raise ValueError(f"unknown kind {self.kind!r}")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
        if self.kind == "hermitian" and np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
            raise ValueError("hermitian sample is not self-adjoint")
        if self.kind == "unitary":
            dev = np.max(np.abs(a.conj().T @ a - np.eye(self.n)))
            if dev > 1e-10:
                raise ValueError(f"unitary sample deviates from unitarity by {dev:.1e}")


def _complex_gaussian(rng, n, variance):
    """Entries with ``E|x|^2 = variance``."""
    s = math.sqrt(variance / 2)
    return s * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def _gue(rng, n, variance):
    x = _complex_gaussian(rng, n, variance / n)
    return (x + x.conj().T) / math.sqrt(2)


def _draw(spec: Ensemble, n: int, variance: float, rng) -> tuple:
    if isinstance(spec, GUE):
        return _gue(rng, n, variance), "hermitian"
    if isinstance(spec, Elliptic):
        tau = spec.tau
        h1 = _gue(rng, n, variance)
        h2 = _gue(rng, n, variance)
        x = math.sqrt((1 + tau) / 2) * h1 + 1j * math.sqrt((1 - tau) / 2) * h2
        return x, ("hermitian" if tau == 1 else "general")
    if isinstance(spec, Ginibre):
        return _complex_gaussian(rng, n, variance / n), "general"
    if isinstance(spec, Wishart):
        cols = max(1, round(n / spec.r))
        s = math.sqrt(variance / 2)
        y = s * (rng.standard_normal((n, cols)) + 1j * rng.standard_normal((n, cols)))
        w = y @ y.conj().T / cols
        return (w + w.conj().T) / 2, "hermitian"
    raise UnsupportedVariant(f"no sampler for {spec.variant}")


def sample_ensemble(spec: Ensemble, n: int, variance: float = 1.0, seed=0) -> MatrixSample:
    """One draw of ``spec`` at size ``n``.

    GUE and Ginibre entries have variance ``variance / n``; the elliptic sample
    is ``sqrt((1+tau)/2) H1 + i sqrt((1-tau)/2) H2`` with independent GUE parts;
    Wishart is ``Y Y^dagger / T`` with ``T = round(n / r)`` columns of variance
    ``variance``.  ``seed`` is an integer or a ``numpy.random.Generator``.
    """
    if int(n) != n or n < 2:
        raise BadDimension(f"n must be an integer >= 2, got {n}")
    if not variance > 0:
        raise ValueError("variance must be positive")
    n = int(n)
    entries, kind = _draw(spec, n, variance, _as_rng(seed))
    return MatrixSample(n, entries, kind)


def walk_mode(spec: Ensemble) -> str:
    if isinstance(spec, (GUE, Ginibre, Elliptic)):
        return "additive"
    if isinstance(spec, UnitaryZ):
        return "unitary"
    if isinstance(spec, (SingularValue, KempHall)):
        return "multiplicative"
    raise UnsupportedVariant(f"no matrix walk for {spec.variant}")


def matrix_walk(spec: Ensemble, n: int, steps: int, dt: float, seed=0) -> MatrixSample:
    """Random walk of ``steps`` increments of size ``dt``.

    Additive ensembles sum independent increments of variance ``dt``.  The
    unitary walk multiplies ``exp(i sqrt(dt) H)`` with unit-variance GUE ``H``;
    the multiplicative walk multiplies ``exp(sqrt(dt) X)`` with unit-variance
    Ginibre ``X``.  New factors act from the left.
    """
    if int(steps) != steps or steps < 1:
        raise ValueError("steps must be a positive integer")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if int(n) != n or n < 2:
        raise BadDimension(f"n must be an integer >= 2, got {n}")
    n, steps = int(n), int(steps)
    rng = _as_rng(seed)
    mode = walk_mode(spec)
    if mode == "additive":
        total = np.zeros((n, n), dtype=complex)
        kind = "hermitian"
        for _ in range(steps):
            inc, kind = _draw(spec, n, dt, rng)
            total += inc
        return MatrixSample(n, total, kind)
    root = math.sqrt(dt)
    u = np.eye(n, dtype=complex)
    for _ in range(steps):
        if mode == "unitary":
            u = expm(1j * root * _gue(rng, n, 1.0)) @ u
        else:
            u = expm(root * _complex_gaussian(rng, n, 1.0 / n)) @ u
    if mode == "unitary":
        # re-unitarize against accumulated rounding (polar factor)
        w, _, vh = np.linalg.svd(u)
        u = w @ vh
        return MatrixSample(n, u, "unitary")
    return MatrixSample(n, u, "general")


# ---------------------------------------------------------- statistics


def eigendecompose(m: MatrixSample, vectors: bool = False):
    """Eigenvalues (and right eigenvectors) through LAPACK."""
    try:
        if m.kind == "hermitian":
            out = np.linalg.eigh(m.entries) if vectors else np.linalg.eigvalsh(m.entries)
        else:
            out = np.linalg.eig(m.entries) if vectors else np.linalg.eigvals(m.entries)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    vals = out[0] if vectors else out
    if not np.all(np.isfinite(vals)):
        raise EigFailure("non-finite eigenvalues")
    return out


@dataclass(frozen=True)
class EmpiricalDensity:
    """Histogram with ``sum(counts * bin_area) * norm == 1``.

    One-dimensional when ``edges`` is a single array; two-dimensional when it
    is a pair ``(x_edges, y_edges)``.
    """

    edges: object
    counts: np.ndarray
    norm: float

    @property
    def two_dimensional(self) -> bool:
        return isinstance(self.edges, tuple)

    def bin_areas(self) -> np.ndarray:
        if self.two_dimensional:
            return np.outer(np.diff(self.edges[0]), np.diff(self.edges[1]))
        return np.diff(self.edges)

    def density(self) -> np.ndarray:
        return self.counts * self.norm

    def total(self) -> float:
        return float(np.sum(self.counts * self.bin_areas()) * self.norm)

    def cdf_at_edges(self) -> np.ndarray:
        if self.two_dimensional:
            raise ValueError("cdf is defined for one-dimensional histograms only")
        return np.concatenate([[0.0], np.cumsum(self.counts * np.diff(self.edges)) * self.norm])


def _hist_1d(values, bins, lo=None, hi=None):
    lo = float(values.min()) if lo is None else lo
    hi = float(values.max()) if hi is None else hi
    if hi - lo <= 1e-14 * max(1.0, abs(lo)):
        edges = np.array([lo - 0.5, lo + 0.5])
        counts = np.array([values.size], dtype=float)
    else:
        counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
        counts = counts.astype(float)
    width = np.diff(edges)
    return EmpiricalDensity(edges, counts, 1.0 / float(np.sum(counts * width)))


def histogram(values, bins: int = 64, support=None) -> EmpiricalDensity:
    """Normalized histogram of real or complex samples, clipped to ``support``."""
    values = np.asarray(values).reshape(-1)
    if values.size == 0:
        raise ValueError("no samples")
    if np.iscomplexobj(values) and np.any(values.imag != 0):
        if support is None:
            support = ((values.real.min(), values.real.max()), (values.imag.min(), values.imag.max()))
        (x0, x1), (y0, y1) = support
        pad = lambda a, b: (a - 0.5, b + 0.5) if b - a <= 1e-14 else (a, b)  # noqa: E731
        (x0, x1), (y0, y1) = pad(x0, x1), pad(y0, y1)
        counts, xe, ye = np.histogram2d(values.real, values.imag, bins=bins,
                                        range=((x0, x1), (y0, y1)))
        emp = EmpiricalDensity((xe, ye), counts.astype(float), 1.0)
        return EmpiricalDensity((xe, ye), emp.counts, 1.0 / float(np.sum(counts * emp.bin_areas())))
    values = values.real.astype(float)
    lo, hi = (None, None) if support is None else support
    return _hist_1d(values, bins, lo, hi)


def spectral_stats(m: MatrixSample, bins: int = 64):
    """Eigenvalues and their histogram.

    Hermitian samples give a real histogram, unitary samples a histogram of
    eigenphases on ``[-pi, pi]`` and general samples a 2D histogram.
    """
    if int(bins) != bins or bins < 1:
        raise ValueError("bins must be a positive integer")
    eigs = eigendecompose(m)
    if m.kind == "hermitian":
        return eigs, histogram(eigs.real, bins)
    if m.kind == "unitary":
        return eigs, histogram(np.angle(eigs), bins, (-math.pi, math.pi))
    return eigs, histogram(eigs.astype(complex) + 0j, bins)


def ks_distance(samples, cdf) -> float:
    """Sup-norm distance between an empirical CDF and the callable ``cdf``.

    ``samples`` is an array of draws (exact empirical CDF) or a 1D
    EmpiricalDensity (CDF compared at the bin edges).
    """
    if isinstance(samples, EmpiricalDensity):
        edges = samples.edges
        return float(np.max(np.abs(samples.cdf_at_edges() - np.asarray(cdf(edges), dtype=float))))
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))
    if x.size == 0:
        raise ValueError("no samples")
    f = np.asarray(cdf(x), dtype=float)
    k = np.arange(1, x.size + 1)
    return float(max(np.max(k / x.size - f), np.max(f - (k - 1) / x.size)))


def cdf_distance(cdf_a, cdf_b, lo: float, hi: float, points: int = 200_001) -> float:
    """Sup of ``|cdf_a - cdf_b|`` on a dense grid of ``[lo, hi]``."""
    x = np.linspace(lo, hi, points)
    return float(np.max(np.abs(np.asarray(cdf_a(x)) - np.asarray(cdf_b(x)))))


def semicircle_cdf(t: float = 1.0, center: float = 0.0):
    """CDF of the semicircle law of radius ``2 sqrt(t)``."""
    r = 2 * math.sqrt(t)

    def cdf(x):
        u = np.clip((np.asarray(x, dtype=float) - center) / r, -1.0, 1.0)
        return 0.5 + (u * np.sqrt(1 - u * u) + np.arcsin(u)) / math.pi

    return cdf


def disk_radial_cdf(t: float = 1.0):
    """CDF of ``|z|`` for the uniform disk of radius ``sqrt(t)``."""

    def cdf(r):
        return np.clip(np.asarray(r, dtype=float) ** 2 / t, 0.0, 1.0)

    return cdf


# ------------------------------------------------------------- overlaps


@dataclass(frozen=True)
class OverlapRecord:
    eigenvalues: np.ndarray
    o_diag: np.ndarray


def overlap_stats(m: MatrixSample) -> OverlapRecord:
    """Diagonal overlaps ``O_ii = <L_i|L_i><R_i|R_i>`` with ``<L_i|R_j> = delta_ij``.

    Right eigenvectors are the columns of ``R``; left eigenvectors the rows of
    ``R^-1``, which makes the pair bi-orthonormal by construction.
    """
    vals, right = eigendecompose(m, vectors=True)
    if m.kind == "hermitian":
        return OverlapRecord(vals.astype(complex), np.ones(m.n))
    cond = np.linalg.cond(right)
    if not np.isfinite(cond) or cond > OVERLAP_COND_LIMIT:
        raise DefectiveMatrix(f"eigenvector condition number {cond:.2e}")
    left = np.linalg.inv(right)
    o = np.sum(np.abs(left) ** 2, axis=1) * np.sum(np.abs(right) ** 2, axis=0)
    return OverlapRecord(vals.astype(complex), o)


def radial_overlap_profile(records, n: int, r_edges):
    """Binned ``(1/N^2) <sum_i O_ii delta(z - lambda_i)>`` over annuli.

    Returns the per-annulus average density (area-normalized, seed-averaged).
    """
    r_edges = np.asarray(r_edges, dtype=float)
    acc = np.zeros(r_edges.size - 1)
    for rec in records:
        r = np.abs(rec.eigenvalues)
        acc += np.histogram(r, bins=r_edges, weights=rec.o_diag)[0]
    area = math.pi * np.diff(r_edges ** 2)
    return acc / (len(records) * n * n * area)


def ellipse_semi_axes(eigs) -> tuple:
    """Semi-axes of the uniform ellipse matching the second moments of ``eigs``.

    For the uniform law on an axis-aligned ellipse, ``E[x^2] = a^2/4``.
    """
    eigs = np.asarray(eigs, dtype=complex)
    x = eigs.real - eigs.real.mean()
    y = eigs.imag - eigs.imag.mean()
    return 2 * math.sqrt(float(np.mean(x * x))), 2 * math.sqrt(float(np.mean(y * y)))


def largest_phase_gap(eigs) -> float:
    """Widest arc between consecutive eigenphases."""
    ph = np.sort(np.angle(np.asarray(eigs, dtype=complex)))
    gaps = np.diff(np.concatenate([ph, [ph[0] + 2 * math.pi]]))
    return float(gaps.max())
