"""Shared numerical kernel: composite quadrature, symmetric tridiagonal
eigenvalues by Sturm bisection, flat smooth step / bump functions, and
scalar bisection.

All routines are pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Simpson rule with a fixed even panel count."""

    panel_count: int = 256
    order: int = 4

    def __post_init__(self) -> None:
        if self.panel_count < 4 or self.panel_count % 2 != 0:
            raise ValueError(
                f"panel_count must be even and >= 4, got {self.panel_count}"
            )


@dataclass(frozen=True)
class TridiagSpec:
    """Symmetric tridiagonal matrix: diagonal of length m, off-diagonal m-1."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a vector of length >= 1")
        if e.shape != (d.size - 1,):
            raise ValueError("offdiag must have length len(diag) - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("tridiagonal entries must be finite")

    @property
    def size(self) -> int:
        return self.diag.size


def simpson_nodes_weights(a: float, b: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite Simpson rule on [a, b]."""
    m = 2 * panels  # subintervals (Simpson pairs two of them per panel)
    x = np.linspace(a, b, m + 1)
    h = (b - a) / m
    w = np.full(m + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    w *= h / 3.0
    return x, w


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rule: QuadratureRule = QuadratureRule(),
) -> float:
    """Composite Simpson approximation of the integral of ``f`` over [a, b].

    ``f`` must accept a numpy array of sample points. Raises if any sample
    comes back non-finite, naming the offending point.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    x, w = simpson_nodes_weights(a, b, rule.panel_count)
    y = np.asarray(f(x), dtype=float)
    bad = ~np.isfinite(y)
    if np.any(bad):
        raise ValueError(f"non-finite integrand sample at x={x[bad][0]!r}")
    return float(np.dot(w, y))


def _sturm_count(d: np.ndarray, e2: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below x.

    Standard LDL^T sign-count recurrence with underflow safeguarding.
    """
    tiny = 1e-300
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def _sturm_count_vec(d: np.ndarray, e2: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Vectorized Sturm count for several shift values at once."""
    tiny = 1e-300
    q = d[0] - xs
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = np.where(q == 0.0, tiny, q)
        q = d[i] - xs - e2[i - 1] / q
        count += q < 0
    return count


def tridiag_smallest(spec: TridiagSpec, k: int, rel_tol: float = 1e-12) -> np.ndarray:
    """The k smallest eigenvalues of a symmetric tridiagonal matrix.

    Sturm-sequence bisection; each eigenvalue is located to relative
    tolerance ``rel_tol`` (plus a tiny absolute floor for eigenvalues
    near zero). Deterministic.
    """
    m = spec.size
    if k > m:
        raise ValueError(f"requested {k} eigenvalues of a {m}x{m} matrix")
    if k <= 0:
        return np.zeros(0)
    d = spec.diag
    e = spec.offdiag
    e2 = e * e
    # Gershgorin bounds
    rad = np.zeros(m)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo = float(np.min(d - rad))
    hi = float(np.max(d + rad))
    scale = max(abs(lo), abs(hi), 1e-30)
    los = np.full(k, lo)
    his = np.full(k, hi)
    targets = np.arange(1, k + 1)  # want count >= j for the j-th smallest
    for _ in range(200):
        mids = 0.5 * (los + his)
        cnt = _sturm_count_vec(d, e2, mids)
        take_hi = cnt >= targets
        his = np.where(take_hi, mids, his)
        los = np.where(take_hi, los, mids)
        width = his - los
        if np.all(width <= rel_tol * np.maximum(np.abs(his), np.abs(los))
                  + 1e-15 * scale):
            break
    return 0.5 * (los + his)


def tridiag_ground(spec: TridiagSpec) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and its unit eigenvector (inverse iteration)."""
    from scipy.linalg import solve_banded

    lam = float(tridiag_smallest(spec, 1)[0])
    m = spec.size
    scale = max(1.0, abs(lam))
    shift = lam - 1e-10 * scale
    ab = np.zeros((3, m))
    ab[0, 1:] = spec.offdiag
    ab[1, :] = spec.diag - shift
    ab[2, :-1] = spec.offdiag
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    for _ in range(5):
        v = solve_banded((1, 1), ab, v)
        v /= np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return lam, v


def smooth_step(x: np.ndarray | float) -> np.ndarray | float:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly increasing
    between, infinitely flat at both ends. Built from exp(-1/x)."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    with np.errstate(over="ignore", divide="ignore"):
        lo = x <= 0.0
        hi = x >= 1.0
        mid = ~(lo | hi)
        out[lo] = 0.0
        out[hi] = 1.0
        xm = x[mid]
        g = np.exp(-1.0 / xm)
        g1 = np.exp(-1.0 / (1.0 - xm))
        out[mid] = g / (g + g1)
    return float(out[0]) if scalar else out


def flat_bump(x: np.ndarray | float) -> np.ndarray | float:
    """C-infinity bump supported on (0, 1), peak value 1 at x = 1/2."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.zeros_like(x)
    inside = (x > 0.0) & (x < 1.0)
    xi = x[inside]
    out[inside] = np.exp(4.0 - 1.0 / (xi * (1.0 - xi)))
    return float(out[0]) if scalar else out


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of f on [lo, hi] by bisection; bracket width reduced below tol.

    Requires a sign change (or a zero) at the endpoints.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError(
            f"bisect: f has the same sign at both endpoints "
            f"(f({lo})={flo}, f({hi})={fhi})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
