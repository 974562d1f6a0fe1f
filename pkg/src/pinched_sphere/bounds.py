"""Eigenvalue bounds for the Dirac spectrum bottom: the Friedrich lower
bound and its improved class constants, the first-Betti-number conjecture
constant, the extrinsic hypersurface upper bound, and the cutoff-function
inequality chain with its r^(n-2) excess.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SurfaceGeometry
from .spectral import RadialEigenspinor

CLASSES = ("general", "kaehler_odd", "kaehler_even", "quaternionic",
           "parallel_one_form")


def friedrich_bound(n: int, min_scal: float) -> float:
    """Lower bound (n/(4(n-1))) * min Scal for all squared eigenvalues."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    return n / (4.0 * (n - 1)) * min_scal


def conjecture_bound(n: int, min_scal: float) -> float:
    """Conjectured bound ((n-1)/(4(n-2))) * min Scal for nonzero first
    Betti number; defined for n >= 3 only."""
    if n < 3:
        raise ValueError("conjecture bound requires n >= 3")
    return (n - 1) / (4.0 * (n - 2)) * min_scal


def class_constant(n: int, cls: str) -> float:
    """Dimension-dependent coefficient c_n for a geometric class."""
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if cls == "general":
        return n / (4.0 * (n - 1))
    if cls == "kaehler_odd":
        if n % 2:
            raise ValueError("Kaehler classes require even dimension")
        return (n + 2) / (4.0 * n)
    if cls == "kaehler_even":
        if n % 2 or n < 4:
            raise ValueError("Kaehler classes require even dimension >= 4")
        return n / (4.0 * (n - 2))
    if cls == "quaternionic":
        if n % 4:
            raise ValueError("quaternionic class requires n divisible by 4")
        return (n + 12) / (4.0 * (n + 8))
    if cls == "parallel_one_form":
        if n < 3:
            raise ValueError("parallel one-form class requires n >= 3")
        return (n - 2) / (4.0 * (n - 1))
    raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")


def extrinsic_bound(g: SurfaceGeometry) -> float:
    """Upper bound n^2/(4 vol) * integral of H^2 for hypersurfaces."""
    return g.n ** 2 * g.H2_integral / (4.0 * g.vol)


def radius_for_excess(delta: float, C: float, n: int) -> float:
    """Radius with C * r^(n-2) = delta; the witness for the excess bound."""
    if n < 3:
        raise ValueError("excess radius undefined for n = 2 (exponent 0)")
    if not (delta > 0 and C > 0):
        raise ValueError("delta and C must be positive")
    return (delta / C) ** (1.0 / (n - 2))


@dataclass(frozen=True)
class CutoffChain:
    r: float
    r0: float
    quotient_bound: float
    final_bound: float
    C: float
    excess: float        # quotient_bound - lambda1_sq
    lambda1_sq: float


def cutoff_chain(g: SurfaceGeometry, phi: RadialEigenspinor, r: float,
                 r0: float) -> CutoffChain:
    """Evaluate the cutoff inequality chain for a ball about the north pole.

    quotient_bound = lam^2 + (4/r^2) I(B_2r) / I(M - B_2r) with
    I(A) = integral of |phi|^2 over A; final_bound = lam^2 + C r^(n-2)
    with C = 4 vol(B_2r) sup|phi|^2 / (r^n I(M - B_2r0)).  Balls are the
    arclength sublevels {L - s < radius}.
    """
    L = g.length
    if not 0 < r <= r0:
        raise ValueError(f"need 0 < r <= r0, got r={r}, r0={r0}")
    if not 2 * r0 < L:
        raise ValueError(f"need 2*r0 < L, got r0={r0}, L={L}")
    n = g.n
    lam_sq = phi.lam ** 2
    s = phi.s_grid
    h = L / s.size
    rr, _ = g.r_of_s(s)
    w = g.sphere_factor * rr ** (n - 1) * h
    in_ball = s > L - 2 * r
    in_ball0 = s > L - 2 * r0
    I_ball = float(np.dot(w[in_ball], phi.density[in_ball]))
    I_out = float(np.dot(w[~in_ball], phi.density[~in_ball]))
    I_out0 = float(np.dot(w[~in_ball0], phi.density[~in_ball0]))
    vol_ball = float(np.sum(w[in_ball]))
    if I_out <= 0 or I_out0 <= 0:
        raise ValueError("eigenspinor mass outside the ball vanishes")
    quotient = lam_sq + (4.0 / (r * r)) * I_ball / I_out
    C = 4.0 * vol_ball * phi.sup_norm_sq / (r ** n * I_out0)
    final = lam_sq + C * r ** (n - 2)
    return CutoffChain(r=r, r0=r0, quotient_bound=quotient,
                       final_bound=final, C=C,
                       excess=quotient - lam_sq, lambda1_sq=lam_sq)


@dataclass(frozen=True)
class BoundsReport:
    n: int
    min_scal: float
    friedrich: float
    conjecture: float | None
    extrinsic: float
    class_constants: dict[str, float]
    cutoff: CutoffChain | None = None


def bounds_report(g: SurfaceGeometry, phi: RadialEigenspinor | None = None,
                  r: float | None = None) -> BoundsReport:
    """Assemble all bounds for a measured geometry.

    If an eigenspinor is supplied the cutoff chain is evaluated at ball
    radius r (default r0 = L/8, r = r0/2).
    """
    n = g.n
    consts = {}
    for cls in CLASSES:
        try:
            consts[cls] = class_constant(n, cls)
        except ValueError:
            pass
    cutoff = None
    if phi is not None:
        r0 = g.length / 8.0
        cutoff = cutoff_chain(g, phi, r if r is not None else r0 / 2.0, r0)
    return BoundsReport(
        n=n,
        min_scal=g.min_scal,
        friedrich=friedrich_bound(n, g.min_scal),
        conjecture=conjecture_bound(n, g.min_scal) if n >= 3 else None,
        extrinsic=extrinsic_bound(g),
        class_constants=consts,
        cutoff=cutoff,
    )
