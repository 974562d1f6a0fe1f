"""Construction and validation of the smoothed pinched-sphere warping
function.

The radius function agrees with translated unit-sphere caps outside the
neck band [-eta, eta]. Inside, its second derivative is prescribed in
closed form (a plateau at -2*S around the equator blended into the cap
junction value), and r, rdot are recovered by quadrature of that closed
form, matched to the cap data at t = eta and mirrored evenly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import bisect, smooth_step


class FeasibilityError(ValueError):
    """Raised when (eta, S) cannot support a valid neck profile."""

    def __init__(self, report: "FeasibilityReport"):
        self.report = report
        failed = [c for c in report.checks if not c[3]]
        names = ", ".join(c[0] for c in failed)
        lines = [f"infeasible neck parameters (failed: {names})"]
        for name, lhs, rhs, ok in report.checks:
            mark = "ok" if ok else "VIOLATED"
            lines.append(f"  {name}: {lhs:.6g} < {rhs:.6g}  [{mark}]")
        super().__init__("\n".join(lines))


class ConstructionError(RuntimeError):
    """Raised when the neck correction cannot be tuned within its bounds."""


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the neck feasibility inequalities.

    Each check is (name, lhs, rhs, passed) with the convention lhs < rhs.
    """

    ok: bool
    checks: list[tuple[str, float, float, bool]]


def feasibility(eta: float, S: float) -> FeasibilityReport:
    """Evaluate the feasibility inequalities for the neck parameters.

    The checks, all normalized to "lhs < rhs":
      eta<1/2  : eta < 1/2 (cap formulas make sense)
      S>1      : 1 < S
      a        : 2*S*eta^2 < 2*eta/sqrt(1-4*eta^2)
      b        : 1/sqrt(1-4*eta^2) < S
      c        : S < (1/eta + 1 - 8*eta) / (2*(1-4*eta^2)^(3/2))
    """
    if not math.isfinite(eta) or not math.isfinite(S):
        raise ValueError("eta and S must be finite")
    if eta <= 0.0 or eta >= 0.5:
        raise ValueError(f"eta must lie in (0, 1/2), got {eta}")
    q = 1.0 - 4.0 * eta * eta
    checks = [
        ("eta<1/2", eta, 0.5, eta < 0.5),
        ("S>1", 1.0, S, 1.0 < S),
        ("a", 2.0 * S * eta * eta, 2.0 * eta / math.sqrt(q),
         2.0 * S * eta * eta < 2.0 * eta / math.sqrt(q)),
        ("b", 1.0 / math.sqrt(q), S, 1.0 / math.sqrt(q) < S),
        ("c", S, (1.0 / eta + 1.0 - 8.0 * eta) / (2.0 * q ** 1.5),
         S < (1.0 / eta + 1.0 - 8.0 * eta) / (2.0 * q ** 1.5)),
    ]
    return FeasibilityReport(ok=all(c[3] for c in checks), checks=checks)


def cap_eval(t: np.ndarray | float, eta: float, side: str):
    """Exact cap values (r, rdot, rddot) of the translated unit sphere.

    North cap lives on [eta, 1-eta] with r = sqrt(1-(t+eta)^2); the south
    cap is its mirror on [-1+eta, -eta].
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if side == "north":
        if np.any(t < eta - 1e-15) or np.any(t > 1.0 - eta + 1e-15):
            raise ValueError(f"t outside north cap [eta, 1-eta]: {t}")
        x = t + eta
    elif side == "south":
        if np.any(t > -eta + 1e-15) or np.any(t < -1.0 + eta - 1e-15):
            raise ValueError(f"t outside south cap [-1+eta, -eta]: {t}")
        x = t - eta
    else:
        raise ValueError(f"side must be north or south, got {side!r}")
    one_minus = np.maximum(1.0 - x * x, 0.0)
    r = np.sqrt(one_minus)
    with np.errstate(divide="ignore"):
        rdot = np.where(r > 0, -x / np.where(r > 0, r, 1.0),
                        np.where(x >= 0, -np.inf, np.inf))
        rddot = np.where(r > 0, -np.where(one_minus > 0, one_minus, 1.0) ** -1.5,
                         -np.inf)
    if scalar:
        return float(r[0]), float(rdot[0]), float(rddot[0])
    return r, rdot, rddot


@dataclass(frozen=True)
class WarpProfile:
    """A constructed warping function with exact derivative data.

    ``eta == 0`` denotes the round sphere (caps only, empty neck).
    The sample arrays are exactly even by mirrored construction.
    """

    n: int
    eta: float
    S: float
    grid_size: int
    blend_amp: float          # tuned amplitude of the neck correction bump
    grid: np.ndarray          # strictly increasing t samples, poles excluded
    r: np.ndarray
    rdot: np.ndarray
    rddot: np.ndarray
    panels: int = 256
    blend_id: str = "plateau-powerstep-v1"

    @property
    def t_max(self) -> float:
        return 1.0 - self.eta

    @property
    def cap_angle(self) -> float:
        """Polar angle subtended by each cap: arccos(2*eta)."""
        return math.acos(2.0 * self.eta)

    @property
    def r_neck_min(self) -> float:
        return math.sqrt(1.0 - 4.0 * self.eta * self.eta)

    def neck_accel(self, t: np.ndarray | float) -> np.ndarray | float:
        """Closed-form second derivative on the neck band [-eta, eta]."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        ta = np.abs(np.atleast_1d(t))
        if np.any(ta > self.eta + 1e-15):
            raise ValueError("neck_accel defined on [-eta, eta] only")
        out = _neck_rddot(ta, self.eta, self.S, self.blend_amp)
        return float(out[0]) if scalar else out

    def eval(self, t: np.ndarray | float):
        """(r, rdot, rddot) anywhere on the open interval (-1+eta, 1-eta)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t).astype(float)
        if np.any(np.abs(tq) > self.t_max + 1e-12):
            raise ValueError("t outside the profile domain")
        ta = np.abs(tq)
        sgn = np.where(tq < 0, -1.0, 1.0)
        r = np.empty_like(ta)
        rd = np.empty_like(ta)
        rdd = np.empty_like(ta)
        cap = ta >= self.eta
        if np.any(cap):
            rc, rdc, rddc = cap_eval(np.minimum(ta[cap], self.t_max), self.eta,
                                     "north")
            r[cap], rd[cap], rdd[cap] = rc, rdc, rddc
        neck = ~cap
        if np.any(neck):
            rn, rdn, rddn = _neck_eval(ta[neck], self.eta, self.S,
                                       self.blend_amp, self.panels)
            r[neck], rd[neck], rdd[neck] = rn, rdn, rddn
        rd = rd * sgn  # odd first derivative of an even function
        if scalar:
            return float(r[0]), float(rd[0]), float(rdd[0])
        return r, rd, rdd


def _neck_rddot(ta: np.ndarray, eta: float, S: float, amp: float) -> np.ndarray:
    """Closed-form neck rddot at |t| values ``ta`` in [0, eta].

    Plateau -2S on [0, eta^2]; on (eta^2, eta] an exponent-warped smooth
    step from -2S to the cap junction value -1/(1-4 eta^2)^(3/2). The
    warp exponent exp(amp) is tuned so rdot(0) comes out zero; the value
    stays inside [-2S, junction] for every amplitude by construction.
    """
    q = 1.0 - 4.0 * eta * eta
    junction = -q ** -1.5
    out = np.full_like(ta, -2.0 * S)
    e2 = eta * eta
    width = eta - e2
    trans = ta > e2
    if np.any(trans):
        u = (ta[trans] - e2) / width
        frac = np.asarray(smooth_step(u)) ** math.exp(amp)
        out[trans] = (1.0 - frac) * (-2.0 * S) + frac * junction
    return out


def _neck_quad_sums(ta: np.ndarray, eta: float, S: float, amp: float,
                    panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Simpson sums of rddot and (x - t)*rddot over [t, eta] per point."""
    m = 2 * panels
    j = np.arange(m + 1)
    w = np.full(m + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    span = eta - ta  # >= 0
    x = ta[:, None] + span[:, None] * (j / m)[None, :]
    vals = _neck_rddot(np.minimum(x, eta), eta, S, amp)
    wt = w[None, :] * (span / (3.0 * m))[:, None]
    s0 = np.sum(wt * vals, axis=1)
    s1 = np.sum(wt * vals * (x - ta[:, None]), axis=1)
    return s0, s1


def _neck_eval(ta: np.ndarray, eta: float, S: float, amp: float,
               panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(r, rdot, rddot) on the neck at |t| values, by quadrature of rddot
    matched to the cap data at t = eta."""
    q = 1.0 - 4.0 * eta * eta
    r_eta = math.sqrt(q)
    rdot_eta = -2.0 * eta / math.sqrt(q)
    s0, s1 = _neck_quad_sums(ta, eta, S, amp, panels)
    rdot = rdot_eta - s0
    r = r_eta - rdot_eta * (eta - ta) + s1
    rdd = _neck_rddot(ta, eta, S, amp)
    return r, rdot, rdd


def _tune_blend_amp(eta: float, S: float, panels: int) -> float:
    """Log-exponent of the transition warp making the neck rddot integrate
    to rdot(eta), which forces rdot(0) = 0 and evenness after mirroring."""
    q = 1.0 - 4.0 * eta * eta
    target = -2.0 * eta / math.sqrt(q)

    def total(amp: float) -> float:
        # same quadrature path as _neck_eval, so rdot(0) vanishes exactly
        # to the bisection tolerance
        s0, _ = _neck_quad_sums(np.array([0.0]), eta, S, amp, panels)
        return float(s0[0]) - target

    lo, hi = -1.0, 1.0
    for _ in range(12):
        if total(lo) * total(hi) <= 0:
            break
        lo *= 2.0
        hi *= 2.0
    else:
        raise ConstructionError(
            f"cannot bracket the neck correction amplitude; "
            f"residual at 0: {total(0.0):.3e}"
        )
    return bisect(total, lo, hi, tol=1e-14)


def _neck_grid_half(eta: float, grid_size: int) -> np.ndarray:
    """Sample points on [0, eta]: uniform with 4x refinement around the
    plateau edge eta^2 and the cap junction eta."""
    e2 = eta * eta
    e3 = e2 * eta
    w = (eta - e2) / 8.0
    edges = [0.0, max(e2 - e3, 0.0), min(e2 + e3, eta - w), eta - w, eta]
    dens = [1.0, 4.0, 1.0, 4.0]
    h0 = eta / grid_size
    pieces = []
    for (a, b), d in zip(zip(edges[:-1], edges[1:]), dens):
        if b <= a:
            continue
        cnt = max(2, int(math.ceil((b - a) / h0 * d)) + 1)
        pieces.append(np.linspace(a, b, cnt))
    t = np.unique(np.concatenate(pieces))
    return t


def _cap_grid(eta: float, grid_size: int) -> np.ndarray:
    """North-cap sample points (eta, 1-eta), uniform in the cap angle,
    poles excluded, junction t = eta excluded (it belongs to the neck
    grid when eta > 0)."""
    alpha1 = math.acos(2.0 * eta)
    alpha = np.linspace(alpha1, 0.0, grid_size + 1)[1:-1] if eta == 0.0 \
        else np.linspace(alpha1, 0.0, grid_size + 1)[1:-1]
    t = np.cos(alpha) - eta
    return np.sort(t)


def build_profile(n: int, eta: float, S: float, grid_size: int = 512) -> WarpProfile:
    """Construct the warping profile for dimension n and neck (eta, S).

    ``eta == 0`` builds the round sphere. Raises FeasibilityError for
    inadmissible (eta, S) and ConstructionError if the tuned neck
    acceleration leaves its admissible band.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if grid_size < 64:
        raise ValueError(f"grid_size must be >= 64, got {grid_size}")
    if eta == 0.0:
        tpos = _cap_grid(0.0, 2 * grid_size)
        tpos = tpos[tpos > 0]
        grid = np.concatenate([-tpos[::-1], [0.0], tpos])
        r, rd, rdd = cap_eval(np.abs(grid), 0.0, "north")
        rd = rd * np.where(grid < 0, -1.0, 1.0)
        return WarpProfile(n=n, eta=0.0, S=1.0, grid_size=grid_size,
                           blend_amp=0.0, grid=grid, r=r, rdot=rd, rddot=rdd)

    report = feasibility(eta, S)
    if not report.ok:
        raise FeasibilityError(report)

    panels = max(512, grid_size)
    if panels % 2:
        panels += 1
    amp = _tune_blend_amp(eta, S, panels)

    # clamp-check, never clamp-modify: surface an out-of-band acceleration
    q = 1.0 - 4.0 * eta * eta
    junction = -q ** -1.5
    tt = np.linspace(0.0, eta, 4097)
    acc = _neck_rddot(tt, eta, S, amp)
    margin = 1e-9
    if np.any(acc < -2.0 * S - margin) or np.any(acc > junction + margin):
        worst = float(np.max(np.maximum(acc - junction, -2.0 * S - acc)))
        raise ConstructionError(
            f"tuned neck acceleration leaves [-2S, -(1-4eta^2)^(-3/2)] "
            f"by {worst:.3e}; amplitude {amp:.3e}"
        )

    tneck = _neck_grid_half(eta, grid_size)
    tcap = _cap_grid(eta, grid_size)
    tpos = np.unique(np.concatenate([tneck, tcap]))
    tpos = tpos[tpos > 0]
    grid = np.concatenate([-tpos[::-1], [0.0], tpos])

    prof = WarpProfile(n=n, eta=eta, S=S, grid_size=grid_size, blend_amp=amp,
                       grid=grid, r=np.empty(0), rdot=np.empty(0),
                       rddot=np.empty(0), panels=panels)
    # evaluate the positive half once and mirror for exact evenness
    rp, rdp, rddp = prof.eval(np.concatenate([[0.0], tpos]))
    r = np.concatenate([rp[1:][::-1], rp])
    rd = np.concatenate([-rdp[1:][::-1], rdp])
    rdd = np.concatenate([rddp[1:][::-1], rddp])
    object.__setattr__(prof, "r", r)
    object.__setattr__(prof, "rdot", rd)
    object.__setattr__(prof, "rddot", rdd)
    return prof


@dataclass(frozen=True)
class Violation:
    condition: str
    t: float
    margin: float

    def __str__(self) -> str:
        return f"condition {self.condition} violated at t={self.t:.6g} " \
               f"by {self.margin:.3e}"


def validate_profile(p: WarpProfile, tol: float = 1e-9) -> list[Violation]:
    """Check the eight neck conditions on the stored samples.

    Returns an empty list iff all conditions hold at every grid point
    within ``tol``; otherwise one entry per offending (condition, point).
    """
    out: list[Violation] = []
    t, r, rd, rdd = p.grid, p.r, p.rdot, p.rddot
    eta, S = p.eta, p.S

    def flag(cond: str, mask: np.ndarray, margin: np.ndarray) -> None:
        bad = mask & (margin > tol)
        for ti, mi in zip(t[bad], margin[bad]):
            out.append(Violation(cond, float(ti), float(mi)))

    # (1) evenness: the grid is symmetric, compare against its reversal
    flag("1", np.ones_like(t, bool), np.abs(r - r[::-1]))
    flag("1", np.ones_like(t, bool), np.abs(rd + rd[::-1]))

    # (2)/(3) cap formulas
    south = t <= -eta
    if np.any(south):
        rs, _, _ = cap_eval(t[south], eta, "south")
        flag("2", south, _expand(np.abs(r[south] - rs), south, t.size))
    north = t >= eta
    if np.any(north):
        rn, _, _ = cap_eval(t[north], eta, "north")
        flag("3", north, _expand(np.abs(r[north] - rn), north, t.size))

    if eta > 0.0:
        q = 1.0 - 4.0 * eta * eta
        neck = np.abs(t) <= eta
        lo4, hi4 = math.sqrt(q), 1.0 / math.sqrt(q)
        flag("4", neck, np.maximum(lo4 - r, r - hi4))
        flag("5", neck, np.abs(rd) - 2.0 * eta / math.sqrt(q))
        plateau = np.abs(t) <= eta * eta
        flag("7", plateau, np.abs(rdd + 2.0 * S))
        flag("8", neck, np.maximum(-2.0 * S - rdd, rdd - (-q ** -1.5)))

    # (6) strict concavity on the whole open interval
    flag("6", np.ones_like(t, bool), rdd)
    return out


def _expand(vals: np.ndarray, mask: np.ndarray, size: int) -> np.ndarray:
    full = np.zeros(size)
    full[mask] = vals
    return full
