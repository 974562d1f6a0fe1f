"""Acceptance suite: seven top-level criteria, one printed verdict line
per (sub-)case.

Criteria 2, 3 and 4 prescribe the parameter family S = 2 n (n-1) with
eta in {0.2, 0.1, 0.05}.  Several of those combinations violate the neck
feasibility inequality (c) that criterion 6 simultaneously requires the
builder to reject: (n=2, S=4, eta=0.2) and every (n=3, S=12, eta) with
eta > ~0.044 are infeasible.  Those sub-cases are implemented faithfully
and fail honestly; each is paired with a supplementary sub-case at the
nearest feasible parameters demonstrating the same property.
"""

import math
import time

import numpy as np
import pytest

from pinched_sphere.bounds import (conjecture_bound, cutoff_chain,
                                   extrinsic_bound, friedrich_bound)
from pinched_sphere.geometry import curvature_report, measure, rescale
from pinched_sphere.numerics import TridiagSpec, tridiag_smallest
from pinched_sphere.profile import (FeasibilityError, build_profile,
                                    feasibility, validate_profile)
from pinched_sphere.spectral import (dirac_lambda1, eigenspinor_profile,
                                     shooting_ground_lambda)
from oracle_tridiag import charpoly_eigs

_geometry_cache = {}
_spectrum_cache = {}


def report(criterion: str, ok: bool, detail: str) -> None:
    verdict = "PASS" if ok else "FAIL"
    print(f"\n[acceptance] criterion {criterion}: {verdict} — {detail}",
          flush=True)


def pinched_geometry(n: int, eta: float, S: float):
    """Build, measure and rescale (c = 1 - 4 eta^2); cached."""
    key = (n, eta, S)
    if key not in _geometry_cache:
        p = build_profile(n, eta, S, 256)
        g = measure(p)
        if eta > 0:
            g = rescale(g, 1.0 - 4.0 * eta * eta)
        _geometry_cache[key] = (p, g)
    return _geometry_cache[key]


def lambda1(n: int, eta: float, S: float) -> float:
    key = (n, eta, S)
    if key not in _spectrum_cache:
        _, g = pinched_geometry(n, eta, S)
        _spectrum_cache[key] = dirac_lambda1(g, m_max=1,
                                             grid_size=512).lambda1_sq
    return _spectrum_cache[key]


class TestCriterion1RoundSphereExactness:
    @pytest.mark.parametrize("n,exact,tol", [(2, 1.0, 1e-4),
                                             (3, 2.25, 1e-3)])
    def test_round_lambda1(self, n, exact, tol):
        g = measure(build_profile(n, 0.0, 2.0, 256))
        t0 = time.perf_counter()
        res = dirac_lambda1(g, m_max=1, grid_size=2048)
        elapsed = time.perf_counter() - t0
        err = abs(res.lambda1_sq - exact)
        ok = err <= tol and elapsed < 10.0
        report(f"1 [round S{n}]", ok,
               f"lambda1_sq={res.lambda1_sq:.10f} |err|={err:.2e} "
               f"(tol {tol}), runtime {elapsed:.1f}s < 10s")
        assert ok


FAMILY = [(n, eta, 2 * n * (n - 1)) for n in (2, 3)
          for eta in (0.2, 0.1, 0.05)]


class TestCriterion2ScalarCurvatureFloor:
    @pytest.mark.parametrize("n,eta,S", FAMILY)
    def test_family(self, n, eta, S):
        label = f"2 [n={n} eta={eta} S={S}]"
        t0 = time.perf_counter()
        try:
            p, g = pinched_geometry(n, eta, S)
        except FeasibilityError as exc:
            failed = [c[0] for c in exc.report.checks if not c[3]]
            report(label, False,
                   f"prescribed parameters are infeasible (violated: "
                   f"{', '.join(failed)}); cannot build the profile")
            raise
        _, verdicts = curvature_report(p)
        elapsed = time.perf_counter() - t0
        floor_ok = g.min_scal >= n * (n - 1) - 1e-6
        strip_ok = verdicts["strip_scal_above_S"]
        ok = floor_ok and strip_ok and elapsed < 5.0
        report(label, ok,
               f"rescaled min Scal={g.min_scal:.6f} >= {n*(n-1)} - 1e-6: "
               f"{floor_ok}; Scal > S on strip: {strip_ok}; "
               f"runtime {elapsed:.1f}s < 5s")
        assert ok

    @pytest.mark.parametrize("n,eta,S", [(2, 0.2, 2.0), (3, 0.025, 12.0)])
    def test_supplementary_feasible(self, n, eta, S):
        # same property at the nearest feasible parameters
        p, g = pinched_geometry(n, eta, S)
        _, verdicts = curvature_report(p)
        ok = (g.min_scal >= n * (n - 1) - 1e-6
              and verdicts["strip_scal_above_S"])
        report(f"2s [feasible n={n} eta={eta} S={S}]", ok,
               f"rescaled min Scal={g.min_scal:.6f}, strip verdict "
               f"{verdicts['strip_scal_above_S']}")
        assert ok


class TestCriterion3EigenvalueBracket:
    @pytest.mark.parametrize("n,eta,S", FAMILY)
    def test_bracket(self, n, eta, S):
        label = f"3 [bracket n={n} eta={eta} S={S}]"
        try:
            _, g = pinched_geometry(n, eta, S)
        except FeasibilityError as exc:
            failed = [c[0] for c in exc.report.checks if not c[3]]
            report(label, False,
                   f"prescribed parameters are infeasible (violated: "
                   f"{', '.join(failed)})")
            raise
        lam = lambda1(n, eta, S)
        fr = friedrich_bound(n, g.min_scal)
        ex = extrinsic_bound(g)
        ok = fr - 5e-3 <= lam <= ex + 5e-3
        report(label, ok,
               f"friedrich={fr:.6f} <= lambda1_sq={lam:.6f} <= "
               f"extrinsic={ex:.6f} (tol 5e-3)")
        assert ok

    @pytest.mark.parametrize("n,S,etas", [(2, 4.0, (0.2, 0.1, 0.05)),
                                          (3, 12.0, (0.2, 0.1, 0.05))])
    def test_excess_monotone(self, n, S, etas):
        label = f"3 [monotone n={n} S={S}]"
        try:
            excess = [lambda1(n, eta, S) - n * n / 4.0 for eta in etas]
        except FeasibilityError as exc:
            failed = [c[0] for c in exc.report.checks if not c[3]]
            report(label, False,
                   f"family contains infeasible parameters (violated: "
                   f"{', '.join(failed)})")
            raise
        ok = all(excess[i + 1] <= excess[i] + 1e-9
                 for i in range(len(excess) - 1))
        report(label, ok, f"excess over eta {etas}: "
               + ", ".join(f"{e:.5f}" for e in excess))
        assert ok

    @pytest.mark.parametrize("n,S", [(2, 4.0), (3, 12.0)])
    def test_h2_slope(self, n, S):
        label = f"3 [H2 slope n={n} S={S}]"
        etas = (0.2, 0.1, 0.05, 0.025)
        try:
            vals = []
            for eta in etas:
                _, g = pinched_geometry(n, eta, S)
                vals.append(g.H2_integral / g.vol - 1.0)
        except FeasibilityError as exc:
            failed = [c[0] for c in exc.report.checks if not c[3]]
            report(label, False,
                   f"family contains infeasible parameters (violated: "
                   f"{', '.join(failed)})")
            raise
        slope = np.polyfit(np.log(etas), np.log(vals), 1)[0]
        ok = 0.8 <= slope <= 1.5
        report(label, ok, f"log-log slope of (int H^2/vol - 1) vs eta "
               f"= {slope:.3f}, target [0.8, 1.5]")
        assert ok

    @pytest.mark.parametrize("n,S,etas", [
        (2, 2.0, (0.2, 0.1, 0.05, 0.025)),    # all prescribed etas feasible
        (2, 4.0, (0.1, 0.05, 0.025)),          # feasible subset for S = 4
    ])
    def test_supplementary_feasible_family(self, n, S, etas):
        # full criterion-3 content on a fully feasible family
        lam, fr, ex, h2 = [], [], [], []
        for eta in etas:
            _, g = pinched_geometry(n, eta, S)
            lam.append(lambda1(n, eta, S))
            fr.append(friedrich_bound(n, g.min_scal))
            ex.append(extrinsic_bound(g))
            h2.append(g.H2_integral / g.vol - 1.0)
        bracket = all(f - 5e-3 <= v <= e + 5e-3
                      for f, v, e in zip(fr, lam, ex))
        excess = [v - n * n / 4.0 for v in lam]
        monotone = all(excess[i + 1] <= excess[i] + 1e-9
                       for i in range(len(excess) - 1))
        slope = float(np.polyfit(np.log(etas), np.log(h2), 1)[0])
        ok = bracket and monotone and 0.8 <= slope <= 1.5
        report(f"3s [feasible n={n} S={S}]", ok,
               f"bracket={bracket}, monotone excess={monotone}, "
               f"H2 slope={slope:.3f}")
        assert ok


class TestCriterion4ConjectureFalsification:
    def test_prescribed_parameters(self):
        label = "4 [n=3 S=12 eta=0.05]"
        try:
            _, g = pinched_geometry(3, 0.05, 12.0)
        except FeasibilityError as exc:
            failed = [c[0] for c in exc.report.checks if not c[3]]
            report(label, False,
                   f"prescribed parameters are infeasible (violated: "
                   f"{', '.join(failed)}); feasibility (c) requires "
                   f"S < 10.456 at eta=0.05")
            raise
        lam = lambda1(3, 0.05, 12.0)
        ok = lam < conjecture_bound(3, 6.0) and g.min_scal >= 6 - 1e-6
        report(label, ok, f"lambda1_sq={lam:.6f} < 3, min Scal="
               f"{g.min_scal:.6f} >= 6")
        assert ok

    def test_supplementary_feasible(self):
        # same phenomenon at the nearest feasible eta for S = 12
        n, eta, S = 3, 0.04, 12.0
        _, g = pinched_geometry(n, eta, S)
        lam = lambda1(n, eta, S)
        conj = conjecture_bound(3, 6.0)
        ok = lam < conj and g.min_scal >= 6 - 1e-6
        report("4s [feasible n=3 S=12 eta=0.04]", ok,
               f"lambda1_sq={lam:.6f} < conjecture_bound(3,6)={conj} "
               f"while min Scal={g.min_scal:.6f} >= 6")
        assert ok


class TestCriterion5CutoffChain:
    def test_chain_on_round_s3(self):
        g = measure(build_profile(3, 0.0, 2.0, 256))
        res = dirac_lambda1(g, m_max=1, grid_size=512)
        phi = eigenspinor_profile(g, res)
        lam_sq = phi.lam ** 2
        r0 = g.length / 8
        radii = (0.2, 0.1, 0.05)
        chains = [cutoff_chain(g, phi, r, r0) for r in radii]
        order_ok = all(lam_sq <= ch.quotient_bound + 1e-9
                       and ch.quotient_bound <= ch.final_bound + 1e-9
                       for ch in chains)
        slope = float(np.polyfit(np.log(radii),
                                 np.log([ch.excess for ch in chains]), 1)[0])
        ok = order_ok and slope >= 0.7
        report("5 [cutoff chain round S3]", ok,
               f"chain inequalities in order: {order_ok}; excess slope "
               f"{slope:.3f} >= 0.7 (target n-2=1)")
        assert ok


class TestCriterion6ConstructionValidity:
    LATTICE = [(0.05, 2.0), (0.05, 4.0), (0.1, 2.0), (0.1, 4.0), (0.2, 2.0)]

    def test_lattice_validates(self):
        worst = 0
        for n in (2, 3):
            for eta, S in self.LATTICE:
                p = build_profile(n, eta, S, 256)
                worst = max(worst, len(validate_profile(p, tol=1e-9)))
        ok = worst == 0
        report("6 [lattice validation]", ok,
               f"zero violations at tol 1e-9 across n in {{2,3}} x "
               f"{self.LATTICE}: {ok}")
        assert ok

    def test_rejections_named(self):
        cases = []
        # eta >= 1/2
        try:
            feasibility(0.5, 4.0)
            cases.append(("eta>=1/2", False, "not rejected"))
        except ValueError as exc:
            cases.append(("eta>=1/2", "eta" in str(exc), str(exc)))
        # S <= 1/sqrt(1-4 eta^2)
        rep = feasibility(0.1, 1.01)
        failed = [c[0] for c in rep.checks if not c[3]]
        cases.append(("S<=1/sqrt(q)", (not rep.ok) and "b" in failed,
                      f"failed checks {failed}"))
        # (c) violated
        rep = feasibility(0.2, 4.0)
        failed = [c[0] for c in rep.checks if not c[3]]
        cases.append(("(c)", (not rep.ok) and failed == ["c"],
                      f"failed checks {failed}"))
        ok = all(c[1] for c in cases)
        report("6 [named rejections]", ok,
               "; ".join(f"{name}: {'ok' if good else detail}"
                         for name, good, detail in cases))
        assert ok


class TestCriterion7OracleCrossChecks:
    def test_tridiagonal_oracle(self):
        worst = 0.0
        for seed in range(5):
            rng = np.random.default_rng(seed)
            d = rng.standard_normal(8) * 2.0
            e = rng.standard_normal(7)
            got = tridiag_smallest(TridiagSpec(d, e), 8)
            want = charpoly_eigs(d, e)
            worst = max(worst, float(np.max(np.abs(got - want))))
        ok = worst < 1e-10
        report("7 [tridiagonal oracle]", ok,
               f"max |Sturm - charpoly| over 5 random 8x8 = {worst:.2e} "
               f"< 1e-10")
        assert ok

    def test_shooting_oracle(self):
        g = measure(build_profile(2, 0.0, 2.0, 256))
        res = dirac_lambda1(g, m_max=0, grid_size=512)
        ground = min(me.lambda_sq for me in res.per_mode)
        shot = shooting_ground_lambda(g)
        diff = abs(ground - shot)
        ok = diff < 1e-3
        report("7 [shooting oracle]", ok,
               f"Schrodinger-form ground={ground:.8f} vs shooting="
               f"{shot:.8f}, |diff|={diff:.2e} < 1e-3")
        assert ok
