"""Command-line frontend: build warping profiles, emit curvature and
bounds reports, compute the spectrum bottom, run the eta-sweep, and run
the cross-module invariant suite.

Exit codes: 0 ok, 1 invariant failure, 2 infeasible/domain, 3 I/O,
4 corrupt input, 5 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import bounds as bounds_mod
from . import geometry, profile, spectral

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_CORRUPT = 4
EXIT_CERTIFICATE = 5

FORMAT_VERSION = 1


class CorruptProfileError(ValueError):
    def __init__(self, violations: list, note: str = ""):
        self.violations = violations
        msg = note or "profile file failed validation"
        if violations:
            msg += "\n" + "\n".join(str(v) for v in violations)
        super().__init__(msg)


def _fmt(x: float) -> str:
    """Scientific notation with 17 significant digits (exact round-trip)."""
    return "%.16e" % x


def save_profile(p: profile.WarpProfile, path: str) -> None:
    """Write the profile as a deterministic JSON text document."""
    def arr(a):
        return "[" + ", ".join(_fmt(v) for v in a) + "]"

    body = (
        "{\n"
        f'  "format_version": {FORMAT_VERSION},\n'
        f'  "n": {p.n},\n'
        f'  "eta": {_fmt(p.eta)},\n'
        f'  "S": {_fmt(p.S)},\n'
        f'  "grid_size": {p.grid_size},\n'
        f'  "blend_id": "{p.blend_id}",\n'
        f'  "t": {arr(p.grid)},\n'
        f'  "r": {arr(p.r)},\n'
        f'  "rdot": {arr(p.rdot)},\n'
        f'  "rddot": {arr(p.rddot)}\n'
        "}\n"
    )
    with open(path, "w") as fh:
        fh.write(body)


def load_profile(path: str) -> profile.WarpProfile:
    """Read a profile file, rebuild it deterministically, and verify that
    the stored samples are bit-identical to the rebuild.

    A mismatch means the file was edited or produced by a different
    builder; the stored samples are then validated directly and the
    failing conditions reported.
    """
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("format_version", "n", "eta", "S", "grid_size", "blend_id",
                "t", "r", "rdot", "rddot"):
        if key not in doc:
            raise CorruptProfileError([], f"missing field {key!r}")
    if doc["format_version"] != FORMAT_VERSION:
        raise CorruptProfileError(
            [], f"unsupported format_version {doc['format_version']}")
    rebuilt = profile.build_profile(int(doc["n"]), float(doc["eta"]),
                                    float(doc["S"]), int(doc["grid_size"]))
    stored = {k: np.asarray(doc[k], dtype=float)
              for k in ("t", "r", "rdot", "rddot")}
    same = (doc["blend_id"] == rebuilt.blend_id
            and stored["t"].shape == rebuilt.grid.shape
            and np.array_equal(stored["t"], rebuilt.grid)
            and np.array_equal(stored["r"], rebuilt.r)
            and np.array_equal(stored["rdot"], rebuilt.rdot)
            and np.array_equal(stored["rddot"], rebuilt.rddot))
    if same:
        return rebuilt
    if stored["t"].shape == stored["r"].shape == stored["rdot"].shape \
            == stored["rddot"].shape and stored["t"].size > 2:
        raw = replace(rebuilt, grid=stored["t"], r=stored["r"],
                      rdot=stored["rdot"], rddot=stored["rddot"])
        violations = profile.validate_profile(raw)
    else:
        violations = []
    raise CorruptProfileError(
        violations, "stored samples do not match a deterministic rebuild")


def _geometry_for(p: profile.WarpProfile, rescale_mode: str):
    """Measure the profile; 'auto' applies the homothety c = 1 - 4 eta^2."""
    g = geometry.measure(p)
    if rescale_mode == "auto":
        c = 1.0 - 4.0 * p.eta * p.eta
        if c != 1.0:
            g = geometry.rescale(g, c)
    return g


def cmd_profile_build(args) -> int:
    try:
        p = profile.build_profile(args.n, args.eta, args.S, args.grid)
    except (profile.FeasibilityError, ValueError) as exc:
        print(f"infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    try:
        save_profile(p, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote profile (n={p.n}, eta={p.eta}, S={p.S}, "
          f"grid={p.grid_size}) to {args.out}")
    return EXIT_OK


def _write_text(path: str | None, text: str) -> int:
    if path is None or path == "-":
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        p = load_profile(args.profile)
    except CorruptProfileError as exc:
        print(f"corrupt profile: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except OSError as exc:
        print(f"cannot read {args.profile}: {exc}", file=sys.stderr)
        return EXIT_IO
    g = geometry.measure(p)
    if args.kind == "curvature":
        samples, _ = geometry.curvature_report(p)
        s_of_t = np.interp(p.grid, g.arclength_t, g.arclength_s)
        lines = ["t,s,kappa_t,kappa_theta,scal,mean"]
        for smp, s in zip(samples, s_of_t):
            lines.append(",".join(_fmt(v) for v in
                                  (smp.t, s, smp.kappa_t, smp.kappa_theta,
                                   smp.scal, smp.mean)))
    else:
        rep = bounds_mod.bounds_report(g)
        lines = ["name,value",
                 f"min_scal,{_fmt(rep.min_scal)}",
                 f"friedrich,{_fmt(rep.friedrich)}"]
        if rep.conjecture is not None:
            lines.append(f"conjecture,{_fmt(rep.conjecture)}")
        lines.append(f"extrinsic,{_fmt(rep.extrinsic)}")
        for cls, val in sorted(rep.class_constants.items()):
            lines.append(f"class_{cls},{_fmt(val)}")
    return _write_text(args.out, "\n".join(lines) + "\n")


def _spectrum_json(g, res: spectral.SpectrumResult) -> str:
    per = [{"mu": me.mu, "epsilon": me.epsilon,
            "lambda_sq": me.lambda_sq, "raw_fine": me.raw_fine,
            "order": me.order} for me in res.per_mode]
    doc = {
        "n": res.n,
        "scale": g.scale,
        "lambda1_sq": res.lambda1_sq,
        "m_max": res.m_max,
        "grid_size": res.grid_size,
        "ground_mu": res.ground_mu,
        "ground_epsilon": res.ground_epsilon,
        "certificate": {"mu_next": res.certificate_mu,
                        "lower_bound": res.certificate_bound},
        "richardson": {"coarse": res.richardson.coarse,
                       "fine": res.richardson.fine,
                       "extrapolated": res.richardson.extrapolated,
                       "order": res.richardson.order},
        "per_mode": per,
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_spectrum(args) -> int:
    try:
        p = load_profile(args.profile)
    except CorruptProfileError as exc:
        print(f"corrupt profile: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except OSError as exc:
        print(f"cannot read {args.profile}: {exc}", file=sys.stderr)
        return EXIT_IO
    g = _geometry_for(p, args.rescale)
    try:
        res = spectral.dirac_lambda1(g, m_max=args.modes,
                                     grid_size=args.grid)
    except spectral.CertificateError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    return _write_text(args.out, _spectrum_json(g, res))


@dataclass(frozen=True)
class SweepRow:
    eta: float
    delta_equiv: float
    R2: float
    min_scal: float
    lambda1_sq: float
    friedrich: float
    extrinsic: float
    bracket_ok: bool
    neck_strip_scal_ok: bool


def sweep_rows(n: int, S: float, etas: list[float], grid: int,
               modes: int, tol: float = 5e-3) -> list[SweepRow]:
    """One pipeline run per eta, sorted by descending eta.

    Raises FeasibilityError before any computation if some eta fails.
    """
    for eta in etas:
        rep = profile.feasibility(eta, S)
        if not rep.ok:
            raise profile.FeasibilityError(rep)
    rows = []
    for eta in sorted(etas, reverse=True):
        p = profile.build_profile(n, eta, S, 512)
        _, verdicts = geometry.curvature_report(p)
        g = _geometry_for(p, "auto")
        res = spectral.dirac_lambda1(g, m_max=modes, grid_size=grid)
        fr = bounds_mod.friedrich_bound(n, g.min_scal)
        ex = bounds_mod.extrinsic_bound(g)
        quarter = n * n / 4.0
        rows.append(SweepRow(
            eta=eta,
            delta_equiv=0.5 * (res.lambda1_sq - quarter),
            R2=eta * eta * (1.0 - 4.0 * eta * eta),
            min_scal=g.min_scal,
            lambda1_sq=res.lambda1_sq,
            friedrich=fr,
            extrinsic=ex,
            bracket_ok=(quarter - tol <= res.lambda1_sq <= ex + tol),
            neck_strip_scal_ok=verdicts["strip_scal_above_S"],
        ))
    return rows


def cmd_sweep(args) -> int:
    try:
        etas = [float(v) for v in args.etas.split(",") if v]
        rows = sweep_rows(args.n, args.S, etas, args.grid, args.modes)
    except (profile.FeasibilityError, ValueError) as exc:
        print(f"infeasible sweep: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except spectral.CertificateError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    quarter = args.n * args.n / 4.0
    excess = [r.lambda1_sq - quarter for r in rows]
    monotone = all(excess[i + 1] <= excess[i] + 1e-9
                   for i in range(len(excess) - 1))
    lines = ["eta,delta_equiv,R2,min_scal,lambda1_sq,friedrich,extrinsic,"
             "bracket_ok"]
    for r in rows:
        lines.append(",".join(
            [_fmt(r.eta), _fmt(r.delta_equiv), _fmt(r.R2), _fmt(r.min_scal),
             _fmt(r.lambda1_sq), _fmt(r.friedrich), _fmt(r.extrinsic),
             str(r.bracket_ok).lower()]))
    lines.append(f"# monotone_excess,{str(monotone).lower()}")
    lines.append("# neck_strip_scal_ok," + ",".join(
        str(r.neck_strip_scal_ok).lower() for r in rows))
    return _write_text(args.out, "\n".join(lines) + "\n")


def _invariants(full: bool):
    """Yield (name, margin, ok) triples for the cross-module suite."""
    # profile round-trip and construction validity
    p = profile.build_profile(2, 0.1, 4.0, 256)
    viols = profile.validate_profile(p)
    yield "profile.validate.pinched-n2", float(len(viols)), not viols

    g = geometry.measure(p)
    _, verdicts = geometry.curvature_report(p)
    for key, ok in verdicts.items():
        yield f"curvature.{key}", 0.0, ok

    # round-sphere geometry exactness
    g2 = geometry.measure(profile.build_profile(2, 0.0, 2.0, 256))
    yield "geometry.round-s2.volume", abs(g2.vol - 4 * math.pi), \
        abs(g2.vol - 4 * math.pi) < 1e-9
    yield "geometry.round-s2.H2-ratio", abs(g2.H2_integral / g2.vol - 1.0), \
        abs(g2.H2_integral / g2.vol - 1.0) < 1e-12

    # bounds squeeze on the round sphere
    fr = bounds_mod.friedrich_bound(2, 2.0)
    ex = bounds_mod.extrinsic_bound(g2)
    yield "bounds.squeeze.round-s2", abs(fr - ex), abs(fr - ex) < 1e-8

    gsize = 512 if full else 256
    res2 = spectral.dirac_lambda1(g2, m_max=1, grid_size=gsize)
    yield "spectral.round-s2.lambda1", abs(res2.lambda1_sq - 1.0), \
        abs(res2.lambda1_sq - 1.0) < 1e-4

    if full:
        g3 = geometry.measure(profile.build_profile(3, 0.0, 2.0, 256))
        res3 = spectral.dirac_lambda1(g3, m_max=1, grid_size=512)
        yield "spectral.round-s3.lambda1", abs(res3.lambda1_sq - 2.25), \
            abs(res3.lambda1_sq - 2.25) < 1e-3
        phi = spectral.eigenspinor_profile(g3, res3)
        yield "spectral.eigenspinor.residual", phi.residual, \
            phi.residual <= 1e-4
        ch = bounds_mod.cutoff_chain(g3, phi, 0.1, g3.length / 8)
        ok = (phi.lam ** 2 <= ch.quotient_bound + 1e-9
              and ch.quotient_bound <= ch.final_bound + 1e-9)
        yield "bounds.cutoff-chain.order", ch.excess, ok
        # pinched pipeline bracket
        gq = _geometry_for(p, "auto")
        resq = spectral.dirac_lambda1(gq, m_max=2, grid_size=512)
        exq = bounds_mod.extrinsic_bound(gq)
        frq = bounds_mod.friedrich_bound(2, gq.min_scal)
        ok = frq - 5e-3 <= resq.lambda1_sq <= exq + 5e-3
        yield "bounds.bracket.pinched-n2", resq.lambda1_sq - frq, ok


def cmd_verify(args) -> int:
    failed = None
    for name, margin, ok in _invariants(args.full):
        status = "pass" if ok else "FAIL"
        print(f"{status}  {name}  margin={margin:.3e}")
        if not ok and failed is None:
            failed = name
    if failed is not None:
        print(f"invariant failure: {failed}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pinched-sphere",
        description="pinched-sphere curvature and Dirac-spectrum toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p_prof = sub.add_parser("profile", help="profile operations")
    prof_sub = p_prof.add_subparsers(dest="subcommand", required=True)
    p_build = prof_sub.add_parser("build", help="build a warping profile")
    p_build.add_argument("--n", type=int, required=True)
    p_build.add_argument("--eta", type=float, required=True)
    p_build.add_argument("--S", type=float, required=True)
    p_build.add_argument("--grid", type=int, default=512)
    p_build.add_argument("--out", required=True)
    p_build.set_defaults(func=cmd_profile_build)

    p_rep = sub.add_parser("report", help="curvature or bounds CSV report")
    p_rep.add_argument("--profile", required=True)
    p_rep.add_argument("--kind", choices=("curvature", "bounds"),
                       default="curvature")
    p_rep.add_argument("--out", default=None)
    p_rep.set_defaults(func=cmd_report)

    p_spec = sub.add_parser("spectrum", help="Dirac spectrum bottom (JSON)")
    p_spec.add_argument("--profile", required=True)
    p_spec.add_argument("--modes", type=int, default=8)
    p_spec.add_argument("--grid", type=int, default=1024)
    p_spec.add_argument("--rescale", choices=("auto", "none"),
                        default="auto")
    p_spec.add_argument("--out", default=None)
    p_spec.set_defaults(func=cmd_spectrum)

    p_sweep = sub.add_parser("sweep", help="eta sweep CSV")
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--S", type=float, required=True)
    p_sweep.add_argument("--etas", required=True,
                         help="comma-separated eta values")
    p_sweep.add_argument("--grid", type=int, default=1024)
    p_sweep.add_argument("--modes", type=int, default=8)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ver = sub.add_parser("verify", help="run the invariant suite")
    group = p_ver.add_mutually_exclusive_group()
    group.add_argument("--quick", dest="full", action="store_false")
    group.add_argument("--full", dest="full", action="store_true")
    p_ver.set_defaults(full=False, func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
