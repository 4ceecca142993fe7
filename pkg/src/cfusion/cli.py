"""Command-line interface: ``cfusion <command> scenario.cfuse.json [options]``.

Exit codes: 0 success / verdict true, 1 unreadable or invalid input,
2 not a frame, 3 shape mismatch, 4 verdict false.
"""

import argparse
import hashlib
import json
import sys

import numpy as np

from .errors import NotAFrame, ScenarioError, ShapeMismatch
from .frame import CFusionFrame, frame_bounds, reconstruct
from .generators import build_disk_example
from .localglue import (
    equivalence_probe,
    local_dual_residuals,
    local_norm_bound,
    q_from_local_duals,
    sandwich,
)
from .numerics import Tolerances
from .perturb import PerturbationParams, perturbation_check, pseudoinverse_matrix
from .qdual import (
    QOperator,
    canonical_qdual,
    dimension_check,
    solve_q,
    uniqueness_hypothesis,
    verify_duality,
)
from .scenario import read_scenario, scenario_from, write_scenario
from .space import WeightMap

REPORT_VERSION = "cfuse-report/1"

EXIT_OK, EXIT_INPUT, EXIT_NOT_FRAME, EXIT_SHAPE, EXIT_FALSE = 0, 1, 2, 3, 4

DEFAULT_SEED = 0


class MissingSection(ScenarioError):
    pass


def _plain(x):
    """Convert numpy scalars and containers to JSON-ready Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _bounds_dict(b):
    return {
        "lower": b.lower,
        "upper": b.upper,
        "classification": b.classification.value,
        "parseval": b.is_parseval,
        "tight": b.is_tight,
    }


def _duality_dict(rep):
    return {
        "residual": rep.residual,
        "adjoint_residual": rep.adjoint_residual,
        "is_dual": rep.is_dual,
        "q_norm": rep.q_norm,
        "norm_floor": rep.norm_floor,
        "conditions": rep.conditions,
        "details": rep.details,
    }


def _dimension_dict(d):
    return dict(vars(d))


def _tolerances(args):
    return Tolerances(rank_tol=args.rank_tol, residual_tol=args.tol, psd_tol=args.psd_tol)


def _load(args):
    with open(args.scenario, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    return read_scenario(args.scenario), digest


def _need(obj, name):
    if obj is None:
        raise MissingSection(f"scenario lacks required section {name!r}")
    return obj


# -- commands ------------------------------------------------------------------

def cmd_bounds(args, tol):
    sf, digest = _load(args)
    F, _, _ = sf.frames(tol)
    b = frame_bounds(F, tol)
    results = {
        "ambient_dim": F.ambient_dim,
        "atoms": len(F.space),
        "fiber_dims": list(F.fiber_dims),
        "bounds": _bounds_dict(b),
    }
    verdicts = {"frame": {"pass": b.is_frame, "lower_gt": tol.psd_tol}}
    code = EXIT_OK if b.is_frame else EXIT_NOT_FRAME
    return digest, results, verdicts, code


def cmd_verify_dual(args, tol):
    sf, digest = _load(args)
    F, G, Q = sf.frames(tol)
    _need(G, "frame_g")
    _need(Q, "q")
    rep = verify_duality(F, G, Q, tol, probes=args.probes, seed=args.seed)
    floor_holds = rep.q_norm >= rep.norm_floor - 1e-10
    dim_f, dim_g = dimension_check(F, tol), dimension_check(G, tol)
    results = {
        "duality": _duality_dict(rep),
        "bounds_f": _bounds_dict(frame_bounds(F, tol)),
        "bounds_g": _bounds_dict(frame_bounds(G, tol)),
        "dimension_f": _dimension_dict(dim_f),
        "dimension_g": _dimension_dict(dim_g),
    }
    verdicts = {
        "is_dual": {"pass": rep.is_dual, "residual_le": tol.residual_tol},
        "norm_floor": {"pass": bool(floor_holds) if rep.is_dual else None, "slack": 1e-10},
        "dimension_lemma_f": {"pass": dim_f.holds_first and dim_f.holds_second, "slack": 1e-8},
        "dimension_lemma_g": {"pass": dim_g.holds_first and dim_g.holds_second, "slack": 1e-8},
    }
    return digest, results, verdicts, EXIT_OK if rep.is_dual else EXIT_FALSE


def cmd_solve_q(args, tol):
    sf, digest = _load(args)
    F, G, _ = sf.frames(tol)
    _need(G, "frame_g")
    sol = solve_q(F, G, tol)
    hyp = uniqueness_hypothesis(F, G, tol)
    results = {
        "consistent": sol.consistent,
        "residual": sol.residual,
        "constraint_rank": sol.rank,
        "unknowns": F.coord_dim * G.coord_dim,
        "nullspace_dim": sol.nullspace_dim,
        "unique": sol.unique,
        "uniqueness_hypothesis": hyp,
        "q_norm": sol.particular.norm if sol.consistent else None,
    }
    verdicts = {
        "consistent": {"pass": sol.consistent, "residual_le": tol.residual_tol},
        "uniqueness_theorem": {"pass": (not (hyp and sol.consistent)) or sol.unique},
    }
    if args.emit and sol.consistent:
        write_scenario(args.emit, scenario_from(F, G, sol.particular, name="solve-q"))
    return digest, results, verdicts, EXIT_OK if sol.consistent else EXIT_FALSE


def cmd_canonical(args, tol):
    sf, digest = _load(args)
    F, _, _ = sf.frames(tol)
    G, Q = canonical_qdual(F, tol)
    rep = verify_duality(F, G, Q, tol, probes=args.probes, seed=args.seed)
    same = [f.same_span(g) for f, g in zip(F.fibers, G.fibers)]
    results = {
        "bounds_f": _bounds_dict(frame_bounds(F, tol)),
        "bounds_g": _bounds_dict(frame_bounds(G, tol)),
        "fibers_unchanged": same,
        "duality": _duality_dict(rep),
    }
    verdicts = {
        "is_dual": {"pass": rep.is_dual, "residual_le": tol.residual_tol},
        "dual_is_frame": {"pass": frame_bounds(G, tol).is_frame},
    }
    if args.emit:
        write_scenario(args.emit, scenario_from(F, G, Q, name="canonical-dual"))
    ok = rep.is_dual and frame_bounds(G, tol).is_frame
    return digest, results, verdicts, EXIT_OK if ok else EXIT_FALSE


def cmd_perturb(args, tol):
    sf, digest = _load(args)
    F, G, Q = sf.frames(tol)
    _need(G, "frame_g")
    _need(Q, "q")
    params = PerturbationParams(args.lam, args.eps)
    rep = perturbation_check(F, G, Q, params, trials=args.trials, seed=args.seed, tol=tol,
                             g_bessel_bound=args.g_bessel_bound)
    results = {"lam": params.lam, "eps": params.eps, **vars(rep)}
    verdicts = {
        "concluded": {"pass": rep.concluded, "reason": rep.reason},
        "lower_bound_sound": {"pass": rep.sound, "slack": 1e-8},
    }
    return digest, results, verdicts, EXIT_OK if rep.concluded else EXIT_FALSE


def cmd_glue(args, tol):
    sf, digest = _load(args)
    F, G, _ = sf.frames(tol)
    LF, LG = sf.local_families(tol)
    rep = sandwich(LF, F.weights, tol)
    probe = equivalence_probe(LF, F.weights, tol)
    results = {
        "local_inf_lower": rep.local_lower,
        "local_sup_upper": rep.local_upper,
        "cfusion_bounds": _bounds_dict(rep.cfusion_bounds),
        "glued_bounds": _bounds_dict(rep.glued_bounds),
        "sandwich_lower": rep.sandwich_lower,
        "sandwich_upper": rep.sandwich_upper,
        "cfusion_is_frame": probe.cfusion_is_frame,
        "glued_is_frame": probe.glued_is_frame,
    }
    verdicts = {
        "sandwich": {"pass": rep.holds, "slack": 1e-8},
        "equivalence": {"pass": probe.agree},
    }
    if LG is not None:
        Q = q_from_local_duals(LF, LG, F.weights, G.weights)
        drep = verify_duality(F, G, Q, tol, seed=args.seed)
        nb = local_norm_bound(LF, LG)
        results["local_dual"] = {
            "duality": _duality_dict(drep),
            "q_norm": Q.norm,
            "norm_bound": nb,
            "per_atom_dual_pair_residuals": local_dual_residuals(LF, LG, F.weights, G.weights),
        }
        verdicts["local_q_norm_bound"] = {"pass": Q.norm <= nb + 1e-8, "slack": 1e-8}
        verdicts["local_q_is_dual"] = {"pass": drep.is_dual, "residual_le": tol.residual_tol}
    ok = rep.holds and probe.agree
    return digest, results, verdicts, EXIT_OK if ok else EXIT_FALSE


def selftest_checks(tol, seed=DEFAULT_SEED):
    """End-to-end run of the unit-disk example; returns (name, passed, value) rows."""
    m1, m2 = 1.5, np.pi - 1.5
    F, G, Q = build_disk_example(m1, m2)
    bf, bg = frame_bounds(F, tol), frame_bounds(G, tol)
    rep = verify_duality(F, G, Q, tol, seed=seed)
    dim = dimension_check(F, tol)
    Gc, Qc = canonical_qdual(F, tol)
    sol = solve_q(F, G, tol)
    h = np.array([0.3, -1.7])
    Tdag = pseudoinverse_matrix(F, tol)
    w = F.weights.array.copy()
    w[0] *= 0.9
    Gp = CFusionFrame(F.space, F.fibers, WeightMap(tuple(w)))
    Qp = QOperator(F, Gp, np.eye(F.coord_dim))
    prep = perturbation_check(F, Gp, Qp, PerturbationParams(0.0, 0.1), trials=1000, seed=seed,
                              tol=tol)
    rows = [
        ("F Parseval", abs(bf.lower - 1) <= 1e-12 and abs(bf.upper - 1) <= 1e-12,
         [bf.lower, bf.upper]),
        ("G Parseval", abs(bg.lower - 1) <= 1e-12 and abs(bg.upper - 1) <= 1e-12,
         [bg.lower, bg.upper]),
        ("swap Q is a Q-dual", rep.residual <= 1e-12, rep.residual),
        ("five conditions hold", rep.all_conditions, rep.conditions),
        ("Q norm floor", rep.q_norm >= rep.norm_floor - 1e-10, [rep.q_norm, rep.norm_floor]),
        ("dimension lemma", dim.holds_first and dim.holds_second,
         [dim.lower_first, dim.mid_first, dim.upper_first]),
        ("reconstruction", float(np.linalg.norm(reconstruct(F, h, tol) - h)) <= 1e-12,
         float(np.linalg.norm(reconstruct(F, h, tol) - h))),
        ("canonical dual keeps fibers", all(f.same_span(g) for f, g in zip(F.fibers, Gc.fibers)),
         verify_duality(F, Gc, Qc, tol, seed=seed).residual),
        ("solve-q unique and equal to swap",
         sol.consistent and sol.unique and bool(np.allclose(sol.particular.matrix, Q.matrix,
                                                              atol=1e-12)),
         sol.nullspace_dim),
        ("pseudoinverse right inverse",
         float(np.linalg.norm(F.T @ Tdag - np.eye(2), 2)) <= 1e-12,
         float(np.linalg.norm(F.T @ Tdag - np.eye(2), 2))),
        ("perturbation concluded", prep.concluded and prep.sound,
         [prep.guaranteed_lower, prep.actual_lower]),
    ]
    return rows


def cmd_selftest(args, tol):
    rows = selftest_checks(tol, args.seed)
    results = {name: value for name, _, value in rows}
    verdicts = {name: {"pass": bool(ok)} for name, ok, _ in rows}
    ok = all(ok for _, ok, _ in rows)
    return None, results, verdicts, EXIT_OK if ok else EXIT_FALSE


COMMANDS = {
    "bounds": cmd_bounds,
    "verify-dual": cmd_verify_dual,
    "solve-q": cmd_solve_q,
    "canonical-dual": cmd_canonical,
    "perturb": cmd_perturb,
    "glue": cmd_glue,
    "selftest": cmd_selftest,
}


def build_parser():
    p = argparse.ArgumentParser(prog="cfusion", description="c-fusion frames and Q-duals")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    common.add_argument("--tol", type=float, default=Tolerances.residual_tol,
                        help="residual tolerance for operator identities")
    common.add_argument("--rank-tol", type=float, default=Tolerances.rank_tol)
    common.add_argument("--psd-tol", type=float, default=Tolerances.psd_tol)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, scenario=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if scenario:
            sp.add_argument("scenario", help="path to a .cfuse.json file")
        return sp

    add("bounds", "optimal frame bounds of frame_f")
    sp = add("verify-dual", "check T_G Q T_F^* = I and the equivalent conditions")
    sp.add_argument("--probes", type=int, default=50)
    sp = add("solve-q", "minimum-norm Q making frame_g a Q-dual of frame_f")
    sp.add_argument("--emit", metavar="PATH", help="write F, G and the solved Q as a scenario")
    sp = add("canonical-dual", "canonical Q-dual of frame_f")
    sp.add_argument("--probes", type=int, default=50)
    sp.add_argument("--emit", metavar="PATH", help="write F, G and Q as a scenario")
    sp = add("perturb", "perturbation test for frame_g against frame_f")
    sp.add_argument("--lam", type=float, default=0.0)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--g-bessel-bound", type=float, default=None)
    add("glue", "glue local frames and assemble Q from local duals")
    add("selftest", "run the unit-disk example end to end", scenario=False)
    return p


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, list):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    if isinstance(x, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in x.items()) + "}"
    return str(x)


def render_text(report):
    lines = [f"cfusion {report['command']}"]
    if report.get("input"):
        lines.append(f"  input   {report['input']['path']}  sha256:{report['input']['sha256'][:16]}")
    tol = report["tolerances"]
    lines.append(f"  tol     rank={tol['rank_tol']:g} residual={tol['residual_tol']:g} "
                 f"psd={tol['psd_tol']:g}  seed={report['seed']}")
    lines.append("results:")
    for k, v in report["results"].items():
        lines.append(f"  {k:<28} {_fmt(v)}")
    lines.append("verdicts:")
    for k, v in report["verdicts"].items():
        mark = {True: "PASS", False: "FAIL", None: "n/a "}[v["pass"]]
        extra = ", ".join(f"{kk}={_fmt(vv)}" for kk, vv in v.items() if kk != "pass")
        lines.append(f"  [{mark}] {k}" + (f"  ({extra})" if extra else ""))
    lines.append(f"exit {report['exit_code']}")
    return "\n".join(lines) + "\n"


def run(args):
    tol = _tolerances(args)
    digest, results, verdicts, code = COMMANDS[args.command](args, tol)
    report = {
        "schema": REPORT_VERSION,
        "command": args.command,
        "options": {k: v for k, v in sorted(vars(args).items())
                    if k not in ("command", "json")},
        "input": {"path": args.scenario, "sha256": digest} if digest else None,
        "tolerances": tol.as_dict(),
        "seed": args.seed,
        "results": results,
        "verdicts": verdicts,
        "exit_code": code,
    }
    return _plain(report), code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = run(args)
    except (ScenarioError, OSError, ValueError) as exc:
        if isinstance(exc, ShapeMismatch):
            print(f"cfusion: shape mismatch: {exc}", file=sys.stderr)
            return EXIT_SHAPE
        if isinstance(exc, NotAFrame):
            print(f"cfusion: not a frame: {exc}", file=sys.stderr)
            return EXIT_NOT_FRAME
        print(f"cfusion: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render_text(report))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
