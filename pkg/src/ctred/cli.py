"""Command-line front end.

Subcommands: ``reduce``, ``cost``, ``norms``, ``gen``, ``repro``,
``certify``.  Exit codes: 0 success, 2 input error, 3 infeasible request
or non-stabilizing controller, 4 numerical failure.  Failures print a
machine-readable error JSON to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import benchmarks, certify, errors, norms, reduce as reduction, sysfile
from .decompose import modal_form
from .gen import generate_instance
from .statespace import frequency_response, is_internally_stable

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

_INPUT_ERRORS = (
    errors.DimensionError,
    errors.NonFiniteError,
    errors.UnsupportedError,
)
_INFEASIBLE_ERRORS = (
    errors.NotStabilizingError,
    errors.InfeasibleOrderError,
    errors.SynthesisError,
    errors.NoStabilizingSolutionError,
    errors.WrongCertificateError,
)


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, _INPUT_ERRORS):
        return EXIT_INPUT
    if isinstance(exc, _INFEASIBLE_ERRORS):
        return EXIT_INFEASIBLE
    return EXIT_NUMERICAL


def _emit_error(exc: Exception) -> int:
    code = _exit_code(exc)
    doc = {
        "error": {
            "type": type(exc).__name__,
            "message": str(exc),
            "exit_code": code,
        }
    }
    print(json.dumps(doc, sort_keys=True))
    return code


def _dump_json(doc, path=None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_csv(path, rows) -> None:
    lines = ["epsilon,delta_hinf,cost_gap_ratio"]
    for eps, dh, ratio in rows:
        lines.append(f"{eps!r},{dh!r},{ratio!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def _modal_blocks_for_order(k_sys, target_order: int) -> int:
    """Smallest number of removed blocks reaching the target order."""
    md = modal_form(k_sys)

    def rank_key(i):
        d = md.blocks[i].importance
        return (math.inf if math.isnan(d) else d,
                abs(md.blocks[i].eigenvalue.real),
                abs(md.blocks[i].eigenvalue.imag), i)

    ranking = sorted(range(len(md.blocks)), key=rank_key)
    order = k_sys.n
    removed = 0
    for i in ranking:
        if order <= target_order:
            break
        order -= md.blocks[i].order
        removed += 1
    if order > target_order:
        raise errors.InfeasibleOrderError(
            f"cannot reach order {target_order} by removing whole blocks"
        )
    return removed


def _cmd_reduce(args) -> int:
    g, _ = sysfile.load_system(args.plant)
    k, _ = sysfile.load_system(args.controller)
    stable, alpha = is_internally_stable(g, k)
    if not stable:
        raise errors.NotStabilizingError(
            f"controller does not stabilize the plant (abscissa {alpha:.3e})"
        )
    if args.method == "balanced":
        if args.order is None:
            raise errors.InfeasibleOrderError("balanced reduction needs --order")
        result = reduction.balanced_truncate_unstable(k, args.order)
    else:
        if args.blocks is not None:
            r_red = args.blocks
        elif args.order is not None:
            r_red = _modal_blocks_for_order(k, args.order)
        else:
            raise errors.InfeasibleOrderError("modal reduction needs --blocks or --order")
        result = reduction.modal_truncate(k, r_red)
    sysfile.save_system(args.out, result.reduced, name="reduced-controller")
    report = {
        "method": result.method,
        "original_order": k.n,
        "reduced_order": result.reduced.n,
        "truncated_tail": list(result.truncated_tail),
        "out": str(args.out),
    }
    if args.certify:
        if result.method == "balanced":
            cert = certify.check_cor1(g, k, result)
        else:
            delta_min = reduction.minimal_realization(result.delta)
            if delta_min.n == 0 or all(
                ev.real < 0 for ev in np.atleast_1d(np.linalg.eigvals(delta_min.A))
            ):
                cert = certify.check_cor2(g, k, result.reduced)
            else:
                cert = certify.check_thm3(g, k, result.reduced)
        report["certificates"] = [cert.to_dict()]
    report_path = args.report or str(Path(args.out).with_suffix(".report.json"))
    _dump_json(report, report_path)
    if not args.quiet:
        print(f"reduced controller of order {result.reduced.n} written to {args.out}")
    return 0


def _cmd_cost(args) -> int:
    g, _ = sysfile.load_system(args.plant)
    k, _ = sysfile.load_system(args.controller)
    total, parts = certify.lqg_cost_blocks(g, k)
    if args.json:
        _dump_json({"cost": total, "block_contributions": parts})
    else:
        print(f"cost = {total:.6g}")
        labels = ("noise->output", "measurement->output",
                  "noise->input", "measurement->input")
        for label, value in zip(labels, parts):
            print(f"  {label}: {value:.6g}")
    return 0


def _cmd_norms(args) -> int:
    s, _ = sysfile.load_system(args.system)
    fn = {
        "h2": norms.h2_norm,
        "hinf": norms.hinf_norm,
        "l2": norms.l2_norm,
        "linf": norms.linf_norm,
    }[args.which]
    value = fn(s)
    if args.json:
        _dump_json({args.which: value})
    else:
        print(f"{value:.8g}")
    return 0


def _cmd_gen(args) -> int:
    g, k = generate_instance(args.order, args.unstable, args.seed)
    prefix = Path(args.out)
    plant_path = prefix.with_name(prefix.name + ".plant.json")
    ctrl_path = prefix.with_name(prefix.name + ".controller.json")
    sysfile.save_system(plant_path, g, name=f"generated-plant-seed{args.seed}")
    sysfile.save_system(ctrl_path, k, name=f"generated-controller-seed{args.seed}")
    if not args.quiet:
        print(f"wrote {plant_path} and {ctrl_path}")
    return 0


def _cmd_repro(args) -> int:
    out = args.out or f"{args.which}_report.json"
    if args.which == "table1":
        report = benchmarks.run_balanced_vs_modal()
    elif args.which == "unstable":
        report = benchmarks.run_unstable_truncation()
    else:
        report, rows = benchmarks.run_scaling_sweep(seed=args.seed)
        csv_path = Path(out).with_suffix(".csv")
        _write_csv(csv_path, rows)
        report["csv"] = str(csv_path)
    _dump_json(report, out)
    if not args.quiet:
        checks = report.get("reference_checks", {})
        for name, chk in sorted(checks.items()):
            status = "pass" if chk.get("pass") else "FAIL"
            print(f"{args.which}:{name}: {status}")
        print(f"report written to {out}")
    return 0


def _cmd_certify(args) -> int:
    g, _ = sysfile.load_system(args.plant)
    k, _ = sysfile.load_system(args.controller)
    k_r, _ = sysfile.load_system(args.reduced)
    if args.theorem == "lemma3":
        cert = certify.check_lemma3(g, k, k_r)
    elif args.theorem == "thm1":
        cert = certify.check_thm1(g, k, k_r)
    elif args.theorem == "thm2":
        cert = certify.check_thm2_bound(g, k, k_r)
    elif args.theorem == "cor2":
        cert = certify.check_cor2(g, k, k_r)
    elif args.theorem == "thm3":
        cert = certify.check_thm3(g, k, k_r)
    else:  # cor1: recompute the balanced reduction at the provided order
        result = reduction.balanced_truncate_unstable(k, k_r.n)
        ws = np.logspace(-3, 3, 20)
        resp_given = frequency_response(k_r, ws)
        resp_comp = frequency_response(result.reduced, ws)
        scale = max(np.max(np.abs(resp_comp)), 1.0)
        if np.max(np.abs(resp_given - resp_comp)) > 1e-6 * scale:
            raise errors.WrongCertificateError(
                "provided reduced controller does not match the balanced "
                "truncation at its order; cor1 does not apply"
            )
        cert = certify.check_cor1(g, k, result)
    doc = cert.to_dict()
    _dump_json(doc, args.out)
    if args.out and not args.quiet:
        print(f"certificate written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctred",
        description="Reduce LQG controller order with stability/performance certificates.",
    )
    parser.add_argument("--quiet", action="store_true", help="suppress status lines")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a controller's order")
    p.add_argument("plant")
    p.add_argument("controller")
    p.add_argument("--method", choices=("balanced", "modal"), required=True)
    p.add_argument("--order", type=int, help="target order of the reduced controller")
    p.add_argument("--blocks", type=int, help="number of modal blocks to remove")
    p.add_argument("--out", required=True, help="output system file")
    p.add_argument("--certify", action="store_true",
                   help="attach the matching certificate to the report")
    p.add_argument("--report", help="report path (default: <out>.report.json)")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("cost", help="closed-loop quadratic cost of a loop")
    p.add_argument("plant")
    p.add_argument("controller")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("norms", help="system norms of a system file")
    p.add_argument("system")
    p.add_argument("--which", choices=("h2", "hinf", "l2", "linf"), required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("gen", help="generate a random stabilizing plant/controller pair")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--unstable", type=int, default=0,
                   help="number of antistable controller modes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("repro", help="run a bundled benchmark experiment")
    p.add_argument("which", choices=("table1", "unstable", "scaling"))
    p.add_argument("--out", help="report path (default: <which>_report.json)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_repro)

    p = sub.add_parser("certify", help="evaluate a certificate for a reduced controller")
    p.add_argument("plant")
    p.add_argument("controller")
    p.add_argument("reduced")
    p.add_argument("--theorem", required=True,
                   choices=("lemma3", "thm1", "thm2", "cor1", "cor2", "thm3"))
    p.add_argument("--out", help="write the certificate JSON here instead of stdout")
    p.set_defaults(func=_cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.CtredError as exc:
        return _emit_error(exc)
    except (OSError, json.JSONDecodeError) as exc:
        return _emit_error(errors.DimensionError(str(exc)))
    except np.linalg.LinAlgError as exc:
        return _emit_error(errors.ConvergenceError(str(exc)))


if __name__ == "__main__":
    sys.exit(main())
