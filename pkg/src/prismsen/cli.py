"""Command-line front end: every construction and checker, JSON in and out.

Exit status is 0 when every check in the report passes, 1 when a
mathematical check fails and 2 when the input does not validate.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import constructions as C
from . import delta as D
from . import lattice as LT
from . import sen as S
from .errors import NonFreeModule, PrismSenError
from .rings import Eisenstein
from .witt import witt_selftest

DEFAULT_SEED = 20240917


class SchemaError(ValueError):
    pass


# ---------------------------------------------------------------- parameter helpers


def parse_E(p: int, text: str | None) -> Eisenstein:
    if text is None:
        return Eisenstein.unramified(p)
    text = text.strip()
    try:
        coeffs = json.loads(text) if text.startswith("[") else [int(t) for t in text.split(",")]
        return Eisenstein(p, tuple(int(c) for c in coeffs))
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"bad Eisenstein polynomial {text!r}: {exc}") from None


def _require(params: dict, *keys):
    for k in keys:
        if params.get(k) is None:
            raise SchemaError(f"missing parameter {k!r}")
        if not isinstance(params[k], int) or params[k] < 1:
            raise SchemaError(f"parameter {k!r} must be a positive integer")


def _E_param(params) -> Eisenstein:
    E = params.get("E")
    if isinstance(E, list):
        E = json.dumps(E)
    return parse_E(params["p"], E)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read JSON from {path}: {exc}") from None


# ---------------------------------------------------------------- commands


def _failure_report(command: str, params: dict, exc: PrismSenError) -> dict:
    locus = {"kind": "exception", "error": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "index", None) is not None:
        locus["index"] = exc.index
    if getattr(exc, "context", None):
        locus["context"] = exc.context
    return {"command": command, "params": params, "pass": False, "first_failure": locus}


def cmd_construct_b(params: dict) -> dict:
    _require(params, "p", "n", "L", "N")
    report, table = C.construct_b_unramified(params["p"], params["n"], params["L"], params["N"])
    out = report.to_json()
    out["recursion_table"] = table.to_json()
    return out


def cmd_construct_b_general(params: dict) -> dict:
    _require(params, "p", "n", "L", "N")
    return C.construct_b_general(_E_param(params), params["n"], params["L"], params["N"]).to_json()


def cmd_construct_c(params: dict) -> dict:
    _require(params, "p", "n", "L", "N")
    return C.construct_c(_E_param(params), params["n"], params["L"], params["N"]).to_json()


def cmd_solve_vf(params: dict) -> dict:
    _require(params, "p", "L", "N")
    if params["p"] < 3:
        raise SchemaError("solve-vf needs p >= 3")
    return C.solve_v_f(params["p"], params["L"], params["N"]).to_json()


def failing_example(N: int = 8) -> S.SenModule:
    """E = u^2 - 3 over S/E, Theta(e) = e: Leibniz holds, nilpotence does not."""
    ring = S.SenRing(Eisenstein(3, (-3, 0, 1)), 1, N)
    return S.SenModule(ring, [[ring.ring.one()]])


def _sen_module(params: dict) -> S.SenModule:
    if params.get("module") is not None:
        try:
            return S.SenModule.from_json(params["module"])
        except NonFreeModule:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad module JSON: {exc}") from None
    if params.get("twist") is not None:
        _require(params, "p", "n", "N")
        ring = S.SenRing(_E_param(params), params["n"], params["N"])
        try:
            return S.make_twist(ring, int(params["twist"]), params.get("variant") or "ideal-power")
        except ValueError as exc:
            raise SchemaError(str(exc)) from None
    return failing_example(params.get("N") or 8)


def cmd_sen_check(params: dict) -> dict:
    M = _sen_module(params)
    seed = params.get("seed", DEFAULT_SEED)
    leib = S.check_leibniz(M, seed=seed)
    nil = S.check_nilpotence(M)
    weights = S.sen_weights(M)
    ok = leib.passed and nil.passed
    failure = None
    if not leib.passed:
        failure = {"kind": "leibniz"}
    elif not nil.passed:
        failure = {"kind": "nilpotence", "certificate": [str(c) for c in nil.certificate]}
    return {
        "command": "sen-check",
        "params": params,
        "module": M.to_json(),
        "leibniz": leib.to_json(),
        "nilpotence": nil.to_json(),
        "weights": weights.to_json(),
        "pass": ok,
        "first_failure": failure,
    }


def cmd_sen_cohomology(params: dict) -> dict:
    M = _sen_module(params)
    coh = S.sen_cohomology(M)
    return {
        "command": "sen-cohomology",
        "params": params,
        "module": M.to_json(),
        "cohomology": coh.to_json(),
        "pass": True,
        "first_failure": None,
    }


def _rational_module(params: dict) -> LT.RationalSenModule:
    if params.get("module") is not None:
        try:
            return LT.RationalSenModule.from_json(params["module"])
        except NonFreeModule:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"bad module JSON: {exc}") from None
    _require(params, "p", "n")
    E = _E_param(params)
    rank = params.get("rank") or 2
    rng = random.Random(params.get("seed", DEFAULT_SEED))
    return LT.random_rational_module(E, params["n"], rank, rng)[1]


def cmd_sen_lattice(params: dict) -> dict:
    M = _rational_module(params)
    res = LT.construct_stable_lattice(M)
    out = res.to_json()
    return {
        "command": "sen-lattice",
        "params": params,
        "module": M.to_json(),
        "lattice": out,
        "pass": res.passed,
        "first_failure": None if res.passed else {"kind": "lattice"},
    }


def cmd_delta_verify(params: dict) -> dict:
    _require(params, "p", "i_max")
    E = _E_param(params)
    caps = {"D": params.get("D") or 4, "degree_cap": params.get("degree_cap")}
    eta = D.verify_eta_on_delta_powers(E, params["i_max"], **caps)
    theta = D.theta_on_envelope_generators(E.p, params["i_max"], params.get("k_max") or 5, **caps)
    residual = D.delta_residual_on_u(D.DeltaRing(E.p, caps["D"], caps["degree_cap"]), E)
    failure = None
    for c in eta.checks:
        if not (c.passed and c.shape_ok):
            failure = {"kind": "eta", "i": c.i}
            break
    if failure is None and not theta.passed:
        failure = {"kind": "theta"}
    return {
        "command": "delta-verify",
        "params": params,
        "eta": eta.to_json(),
        "theta": theta.to_json(),
        "delta_eta_residual_on_u": residual.to_json(),
        "pass": eta.passed and theta.passed,
        "first_failure": failure,
    }


def cmd_witt_selftest(params: dict) -> dict:
    _require(params, "p", "L", "N", "trials")
    results = witt_selftest(params["p"], params["L"], params["trials"], params.get("seed", DEFAULT_SEED), params["N"])
    failed = [r.name for r in results if not r.passed]
    return {
        "command": "witt-selftest",
        "params": params,
        "results": [r.to_json() for r in results],
        "pass": not failed,
        "first_failure": {"kind": "identity", "name": failed[0]} if failed else None,
    }


COMMANDS = {
    "construct-b": cmd_construct_b,
    "construct-b-general": cmd_construct_b_general,
    "construct-c": cmd_construct_c,
    "solve-vf": cmd_solve_vf,
    "sen-check": cmd_sen_check,
    "sen-cohomology": cmd_sen_cohomology,
    "sen-lattice": cmd_sen_lattice,
    "delta-verify": cmd_delta_verify,
    "witt-selftest": cmd_witt_selftest,
}


def run(command: str, params: dict) -> dict:
    """Run one command; mathematical failures come back as a failing report."""
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}")
    try:
        return COMMANDS[command](params)
    except (SchemaError, NonFreeModule):
        raise
    except PrismSenError as exc:
        return _failure_report(command, params, exc)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


# ---------------------------------------------------------------- verify-report


def verdicts(obj, path: str = "") -> dict:
    """Every boolean "pass" field in a report, keyed by its JSON path."""
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            sub = f"{path}/{k}"
            if k == "pass" and isinstance(v, bool):
                out[sub] = v
            else:
                out.update(verdicts(v, sub))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(verdicts(v, f"{path}/{i}"))
    return out


def verify_report(report: dict) -> dict:
    if not isinstance(report, dict) or "command" not in report or "params" not in report:
        raise SchemaError("a report needs 'command' and 'params'")
    command = report["command"]
    fresh = run(command, report["params"])
    old_v, new_v = verdicts(report), verdicts(fresh)
    mismatched = sorted(k for k in old_v.keys() | new_v.keys() if old_v.get(k) != new_v.get(k))
    same_components = report.get("components") == fresh.get("components")
    reproduced = not mismatched and same_components
    return {
        "command": "verify-report",
        "params": {"command": command},
        "reproduced": reproduced,
        "mismatched_verdicts": mismatched,
        "components_match": same_components,
        "original_pass": report.get("pass"),
        "pass": reproduced and bool(fresh.get("pass")),
        "first_failure": None if reproduced else {"kind": "reproduction", "paths": mismatched[:10]},
    }


# ---------------------------------------------------------------- argparse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prismsen", description=__doc__.splitlines()[0])
    parser.add_argument("--verify-report", metavar="PATH", help="re-run a saved report and compare verdicts")
    parser.add_argument("--out", metavar="PATH", help="also write the report here")
    sub = parser.add_subparsers(dest="command")

    def common(sp, need=("p",)):
        sp.add_argument("--p", type=int, default=3)
        sp.add_argument("--E", default=None, help="coefficients of E, constant term first, e.g. -3,0,1")
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--L", type=int, default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--out", metavar="PATH", default=None)
        return sp

    sp = common(sub.add_parser("construct-b", help="unit b for E = u - p via the recursion"))
    sp.set_defaults(n=3, L=3, N=12)
    for name, helptext in (
        ("construct-b-general", "closed-form b for a general Eisenstein E"),
        ("construct-c", "closed-form c for a general Eisenstein E"),
    ):
        sp = common(sub.add_parser(name, help=helptext))
        sp.set_defaults(n=3, L=3, N=12)
    sp = common(sub.add_parser("solve-vf", help="x_lambda with V(F(x)) = lambda in W(Z_p)"))
    sp.set_defaults(L=4, N=20)

    for name, helptext in (("sen-check", "Leibniz, nilpotence and weights"), ("sen-cohomology", "H0 and H1 of Theta")):
        sp = common(sub.add_parser(name, help=helptext))
        sp.add_argument("--module", metavar="JSON", help="path to a module description")
        sp.add_argument("--twist", type=int, default=None, help="rank-one twist of weight k")
        sp.add_argument("--variant", choices=["ideal-power", "ideal-over-p-power"], default="ideal-power")
        sp.set_defaults(n=1, N=8)

    sp = common(sub.add_parser("sen-lattice", help="Theta-stable lattice for a module over the p-inverted ring"))
    sp.add_argument("--module", metavar="JSON", help="path to a rational module description")
    sp.add_argument("--rank", type=int, default=2)
    sp.set_defaults(n=2)

    sp = common(sub.add_parser("delta-verify", help="eta on delta powers and Theta on envelope generators"))
    sp.add_argument("--i-max", dest="i_max", type=int, default=3)
    sp.add_argument("--k-max", dest="k_max", type=int, default=5)
    sp.add_argument("--D", type=int, default=4, help="delta-order cap")
    sp.add_argument("--degree-cap", dest="degree_cap", type=int, default=None)

    sp = common(sub.add_parser("witt-selftest", help="ghost vs universal-polynomial arithmetic and Witt identities"))
    sp.add_argument("--trials", type=int, default=200)
    sp.set_defaults(L=4, N=30)

    sp = sub.add_parser("verify-report", help="re-run a saved report and compare verdicts")
    sp.add_argument("report", metavar="PATH")
    sp.add_argument("--out", metavar="PATH", default=None)
    return parser


_PARAM_KEYS = ("p", "E", "n", "L", "N", "seed", "i_max", "k_max", "D", "degree_cap", "trials", "twist", "variant", "rank")


def params_from_args(args) -> dict:
    params = {k: getattr(args, k) for k in _PARAM_KEYS if getattr(args, k, None) is not None}
    if params.get("E") is not None:
        params["E"] = list(parse_E(params["p"], params["E"]).coeffs)
    if args.command in ("sen-check", "sen-cohomology"):
        if getattr(args, "module", None):
            params = {"module": _load_json(args.module), "seed": args.seed}
        elif args.twist is None:
            params = {"N": args.N, "seed": args.seed}
    if args.command == "sen-lattice" and getattr(args, "module", None):
        params = {"module": _load_json(args.module)}
    return params


def emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=True)
    print(text)
    if out:
        Path(out).write_text(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verify_report or args.command == "verify-report":
            path = args.verify_report or args.report
            report = verify_report(_load_json(path))
        elif args.command is None:
            parser.print_help(sys.stderr)
            return 2
        else:
            report = run(args.command, params_from_args(args))
    except (SchemaError, NonFreeModule) as exc:
        emit({"error": type(exc).__name__, "message": str(exc), "pass": False}, None)
        return 2
    emit(report, args.out)
    return 0 if report.get("pass") else 1


if __name__ == "__main__":
    sys.exit(main())
