"""Command-line front end: ``a2ops verify|show|eval``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 no regular sample points could be found (or a singular point was
requested).

Options may also come from a flat ``key = value`` config file given by
``--config`` or the ``A2OPS_CONFIG`` environment variable; flags win.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import catalog, verify
from .elliptic import FAMILIES, make_backend
from .errors import A2OpsError, SamplingError, SingularPointError
from .opalgebra import constrained_lambda, full_symbol, to_json, to_latex, to_text

CONFIG_ENV = "A2OPS_CONFIG"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR = 0, 1, 2, 3

DEFAULTS: dict[str, Any] = {
    "ops": None,
    "family": "hyperbolic",
    "a": 1.0,
    "kappa": 0.5,
    "k": "symbolic",
    "trials": None,
    "seed": 0,
    "tol": None,
    "box": 2.0,
    "format": "text",
    "out": None,
    "jobs": 1,
}
CONVERTERS = {"a": float, "kappa": float, "trials": int, "seed": int, "tol": float,
              "box": float, "jobs": int}
CHECK_DEFAULTS = {
    "commute": {"ops": "Q1,P2", "trials": 200, "tol": verify.TOL_COMMUTE},
    "funceq": {"trials": 100, "tol": verify.TOL_FUNCEQ},
    "equivariance": {"ops": "P1,Q1,P2,RtauD1,RtauD2", "tol": verify.TOL_COMMUTE},
    "gauge": {"tol": verify.TOL_COMMUTE},
    "group": {"tol": verify.TOL_COMMUTE},
    "hc": {"trials": 20, "tol": verify.TOL_COMMUTE},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def read_config(path: str | os.PathLike) -> dict[str, Any]:
    """Parse a flat key=value file (``#`` comments) into option values."""
    text = Path(path).read_text(encoding="utf-8")
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string("[a2ops]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"malformed config {path}: {exc}") from exc
    out = {}
    for key, value in cp["a2ops"].items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        out[key] = _convert(key, value)
    return out


def _convert(key: str, value: Any) -> Any:
    if value is None or key not in CONVERTERS:
        return value
    try:
        return CONVERTERS[key](value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def resolve_options(flags: dict[str, Any], config: dict[str, Any] | None = None) -> dict[str, Any]:
    """Defaults < config < explicit flags (``None`` means not given)."""
    opts = dict(DEFAULTS)
    opts.update({k: v for k, v in (config or {}).items() if v is not None})
    opts.update({k: v for k, v in flags.items() if k in DEFAULTS and v is not None})
    return opts


def _split(value: str) -> list[str]:
    return [p.strip() for p in str(value).split(",") if p.strip()]


def spec_from_options(check: str, opts: dict[str, Any]) -> verify.CheckSpec:
    if check not in CHECK_DEFAULTS:
        raise UsageError(f"unknown check {check!r}")
    merged = {**opts, **{k: v for k, v in CHECK_DEFAULTS[check].items() if opts.get(k) is None}}
    try:
        backend = make_backend(merged["family"], merged["a"], merged["kappa"])
        k_values = [verify.parse_k(v) for v in _split(merged["k"])]
        ops = tuple(_split(merged["ops"])) if merged.get("ops") else ()
        return verify.CheckSpec(check, ops, backend, tuple(k_values), merged.get("trials") or 1,
                                merged["seed"], merged["box"], merged["tol"])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


def run_config_from_options(opts: dict[str, Any]) -> verify.RunConfig:
    kw = {"seed": opts["seed"], "box": opts["box"], "jobs": opts["jobs"]}
    if opts.get("trials"):
        kw["trials"] = opts["trials"]
    return verify.RunConfig(**kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="a2ops", description="Matrix-valued A2 operators: build, inspect, verify.")
    parser.add_argument("--config", help=f"flat key=value options file (env {CONFIG_ENV})")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run a check suite")
    v.add_argument("check", choices=sorted(CHECK_DEFAULTS) + ["all"])
    v.add_argument("--ops", help="comma-separated operator names")
    v.add_argument("--family", choices=FAMILIES)
    v.add_argument("--a", type=float)
    v.add_argument("--kappa", type=float)
    v.add_argument("--k", help="comma-separated rationals or 'symbolic'")
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--box", type=float)
    v.add_argument("--format", choices=("text", "json"))
    v.add_argument("--out", help="write the report here")
    v.add_argument("--jobs", type=int)

    s = sub.add_parser("show", help="print a catalog operator")
    s.add_argument("name", choices=sorted(catalog.CATALOG))
    s.add_argument("--k")
    s.add_argument("--format", choices=("text", "json", "latex"))

    e = sub.add_parser("eval", help="full symbol at (t, lambda)")
    e.add_argument("name", choices=sorted(catalog.CATALOG))
    e.add_argument("--point", required=True, help="t1,t2,t3 (use --point=-1,0,1 for a leading minus)")
    e.add_argument("--lambda", dest="lam", required=True, help="l1,l2,l3 (complex allowed)")
    e.add_argument("--family", choices=FAMILIES)
    e.add_argument("--a", type=float)
    e.add_argument("--kappa", type=float)
    e.add_argument("--k")
    e.add_argument("--on-shell", action="store_true", help="require l1 + l2 + l3 = 0")
    return parser


def _load_config(path: str | None) -> dict[str, Any]:
    path = os.environ.get(CONFIG_ENV) or path
    if not path:
        return {}
    if not Path(path).is_file():
        raise UsageError(f"config file not found: {path}")
    return read_config(path)


def cmd_verify(args: argparse.Namespace, opts: dict[str, Any]) -> int:
    if args.check == "all":
        reports = verify.run_all(run_config_from_options(opts))
    else:
        reports = [verify.run_check(spec_from_options(args.check, opts))]
    fmt = opts["format"] if opts["format"] in ("text", "json") else "text"
    body = verify.dumps(reports, fmt)
    if opts.get("out"):
        Path(opts["out"]).write_text(body, encoding="utf-8")
        print(verify.dumps(reports, "text"), end="")
    else:
        print(body, end="")
    return EXIT_OK if verify.all_passed(reports) else EXIT_FAIL


def cmd_show(args: argparse.Namespace, opts: dict[str, Any]) -> int:
    D = catalog.build(args.name, verify.parse_k(opts["k"]))
    fmt = opts["format"]
    if fmt == "json":
        print(json.dumps(to_json(D), indent=2))
    elif fmt == "latex":
        print(to_latex(D))
    else:
        print(to_text(D))
    return EXIT_OK


def _floats(text: str, kind=float) -> list:
    try:
        vals = [kind(p.replace(" ", "")) for p in _split(text)]
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r}") from exc
    if len(vals) != 3:
        raise UsageError(f"expected three comma-separated values, got {text!r}")
    return vals


def cmd_eval(args: argparse.Namespace, opts: dict[str, Any]) -> int:
    k = verify.parse_k(opts["k"] if args.k is not None else "1")
    if k == "symbolic":
        raise UsageError("eval needs a numeric --k")
    backend = make_backend(opts["family"], opts["a"], opts["kappa"])
    t = np.array(_floats(args.point))
    lam = np.array(_floats(args.lam, complex))
    if args.on_shell:
        lam = constrained_lambda(lam)
    D = catalog.build(args.name, k, verify.table_for([args.name], backend))
    sym = full_symbol(D, backend, t, lam, k)
    if np.abs(sym.imag).max() == 0:
        sym = sym.real
    with np.printoptions(precision=12, suppress=False):
        print(sym)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "show": cmd_show, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config)
        flags = {k: getattr(args, k) for k in DEFAULTS if hasattr(args, k)}
        opts = resolve_options(flags, config)
        return COMMANDS[args.command](args, opts)
    except UsageError as exc:
        print(f"a2ops: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SamplingError, SingularPointError) as exc:
        print(f"a2ops: singular: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (A2OpsError, ValueError) as exc:
        print(f"a2ops: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
