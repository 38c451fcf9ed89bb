"""Command-line interface.

JSON-lines on stdout (one report per line) so shell pipelines can filter
verdicts; a human-readable rendering sits behind ``--pretty``.  Exit codes:
0 no violation / certified / all criteria pass, 1 violation or refusal,
2 usage error, 3 numeric failure.  Seeds come only from flags or a config
file, never from the environment.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .catalog import builtin_entries, lookup
from .certify import (
    certify_differential_monotone,
    certify_hessian_sign,
    certify_topkis,
)
from .checkers import CheckConfig, check, refute
from .errors import (
    CapabilityError,
    ConeCheckError,
    DomainError,
    NumericFailure,
    ParameterError,
    PreconditionError,
    ShapeError,
    UnknownEntryError,
)
from .suite import build_manifest, manifest_bytes

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

_USAGE_ERRORS = (
    ParameterError,
    UnknownEntryError,
    CapabilityError,
    ShapeError,
    PreconditionError,
    DomainError,
)

_PROPERTIES = [
    "subadd",
    "superadd",
    "strong-subadd",
    "strong-superadd",
    "second-diff-nonneg",
    "second-diff-nonpos",
    "submodular",
    "supermodular",
    "completely-monotone",
    "comonotone-strong-superadd",
]


def _parse_param(text: str):
    if "=" not in text:
        raise ParameterError(f"--param expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    if "," in raw:
        try:
            return key, [float(tok) for tok in raw.split(",")]
        except ValueError:
            return key, raw
    try:
        return key, float(raw)
    except ValueError:
        return key, raw


def _emit(line: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(line + "\n")
    else:
        print(line)


def _pretty_report(obj: dict) -> str:
    rows = [f"{k:>14}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(obj.items())]
    return "\n".join(rows)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecheck",
        description="Property checks and numeric certificates for functions on convex cones.",
    )
    parser.add_argument("--version", action="version", version=f"conecheck {__version__}")
    parser.add_argument("--config", help="JSON file with default flag values (flags win)")
    sub = parser.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="catalog operations")
    cat.add_argument("action", choices=["list"])
    cat.add_argument("--pretty", action="store_true")

    def _common(p, with_property=True):
        if with_property:
            p.add_argument("entry", help="catalog entry id")
            p.add_argument("--property", required=True, choices=_PROPERTIES)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--scale", type=float, default=None)
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--param", action="append", default=[], metavar="K=V")
        p.add_argument("--json", dest="json_path", default=None, metavar="PATH")
        p.add_argument("--pretty", action="store_true")

    chk = sub.add_parser("check", help="randomized property check")
    _common(chk)
    ref = sub.add_parser("refute", help="counterexample search over the scale ladder")
    _common(ref)

    cert = sub.add_parser("certify", help="sampled sufficient-condition certificate")
    cert.add_argument("entry")
    cert.add_argument(
        "--method", required=True, choices=["hessian-sign", "topkis", "diff-monotone"]
    )
    cert.add_argument("--sign", choices=["nonpos", "nonneg"])
    cert.add_argument("--mode", choices=["submodular", "supermodular"])
    cert.add_argument("--direction", choices=["nonincreasing", "nondecreasing"])
    cert.add_argument("--points", type=int, default=200)
    _common(cert, with_property=False)

    ste = sub.add_parser("suite", help="run the acceptance suite and write its manifest")
    ste.add_argument("--seed", type=int, default=None)
    ste.add_argument("--json", dest="json_path", default=None, metavar="PATH")

    return parser


def _config_from_args(args) -> CheckConfig:
    kwargs = {}
    if getattr(args, "trials", None) is not None:
        kwargs["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = args.seed
    if getattr(args, "scale", None) is not None:
        kwargs["scale"] = args.scale
    return CheckConfig(**kwargs)


def _collect_params(args) -> dict | None:
    if not args.param:
        return None
    return dict(_parse_param(p) for p in args.param)


def _apply_config_file(args, parser):
    if not args.config:
        return
    try:
        with open(args.config, encoding="utf-8") as fh:
            defaults = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config file {args.config!r}: {exc}") from exc
    for key, value in defaults.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _cmd_catalog(args) -> int:
    for entry in builtin_entries():
        obj = entry.to_json()
        if args.pretty:
            print(f"{obj['id']:<22} {obj['domain']['family']:<18} "
                  + " ".join(f"{k}:{v}" for k, v in obj["status"].items()))
        else:
            print(json.dumps(obj, sort_keys=True))
    return EXIT_OK


def _cmd_check(args, refuting: bool) -> int:
    lookup(args.entry)  # surfaces unknown ids as usage errors before running
    cfg = _config_from_args(args)
    fn = refute if refuting else check
    report = fn(args.entry, args.property, cfg, params=_collect_params(args), dim=args.dim)
    line = report.json_line()
    if args.pretty:
        print(_pretty_report(report.to_json()))
        if args.json_path:
            _emit(line, args.json_path)
    else:
        _emit(line, args.json_path)
    return EXIT_VIOLATION if report.found_violation else EXIT_OK


def _cmd_certify(args) -> int:
    lookup(args.entry)
    cfg = _config_from_args(args)
    params = _collect_params(args)
    if args.method == "hessian-sign":
        if not args.sign:
            raise ParameterError("--method hessian-sign needs --sign nonpos|nonneg")
        cert = certify_hessian_sign(args.entry, args.sign, args.points, cfg,
                                    params=params, dim=args.dim)
    elif args.method == "topkis":
        if not args.mode:
            raise ParameterError("--method topkis needs --mode submodular|supermodular")
        cert = certify_topkis(args.entry, args.mode, args.points, cfg,
                              params=params, dim=args.dim)
    else:
        if not args.direction:
            raise ParameterError(
                "--method diff-monotone needs --direction nonincreasing|nondecreasing"
            )
        cert = certify_differential_monotone(args.entry, args.direction, args.points, cfg,
                                             params=params, dim=args.dim)
    line = cert.json_line()
    if args.pretty:
        print(_pretty_report(cert.to_json()))
        if args.json_path:
            _emit(line, args.json_path)
    else:
        _emit(line, args.json_path)
    return EXIT_OK if cert.certified else EXIT_VIOLATION


def _cmd_suite(args) -> int:
    seed = args.seed if args.seed is not None else 0
    sink = open(args.json_path, "wb") if args.json_path else None  # fail fast on bad paths
    try:
        started = time.perf_counter()
        manifest = build_manifest(seed=seed, command=f"suite --seed {seed}")
        elapsed = time.perf_counter() - started
        for crit in manifest["criteria"]:
            status = "PASS" if crit["passed"] else "FAIL"
            print(f"criterion {crit['criterion']:>2} [{status}] {crit['title']}", file=sys.stderr)
        print(f"suite wall time: {elapsed:.1f}s", file=sys.stderr)
        if sink is not None:
            sink.write(manifest_bytes(manifest))
        else:
            for crit in manifest["criteria"]:
                print(json.dumps(crit, sort_keys=True))
    finally:
        if sink is not None:
            sink.close()
    return EXIT_OK if manifest["passed"] else EXIT_VIOLATION


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _apply_config_file(args, parser)
        if args.command == "catalog":
            return _cmd_catalog(args)
        if args.command == "check":
            return _cmd_check(args, refuting=False)
        if args.command == "refute":
            return _cmd_check(args, refuting=True)
        if args.command == "certify":
            return _cmd_certify(args)
        if args.command == "suite":
            return _cmd_suite(args)
        parser.error(f"unknown command {args.command!r}")
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConeCheckError as exc:  # anything else from the package
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
