"""Command-line entry point: `expsum <subcommand> ...`.

Exit codes: 0 success, 1 usage or input error, 2 a checked identity or
bound failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, golden
from .errors import BoundViolation, ExpsumError, IdentityViolation, ParseError

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    def __init__(self, msg: str, report: dict | None = None):
        super().__init__(msg)
        self.report = report


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------- run metadata

@dataclass
class RunConfig:
    subcommand: str
    params: dict
    threads: int
    budget: int | None
    out: str | None
    golden_path: str
    golden_version: int
    tolerances: dict = field(default_factory=dict)


def build_id() -> str:
    here = Path(__file__).resolve().parent
    try:
        r = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                           capture_output=True, text=True, timeout=5)
        if r.returncode == 0 and r.stdout.strip():
            return f"{__version__}+{r.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def read_config_file(path: str) -> dict:
    """key = value lines; '#' comments; keys use the long flag names (dashes or underscores)."""
    out = {}
    with open(path) as fh:
        for k, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{k}: expected key = value")
            key, val = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    return str(o)


def emit(report: dict, cfg: RunConfig):
    report = dict(report)
    report["run"] = {"config": asdict(cfg), "build": build_id()}
    text = json.dumps(report, indent=2, default=_json_default)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    print(text)


# ---------------------------------------------------------------- helpers

def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _sigma(text: str) -> int:
    if text in ("+1", "1", "+", "even"):
        return 1
    if text in ("-1", "-", "odd"):
        return -1
    raise argparse.ArgumentTypeError("sigma must be +1 or -1")


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _resolve_program(path: str) -> tuple[str, str]:
    """(display name, text) for a path or a shipped program name."""
    from .exponent_opt import SHIPPED, program_text
    p = Path(path)
    if p.exists():
        return str(p), p.read_text()
    if p.name in SHIPPED:
        return p.name, program_text(p.name)
    raise UsageError(f"no such program: {path} (shipped: {', '.join(SHIPPED)})")


# ---------------------------------------------------------------- subcommands

def cmd_kloosterman(a, cfg):
    from .kloosterman import build_table, parseval_sum, verify_weil
    K = build_table(a.q)
    m, arg = verify_weil(a.q)
    if a.dump:
        with open(a.dump, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "kl"])
            for k in range(a.q):
                w.writerow([k, repr(float(K.kl[k]))])
    return {"q": a.q, "max_abs": m, "argmax": arg, "parseval": parseval_sum(K), "max_imag": K.max_imag}


def cmd_complete_scan(a, cfg):
    from .complete_sums import DEFAULT_BUDGET, scan_prop52
    from .kloosterman import build_table
    rep = scan_prop52(build_table(a.q), a.B, a.h, budget=a.budget or DEFAULT_BUDGET)
    return rep.to_json()


def cmd_conjecture_scan(a, cfg):
    from .correlation import scan_conjecture
    from .kloosterman import build_table
    rep = scan_conjecture(build_table(a.q), a.B, budget=a.budget or 10 ** 9)
    out = rep.to_json()
    out["argmax"] = {"b": list(rep.argmax[0]), "mu": list(rep.argmax[1])}
    return out


def cmd_bilinear(a, cfg):
    from .bilinear import ratio_experiment
    bounds = [b for b in a.bounds.split(",") if b]
    reps = ratio_experiment(a.q, a.alpha, a.beta, a.M, a.N, bounds, a=a.a)
    return {"q": a.q, "M": a.M, "N": a.N, "alpha": a.alpha, "beta": a.beta,
            "lhs_abs": reps[0].lhs_abs if reps else None, "bounds": [r.to_json() for r in reps]}


def cmd_ortho(a, cfg):
    from .dirichlet import orthogonality_check
    from .ffq import as_modulus
    as_modulus(a.q)
    sigmas = [a.sigma] if a.sigma else [1, -1]
    worst, count = 0.0, 0
    for s in sigmas:
        for m in range(1, a.n_max + 1):
            for n in range(1, a.n_max + 1):
                if (m * n) % a.q:
                    lhs, rhs = orthogonality_check(a.q, s, m, n, tol=a.tol)
                    worst = max(worst, abs(lhs - rhs))
                    count += 1
    return {"q": a.q, "sigma": sigmas, "n_max": a.n_max, "pairs": count, "max_err": worst, "tol": a.tol}


def cmd_m4(a, cfg):
    from .dirichlet import m4
    v = m4(a.q)
    lead = math.log(a.q) ** 4 / (2 * math.pi ** 2)
    return {"q": a.q, "M4": v, "leading": lead, "ratio_to_leading": v / lead}


def cmd_decomp_check(a, cfg):
    from .dirichlet import moment_decomposition_check
    sigmas = [a.sigma] if a.sigma else [1, -1]
    rows = [moment_decomposition_check(a.q, s, a.cutoff).to_json() for s in sigmas]
    bad = [r for r in rows if r["diff"] > max(a.tol, 0.0)]
    report = {"q": a.q, "cutoff_X": a.cutoff, "results": rows, "tol": a.tol}
    if bad:
        raise CheckFailed(f"decomposition mismatch above {a.tol}", report)
    return report


def cmd_voronoi(a, cfg):
    from .modforms import voronoi_check
    r = voronoi_check(a.f, a.a, a.c, a.X)
    report = {"f": a.f, "a": a.a, "c": a.c, "X": a.X, "lhs": r.lhs, "rhs": r.rhs, "diff": r.diff,
              "main_term": r.main_term, "dual_terms": r.dual_terms, "tol": a.tol}
    if r.diff > a.tol:
        raise CheckFailed(f"Voronoi sides differ by {r.diff:.3e}", report)
    return report


def cmd_tau(a, cfg):
    from .modforms import deligne_bound_violations, divisor_counts, tau_table
    if a.n < 1:
        raise UsageError("--n must be >= 1")
    T = tau_table(a.n)
    t = T[a.n]
    d = int(divisor_counts(a.n)[a.n])
    report = {"n": a.n, "tau": str(t), "deligne_ratio": abs(t) / (d * a.n ** 5.5)}
    if a.check:
        bad = deligne_bound_violations(T, a.n)
        report["deligne_violations"] = bad[:20]
        if bad:
            raise CheckFailed("Deligne bound violated", report)
    return report


def cmd_mixed_moment(a, cfg):
    from .modforms import mixed_moment
    return mixed_moment(a.q, a.cutoff).to_json()


def cmd_optimize(a, cfg):
    from .exponent_opt import maximize, parse_program, verdict, verify_certificate
    name, text = _resolve_program(a.program)
    try:
        p = parse_program(text)
    except ParseError as e:
        raise UsageError(f"{name}: {e}") from None
    r = maximize(p)
    report = {"program": name, **r.to_json(), "certificate": verify_certificate(p, r)}
    v = verdict(text, r)
    if v is not None:
        report["verdict"] = v
    if a.expect is not None and r.value != a.expect:
        raise CheckFailed(f"optimum {r.value} != expected {a.expect}", report)
    if not report["certificate"]:
        raise CheckFailed("certificate did not verify", report)
    return report


def cmd_oracle_freeze(a, cfg):
    scope = [s for s in a.scope.split(",") if s] if a.scope else None
    out = golden.freeze(scope, a.golden, build=build_id())
    return {"golden_path": str(golden.golden_path(a.golden)), **out}


def cmd_suite(a, cfg):
    from . import suite
    res = suite.run(a.level, a.golden, echo=lambda s: print(s, file=sys.stderr))
    report = {"level": a.level, "passed": all(r.passed for r in res), "criteria": [r.to_json() for r in res]}
    if not report["passed"]:
        failed = ", ".join(str(r.number) for r in res if not r.passed)
        raise CheckFailed(f"criteria failed: {failed}", report)
    return report


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="expsum", description="Kloosterman-sum and L-function moment workbench.")
    top.add_argument("--version", action="version", version=f"expsum {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--out", help="also write the JSON report here")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads (recorded; computations run on the deterministic path)")
    common.add_argument("--budget", type=int, help="work budget for scans")
    common.add_argument("--golden", help="golden-values file (default: $EXPSUM_GOLDEN or the shipped file)")
    common.add_argument("--config", help="key = value file; flags on the command line win")
    sub = top.add_subparsers(dest="subcommand", parser_class=_Parser, metavar="SUBCOMMAND")

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("kloosterman", cmd_kloosterman, "normalized Kloosterman table, Weil and Parseval checks")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--dump", help="CSV of a,kl rows")

    p = add("complete-scan", cmd_complete_scan, "fourfold complete sums over an off-diagonal family")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--B", type=int, default=2)
    p.add_argument("--h", type=_ints, default=[0, 1, 50], help="comma-separated shifts")

    p = add("conjecture-scan", cmd_conjecture_scan, "correlation sums over generic quadruples")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--B", type=int, default=2)

    p = add("bilinear", cmd_bilinear, "Kloosterman bilinear form against bound shapes")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--alpha", default="ones")
    p.add_argument("--beta", default="ones")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--bounds", default="trivial")

    p = add("ortho", cmd_ortho, "orthogonality of even or odd characters")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--sigma", type=_sigma)
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("m4", cmd_m4, "fourth moment of central values")
    p.add_argument("--q", type=int, required=True)

    p = add("decomp-check", cmd_decomp_check, "character side vs congruence side of the moment")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--sigma", type=_sigma)
    p.add_argument("--cutoff", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-3)

    p = add("voronoi", cmd_voronoi, "both sides of the Voronoi formula")
    p.add_argument("--f", choices=["divisor", "tau"], default="divisor")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)

    p = add("tau", cmd_tau, "Ramanujan tau(n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--check", action="store_true", help="check the Deligne bound up to n")

    p = add("mixed-moment", cmd_mixed_moment, "first moment of L(Delta x chi) L(E x chi)-bar")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--cutoff", type=float, default=100.0)

    p = add("optimize", cmd_optimize, "exact maximum of a piecewise-linear program")
    p.add_argument("--program", required=True, help="a .plp file or a shipped program name")
    p.add_argument("--expect", type=_rat)

    p = add("oracle-freeze", cmd_oracle_freeze, "run the oracles and rewrite the golden file")
    p.add_argument("--scope", help=f"comma-separated subset of {', '.join(golden.ORACLES)}")

    p = add("suite", cmd_suite, "acceptance checks")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    return top


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Feed key = value defaults from --config into the chosen subparser."""
    if "--config" not in argv and not any(x.startswith("--config=") for x in argv):
        return
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    cfg = read_config_file(known.config)
    name = next((x for x in argv if not x.startswith("-")), None)
    subs = next(act for act in parser._actions if isinstance(act, argparse._SubParsersAction))
    sp = subs.choices.get(name)
    if sp is None:
        return
    for act in sp._actions:
        if act.dest in cfg:
            raw = cfg.pop(act.dest)
            act.default = act.type(raw) if act.type else raw
            act.required = False
    if cfg:
        raise UsageError(f"unknown config keys: {', '.join(sorted(cfg))}")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-1/68" as an option; "--expect=-1/68" is unambiguous
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--expect" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--expect={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if not getattr(args, "fn", None):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        g = golden.load(args.golden)
        params = {k: v for k, v in vars(args).items()
                  if k not in ("fn", "subcommand", "out", "threads", "budget", "golden", "config")}
        tol = {k: v for k, v in params.items() if k.startswith("tol")}
        cfg = RunConfig(args.subcommand, params, args.threads, args.budget, args.out,
                        str(golden.golden_path(args.golden)), int(g.get("version", 0)), tol)
        emit(args.fn(args, cfg), cfg)
        return EXIT_OK
    except UsageError as e:
        print(f"expsum: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailed as e:
        if e.report is not None:
            emit(e.report, cfg)
        print(f"expsum: check failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (BoundViolation, IdentityViolation, AssertionError) as e:
        print(f"expsum: check failed: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    except (ExpsumError, KeyError, ValueError, OSError) as e:
        print(f"expsum: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
