"""Frozen empirical constants and the oracle runs that produce them.

The file is only rewritten by `freeze`, which bumps the version.  Each
constant carries the oracle that produced it and the moduli it saw.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
import os
from importlib import resources
from pathlib import Path

ENV_VAR = "EXPSUM_GOLDEN"


def default_path() -> Path:
    return Path(str(resources.files("expsum.data").joinpath("golden.json")))


def golden_path(path=None) -> Path:
    if path:
        return Path(path)
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else default_path()


def load(path=None) -> dict:
    p = golden_path(path)
    if not p.exists():
        return {"version": 0, "constants": {}}
    with open(p) as fh:
        return json.load(fh)


def constant(name: str, path=None) -> float:
    g = load(path)
    try:
        return g["constants"][name]["value"]
    except KeyError:
        raise KeyError(f"golden constant {name!r} missing from {golden_path(path)}; run `expsum oracle-freeze`") from None


# ---------------------------------------------------------------- oracles

def _r1():
    from .complete_sums import scan_prop52
    from .kloosterman import build_table
    rep = scan_prop52(build_table(101), 2, [0, 1, 50])
    return rep.max_ratio, {"oracle": "scan_prop52", "q": [101], "B": 2, "h": [0, 1, 50],
                           "argmax": rep.to_json()["argmax"]}


def _c2():
    from .correlation import scan_conjecture
    from .kloosterman import build_table
    rep = scan_conjecture(build_table(101), 2)
    return rep.max_ratio, {"oracle": "scan_conjecture", "q": [101], "B": 2, "mu": "all pairs",
                           "max_ratio_mu_nonzero": rep.extra["max_ratio_mu_nonzero"]}


def _c3():
    from .bilinear import dual_path, coefficients, ratio_experiment
    from .kloosterman import build_table
    rep = ratio_experiment(997, "ones", "ones", 31, 31, ["typeII"])[0]
    _, _, rel = dual_path(build_table(997), 1, coefficients("ones", 31), coefficients("ones", 31))
    return rep.ratio, {"oracle": "bilinear direct and convolution paths", "q": [997], "M": 31, "N": 31,
                       "alpha": "ones", "beta": "ones", "dual_path_rel": rel}


def _c4():
    from .bilinear import shifted_error_ratio
    vals = {s: shifted_error_ratio("tau", "divisor", 64, 64, 101, s).ratio for s in (1, -1)}
    return max(vals.values()), {"oracle": "congruence_bilinear (residue classes, checked by brute force)",
                                "q": [101], "M": 64, "N": 64, "f": "tau", "g": "divisor",
                                "by_sign": {str(k): v for k, v in vals.items()}}


C5_LADDER = (31, 61, 101, 211, 401)


def _c5():
    from .dirichlet import diagonal_direct_sum, diagonal_main_term
    worst, table = 0.0, {}
    for q in C5_LADDER:
        for sigma in (1, -1):
            d = abs(diagonal_main_term("E", "E", sigma, q) - diagonal_direct_sum(q, sigma))
            scaled = d * math.sqrt(q) / math.log(q) ** 4
            table[f"{q},{sigma:+d}"] = scaled
            worst = max(worst, scaled)
    return worst, {"oracle": "diagonal_direct_sum vs residue", "q": list(C5_LADDER), "scaled_diffs": table}


def _m4_101():
    from .dirichlet import m4
    v = m4(101)
    return v, {"oracle": "central_values via Hurwitz zeta", "q": [101],
               "ratio_to_leading": v / (math.log(101) ** 4 / (2 * math.pi ** 2))}


def _mixed_31():
    from .modforms import mixed_moment
    r = mixed_moment(31)
    v = complex(r.value)
    return v.real, {"oracle": "mixed_moment residue-class sums", "q": [31], "cutoff_X": 100.0,
                    "main_term": r.main_term, "imag_part": v.imag}


ORACLES = {
    "R1": _r1,
    "C2": _c2,
    "C3": _c3,
    "C4": _c4,
    "C5": _c5,
    "M4_101": _m4_101,
    "mixed_moment_31": _mixed_31,
}


def freeze(scope=None, path=None, build: str | None = None) -> dict:
    """Run the oracles named in scope (all by default) and rewrite the golden file."""
    names = list(ORACLES) if not scope else list(scope)
    unknown = [n for n in names if n not in ORACLES]
    if unknown:
        raise ValueError(f"unknown golden constant(s): {', '.join(unknown)}")
    g = load(path)
    consts = dict(g.get("constants", {}))
    today = _dt.date.today().isoformat()
    for n in names:
        value, prov = ORACLES[n]()
        prov["date"] = today
        if build:
            prov["build"] = build
        consts[n] = {"value": float(value), "provenance": prov}
    out = {"version": int(g.get("version", 0)) + 1, "constants": consts}
    p = golden_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
