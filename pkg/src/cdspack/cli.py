"""Batch front door: gen / spectrum / pack / verify subcommands.

Every run emits a single JSON report (stdout, or --report FILE) whose keys
are deterministic for a fixed config and seed; wall-clock timings live under
the separate "timings" key so reports stay diffable. Exit codes are mapped
per error class, see EXIT_CODES.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from math import ceil

from . import coloring, connector, generators, params as params_mod, spectral, verifier
from .errors import (BudgetExceeded, CdsPackError, EigenConvergenceError,
                     EmbeddingFailed, GenerationError, GraphFormatError,
                     InfeasibleParameters, NoCrossEdge, NonRegularGraph,
                     PostconditionViolation, ResampleBudgetExhausted,
                     VerificationFailed)
from .graph import load_graph, save_graph

EXIT_CODES = {
    "ok": 0,
    "error": 1,
    "usage": 2,
    "input": 3,            # GraphFormatError, bad files
    "infeasible": 4,       # InfeasibleParameters
    "resample": 5,         # ResampleBudgetExhausted
    "postcondition": 6,    # PostconditionViolation
    "connect": 7,          # EmbeddingFailed / NoCrossEdge / BudgetExceeded
    "verification": 8,     # VerificationFailed or target unmet
    "spectral": 9,         # NonRegularGraph / EigenConvergenceError
}

_ERROR_CODE = {
    GraphFormatError: "input",
    GenerationError: "input",
    InfeasibleParameters: "infeasible",
    ResampleBudgetExhausted: "resample",
    PostconditionViolation: "postcondition",
    EmbeddingFailed: "connect",
    NoCrossEdge: "connect",
    BudgetExceeded: "connect",
    VerificationFailed: "verification",
    NonRegularGraph: "spectral",
    EigenConvergenceError: "spectral",
}

COLORING_RESTARTS = 3


def _code_for(exc: Exception) -> int:
    for cls, name in _ERROR_CODE.items():
        if isinstance(exc, cls):
            return EXIT_CODES[name]
    return EXIT_CODES["error"]


def _emit(report: dict, path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _load_or_generate(args) -> tuple:
    if args.input:
        return load_graph(args.input), {"input": args.input}
    if args.n is None or args.d is None:
        raise GraphFormatError("either --input or both --n and --d are required")
    g = generators.random_regular(args.n, args.d, args.seed)
    return g, {"kind": "regular", "n": args.n, "d": args.d}


def run_gen(args) -> int:
    spec = generators.GenSpec(kind=args.kind, n=args.n or 0, d=args.d or 0,
                              p=args.p or 0.0, k=args.k or 0, seed=args.seed)
    report: dict = {"config": {"kind": args.kind, "n": args.n, "d": args.d,
                               "p": args.p, "k": args.k, "out": args.out},
                    "seed": args.seed, "timings": {}}
    t0 = time.perf_counter()
    try:
        g = generators.generate(spec)
        save_graph(g, args.out)
    except (ValueError, CdsPackError) as exc:
        report["error"] = {"phase": "generate", "type": type(exc).__name__,
                           "message": str(exc)}
        _emit(report, args.report)
        return _code_for(exc) if isinstance(exc, CdsPackError) else EXIT_CODES["usage"]
    report["timings"]["generate"] = time.perf_counter() - t0
    report["graph"] = {"n": g.n, "m": g.m}
    _emit(report, args.report)
    return 0


def run_spectrum(args) -> int:
    report: dict = {"config": {"input": args.input, "tol": args.tol}, "timings": {}}
    try:
        g = load_graph(args.input)
        t0 = time.perf_counter()
        profile = spectral.extremal_eigenvalues(g, tol=args.tol)
        report["timings"]["spectral"] = time.perf_counter() - t0
    except CdsPackError as exc:
        report["error"] = {"phase": "spectral", "type": type(exc).__name__,
                           "message": str(exc)}
        _emit(report, args.report)
        return _code_for(exc)
    report["spectral"] = profile.to_json()
    _emit(report, args.report)
    return 0


def _pack_once(args, seed: int) -> tuple[dict, int]:
    report: dict = {"seed": seed, "timings": {}}
    timings = report["timings"]

    def fail(phase: str, exc: Exception) -> tuple[dict, int]:
        report["error"] = {"phase": phase, "type": type(exc).__name__,
                           "message": str(exc)}
        return report, _code_for(exc)

    try:
        t0 = time.perf_counter()
        g, ginfo = _load_or_generate(args)
        timings["generate"] = time.perf_counter() - t0
        report["graph"] = {"n": g.n, "m": g.m, **ginfo}
    except (CdsPackError, OSError) as exc:
        return fail("generate", exc)

    try:
        t0 = time.perf_counter()
        profile = spectral.extremal_eigenvalues(g, tol=args.tol)
        timings["spectral"] = time.perf_counter() - t0
        report["spectral"] = profile.to_json()
    except CdsPackError as exc:
        return fail("spectral", exc)

    try:
        lam = spectral.lambda_with_margin(profile)
        d = g.regular_degree()
        overrides = {}
        if args.override_m is not None:
            overrides["m"] = args.override_m
        if args.override_d is not None:
            overrides["D"] = args.override_d
        if args.mode == "practice":
            overrides = _practice_defaults(g.n, d, lam, args.epsilon, overrides)
        pars = params_mod.derive_params(g.n, d, lam, args.epsilon,
                                        mode=args.mode, overrides=overrides)
        report["params"] = pars.to_json()
    except (CdsPackError, ValueError) as exc:
        return fail("params", exc)

    try:
        t0 = time.perf_counter()
        family = None
        for attempt in range(COLORING_RESTARTS):
            try:
                a1 = coloring.stage_one(g, pars, seed + attempt)
                a2 = coloring.stage_two(g, a1, pars, seed + attempt)
                family = coloring.build_family(g, a2, pars)
                report["coloring_attempts"] = attempt + 1
                break
            except ResampleBudgetExhausted:
                if attempt == COLORING_RESTARTS - 1:
                    raise
        timings["coloring"] = time.perf_counter() - t0
        report["family"] = {
            "reservoir_size": len(family.reservoir),
            "set_count": len(family.sets),
            "set_sizes": [len(s) for s in family.sets],
            "component_counts": list(family.component_counts),
        }
    except CdsPackError as exc:
        return fail("coloring", exc)

    try:
        t0 = time.perf_counter()
        max_sets = args.max_sets
        if max_sets is None:
            max_sets = _auto_cap(pars, len(family.reservoir))
        packing = connector.connect_family(g, family, pars, seed,
                                           max_sets=max_sets,
                                           on_set_failure="skip")
        timings["connect"] = time.perf_counter() - t0
        report["packing"] = packing.to_json()
        report["connect"] = dict(packing.meta)
    except CdsPackError as exc:
        return fail("connect", exc)

    t0 = time.perf_counter()
    vreport = verifier.verify_packing(g, packing, target=args.target)
    timings["verify"] = time.perf_counter() - t0
    report["verification"] = vreport.to_json()
    if args.packing_out:
        with open(args.packing_out, "w", encoding="utf-8") as fh:
            json.dump(packing.to_json(), fh, sort_keys=True, indent=2)
    ok = not vreport.failures and (vreport.target_met is not False)
    return report, 0 if ok else EXIT_CODES["verification"]


def _practice_defaults(n: int, d: int, lam: float, epsilon: float,
                       overrides: dict) -> dict:
    """Fill in desk-scale m/D overrides when the derived values are unusable."""
    out = dict(overrides)
    if "D" not in out:
        derived_d = int(epsilon ** 4 * d / (36 * lam))
        if derived_d < 6:  # tree arity needs D >= 6
            out["D"] = 8
    if "m" not in out:
        cap_d = out.get("D", max(6, int(epsilon ** 4 * d / (36 * lam))))
        derived_m = ceil(lam * n / d) + 1
        if n - derived_m * (2 * cap_d + 3) <= n // 2:
            out["m"] = 2
    return out


def _auto_cap(pars, reservoir_size: int) -> int:
    """Budget-aware default for how many sets to connect.

    Each set is expected to spend roughly 2.5 reservoir vertices per merge
    over ceil(n/2d) - 1 merges; keep utilization around 60%.
    """
    merges = max(1, ceil(pars.n / (2 * pars.d)) - 1)
    est = 2.5 * merges
    return max(1, min(pars.d_star, int(0.6 * reservoir_size / est)))


def run_pack(args) -> int:
    if args.trials <= 1:
        report, code = _pack_once(args, args.seed)
        config = _config_echo(args)
        report = {"config": config, **report}
        _emit(report, args.report)
        return code

    seeds = [args.seed + i for i in range(args.trials)]
    with ThreadPoolExecutor(max_workers=min(args.trials, 4)) as pool:
        results = list(pool.map(lambda s: _pack_once(args, s), seeds))
    report = {"config": _config_echo(args),
              "trials": [r for r, _ in results]}
    _emit(report, args.report)
    return 0 if all(code == 0 for _, code in results) else \
        max(code for _, code in results)


def _config_echo(args) -> dict:
    return {
        "input": args.input, "n": args.n, "d": args.d,
        "epsilon": args.epsilon, "mode": args.mode, "seed": args.seed,
        "target": args.target, "max_sets": args.max_sets,
        "override_m": args.override_m, "override_d": args.override_d,
        "trials": args.trials, "tol": args.tol,
    }


def run_verify(args) -> int:
    report: dict = {"config": {"input": args.input, "packing": args.packing,
                               "target": args.target}, "timings": {}}
    try:
        g = load_graph(args.input)
        with open(args.packing, "r", encoding="utf-8") as fh:
            packing = connector.CdsPacking.from_json(json.load(fh))
    except (CdsPackError, OSError, KeyError, json.JSONDecodeError) as exc:
        report["error"] = {"phase": "load", "type": type(exc).__name__,
                           "message": str(exc)}
        _emit(report, args.report)
        return EXIT_CODES["input"]
    t0 = time.perf_counter()
    vreport = verifier.verify_packing(g, packing, target=args.target)
    report["timings"]["verify"] = time.perf_counter() - t0
    report["verification"] = vreport.to_json()
    _emit(report, args.report)
    ok = not vreport.failures and (vreport.target_met is not False)
    return 0 if ok else EXIT_CODES["verification"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdspack",
        description="Construct and verify packings of disjoint connected dominating sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph and write its edge list")
    g.add_argument("--kind", required=True,
                   choices=["regular", "binomial", "glued_cliques", "complete",
                            "cycle", "petersen"])
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--report")

    s = sub.add_parser("spectrum", help="measure extremal adjacency eigenvalues")
    s.add_argument("--input", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--report")

    p = sub.add_parser("pack", help="run the full packing pipeline")
    p.add_argument("--input")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--epsilon", type=float, default=0.3)
    p.add_argument("--mode", choices=["theory", "practice"], default="practice")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=int, default=1)
    p.add_argument("--max-sets", type=int, dest="max_sets")
    p.add_argument("--override-m", type=int, dest="override_m")
    p.add_argument("--override-D", "--override-d", type=int, dest="override_d")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--report")
    p.add_argument("--packing-out", dest="packing_out")

    v = sub.add_parser("verify", help="verify a packing JSON against a graph")
    v.add_argument("--input", required=True)
    v.add_argument("--packing", required=True)
    v.add_argument("--target", type=int)
    v.add_argument("--report")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return run_gen(args)
        if args.command == "spectrum":
            return run_spectrum(args)
        if args.command == "pack":
            return run_pack(args)
        if args.command == "verify":
            return run_verify(args)
    except CdsPackError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__,
                                    "message": str(exc)}}, sort_keys=True))
        return _code_for(exc)
    return EXIT_CODES["usage"]


if __name__ == "__main__":
    sys.exit(main())
