"""Command-line entry point: ``ffcircle <command> --config exp.toml``."""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import gate as gt
from .circle import arc_sums, circle_setup, degree_table, fourier_sweep
from .config import ExperimentConfig, load
from .counting import brute_force_count, count_slope
from .curve import arithmetic_genus
from .cyclotomic import CycInt
from .errors import BudgetExceeded, FFCircleError, IdentityViolation, NoWitness, ValidationError
from .grid import GridPoint, acceptance_grid, run_point
from .linalg import lex_vectors
from .report import ExperimentReport, emit
from .singular import katz_bound_check, sing_dim

COMMANDS = ("count", "fourier", "arcs", "singdim", "modulidim", "gate", "witness", "grid")

EXIT_OK, EXIT_ERROR, EXIT_VALIDATION, EXIT_BUDGET, EXIT_IDENTITY = 0, 1, 2, 3, 4


def _need_experiment(cfg: ExperimentConfig) -> None:
    if not cfg.has_experiment:
        raise ValidationError("this command needs [field], [bundle] and [equation] tables")


def _params(cfg: ExperimentConfig) -> dict:
    return {
        "p": cfg.field.p, "k": cfg.field.k, "q": cfg.field.q,
        "components": cfg.curve.n_components, "nodes": len(cfg.curve.nodes),
        "g": arithmetic_genus(cfg.curve), "degrees": list(cfg.bundle.degrees), "e": cfg.bundle.degree,
        "b": cfg.divisor.degree if cfg.divisor else 0,
        "d": cfg.equation.d, "n": cfg.equation.n, "equation": cfg.equation.kind,
    }


def _counts(cfg, budget, workers):
    return [brute_force_count(cfg.curve, cfg.bundle, cfg.divisor, cfg.jets, cfg.equation, k, budget, workers)
            for k in range(1, cfg.extensions + 1)]


def cmd_count(cfg, args) -> ExperimentReport:
    _need_experiment(cfg)
    counts = _counts(cfg, args.budget, args.workers)
    table = [{"k": c.k, "count": c.count, "main_exponent": c.k * c.exponent, "ratio": c.ratio} for c in counts]
    summary = {"count": counts[0].count}
    if len(counts) >= 2 and all(c.count > 0 for c in counts):
        s = count_slope(counts)
        summary.update({"dim_estimate": s.dim_estimate, "pair_dims": list(s.pair_dims), "flagged": s.flagged,
                        "leading_coeff": s.leading_coeff, "irreducible_hint": s.irreducible_hint})
    return ExperimentReport("count", _params(cfg), summary, table)


def _setup(cfg):
    return circle_setup(cfg.curve, cfg.bundle, cfg.divisor, cfg.jets, cfg.equation)


def _cyc(v: CycInt) -> list[int]:
    return list(v.coeffs)


def cmd_fourier(cfg, args) -> ExperimentReport:
    _need_experiment(cfg)
    setup = _setup(cfg)
    direct = brute_force_count(cfg.curve, cfg.bundle, cfg.divisor, cfg.jets, cfg.equation, 1, args.budget,
                               args.workers)
    sweep = fourier_sweep(setup, cfg.twist, args.budget, args.workers)
    summary = {"count": direct.count, "fourier": sweep.count, "twist": cfg.twist, "dual_size": setup.dual_size,
               "zero_term": sweep.zero_term, "total": _cyc(sweep.total), "notes": sweep.notes}
    table = []
    if args.verbose:
        coords = lex_vectors(setup.W.dim, setup.q)
        for i, row in enumerate(sweep.products):
            table.append({"alpha": coords[i].tolist(),
                          "product": _cyc(CycInt.from_exponents(setup.field.p, [int(x) for x in row]))})
    return ExperimentReport("fourier", _params(cfg), summary, table)


def cmd_arcs(cfg, args) -> ExperimentReport:
    _need_experiment(cfg)
    setup = _setup(cfg)
    sweep = fourier_sweep(setup, cfg.twist, args.budget, args.workers)
    deg = degree_table(setup, budget=args.budget)
    arcs = arc_sums(sweep, deg)
    thr = setup.e - setup.b - 2 * setup.g + 1
    table = []
    for m in range(int(deg.max()) + 1):
        mask = deg == m
        if not mask.any():
            continue
        table.append({"degree": m, "functionals": int(mask.sum()), "class": "major" if m <= thr else "minor"})
    summary = {
        "count": sweep.count, "threshold": thr, "major_functionals": arcs.major_count,
        "minor_functionals": arcs.minor_count, "normalized_major": arcs.normalized_major,
        "normalized_minor_abs": arcs.normalized_minor_abs, "major_sum": _cyc(arcs.major),
        "minor_sum": _cyc(arcs.minor), "max_degree": int(deg.max()),
        "degree_bound": (setup.d * setup.e - setup.b) / 2 + 1,
    }
    if setup.curve.nodes:
        summary["notes"] = ["divisors for deg alpha are restricted to the smooth locus"]
    if args.verbose:
        res = degree_table(setup, method="residue", budget=args.budget)
        summary["residue_agrees"] = bool((res == deg).all())
    return ExperimentReport("arcs", _params(cfg), summary, table)


def cmd_singdim(cfg, args) -> ExperimentReport:
    _need_experiment(cfg)
    setup = _setup(cfg)
    K = max(cfg.extensions, 2)
    total = setup.dual_size
    if cfg.sample and cfg.sample < total:
        rng = np.random.default_rng(cfg.seed)
        picks = np.sort(rng.choice(total, size=cfg.sample, replace=False))
    else:
        picks = np.arange(total)
    table = []
    for idx in picks:
        coords = lex_vectors(setup.W.dim, setup.q, int(idx), int(idx) + 1)[0]
        alpha = setup.functional(coords)
        prof = sing_dim(setup, alpha, K, args.budget)
        kz = katz_bound_check(setup, alpha, prof)
        table.append({"alpha": coords.tolist(), "counts": list(prof.counts), "dim": prof.dim_estimate,
                      "flagged": prof.flagged, "slack": kz.slack, "holds": kz.holds})
    slacks = [r["slack"] for r in table]
    summary = {"functionals": len(table), "all_hold": all(r["holds"] for r in table),
               "min_slack": min(slacks, default=0.0), "max_slack": max(slacks, default=0.0),
               "flagged": sum(r["flagged"] for r in table)}
    return ExperimentReport("singdim", _params(cfg), summary, table if args.verbose else [])


def cmd_modulidim(cfg, args) -> ExperimentReport:
    sec = cfg.sections.get("moduli")
    summary = {}
    table = []
    if cfg.has_experiment:
        if cfg.extensions < 2:
            raise ValidationError("modulidim needs run.extensions >= 2")
        counts = _counts(cfg, args.budget, args.workers)
        P = _params(cfg)
        n, d, e, g, b = P["n"], P["d"], P["e"], P["g"], P["b"]
        table = [{"k": c.k, "count": c.count} for c in counts]
        summary.update({"expected_section_dim": gt.expected_section_dim(n, d, e, g) - b * n,
                        "expected_affine_exponent": gt.expected_affine_exponent(n, d, e, g, b),
                        "expected_moduli_dim": gt.expected_moduli_dim(n, d, e, g)})
        if all(c.count > 0 for c in counts):
            s = count_slope(counts)
            summary.update({"dim_estimate": s.dim_estimate, "pair_dims": list(s.pair_dims),
                            "flagged": s.flagged, "irreducible_hint": s.irreducible_hint})
    if sec:
        n, d, e, g = (int(sec[x]) for x in ("n", "d", "e", "g"))
        summary["formula"] = {"n": n, "d": d, "e": e, "g": g,
                              "expected_moduli_dim": gt.expected_moduli_dim(n, d, e, g),
                              "expected_affine_exponent": gt.expected_affine_exponent(n, d, e, g, 0)}
    if not summary:
        raise ValidationError("modulidim needs an experiment or a [moduli] table")
    return ExperimentReport("modulidim", _params(cfg) if cfg.has_experiment else {}, summary, table)


def cmd_gate(cfg, args) -> ExperimentReport:
    sec = cfg.sections.get("gate")
    if not sec:
        raise ValidationError("gate needs a [gate] table with d, n, e, b, g, p")
    try:
        d, n, e, b, g, p = (int(sec[x]) for x in ("d", "n", "e", "b", "g", "p"))
    except KeyError as exc:
        raise ValidationError(f"[gate] is missing {exc}") from exc
    verdict = gt.gate_thm31(d, n, e, b, g, p)
    summary = {"overall": verdict.overall, "thresholds": gt.thresholds(d),
               "checks": verdict.as_dict()["checks"]}
    if d >= 3 and p > 0:
        summary["gamma_margin"] = gt.gamma_margin(d, p)
        if e - b > 0:
            try:
                summary["n_bound"] = gt.nbound_claim(d, e - b, g, p).as_dict()
            except FFCircleError as exc:
                summary["n_bound"] = str(exc)
    return ExperimentReport("gate", dict(sec), summary, [])


def _as_list(x):
    return list(x) if isinstance(x, list) else [x]


def cmd_witness(cfg, args) -> ExperimentReport:
    sec = cfg.sections.get("witness")
    if not sec:
        raise ValidationError("witness needs a [witness] table with d, e, g_C (and optionally p)")
    table = []
    for d in _as_list(sec["d"]):
        p = int(sec["p"]) if "p" in sec else gt.minimal_admissible_prime(int(d))
        for e in _as_list(sec["e"]):
            for g in _as_list(sec["g_C"]):
                row = {"d": d, "e": e, "g_C": g, "p": p}
                try:
                    w = gt.find_witness(int(d), int(e), int(g), p)
                    ok = gt.verify_witness(w).overall
                    row.update(w.as_dict())
                    row["verified"] = ok
                except NoWitness as exc:
                    row.update({"verified": False, "failure": exc.constraint})
                table.append(row)
    summary = {"witnesses": len(table), "all_verified": all(r["verified"] for r in table),
               "all_margins_positive": all(r.get("margin", 0) > 0 for r in table)}
    return ExperimentReport("witness", dict(sec), summary, table)


def _grid_job(args):
    pt, budget = args
    return run_point(pt, with_degrees=True, budget=budget)


def cmd_grid(cfg, args) -> ExperimentReport:
    sec = cfg.sections.get("grid", {})
    kw = {}
    if "fields" in sec:
        kw["qs"] = tuple(tuple(f) for f in sec["fields"])
    for key, name in (("d", "ds"), ("n", "ns"), ("e", "es"), ("b", "bs"), ("curves", "curves")):
        if key in sec:
            kw[name] = tuple(sec[key])
    points = acceptance_grid(**kw)
    jobs = [(pt, args.budget) for pt in points]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as ex:
            rows = list(ex.map(_grid_job, jobs))
    else:
        rows = [_grid_job(j) for j in jobs]
    summary = {"configurations": len(rows),
               "all_equal": all(r["count"] == r["fourier"] for r in rows),
               "zero_terms_exact": all(r["zero_term"] == r["expected_zero_term"] for r in rows),
               "degree_bound_holds": all(r["max_degree"] <= r["degree_bound"] for r in rows)}
    return ExperimentReport("grid", dict(sec), summary, rows)


HANDLERS = {
    "count": cmd_count, "fourier": cmd_fourier, "arcs": cmd_arcs, "singdim": cmd_singdim,
    "modulidim": cmd_modulidim, "gate": cmd_gate, "witness": cmd_witness, "grid": cmd_grid,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffcircle", description="Exact section counts and circle-method checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="TOML experiment file")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--budget", type=int, default=None, help="ceiling on enumerated evaluations")
        sp.add_argument("--verbose", action="store_true", help="include per-functional rows")
        sp.add_argument("--timings", action="store_true", help="add wall-clock seconds to the summary")
    return ap


def run(command: str, cfg: ExperimentConfig, args) -> ExperimentReport:
    start = time.perf_counter()
    report = HANDLERS[command](cfg, args)
    if getattr(args, "timings", False):
        report.summary["wall_seconds"] = time.perf_counter() - start
    return report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config)
        if args.workers is None:
            args.workers = cfg.workers
        if args.budget is None:
            args.budget = cfg.budget
        if args.workers < 1:
            raise ValidationError("--workers must be >= 1")
        report = run(args.command, cfg, args)
        data = emit(report, args.format)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except IdentityViolation as exc:
        print(f"identity violation: {exc}", file=sys.stderr)
        return EXIT_IDENTITY
    except FFCircleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
