"""Command-line front end.

Loads a model spec from a flat JSON config, dispatches to the computation
modules, and writes deterministic artifacts (report.json, CSV tables and a
text summary) into the output directory.

Exit codes: 0 success, 1 runtime error, 2 inadmissible spec (a report is
still written), 64 unreadable or unparseable config, 73 unwritable output
directory.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import balance, barrier, grid, liouville, radial
from .errors import DeadcoreError, InvalidInput
from .model import (
    HamiltonianKind,
    ModelSpec,
    NonlinearityKind,
    spec_from_json,
    spec_to_json,
    validate_admissible,
)
from .report import emit_report

VERBS = ("admit", "balance", "barrier", "radial", "grid", "liouville", "counterexample", "table1")

_VERB_HELP = {
    "admit": "check the structural admissibility constraints and report every violation",
    "balance": "compute the balanced exponents (p, tau), profile selection and thickness T",
    "barrier": "construct the radial barrier and verify it pointwise against the radial equation",
    "radial": "integrate the radial equation, shoot for the thickness and compare to the closed form",
    "grid": "solve the 2-D disc problem with the monotone ring scheme and run invariance checks",
    "liouville": "evaluate the growth threshold, classify scaled witnesses, and check the plateau-fraction law",
    "counterexample": "evaluate the bounded supersolution residuals and the oscillation ladder for the exponential model",
    "table1": "tabulate admissibility and barrier constants over a parameter grid",
}

_SPEC_KEYS = ("beta", "m", "q", "gamma", "alpha", "lambda", "c", "d", "hamiltonian", "nonlinearity")


@dataclass
class Command:
    verb: str
    spec_path: str
    output_dir: str
    overrides: list[str] = field(default_factory=list)


def _parse_value(raw: str):
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _split_overrides(overrides: list[str]) -> tuple[dict, dict]:
    spec_over: dict = {}
    options: dict = {}
    for item in overrides:
        if "=" not in item:
            raise InvalidInput(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        if "," in raw:
            value = [_parse_value(part.strip()) for part in raw.split(",")]
        else:
            value = _parse_value(raw.strip())
        if key in _SPEC_KEYS:
            spec_over[key] = value
        else:
            options[key] = value
    return spec_over, options


def _default_R(spec: ModelSpec, options: dict) -> float:
    if "R" in options:
        return float(options["R"])
    return 2.0 * balance.thickness(spec)


def _admissibility_payload(spec: ModelSpec):
    report = validate_admissible(spec)
    return report, {
        "spec": spec_to_json(spec),
        "admissible": report.admissible,
        "violations": list(report.violations),
    }


def _run_admit(spec, options):
    report, payload = _admissibility_payload(spec)
    summary = [f"admissible: {report.admissible}"]
    summary += [f"violated: {v}" for v in report.violations]
    if report.admissible:
        summary.append("all structural constraints satisfied")
    return {"report": payload, "summary": summary}


def _run_balance(spec, options):
    doc: dict = {"spec": spec_to_json(spec)}
    if spec.nonlinearity is not NonlinearityKind.EXPONENTIAL:
        pair = balance.absorption_exponents(spec)
        doc["absorption"] = {"p": pair.p, "tau": pair.tau}
    if spec.hamiltonian is not HamiltonianKind.NONE:
        pair = balance.gradient_exponents(spec)
        doc["gradient"] = {"p": pair.p, "tau": pair.tau}
    R = _default_R(spec, options)
    profile = balance.select_profile(spec, R)
    doc["profile"] = balance.profile_to_json(profile)
    summary = [
        f"p = {profile.p:.12g}",
        f"tau = {profile.tau:.12g}",
        f"T = {profile.T:.12g}",
        f"rho = {profile.rho:.12g} (R = {R:.12g})",
        f"dominant: {profile.dominant.value}",
    ]
    return {"report": doc, "summary": summary}


def _run_barrier(spec, options):
    R = _default_R(spec, options)
    profile = balance.select_profile(spec, R)
    bar = barrier.RadialBarrier(profile=profile, center=np.zeros(2))
    n_samples = int(options.get("samples", 50))
    s_vals = profile.T * np.arange(1, n_samples + 1) / n_samples
    records = barrier.ode_residual(spec, bar, s_vals)
    ok, margin = barrier.supersolution_check(spec, bar, profile.T, n_samples)
    rows = [
        (r.s, r.lhs, r.balanced_rhs, r.other_rhs, r.residual, r.ratio_other_over_lhs)
        for r in records
    ]
    worst_rel = max(
        abs(r.residual) / max(1e-300, abs(r.lhs)) for r in records
    )
    doc = {
        "profile": balance.profile_to_json(profile),
        "worst_relative_residual": worst_rel,
        "supersolution": {"ok": ok, "worst_margin": margin},
    }
    summary = [
        f"worst relative residual of the balanced term: {worst_rel:.3e}",
        f"supersolution check: {'ok' if ok else 'FAILED'} (worst margin {margin:.3e})",
    ]
    return {
        "report": doc,
        "tables": {
            "residuals": (
                ["s", "lhs", "balanced_rhs", "other_rhs", "residual", "ratio_other_over_lhs"],
                rows,
            )
        },
        "summary": summary,
    }


def _run_radial(spec, options):
    R = _default_R(spec, options)
    steps = int(options.get("steps", 512))
    rho_measured, cmp = radial.measure_deadcore(spec, R, steps=steps)
    profile = cmp.profile
    sol = cmp.solution
    res = sol.discrete_residuals()
    padded = np.zeros_like(sol.s_grid)
    if res.size:
        padded[1:-1] = res
    rows = list(zip(sol.s_grid, sol.h_vals, sol.hp_vals, padded))
    doc = {
        "profile": balance.profile_to_json(profile),
        "T_found": cmp.T_found,
        "rho_measured": rho_measured,
        "thickness_rel_error": abs(cmp.T_found - profile.T) / profile.T,
        "max_abs_rel_dev": cmp.max_abs_rel_dev,
        "max_signed_dev": cmp.max_signed_dev,
        "min_signed_dev": cmp.min_signed_dev,
    }
    summary = [
        f"T closed form = {profile.T:.12g}",
        f"T from shooting = {cmp.T_found:.12g}",
        f"relative thickness error = {doc['thickness_rel_error']:.3e}",
        f"plateau radius measured = {rho_measured:.12g}",
    ]
    return {
        "report": doc,
        "tables": {"radial_solution": (["s", "h", "hp", "residual"], rows)},
        "summary": summary,
    }


def _run_grid(spec, options):
    R = _default_R(spec, options)
    if "epsilon" in options:
        disc = grid.DiscGrid(
            (0.0, 0.0), R, float(options["epsilon"]), stencil_dirs=int(options.get("stencil_dirs", 16))
        )
    else:
        disc = grid.DiscGrid.from_resolution(
            (0.0, 0.0), R, int(options.get("n", 33)), stencil_dirs=int(options.get("stencil_dirs", 16))
        )
    opts = grid.SolverOptions(
        max_iters=int(options.get("max_iters", 50_000)),
        damping=float(options.get("damping", 0.5)),
        tol=float(options.get("tol", 1e-8)),
        mode=str(options.get("mode", "gauss_seidel")),
    )
    sol = grid.solve(spec, disc, spec.d, source_shift=float(options.get("shift", 0.0)), options=opts)
    angles = options.get("angles", [math.pi / 6.0, math.pi / 4.0])
    if not isinstance(angles, list):
        angles = [angles]
    deviations = grid.rotation_invariance_check(sol, [float(a) for a in angles])
    lip = grid.lipschitz_estimate(sol, fraction=float(options.get("fraction", 0.5)))
    keep = disc.interior_mask | disc.dirichlet_mask
    ii, jj = np.nonzero(keep)
    rows = [
        (disc.X[i, j], disc.Y[i, j], disc.values[i, j], int(disc.interior_mask[i, j]))
        for i, j in zip(ii, jj)
    ]
    doc = {
        "R": R,
        "epsilon": disc.eps,
        "mode": opts.mode,
        "iterations": sol.iterations,
        "residual_inf": sol.residual_inf,
        "converged": sol.converged,
        "rotation_max_dev": dict(zip([f"{a:.12g}" for a in angles], deviations)),
        "lipschitz_estimate": lip,
    }
    if spec.beta < 2.0:
        doc["degenerate_gradient_note"] = (
            "beta < 2: a flat stencil ring gets operator value 0 (the factor "
            "|Du|^(2-beta) vanishes); the solution is selected in the sandwich "
            "class u >= 0 via the subsolution floor"
        )
    summary = [
        f"converged: {sol.converged} after {sol.iterations} sweeps "
        f"(residual {sol.residual_inf:.3e})",
        f"lipschitz estimate: {lip:.12g}",
    ] + [f"rotation deviation at {a:.6g}: {d:.3e}" for a, d in zip(angles, deviations)]
    return {
        "report": doc,
        "tables": {"grid_solution": (["x", "y", "u", "interior_flag"], rows)},
        "summary": summary,
    }


def _run_liouville(spec, options):
    thr = liouville.threshold(spec)
    ladder = options.get("ladder", [1.0, 2.0, 4.0, 8.0])
    if not isinstance(ladder, list):
        ladder = [ladder]
    ladder = [float(r) for r in ladder]
    verdicts = {}
    ladder_rows = []
    witness_rows = []
    for scale in (0.9, 1.0, 1.1):
        samples = [(R, liouville.witness_supremum(thr, R, scale)) for R in ladder]
        verdict = liouville.classify(spec, samples)
        verdicts[f"{scale:.1f}"] = liouville.verdict_to_json(verdict)
        for R, sup in samples:
            row = (R, sup, thr.denominator(R), sup / thr.denominator(R))
            witness_rows.append((scale,) + row)
            if scale == 1.0:
                ladder_rows.append(row)
    phi = float(options.get("phi", 0.5))
    plateau = liouville.deadcore_consistency(spec, options.get("plateau_ladder", [2.0, 4.0, 8.0]), phi=phi)
    doc = {
        "threshold": thr.theta,
        "growth_exponent": thr.exponent,
        "weight_exponent": thr.weight_exponent,
        "witness_verdicts": verdicts,
        "plateau": [
            {
                "R": row.R,
                "datum": row.datum,
                "T_predicted": row.T_predicted,
                "T_found": row.T_found,
                "predicted_fraction": row.predicted_fraction,
                "measured_fraction": row.measured_fraction,
            }
            for row in plateau
        ],
    }
    if spec.nonlinearity is NonlinearityKind.LANE_EMDEN_MATUKUMA:
        doc["threshold_note"] = (
            "the growth condition compares against tau* alone, while the "
            "barrier carries the extra worst-case weight factor chi <= 1"
        )
    summary = [
        f"threshold theta = {thr.theta:.12g} at exponent {thr.exponent:.12g}",
    ] + [
        f"witness x{scale}: {verdicts[scale]['classification']}" for scale in ("0.9", "1.0", "1.1")
    ] + [
        f"plateau fraction at R={row.R:g}: predicted {row.predicted_fraction:.6f}, "
        f"measured {row.measured_fraction:.6f}"
        for row in plateau
    ]
    return {
        "report": doc,
        "tables": {
            "ladder": (["R", "sup", "denominator", "ratio"], ladder_rows),
            "witness_ladders": (["scale", "R", "sup", "denominator", "ratio"], witness_rows),
        },
        "summary": summary,
    }


def _run_counterexample(spec, options):
    if spec.nonlinearity is not NonlinearityKind.EXPONENTIAL:
        raise InvalidInput("the counterexample verb needs a spec with the exponential nonlinearity")
    r_max = float(options.get("r_max", 5.0))
    points = int(options.get("points", 300))
    radii = np.linspace(0.0, r_max, points)
    residuals = liouville.exp_counterexample_residuals(
        spec.beta, spec.m, spec.alpha, spec.lam, spec.gamma, radii
    )
    worst = float(np.max(residuals))
    osc_ladder = [float(r) for r in options.get("osc_ladder", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10])]
    osc_samples = [(R, 1.0 - math.exp(-R * R), 0.0) for R in osc_ladder]
    ratios, flag = liouville.osc_criterion(osc_samples)
    doc = {
        "coefficient_a": 2.0 ** (3.0 - spec.beta - spec.m - spec.alpha),
        "max_residual": worst,
        "supersolution_ok": worst <= 0.0,
        "osc_flag": flag,
    }
    summary = [
        f"max signed residual over [0, {r_max:g}]: {worst:.3e} "
        f"({'supersolution confirmed' if worst <= 0.0 else 'NOT a supersolution'})",
        f"oscillation criterion flag: {flag}",
    ]
    return {
        "report": doc,
        "tables": {
            "counterexample_residuals": (["r", "residual"], list(zip(radii, residuals))),
            "oscillation": (["R", "osc_over_R"], list(zip(osc_ladder, ratios))),
        },
        "summary": summary,
    }


def _run_table1(spec, options, spec_doc_lists):
    base = spec_to_json(spec)
    grid_keys = [k for k, v in spec_doc_lists.items() if isinstance(v, list)]
    grids = [spec_doc_lists[k] for k in grid_keys]
    rows = []
    for combo in itertools.product(*grids) if grid_keys else [()]:
        doc = dict(base)
        doc.update(dict(zip(grid_keys, combo)))
        try:
            candidate = spec_from_json(doc)
        except DeadcoreError as exc:
            rows.append(tuple(doc[k] for k in _SPEC_KEYS) + (f"invalid: {exc}",) + ("",) * 7)
            continue
        rep = validate_admissible(candidate)
        cells = {}
        try:
            pair = balance.absorption_exponents(candidate)
            cells["p2"], cells["tau2"] = pair.p, pair.tau
        except DeadcoreError:
            pass
        try:
            pair = balance.gradient_exponents(candidate)
            cells["p1"], cells["tau1"] = pair.p, pair.tau
        except DeadcoreError:
            pass
        try:
            sel, _ = balance.select_pair(candidate)
            cells["p"], cells["tau"] = sel.p, sel.tau
            cells["T"] = balance.thickness(candidate)
        except DeadcoreError:
            pass
        rows.append(
            tuple(doc[k] for k in _SPEC_KEYS)
            + (
                "yes" if rep.admissible else "no",
                cells.get("p1", ""),
                cells.get("tau1", ""),
                cells.get("p2", ""),
                cells.get("tau2", ""),
                cells.get("p", ""),
                cells.get("tau", ""),
                cells.get("T", ""),
            )
        )
    header = list(_SPEC_KEYS) + ["admissible", "p1", "tau1", "p2", "tau2", "p", "tau", "T"]
    return {
        "report": {"rows": len(rows)},
        "tables": {"table1": (header, rows)},
        "summary": [f"{len(rows)} parameter combinations evaluated"],
    }


def run(cmd: Command) -> int:
    """Execute one CLI command; returns the process exit code."""
    try:
        with open(cmd.spec_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise InvalidInput("config must be a JSON object")
        spec_over, options = _split_overrides(cmd.overrides)
        doc_lists = dict(doc)
        doc_lists.update(spec_over)
        if cmd.verb != "table1":
            lists = [k for k, v in doc_lists.items() if isinstance(v, list)]
            if lists:
                raise InvalidInput(f"comma lists in spec fields are only valid for table1: {lists}")
        scalar_doc = {
            k: (v[0] if isinstance(v, list) else v) for k, v in doc_lists.items()
        }
        spec = spec_from_json(scalar_doc)
    except (OSError, json.JSONDecodeError, DeadcoreError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 64

    try:
        report, payload = _admissibility_payload(spec)
        if not report.admissible and cmd.verb != "table1":
            results = {
                "report": payload,
                "summary": [f"violated: {v}" for v in report.violations],
            }
            emit_report(results, cmd.output_dir)
            if cmd.verb == "admit":
                return 2
            print("spec is inadmissible; see report", file=sys.stderr)
            return 2
        if cmd.verb == "admit":
            results = _run_admit(spec, options)
        elif cmd.verb == "balance":
            results = _run_balance(spec, options)
        elif cmd.verb == "barrier":
            results = _run_barrier(spec, options)
        elif cmd.verb == "radial":
            results = _run_radial(spec, options)
        elif cmd.verb == "grid":
            results = _run_grid(spec, options)
        elif cmd.verb == "liouville":
            results = _run_liouville(spec, options)
        elif cmd.verb == "counterexample":
            results = _run_counterexample(spec, options)
        elif cmd.verb == "table1":
            results = _run_table1(spec, options, doc_lists)
        else:  # pragma: no cover - argparse restricts the choices
            print(f"unknown verb {cmd.verb}", file=sys.stderr)
            return 64
    except DeadcoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    try:
        emit_report(results, cmd.output_dir)
    except OSError as exc:
        print(f"cannot write artifacts: {exc}", file=sys.stderr)
        return 73
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deadcore",
        description=(
            "Verification toolkit for dead-core barriers, radial and 2-D disc "
            "solvers, and Liouville growth thresholds of beta-normalized "
            "infinity-Laplacian equations with Hamiltonian and absorption terms."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb, help=_VERB_HELP[verb], description=_VERB_HELP[verb])
        sp.add_argument("--spec", required=True, help="path to the JSON model config")
        sp.add_argument("--out", default="deadcore-report", help="output directory for artifacts")
        sp.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a spec field or verb option (repeatable; comma lists allowed)",
        )
    args = parser.parse_args(argv)
    cmd = Command(verb=args.verb, spec_path=args.spec, output_dir=args.out, overrides=args.set)
    return run(cmd)


if __name__ == "__main__":
    sys.exit(main())
