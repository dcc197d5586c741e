"""Command-line front end.

Subcommands: ``table``, ``verify-theorem``, ``twirl-mc``, ``extremal-check``
and ``roof``.  Every command writes CSV (or JSON with ``--format json``) to
``--out`` or stdout.  Exit codes: 0 success, 1 verification failure, 2 usage
or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from wernerent import extremal, measures, roof, twirl
from wernerent.linalg import loads_matrix
from wernerent.states import (
    DensityOperator,
    WernerSpec,
    density_from_pure,
    flip_expectation,
    pure_flip_expectation,
    random_pure_state,
    werner_density,
)

COMMANDS = ("table", "verify-theorem", "twirl-mc", "extremal-check", "roof")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLE_COLUMNS = ["d", "f", "concurrence", "tangle", "eof"]
VERIFY_COLUMNS = ["d", "f", "kind", "analytic", "numeric", "gap", "restarts_converged", "pass"]
TWIRL_COLUMNS = ["d", "f_true", "f_est", "frob_residual", "stderr", "samples", "seed"]
EXTREMAL_COLUMNS = ["check", "d", "count", "max_violation", "tolerance", "pass"]
ROOF_COLUMNS = ["d", "f", "kind", "m", "best_value", "min_iterate", "restarts", "converged_restarts"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    d: int | None = None
    f_min: float = -1.0
    f_max: float = 1.0
    f_steps: int = 9
    seed: int = 0
    samples: int | None = None
    restarts: int = 20
    tolerance: float = 1e-3
    output_path: str | None = None
    format: str = "csv"
    kind: str | None = None
    budget: int = 5000
    ensemble_size: int | None = None
    twirl_input: str = "pure"
    rho_file: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.f_steps < 1:
            raise UsageError("--f-steps must be >= 1")
        if not (-1.0 <= self.f_min <= 1.0 and -1.0 <= self.f_max <= 1.0):
            raise UsageError("f grid must lie within [-1, 1]")
        if self.f_min > self.f_max:
            raise UsageError("--f-min must not exceed --f-max")
        if self.d is not None and self.d < 2:
            raise UsageError("--d must be >= 2")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    def f_grid(self) -> list[float]:
        if self.f_steps == 1:
            return [float(self.f_min)]
        return [float(x) for x in np.linspace(self.f_min, self.f_max, self.f_steps)]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        def plain(v):
            if isinstance(v, np.generic):
                return v.item()
            return v
        return json.dumps([{c: plain(r[c]) for c in columns} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _load_rho(path: str) -> DensityOperator:
    try:
        with open(path) as fh:
            m = loads_matrix(fh.read())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read density operator from {path}: {exc}") from exc
    d = int(round(np.sqrt(m.shape[0])))
    try:
        return DensityOperator(d, m)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_table(cfg: RunConfig) -> tuple[list[dict], int]:
    d = cfg.d or 2
    rows = []
    for f in cfg.f_grid():
        m = measures.werner_measures(WernerSpec(d, f))
        rows.append({"d": d, "f": f, "concurrence": m.concurrence, "tangle": m.tangle, "eof": m.eof})
    return rows, EXIT_OK


def cmd_verify_theorem(cfg: RunConfig) -> tuple[list[dict], int]:
    d = cfg.d or 2
    if d > roof.MAX_ROOF_D:
        raise UsageError(f"roof verification limited to d <= {roof.MAX_ROOF_D}")
    kinds = [cfg.kind] if cfg.kind else ["concurrence", "tangle"]
    rows = []
    for n, kind in enumerate(kinds):
        checks = roof.verify_theorem(
            d, cfg.f_grid(), kind, tolerance=cfg.tolerance, restarts=cfg.restarts,
            seed=[cfg.seed, n], budget=cfg.budget, m=cfg.ensemble_size,
        )
        rows.extend(c.as_row() for c in checks)
    code = EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAIL
    return rows, code


def _twirl_input(cfg: RunConfig, d: int, f: float) -> DensityOperator:
    if cfg.twirl_input == "werner":
        return werner_density(WernerSpec(d, f))
    if f < 0:
        psi = extremal.optimal_pure_state(extremal.OptimalStateParams(d, f))
    else:
        psi = extremal.separable_case_witness(d, f)
    return density_from_pure(psi)


def cmd_twirl_mc(cfg: RunConfig) -> tuple[list[dict], int]:
    samples = 10_000 if cfg.samples is None else cfg.samples
    if samples < 1:
        raise UsageError("--samples must be >= 1")
    if cfg.rho_file:
        rho = _load_rho(cfg.rho_file)
        inputs = [(rho.d, flip_expectation(rho), rho)]
    else:
        d = cfg.d or 2
        inputs = [(d, f, _twirl_input(cfg, d, f)) for f in cfg.f_grid()]
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(inputs))
    rows = []
    for (d, f, rho), ss in zip(inputs, seeds):
        spec = twirl.twirl_exact(rho)
        est = twirl.twirl_monte_carlo(rho, samples, ss)
        rows.append({
            "d": d,
            "f_true": f,
            "f_est": est.f_estimate,
            "frob_residual": twirl.frobenius_residual(est, spec),
            "stderr": est.frob_stderr,
            "samples": samples,
            "seed": cfg.seed,
        })
    return rows, EXIT_OK


def extremal_checks(dims, n_states: int, seed) -> list[dict]:
    """Property checks for the pure-state extremization; one row per check."""
    rows = []
    rng = np.random.default_rng(seed)
    slack = 1e-10
    for d in dims:
        worst = 0.0
        for _ in range(n_states):
            psi = extremal.diagonalize_reduced(random_pure_state(d, rng))
            split = extremal.split_distribution(psi)
            tau = measures.tangle_pure(psi)
            conc = measures.concurrence_pure(psi)
            tau_chain = [tau, split.pair_tangle_sum, split.pair_f_sq_sum, split.pair_f_sum**2]
            c_chain = [conc, split.pair_concurrence_sum, split.pair_abs_f_sum, abs(split.pair_f_sum)]
            for chain in (tau_chain, c_chain):
                worst = max(worst, max(b - a for a, b in zip(chain, chain[1:])))
            worst = max(worst, abs(split.pair_f_sum**2 - extremal.tangle_lower_bound(psi)))
            worst = max(worst, abs(split.f_reconstruction - pure_flip_expectation(psi)))
        rows.append({"check": "bound_chain", "d": d, "count": n_states,
                     "max_violation": max(worst, 0.0), "tolerance": slack})

    worst = 0.0
    f_ij_grid = np.linspace(-1.0, 1.0, 21)
    for f_ij in f_ij_grid:
        found, _ = extremal.brute_force_subproblem(f_ij)
        worst = max(worst, extremal.subproblem_min(f_ij)[1] - found)
    rows.append({"check": "subproblem_bruteforce", "d": 2, "count": len(f_ij_grid),
                 "max_violation": max(worst, 0.0), "tolerance": 1e-6})

    for d in dims:
        worst = 0.0
        f_vals = -1.0 + np.arange(50) / 50.0
        for f in f_vals:
            psi = extremal.optimal_pure_state(extremal.OptimalStateParams(d, f))
            spec = WernerSpec(d, f)
            m = measures.pure_measures(psi)
            worst = max(worst, abs(m.concurrence + f), abs(m.tangle - f * f),
                        abs(m.eof - measures.werner_eof(spec)))
        # boundary f = 0: minimal values vanish and the product witness attains them
        witness = extremal.separable_case_witness(d, 0.0)
        worst = max(worst, *extremal.min_pure_values(d, 0.0), measures.concurrence_pure(witness))
        rows.append({"check": "optimal_state", "d": d, "count": len(f_vals) + 1,
                     "max_violation": worst, "tolerance": slack})

    f_grid = np.linspace(-1.0, 1.0, 41)
    for idx, name in ((0, "hull_concurrence"), (1, "hull_tangle")):
        pts = [(f, extremal.min_pure_values(2, f)[idx]) for f in f_grid]
        env = extremal.convex_hull_lower_envelope(pts)
        worst = max(abs(env(f) - v) for f, v in pts)
        rows.append({"check": name, "d": 2, "count": len(pts), "max_violation": worst,
                     "tolerance": slack})
    for r in rows:
        r["pass"] = bool(r["max_violation"] <= r["tolerance"])
    return rows


def cmd_extremal_check(cfg: RunConfig) -> tuple[list[dict], int]:
    dims = [cfg.d] if cfg.d else [2, 3, 4]
    n_states = 500 if cfg.samples is None else cfg.samples
    if n_states < 1:
        raise UsageError("--samples must be >= 1")
    rows = extremal_checks(dims, n_states, cfg.seed)
    return rows, EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAIL


def cmd_roof(cfg: RunConfig) -> tuple[list[dict], int]:
    kind = cfg.kind or "concurrence"
    if cfg.rho_file:
        rho = _load_rho(cfg.rho_file)
        targets = [(rho.d, flip_expectation(rho), rho)]
    else:
        d = cfg.d or 2
        if d > roof.MAX_ROOF_D:
            raise UsageError(f"roof verification limited to d <= {roof.MAX_ROOF_D}")
        targets = [(d, f, WernerSpec(d, f)) for f in cfg.f_grid()]
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(targets))
    rows = []
    for (d, f, target), ss in zip(targets, seeds):
        rho = werner_density(target) if isinstance(target, WernerSpec) else target
        m = cfg.ensemble_size or roof.rank(rho) + 2
        try:
            res = roof.minimize_roof(target, kind, m=m, restarts=cfg.restarts, seed=ss,
                                     budget=cfg.budget)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        rows.append({"d": d, "f": f, "kind": kind, "m": m, "best_value": res.best_value,
                     "min_iterate": res.min_iterate_value, "restarts": res.restarts,
                     "converged_restarts": res.converged_restarts})
    return rows, EXIT_OK


HANDLERS = {
    "table": (cmd_table, TABLE_COLUMNS),
    "verify-theorem": (cmd_verify_theorem, VERIFY_COLUMNS),
    "twirl-mc": (cmd_twirl_mc, TWIRL_COLUMNS),
    "extremal-check": (cmd_extremal_check, EXTREMAL_COLUMNS),
    "roof": (cmd_roof, ROOF_COLUMNS),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wernerent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=None, help="subsystem dimension")
    common.add_argument("--f-min", type=float, default=-1.0)
    common.add_argument("--f-max", type=float, default=1.0)
    common.add_argument("--f-steps", type=int, default=9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None,
                        help="Haar samples (twirl-mc) or random states per d (extremal-check)")
    common.add_argument("--restarts", type=int, default=20)
    common.add_argument("--tolerance", type=float, default=1e-3)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--kind", choices=roof.KINDS, default=None)
    common.add_argument("--budget", type=int, default=5000, help="iterations per roof restart")
    common.add_argument("--ensemble-size", type=int, default=None,
                        help="ensemble size m for roof searches (default rank + 2)")
    common.add_argument("--input", dest="twirl_input", choices=("pure", "werner"), default="pure",
                        help="state twirled at each grid point by twirl-mc")
    common.add_argument("--rho-file", default=None, help="density operator in matrix JSON format")
    helps = {
        "table": "closed-form concurrence, tangle and EOF on an f grid",
        "verify-theorem": "compare closed forms with the numerical convex roof",
        "twirl-mc": "Monte Carlo U x U twirl against the exact projection",
        "extremal-check": "property checks of the pure-state extremization",
        "roof": "numerical convex roof of a Werner state or a supplied state",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command, d=args.d, f_min=args.f_min, f_max=args.f_max,
        f_steps=args.f_steps, seed=args.seed, samples=args.samples, restarts=args.restarts,
        tolerance=args.tolerance, output_path=args.out, format=args.format, kind=args.kind,
        budget=args.budget, ensemble_size=args.ensemble_size, twirl_input=args.twirl_input,
        rho_file=args.rho_file,
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    handler, columns = HANDLERS[cfg.command]
    rows, code = handler(cfg)
    return render(rows, columns, cfg.format), code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, code = run(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.output_path in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.output_path, "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {cfg.output_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
