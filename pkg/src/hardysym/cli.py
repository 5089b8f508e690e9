"""Experiment runner.

Each subcommand builds a small config (defaults, then an optional JSON config
file, then command-line flags, flags winning), runs one experiment, writes
CSV/JSON artifacts to --out, and prints a one-line summary with the target
value, the achieved value, and the relative gap.  Identical config and seed
produce byte-identical artifacts.

Exit status: 0 on success, 2 on validation / degenerate-input errors (the
message names the violated clause), 1 on I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError, WorkbenchError
from .functionals import Params
from .grid import CylGrid, GridFunction, grid_function_to_csv, make_radial_grid
from .minimizer import (
    DescentOptions,
    default_init,
    hardy_endpoint_sweep,
    minimize_hs,
    symmetrize_and_compare,
)
from .rearrange import (
    decreasing_rearrangement_1d,
    double_star,
    hardy_littlewood_check,
)
from .sharp_constant import (
    convexity_bound,
    eps_sweep,
    hardy_constant,
    split_infimum_demo,
)

SCHEMA_VERSION = 1


def _fmt(x) -> str:
    """Deterministic shortest-round-trip formatting for CSV cells."""
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[h]) for h in header))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    payload = dict(payload)
    payload["schema_version"] = SCHEMA_VERSION
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg.get("out", "."))
    if not out.is_dir():
        raise IOError(f"output directory {out} does not exist")
    return out


def _load_config(args: argparse.Namespace, defaults: dict) -> dict:
    cfg = dict(defaults)
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise IOError(f"config file {path} does not exist")
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must contain a JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        cfg[key] = value
    return cfg


def _refined(n: int, cfg: dict) -> int:
    return n * 2 ** int(cfg.get("refine", 0))


def _summary(name: str, target: float, achieved: float) -> None:
    gap = abs(achieved - target) / abs(target) if target != 0 else abs(achieved)
    print(f"{name}: target={target:.12g} achieved={achieved:.12g} rel_gap={gap:.3e}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_constant(cfg: dict) -> int:
    value = hardy_constant(cfg["p"], cfg["alpha"], cfg["k"])
    out = _out_dir(cfg)
    row = {"p": float(cfg["p"]), "alpha": float(cfg["alpha"]), "k": int(cfg["k"]), "constant": value}
    if cfg["format"] == "csv":
        _write_csv(out / "constant.csv", ["p", "alpha", "k", "constant"], [row])
    else:
        _write_json(out / "constant.json", row)
    print(f"{value:.17g}")
    return 0


def cmd_eps_sweep(cfg: dict) -> int:
    params = Params.hardy(N=cfg["N"], k=cfg["N"], p=cfg["p"], alpha=cfg["alpha"])
    ladder = cfg.get("eps_ladder")
    if ladder is None:
        rows = eps_sweep(params)
    else:
        if len(ladder) == 0:
            raise ConfigurationError("eps ladder must be non-empty")
        rows = eps_sweep(params, eps_values=ladder)
    out = _out_dir(cfg)
    header = [
        "eps",
        "numerator",
        "denominator",
        "quotient",
        "closed_form",
        "rel_err",
        "tail_correction_num",
        "tail_correction_den",
    ]
    if cfg["format"] == "csv":
        _write_csv(out / "eps_sweep.csv", header, rows)
    else:
        _write_json(out / "eps_sweep.json", {"rows": rows})
    limit = hardy_constant(params.p, params.alpha, params.k) ** -1  # quotient limit
    for row in rows:
        _summary(f"eps={row['eps']:g}", row["closed_form"], row["quotient"])
    _summary("eps-sweep limit", limit, rows[-1]["quotient"])
    return 0


def cmd_product_sweep(cfg: dict) -> int:
    params = Params.hardy_sobolev(
        N=cfg["N"], k=cfg["k"], p=cfg["p"], beta=cfg["beta"]
    )
    ladder = cfg.get("ladder")
    if ladder is not None:
        ladder = [tuple(point) for point in ladder]
    rows = hardy_endpoint_sweep(
        params,
        ladder,
        n_s=_refined(cfg["n_s"], cfg),
        n_t=_refined(cfg["n_t"], cfg),
        log_r_max=cfg["log_r_max"],
    )
    out = _out_dir(cfg)
    header = ["eps", "lambda", "numerator", "denominator", "quotient", "target", "rel_gap"]
    if cfg["format"] == "csv":
        _write_csv(out / "product_sweep.csv", header, rows)
    else:
        _write_json(out / "product_sweep.json", {"rows": rows})
    best = min(rows, key=lambda r: r["quotient"])
    _summary("product-sweep", best["target"], best["quotient"])
    return 0


def _hs_grid(cfg: dict) -> CylGrid:
    n = _refined(cfg["n"], cfg)
    s_grid = make_radial_grid(cfg["k"], cfg["r_max"], n, "equimeasure")
    t_grid = make_radial_grid(cfg["N"] - cfg["k"], cfg["r_max"], n, "equimeasure")
    return CylGrid(s_grid, t_grid)


def cmd_symmetrize(cfg: dict) -> int:
    params = Params.hardy_sobolev(N=cfg["N"], k=cfg["k"], p=cfg["p"], beta=cfg["beta"])
    grid = _hs_grid(cfg)
    u = default_init(grid, "random", seed=cfg["seed"])
    report = symmetrize_and_compare(u, params)
    out = _out_dir(cfg)
    header = sorted(report)
    if cfg["format"] == "csv":
        _write_csv(out / "symmetrize.csv", header, [report])
    else:
        _write_json(out / "symmetrize.json", report)
    _summary("symmetrize", report["quotient_before"], report["quotient_after"])
    return 0


def cmd_minimize(cfg: dict) -> int:
    params = Params.hardy_sobolev(N=cfg["N"], k=cfg["k"], p=cfg["p"], beta=cfg["beta"])
    grid = _hs_grid(cfg)
    opts = DescentOptions(max_iter=cfg["max_iter"], seed=cfg["seed"])
    init = "bump" if cfg["seed"] == 0 else "random"
    trace = minimize_hs(params, grid, init=init, opts=opts)
    out = _out_dir(cfg)
    _write_json(out / "minimize_trace.json", trace.to_dict())
    grid_function_to_csv(trace.final_u, out / "minimize_final.csv")
    _summary("minimize", trace.quotients[0], trace.quotients[-1])
    print(f"converged={trace.converged} stop_reason={trace.stop_reason} iters={len(trace.quotients) - 1}")
    return 0


def cmd_split_demo(cfg: dict) -> int:
    result = split_infimum_demo(
        p=cfg["p"],
        omega_width=cfg["omega_width"],
        lambda_scales=tuple(cfg["lambda_scales"]),
    )
    out = _out_dir(cfg)
    header = sorted(result["rows"][0])
    if cfg["format"] == "csv":
        _write_csv(out / "split_demo.csv", header, result["rows"])
    else:
        _write_json(out / "split_demo.json", result)
    best = result["rows"][-1]
    _summary("split-demo", result["omega_infimum"], best["quotient"])
    return 0


def cmd_properties(cfg: dict) -> int:
    """Fast randomized self-checks of the rearrangement and convexity layers."""
    rng = np.random.default_rng(cfg["seed"])
    n_trials = cfg["trials"]
    results = {}

    samples = rng.uniform(size=(n_trials, 4))
    s, t = 10.0 * samples[:, 0], 10.0 * samples[:, 1]
    lam = np.clip(samples[:, 2], 1e-12, 1.0 - 1e-12)
    p = 1.0 + 5.0 * samples[:, 3]
    violations = 0
    for i in range(n_trials):
        lhs, rhs = convexity_bound(s[i], t[i], lam[i], p[i])
        if lhs > rhs * (1 + 1e-12):
            violations += 1
    results["convexity_violations"] = violations

    grid = make_radial_grid(1, 1.0, 64, "uniform")
    hl_violations = 0
    equi_fail = 0
    idem_fail = 0
    for _ in range(min(n_trials, 200)):
        vals = rng.uniform(size=64)
        rearranged = decreasing_rearrangement_1d(vals, grid.cell_measures)
        if np.abs(np.sort(vals) - np.sort(rearranged)).max() > 1e-12:
            equi_fail += 1
        u = GridFunction(grid, vals)
        star = double_star(u)
        star2 = double_star(star)
        if np.abs(star2.values - star.values).max() > 1e-12:
            idem_fail += 1
        v = GridFunction(u.grid, np.sort(rng.uniform(size=64))[::-1].copy())
        plain, symmetrized = hardy_littlewood_check(u, v)
        if symmetrized < plain - 1e-12:
            hl_violations += 1
    results["equimeasurability_failures"] = equi_fail
    results["idempotence_failures"] = idem_fail
    results["hardy_littlewood_violations"] = hl_violations

    out = _out_dir(cfg)
    _write_json(out / "properties.json", results)
    total = sum(results.values())
    print(f"properties: {len(results)} checks, {total} violations")
    return 0 if total == 0 else 2


# ---------------------------------------------------------------------------
# argument parsing

DEFAULTS = {
    "constant": {"p": 2.0, "alpha": 0.0, "k": 3, "format": "csv", "out": ".", "seed": 0, "refine": 0},
    "eps-sweep": {
        "N": 3, "p": 2.0, "alpha": 0.0, "eps_ladder": None,
        "format": "csv", "out": ".", "seed": 0, "refine": 0,
    },
    "product-sweep": {
        "N": 4, "k": 3, "p": 2.0, "beta": 2.0, "ladder": None,
        "n_s": 4096, "n_t": 512, "log_r_max": 100.0,
        "format": "csv", "out": ".", "seed": 0, "refine": 0,
    },
    "symmetrize": {
        "N": 4, "k": 2, "p": 2.0, "beta": 1.0, "n": 64, "r_max": 8.0,
        "format": "csv", "out": ".", "seed": 0, "refine": 0,
    },
    "minimize": {
        "N": 4, "k": 2, "p": 2.0, "beta": 1.0, "n": 64, "r_max": 8.0,
        "max_iter": 2000, "format": "json", "out": ".", "seed": 0, "refine": 0,
    },
    "split-demo": {
        "p": 2.0, "omega_width": 1.0, "lambda_scales": [1.0, 4.0, 16.0, 64.0],
        "format": "csv", "out": ".", "seed": 0, "refine": 0,
    },
    "properties": {"trials": 100000, "format": "json", "out": ".", "seed": 0, "refine": 0},
}

HANDLERS = {
    "constant": cmd_constant,
    "eps-sweep": cmd_eps_sweep,
    "product-sweep": cmd_product_sweep,
    "symmetrize": cmd_symmetrize,
    "minimize": cmd_minimize,
    "split-demo": cmd_split_demo,
    "properties": cmd_properties,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hardysym",
        description="Hardy-inequality sharp-constant and symmetrization workbench",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, help="JSON config file (flags override it)")
        p.add_argument("--out", type=str, help="output directory (must exist)")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--format", choices=("csv", "json"), help="artifact format")
        p.add_argument("--refine", type=int, help="grid-doubling level")

    p = sub.add_parser("constant", help="sharp constant p^p/(alpha+k)^p; CSV columns p,alpha,k,constant")
    p.add_argument("--p", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--k", type=int)
    common(p)

    p = sub.add_parser(
        "eps-sweep",
        help="radial sharpness family vs closed form; CSV columns eps,numerator,denominator,quotient,closed_form,rel_err,tail_correction_num,tail_correction_den",
    )
    p.add_argument("--N", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--alpha", type=float)
    common(p)

    p = sub.add_parser(
        "product-sweep",
        help="endpoint (beta=p) product-family ladder; CSV columns eps,lambda,numerator,denominator,quotient,target,rel_gap",
    )
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--beta", type=float)
    common(p)

    p = sub.add_parser("symmetrize", help="quotient before/after double symmetrization")
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    common(p)

    p = sub.add_parser("minimize", help="projected descent on the constrained quotient; writes trace JSON + final CSV")
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    common(p)

    p = sub.add_parser("split-demo", help="product-domain infimum splitting vs 1D eigenvalue oracle")
    p.add_argument("--p", type=float)
    p.add_argument("--omega-width", dest="omega_width", type=float)
    common(p)

    p = sub.add_parser("properties", help="randomized rearrangement/convexity self-checks")
    p.add_argument("--trials", type=int)
    common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args, DEFAULTS[args.command])
        return HANDLERS[args.command](cfg)
    except WorkbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
