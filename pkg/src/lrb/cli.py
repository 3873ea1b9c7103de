"""Command line front end: simulate, fit, oracle, figures, sweep.

Exit codes: 0 success, 2 invalid input, 3 failure while running.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import delta_f, pr_triple
from .channels import channel_from_spec
from .codes import get_code
from .config import ExperimentConfig, RbConfig, dumps_config, load_experiment_config
from .fitting import fit_decay
from .logical import RecoveryMode, depolarizing_parameter, error_probabilities, logical_fidelity
from .rb import SurvivalDataset, default_workers, simulate_lrb

__all__ = ["main", "fig2_rows", "fig3_rows", "oracle_summary", "fit_summary"]

FIG2_STEP = 200  # p = k / 200
FIG3_POINTS = 61


class ValidationError(ValueError):
    pass


def fmt(v) -> str:
    """Shortest round-trip text for a number."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path: Path, header, rows):
    lines = [",".join(header)] + [",".join(fmt(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj):
    path.write_text(dumps_config(obj))


def stamp(d: dict) -> dict:
    return {**d, "version": __version__}


# --- pure producers ---------------------------------------------------------


def fig2_rows():
    """(p, pr_no, pr_co, pr_un) on p = k/200 in [0, 0.5] with p = 1/3 added."""
    ps = sorted({k / FIG2_STEP for k in range(FIG2_STEP // 2 + 1)} | {1 / 3})
    return [(p, *pr_triple(p)) for p in ps]


def fig3_rows():
    """(p, q, delta_f) for p on a log grid over [1e-4, 0.5] and q in {p/10, p/100}."""
    rows = []
    for p in np.geomspace(1e-4, 0.5, FIG3_POINTS):
        for q in (p / 10, p / 100):
            rows.append((float(p), float(q), delta_f(float(p), float(q))))
    return rows


def oracle_summary(code, channel, recovery_noise=None, recovery="lookup") -> dict:
    f_rec = logical_fidelity(code, channel, RecoveryMode.LOOKUP, recovery_noise)
    f_norec = logical_fidelity(code, channel, RecoveryMode.TRIVIAL, recovery_noise)
    probs = error_probabilities(code, channel, recovery_noise)
    chosen = f_rec if RecoveryMode.parse(recovery) is RecoveryMode.LOOKUP else f_norec
    return {
        "F_rec": f_rec,
        "F_norec": f_norec,
        "pr_no": probs.pr_no,
        "pr_co": probs.pr_co,
        "pr_un": probs.pr_un,
        "p_L": depolarizing_parameter(chosen),
    }


def fit_summary(dataset: SurvivalDataset, n_bootstrap: int, seed: int = 0) -> dict:
    return stamp(fit_decay(dataset, n_bootstrap, seed).to_dict())


# --- subcommands ------------------------------------------------------------


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_workers()


def _emit(exp: ExperimentConfig, out: Path, workers: int):
    out.mkdir(parents=True, exist_ok=True)
    rb = exp.rb
    write_json(out / "config.json", stamp(exp.to_dict()))
    dataset = None
    if "dataset" in exp.emit or "fit" in exp.emit:
        dataset = simulate_lrb(rb, workers)
        (out / "dataset.csv").write_text(dataset.to_csv())
    if "fit" in exp.emit:
        write_json(out / "fit.json", fit_summary(dataset, exp.n_bootstrap))
    if "oracle" in exp.emit:
        summary = oracle_summary(rb.code_obj(), rb.noise_channel(), rb.recovery_noise_channel(), rb.recovery)
        write_json(out / "oracle.json", stamp(summary))
    if "figures" in exp.emit:
        _write_figure("fig2", out)
        _write_figure("fig3", out)


def cmd_simulate(args) -> int:
    exp = load_experiment_config(args.config, args.seed)
    out = Path(args.out) if args.out else Path(exp.output_dir)
    _emit(exp, out, _threads(args))
    print(out / "dataset.csv" if "dataset" in exp.emit else out)
    return 0


def cmd_fit(args) -> int:
    path = Path(args.dataset)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ValidationError(f"{path}: dataset not found") from None
    config = {}
    echo = path.parent / "config.json"
    if echo.exists():
        config = json.loads(echo.read_text())
    dataset = SurvivalDataset.from_csv(text, config)
    summary = fit_summary(dataset, args.bootstrap, args.seed or 0)
    text = dumps_config(summary)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    if args.config:
        rb = load_experiment_config(args.config).rb
        code, noise, rnoise, rec = rb.code_obj(), rb.noise_channel(), rb.recovery_noise_channel(), rb.recovery
    else:
        if not args.channel:
            raise ValidationError("oracle needs --channel or --config")
        try:
            code = get_code(args.code)
            noise = channel_from_spec(json.loads(args.channel))
        except (KeyError, json.JSONDecodeError) as exc:
            raise ValidationError(f"bad code or channel: {exc}") from None
        rnoise, rec = None, args.recovery
    text = dumps_config(stamp(oracle_summary(code, noise, rnoise, rec)))
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


FIGURES = {
    "fig2": (("p", "pr_no", "pr_co", "pr_un"), fig2_rows,
             "bit-flip code, independent flips; p = k/200 for k = 0..100 plus p = 1/3"),
    "fig3": (("p", "q", "delta_f"), fig3_rows,
             f"p = geomspace(1e-4, 0.5, {FIG3_POINTS}); q in (p/10, p/100)"),
}


def _write_figure(which: str, out: Path) -> Path:
    header, producer, grid = FIGURES[which]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / f"{which}.csv", header, producer())
    write_json(out / f"{which}.json", stamp({"figure": which, "columns": list(header), "grid": grid}))
    return out / f"{which}.csv"


def cmd_figures(args) -> int:
    if args.which not in FIGURES:
        raise ValidationError(f"unknown figure {args.which!r}; choose from {sorted(FIGURES)}")
    print(_write_figure(args.which, Path(args.out or ".")))
    return 0


def _set_path(d: dict, dotted: str, value):
    """Set a dotted key such as ``noise.channels.0.p``; integers index lists."""
    node = d
    keys = dotted.split(".")
    for pos, k in enumerate(keys):
        if isinstance(node, list) and k.isdigit() and int(k) < len(node):
            k = int(k)
        elif not isinstance(node, dict) or k not in node:
            raise ValidationError(f"sweep parameter {dotted!r} not found in config")
        if pos == len(keys) - 1:
            node[k] = value
        else:
            node = node[k]


def _parse_values(text: str):
    try:
        vals = [json.loads(v) for v in text.split(",") if v.strip()]
    except json.JSONDecodeError:
        raise ValidationError(f"malformed grid {text!r}") from None
    if not vals or not all(isinstance(v, (int, float)) for v in vals):
        raise ValidationError(f"malformed grid {text!r}")
    return vals


def cmd_sweep(args) -> int:
    exp = load_experiment_config(args.config, args.seed)
    values = _parse_values(args.values)
    rows = []
    for v in values:
        d = copy.deepcopy(exp.rb.to_dict())
        _set_path(d, args.param, v)
        try:
            rb = RbConfig.from_dict(d)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{args.param}={v}: {exc}") from None
        if args.mode == "oracle":
            s = oracle_summary(rb.code_obj(), rb.noise_channel(), rb.recovery_noise_channel(), rb.recovery)
            rows.append((v, *s.values()))
            header = ("value", *s.keys())
        else:
            ds = simulate_lrb(rb, _threads(args))
            rows.extend((v, *r) for r in ds.rows)
            header = ("value",) + tuple(SurvivalDataset.CSV_HEADER.split(","))
    out = Path(args.out or exp.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "sweep.csv", header, rows)
    write_json(out / "sweep.json", stamp({"param": args.param, "values": values, "mode": args.mode,
                                          "config": exp.rb.to_dict()}))
    print(out / "sweep.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrb", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required)
        p.add_argument("--out")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int, help="worker processes (default: $LRB_THREADS or 1)")

    p = sub.add_parser("simulate", help="run the Monte Carlo experiment of a config file")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a dataset CSV")
    p.add_argument("dataset")
    common(p, config_required=False)
    p.add_argument("--bootstrap", type=int, default=1000)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("oracle", help="exact logical channel summary")
    common(p, config_required=False)
    p.add_argument("--code", default="bitflip")
    p.add_argument("--channel", help="channel spec as JSON")
    p.add_argument("--recovery", default="lookup", choices=[m.value for m in RecoveryMode])
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("figures", help="plot-ready CSV for the code-property and misestimation curves")
    p.add_argument("which")
    common(p, config_required=False)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("sweep", help="repeat oracle or simulate over a parameter grid")
    common(p)
    p.add_argument("--param", required=True, help="dotted config key, e.g. noise.p")
    p.add_argument("--values", required=True, help="comma separated numbers")
    p.add_argument("--mode", choices=("oracle", "simulate"), default="oracle")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValueError as exc:  # includes config and design errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
