"""Command-line front end.

Subcommands:
    theory stationary|tune|interval|limits|pt
    sim clup|baseline
    repro table1|table2|table3|table4|figure-data

A plain key=value config file may supply any flag's value; explicit flags
override the file. Outputs are a CSV and a JSON summary next to it.
"""

from __future__ import annotations

import argparse
import sys

from .harness import ExperimentConfig, run
from .numerics import Diverged
from .theory import InvalidBranch, NoRoot


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--sigma", type=float, help="single noise level")
    p.add_argument("--inv-sigma-list", dest="inv_sigma_list",
                   help="comma-separated list of 1/sigma values")
    p.add_argument("--rsc", type=float, dest="r_sc")
    p.add_argument("--cl1", type=float, dest="c_l1")
    p.add_argument("--n", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, dest="base_seed")
    p.add_argument("--engine", choices=("largescale", "basic"))
    p.add_argument("--method", choices=("socp", "lasso", "idealml"))
    p.add_argument("--model", choices=("clup", "socp"))
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clupreg",
                                     description="sparse ML regression toolkit")
    sub = parser.add_subparsers(dest="group", required=True)

    p_theory = sub.add_parser("theory", help="dual-theory computations")
    p_theory.add_argument("what", choices=("stationary", "tune", "interval",
                                           "limits", "pt"))
    _add_common(p_theory)

    p_sim = sub.add_parser("sim", help="finite-n simulations")
    p_sim.add_argument("what", choices=("clup", "baseline"))
    _add_common(p_sim)

    p_repro = sub.add_parser("repro", help="reference-table reproduction")
    p_repro.add_argument("what", choices=("table1", "table2", "table3",
                                          "table4", "figure-data"))
    _add_common(p_repro)
    return parser


_FLOAT_KEYS = {"alpha", "beta", "sigma", "r_sc", "c_l1"}
_INT_KEYS = {"n", "trials", "base_seed"}
_ALIASES = {"rsc": "r_sc", "cl1": "c_l1", "seed": "base_seed",
            "inv-sigma-list": "inv_sigma_list"}


def _read_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line: {line!r}")
            key, _, val = line.partition("=")
            key = _ALIASES.get(key.strip(), key.strip())
            values[key] = val.strip()
    return values


def _coerce(key: str, val):
    if val is None:
        return None
    if key in _FLOAT_KEYS:
        return float(val)
    if key in _INT_KEYS:
        return int(val)
    return val


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_vals = _read_config_file(args.config) if args.config else {}
    merged = {k: _coerce(k, v) for k, v in file_vals.items()}
    for key in ("alpha", "beta", "sigma", "inv_sigma_list", "r_sc", "c_l1",
                "n", "trials", "base_seed", "engine", "method", "model", "out"):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val

    if args.group == "theory":
        mode = f"theory-{args.what}"
    elif args.group == "sim":
        mode = "sim-clup" if args.what == "clup" else "sim-baseline"
    else:
        mode = "repro"

    sigma_list = None
    if merged.get("inv_sigma_list"):
        inv = [float(v) for v in str(merged["inv_sigma_list"]).split(",")]
        sigma_list = tuple(1.0 / v for v in inv)
    elif merged.get("sigma") is not None:
        sigma_list = (float(merged["sigma"]),)

    kwargs = dict(mode=mode)
    if args.group == "repro":
        kwargs["table"] = args.what
        kwargs["trials"] = merged.get("trials", 0 if args.what == "table4" else 20)
    for key in ("alpha", "beta", "r_sc", "c_l1", "n", "base_seed",
                "engine", "method", "model", "out"):
        if merged.get(key) is not None:
            kwargs[key] = merged[key]
    if args.group != "repro" and merged.get("trials") is not None:
        kwargs["trials"] = merged["trials"]
    if sigma_list is not None:
        kwargs["sigma_list"] = sigma_list
    return ExperimentConfig(**kwargs)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"clupreg: invalid configuration: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except (Diverged, InvalidBranch, NoRoot) as exc:
        print(f"clupreg: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
