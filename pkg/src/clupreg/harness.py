"""Experiment front end: sweeps, Monte Carlo scheduling, table reproduction,
and CSV/JSON emission.

The CSV is the single source of truth (one header row, '.' decimals,
%.17g floats); the JSON summary holds the config echo, seed policy, and
aggregates recomputable from the CSV rows. Identical config and base seed
produce byte-identical outputs.
"""

from __future__ import annotations

import json
import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import interval, solvers, theory
from .instances import generate, metrics, with_sigma
from .numerics import RngSeed
from .rdt_core import TheoryPoint

MODES = ("theory-stationary", "theory-tune", "theory-interval", "theory-limits",
         "theory-pt", "sim-clup", "sim-baseline", "repro")
ENGINES = ("largescale", "basic")
METHODS = ("socp", "lasso", "idealml")
TABLES = ("table1", "table2", "table3", "table4", "figure-data")

# protocol constants of the reproduction recipes: the per-SNR l1 weights of
# the fixed-radius table, and the near-universal simulation knobs (weight 5
# at 1/sigma = 7, 4.5 elsewhere)
TABLE2_CL1 = {6: 5.05, 7: 4.54, 8: 4.37, 9: 4.27, 10: 4.22,
              11: 4.17, 12: 4.14, 13: 4.12, 14: 4.10, 15: 4.09}
TABLE3_CL1 = {inv: (5.0 if inv == 7 else 4.5) for inv in range(7, 16)}
TABLE3_RSC = 2.0


@dataclass
class ExperimentConfig:
    """Validated harness configuration (flags/config-file surface)."""

    mode: str
    alpha: float = 0.5
    beta: float = 0.1625
    sigma_list: tuple = (0.1,)
    r_sc: Optional[float] = None
    c_l1: Optional[float] = None
    n: int = 2000
    trials: int = 20
    base_seed: int = 1
    engine: str = "largescale"
    method: str = "socp"
    model: str = "clup"
    table: str = "table2"
    out: str = "out.csv"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.model not in ("clup", "socp"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.mode == "repro" and self.table not in TABLES:
            raise ValueError(f"unknown table {self.table!r}")
        if self.trials < 1 and self.mode.startswith("sim"):
            raise ValueError("trials must be >= 1")
        if not self.sigma_list:
            raise ValueError("sigma_list must be non-empty")
        if not 0.0 < self.beta < self.alpha <= 1.0:
            raise ValueError("need 0 < beta < alpha <= 1")
        for s in self.sigma_list:
            if s <= 0.0:
                raise ValueError("sigma values must be > 0")


@dataclass
class TrialSummary:
    """Per-trial rows plus order-independent aggregates."""

    rows: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    failures: int = 0


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _json_path(out: str) -> str:
    p = Path(out)
    return str(p.with_suffix(".json"))


def _workers() -> int:
    env = os.environ.get("CLUP_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _agg(values) -> dict:
    vals = [float(v) for v in values if math.isfinite(v)]
    if not vals:
        return {"mean": float("nan"), "median": float("nan"), "std": float("nan")}
    return {"mean": float(np.mean(vals)),
            "median": float(statistics.median(vals)),
            "std": float(np.std(vals))}


def _theory_point(cfg: ExperimentConfig, sigma: float, r_sc: float, c_l1: float,
                  alpha_w: Optional[float] = None) -> TheoryPoint:
    aw = alpha_w if alpha_w is not None else theory.phase_transition_alpha_w(cfg.beta)
    return TheoryPoint(alpha=cfg.alpha, beta=cfg.beta, sigma=sigma, alpha_w=aw,
                       r_sc=r_sc, c_l1=c_l1)


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def _clup_trial(cfg: ExperimentConfig, trial: int, sols: dict) -> list:
    """One trial across the whole sigma sweep; the instance tensor (A, support,
    v) and its Gram matrix are drawn once per trial seed and shared."""
    seed = RngSeed(cfg.base_seed, trial)
    sigmas = sorted(cfg.sigma_list)
    base = generate(cfg.n, cfg.alpha, cfg.beta, sigmas[0], seed)
    gram = base.A.T @ base.A if cfg.engine == "largescale" else None
    gram_norm = solvers._gram_norm(gram) if cfg.engine == "basic" else None
    rows = []
    for sigma in sigmas:
        inst = with_sigma(base, sigma)
        sol = sols[sigma]
        if cfg.engine == "largescale":
            params = solvers.ClupParams(
                r_sc=sol["r_sc"], c_l1_theory=sol["c_l1"],
                gamma1_hat=sol["gamma1"], c2_hat=sol["c2"],
                seed=RngSeed(cfg.base_seed + 1, trial))
            res = solvers.clup_largescale(inst, params, gram=gram,
                                          aty=inst.A.T @ inst.y)
        else:
            res = solvers.clup_basic(inst, sol["r_sc"], sol["c_l1"],
                                     seed=RngSeed(cfg.base_seed + 1, trial),
                                     gram=inst.A.T @ inst.A,
                                     aty=inst.A.T @ inst.y, gram_norm=gram_norm)
        m = res.metrics
        xi_ls = res.trace[-1][4] if res.trace else float("nan")
        rows.append({"sigma": sigma, "trial": trial, "c1": m.c1, "c2": m.c2,
                     "delta": m.delta, "residual_norm": m.residual_norm,
                     "xi_ls": xi_ls, "iterations": res.iterations,
                     "converged": res.converged})
    return rows


def monte_carlo(cfg: ExperimentConfig) -> TrialSummary:
    """Seeded trials (stream index = trial index) with deterministic reduction.

    Sigma sweeps reuse the trial seed across sigma, so curves are coupled
    for variance-reduced comparisons. Individual trial failures are counted,
    not fatal.
    """
    aw = theory.phase_transition_alpha_w(cfg.beta)
    sols = {}
    for sigma in cfg.sigma_list:
        r_sc = cfg.r_sc if cfg.r_sc is not None else TABLE3_RSC
        c_l1 = cfg.c_l1 if cfg.c_l1 is not None else \
            TABLE3_CL1.get(round(1.0 / sigma), 4.5)
        st = theory.solve_stationary(_theory_point(cfg, sigma, r_sc, c_l1, aw))
        sols[sigma] = {"r_sc": r_sc, "c_l1": c_l1, "gamma1": st.dv.gamma1,
                       "c2": st.dv.c2}
    summary = TrialSummary()
    results = {}
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        futs = {pool.submit(_clup_trial, cfg, t, sols): t
                for t in range(cfg.trials)}
        for fut, t in futs.items():
            try:
                results[t] = fut.result()
            except Exception:
                summary.failures += 1
    for t in sorted(results):
        summary.rows.extend(results[t])
    for sigma in sorted(cfg.sigma_list):
        rows = [r for r in summary.rows if r["sigma"] == sigma]
        summary.aggregates[f"{sigma:.17g}"] = {
            key: _agg(r[key] for r in rows)
            for key in ("c1", "c2", "delta", "xi_ls")}
    return summary


def _baseline_trial(cfg: ExperimentConfig, trial: int, aw: float) -> list:
    seed = RngSeed(cfg.base_seed, trial)
    sigmas = sorted(cfg.sigma_list)
    base = generate(cfg.n, cfg.alpha, cfg.beta, sigmas[0], seed)
    gram = base.A.T @ base.A
    gnorm = solvers._gram_norm(gram)
    rows = []
    for sigma in sigmas:
        inst = with_sigma(base, sigma)
        aty = inst.A.T @ inst.y
        if cfg.method == "socp":
            r_sc = cfg.r_sc if cfg.r_sc is not None else 1.0
            r = r_sc * sigma * math.sqrt((cfg.alpha - aw) * cfg.n)
            x = solvers.socp_linear(inst, None, 1.0, r, gram=gram, aty=aty,
                                    gram_norm=gnorm)
        elif cfg.method == "lasso":
            c = cfg.c_l1 if cfg.c_l1 is not None else theory.theorem1_cl1(cfg.beta, aw)
            x = solvers.lasso_solve(inst, c, gram=gram, aty=aty, gram_norm=gnorm)
        else:
            x = solvers.ideal_ml_estimate(inst)
        m = metrics(inst, x)
        rows.append({"sigma": sigma, "trial": trial, "c1": m.c1, "c2": m.c2,
                     "delta": m.delta, "residual_norm": m.residual_norm})
    return rows


def monte_carlo_baseline(cfg: ExperimentConfig) -> TrialSummary:
    aw = theory.phase_transition_alpha_w(cfg.beta)
    summary = TrialSummary()
    results = {}
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        futs = {pool.submit(_baseline_trial, cfg, t, aw): t
                for t in range(cfg.trials)}
        for fut, t in futs.items():
            try:
                results[t] = fut.result()
            except Exception:
                summary.failures += 1
    for t in sorted(results):
        summary.rows.extend(results[t])
    for sigma in sorted(cfg.sigma_list):
        rows = [r for r in summary.rows if r["sigma"] == sigma]
        summary.aggregates[f"{sigma:.17g}"] = {
            key: _agg(r[key] for r in rows) for key in ("c1", "c2", "delta")}
    return summary


# ---------------------------------------------------------------------------
# Modes
# ---------------------------------------------------------------------------

def _run_theory_pt(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    resid = theory._pt_residual(aw, cfg.beta)
    header = ["beta", "alpha_w", "pt_residual"]
    return header, [[cfg.beta, aw, resid]], {}


def _run_theory_stationary(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    r_sc = cfg.r_sc if cfg.r_sc is not None else 2.0
    c_l1 = cfg.c_l1 if cfg.c_l1 is not None else 4.5
    header = ["inv_sigma", "sigma", "r_sc", "c_l1", "model", "gamma1", "nu",
              "c1", "c2", "xi", "delta", "delta_over_sigma"]
    rows = []
    for sigma in sorted(cfg.sigma_list):
        st = theory.solve_stationary(_theory_point(cfg, sigma, r_sc, c_l1, aw),
                                     model=cfg.model)
        rows.append([1.0 / sigma, sigma, r_sc, c_l1, cfg.model, st.dv.gamma1,
                     st.dv.nu, st.dv.c1, st.dv.c2, st.xi, st.delta,
                     st.delta / sigma])
    return header, rows, {}


def _run_theory_tune(cfg: ExperimentConfig):
    header = ["inv_sigma", "sigma", "c_l1", "r_sc", "c2", "c1", "xi", "delta",
              "delta_over_sigma"]
    rows = []
    for sigma in sorted(cfg.sigma_list):
        r_sc, c_l1, sol = theory.tune_very_ultimate(cfg.alpha, cfg.beta, sigma)
        rows.append([1.0 / sigma, sigma, c_l1, r_sc, sol.dv.c2, sol.dv.c1,
                     sol.xi, sol.delta, sol.delta / sigma])
    return header, rows, {}


def _run_theory_interval(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    r_sc = cfg.r_sc if cfg.r_sc is not None else 2.0
    c_l1 = cfg.c_l1 if cfg.c_l1 is not None else 4.5
    header = ["inv_sigma", "sigma", "r_sc", "c_l1", "xi_ub", "delta_lb",
              "delta_ub", "delta_stationary"]
    rows = []
    for sigma in sorted(cfg.sigma_list):
        tp = _theory_point(cfg, sigma, r_sc, c_l1, aw)
        st = theory.solve_stationary(tp)
        res = interval.delta_interval(tp, stationary=st)
        rows.append([1.0 / sigma, sigma, r_sc, c_l1, res.xi_ub, res.delta_lb,
                     res.delta_ub, st.delta])
    return header, rows, {}


def _run_theory_limits(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    r_opt, c_opt, ratio = theory.sigma0_limits(cfg.alpha, cfg.beta, aw)
    lim = float("nan")
    if cfg.r_sc is not None and cfg.c_l1 is not None:
        lim = theory.limit_mse_ratio(cfg.alpha, cfg.beta, cfg.r_sc, cfg.c_l1)
    header = ["alpha", "beta", "alpha_w", "r_sc_opt", "c_l1_opt",
              "delta_ratio_limit", "limit_mse_ratio_at_knobs"]
    return header, [[cfg.alpha, cfg.beta, aw, r_opt, c_opt, ratio, lim]], {}


def _run_sim_clup(cfg: ExperimentConfig):
    summary = monte_carlo(cfg)
    header = ["inv_sigma", "sigma", "trial", "seed_base", "seed_stream", "n",
              "engine", "c1", "c2", "delta", "residual_norm", "xi_ls",
              "iterations", "converged"]
    rows = [[1.0 / r["sigma"], r["sigma"], r["trial"], cfg.base_seed,
             r["trial"], cfg.n, cfg.engine, r["c1"], r["c2"], r["delta"],
             r["residual_norm"], r["xi_ls"], r["iterations"],
             int(r["converged"])]
            for r in sorted(summary.rows, key=lambda r: (r["sigma"], r["trial"]))]
    extras = {"aggregates": summary.aggregates, "failures": summary.failures}
    return header, rows, extras


def _run_sim_baseline(cfg: ExperimentConfig):
    summary = monte_carlo_baseline(cfg)
    header = ["inv_sigma", "sigma", "trial", "seed_base", "seed_stream", "n",
              "method", "c1", "c2", "delta", "residual_norm"]
    rows = [[1.0 / r["sigma"], r["sigma"], r["trial"], cfg.base_seed,
             r["trial"], cfg.n, cfg.method, r["c1"], r["c2"], r["delta"],
             r["residual_norm"]]
            for r in sorted(summary.rows, key=lambda r: (r["sigma"], r["trial"]))]
    extras = {"aggregates": summary.aggregates, "failures": summary.failures}
    return header, rows, extras


# ---------------------------------------------------------------------------
# Reproduction recipes
# ---------------------------------------------------------------------------

def _repro_table1(cfg: ExperimentConfig):
    header = ["inv_sigma", "c_l1", "r_sc", "c2", "c1", "xi", "delta",
              "delta_over_sigma"]
    rows = []
    for inv in list(range(6, 16)) + [100]:
        sigma = 1.0 / inv
        r_sc, c_l1, sol = theory.tune_very_ultimate(cfg.alpha, cfg.beta, sigma)
        rows.append([float(inv), c_l1, r_sc, sol.dv.c2, sol.dv.c1, sol.xi,
                     sol.delta, sol.delta / sigma])
    aw = theory.phase_transition_alpha_w(cfg.beta)
    r_opt, c_opt, ratio = theory.sigma0_limits(cfg.alpha, cfg.beta, aw)
    rows.append([float("inf"), c_opt, r_opt, 1.0, 1.0, 0.0, 0.0, ratio])
    return header, rows, {}


def _repro_table2(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    header = ["inv_sigma", "c_l1", "r_sc", "c2", "c1", "xi", "delta"]
    rows = []
    for inv, c_l1 in sorted(TABLE2_CL1.items()):
        st = theory.solve_stationary(_theory_point(cfg, 1.0 / inv, 2.0, c_l1, aw))
        rows.append([float(inv), c_l1, 2.0, st.dv.c2, st.dv.c1, st.xi, st.delta])
    return header, rows, {}


def _repro_table3(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    header = ["inv_sigma", "gamma1", "c2_theory", "c2_sim_median", "c1_theory",
              "c1_sim_median", "xi_theory", "xi_ls_sim_median", "delta_theory",
              "delta_sim_mean", "delta_sim_median", "trials"]
    sigmas = tuple(1.0 / inv for inv in sorted(TABLE3_CL1))
    theory_rows = {}
    for inv, c_l1 in sorted(TABLE3_CL1.items()):
        st = theory.solve_stationary(
            _theory_point(cfg, 1.0 / inv, TABLE3_RSC, c_l1, aw))
        theory_rows[inv] = st
    if cfg.trials > 0:
        sim_cfg = ExperimentConfig(mode="sim-clup", alpha=cfg.alpha, beta=cfg.beta,
                                   sigma_list=sigmas, n=cfg.n, trials=cfg.trials,
                                   base_seed=cfg.base_seed, engine="largescale",
                                   out=cfg.out)
        summary = monte_carlo(sim_cfg)
    else:
        summary = TrialSummary()
    rows = []
    for inv in sorted(TABLE3_CL1):
        st = theory_rows[inv]
        agg = summary.aggregates.get(f"{1.0 / inv:.17g}", {})
        rows.append([
            float(inv), st.dv.gamma1,
            st.dv.c2, agg.get("c2", {}).get("median", float("nan")),
            st.dv.c1, agg.get("c1", {}).get("median", float("nan")),
            st.xi, agg.get("xi_ls", {}).get("median", float("nan")),
            st.delta, agg.get("delta", {}).get("mean", float("nan")),
            agg.get("delta", {}).get("median", float("nan")), cfg.trials])
    return header, rows, {"failures": summary.failures}


def _repro_table4(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    header = ["inv_sigma", "delta_lb", "delta_theory", "delta_sim_mean",
              "delta_sim_median", "delta_ub", "xi_ub"]
    sim_agg = {}
    if cfg.trials > 0:
        sigmas = tuple(1.0 / inv for inv in range(8, 16))
        sim_cfg = ExperimentConfig(mode="sim-clup", alpha=cfg.alpha, beta=cfg.beta,
                                   sigma_list=sigmas, n=cfg.n, trials=cfg.trials,
                                   base_seed=cfg.base_seed, engine="largescale",
                                   c_l1=4.5, r_sc=2.0, out=cfg.out)
        sim_agg = monte_carlo(sim_cfg).aggregates
    rows = []
    for inv in range(8, 16):
        sigma = 1.0 / inv
        tp = _theory_point(cfg, sigma, 2.0, 4.5, aw)
        st = theory.solve_stationary(tp)
        res = interval.delta_interval(tp, stationary=st)
        agg = sim_agg.get(f"{sigma:.17g}", {}).get("delta", {})
        rows.append([float(inv), res.delta_lb, st.delta,
                     agg.get("mean", float("nan")),
                     agg.get("median", float("nan")), res.delta_ub, res.xi_ub])
    return header, rows, {}


def _repro_figure_data(cfg: ExperimentConfig):
    aw = theory.phase_transition_alpha_w(cfg.beta)
    iml = theory.ideal_ml_theory(cfg.alpha, cfg.beta).delta_over_sigma
    header = ["inv_sigma", "sigma", "delta_lasso_socp", "delta_clup_very_ultimate",
              "delta_clup_ultimate_rsc2", "delta_ideal_ml", "delta_lb", "delta_ub"]
    invs = sorted(round(1.0 / s) for s in cfg.sigma_list) if cfg.sigma_list != (0.1,) \
        else list(range(6, 16))
    rows = []
    for inv in invs:
        sigma = 1.0 / inv
        plain = theory.plain_worst_mse(cfg.alpha, aw, sigma)
        _, _, vult = theory.tune_very_ultimate(cfg.alpha, cfg.beta, sigma)
        _, ult = theory.tune_ultimate_cl1(cfg.alpha, cfg.beta, sigma, 2.0)
        lb = ub = float("nan")
        try:
            res = interval.delta_interval(_theory_point(cfg, sigma, 2.0, 4.5, aw))
            lb, ub = res.delta_lb, res.delta_ub
        except Exception:
            pass
        rows.append([float(inv), sigma, plain, vult.delta, ult.delta,
                     sigma * iml, lb, ub])
    return header, rows, {}


_REPRO = {"table1": _repro_table1, "table2": _repro_table2,
          "table3": _repro_table3, "table4": _repro_table4,
          "figure-data": _repro_figure_data}

_RUNNERS = {"theory-pt": _run_theory_pt,
            "theory-stationary": _run_theory_stationary,
            "theory-tune": _run_theory_tune,
            "theory-interval": _run_theory_interval,
            "theory-limits": _run_theory_limits,
            "sim-clup": _run_sim_clup,
            "sim-baseline": _run_sim_baseline}


def repro(table: str, cfg: Optional[ExperimentConfig] = None) -> tuple:
    """Regenerate one of the reference tables; returns (header, rows, extras)."""
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}")
    if cfg is None:
        cfg = ExperimentConfig(mode="repro", table=table,
                               trials=0 if table == "table4" else 20)
    return _REPRO[table](cfg)


def run(cfg: ExperimentConfig) -> int:
    """Execute a config: write the CSV and its JSON summary, return 0 on success."""
    if cfg.mode == "repro":
        header, rows, extras = repro(cfg.table, cfg)
    else:
        header, rows, extras = _RUNNERS[cfg.mode](cfg)
    write_csv(cfg.out, header, rows)
    payload = {
        "config": asdict(cfg),
        "columns": list(header),
        "row_count": len(rows),
        "seed_policy": "trial t uses stream index t; sigma sweeps share trial seeds",
    }
    payload.update(extras)
    write_json(_json_path(cfg.out), payload)
    return 0
