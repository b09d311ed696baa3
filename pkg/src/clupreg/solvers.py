"""Finite-n solvers: the large-scale contraction, the basic iterative scheme
with inner convex solves, l1 baselines, and the known-support oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .instances import Metrics, ProblemInstance, metrics
from .numerics import MaxIterations, RngSeed, gaussian_stream, make_generator
from .theory import phase_transition_alpha_w


class NonFinite(RuntimeError):
    """An iterate overflowed (stabilizer too small for the spectrum)."""


class InnerInfeasible(RuntimeError):
    """The residual ball excludes every x reachable by the inner solver."""


class SingularGram(RuntimeError):
    """The on-support Gram matrix is numerically singular."""


@dataclass(frozen=True)
class ClupParams:
    """Contraction configuration.

    gamma1_hat and c2_hat are the theory-scale values of a stationary
    solution; the solver applies the algorithm-level scaling internally
    (c_l1 and gamma1 are divided by sqrt(n), the radius is
    r_sc * sigma * sqrt((alpha - alpha_w) n)). c_q2_init defaults to
    7 sqrt(n) when left as None.
    """

    r_sc: float
    c_l1_theory: float
    gamma1_hat: float
    c2_hat: float
    seed: RngSeed = RngSeed(1)
    c_q2_init: Optional[float] = None
    c_q2_growth: float = 1.02
    c_q2_period: int = 50
    max_iter: int = 3000
    conv_tol: float = 1e-6
    trace_stride: int = 50

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class ClupResult:
    """Estimate, trajectory diagnostics, and convergence status."""

    x_hat: np.ndarray
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    metrics: Optional[Metrics] = None


def _r_socp(inst: ProblemInstance) -> float:
    alpha = inst.m / inst.n
    alpha_w = phase_transition_alpha_w(inst.k / inst.n)
    return inst.sigma * math.sqrt((alpha - alpha_w) * inst.n)


def _sign_init(seed: RngSeed, n: int) -> np.ndarray:
    """Random +-1/sqrt(n) start vector, seeded independently of the instance."""
    s = np.sign(gaussian_stream(seed, n))
    s[s == 0.0] = 1.0
    return s / math.sqrt(n)


def clup_largescale(inst: ProblemInstance, p: ClupParams,
                    gram: Optional[np.ndarray] = None,
                    aty: Optional[np.ndarray] = None) -> ClupResult:
    """Fixed-point contraction with scaled regularization.

    Per iteration the core computation is a single product of the
    precomputed n x n Gram matrix with the iterate:

        x <- [c_q2 x - ch sign(x) sqrt(c2h) r + g1 (A'y) sqrt(c2h)
              - g1 (A'A x) sqrt(c2h)] / (c_q2 - r)

    with ch = c_l1/sqrt(n), g1 = gamma1/sqrt(n), r = r_sc * r_socp, and
    c_q2 grown by c_q2_growth every c_q2_period iterations.
    """
    n = inst.n
    rs = p.r_sc * _r_socp(inst)
    c_q2 = p.c_q2_init if p.c_q2_init is not None else 7.0 * math.sqrt(n)
    if not c_q2 > rs:
        raise ValueError(f"c_q2_init {c_q2} must exceed the scaled radius {rs}")
    G = gram if gram is not None else inst.A.T @ inst.A
    b = aty if aty is not None else inst.A.T @ inst.y
    yty = float(inst.y @ inst.y)
    ch = p.c_l1_theory / math.sqrt(n)
    g1 = p.gamma1_hat / math.sqrt(n)
    sc2 = math.sqrt(p.c2_hat)

    x = _sign_init(p.seed, n)
    trace = []
    converged = False
    it = 0
    for it in range(1, p.max_iter + 1):
        if it % p.c_q2_period == 0:
            c_q2 *= p.c_q2_growth
        Gx = G @ x
        if p.trace_stride and (it == 1 or it % p.trace_stride == 0):
            res2 = yty - 2.0 * float(x @ b) + float(x @ Gx)
            res = math.sqrt(max(res2, 0.0))
            xi_ls = -float(np.linalg.norm(x)) + ch * float(np.abs(x).sum()) \
                + g1 * (res - rs)
            trace.append((it, float(inst.x_sol @ x), float(x @ x), res, xi_ls))
        x_new = (c_q2 * x - ch * np.sign(x) * sc2 * rs + g1 * b * sc2
                 - g1 * Gx * sc2) / (c_q2 - rs)
        rel = float(np.linalg.norm(x_new - x)) / max(float(np.linalg.norm(x)), 1e-300)
        if not math.isfinite(rel):
            raise NonFinite(f"iterate overflowed at iteration {it}")
        x = x_new
        if rel <= p.conv_tol:
            converged = True
            break
    return ClupResult(x_hat=x, iterations=it, converged=converged, trace=trace,
                      metrics=metrics(inst, x))


# ---------------------------------------------------------------------------
# Inner convex engine: accelerated proximal gradient on the penalized form
# ---------------------------------------------------------------------------

def _soft(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def _gram_norm(G: np.ndarray, seed: int = 9) -> float:
    """Power-iteration estimate of ||A'A||_2, inflated for a safe step."""
    rng = make_generator(RngSeed(seed, 0))
    v = rng.standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    lam = 1.0
    for _ in range(40):
        w = G @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 1.0
        v = w / lam
    return 1.05 * lam


def _fista(G: np.ndarray, b: np.ndarray, yty: float, a: Optional[np.ndarray],
           lam: float, c: float, x0: np.ndarray, L: float,
           tol: float, max_iter: int) -> tuple[np.ndarray, float, bool]:
    """min_x lam/2 ||y - A x||^2 - a'x + c ||x||_1 (a may be None for 0).

    Returns (x, residual norm ||y - A x||, converged flag). The data term
    is evaluated through the Gram form, so each iteration costs one n x n
    matvec.
    """
    t = 1.0 / (lam * L)
    thr = c * t
    x = x0.copy()
    z = x.copy()
    theta = 1.0
    converged = False
    for _ in range(max_iter):
        Gz = G @ z
        grad = lam * (Gz - b)
        if a is not None:
            grad -= a
        x_new = _soft(z - t * grad, thr)
        rel = float(np.linalg.norm(x_new - x)) / max(float(np.linalg.norm(x)), 1e-12)
        theta_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta * theta))
        z = x_new + ((theta - 1.0) / theta_new) * (x_new - x)
        x = x_new
        theta = theta_new
        if rel <= tol:
            converged = True
            break
    res2 = yty - 2.0 * float(x @ b) + float(x @ (G @ x))
    return x, math.sqrt(max(res2, 0.0)), converged


def socp_linear(inst: ProblemInstance, a: Optional[np.ndarray], c: float, r: float,
                gram: Optional[np.ndarray] = None, aty: Optional[np.ndarray] = None,
                gram_norm: Optional[float] = None, x0: Optional[np.ndarray] = None,
                rel_tol: float = 1e-6, max_fista_iter: int = 4000) -> np.ndarray:
    """min_x -a'x + c ||x||_1 subject to ||y - A x||_2 <= r.

    Penalty continuation: solves min -a'x + c||x||_1 + (lam/2)||y - A x||^2
    by accelerated proximal gradient and bisects lam on log scale until the
    residual norm hits r (1 +- rel_tol), or returns the interior minimizer
    when the weakest penalty already lands inside the ball.
    """
    if r <= 0.0:
        raise ValueError("r must be > 0")
    n = inst.n
    G = gram if gram is not None else inst.A.T @ inst.A
    b = aty if aty is not None else inst.A.T @ inst.y
    yty = float(inst.y @ inst.y)
    L = gram_norm if gram_norm is not None else _gram_norm(G)
    a_vec = None if a is None or not np.any(a) else np.asarray(a, dtype=float)

    y_norm = math.sqrt(yty)
    if a_vec is None and y_norm <= r:
        return np.zeros(n)

    scale = inst.sigma * math.sqrt(inst.m)
    if scale <= 0.0:
        scale = y_norm / math.sqrt(inst.m)
    lo, hi = math.log(1e-6 * scale), math.log(1e6 * scale)
    x = x0.copy() if x0 is not None else np.zeros(n)

    x_lo, res_lo, _ = _fista(G, b, yty, a_vec, math.exp(lo), c, x, L,
                             tol=1e-8, max_iter=max_fista_iter)
    if res_lo <= r:
        # weakest data weight is already interior: unconstrained minimizer
        return x_lo
    best = None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        x, res, _ = _fista(G, b, yty, a_vec, math.exp(mid), c, x, L,
                           tol=1e-9, max_iter=max_fista_iter)
        if abs(res - r) <= rel_tol * r:
            best = (mid, x)
            break
        if res > r:
            lo = mid
        else:
            hi = mid
            best = (mid, x)  # feasible side; keep as fallback
    if best is None:
        raise MaxIterations("penalty continuation did not reach the residual target")
    lam, x = best
    x, res, _ = _fista(G, b, yty, a_vec, math.exp(lam), c, x, L,
                       tol=1e-11, max_iter=max_fista_iter)
    if res > r * (1.0 + 10.0 * rel_tol):
        raise InnerInfeasible(f"residual {res:.6g} exceeds the ball radius {r:.6g}")
    return x


def lasso_solve(inst: ProblemInstance, c: float,
                gram: Optional[np.ndarray] = None, aty: Optional[np.ndarray] = None,
                gram_norm: Optional[float] = None,
                max_fista_iter: int = 4000) -> np.ndarray:
    """min_x ||y - A x||_2 + c ||x||_1 (un-squared residual norm).

    First-order equivalence with the quadratic family: x minimizes the
    un-squared objective iff it minimizes (1/(2 lam))||y - A x||^2 + c||x||_1
    at the fixed point lam = ||y - A x(lam)||; lam is found by bisection on
    the decreasing gap ||y - A x(lam)|| - lam.
    """
    if c <= 0.0:
        raise ValueError("c must be > 0")
    n = inst.n
    G = gram if gram is not None else inst.A.T @ inst.A
    b = aty if aty is not None else inst.A.T @ inst.y
    yty = float(inst.y @ inst.y)
    y_norm = math.sqrt(yty)
    if c >= float(np.max(np.abs(b))) / y_norm:
        return np.zeros(n)  # full shrinkage: zero is stationary
    L = gram_norm if gram_norm is not None else _gram_norm(G)

    def solve_at(lam: float, x0: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
        # argmin 1/2||y-Ax||^2 + lam c ||x||_1 (FISTA weight lam*c, lam_data=1)
        x, res, _ = _fista(G, b, yty, None, 1.0, lam * c, x0, L,
                           tol=tol, max_iter=max_fista_iter)
        return x, res

    scale = inst.sigma * math.sqrt(inst.m)
    if scale <= 0.0:
        scale = y_norm / math.sqrt(inst.m)
    lo, hi = math.log(1e-6 * scale), math.log(1e6 * scale)
    x = np.zeros(n)
    # psi(lam) = res(lam) - lam, positive at the small-lam end, negative at
    # the large end; bisect the down-crossing
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lam = math.exp(mid)
        x, res = solve_at(lam, x, 1e-9)
        gap = res - lam
        if abs(gap) <= 1e-7 * max(lam, 1e-300):
            break
        if gap > 0.0:
            lo = mid
        else:
            hi = mid
    lam = math.exp(0.5 * (lo + hi))
    x, _ = solve_at(lam, x, 1e-11)
    return x


def clup_basic(inst: ProblemInstance, r_sc: float, c_l1_theory: float,
               max_outer: int = 50, seed: RngSeed = RngSeed(12345),
               outer_tol: float = 1e-6,
               gram: Optional[np.ndarray] = None, aty: Optional[np.ndarray] = None,
               gram_norm: Optional[float] = None) -> ClupResult:
    """Basic iterative scheme: inner cone-constrained solves plus normalization.

    Each outer step solves min_x -(x_prev)'x + ch ||x||_1 s.t.
    ||y - A x|| <= r (ch = c_l1/sqrt(n), r = r_sc r_socp), then renormalizes
    the direction. Stops when successive normalized iterates differ by less
    than outer_tol. x_hat is the last inner (pre-normalization) solution,
    whose norm tracks sqrt(c2).
    """
    if max_outer < 1:
        raise ValueError("max_outer must be >= 1")
    n = inst.n
    rs = r_sc * _r_socp(inst)
    ch = c_l1_theory / math.sqrt(n)
    G = gram if gram is not None else inst.A.T @ inst.A
    b = aty if aty is not None else inst.A.T @ inst.y
    L = gram_norm if gram_norm is not None else _gram_norm(G)
    x_dir = _sign_init(seed, n)
    x_s = np.zeros(n)
    trace = []
    converged = False
    it = 0
    for it in range(1, max_outer + 1):
        x_s = socp_linear(inst, x_dir, ch, rs, gram=G, aty=b, gram_norm=L,
                          x0=x_s if it > 1 else None)
        norm = float(np.linalg.norm(x_s))
        if norm <= 0.0:
            raise InnerInfeasible("inner solution collapsed to zero")
        x_new = x_s / norm
        m = metrics(inst, x_s)
        trace.append((it, m.c1, m.c2, m.residual_norm, float("nan")))
        if float(np.linalg.norm(x_new - x_dir)) < outer_tol:
            x_dir = x_new
            converged = True
            break
        x_dir = x_new
    return ClupResult(x_hat=x_s, iterations=it, converged=converged, trace=trace,
                      metrics=metrics(inst, x_s))


def ideal_ml_estimate(inst: ProblemInstance) -> np.ndarray:
    """Known-support least squares: normal equations on the true support."""
    support = inst.support
    k = support.size
    if inst.m < k:
        raise ValueError("need m >= k for the on-support normal equations")
    Ak = inst.A[:, support]
    gram = Ak.T @ Ak
    try:
        cho = scipy.linalg.cho_factor(gram)
        xk = scipy.linalg.cho_solve(cho, Ak.T @ inst.y)
    except scipy.linalg.LinAlgError as exc:
        raise SingularGram(str(exc)) from exc
    x = np.zeros(inst.n)
    x[support] = xk
    return x
