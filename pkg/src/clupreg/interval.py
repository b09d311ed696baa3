"""Simple interval bounds on the fixed-point MSE.

Computes the upper objective xi_ub (inner min over c2 of the
(gamma1, nu)-maximized dual plus sqrt(c2), then min over c1) and the MSE
interval [delta_lb, delta_ub] as the extrema of sqrt(1 - 2 c1 + c2) over
the level set where the (gamma1, nu)-maximized dual equals xi_ub.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import numerics
from .numerics import Diverged
from .rdt_core import DualVariables, TheoryPoint, big_i, dI_dgamma1, dI_dnu, xi_rd
from .theory import StationarySolution, solve_stationary


class EmptyLevelSet(RuntimeError):
    """No level-set crossing found; the scan grid is too coarse."""


@dataclass(frozen=True)
class IntervalResult:
    """Upper objective and the MSE interval it induces."""

    xi_ub: float
    delta_lb: float
    delta_ub: float


def _inner_residual(z: np.ndarray, tp: TheoryPoint, c1: float, c2: float) -> np.ndarray:
    """Gradient of xi in (gamma1, nu) at fixed (c1, c2); z = (log g1, nu*sigma)."""
    g1 = math.exp(min(z[0], 60.0))
    nu = min(z[1], -1e-300) / tp.sigma
    dv = DualVariables(c1=c1, c2=c2, gamma1=g1, nu=nu)
    I = big_i(tp, dv)
    sI = math.sqrt(max(I, 1e-300))
    sc2 = math.sqrt(max(c2, 1e-300))
    d2 = max(1.0 - 2.0 * c1 + c2 + tp.sigma ** 2, 1e-300)
    r1 = -sc2 / (2.0 * sI) * dI_dnu(tp, dv) - c1 * math.sqrt(tp.beta)
    r2 = math.sqrt(tp.alpha) * math.sqrt(d2) - tp.r - sc2 / (2.0 * sI) * dI_dgamma1(tp, dv)
    return np.array([r1, r2])


def _inner_max(tp: TheoryPoint, c1: float, c2: float,
               warm: np.ndarray) -> Optional[tuple[float, np.ndarray]]:
    """Stationary (gamma1, nu) of the inner maximization; returns (xi, z)."""
    try:
        z = numerics.solve_system(lambda z: _inner_residual(z, tp, c1, c2), warm,
                                  tol=1e-11, max_iter=60)
    except Diverged:
        return None
    if z[1] >= 0.0:
        return None
    dv = DualVariables(c1=c1, c2=c2, gamma1=math.exp(z[0]), nu=z[1] / tp.sigma)
    return xi_rd(tp, dv), z


def _slice_residual(w: np.ndarray, tp: TheoryPoint, c1: float) -> np.ndarray:
    """Inner min-max system at fixed c1: gradient in (gamma1, nu) plus the
    raw c2-derivative of (xi + sqrt(c2)); w = (log g1, nu*sigma, c2)."""
    g1 = math.exp(min(w[0], 60.0))
    nu = min(w[1], -1e-300) / tp.sigma
    c2 = max(w[2], 1e-12)
    dv = DualVariables(c1=c1, c2=c2, gamma1=g1, nu=nu)
    I = big_i(tp, dv)
    sI = math.sqrt(max(I, 1e-300))
    sc2 = math.sqrt(c2)
    d2 = max(1.0 - 2.0 * c1 + c2 + tp.sigma ** 2, 1e-300)
    r1 = -sc2 / (2.0 * sI) * dI_dnu(tp, dv) - c1 * math.sqrt(tp.beta)
    r2 = math.sqrt(tp.alpha) * math.sqrt(d2) - tp.r - sc2 / (2.0 * sI) * dI_dgamma1(tp, dv)
    r3 = g1 * math.sqrt(tp.alpha) / math.sqrt(d2) - sI / sc2
    return np.array([r1, r2, r3])


def _slice_solve(tp: TheoryPoint, c1: float,
                 warm: np.ndarray) -> Optional[tuple[float, np.ndarray]]:
    """Solve the fixed-c1 slice; returns (xi at the triplet, w)."""
    try:
        w = numerics.solve_system(lambda w: _slice_residual(w, tp, c1), warm,
                                  tol=1e-11, max_iter=60)
    except Diverged:
        return None
    if w[1] >= 0.0 or not 0.0 < w[2] <= 1.0 + 1e-9:
        return None
    dv = DualVariables(c1=c1, c2=min(w[2], 1.0), gamma1=math.exp(w[0]),
                       nu=w[1] / tp.sigma)
    return xi_rd(tp, dv), w


def xi_upper(tp: TheoryPoint, c1_step: float = 1e-3,
             stationary: Optional[StationarySolution] = None) -> float:
    """Upper objective: min over c1 of xi at the c2-minimized inner max.

    Marches c1 away from the stationary point in steps of c1_step with
    warm-started slice solves until the inner solver fails or the domain
    ends, then refines the discrete minimum with a parabolic fit.
    Deterministic for fixed inputs.
    """
    st = stationary if stationary is not None else solve_stationary(tp)
    w0 = np.array([math.log(st.dv.gamma1), st.dv.nu * tp.sigma, st.dv.c2])
    out = _slice_solve(tp, st.dv.c1, w0)
    if out is None:
        raise Diverged("slice solve failed at the stationary c1")
    samples = {st.dv.c1: out[0]}
    for direction in (+1.0, -1.0):
        warm = out[1].copy()
        c1 = st.dv.c1
        while True:
            c1 = c1 + direction * c1_step
            if not 1e-3 <= c1 <= 1.0 - 1e-6:
                break
            res = _slice_solve(tp, c1, warm)
            if res is None:
                break
            samples[c1] = res[0]
            warm = res[1]
    c1s = sorted(samples)
    vals = [samples[c] for c in c1s]
    i = int(np.argmin(vals))
    if 0 < i < len(c1s) - 1:
        # parabolic refinement through the three bracketing samples
        x0, x1, x2 = c1s[i - 1], c1s[i], c1s[i + 1]
        y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        if denom != 0.0:
            a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
            b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
            if a > 0.0:
                c1_star = -b / (2.0 * a)
                if x0 <= c1_star <= x2:
                    warm = out[1]
                    res = _slice_solve(tp, c1_star, warm)
                    if res is not None and res[0] < vals[i]:
                        return res[0]
    return vals[i]


def _probe_extent(tp: TheoryPoint, st: StationarySolution, xi_ub: float,
                  axis: int, direction: float, z0: np.ndarray) -> float:
    """Distance from the stationary point to the level set along one axis."""
    c = [st.dv.c1, st.dv.c2]
    step = 2e-3
    warm = z0.copy()
    dist = 0.0
    for _ in range(600):
        dist += step
        c_try = list(c)
        c_try[axis] += direction * dist
        if not (0.0 < c_try[0] < 1.0 and c_try[0] ** 2 < c_try[1] <= 1.0):
            return dist
        out = _inner_max(tp, c_try[0], c_try[1], warm)
        if out is None:
            return dist
        warm = out[1]
        if out[0] >= xi_ub:
            return dist
    return dist


def delta_interval(tp: TheoryPoint, grid: int = 200,
                   stationary: Optional[StationarySolution] = None) -> IntervalResult:
    """MSE interval from the level set of the inner-maximized dual at xi_ub.

    Scans a (c1, c2) window around the stationary point (sized by 1-D
    probes of the level set), locates sign changes of g - xi_ub along grid
    edges, polishes each crossing by bisection, and returns the extrema of
    sqrt(1 - 2 c1 + c2) over the polished level set.
    """
    st = stationary if stationary is not None else solve_stationary(tp)
    ub = xi_upper(tp, stationary=st)
    z0 = np.array([math.log(st.dv.gamma1), st.dv.nu * tp.sigma])

    ext = [_probe_extent(tp, st, ub, axis, d, z0)
           for axis in (0, 1) for d in (+1.0, -1.0)]
    margin = 1.4
    c1_lo = max(1e-3, st.dv.c1 - margin * ext[1])
    c1_hi = min(1.0 - 1e-6, st.dv.c1 + margin * ext[0])
    c2_lo = max(1e-3, st.dv.c2 - margin * ext[3])
    c2_hi = min(1.0, st.dv.c2 + margin * ext[2])

    c1g = np.linspace(c1_lo, c1_hi, grid)
    c2g = np.linspace(c2_lo, c2_hi, grid)
    G = np.full((grid, grid), np.nan)
    Z = np.empty((grid, grid, 2))
    for i, c1 in enumerate(c1g):
        warm = z0.copy()
        row_started = False
        for j, c2 in enumerate(c2g):
            if c1 * c1 >= c2:
                continue
            out = _inner_max(tp, c1, c2, warm)
            if out is None and row_started:
                out = _inner_max(tp, c1, c2, z0)
            if out is None:
                continue
            G[i, j] = out[0]
            Z[i, j] = out[1]
            warm = out[1]
            row_started = True

    D = G - ub

    def polish(ca, cb, za, fa) -> tuple[float, float]:
        """Bisect g - xi_ub = 0 on the segment ca -> cb (fa = sign at ca)."""
        lo, hi = 0.0, 1.0
        warm = za.copy()
        point = cb
        for _ in range(20):
            t = 0.5 * (lo + hi)
            c1 = ca[0] * (1.0 - t) + cb[0] * t
            c2 = ca[1] * (1.0 - t) + cb[1] * t
            out = _inner_max(tp, c1, c2, warm)
            if out is None:
                break
            warm = out[1]
            if (out[0] - ub) * fa < 0.0:
                hi = t
            else:
                lo = t
            point = (c1, c2)
        return point

    level_pts = []
    for i in range(grid):
        for j in range(grid):
            if not np.isfinite(D[i, j]):
                continue
            for di, dj in ((0, 1), (1, 0)):
                i2, j2 = i + di, j + dj
                if i2 >= grid or j2 >= grid or not np.isfinite(D[i2, j2]):
                    continue
                if D[i, j] == 0.0:
                    level_pts.append((c1g[i], c2g[j]))
                elif D[i, j] * D[i2, j2] < 0.0:
                    pt = polish((c1g[i], c2g[j]), (c1g[i2], c2g[j2]),
                                Z[i, j], D[i, j])
                    level_pts.append(pt)
    if not level_pts:
        raise EmptyLevelSet("no crossing of the xi_ub level found on the grid")
    deltas = [math.sqrt(max(1.0 - 2.0 * c1 + c2, 0.0)) for c1, c2 in level_pts]
    return IntervalResult(xi_ub=ub, delta_lb=min(deltas), delta_ub=max(deltas))
