"""Synthetic sparse-regression instances and performance metrics."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .numerics import RngSeed, make_generator


@dataclass(frozen=True)
class ProblemInstance:
    """One finite-n realization y = A x_sol + sigma v.

    A is m x n i.i.d. standard normal; x_sol has k nonzeros of 1/sqrt(k)
    on a seeded random support; v is i.i.d. standard normal. The instance
    is fully determined by (n, alpha, beta, sigma, seed).
    """

    n: int
    m: int
    k: int
    A: np.ndarray
    x_sol: np.ndarray
    v: np.ndarray
    sigma: float
    y: np.ndarray
    seed: RngSeed

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x_sol)


@dataclass(frozen=True)
class Metrics:
    """Overlap, squared norm, MSE and data-space residual of an estimate."""

    c1: float
    c2: float
    delta: float
    residual_norm: float


def generate(n: int, alpha: float, beta: float, sigma: float, seed: RngSeed) -> ProblemInstance:
    """Draw an instance; randomness order: A row-major, support permutation, v.

    All randomness comes from the single Philox stream of `seed`, so A,
    the support and v are identical across sigma values for a fixed seed
    (sigma enters only through y).
    """
    if n < 10:
        raise ValueError("n must be >= 10")
    if not 0.0 < beta < alpha <= 1.0:
        raise ValueError("need 0 < beta < alpha <= 1")
    if sigma < 0.0:
        raise ValueError("sigma must be >= 0")
    m = round(alpha * n)
    k = round(beta * n)
    if k == 0:
        raise ValueError(f"round(beta*n) = 0 for n={n}, beta={beta}")
    rng = make_generator(seed)
    A = rng.standard_normal((m, n))
    perm = rng.permutation(n)
    v = rng.standard_normal(m)
    x_sol = np.zeros(n)
    x_sol[perm[:k]] = 1.0 / math.sqrt(k)
    y = A @ x_sol + sigma * v
    return ProblemInstance(n=n, m=m, k=k, A=A, x_sol=x_sol, v=v,
                           sigma=sigma, y=y, seed=seed)


def with_sigma(inst: ProblemInstance, sigma: float) -> ProblemInstance:
    """Same realization of (A, x_sol, v) with the noise level replaced.

    Identical to generate(n, alpha, beta, sigma, seed) since sigma enters
    the draw order nowhere; shares the arrays instead of redrawing them.
    """
    return ProblemInstance(n=inst.n, m=inst.m, k=inst.k, A=inst.A,
                           x_sol=inst.x_sol, v=inst.v, sigma=sigma,
                           y=inst.A @ inst.x_sol + sigma * inst.v, seed=inst.seed)


def metrics(inst: ProblemInstance, x_hat: np.ndarray) -> Metrics:
    """c1 = <x_sol, x>, c2 = ||x||^2, delta = ||x - x_sol||, and ||y - A x||."""
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != (inst.n,):
        raise ValueError(f"x_hat must have shape ({inst.n},), got {x_hat.shape}")
    c1 = float(inst.x_sol @ x_hat)
    c2 = float(x_hat @ x_hat)
    delta = float(np.linalg.norm(x_hat - inst.x_sol))
    residual = float(np.linalg.norm(inst.y - inst.A @ x_hat))
    return Metrics(c1=c1, c2=c2, delta=delta, residual_norm=residual)


# Flat little-endian binary layout for cross-implementation tests:
#   int64 n, int64 m, int64 k, float64 sigma, uint64 base, uint64 stream,
#   then float64 arrays: A row-major (m*n), x_sol (n), v (m).
_HEADER = struct.Struct("<qqqdQQ")


def dump(inst: ProblemInstance, path) -> None:
    """Write the instance in the flat binary layout (y is recomputed on load)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(inst.n, inst.m, inst.k, inst.sigma,
                              inst.seed.base, inst.seed.stream))
        fh.write(np.ascontiguousarray(inst.A, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(inst.x_sol, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(inst.v, dtype="<f8").tobytes())


def load(path) -> ProblemInstance:
    """Read an instance written by dump; y = A x_sol + sigma v is recomputed."""
    with open(path, "rb") as fh:
        n, m, k, sigma, base, stream = _HEADER.unpack(fh.read(_HEADER.size))
        A = np.frombuffer(fh.read(8 * m * n), dtype="<f8").reshape(m, n).astype(float)
        x_sol = np.frombuffer(fh.read(8 * n), dtype="<f8").astype(float)
        v = np.frombuffer(fh.read(8 * m), dtype="<f8").astype(float)
    return ProblemInstance(n=n, m=m, k=k, A=A, x_sol=x_sol, v=v, sigma=sigma,
                           y=A @ x_sol + sigma * v, seed=RngSeed(base, stream))
