"""Scalar special functions, root finding, quadrature, and seeded Gaussian streams.

Foundation layer used by every other module. All operations are pure
functions of their inputs and safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.optimize


class NoSignChange(ValueError):
    """Bracket endpoints do not straddle a root."""


class MaxIterations(RuntimeError):
    """Iteration budget exhausted before reaching the requested tolerance."""


class Diverged(RuntimeError):
    """Newton iteration stopped making progress.

    Carries the best iterate seen (`x`, `residual`) so callers may salvage
    near-converged stalls against their own acceptance gates.
    """

    def __init__(self, msg, x=None, residual=None):
        super().__init__(msg)
        self.x = x
        self.residual = residual


@dataclass(frozen=True)
class Bracket:
    """Interval [lo, hi] assumed to straddle a root of the target function."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class RngSeed:
    """(base, stream) pair that fully determines a Gaussian sequence.

    Distinct (base, stream) pairs index statistically independent streams of
    the Philox counter-based generator, so trials may safely run in parallel.
    """

    base: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.base < 2**64 and 0 <= self.stream < 2**64):
            raise ValueError("seed components must be 64-bit unsigned integers")


def erf(x: float) -> float:
    """Error function (libm, correctly rounded to <1 ulp)."""
    return math.erf(x)


def erfc(x: float) -> float:
    """Complementary error function, accurate in absolute terms deep into the tail."""
    return math.erfc(x)


# Acklam's rational approximation to the inverse normal CDF: the initial
# guess is accurate to ~1.15e-9 relative, after which two Newton steps on
# erf give full double precision with no table dependence.
_ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)

_SQRT_PI = math.sqrt(math.pi)


def _ndtri_initial(p_half_low: float, central_u: float, tail_is_low: bool) -> float:
    """Acklam rational pieces; central_u = u - 0.5 for the central branch."""
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    if p_half_low is not None:
        q = math.sqrt(-2.0 * math.log(p_half_low))
        num = ((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]
        den = (((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0
        z = num / den  # the rational piece is negative on the tail
        return z if tail_is_low else -z
    r = central_u * central_u
    num = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * central_u
    den = ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
    return num / den


def erf_inv(p: float) -> float:
    """Inverse error function on (-1, 1).

    Rational initial approximation (Acklam's inverse-normal form) refined by
    two Newton steps on erf; erf(erf_inv(p)) = p to better than 1e-12.
    """
    if not -1.0 < p < 1.0:
        raise ValueError(f"erf_inv requires -1 < p < 1, got {p}")
    if p == 0.0:
        return 0.0
    # erfinv(p) = ndtri((1+p)/2)/sqrt(2); tail branches use (1-|p|)/2 exactly.
    p_low = 0.02425
    q_tail = (1.0 - abs(p)) / 2.0
    if q_tail < p_low:
        z = _ndtri_initial(q_tail, None, tail_is_low=p < 0.0)
    else:
        z = _ndtri_initial(None, p / 2.0, tail_is_low=False)
    y = z / math.sqrt(2.0)
    for _ in range(2):
        err = math.erf(y) - p
        y -= err * _SQRT_PI / 2.0 * math.exp(min(y * y, 700.0))
    return y


def root_bracketed(f: Callable[[float], float], b: Bracket, tol: float = 1e-12,
                   max_iter: int = 200) -> float:
    """Deterministic bracketed root finding (Brent), final interval width <= tol."""
    flo, fhi = f(b.lo), f(b.hi)
    if flo == 0.0:
        return b.lo
    if fhi == 0.0:
        return b.hi
    if flo * fhi > 0.0:
        raise NoSignChange(f"f({b.lo})={flo} and f({b.hi})={fhi} have the same sign")
    try:
        return float(scipy.optimize.brentq(f, b.lo, b.hi, xtol=tol, maxiter=max_iter))
    except RuntimeError as exc:  # pragma: no cover - requires pathological f
        raise MaxIterations(str(exc)) from exc


def solve_system(F: Callable[[np.ndarray], np.ndarray], x0: Sequence[float],
                 tol: float = 1e-11, max_iter: int = 120, max_halvings: int = 50,
                 step_cap: float = 10.0, fd_step: float = 1e-7) -> np.ndarray:
    """Damped Newton for F(x) = 0 with forward finite-difference Jacobian.

    FD step fd_step * max(1, |x_i|) (default 1e-7); the Newton step is
    capped in max-norm (near-singular Jacobians otherwise produce runaway
    steps) and halved while the max-norm residual fails to decrease.
    Deterministic for fixed inputs.
    """
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    fx = np.asarray(F(x), dtype=float)
    if fx.shape != (d,):
        raise ValueError("F must map R^d to R^d")
    rnorm = np.max(np.abs(fx))
    for _ in range(max_iter):
        if not np.isfinite(rnorm):
            raise Diverged("non-finite residual", x=x, residual=rnorm)
        if rnorm <= tol:
            return x
        J = np.empty((d, d))
        for j in range(d):
            h = fd_step * max(1.0, abs(x[j]))
            xp = x.copy()
            xp[j] += h
            J[:, j] = (np.asarray(F(xp), dtype=float) - fx) / h
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(J, -fx, rcond=None)
        if not np.all(np.isfinite(step)):
            raise Diverged("non-finite Newton step", x=x, residual=rnorm)
        snorm = np.max(np.abs(step))
        if snorm > step_cap:
            step *= step_cap / snorm
        lam = 1.0
        for _ in range(max_halvings):
            x_new = x + lam * step
            f_new = np.asarray(F(x_new), dtype=float)
            rn = np.max(np.abs(f_new))
            if np.isfinite(rn) and rn < rnorm:
                x, fx, rnorm = x_new, f_new, rn
                break
            lam *= 0.5
        else:
            raise Diverged(f"residual stalled at {rnorm:.3e}", x=x, residual=rnorm)
    if rnorm <= tol:
        return x
    raise Diverged(f"no convergence after {max_iter} iterations (residual {rnorm:.3e})",
                   x=x, residual=rnorm)


def quad_sqrt_endpoints(g: Callable[[float], float], lo: float, hi: float) -> float:
    """Integrate sqrt((hi-x)(x-lo)) * g(x) over [lo, hi].

    The substitution x = lo + (hi-lo) sin^2(theta) removes the square-root
    endpoint singularities in the derivative; the transformed smooth
    integrand is handled by adaptive Gauss-Kronrod quadrature.
    """
    if not lo < hi:
        raise ValueError(f"quad_sqrt_endpoints requires lo < hi, got [{lo}, {hi}]")
    w = hi - lo

    def transformed(theta: float) -> float:
        s, c = math.sin(theta), math.cos(theta)
        x = lo + w * s * s
        return 2.0 * w * w * (s * c) ** 2 * g(x)

    val, _ = scipy.integrate.quad(transformed, 0.0, math.pi / 2.0,
                                  epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def make_generator(seed: RngSeed) -> np.random.Generator:
    """Philox 4x64 counter-based generator keyed by (base, stream)."""
    key = np.array([seed.base, seed.stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gaussian_stream(seed: RngSeed, count: int) -> np.ndarray:
    """i.i.d. standard normals, bit-reproducible for a given (base, stream).

    Generation: numpy's ziggurat method on the Philox 4x64 counter generator
    keyed by (base, stream). Distinct streams are independent by construction.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    return make_generator(seed).standard_normal(count)
