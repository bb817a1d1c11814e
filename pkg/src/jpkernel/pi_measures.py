"""The one-parameter measure family on [-1, 1] behind the kernel integrals.

For gamma > -1/2 the measure is the probability density
    c_gamma (1-u^2)^(gamma-1/2) du,   c_gamma = Gamma(gamma+1)/(sqrt(pi) Gamma(gamma+1/2)),
at gamma = -1/2 it degenerates to two half-atoms at +-1, and for
gamma in (-1, -1/2) the role is taken over by the finite even profile
|Pi_gamma(u)| du, where Pi_gamma is the (negative, odd) primitive of the
no-longer-integrable density.

The profile is evaluated through the exact decomposition (u > 0)
    Pi_gamma(u) = 1/2 + c_gamma B_gamma u (1-u^2)^(gamma+1/2) 2F1(1, 1+gamma; gamma+3/2; 1-u^2),
    B_gamma = Gamma(-gamma-1/2) / (2 Gamma(1/2-gamma)),
which separates the endpoint singularity (1-u)^(gamma+1/2) from analytic
factors, so plain Gauss-Jacobi pieces converge spectrally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from jpkernel import specfun
from jpkernel.errors import QuadratureError

DEFAULT_NODES = 64
_MAX_NODES = 2048
_SPLIT = 0.75  # |u| above which the endpoint decomposition is used


def pi_c(gamma: float) -> float:
    """Prefactor c_gamma; negative for gamma in (-1, -1/2), zero at -1/2."""
    return float(specfun.gamma(gamma + 1.0) / (math.sqrt(math.pi) * specfun.gamma(gamma + 0.5)))


def _pi_b(gamma: float) -> float:
    return float(0.5 * specfun.gamma(-gamma - 0.5) / specfun.gamma(0.5 - gamma))


def pi_cdf(alpha: float, u):
    """Pi_alpha(u) for u in (-1, 1); odd, negative for u > 0 when alpha < -1/2."""
    if alpha <= -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")
    if alpha == -0.5:
        raise ValueError("Pi_alpha has a pole at alpha = -1/2 (atomic regime)")
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) >= 1.0):
        raise ValueError("argument must lie in the open interval (-1, 1)")
    c = pi_c(alpha)
    if alpha > -0.5:
        out = c * u * specfun.hyp2f1(0.5, 0.5 - alpha, 1.5, u * u)
    else:
        out = np.where(
            np.abs(u) <= _SPLIT,
            c * u * specfun.hyp2f1(0.5, 0.5 - alpha, 1.5, np.minimum(u * u, _SPLIT**2)),
            -np.sign(u) * _abs_profile_tail(alpha, np.maximum(np.abs(u), _SPLIT)),
        )
    return float(out) if out.ndim == 0 else out


def _abs_profile_tail(alpha: float, u):
    """|Pi_alpha(u)| for u in [_SPLIT, 1), alpha < -1/2, via the decomposition."""
    z = (1.0 - u) * (1.0 + u)
    d = -pi_c(alpha) * _pi_b(alpha)
    return d * u * z ** (alpha + 0.5) * specfun.hyp2f1(1.0, 1.0 + alpha, alpha + 1.5, z) - 0.5


def abs_profile(alpha: float, u):
    """|Pi_alpha(u)| for u in (0, 1), alpha in (-1, -1/2)."""
    u = np.asarray(u, dtype=float)
    return np.where(
        u <= _SPLIT,
        np.abs(pi_c(alpha)) * u * specfun.hyp2f1(0.5, 0.5 - alpha, 1.5, np.minimum(u * u, _SPLIT**2)),
        _abs_profile_tail(alpha, np.maximum(u, _SPLIT)),
    )


# ---------------------------------------------------------------------------
# quadrature pieces
# ---------------------------------------------------------------------------

def _gl_piece(lo: float, hi: float, n: int):
    x, w = specfun.roots_legendre(n)
    h = 0.5 * (hi - lo)
    return lo + h * (x + 1.0), h * w


def _gj_piece(lo: float, hi: float, n: int, exponent: float, side: str):
    """Rule for int_lo^hi g(u) |endpoint - u|^exponent du with the singular
    endpoint at hi (side='right') or lo (side='left')."""
    if side == "right":
        x, w = specfun.roots_jacobi(n, exponent, 0.0)
    else:
        x, w = specfun.roots_jacobi(n, 0.0, exponent)
    h = 0.5 * (hi - lo)
    return lo + h * (x + 1.0), h ** (exponent + 1.0) * w


def _graded_edges(delta: float):
    """Dyadic edges 1/2, 3/4, ..., 1 - delta (delta a power of two <= 1/2)."""
    edges = [0.5]
    d = 0.5
    while d > delta * 1.0000001:
        d *= 0.5
        edges.append(1.0 - d)
    return edges


def _graded_n(n: int) -> int:
    """Node count for the dyadic interior pieces; they carry smooth
    integrands, so fewer points than the endpoint pieces suffice."""
    return max(8, (3 * n) // 5)


def snap_delta(delta: float) -> float:
    """Round down to a power of two in [2^-40, 1/2] for rule caching."""
    delta = min(max(delta, 2.0**-40), 0.5)
    return 2.0 ** math.floor(math.log2(delta))


@lru_cache(maxsize=512)
def density_rule(gamma: float, n: int, delta: float = 0.5):
    """Discrete rule (nodes, weights) on (-1, 1) approximating the probability
    measure of parameter gamma > -1/2.

    delta grades the mesh toward u = +1 (where kernel integrands peak);
    it must come from snap_delta.
    """
    if gamma <= -0.5:
        raise ValueError(f"density regime needs gamma > -1/2, got {gamma}")
    c = pi_c(gamma)
    e = gamma - 0.5
    if delta >= 0.5:
        x, w = specfun.roots_jacobi(n, e, e)
        return x, c * w
    nodes, weights = [], []
    xs, ws = _gj_piece(-1.0, 0.0, n, e, "left")
    nodes.append(xs)
    weights.append(c * ws * (1.0 - xs) ** e)
    edges = [0.0] + _graded_edges(delta)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        xs, ws = _gl_piece(lo, hi, n if i == 0 else _graded_n(n))
        nodes.append(xs)
        weights.append(c * ws * (1.0 - xs * xs) ** e)
    xs, ws = _gj_piece(1.0 - delta, 1.0, n, e, "right")
    nodes.append(xs)
    weights.append(c * ws * (1.0 + xs) ** e)
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=512)
def profile_rule(alpha: float, n: int, delta: float = 0.5):
    """Discrete rule (nodes, weights) on (0, 1) approximating |Pi_alpha(u)| du
    for alpha in (-1, -1/2); weights of the -1/2 du component are negative,
    integrals of nonnegative integrands still come out nonnegative.
    """
    if not -1.0 < alpha < -0.5:
        raise ValueError(f"profile regime needs alpha in (-1, -1/2), got {alpha}")
    d_coef = -pi_c(alpha) * _pi_b(alpha)
    e = alpha + 0.5
    nodes, weights = [], []
    edges = [0.0] + _graded_edges(delta)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        xs, ws = _gl_piece(lo, hi, n if i == 0 else _graded_n(n))
        nodes.append(xs)
        weights.append(ws * abs_profile(alpha, xs))
    xs, ws = _gj_piece(1.0 - delta, 1.0, n, e, "right")
    z = (1.0 - xs) * (1.0 + xs)
    sing = d_coef * xs * (1.0 + xs) ** e * specfun.hyp2f1(1.0, 1.0 + alpha, alpha + 1.5, z)
    nodes.append(xs)
    weights.append(ws * sing)
    xs, ws = _gl_piece(1.0 - delta, 1.0, n)
    nodes.append(xs)
    weights.append(-0.5 * ws)
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=512)
def halfline_rule(gamma: float, n: int, delta: float = 0.5):
    """Rule on (0, 1) for the measure c_gamma (1-u)^(gamma+1/2) (1+u)^(gamma-1/2) du.

    This is the (0, 1]-restricted measure of parameter gamma with one factor
    (1-u) already divided out of the integrand; it is what the symmetrized
    one-formula kernel route integrates against, and it stays integrable for
    every gamma > -1 (the prefactor c_gamma vanishes at gamma = -1/2, which
    matches the atomic degeneration).

    Returns (nodes, weights, one_minus_nodes); the third array carries
    1 - u computed without cancellation so integrands may divide by it.
    """
    c = pi_c(gamma)
    e_in = gamma - 0.5
    e_out = gamma + 0.5
    nodes, weights, omu = [], [], []
    edges = [0.0] + _graded_edges(delta)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        xs, ws = _gl_piece(lo, hi, n if i == 0 else _graded_n(n))
        nodes.append(xs)
        weights.append(c * ws * (1.0 - xs) ** e_out * (1.0 + xs) ** e_in)
        omu.append(1.0 - xs)
    x, w = specfun.roots_jacobi(n, e_out, 0.0)
    h = 0.5 * delta
    xs = (1.0 - delta) + h * (x + 1.0)
    nodes.append(xs)
    weights.append(c * h ** (e_out + 1.0) * w * (1.0 + xs) ** e_in)
    omu.append(h * (1.0 - x))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(omu)


# ---------------------------------------------------------------------------
# the measure object
# ---------------------------------------------------------------------------

DENSITY = "density"
ATOMIC = "atomic"
PROFILE = "profile"


@dataclass(frozen=True)
class PiMeasure:
    """One member of the measure family, with its stored quadrature rule."""

    alpha: float
    kind: str
    nodes: np.ndarray
    weights: np.ndarray

    @staticmethod
    def for_alpha(alpha: float, n_nodes: int = DEFAULT_NODES) -> "PiMeasure":
        if alpha <= -1.0:
            raise ValueError(f"alpha must exceed -1, got {alpha}")
        if alpha > -0.5:
            nodes, weights = density_rule(alpha, n_nodes)
            return PiMeasure(alpha, DENSITY, nodes, weights)
        if alpha == -0.5:
            return PiMeasure(alpha, ATOMIC, np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
        nodes, weights = profile_rule(alpha, n_nodes)
        return PiMeasure(alpha, PROFILE, nodes, weights)


def pi_integrate(measure: PiMeasure, f) -> float:
    """Integral of f against the (probability or atomic) measure."""
    if measure.kind == PROFILE:
        raise ValueError("kind mismatch: use pi_profile_integrate for the profile regime")
    return float(np.sum(measure.weights * f(measure.nodes)))


def pi_profile_integrate(alpha: float, f, rtol: float = 1e-10) -> float:
    """Integral of f over (-1, 1) against the even profile |Pi_alpha(u)| du.

    Node counts double until two successive results agree to rtol.
    """
    if not -1.0 < alpha < -0.5:
        raise ValueError(f"profile regime needs alpha in (-1, -1/2), got {alpha}")

    def attempt(n):
        nodes, weights = profile_rule(alpha, n)
        return float(np.sum(weights * (f(nodes) + f(-nodes))))

    n = DEFAULT_NODES
    prev = attempt(n)
    while n < _MAX_NODES:
        n *= 2
        cur = attempt(n)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise QuadratureError(f"profile integral for alpha={alpha} did not stabilize by n={n}")
