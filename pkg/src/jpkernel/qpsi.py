"""The kernel integrand Psi and exact closed-form partial derivatives.

Psi(t, theta, phi, u, v) = c_ab sinh(t/2) / (cosh(t/2) - 1 + q)^sigma with
q = 1 - u sin(t1/2) sin(t2/2) - v cos(t1/2) cos(t2/2) and sigma = a + b + 2.

Derivatives are assembled by Faa di Bruno's formula over set partitions of
the requested derivative tokens: for the inner function
D = cosh(t/2) - 1 + q one has d^k/dx^k D^(-sigma) expansions whose blocks
are partial derivatives of D, all of which are elementary (q is bilinear in
(u, v) and trigonometric in (theta, phi); the mixed u-v derivative of q
vanishes identically).  No finite differences anywhere.

Everything broadcasts: t, theta, phi, u, v may be numpy arrays of mutually
broadcastable shapes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from jpkernel.errors import UnsupportedOrderError
from jpkernel.params import JacobiParams

MAX_THETA_PLUS_T = 3  # N + M cap for psi_eval


@dataclass(frozen=True)
class QArgs:
    """Arguments of q: angles theta, phi in [0, pi] and u, v in [-1, 1]."""

    theta: float
    phi: float
    u: float
    v: float


def _dsin_half(x, k):
    """d^k/dx^k sin(x/2)."""
    return 0.5**k * np.sin(0.5 * x + 0.5 * k * np.pi)


def _dcos_half(x, k):
    return 0.5**k * np.cos(0.5 * x + 0.5 * k * np.pi)


def q_value(theta, phi, u, v):
    return 1.0 - u * np.sin(0.5 * theta) * np.sin(0.5 * phi) - v * np.cos(0.5 * theta) * np.cos(
        0.5 * phi
    )


def _q_partial(theta, phi, u, v, du, dv, dtheta, dphi):
    """Any-order partial of q; exact.  Zero whenever du + dv >= 2."""
    if du + dv >= 2:
        return 0.0
    if du == 1:
        return -_dsin_half(theta, dtheta) * _dsin_half(phi, dphi)
    if dv == 1:
        return -_dcos_half(theta, dtheta) * _dcos_half(phi, dphi)
    if dtheta == 0 and dphi == 0:
        return q_value(theta, phi, u, v)
    return -u * _dsin_half(theta, dtheta) * _dsin_half(phi, dphi) - v * _dcos_half(
        theta, dtheta
    ) * _dcos_half(phi, dphi)


def q_eval(args: QArgs, du: int = 0, dv: int = 0, dtheta: int = 0, dphi: int = 0):
    """Public exact partial of q; all orders must be <= 2."""
    for name, order in (("du", du), ("dv", dv), ("dtheta", dtheta), ("dphi", dphi)):
        if not 0 <= order <= 2:
            raise UnsupportedOrderError(f"{name}={order} outside supported range 0..2")
    return _q_partial(args.theta, args.phi, args.u, args.v, du, dv, dtheta, dphi)


# ---------------------------------------------------------------------------
# set partitions and derivative plans
# ---------------------------------------------------------------------------

def _set_partitions(items):
    """All partitions of a list, as lists of blocks (lists)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


@lru_cache(maxsize=256)
def _faa_plan(mt: int, nth: int, lph: int, ku: int, rv: int):
    """Plan for the (mt, nth, lph, ku, rv) mixed partial of D^(-sigma).

    Returns tuples (n_blocks, block_multiset, multiplicity) where each block
    is a count vector (bt, bth, bph, bu, bv); partitions containing an
    identically-zero block of D are dropped.
    """
    tokens = ["t"] * mt + ["th"] * nth + ["ph"] * lph + ["u"] * ku + ["v"] * rv
    plans: dict[tuple, int] = {}
    for part in _set_partitions(list(range(len(tokens)))):
        blocks = []
        dead = False
        for blk in part:
            bt = sum(1 for i in blk if tokens[i] == "t")
            bth = sum(1 for i in blk if tokens[i] == "th")
            bph = sum(1 for i in blk if tokens[i] == "ph")
            bu = sum(1 for i in blk if tokens[i] == "u")
            bv = sum(1 for i in blk if tokens[i] == "v")
            if bt > 0 and (bth + bph + bu + bv) > 0:
                dead = True
                break
            if bu + bv >= 2:
                dead = True
                break
            blocks.append((bt, bth, bph, bu, bv))
        if dead:
            continue
        key = (len(blocks), tuple(sorted(blocks)))
        plans[key] = plans.get(key, 0) + 1
    return tuple((k[0], k[1], mult) for k, mult in plans.items())


def _pochhammer(x: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= x + i
    return out


class PsiEvaluator:
    """Evaluates mixed partials of Psi at broadcastable array arguments.

    One instance per (params,); holds no mutable state, safe to share.
    """

    def __init__(self, params: JacobiParams):
        self.params = params
        self.sigma = params.sigma
        self.c_ab = params.c_ab

    def __call__(self, t, theta, phi, u, v, K=0, R=0, L=0, N=0, M=0):
        """partial_u^K partial_v^R partial_phi^L partial_theta^N partial_t^M Psi."""
        t = np.asarray(t, dtype=float)
        S = np.sinh(0.5 * t)
        C = np.cosh(0.5 * t)
        q = q_value(theta, phi, u, v)
        D = (C - 1.0) + q

        sigma = self.sigma
        powers = {0: D ** (-sigma)}  # D^(-sigma - k), filled on demand

        def power(k):
            while k not in powers:
                j = max(powers)
                powers[j + 1] = powers[j] / D
            return powers[k]

        def d_block(bt, bth, bph, bu, bv):
            if bt > 0:
                return 0.5**bt * (S if bt % 2 == 1 else C)
            return _q_partial(theta, phi, u, v, bu, bv, bth, bph)

        def f_partial(mt):
            acc = 0.0
            for n_blocks, blocks, mult in _faa_plan(mt, N, L, K, R):
                term = mult * (-1.0) ** n_blocks * _pochhammer(sigma, n_blocks) * power(n_blocks)
                for blk in blocks:
                    term = term * d_block(*blk)
                acc = acc + term
            return acc

        # product rule in t over sinh(t/2) * F
        out = 0.0
        binom = 1
        for j in range(M + 1):
            s_j = 0.5**j * (S if j % 2 == 0 else C)
            out = out + binom * s_j * f_partial(M - j)
            binom = binom * (M - j) // (j + 1)
        return self.c_ab * out


@lru_cache(maxsize=64)
def _psi_evaluator(alpha: float, beta: float) -> PsiEvaluator:
    return PsiEvaluator(JacobiParams(alpha, beta))


def psi_evaluator(params: JacobiParams) -> PsiEvaluator:
    return _psi_evaluator(params.alpha, params.beta)


def psi_eval(params: JacobiParams, t, args: QArgs, deriv=(0, 0, 0, 0, 0)):
    """Exact mixed partial of Psi; deriv = (K, R, L, N, M).

    K, R, L in {0, 1}; N + M <= 3.
    """
    K, R, L, N, M = deriv
    if K not in (0, 1) or R not in (0, 1) or L not in (0, 1):
        raise UnsupportedOrderError(f"K, R, L must be 0 or 1, got {(K, R, L)}")
    if N < 0 or M < 0 or N + M > MAX_THETA_PLUS_T:
        raise UnsupportedOrderError(f"need N + M <= {MAX_THETA_PLUS_T}, got N={N}, M={M}")
    if np.any(np.asarray(t) <= 0):
        raise ValueError("t must be positive")
    out = psi_evaluator(params)(t, args.theta, args.phi, args.u, args.v, K=K, R=R, L=L, N=N, M=M)
    return float(out) if np.ndim(out) == 0 else out
