"""Kernels of the semigroup-derived operators and their estimate scans.

Realized kernels (theta != phi), with their Banach-space norms:

  maximal   -- {H_t}_{t>0},            sup norm over t (grid + golden refine);
  riesz     -- (1/Gamma(N)) int d_theta^N H_t t^(N-1) dt,      scalar;
  gfun      -- {d_theta^N d_t^M H_t},  L^2(t^(2M+2N-1) dt) norm;
  laplace   -- -int profile(t) d_t H_t dt,                     scalar;
  stieltjes -- sum_j w_j H_{t_j},                               scalar.

The t-integrals split at t = 1: below, the t-uniform integral route of the
kernel module on a log-spaced Gauss grid; above, exact per-mode upper
incomplete-Gamma closures of the spectral series (for riesz and gfun) or
geometrically-paneled Gauss with the series route plus a certified drop of
the exponentially small remainder (laplace).

Scans check the growth bound against 1/mu(ball), the gradient bound against
1/(|theta-phi| mu(ball)), and sample the first smoothness bound directly on
admissible triples; caps are artifact constants, reports carry the
empirical extremes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from jpkernel import specfun
from jpkernel._parallel import parallel_map
from jpkernel.basis import mu_ball, mu_total, trig_poly_table
from jpkernel.errors import TailError
from jpkernel.kernel import AUTO_SPLIT_T, h_script_integral, jph_correction, kernel_H_batch, series_H
from jpkernel.params import JacobiParams
from jpkernel.report import EstimateReport

TAIL_N_CUT = 64
_MID_NODES = 20
_T_STAR_CAP = 4000.0

# Resolution presets: 'accurate' for single evaluations and oracle tests,
# 'scan' for grid scans whose caps are order-of-magnitude statements.
PRESETS = {
    "accurate": dict(t_lo=1e-9, panels=12, t_nodes=16, rtol=1e-9, base_nodes=24,
                     doublings=2, delta_floor=2.0**-40, golden_iters=36,
                     sup_t_lo=1e-4, sup_per_decade=64),
    "scan": dict(t_lo=1e-5, panels=5, t_nodes=8, rtol=1e-5, base_nodes=10,
                 doublings=0, delta_floor=2.0**-16, golden_iters=0,
                 sup_t_lo=1e-3, sup_per_decade=16),
    "scan_fine": dict(t_lo=1e-8, panels=8, t_nodes=12, rtol=1e-6, base_nodes=20,
                      doublings=0, delta_floor=2.0**-20, golden_iters=12,
                      sup_t_lo=1e-3, sup_per_decade=24),
}


# ---------------------------------------------------------------------------
# multiplier specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaplaceProfile:
    """Bounded profile phi(t) of a Laplace-transform-type multiplier.

    fn maps positive t arrays to (possibly complex) values; sup_norm is the
    user-declared bound used in tail certificates.
    """

    fn: Callable
    sup_norm: float = 1.0
    name: str = "profile"


@dataclass(frozen=True)
class StieltjesAtoms:
    """Finite atomic measure sum_j weights[j] * delta(times[j]) on (0, inf)."""

    times: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.times) != len(self.weights) or not self.times:
            raise ValueError("need equally many (at least one) times and weights")
        if any(t <= 0 for t in self.times):
            raise ValueError("atom locations must be positive")


def constant_profile() -> LaplaceProfile:
    return LaplaceProfile(fn=lambda t: np.ones_like(np.asarray(t, dtype=float)), sup_norm=1.0,
                          name="const1")


def imaginary_power_profile(gamma: float) -> LaplaceProfile:
    """t^(-i gamma) / Gamma(1 - i gamma); realizes the spectral symbol z^(i gamma)."""
    if gamma == 0:
        return constant_profile()
    norm = specfun.gamma(1.0 - 1j * gamma)

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.exp(-1j * gamma * np.log(t)) / norm

    return LaplaceProfile(fn=fn, sup_norm=float(1.0 / abs(norm)), name=f"imaginary:{gamma}")


# ---------------------------------------------------------------------------
# shared t-quadrature and spectral tables
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _small_t_rule(t_lo: float, panels: int, n: int):
    """Gauss rule for int_(t_lo)^1 f(t) dt, log-spaced panels."""
    x, w = specfun.roots_legendre(n)
    edges = np.linspace(math.log(t_lo), 0.0, panels + 1)
    ts, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        h = 0.5 * (hi - lo)
        s = lo + h * (x + 1.0)
        ts.append(np.exp(s))
        ws.append(h * w * np.exp(s))
    return np.concatenate(ts), np.concatenate(ws)


@lru_cache(maxsize=64)
def _mid_t_rule(t_star: float, n: int = _MID_NODES):
    """Gauss rule for int_1^(t_star) f(t) dt, geometric panels."""
    x, w = specfun.roots_legendre(n)
    edges = [1.0]
    while edges[-1] < t_star:
        edges.append(min(edges[-1] * 2.0, t_star))
    ts, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        h = 0.5 * (hi - lo)
        ts.append(lo + h * (x + 1.0))
        ws.append(h * w)
    return np.concatenate(ts), np.concatenate(ws)


@lru_cache(maxsize=200_000)
def _coef(alpha: float, beta: float, angle: float, order: int, n_cut: int = TAIL_N_CUT):
    params = JacobiParams(alpha, beta)
    return trig_poly_table(params, n_cut, np.float64(angle), order=order)


def _rates(params: JacobiParams, n_cut: int = TAIL_N_CUT):
    return np.abs(np.arange(n_cut + 1, dtype=float) + 0.5 * params.lam)


class _KernelBase:
    """Shared t-quadrature plumbing at one resolution preset."""

    def __init__(self, params: JacobiParams, quality: str = "accurate"):
        if quality not in PRESETS:
            raise ValueError(f"unknown quality {quality!r}")
        self.params = params
        self.quality = quality
        self.preset = PRESETS[quality]

    def _t_rule(self):
        p = self.preset
        return _small_t_rule(p["t_lo"], p["panels"], p["t_nodes"])

    def _small_H(self, ts, theta, phi, M, N, L):
        """H-derivative values on the small-t nodes via the integral route."""
        p = self.preset
        vals = h_script_integral(
            self.params, ts, theta, phi, deriv=(M, N, L), rtol=p["rtol"],
            base_nodes=p["base_nodes"], max_doublings=p["doublings"],
            delta_floor=p["delta_floor"],
        )
        if N == 0 and L == 0:
            vals = vals + jph_correction(self.params, ts, M=M)
        return vals


# ---------------------------------------------------------------------------
# kernel classes
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _maximal_t_grid(t_lo: float, per_decade: int):
    n_pts = int(round(per_decade * math.log10(50.0 / t_lo)))
    return np.logspace(math.log10(t_lo), math.log10(50.0), n_pts)


class MaximalKernel(_KernelBase):

    symmetric = True

    """sup_t H_t, approximated on a log grid (64 per decade over [1e-4, 50]
    in accurate mode) refined by golden section; for lam = 0 the
    t -> infinity limit 1/mu_total is an explicit candidate.  The sup of
    H_t in t is empirically unimodal off the diagonal, which the sparser
    scan-mode grid relies on."""

    name = "maximal"
    def __init__(self, params: JacobiParams, quality: str = "accurate"):
        super().__init__(params, quality)
        self.t_grid = _maximal_t_grid(self.preset["sup_t_lo"], self.preset["sup_per_decade"])

    def _eval_batch(self, theta, phi, dth, dph, t_grid=None):
        p = self.preset
        t_grid = self.t_grid if t_grid is None else t_grid
        out = np.empty_like(t_grid)
        small = t_grid < AUTO_SPLIT_T
        if np.any(small):
            out[small] = self._small_grid_H(t_grid[small], theta, phi, dth, dph)
        if np.any(~small):
            out[~small] = series_H(self.params, t_grid[~small], theta, phi, N=dth, L=dph)
        return out

    def _small_grid_H(self, ts, theta, phi, dth, dph):
        p = self.preset
        vals = h_script_integral(
            self.params, ts, theta, phi, deriv=(0, dth, dph), rtol=p["rtol"],
            base_nodes=p["base_nodes"], max_doublings=p["doublings"],
            delta_floor=p["delta_floor"],
        )
        if dth == 0 and dph == 0:
            vals = vals + jph_correction(self.params, ts)
        return vals

    def _sup(self, theta, phi, dth=0, dph=0):
        vals = np.abs(self._eval_batch(theta, phi, dth, dph))
        i = int(np.argmax(vals))
        grid_max = float(vals[i])
        refined = grid_max
        if self.preset["golden_iters"] > 0:
            lo = self.t_grid[max(i - 1, 0)]
            hi = self.t_grid[min(i + 1, len(self.t_grid) - 1)]

            def f(log_t):
                t = np.array([math.exp(log_t)])
                return abs(float(self._eval_batch(theta, phi, dth, dph, t_grid=t)[0]))

            refined = max(grid_max, _golden_max(f, math.log(lo), math.log(hi),
                                                iters=self.preset["golden_iters"]))
        if self.params.lam == 0.0 and dth == 0 and dph == 0:
            refined = max(refined, 1.0 / mu_total(self.params))
        return grid_max, refined

    def norm_detail(self, theta, phi):
        """(grid max, refined max) per the approximation contract."""
        return self._sup(theta, phi)

    def norm(self, theta, phi):
        return self._sup(theta, phi)[1]

    def grad_norms(self, theta, phi):
        return self._sup(theta, phi, dth=1)[1], self._sup(theta, phi, dph=1)[1]

    def diff_norm(self, theta, theta2, phi):
        a = self._eval_batch(theta, phi, 0, 0)
        b = self._eval_batch(theta2, phi, 0, 0)
        vals = np.abs(a - b)
        i = int(np.argmax(vals))
        best = float(vals[i])
        if self.preset["golden_iters"] > 0:
            lo = self.t_grid[max(i - 1, 0)]
            hi = self.t_grid[min(i + 1, len(self.t_grid) - 1)]

            def f(log_t):
                t = np.array([math.exp(log_t)])
                return abs(float(self._eval_batch(theta, phi, 0, 0, t_grid=t)[0]
                                 - self._eval_batch(theta2, phi, 0, 0, t_grid=t)[0]))

            best = max(best, _golden_max(f, math.log(lo), math.log(hi),
                                         iters=self.preset["golden_iters"]))
        return best


def _golden_max(f, lo: float, hi: float, iters: int = 36) -> float:
    """Golden-section maximization of f on [lo, hi]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv * (b - a)
    d = a + inv * (b - a)
    fc, fd = f(c), f(d)
    best = max(fc, fd)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
        best = max(best, fc, fd)
    return best


class RieszKernel(_KernelBase):
    """Order-N transform kernel; N in {1, 2}."""

    symmetric = False

    def __init__(self, params: JacobiParams, N: int, quality: str = "accurate"):
        super().__init__(params, quality)
        if N not in (1, 2):
            raise ValueError(f"Riesz order must be 1 or 2, got {N}")
        self.N = N
        self.name = f"riesz{N}"

    def _value(self, theta, phi, dth=0, dph=0):
        N = self.N
        p = self.params
        ts, ws = self._t_rule()
        vals = self._small_H(ts, theta, phi, 0, N + dth, dph)
        small = float(np.sum(ws * vals * ts ** (N - 1)))
        a = _rates(p)
        coef = _coef(p.alpha, p.beta, theta, N + dth) * _coef(p.alpha, p.beta, phi, dph)
        nz = a > 0
        tail = float(np.sum(coef[nz] * specfun.gammaincc_times_gamma(N, a[nz]) / a[nz] ** N))
        return (small + tail) / math.gamma(N)

    def norm(self, theta, phi):
        return abs(self._value(theta, phi))

    def grad_norms(self, theta, phi):
        return abs(self._value(theta, phi, dth=1)), abs(self._value(theta, phi, dph=1))

    def diff_norm(self, theta, theta2, phi):
        return abs(self._value(theta, phi) - self._value(theta2, phi))


class SquareFunctionKernel(_KernelBase):
    """Mixed square-function kernel of orders (M, N), M + N in {1, 2}."""

    def __init__(self, params: JacobiParams, M: int, N: int, quality: str = "accurate"):
        super().__init__(params, quality)
        if M < 0 or N < 0 or not 1 <= M + N <= 2:
            raise ValueError(f"need M + N in {{1, 2}}, got M={M}, N={N}")
        self.M = M
        self.N = N
        self.symmetric = N == 0
        self.name = f"gfun{M}{N}"

    def _coefs(self, theta, phi, dth, dph):
        p = self.params
        a = _rates(p)
        return (-a) ** self.M * _coef(p.alpha, p.beta, theta, self.N + dth) * _coef(
            p.alpha, p.beta, phi, dph
        )

    def _norm_sq(self, theta, phi, dth=0, dph=0):
        p = self.params
        W = 2 * (self.M + self.N)
        ts, ws = self._t_rule()
        vals = self._small_H(ts, theta, phi, self.M, self.N + dth, dph)
        small = float(np.sum(ws * vals * vals * ts ** (W - 1)))
        c = self._coefs(theta, phi, dth, dph)
        a = _rates(p)
        s = a[:, None] + a[None, :]
        cc = c[:, None] * c[None, :]
        mask = (s > 0) & (cc != 0.0)
        tail = float(
            np.sum(cc[mask] * specfun.gammaincc_times_gamma(W, s[mask]) / s[mask] ** W)
        )
        return small + tail

    def norm(self, theta, phi):
        return math.sqrt(self._norm_sq(theta, phi))

    def grad_norms(self, theta, phi):
        return (
            math.sqrt(self._norm_sq(theta, phi, dth=1)),
            math.sqrt(self._norm_sq(theta, phi, dph=1)),
        )

    def diff_norm(self, theta, theta2, phi):
        p = self.params
        W = 2 * (self.M + self.N)
        ts, ws = self._t_rule()
        dv = self._small_H(ts, theta, phi, self.M, self.N, 0) - self._small_H(
            ts, theta2, phi, self.M, self.N, 0
        )
        small = float(np.sum(ws * dv * dv * ts ** (W - 1)))
        c = self._coefs(theta, phi, 0, 0) - self._coefs(theta2, phi, 0, 0)
        a = _rates(p)
        s = a[:, None] + a[None, :]
        cc = c[:, None] * c[None, :]
        mask = (s > 0) & (cc != 0.0)
        tail = float(
            np.sum(cc[mask] * specfun.gammaincc_times_gamma(W, s[mask]) / s[mask] ** W)
        )
        return math.sqrt(max(small + tail, 0.0))


class LaplaceKernel(_KernelBase):
    """Laplace-transform-type multiplier kernel for a bounded profile."""

    symmetric = True

    def __init__(self, params: JacobiParams, profile: LaplaceProfile,
                 quality: str = "accurate"):
        super().__init__(params, quality)
        self.profile = profile
        self.name = f"laplace[{profile.name}]"
        a0 = 0.5 * abs(params.lam)
        decay = a0 if a0 > 0 else abs(1.0 + 0.5 * params.lam)
        self.t_star = max(40.0, 34.0 / decay)
        if self.t_star > _T_STAR_CAP:
            raise TailError(
                f"Laplace kernel tail needs t* = {self.t_star:.3g} > cap {_T_STAR_CAP} "
                f"(spectral gap {decay:.3g} too small)"
            )

    def _value(self, theta, phi, dth=0, dph=0):
        p = self.params
        ts, ws = self._t_rule()
        small = np.sum(ws * self.profile.fn(ts) * self._small_H(ts, theta, phi, 1, dth, dph))
        a = _rates(p)
        coef = np.abs(_coef(p.alpha, p.beta, theta, dth) * _coef(p.alpha, p.beta, phi, dph))
        nz = a > 0
        t_star = self.t_star
        while True:
            tm, wm = _mid_t_rule(t_star)
            mid = np.sum(wm * self.profile.fn(tm) * series_H(p, tm, theta, phi, M=1, N=dth, L=dph))
            val = -(small + mid)
            with np.errstate(under="ignore"):
                bound = self.profile.sup_norm * float(
                    np.sum(coef[nz] * np.exp(-a[nz] * t_star))
                )
            if bound <= max(1e-12 * abs(val), 1e-300):
                break
            t_star *= 1.5
            if t_star > _T_STAR_CAP:
                raise TailError(
                    f"Laplace kernel tail beyond t*={t_star:.3g} not negligible "
                    f"(bound {bound:.3g} vs value {abs(val):.3g})"
                )
        return complex(val) if np.iscomplexobj(val) else float(val)

    def norm(self, theta, phi):
        return abs(self._value(theta, phi))

    def grad_norms(self, theta, phi):
        return abs(self._value(theta, phi, dth=1)), abs(self._value(theta, phi, dph=1))

    def diff_norm(self, theta, theta2, phi):
        return abs(self._value(theta, phi) - self._value(theta2, phi))


class StieltjesKernel(_KernelBase):
    """Laplace-Stieltjes-type multiplier kernel for a finite atomic measure."""

    symmetric = True

    def __init__(self, params: JacobiParams, atoms: StieltjesAtoms,
                 quality: str = "accurate"):
        super().__init__(params, quality)
        self.atoms = atoms
        self.name = "stieltjes"

    def _value(self, theta, phi, dth=0, dph=0):
        ts = np.asarray(self.atoms.times, dtype=float)
        h = kernel_H_batch(self.params, ts, theta, phi, M=0, N=dth, L=dph)
        total = np.sum(np.asarray(self.atoms.weights) * h)
        return complex(total) if np.iscomplexobj(total) else float(total)

    def norm(self, theta, phi):
        return abs(self._value(theta, phi))

    def grad_norms(self, theta, phi):
        return abs(self._value(theta, phi, dth=1)), abs(self._value(theta, phi, dph=1))

    def diff_norm(self, theta, theta2, phi):
        return abs(self._value(theta, phi) - self._value(theta2, phi))


def maximal_kernel_norm(params: JacobiParams, theta: float, phi: float):
    """(grid max, refined max) of sup_t H_t(theta, phi)."""
    if theta == phi:
        raise ValueError("the maximal kernel is evaluated off the diagonal only")
    return MaximalKernel(params).norm_detail(theta, phi)


def riesz_kernel(params: JacobiParams, N: int, theta: float, phi: float) -> float:
    if theta == phi:
        raise ValueError("the Riesz kernel is evaluated off the diagonal only")
    return RieszKernel(params, N)._value(theta, phi)


def square_fn_kernel_norm(params: JacobiParams, M: int, N: int, theta: float, phi: float) -> float:
    if theta == phi:
        raise ValueError("the square-function kernel is evaluated off the diagonal only")
    return SquareFunctionKernel(params, M, N).norm(theta, phi)


def laplace_multiplier_kernel(params: JacobiParams, spec: LaplaceProfile, theta: float,
                              phi: float):
    if theta == phi:
        raise ValueError("the multiplier kernel is evaluated off the diagonal only")
    return LaplaceKernel(params, spec)._value(theta, phi)


def stieltjes_multiplier_kernel(params: JacobiParams, spec: StieltjesAtoms, theta: float,
                                phi: float):
    return StieltjesKernel(params, spec)._value(theta, phi)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------

def make_kernel(params: JacobiParams, kernel_id: str, quality: str = "accurate", **options):
    """Kernel registry for scans and the CLI."""
    if kernel_id == "maximal":
        return MaximalKernel(params, quality)
    if kernel_id == "riesz":
        return RieszKernel(params, options.get("N", 1), quality)
    if kernel_id == "gfun":
        return SquareFunctionKernel(params, options.get("M", 1), options.get("N", 0), quality)
    if kernel_id == "laplace":
        return LaplaceKernel(params, options.get("profile") or constant_profile(), quality)
    if kernel_id == "stieltjes":
        atoms = options.get("atoms") or StieltjesAtoms(times=(1.0,), weights=(1.0,))
        return StieltjesKernel(params, atoms, quality)
    raise ValueError(f"unknown kernel id {kernel_id!r}")


def _pairs(theta_grid, phi_grid):
    for theta in np.atleast_1d(theta_grid):
        for phi in np.atleast_1d(phi_grid):
            if theta != phi:
                yield float(theta), float(phi)


def _resolve_kernel(params, kernel, quality, options):
    if isinstance(kernel, str):
        return make_kernel(params, kernel, quality=quality, **options)
    return kernel


def _unique_pairs(kernel, pairs):
    """Representative pairs: for symmetric kernels each unordered pair once."""
    if not getattr(kernel, "symmetric", False):
        return list(pairs)
    seen, reps = set(), []
    for theta, phi in pairs:
        key = (min(theta, phi), max(theta, phi))
        if key not in seen:
            seen.add(key)
            reps.append((theta, phi))
    return reps


def _norm_map(kernel, pairs):
    reps = _unique_pairs(kernel, pairs)
    vals = parallel_map(lambda p: kernel.norm(*p), reps)
    out = dict(zip(reps, vals))
    if getattr(kernel, "symmetric", False):
        for (theta, phi), v in list(out.items()):
            out.setdefault((phi, theta), v)
    return out


def _grad_map(kernel, pairs):
    reps = _unique_pairs(kernel, pairs)
    vals = parallel_map(lambda p: kernel.grad_norms(*p), reps)
    out = dict(zip(reps, vals))
    if getattr(kernel, "symmetric", False):
        for (theta, phi), (g1, g2) in list(out.items()):
            out.setdefault((phi, theta), (g2, g1))
    return out


def _stabilized(report_max, params, kernel, quality_next, options, probe, tol=0.01):
    """Re-run the worst probe point at a finer resolution; relative drift."""
    fine = _resolve_kernel(params, kernel, quality_next, options)
    coarse_val, point = report_max
    fine_val = probe(fine, *point)
    return abs(fine_val - coarse_val) / max(abs(fine_val), 1e-300) <= tol


def growth_check(params: JacobiParams, kernel, theta_grid, phi_grid, cap: float = 1e3,
                 quality: str = "scan", options: dict | None = None) -> EstimateReport:
    """ratio = ||K|| * mu(B(theta, |theta-phi|)) per grid point.

    kernel is a kernel id (see make_kernel) or a prebuilt kernel object.
    The worst grid point is re-evaluated at the next finer resolution and
    the report records whether it moved by less than 1%.
    """
    options = options or {}
    k = _resolve_kernel(params, kernel, quality, options)

    pairs = list(_pairs(theta_grid, phi_grid))
    norms = _norm_map(k, pairs)

    def one(pair):
        theta, phi = pair
        ball = mu_ball(params, theta, abs(theta - phi)).exact
        norm = norms[pair]
        return (theta, phi, norm, 1.0 / ball, norm * ball)

    rows = [one(p) for p in pairs]
    worst = (-math.inf, None)
    for theta, phi, norm, _, ratio in rows:
        if ratio > worst[0]:
            worst = (ratio, (theta, phi, norm))
    meta = {"alpha": params.alpha, "beta": params.beta, "kernel": k.name}
    if isinstance(kernel, str) and quality == "scan" and worst[1] is not None:
        theta, phi, norm = worst[1]
        meta["stabilized"] = None if worst[0] < 1e-3 else _stabilized(
            (norm, (theta, phi)), params, kernel, "scan_fine", options,
            lambda kk, th, ph: kk.norm(th, ph),
        )
    return EstimateReport(
        kind="growth",
        columns=("theta", "phi", "norm", "bound", "ratio"),
        rows=rows,
        cap=cap,
        meta=meta,
    )


def gradient_check(params: JacobiParams, kernel, theta_grid, phi_grid, cap: float = 1e3,
                   quality: str = "scan", options: dict | None = None) -> EstimateReport:
    """ratio = (||d_theta K|| + ||d_phi K||) |theta-phi| mu(B) per grid point."""
    options = options or {}
    k = _resolve_kernel(params, kernel, quality, options)

    pairs = list(_pairs(theta_grid, phi_grid))
    grads = _grad_map(k, pairs)

    def one(pair):
        theta, phi = pair
        sep = abs(theta - phi)
        ball = mu_ball(params, theta, sep).exact
        g1, g2 = grads[pair]
        return (theta, phi, g1 + g2, 1.0 / (sep * ball), (g1 + g2) * sep * ball)

    rows = [one(p) for p in pairs]
    worst = (-math.inf, None)
    for theta, phi, gsum, _, ratio in rows:
        if ratio > worst[0]:
            worst = (ratio, (theta, phi, gsum))
    meta = {"alpha": params.alpha, "beta": params.beta, "kernel": k.name}
    if isinstance(kernel, str) and quality == "scan" and worst[1] is not None:
        theta, phi, gsum = worst[1]
        meta["stabilized"] = None if worst[0] < 1e-3 else _stabilized(
            (gsum, (theta, phi)), params, kernel, "scan_fine", options,
            lambda kk, th, ph: sum(kk.grad_norms(th, ph)),
        )
    return EstimateReport(
        kind="gradient",
        columns=("theta", "phi", "norm", "bound", "ratio"),
        rows=rows,
        cap=cap,
        meta=meta,
    )


def smoothness_check(params: JacobiParams, kernel, n_samples: int = 100, seed: int = 7,
                     cap: float = 1e3, quality: str = "scan",
                     options: dict | None = None) -> EstimateReport:
    """Samples ||K(theta,.) - K(theta',.)|| on triples with
    |theta - phi| > 2 |theta - theta'| against the first smoothness bound."""
    options = options or {}
    k = _resolve_kernel(params, kernel, quality, options)
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < n_samples:
        theta = rng.uniform(0.05, math.pi - 0.05)
        phi = rng.uniform(0.05, math.pi - 0.05)
        sep = abs(theta - phi)
        if sep < 0.1:
            continue
        step = sep * rng.uniform(0.05, 0.49) * (1.0 if rng.random() < 0.5 else -1.0)
        theta2 = theta + step
        if not 0.0 < theta2 < math.pi or abs(theta2 - phi) < 1e-6:
            continue
        ball = mu_ball(params, theta, sep).exact
        diff = k.diff_norm(theta, theta2, phi)
        bound = abs(step) / (sep * ball)
        rows.append((theta, theta2, phi, diff, bound, diff / bound))
    return EstimateReport(
        kind="smoothness",
        columns=("theta", "theta2", "phi", "diff_norm", "bound", "ratio"),
        rows=rows,
        cap=cap,
        meta={"alpha": params.alpha, "beta": params.beta, "kernel": k.name},
    )
