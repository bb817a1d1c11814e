"""Two-sided sharp-bound comparator for the kernel and empirical ratio scans.

Short time (t <= 1) the kernel is comparable with
    (t^2 + theta^2 + phi^2)^(-alpha-1/2)
    * (t^2 + (pi-theta)^2 + (pi-phi)^2)^(-beta-1/2) * t / (t^2 + (theta-phi)^2),
long time (t >= 1) with exp(-t |lam| / 2) for H and exp(-t lam / 2) for the
companion kernel.  The comparability constants are not specified by the
theory, so scans record the empirical min/max ratio and check max/min
against a configurable cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from jpkernel._parallel import parallel_map
from jpkernel.basis import mu_total
from jpkernel.kernel import jph_correction, kernel_H_batch
from jpkernel.params import JacobiParams
from jpkernel.report import EstimateReport

EXCLUDE_NEAR_MINUS_ONE = -0.9  # scans beyond this are reported, not gated


@dataclass(frozen=True)
class ComparatorValue:
    z_short: float
    z_long_H: float
    z_long_script: float


def comparator_values(params: JacobiParams, t: float, theta: float, phi: float) -> ComparatorValue:
    a, b = params.alpha, params.beta
    lam = params.lam
    z_short = (
        (t * t + theta * theta + phi * phi) ** (-a - 0.5)
        * (t * t + (math.pi - theta) ** 2 + (math.pi - phi) ** 2) ** (-b - 0.5)
        * t
        / (t * t + (theta - phi) ** 2)
    )
    return ComparatorValue(
        z_short=z_short,
        z_long_H=math.exp(-0.5 * t * abs(lam)),
        z_long_script=math.exp(-0.5 * t * lam),
    )


def comparator(params: JacobiParams, t: float, theta: float, phi: float, which: str = "H") -> float:
    """Short-time comparator for t <= 1, long-time for t > 1.

    Both regimes are valid at t = 1 exactly; scans that care record both
    through comparator_values.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if which not in ("H", "Hscript"):
        raise ValueError(f"which must be 'H' or 'Hscript', got {which!r}")
    vals = comparator_values(params, t, theta, phi)
    if t <= 1.0:
        return vals.z_short
    return vals.z_long_H if which == "H" else vals.z_long_script


def ratio_scan(params: JacobiParams, t_grid, theta_grid, phi_grid, which: str = "H",
               cap: float = 50.0, rtol: float = 1e-7) -> EstimateReport:
    """Per-point ratio kernel / comparator over the grid; pass iff max/min <= cap."""
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    theta_grid = np.atleast_1d(np.asarray(theta_grid, dtype=float))
    phi_grid = np.atleast_1d(np.asarray(phi_grid, dtype=float))

    def one(pair):
        theta, phi = pair
        h_vals = kernel_H_batch(params, t_grid, theta, phi, rtol=rtol)
        if which == "Hscript":
            h_vals = h_vals - jph_correction(params, t_grid)
        out = []
        for t, h in zip(t_grid, h_vals):
            comp = comparator(params, float(t), theta, phi, which=which)
            out.append((float(t), theta, phi, float(h), comp, float(h) / comp))
        return out

    pairs = [(float(th), float(ph)) for th in theta_grid for ph in phi_grid]
    rows = [row for chunk in parallel_map(one, pairs) for row in chunk]
    meta = {
        "alpha": params.alpha,
        "beta": params.beta,
        "which": which,
        "excluded_from_pass": bool(
            params.alpha <= EXCLUDE_NEAR_MINUS_ONE or params.beta <= EXCLUDE_NEAR_MINUS_ONE
        ),
    }
    return EstimateReport(
        kind="sharp",
        columns=("t", "theta", "phi", "kernel", "comparator", "ratio"),
        rows=rows,
        cap=cap,
        two_sided=True,
        meta=meta,
    )


def long_time_fit(params: JacobiParams, theta: float, phi: float, t_lo: float = 5.0,
                  t_hi: float = 20.0, n_points: int = 16):
    """Fit exp(t |lam|/2) H_t -> 2^lam c_ab residual decay on [t_lo, t_hi].

    Returns (rate, log_amplitude) from a log-linear regression of the
    absolute residual; rate is the decay exponent (positive).
    """
    t = np.linspace(t_lo, t_hi, n_points)
    h = kernel_H_batch(params, t, theta, phi)
    limit = 2.0**params.lam * params.c_ab  # = 1 / mu_total
    resid = np.abs(np.exp(0.5 * t * abs(params.lam)) * h - limit)
    floor = 1e-15 * limit
    mask = resid > floor
    if mask.sum() < 4:
        raise ValueError("long-time residual at machine floor; widen the t range")
    slope, intercept = np.polyfit(t[mask], np.log(resid[mask]), 1)
    return -float(slope), float(intercept)


def long_time_limit(params: JacobiParams) -> float:
    """The t -> infinity value of exp(t |lam|/2) H_t, i.e. 1 / mu_total."""
    return 1.0 / mu_total(params)
