"""Single point of access for the special functions used in the package.

Everything numeric in jpkernel that needs Gamma/Beta-type functions or
Gauss-Jacobi nodes goes through this module, so the numerical provenance
is one library (scipy.special) and can be swapped or audited in one place.
"""

from __future__ import annotations

import numpy as np
import scipy.special as _sp

from jpkernel.errors import QuadratureError


def gamma(x):
    """Gamma function; supports negative non-integer arguments."""
    return _sp.gamma(x)


def gammaln(x):
    """log |Gamma(x)| for x > 0 (callers guarantee positivity)."""
    return _sp.gammaln(x)


def beta(a, b):
    """Euler Beta for positive arguments, computed in log space."""
    return float(np.exp(_sp.betaln(a, b)))


def betainc_reg(a, b, x):
    """Regularized incomplete Beta I_x(a, b) for a, b > 0."""
    return _sp.betainc(a, b, x)


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric 2F1."""
    return _sp.hyp2f1(a, b, c, z)


def gammaincc_times_gamma(s, x):
    """Upper incomplete Gamma(s, x) = Gamma(s) * Q(s, x), for s > 0."""
    return _sp.gammaincc(s, x) * _sp.gamma(s)


def roots_jacobi(n, a, b):
    """Gauss-Jacobi nodes/weights for weight (1-x)^a (1+x)^b on (-1, 1).

    Raises QuadratureError if the underlying solver fails (the node index
    is not recoverable from scipy, so the message carries n, a, b).
    """
    try:
        x, w = _sp.roots_jacobi(n, a, b)
    except Exception as exc:  # pragma: no cover - solver failures are rare
        raise QuadratureError(
            f"Gauss-Jacobi node solver failed for n={n}, a={a}, b={b}: {exc}"
        ) from exc
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(w))):
        bad = int(np.flatnonzero(~(np.isfinite(x) & np.isfinite(w)))[0])
        raise QuadratureError(
            f"Gauss-Jacobi rule n={n}, a={a}, b={b}: non-finite node/weight at index {bad}"
        )
    return x, w


def roots_legendre(n):
    """Gauss-Legendre nodes/weights on (-1, 1)."""
    return _sp.roots_legendre(n)
