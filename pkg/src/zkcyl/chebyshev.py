"""Chebyshev collocation kernels: nodes, differentiation matrices,
coefficient transforms, and Clenshaw-Curtis quadrature on [-1, 1].

Nodes are the extrema ``l_n = cos(pi*n/N_c)``, n = 0..N_c, ordered from +1
down to -1. The differentiation matrix follows the standard collocation
construction with the diagonal computed as negative row sums, which keeps
row sums at rounding level and mitigates the O(N_c^2) conditioning.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "ChebKernel",
    "cheb_kernel",
    "cheb_coefficients",
    "coefficient_matrix",
    "tail_magnitude",
    "clenshaw_curtis_weights",
]


@dataclass(frozen=True)
class ChebKernel:
    """Collocation points and derivative matrices for one degree."""

    degree: int
    points: np.ndarray
    D: np.ndarray
    D2: np.ndarray


def cheb_kernel(N_c):
    """Build points and first/second differentiation matrices of degree N_c."""
    if N_c < 2:
        raise ConfigurationError(f"Chebyshev degree must be >= 2, got {N_c}")
    n = np.arange(N_c + 1)
    points = np.cos(np.pi * n / N_c)
    c = np.ones(N_c + 1)
    c[0] = 2.0
    c[-1] = 2.0
    c *= (-1.0) ** n
    dx = points[:, None] - points[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(N_c + 1))
    # negative-sum trick: diagonal from the exact-derivative-of-constants identity
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    kernel = ChebKernel(degree=int(N_c), points=points, D=D, D2=D @ D)
    for a in (kernel.points, kernel.D, kernel.D2):
        a.setflags(write=False)
    return kernel


def coefficient_matrix(N_c):
    """Dense matrix mapping samples at the collocation points to Chebyshev
    coefficients a_n with ``f(l) = sum a_n T_n(l)``."""
    n = np.arange(N_c + 1)
    M = np.cos(np.pi * np.outer(n, n) / N_c)
    M *= 2.0 / N_c
    M[:, 0] *= 0.5
    M[:, -1] *= 0.5
    M[0, :] *= 0.5
    M[-1, :] *= 0.5
    return M


def cheb_coefficients(samples, method="fct"):
    """Chebyshev coefficients of samples taken at the collocation points.

    ``method="fct"`` uses the fast cosine transform (an FFT of the even
    extension); ``method="dense"`` multiplies by the explicit cosine matrix.
    Both agree to rounding and the dense path serves as the cross-check.
    """
    f = np.asarray(samples, dtype=float)
    N_c = f.size - 1
    if N_c < 1:
        return f.copy()
    if method == "dense":
        return coefficient_matrix(N_c) @ f
    if method != "fct":
        raise ValueError(f"unknown method {method!r}")
    ext = np.empty(2 * N_c, dtype=float)
    ext[: N_c + 1] = f
    ext[N_c + 1 :] = f[-2:0:-1]
    a = np.fft.rfft(ext).real / N_c
    a[0] *= 0.5
    a[-1] *= 0.5
    return a


def tail_magnitude(coeffs, fraction):
    """Max |a_n| over the trailing ``fraction`` of the coefficient indices.

    Monotone in ``fraction``: a wider window can only increase the result.
    """
    a = np.abs(np.asarray(coeffs))
    if a.size == 0:
        raise ValueError("empty coefficient array")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    count = max(1, int(np.ceil(fraction * a.size)))
    return float(a[a.size - count :].max())


def clenshaw_curtis_weights(N_c):
    """Quadrature weights on [-1, 1] for the collocation points.

    Built by pairing the coefficient transform with the exact Chebyshev
    moments (int T_n = 2/(1-n^2) for even n, 0 for odd), so the rule
    integrates every polynomial of degree <= N_c exactly.
    """
    n = np.arange(N_c + 1)
    moments = np.zeros(N_c + 1)
    moments[::2] = 2.0 / (1.0 - n[::2].astype(float) ** 2)
    return moments @ coefficient_matrix(N_c)
