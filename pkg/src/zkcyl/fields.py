"""Solution fields, the signed fractional power, and the modal right-hand side.

A :class:`Field` holds real values u(x_n, rho_j) on the tensor grid, a
:class:`ModalField` its complex Fourier-in-x counterpart. After the x
transform the evolution decouples per wavenumber k:

    d/dt u_hat = -ik (L - k^2) u_hat - ik fft(u^p)

with L the assembled transverse operator. Rows of L holding the tau
constraints contribute homogeneous equations, so the corresponding entries
of the right-hand side are zeroed on every evaluation.

Fractional powers with odd-denominator exponents are evaluated through
|u|^p = exp(p log|u|) and re-signed, never through a rational-exponent
primitive on negative arguments; the inverse transform's real enforcement
keeps imaginary round-off out of the nonlinearity.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fourier import TorusGrid, fft_forward, fft_inverse
from .radial import RadialLayout, TransverseOperator

__all__ = [
    "Field",
    "ModalField",
    "Nonlinearity",
    "signed_power",
    "abs_power",
    "forward_x",
    "inverse_x",
    "gaussian_data",
    "scale_data",
    "modal_rhs",
]


@dataclass
class Field:
    """Real solution values of shape (N x-nodes, N_I+N_II+2 radial nodes)."""

    values: np.ndarray
    grid: TorusGrid
    layout: RadialLayout

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expect = (self.grid.N, self.layout.size)
        if self.values.shape != expect:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid/layout {expect}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")

    def copy(self):
        return Field(self.values.copy(), self.grid, self.layout)


@dataclass
class ModalField:
    """Complex Fourier-in-x coefficients, same transverse layout as Field."""

    values: np.ndarray
    grid: TorusGrid
    layout: RadialLayout

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        expect = (self.grid.N, self.layout.size)
        if self.values.shape != expect:
            raise ValueError(
                f"modal shape {self.values.shape} does not match grid/layout {expect}"
            )


@dataclass(frozen=True)
class Nonlinearity:
    """Power nonlinearity u^p with p > 1 a rational with odd denominator."""

    p: Fraction = Fraction(7, 3)

    def __post_init__(self):
        p = Fraction(self.p)
        object.__setattr__(self, "p", p)
        if p <= 1:
            raise ValueError(f"nonlinearity power must exceed 1, got {p}")
        if p.denominator % 2 == 0:
            raise ValueError(
                f"nonlinearity power needs an odd denominator, got {p}"
            )

    @property
    def pf(self):
        return float(self.p)


def signed_power(u, p):
    """Odd extension |u|^p * sign(u); exactly zero at u = 0."""
    pf = float(p)
    arr = np.asarray(u, dtype=float)
    # log(0) = -inf and exp(-inf) = 0, so u = 0 lands exactly on 0
    with np.errstate(divide="ignore"):
        out = np.sign(arr) * np.exp(pf * np.log(np.abs(arr)))
    if np.isscalar(u) or np.ndim(u) == 0:
        return float(out)
    return out


def abs_power(u, q):
    """|u|^q through the same exp/log path (used in the energy density)."""
    qf = float(q)
    arr = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp(qf * np.log(np.abs(arr)))
    if np.isscalar(u) or np.ndim(u) == 0:
        return float(out)
    return out


def forward_x(field):
    """FFT in x; see :mod:`zkcyl.fourier` for the normalization."""
    return ModalField(fft_forward(field.values, axis=0), field.grid, field.layout)


def inverse_x(modal):
    """Inverse FFT in x with unconditional real enforcement."""
    return Field(fft_inverse(modal.values, axis=0), modal.grid, modal.layout)


def gaussian_data(grid, layout, lam, alpha):
    """Isotropic Gaussian ``lam * exp(-alpha (x^2 + rho^2))`` on the grid."""
    if alpha <= 0:
        raise ValueError(f"gaussian width parameter must be positive, got {alpha}")
    x2 = grid.nodes[:, None] ** 2
    r2 = layout.physical_rho[None, :] ** 2
    return Field(lam * np.exp(-alpha * (x2 + r2)), grid, layout)


def scale_data(field, lam):
    """Pointwise scaling; the mass scales by lam^2."""
    return Field(lam * field.values, field.grid, field.layout)


def modal_rhs(modal, op, nl):
    """Right-hand side -ik (L - k^2) u_hat - ik fft(u^p) in modal form.

    ``nl=None`` evaluates the linear part only. Entries at the tau rows are
    zeroed: the constraints are homogeneous, so they contribute no flux.
    The k=0 row vanishes identically (the overall d_x annihilates the mean
    mode) and the Nyquist row is frozen by the ik convention.
    """
    if modal.values.shape[1] != op.layout.size:
        raise ValueError("modal field and transverse operator disagree on layout")
    uh = modal.values
    k = modal.grid.wavenumbers
    ik = modal.grid.derivative_factor()
    lin = uh.real @ op.matrix.T + 1j * (uh.imag @ op.matrix.T)
    lin -= (k**2)[:, None] * uh
    if nl is not None:
        u = inverse_x(modal)
        lin += fft_forward(signed_power(u.values, nl.p), axis=0)
    rhs = -ik[:, None] * lin
    rhs[:, list(op.tau_rows)] = 0.0
    return ModalField(rhs, modal.grid, modal.layout)
