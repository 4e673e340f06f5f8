"""Fourier grid and transforms on the torus x in [-pi*L, pi*L).

Conventions (fixed repo-wide):

* nodes ``x_n = L*(-pi + 2*pi*n/N)`` for ``n = 0..N-1``;
* integer wavenumber ladder ``k_j = j/L`` for ``j = 0..N/2`` and
  ``k_j = (j-N)/L`` for ``j > N/2``, i.e. the index order produced by an
  unshifted FFT with the Nyquist entry reported as ``+N/(2L)``;
* forward transform divides by N (``u_hat = fft(u)/N``) so modal magnitudes
  are amplitude-like, the inverse multiplies back;
* the inverse transform unconditionally discards imaginary round-off and
  returns a real array.

Odd x-derivatives multiply by ``i*k`` with the Nyquist coefficient zeroed:
its sign is ambiguous for real signals, so it carries no derivative
information.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "TorusGrid",
    "make_torus_grid",
    "fft_forward",
    "fft_inverse",
    "rfft_forward",
    "rfft_inverse",
]


@dataclass(frozen=True)
class TorusGrid:
    """Uniform periodic grid on [-pi*L, pi*L) with its wavenumber ladder."""

    L: float
    N: int
    nodes: np.ndarray
    wavenumbers: np.ndarray

    @property
    def spacing(self):
        return 2.0 * np.pi * self.L / self.N

    def derivative_factor(self):
        """i*k ladder with the Nyquist entry zeroed, for odd derivatives."""
        ik = 1j * self.wavenumbers
        ik[self.N // 2] = 0.0
        return ik

    def rfft_wavenumbers(self):
        """Nonnegative half of the ladder (k_j = j/L, j = 0..N/2)."""
        return self.wavenumbers[: self.N // 2 + 1].copy()


def make_torus_grid(L, N):
    """Build a :class:`TorusGrid`.

    N must be a power of two (>= 4) so the FFT path is always the fast one;
    L must be positive.
    """
    if L <= 0:
        raise ConfigurationError(f"grid.L: must be positive, got {L}")
    if N < 4 or (N & (N - 1)) != 0:
        raise ConfigurationError(f"grid.N: must be a power of two >= 4, got {N}")
    n = np.arange(N)
    nodes = L * (-np.pi + 2.0 * np.pi * n / N)
    j = np.arange(N)
    ladder = np.where(j <= N // 2, j, j - N) / L
    grid = TorusGrid(L=float(L), N=int(N), nodes=nodes, wavenumbers=ladder)
    grid.nodes.setflags(write=False)
    grid.wavenumbers.setflags(write=False)
    return grid


def fft_forward(values, axis=0):
    """Full-spectrum forward transform, normalized by N."""
    n = values.shape[axis]
    return np.fft.fft(values, axis=axis) / n


def fft_inverse(modal, axis=0):
    """Full-spectrum inverse; imaginary round-off is always discarded."""
    n = modal.shape[axis]
    return np.real(np.fft.ifft(modal, axis=axis) * n)


def rfft_forward(values, axis=0):
    """Half-spectrum (k >= 0) forward transform of a real array."""
    n = values.shape[axis]
    return np.fft.rfft(values, axis=axis) / n


def rfft_inverse(modal, n, axis=0):
    """Inverse of :func:`rfft_forward`; real by construction."""
    return np.fft.irfft(modal * n, n=n, axis=axis)
