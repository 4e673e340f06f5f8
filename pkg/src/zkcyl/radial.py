"""Two-domain radial discretization and the assembled transverse operator.

Domain I covers the axis region rho < rho0 using the variable s = rho^2
(functions regular on the symmetry axis are analytic in rho^2, and the
radial Laplacian becomes ``4s d_ss + 4 d_s``, regular at s=0). Domain II
covers rho0 < rho < rho1 in the physical variable, where ``1/rho`` is
harmless. Both use Chebyshev collocation in a mapped variable l in [-1,1]:

* inner:  s = rho0^2 (1+l)/2         (l=+1 interface, l=-1 axis)
* outer:  rho = rho0 (1+l)/2 + rho1 (1-l)/2   (l=+1 interface, l=-1 outer edge)

The combined unknown vector concatenates the inner block (indices
0..N_I, interface first) and the outer block (indices N_I+1..N_I+N_II+1,
interface first). Three rows of the block-diagonal Laplacian are replaced
by constraints (tau-method): value matching at the interface on the inner
interface row, derivative matching ``2 rho0 u^I_s = u^II_rho`` on the outer
interface row, and the Dirichlet condition u(rho1)=0 on the last row. The
axis node s=0 keeps its ordinary collocation row; the equation is regular
there and needs no boundary condition.
"""

from dataclasses import dataclass

import numpy as np

from .chebyshev import ChebKernel, cheb_kernel, clenshaw_curtis_weights
from .errors import ConfigurationError

__all__ = [
    "RadialLayout",
    "TransverseOperator",
    "build_layout",
    "inner_operator",
    "outer_operator",
    "assemble_transverse",
]


@dataclass(frozen=True)
class RadialLayout:
    """Node sets, maps, and quadrature for the two radial domains."""

    rho0: float
    rho1: float
    N_I: int
    N_II: int
    inner: ChebKernel
    outer: ChebKernel
    s_inner: np.ndarray       # s = rho^2 at inner nodes, rho0^2 down to 0
    rho_outer: np.ndarray     # rho at outer nodes, rho0 up to rho1
    physical_rho: np.ndarray  # concatenated physical rho at all nodes
    quad_weights: np.ndarray  # weights for int_0^rho1 f(rho) rho drho

    @property
    def size(self):
        return self.N_I + self.N_II + 2

    @property
    def inner_slice(self):
        return slice(0, self.N_I + 1)

    @property
    def outer_slice(self):
        return slice(self.N_I + 1, self.N_I + self.N_II + 2)

    @property
    def idx_inner_interface(self):
        return 0

    @property
    def idx_axis(self):
        return self.N_I

    @property
    def idx_outer_interface(self):
        return self.N_I + 1

    @property
    def idx_outer_boundary(self):
        return self.N_I + self.N_II + 1

    def ds_dl(self):
        return 0.5 * self.rho0**2

    def dl_drho(self):
        return 2.0 / (self.rho0 - self.rho1)


@dataclass(frozen=True)
class TransverseOperator:
    """Block radial Laplacian with tau rows carrying the constraints.

    ``matrix`` approximates ``d_rhorho + (1/rho) d_rho`` on all rows except
    the three in ``tau_rows``, which hold the interface matching and outer
    Dirichlet functionals. ``constraints`` aliases those three rows.
    """

    matrix: np.ndarray
    tau_rows: tuple
    layout: RadialLayout

    @property
    def constraints(self):
        return self.matrix[list(self.tau_rows)]

    def interior_mask(self):
        mask = np.ones(self.layout.size, dtype=bool)
        mask[list(self.tau_rows)] = False
        return mask


def build_layout(rho0=1.0, rho1=20.0, N_I=20, N_II=100):
    """Construct the two-domain layout with quadrature weights.

    Weights come from Clenshaw-Curtis rules composed with the map
    Jacobians: ``int f rho drho = 1/2 int f ds`` on the inner domain and an
    affine stretch on the outer one.
    """
    if not 0 < rho0 < rho1:
        raise ConfigurationError(
            f"layout: need 0 < rho0 < rho1, got rho0={rho0}, rho1={rho1}"
        )
    if N_I < 4 or N_II < 4:
        raise ConfigurationError(
            f"layout: need N_I, N_II >= 4, got N_I={N_I}, N_II={N_II}"
        )
    inner = cheb_kernel(N_I)
    outer = cheb_kernel(N_II)
    s_inner = rho0**2 * (1.0 + inner.points) / 2.0
    rho_outer = rho0 * (1.0 + outer.points) / 2.0 + rho1 * (1.0 - outer.points) / 2.0
    physical_rho = np.concatenate([np.sqrt(s_inner), rho_outer])

    w_in = clenshaw_curtis_weights(N_I) * (rho0**2 / 4.0)
    w_out = clenshaw_curtis_weights(N_II) * ((rho1 - rho0) / 2.0) * rho_outer
    quad_weights = np.concatenate([w_in, w_out])

    layout = RadialLayout(
        rho0=float(rho0),
        rho1=float(rho1),
        N_I=int(N_I),
        N_II=int(N_II),
        inner=inner,
        outer=outer,
        s_inner=s_inner,
        rho_outer=rho_outer,
        physical_rho=physical_rho,
        quad_weights=quad_weights,
    )
    for a in (s_inner, rho_outer, physical_rho, quad_weights):
        a.setflags(write=False)
    return layout


def inner_operator(layout):
    """Matrix for ``4s d_ss + 4 d_s`` on the inner nodes (mapped to l)."""
    dl_ds = 1.0 / layout.ds_dl()
    Dl = layout.inner.D
    D2l = layout.inner.D2
    return 4.0 * (layout.s_inner[:, None] * D2l) * dl_ds**2 + 4.0 * dl_ds * Dl


def outer_operator(layout):
    """Matrix for ``d_rhorho + (1/rho) d_rho`` on the outer nodes."""
    dl_drho = layout.dl_drho()
    Dr = dl_drho * layout.outer.D
    D2r = dl_drho**2 * layout.outer.D2
    return D2r + Dr / layout.rho_outer[:, None]


def assemble_transverse(layout):
    """Assemble the full transverse operator with its three tau rows."""
    m = layout.size
    A = np.zeros((m, m))
    A[layout.inner_slice, layout.inner_slice] = inner_operator(layout)
    A[layout.outer_slice, layout.outer_slice] = outer_operator(layout)

    r_val = layout.idx_inner_interface
    r_der = layout.idx_outer_interface
    r_bc = layout.idx_outer_boundary

    # value matching: u^I(rho0^2) - u^II(rho0) = 0
    A[r_val, :] = 0.0
    A[r_val, layout.idx_inner_interface] = 1.0
    A[r_val, layout.idx_outer_interface] = -1.0

    # derivative matching: 2 rho0 u^I_s(rho0^2) - u^II_rho(rho0) = 0
    A[r_der, :] = 0.0
    A[r_der, layout.inner_slice] = 2.0 * layout.rho0 / layout.ds_dl() * layout.inner.D[0, :]
    A[r_der, layout.outer_slice] = -layout.dl_drho() * layout.outer.D[0, :]

    # outer Dirichlet: u^II(rho1) = 0
    A[r_bc, :] = 0.0
    A[r_bc, r_bc] = 1.0

    A.setflags(write=False)
    return TransverseOperator(matrix=A, tau_rows=(r_val, r_der, r_bc), layout=layout)
