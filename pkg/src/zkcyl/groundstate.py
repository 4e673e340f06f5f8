"""Solitary-wave profile construction on the evolution discretization.

The traveling wave u = Q(x - c t, rho) satisfies the nonlinear elliptic
system

    Lap Q - c Q + Q^p = 0

discretized exactly as in the dynamics: the Laplacian acts per Fourier
mode as (L - k^2) and the three tau rows carry the interface/boundary
functionals with zero targets. The full residual is driven to zero by a
Newton iteration whose Jacobian action is a forward finite difference of
the residual; the linear inner solves use restarted GMRES preconditioned
by the (exactly invertible, k-diagonal) linear part Lap - c. The
preconditioner reduces the Jacobian to identity plus the compact
multiplication by p |Q|^{p-1}, which GMRES handles in a few iterations.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .diagnostics import energy as _energy
from .diagnostics import mass as _mass
from .errors import SolverFailure
from .fields import Field, Nonlinearity, gaussian_data, signed_power
from .fourier import fft_forward, fft_inverse, rfft_forward, rfft_inverse

__all__ = [
    "GroundStateProfile",
    "energy_mass_ratio",
    "shift_in_x",
    "resample_x",
    "residual",
    "jacobian_vector",
    "solve_ground_state",
    "construct_ground_state",
]


@dataclass
class GroundStateProfile:
    field: Field
    c: float
    p: Fraction
    residual_norm: float
    mass: float
    energy: float
    newton_iterations: int


def energy_mass_ratio(p):
    """E[Q]/M[Q] = (3p - 7) / (2 (5 - p)); zero in the critical case."""
    p = Fraction(p)
    if p == 5:
        raise ValueError("energy/mass ratio is undefined at p = 5")
    ratio = (3 * p - 7) / (2 * (5 - p))
    return float(ratio)


def shift_in_x(field, distance):
    """Exact periodic translation u(x - distance) via modal phases."""
    uh = fft_forward(field.values, axis=0)
    phase = np.exp(-1j * field.grid.wavenumbers * distance)
    return Field(
        fft_inverse(phase[:, None] * uh, axis=0), field.grid, field.layout
    )


def resample_x(field, grid_new):
    """Spectral refinement/coarsening of the x resolution.

    Zero-pads (or truncates) the Fourier spectrum; exact for fields whose
    trailing coefficients have decayed. The torus scale must match.
    """
    if grid_new.L != field.grid.L:
        raise ValueError(
            f"cannot resample across torus scales {field.grid.L} != {grid_new.L}"
        )
    uh = rfft_forward(field.values, axis=0)
    nk_new = grid_new.N // 2 + 1
    out = np.zeros((nk_new, field.values.shape[1]), dtype=complex)
    keep = min(nk_new, uh.shape[0])
    out[:keep] = uh[:keep]
    return Field(
        rfft_inverse(out, grid_new.N, axis=0), grid_new, field.layout
    )


def _apply_elliptic(values, c, pf, op, grid, with_nonlinearity=True):
    """Residual of the discrete elliptic system, tau rows included."""
    uh = rfft_forward(values, axis=0)
    k = grid.rfft_wavenumbers()
    lin = uh.real @ op.matrix.T + 1j * (uh.imag @ op.matrix.T)
    mask = op.interior_mask().astype(float)
    lin -= (k**2)[:, None] * (uh * mask[None, :])
    out = rfft_inverse(lin, grid.N, axis=0)
    if with_nonlinearity:
        interior = mask.astype(bool)
        out[:, interior] += (
            -c * values[:, interior]
            + signed_power(values[:, interior], pf)
        )
    return out


def residual(field, c, p, op):
    """Field-valued elliptic residual; zero iff the profile solves the
    discretized system including the constraints."""
    vals = _apply_elliptic(field.values, float(c), float(p), op, field.grid)
    return Field(vals, field.grid, field.layout)


def jacobian_vector(values, v, c, pf, op, grid, base=None):
    """Forward finite-difference Jacobian action of the elliptic residual."""
    if base is None:
        base = _apply_elliptic(values, c, pf, op, grid)
    vnorm = np.sqrt(np.vdot(v, v).real)
    if vnorm == 0.0:
        return np.zeros_like(values)
    eps = np.sqrt(np.finfo(float).eps) * np.sqrt(1.0 + np.abs(values).max()) / vnorm
    bumped = _apply_elliptic(values + eps * v, c, pf, op, grid)
    return (bumped - base) / eps


def _linear_preconditioner(c, op, grid):
    """Per-|k| inverse of the linear part Lap - c with tau rows embedded."""
    m = op.layout.size
    nk = grid.N // 2 + 1
    k = grid.rfft_wavenumbers()
    maskd = np.diag(op.interior_mask().astype(float))
    mats = np.empty((nk, m, m))
    for j in range(nk):
        mats[j] = op.matrix - (k[j] ** 2 + c) * maskd
    inv = np.linalg.inv(mats)

    def apply(vec):
        v = vec.reshape(grid.N, m)
        vh = rfft_forward(v, axis=0)
        sol = np.matmul(inv, vh[:, :, None])[:, :, 0]
        return rfft_inverse(sol, grid.N, axis=0).ravel()

    return apply


def _mirror(values):
    """Reflection x -> -x on the periodic grid (index n -> -n mod N)."""
    n = values.shape[0]
    return values[(-np.arange(n)) % n, :]


def solve_ground_state(
    seed,
    c,
    p,
    op,
    *,
    f_tol=1e-10,
    max_newton=40,
    gmres_rtol=1e-3,
    gmres_restart=30,
    gmres_maxiter=20,
    verbose=False,
):
    """Newton-Krylov solve of the discrete elliptic system from a seed.

    The iteration is restricted to the even-in-x sector by symmetrizing the
    seed and every update: the profile is even, and the full Jacobian owns a
    near-null translation mode (the x-derivative of the profile, odd) that
    would otherwise amplify rounding noise and stall GMRES.

    Stops when the residual max-norm drops below ``f_tol``. Raises
    :class:`SolverFailure` on stagnation or divergence, and rejects
    convergence to the trivial zero solution.
    """
    nl = Nonlinearity(Fraction(p))
    pf = nl.pf
    c = float(c)
    grid, layout = seed.grid, seed.layout
    if np.abs(seed.values).max() == 0.0:
        raise SolverFailure("seed field is identically zero")

    u = 0.5 * (seed.values + _mirror(seed.values))
    m = layout.size
    size = grid.N * m
    precond = LinearOperator(
        (size, size), matvec=_linear_preconditioner(c, op, grid), dtype=float
    )

    fvals = _apply_elliptic(u, c, pf, op, grid)
    fnorm = np.abs(fvals).max()
    history = [fnorm]
    for it in range(1, max_newton + 1):
        if fnorm < f_tol:
            break

        base = fvals

        def jv(vec):
            return jacobian_vector(
                u, vec.reshape(grid.N, m), c, pf, op, grid, base=base
            ).ravel()

        jac = LinearOperator((size, size), matvec=jv, dtype=float)
        delta, info = gmres(
            jac,
            -fvals.ravel(),
            rtol=gmres_rtol,
            atol=0.0,
            restart=gmres_restart,
            maxiter=gmres_maxiter,
            M=precond,
        )
        delta = delta.reshape(grid.N, m)
        delta = 0.5 * (delta + _mirror(delta))

        # backtracking on the residual max-norm
        lam = 1.0
        accepted = False
        for _ in range(5):
            trial = u + lam * delta
            tvals = _apply_elliptic(trial, c, pf, op, grid)
            tnorm = np.abs(tvals).max()
            if np.isfinite(tnorm) and tnorm < fnorm:
                u, fvals, fnorm = trial, tvals, tnorm
                accepted = True
                break
            lam *= 0.5
        if verbose:
            print(f"  newton {it:2d}: |F|_inf = {fnorm:.3e} (step {lam:g})")
        if not accepted:
            raise SolverFailure(
                f"Newton stagnated at residual {fnorm:.3e} (iteration {it})",
                residual_norm=fnorm,
                iterations=it,
            )
        history.append(fnorm)
    else:
        if fnorm >= f_tol:
            raise SolverFailure(
                f"Newton did not reach tolerance {f_tol:g}; last residual {fnorm:.3e}",
                residual_norm=fnorm,
                iterations=max_newton,
            )

    if np.abs(u).max() < 1e-6:
        raise SolverFailure(
            "iteration converged to the trivial zero solution",
            residual_norm=fnorm,
        )

    # u -> -u is an exact symmetry of the odd-extension nonlinearity; report
    # the positive branch
    peak_flat = np.argmax(np.abs(u))
    if u.ravel()[peak_flat] < 0:
        u = -u

    profile = Field(u, grid, layout)
    return GroundStateProfile(
        field=profile,
        c=c,
        p=nl.p,
        residual_norm=float(fnorm),
        mass=_mass(profile),
        energy=_energy(profile, nl),
        newton_iterations=len(history) - 1,
    )


def construct_ground_state(
    grid, layout, op, c=1.0, p=Fraction(7, 3), amplitudes=(3.0, 2.5, 3.5), **kwargs
):
    """Solve from a unit-width Gaussian seed, retrying over amplitudes."""
    last = None
    for amp in amplitudes:
        seed = gaussian_data(grid, layout, amp, 1.0)
        try:
            return solve_ground_state(seed, c, p, op, **kwargs)
        except SolverFailure as exc:
            last = exc
    raise SolverFailure(
        f"ground-state construction failed for all seed amplitudes {amplitudes}: {last}"
    )
