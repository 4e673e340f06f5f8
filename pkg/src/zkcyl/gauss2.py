"""Implicit 4th-order 2-stage Gauss time stepping with simplified Newton.

Per Fourier mode k the semi-discrete system reads

    d/dt u_hat_k = -ik (L - k^2) u_hat_k - ik fft(u^p)_k,

which decouples in k except for the nonlinear transform. Each step solves
the two coupled stage equations

    (I + h a_ii ik (L - k^2)) K_i = -ik fft(utilde_i^p)
                                    - ik (L - k^2)(u_n + h a_ij K_j)

by alternating K1/K2 sweeps (Gauss-Seidel over the stages) with the
left-hand operator frozen: the nonlinear term enters the residual only.
The tau rows of the stage matrices are replaced by the constraint
functionals and the matching right-hand-side entries are zeroed, so every
stage increment satisfies the interface and boundary conditions exactly.

Because a11 = a22 and the matrices for -k are the conjugates of those for
+k, a single factorization per |k| serves all four stage operators; the
solver stores explicit inverses for the k >= 0 half-spectrum and applies
them as one batched matrix-vector product. That batched product is the
parallel map over wavenumbers: its reduction order is fixed, so runs are
deterministic.

The iteration stops once the max-norm change of (K1, K2) drops below
``newton_tol`` (absolute, in amplitude-normalized modal units). The h
prefactor in the update u_{n+1} = u_n + h sum(b_i K_i) buys roughly three
extra digits beyond the stopping threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, StepFailure
from .fields import Field, signed_power
from .fourier import rfft_forward, rfft_inverse

__all__ = [
    "GaussTableau",
    "gauss2_tableau",
    "StageSolver",
    "precompute",
    "step",
    "StepResult",
    "BlowUpDetector",
    "EvolveResult",
    "evolve",
]

_DIVERGE_CAP = 1e12


@dataclass(frozen=True)
class GaussTableau:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray


def gauss2_tableau():
    """Coefficients of the 2-stage Gauss (Hammer-Hollingsworth) method."""
    r = np.sqrt(3.0) / 6.0
    a = np.array([[0.25, 0.25 - r], [0.25 + r, 0.25]])
    b = np.array([0.5, 0.5])
    c = np.array([0.5 - r, 0.5 + r])
    return GaussTableau(a=a, b=b, c=c)


@dataclass
class StageSolver:
    """Cached per-wavenumber factorizations for one step size h."""

    h: float
    grid: object
    op: object
    newton_tol: float
    max_newton: int
    tableau: GaussTableau
    ikv: np.ndarray          # i*k for k >= 0, Nyquist zeroed, shape (nk,)
    k2: np.ndarray           # k^2 for k >= 0, shape (nk,)
    stage_inv: np.ndarray    # (nk, m, m) complex inverses of the stage matrices
    lmat_t: np.ndarray       # transpose of the transverse operator, C order
    tau_cols: list
    last_iterations: int = 0
    last_increments: tuple = ()

    @property
    def nk(self):
        return self.ikv.size


def precompute(h, grid, op, newton_tol=1e-6, max_newton=50):
    """Factorize the stage matrices for every k >= 0 once per step size.

    Cost is one dense inversion of an (N_I+N_II+2)-sized complex matrix per
    wavenumber. A change of h requires a fresh solver; nothing here can be
    reused across step sizes.
    """
    if h <= 0:
        raise ConfigurationError(f"step size must be positive, got h={h}")
    tab = gauss2_tableau()
    m = op.layout.size
    nk = grid.N // 2 + 1
    kpos = grid.rfft_wavenumbers()
    ikv = 1j * kpos
    if grid.N % 2 == 0:
        ikv[-1] = 0.0
    k2 = kpos**2

    L = op.matrix
    constraints = op.constraints
    tau = list(op.tau_rows)
    eye = np.eye(m)
    a11 = tab.a[0, 0]

    stage_inv = np.empty((nk, m, m), dtype=complex)
    block = 256
    for lo in range(0, nk, block):
        hi = min(lo + block, nk)
        mats = np.empty((hi - lo, m, m), dtype=complex)
        for i, j in enumerate(range(lo, hi)):
            mats[i] = eye + (h * a11 * ikv[j]) * (L - k2[j] * eye)
            mats[i, tau, :] = constraints
        try:
            stage_inv[lo:hi] = np.linalg.inv(mats)
        except np.linalg.LinAlgError:
            for i, j in enumerate(range(lo, hi)):
                try:
                    np.linalg.inv(mats[i])
                except np.linalg.LinAlgError:
                    raise ConfigurationError(
                        f"singular stage matrix at k={kpos[j]} for h={h}"
                    ) from None
            raise

    return StageSolver(
        h=float(h),
        grid=grid,
        op=op,
        newton_tol=float(newton_tol),
        max_newton=int(max_newton),
        tableau=tab,
        ikv=ikv,
        k2=k2,
        stage_inv=stage_inv,
        lmat_t=np.ascontiguousarray(L.T),
        tau_cols=tau,
    )


@dataclass
class StepResult:
    field: Field
    iterations: int
    increments: tuple


def _apply_l_minus_k2(solver, v):
    """(L - k^2) applied along the transverse axis of a (nk, m) stack."""
    out = v.real @ solver.lmat_t + 1j * (v.imag @ solver.lmat_t)
    out -= solver.k2[:, None] * v
    return out


def _nonlinear_hat(solver, uh, nl):
    """fft(u^p) for the field represented by the half-spectrum uh."""
    u = rfft_inverse(uh, solver.grid.N, axis=0)
    return rfft_forward(signed_power(u, nl.p), axis=0)


def _explicit_rhs(solver, uh, nl):
    lin = _apply_l_minus_k2(solver, uh)
    if nl is not None:
        lin = lin + _nonlinear_hat(solver, uh, nl)
    out = -solver.ikv[:, None] * lin
    out[:, solver.tau_cols] = 0.0
    return out


def _stage_solve(solver, uh, k_self, k_other, a_self, a_other, nl):
    """One Gauss-Seidel update of a single stage."""
    h = solver.h
    v = uh + (h * a_other) * k_other
    rhs = _apply_l_minus_k2(solver, v)
    if nl is not None:
        rhs = rhs + _nonlinear_hat(solver, v + (h * a_self) * k_self, nl)
    rhs = -solver.ikv[:, None] * rhs
    rhs[:, solver.tau_cols] = 0.0
    return np.matmul(solver.stage_inv, rhs[:, :, None])[:, :, 0]


def step(u_n, solver, nl):
    """Advance one step; returns the new field and the iteration record.

    Raises :class:`StepFailure` when the stage iteration exceeds
    ``max_newton`` or diverges; the caller may halve h or declare blow-up.
    """
    a = solver.tableau.a
    b = solver.tableau.b
    h = solver.h
    uh = rfft_forward(u_n.values, axis=0)

    k1 = _explicit_rhs(solver, uh, nl)
    k2 = k1.copy()

    increments = []
    for it in range(1, solver.max_newton + 1):
        k1_new = _stage_solve(solver, uh, k1, k2, a[0, 0], a[0, 1], nl)
        k2_new = _stage_solve(solver, uh, k2, k1_new, a[1, 1], a[1, 0], nl)
        inc = max(
            np.abs(k1_new - k1).max(),
            np.abs(k2_new - k2).max(),
        )
        increments.append(inc)
        k1, k2 = k1_new, k2_new
        if not np.isfinite(inc) or inc > _DIVERGE_CAP:
            raise StepFailure(
                f"stage iteration diverged (increment={inc:.3e})",
                iterations=it,
                increment=inc,
            )
        if inc < solver.newton_tol:
            break
    else:
        raise StepFailure(
            f"stage iteration did not converge in {solver.max_newton} sweeps "
            f"(last increment={increments[-1]:.3e})",
            iterations=solver.max_newton,
            increment=increments[-1],
        )

    uh_next = uh + h * (b[0] * k1 + b[1] * k2)
    u_next = rfft_inverse(uh_next, solver.grid.N, axis=0)
    solver.last_iterations = it
    solver.last_increments = tuple(increments)
    return StepResult(
        field=Field(u_next, u_n.grid, u_n.layout),
        iterations=it,
        increments=tuple(increments),
    )


@dataclass
class BlowUpDetector:
    """Flags blow-up when the sup norm has grown past ``linf_factor`` times
    its initial value while the stage iteration is working hard, or when a
    step fails outright."""

    linf_factor: float = 10.0
    newton_trigger: int = 12
    linf0: float = None

    def fired(self, linf, iterations):
        if self.linf0 is None or self.linf0 == 0.0:
            return False
        return linf > self.linf_factor * self.linf0 and iterations >= self.newton_trigger


@dataclass
class EvolveResult:
    field: Field
    t_final: float
    steps_completed: int
    stop_reason: str            # completed | blowup | step-failure
    stop_detail: str
    linf_initial: float
    linf_final: float
    max_iterations: int
    records: list = field(default_factory=list)


def evolve(
    u0,
    op,
    nl,
    t_end,
    N_t,
    *,
    t0=0.0,
    newton_tol=1e-6,
    max_newton=50,
    detector=None,
    diag_stride=10,
    on_diag=None,
    snap_stride=None,
    on_snap=None,
    max_halvings=0,
):
    """Integrate from t0 to t_end in N_t uniform steps.

    ``on_diag(t, field, iterations)`` runs every ``diag_stride`` steps and on
    the final step; its return values are collected into the result's
    ``records``. ``on_snap(t, field)`` runs every ``snap_stride`` steps.
    Stops early when the blow-up detector fires or a step fails; with
    ``max_halvings > 0`` a failed step is retried at half the step size
    (rebuilding the stage factorizations) before giving up, which lets
    collapsing solutions be tracked a little deeper.
    """
    if N_t < 1:
        raise ConfigurationError(f"N_t must be >= 1, got {N_t}")
    if t_end <= t0:
        raise ConfigurationError(f"t_end={t_end} must exceed t0={t0}")

    h = (t_end - t0) / N_t
    solver = precompute(h, u0.grid, op, newton_tol=newton_tol, max_newton=max_newton)

    u = u0
    t = t0
    linf0 = float(np.abs(u0.values).max())
    if detector is not None and detector.linf0 is None:
        detector.linf0 = linf0

    records = []
    halvings = 0
    steps_done = 0
    max_iters = 0
    linf = linf0
    stop_reason = "completed"
    stop_detail = ""

    def emit_diag(t_now, fld, iters):
        if on_diag is not None:
            rec = on_diag(t_now, fld, iters)
            if rec is not None:
                records.append(rec)

    remaining = N_t
    while remaining > 0:
        try:
            result = step(u, solver, nl)
        except StepFailure as exc:
            if halvings < max_halvings:
                halvings += 1
                h = h / 2.0
                remaining = max(1, int(round((t_end - t) / h)))
                solver = precompute(
                    h, u0.grid, op, newton_tol=newton_tol, max_newton=max_newton
                )
                continue
            if detector is not None:
                stop_reason = "blowup"
                stop_detail = f"step failure at t={t:.6g}: {exc}"
            else:
                stop_reason = "step-failure"
                stop_detail = f"t={t:.6g}: {exc}"
            break
        u = result.field
        remaining -= 1
        t = t_end - remaining * h
        steps_done += 1
        max_iters = max(max_iters, result.iterations)
        linf = float(np.abs(u.values).max())

        at_end = remaining == 0
        if steps_done % diag_stride == 0 or at_end:
            emit_diag(t, u, result.iterations)
        if on_snap is not None and snap_stride and steps_done % snap_stride == 0:
            on_snap(t, u)

        if detector is not None and detector.fired(linf, result.iterations):
            stop_reason = "blowup"
            stop_detail = (
                f"detector fired at t={t:.6g}: linf={linf:.4g} "
                f"({linf / detector.linf0:.2f}x initial), "
                f"iterations={result.iterations}"
            )
            if steps_done % diag_stride != 0 and not at_end:
                emit_diag(t, u, result.iterations)
            break

    return EvolveResult(
        field=u,
        t_final=t,
        steps_completed=steps_done,
        stop_reason=stop_reason,
        stop_detail=stop_detail,
        linf_initial=linf0,
        linf_final=linf,
        max_iterations=max_iters,
        records=records,
    )
