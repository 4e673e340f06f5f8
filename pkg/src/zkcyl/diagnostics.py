"""Conserved quantities, resolution metrics, drift reports, and the
radiation-cone fit.

Mass and energy are the cylindrical integrals

    M[u] = 2 pi int int u^2           rho drho dx
    E[u] = 2 pi int int ( (u_x^2 + u_rho^2)/2 - |u|^{p+1}/(p+1) ) rho drho dx

discretized by the rectangle rule in x (spectrally exact on the torus) and
the layout's Clenshaw-Curtis weights in rho. u_x comes from wavenumber
multiplication; u_rho from the mapped Chebyshev derivative per domain,
using u_rho^2 = 4 s u_s^2 on the inner domain so the axis is regular.
|u|^{p+1} uses the absolute value, keeping the fractional power off the
negative real axis.

Energy drift is the primary accuracy proxy (it typically overestimates the
actual error by an order or two); mass drift is logged alongside. When the
initial energy is itself numerically zero, as for the ground state, the
energy drift falls back to an absolute difference.
"""

import csv
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .fields import abs_power
from .fourier import fft_forward, fft_inverse

__all__ = [
    "DiagnosticsRecord",
    "mass",
    "energy",
    "linf",
    "radial_derivative",
    "spectral_tails",
    "make_record",
    "DriftReport",
    "drift_report",
    "ConeReport",
    "cone_half_angle",
    "write_series",
    "read_series",
]

SERIES_COLUMNS = (
    "t",
    "mass",
    "energy",
    "linf",
    "fourier_tail",
    "cheb_tail_I",
    "cheb_tail_II",
    "newton_iters",
)


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass: float
    energy: float
    linf: float
    fourier_tail: float
    cheb_tail_I: float
    cheb_tail_II: float
    newton_iters: int

    def __post_init__(self):
        vals = [self.t, self.mass, self.energy, self.linf]
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite diagnostics at t={self.t}")
        if self.mass < 0:
            raise ValueError(f"negative mass {self.mass} at t={self.t}")


def mass(field):
    """2 pi ||u||^2 over the cylinder via rectangle rule x radial weights."""
    u = field.values
    radial = (u * u) @ field.layout.quad_weights
    return float(2.0 * np.pi * field.grid.spacing * radial.sum())


def linf(field):
    """Max |u| over the collocation points."""
    return float(np.abs(field.values).max())


def radial_derivative(field):
    """u_rho at every node; 2 rho u_s on the inner domain, direct outside."""
    lay = field.layout
    u = field.values
    out = np.empty_like(u)
    u_s = (u[:, lay.inner_slice] @ lay.inner.D.T) / lay.ds_dl()
    out[:, lay.inner_slice] = 2.0 * lay.physical_rho[None, lay.inner_slice] * u_s
    out[:, lay.outer_slice] = lay.dl_drho() * (u[:, lay.outer_slice] @ lay.outer.D.T)
    return out


def energy(field, nl):
    """Hamiltonian with the |u|^{p+1} convention for fractional powers."""
    grid, lay = field.grid, field.layout
    u = field.values
    ik = grid.derivative_factor()
    u_x = fft_inverse(ik[:, None] * fft_forward(u, axis=0), axis=0)
    u_r = radial_derivative(field)
    p1 = float(nl.p) + 1.0
    density = 0.5 * (u_x**2 + u_r**2) - abs_power(u, p1) / p1
    return float(2.0 * np.pi * grid.spacing * (density @ lay.quad_weights).sum())


def _cheb_coeff_rows(values):
    """Row-wise fast cosine transform of a (rows, N_c+1) sample block."""
    n_c = values.shape[1] - 1
    ext = np.concatenate([values, values[:, -2:0:-1]], axis=1)
    a = np.fft.rfft(ext, axis=1).real / n_c
    a[:, 0] *= 0.5
    a[:, -1] *= 0.5
    return a


def spectral_tails(field, fraction=0.25):
    """Worst-case trailing-coefficient magnitudes (Fourier, Cheb I, Cheb II).

    Fourier tail: max |u_hat| over the top ``fraction`` of |k|. Chebyshev
    tails: coefficients along rho for every x row, reduced by max.
    """
    grid, lay = field.grid, field.layout
    uh = fft_forward(field.values, axis=0)
    absk = np.abs(grid.wavenumbers)
    cutoff = (1.0 - fraction) * absk.max()
    four = float(np.abs(uh[absk >= cutoff]).max())

    tails = []
    for block, kern in ((lay.inner_slice, lay.inner), (lay.outer_slice, lay.outer)):
        n_c = kern.degree
        count = max(1, int(np.ceil(fraction * (n_c + 1))))
        coeffs = _cheb_coeff_rows(field.values[:, block])
        tails.append(float(np.abs(coeffs[:, n_c + 1 - count :]).max()))
    return four, tails[0], tails[1]


def make_record(t, field, nl, newton_iters=0, tail_fraction=0.25):
    four, c1, c2 = spectral_tails(field, tail_fraction)
    return DiagnosticsRecord(
        t=float(t),
        mass=mass(field),
        energy=energy(field, nl),
        linf=linf(field),
        fourier_tail=four,
        cheb_tail_I=c1,
        cheb_tail_II=c2,
        newton_iters=int(newton_iters),
    )


@dataclass(frozen=True)
class DriftReport:
    mass_drift: float
    energy_drift: float
    energy_drift_absolute: bool
    mass_exceeded: bool
    energy_exceeded: bool


def drift_report(records, mass_tol=1e-8, energy_tol=1e-8, energy_floor=1e-8):
    """Max deviation of mass/energy from their t=0 values.

    Mass drift is relative. Energy drift is relative unless |E(0)| is below
    ``energy_floor``, in which case the absolute difference is reported
    (flagged by ``energy_drift_absolute``).
    """
    if len(records) < 2:
        raise ValueError("drift report needs at least two records")
    m0 = records[0].mass
    e0 = records[0].energy
    dm = max(abs(r.mass - m0) for r in records)
    if m0 != 0.0:
        dm /= abs(m0)
    de = max(abs(r.energy - e0) for r in records)
    absolute = abs(e0) < energy_floor
    if not absolute:
        de /= abs(e0)
    return DriftReport(
        mass_drift=dm,
        energy_drift=de,
        energy_drift_absolute=absolute,
        mass_exceeded=dm > mass_tol,
        energy_exceeded=de > energy_tol,
    )


@dataclass(frozen=True)
class ConeReport:
    angle_deg: float = None      # None when no contour exists behind the peak
    slope: float = None
    n_points: int = 0
    peak_x: float = None
    peak_rho: float = None

    @property
    def has_radiation(self):
        return self.angle_deg is not None


def cone_half_angle(field, level):
    """Half-opening angle of the radiation cone behind the main peak.

    Takes the |u| = level contour in the x < x_peak half plane: for every
    x node behind the peak, the outermost radius where |u| crosses the
    level (linear interpolation between neighboring collocation radii).
    A line through the peak is fitted to these envelope points by least
    squares and its arctangent is returned in degrees.
    """
    if level <= 0:
        raise ValueError(f"contour level must be positive, got {level}")
    absu = np.abs(field.values)
    if level >= absu.max():
        raise ValueError(
            f"contour level {level} is not below the field maximum {absu.max()}"
        )
    i_pk, j_pk = np.unravel_index(np.argmax(absu), absu.shape)
    x_pk = field.grid.nodes[i_pk]

    order = np.argsort(field.layout.physical_rho, kind="stable")
    rho_sorted = field.layout.physical_rho[order]

    dists, radii = [], []
    for i in np.nonzero(field.grid.nodes < x_pk)[0]:
        prof = absu[i, order]
        above = np.nonzero(prof >= level)[0]
        if above.size == 0:
            continue
        j = above[-1]
        if j + 1 < prof.size and prof[j + 1] != prof[j]:
            frac = (level - prof[j]) / (prof[j + 1] - prof[j])
            r_star = rho_sorted[j] + frac * (rho_sorted[j + 1] - rho_sorted[j])
        else:
            r_star = rho_sorted[j]
        dists.append(x_pk - field.grid.nodes[i])
        radii.append(r_star)

    if len(dists) < 3:
        return ConeReport(peak_x=float(x_pk), peak_rho=float(field.layout.physical_rho[j_pk]))
    d = np.asarray(dists)
    r = np.asarray(radii)
    slope = float((d @ r) / (d @ d))
    return ConeReport(
        angle_deg=float(np.degrees(np.arctan(slope))),
        slope=slope,
        n_points=len(dists),
        peak_x=float(x_pk),
        peak_rho=float(field.layout.physical_rho[j_pk]),
    )


def write_series(path, records):
    """Comma-separated diagnostic series with a fixed header row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SERIES_COLUMNS)
        for rec in records:
            writer.writerow(
                [repr(getattr(rec, f.name)) for f in dc_fields(DiagnosticsRecord)]
            )


def read_series(path):
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != SERIES_COLUMNS:
            raise ValueError(f"unexpected series header {header}")
        for row in reader:
            records.append(
                DiagnosticsRecord(
                    *[float(v) for v in row[:-1]], newton_iters=int(row[-1])
                )
            )
    return records
