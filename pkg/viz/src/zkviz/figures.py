"""The five figure kinds rendered from run-directory data.

Everything is computed from on-disk arrays; no solver physics is
re-evaluated. Rendering is deterministic: fixed style, fixed sizes, no
timestamps, and a pinned PNG metadata block, so identical inputs give
byte-identical images.
"""

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .runformat import SchemaError, read_series, select_snapshot

__all__ = ["PlotSpec", "FIGURE_KINDS", "render"]

FIGURE_KINDS = (
    "surface",
    "interface-closeup",
    "coeff-decay",
    "linf-series",
    "contour-cone",
)

_SAVE_KW = dict(dpi=110, metadata={"Software": "zkviz"})

plt.rcParams.update(
    {
        "figure.figsize": (7.2, 4.8),
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "svg.hashsalt": "zkviz",
    }
)


@dataclass
class PlotSpec:
    run_dir: str
    kind: str
    out: str
    time: float = None     # snapshot selector: nearest time stamp
    index: int = None      # or positional index; default: final state
    level: float = 0.2     # contour magnitude for the cone fit

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}"
            )


def _sorted_rho_view(snap):
    order = np.argsort(snap.rho, kind="stable")
    return snap.rho[order], snap.values[:, order]


def _render_surface(spec):
    snap = select_snapshot(spec.run_dir, spec.time, spec.index)
    rho, vals = _sorted_rho_view(snap)
    x = snap.x_nodes
    stride = max(1, len(x) // 256)
    xs, vs = x[::stride], vals[::stride]
    X, R = np.meshgrid(xs, rho, indexing="ij")
    fig = plt.figure(figsize=(7.2, 5.4))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(
        X, R, vs, cmap="viridis", rstride=1, cstride=2, linewidth=0, antialiased=False
    )
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\rho$")
    ax.set_zlabel("u")
    ax.set_title(f"solution surface at t = {snap.t:g}")
    fig.savefig(spec.out, **_SAVE_KW)
    plt.close(fig)


def _render_interface_closeup(spec):
    snap = select_snapshot(spec.run_dir, spec.time, spec.index)
    i_pk = np.unravel_index(np.argmax(np.abs(snap.values)), snap.values.shape)[0]
    rho0 = snap.rho0
    n_i = snap.n_inner
    rho = snap.rho
    row = snap.values[i_pk]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.6, 4.0))
    for ax, lo, hi, title in (
        (ax1, 0.0, min(2.5 * rho0, rho.max()), "axis region"),
        (ax2, 0.75 * rho0, min(1.25 * rho0, rho.max()), "domain interface"),
    ):
        inner = slice(0, n_i + 1)
        outer = slice(n_i + 1, None)
        ax.plot(rho[inner], row[inner], "o-", ms=3.5, lw=0.8, label="domain I")
        ax.plot(rho[outer], row[outer], "s-", ms=3.0, lw=0.8, label="domain II")
        ax.axvline(rho0, color="k", lw=0.8, ls="--")
        ax.set_xlim(lo, hi)
        sel = (rho >= lo) & (rho <= hi)
        if sel.any():
            lo_y, hi_y = row[sel].min(), row[sel].max()
            pad = 0.1 * max(hi_y - lo_y, 1e-12)
            ax.set_ylim(lo_y - pad, hi_y + pad)
        ax.set_xlabel(r"$\rho$")
        ax.set_title(title)
    ax1.set_ylabel(f"u(x={snap.x_nodes[i_pk]:.3g}, rho)")
    ax1.legend()
    fig.suptitle(f"interface close-up at t = {snap.t:g}")
    fig.tight_layout()
    fig.savefig(spec.out, **_SAVE_KW)
    plt.close(fig)


def _cheb_coeff_rows(values):
    """Chebyshev coefficients of each row sampled at cos(pi n / N_c)."""
    n_c = values.shape[1] - 1
    ext = np.concatenate([values, values[:, -2:0:-1]], axis=1)
    a = np.fft.rfft(ext, axis=1).real / n_c
    a[:, 0] *= 0.5
    a[:, -1] *= 0.5
    return a


def _render_coeff_decay(spec):
    snap = select_snapshot(spec.run_dir, spec.time, spec.index)
    n_i = snap.n_inner
    blocks = (
        ("domain I", snap.values[:, : n_i + 1]),
        ("domain II", snap.values[:, n_i + 1 :]),
    )
    fig, axes = plt.subplots(1, 2, figsize=(8.6, 4.0))
    for ax, (label, block) in zip(axes, blocks):
        mags = np.abs(_cheb_coeff_rows(block)).max(axis=0)
        ax.semilogy(np.arange(mags.size), np.maximum(mags, 1e-18), ".-", lw=0.8, ms=3)
        ax.set_xlabel("n")
        ax.set_ylabel(r"max$_x$ $|a_n|$")
        ax.set_title(label)
    fig.suptitle(f"Chebyshev coefficient decay at t = {snap.t:g}")
    fig.tight_layout()
    fig.savefig(spec.out, **_SAVE_KW)
    plt.close(fig)


def _render_linf_series(spec):
    series = read_series(spec.run_dir)
    t, y = series["t"], series["linf"]
    fig, ax = plt.subplots()
    if y.max() > 50 * max(y.min(), 1e-300):
        ax.semilogy(t, y, lw=1.2)
    else:
        ax.plot(t, y, lw=1.2)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|u\|_\infty$")
    ax.set_title("sup-norm history")
    fig.savefig(spec.out, **_SAVE_KW)
    plt.close(fig)


def _fit_cone(snap, level):
    """Envelope of the |u| = level contour behind the peak and its slope."""
    absu = np.abs(snap.values)
    i_pk = np.unravel_index(np.argmax(absu), absu.shape)[0]
    x_pk = snap.x_nodes[i_pk]
    rho, vals = _sorted_rho_view(snap)
    dists, radii = [], []
    for i in np.nonzero(snap.x_nodes < x_pk)[0]:
        prof = np.abs(vals[i])
        above = np.nonzero(prof >= level)[0]
        if above.size == 0:
            continue
        j = above[-1]
        if j + 1 < prof.size and prof[j + 1] != prof[j]:
            frac = (level - prof[j]) / (prof[j + 1] - prof[j])
            r_star = rho[j] + frac * (rho[j + 1] - rho[j])
        else:
            r_star = rho[j]
        dists.append(x_pk - snap.x_nodes[i])
        radii.append(r_star)
    if len(dists) < 3:
        return x_pk, None
    d = np.asarray(dists)
    r = np.asarray(radii)
    return x_pk, float((d @ r) / (d @ d))


def _render_contour_cone(spec):
    snap = select_snapshot(spec.run_dir, spec.time, spec.index)
    rho, vals = _sorted_rho_view(snap)
    x = snap.x_nodes
    absu = np.abs(vals)
    x_pk, slope = _fit_cone(snap, spec.level)
    fig, ax = plt.subplots(figsize=(7.6, 4.6))
    levels = spec.level * np.array([0.25, 0.5, 1.0, 2.0, 4.0])
    levels = np.unique(levels[levels < absu.max()])
    cs = ax.contour(x, rho, absu.T, levels=levels, linewidths=0.9, cmap="plasma")
    ax.clabel(cs, fontsize=6, fmt="%.2g")
    if slope is not None:
        angle = np.degrees(np.arctan(slope))
        xs = np.linspace(x.min(), x_pk, 50)
        ax.plot(xs, slope * (x_pk - xs), "k--", lw=1.2)
        ax.annotate(
            f"half-angle $\\approx$ {angle:.1f}$^\\circ$",
            xy=(0.03, 0.92),
            xycoords="axes fraction",
        )
    ax.set_xlabel("x")
    ax.set_ylabel(r"$\rho$")
    ax.set_ylim(0, rho.max())
    ax.set_title(f"radiation contours (|u| = {spec.level:g} cone fit) at t = {snap.t:g}")
    fig.savefig(spec.out, **_SAVE_KW)
    plt.close(fig)


_RENDERERS = {
    "surface": _render_surface,
    "interface-closeup": _render_interface_closeup,
    "coeff-decay": _render_coeff_decay,
    "linf-series": _render_linf_series,
    "contour-cone": _render_contour_cone,
}


def render(spec):
    """Render one figure; returns the output path."""
    _RENDERERS[spec.kind](spec)
    return spec.out
