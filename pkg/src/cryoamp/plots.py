"""SVG renderings of sweep and spectrum results (presentation only)."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def dc_sweep_svg(rows, mark: float | None = None) -> str:
    u = np.array([r.u_supply for r in rows])
    fig, ax = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax[0].plot(u, [r.i_d * 1e6 for r in rows], label="I_d, uA")
    ax[0].plot(u, [r.u_ds * 1e3 for r in rows], label="U_ds, mV")
    ax[1].plot(u, [r.p_hemt * 1e6 for r in rows], label="P_HEMT, uW")
    ax[1].plot(u, [r.p_bias * 1e6 for r in rows], label="P_bias, uW")
    ax[1].set_xlabel("U_supply, V")
    for a in ax:
        a.grid(alpha=0.3)
        a.legend()
        if mark is not None:
            a.axvline(mark, color="k", lw=0.8, ls="--")
    return _svg(fig)


def ac_sweep_svg(res) -> str:
    fig, ax = plt.subplots(figsize=(6, 4))
    f = res.frequencies / 1e6
    ax.semilogx(f, res.gv_db, label="G_V")
    ax.semilogx(f, res.gi_db, label="G_I")
    ax.semilogx(f, res.gp_db, label="G_P")
    ax.set_xlabel("f, MHz")
    ax.set_ylabel("gain, dB")
    lo = np.nanmax(res.gp_db) - 80 if np.isfinite(res.gp_db).any() else -80
    ax.set_ylim(bottom=lo)
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    return _svg(fig)


def spectrum_svg(spec, levels: tuple[int, ...] = (6, 7)) -> str:
    """Potential in K with level lines; |psi|^2 of the chosen levels drawn on their energy."""
    fig, ax = plt.subplots(figsize=(6, 4.5))
    phi, u = spec.grid, spec.potential_k
    e = spec.energies_k
    top = e[-1] + 0.5 * (e[-1] - e[0]) if len(e) > 1 else e[0] + 5
    keep = u <= top
    ax.plot(phi[keep], u[keep], "k", lw=1)
    for k, ek in enumerate(e):
        inside = phi[u <= ek]
        ax.hlines(ek, inside.min(), inside.max(), lw=0.6, color="gray")
    scale = 0.8 * (e[1] - e[0]) if len(e) > 1 else 1.0
    for k in levels:
        if k < len(e):
            p = spec.probability(k)
            ax.plot(phi, e[k] + scale * p / p.max(), label=f"|psi_{k}|^2")
    ax.set_xlabel("flux, Phi0")
    ax.set_ylabel("U / k_B, K")
    ax.set_xlim(phi[keep].min(), phi[keep].max())
    ax.legend()
    return _svg(fig)
