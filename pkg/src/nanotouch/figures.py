"""Figure rendering for the report paths: force curves and oracle scans.

Everything renders headless (Agg) straight to a file, sized for quick
inspection rather than publication.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import EquilibriumSet, ForceCurve

__all__ = ["plot_force_curve", "plot_balance_scan"]

_NM = 1e9
_NN = 1e9


def plot_force_curve(curve: ForceCurve, path) -> None:
    """Two-panel force-approach figure: handle force and tip gap vs handle."""
    fig, (ax_f, ax_g) = plt.subplots(2, 1, sharex=True, figsize=(7.0, 6.0))

    ax_f.plot(curve.approach.handle * _NM, curve.approach.force * _NN,
              color="tab:red", lw=1.2, label="approach")
    ax_f.plot(curve.retract.handle * _NM, curve.retract.force * _NN,
              color="tab:blue", lw=1.2, ls="--", label="retract")
    ax_f.set_ylabel("handle force (nN)")
    ax_f.legend(loc="best", frameon=False)

    ax_g.semilogy(curve.approach.handle * _NM, curve.approach.gap * _NM,
                  color="tab:red", lw=1.2)
    ax_g.semilogy(curve.retract.handle * _NM, curve.retract.gap * _NM,
                  color="tab:blue", lw=1.2, ls="--")
    ax_g.set_ylabel("tip gap (nm)")
    ax_g.set_xlabel("handle position (nm)")

    for ev in curve.events:
        color = "tab:purple" if ev.kind == "snap_in" else "tab:green"
        for ax in (ax_f, ax_g):
            ax.axvline(ev.handle_pos * _NM, color=color, lw=0.8, alpha=0.7)
        ax_g.annotate(ev.kind, (ev.handle_pos * _NM, ev.tip_gap_before * _NM),
                      fontsize=8, color=color)

    ax_f.grid(alpha=0.3)
    ax_g.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_balance_scan(
    gaps: np.ndarray, balance: np.ndarray, equilibria: EquilibriumSet, path
) -> None:
    """Static force-balance residual vs tip gap with classified roots."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(gaps * _NM, balance * _NN, lw=1.0, color="tab:gray")
    ax.axhline(0.0, color="k", lw=0.6)
    for gap, stable in equilibria.equilibria:
        ax.plot(
            gap * _NM,
            0.0,
            "o" if stable else "x",
            color="tab:green" if stable else "tab:red",
            ms=7,
            label="stable" if stable else "unstable",
        )
    handles, labels = ax.get_legend_handles_labels()
    seen: dict[str, object] = {}
    for h, lbl in zip(handles, labels):
        seen.setdefault(lbl, h)
    if seen:
        ax.legend(seen.values(), seen.keys(), frameon=False)
    ax.set_xlabel("tip gap (nm)")
    ax.set_ylabel("spring + surface force balance (nN)")
    ax.set_xscale("log")
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
