"""Static figures for the CLI reports (spectrum, merge trajectories, comparisons).

Figures are written with the non-interactive Agg backend; the output format
follows the file extension (SVG for ``.svg``).
"""
from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (math.sqrt(5) - 1.0) / 2.0
fig_width = 3.4
params = {
    "axes.labelsize": 9,
    "font.family": "serif",
    "font.size": 8,
    "mathtext.fontset": "stix",
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "svg.hashsalt": "bec-merge",
    "svg.fonttype": "path",
}


def _save(fig, path):
    # fixed metadata so identical runs give identical files
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)


def plot_spectrum(table, path):
    """One polyline per level: E - E0 against J/U."""
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * golden_mean * 1.3))
        positive = table.ratios > 0
        for level in range(table.levels.shape[1]):
            ax.plot(table.ratios[positive], table.levels[positive, level], color="C0", lw=0.6)
        ax.set_xscale("log")
        ax.set_xlabel(r"$J/U$")
        ax.set_ylabel(r"$(E - E_0)/U$")
        ax.set_title(f"N = {table.n_total}")
        fig.tight_layout()
        _save(fig, path)


def plot_merge(traj, path, title=None):
    """Condensate fraction (top) and mode angles theta, phi (bottom) against U0 t."""
    with plt.rc_context(params):
        fig, (ax_eta, ax_ang) = plt.subplots(2, 1, sharex=True, figsize=(fig_width, 2 * fig_width * golden_mean))
        ax_eta.plot(traj.times, traj.eta, color="k")
        ax_eta.set_ylabel(r"$\eta$")
        ax_eta.set_ylim(0.45, 1.02)
        ax_ang.plot(traj.times, traj.theta, "k-", label=r"$\theta$")
        ax_ang.plot(traj.times, traj.phi, "k--", label=r"$\varphi$")
        ax_ang.axhline(np.pi / 4, color="0.6", lw=0.5)
        ax_ang.set_xlabel(r"$U_0 t$")
        ax_ang.set_ylabel("rad")
        ax_ang.legend(frameon=False)
        if title:
            ax_eta.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def plot_compare(radial, axial, path):
    """U, J and eta for both directions; theta, phi for the axial merge."""
    with plt.rc_context(params):
        fig, axes = plt.subplots(2, 2, figsize=(2 * fig_width, 2 * fig_width * golden_mean))
        (ax_u, ax_j), (ax_eta, ax_ang) = axes
        for traj, style, name in ((radial, "-", "radial"), (axial, "--", "axial")):
            ax_u.plot(traj.times, traj.u, "k" + style, label=name)
            ax_j.plot(traj.times, traj.j, "k" + style, label=name)
            ax_eta.plot(traj.times, traj.eta, "k" + style, label=name)
        ax_ang.plot(axial.times, axial.theta, "k-", label=r"$\theta$")
        ax_ang.plot(axial.times, axial.phi, "k--", label=r"$\varphi$")
        for ax, label in ((ax_u, r"$U/U_0$"), (ax_j, r"$J/U_0$"), (ax_eta, r"$\eta$"), (ax_ang, "rad (axial)")):
            ax.set_xlabel(r"$U_0 t$")
            ax.set_ylabel(label)
            ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_sweep(rows, path):
    """Final condensate fraction against merge time (log axis)."""
    ok = [r for r in rows if r["status"] == "ok"]
    with plt.rc_context(params):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * golden_mean))
        ax.plot([r["t_merge"] for r in ok], [r["eta_final"] for r in ok], "ko-")
        ax.set_xscale("log")
        ax.set_xlabel(r"$U_0 t_m$")
        ax.set_ylabel(r"$\eta$ final")
        fig.tight_layout()
        _save(fig, path)
