"""Figure rendering for simulation reports.

Uses the non-interactive backend so the report path works headless; each
figure is two stacked panels, the oscillator responses above the damping
trace.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulate import Trajectory

# Fixed hash salt plus stripped date metadata keep the SVG output
# byte-reproducible across runs.
matplotlib.rcParams["svg.hashsalt"] = "dlscontrol"


def render_run_figure(traj: Trajectory, path: str | Path,
                      title: str | None = None) -> Path:
    """Render one run to an SVG file and return its path."""
    path = Path(path)
    fig, (ax_resp, ax_ctrl) = plt.subplots(
        2, 1, figsize=(8.0, 6.0), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]})
    ax_resp.plot(traj.t, traj.x1, lw=0.7, label="$x_1$")
    ax_resp.plot(traj.t, traj.x2, lw=0.7, label="$x_2$")
    ax_resp.set_ylabel("displacement")
    ax_resp.legend(loc="upper right")
    if title:
        ax_resp.set_title(title)
    ax_ctrl.plot(traj.t, traj.u, lw=0.9, color="tab:green")
    ax_ctrl.set_ylabel("damping $u$")
    ax_ctrl.set_xlabel("time")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
