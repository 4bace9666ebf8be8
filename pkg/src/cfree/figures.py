"""Residual figures rendered alongside the delimited reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

ERR_FLOOR = 1e-18


def render_residual_figure(path, suite: str, reports) -> None:
    """Scatter of per-check errors on a log scale, with the tolerance lines.

    Saved deterministically (no software metadata) so report directories are
    reproducible byte for byte.
    """
    if not reports:
        return
    idx = np.arange(len(reports))
    errs = np.array([max(min(r.abs_err, r.rel_err), ERR_FLOOR) for r in reports])
    passed = np.array([r.passed for r in reports], dtype=bool)
    tols = sorted({r.tolerance for r in reports})

    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.scatter(idx[passed], errs[passed], s=12, color="#2a6f97", label="pass")
    if (~passed).any():
        ax.scatter(idx[~passed], errs[~passed], s=18, color="#c1121f", marker="x",
                   label="fail")
    for tol in tols:
        ax.axhline(tol, color="#666666", linewidth=0.8, linestyle="--")
    ax.set_yscale("log")
    ax.set_xlabel("check index")
    ax.set_ylabel("min(abs err, rel err)")
    ax.set_title(f"suite: {suite} ({int(passed.sum())}/{len(reports)} pass)")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)
