"""Figures for sweep results, written to files (no interactive display)."""

from __future__ import annotations

import os
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
from matplotlib import pyplot as plt  # noqa: E402

from .lab import CheckRecord  # noqa: E402

STATUS_COLORS = {"satisfied": "tab:blue", "equality": "tab:orange", "violated": "tab:red"}


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def plot_sweep(records: Iterable[CheckRecord], out_dir: str, fmt: str = "png") -> list[str]:
    """One scatter per claim: value/bound ratio against n, coloured by status.

    Returns the paths written, sorted by claim id.
    """
    by_claim: dict[str, list[CheckRecord]] = {}
    for rec in records:
        if rec.value is not None and rec.bound:
            by_claim.setdefault(rec.claim_id, []).append(rec)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for claim_id in sorted(by_claim):
        rows = by_claim[claim_id]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for status, color in STATUS_COLORS.items():
            pts = [(r.n, float(r.value / r.bound)) for r in rows if r.status == status]
            if pts:
                xs, ys = zip(*pts)
                ax.scatter(xs, ys, s=14, color=color, label=f"{status} ({len(pts)})", alpha=0.7)
        ax.axhline(1.0, color="grey", lw=0.8, ls="--")
        ax.set_xlabel("n")
        ax.set_ylabel("value / bound")
        ax.set_title(claim_id)
        ax.legend(fontsize="small", frameon=False)
        fig.tight_layout()
        path = os.path.join(out_dir, f"{_safe(claim_id)}.{fmt}")
        # fixed metadata keeps repeated runs byte-identical
        fig.savefig(path, metadata={"Software": None} if fmt == "png" else None)
        plt.close(fig)
        paths.append(path)
    return paths
