"""
Static figure of a scale scan: VI(t, t') heat map over the K(t) and VI(t) curves.
"""

from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import seaborn as sns  # noqa: E402

from src.scales.scan import ScaleScan, ScaleSelection  # noqa: E402


def plot_scan(scan_result: ScaleScan, selection: Optional[ScaleSelection] = None):
    """
    Two stacked panels sharing the time axis (log scale).

    Top: VI(t, t') as a heat map with the selected times marked.
    Bottom: number of contexts K(t) (left axis) and ensemble VI(t) (right axis).

    Returns:
        matplotlib Figure
    """
    sns.set_theme(context="paper", style="white")
    times = scan_result.times
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6, 7), sharex=False,
                                      gridspec_kw={"height_ratios": [3, 2]})

    log_t = np.log10(times)
    extent = [log_t[0], log_t[-1], log_t[0], log_t[-1]] if len(times) > 1 else None
    image = top.imshow(scan_result.vi_cross, origin="lower", cmap=sns.color_palette("mako_r", as_cmap=True),
                       vmin=0.0, vmax=1.0, extent=extent, aspect="auto")
    fig.colorbar(image, ax=top, label="VI(t, t')")
    top.set_xlabel("log10 t")
    top.set_ylabel("log10 t'")

    bottom.semilogx(times, scan_result.num_clusters, color="black", drawstyle="steps-mid")
    bottom.set_yscale("log")
    bottom.set_xlabel("t")
    bottom.set_ylabel("number of contexts K(t)")
    right = bottom.twinx()
    right.semilogx(times, scan_result.vi_within, color="tab:red")
    right.set_ylabel("VI(t)", color="tab:red")
    right.set_ylim(0.0, max(0.05, float(np.max(scan_result.vi_within)) * 1.1))

    if selection is not None:
        for t in selection.selected_times:
            top.axvline(np.log10(t), color="white", linestyle="--", linewidth=0.8)
            bottom.axvline(t, color="gray", linestyle="--", linewidth=0.8)

    sns.despine(ax=bottom, right=False)
    fig.tight_layout()
    return fig
