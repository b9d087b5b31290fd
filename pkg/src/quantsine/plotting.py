"""Optional figures rendered next to the CSV (needs the ``plot`` extra: matplotlib)."""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["PLOT_LAYOUT", "plot_result"]

_GOLDEN = (np.sqrt(5) - 1) / 2
_RC = {
    "font.family": "serif",
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.0,
    "lines.markersize": 3,
    "figure.figsize": (3.4, 3.4 * _GOLDEN),
    "figure.dpi": 150,
    "savefig.bbox": "tight",
}

# experiment -> (x column, y columns, group column or None, log y)
PLOT_LAYOUT: dict[str, tuple[str, tuple[str, ...], str | None, bool]] = {
    "fig1": ("theta_over_delta", ("var_quantizer_norm", "var_simple_norm"), None, False),
    "fig2": ("amplitude", ("std_quant_l201_over_a", "std_quant_l200_over_a",
                           "std_simple_l201_over_a", "std_simple_l200_over_a"), None, True),
    "fig3": ("a_over_delta", ("bias_ada_over_delta43",), "bits", False),
    "fig4": ("bits", ("max_abs_bias_fda", "max_abs_bias_mc", "b1_half", "abs_b2_max"), None, True),
    "fig5": ("n", ("bias_ada_over_delta2",), None, False),
    "fig6": ("bits", ("max_var_ada", "max_var_simple_mc", "var_gaussian_reference"), None, True),
    "fig7": ("bits", ("max_mse", "max_bias_sq", "max_var"), None, True),
    "fig8": ("a_over_delta", ("amp_bias_mc_over_delta",), None, False),
    "offset-sweep": ("a_over_delta", ("bias_ada_over_delta43",), "offset_over_delta", False),
    "noise-bias": ("bits", ("max_abs_bias_mc", "b1_half", "abs_b2_max"), "sigma_over_delta", True),
    "noise-var": ("bits", ("max_var_mc", "var_gaussian_reference"), "sigma_over_delta", True),
    "custom-sweep": ("a_over_delta", ("bias_ada", "bias_mc"), None, False),
}


def plot_result(experiment: str, columns, rows, csv_path) -> Path:
    """Write ``<csv stem>.png`` beside the CSV and return its path."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("plotting needs matplotlib: pip install 'artifact[plot]'") from exc

    x_col, y_cols, group, logy = PLOT_LAYOUT[experiment]
    if experiment == "fig2":
        y_cols = tuple(c for c in columns if c.endswith("_over_a"))
    data = np.asarray(rows, dtype=float)
    idx = {c: i for i, c in enumerate(columns)}
    out = Path(csv_path).with_suffix(".png")
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        groups = [None] if group is None else sorted(set(data[:, idx[group]]))
        for gv in groups:
            sel = data if gv is None else data[data[:, idx[group]] == gv]
            for yc in y_cols:
                if yc not in idx:
                    continue
                y = sel[:, idx[yc]]
                if logy:
                    y = np.abs(y)
                label = yc if gv is None else f"{yc} ({group}={gv:g})"
                style = "-" if len(groups) > 1 or sel.shape[0] > 20 else "o-"
                ax.plot(sel[:, idx[x_col]], y, style, label=label)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(x_col)
        ax.grid(True, lw=0.3, alpha=0.5)
        if len(ax.lines) <= 12:
            ax.legend(frameon=False)
        fig.savefig(out)
        plt.close(fig)
    return out
