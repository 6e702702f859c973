"""Figure rendering for experiment results.

Renders the standard comparison curves (error probability and MSE versus
privacy budget, one line per estimator) to PNG files next to the CSV
output.  Purely cosmetic; the CSV is the canonical record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .estimators import Variant
from .harness import ExperimentResult

__all__ = ["render_figures"]

_STYLE = {
    Variant.DWORK: dict(color="tab:red", marker="o"),
    Variant.OPTBERN: dict(color="tab:blue", marker="s"),
    Variant.PPDS: dict(color="tab:green", marker="^"),
}

_LABEL = {
    Variant.DWORK: "conventional",
    Variant.OPTBERN: "optimal-Bernoulli",
    Variant.PPDS: "distinct-sampling",
}


def render_figures(result: ExperimentResult, csv_path: str | Path) -> list[Path]:
    """One error-probability and one MSE figure per sample size.

    Returns the list of written files, named after the CSV stem.
    """
    csv_path = Path(csv_path)
    stem = csv_path.with_suffix("")
    written: list[Path] = []
    sample_sizes = sorted({r.m for r in result.rows})
    for m in sample_sizes:
        rows_m = [r for r in result.rows if r.m == m]
        variants = sorted({r.variant for r in rows_m}, key=lambda v: v.value)

        for metric, ylabel, suffix in (
            ("err_prob", "empirical error probability", "errprob"),
            ("mse", "empirical MSE", "mse"),
        ):
            fig, ax = plt.subplots(figsize=(6.0, 4.0))
            for variant in variants:
                rows_v = sorted((r for r in rows_m if r.variant == variant), key=lambda r: r.eps)
                xs = [r.eps for r in rows_v]
                ax.plot(xs, [getattr(r, metric) for r in rows_v],
                        label=_LABEL[variant], **_STYLE[variant])
                if metric == "mse":
                    ax.plot(xs, [r.mse_bound for r in rows_v], linestyle="--",
                            color=_STYLE[variant]["color"], alpha=0.5,
                            label=f"{_LABEL[variant]} bound")
            ax.set_xlabel("privacy budget")
            ax.set_ylabel(ylabel)
            if metric == "mse":
                ax.set_yscale("log")
            ax.set_title(f"sample size m = {m}")
            ax.legend(fontsize=8)
            ax.grid(True, alpha=0.3)
            fig.tight_layout()
            out = Path(f"{stem}_{suffix}_m{m}.png")
            fig.savefig(out, dpi=120)
            plt.close(fig)
            written.append(out)
    return written
