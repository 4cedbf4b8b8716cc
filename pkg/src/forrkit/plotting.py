"""Figure output for the strategy-comparison curves."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .protocols import StrategyCurve  # noqa: E402

LABELS = {
    "dj_once": "DJ once",
    "dj_twice": "DJ twice",
    "dj_aa1": "DJ + 1 round AA",
    "a33": r"$\mathcal{A}^{(3,3)}$",
}


def plot_strategy_curves(curves: list[StrategyCurve], path, instance: StrategyCurve | None = None,
                         width: float = 6.0, height: float = 4.0, dpi: int = 150):
    """Write the success-probability-versus-p comparison to ``path``."""
    fig, ax = plt.subplots(figsize=(width, height))
    ps = [c.p for c in curves]
    for key, label in LABELS.items():
        ax.plot(ps, [getattr(c, key) for c in curves], label=label, lw=1.5)
    if instance is not None:
        for key in LABELS:
            ax.plot(instance.p, getattr(instance, key), "k.", ms=6)
        ax.axvline(instance.p, color="0.6", lw=0.8, ls=":")
    ax.axvline(0.75, color="0.8", lw=0.8, ls="--")
    ax.set_xlim(min(ps), max(ps))
    ax.set_ylim(0, 1.02)
    ax.set_xlabel("p (Walsh mass on S)")
    ax.set_ylabel("probability of an outcome from S")
    ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
