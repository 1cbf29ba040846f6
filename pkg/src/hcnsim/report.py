"""Figure rendering for sweep results."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import GAME_SCHEMES, SweepResult  # noqa: E402

_STYLE = {
    "CG": dict(color="tab:red", marker="o"),
    "OS": dict(color="black", marker="s"),
    "FMC": dict(color="tab:blue", marker="^"),
    "RC": dict(color="tab:green", marker="v"),
    "CCG": dict(color="tab:orange", marker="d"),
    "FCC": dict(color="tab:purple", marker="x"),
}


def _x_values(result: SweepResult):
    values = result.spec.values
    if values and isinstance(values[0], tuple):
        # Coupled sweep: plot against the first swept field.
        return [v[0] for v in values]
    return list(values)


def _x_label(result: SweepResult) -> str:
    p = result.spec.swept_parameter
    return p[0] if isinstance(p, tuple) else p


def plot_sweep_rates(result: SweepResult, path) -> None:
    """Mean system sum rate vs the swept parameter, one line per scheme."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    x = _x_values(result)
    for scheme in result.spec.schemes:
        means = result.means(scheme)
        stds = [result.stats[(p, scheme)].std_rate for p in range(len(x))]
        ax.errorbar(x, means, yerr=stds, label=scheme, capsize=2,
                    **_STYLE.get(scheme, {}))
    ax.set_xlabel(_x_label(result))
    ax.set_ylabel("system sum rate (bit/s)")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_sweep_switches(result: SweepResult, path) -> bool:
    """Mean switch count vs the swept parameter for the game schemes.

    Returns False (and writes nothing) when no game scheme was run.
    """
    schemes = [s for s in result.spec.schemes
               if s in GAME_SCHEMES and (0, s) in result.switch_samples]
    if not schemes:
        return False
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    x = _x_values(result)
    for scheme in schemes:
        means = [result.stats[(p, scheme)].mean_switches
                 for p in range(len(x))]
        ax.plot(x, means, label=scheme, **_STYLE.get(scheme, {}))
    ax.set_xlabel(_x_label(result))
    ax.set_ylabel("mean switch operations")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return True
