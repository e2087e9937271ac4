"""Figure rendering for traces and scenario runs.

Renders the loop-filter output g(t) — the quantity whose settling versus
sustained beat oscillation distinguishes lock from no-lock — to PNG files
alongside the delimited outputs.  Uses the non-interactive Agg backend so
rendering works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .integrate import Trace


def plot_trace(trace: Trace, path, title: str = "") -> None:
    """Render one run's loop-filter output g(t) to a PNG file."""
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(trace.t * 1e3, trace.g, lw=0.7, color="black")
    ax.set_xlabel("t [ms]")
    ax.set_ylabel("loop filter output g(t)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_scenario(scenario_id: str, traces: dict, expected: dict, path) -> None:
    """Render a scenario's red and black g(t) curves in one figure.

    traces maps side name ("red"/"black") to a Trace; expected maps side
    name to the expected verdict, shown in the legend.
    """
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    for side, color in (("black", "black"), ("red", "red")):
        if side not in traces:
            continue
        tr = traces[side]
        label = f"{side} (expected {expected.get(side, '?')})"
        ax.plot(tr.t * 1e3, tr.g, lw=0.7, color=color, label=label)
    ax.set_xlabel("t [ms]")
    ax.set_ylabel("loop filter output g(t)")
    ax.set_title(scenario_id)
    ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
