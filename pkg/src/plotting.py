"""Visualization of bench timings."""
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

MODE_COLORS = {
    "hybrid": "#4472C4",
    "rsa-direct": "#d62728",
    "des-only": "#2ca02c",
}


def create_timing_chart(results: pd.DataFrame, phase: str = "total"):
    """Create a line chart of payload size vs. seconds, one line per mode.

    Args:
        results: DataFrame returned by ``run_bench``
        phase: Which phase to plot (e.g. "total", "crypto")

    Returns:
        matplotlib Figure object
    """
    fig, ax = plt.subplots(figsize=(12, 7))

    data = results[results["phase"] == phase]
    means = data.groupby(["mode", "size_bytes"])["seconds"].mean().reset_index()

    for mode, group in means.groupby("mode"):
        group = group.sort_values("size_bytes")
        ax.plot(
            group["size_bytes"] / 1024,
            group["seconds"],
            marker="o",
            linewidth=2,
            color=MODE_COLORS.get(mode, "gray"),
            label=mode,
        )
        # Label the last point with its time
        last = group.iloc[-1]
        ax.annotate(
            f"{last['seconds']:.3f}s",
            (last["size_bytes"] / 1024, last["seconds"]),
            textcoords="offset points",
            xytext=(6, 0),
            fontsize=11,
        )

    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("Payload size (KiB)", fontsize=14)
    ax.set_ylabel("Seconds", fontsize=14)
    ax.set_title(
        f"Time required to be completed ({phase})",
        fontsize=14,
        fontweight="bold",
        pad=20,
    )
    ax.grid(alpha=0.3, linestyle="--")
    ax.legend(fontsize=12)

    plt.tight_layout()
    return fig


def save_timing_chart(results: pd.DataFrame, path, phase: str = "total") -> None:
    """Write the timing chart to ``path`` and release the figure."""
    fig = create_timing_chart(results, phase=phase)
    try:
        fig.savefig(path)
    finally:
        plt.close(fig)
