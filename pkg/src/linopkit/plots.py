"""Scaling figures rendered next to the benchmark CSV output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_scaling_figure(records, destination):
    """Two-panel log-log figure (wall time, parameter memory) for one
    scenario's records; dense points appear only where the dense leg ran."""
    records = sorted(records, key=lambda r: r.size)
    if not records:
        raise ValueError("nothing to plot")
    sizes = [r.size for r in records]
    fig, (ax_time, ax_mem) = plt.subplots(ncols=2, figsize=(9.0, 3.6))

    ax_time.plot(sizes, [r.structured_min_s for r in records],
                 "o-", label="structured")
    dense_points = [(r.size, r.dense_min_s) for r in records
                    if r.dense_min_s is not None]
    if dense_points:
        ax_time.plot(*zip(*dense_points), "s--", label="dense")
    ax_time.set_xscale("log")
    ax_time.set_yscale("log")
    ax_time.set_xlabel("problem size n")
    ax_time.set_ylabel("min wall time [s]")
    ax_time.set_title("time")
    ax_time.legend()
    ax_time.grid(True, which="both", alpha=0.3)

    ax_mem.plot(sizes, [r.structured_mem_bytes for r in records],
                "o-", label="structured")
    ax_mem.plot(sizes, [r.dense_mem_bytes for r in records],
                "s--", label="dense")
    ax_mem.set_xscale("log")
    ax_mem.set_yscale("log")
    ax_mem.set_xlabel("problem size n")
    ax_mem.set_ylabel("parameter bytes")
    ax_mem.set_title("memory")
    ax_mem.legend()
    ax_mem.grid(True, which="both", alpha=0.3)

    fig.suptitle(records[0].scenario)
    fig.tight_layout()
    fig.savefig(destination, dpi=150)
    plt.close(fig)
