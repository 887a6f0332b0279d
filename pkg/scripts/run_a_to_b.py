#!/usr/bin/env python3
"""Run the bundled point-A-to-point-B scenario and summarize the run.

Writes telemetry.csv / transitions.ndjson / summary.json under runs/a_to_b and,
when matplotlib is importable, a joint-trajectory figure with command markers.
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from exoplan.cli import bundled_data
from exoplan.engine import load_scenario, run_scenario


def main() -> int:
    out = Path("runs/a_to_b")
    scenario = load_scenario(bundled_data("a_to_b.scn"))
    code, summary = run_scenario(scenario, out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np
    except ImportError:
        print("matplotlib not available; skipping the figure")
        return code

    rows = (out / "telemetry.csv").read_text().splitlines()
    header = rows[0].split(",")
    data = np.array([[float(c) if i not in (1, 2) else np.nan for i, c in enumerate(r.split(","))]
                     for r in rows[1:]])
    t = data[:, 0]
    fig, axes = plt.subplots(3, 1, figsize=(10, 8), sharex=True)
    for ax, joint in zip(axes, ("hip", "knee", "ankle")):
        des = data[:, header.index(f"left_{joint}_des")]
        act = data[:, header.index(f"left_{joint}_act")]
        ax.plot(t, des, label="desired", lw=0.8)
        ax.plot(t, act, label="actual", lw=0.8, alpha=0.8)
        ax.set_ylabel(f"left {joint} [deg]")
        ax.legend(loc="upper right")
    for mark in scenario.schedule:
        for ax in axes:
            ax.axvline(mark[0], color="k", ls=":", lw=0.6)
    axes[-1].set_xlabel("time [s]")
    fig.tight_layout()
    fig.savefig(out / "trajectories.png", dpi=130)
    print(f"figure saved to {out / 'trajectories.png'}")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
