"""Report rendering: canonical JSON document, delimited tier counts, and
matplotlib figures written alongside."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .quasicone import defect, loads
from .search import SearchReport


def report_json(report: SearchReport) -> str:
    return json.dumps(report.to_doc(), separators=(",", ":"))


def write_report(report: SearchReport, outdir: str | Path) -> list[Path]:
    """Write report.json, tiers.csv and the figures; returns written paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / f"rank{report.rank}.json"
    path.write_text(report_json(report))
    written.append(path)

    tiers_csv = out / f"rank{report.rank}_tiers.csv"
    with tiers_csv.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tier", "unsolved_after"])
        writer.writerow(["seed", report.total_considered])
        for name, unsolved in report.tiers:
            writer.writerow([name, unsolved])
    written.append(tiers_csv)

    fig, ax = plt.subplots(figsize=(6, 4))
    names = ["seed"] + [n for n, _ in report.tiers]
    values = [report.total_considered] + [u for _, u in report.tiers]
    ax.bar(names, values, color="#456990")
    ax.set_ylabel("unsolved quasicones")
    ax.set_title(f"rank {report.rank}, bound {report.bound}")
    for i, v in enumerate(values):
        ax.text(i, v, str(v), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    tiers_png = out / f"rank{report.rank}_tiers.png"
    fig.savefig(tiers_png, dpi=120)
    plt.close(fig)
    written.append(tiers_png)

    fig, ax = plt.subplots(figsize=(6, 4))
    residual_defects = [defect(loads(k)) for k in report.residual]
    if residual_defects:
        lo, hi = min(residual_defects), max(residual_defects)
        bins = [b - 0.5 for b in range(lo, hi + 2)]
        ax.hist(residual_defects, bins=bins, color="#b5443a", rwidth=0.8)
    ax.set_xlabel("defect")
    ax.set_ylabel("residual quasicones")
    ax.set_title(f"rank {report.rank} residual defects")
    fig.tight_layout()
    resid_png = out / f"rank{report.rank}_residual_defects.png"
    fig.savefig(resid_png, dpi=120)
    plt.close(fig)
    written.append(resid_png)

    return written
