"""Check-report artifacts: delimited tables plus per-glyph overlay figures."""

from __future__ import annotations

import os

from ..geometry import flatten_contour
from .build import CompatReport, MasterSet


def write_compatibility_tsv(report: CompatReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("glyph\tissue\n")
        for issue in report.issues:
            fh.write(f"{issue.glyph}\t{issue.message}\n")


def write_metrics_tsv(master_set: MasterSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("master\tglyph\tadvance\tcontours\n")
        for master in master_set.masters:
            for name in sorted(master.glyphs):
                glyph = master.glyphs[name]
                fh.write(f"{master.spec.name}\t{name}\t{glyph.advance:g}\t"
                         f"{len(glyph.outlines)}\n")


def write_overlay_figures(master_set: MasterSet, out_dir: str) -> list[str]:
    """One PNG per glyph overlaying every master's outline."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    names = sorted({name for m in master_set.masters for name in m.glyphs})
    for name in names:
        fig, ax = plt.subplots(figsize=(5, 5))
        for master in master_set.masters:
            glyph = master.glyphs.get(name)
            if glyph is None:
                continue
            label_used = False
            for contour in glyph.outlines:
                pts = flatten_contour(contour, 16)
                if contour.closed and pts:
                    pts = pts + [pts[0]]
                ax.plot([p.x for p in pts], [p.y for p in pts], linewidth=1,
                        label=None if label_used else master.spec.name)
                label_used = True
        ax.set_aspect("equal")
        ax.set_title(name)
        ax.legend(fontsize=7, loc="upper right")
        path = os.path.join(out_dir, f"{name}.png")
        fig.savefig(path, dpi=110)
        plt.close(fig)
        written.append(path)
    return written


def write_check_report(report: CompatReport, master_set: MasterSet,
                       out_dir: str) -> dict[str, object]:
    os.makedirs(out_dir, exist_ok=True)
    write_compatibility_tsv(report, os.path.join(out_dir, "compatibility.tsv"))
    write_metrics_tsv(master_set, os.path.join(out_dir, "metrics.tsv"))
    figures = write_overlay_figures(master_set, out_dir)
    return {"tsv": ["compatibility.tsv", "metrics.tsv"], "figures": figures}
