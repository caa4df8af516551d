"""CSV and standalone SVG artifacts: accuracy scatter plots and critical-difference diagrams.

SVG is written by hand so the output is byte-stable across platforms and
needs no plotting stack. Coordinates are printed with two decimals.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from xml.sax.saxutils import escape

from elastika.exceptions import StorageError
from elastika.stats import PairedAccuracies, RankTable, signed_rank_test, win_tie_loss

__all__ = ["scatter_svg", "cd_svg", "emit_scatter", "emit_cd"]

_HEADER = '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'


def _svg_open(width, height) -> str:
    return (
        _HEADER
        + f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">\n'
        + f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>\n'
    )


def _f(x: float) -> str:
    return f"{x:.2f}"


def scatter_svg(pairs: PairedAccuracies, labels=("A", "B")) -> str:
    """Accuracy of A (x) against B (y), with the diagonal and the win/tie/loss counts."""
    margin, side = 60, 300
    size = 2 * margin + side

    def px(a):
        return margin + a * side

    def py(b):
        return margin + (1.0 - b) * side

    la, lb = (escape(str(x)) for x in labels)
    wins, ties, losses = win_tie_loss(pairs)
    p = signed_rank_test(pairs.differences).p_value
    out = [_svg_open(size, size + 40)]
    out.append(f'<rect x="{margin}" y="{margin}" width="{side}" height="{side}" fill="none" stroke="black"/>\n')
    out.append(f'<line class="diagonal" x1="{_f(px(0))}" y1="{_f(py(0))}" x2="{_f(px(1))}" y2="{_f(py(1))}" '
               'stroke="grey" stroke-dasharray="4 3"/>\n')
    for k in range(6):
        t = k / 5
        out.append(f'<text x="{_f(px(t))}" y="{margin + side + 16}" text-anchor="middle">{t:.1f}</text>\n')
        out.append(f'<text x="{margin - 6}" y="{_f(py(t) + 4)}" text-anchor="end">{t:.1f}</text>\n')
    out.append(f'<text x="{margin + side / 2}" y="{margin + side + 36}" text-anchor="middle">{la}</text>\n')
    out.append(f'<text x="{margin - 40}" y="{margin + side / 2}" text-anchor="middle" '
               f'transform="rotate(-90 {margin - 40} {margin + side / 2})">{lb}</text>\n')
    for name, a, b in zip(pairs.names, pairs.acc_a, pairs.acc_b):
        out.append(f'<circle class="point" cx="{_f(px(a))}" cy="{_f(py(b))}" r="3" fill="steelblue">'
                   f'<title>{escape(name)}</title></circle>\n')
    out.append(f'<text class="wtl" x="{margin}" y="{margin - 28}">{la} wins {wins} / ties {ties} / '
               f'{lb} wins {losses}</text>\n')
    out.append(f'<text class="pvalue" x="{margin}" y="{margin - 12}">Wilcoxon p = {p:.4g}</text>\n')
    out.append("</svg>\n")
    return "".join(out)


def cd_svg(table: RankTable, groups=()) -> str:
    """Mean ranks on an axis, best on the left, with a bar under each clique of two or more."""
    k = len(table.classifiers)
    width, left, right, axis_y = 640, 140, 500, 50
    ordered = table.ordered()
    bars = [g for g in groups if len(g) >= 2]

    def rx(r):
        return left + (r - 1) * (right - left) / max(k - 1, 1)

    out = []
    bar_top = axis_y + 18
    label_top = bar_top + 10 * len(bars) + 20
    height = label_top + 20 * ((k + 1) // 2) + 20
    out.append(_svg_open(width, height))
    out.append(f'<line x1="{_f(rx(1))}" y1="{axis_y}" x2="{_f(rx(k))}" y2="{axis_y}" stroke="black"/>\n')
    for r in range(1, k + 1):
        out.append(f'<line x1="{_f(rx(r))}" y1="{axis_y - 5}" x2="{_f(rx(r))}" y2="{axis_y}" stroke="black"/>\n')
        out.append(f'<text x="{_f(rx(r))}" y="{axis_y - 10}" text-anchor="middle">{r}</text>\n')
    mean_of = dict(ordered)
    for i, group in enumerate(bars):
        lo = min(mean_of[c] for c in group)
        hi = max(mean_of[c] for c in group)
        y = bar_top + 10 * i
        out.append(f'<line class="clique" x1="{_f(rx(lo) - 4)}" y1="{y}" x2="{_f(rx(hi) + 4)}" y2="{y}" '
                   'stroke="black" stroke-width="4"/>\n')
    half = (k + 1) // 2
    for pos, (name, mean) in enumerate(ordered):
        x = rx(mean)
        if pos < half:
            y = label_top + 20 * pos
            end, anchor, tx = left - 10, "end", left - 14
        else:
            y = label_top + 20 * (k - 1 - pos)
            end, anchor, tx = right + 10, "start", right + 14
        out.append(f'<polyline class="rank" points="{_f(x)},{axis_y} {_f(x)},{y} {end},{y}" '
                   'fill="none" stroke="black"/>\n')
        out.append(f'<text x="{tx}" y="{y + 4}" text-anchor="{anchor}">{escape(name)} ({mean:.2f})</text>\n')
    out.append("</svg>\n")
    return "".join(out)


def _paths(out_path) -> tuple[Path, Path]:
    p = Path(out_path)
    stem = p.with_suffix("") if p.suffix in (".svg", ".csv") else p
    return stem.with_name(stem.name + ".csv"), stem.with_name(stem.name + ".svg")


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_scatter(pairs: PairedAccuracies, labels, out_path) -> tuple[Path, Path]:
    """Write ``<out>.csv`` (``dataset,acc_a,acc_b``) and ``<out>.svg``."""
    csv_path, svg_path = _paths(out_path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "acc_a", "acc_b"])
    for name, a, b in zip(pairs.names, pairs.acc_a, pairs.acc_b):
        w.writerow([name, repr(float(a)), repr(float(b))])
    _write(csv_path, buf.getvalue())
    _write(svg_path, scatter_svg(pairs, labels))
    return csv_path, svg_path


def emit_cd(table: RankTable, groups, out_path) -> tuple[Path, Path]:
    """Write ``<out>.csv`` (``classifier,mean_rank``) and ``<out>.svg``."""
    csv_path, svg_path = _paths(out_path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["classifier", "mean_rank"])
    for name, mean in table.ordered():
        w.writerow([name, repr(mean)])
    _write(csv_path, buf.getvalue())
    _write(svg_path, cd_svg(table, groups))
    return csv_path, svg_path
