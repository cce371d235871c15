"""Tabular experiment records and their CSV/SVG serialization."""

from __future__ import annotations

from dataclasses import dataclass, field


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


@dataclass
class ExperimentReport:
    """One experiment's parameters and measured statistics, CSV-serializable."""

    name: str
    params: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    notes: str = ""

    def add_row(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} != {len(self.columns)} declared columns"
            )
        self.rows.append(tuple(values))

    def to_csv(self, path: str, seed: int = 0, version: str = "0.1.0") -> None:
        emit_csv(self, path, seed=seed, version=version)


def emit_csv(report: ExperimentReport, path: str, seed: int = 0, version: str = "0.1.0") -> None:
    """Write the report with a fixed header; always LF endings, dot decimals."""
    lines = [f"# homodyn v{version} seed={seed}"]
    lines.append(",".join(str(c) for c in report.columns))
    for row in report.rows:
        if len(row) != len(report.columns):
            raise ValueError("report row width does not match declared columns")
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


# Scatter plot of reduced points in the standard fundamental domain.
_SVG_VIEW = (-0.6, 0.8, 0.6, 4.0)  # x_min, y_min, x_max, y_max (math coords)


def emit_svg(xs, ys, path: str, radius: float = 0.006) -> None:
    """Scatter of fundamental-domain points; y > 4 is drawn on the top border.

    The viewBox is fixed to [-0.6, 0.6] x [0.8, 4]; exact duplicate points
    collapse to one marker.
    """
    x0, y0, x1, y1 = _SVG_VIEW
    seen = set()
    marks = []
    for x, y in zip(xs, ys):
        y = min(float(y), y1)
        x = float(x)
        key = (round(x, 9), round(y, 9))
        if key in seen:
            continue
        seen.add(key)
        # SVG y axis points down: plot (x, -y)
        marks.append(f'<circle cx="{x:.6f}" cy="{-y:.6f}" r="{radius}"/>')
    width = x1 - x0
    height = y1 - y0
    body = "\n".join(marks)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{x0} {-y1} {width} {height}">\n'
        f'<rect x="{x0}" y="{-y1}" width="{width}" height="{height}" '
        f'fill="white" stroke="black" stroke-width="0.004"/>\n'
        f'<g fill="black">\n{body}\n</g>\n</svg>\n'
    )
    with open(path, "w", newline="\n", encoding="ascii") as fh:
        fh.write(svg)
