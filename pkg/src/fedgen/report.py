"""Results table plus CSV, JSON and SVG emission.

Emitters are pure functions of the table, so identical tables give
byte-identical output.  Reals in the CSV carry 17 significant digits, enough
to round-trip float64 exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import TooFewRowsError
from .risks import MCEstimate

CSV_HEADER = (
    "R,gen_mean,gen_se,bound_term1,bound_term2,bound_total,bound_se,"
    "emp_risk,pop_risk,proxy_delta,seconds"
)


@dataclass(frozen=True)
class SweepRow:
    """One value of R: measured generalization error, bound parts, risks."""

    R: int
    gen: MCEstimate
    bound_term1: float
    bound_term2: float
    bound_total: MCEstimate
    emp_risk: float
    pop_risk: float
    proxy_delta: float
    seconds: float


@dataclass(frozen=True)
class ResultsTable:
    """Rows in ascending R plus the metadata needed to reproduce them."""

    rows: tuple[SweepRow, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for a, b in zip(self.rows, self.rows[1:]):
            if a.R >= b.R:
                raise TooFewRowsError("rows must be strictly ascending in R")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _row_values(row: SweepRow) -> list[float]:
    return [
        row.gen.mean,
        row.gen.se,
        row.bound_term1,
        row.bound_term2,
        row.bound_total.mean,
        row.bound_total.se,
        row.emp_risk,
        row.pop_risk,
        row.proxy_delta,
        row.seconds,
    ]


def emit_csv(table: ResultsTable) -> str:
    """Fixed-header CSV; one line per R."""
    if not table.rows:
        raise TooFewRowsError("cannot emit an empty table")
    lines = [CSV_HEADER]
    for row in table.rows:
        lines.append(",".join([str(row.R)] + [_fmt(v) for v in _row_values(row)]))
    return "\n".join(lines) + "\n"


def emit_json(table: ResultsTable) -> str:
    """The table plus its full metadata block."""
    if not table.rows:
        raise TooFewRowsError("cannot emit an empty table")
    doc = {
        "meta": table.meta,
        "rows": [
            {
                "R": row.R,
                "gen_mean": row.gen.mean,
                "gen_se": row.gen.se,
                "gen_replicates": row.gen.replicates,
                "bound_term1": row.bound_term1,
                "bound_term2": row.bound_term2,
                "bound_total": row.bound_total.mean,
                "bound_se": row.bound_total.se,
                "bound_replicates": row.bound_total.replicates,
                "emp_risk": row.emp_risk,
                "pop_risk": row.pop_risk,
                "proxy_delta": row.proxy_delta,
                "seconds": row.seconds,
            }
            for row in table.rows
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def results_from_json(text: str) -> ResultsTable:
    """Inverse of emit_json."""
    doc = json.loads(text)
    rows = []
    for r in doc["rows"]:
        rows.append(
            SweepRow(
                R=int(r["R"]),
                gen=MCEstimate(r["gen_mean"], r["gen_se"], int(r["gen_replicates"])),
                bound_term1=r["bound_term1"],
                bound_term2=r["bound_term2"],
                bound_total=MCEstimate(
                    r["bound_total"], r["bound_se"], int(r["bound_replicates"])
                ),
                emp_risk=r["emp_risk"],
                pop_risk=r["pop_risk"],
                proxy_delta=r["proxy_delta"],
                seconds=r["seconds"],
            )
        )
    return ResultsTable(tuple(rows), doc["meta"])


# ---------------------------------------------------------------------------
# SVG

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 20, 36, 48


def _scale(lo: float, hi: float, a: float, b: float):
    span = hi - lo if hi > lo else 1.0

    def f(x: float) -> float:
        return a + (x - lo) / span * (b - a)

    return f


def emit_svg_plot(table: ResultsTable) -> str:
    """Measured error with its SE band and the bound total, against R."""
    if len(table.rows) < 2:
        raise TooFewRowsError("an SVG plot needs at least two rows")
    rs = [row.R for row in table.rows]
    gen = [row.gen.mean for row in table.rows]
    se = [row.gen.se for row in table.rows]
    bound = [row.bound_total.mean for row in table.rows]

    ys = [g - s for g, s in zip(gen, se)] + [g + s for g, s in zip(gen, se)] + bound
    y_lo, y_hi = min(ys), max(ys)
    pad = 0.05 * (y_hi - y_lo if y_hi > y_lo else max(abs(y_hi), 1.0))
    sx = _scale(rs[0], rs[-1], _MARGIN_L, _WIDTH - _MARGIN_R)
    sy = _scale(y_lo - pad, y_hi + pad, _HEIGHT - _MARGIN_B, _MARGIN_T)

    def pts(xs, ys_):
        return " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys_))

    band = pts(rs, [g + s for g, s in zip(gen, se)]) + " " + pts(
        rs[::-1], [g - s for g, s in zip(gen, se)][::-1]
    )

    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
    ]
    for r in rs:
        x = sx(r)
        parts.append(f'<line x1="{x:.2f}" y1="{y0}" x2="{x:.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.2f}" y="{y0 + 20}" font-size="12" text-anchor="middle">{r}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        yv = (y_lo - pad) + frac * ((y_hi + pad) - (y_lo - pad))
        y = sy(yv)
        parts.append(f'<line x1="{x0 - 5}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{x0 - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{yv:.4g}</text>'
        )
    parts += [
        f'<text x="{(x0 + x1) / 2:.0f}" y="{_HEIGHT - 10}" font-size="13" '
        f'text-anchor="middle">communication rounds R</text>',
        f'<text x="14" y="{(y0 + y1) / 2:.0f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) / 2:.0f})">generalization error</text>',
        f'<polygon points="{band}" fill="#4477aa" fill-opacity="0.2" stroke="none"/>',
        f'<polyline points="{pts(rs, gen)}" fill="none" stroke="#4477aa" stroke-width="2"/>',
        f'<polyline points="{pts(rs, bound)}" fill="none" stroke="#cc6677" stroke-width="2"/>',
        f'<rect x="{x0 + 10}" y="{y1 + 6}" width="14" height="3" fill="#4477aa"/>',
        f'<text x="{x0 + 30}" y="{y1 + 11}" font-size="12">measured gen error (± SE)</text>',
        f'<rect x="{x0 + 10}" y="{y1 + 22}" width="14" height="3" fill="#cc6677"/>',
        f'<text x="{x0 + 30}" y="{y1 + 27}" font-size="12">upper bound</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
