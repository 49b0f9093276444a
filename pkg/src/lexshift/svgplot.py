"""Minimal deterministic SVG line plots for index series and trend fits.

Hand-rolled rather than a plotting library so the node structure is stable:
one circle per data point (class "pt"), one polyline per unbroken run of
consecutive periods (class "data"), an overlaid fitted curve (class
"trend"), and one text node per fitted coefficient (class "coef").
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from .indices import IndexSeries
from .trend import TrendFit

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 36, 44


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def emit_plot(series: IndexSeries, fit: TrendFit | None, path: str | Path) -> None:
    """Write one SVG: data points/polyline, optional fitted trend curve.

    The data polyline breaks wherever a period is absent (year gap larger
    than the series' base step). Axis labels carry the index's declared
    scale; coefficient text nodes carry the fitted terms.
    """
    if not series.points:
        raise ValueError("cannot plot an empty series")
    years = series.years()
    values = series.values()

    x_lo, x_hi = min(years), max(years)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo, y_hi = min(values), max(values)
    if fit is not None:
        fitted = [_predict(fit, y) for y in years]
        y_lo = min(y_lo, min(fitted))
        y_hi = max(y_hi, max(fitted))
    pad = (y_hi - y_lo) * 0.08 or max(abs(y_hi), 1.0) * 0.05
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(year: float) -> float:
        return MARGIN_L + (year - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R)

    def sy(v: float) -> float:
        return HEIGHT - MARGIN_B - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B)

    step = min((b - a for a, b in zip(years, years[1:])), default=1)
    runs: list[list[int]] = [[0]] if years else []
    for i in range(1, len(years)):
        if years[i] - years[i - 1] == step:
            runs[-1].append(i)
        else:
            runs.append([i])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text class="title" x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" '
        f'font-size="14">{escape(series.target)} - {escape(series.index_name)}</text>',
    ]

    ax_y = HEIGHT - MARGIN_B
    parts.append(
        f'<line class="axis" x1="{MARGIN_L}" y1="{ax_y}" x2="{WIDTH - MARGIN_R}" '
        f'y2="{ax_y}" stroke="black"/>'
    )
    parts.append(
        f'<line class="axis" x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" '
        f'y2="{ax_y}" stroke="black"/>'
    )
    for tx in _ticks(x_lo, x_hi):
        parts.append(
            f'<text class="xtick" x="{sx(tx):.1f}" y="{ax_y + 16}" text-anchor="middle" '
            f'font-size="10">{tx:.0f}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        parts.append(
            f'<text class="ytick" x="{MARGIN_L - 6}" y="{sy(ty):.1f}" text-anchor="end" '
            f'font-size="10">{ty:.4g}</text>'
        )
    lo, hi = series.scale
    parts.append(
        f'<text class="ylabel" x="14" y="{HEIGHT / 2:.1f}" font-size="11" '
        f'transform="rotate(-90 14 {HEIGHT / 2:.1f})" text-anchor="middle">'
        f'{escape(series.index_name)} scale [{lo:g}, {hi:g}]</text>'
    )
    parts.append(
        f'<text class="xlabel" x="{(MARGIN_L + WIDTH - MARGIN_R) / 2:.1f}" '
        f'y="{HEIGHT - 10}" text-anchor="middle" font-size="11">year</text>'
    )

    if fit is not None:
        n_curve = 64
        pts = []
        for i in range(n_curve + 1):
            year = x_lo + (x_hi - x_lo) * i / n_curve
            pts.append(f"{sx(year):.2f},{sy(_predict(fit, year)):.2f}")
        parts.append(
            f'<polyline class="trend" fill="none" stroke="#d62728" stroke-width="1.5" '
            f'stroke-dasharray="5,3" points="{" ".join(pts)}"/>'
        )
        for i, term in enumerate(fit.terms):
            coef = fit.coefficients[term]
            parts.append(
                f'<text class="coef" x="{WIDTH - MARGIN_R - 4}" y="{MARGIN_T + 14 * (i + 1)}" '
                f'text-anchor="end" font-size="10">{escape(term)}={coef.b:.6g}</text>'
            )

    for run in runs:
        if len(run) > 1:
            pts = " ".join(f"{sx(years[i]):.2f},{sy(values[i]):.2f}" for i in run)
            parts.append(
                f'<polyline class="data" fill="none" stroke="#1f77b4" '
                f'stroke-width="1.5" points="{pts}"/>'
            )
    for year, value in zip(years, values):
        parts.append(
            f'<circle class="pt" cx="{sx(year):.2f}" cy="{sy(value):.2f}" r="3" '
            f'fill="#1f77b4"/>'
        )

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")


def _predict(fit: TrendFit, year: float) -> float:
    t = year - (fit.center or 0.0)
    value = fit.coefficients["intercept"].b
    if "year" in fit.coefficients:
        value += fit.coefficients["year"].b * t
    if "year2" in fit.coefficients:
        value += fit.coefficients["year2"].b * t * t
    return value
