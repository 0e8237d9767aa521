"""Plain-text summary tables and JSON export helpers.

Numbers are printed at 4 significant digits; significance stars follow the
usual legend 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1.
"""

from __future__ import annotations

from .inference import ConfidenceBand, EffectsSet
from .iv import IvFit
from .rlasso import RlassoFit, SupScoreResult
from .treatment import TreatmentFit

__all__ = [
    "significance_stars",
    "SIGNIF_LEGEND",
    "format_number",
    "effects_table",
    "band_table",
    "iv_table",
    "treatment_table",
    "rlasso_summary",
]

SIGNIF_LEGEND = "Signif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1"


def significance_stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.1:
        return "."
    return " "


def format_number(x: float) -> str:
    if x != x:  # nan
        return "NA"
    return f"{x:.4g}"


def _table(headers, rows) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    out = ["  ".join(h.rjust(w) for h, w in zip(headers, widths))]
    for r in rows:
        out.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(out)


def effects_table(es: EffectsSet) -> str:
    headers = ["", "Estimate", "Std. Error", "t value", "Pr(>|t|)", ""]
    rows = [
        [
            e.target_name,
            format_number(e.alpha_hat),
            format_number(e.se),
            format_number(e.t_stat),
            format_number(e.p_value),
            significance_stars(e.p_value),
        ]
        for e in es.estimates
    ]
    lines = [_table(headers, rows), "---", SIGNIF_LEGEND]
    for name, message in es.failures:
        lines.append(f"target {name} failed: {message}")
    return "\n".join(lines)


def band_table(es: EffectsSet, band: ConfidenceBand) -> str:
    pct = 100 * (1 - band.level) / 2
    headers = ["", f"{pct:g} %", f"{100 - pct:g} %"]
    rows = [
        [e.target_name, format_number(lo), format_number(hi)]
        for e, lo, hi in zip(es.estimates, band.lower, band.upper)
    ]
    kind = "joint" if band.joint else "pointwise"
    return f"{kind} confidence intervals, level {band.level:g}\n" + _table(headers, rows)


def iv_table(fit: IvFit, name: str = "d") -> str:
    headers = ["", "coeff.", "se.", "t-value", "p-value", ""]
    rows = [
        [
            name,
            format_number(fit.alpha_hat),
            format_number(fit.se),
            format_number(fit.t_stat),
            format_number(fit.p_value),
            significance_stars(fit.p_value),
        ]
    ]
    return "\n".join([_table(headers, rows), "---", SIGNIF_LEGEND])


def treatment_table(fit: TreatmentFit) -> str:
    headers = ["", "coeff.", "se.", "t-value", "p-value", ""]
    rows = [
        [
            "TE",
            format_number(fit.alpha_hat),
            format_number(fit.se),
            format_number(fit.t_stat),
            format_number(fit.p_value),
            significance_stars(fit.p_value),
        ]
    ]
    header = f"Type: {fit.effect}\nBootstrap: {fit.bootstrap}"
    return "\n".join([header, _table(headers, rows), "---", SIGNIF_LEGEND])


def rlasso_summary(fit: RlassoFit, supscore: SupScoreResult | None = None) -> str:
    p = len(fit.coefficients)
    names = fit.column_names or tuple(str(j + 1) for j in range(p))
    lines = [
        f"Post-Lasso Estimation: {fit.post}",
        "",
        f"Total number of variables: {p}",
        f"Number of selected variables: {len(fit.support)}",
        "",
        "Coefficients (nonzero):",
    ]
    rows = []
    if fit.intercept is not None:
        rows.append(["(Intercept)", format_number(fit.intercept)])
    for j in fit.support:
        rows.append([names[j], format_number(fit.coefficients[j])])
    if not rows:
        rows.append(["(none)", ""])
    lines.append(_table(["", "Estimate"], rows))
    lines += [
        "",
        f"Residual standard error: {format_number(fit.sigma_hat)}",
        f"Multiple R-squared: {format_number(fit.r2)}",
        f"Adjusted R-squared: {format_number(fit.adj_r2)}",
    ]
    if supscore is not None:
        lines += [
            "Joint significance test:",
            f" the sup score statistic for joint significance test is "
            f"{format_number(supscore.statistic)} with a p-value of {format_number(supscore.p_value)}",
        ]
    return "\n".join(lines)
