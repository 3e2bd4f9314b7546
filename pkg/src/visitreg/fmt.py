"""Number formatting in the style of classic econometrics printouts."""

import math


def fmt_number(x: float | None) -> str:
    """Seven significant digits; six decimals below one, whole numbers from 1e7 up."""
    if x is None:
        return "NA"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "NA"
    ax = abs(x)
    if ax == 0.0:
        return "0.000000"
    if ax < 1e-4:
        return f"{x:.6e}"
    if ax < 1.0:
        return f"{x:.6f}"
    if ax >= 1e7:
        return f"{x:.0f}"
    decimals = max(7 - (int(math.floor(math.log10(ax))) + 1), 0)
    return f"{x:.{decimals}f}"


def fmt_prob(p: float | None) -> str:
    return "NA" if p is None else f"{p:.4f}"
