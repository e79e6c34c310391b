"""Number formatting for machine-readable outputs (6 significant digits)."""


def fmt6(x: float) -> str:
    if x == 0:
        x = 0.0
    return f"{x:.6g}"


def round6(x: float) -> float:
    return float(fmt6(x))
