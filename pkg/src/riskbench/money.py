"""Integer-cent currency helpers.

Every monetary quantity inside the library is an integer number of USD
cents. Floats only appear in derived statistics (rates, averages,
multipliers) and are rounded half-to-even exactly once at the edge.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation

__all__ = [
    "parse_usd",
    "format_usd",
    "format_usd_pretty",
    "div_round_half_even",
    "round_cents",
]


def parse_usd(value) -> int:
    """Parse a decimal USD amount ("90000.00", 90000, 90000.5) into cents.

    Rejects amounts with sub-cent precision.
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a USD amount")
    if isinstance(value, int):
        return value * 100
    try:
        d = Decimal(str(value))
    except InvalidOperation as exc:
        raise ValueError(f"not a USD amount: {value!r}") from exc
    cents = d * 100
    if cents != cents.to_integral_value():
        raise ValueError(f"sub-cent precision not representable: {value!r}")
    return int(cents)


def format_usd(cents: int) -> str:
    """Render cents as a plain decimal string: 928000 -> '9280.00'."""
    sign = "-" if cents < 0 else ""
    c = abs(int(cents))
    return f"{sign}{c // 100}.{c % 100:02d}"


def format_usd_pretty(cents: int) -> str:
    """Render cents for humans: 928000 -> '$9,280.00'."""
    sign = "-" if cents < 0 else ""
    c = abs(int(cents))
    return f"{sign}${c // 100:,}.{c % 100:02d}"


def div_round_half_even(numerator: int, denominator: int) -> int:
    """Integer division of non-negative ints, rounding half to even."""
    if numerator < 0 or denominator <= 0:
        raise ValueError("requires numerator >= 0 and denominator > 0")
    q, r = divmod(numerator, denominator)
    twice = 2 * r
    if twice > denominator or (twice == denominator and q % 2 == 1):
        return q + 1
    return q


def round_cents(amount: float) -> int:
    """Round a float cent amount to integer cents, half to even."""
    return int(round(amount))
