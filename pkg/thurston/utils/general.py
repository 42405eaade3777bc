from fractions import Fraction


class ThurstonError(RuntimeError):
    """Base class of the errors raised by the engine."""


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"divisors of non-positive integer {n}")
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"mobius of non-positive integer {n}")
    result = 1
    k = 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    if n > 1:
        result = -result
    return result


def format_fraction(value) -> str:
    """Render an exact rational as "p/q" (or "p" for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_float(value, digits: int = 10) -> str:
    return f"{float(value):.{digits}g}"


def as_integer(value: Fraction, what: str) -> int:
    value = Fraction(value)
    if value.denominator != 1:
        raise ValueError(f"{what} is not an integer: {format_fraction(value)}")
    return value.numerator


__all__ = [
    "ThurstonError",
    "divisors",
    "mobius",
    "format_fraction",
    "format_float",
    "as_integer",
]
