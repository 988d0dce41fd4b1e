"""Arbitrary-precision fixed-point numbers on the unit interval.

A :class:`UnitReal` is a binary fraction ``0.b1 b2 ... bp`` with an explicit
bit count ``p``.  It is stored as a Python integer mantissa ``m`` so that the
represented value is ``m / 2**p``.  All operations are pure and return new
values; nothing here ever rounds up, every conversion truncates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Union

from .errors import DomainError, ParseError, PrecisionExhaustedError, UnitOverflowError

Number = Union[int, float, Fraction, Decimal, str]

LOG10_2 = math.log10(2)
DEFAULT_GUARD = 32


@dataclass(frozen=True)
class UnitReal:
    """Fixed-point real in ``[0, 1)`` with ``precision`` significant bits."""

    mantissa: int
    precision: int

    def __post_init__(self):
        if self.precision < 0:
            raise DomainError(f"precision must be >= 0, got {self.precision}")
        if not 0 <= self.mantissa < (1 << self.precision):
            raise DomainError(
                f"mantissa {self.mantissa} out of range for {self.precision} bits"
            )

    @classmethod
    def zero(cls, precision: int) -> UnitReal:
        return cls(0, precision)

    @classmethod
    def ones(cls, precision: int) -> UnitReal:
        """Largest representable value, ``1 - 2**-precision``."""
        return cls((1 << precision) - 1, precision)

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.precision)

    @property
    def bits(self) -> str:
        return to_binary_string(self)

    def __float__(self) -> float:
        return float(self.value)

    def __repr__(self) -> str:
        return f"UnitReal({to_decimal_string(self, 20)}..., precision={self.precision})"

    def with_precision(self, bits: int) -> UnitReal:
        """Extend with zero bits or truncate to ``bits`` significant bits."""
        if bits >= self.precision:
            return UnitReal(self.mantissa << (bits - self.precision), bits)
        return UnitReal(self.mantissa >> (self.precision - bits), bits)


@dataclass(frozen=True)
class PrecisionBudget:
    """Bit and digit budget for encoding ``n`` samples at ``tau`` bits each."""

    n: int
    tau: int
    guard: int = DEFAULT_GUARD

    @property
    def payload_bits(self) -> int:
        return (self.n + 1) * self.tau

    @property
    def payload_digits(self) -> int:
        return decimal_digits_for(self.payload_bits)

    @property
    def p_bin(self) -> int:
        return self.payload_bits + self.guard

    @property
    def p_dec(self) -> int:
        return decimal_digits_for(self.p_bin)


def decimal_digits_for(bits: int) -> int:
    """Fractional decimal digits needed to resolve ``2**-bits``.

    Exact integer search: the smallest ``d`` with ``10**d >= 2**bits``.
    """
    if bits <= 0:
        return 0
    d = math.ceil(bits * LOG10_2)
    # float log10 can be off by one for huge inputs
    while 10 ** (d - 1) >= 1 << bits:
        d -= 1
    while 10**d < 1 << bits:
        d += 1
    return d


def required_precision(n: int, tau: int, guard: int = DEFAULT_GUARD) -> PrecisionBudget:
    if n < 1 or tau < 1:
        raise DomainError(f"need n >= 1 and tau >= 1, got n={n}, tau={tau}")
    if guard < 0:
        raise DomainError(f"guard must be >= 0, got {guard}")
    return PrecisionBudget(n, tau, guard)


def _to_fraction(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    try:
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, float) and not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r}")
        return Fraction(x)
    except (ValueError, TypeError, ArithmeticError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot interpret {x!r} as a real number") from exc


def from_decimal_fraction(x: Number, target_bits: int) -> UnitReal:
    """Truncated binary expansion of ``x`` in ``[0, 1]``.

    Bit ``i`` is set iff the running doubled value is ``>= 1/2``, i.e. the
    result is ``floor(x * 2**target_bits)``; no rounding happens.  ``x == 1``
    maps to all ones so the ``2**-target_bits`` error bound still holds.
    """
    if target_bits < 1:
        raise DomainError(f"target_bits must be >= 1, got {target_bits}")
    q = _to_fraction(x)
    if q < 0 or q > 1:
        raise DomainError(f"value {x!r} outside [0, 1]")
    if q == 1:
        return UnitReal.ones(target_bits)
    return UnitReal(math.floor(q * (1 << target_bits)), target_bits)


def from_binary_string(s: str) -> UnitReal:
    if any(c not in "01" for c in s):
        bad = next(i for i, c in enumerate(s) if c not in "01")
        raise ParseError(f"invalid binary digit {s[bad]!r} at offset {bad}")
    return UnitReal(int(s, 2) if s else 0, len(s))


def to_binary_string(x: UnitReal) -> str:
    if x.precision == 0:
        return ""
    return format(x.mantissa, f"0{x.precision}b")


def to_decimal_string(x: UnitReal, digits: int) -> str:
    """``"0."`` followed by exactly ``digits`` truncated decimal digits."""
    if digits < 1:
        raise DomainError(f"digits must be >= 1, got {digits}")
    scaled = (x.mantissa * 10**digits) >> x.precision
    return "0." + str(scaled).zfill(digits)


def parse_decimal_digits(s: str) -> str:
    """Return the fractional digit string of ``"0.ddd"`` or bare ``"ddd"``."""
    text = s.strip()
    if text.startswith("0."):
        text = text[2:]
    elif text.startswith("."):
        text = text[1:]
    if not text or not text.isdigit() or not text.isascii():
        raise ParseError(f"not a decimal fraction: {s!r}")
    return text


def from_decimal_string(s: str, bits: int, rounding: str = "floor") -> UnitReal:
    """Parse a decimal fraction into ``bits`` binary digits.

    Digits past what ``bits`` can resolve are consumed and truncated.  With
    ``rounding="ceil"`` the string is read as the truncated expansion of a
    ``bits``-bit value, which makes this the exact inverse of
    :func:`to_decimal_string` whenever the string has enough digits.
    """
    digits = parse_decimal_digits(s)
    num, den = int(digits), 10 ** len(digits)
    if rounding == "floor":
        m = (num << bits) // den
    elif rounding == "ceil":
        m = -((-num << bits) // den)
    else:
        raise ValueError(f"unknown rounding mode {rounding!r}")
    if m >> bits:
        # only reachable with ceil on a string of all nines
        m = (1 << bits) - 1
    return UnitReal(m, bits)


def shift_mod1(x: UnitReal, m: int) -> UnitReal:
    """``2**m * x mod 1``: drop the leading ``m`` bits."""
    if m < 0:
        raise DomainError(f"shift must be >= 0, got {m}")
    if m == 0:
        return x
    if m >= x.precision:
        raise PrecisionExhaustedError(
            f"shift by {m} bits exhausts a {x.precision}-bit value",
            max_valid=x.precision - 1,
        )
    p = x.precision - m
    return UnitReal(x.mantissa & ((1 << p) - 1), p)


def dyadic_step(x: UnitReal) -> UnitReal:
    """One application of the doubling map."""
    return shift_mod1(x, 1)


def _align(x: UnitReal, y: UnitReal) -> tuple[int, int, int]:
    p = max(x.precision, y.precision)
    return x.mantissa << (p - x.precision), y.mantissa << (p - y.precision), p


def _wrap_or_raise(m: int, p: int, wrap: bool, op: str) -> UnitReal:
    if 0 <= m < (1 << p):
        return UnitReal(m, p)
    if wrap:
        return UnitReal(m & ((1 << p) - 1), p)
    raise UnitOverflowError(f"{op} result leaves [0, 1)")


def add(x: UnitReal, y: UnitReal, wrap: bool = False) -> UnitReal:
    a, b, p = _align(x, y)
    return _wrap_or_raise(a + b, p, wrap, "add")


def sub(x: UnitReal, y: UnitReal, wrap: bool = False) -> UnitReal:
    a, b, p = _align(x, y)
    return _wrap_or_raise(a - b, p, wrap, "sub")


def mul(x: UnitReal, y: UnitReal) -> UnitReal:
    a, b, p = _align(x, y)
    return UnitReal((a * b) >> p, p)


def mul_small(x: UnitReal, k: int, wrap: bool = False) -> UnitReal:
    if k < 0:
        raise DomainError(f"multiplier must be >= 0, got {k}")
    return _wrap_or_raise(x.mantissa * k, x.precision, wrap, "mul_small")


def div_small(x: UnitReal, k: int) -> UnitReal:
    if k < 1:
        raise DomainError(f"divisor must be >= 1, got {k}")
    return UnitReal(x.mantissa // k, x.precision)


def compare(x: UnitReal, y: UnitReal) -> int:
    """-1, 0 or 1 according to the represented values."""
    a, b, _ = _align(x, y)
    return (a > b) - (a < b)
