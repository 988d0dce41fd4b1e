"""The sin^2 change of variables linking the doubling map and the logistic map.

``phi(a) = sin^2(2 pi a)`` takes a point of the doubling map (measured in
turns) to a point of the logistic map ``z -> 4 z (1 - z)``; ``phi_inv`` goes
back, landing in ``[0, 1/4]``.  Both are evaluated with the integer kernels in
:mod:`alphafit._fixedtrig` at a few guard bits above the requested precision
and then truncated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from . import _fixedtrig as trig
from .apfp import Number, UnitReal, _to_fraction, shift_mod1
from .errors import DomainError, PrecisionExhaustedError

LOGISTIC_R = 4


def _extra_bits(p: int) -> int:
    return 16 + 2 * p.bit_length()


def pi_to_precision(bits: int) -> Fraction:
    """``floor(pi * 2**bits) / 2**bits``, within ``2**-bits`` of pi.

    Results are cached per precision, so lower precisions are exact prefixes
    of higher ones.
    """
    if bits < 8:
        raise DomainError(f"pi needs at least 8 bits, got {bits}")
    return Fraction(trig.pi_floor(bits), 1 << bits)


def _clamp(m: int, p: int) -> UnitReal:
    # sin^2 can reach exactly 1, which [0, 1) cannot hold
    return UnitReal(min(max(m, 0), (1 << p) - 1), p)


def _phi_scaled(m: int, p: int, w: int) -> int:
    """``sin^2(2 pi m / 2**p) * 2**w`` with a few ulps of error."""
    half = 1 << (p - 1) if p else 0
    quarter = 1 << (p - 2) if p >= 2 else 0
    eighth = 1 << (p - 3) if p >= 3 else 0
    if p < 3:
        # lift tiny precisions so the quadrant constants exist
        return _phi_scaled(m << 3, p + 3, w)
    a = m % half
    if a > quarter:
        a = half - a
    use_cos = a > eighth
    if use_cos:
        a = quarter - a
    two_pi = trig.pi_floor(w + 4) << 1  # scale 2**(w+4)
    angle = (a * two_pi) >> (p + 4)
    s = trig.cos_fixed(angle, w) if use_cos else trig.sin_fixed(angle, w)
    return (s * s) >> w


def phi(alpha: UnitReal, bits: Optional[int] = None) -> UnitReal:
    """``sin^2(2 pi alpha)``, truncated to ``bits`` (default: alpha's precision).

    A result of exactly 1 is returned as the all-ones word.
    """
    p = alpha.precision if bits is None else bits
    if p < 1:
        raise DomainError("phi needs at least one output bit")
    if alpha.mantissa == 0:
        return UnitReal.zero(p)
    extra = _extra_bits(p)
    w = p + extra
    z = _phi_scaled(alpha.mantissa, alpha.precision, w)
    return _clamp(z >> extra, p)


def _phi_inv_err(w: int) -> int:
    """Error bound, in ulps at scale ``2**w``, of :func:`_phi_inv_scaled`."""
    return 1 << (trig.asin_reductions(w) + w.bit_length() + 4)


def _phi_inv_scaled(q: Fraction, w: int) -> int:
    """``asin(sqrt(q)) / (2 pi) * 2**w`` for rational ``q`` in ``[0, 1]``."""
    if q == 0:
        return 0
    if q == 1:
        return 1 << (w - 2)
    # complementary branch keeps the asin argument <= 1/sqrt(2)
    upper = q > Fraction(1, 2)
    r = 1 - q if upper else q
    u = math.isqrt((r.numerator << (2 * w)) // r.denominator)
    pi_w = trig.pi_floor(w)
    theta = trig.asin_fixed(u, w)
    if upper:
        theta = (pi_w >> 1) - theta
    return (theta << w) // (2 * pi_w)


def phi_inv(z: Union[UnitReal, Number], bits: Optional[int] = None) -> UnitReal:
    """``asin(sqrt(z)) / (2 pi)`` in turns, truncated to ``bits``.

    ``z`` may be a :class:`UnitReal` or any real number in ``[0, 1]``; for the
    latter ``bits`` is required.
    """
    if isinstance(z, UnitReal):
        q = z.value
        p = z.precision if bits is None else bits
    else:
        if bits is None:
            raise DomainError("bits is required for non-UnitReal input")
        q = _to_fraction(z)
        p = bits
    if q < 0 or q > 1:
        raise DomainError(f"phi_inv argument {z!r} outside [0, 1]")
    if p < 1:
        raise DomainError("phi_inv needs at least one output bit")
    extra = trig.asin_extra_bits(p) + 8
    w = p + extra
    return UnitReal(_phi_inv_scaled(q, w) >> extra, p)


def phi_inv_truncated(x: Number, tau: int) -> UnitReal:
    """Exact ``tau``-bit truncation of ``phi_inv(x)``.

    Working precision grows until the error interval of the approximation
    no longer straddles a multiple of ``2**-tau``.  ``phi_inv`` is a dyadic
    rational only at ``x`` in ``{0, 1/2, 1}``, which are handled exactly.
    """
    q = _to_fraction(x)
    if q < 0 or q > 1:
        raise DomainError(f"sample {x!r} outside [0, 1]")
    exact = {Fraction(0): 0, Fraction(1, 2): Fraction(1, 8), Fraction(1): Fraction(1, 4)}
    if q in exact:
        return UnitReal(math.floor(exact[q] * (1 << tau)), tau)
    extra = 64
    while True:
        w = tau + extra
        approx = _phi_inv_scaled(q, w)
        err = _phi_inv_err(w)
        lo, hi = (approx - err) >> extra, (approx + err) >> extra
        if lo == hi:
            return UnitReal(lo, tau)
        extra *= 2


def logistic_step(z: UnitReal) -> UnitReal:
    """``4 z (1 - z)`` truncated to z's precision (1 comes back as all ones)."""
    p = z.precision
    m = z.mantissa
    return _clamp((LOGISTIC_R * m * ((1 << p) - m)) >> p, p)


@dataclass(frozen=True)
class ConjugatePair:
    """A doubling-map point and its image under ``phi``."""

    alpha: UnitReal
    z: UnitReal
    guard: int = 32

    @classmethod
    def from_alpha(cls, alpha: UnitReal, guard: int = 32) -> ConjugatePair:
        return cls(alpha, phi(alpha), guard)

    @property
    def payload_bits(self) -> int:
        return self.alpha.precision - self.guard


def orbit_discrepancies(alpha: UnitReal, steps: int, extra_bits: Optional[int] = None) -> list[Fraction]:
    """``|L^k(phi(alpha)) - phi(D^k(alpha))|`` for ``k = 0..steps``.

    Both orbits run at ``alpha.precision + extra_bits`` bits; the logistic
    side amplifies truncation error by up to 4x per step, hence the default
    headroom of ``2 * steps + 32`` bits.
    """
    p = alpha.precision
    if steps < 0:
        raise DomainError(f"steps must be >= 0, got {steps}")
    if steps >= p:
        raise PrecisionExhaustedError(
            f"{steps} steps exhaust a {p}-bit seed", max_valid=p - 1
        )
    extra = 2 * steps + 32 if extra_bits is None else extra_bits
    w = p + extra
    wide = alpha.with_precision(w)
    z = phi(wide)
    out = []
    for k in range(steps + 1):
        if k:
            z = logistic_step(z)
        shifted = shift_mod1(wide, k).with_precision(w)
        out.append(abs(z.value - phi(shifted).value))
    return out


def conjugacy_check(alpha: UnitReal, steps: int, extra_bits: Optional[int] = None) -> UnitReal:
    """Largest orbit discrepancy over ``k <= steps``, truncated to alpha's precision."""
    worst = max(orbit_discrepancies(alpha, steps, extra_bits))
    p = alpha.precision
    return UnitReal(math.floor(worst * (1 << p)), p)


def conjugacy_bound(p_bin: int, k: int) -> Fraction:
    """Contractual discrepancy bound ``2**-(p_bin - k - 16)``."""
    return Fraction(1, 1 << max(p_bin - k - 16, 0))


__all__ = [
    "LOGISTIC_R",
    "ConjugatePair",
    "conjugacy_bound",
    "conjugacy_check",
    "logistic_step",
    "orbit_discrepancies",
    "phi",
    "phi_inv",
    "phi_inv_truncated",
    "pi_to_precision",
]
