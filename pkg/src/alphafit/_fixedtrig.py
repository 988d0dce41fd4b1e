"""Integer kernels for pi, sin, cos and arcsin in binary fixed point.

Every function works on plain integers scaled by ``2**w`` and returns an
approximation together with nothing else; callers add guard bits and carry
the error bookkeeping.  Each kernel's error is a small number of units in the
last place (ulps) of the working scale, documented per function.
"""
from __future__ import annotations

import math
import threading

_pi_lock = threading.Lock()
_pi_cache: dict[int, int] = {}


def _arctan_inv(x: int, w: int) -> tuple[int, int]:
    """``atan(1/x) * 2**w`` and the number of series terms used."""
    one = 1 << w
    x2 = x * x
    power = one // x
    total = power
    k = 1
    sign = -1
    while power:
        power //= x2
        total += sign * (power // (2 * k + 1))
        sign = -sign
        k += 1
    return total, k


def _pi_approx(w: int) -> tuple[int, int]:
    """Machin's formula; returns (approx, error bound in ulps)."""
    a, n1 = _arctan_inv(5, w)
    b, n2 = _arctan_inv(239, w)
    # each series term truncates twice (<= 2 ulps per term)
    return 16 * a - 4 * b, 16 * 2 * (n1 + 1) + 4 * 2 * (n2 + 1)


def pi_floor(bits: int) -> int:
    """``floor(pi * 2**bits)``, exact, cached per precision."""
    with _pi_lock:
        cached = _pi_cache.get(bits)
    if cached is not None:
        return cached
    extra = 16 + bits.bit_length()
    while True:
        w = bits + extra
        approx, err = _pi_approx(w)
        lo, hi = (approx - err) >> extra, (approx + err) >> extra
        if lo == hi:
            break
        extra += 16
    with _pi_lock:
        _pi_cache.setdefault(bits, lo)
    return lo


def sin_fixed(x: int, w: int) -> int:
    """``sin(x / 2**w) * 2**w`` for ``0 <= x/2**w <= 1``; error <= terms + 1 ulps."""
    x2 = (x * x) >> w
    term = x
    total = x
    k = 1
    while term:
        term = (term * x2 >> w) // ((2 * k) * (2 * k + 1))
        total += -term if k % 2 else term
        k += 1
    return total


def cos_fixed(x: int, w: int) -> int:
    """``cos(x / 2**w) * 2**w`` for ``0 <= x/2**w <= 1``; error <= terms + 1 ulps."""
    x2 = (x * x) >> w
    term = 1 << w
    total = term
    k = 1
    while term:
        term = (term * x2 >> w) // ((2 * k - 1) * (2 * k))
        total += -term if k % 2 else term
        k += 1
    return total


def series_terms(w: int) -> int:
    """Upper bound on the number of terms sin/cos/asin take at scale ``w``."""
    return w // 2 + 8


def asin_fixed(u: int, w: int) -> int:
    """``asin(u / 2**w) * 2**w`` for ``0 <= u/2**w <= 1/sqrt(2)``.

    The argument is first reduced with the half-angle identity
    ``sin(t/2) = s / sqrt(2 (1 + cos t))`` ``r`` times, then the Maclaurin
    series runs on the small remainder and the result is scaled by ``2**r``.
    Callers must supply ``asin_extra_bits(w)`` bits of headroom.
    """
    one = 1 << w
    r = asin_reductions(w)
    s = u
    for _ in range(r):
        c = math.isqrt(max(one * one - s * s, 0))
        denom = math.isqrt(2 * (one + c) << w)
        if denom == 0:
            break
        s = (s << w) // denom
    # asin(s) = sum (2k)! / (4^k (k!)^2 (2k+1)) s^(2k+1)
    s2 = (s * s) >> w
    power = s
    total = s
    k = 0
    while power:
        power = (power * s2 >> w) * (2 * k + 1) // (2 * k + 2)
        k += 1
        total += power // (2 * k + 1)
    return total << r


def asin_reductions(w: int) -> int:
    return max(0, min(40, math.isqrt(w) // 2))


def asin_extra_bits(w: int) -> int:
    """Headroom bits that absorb the ``2**r`` amplification of asin_fixed."""
    return asin_reductions(w) + 2 * w.bit_length() + 8
