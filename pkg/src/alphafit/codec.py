"""Encode a list of samples in ``[0, 1]`` into one real number and decode it.

Two schemes share the same layout: each sample contributes ``tau`` bits,
concatenated in order, followed by ``tau`` zero bits and ``guard`` zero bits.

* ``dyadic``: the bits are the truncated samples themselves; sample ``k`` is
  read back by shifting ``k * tau`` bits off the front.
* ``logistic``: the bits are the truncated ``phi_inv`` of each sample and the
  published parameter is ``z0 = phi(alpha0)``; sample ``k`` is
  ``sin^2(2**(k tau) * asin(sqrt(z0)))``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .apfp import (
    DEFAULT_GUARD,
    Number,
    PrecisionBudget,
    UnitReal,
    _to_fraction,
    from_binary_string,
    from_decimal_fraction,
    from_decimal_string,
    parse_decimal_digits,
    required_precision,
    to_decimal_string,
)
from .conjugacy import phi, phi_inv, phi_inv_truncated
from .errors import CapacityError, DomainError, ParseError, PrecisionExhaustedError

DYADIC = "dyadic"
LOGISTIC = "logistic"
SCHEMES = (DYADIC, LOGISTIC)

# configuration limit on the size of a single encoded parameter
DEFAULT_MAX_BITS = 1 << 24


def scheme_bound(scheme: str, tau: int) -> float:
    """Worst-case per-sample decode error: ``2**-tau`` or ``pi * 2**(1-tau)``."""
    if scheme == DYADIC:
        return 2.0**-tau
    if scheme == LOGISTIC:
        return math.pi * 2.0 ** (1 - tau)
    raise DomainError(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class DecodedSample:
    k: int
    value: float
    bound: float
    extrapolated: bool = False


@dataclass(frozen=True)
class Alpha:
    """An encoded dataset.

    ``word`` is the parameter in doubling-map space (payload plus zero
    padding).  For the logistic scheme ``z0`` holds ``phi(word)``.  A logistic
    Alpha built from a bare ``z0`` (see :func:`alpha_from_parameter`) has no
    stored word and decodes through ``phi_inv(z0)`` instead.
    """

    scheme: str
    tau: int
    n: int
    word: Optional[UnitReal]
    z0: Optional[UnitReal] = None
    guard: int = DEFAULT_GUARD
    # free-form metadata carried through the alpha file (norm, modality)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.tau < 1 or self.n < 1:
            raise DomainError(f"need tau >= 1 and n >= 1, got tau={self.tau}, n={self.n}")
        if self.word is None and (self.scheme == DYADIC or self.z0 is None):
            raise DomainError("alpha needs a word, or z0 for the logistic scheme")

    @property
    def budget(self) -> PrecisionBudget:
        return PrecisionBudget(self.n, self.tau, self.guard)

    @property
    def bound(self) -> float:
        return scheme_bound(self.scheme, self.tau)

    @property
    def value(self) -> UnitReal:
        """The published parameter: alpha0 (dyadic) or z0 (logistic)."""
        if self.scheme == LOGISTIC:
            return self.z0
        return self.word

    @property
    def has_word(self) -> bool:
        return self.word is not None

    @cached_property
    def theta(self) -> UnitReal:
        """``phi_inv(z0)`` at full precision; the direct decoding path's seed."""
        if self.z0 is None:
            raise DomainError("theta is only defined for the logistic scheme")
        return phi_inv(self.z0)

    @cached_property
    def _word_bits(self) -> str:
        return self.word.bits

    @cached_property
    def _theta_bits(self) -> str:
        return self.theta.bits

    @property
    def precision(self) -> int:
        return (self.word or self.z0).precision

    @property
    def max_k(self) -> int:
        """Largest decodable index: payload plus ``guard // tau`` extrapolations."""
        by_guard = self.n - 1 + self.guard // self.tau
        by_bits = (self.precision - 1) // self.tau
        return min(by_guard, by_bits)

    def decimal(self, digits: Optional[int] = None) -> str:
        return to_decimal_string(self.value, digits or self.budget.p_dec)


def _check_samples(samples: Sequence[Number]) -> list[Fraction]:
    if len(samples) == 0:
        raise DomainError("cannot encode an empty sample list")
    out = []
    for i, x in enumerate(samples):
        q = _to_fraction(x)
        if q < 0 or q > 1:
            raise DomainError(f"sample {i} = {x!r} outside [0, 1]")
        out.append(q)
    return out


def _budget(n: int, tau: int, guard: int, max_bits: int) -> PrecisionBudget:
    budget = required_precision(n, tau, guard)
    if budget.p_bin > max_bits:
        raise CapacityError(
            f"{n} samples at tau={tau} need {budget.p_bin} bits, limit is {max_bits}"
        )
    return budget


def _pack(groups: Iterable[int], tau: int, budget: PrecisionBudget) -> UnitReal:
    m = 0
    for g in groups:
        m = (m << tau) | g
    pad = budget.p_bin - budget.n * tau
    return UnitReal(m << pad, budget.p_bin)


def encode_dyadic(
    samples: Sequence[Number], tau: int, guard: int = DEFAULT_GUARD, max_bits: int = DEFAULT_MAX_BITS
) -> Alpha:
    qs = _check_samples(samples)
    budget = _budget(len(qs), tau, guard, max_bits)
    word = _pack((from_decimal_fraction(q, tau).mantissa for q in qs), tau, budget)
    return Alpha(DYADIC, tau, len(qs), word, guard=guard)


def encode_logistic(
    samples: Sequence[Number], tau: int, guard: int = DEFAULT_GUARD, max_bits: int = DEFAULT_MAX_BITS
) -> Alpha:
    qs = _check_samples(samples)
    budget = _budget(len(qs), tau, guard, max_bits)
    word = _pack((phi_inv_truncated(q, tau).mantissa for q in qs), tau, budget)
    return Alpha(LOGISTIC, tau, len(qs), word, z0=phi(word), guard=guard)


def encode(samples: Sequence[Number], tau: int, scheme: str = DYADIC, **kwargs) -> Alpha:
    if scheme == DYADIC:
        return encode_dyadic(samples, tau, **kwargs)
    if scheme == LOGISTIC:
        return encode_logistic(samples, tau, **kwargs)
    raise DomainError(f"unknown scheme {scheme!r}")


def _check_k(alpha: Alpha, k: int) -> bool:
    if k < 0:
        raise DomainError(f"sample index must be >= 0, got {k}")
    if k > alpha.max_k:
        raise PrecisionExhaustedError(
            f"index {k} needs {k * alpha.tau} shifted bits; "
            f"{alpha.precision}-bit alpha with guard {alpha.guard} allows k <= {alpha.max_k}",
            max_valid=alpha.max_k,
        )
    return k >= alpha.n


def _window(bits: str, start: int, width: int) -> UnitReal:
    chunk = bits[start : start + width]
    return from_binary_string(chunk.ljust(width, "0"))


def _float_at(bits: str, start: int) -> float:
    """Correctly rounded float of the binary fraction ``0.bits[start:]``."""
    lead = bits.find("1", start)
    if lead < 0:
        return 0.0
    head = bits[lead : lead + 64]
    # a sticky bit standing in for the discarded tail keeps the rounding exact
    if "1" in bits[lead + 64 :]:
        head += "1"
    return float(Fraction(int(head, 2), 1 << (lead - start + len(head))))


def _eval_bits(alpha: Alpha) -> int:
    return alpha.tau + max(alpha.guard, 32)


def decode_dyadic(alpha: Alpha, k: int) -> DecodedSample:
    """Sample ``k``: the value of ``alpha0`` with ``k * tau`` leading bits dropped."""
    if alpha.scheme != DYADIC:
        raise DomainError(f"decode_dyadic on a {alpha.scheme} alpha")
    extrapolated = _check_k(alpha, k)
    return DecodedSample(k, _float_at(alpha._word_bits, k * alpha.tau), alpha.bound, extrapolated)


def decode_logistic(alpha: Alpha, k: int, path: Optional[str] = None) -> DecodedSample:
    """Sample ``k`` of ``sin^2(2**(k tau) asin(sqrt(z0)))``.

    ``path="conjugate"`` shifts the stored doubling-map word and applies
    ``phi``; ``path="direct"`` recovers the angle (in turns) from ``z0`` and
    multiplies by ``2**(k tau)`` as a mod-1 bit shift.  The default uses the
    stored word when there is one.
    """
    if alpha.scheme != LOGISTIC:
        raise DomainError(f"decode_logistic on a {alpha.scheme} alpha")
    if path is None:
        path = "conjugate" if alpha.has_word else "direct"
    extrapolated = _check_k(alpha, k)
    if path == "conjugate":
        if not alpha.has_word:
            raise DomainError("this alpha carries no doubling-map word")
        bits = alpha._word_bits
    elif path == "direct":
        bits = alpha._theta_bits
    else:
        raise ValueError(f"unknown decode path {path!r}")
    width = _eval_bits(alpha)
    seed = _window(bits, k * alpha.tau, width)
    return DecodedSample(k, float(phi(seed)), alpha.bound, extrapolated)


def decode(alpha: Alpha, k: int) -> DecodedSample:
    if alpha.scheme == DYADIC:
        return decode_dyadic(alpha, k)
    return decode_logistic(alpha, k)


def decode_all(alpha: Alpha, count: int) -> list[DecodedSample]:
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return [decode(alpha, k) for k in range(count)]


def alpha_from_parameter(
    decimal: str, scheme: str, tau: int, n: int, guard: int = DEFAULT_GUARD
) -> Alpha:
    """Build an Alpha from a bare published decimal parameter.

    The decimal is read as the truncated expansion of a ``(n + 1) * tau +
    guard`` bit value (rounded up, which inverts :func:`to_decimal_string`
    exactly); past its own information content those bits are whatever the
    decimal happens to contain.  Logistic decoding then goes
    through ``phi_inv`` (lower fidelity than a stored word).
    """
    parse_decimal_digits(decimal)
    budget = required_precision(n, tau, guard)
    if scheme == DYADIC:
        return Alpha(DYADIC, tau, n, from_decimal_string(decimal, budget.p_bin, "ceil"), guard=guard)
    if scheme == LOGISTIC:
        z0 = from_decimal_string(decimal, budget.p_bin, "ceil")
        return Alpha(LOGISTIC, tau, n, None, z0=z0, guard=guard)
    raise DomainError(f"unknown scheme {scheme!r}")


# -- alpha file -------------------------------------------------------------

_OPTIONAL_KEYS = ("guard", "norm_min", "norm_max", "modality")


def format_alpha(alpha: Alpha) -> str:
    lines = [f"scheme={alpha.scheme}", f"tau={alpha.tau}", f"n={alpha.n}"]
    lines.append("alpha_bits=" + (alpha.word.bits if alpha.has_word else ""))
    if alpha.scheme == LOGISTIC:
        lines.append("z0_decimal=" + to_decimal_string(alpha.z0, alpha.budget.p_dec))
    if alpha.guard != DEFAULT_GUARD:
        lines.append(f"guard={alpha.guard}")
    for key in _OPTIONAL_KEYS[1:]:
        if key in alpha.meta:
            lines.append(f"{key}={alpha.meta[key]}")
    return "\n".join(lines) + "\n"


def parse_alpha(text: str) -> Alpha:
    fields: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or key != key.strip() or val != val.strip():
            raise ParseError(f"line {lineno}: expected key=value, got {line!r}")
        if key in fields:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        fields[key] = val
    for key in ("scheme", "tau", "n", "alpha_bits"):
        if key not in fields:
            raise ParseError(f"missing required key {key!r}")
    unknown = set(fields) - {"scheme", "tau", "n", "alpha_bits", "z0_decimal", *_OPTIONAL_KEYS}
    if unknown:
        raise ParseError(f"unknown keys: {sorted(unknown)}")
    try:
        tau, n = int(fields["tau"]), int(fields["n"])
        guard = int(fields.get("guard", DEFAULT_GUARD))
    except ValueError as exc:
        raise ParseError(f"bad integer field: {exc}") from exc
    scheme = fields["scheme"]
    if scheme not in SCHEMES:
        raise ParseError(f"unknown scheme {scheme!r}")
    meta = {k: fields[k] for k in _OPTIONAL_KEYS[1:] if k in fields}
    bits = fields["alpha_bits"]
    if bits:
        word = from_binary_string(bits)
        if word.precision < (n + 1) * tau:
            raise ParseError(
                f"alpha_bits has {word.precision} bits, need at least {(n + 1) * tau}"
            )
        z0 = None
        if scheme == LOGISTIC:
            # z0 is recomputed from the bit-exact word; the decimal is informational
            if "z0_decimal" not in fields:
                raise ParseError("logistic alpha file needs z0_decimal")
            parse_decimal_digits(fields["z0_decimal"])
            z0 = phi(word)
        guard = word.precision - (n + 1) * tau
        return Alpha(scheme, tau, n, word, z0=z0, guard=guard, meta=meta)
    if scheme != LOGISTIC or "z0_decimal" not in fields:
        raise ParseError("empty alpha_bits is only allowed with scheme=logistic and z0_decimal")
    try:
        alpha = alpha_from_parameter(fields["z0_decimal"], LOGISTIC, tau, n, guard)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc
    alpha.meta.update(meta)
    return alpha


def read_alpha(path: str | os.PathLike) -> Alpha:
    with open(path, encoding="ascii") as fh:
        return parse_alpha(fh.read())


def write_alpha(alpha: Alpha, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_alpha(alpha))
