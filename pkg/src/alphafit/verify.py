"""Round-trip error reports, the extrapolation probe and the conjugacy table."""
from __future__ import annotations

import io
import random
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .apfp import UnitReal, decimal_digits_for, from_decimal_fraction
from .codec import LOGISTIC, Alpha, alpha_from_parameter, decode_all
from .conjugacy import conjugacy_bound, conjugacy_check
from .errors import DomainError, ParseError
from .ingest import Dataset

CSV_COLUMNS = ("k", "original", "decoded", "abs_error", "normalized_error", "extrapolated")


@dataclass(frozen=True)
class ErrorReport:
    scheme: str
    tau: int
    n: int
    bound: float
    original: list[float]
    decoded: list[float]
    extrapolated: list[bool] = field(default_factory=list)

    @property
    def abs_errors(self) -> list[float]:
        return [abs(d - o) for d, o in zip(self.decoded, self.original)]

    @property
    def normalized_errors(self) -> list[float]:
        return [e / self.bound for e in self.abs_errors]

    @property
    def max_normalized_error(self) -> float:
        return max(self.normalized_errors, default=0.0)

    @property
    def worst_k(self) -> int:
        errs = self.normalized_errors
        return max(range(len(errs)), key=errs.__getitem__) if errs else -1

    @property
    def ok(self) -> bool:
        # the bound is closed: a sample of exactly 1 followed by zero bits hits it
        return self.max_normalized_error <= 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# scheme={self.scheme}\n# tau={self.tau}\n# n={self.n}\n# bound={self.bound!r}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        flags = self.extrapolated or [False] * len(self.decoded)
        for k, (o, d, f) in enumerate(zip(self.original, self.decoded, flags)):
            e = abs(d - o)
            buf.write(f"{k},{o!r},{d!r},{e!r},{e / self.bound!r},{int(f)}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> ErrorReport:
        meta, rows = _read_report_csv(text)
        try:
            return cls(
                scheme=meta["scheme"],
                tau=int(meta["tau"]),
                n=int(meta["n"]),
                bound=float(meta["bound"]),
                original=[float(r["original"]) for r in rows],
                decoded=[float(r["decoded"]) for r in rows],
                extrapolated=[r["extrapolated"] == "1" for r in rows],
            )
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad error report: {exc}") from exc

    def summary(self) -> str:
        return (
            f"scheme={self.scheme} tau={self.tau} n={self.n} bound={self.bound:.6g} "
            f"max_normalized_error={self.max_normalized_error:.6f} worst_k={self.worst_k} "
            f"{'PASS' if self.ok else 'FAIL'}"
        )


def _read_report_csv(text: str) -> tuple[dict, list[dict]]:
    meta: dict[str, str] = {}
    rows = []
    header = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
            continue
        cells = line.split(",")
        if header is None:
            header = cells
            continue
        if len(cells) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} cells, got {len(cells)}")
        rows.append(dict(zip(header, cells)))
    return meta, rows


def error_report(original: Dataset | Sequence, alpha: Alpha) -> ErrorReport:
    """Decode every sample of ``alpha`` and compare against ``original``."""
    samples = original.samples if isinstance(original, Dataset) else list(original)
    if len(samples) != alpha.n:
        raise DomainError(f"alpha encodes {alpha.n} samples, dataset has {len(samples)}")
    decoded = decode_all(alpha, alpha.n)
    return ErrorReport(
        scheme=alpha.scheme,
        tau=alpha.tau,
        n=alpha.n,
        bound=alpha.bound,
        original=[float(s) for s in samples],
        decoded=[d.value for d in decoded],
        extrapolated=[False] * alpha.n,
    )


@dataclass(frozen=True)
class GeneralizationReport:
    n_train: int
    n_extra: int
    in_train_max_normalized_error: float
    extrapolated: list[float]
    parameter: str = ""

    @property
    def in_range(self) -> bool:
        return all(0.0 <= v <= 1.0 for v in self.extrapolated)

    @property
    def stats(self) -> tuple[float, float, float]:
        if not self.extrapolated:
            return (0.0, 0.0, 0.0)
        xs = self.extrapolated
        return min(xs), max(xs), statistics.fmean(xs)

    def to_csv(self) -> str:
        lo, hi, mean = self.stats
        buf = io.StringIO()
        buf.write(
            f"# n_train={self.n_train}\n# n_extra={self.n_extra}\n"
            f"# in_train_max_normalized_error={self.in_train_max_normalized_error!r}\n"
            f"# extrapolated_min={lo!r}\n# extrapolated_max={hi!r}\n# extrapolated_mean={mean!r}\n"
        )
        if self.parameter:
            buf.write(f"# parameter={self.parameter}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for i, v in enumerate(self.extrapolated):
            buf.write(f"{self.n_train + i},,{v!r},,,1\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> GeneralizationReport:
        meta, rows = _read_report_csv(text)
        try:
            return cls(
                n_train=int(meta["n_train"]),
                n_extra=int(meta["n_extra"]),
                in_train_max_normalized_error=float(meta["in_train_max_normalized_error"]),
                extrapolated=[float(r["decoded"]) for r in rows],
                parameter=meta.get("parameter", ""),
            )
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad generalization report: {exc}") from exc


def _decimal_up(value: Fraction, digits: int) -> str:
    scaled = -((-value.numerator * 10**digits) // value.denominator)
    scaled = min(scaled, 10**digits - 1)
    return "0." + str(scaled).zfill(digits)


def published_parameter(alpha: Alpha) -> str:
    """The shortest decimal parameter that still reproduces the payload bits.

    Rounded up rather than truncated so the trailing zero padding of the
    payload absorbs the rounding residue instead of borrowing from the last
    sample.  Dyadic parameters need ``n * tau`` bits' worth of digits; a
    logistic ``z0`` may need more where ``phi`` is flat, since the angle is
    recovered through ``phi_inv``.
    """
    if not alpha.has_word:
        return alpha.decimal()
    payload = alpha.n * alpha.tau
    target = alpha._word_bits[:payload]
    for digits in range(decimal_digits_for(payload), alpha.budget.p_dec + 1):
        text = _decimal_up(alpha.value.value, digits)
        bare = alpha_from_parameter(text, alpha.scheme, alpha.tau, alpha.n, alpha.guard)
        seed = bare._theta_bits if bare.scheme == LOGISTIC else bare._word_bits
        if seed[:payload] == target:
            return text
    return alpha.decimal()


def generalization_probe(
    alpha: Alpha,
    n_extra: int,
    original: Optional[Sequence] = None,
    parameter: Optional[str] = None,
) -> GeneralizationReport:
    """Keep sampling past the payload of ``alpha``.

    The decoder is driven from the published decimal parameter (``parameter``
    or :func:`published_parameter`), exactly as a reader of the number would
    use it: samples ``k < n`` reproduce the data, samples ``k >= n`` are read
    from digits that carry no information about it.
    """
    if n_extra < 0:
        raise DomainError(f"n_extra must be >= 0, got {n_extra}")
    param = parameter or published_parameter(alpha)
    total = alpha.n + n_extra
    bare = alpha_from_parameter(param, alpha.scheme, alpha.tau, total, alpha.guard)
    decoded = [d.value for d in decode_all(bare, total)]
    in_train = 0.0
    if original is not None:
        if len(original) != alpha.n:
            raise DomainError(f"alpha encodes {alpha.n} samples, original has {len(original)}")
        in_train = max(abs(d - float(o)) for d, o in zip(decoded, original)) / alpha.bound
    return GeneralizationReport(alpha.n, n_extra, in_train, decoded[alpha.n :], param)


@dataclass(frozen=True)
class ConjugacyRow:
    seed: int
    steps: int
    bits: int
    max_discrepancy: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.max_discrepancy < self.bound

    @property
    def log2_discrepancy(self) -> float:
        if self.max_discrepancy == 0:
            return float("-inf")
        d = self.max_discrepancy
        return d.numerator.bit_length() - d.denominator.bit_length()


def conjugacy_report(
    seeds: int, steps: int, bits: int = 512, rng_seed: int = 0, alphas: Optional[Sequence[UnitReal]] = None
) -> list[ConjugacyRow]:
    """Tabulate orbit discrepancies for ``seeds`` random ``bits``-bit points.

    Seed 0 is the zero point and seed 1 the truncation of 1/3; the rest are
    drawn from ``random.Random(rng_seed)``.  Discrepancies are reported at
    the seed's own precision.
    """
    if alphas is None:
        rng = random.Random(rng_seed)
        pool = [UnitReal.zero(bits), from_decimal_fraction(Fraction(1, 3), bits)]
        alphas = pool[:seeds] + [UnitReal(rng.getrandbits(bits), bits) for _ in range(seeds - len(pool[:seeds]))]
    rows = []
    for i, a in enumerate(alphas):
        worst = conjugacy_check(a, steps).value
        rows.append(ConjugacyRow(i, steps, a.precision, worst, conjugacy_bound(a.precision, steps)))
    return rows


def format_conjugacy_table(rows: Sequence[ConjugacyRow]) -> str:
    lines = ["seed,steps,bits,log2_max_discrepancy,log2_bound,ok"]
    for r in rows:
        lb = -(r.bits - r.steps - 16)
        lines.append(f"{r.seed},{r.steps},{r.bits},{r.log2_discrepancy},{lb},{int(r.ok)}")
    return "\n".join(lines) + "\n"


__all__ = [
    "CSV_COLUMNS",
    "ConjugacyRow",
    "ErrorReport",
    "GeneralizationReport",
    "conjugacy_report",
    "error_report",
    "format_conjugacy_table",
    "generalization_probe",
    "published_parameter",
]
