"""Encode a normalized dataset into a single real parameter and decode it back.

Two schemes are provided: the bit-shift ``dyadic`` codec and the
differentiable ``logistic`` codec ``f(k) = sin^2(2**(k tau) asin(sqrt(z0)))``.
All arithmetic runs on exact binary fixed point built on Python integers.
"""
from importlib import resources

from .apfp import (
    PrecisionBudget,
    UnitReal,
    add,
    compare,
    div_small,
    dyadic_step,
    from_binary_string,
    from_decimal_fraction,
    from_decimal_string,
    mul,
    mul_small,
    required_precision,
    shift_mod1,
    sub,
    to_binary_string,
    to_decimal_string,
)
from .codec import (
    DYADIC,
    LOGISTIC,
    Alpha,
    DecodedSample,
    alpha_from_parameter,
    decode,
    decode_all,
    decode_dyadic,
    decode_logistic,
    encode,
    encode_dyadic,
    encode_logistic,
    format_alpha,
    parse_alpha,
    read_alpha,
    scheme_bound,
    write_alpha,
)
from .conjugacy import (
    conjugacy_bound,
    conjugacy_check,
    logistic_step,
    orbit_discrepancies,
    phi,
    phi_inv,
    pi_to_precision,
)
from .errors import (
    AlphaFitError,
    CapacityError,
    DomainError,
    ParseError,
    PrecisionExhaustedError,
    ShapeError,
    UnitOverflowError,
)
from .ingest import Dataset, Modality, denormalize, normalize
from .verify import (
    ErrorReport,
    GeneralizationReport,
    conjugacy_report,
    error_report,
    generalization_probe,
)

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled fixture (``reference_samples.csv``, ``sp500_alpha.txt``)."""
    return resources.files(__package__) / "data" / name


__all__ = [name for name in dir() if not name.startswith("_") and name != "resources"]
