"""Command-line front end: ``alphafit encode|decode|verify|probe|conjugacy``.

Exit codes: 0 success, 1 bound violation, 2 parse or domain error,
3 precision exhausted or capacity exceeded.
"""
from __future__ import annotations

import argparse
import contextlib
import dataclasses
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from .apfp import DEFAULT_GUARD, to_binary_string, to_decimal_string
from .codec import DEFAULT_MAX_BITS, LOGISTIC, SCHEMES, Alpha, decode_all, encode, format_alpha, read_alpha
from .errors import CapacityError, DomainError, PrecisionExhaustedError, ShapeError
from .ingest import (
    DEFAULT_RATE,
    Dataset,
    Modality,
    denormalize,
    fold_image,
    load_audio_pcm,
    load_image,
    normalize,
    read_series_csv,
    save_audio_pcm,
    write_pnm,
)
from .verify import conjugacy_report, error_report, format_conjugacy_table, generalization_probe



def _fail(code: int, message: str) -> int:
    print(f"alphafit: error: {message}", file=sys.stderr)
    return code

EXIT_OK, EXIT_BOUND, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3

IMAGE_EXT = {".pgm", ".ppm"}
AUDIO_EXT = {".wav", ".pcm"}


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _image_dims(text: str) -> tuple[int, int, int]:
    try:
        w, h, c = (int(v) for v in text.lower().split("x"))
        Modality.image(w, h, c)
    except (ValueError, ShapeError) as exc:
        raise argparse.ArgumentTypeError(f"expected WxHxC with C in (1, 3), got {text!r}") from exc
    return w, h, c


def atomic_write(path: str | os.PathLike, writer: Callable[[str], None]) -> None:
    """Run ``writer`` on a temp file next to ``path`` and move it into place."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=".tmp-", suffix=target.suffix)
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_text(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return

    def _w(tmp):
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    atomic_write(path, _w)


def _check_output(path: Optional[str]) -> None:
    if path is None:
        return
    parent = Path(path).parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory {str(parent)!r} does not exist")


def load_dataset(
    path: str, image: Optional[tuple] = None, rate: Optional[int] = None, mode: str = "auto"
) -> Dataset:
    """Read ``path`` according to its extension: CSV series, PGM/PPM or WAV/PCM.

    Images and audio are always min-max normalized.  For CSV, ``mode="auto"``
    keeps values that already lie in ``[0, 1]`` as they are (norm ``(0, 1)``)
    and rescales anything else; ``"minmax"`` always rescales and ``"none"``
    never does.
    """
    ext = Path(path).suffix.lower()
    if ext in IMAGE_EXT:
        d = load_image(path)
        if image is not None and str(d.modality) != str(Modality.image(*image)):
            raise ShapeError(f"{path} is {d.modality}, flag says {Modality.image(*image)}")
        return d
    if ext in AUDIO_EXT:
        return load_audio_pcm(path, rate)
    raw = read_series_csv(path)
    modality = None
    if image is not None:
        modality = Modality.image(*image)
        w, h, c = image
        if w * h * c != len(raw):
            raise ShapeError(f"{w}x{h}x{c} image needs {w * h * c} values, {path} has {len(raw)}")
    in_unit = all(0 <= v <= 1 for v in raw)
    if mode == "minmax" or (mode == "auto" and not in_unit):
        return normalize(raw, modality)
    if not in_unit:
        raise DomainError(f"{path}: values outside [0, 1] and --normalize none")
    return Dataset([Fraction(v) for v in raw], Fraction(0), Fraction(1), modality or Modality.series())


def _encode_dataset(d: Dataset, args) -> Alpha:
    alpha = encode(d.samples, args.tau, args.scheme, guard=args.guard, max_bits=args.max_bits)
    meta = {"norm_min": repr(float(d.lo)), "norm_max": repr(float(d.hi)), "modality": str(d.modality)}
    return dataclasses.replace(alpha, meta=meta)


def _dataset_from_meta(alpha: Alpha, image: Optional[tuple], rate: Optional[int]) -> Dataset:
    meta = alpha.meta
    if "norm_min" in meta and "norm_max" in meta:
        lo, hi = Fraction(meta["norm_min"]), Fraction(meta["norm_max"])
    else:
        lo, hi = Fraction(0), Fraction(1)
    modality = Modality.parse(meta["modality"]) if "modality" in meta else Modality.series()
    if image is not None:
        modality = Modality.image(*image)
    if rate is not None:
        modality = Modality.audio(rate)
    return Dataset([], lo, hi, modality)


# -- commands ---------------------------------------------------------------


def cmd_encode(args) -> int:
    _check_output(args.output)
    d = load_dataset(args.input, args.image, args.rate, args.normalize)
    alpha = _encode_dataset(d, args)
    budget = alpha.budget
    lines = [
        f"n={alpha.n}",
        f"tau={alpha.tau}",
        f"p_bin={budget.p_bin}",
        f"p_dec={budget.p_dec}",
    ]
    if alpha.scheme == LOGISTIC:
        lines.append(f"conjugate_bits={to_binary_string(alpha.word)[:32]}")
        lines.append(f"conjugate_decimal={to_decimal_string(alpha.word, 17)}")
        lines.append(f"z0_bits={to_binary_string(alpha.z0)[:32]}")
        lines.append(f"z0_decimal={to_decimal_string(alpha.z0, 17)}")
    else:
        lines.append(f"alpha_bits={to_binary_string(alpha.word)[:32]}")
        lines.append(f"alpha_decimal={to_decimal_string(alpha.word, 17)}")
    text = format_alpha(alpha)
    write_text(args.output, text)
    if args.output is not None:
        print("\n".join(lines))
    return EXIT_OK


def cmd_decode(args) -> int:
    _check_output(args.output)
    alpha = read_alpha(args.input)
    d = _dataset_from_meta(alpha, args.image, args.rate)
    count = args.count or alpha.n
    values = [s.value for s in decode_all(alpha, count)]
    ext = Path(args.output).suffix.lower() if args.output else ".csv"
    if ext in IMAGE_EXT:
        m = d.modality
        if m.kind != "image":
            raise ShapeError("image output needs --image WxHxC or image modality metadata")
        if (ext == ".pgm") != (m.channels == 1):
            raise ShapeError(f"{m.channels}-channel image cannot be written as {ext}")
        px = fold_image(d, m.width, m.height, m.channels, values)
        atomic_write(args.output, lambda tmp: write_pnm(tmp, px))
    elif ext in AUDIO_EXT:
        if d.modality.kind != "audio":
            d = dataclasses.replace(d, modality=Modality.audio(args.rate or DEFAULT_RATE))
        atomic_write(args.output, lambda tmp: save_audio_pcm(tmp, d, values))
    else:
        out = denormalize(d, values)
        write_text(args.output, "".join(f"{v!r}\n" for v in out))
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_output(args.output)
    d = load_dataset(args.input, args.image, args.rate, args.normalize)
    alpha = _encode_dataset(d, args)
    report = error_report(d, alpha)
    write_text(args.output, report.to_csv())
    print(report.summary(), file=sys.stderr if args.output is None else sys.stdout)
    if not report.ok:
        return _fail(EXIT_BOUND, f"bound violated at k={report.worst_k}")
    return EXIT_OK


def cmd_probe(args) -> int:
    _check_output(args.output)
    d = load_dataset(args.input, args.image, args.rate, args.normalize)
    alpha = _encode_dataset(d, args)
    report = generalization_probe(alpha, args.n_extra, d.samples)
    write_text(args.output, report.to_csv())
    lo, hi, mean = report.stats
    out = sys.stderr if args.output is None else sys.stdout
    print(
        f"n_train={report.n_train} n_extra={report.n_extra} "
        f"in_train_max_normalized_error={report.in_train_max_normalized_error:.6f} "
        f"extrapolated min={lo:.6f} max={hi:.6f} mean={mean:.6f}",
        file=out,
    )
    bad = [report.n_train + i for i, v in enumerate(report.extrapolated) if not 0 <= v <= 1]
    if bad:
        return _fail(EXIT_BOUND, f"extrapolation out of range at k={bad[0]}")
    return EXIT_OK


def cmd_conjugacy(args) -> int:
    _check_output(args.output)
    rows = conjugacy_report(args.seeds, args.steps, args.bits, args.rng_seed)
    write_text(args.output, format_conjugacy_table(rows))
    bad = [r for r in rows if not r.ok]
    if bad:
        return _fail(EXIT_BOUND, f"seed {bad[0].seed} exceeds the discrepancy bound")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphafit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def codec_flags(sp):
        sp.add_argument("input")
        sp.add_argument("-o", "--output")
        sp.add_argument("--scheme", choices=SCHEMES, default="dyadic")
        sp.add_argument("--tau", type=_positive, default=8)
        sp.add_argument("--guard", type=_non_negative, default=DEFAULT_GUARD)
        sp.add_argument("--max-bits", type=_positive, default=DEFAULT_MAX_BITS)
        sp.add_argument("--image", type=_image_dims, metavar="WxHxC")
        sp.add_argument("--rate", type=_positive)
        sp.add_argument("--normalize", choices=("auto", "minmax", "none"), default="auto")

    sp = sub.add_parser("encode", help="encode a data file into an alpha file")
    codec_flags(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="decode an alpha file into a data file")
    sp.add_argument("input")
    sp.add_argument("-o", "--output")
    sp.add_argument("--count", type=_positive)
    sp.add_argument("--image", type=_image_dims, metavar="WxHxC")
    sp.add_argument("--rate", type=_positive)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("verify", help="encode, decode and report per-sample errors")
    codec_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("probe", help="decode past the end of the data")
    codec_flags(sp)
    sp.add_argument("--n-extra", type=_non_negative, default=20)
    sp.set_defaults(func=cmd_probe)

    sp = sub.add_parser("conjugacy", help="tabulate doubling/logistic orbit discrepancies")
    sp.add_argument("-o", "--output")
    sp.add_argument("--seeds", type=_positive, default=10)
    sp.add_argument("--steps", type=_non_negative, default=10)
    sp.add_argument("--bits", type=_positive, default=512)
    sp.add_argument("--rng-seed", type=int, default=0)
    sp.set_defaults(func=cmd_conjugacy)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="alphafit: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (PrecisionExhaustedError, CapacityError) as exc:
        extra = f" (max valid k={exc.max_valid})" if getattr(exc, "max_valid", None) is not None else ""
        return _fail(EXIT_PRECISION, f"{exc}{extra}")
    except (ValueError, ArithmeticError, OSError) as exc:
        return _fail(EXIT_INPUT, str(exc))


if __name__ == "__main__":
    sys.exit(main())
