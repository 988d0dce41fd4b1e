"""Turn raw data into normalized sample lists and back.

Samples are kept as exact fractions so that ``denormalize(normalize(raw))``
returns the raw floats bit for bit.  Images are flattened row-major with the
channel axis last; audio is 16-bit signed mono PCM.
"""
from __future__ import annotations

import math
import os
import wave
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, ParseError, ShapeError

DEFAULT_RATE = 11025


@dataclass(frozen=True)
class Modality:
    kind: str = "series"
    width: int = 0
    height: int = 0
    channels: int = 0
    rate: int = 0

    @classmethod
    def series(cls) -> Modality:
        return cls("series")

    @classmethod
    def scatter(cls) -> Modality:
        return cls("scatter")

    @classmethod
    def image(cls, width: int, height: int, channels: int) -> Modality:
        if width < 1 or height < 1 or channels not in (1, 3):
            raise ShapeError(f"bad image shape {width}x{height}x{channels}")
        return cls("image", width, height, channels)

    @classmethod
    def audio(cls, rate: int = DEFAULT_RATE) -> Modality:
        if rate < 1:
            raise DomainError(f"sample rate must be positive, got {rate}")
        return cls("audio", rate=rate)

    def __str__(self) -> str:
        if self.kind == "image":
            return f"image:{self.width}x{self.height}x{self.channels}"
        if self.kind == "audio":
            return f"audio:{self.rate}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> Modality:
        kind, _, arg = text.partition(":")
        try:
            if kind == "image":
                w, h, c = (int(v) for v in arg.split("x"))
                return cls.image(w, h, c)
            if kind == "audio":
                return cls.audio(int(arg) if arg else DEFAULT_RATE)
        except ValueError as exc:
            raise ParseError(f"bad modality {text!r}") from exc
        if kind in ("series", "scatter") and not arg:
            return cls(kind)
        raise ParseError(f"bad modality {text!r}")


@dataclass(frozen=True)
class Dataset:
    samples: list
    lo: Fraction
    hi: Fraction
    modality: Modality = field(default_factory=Modality.series)

    @property
    def constant(self) -> bool:
        return self.lo == self.hi

    @property
    def norm(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)

    def __len__(self) -> int:
        return len(self.samples)

    def floats(self) -> list[float]:
        return [float(s) for s in self.samples]


def _exact(x) -> Fraction:
    if isinstance(x, float) and not math.isfinite(x):
        raise DomainError(f"non-finite value {x!r}")
    try:
        return Fraction(x)
    except (ValueError, TypeError, OverflowError) as exc:
        raise DomainError(f"not a finite number: {x!r}") from exc


def normalize(raw: Sequence, modality: Optional[Modality] = None) -> Dataset:
    """Min-max scale to ``[0, 1]``; a constant input becomes all ``1/2``."""
    if len(raw) == 0:
        raise DomainError("cannot normalize an empty list")
    values = [_exact(x) for x in raw]
    lo, hi = min(values), max(values)
    if lo == hi:
        samples = [Fraction(1, 2)] * len(values)
    else:
        span = hi - lo
        samples = [(v - lo) / span for v in values]
    return Dataset(samples, lo, hi, modality or Modality.series())


def _denormalize_exact(d: Dataset, values: Sequence) -> list[Fraction]:
    if d.constant:
        return [d.lo] * len(values)
    span = d.hi - d.lo
    out = []
    for v in values:
        q = _exact(v)
        if q < 0 or q > 1:
            raise DomainError(f"value {v!r} outside [0, 1]")
        out.append(d.lo + q * span)
    return out


def denormalize(d: Dataset, values: Sequence) -> list[float]:
    """``min + v * (max - min)`` for each value; a constant dataset returns the constant."""
    return [float(r) for r in _denormalize_exact(d, values)]


# -- images -----------------------------------------------------------------


def flatten_image(pixels) -> Dataset:
    """Flatten an ``(height, width[, channels])`` uint8 array row-major, channel last."""
    arr = np.asarray(pixels)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ShapeError(f"expected (h, w), (h, w, 1) or (h, w, 3), got {arr.shape}")
    if arr.size == 0:
        raise ShapeError("empty image")
    if arr.min() < 0 or arr.max() > 255:
        raise DomainError("pixel values must lie in 0..255")
    h, w, c = arr.shape
    scaled = [Fraction(int(p), 255) for p in arr.reshape(-1)]
    return normalize(scaled, Modality.image(w, h, c))


def fold_image(d: Dataset, width: int, height: int, channels: int, values=None) -> np.ndarray:
    """Inverse of :func:`flatten_image`; ``values`` defaults to the dataset's samples."""
    vals = d.samples if values is None else values
    if width * height * channels != len(vals):
        raise ShapeError(
            f"{width}x{height}x{channels} image needs {width * height * channels} "
            f"samples, got {len(vals)}"
        )
    raw = _denormalize_exact(d, vals)
    px = np.array([min(255, max(0, round(r * 255))) for r in raw], dtype=np.uint8)
    return px.reshape(height, width, channels)


def read_pnm(path: str | os.PathLike) -> np.ndarray:
    """Read a binary PGM (P5) or PPM (P6) with maxval <= 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ParseError(f"{path}: truncated header at byte {pos}")
        tokens.append(data[start:pos])
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise ParseError(f"{path}: unsupported magic {magic!r} (need P5 or P6)")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise ParseError(f"{path}: bad header field {exc}") from exc
    if not 0 < maxval <= 255:
        raise ParseError(f"{path}: maxval {maxval} unsupported (need 1..255)")
    pos += 1  # single whitespace byte after maxval
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    body = data[pos : pos + need]
    if len(body) != need:
        raise ParseError(f"{path}: expected {need} pixel bytes at offset {pos}, found {len(body)}")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, channels)


def write_pnm(path: str | os.PathLike, pixels: np.ndarray) -> None:
    arr = np.asarray(pixels, dtype=np.uint8)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    h, w, c = arr.shape
    magic = {1: b"P5", 3: b"P6"}.get(c)
    if magic is None:
        raise ShapeError(f"cannot write {c}-channel image as PGM/PPM")
    with open(path, "wb") as fh:
        fh.write(magic + f"\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


def load_image(path: str | os.PathLike) -> Dataset:
    return flatten_image(read_pnm(path))


def save_image(path: str | os.PathLike, d: Dataset, values=None) -> None:
    m = d.modality
    if m.kind != "image":
        raise ShapeError(f"dataset modality is {m}, not an image")
    write_pnm(path, fold_image(d, m.width, m.height, m.channels, values))


# -- series CSV -------------------------------------------------------------


def read_series_csv(path: str | os.PathLike) -> list[float]:
    """One number per line; a non-numeric first line is taken as a header."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text:
                continue
            field0 = text.split(",")[0].strip()
            try:
                v = float(field0)
            except ValueError:
                if lineno == 1 and not values:
                    continue
                raise ParseError(f"{path}:{lineno}: not a number: {field0!r}") from None
            if not math.isfinite(v):
                raise ParseError(f"{path}:{lineno}: non-finite value {field0!r}")
            values.append(v)
    if not values:
        raise ParseError(f"{path}: no numeric rows")
    return values


def load_series_csv(path: str | os.PathLike) -> Dataset:
    return normalize(read_series_csv(path))


def save_series_csv(path: str | os.PathLike, values: Sequence[float], header: Optional[str] = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(header + "\n")
        for v in values:
            fh.write(f"{float(v)!r}\n")


# -- audio ------------------------------------------------------------------


def pcm_to_unit(s: int) -> Fraction:
    """Map a signed 16-bit sample to ``[0, 1]``: ``(s + 32768) / 65535``."""
    return Fraction(int(s) + 32768, 65535)


def unit_to_pcm(u) -> int:
    return min(32767, max(-32768, round(Fraction(u) * 65535) - 32768))


def read_pcm16(path: str | os.PathLike) -> tuple[np.ndarray, Optional[int]]:
    """Samples and rate (``None`` for headerless ``.pcm``) from WAV or raw PCM16LE."""
    if str(path).lower().endswith(".wav"):
        try:
            with wave.open(str(path), "rb") as wf:
                if wf.getsampwidth() != 2 or wf.getnchannels() != 1:
                    raise ParseError(
                        f"{path}: need 16-bit mono, got {8 * wf.getsampwidth()}-bit "
                        f"x{wf.getnchannels()}"
                    )
                rate = wf.getframerate()
                frames = wf.readframes(wf.getnframes())
        except (wave.Error, EOFError) as exc:
            raise ParseError(f"{path}: {exc}") from exc
    else:
        with open(path, "rb") as fh:
            frames = fh.read()
        rate = None
        if len(frames) % 2:
            raise ParseError(f"{path}: odd byte count {len(frames)} for 16-bit PCM")
    return np.frombuffer(frames, dtype="<i2"), rate


def write_pcm16(path: str | os.PathLike, samples: Sequence[int], rate: int = DEFAULT_RATE) -> None:
    data = np.asarray(samples, dtype="<i2").tobytes()
    if str(path).lower().endswith(".wav"):
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(rate)
            wf.writeframes(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def load_audio_pcm(path: str | os.PathLike, rate: Optional[int] = None) -> Dataset:
    pcm, file_rate = read_pcm16(path)
    if pcm.size == 0:
        raise ParseError(f"{path}: no audio samples")
    r = rate or file_rate or DEFAULT_RATE
    return normalize([pcm_to_unit(s) for s in pcm], Modality.audio(r))


def save_audio_pcm(path: str | os.PathLike, d: Dataset, values=None) -> None:
    vals = d.samples if values is None else values
    units = _denormalize_exact(d, vals)
    rate = d.modality.rate or DEFAULT_RATE
    write_pcm16(path, [unit_to_pcm(u) for u in units], rate)
