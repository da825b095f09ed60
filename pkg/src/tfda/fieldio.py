"""Doubly periodic scalar fields: I/O, coarse-graining, normalization, synthesis."""

import csv
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateFieldError, FieldFormatError

TWO_PI = 2.0 * math.pi
MAGIC = b"TFD1"
_HEADER = struct.Struct("<4sIIdd")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Samples of a doubly periodic function on an ``ny`` x ``nx`` grid.

    ``values[j, i]`` is the sample at ``(i * lx / nx, j * ly / ny)``; row ``j = 0``
    is the bottom of the domain. No boundary row or column is duplicated.
    """

    values: np.ndarray
    lx: float = TWO_PI
    ly: float = TWO_PI

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"field values must be a non-empty 2-D array, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError("domain sizes must be positive")
        object.__setattr__(self, "values", values)

    @property
    def nx(self):
        return self.values.shape[1]

    @property
    def ny(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape

    def coordinates(self):
        """Return ``(x, y)`` meshgrids matching ``values``."""
        x = np.arange(self.nx) * (self.lx / self.nx)
        y = np.arange(self.ny) * (self.ly / self.ny)
        return np.meshgrid(x, y)

    def with_values(self, values):
        return ScalarField(values, self.lx, self.ly)

    def __eq__(self, other):
        if not isinstance(other, ScalarField):
            return NotImplemented
        return (
            self.lx == other.lx
            and self.ly == other.ly
            and self.values.shape == other.values.shape
            and bool(np.array_equal(self.values, other.values))
        )

    __hash__ = None


def from_function(func, nx, ny=None, lx=TWO_PI, ly=TWO_PI):
    """Sample ``func(x, y)`` (vectorized) on the periodic grid."""
    ny = nx if ny is None else ny
    x = np.arange(nx) * (lx / nx)
    y = np.arange(ny) * (ly / ny)
    xx, yy = np.meshgrid(x, y)
    return ScalarField(np.asarray(func(xx, yy), dtype=np.float64) + np.zeros_like(xx), lx, ly)


# ---------------------------------------------------------------------------
# I/O


def _infer_format(path, fmt):
    if fmt is not None:
        if fmt not in ("binary", "csv"):
            raise ValueError(f"unknown field format {fmt!r}")
        return fmt
    return "csv" if Path(path).suffix.lower() == ".csv" else "binary"


def load_field(path, format=None):
    """Read a field written in the TFD1 binary format or as CSV.

    The format is inferred from the extension (``.csv`` or anything else for
    binary) when not given.
    """
    fmt = _infer_format(path, format)
    if fmt == "binary":
        return _load_binary(Path(path))
    return _load_csv(Path(path))


def _load_binary(path):
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FieldFormatError(f"{path}: truncated header at byte offset {len(data)}")
    magic, nx, ny, lx, ly = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise FieldFormatError(f"{path}: bad magic {magic!r} at byte offset 0")
    if nx == 0 or ny == 0:
        raise FieldFormatError(f"{path}: empty grid {nx}x{ny} at byte offset 4")
    if not (math.isfinite(lx) and math.isfinite(ly) and lx > 0 and ly > 0):
        raise FieldFormatError(f"{path}: invalid domain size at byte offset 12")
    expected = _HEADER.size + 8 * nx * ny
    if len(data) != expected:
        raise FieldFormatError(
            f"{path}: payload size mismatch, expected {expected} bytes, got {len(data)} "
            f"(byte offset {min(len(data), expected)})"
        )
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(ny, nx)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise FieldFormatError(f"{path}: non-finite value at byte offset {_HEADER.size + 8 * int(bad[0])}")
    return ScalarField(values.astype(np.float64), lx, ly)


def _load_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                parsed = [float(cell) for cell in row]
            except ValueError as exc:
                raise FieldFormatError(f"{path}: row {lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in parsed):
                raise FieldFormatError(f"{path}: row {lineno}: non-finite value")
            if rows and len(parsed) != len(rows[0]):
                raise FieldFormatError(
                    f"{path}: row {lineno}: expected {len(rows[0])} columns, got {len(parsed)}"
                )
            rows.append(parsed)
    if not rows:
        raise FieldFormatError(f"{path}: row 1: empty file")
    return ScalarField(np.array(rows, dtype=np.float64))


def save_field(field, path, format=None):
    """Write ``field``; binary output is a bit-exact inverse of :func:`load_field`."""
    path = Path(path)
    fmt = _infer_format(path, format)
    try:
        if fmt == "binary":
            header = _HEADER.pack(MAGIC, field.nx, field.ny, float(field.lx), float(field.ly))
            with open(path, "wb") as fh:
                fh.write(header)
                fh.write(field.values.astype("<f8").tobytes())
        else:
            np.savetxt(path, field.values, delimiter=",", fmt="%.17g")
    except OSError as exc:
        raise OSError(f"cannot write field to {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------
# transforms


def coarse_grain(field, factor, method="mean"):
    """Reduce resolution by an integer ``factor``.

    ``method="mean"`` averages each ``factor x factor`` block; ``"subsample"``
    keeps the block's lower-left sample.
    """
    factor = int(factor)
    if factor < 1 or field.nx % factor or field.ny % factor:
        raise ValueError(f"factor {factor} does not divide grid {field.nx}x{field.ny}")
    if factor == 1:
        return field
    if method == "mean":
        blocks = field.values.reshape(field.ny // factor, factor, field.nx // factor, factor)
        values = blocks.mean(axis=(1, 3))
    elif method == "subsample":
        values = field.values[::factor, ::factor].copy()
    else:
        raise ValueError(f"unknown coarse-graining method {method!r}")
    return field.with_values(values)


def normalize(field):
    """Divide by the value extent ``max - min``; no shift is applied."""
    extent = float(field.values.max() - field.values.min())
    if not extent > 0:
        raise DegenerateFieldError("cannot normalize a constant field")
    if extent == 1.0:
        return field
    return field.with_values(field.values / extent)


def synth_field(nx, ny, spectrum_exponent, kmin, kmax, seed, lx=TWO_PI, ly=TWO_PI):
    """Random-phase stream function with a power-law energy spectrum.

    Sums ``a_k cos(k.x + phi_k)`` over integer wave vectors (one per +/- pair)
    with ``kmin <= |k| <= kmax``. Amplitudes are set per unit-width shell
    ``n <= |k| < n + 1`` so that the shell energy is exactly proportional to
    ``n ** spectrum_exponent``; total kinetic energy is normalized to 1.
    """
    if not (1 <= kmin <= kmax < min(nx, ny) / 2):
        raise ValueError(f"need 1 <= kmin <= kmax < min(nx, ny)/2, got kmin={kmin}, kmax={kmax}")
    kr = int(math.floor(kmax))
    kx, ky = np.meshgrid(np.arange(-kr, kr + 1), np.arange(-kr, kr + 1))
    kx, ky = kx.ravel(), ky.ravel()
    mod = np.hypot(kx, ky)
    upper_half = (ky > 0) | ((ky == 0) & (kx > 0))
    keep = upper_half & (mod >= kmin) & (mod <= kmax)
    kx, ky, mod = kx[keep], ky[keep], mod[keep]
    if kx.size == 0:
        raise ValueError(f"no wave vectors with {kmin} <= |k| <= {kmax}")

    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=kx.size)

    shell = np.floor(mod).astype(np.int64)
    counts = np.bincount(shell)[shell]
    shells = np.unique(shell).astype(np.float64)
    shell_energy = shell.astype(np.float64) ** spectrum_exponent / np.sum(shells**spectrum_exponent)
    # a mode a cos(k.x + phi) carries kinetic energy |k|^2 a^2 / 4
    amp = np.sqrt(4.0 * shell_energy / (counts * mod**2))

    spec = np.zeros((ny, nx), dtype=np.complex128)
    half = 0.5 * amp * np.exp(1j * phases) * (nx * ny)
    np.add.at(spec, (ky % ny, kx % nx), half)
    np.add.at(spec, ((-ky) % ny, (-kx) % nx), np.conj(half))
    values = np.fft.ifft2(spec).real
    return ScalarField(values, lx, ly)
