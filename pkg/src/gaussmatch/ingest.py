"""Data ingestion: CSV point sets, PPM images, and seeded Gaussian sampling.

The sampler is deliberately self-contained rather than delegating to a
library generator: it derives every variate from a counter-based SplitMix64
stream followed by the Box-Muller transform, so a (seed, index) pair maps
to the same double on any platform and the exact recipe can be restated in
a few lines (see README).  Reproducibility of sampled datasets is part of
the package contract, not an implementation detail.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, ParseError, SingularMatrixError
from .gaussians import as_point_set
from .linalg import eigenvalue_floor, sym_eigen, symmetrize

# --- CSV point sets ---------------------------------------------------------


def read_points_csv(source) -> np.ndarray:
    """Read an (n, dim) point set from CSV text.

    ``source`` may be a path or an open text/binary stream.  One row per
    point, comma-separated coordinates.  Blank lines and lines starting
    with '#' are skipped; an optional header line is detected by a
    non-numeric first field.  Raises ParseError (with the 1-based line
    number) on malformed rows and InsufficientDataError for fewer than two
    points.
    """
    rows: list[list[float]] = []
    width = None
    first_content = True
    for line_no, raw in enumerate(_iter_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if first_content:
            first_content = False
            try:
                float(fields[0])
            except ValueError:
                continue  # header line
        try:
            values = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"could not parse row: {exc}", line=line_no) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"row has {len(values)} fields, expected {width}", line=line_no
            )
        rows.append(values)
    if len(rows) < 2:
        raise InsufficientDataError(f"need at least 2 points, got {len(rows)}")
    return as_point_set(np.asarray(rows, dtype=float))


def write_points_csv(points, destination) -> None:
    """Write points as CSV with full round-trip precision (repr of each float)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2:
        raise InvalidInputError(f"expected an (n, dim) array, got shape {pts.shape}")
    lines = [",".join(repr(float(v)) for v in row) for row in pts]
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as handle:
            handle.write(text)


def _iter_lines(source):
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    with open(os.fspath(source), "r", encoding="utf-8") as handle:
        return io.StringIO(handle.read())


# --- PPM images -------------------------------------------------------------


class Raster(NamedTuple):
    """Decoded image: integer samples of shape (height, width, 3) plus maxval."""

    pixels: np.ndarray
    maxval: int


def read_ppm(source) -> Raster:
    """Decode a binary PPM (magic ``P6``) image.

    Supports 8-bit and big-endian 16-bit samples and '#' comments in the
    header.  Raises ParseError on anything malformed.
    """
    data = _read_bytes(source)
    pos = 0

    def next_token(position: int):
        while position < len(data):
            byte = data[position]
            if byte in b" \t\r\n":
                position += 1
            elif byte == ord("#"):
                while position < len(data) and data[position] not in b"\r\n":
                    position += 1
            else:
                break
        if position >= len(data):
            raise ParseError("unexpected end of PPM header")
        start = position
        while position < len(data) and data[position] not in b" \t\r\n":
            position += 1
        return data[start:position], position

    magic, pos = next_token(pos)
    if magic != b"P6":
        raise ParseError(f"unsupported image magic {magic!r}, expected b'P6'")
    header: list[int] = []
    for name in ("width", "height", "maxval"):
        token, pos = next_token(pos)
        try:
            value = int(token)
        except ValueError:
            raise ParseError(f"invalid {name} field {token!r}") from None
        if value <= 0:
            raise ParseError(f"{name} must be positive, got {value}")
        header.append(value)
    width, height, maxval = header
    if maxval > 65535:
        raise ParseError(f"maxval {maxval} out of range (max 65535)")
    if pos >= len(data) or data[pos] not in b" \t\r\n":
        raise ParseError("missing whitespace after maxval")
    pos += 1  # exactly one whitespace byte separates header and raster
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    needed = width * height * 3 * dtype.itemsize
    raster = data[pos : pos + needed]
    if len(raster) < needed:
        raise ParseError(
            f"truncated raster: expected {needed} bytes, found {len(raster)}"
        )
    pixels = (
        np.frombuffer(raster, dtype=dtype)
        .reshape(height, width, 3)
        .astype(np.uint16)
    )
    return Raster(pixels=pixels, maxval=maxval)


def write_ppm(raster: Raster, destination) -> None:
    """Encode a Raster as binary PPM (P6), 16-bit big-endian when maxval > 255."""
    pixels = np.asarray(raster.pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise InvalidInputError(f"expected (height, width, 3) pixels, got {pixels.shape}")
    if pixels.min() < 0 or pixels.max() > raster.maxval:
        raise InvalidInputError("pixel values must lie in [0, maxval]")
    height, width = pixels.shape[:2]
    header = f"P6\n{width} {height}\n{raster.maxval}\n".encode("ascii")
    dtype = np.dtype(">u2") if raster.maxval > 255 else np.dtype("u1")
    body = pixels.astype(dtype).tobytes()
    if hasattr(destination, "write"):
        destination.write(header + body)
    else:
        with open(destination, "wb") as handle:
            handle.write(header + body)


def _read_bytes(source) -> bytes:
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, str):
            raise InvalidInputError("PPM input must be a binary stream or a path")
        return data
    with open(os.fspath(source), "rb") as handle:
        return handle.read()


@dataclass(frozen=True)
class ImageBlocks:
    """Square image tiles flattened into rows of a point matrix.

    Each row holds one ``block_size`` x ``block_size`` tile, flattened
    pixel-major with the channel index fastest, scaled to [0, 1].  An 8x8
    RGB tile therefore becomes a vector of dimension 192.
    """

    block_size: int
    channels: int
    blocks: np.ndarray

    @property
    def dim(self) -> int:
        return self.block_size * self.block_size * self.channels


def image_to_blocks(raster: Raster, block_size: int = 8) -> ImageBlocks:
    """Cut an image into non-overlapping square tiles, row-major order.

    Tiles are taken left to right, top to bottom; partial tiles at the
    right and bottom edges are discarded.  Channel values are divided by
    the raster's maxval, so every coordinate lies in [0, 1].
    """
    if block_size < 1:
        raise InvalidInputError("block size must be positive")
    pixels = np.asarray(raster.pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise InvalidInputError(f"expected (height, width, 3) pixels, got {pixels.shape}")
    height, width = pixels.shape[:2]
    tiles_y, tiles_x = height // block_size, width // block_size
    if tiles_y == 0 or tiles_x == 0:
        raise InvalidInputError(
            f"image {width}x{height} is smaller than one {block_size}x{block_size} block"
        )
    cropped = pixels[: tiles_y * block_size, : tiles_x * block_size, :]
    scaled = cropped.astype(float) / float(raster.maxval)
    blocks = (
        scaled.reshape(tiles_y, block_size, tiles_x, block_size, 3)
        .transpose(0, 2, 1, 3, 4)
        .reshape(tiles_y * tiles_x, block_size * block_size * 3)
    )
    return ImageBlocks(block_size=block_size, channels=3, blocks=blocks)


# --- Seeded Gaussian sampling ------------------------------------------------

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(state: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to uint64 words."""
    z = state.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX_1
    z ^= z >> np.uint64(27)
    z *= _MIX_2
    z ^= z >> np.uint64(31)
    return z


def _stream_words(seed: int, count: int) -> np.ndarray:
    """Word i of the stream is splitmix64(seed + (i + 1) * golden-gamma)."""
    base = np.uint64(int(seed) & _MASK64)
    index = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _splitmix64(base + index * _GOLDEN)


def standard_normals(count: int, seed: int) -> np.ndarray:
    """Deterministic standard normal variates from a counter-based stream.

    Consecutive word pairs (2k, 2k+1) are mapped to uniforms
    u1 = ((word >> 11) + 1) * 2**-53 in (0, 1] and u2 = (word >> 11) * 2**-53
    in [0, 1), then to a normal pair by Box-Muller:

        z_{2k}   = sqrt(-2 ln u1) * cos(2 pi u2)
        z_{2k+1} = sqrt(-2 ln u1) * sin(2 pi u2)

    The result depends only on (count, seed), never on call history.
    """
    if count < 0:
        raise InvalidInputError("count must be nonnegative")
    pairs = (count + 1) // 2
    if pairs == 0:
        return np.empty(0)
    words = _stream_words(seed, 2 * pairs)
    u1 = ((words[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (words[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def sample_gaussian(mean, cov, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` points from Nor(mean, cov), reproducibly across platforms.

    Points are mean + z @ cov**(1/2) with the symmetric square root and the
    ``standard_normals`` stream laid out row by row.  The covariance must be
    positive definite.
    """
    mean = np.asarray(mean, dtype=float).reshape(-1)
    if mean.size == 0 or not np.isfinite(mean).all():
        raise InvalidInputError("mean must be a nonempty finite vector")
    cov = symmetrize(cov)
    if cov.shape[0] != mean.size:
        raise InvalidInputError(
            f"covariance shape {cov.shape} does not match mean of length {mean.size}"
        )
    if count < 2:
        raise InsufficientDataError(f"need at least 2 samples, got {count}")
    eig = sym_eigen(cov)
    smallest = float(eig.values[-1])
    if smallest <= eigenvalue_floor(cov):
        raise SingularMatrixError(
            f"covariance is singular at working precision (smallest eigenvalue {smallest:.3e})",
            smallest_eigenvalue=smallest,
        )
    root = symmetrize((eig.vectors * np.sqrt(eig.values)) @ eig.vectors.T)
    dim = mean.size
    z = standard_normals(count * dim, seed).reshape(count, dim)
    return mean + z @ root
