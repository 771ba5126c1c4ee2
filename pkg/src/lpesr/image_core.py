"""Raster primitives: float planes, BT.601 color conversion, cubic resampling.

All arithmetic runs on double-precision planes in the nominal [0, 255]
range; quantization to 8 bits happens only at file output and metric
input. Resampling follows the convolution convention dominant in the
super-resolution literature: separable cubic kernel with sharpness
a = -0.5, kernel support widened by the inverse scale when downscaling
(antialiasing), replicate edge handling via coordinate clamping, and
per-output-pixel weight normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import DimensionError, ParameterError

__all__ = [
    "Plane",
    "YccImage",
    "ResampleSpec",
    "rgb_to_ycc",
    "ycc_to_rgb",
    "resample",
    "modcrop",
    "pad_replicate",
    "quantize_8bit",
    "load_image",
    "save_image",
]

# BT.601 studio-swing forward matrix for 8-bit RGB in [0, 255].
_YCC_MATRIX = np.array(
    [
        [65.481, 128.553, 24.966],
        [-37.797, -74.203, 112.0],
        [112.0, -93.786, -18.214],
    ]
) / 255.0
_YCC_OFFSET = np.array([16.0, 128.0, 128.0])
_YCC_INVERSE = np.linalg.inv(_YCC_MATRIX)


@dataclass(frozen=True, eq=False)
class Plane:
    """Immutable single-channel raster of double-precision intensities."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"plane must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"plane must be at least 1x1, got {arr.shape}")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class YccImage:
    """YCbCr triple of equally sized planes."""

    y: Plane
    cb: Plane
    cr: Plane

    def __post_init__(self):
        shp = self.y.data.shape
        if self.cb.data.shape != shp or self.cr.data.shape != shp:
            raise DimensionError(
                "YCbCr planes must share dimensions, got "
                f"{shp}, {self.cb.data.shape}, {self.cr.data.shape}"
            )


@dataclass(frozen=True)
class ResampleSpec:
    """Cubic resampling parameters.

    scale      output/input size ratio, > 0
    a          cubic kernel sharpness (default -0.5)
    antialias  widen the kernel by 1/scale when downscaling
    """

    scale: float
    a: float = -0.5
    antialias: bool = True

    def __post_init__(self):
        if not self.scale > 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")


def rgb_to_ycc(rgb: np.ndarray) -> YccImage:
    """Convert an 8-bit RGB raster to studio-swing YCbCr planes.

    No rounding is applied: Y lands in [16, 235] and Cb/Cr in [16, 240]
    as doubles.
    """
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionError(f"expected (h, w, 3) raster, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError("zero-sized raster")
    ycc = np.tensordot(arr.astype(np.float64), _YCC_MATRIX.T, axes=1) + _YCC_OFFSET
    return YccImage(Plane(ycc[..., 0]), Plane(ycc[..., 1]), Plane(ycc[..., 2]))


def ycc_to_rgb(img: YccImage) -> np.ndarray:
    """Invert :func:`rgb_to_ycc`, clamping and rounding to an 8-bit raster."""
    ycc = np.stack([img.y.data, img.cb.data, img.cr.data], axis=-1)
    rgb = np.tensordot(ycc - _YCC_OFFSET, _YCC_INVERSE.T, axes=1)
    return quantize_8bit_array(rgb)


def _cubic(x: np.ndarray, a: float) -> np.ndarray:
    ax = np.abs(x)
    ax2 = ax * ax
    ax3 = ax2 * ax
    near = (a + 2.0) * ax3 - (a + 3.0) * ax2 + 1.0
    far = a * ax3 - 5.0 * a * ax2 + 8.0 * a * ax - 4.0 * a
    return np.where(ax <= 1.0, near, np.where(ax < 2.0, far, 0.0))


def _contributions(in_len: int, out_len: int, scale: float, a: float, antialias: bool):
    """Per-output-pixel source indices and normalized kernel weights.

    Output pixel x samples the source at u = (x + 0.5)/scale - 0.5; when
    shrinking with antialias the kernel is stretched by 1/scale. Indices
    are clamped to the valid range (replicate edges) and each weight row
    is normalized to sum to 1.
    """
    x = np.arange(out_len, dtype=np.float64)
    u = (x + 0.5) / scale - 0.5
    kscale = scale if (scale < 1.0 and antialias) else 1.0
    support = 2.0 / kscale
    left = np.floor(u - support).astype(np.int64)
    taps = int(np.ceil(2.0 * support)) + 2
    idx = left[:, None] + np.arange(taps)[None, :]
    w = _cubic((u[:, None] - idx) * kscale, a)
    w /= w.sum(axis=1, keepdims=True)
    return np.clip(idx, 0, in_len - 1), w


def _resample_rows(data: np.ndarray, out_len: int, scale: float, a: float, antialias: bool) -> np.ndarray:
    idx, w = _contributions(data.shape[0], out_len, scale, a, antialias)
    out = w[:, 0:1] * data[idx[:, 0], :]
    for t in range(1, idx.shape[1]):
        out += w[:, t : t + 1] * data[idx[:, t], :]
    return out


def resample(p: Plane, spec: ResampleSpec) -> Plane:
    """Separable cubic resampling of a plane.

    Output dimensions are round(input * scale). With scale 1 and no
    antialiasing this is the identity.
    """
    scale = float(spec.scale)
    out_h = int(np.floor(p.height * scale + 0.5))
    out_w = int(np.floor(p.width * scale + 0.5))
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"resampled size {out_h}x{out_w} is empty")
    out = _resample_rows(p.data, out_h, scale, spec.a, spec.antialias)
    out = _resample_rows(np.ascontiguousarray(out.T), out_w, scale, spec.a, spec.antialias)
    return Plane(out.T)


def modcrop(p: Plane, s: int) -> Plane:
    """Crop bottom/right so both dimensions are multiples of s."""
    if s < 1:
        raise ParameterError(f"modcrop factor must be >= 1, got {s}")
    h = (p.height // s) * s
    w = (p.width // s) * s
    if h == 0 or w == 0:
        raise DimensionError(f"modcrop by {s} empties a {p.height}x{p.width} plane")
    return Plane(p.data[:h, :w])


def pad_replicate(p: Plane, margin: int) -> Plane:
    """Extend each side by `margin` rows/columns of the nearest edge pixel."""
    if margin < 0:
        raise ParameterError(f"margin must be >= 0, got {margin}")
    if margin == 0:
        return p
    return Plane(np.pad(p.data, margin, mode="edge"))


def quantize_8bit_array(data: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero to uint8."""
    return np.floor(np.clip(data, 0.0, 255.0) + 0.5).astype(np.uint8)


def quantize_8bit(p: Plane) -> np.ndarray:
    """8-bit raster of a plane (clamp then round half away from zero)."""
    return quantize_8bit_array(p.data)


def load_image(path) -> np.ndarray:
    """Read a PNG/BMP image as uint8: (h, w) grayscale or (h, w, 3) RGB."""
    with Image.open(path) as img:
        if img.mode == "L":
            return np.asarray(img, dtype=np.uint8)
        if img.mode != "RGB":
            img = img.convert("RGB")
        return np.asarray(img, dtype=np.uint8)


def save_image(path, raster: np.ndarray) -> None:
    """Write a uint8 grayscale or RGB raster; format chosen by extension."""
    arr = np.asarray(raster)
    if arr.dtype != np.uint8:
        raise ParameterError(f"expected uint8 raster, got {arr.dtype}")
    if arr.ndim == 2:
        Image.fromarray(arr, mode="L").save(path)
    elif arr.ndim == 3 and arr.shape[2] == 3:
        Image.fromarray(arr, mode="RGB").save(path)
    else:
        raise DimensionError(f"cannot save raster of shape {arr.shape}")


def to_y_plane(raster: np.ndarray) -> Plane:
    """Intensity plane of a raster: grayscale as-is, RGB via BT.601 Y."""
    arr = np.asarray(raster)
    if arr.ndim == 2:
        return Plane(arr.astype(np.float64))
    return rgb_to_ycc(arr).y
