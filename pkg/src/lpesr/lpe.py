"""Local patch encoding: the class label of a 3x3 patch.

A patch code concatenates three fields, most significant first:

* a quantized-central-value index (n_c bits, homogeneous bins of width
  256 / 2^n_c),
* a quantized mean-absolute-neighbor-difference index (n_d bits, bins
  at 0, 5, 10, ...),
* the 8-neighbor local binary pattern (n_p = 8 bits), present only for
  total bit depths >= 8.

Bin membership is half-open: a value equal to a threshold belongs to
the upper bin, and values beyond the last threshold saturate there.
The code value is used directly as the class index of the patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ParameterError
from .image_core import Plane, pad_replicate

__all__ = [
    "NEIGHBOR_OFFSETS",
    "LpeConfig",
    "LpeCode",
    "make_config",
    "lbp",
    "lpe_c",
    "mean_abs_diff",
    "lpe_d",
    "encode",
    "encode_windows",
    "encode_plane",
    "class_histogram",
]

# Row-major scan of the 3x3 window, center excluded; position p (0-based)
# carries LBP bit weight 2^p.
NEIGHBOR_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class LpeConfig:
    """Bit budget, quantizer thresholds and neighbor ordering.

    A config fully determines the patch partition: two pipelines agree on
    class labels iff they share a config.
    """

    total_bits: int
    n_c: int
    n_d: int
    n_p: int
    t_c: tuple[float, ...]
    t_d: tuple[float, ...]
    neighbor_order: tuple[tuple[int, int], ...] = NEIGHBOR_OFFSETS

    def __post_init__(self):
        if self.total_bits != self.n_c + self.n_d + self.n_p:
            raise ParameterError(
                f"total_bits {self.total_bits} != n_c+n_d+n_p "
                f"{self.n_c}+{self.n_d}+{self.n_p}"
            )
        if self.n_p not in (0, 8):
            raise ParameterError(f"n_p must be 0 or 8, got {self.n_p}")
        for name, thr, bits in (("t_c", self.t_c, self.n_c), ("t_d", self.t_d, self.n_d)):
            if len(thr) != 1 << bits:
                raise ParameterError(f"{name} must have {1 << bits} entries, got {len(thr)}")
            if thr[0] != 0:
                raise ParameterError(f"{name}[0] must be 0, got {thr[0]}")
            if any(b <= a for a, b in zip(thr, thr[1:])):
                raise ParameterError(f"{name} must be strictly increasing: {thr}")
        if sorted(self.neighbor_order) != sorted(NEIGHBOR_OFFSETS):
            raise ParameterError(
                f"neighbor_order must permute the 8 off-center offsets, got {self.neighbor_order}"
            )

    @property
    def n_classes(self) -> int:
        return 1 << self.total_bits

    def split_code(self, value: int) -> tuple[int, int, int]:
        """Decompose a code value into its (lpe_c, lpe_d, lbp) fields."""
        lbp_field = value & ((1 << self.n_p) - 1)
        d_field = (value >> self.n_p) & ((1 << self.n_d) - 1)
        c_field = value >> (self.n_d + self.n_p)
        return c_field, d_field, lbp_field


@dataclass(frozen=True)
class LpeCode:
    """A patch code: `value` on `bits` bits, usable directly as a class index."""

    value: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.value < (1 << self.bits):
            raise ParameterError(f"code {self.value} does not fit in {self.bits} bits")


def make_config(total_bits: int) -> LpeConfig:
    """Build the default config for a bit budget.

    Budgets of 8 or more reserve 8 bits for the binary pattern and split
    the remainder between the central-value and difference quantizers,
    central value first. Budgets below 8 drop the pattern field entirely
    and split the full budget the same way.
    """
    if not 1 <= total_bits <= 24:
        raise ParameterError(f"total_bits must be in [1, 24], got {total_bits}")
    if total_bits >= 8:
        n_p = 8
        extra = total_bits - 8
    else:
        n_p = 0
        extra = total_bits
    n_c = math.ceil(extra / 2)
    n_d = extra // 2
    t_c = tuple(k * 256.0 / (1 << n_c) for k in range(1 << n_c))
    t_d = tuple(5.0 * k for k in range(1 << n_d))
    return LpeConfig(total_bits=total_bits, n_c=n_c, n_d=n_d, n_p=n_p, t_c=t_c, t_d=t_d)


def _as_patch(patch) -> np.ndarray:
    arr = np.asarray(patch, dtype=np.float64)
    if arr.shape == (9,):
        arr = arr.reshape(3, 3)
    if arr.shape != (3, 3):
        raise ParameterError(f"patch must be 3x3, got shape {arr.shape}")
    return arr


def lbp(patch, cfg: LpeConfig) -> int:
    """8-bit local binary pattern: bit p set iff neighbor p >= center."""
    if cfg.n_p != 8:
        raise ParameterError("config has no binary-pattern field (n_p = 0)")
    arr = _as_patch(patch)
    g_c = arr[1, 1]
    code = 0
    for p, (dy, dx) in enumerate(cfg.neighbor_order):
        if arr[1 + dy, 1 + dx] - g_c >= 0:
            code |= 1 << p
    return code


def _bin_index(value: float, thresholds: tuple[float, ...]) -> int:
    # Largest i with thresholds[i] <= value; below-range values map to bin 0.
    idx = 0
    for i, t in enumerate(thresholds):
        if value >= t:
            idx = i
    return idx


def lpe_c(g_c: float, cfg: LpeConfig) -> int:
    """Quantizer index of the central gray value."""
    if cfg.n_c < 1:
        raise ParameterError("config has no central-value field (n_c = 0)")
    return _bin_index(float(g_c), cfg.t_c)


def mean_abs_diff(patch) -> float:
    """Mean absolute difference between the 8 neighbors and the center."""
    arr = _as_patch(patch)
    g_c = arr[1, 1]
    return sum(abs(arr[1 + dy, 1 + dx] - g_c) for dy, dx in NEIGHBOR_OFFSETS) / 8.0


def lpe_d(d: float, cfg: LpeConfig) -> int:
    """Quantizer index of the mean local difference; saturates at the top bin."""
    if cfg.n_d < 1:
        raise ParameterError("config has no difference field (n_d = 0)")
    if d < 0:
        raise ParameterError(f"mean difference must be >= 0, got {d}")
    return _bin_index(float(d), cfg.t_d)


def encode(patch, cfg: LpeConfig) -> LpeCode:
    """Class code of one 3x3 patch (central-value, difference, pattern fields)."""
    arr = _as_patch(patch)
    value = 0
    if cfg.n_c:
        value = _bin_index(arr[1, 1], cfg.t_c)
    if cfg.n_d:
        value = (value << cfg.n_d) | _bin_index(mean_abs_diff(arr), cfg.t_d)
    if cfg.n_p:
        value = (value << cfg.n_p) | lbp(arr, cfg)
    return LpeCode(value=value, bits=cfg.total_bits)


def encode_windows(windows: np.ndarray, cfg: LpeConfig) -> np.ndarray:
    """Vectorized :func:`encode` over a batch of patches.

    `windows` is (n, 9) or (n, 3, 3), row-major. Returns (n,) int64 codes.
    """
    w = np.asarray(windows, dtype=np.float64).reshape(-1, 9)
    center = w[:, 4]
    nidx = np.array([(dy + 1) * 3 + (dx + 1) for dy, dx in cfg.neighbor_order])
    neigh = w[:, nidx]
    value = np.zeros(w.shape[0], dtype=np.int64)
    if cfg.n_c:
        t_c = np.asarray(cfg.t_c)
        value = np.clip(np.searchsorted(t_c, center, side="right") - 1, 0, len(t_c) - 1)
    if cfg.n_d:
        t_d = np.asarray(cfg.t_d)
        d = np.abs(neigh - center[:, None]).mean(axis=1)
        d_idx = np.clip(np.searchsorted(t_d, d, side="right") - 1, 0, len(t_d) - 1)
        value = (value << cfg.n_d) | d_idx
    if cfg.n_p:
        bits = (neigh - center[:, None]) >= 0
        value = (value << cfg.n_p) | (bits @ (1 << np.arange(8, dtype=np.int64)))
    return value


@njit(cache=True)
def _encode_plane_kernel(padded, dys, dxs, t_c, t_d, n_c, n_d, n_p, codes):  # pragma: no cover
    h, w = codes.shape
    nb_c = t_c.shape[0]
    nb_d = t_d.shape[0]
    for i in range(h):
        for j in range(w):
            g_c = padded[i + 1, j + 1]
            pattern = 0
            acc = 0.0
            for p in range(8):
                diff = padded[i + 1 + dys[p], j + 1 + dxs[p]] - g_c
                if diff >= 0.0:
                    pattern |= 1 << p
                    acc += diff
                else:
                    acc -= diff
            value = 0
            if n_c:
                ci = nb_c - 1
                while ci > 0 and g_c < t_c[ci]:
                    ci -= 1
                value = ci
            if n_d:
                d = acc * 0.125
                di = nb_d - 1
                while di > 0 and d < t_d[di]:
                    di -= 1
                value = (value << n_d) | di
            if n_p:
                value = (value << n_p) | pattern
            codes[i, j] = value


def encode_plane(p: Plane, cfg: LpeConfig) -> np.ndarray:
    """Class code of every pixel's 3x3 window (replicate-padded borders).

    Returns an (h, w) int64 array; the compiled kernel makes this the
    fast path shared by harvesting, reconstruction and inspection.
    """
    padded = np.pad(p.data, 1, mode="edge")
    dys = np.array([dy for dy, _ in cfg.neighbor_order], dtype=np.int64)
    dxs = np.array([dx for _, dx in cfg.neighbor_order], dtype=np.int64)
    codes = np.empty((p.height, p.width), dtype=np.int64)
    _encode_plane_kernel(
        padded, dys, dxs,
        np.asarray(cfg.t_c, dtype=np.float64), np.asarray(cfg.t_d, dtype=np.float64),
        cfg.n_c, cfg.n_d, cfg.n_p, codes,
    )
    return codes


def class_histogram(p: Plane, cfg: LpeConfig) -> np.ndarray:
    """Occurrence count of every class over all windows of a plane."""
    codes = encode_plane(p, cfg)
    return np.bincount(codes.ravel(), minlength=cfg.n_classes)
