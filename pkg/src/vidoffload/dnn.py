"""Inference complexity C(M) in MACs and accuracy as a function of frame count.

Layer stacks are propagated shape by shape over a ``(channels, frames,
height, width)`` tensor. Only multiply-accumulates of conv and fc layers are
counted; bias, normalisation, activation and pooling are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import InfeasibleAccuracyError

LAYER_KINDS = ("conv2d", "conv3d", "fc", "pool")


def _triple(v) -> tuple[int, int, int]:
    if isinstance(v, int):
        return (v, v, v)
    t = tuple(int(x) for x in v)
    if len(t) != 3:
        raise ValueError(f"expected 3 components (t, h, w), got {v!r}")
    return t


def conv_out(size: int, kernel: int, stride: int, pad: int) -> int:
    out = (size + 2 * pad - kernel) // stride + 1
    if out < 1:
        raise ValueError(f"kernel {kernel} does not fit input {size} with padding {pad}")
    return out


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a frame-stack network.

    ``conv2d`` runs the same 2-D kernel on every frame (temporal kernel,
    stride and padding must be trivial). ``fc`` acts per frame on the
    flattened ``channels*height*width`` features. ``pool`` keeps channels
    and costs no MACs; ``global_pool`` collapses height and width to 1.

    ``shortcut_from=k`` marks a side branch (e.g. a projection shortcut)
    that reads the input of the layer ``k`` positions earlier and whose
    output is summed into the main path, so it must match its shape.
    """

    kind: str
    channels_in: int = 0
    channels_out: int = 0
    kernel: tuple[int, int, int] = (1, 1, 1)
    stride: tuple[int, int, int] = (1, 1, 1)
    padding: tuple[int, int, int] = (0, 0, 0)
    shortcut_from: int = 0
    global_pool: bool = False

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}; expected one of {LAYER_KINDS}")
        for name in ("kernel", "stride", "padding"):
            object.__setattr__(self, name, _triple(getattr(self, name)))
        if min(self.kernel) < 1 or min(self.stride) < 1:
            raise ValueError(f"kernel and stride components must be >= 1: {self.kernel}, {self.stride}")
        if min(self.padding) < 0:
            raise ValueError(f"padding must be >= 0: {self.padding}")
        if self.kind == "conv2d" and (self.kernel[0], self.stride[0], self.padding[0]) != (1, 1, 0):
            raise ValueError("conv2d layers act per frame: temporal kernel/stride must be 1 and padding 0")
        if self.kind in ("conv2d", "conv3d", "fc") and (self.channels_in < 1 or self.channels_out < 1):
            raise ValueError(f"{self.kind} layer needs positive channel counts")
        if self.shortcut_from < 0 or (self.shortcut_from and self.kind not in ("conv2d", "conv3d")):
            raise ValueError("shortcut_from must be >= 0 and only conv layers may be shortcuts")

    def apply(self, shape: tuple[int, int, int, int]) -> tuple[tuple[int, int, int, int], int]:
        """Return ``(output_shape, macs)`` for an input ``(c, t, h, w)``."""
        c, t, h, w = shape
        if self.kind == "fc":
            if self.channels_in != c * h * w:
                raise ValueError(f"fc expects {self.channels_in} features, got {c}x{h}x{w}")
            return (self.channels_out, t, 1, 1), t * self.channels_in * self.channels_out
        if self.kind == "pool":
            if self.channels_in and self.channels_in != c:
                raise ValueError(f"pool declares {self.channels_in} channels, input has {c}")
            if self.global_pool:
                return (c, t, 1, 1), 0
            kt, kh, kw = self.kernel
            st, sh, sw = self.stride
            pt, ph, pw = self.padding
            return (c, conv_out(t, kt, st, pt), conv_out(h, kh, sh, ph), conv_out(w, kw, sw, pw)), 0
        if self.channels_in != c:
            raise ValueError(f"{self.kind} expects {self.channels_in} input channels, got {c}")
        kt, kh, kw = self.kernel
        st, sh, sw = self.stride
        pt, ph, pw = self.padding
        out = (self.channels_out, conv_out(t, kt, st, pt), conv_out(h, kh, sh, ph), conv_out(w, kw, sw, pw))
        return out, math.prod(out) * kt * kh * kw * self.channels_in


def propagate(layers: Sequence[LayerSpec], shape: tuple[int, int, int, int]) -> tuple[list, int]:
    """Run ``shape`` through ``layers``; returns main-path shapes and total MACs."""
    shapes = [shape]  # shapes[i] is the main-path input of layer i
    total = 0
    for i, layer in enumerate(layers):
        if layer.shortcut_from:
            if layer.shortcut_from > i:
                raise ValueError(f"layer {i} shortcut reaches before the network input")
            out, n = layer.apply(shapes[i - layer.shortcut_from])
            if out != shapes[i]:
                raise ValueError(f"layer {i} shortcut output {out} does not match main path {shapes[i]}")
            shapes.append(shapes[i])
        else:
            out, n = layer.apply(shapes[i])
            shapes.append(out)
        total += n
    return shapes, total


def resnet18_layers(num_classes: int = 27, in_channels: int = 3) -> list[LayerSpec]:
    """ResNet-18 applied frame by frame, with projection shortcuts."""
    layers = [
        LayerSpec("conv2d", in_channels, 64, (1, 7, 7), (1, 2, 2), (0, 3, 3)),
        LayerSpec("pool", 64, 64, (1, 3, 3), (1, 2, 2), (0, 1, 1)),
    ]
    c_in = 64
    for c_out, first_stride in ((64, 1), (128, 2), (256, 2), (512, 2)):
        for block in range(2):
            s = first_stride if block == 0 else 1
            layers.append(LayerSpec("conv2d", c_in, c_out, (1, 3, 3), (1, s, s), (0, 1, 1)))
            layers.append(LayerSpec("conv2d", c_out, c_out, (1, 3, 3), (1, 1, 1), (0, 1, 1)))
            if s != 1 or c_in != c_out:
                layers.append(LayerSpec("conv2d", c_in, c_out, (1, 1, 1), (1, s, s), shortcut_from=2))
            c_in = c_out
    layers.append(LayerSpec("pool", 512, 512, global_pool=True))
    layers.append(LayerSpec("fc", 512, num_classes))
    return layers


class ComplexityModel:
    """Maps a frame count to a MAC count on ``1..m_max``."""

    m_max: int

    def _macs(self, frames: int) -> float:
        raise NotImplementedError

    def macs(self, frames: int) -> float:
        if int(frames) != frames or not 1 <= frames <= self.m_max:
            raise ValueError(f"frame count {frames} outside 1..{self.m_max}")
        return self._macs(int(frames))

    def _check(self):
        values = [self._macs(m) for m in range(1, self.m_max + 1)]
        if values[0] <= 0:
            raise ValueError(f"C(1) must be positive, got {values[0]}")
        for m in range(1, len(values)):
            if values[m] < values[m - 1]:
                raise ValueError(f"C(M) decreases at M={m + 1}: {values[m - 1]} -> {values[m]}")


@dataclass(frozen=True)
class LayeredComplexity(ComplexityModel):
    layers: tuple[LayerSpec, ...]
    height: int = 112
    width: int = 112
    channels: int = 3
    m_max: int = 16

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        self._check()

    def _macs(self, frames: int) -> float:
        return float(propagate(self.layers, (self.channels, frames, self.height, self.width))[1])

    @classmethod
    def resnet18(cls, height: int = 112, width: int = 112, m_max: int = 16, num_classes: int = 27):
        return cls(tuple(resnet18_layers(num_classes)), height, width, 3, m_max)


@dataclass(frozen=True)
class TabularComplexity(ComplexityModel):
    table: Mapping[int, float]

    def __post_init__(self):
        table = {int(k): float(v) for k, v in dict(self.table).items()}
        if sorted(table) != list(range(1, len(table) + 1)):
            raise ValueError("complexity table must cover M = 1..m_max without gaps")
        object.__setattr__(self, "table", table)
        self._check()

    @property
    def m_max(self) -> int:
        return len(self.table)

    def _macs(self, frames: int) -> float:
        return self.table[frames]


@dataclass(frozen=True)
class AffineComplexity(ComplexityModel):
    c0: float
    c1: float
    m_max: int = 16

    def __post_init__(self):
        if self.c1 < 0:
            raise ValueError(f"slope must be nonnegative, got {self.c1}")
        self._check()

    def _macs(self, frames: int) -> float:
        return self.c0 + self.c1 * frames


def macs(model: ComplexityModel, frames: int) -> float:
    return model.macs(frames)


def fit_affine(model: ComplexityModel, m_range: Sequence[int]) -> tuple[float, float]:
    """Least-squares ``(c0, c1)`` with ``C(M) ~ c0 + c1*M`` over ``m_range``."""
    ms = sorted(set(int(m) for m in m_range))
    if len(ms) < 2:
        raise ValueError("need at least two distinct frame counts to fit a line")
    x = np.asarray(ms, dtype=float)
    y = np.asarray([model.macs(m) for m in ms])
    a = np.column_stack([np.ones_like(x), x])
    (c0, c1), *_ = np.linalg.lstsq(a, y, rcond=None)
    c1 = max(float(c1), 0.0)  # rounding can leave -0 or -1e-7 on flat data
    AffineComplexity(float(c0), c1, m_max=max(ms))  # raises if the line is not a valid model
    return float(c0), c1


class AccuracyModel:
    """Monotone non-decreasing accuracy as a function of the frame count."""

    def accuracy(self, frames: int) -> float:
        raise NotImplementedError

    def __call__(self, frames: int) -> float:
        return self.accuracy(frames)


@dataclass(frozen=True)
class TabularAccuracy(AccuracyModel):
    table: Mapping[int, float]

    def __post_init__(self):
        table = {int(k): float(v) for k, v in dict(self.table).items()}
        if sorted(table) != list(range(1, len(table) + 1)):
            raise ValueError("accuracy table must cover M = 1..K without gaps")
        prev = -math.inf
        for m in range(1, len(table) + 1):
            if not 0 <= table[m] <= 1:
                raise ValueError(f"accuracy at M={m} is {table[m]}, outside [0, 1]")
            if table[m] < prev:
                raise ValueError(f"accuracy table decreases at M={m}: {prev} -> {table[m]}")
            prev = table[m]
        object.__setattr__(self, "table", table)

    @property
    def m_max(self) -> int:
        return len(self.table)

    def accuracy(self, frames: int) -> float:
        if frames not in self.table:
            raise ValueError(f"frame count {frames} outside 1..{self.m_max}")
        return self.table[frames]


@dataclass(frozen=True)
class SaturatingAccuracy(AccuracyModel):
    """``a - b*exp(-c*M)``. The default parameters are synthetic placeholders."""

    a: float = 0.95
    b: float = 0.5
    c: float = 0.4
    m_max: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not 0 < self.a <= 1:
            raise ValueError(f"a must lie in (0, 1], got {self.a}")
        if not (self.b > 0 and self.c > 0):
            raise ValueError("b and c must be positive")
        if self.a - self.b * math.exp(-self.c) < 0:
            raise ValueError("accuracy at M=1 would be negative")

    def accuracy(self, frames: int) -> float:
        if frames < 1:
            raise ValueError(f"frame count must be >= 1, got {frames}")
        return self.a - self.b * math.exp(-self.c * frames)

    @classmethod
    def fit(cls, table: Mapping[int, float]) -> "SaturatingAccuracy":
        from scipy.optimize import curve_fit

        ms = np.asarray(sorted(table), dtype=float)
        ys = np.asarray([table[int(m)] for m in ms])
        (a, b, c), _ = curve_fit(
            lambda m, a, b, c: a - b * np.exp(-c * m),
            ms,
            ys,
            p0=(float(ys.max()), float(ys.max() - ys.min()) or 0.1, 0.5),
            bounds=([1e-9, 1e-12, 1e-12], [1.0, 10.0, 50.0]),
        )
        return cls(float(a), float(b), float(c))


def min_frames(acc: AccuracyModel, alpha: float, m_max: int) -> int:
    """Smallest frame count in ``1..m_max`` whose accuracy reaches ``alpha``."""
    for m in range(1, m_max + 1):
        if acc.accuracy(m) >= alpha:
            return m
    raise InfeasibleAccuracyError(
        f"accuracy {acc.accuracy(m_max):.6g} at M={m_max} frames is below the requirement {alpha}"
    )
