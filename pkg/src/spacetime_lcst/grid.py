"""Uniform 4-D lattices and multivector-valued fields sampled on them.

Axis order is always ``(t, x1, x2, x3)``; field data is an array of shape
``n + (16,)`` in row-major order. Quadrature is the plain Riemann sum with
weight equal to the cell volume, and all fast paths and convolutions treat
the lattice as a torus.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import algebra as ga


class GridError(ValueError):
    """Inconsistent or mismatched grids."""


class ContainmentWarning(UserWarning):
    pass


def _tuple4(values, name: str, cast=float) -> tuple:
    vals = tuple(cast(v) for v in values)
    if len(vals) != 4:
        raise GridError(f"{name} needs 4 entries, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class Grid:
    """Uniform lattice; coordinate of index j on axis k is ``origin[k] + j*spacing[k]``."""

    n: tuple[int, int, int, int]
    spacing: tuple[float, float, float, float]
    origin: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    kind: int = field(default=0, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "n", _tuple4(self.n, "n", int))
        object.__setattr__(self, "spacing", _tuple4(self.spacing, "spacing"))
        object.__setattr__(self, "origin", _tuple4(self.origin, "origin"))
        if any(k <= 0 for k in self.n):
            raise GridError(f"sample counts must be positive, got {self.n}")
        if any(not (s > 0 and math.isfinite(s)) for s in self.spacing):
            raise GridError(f"spacings must be positive, got {self.spacing}")

    @classmethod
    def centered(cls, n: Sequence[int], spacing: Sequence[float] | float):
        """Lattice whose index ``n//2`` sits at coordinate 0 on every axis."""
        n = _tuple4(n, "n", int)
        if np.isscalar(spacing):
            spacing = (float(spacing),) * 4
        spacing = _tuple4(spacing, "spacing")
        origin = tuple(-(k // 2) * s for k, s in zip(n, spacing))
        return cls(n, spacing, origin)

    @property
    def size(self) -> int:
        return int(np.prod(self.n))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n + (16,)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, k: int) -> np.ndarray:
        return self.origin[k] + np.arange(self.n[k]) * self.spacing[k]

    def axes(self) -> list[np.ndarray]:
        return [self.axis(k) for k in range(4)]

    def mesh(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        return np.meshgrid(*self.axes(), indexing="ij", sparse=True)

    def extent(self, k: int) -> float:
        return self.n[k] * self.spacing[k]

    def zero_index(self, k: int) -> int:
        """Index of coordinate 0 on axis k (the lattice must contain 0)."""
        j = -self.origin[k] / self.spacing[k]
        jr = round(j)
        if abs(j - jr) > 1e-9 * max(1.0, abs(j)):
            raise GridError(f"axis {k} lattice does not contain the origin")
        return int(jr) % self.n[k]

    def same_as(self, other: "Grid", rtol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and np.allclose(self.spacing, other.spacing, rtol=rtol, atol=0)
            and np.allclose(self.origin, other.origin, rtol=rtol, atol=1e-12)
        )

    def index_to_coords(self, flat_index: int) -> tuple[float, ...]:
        idx = np.unravel_index(flat_index, self.n)
        return tuple(self.origin[k] + idx[k] * self.spacing[k] for k in range(4))

    def coords_to_index(self, coords: Sequence[float]) -> int:
        idx = []
        for k in range(4):
            j = (coords[k] - self.origin[k]) / self.spacing[k]
            jr = int(round(j))
            if abs(j - jr) > 1e-9 or not 0 <= jr < self.n[k]:
                raise GridError(f"coordinate {coords[k]} is not on axis {k}")
            idx.append(jr)
        return int(np.ravel_multi_index(idx, self.n))

    def shifted(self, offset: Sequence[float]):
        return type(self)(self.n, self.spacing, tuple(o + d for o, d in zip(self.origin, offset)))

    def rescaled(self, factors: Sequence[float]):
        return type(self)(
            self.n,
            tuple(s * f for s, f in zip(self.spacing, factors)),
            tuple(o * f for o, f in zip(self.origin, factors)),
        )


class SpaceTimeGrid(Grid):
    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "kind", 0)


class FrequencyGrid(Grid):
    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "kind", 1)


def conjugate_grid(g: Grid, b: float, b_t: float = 1.0) -> FrequencyGrid:
    """Centred frequency lattice on which the chirped transform is a DFT.

    Temporal samples are ``2 pi |b_t| m / (N_t dt)`` and spatial samples
    ``2 pi |b| m / (N_k dx_k)`` with ``m = -N//2, ...``.
    """
    if b == 0 or b_t == 0:
        raise GridError("conjugate grid needs b != 0 (use the b = 0 branch instead)")
    scale = (abs(b_t), abs(b), abs(b), abs(b))
    spacing = tuple(2 * math.pi * s / (n * d) for s, n, d in zip(scale, g.n, g.spacing))
    return FrequencyGrid.centered(g.n, spacing)


def space_grid_for(wg: Grid, b: float, b_t: float = 1.0) -> SpaceTimeGrid:
    """Centred space-time lattice whose conjugate grid is ``wg``."""
    if b == 0 or b_t == 0:
        raise GridError("b must be nonzero")
    scale = (abs(b_t), abs(b), abs(b), abs(b))
    spacing = tuple(2 * math.pi * s / (n * d) for s, n, d in zip(scale, wg.n, wg.spacing))
    return SpaceTimeGrid.centered(wg.n, spacing)


@dataclass(frozen=True, eq=False)
class Field:
    """A multivector-valued field on a grid; ``data`` has shape ``grid.n + (16,)``."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape != self.grid.shape:
            raise GridError(f"data shape {data.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "data", data)

    def with_data(self, data: np.ndarray):
        return type(self)(self.grid, data)

    def __add__(self, other: "Field"):
        _check_same(self, other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "Field"):
        _check_same(self, other)
        return self.with_data(self.data - other.data)

    def __mul__(self, s: float):
        return self.with_data(self.data * float(s))

    __rmul__ = __mul__

    def left_mul(self, m) -> "Field":
        return self.with_data(ga.gp(np.asarray(m, dtype=float), self.data))

    def right_mul(self, m) -> "Field":
        return self.with_data(ga.gp(self.data, np.asarray(m, dtype=float)))

    def l2_norm(self) -> float:
        return math.sqrt(float(np.sum(self.data**2)) * self.grid.cell_volume)

    def split(self):
        p, m = ga.split(self.data)
        return self.with_data(p), self.with_data(m)


class SpaceTimeSignal(Field):
    pass


class Spectrum(Field):
    pass


def _check_same(a: Field, b: Field) -> None:
    if not a.grid.same_as(b.grid):
        raise GridError("fields live on different grids")


def relative_l2(x: Field | np.ndarray, ref: Field | np.ndarray) -> float:
    """``||x - ref|| / ||ref||`` over all coefficients (0 when both vanish)."""
    xa = x.data if isinstance(x, Field) else np.asarray(x)
    ra = ref.data if isinstance(ref, Field) else np.asarray(ref)
    den = np.linalg.norm(ra)
    num = np.linalg.norm(xa - ra)
    if den == 0:
        return float(num)
    return float(num / den)


def gaussian_packet(
    g: Grid,
    center: Sequence[float] = (0, 0, 0, 0),
    width: Sequence[float] | float = 1.0,
    blade_amplitude=ga.ONE,
    temporal_freq: float = 0.0,
    spatial_freq: Sequence[float] = (0.0, 0.0, 0.0),
) -> SpaceTimeSignal:
    """``e^{e_t nu_t t} A exp(-sum((x_k - c_k)/s_k)^2) e^{i_3 nu.x}`` sampled on ``g``.

    Warns with :class:`ContainmentWarning` when the envelope at the lattice
    boundary exceeds 1e-8 of its peak.
    """
    if np.isscalar(width):
        width = (float(width),) * 4
    width = _tuple4(width, "width")
    center = _tuple4(center, "center")
    if any(w <= 0 for w in width):
        raise GridError("gaussian widths must be positive")
    amp = np.asarray(blade_amplitude, dtype=float)

    edge = 0.0
    for k in range(4):
        ax = g.axis(k)
        lo = ((ax[0] - center[k]) / width[k]) ** 2
        hi = ((ax[-1] - center[k]) / width[k]) ** 2
        edge = max(edge, math.exp(-min(lo, hi)))
    if edge > 1e-8:
        warnings.warn(
            f"gaussian packet is not contained: boundary/peak = {edge:.3g}",
            ContainmentWarning,
            stacklevel=2,
        )

    t, x1, x2, x3 = g.mesh()
    env = np.exp(
        -((t - center[0]) / width[0]) ** 2
        - ((x1 - center[1]) / width[1]) ** 2
        - ((x2 - center[2]) / width[2]) ** 2
        - ((x3 - center[3]) / width[3]) ** 2
    )
    left = ga.blade_exp(ga.E_T, temporal_freq * t)
    phase = spatial_freq[0] * x1 + spatial_freq[1] * x2 + spatial_freq[2] * x3
    right = ga.blade_exp(ga.I3, phase)
    data = ga.gp(ga.gp(left, amp), right) * env[..., None]
    return SpaceTimeSignal(g, np.broadcast_to(data, g.shape).copy())


def gaussian_norm_sq(width: Sequence[float], amplitude_norm: float = 1.0) -> float:
    """Closed-form ``||f||^2`` of :func:`gaussian_packet` on the whole line."""
    return amplitude_norm**2 * float(np.prod([w * math.sqrt(math.pi / 2) for w in width]))


def delta(g: Grid, blade_amplitude=ga.ONE) -> SpaceTimeSignal:
    """Discrete delta at coordinate 0: ``A / cell_volume`` at the zero index."""
    data = np.zeros(g.shape)
    idx = tuple(g.zero_index(k) for k in range(4))
    data[idx] = np.asarray(blade_amplitude, dtype=float) / g.cell_volume
    return SpaceTimeSignal(g, data)


def random_signal(g: Grid, rng: np.random.Generator) -> SpaceTimeSignal:
    return SpaceTimeSignal(g, ga.random_multivectors(rng, g.n))


def discrete_inner_product(f: Field, g: Field) -> np.ndarray:
    """``sum f[j] rev(g[j]) * cell_volume``; its scalar part is the L2 pairing."""
    _check_same(f, g)
    return ga.gp(f.data, ga.reverse(g.data)).sum(axis=(0, 1, 2, 3)) * f.grid.cell_volume


def scalar_product(f: Field, g: Field) -> float:
    """The real L2 pairing ``Tr <f, g>`` (computed without forming products)."""
    _check_same(f, g)
    return float(np.sum(f.data * g.data) * f.grid.cell_volume)


def scale_argument(g: SpaceTimeSignal, b: float, spatial_only: bool = True) -> SpaceTimeSignal:
    """``x -> g(x / b)``: the same samples on a lattice stretched by ``b``.

    With ``spatial_only`` the temporal axis is left untouched. Only ``b > 0``.
    """
    if b <= 0:
        raise GridError("argument scaling needs b > 0")
    factors = (1.0 if spatial_only else b, b, b, b)
    return SpaceTimeSignal(g.grid.rescaled(factors), g.data)
