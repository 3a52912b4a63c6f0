"""SFT, fractional SFT, LCST and two-sided LCST with their inverses.

Every transform is a sum ``sum_x KL(w_t, t) f(x) KR(x, w)`` with a left
kernel ``exp(e_t * theta)`` and a right kernel ``exp(i_3 * phi)`` whose
phases are quadratic forms

    theta = (p t^2 + q w_t^2 - 2 t w_t) / (2 beta)

per axis (``phi`` is the sum of the three spatial ones). Two evaluation paths
are provided:

``direct``
    separable quadrature with explicit multivector products, valid on any
    output lattice;
``fast``
    split ``f = f_+ + f_-``, fold the left exponential into a right one,
    and run chirp / FFT / chirp on eight i_3-complex channels. Requires the
    output lattice to be the conjugate lattice of the input.
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import pyfftw

from . import _kernels
from . import algebra as ga
from .grid import (
    FrequencyGrid,
    Grid,
    GridError,
    SpaceTimeGrid,
    SpaceTimeSignal,
    Spectrum,
    conjugate_grid,
    space_grid_for,
)

Path = Literal["direct", "fast"]
TWO_PI = 2 * math.pi


class TransformError(ValueError):
    pass


class UnsupportedError(TransformError):
    """Requested branch is outside what is implemented (e.g. b = 0 fast path)."""


class OffLatticeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LcParams:
    """Parameter matrix ``(a, b; c, d)`` with ``ad - bc = 1``."""

    a: float
    b: float
    c: float
    d: float
    tol: float = 1e-12

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        if abs(self.det - 1.0) > self.tol:
            raise TransformError(
                f"ad - bc = {self.det!r} (defect {self.det - 1:.3g}) must equal 1"
            )

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    @classmethod
    def fourier(cls) -> "LcParams":
        return cls(0.0, 1.0, -1.0, 0.0)

    @classmethod
    def rotation(cls, alpha: float) -> "LcParams":
        return cls(math.cos(alpha), math.sin(alpha), -math.sin(alpha), math.cos(alpha))


@dataclass(frozen=True)
class TwoSidedParams:
    m1: LcParams
    m2: LcParams

    def as_tuple(self) -> tuple[float, ...]:
        return self.m1.as_tuple() + self.m2.as_tuple()


@dataclass(frozen=True)
class FrParams:
    alpha: float

    def __post_init__(self):
        if not math.sin(self.alpha) > 0:
            raise TransformError(f"fractional angle needs sin(alpha) > 0, got alpha={self.alpha}")


@dataclass(frozen=True)
class _AxisKernel:
    """Phase ``(p x^2 + q w^2 - 2 x w) / (2 beta)``; x is the space-time variable."""

    p: float
    q: float
    beta: float

    def phase(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        return (self.p * x**2 + self.q * w**2 - 2 * x * w) / (2 * self.beta)


_FOURIER_AXIS = _AxisKernel(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class _Plan:
    temporal: _AxisKernel
    spatial: _AxisKernel
    scale: float
    phase0: float = 0.0


def _contract(m: np.ndarray, data: np.ndarray, axis: int) -> np.ndarray:
    """``out[.., i, ..] = sum_j m[i, j] data[.., j, ..]`` along ``axis``."""
    return np.moveaxis(np.tensordot(m, data, axes=([1], [axis])), 0, axis)


def _phase_matrix(kern: _AxisKernel, in_ax: np.ndarray, out_ax: np.ndarray, forward: bool):
    if forward:
        return kern.phase(in_ax[None, :], out_ax[:, None])
    return kern.phase(out_ax[:, None], in_ax[None, :])


def _direct(data, in_grid: Grid, out_grid: Grid, plan: _Plan, forward: bool) -> np.ndarray:
    s = 1.0 if forward else -1.0
    th = s * _phase_matrix(plan.temporal, in_grid.axis(0), out_grid.axis(0), forward)
    et_data = data @ ga.LEFT_ET.T
    out = _contract(np.cos(th), data, 0) + _contract(np.sin(th), et_data, 0)
    for k in (1, 2, 3):
        ph = s * _phase_matrix(plan.spatial, in_grid.axis(k), out_grid.axis(k), forward)
        out = _contract(np.cos(ph), out, k) + _contract(np.sin(ph), out @ ga.RIGHT_I3.T, k)
    if plan.phase0:
        out = ga.gp(out, ga.blade_exp(ga.I3, s * plan.phase0))
    return out * (plan.scale * in_grid.cell_volume)


def _check_conjugate(in_grid: Grid, out_grid: Grid, betas) -> None:
    if in_grid.n != out_grid.n:
        raise GridError("fast path needs input and output lattices of equal size")
    for k in range(4):
        prod = in_grid.spacing[k] * out_grid.spacing[k] * in_grid.n[k]
        if not math.isclose(prod, TWO_PI * abs(betas[k]), rel_tol=1e-9):
            raise GridError(
                f"axis {k}: output lattice is not the conjugate lattice (fast path only)"
            )


def _axis_factors(kern: _AxisKernel, in_ax, out_ax, gamma: float, forward: bool):
    """Pre/post vectors turning ``sum_j z_j exp(1j gamma phase(u_j, v_m))`` into an FFT.

    Returns ``(pre, post, reversed)``; ``reversed`` marks that the plain FFT
    output must be read at index ``-m`` (kernel sign opposite to the FFT's).
    """
    n = len(in_ax)
    beta = kern.beta
    p_in, p_out = (kern.p, kern.q) if forward else (kern.q, kern.p)
    u0, v0 = in_ax[0], out_ax[0]
    du = in_ax[1] - in_ax[0] if n > 1 else 1.0
    j = np.arange(n)
    pre = np.exp(1j * gamma * (p_in * in_ax**2 / 2 - j * du * v0) / beta)
    post = np.exp(1j * gamma * (p_out * out_ax**2 / 2 - u0 * out_ax) / beta)
    return pre, post, gamma * beta < 0


def _decode_matrix() -> np.ndarray:
    """Complex (8, 16): blades ``= (channels @ D).real``."""
    to_real = np.zeros((8, 16), dtype=complex)
    to_real[np.arange(8), ga.PAIR_FIRST] = 1.0
    to_real[np.arange(8), ga.PAIR_SECOND] = -1j * ga.PAIR_SIGN
    return ga.SPLIT_DECODE @ to_real


_BLADES, *_CODEC = _kernels.pair_tables(ga.SPLIT_ENCODE, _decode_matrix())
_ENC, _DEC = _CODEC[:2], _CODEC[2:]
_PLANS = threading.local()


def _fft_plan(n: tuple[int, ...], backward: bool) -> tuple[pyfftw.FFTW, np.ndarray]:
    """Per-thread cached unnormalised in-place FFT over the four lattice axes.

    Returns the plan and its contiguous padded buffer. Spatial rows are padded by one sample so power-of-two sizes do not map
    every stride onto the same cache sets.
    """
    cache = _PLANS.__dict__.setdefault("plans", {})
    key = (n, backward)
    if key not in cache:
        padded = (n[0], n[1] + 1, n[2] + 1, n[3] + 1, 2, 4)
        base = pyfftw.empty_aligned(padded, dtype=complex)
        buf = base[:, : n[1], : n[2], : n[3]]
        direction = "FFTW_BACKWARD" if backward else "FFTW_FORWARD"
        plan = pyfftw.FFTW(buf, buf, axes=(0, 1, 2, 3), direction=direction, flags=("FFTW_MEASURE",))
        cache[key] = (plan, base)
    return cache[key]


def _fast(data, in_grid: Grid, out_grid: Grid, plan: _Plan, forward: bool) -> np.ndarray:
    betas = (plan.temporal.beta,) + (plan.spatial.beta,) * 3
    _check_conjugate(in_grid, out_grid, betas)
    s = 1.0 if forward else -1.0
    n = in_grid.n
    pre_x, post_x, rev_x = [], [], False
    for k in (1, 2, 3):
        pre, post, rev_x = _axis_factors(plan.spatial, in_grid.axis(k), out_grid.axis(k), s, forward)
        pre_x.append(pre)
        post_x.append(post)
    const = plan.scale * in_grid.cell_volume * np.exp(1j * s * plan.phase0)
    pre_t, post_t, t_src = [], [], []
    m = np.arange(n[0])
    # the left e_t exponential acts as exp(-1j eps alpha) on f_eps
    for eps in (1, -1):
        pre, post, rev = _axis_factors(plan.temporal, in_grid.axis(0), out_grid.axis(0), -eps * s, forward)
        pre_t.append(pre)
        post_t.append(post * const)
        # the FFT direction follows the spatial axes; a differing temporal sign reads index -m
        t_src.append((-m) % n[0] if rev != rev_x else m)
    fft, buf = _fft_plan(n, backward=rev_x)
    data = np.ascontiguousarray(data, dtype=float)
    _kernels.encode_chirp(data, _BLADES, *_ENC, np.array(pre_t), *pre_x, buf)
    fft.execute()
    out = np.empty(n + (16,))
    _kernels.chirp_decode(buf, np.array(t_src), _BLADES, *_DEC, np.array(post_t), *post_x, out)
    return out


def _run(data, in_grid, out_grid, plan, forward, path: Path) -> np.ndarray:
    if path == "direct":
        return _direct(data, in_grid, out_grid, plan, forward)
    if path == "fast":
        return _fast(data, in_grid, out_grid, plan, forward)
    raise TransformError(f"unknown path {path!r}")


# ---------------------------------------------------------------- plans

def sft_plan() -> _Plan:
    return _Plan(_FOURIER_AXIS, _FOURIER_AXIS, 1.0)


def lcst_plan(A: LcParams) -> _Plan:
    if A.b == 0:
        raise UnsupportedError("b = 0 has no integral kernel; use the degenerate branch")
    return _Plan(_FOURIER_AXIS, _AxisKernel(A.a, A.d, A.b), abs(TWO_PI * A.b) ** -1.5)


def frsft_plan(p: FrParams) -> _Plan:
    s, c = math.sin(p.alpha), math.cos(p.alpha)
    return _Plan(_FOURIER_AXIS, _AxisKernel(c, c, s), s**-1.5, (2 * p.alpha - math.pi) / 4)


def two_sided_plan(P: TwoSidedParams, constants: str = "corrected") -> _Plan:
    m1, m2 = P.m1, P.m2
    if m1.b == 0 or m2.b == 0:
        raise UnsupportedError("two-sided transform needs B1 != 0 and B2 != 0")
    spatial_power = {"corrected": -1.5, "verbatim": -0.5}[constants]
    scale = abs(TWO_PI * m1.b) ** -0.5 * abs(TWO_PI * m2.b) ** spatial_power
    return _Plan(_AxisKernel(m1.a, m1.d, m1.b), _AxisKernel(m2.a, m2.d, m2.b), scale)


# ---------------------------------------------------------------- SFT

def sft(f: SpaceTimeSignal, wg: Grid | None = None, path: Path = "fast") -> Spectrum:
    """Space-time Fourier transform; defaults to the conjugate lattice."""
    wg = conjugate_grid(f.grid, 1.0) if wg is None else wg
    data = _run(f.data, f.grid, wg, sft_plan(), True, path)
    return Spectrum(FrequencyGrid(wg.n, wg.spacing, wg.origin), data)


def isft(F: Spectrum, xg: Grid | None = None, path: Path = "fast") -> SpaceTimeSignal:
    xg = space_grid_for(F.grid, 1.0) if xg is None else xg
    plan = _Plan(_FOURIER_AXIS, _FOURIER_AXIS, TWO_PI**-4)
    return SpaceTimeSignal(_as_space(xg), _run(F.data, F.grid, xg, plan, False, path))


def _as_space(g: Grid) -> SpaceTimeGrid:
    return SpaceTimeGrid(g.n, g.spacing, g.origin)


def _as_freq(g: Grid) -> FrequencyGrid:
    return FrequencyGrid(g.n, g.spacing, g.origin)


# ---------------------------------------------------------------- FrSFT

def frsft(f: SpaceTimeSignal, p: FrParams, wg: Grid | None = None, path: Path = "fast") -> Spectrum:
    wg = conjugate_grid(f.grid, math.sin(p.alpha)) if wg is None else wg
    return Spectrum(_as_freq(wg), _run(f.data, f.grid, wg, frsft_plan(p), True, path))


def ifrsft(
    F: Spectrum,
    p: FrParams,
    xg: Grid | None = None,
    path: Path = "fast",
    mode: str = "verbatim",
) -> SpaceTimeSignal:
    """Inverse fractional SFT.

    ``mode="verbatim"`` applies the extra ``csc(alpha)^{3/2} / (2 pi)^4``
    prefactor in front of the conjugate kernel, so a round trip returns
    ``csc(alpha)^{3/2} f``; ``mode="unitary"`` drops the extra
    ``csc(alpha)^{3/2}`` and inverts exactly.
    """
    xg = space_grid_for(F.grid, math.sin(p.alpha)) if xg is None else xg
    fw = frsft_plan(p)
    csc = 1 / math.sin(p.alpha)
    pre = {"verbatim": csc**1.5, "unitary": 1.0}[mode] / TWO_PI**4
    plan = _Plan(fw.temporal, fw.spatial, fw.scale * pre, fw.phase0)
    return SpaceTimeSignal(_as_space(xg), _run(F.data, F.grid, xg, plan, False, path))


def frsft_roundtrip_constant(p: FrParams, mode: str = "verbatim") -> float:
    """Predicted factor ``ifrsft(frsft(f)) / f``."""
    return (1 / math.sin(p.alpha)) ** 1.5 if mode == "verbatim" else 1.0


# ---------------------------------------------------------------- LCST

def lcst(
    f: SpaceTimeSignal, A: LcParams, wg: Grid | None = None, path: Path = "direct"
) -> Spectrum:
    """Linear canonical space-time transform.

    For ``b != 0`` the output lattice defaults to ``conjugate_grid(f.grid, b)``.
    For ``b == 0`` the transform is the pointwise map
    ``w -> SFT_t[f](w_t, d w) sqrt(d) exp(i_3 c d |w|^2 / 2)``.
    """
    if A.b == 0:
        return _lcst_degenerate(f, A, wg)
    wg = conjugate_grid(f.grid, A.b) if wg is None else wg
    return Spectrum(_as_freq(wg), _run(f.data, f.grid, wg, lcst_plan(A), True, path))


def lcst_fast(f: SpaceTimeSignal, A: LcParams) -> Spectrum:
    if A.b == 0:
        raise UnsupportedError("the fast path needs b != 0 (b = 0 is a pointwise map)")
    return lcst(f, A, path="fast")


def ilcst(F: Spectrum, A: LcParams, xg: Grid | None = None, path: Path = "direct") -> SpaceTimeSignal:
    if A.b == 0:
        raise UnsupportedError("inverse of the b = 0 branch is not implemented")
    xg = space_grid_for(F.grid, A.b) if xg is None else xg
    fw = lcst_plan(A)
    plan = _Plan(fw.temporal, fw.spatial, fw.scale / TWO_PI)
    return SpaceTimeSignal(_as_space(xg), _run(F.data, F.grid, xg, plan, False, path))


def _lcst_degenerate(f: SpaceTimeSignal, A: LcParams, wg: Grid | None) -> Spectrum:
    if A.d <= 0:
        raise TransformError("b = 0 branch needs d > 0 for sqrt(d)")
    g = f.grid
    if wg is None:
        base = conjugate_grid(g, 1.0)
        wg = FrequencyGrid(
            g.n,
            (base.spacing[0],) + tuple(s / A.d for s in g.spacing[1:]),
            (base.origin[0],) + tuple(o / A.d for o in g.origin[1:]),
        )
    # temporal transform only
    th = -np.outer(wg.axis(0), g.axis(0))
    temporal = _contract(np.cos(th), f.data, 0) + _contract(np.sin(th), f.data @ ga.LEFT_ET.T, 0)
    temporal *= g.spacing[0]

    idx = []
    off = False
    for k in (1, 2, 3):
        pos = (A.d * wg.axis(k) - g.origin[k]) / g.spacing[k]
        near = np.rint(pos).astype(int)
        if np.any(np.abs(pos - near) > 1e-9) or np.any((near < 0) | (near >= g.n[k])):
            off = True
        idx.append(np.clip(near, 0, g.n[k] - 1))
        inside = (near >= 0) & (near < g.n[k])
        idx[-1] = np.where(inside, idx[-1], -1)
    if off:
        warnings.warn(
            "b = 0 branch: d*w is off the sampling lattice; nearest sample used, outside -> 0",
            OffLatticeWarning,
            stacklevel=3,
        )
    out = np.zeros(wg.shape)
    i1, i2, i3 = np.meshgrid(*idx, indexing="ij")
    valid = (i1 >= 0) & (i2 >= 0) & (i3 >= 0)
    out[:, valid] = temporal[:, i1[valid], i2[valid], i3[valid]]
    _, w1, w2, w3 = wg.mesh()
    wsq = (w1**2 + w2**2 + w3**2)[0]
    chirp = ga.blade_exp(ga.I3, A.c * A.d * wsq / 2)
    out = ga.gp(out, chirp[None]) * math.sqrt(A.d)
    return Spectrum(_as_freq(wg), out)


# ---------------------------------------------------------------- two-sided

def two_sided_grid(g: Grid, P: TwoSidedParams) -> FrequencyGrid:
    return conjugate_grid(g, P.m2.b, P.m1.b)


def two_sided_lcst(
    f: SpaceTimeSignal,
    P: TwoSidedParams,
    wg: Grid | None = None,
    path: Path = "direct",
    constants: str = "corrected",
) -> Spectrum:
    """Two-sided LCST with linear canonical kernels on both sides.

    ``constants="corrected"`` uses ``(2 pi B2)^{-3/2}`` on the 3-D spatial
    kernel; ``"verbatim"`` uses ``(2 pi B2)^{-1/2}``.
    """
    plan = two_sided_plan(P, constants)
    wg = two_sided_grid(f.grid, P) if wg is None else wg
    return Spectrum(_as_freq(wg), _run(f.data, f.grid, wg, plan, True, path))


def two_sided_lcst_fast(f: SpaceTimeSignal, P: TwoSidedParams, constants: str = "corrected") -> Spectrum:
    return two_sided_lcst(f, P, path="fast", constants=constants)


def two_sided_ilcst(
    F: Spectrum,
    P: TwoSidedParams,
    xg: Grid | None = None,
    path: Path = "direct",
    constants: str = "corrected",
) -> SpaceTimeSignal:
    plan = two_sided_plan(P, constants)
    xg = space_grid_for(F.grid, P.m2.b, P.m1.b) if xg is None else xg
    return SpaceTimeSignal(_as_space(xg), _run(F.data, F.grid, xg, plan, False, path))


def two_sided_verbatim_defect(P: TwoSidedParams) -> float:
    """Round-trip factor produced by the ``(2 pi B2)^{-1/2}`` spatial constant."""
    return abs(TWO_PI * P.m2.b) ** 2


# ---------------------------------------------------------------- dispatch

TRANSFORM_KINDS = ("sft", "frsft", "lcst", "lcst2")


def forward(kind: str, f: SpaceTimeSignal, params=None, path: Path = "fast", constants="corrected") -> Spectrum:
    if kind == "sft":
        return sft(f, path=path)
    if kind == "frsft":
        return frsft(f, params, path=path)
    if kind == "lcst":
        if params.b == 0 and path == "fast":
            raise UnsupportedError("b = 0: the transform is a pointwise map; use --path direct")
        return lcst(f, params, path=path)
    if kind == "lcst2":
        return two_sided_lcst(f, params, path=path, constants=constants)
    raise TransformError(f"unknown transform kind {kind!r}")


def inverse(kind: str, F: Spectrum, params=None, xg=None, path: Path = "fast", constants="corrected", mode="verbatim") -> SpaceTimeSignal:
    if kind == "sft":
        return isft(F, xg, path=path)
    if kind == "frsft":
        return ifrsft(F, params, xg, path=path, mode=mode)
    if kind == "lcst":
        return ilcst(F, params, xg, path=path)
    if kind == "lcst2":
        return two_sided_ilcst(F, params, xg, path=path, constants=constants)
    raise TransformError(f"unknown transform kind {kind!r}")
