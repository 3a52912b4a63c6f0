"""Convolutions on the sampling torus.

``convolve_standard``   circular ``(a * b)(x) = sum_y a(y) b(x - y) dV``
``mustard_convolve``    inverse SFT of the pointwise spectral product
``mustard_as_eight``    the same operator written as eight standard convolutions
``odot``                chirp-dressed Mustard convolution (LCST x SFT theorem)
``otimes``              chirp-dressed spectral convolution (product theorem)
``star_n``              two-sided LCST convolution ``L^-1[lambda L[f] L[g]]``
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra as ga
from .grid import Field, Grid, GridError, SpaceTimeSignal, Spectrum, scalar_product
from .transforms import (
    LcParams,
    TwoSidedParams,
    UnsupportedError,
    isft,
    lcst,
    sft,
    two_sided_grid,
    two_sided_ilcst,
    two_sided_lcst,
    two_sided_plan,
)

TWO_PI = 2 * math.pi
DIRECT_MAX_SAMPLES = 4**4


@dataclass(frozen=True)
class ReflectionIndex:
    phi1: int = 0
    phi2: int = 0

    def __post_init__(self):
        if self.phi1 not in (0, 1) or self.phi2 not in (0, 1):
            raise ValueError("reflection flags must be 0 or 1")


def _same_grid(a: Field, b: Field) -> None:
    if not a.grid.same_as(b.grid):
        raise GridError("operands live on different grids")


def reflect(f: Field, r: ReflectionIndex | tuple[int, int]) -> Field:
    """``f((-1)^phi1 t, (-1)^phi2 x)`` by index reversal about coordinate 0 (mod N)."""
    if not isinstance(r, ReflectionIndex):
        r = ReflectionIndex(*r)
    data = f.data
    axes = ([0] if r.phi1 else []) + ([1, 2, 3] if r.phi2 else [])
    for k in axes:
        n = f.grid.n[k]
        z = f.grid.zero_index(k)
        data = np.take(data, (2 * z - np.arange(n)) % n, axis=k)
    return f.with_data(data)


def convolve_standard(a: Field, b: Field) -> Field:
    """Circular convolution; ``a`` multiplies from the left."""
    _same_grid(a, b)
    axes = (0, 1, 2, 3)
    fa = np.fft.fftn(a.data, axes=axes)
    fb = np.fft.fftn(b.data, axes=axes)
    fc = np.einsum("...i,...j,ijk->...k", fa, fb, ga.CAYLEY, optimize=True)
    c = np.fft.ifftn(fc, axes=axes).real
    # index arithmetic -> coordinate arithmetic
    shift = tuple(-a.grid.zero_index(k) for k in axes)
    c = np.roll(c, shift, axis=axes)
    return a.with_data(c * a.grid.cell_volume)


def mustard_convolve(a: SpaceTimeSignal, b: SpaceTimeSignal) -> SpaceTimeSignal:
    _same_grid(a, b)
    fa, fb = sft(a), sft(b)
    prod = fa.with_data(ga.gp(fa.data, fb.data))
    return isft(prod, a.grid)


# (part of a, part of b, reflection of b, reflect result spatially, output part)
EIGHT_TERMS = (
    (+1, +1, (0, 0), False, +1),
    (+1, +1, (1, 1), True, -1),
    (+1, -1, (1, 0), False, +1),
    (+1, -1, (0, 1), True, -1),
    (-1, +1, (0, 1), True, +1),
    (-1, +1, (1, 0), False, -1),
    (-1, -1, (1, 1), True, +1),
    (-1, -1, (0, 0), False, -1),
)


def mustard_as_eight(a: Field, b: Field, output_reflection: bool = True) -> Field:
    """Eight standard convolutions of split parts.

    The trailing ``(t, -x)`` on four of the terms is read as evaluating the
    convolution at the spatially reflected point (``output_reflection=True``).
    The alternative reading folds it into an extra spatial reflection of the
    second operand before convolving.
    """
    _same_grid(a, b)
    a_parts = dict(zip((1, -1), a.split()))
    b_parts = dict(zip((1, -1), b.split()))
    total = np.zeros(a.data.shape)
    for pa, pb, refl, out_refl, pr in EIGHT_TERMS:
        if out_refl and not output_reflection:
            refl = (refl[0], 1 - refl[1])
        conv = convolve_standard(a_parts[pa], reflect(b_parts[pb], refl))
        if out_refl and output_reflection:
            conv = reflect(conv, (0, 1))
        total += ga.split_part(conv.data, pr)
    return a.with_data(total)


def _spatial_chirp(g: Grid, coeff: float) -> np.ndarray:
    """``exp(i_3 coeff |x|^2)`` on the spatial axes, broadcastable over t."""
    _, x1, x2, x3 = g.mesh()
    return ga.blade_exp(ga.I3, coeff * (x1**2 + x2**2 + x3**2))


def odot(
    f: SpaceTimeSignal,
    g: SpaceTimeSignal,
    A: LcParams,
    chirp_side: str = "right",
    chirp_sign: int = -1,
) -> SpaceTimeSignal:
    """``h = (f e^{i_3 a|x|^2/2b} *_M g)`` dressed with an outer chirp.

    The outer chirp is ``exp(chirp_sign * i_3 a |x|^2 / 2b)`` multiplied from
    ``chirp_side``. The default (right, -1) is the combination for which
    ``L_A[h](w) = L_A[f](w) SFT[g](w_t, w/b)`` holds.
    """
    if A.b == 0:
        raise UnsupportedError("odot needs b != 0")
    _same_grid(f, g)
    inner = _spatial_chirp(f.grid, A.a / (2 * A.b))
    ftil = f.with_data(ga.gp(f.data, inner))
    m = mustard_convolve(ftil, g)
    outer = _spatial_chirp(f.grid, chirp_sign * A.a / (2 * A.b))
    if chirp_side == "right":
        return m.with_data(ga.gp(m.data, outer))
    if chirp_side == "left":
        return m.with_data(ga.gp(outer, m.data))
    raise ValueError(f"chirp_side must be 'left' or 'right', got {chirp_side!r}")


def otimes(u: Spectrum, v: Spectrum, A: LcParams) -> Spectrum:
    """``(u (x) v)(w) = [u e^{-i_3 d|y|^2/2b} * v](w) e^{i_3 d|w|^2/2b}`` over the frequency torus."""
    if A.b == 0:
        raise UnsupportedError("otimes needs b != 0")
    _same_grid(u, v)
    coeff = A.d / (2 * A.b)
    uhat = u.with_data(ga.gp(u.data, _spatial_chirp(u.grid, -coeff)))
    conv = convolve_standard(uhat, v)
    return conv.with_data(ga.gp(conv.data, _spatial_chirp(u.grid, coeff)))


# ---------------------------------------------------------------- two-sided

def printed_lambda_prefactor(P: TwoSidedParams) -> float:
    return TWO_PI**2 * abs(P.m1.b) ** 0.5 * abs(P.m2.b) ** 3.5


@dataclass(frozen=True)
class LambdaWeight:
    """``prefactor * exp(e_t (D1 w_t^2 / 2B1 + D2 |w|^2 / 2B2))``."""

    params: TwoSidedParams
    prefactor: float

    def phase(self, wg: Grid) -> np.ndarray:
        m1, m2 = self.params.m1, self.params.m2
        wt, w1, w2, w3 = wg.mesh()
        return m1.d * wt**2 / (2 * m1.b) + m2.d * (w1**2 + w2**2 + w3**2) / (2 * m2.b)

    def __call__(self, wg: Grid) -> np.ndarray:
        return self.prefactor * ga.blade_exp(ga.E_T, self.phase(wg))


def lambda_weight(P: TwoSidedParams, prefactor: float | None = None) -> LambdaWeight:
    """Weight of the two-sided convolution theorem; |B| is used in the real roots."""
    if P.m1.b == 0 or P.m2.b == 0:
        raise UnsupportedError("lambda weight needs B1 B2 != 0")
    pre = printed_lambda_prefactor(P) if prefactor is None else float(prefactor)
    return LambdaWeight(P, pre)


def star_n(
    f: SpaceTimeSignal,
    g: SpaceTimeSignal,
    P: TwoSidedParams,
    prefactor: float | None = None,
    constants: str = "corrected",
) -> SpaceTimeSignal:
    """Spectral form ``L^-1[lambda(w) L[f](w) L[g](w)]``."""
    _same_grid(f, g)
    lf = two_sided_lcst(f, P, path="fast", constants=constants)
    lg = two_sided_lcst(g, P, path="fast", constants=constants)
    lam = lambda_weight(P, prefactor)(lf.grid)
    prod = lf.with_data(ga.gp(ga.gp(lam, lf.data), lg.data))
    return two_sided_ilcst(prod, P, f.grid, path="fast", constants=constants)


def star_n_direct(
    f: SpaceTimeSignal,
    g: SpaceTimeSignal,
    P: TwoSidedParams,
    prefactor: float | None = None,
    constants: str = "corrected",
) -> SpaceTimeSignal:
    """Brute-force triple Riemann sum of the defining integral (tiny grids only).

    ``g(z)`` sits between ``K_{e_t}(w_t, t'')`` and ``K_{i_3}(z, w)``; kernels
    are evaluated pointwise on the full 4-D lattices, with no separation
    of variables and no FFT.
    """
    _same_grid(f, g)
    grid = f.grid
    if grid.size > DIRECT_MAX_SAMPLES:
        raise ValueError(
            f"star_n_direct costs O(N^2) dense multivector products per pair; "
            f"refusing {grid.size} samples (limit {DIRECT_MAX_SAMPLES}, i.e. 4^4)"
        )
    plan = two_sided_plan(P, constants)
    m1, m2 = P.m1, P.m2
    c1 = abs(TWO_PI * m1.b) ** -0.5
    c2 = plan.scale / c1
    wg = two_sided_grid(grid, P)

    x = [a.ravel() for a in np.meshgrid(*grid.axes(), indexing="ij")]
    w = [a.ravel() for a in np.meshgrid(*wg.axes(), indexing="ij")]
    t, wt = x[0][None, :], w[0][:, None]
    theta = (m1.a * t**2 + m1.d * wt**2 - 2 * t * wt) / (2 * m1.b)
    xsq = sum(xi**2 for xi in x[1:])[None, :]
    wsq = sum(wi**2 for wi in w[1:])[:, None]
    xw = sum(xi[None, :] * wi[:, None] for xi, wi in zip(x[1:], w[1:]))
    phi = (m2.a * xsq + m2.d * wsq - 2 * xw) / (2 * m2.b)

    k_et = c1 * ga.blade_exp(ga.E_T, theta)  # [w, x]
    k_i3 = c2 * ga.blade_exp(ga.I3, phi)
    k_met = c1 * ga.blade_exp(ga.E_T, -theta)
    k_mi3 = c2 * ga.blade_exp(ga.I3, -phi)

    fd = f.data.reshape(1, -1, 16)
    gd = g.data.reshape(1, -1, 16)
    dv = grid.cell_volume
    lf = ga.gp(ga.gp(k_et, fd), k_i3).sum(axis=1) * dv  # [w]
    lg = ga.gp(ga.gp(k_et, gd), k_i3).sum(axis=1) * dv
    lam = lambda_weight(P, prefactor)(wg).reshape(-1, 16)
    mid = ga.gp(ga.gp(lam, lf), lg)[:, None, :]  # [w, 1]
    out = ga.gp(ga.gp(k_met, mid), k_mi3).sum(axis=0) * wg.cell_volume
    return SpaceTimeSignal(grid, out.reshape(grid.shape))


def star_n_as_eight(f: SpaceTimeSignal, g: SpaceTimeSignal, P: TwoSidedParams) -> SpaceTimeSignal:
    """The eight-convolution expression (independent of the kernel parameters)."""
    return mustard_as_eight(f, g)


def fit_scalar(x: Field, ref: Field) -> tuple[float, float]:
    """Least-squares ``kappa`` with ``x ~ kappa * ref`` and the relative residual."""
    den = scalar_product(ref, ref)
    if den == 0:
        return 0.0, float(np.linalg.norm(x.data))
    kappa = scalar_product(x, ref) / den
    resid = np.linalg.norm(x.data - kappa * ref.data)
    scale = np.linalg.norm(x.data)
    return float(kappa), float(resid / scale) if scale else float(resid)


def lcst_of_product_rhs(f: SpaceTimeSignal, g: SpaceTimeSignal, A: LcParams) -> Spectrum:
    """``(2 pi)^-4 L_A[f] (x) SFT[g]`` with ``SFT[g]`` sampled on the LCST lattice.

    The matching left-hand side is ``L_A`` of ``f(t, x) g(t, x / b)``.
    The LCST lattice reaches ``b`` times the Nyquist band of ``f.grid``, so
    ``g`` should be sampled on a lattice refined by ``b``; sampling it on
    ``f.grid`` aliases the spectrum. ``scale_argument`` then maps those
    samples onto ``f.grid`` for the left-hand side.
    """
    u = lcst(f, A, path="fast")
    v = sft(g, wg=u.grid, path="direct")
    return otimes(u, v, A) * TWO_PI**-4
