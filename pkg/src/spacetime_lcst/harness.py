"""Executable identity suite.

Each check evaluates one identity numerically and returns
:class:`ResidualReport` objects. ``run_all`` aggregates them into a JSON
document whose exit status is nonzero only when some check has status
``"fail"``. In ``"verbatim"`` mode the checks with known-inconsistent printed
constants use the printed form, and a failure there is reported as
``"expected-deviation"``.
"""
from __future__ import annotations

import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from . import algebra as ga
from .convolution import (
    convolve_standard,
    fit_scalar,
    lcst_of_product_rhs,
    mustard_as_eight,
    mustard_convolve,
    odot,
    printed_lambda_prefactor,
    reflect,
    star_n,
    star_n_as_eight,
    star_n_direct,
)
from .grid import (
    ContainmentWarning,
    Field,
    Grid,
    SpaceTimeGrid,
    SpaceTimeSignal,
    Spectrum,
    conjugate_grid,
    gaussian_packet,
    random_signal,
    relative_l2,
    scalar_product,
    scale_argument,
)
from .transforms import (
    FrParams,
    LcParams,
    TwoSidedParams,
    frsft,
    ifrsft,
    ilcst,
    isft,
    lcst,
    sft,
    two_sided_ilcst,
    two_sided_lcst,
    two_sided_verbatim_defect,
)

TWO_PI = 2 * math.pi
MODES = ("corrected", "verbatim")
SUITES = ("algebra", "transforms", "convolutions", "all")

ALG_TOL = 1e-10
EXACT_TOL = 1e-12
QUAD_TOL = 1e-6
TORUS_TOL = 1e-8

LC_REF = (LcParams(1.0, 1.0, 0.0, 1.0), LcParams(2.0, 1.0, 1.0, 1.0))
TWO_SIDED_REF = TwoSidedParams(LcParams(1.0, 2.0, 0.0, 1.0), LcParams(2.0, 0.5, 2.0, 1.0))
# A = D = 0 on both axes: the eight-term form is proportional to the spectral one
TWO_SIDED_UNCHIRPED = TwoSidedParams(LcParams(0.0, 2.0, -0.5, 0.0), LcParams(0.0, 0.5, -2.0, 0.0))
FR_REF = (FrParams(math.pi / 3), FrParams(2 * math.pi / 3))


@dataclass
class ResidualReport:
    check_name: str
    anchor: str
    residual: float
    tolerance: float
    passed: bool
    status: str
    grid: dict | None = None
    params: dict | None = None
    fitted_constants: dict | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        if not math.isfinite(d["residual"]):
            d["residual"] = str(d["residual"])
        return d


def report(
    name: str,
    anchor: str,
    residual: float,
    tolerance: float,
    *,
    grid: Grid | None = None,
    params: dict | None = None,
    fitted: dict | None = None,
    notes: str = "",
    deviation: bool = False,
) -> ResidualReport:
    residual = float(residual)
    passed = bool(residual <= tolerance)
    if passed:
        status = "pass"
    else:
        status = "expected-deviation" if deviation else "fail"
    gd = None if grid is None else {"n": list(grid.n), "spacing": list(grid.spacing)}
    return ResidualReport(name, anchor, residual, tolerance, passed, status, gd, params, fitted, notes)


def _rng(seed: int, tag: str) -> np.random.Generator:
    return np.random.default_rng([seed, sum(ord(c) * (i + 1) for i, c in enumerate(tag))])


def _lc(A: LcParams) -> dict:
    return {"A": list(A.as_tuple())}


def _two(P: TwoSidedParams) -> dict:
    return {"M1": list(P.m1.as_tuple()), "M2": list(P.m2.as_tuple())}


def reference_grid(n: int = 8, extent: float = 6.0) -> SpaceTimeGrid:
    return SpaceTimeGrid.centered((n,) * 4, extent / n)


def probe(g: Grid, rng: np.random.Generator, width=None, modulated: bool = True) -> SpaceTimeSignal:
    """Contained Gaussian with a random unit blade amplitude and small modulations."""
    if width is None:
        width = tuple(g.extent(k) / 10 for k in range(4))
    center = tuple(rng.uniform(-0.5, 0.5) * s for s in g.spacing)
    nu_t = rng.uniform(-0.5, 0.5) if modulated else 0.0
    nu = tuple(rng.uniform(-0.5, 0.5, 3)) if modulated else (0.0, 0.0, 0.0)
    return gaussian_packet(g, center, width, ga.random_multivectors(rng, ()), nu_t, nu)


def _max_abs(x) -> float:
    return float(np.max(np.abs(x)))


def _rel(x, ref) -> float:
    den = float(np.max(np.abs(ref)))
    return _max_abs(np.asarray(x) - np.asarray(ref)) / (den if den else 1.0)


# ---------------------------------------------------------------- algebra

def check_algebra(seed: int = 0, mode: str = "corrected", samples: int = 1000) -> list[ResidualReport]:
    rng = _rng(seed, "algebra")
    h1, h2, h3 = (ga.random_multivectors(rng, samples) for _ in range(3))
    alpha = rng.uniform(-np.pi, np.pi, samples)
    beta = rng.uniform(-np.pi, np.pi, samples)
    e = [ga.basis(k) for k in ("e_t", "e_1", "e_2", "e_3")]
    out = []

    sq = [ga.gp(v, v) for v in e]
    expect = [-ga.ONE, ga.ONE, ga.ONE, ga.ONE]
    res = max(_max_abs(s - x) for s, x in zip(sq, expect))
    res = max(res, _max_abs(ga.gp(ga.I3, ga.I3) + ga.ONE), _max_abs(ga.gp(ga.I_ST, ga.I_ST) + ga.ONE))
    out.append(report("signature", "generator squares", res, 0.0,
                      notes="e_t^2=-1, e_k^2=+1, i_3^2=i_st^2=-1"))

    sigs = ga.admissible_signatures()
    out.append(report("signature_uniqueness", "pseudoscalar constraints", 0.0 if sigs == [(-1, 1)] else 1.0, 0.0,
                      fitted={"admissible": [list(s) for s in sigs]},
                      notes="enumerated (eps_t, eps_spatial) in {+-1}^2"))

    res = max(_max_abs(ga.gp(e[i], e[j]) + ga.gp(e[j], e[i])) for i in range(4) for j in range(4) if i != j)
    out.append(report("anticommutation", "generator anticommutation", res, 0.0))

    lhs = ga.gp(ga.gp(h1, h2), h3)
    rhs = ga.gp(h1, ga.gp(h2, h3))
    out.append(report("associativity", "geometric product", _rel(lhs, rhs), ALG_TOL))

    parts = sum(ga.grade(h1, k) for k in range(5))
    out.append(report("grade_partition", "grade decomposition", _max_abs(parts - h1), EXACT_TOL))

    p, m = ga.split(h1)
    pp, pm = ga.split(p)
    res = max(_max_abs(p + m - h1), _max_abs(pp - p), _max_abs(pm))
    out.append(report("split_projection", "split definition", res, EXACT_TOL))

    ea = ga.blade_exp(ga.E_T, alpha)
    ib = ga.blade_exp(ga.I3, beta)
    res_p = _max_abs(ga.gp(ga.gp(ea, p), ib) - ga.gp(p, ga.blade_exp(ga.I3, beta - alpha)))
    res_m = _max_abs(ga.gp(ga.gp(ea, m), ib) - ga.gp(m, ga.blade_exp(ga.I3, beta + alpha)))
    out.append(report("split_shift_right", "exponential shift (right form)", max(res_p, res_m), EXACT_TOL))
    res_p = _max_abs(ga.gp(ga.gp(ea, p), ib) - ga.gp(ga.blade_exp(ga.E_T, alpha - beta), p))
    res_m = _max_abs(ga.gp(ga.gp(ea, m), ib) - ga.gp(ga.blade_exp(ga.E_T, alpha + beta), m))
    out.append(report("split_shift_left", "exponential shift (left form)", max(res_p, res_m), EXACT_TOL))

    n2 = ga.norm(h1) ** 2
    res = _max_abs(n2 - ga.norm(p) ** 2 - ga.norm(m) ** 2)
    out.append(report("split_norm", "split norm additivity", res, EXACT_TOL))

    res = max(
        _max_abs(ga.reverse(ga.gp(h1, h2)) - ga.gp(ga.reverse(h2), ga.reverse(h1))),
        _max_abs(ga.reverse(ga.reverse(h1)) - h1),
        _max_abs(ga.reverse(h1 + h2) - ga.reverse(h1) - ga.reverse(h2)),
    )
    out.append(report("reverse_antiautomorphism", "principal reverse", res, EXACT_TOL))

    res = _max_abs(ga.trace(ga.gp(h1, ga.reverse(h1))) - n2)
    out.append(report("trace_norm", "trace of h times its reverse", res, EXACT_TOL))

    res = _max_abs(ga.trace(ga.gp(ga.gp(h1, h2), h3)) - ga.trace(ga.gp(ga.gp(h3, h1), h2)))
    out.append(report("trace_cyclicity", "trace cyclicity", res, EXACT_TOL))

    res = max(
        _max_abs(ga.norm(ga.gp(ga.gp(ea, h1), ib)) - ga.norm(h1)),
        _max_abs(ga.norm(ga.gp(ga.gp(ga.E_T, h1), ga.I3)) - ga.norm(h1)),
    )
    out.append(report("norm_invariance", "exponential sandwich isometry", res, EXACT_TOL))

    res = _max_abs(ga.orthogonality_check(h1, h2, alpha))
    out.append(report("split_orthogonality", "orthogonality of split parts", res, EXACT_TOL))
    return out


# ---------------------------------------------------------------- transforms

def _off_lattice_error(kind: str, n: int, params, seed: int) -> float:
    """Reconstruct at half-cell-shifted points and compare with the analytic packet."""
    g = reference_grid(n)
    rng = _rng(seed, "offlattice")
    amp = ga.random_multivectors(rng, ())
    width = tuple(g.extent(k) / 10 for k in range(4))
    f = gaussian_packet(g, (0, 0, 0, 0), width, amp)
    xs = g.shifted(tuple(s / 2 for s in g.spacing))
    truth = gaussian_packet(xs, (0, 0, 0, 0), width, amp)
    if kind == "sft":
        rec = isft(sft(f), xs, path="direct")
    elif kind == "lcst":
        rec = ilcst(lcst(f, params, path="fast"), params, xs, path="direct")
    else:
        rec = two_sided_ilcst(two_sided_lcst(f, params, path="fast"), params, xs, path="direct")
    return relative_l2(rec, truth)


def check_inversions(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    rng = _rng(seed, "inversions")
    g = reference_grid()
    f = probe(g, rng)
    out = []

    out.append(report("sft_roundtrip", "SFT inversion", relative_l2(isft(sft(f)), f), QUAD_TOL, grid=g))
    for A in LC_REF:
        for path in ("fast", "direct"):
            rt = ilcst(lcst(f, A, path=path), A, g, path=path)
            out.append(report(f"lcst_roundtrip_{path}", "LCST inversion", relative_l2(rt, f), QUAD_TOL,
                              grid=g, params=_lc(A)))

    P = TWO_SIDED_REF
    rt = two_sided_ilcst(two_sided_lcst(f, P, path="fast"), P, g, path="fast")
    out.append(report("two_sided_roundtrip", "two-sided LCST inversion", relative_l2(rt, f), QUAD_TOL,
                      grid=g, params=_two(P), notes="spatial kernel constant (2 pi |B2|)^(-3/2)"))

    # printed spatial constant: the round trip is off by a grid-independent factor
    pred = two_sided_verbatim_defect(P)
    fits = {}
    for n in (4, 8):
        gn = reference_grid(n)
        fn = probe(gn, _rng(seed, f"verbatim{n}"))
        rt = two_sided_ilcst(two_sided_lcst(fn, P, constants="verbatim"), P, gn, constants="verbatim")
        fits[f"factor_{n}^4"], _ = fit_scalar(rt, fn)
    spread = abs(fits["factor_4^4"] - fits["factor_8^4"]) / abs(fits["factor_8^4"])
    res = max(abs(fits["factor_8^4"] / pred - 1), spread)
    fits["predicted"] = pred
    out.append(report("two_sided_verbatim_defect", "two-sided inversion, printed constant", res, 0.01,
                      params=_two(P), fitted=fits,
                      notes="printed (2 pi B2)^(-1/2) kernel: round trip returns (2 pi B2)^2 f"))
    if mode == "verbatim":
        rt = two_sided_ilcst(two_sided_lcst(f, P, constants="verbatim"), P, g, constants="verbatim")
        out.append(report("two_sided_roundtrip_verbatim", "two-sided LCST inversion", relative_l2(rt, f),
                          QUAD_TOL, grid=g, params=_two(P), deviation=True,
                          notes=f"round-trip factor {pred:.6g}"))

    # FrSFT: unitary inverse, printed inverse, reduction to the rotation LCST
    for p in FR_REF:
        F = frsft(f, p)
        rt = ifrsft(F, p, g, mode="unitary")
        out.append(report("frsft_roundtrip_unitary", "fractional SFT inversion", relative_l2(rt, f), QUAD_TOL,
                          grid=g, params={"alpha": p.alpha}))
        rt = ifrsft(F, p, g, mode="verbatim")
        fitted, resid = fit_scalar(rt, f)
        csc = 1 / math.sin(p.alpha)
        out.append(report("frsft_roundtrip_printed", "fractional SFT inversion", relative_l2(rt, f), QUAD_TOL,
                          grid=g, params={"alpha": p.alpha},
                          fitted={"roundtrip_constant": fitted, "csc^1.5": csc**1.5, "shape_residual": resid},
                          deviation=True,
                          notes="printed inverse prefactor csc^(3/2)/(2 pi)^4 scales the round trip by csc^(3/2)"))
        L = lcst(f, LcParams.rotation(p.alpha), F.grid, path="fast")
        phase = (2 * p.alpha - math.pi) / 4
        pred = L.right_mul(ga.blade_exp(ga.I3, phase)) * TWO_PI**1.5
        out.append(report("frsft_vs_rotation_lcst", "fractional SFT as rotation LCST", relative_l2(F, pred),
                          ALG_TOL, grid=g, params={"alpha": p.alpha},
                          fitted={"modulus": TWO_PI**1.5, "i3_phase": phase},
                          notes="frsft = (2 pi)^(3/2) lcst(rotation) exp(i_3 (2 alpha - pi)/4)"))

    # monotone convergence of off-lattice reconstruction on a fixed extent
    for kind, params in (("sft", None), ("lcst", LC_REF[1]), ("two_sided", TWO_SIDED_REF)):
        errs = [_off_lattice_error(kind, n, params, seed) for n in (4, 8, 12)]
        ratios = [errs[1] / errs[0], errs[2] / errs[1]]
        out.append(report(f"{kind}_convergence", "inversion, grid refinement", max(ratios), 1.0,
                          fitted={"err_4^4": errs[0], "err_8^4": errs[1], "err_12^4": errs[2]},
                          notes="residual = largest error ratio between successive grids; < 1 is monotone"))
    return out


def check_fast_paths(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    rng = _rng(seed, "fastpaths")
    g = reference_grid()
    f = random_signal(g, rng)
    out = []
    for A in LC_REF:
        out.append(report("lcst_fast_vs_direct", "LCST chirp-FFT factorization",
                          relative_l2(lcst(f, A, path="fast"), lcst(f, A, path="direct")), ALG_TOL,
                          grid=g, params=_lc(A)))
    P = TWO_SIDED_REF
    out.append(report("two_sided_fast_vs_direct", "two-sided kernel shifting",
                      relative_l2(two_sided_lcst(f, P, path="fast"), two_sided_lcst(f, P, path="direct")),
                      ALG_TOL, grid=g, params=_two(P)))
    return out


def check_covariances(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    rng = _rng(seed, "covariances")
    out = []
    A = LC_REF[1]
    a, b, c, d = A.as_tuple()

    g = reference_grid()
    f = probe(g, rng)
    F = lcst(f, A, path="fast")
    lhs = lcst(reflect(f, (1, 1)), A, path="fast")
    out.append(report("reflection", "reflection", relative_l2(lhs, reflect(F, (1, 1))), EXACT_TOL,
                      grid=g, params=_lc(A)))

    # d != 1 so the printed coefficient (1 - a)/b differs from -c
    At = LcParams(2.0, 1.0, 3.0, 2.0)
    a, b, c, d = At.as_tuple()
    # tighter packets so the shifted copy stays contained
    gt = reference_grid(12, 7.2)
    ft = probe(gt, rng, width=tuple(gt.extent(k) / 14 for k in range(4)))
    cells = (1, 2, -1, 1)
    y = np.array([k * s for k, s in zip(cells, gt.spacing)])
    shifted = ft.with_data(np.roll(ft.data, cells, axis=(0, 1, 2, 3)))
    wg = conjugate_grid(gt, b)
    lhs = lcst(shifted, At, wg, path="fast")
    base = lcst(ft, At, wg.shifted((0.0, *(-a * y[1:]))), path="direct")
    wt, w1, w2, w3 = wg.mesh()
    ydotw = y[1] * w1 + y[2] * w2 + y[3] * w3
    ysq = float(np.sum(y[1:] ** 2))
    coeff = -c if mode == "corrected" else (1 - a) / b
    right = ga.blade_exp(ga.I3, coeff * (a * ysq / 2 - ydotw))
    left = ga.blade_exp(ga.E_T, -y[0] * wt)
    rhs = ga.gp(ga.gp(left, base.data), right)
    out.append(report("translation", "translation covariance", relative_l2(lhs.data, rhs), TORUS_TOL,
                      grid=gt, params={**_lc(At), "shift": y.tolist()}, deviation=mode == "verbatim",
                      fitted={"phase_coefficient": coeff},
                      notes="phase coefficient (1 - ad)/b = -c" if mode == "corrected"
                      else "printed phase coefficient (1 - a)/b"))

    a, b, c, d = A.as_tuple()
    u_t, u = 0.7, np.array([0.4, -0.3, 0.5])
    t, x1, x2, x3 = g.mesh()
    mod = ga.gp(ga.gp(ga.blade_exp(ga.E_T, -u_t * t), f.data),
                ga.blade_exp(ga.I3, -(u[0] * x1 + u[1] * x2 + u[2] * x3)))
    wg = conjugate_grid(g, b)
    lhs = lcst(f.with_data(mod), A, wg, path="direct")
    base = lcst(f, A, wg.shifted((u_t, *(b * u))), path="direct")
    wt, w1, w2, w3 = wg.mesh()
    udotw = u[0] * w1 + u[1] * w2 + u[2] * w3
    rhs = ga.gp(base.data, ga.blade_exp(ga.I3, -d * (b * float(u @ u) + 2 * udotw) / 2))
    out.append(report("modulation", "modulation covariance", relative_l2(lhs.data, rhs), TORUS_TOL,
                      grid=g, params={**_lc(A), "u": [u_t, *u.tolist()]}))

    # left factors commuting with e_t, right factors commuting with i_3
    left_span = [ga.basis(k) for k in ("1", "e_t", "e_12", "e_13", "e_23", "e_t12", "e_t13", "e_t23")]
    right_span = [ga.basis(k) for k in ("1", "e_1", "e_2", "e_3", "e_12", "e_13", "e_23", "i_3")]
    h = probe(g, rng)
    H = lcst(h, A, path="fast")
    pairs = [(ga.basis("e_t12"), ga.I3),
             (sum(rng.normal() * v for v in left_span), sum(rng.normal() * v for v in right_span))]
    res = 0.0
    for M, N in pairs:
        lhs = lcst(f.left_mul(M) + h.right_mul(N), A, path="fast")
        rhs = F.left_mul(M) + H.right_mul(N)
        res = max(res, relative_l2(lhs, rhs))
    P = TWO_SIDED_REF
    pairs2 = [(ga.basis("e_t12"), ga.I3), (ga.basis("e_12"), ga.I3)]
    for M, N in pairs2:
        lhs = two_sided_lcst(f.left_mul(M) + h.right_mul(N), P, path="fast")
        rhs = two_sided_lcst(f, P, path="fast").left_mul(M) + two_sided_lcst(h, P, path="fast").right_mul(N)
        res = max(res, relative_l2(lhs, rhs))
    out.append(report("linearity", "left/right linearity", res, ALG_TOL, grid=g, params=_lc(A),
                      notes="M = e_t12 and random M in the e_t-commutant; N = i_3 and random N in the i_3-commutant"))
    return out


def check_plancherel(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    rng = _rng(seed, "plancherel")
    g = reference_grid()
    f1, f2 = probe(g, rng), probe(g, rng)
    out = []
    for A in LC_REF:
        L1, L2 = lcst(f1, A, path="fast"), lcst(f2, A, path="fast")
        ratio = scalar_product(L1, L2) / scalar_product(f1, f2)
        out.append(report("plancherel", "Plancherel", abs(ratio - TWO_PI) / TWO_PI, 0.01, grid=g,
                          params=_lc(A), fitted={"ratio": ratio, "2pi": TWO_PI}))
        pr = L1.l2_norm() / f1.l2_norm()
        out.append(report("parseval", "Parseval", abs(pr - math.sqrt(TWO_PI)) / math.sqrt(TWO_PI), 0.01,
                          grid=g, params=_lc(A), fitted={"norm_ratio": pr, "sqrt(2pi)": math.sqrt(TWO_PI)}))
    return out


def _central_diff(data: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (np.roll(data, -1, axis=axis) - np.roll(data, 1, axis=axis)) / (2 * h)


def _derivative_residual(item: int, A: LcParams, refine: int, seed: int, mode: str) -> float:
    a, b, c, d = A.as_tuple()
    axis = 0 if item in (1, 3) else 1
    n = [8, 8, 8, 8]
    spacing = [0.75] * 4
    if item in (1, 2):
        # halve the lattice spacing on the differentiated axis, same extent
        n[axis] *= refine
        spacing[axis] /= refine
    g = SpaceTimeGrid.centered(n, spacing)
    rng = _rng(seed, "derivative")
    width = (0.9, 0.9, 0.9, 0.9)
    f = gaussian_packet(g, (0.1, -0.1, 0.05, 0.0), width, ga.random_multivectors(rng, ()), 0.6, (0.5, -0.4, 0.3))
    coords = g.mesh()
    xk = coords[axis]
    if item in (1, 2):
        df = f.with_data(_central_diff(f.data, axis, g.spacing[axis]))
        lhs = lcst(df, A, path="fast").data
        F = lcst(f, A, path="fast")
        w = F.grid.mesh()[axis]
        if item == 1:
            rhs = ga.gp(ga.E_T, w[..., None] * F.data)
        else:
            xf = lcst(f.with_data(xk[..., None] * f.data), A, path="fast").data
            rhs = ga.gp(w[..., None] * F.data - a * xf, ga.I3) / b
        return relative_l2(lhs, rhs)
    # spectrum side: central difference in w with step = lattice spacing / refine
    wg = conjugate_grid(g, b)
    hstep = wg.spacing[axis] / refine
    off = [0.0] * 4
    off[axis] = hstep
    plus = lcst(f, A, wg.shifted(off), path="direct").data
    minus = lcst(f, A, wg.shifted([-o for o in off]), path="direct").data
    lhs = (plus - minus) / (2 * hstep)
    xf = lcst(f.with_data(xk[..., None] * f.data), A, wg, path="direct").data
    if item == 3:
        rhs = -ga.gp(ga.E_T, xf)
    else:
        F = lcst(f, A, wg, path="direct").data
        w = wg.mesh()[axis]
        coef = d if mode == "corrected" else a
        rhs = ga.gp(coef * w[..., None] * F - xf, ga.I3) / b
    return relative_l2(lhs, rhs)


def check_derivatives(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    A = LC_REF[1]
    out = []
    for item in (1, 2, 3, 4):
        base = 2 if item in (1, 2) else 4
        coarse = _derivative_residual(item, A, base, seed, mode)
        fine = _derivative_residual(item, A, 2 * base, seed, mode)
        ratio = coarse / fine if fine else math.inf
        dev = mode == "verbatim" and item == 4
        notes = "residual = 1 / (reduction factor when the step halves)"
        if item == 4:
            notes += "; coefficient d" if mode == "corrected" else "; printed coefficient a"
        out.append(report(f"derivative_{item}", "partial derivatives", 1 / ratio, 1 / 3.5, params=_lc(A),
                          fitted={"coarse_residual": coarse, "fine_residual": fine, "reduction": ratio},
                          deviation=dev, notes=notes))
    return out


# ---------------------------------------------------------------- convolutions

def check_convolutions(seed: int = 0, mode: str = "corrected") -> list[ResidualReport]:
    out = []
    g4 = SpaceTimeGrid.centered((4,) * 4, 0.8)

    # Mustard convolution as eight standard convolutions, both readings
    res_out, res_pre = 0.0, 0.0
    for s in range(10):
        rng = _rng(seed + s, "mustard")
        a, b = random_signal(g4, rng), random_signal(g4, rng)
        m = mustard_convolve(a, b)
        res_out = max(res_out, relative_l2(mustard_as_eight(a, b, True), m))
        res_pre = max(res_pre, relative_l2(mustard_as_eight(a, b, False), m))
    out.append(report("mustard_eight_terms", "Mustard convolution, eight-term form", res_out, TORUS_TOL, grid=g4,
                      fitted={"pre_reflection_residual": res_pre},
                      notes="trailing spatial reflection read as reflecting the output argument; 10 seeds"))

    rng = _rng(seed, "lemma")
    g = reference_grid()
    f = probe(g, rng)
    for A in LC_REF:
        a_, b_, _, d_ = A.as_tuple()
        L = lcst(f, A, path="fast")
        t, x1, x2, x3 = g.mesh()
        chirped = f.right_mul(ga.blade_exp(ga.I3, a_ * (x1**2 + x2**2 + x3**2) / (2 * b_)))
        S = sft(chirped)  # index m sits at w / b on the LCST lattice
        Bc = abs(TWO_PI * b_) ** -1.5
        wt, w1, w2, w3 = L.grid.mesh()
        pred = ga.gp(Bc * S.data, ga.blade_exp(ga.I3, d_ * (w1**2 + w2**2 + w3**2) / (2 * b_)))
        out.append(report("lcst_via_sft", "LCST as chirped SFT", relative_l2(L.data, pred), ALG_TOL,
                          grid=g, params=_lc(A)))
        mag = np.abs(ga.norm(L.data) - Bc * ga.norm(S.data)) / np.max(ga.norm(L.data))
        out.append(report("lcst_sft_magnitude", "LCST magnitude identity", float(np.max(mag)), ALG_TOL,
                          grid=g, params=_lc(A), notes="pointwise, relative to the peak modulus"))

    # chirp-dressed Mustard convolution theorem: the sign/side must be unique
    A = LC_REF[1]
    gg = gaussian_packet(g, (0, 0, 0, 0), tuple(g.extent(k) / 10 for k in range(4)))
    Lf = lcst(f, A, path="fast")
    target = Lf.with_data(ga.gp(Lf.data, sft(gg).data))
    cands = {}
    for side in ("right", "left"):
        for sign in (-1, 1):
            h = odot(f, gg, A, side, sign)
            cands[f"{side}{'+' if sign > 0 else '-'}"] = relative_l2(lcst(h, A, path="fast"), target)
    passing = [k for k, v in cands.items() if v <= QUAD_TOL]
    res = cands["right-"] if passing == ["right-"] else max(1.0, cands["right-"])
    out.append(report("odot_theorem", "chirp-dressed convolution theorem", res, QUAD_TOL, grid=g, params=_lc(A),
                      fitted=cands,
                      notes=f"passing conventions {passing}; right-multiplied exp(-i_3 a x^2 / 2b) selected"))
    rg = gaussian_packet(g, (0, 0, 0, 0), tuple(g.extent(k) / 10 for k in range(4)),
                         ga.random_multivectors(rng, ()), 0.3)
    h = odot(f, rg, A)
    Lh = lcst(h, A, path="fast")
    gen = relative_l2(Lh, Lf.with_data(ga.gp(Lf.data, sft(rg).data)))
    out.append(report("odot_theorem_general_kernel", "chirp-dressed convolution theorem", gen, QUAD_TOL,
                      grid=g, params=_lc(A), deviation=True,
                      notes="second operand not a real time-even scalar; its spectrum leaves span{1, i_3}"))

    out.extend(_product_theorem(seed))
    out.extend(_star_n_checks(seed, mode))
    return out


def _product_theorem(seed: int) -> list[ResidualReport]:
    out = []
    A = LcParams(1.0, 2.0, 0.0, 1.0)
    amp = ga.random_multivectors(_rng(seed, "product"), ())
    results = {}
    for n in (12, 16):
        g = SpaceTimeGrid.centered((n,) * 4, 8.0 / n)
        f = gaussian_packet(g, (0.3, 0.0, 0.2, -0.1), 0.8, amp, 0.5, (0.3, -0.2, 0.1))
        for spatial_only in (True, False):
            scale = (1.0 if spatial_only else A.b, A.b, A.b, A.b)
            fine = SpaceTimeGrid.centered(g.n, tuple(s / k for s, k in zip(g.spacing, scale)))
            gfine = gaussian_packet(fine, (0, 0, 0, 0), 0.6)
            gx = scale_argument(gfine, A.b, spatial_only)
            lhs = lcst(f.with_data(ga.gp(f.data, gx.data)), A, path="fast")
            rhs = lcst_of_product_rhs(f, gfine, A)
            kappa, shape = fit_scalar(lhs, rhs)
            results[(n, spatial_only)] = (relative_l2(lhs, rhs), kappa, shape)
    for spatial_only, label in ((True, "spatial"), (False, "all_axes")):
        r12, r16 = results[(12, spatial_only)], results[(16, spatial_only)]
        fitted = {"residual_12^4": r12[0], "residual_16^4": r16[0],
                  "defect_12^4": r12[1], "defect_16^4": r16[1], "shape_residual_16^4": r16[2]}
        out.append(report(f"product_theorem_{label}", "product theorem", max(r12[0], r16[0]), QUAD_TOL,
                          params=_lc(A), fitted=fitted, deviation=not spatial_only,
                          notes="g(t, x / b)" if spatial_only else "g(t / b, x / b)"))
    return out


def _star_n_checks(seed: int, mode: str) -> list[ResidualReport]:
    out = []
    P = TWO_SIDED_UNCHIRPED
    pre_printed = printed_lambda_prefactor(P)
    pre = pre_printed / P.m2.b**2 if mode == "corrected" else pre_printed
    kd, ke, res_direct, res_eight = {}, {}, 0.0, 0.0
    for n in (2, 3, 4):
        g = SpaceTimeGrid.centered((n,) * 4, 0.9)
        rng = _rng(seed, f"starn{n}")
        f, h = random_signal(g, rng), random_signal(g, rng)
        spec = star_n(f, h, P, prefactor=pre)
        direct = star_n_direct(f, h, P, prefactor=pre)
        eight = star_n_as_eight(f, h, P)
        kd[n], r1 = fit_scalar(direct, spec)
        ke[n], r2 = fit_scalar(spec, eight)
        res_direct, res_eight = max(res_direct, r1), max(res_eight, r2)
    drift = max(abs(ke[n] - ke[4]) / abs(ke[4]) for n in ke)
    fitted = {**{f"kappa_direct_{n}^4": v for n, v in kd.items()},
              **{f"kappa_eight_{n}^4": v for n, v in ke.items()},
              "prefactor_used": pre, "printed_prefactor": pre_printed}
    out.append(report("star_n_proportionality", "two-sided convolution theorem",
                      max(res_direct, res_eight), TORUS_TOL, params=_two(P), fitted=fitted,
                      notes="spectral, direct triple sum, and eight-term forms pairwise proportional"))
    out.append(report("star_n_kappa_drift", "two-sided convolution theorem", drift, 0.01, params=_two(P),
                      fitted=fitted, notes="relative spread of kappa(eight-term) over 2^4, 3^4, 4^4"))
    out.append(report("star_n_lambda_prefactor", "lambda weight prefactor", abs(ke[4] - 1), 1e-8,
                      params=_two(P), fitted=fitted, deviation=mode == "verbatim",
                      notes="kappa = 1 with (2 pi)^2 B1^(1/2) B2^(3/2); printed B2^(7/2) gives kappa = B2^2"))

    # chirped parameters: no single constant relates the eight-term form
    Pc = TWO_SIDED_REF
    g = SpaceTimeGrid.centered((3,) * 4, 0.9)
    rng = _rng(seed, "starn_chirped")
    f, h = random_signal(g, rng), random_signal(g, rng)
    spec = star_n(f, h, Pc)
    k1, r1 = fit_scalar(star_n_direct(f, h, Pc), spec)
    k2, r2 = fit_scalar(spec, star_n_as_eight(f, h, Pc))
    out.append(report("star_n_direct_chirped", "two-sided convolution theorem", r1, TORUS_TOL, grid=g,
                      params=_two(Pc), fitted={"kappa": k1}))
    out.append(report("star_n_eight_chirped", "two-sided convolution, eight-term form", r2, TORUS_TOL, grid=g,
                      params=_two(Pc), fitted={"kappa": k2}, deviation=True,
                      notes="chirped kernels (A or D nonzero): the eight-term form is not proportional"))
    return out


# ---------------------------------------------------------------- driver

SUITE_CHECKS: dict[str, tuple[Callable, ...]] = {
    "algebra": (check_algebra,),
    "transforms": (check_inversions, check_fast_paths, check_covariances, check_plancherel, check_derivatives),
    "convolutions": (check_convolutions,),
}


def run_all(suite: str = "all", mode: str = "corrected", seed: int = 0, threads: int = 1) -> dict:
    """Run a suite and return ``{"reports": [...], "summary": {...}}``."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    names = ("algebra", "transforms", "convolutions") if suite == "all" else (suite,)
    checks = [c for s in names for c in SUITE_CHECKS[s]]
    start = time.perf_counter()

    def run(check):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ContainmentWarning)
            return check(seed=seed, mode=mode)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(run, checks))
    reports = [r for batch in results for r in batch]
    summary = {
        "suite": suite,
        "mode": mode,
        "seed": seed,
        "total": len(reports),
        "passed": sum(r.status == "pass" for r in reports),
        "failed": sum(r.status == "fail" for r in reports),
        "expected_deviations": sum(r.status == "expected-deviation" for r in reports),
        "deviation_ledger": [
            {"check_name": r.check_name, "residual": r.residual, "notes": r.notes}
            for r in reports if r.status == "expected-deviation"
        ],
        "seconds": round(time.perf_counter() - start, 3),
    }
    return {"reports": [r.to_dict() for r in reports], "summary": summary}


def exit_code(result: dict) -> int:
    return 1 if result["summary"]["failed"] else 0


def write_report(result: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(result, fh, indent=2)
