import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_lcst import algebra as ga
from spacetime_lcst.grid import GridError, SpaceTimeGrid, conjugate_grid, random_signal, relative_l2
from spacetime_lcst.transforms import (
    FrParams,
    LcParams,
    TransformError,
    TwoSidedParams,
    UnsupportedError,
    forward,
    frsft,
    ifrsft,
    ilcst,
    inverse,
    isft,
    lcst,
    lcst_fast,
    sft,
    two_sided_ilcst,
    two_sided_lcst,
)

TWO_PI = 2 * math.pi
nonzero_b = st.one_of(st.floats(-3, -0.3), st.floats(0.3, 3))


@st.composite
def lc_params(draw):
    a, b, d = draw(st.floats(-2, 2)), draw(nonzero_b), draw(st.floats(-2, 2))
    return LcParams(a, b, (a * d - 1) / b, d)


def _signal(n=(4, 4, 4, 4), spacing=0.6, seed=0):
    return random_signal(SpaceTimeGrid.centered(n, spacing), np.random.default_rng(seed))


@settings(max_examples=15, deadline=None)
@given(lc_params(), st.integers(0, 100))
def test_lcst_fast_matches_direct(A, seed):
    f = _signal(seed=seed)
    assert relative_l2(lcst(f, A, path="fast"), lcst(f, A, path="direct")) < 1e-12


@settings(max_examples=10, deadline=None)
@given(lc_params(), lc_params())
def test_two_sided_fast_matches_direct(m1, m2):
    f = _signal((3, 4, 5, 2), (0.5, 0.7, 0.4, 0.9))
    P = TwoSidedParams(m1, m2)
    assert relative_l2(two_sided_lcst(f, P, path="fast"), two_sided_lcst(f, P, path="direct")) < 1e-12


@pytest.mark.parametrize("n", [(5, 3, 4, 6), (8, 8, 8, 8), (1, 4, 2, 3)])
def test_fast_path_on_odd_and_anisotropic_lattices(n):
    f = _signal(n, (0.5, 0.3, 0.8, 0.6), seed=3)
    A = LcParams(2.0, 1.0, 1.0, 1.0)
    assert relative_l2(lcst(f, A, path="fast"), lcst(f, A, path="direct")) < 1e-12
    F = sft(f, path="fast")
    assert relative_l2(F, sft(f, path="direct")) < 1e-12
    assert relative_l2(isft(F, f.grid, path="fast"), isft(F, f.grid, path="direct")) < 1e-12


def test_fast_path_is_thread_safe():
    A = LcParams(1.0, -2.0, 0.5, 0.0)
    sigs = [_signal((6,) * 4, 0.5, seed=s) for s in range(6)]
    ref = [lcst(f, A, path="direct") for f in sigs]
    with ThreadPoolExecutor(max_workers=3) as pool:
        out = list(pool.map(lambda f: lcst(f, A, path="fast"), sigs))
    assert max(relative_l2(o, r) for o, r in zip(out, ref)) < 1e-12


@pytest.mark.parametrize("A", [LcParams(1, 1, 0, 1), LcParams(2, 1, 1, 1), LcParams(0.5, -2, 0.25, 1)])
@pytest.mark.parametrize("path", ["fast", "direct"])
def test_lcst_round_trip_on_random_data(A, path):
    # on the conjugate lattice the discrete pair is exactly invertible
    f = _signal(seed=4)
    assert relative_l2(ilcst(lcst(f, A, path=path), A, f.grid, path=path), f) < 1e-12


def test_sft_and_two_sided_round_trips():
    f = _signal(seed=5)
    assert relative_l2(isft(sft(f)), f) < 1e-12
    P = TwoSidedParams(LcParams(1, 2, 0, 1), LcParams(2, 0.5, 2, 1))
    assert relative_l2(two_sided_ilcst(two_sided_lcst(f, P, path="fast"), P, f.grid, path="fast"), f) < 1e-12


def test_fourier_parameters_reduce_to_scaled_sft():
    f = _signal(seed=6)
    L = lcst(f, LcParams.fourier(), path="fast")
    assert relative_l2(L.data, sft(f).data * TWO_PI**-1.5) < 1e-12


def test_quarter_turn_fractional_transform_is_sft():
    f = _signal(seed=7)
    assert relative_l2(frsft(f, FrParams(math.pi / 2)), sft(f)) < 1e-12


def test_fractional_inverse_modes():
    f = _signal(seed=8)
    p = FrParams(math.pi / 3)
    F = frsft(f, p)
    assert relative_l2(ifrsft(F, p, f.grid, mode="unitary"), f) < 1e-12
    csc = 1 / math.sin(p.alpha)
    assert relative_l2(ifrsft(F, p, f.grid, mode="verbatim"), f * csc**1.5) < 1e-12


def test_b_zero_branch_is_pointwise():
    f = _signal(seed=9)
    out = lcst(f, LcParams(1.0, 0.0, 0.0, 1.0))
    t = f.grid.axis(0)
    w = out.grid.axis(0)
    # temporal transform only; spatial samples pass through unchanged
    kern = ga.blade_exp(ga.E_T, -np.outer(w, t))
    expect = np.zeros_like(f.data)
    for i in range(len(w)):
        expect[i] = sum(ga.gp(kern[i, j], f.data[j]) for j in range(len(t))) * f.grid.spacing[0]
    assert np.allclose(out.data, expect, atol=1e-13)
    with pytest.raises(UnsupportedError):
        lcst_fast(f, LcParams(1.0, 0.0, 0.0, 1.0))
    with pytest.raises(UnsupportedError):
        forward("lcst", f, LcParams(1.0, 0.0, 0.0, 1.0), path="fast")


def test_parameter_validation():
    with pytest.raises(TransformError, match="ad - bc"):
        LcParams(1, 1, 1, 1)
    with pytest.raises(TransformError):
        FrParams(0.0)
    with pytest.raises(TransformError):
        forward("nope", _signal())


def test_fast_path_rejects_non_conjugate_output_lattice():
    f = _signal()
    A = LcParams(2.0, 1.0, 1.0, 1.0)
    wg = conjugate_grid(f.grid, 2.0 * A.b)
    with pytest.raises(GridError):
        lcst(f, A, wg, path="fast")
    # the direct path evaluates anywhere
    assert lcst(f, A, wg, path="direct").grid.same_as(wg)


def test_dispatch_matches_named_functions():
    f = _signal(seed=10)
    A = LcParams(2.0, 1.0, 1.0, 1.0)
    F = forward("lcst", f, A)
    assert relative_l2(F, lcst(f, A, path="fast")) < 1e-15
    assert relative_l2(inverse("lcst", F, A, f.grid), f) < 1e-12
