"""Space-time algebra Cl(3,1).

Multivectors are stored as 16 real coefficients in the blade order

    1, e_t, e_1, e_2, e_3, e_12, e_13, e_23, e_t1, e_t2, e_t3,
    i_3, e_t12, e_t13, e_t23, i_st

with ``e_t**2 = -1`` and ``e_k**2 = +1`` for the spatial generators, so that
``i_3 = e_1 e_2 e_3`` and ``i_st = e_t i_3`` both square to -1.

Everything here works on plain ``(..., 16)`` float arrays so that whole
sampled fields can be multiplied at once; :class:`Multivector` is a thin
immutable wrapper for single values.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

BLADE_NAMES: tuple[str, ...] = (
    "1", "e_t", "e_1", "e_2", "e_3", "e_12", "e_13", "e_23",
    "e_t1", "e_t2", "e_t3", "i_3", "e_t12", "e_t13", "e_t23", "i_st",
)

# generator bits: t -> 1, e_1 -> 2, e_2 -> 4, e_3 -> 8
BLADE_BITS: tuple[int, ...] = (0, 1, 2, 4, 8, 6, 10, 12, 3, 5, 9, 14, 7, 11, 13, 15)
_INDEX_OF_BITS = {bits: k for k, bits in enumerate(BLADE_BITS)}

GRADES: tuple[int, ...] = tuple(bin(b).count("1") for b in BLADE_BITS)

# principal reverse: ordinary reversion composed with e_t -> -e_t
REVERSE_SIGNS = np.array(
    [1, -1, 1, 1, 1, -1, -1, -1, 1, 1, 1, -1, 1, 1, 1, -1], dtype=float
)

SIGNATURE = {"t": -1, "spatial": 1}


class AlgebraError(ValueError):
    """Raised for domain violations inside the algebra."""


def _reorder_sign(a: int, b: int) -> int:
    """Sign from sorting the generator word ``a b`` into canonical order."""
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


def build_sign_table(eps_t: int = -1, eps_s: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Cayley table of the blade basis for generator squares ``(eps_t, eps_s)``.

    Returns ``(product_sign, product_blade)``, both 16x16 integer arrays, with
    ``blade_i * blade_j = product_sign[i, j] * blade[product_blade[i, j]]``.
    """
    metric = (eps_t, eps_s, eps_s, eps_s)
    sign = np.zeros((16, 16), dtype=int)
    blade = np.zeros((16, 16), dtype=int)
    for i, bi in enumerate(BLADE_BITS):
        for j, bj in enumerate(BLADE_BITS):
            s = _reorder_sign(bi, bj)
            common = bi & bj
            for g in range(4):
                if common >> g & 1:
                    s *= metric[g]
            sign[i, j] = s
            blade[i, j] = _INDEX_OF_BITS[bi ^ bj]
    return sign, blade


def pseudoscalar_squares(eps_t: int, eps_s: int) -> tuple[int, int]:
    """``(i_3**2, i_st**2)`` read off the table built for the given signature."""
    sign, blade = build_sign_table(eps_t, eps_s)
    out = []
    for k in (11, 15):
        assert blade[k, k] == 0
        out.append(int(sign[k, k]))
    return out[0], out[1]


def admissible_signatures() -> list[tuple[int, int]]:
    """All ``(eps_t, eps_s)`` in {+-1}^2 for which i_3 and i_st square to -1."""
    return [
        (et, es)
        for et, es in itertools.product((-1, 1), repeat=2)
        if pseudoscalar_squares(et, es) == (-1, -1)
    ]


def _validated_table() -> tuple[np.ndarray, np.ndarray]:
    sign, blade = build_sign_table(SIGNATURE["t"], SIGNATURE["spatial"])
    gens = {"e_t": 1, "e_1": 2, "e_2": 3, "e_3": 4}
    for name, k in gens.items():
        expect = SIGNATURE["t"] if name == "e_t" else SIGNATURE["spatial"]
        if blade[k, k] != 0 or sign[k, k] != expect:
            raise AlgebraError(f"signature check failed for {name}")
    for (ni, i), (nj, j) in itertools.combinations(gens.items(), 2):
        if blade[i, j] != blade[j, i] or sign[i, j] != -sign[j, i]:
            raise AlgebraError(f"{ni} and {nj} do not anticommute")
    for k in (11, 15):
        if blade[k, k] != 0 or sign[k, k] != -1:
            raise AlgebraError(f"{BLADE_NAMES[k]} does not square to -1")
    return sign, blade


PRODUCT_SIGN, PRODUCT_BLADE = _validated_table()

# CAYLEY[i, j, k] = coefficient of blade k in blade_i * blade_j
CAYLEY = np.zeros((16, 16, 16))
for _i in range(16):
    for _j in range(16):
        CAYLEY[_i, _j, PRODUCT_BLADE[_i, _j]] = PRODUCT_SIGN[_i, _j]
del _i, _j


def basis(k: int | str) -> np.ndarray:
    """Coefficient vector of one basis blade, by index or name."""
    if isinstance(k, str):
        k = BLADE_NAMES.index(k)
    v = np.zeros(16)
    v[k] = 1.0
    return v


def gp(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Geometric product of broadcastable ``(..., 16)`` arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # einsum cannot broadcast between a and b on its own
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    a = np.broadcast_to(a, shape + (16,))
    b = np.broadcast_to(b, shape + (16,))
    return np.einsum("...i,...j,ijk->...k", a, b, CAYLEY, optimize=True)


def left_matrix(m: np.ndarray) -> np.ndarray:
    """Matrix ``L`` with ``gp(m, x) == x @ L.T`` for coefficient vectors x."""
    return np.einsum("i,ijk->kj", np.asarray(m, dtype=float), CAYLEY)


def right_matrix(m: np.ndarray) -> np.ndarray:
    """Matrix ``R`` with ``gp(x, m) == x @ R.T``."""
    return np.einsum("j,ijk->ki", np.asarray(m, dtype=float), CAYLEY)


E_T = basis("e_t")
I3 = basis("i_3")
I_ST = basis("i_st")
ONE = basis("1")

LEFT_ET = left_matrix(E_T)
RIGHT_I3 = right_matrix(I3)
# h -> e_t h i_3, an involution; the split projects onto its +-1 eigenspaces
SPLIT_OP = LEFT_ET @ RIGHT_I3


def grade(h: np.ndarray, k: int) -> np.ndarray:
    """Grade-k part of ``h``."""
    if k not in range(5):
        raise AlgebraError(f"grade must be in 0..4, got {k}")
    mask = np.array([g == k for g in GRADES], dtype=float)
    return np.asarray(h, dtype=float) * mask


def reverse(h: np.ndarray) -> np.ndarray:
    """Principal reverse (an anti-automorphism)."""
    return np.asarray(h, dtype=float) * REVERSE_SIGNS


def trace(h: np.ndarray) -> np.ndarray:
    """Scalar part."""
    return np.asarray(h, dtype=float)[..., 0]


def norm(h: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(h, dtype=float) ** 2, axis=-1))


def split(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(h_+, h_-)`` with ``h_pm = (h +- e_t h i_3) / 2``."""
    h = np.asarray(h, dtype=float)
    twisted = h @ SPLIT_OP.T
    return 0.5 * (h + twisted), 0.5 * (h - twisted)


def split_part(h: np.ndarray, sign: int) -> np.ndarray:
    plus, minus = split(h)
    return plus if sign > 0 else minus


def blade_exp(u: np.ndarray, alpha) -> np.ndarray:
    """``cos(alpha) + u sin(alpha)`` for ``u`` squaring to -1.

    ``alpha`` may be an array; the result then has shape ``alpha.shape + (16,)``.
    """
    u = np.asarray(u, dtype=float)
    sq = gp(u, u)
    target = -ONE
    if not np.allclose(sq, target, rtol=0, atol=1e-12):
        raise AlgebraError("blade_exp needs an element squaring to scalar -1")
    alpha = np.asarray(alpha, dtype=float)
    return np.cos(alpha)[..., None] * ONE + np.sin(alpha)[..., None] * u


def orthogonality_check(f: np.ndarray, g: np.ndarray, alpha):
    """``Tr(e^{alpha i_3} rev(f_+) g_-)``, which vanishes identically (broadcasts)."""
    f_plus, _ = split(f)
    _, g_minus = split(g)
    out = trace(gp(gp(blade_exp(I3, alpha), reverse(f_plus)), g_minus))
    return float(out) if np.ndim(out) == 0 else out


def random_multivectors(rng: np.random.Generator, n: int | Sequence[int] = ()) -> np.ndarray:
    """Coefficients uniform on [-1, 1], then normalised to unit norm."""
    shape = (n,) if isinstance(n, int) else tuple(n)
    x = rng.uniform(-1.0, 1.0, size=shape + (16,))
    return x / norm(x)[..., None]


def _complex_pairs() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pair the blades into 8 planes invariant under right-multiplication by i_3.

    For a pair (k, k') with ``blade_k i_3 = s blade_k'`` the channel value is
    ``c_k + 1j * s * c_k'``; right-multiplying by i_3 is then multiplication
    by 1j on every channel.
    """
    first, second, signs = [], [], []
    seen: set[int] = set()
    for k in range(16):
        if k in seen:
            continue
        kp = int(PRODUCT_BLADE[k, 11])
        first.append(k)
        second.append(kp)
        signs.append(int(PRODUCT_SIGN[k, 11]))
        seen.update((k, kp))
    return np.array(first), np.array(second), np.array(signs, dtype=float)


PAIR_FIRST, PAIR_SECOND, PAIR_SIGN = _complex_pairs()


def to_complex(h: np.ndarray) -> np.ndarray:
    """``(..., 16)`` real -> ``(..., 8)`` complex, i_3 acting as 1j from the right."""
    h = np.asarray(h, dtype=float)
    return h[..., PAIR_FIRST] + 1j * PAIR_SIGN * h[..., PAIR_SECOND]


def from_complex(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.shape[:-1] + (16,))
    out[..., PAIR_FIRST] = z.real
    out[..., PAIR_SECOND] = PAIR_SIGN * z.imag
    return out


def _split_channels() -> tuple[np.ndarray, np.ndarray]:
    """Complex channel basis diagonalizing left multiplication by e_t.

    Returns ``(encode, decode)``: ``c = h @ encode`` gives 8 complex channels,
    the first 4 spanning ``h_+`` (where e_t acts as ``-1j``) and the last 4
    spanning ``h_-`` (where it acts as ``+1j``); ``to_complex(h) = c @ decode``.
    """
    left = np.empty((8, 8), dtype=complex)
    for j in range(8):
        unit = np.zeros(8, dtype=complex)
        unit[j] = 1.0
        left[:, j] = to_complex(gp(E_T, from_complex(unit)))
    cols = []
    for sign in (1, -1):
        proj = (np.eye(8) + sign * 1j * left) / 2
        u, sv, _ = np.linalg.svd(proj)
        if not np.allclose(sv, [1] * 4 + [0] * 4, atol=1e-12):
            raise AlgebraError("split projector does not have rank 4")
        cols.append(u[:, :4])
    basis = np.hstack(cols)
    to_c = np.zeros((16, 8), dtype=complex)
    to_c[PAIR_FIRST, np.arange(8)] = 1.0
    to_c[PAIR_SECOND, np.arange(8)] = 1j * PAIR_SIGN
    return to_c @ np.linalg.inv(basis).T, basis.T


SPLIT_ENCODE, SPLIT_DECODE = _split_channels()


class Multivector:
    """Immutable single element of Cl(3,1)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[float] | np.ndarray = ()):
        c = np.zeros(16)
        given = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=float)
        if given.size:
            if given.shape != (16,):
                raise AlgebraError(f"expected 16 coefficients, got shape {given.shape}")
            c[:] = given
        c.setflags(write=False)
        self._c = c

    @classmethod
    def blade(cls, name: str | int, value: float = 1.0) -> "Multivector":
        return cls(value * basis(name))

    @classmethod
    def scalar(cls, value: float) -> "Multivector":
        return cls(value * ONE)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __array__(self, dtype=None, copy=None):
        return np.array(self._c, dtype=dtype)

    def __getitem__(self, key: int | str) -> float:
        if isinstance(key, str):
            key = BLADE_NAMES.index(key)
        return float(self._c[key])

    @staticmethod
    def _coerce(other) -> np.ndarray | None:
        if isinstance(other, Multivector):
            return other._c
        if isinstance(other, (int, float, np.floating, np.integer)):
            return float(other) * ONE
        return None

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Multivector(self._c + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Multivector(self._c - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else Multivector(o - self._c)

    def __neg__(self):
        return Multivector(-self._c)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        o = self._coerce(other)
        return NotImplemented if o is None else Multivector(gp(self._c, o))

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self._c / float(other))
        return NotImplemented

    def __eq__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else bool(np.array_equal(self._c, o))

    def __hash__(self):
        return hash(self._c.tobytes())

    def isclose(self, other, atol: float = 1e-12) -> bool:
        o = self._coerce(other)
        return bool(np.allclose(self._c, o, rtol=0, atol=atol))

    def grade(self, k: int) -> "Multivector":
        return Multivector(grade(self._c, k))

    def reverse(self) -> "Multivector":
        return Multivector(reverse(self._c))

    def trace(self) -> float:
        return float(self._c[0])

    def norm(self) -> float:
        return float(norm(self._c))

    def split(self) -> tuple["Multivector", "Multivector"]:
        p, m = split(self._c)
        return Multivector(p), Multivector(m)

    def __repr__(self) -> str:
        terms = [
            f"{c:+.6g}{'' if n == '1' else '*' + n}"
            for c, n in zip(self._c, BLADE_NAMES)
            if c != 0
        ]
        return "Multivector(" + (" ".join(terms) if terms else "0") + ")"


def exp_blade(u: Multivector | str, alpha: float) -> Multivector:
    """Single-value form of :func:`blade_exp`."""
    if isinstance(u, str):
        u = Multivector.blade(u)
    return Multivector(blade_exp(u.coeffs, alpha))


