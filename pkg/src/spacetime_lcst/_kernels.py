"""Fused per-sample loops around the FFT in the fast transform path.

The split-channel codec is block sparse: channel ``q`` of both parts mixes
the same four real blades, and those blades decode from that channel pair
alone. The kernels exploit this so encode/chirp and chirp/decode each touch
every sample once.
"""
from __future__ import annotations

import numba
import numpy as np


def pair_tables(enc: np.ndarray, dec: np.ndarray, tol: float = 1e-12):
    """Blade groups ``(4, 4)`` plus encode/decode coefficients ``(2, 4, 4)`` as (re, im).

    ``enc`` is real(16) -> complex(8) with ``c = h @ enc``; ``dec`` is
    complex(8) -> real(16) with ``h = (c @ dec).real``. Channels ``q`` and
    ``q + 4`` must share their blade group.
    """
    blades = np.zeros((4, 4), dtype=np.int64)
    e = np.zeros((2, 4, 4), dtype=complex)
    d = np.zeros((2, 4, 4), dtype=complex)
    for q in range(4):
        group = np.flatnonzero(np.abs(enc[:, q]) > tol)
        for p in range(2):
            ch = 4 * p + q
            if not np.array_equal(np.flatnonzero(np.abs(enc[:, ch]) > tol), group):
                raise ValueError("codec is not pair-block sparse")
            e[p, q] = enc[group, ch]
            d[p, q] = dec[ch, group]
        blades[q] = group
    mask = np.ones(dec.shape, dtype=bool)
    for q in range(4):
        mask[np.ix_([q, q + 4], blades[q])] = False
    if np.any(np.abs(dec[mask]) > tol):
        raise ValueError("codec is not pair-block sparse")
    return (
        blades,
        np.ascontiguousarray(e.real),
        np.ascontiguousarray(e.imag),
        np.ascontiguousarray(d.real),
        np.ascontiguousarray(d.imag),
    )


_JIT = dict(cache=True, nogil=True, fastmath=True, error_model="numpy")


@numba.njit(**_JIT)
def encode_chirp(data, blades, ere, eim, pre_t, px1, px2, px3, out):
    """``out[t, a, b, c, p, q] = pre * (data[t, a, b, c] @ ENC)[4p + q]``.

    ``out`` may be padded beyond the lattice; only the leading block is written.
    """
    n0, n1, n2, n3 = data.shape[:4]
    h = np.empty(4)
    for t in range(n0):
        for a in range(n1):
            for b in range(n2):
                sab = px1[a] * px2[b]
                for c in range(n3):
                    s = sab * px3[c]
                    s0 = s * pre_t[0, t]
                    s1 = s * pre_t[1, t]
                    for q in range(4):
                        for j in range(4):
                            h[j] = data[t, a, b, c, blades[q, j]]
                        r0 = i0 = r1 = i1 = 0.0
                        for j in range(4):
                            r0 += ere[0, q, j] * h[j]
                            i0 += eim[0, q, j] * h[j]
                            r1 += ere[1, q, j] * h[j]
                            i1 += eim[1, q, j] * h[j]
                        out[t, a, b, c, 0, q] = complex(r0, i0) * s0
                        out[t, a, b, c, 1, q] = complex(r1, i1) * s1


@numba.njit(**_JIT)
def chirp_decode(spec, t_src, blades, dre, dim, post_t, qx1, qx2, qx3, out):
    """Post-chirp part ``p`` read at time ``t_src[p, t]``, then decode to 16 blades.

    ``spec`` may be padded beyond the lattice of ``out``.
    """
    n0, n1, n2, n3 = out.shape[:4]
    for t in range(n0):
        t0, t1 = t_src[0, t], t_src[1, t]
        for a in range(n1):
            for b in range(n2):
                sab = qx1[a] * qx2[b]
                for c in range(n3):
                    s = sab * qx3[c]
                    s0 = s * post_t[0, t]
                    s1 = s * post_t[1, t]
                    for q in range(4):
                        y0 = spec[t0, a, b, c, 0, q] * s0
                        y1 = spec[t1, a, b, c, 1, q] * s1
                        for j in range(4):
                            out[t, a, b, c, blades[q, j]] = (
                                dre[0, q, j] * y0.real
                                - dim[0, q, j] * y0.imag
                                + dre[1, q, j] * y1.real
                                - dim[1, q, j] * y1.imag
                            )
