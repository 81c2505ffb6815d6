"""Pure numpy implementation of the weight-space kernels.

Same signatures and bit-identical results as the compiled module; used when
the extension is not built or ``VMRANK_PURE_PYTHON`` is set.
"""
import numpy as np

TIE_RTOL = 1e-9
SHIFT_EPS = 1e-6
CHUNK = 1 << 15


def decode_weights(start, stop, g):
    """Weight digits for lexicographic indices ``start..stop-1`` (base 6)."""
    idx = np.arange(start, stop, dtype=np.int64)
    powers = 6 ** np.arange(g - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers) % 6


def _close_sorted(sv):
    a, b = sv[:, 1:], sv[:, :-1]
    return np.abs(a - b) <= TIE_RTOL * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def _snap(s):
    """Each row's chains of near-equal scores collapsed to the chain minimum."""
    o = np.argsort(s, axis=-1, kind="stable")
    sv = np.take_along_axis(s, o, axis=-1)
    pos = np.broadcast_to(np.arange(s.shape[1]), s.shape)
    starts = np.concatenate([np.ones((len(s), 1), dtype=bool), ~_close_sorted(sv)], axis=1)
    first = np.maximum.accumulate(np.where(starts, pos, 0), axis=1)
    out = np.empty_like(s)
    np.put_along_axis(out, o, np.take_along_axis(sv, first, axis=-1), axis=-1)
    return out


def _orders(z, signs, groups, g, costs, tb_pos, tb, mode, start, stop):
    m, n = z.shape
    wexp = signs * decode_weights(start, stop, g)[:, groups].astype(np.float64)
    s = np.zeros((stop - start, m))
    for j in range(n):
        s += z[:, j][None, :] * wexp[:, j][:, None]

    if mode == 0:
        v = -s
    else:
        u = _snap(s)
        lo = u.min(axis=1, keepdims=True)
        rng = u.max(axis=1, keepdims=True) - lo
        rng[rng == 0] = 1.0
        shifted = np.where(lo > 0, u, (u - lo) + SHIFT_EPS * rng)
        v = costs[None, :] / shifted

    tbb = np.broadcast_to(tb_pos, v.shape)
    o = np.lexsort((tbb, v), axis=-1)
    sv = np.take_along_axis(v, o, axis=-1)
    close = _close_sorted(sv)
    chain = np.concatenate([np.zeros((len(v), 1), dtype=np.int64), np.cumsum(~close, axis=1)], axis=1)
    final = np.lexsort((tb_pos[o], chain), axis=-1)
    return np.take_along_axis(o, final, axis=-1)


def _chunks(start, stop):
    for lo in range(start, stop, CHUNK):
        yield lo, min(lo + CHUNK, stop)


def rank_orders(z, signs, groups, g, costs, tb_pos, tb, mode, start, stop):
    out = np.empty((stop - start, z.shape[0]), dtype=np.int32)
    for lo, hi in _chunks(start, stop):
        out[lo - start : hi - start] = _orders(z, signs, groups, g, costs, tb_pos, tb, mode, lo, hi)
    return out


def topk_counts(z, signs, groups, g, costs, tb_pos, tb, mode, start, stop, k):
    m = z.shape[0]
    counts = np.zeros((m, k), dtype=np.int64)
    for lo, hi in _chunks(start, stop):
        o = _orders(z, signs, groups, g, costs, tb_pos, tb, mode, lo, hi)
        for p in range(k):
            counts[:, p] += np.bincount(o[:, p], minlength=m)
    return counts


def hamming_scores(z, signs, groups, g, costs, tb_pos, tb, mode, start, stop, empirical_ranks):
    m = z.shape[0]
    er = np.asarray(empirical_ranks, dtype=np.int64)
    coef = m - er + 1
    out = np.empty(stop - start, dtype=np.int64)
    positions = np.arange(1, m + 1, dtype=np.int64)
    for lo, hi in _chunks(start, stop):
        o = _orders(z, signs, groups, g, costs, tb_pos, tb, mode, lo, hi)
        cr = np.empty_like(o, dtype=np.int64)
        np.put_along_axis(cr, o, np.broadcast_to(positions, o.shape), axis=-1)
        out[lo - start : hi - start] = (coef * np.abs(er - cr)).sum(axis=1)
    return out
