"""Vectorized zero test for linear derivations of integer polynomials.

The dict kernels pay for hashing a large Python int on every accumulate.  For
the question "does this derivation kill f?" the result itself is not needed,
so monomials are re-packed into a few uint64 words with just enough bits per
variable; a derivation term is then two word additions, and duplicate
monomials are combined by a sort plus a segmented sum.
"""

from __future__ import annotations

import numpy as np

from . import kernels as _k
from .polyring import MultiPoly

_INT64_SAFE = 1 << 62


class PackedPoly:
    __slots__ = ("nvars", "bits", "per_word", "nwords", "keys", "coeffs", "exps")

    def __init__(self, f: MultiPoly):
        terms = f._terms
        self.nvars = nv = f.vt.dim
        if not all(isinstance(c, int) for c in terms.values()):
            raise TypeError("packed form needs integer coefficients")
        nbytes = nv * _k.EXP_BITS // 8
        raw = b"".join(k.to_bytes(nbytes, "little") for k in terms)
        exps = np.frombuffer(raw, dtype=np.uint8).reshape(len(terms), nv)
        top = int(exps.max()) if len(terms) else 0
        # derivation images raise one exponent by at most one
        self.bits = bits = max(1, (top + 1).bit_length())
        self.per_word = per = 64 // bits
        self.nwords = nw = -(-nv // per)
        # word-major: keys[w] is the w-th packed word of every term
        keys = np.zeros((nw, len(terms)), dtype=np.uint64)
        for j in range(nv):
            w, pos = divmod(j, per)
            keys[w] |= exps[:, j].astype(np.uint64) << np.uint64(bits * pos)
        self.keys = keys
        self.exps = np.ascontiguousarray(exps.T)
        if any(abs(c) >= _INT64_SAFE for c in terms.values()):
            raise OverflowError("coefficient too large for the packed path")
        self.coeffs = np.fromiter(terms.values(), dtype=np.int64, count=len(terms))

    def _unit(self, var: int) -> tuple[int, np.uint64]:
        w, pos = divmod(var, self.per_word)
        return w, np.uint64(1) << np.uint64(self.bits * pos)

    def derivation_vanishes(self, rules) -> bool:
        """True iff ``sum_b sum_(c,w) w * u_c * df/du_b`` is identically zero.

        ``rules`` is ``((b, ((1 << (EXP_BITS*c), w), ...)), ...)`` as produced
        by ``galilean.derivation_rules`` (the common denominator is irrelevant
        for a zero test).
        """
        chunks_k = []
        chunks_c = []
        bound = 0
        cmax = int(np.abs(self.coeffs).max()) if len(self.coeffs) else 0
        for b, targets in rules:
            col = self.exps[b]
            rows = np.nonzero(col)[0]
            if not len(rows):
                continue
            wb, ub = self._unit(b)
            base = self.keys[:, rows]
            base[wb] -= ub
            ce = self.coeffs[rows] * col[rows].astype(np.int64)
            for one_c, w in targets:
                c = (one_c.bit_length() - 1) // _k.EXP_BITS
                wc, uc = self._unit(c)
                kk = base.copy()
                kk[wc] += uc
                chunks_k.append(kk)
                chunks_c.append(ce * w)
                bound += len(rows) * cmax * 255 * abs(w)
        if not chunks_k:
            return True
        if bound >= _INT64_SAFE:
            raise OverflowError("derivation image may overflow int64")
        keys = np.concatenate(chunks_k, axis=1)
        coeffs = np.concatenate(chunks_c)
        return not np.any(_combine(keys, coeffs))


# odd multipliers for the one-word sort hash
_MIX = np.array(
    [0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F, 0x165667B19E3779F9, 0xD6E8FEB86659FD93],
    dtype=np.uint64,
)


def _combine(keys: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Coefficient sums of equal columns of ``keys`` (group order unspecified).

    Sorting on a single hashed word is much cheaper than a multi-key lexsort;
    equal keys hash equally, and a hash group holding distinct keys always
    shows up as an adjacent pair with equal hash and unequal key, in which case
    the exact lexsort is used instead.
    """
    nw, m = keys.shape
    if nw == 1:
        order = np.argsort(keys[0])
    else:
        h = np.zeros(m, dtype=np.uint64)
        for w in range(nw):
            h ^= keys[w] * _MIX[w % len(_MIX)]
            h ^= h >> np.uint64(29)
        order = np.argsort(h)
    new = np.zeros(m, dtype=bool)
    new[0] = True
    for w in range(nw):
        col = keys[w][order]
        new[1:] |= col[1:] != col[:-1]
    if nw > 1:
        hs = h[order]
        if np.any(new[1:] & (hs[1:] == hs[:-1])):
            order = np.lexsort(keys[::-1])
            new[:] = False
            new[0] = True
            for w in range(nw):
                col = keys[w][order]
                new[1:] |= col[1:] != col[:-1]
    return np.add.reduceat(coeffs[order], np.nonzero(new)[0])


def pack(f: MultiPoly) -> PackedPoly | None:
    """Packed form of ``f``, or None when the packed path does not apply."""
    try:
        return PackedPoly(f)
    except (TypeError, OverflowError):
        return None
