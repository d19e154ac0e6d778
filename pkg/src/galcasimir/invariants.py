"""Generators of the coadjoint-invariant polynomials on gal(n)*.

``Q1 = sum X_i^2`` and ``Q2 = |X|^2 |V|^2 - (X.V)^2`` for every n >= 2, plus,
for n >= 4, the sums of principal minors of the augmented skew matrix::

    K' = [  K*    v*  x* ]
         [ -v*^T  0   0  ]
         [ -x*^T  0   0  ]

taken over index sets that contain the last two rows and columns.  Every such
minor is the square of a Pfaffian, which is how they are expanded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Sequence

import numpy as np

from . import exact
from . import kernels as _k
from .polyring import MultiPoly, VarTable


@dataclass(frozen=True)
class InvariantSet:
    n: int
    polys: tuple  # ((name, degree, MultiPoly), ...)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    @property
    def names(self) -> list[str]:
        return [name for name, _, _ in self.polys]

    def poly_list(self) -> list[MultiPoly]:
        return [p for _, _, p in self.polys]

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "n": self.n,
            "generators": [
                {"name": name, "degree": deg, "poly": p.to_json()}
                for name, deg, p in self.polys
            ],
        }

    @classmethod
    def from_json(cls, data) -> "InvariantSet":
        polys = tuple(
            (g["name"], int(g["degree"]), MultiPoly.from_json(g["poly"]))
            for g in data["generators"]
        )
        return cls(int(data["n"]), polys)

    def to_latex(self) -> str:
        return "\n".join(f"Q_{{{name[1:]}}} = {p.to_latex()}" for name, _, p in self.polys)

    def to_text(self) -> str:
        return "\n".join(f"{name} = {p}" for name, _, p in self.polys)


def q1(n: int) -> MultiPoly:
    vt = VarTable.for_n(n)
    return MultiPoly.from_terms(vt, [({f"X_{i}": 2}, 1) for i in range(1, n + 1)])


def q2(n: int) -> MultiPoly:
    if n < 2:
        raise ValueError("Q2 vanishes identically for n = 1")
    vt = VarTable.for_n(n)
    X = [MultiPoly.var(vt, f"X_{i}") for i in range(1, n + 1)]
    V = [MultiPoly.var(vt, f"V_{i}") for i in range(1, n + 1)]
    xx = sum((x * x for x in X), MultiPoly.zero(vt))
    vv = sum((v * v for v in V), MultiPoly.zero(vt))
    xv = sum((x * v for x, v in zip(X, V)), MultiPoly.zero(vt))
    return xx * vv - xv * xv


@dataclass(frozen=True)
class AugmentedMatrix:
    """Symbolic skew matrix ``K'``; ``entry`` is 1-based like the math."""

    n: int
    entries: tuple

    def entry(self, i: int, j: int) -> MultiPoly:
        return self.entries[i - 1][j - 1]

    def submatrix(self, idx: Sequence[int]) -> list[list[MultiPoly]]:
        """0-based principal submatrix."""
        return [[self.entries[i][j] for j in idx] for i in idx]


@lru_cache(maxsize=None)
def augmented(n: int) -> AugmentedMatrix:
    vt = VarTable.for_n(n)
    zero = MultiPoly.zero(vt)
    rows = [[zero] * (n + 2) for _ in range(n + 2)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            k = MultiPoly.var(vt, vt.k(i, j))
            rows[i - 1][j - 1] = k
            rows[j - 1][i - 1] = -k
        v = MultiPoly.var(vt, vt.v(i))
        x = MultiPoly.var(vt, vt.x(i))
        rows[i - 1][n] = v
        rows[i - 1][n + 1] = x
        rows[n][i - 1] = -v
        rows[n + 1][i - 1] = -x
    return AugmentedMatrix(n, tuple(tuple(r) for r in rows))


class _Pfaffians:
    """Memoized Pfaffians of principal submatrices of ``K'`` (term dicts)."""

    def __init__(self, n: int):
        aug = augmented(n)
        # every nonzero entry is a single signed variable
        self.entry = [[dict(e._terms) for e in row] for row in aug.entries]
        self.memo: dict[tuple, dict] = {(): {0: 1}}

    def __call__(self, idx: tuple) -> dict:
        hit = self.memo.get(idx)
        if hit is not None:
            return hit
        if len(idx) % 2:
            out: dict = {}
        else:
            # expand along the first index
            first, rest = idx[0], idx[1:]
            out = {}
            row = self.entry[first]
            for pos, j in enumerate(rest):
                a = row[j]
                if not a:
                    continue
                (key, c), = a.items()
                sub = self(rest[:pos] + rest[pos + 1:])
                if not sub:
                    continue
                s = c if pos % 2 == 0 else -c
                _k.accumulate(out, {kk + key: cc for kk, cc in sub.items()}, s)
        self.memo[idx] = out
        return out


@lru_cache(maxsize=None)
def _pfaffians(n: int) -> _Pfaffians:
    return _Pfaffians(n)


def pfaffian_of_minor(n: int, idx: Sequence[int]) -> MultiPoly:
    """Pfaffian of the principal submatrix of ``K'`` on 0-based sorted ``idx``."""
    return MultiPoly(VarTable.for_n(n), dict(_pfaffians(n)(tuple(idx))))


def minor_sum(n: int, size: int) -> MultiPoly:
    """Sum of the ``size x size`` principal minors of ``K'`` containing rows n+1, n+2."""
    if size % 2 or size < 4 or size > n + 2:
        raise ValueError(f"size must be even with 4 <= size <= n+2, got {size} (n={n})")
    vt = VarTable.for_n(n)
    pf = _pfaffians(n)
    tail = (n, n + 1)
    acc: dict = {}
    for subset in combinations(range(n), size - 2):
        p = pf(subset + tail)
        if p:
            _k.accumulate(acc, _k.square_terms(p), 1)
    return MultiPoly(vt, acc)


def k_type_count(n: int) -> int:
    """Number of generators built from minors of size >= 6."""
    return (n - 2) // 2 if n >= 4 else 0


def paper_stated_count(n: int) -> int:
    """Generator count as literally indexed in the source (Q_3..Q_{2+floor(n/2)})."""
    if n == 1:
        return 1
    if n in (2, 3):
        return 2
    return 2 + n // 2


@lru_cache(maxsize=None)
def generator_set(n: int) -> InvariantSet:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return InvariantSet(1, (("Q1", 2, q1(1)),))
    polys = [("Q1", 2, q1(n)), ("Q2", 4, q2(n))]
    for k in range(1, k_type_count(n) + 1):
        size = 2 * k + 4
        polys.append((f"Q{k + 2}", size, minor_sum(n, size)))
    return InvariantSet(n, tuple(polys))


def charpoly_coeffs(m) -> list:
    """Coefficients ``c_k`` of ``det(lambda I - M) = sum_k c_k lambda^(m-k)``.

    ``c_k = (-1)^k`` times the sum of the ``k x k`` principal minors.  Exact for
    int/Fraction input, float (numpy determinants) otherwise.
    """
    a = np.asarray(m, dtype=object)
    size = a.shape[0]
    if a.shape != (size, size):
        raise ValueError("charpoly needs a square matrix")
    is_exact = all(isinstance(x, (int, Fraction)) for x in a.flat)
    if not is_exact:
        a = np.asarray(m, dtype=float)
    coeffs = [Fraction(1) if is_exact else 1.0]
    for k in range(1, size + 1):
        total = Fraction(0) if is_exact else 0.0
        for idx in combinations(range(size), k):
            sub = a[np.ix_(idx, idx)]
            total += exact.det(sub.tolist()) if is_exact else float(np.linalg.det(sub))
        coeffs.append(total if k % 2 == 0 else -total)
    return coeffs


def minor_count(n: int, size: int) -> int:
    return comb(n, size - 2)
