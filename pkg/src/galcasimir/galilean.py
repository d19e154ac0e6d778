"""The Galilean group Gal(n), its Lie algebra gal(n) and the dual gal(n)*.

Group elements are exact (n+2)x(n+2) rational matrices::

    [ rho | v  x  ]
    [  0  | 1  x0 ]
    [  0  | 0  1  ]

and algebra elements have a skew block ``K`` in place of ``rho`` and zeros on
the lower diagonal.  A dual vector is stored by its coordinates
(``Kstar``, ``vstar``, ``xstar``, ``tstar``); its matrix representative puts
them in the same slots, and any matrix is reduced to a dual vector by
discarding the annihilator of gal(n) under ``<A, B> = tr(A^T B)``.

Because ``tr(M^T E_ij) = 2 * Kstar_ij``, the value of a dual vector on the
rotation generator ``E(i,j)`` is ``2 * K_i_j``; on ``B(i)``, ``P(i)``, ``H`` it
is ``V_i``, ``X_i``, ``T``.  :func:`linear_coordinate` and the Lie-Poisson
bracket use these values so that they agree with :func:`coadjoint`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Sequence

import numpy as np

from . import exact
from . import kernels as _k
from .polyring import MultiPoly, VarTable, as_rational, format_rational, parse_rational

KINDS = ("E", "B", "P", "H")


@dataclass(frozen=True)
class BasisLabel:
    kind: str
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.kind == "E" and not 1 <= self.i < self.j:
            raise ValueError("rotation generator needs 1 <= i < j")
        if self.kind in ("B", "P") and self.i < 1:
            raise ValueError("boost/translation index must be >= 1")

    def __str__(self):
        if self.kind == "E":
            return f"E({self.i},{self.j})"
        if self.kind == "H":
            return "H"
        return f"{self.kind}({self.i})"

    @classmethod
    def parse(cls, s: str) -> "BasisLabel":
        s = s.strip()
        if s == "H":
            return cls("H")
        kind, _, rest = s.partition("(")
        idx = [int(p) for p in rest.rstrip(")").split(",")]
        return cls(kind, *idx)

    def valid_for(self, n: int) -> bool:
        if self.kind == "E":
            return self.j <= n
        if self.kind in ("B", "P"):
            return self.i <= n
        return True

    def index(self, n: int) -> int:
        """Position in the basis order, which equals the variable order."""
        if not self.valid_for(n):
            raise ValueError(f"{self} is not a basis element of gal({n})")
        vt = VarTable.for_n(n)
        if self.kind == "E":
            return vt.k(self.i, self.j)
        if self.kind == "B":
            return vt.v(self.i)
        if self.kind == "P":
            return vt.x(self.i)
        return vt.t

    @property
    def pairing_weight(self) -> int:
        """Value of the trace pairing of a unit coordinate with this generator."""
        return 2 if self.kind == "E" else 1


@lru_cache(maxsize=None)
def basis(n: int) -> tuple[BasisLabel, ...]:
    out = [BasisLabel("E", i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    out += [BasisLabel("B", i) for i in range(1, n + 1)]
    out += [BasisLabel("P", i) for i in range(1, n + 1)]
    out.append(BasisLabel("H"))
    return tuple(out)


def _sparse_basis(label: BasisLabel, n: int) -> dict[tuple[int, int], int]:
    # 0-based entries
    if not label.valid_for(n):
        raise ValueError(f"{label} is not a basis element of gal({n})")
    if label.kind == "E":
        return {(label.i - 1, label.j - 1): 1, (label.j - 1, label.i - 1): -1}
    if label.kind == "B":
        return {(label.i - 1, n): 1}
    if label.kind == "P":
        return {(label.i - 1, n + 1): 1}
    return {(n, n + 1): 1}


def basis_matrix(label: BasisLabel, n: int) -> np.ndarray:
    m = exact.zeros(n + 2)
    for (r, c), v in _sparse_basis(label, n).items():
        m[r, c] = Fraction(v)
    return m


def algebra_coords(m: np.ndarray, n: int) -> list[Fraction]:
    """Coefficients of a matrix in the gal(n) basis; raises if not in gal(n)."""
    coords = [Fraction(0)] * len(basis(n))
    recon = exact.zeros(n + 2)
    for a, label in enumerate(basis(n)):
        (r, c), _ = next(iter(_sparse_basis(label, n).items()))
        coords[a] = Fraction(m[r, c])
        for (rr, cc), v in _sparse_basis(label, n).items():
            recon[rr, cc] += coords[a] * v
    if any(x != y for x, y in zip(m.flat, recon.flat)):
        raise ArithmeticError("matrix does not lie in gal(n)")
    return coords


def _sparse_mul(a, b):
    out: dict[tuple[int, int], int] = {}
    for (i, k), x in a.items():
        for (k2, j), y in b.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) + x * y
    return out


@dataclass(frozen=True)
class StructureConstants:
    """``[Z_a, Z_b] = sum_c table[a, b][c] Z_c`` with indices in basis order."""

    n: int
    table: dict

    def bracket(self, a: int, b: int) -> dict[int, int]:
        return self.table.get((a, b), {})

    def nonzero(self):
        """Yield ``(a, b, c, coeff)`` for every nonzero constant, all orderings."""
        for (a, b), vec in sorted(self.table.items()):
            for c, coeff in sorted(vec.items()):
                yield a, b, c, coeff


def _bracket_vec(sc_table, u: dict, v: dict) -> dict:
    out: dict[int, int] = {}
    for a, x in u.items():
        for b, y in v.items():
            for c, z in sc_table.get((a, b), {}).items():
                out[c] = out.get(c, 0) + x * y * z
    return {c: z for c, z in out.items() if z}


@lru_cache(maxsize=None)
def structure_constants(n: int) -> StructureConstants:
    """Structure constants from matrix commutators, checked for Jacobi."""
    if n < 1:
        raise ValueError("n must be >= 1")
    labels = basis(n)
    mats = [_sparse_basis(lab, n) for lab in labels]
    # position of each basis element's defining entry
    slot = {next(iter(m)): a for a, m in enumerate(mats)}
    table: dict[tuple[int, int], dict[int, int]] = {}
    for a in range(len(labels)):
        for b in range(len(labels)):
            if a == b:
                continue
            comm = _sparse_mul(mats[a], mats[b])
            for key, v in _sparse_mul(mats[b], mats[a]).items():
                comm[key] = comm.get(key, 0) - v
            comm = {k: v for k, v in comm.items() if v}
            vec: dict[int, int] = {}
            for key, v in comm.items():
                if key in slot:
                    vec[slot[key]] = v
            # reconstruct and compare: the commutator must stay inside gal(n)
            recon: dict[tuple[int, int], int] = {}
            for c, coeff in vec.items():
                for key, v in mats[c].items():
                    recon[key] = recon.get(key, 0) + coeff * v
            if {k: v for k, v in recon.items() if v} != comm:
                raise ArithmeticError(
                    f"[{labels[a]}, {labels[b]}] leaves the span of gal({n})"
                )
            if vec:
                table[(a, b)] = vec
    sc = StructureConstants(n, table)
    _check_jacobi(sc, len(labels))
    return sc


def _check_jacobi(sc: StructureConstants, d: int) -> None:
    t = sc.table
    for a, b, c in combinations(range(d), 3):
        total: dict[int, int] = {}
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            inner = t.get((x, y))
            if not inner:
                continue
            for k, v in _bracket_vec(t, inner, {z: 1}).items():
                total[k] = total.get(k, 0) + v
        if any(total.values()):
            raise ArithmeticError(f"Jacobi identity fails for basis triple {a, b, c}")


# ---------------------------------------------------------------------------
# dual space
# ---------------------------------------------------------------------------


def _q(x) -> Fraction:
    return Fraction(as_rational(x))


@dataclass(frozen=True)
class DualVector:
    """Element of gal(n)* in dual coordinates (exact rationals)."""

    n: int
    Kstar: tuple
    vstar: tuple
    xstar: tuple
    tstar: Fraction

    def __post_init__(self):
        n = self.n
        K = tuple(tuple(_q(x) for x in row) for row in self.Kstar)
        if len(K) != n or any(len(row) != n for row in K):
            raise ValueError("Kstar must be n x n")
        for i in range(n):
            for j in range(n):
                if K[i][j] != -K[j][i]:
                    raise ValueError("Kstar must be skew-symmetric")
        v = tuple(_q(x) for x in self.vstar)
        x = tuple(_q(y) for y in self.xstar)
        if len(v) != n or len(x) != n:
            raise ValueError("vstar and xstar must have length n")
        object.__setattr__(self, "Kstar", K)
        object.__setattr__(self, "vstar", v)
        object.__setattr__(self, "xstar", x)
        object.__setattr__(self, "tstar", _q(self.tstar))

    @classmethod
    def zero(cls, n: int) -> "DualVector":
        z = Fraction(0)
        return cls(n, ((z,) * n,) * n, (z,) * n, (z,) * n, z)

    @classmethod
    def from_coords(cls, n: int, coords: Sequence) -> "DualVector":
        vt = VarTable.for_n(n)
        if len(coords) != vt.dim:
            raise ValueError(f"expected {vt.dim} coordinates")
        c = [_q(x) for x in coords]
        K = [[Fraction(0)] * n for _ in range(n)]
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                K[i - 1][j - 1] = c[vt.k(i, j)]
                K[j - 1][i - 1] = -c[vt.k(i, j)]
        v = [c[vt.v(i)] for i in range(1, n + 1)]
        x = [c[vt.x(i)] for i in range(1, n + 1)]
        return cls(n, K, v, x, c[vt.t])

    def coords(self) -> list[Fraction]:
        """Coordinates in variable-table order."""
        n = self.n
        out = [self.Kstar[i][j] for i in range(n) for j in range(i + 1, n)]
        return out + list(self.vstar) + list(self.xstar) + [self.tstar]

    def to_json(self) -> dict:
        f = format_rational
        return {
            "schema": "v1",
            "n": self.n,
            "Kstar": [[f(x) for x in row] for row in self.Kstar],
            "vstar": [f(x) for x in self.vstar],
            "xstar": [f(x) for x in self.xstar],
            "tstar": f(self.tstar),
        }

    @classmethod
    def from_json(cls, data) -> "DualVector":
        p = lambda s: parse_rational(str(s))  # noqa: E731
        try:
            return cls(
                int(data["n"]),
                [[p(x) for x in row] for row in data["Kstar"]],
                [p(x) for x in data["vstar"]],
                [p(x) for x in data["xstar"]],
                p(data["tstar"]),
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed dual vector JSON: {exc}") from exc


def dual_to_matrix(xi: DualVector) -> np.ndarray:
    n = xi.n
    m = exact.zeros(n + 2)
    for i in range(n):
        for j in range(n):
            m[i, j] = xi.Kstar[i][j]
        m[i, n] = xi.vstar[i]
        m[i, n + 1] = xi.xstar[i]
    m[n, n + 1] = xi.tstar
    return m


def project_dual(m: np.ndarray) -> DualVector:
    """Reduce a matrix modulo gal(n)^perp to its canonical dual vector."""
    size = m.shape[0]
    if m.shape != (size, size) or size < 3:
        raise ValueError("expected a square matrix of size n+2 >= 3")
    n = size - 2
    K = [[(Fraction(m[i, j]) - Fraction(m[j, i])) / 2 for j in range(n)] for i in range(n)]
    v = [m[i, n] for i in range(n)]
    x = [m[i, n + 1] for i in range(n)]
    return DualVector(n, K, v, x, m[n, n + 1])


# ---------------------------------------------------------------------------
# group
# ---------------------------------------------------------------------------


class SingularCayleyError(ArithmeticError):
    """``I - S`` was singular; draw another parameter matrix."""


@dataclass(frozen=True)
class GroupElement:
    """Exact element of Gal(n): rotation/reflection, boost, translation, time shift."""

    n: int
    rho: tuple
    boost: tuple
    trans: tuple
    time: Fraction

    def __post_init__(self):
        n = self.n
        rho = tuple(tuple(_q(x) for x in row) for row in self.rho)
        if len(rho) != n or any(len(r) != n for r in rho):
            raise ValueError("rho must be n x n")
        for i in range(n):
            for j in range(n):
                dot = sum(rho[k][i] * rho[k][j] for k in range(n))
                if dot != (1 if i == j else 0):
                    raise ValueError("rho is not orthogonal")
        b = tuple(_q(x) for x in self.boost)
        t = tuple(_q(x) for x in self.trans)
        if len(b) != n or len(t) != n:
            raise ValueError("boost and trans must have length n")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "boost", b)
        object.__setattr__(self, "trans", t)
        object.__setattr__(self, "time", _q(self.time))

    @classmethod
    def identity(cls, n: int) -> "GroupElement":
        z = Fraction(0)
        rho = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return cls(n, rho, (z,) * n, (z,) * n, z)

    @classmethod
    def translation(cls, n, boost=None, trans=None, time=0) -> "GroupElement":
        z = [0] * n
        rho = [[int(i == j) for j in range(n)] for i in range(n)]
        return cls(n, rho, boost or z, trans or z, time)

    @classmethod
    def rotation(cls, rho) -> "GroupElement":
        n = len(rho)
        return cls(n, rho, [0] * n, [0] * n, 0)

    def matrix(self) -> np.ndarray:
        n = self.n
        m = exact.identity(n + 2)
        for i in range(n):
            for j in range(n):
                m[i, j] = self.rho[i][j]
            m[i, n] = self.boost[i]
            m[i, n + 1] = self.trans[i]
        m[n, n + 1] = self.time
        return m

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "GroupElement":
        size = m.shape[0]
        n = size - 2
        if m.shape != (size, size) or n < 1:
            raise ValueError("expected an (n+2)x(n+2) matrix")
        for c in range(n):
            if m[n, c] != 0 or m[n + 1, c] != 0:
                raise ValueError("lower-left block must vanish")
        if m[n, n] != 1 or m[n + 1, n + 1] != 1 or m[n + 1, n] != 0:
            raise ValueError("lower-right block must be [[1, x0], [0, 1]]")
        return cls(
            n,
            [[m[i, j] for j in range(n)] for i in range(n)],
            [m[i, n] for i in range(n)],
            [m[i, n + 1] for i in range(n)],
            m[n, n + 1],
        )

    def inverse(self) -> "GroupElement":
        n = self.n
        rt = [[self.rho[j][i] for j in range(n)] for i in range(n)]
        x0 = self.time
        # [[R, W], [0, U]]^-1 = [[R^T, -R^T W U^-1], [0, U^-1]], U^-1 = [[1, -x0], [0, 1]]
        w_b = [-sum(rt[i][k] * self.boost[k] for k in range(n)) for i in range(n)]
        w_x = [
            -sum(rt[i][k] * (self.trans[k] - self.boost[k] * x0) for k in range(n))
            for i in range(n)
        ]
        return GroupElement(n, rt, w_b, w_x, -x0)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        return GroupElement.from_matrix(self.matrix() @ other.matrix())

    def to_json(self) -> dict:
        f = format_rational
        return {
            "schema": "v1",
            "n": self.n,
            "matrix": [[f(x) for x in row] for row in self.matrix()],
            "rho": [[f(x) for x in row] for row in self.rho],
            "boost": [f(x) for x in self.boost],
            "trans": [f(x) for x in self.trans],
            "time": f(self.time),
        }

    @classmethod
    def from_json(cls, data) -> "GroupElement":
        try:
            m = np.array(
                [[Fraction(parse_rational(str(x))) for x in row] for row in data["matrix"]],
                dtype=object,
            )
            g = cls.from_matrix(m)
            if int(data["n"]) != g.n:
                raise ValueError("declared n does not match matrix size")
            declared = {k: data[k] for k in ("rho", "boost", "trans", "time") if k in data}
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed group element JSON: {exc}") from exc
        full = g.to_json()
        for k, v in declared.items():
            norm = (
                [[format_rational(parse_rational(str(x))) for x in row] for row in v]
                if k == "rho"
                else format_rational(parse_rational(str(v)))
                if k == "time"
                else [format_rational(parse_rational(str(x))) for x in v]
            )
            if norm != full[k]:
                raise ValueError(f"declared {k} disagrees with matrix")
        return g


def coadjoint(g: GroupElement, xi: DualVector) -> DualVector:
    """``Ad*(g) xi``: the class of ``(g M^T g^-1)^T`` modulo gal(n)^perp."""
    if g.n != xi.n:
        raise ValueError("dimension mismatch")
    m = dual_to_matrix(xi)
    r = g.matrix() @ m.T @ g.inverse().matrix()
    return project_dual(r.T)


def coadjoint_matrix(g: GroupElement) -> list[list[Fraction]]:
    """Matrix of the linear map ``Ad*(g)`` on coordinates (row = output)."""
    n = g.n
    dim = VarTable.for_n(n).dim
    cols = []
    for b in range(dim):
        e = [0] * dim
        e[b] = 1
        cols.append(coadjoint(g, DualVector.from_coords(n, e)).coords())
    return [[cols[b][a] for b in range(dim)] for a in range(dim)]


def cayley_rotation(S) -> GroupElement:
    """``rho = (I - S)^-1 (I + S)`` for a skew rational ``S``."""
    s = exact.mat(S)
    m = s.shape[0]
    if s.shape != (m, m) or any(s[i, j] != -s[j, i] for i in range(m) for j in range(m)):
        raise ValueError("Cayley parameter must be a skew-symmetric square matrix")
    eye = exact.identity(m)
    try:
        inv = exact.inverse(eye - s)
    except ZeroDivisionError as exc:
        raise SingularCayleyError("I - S is singular") from exc
    return GroupElement.rotation((inv @ (eye + s)).tolist())


def reflection(n: int) -> GroupElement:
    rho = [[(-1 if i == 0 else 1) if i == j else 0 for j in range(n)] for i in range(n)]
    return GroupElement.rotation(rho)


# ---------------------------------------------------------------------------
# random exact sampling
# ---------------------------------------------------------------------------


def random_rational(rng: random.Random, height: int = 20, max_den: int = 10) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, max_den))


def random_skew(n: int, rng: random.Random) -> list[list[Fraction]]:
    S = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            S[i][j] = random_rational(rng)
            S[j][i] = -S[i][j]
    return S


def random_dual(n: int, rng: random.Random) -> DualVector:
    dim = VarTable.for_n(n).dim
    return DualVector.from_coords(n, [random_rational(rng) for _ in range(dim)])


def random_group_element(
    n: int, rng: random.Random, reflect: bool | None = None
) -> GroupElement:
    """Cayley rotation, then boost/translation/time shift, then maybe a reflection."""
    while True:
        try:
            rot = cayley_rotation(random_skew(n, rng))
            break
        except SingularCayleyError:
            continue
    tau = GroupElement.translation(
        n,
        [random_rational(rng) for _ in range(n)],
        [random_rational(rng) for _ in range(n)],
        random_rational(rng),
    )
    g = tau @ rot
    if reflect is None:
        reflect = rng.random() < 0.5
    return g @ reflection(n) if reflect else g


# ---------------------------------------------------------------------------
# Lie-Poisson structure
# ---------------------------------------------------------------------------


def linear_coordinate(label: BasisLabel, n: int) -> MultiPoly:
    """The linear function ``xi -> xi(Z)`` as a polynomial in the coordinates."""
    vt = VarTable.for_n(n)
    return MultiPoly.var(vt, label.index(n)) * label.pairing_weight


def _weights(n: int) -> list[int]:
    return [lab.pairing_weight for lab in basis(n)]


@lru_cache(maxsize=None)
def derivation_rules(n: int, a: int) -> tuple[tuple, int]:
    """Kernel rules for ``f -> {l_Z, f}`` with ``Z`` the basis element ``a``.

    ``{l_Z, f} = sum_{b,c} c_{Zb}^c l_c df/dl_b``; with ``l_c = s_c u_c`` and
    ``d/dl_b = (1/s_b) d/du_b`` each term is ``c * s_c / s_b * u_c * df/du_b``.
    Weights are returned scaled to integers together with the common
    denominator, so the kernel never touches ``Fraction``.
    """
    sc = structure_constants(n)
    s = _weights(n)
    raw = []
    den = 1
    for b in range(len(s)):
        vec = sc.bracket(a, b)
        if not vec:
            continue
        targets = []
        for c, coeff in sorted(vec.items()):
            w = Fraction(coeff * s[c], s[b])
            den = den * w.denominator // gcd(den, w.denominator)
            targets.append((1 << (_k.EXP_BITS * c), w))
        raw.append((b, targets))
    rules = tuple(
        (b, tuple((one, int(w * den)) for one, w in targets)) for b, targets in raw
    )
    return rules, den


def bracket_with_coordinate(label: BasisLabel, f: MultiPoly) -> MultiPoly:
    """``{l_Z, f}`` computed as a linear derivation applied to ``f``."""
    n = f.vt.n
    rules, den = derivation_rules(n, label.index(n))
    out = _k.apply_derivation_split(f.split(), rules)
    if den != 1 and out:
        out = _k.scale_terms(out, Fraction(1, den))
    return MultiPoly(f.vt, out)


def lie_poisson_bracket(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """``{f, g}(xi) = sum c_{ab}^c xi(Z_c) df/dxi(Z_a) dg/dxi(Z_b)``."""
    if f.vt != g.vt:
        raise ValueError("variable tables differ")
    vt = f.vt
    n = vt.n
    sc = structure_constants(n)
    s = _weights(n)
    df = {a: f.partial(a) for a in sorted(f.variables())}
    dg = {b: g.partial(b) for b in sorted(g.variables())}
    acc: dict = {}
    for a, fa in df.items():
        for b, gb in dg.items():
            vec = sc.bracket(a, b)
            if not vec:
                continue
            lin = MultiPoly.zero(vt)
            for c, coeff in vec.items():
                lin = lin + MultiPoly.var(vt, c) * Fraction(coeff * s[c], s[a] * s[b])
            _k.accumulate(acc, (fa * gb * lin)._terms, 1)
    return MultiPoly(vt, acc)


def infinitesimal_coadjoint(label: BasisLabel, xi: DualVector) -> DualVector:
    """Derivative of ``Ad*(exp(tZ)) xi`` at ``t = 0``: ``(Z M^T - M^T Z)^T`` mod perp."""
    z = basis_matrix(label, xi.n)
    m = dual_to_matrix(xi)
    return project_dual((z @ m.T - m.T @ z).T)
