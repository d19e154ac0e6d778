"""Universal enveloping algebra U(gal(n)) in a PBW basis.

A PBW monomial is an exponent tuple over the ordered basis (same order as the
polynomial variables), standing for ``Z_1^e1 ... Z_d^ed``.  Everything is built
on one memoized primitive: left multiplication of a monomial by a single
basis element, rewritten with ``Z_i Z_j = Z_j Z_i + [Z_i, Z_j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .galilean import BasisLabel, basis, structure_constants
from .polyring import MultiPoly, VarTable, format_rational, parse_rational
from . import kernels as _k


class UEAElement:
    """Finite combination of PBW monomials with nonzero rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "UEAElement":
        out = cls.__new__(cls)
        out.n = n
        out.terms = terms
        return out

    @classmethod
    def zero(cls, n: int) -> "UEAElement":
        return cls._raw(n, {})

    @classmethod
    def one(cls, n: int) -> "UEAElement":
        return cls._raw(n, {(0,) * _dim(n): Fraction(1)})

    @classmethod
    def generator(cls, label: BasisLabel | str, n: int) -> "UEAElement":
        if isinstance(label, str):
            label = BasisLabel.parse(label)
        e = [0] * _dim(n)
        e[label.index(n)] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    def _check(self, other: "UEAElement"):
        if not isinstance(other, UEAElement):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"elements of U(gal({self.n})) and U(gal({other.n})) do not mix")
        return None

    def degree(self) -> int:
        """Filtration degree; -1 for the zero element."""
        return max((sum(m) for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, UEAElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return UEAElement._raw(self.n, _k.add_terms(self.terms, other.terms))

    def __neg__(self):
        return UEAElement._raw(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def scale(self, s) -> "UEAElement":
        s = Fraction(s)
        if not s:
            return UEAElement.zero(self.n)
        return UEAElement._raw(self.n, {m: c * s for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        """Higher degree first, then lexicographically larger exponents first."""
        return sorted(self.terms.items(), key=lambda mc: (-sum(mc[0]), [-e for e in mc[0]]))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"coeff": format_rational(c), "pbw": list(m)} for m, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data) -> "UEAElement":
        n = int(data["n"])
        d = _dim(n)
        terms: dict = {}
        for t in data["terms"]:
            m = tuple(int(e) for e in t["pbw"])
            if len(m) != d or min(m, default=0) < 0:
                raise ValueError(f"bad PBW exponent vector {t['pbw']!r} for n={n}")
            terms[m] = terms.get(m, 0) + parse_rational(t["coeff"])
        return cls(n, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        labels = basis(self.n)
        parts = []
        for m, c in self.sorted_terms():
            word = "*".join(
                str(labels[i]) + (f"^{e}" if e > 1 else "") for i, e in enumerate(m) if e
            )
            mag = abs(c)
            if not word:
                body = format_rational(mag)
            elif mag == 1:
                body = word
            else:
                body = f"{format_rational(mag)}*{word}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __repr__ = __str__


def _dim(n: int) -> int:
    return VarTable.for_n(n).dim


class EnvelopingAlgebra:
    """Memo tables for U(gal(n)); results do not depend on call order."""

    def __init__(self, n: int):
        self.n = n
        self.dim = _dim(n)
        sc = structure_constants(n)
        self._bracket = {
            (a, b): tuple(sorted(sc.bracket(a, b).items()))
            for a in range(self.dim)
            for b in range(self.dim)
            if a > b and sc.bracket(a, b)
        }
        self._left: dict = {}
        self._sym: dict = {}

    def left_mul(self, i: int, mono: tuple) -> dict:
        """``Z_i * Z^mono`` in PBW form (shared dict: do not mutate)."""
        key = (i, mono)
        hit = self._left.get(key)
        if hit is not None:
            return hit
        j = next((p for p, e in enumerate(mono) if e), None)
        if j is None or i <= j:
            m = list(mono)
            m[i] += 1
            out = {tuple(m): Fraction(1)}
        else:
            # Z_i Z_j R = Z_j (Z_i R) + [Z_i, Z_j] R with R = Z^(mono - e_j)
            m = list(mono)
            m[j] -= 1
            rest = tuple(m)
            out = {}
            for mono2, c in self.left_mul(i, rest).items():
                _k.accumulate(out, self.left_mul(j, mono2), c)
            for c_idx, coeff in self._bracket.get((i, j), ()):
                _k.accumulate(out, self.left_mul(c_idx, rest), coeff)
        self._left[key] = out
        return out

    def left_mul_element(self, i: int, terms: dict) -> dict:
        out: dict = {}
        for mono, c in terms.items():
            _k.accumulate(out, self.left_mul(i, mono), c)
        return out

    def word_times(self, letters: Sequence[int], terms: dict) -> dict:
        """``Z_{l1} ... Z_{lk} * terms``."""
        out = terms
        for i in reversed(letters):
            out = self.left_mul_element(i, out)
        return out

    def symmetrized_monomial(self, alpha: tuple) -> dict:
        """Average of all orderings of the letters of ``alpha``, in PBW form.

        Uses ``sym(a) = sum_i (a_i/|a|) Z_i sym(a - e_i)``: choosing the first
        letter with probability a_i/|a| and averaging the rest is the uniform
        average over distinct arrangements.
        """
        hit = self._sym.get(alpha)
        if hit is not None:
            return hit
        total = sum(alpha)
        if total <= 1:
            out = {alpha: Fraction(1)}
        else:
            out = {}
            for i, e in enumerate(alpha):
                if not e:
                    continue
                m = list(alpha)
                m[i] -= 1
                inner = self.symmetrized_monomial(tuple(m))
                _k.accumulate(out, self.left_mul_element(i, inner), Fraction(e, total))
        self._sym[alpha] = out
        return out


@lru_cache(maxsize=None)
def algebra(n: int) -> EnvelopingAlgebra:
    return EnvelopingAlgebra(n)


def _indices(word: Iterable, n: int) -> list[int]:
    out = []
    for w in word:
        label = BasisLabel.parse(w) if isinstance(w, str) else w
        if isinstance(label, BasisLabel):
            if not label.valid_for(n):
                raise ValueError(f"{label} is not a basis element of gal({n})")
            out.append(label.index(n))
        else:
            idx = int(label)
            if not 0 <= idx < _dim(n):
                raise ValueError(f"basis index {idx} out of range for gal({n})")
            out.append(idx)
    return out


def normal_order(word: Sequence, n: int) -> UEAElement:
    """PBW form of the product of the letters of ``word`` (labels or indices)."""
    ua = algebra(n)
    letters = _indices(word, n)
    return UEAElement._raw(n, ua.word_times(letters, UEAElement.one(n).terms))


def _expand(mono: tuple) -> list[int]:
    return [i for i, e in enumerate(mono) for _ in range(e)]


def multiply(a: UEAElement, b: UEAElement) -> UEAElement:
    if a.n != b.n:
        raise ValueError(f"elements of U(gal({a.n})) and U(gal({b.n})) do not mix")
    ua = algebra(a.n)
    out: dict = {}
    for mono, c in a.terms.items():
        _k.accumulate(out, ua.word_times(_expand(mono), b.terms), c)
    return UEAElement._raw(a.n, out)


def commutator(a: UEAElement, b: UEAElement) -> UEAElement:
    return multiply(a, b) - multiply(b, a)


def symmetrize(p: MultiPoly) -> UEAElement:
    """Full symmetrization of ``p`` (variables read as basis elements)."""
    n = p.vt.n
    ua = algebra(n)
    d = ua.dim
    out: dict = {}
    for key, c in p._terms.items():
        alpha = [0] * d
        for i, e in _k.decode(key, d):
            alpha[i] = e
        _k.accumulate(out, ua.symmetrized_monomial(tuple(alpha)), Fraction(c))
    return UEAElement._raw(n, out)


@dataclass(frozen=True)
class CentralityResult:
    central: bool
    witness: BasisLabel | None = None
    residue: UEAElement | None = None

    def __bool__(self):
        return self.central


def is_central(u: UEAElement, n: int | None = None) -> CentralityResult:
    """Check ``[u, Z] = 0`` for every basis element Z (generators suffice)."""
    n = u.n if n is None else n
    if n != u.n:
        raise ValueError("element lives in a different algebra")
    for label in basis(n):
        r = commutator(u, UEAElement.generator(label, n))
        if r:
            return CentralityResult(False, label, r)
    return CentralityResult(True)


def degree_drop_check(p: MultiPoly, q: MultiPoly) -> bool:
    """``lambda(pq) - lambda(p) lambda(q)`` is zero or of degree < deg p + deg q."""
    if p.vt != q.vt:
        raise ValueError("polynomials over different variable tables")
    diff = symmetrize(p * q) - multiply(symmetrize(p), symmetrize(q))
    if not diff:
        return True
    return diff.degree() < max(p.degree(), 0) + max(q.degree(), 0)


def central_elements(n: int, max_degree: int | None = None, generators=None) -> list[dict]:
    """``lambda(Q_j)`` for the generators of degree <= max_degree, with centrality."""
    from .invariants import generator_set

    gens = generators if generators is not None else generator_set(n)
    out = []
    for name, deg, poly in gens:
        if max_degree is not None and deg > max_degree:
            continue
        u = symmetrize(poly)
        res = is_central(u)
        entry = {"name": name, "degree": deg, "central": res.central}
        entry["terms"] = u.to_json()["terms"]
        if not res.central:
            entry["witness"] = str(res.witness)
        out.append(entry)
    return out
