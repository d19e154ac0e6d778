"""Exact sparse multivariate polynomials over the rationals.

Polynomials live on the dual space of gal(n); their variables are the dual
coordinates ``K_i_j`` (1 <= i < j <= n), ``V_1..V_n``, ``X_1..X_n`` and ``T``,
in that fixed order.  Coefficients are ``int`` or ``fractions.Fraction`` and
arithmetic never rounds.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import kernels as _k

Rational = Union[int, Fraction]

#: Largest total degree a polynomial may reach; bounds every packed exponent.
MAX_DEGREE = (1 << _k.EXP_BITS) - 1


def as_rational(x) -> Rational:
    """Coerce ``int``, ``Fraction`` or a ``"p/q"`` string to an exact rational."""
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def parse_rational(s: str) -> Rational:
    s = s.strip()
    num, sep, den = s.partition("/")
    try:
        if not sep:
            return int(num)
        q = Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {s!r}") from exc
    return q.numerator if q.denominator == 1 else q


def format_rational(c: Rational) -> str:
    return str(Fraction(c))


class VarTable:
    """Ordered variable symbols for gal(n)*.

    Use :meth:`for_n`; instances are shared per ``n``.
    """

    __slots__ = ("n", "names", "index", "dim")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        self.n = n
        names = [f"K_{i}_{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        names += [f"V_{i}" for i in range(1, n + 1)]
        names += [f"X_{i}" for i in range(1, n + 1)]
        names.append("T")
        self.names = tuple(names)
        self.index = {name: i for i, name in enumerate(names)}
        self.dim = len(names)

    @staticmethod
    @lru_cache(maxsize=None)
    def for_n(n: int) -> "VarTable":
        return VarTable(n)

    def __eq__(self, other):
        return isinstance(other, VarTable) and other.n == self.n

    def __hash__(self):
        return hash(("VarTable", self.n))

    def __repr__(self):
        return f"VarTable(n={self.n})"

    def __len__(self):
        return self.dim

    # Index helpers, 1-based like the math.
    def k(self, i: int, j: int) -> int:
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"no variable K_{i}_{j} for n={self.n}")
        if i > j:
            i, j = j, i
        # row-major offset into the strict upper triangle
        return (i - 1) * self.n - (i - 1) * i // 2 + (j - i - 1)

    def v(self, i: int) -> int:
        self._check(i)
        return self.n * (self.n - 1) // 2 + i - 1

    def x(self, i: int) -> int:
        self._check(i)
        return self.n * (self.n - 1) // 2 + self.n + i - 1

    @property
    def t(self) -> int:
        return self.dim - 1

    def _check(self, i):
        if not 1 <= i <= self.n:
            raise IndexError(f"index {i} out of range for n={self.n}")

    def resolve(self, var) -> int:
        if isinstance(var, str):
            try:
                return self.index[var]
            except KeyError:
                raise KeyError(f"unknown variable {var!r} for n={self.n}") from None
        if not 0 <= var < self.dim:
            raise IndexError(f"variable index {var} out of range")
        return var

    def latex_name(self, i: int) -> str:
        parts = self.names[i].split("_")
        if len(parts) == 1:
            return parts[0]
        return f"{parts[0]}_{{{','.join(parts[1:])}}}"


def _one(i: int) -> int:
    return 1 << (_k.EXP_BITS * i)


#: Below this many terms the scalar kernel beats the vectorized evaluation.
_VECTOR_MIN_TERMS = 256


def _integer_point(point: Sequence) -> tuple[int, list[int]]:
    """Common denominator ``D`` and the integer point ``D * point``."""
    q = [Fraction(as_rational(x)) for x in point]
    den = 1
    for x in q:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return den, [x.numerator * (den // x.denominator) for x in q]


@lru_cache(maxsize=1 << 16)
def _decode(key: int, nvars: int) -> tuple:
    return _k.decode(key, nvars)


def _key_degree(key: int, nvars: int) -> int:
    return sum(e for _, e in _decode(key, nvars))


class MultiPoly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("vt", "_terms", "_deg", "_split", "_dense")

    def __init__(self, vt: VarTable, terms: Mapping[int, Rational] | None = None):
        # ``terms`` maps packed keys to nonzero coefficients and is not copied.
        self.vt = vt
        self._terms = {} if terms is None else terms
        self._deg = None
        self._split = None
        self._dense = None

    # -- construction ------------------------------------------------------
    @classmethod
    def zero(cls, vt: VarTable) -> "MultiPoly":
        return cls(vt, {})

    @classmethod
    def const(cls, vt: VarTable, c) -> "MultiPoly":
        c = as_rational(c)
        return cls(vt, {0: c} if c else {})

    @classmethod
    def var(cls, vt: VarTable, var) -> "MultiPoly":
        return cls(vt, {_one(vt.resolve(var)): 1})

    @classmethod
    def from_terms(
        cls, vt: VarTable, terms: Iterable[tuple[Mapping, object]]
    ) -> "MultiPoly":
        """Build from ``(exponents, coeff)`` pairs; exponents map names or indices."""
        acc: dict[int, Rational] = {}
        for exps, c in terms:
            key = 0
            deg = 0
            for var, e in exps.items():
                if e < 0:
                    raise ValueError("negative exponent")
                key += _one(vt.resolve(var)) * e
                deg += e
            if deg > MAX_DEGREE or any(e > MAX_DEGREE for e in exps.values()):
                raise OverflowError(f"degree exceeds {MAX_DEGREE}")
            _k.accumulate(acc, {key: as_rational(c)}, 1)
        return cls(vt, acc)

    # -- inspection --------------------------------------------------------
    @property
    def n(self) -> int:
        return self.vt.n

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _term_degrees(self):
        if len(self._terms) >= _VECTOR_MIN_TERMS:
            return self.dense()[0].sum(axis=1, dtype=np.int64).tolist()
        nv = self.vt.dim
        return [_key_degree(k, nv) for k in self._terms]

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            self._deg = max(self._term_degrees(), default=-1)
        return self._deg

    def is_homogeneous(self) -> bool:
        return len(set(self._term_degrees())) <= 1

    def terms(self) -> Iterator[tuple[dict[str, int], Fraction]]:
        """Yield ``({name: exponent}, coefficient)`` in canonical order."""
        names = self.vt.names
        for key in self._sorted_keys():
            exps = {names[i]: e for i, e in _decode(key, self.vt.dim)}
            yield exps, Fraction(self._terms[key])

    def coefficient(self, exps: Mapping) -> Fraction:
        key = sum(_one(self.vt.resolve(v)) * e for v, e in exps.items())
        return Fraction(self._terms.get(key, 0))

    def variables(self) -> set[int]:
        out: set[int] = set()
        for k in self._terms:
            out.update(i for i, _ in _decode(k, self.vt.dim))
        return out

    def split(self) -> dict:
        """Cached ``{variable: [(key, coeff), ...]}`` index used by derivations."""
        if self._split is None:
            self._split = _k.split_by_variable(self._terms)
        return self._split

    def _sorted_keys(self) -> list[int]:
        nv = self.vt.dim

        def order(key):
            dense = [0] * nv
            for i, e in _decode(key, nv):
                dense[i] = -e
            # higher total degree first, then lexicographic in table order
            return (sum(dense), dense)

        return sorted(self._terms, key=order)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.vt != self.vt:
                raise ValueError(
                    f"variable tables differ: n={self.vt.n} vs n={other.vt.n}"
                )
            return other
        return MultiPoly.const(self.vt, other)

    def __add__(self, other):
        other = self._coerce(other)
        return MultiPoly(self.vt, _k.add_terms(self._terms, other._terms))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vt, _k.scale_terms(self._terms, -1))

    def __sub__(self, other):
        other = self._coerce(other)
        return MultiPoly(
            self.vt, _k.add_terms(self._terms, _k.scale_terms(other._terms, -1))
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                s = as_rational(other)
            except TypeError:
                return NotImplemented
            return MultiPoly(self.vt, _k.scale_terms(self._terms, s))
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return MultiPoly.zero(self.vt)
        if self.degree() + other.degree() > MAX_DEGREE:
            raise OverflowError(f"product degree exceeds {MAX_DEGREE}")
        if other is self:
            return MultiPoly(self.vt, _k.square_terms(self._terms))
        return MultiPoly(self.vt, _k.mul_terms(self._terms, other._terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = as_rational(other)
        if not s:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (Fraction(1) / s)

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = MultiPoly.const(self.vt, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vt == other.vt and self._terms == other._terms
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self._terms == ({0: c} if c else {})

    def __hash__(self):
        return hash((self.vt.n, frozenset(self._terms.items())))

    # -- calculus and evaluation ------------------------------------------
    def partial(self, var) -> "MultiPoly":
        i = self.vt.resolve(var)
        return MultiPoly(self.vt, _k.partial_terms(self._terms, _k.EXP_BITS * i))

    def _check_point(self, point: Sequence) -> None:
        if len(point) != self.vt.dim:
            raise ValueError(
                f"point has {len(point)} coordinates, expected {self.vt.dim}"
            )

    def evaluate(self, point: Sequence) -> Fraction:
        """Exact value at a rational point (length = number of variables)."""
        self._check_point(point)
        den, ints = _integer_point(point)
        if len(self._terms) < _VECTOR_MIN_TERMS:
            graded = _k.evaluate_graded(self._terms, ints)
        else:
            monos, coeffs, deg = self._term_values(ints)
            vals = monos * coeffs
            graded = {int(d): sum(vals[deg == d].tolist()) for d in np.unique(deg)}
        return sum((Fraction(s) / den**d for d, s in graded.items()), Fraction(0))

    def _term_values(self, ints: Sequence[int]):
        """Object arrays ``P^alpha_t`` (integers), ``c_t``, and the term degrees."""
        exps, _ = self.dense()
        monos = np.ones(len(self._terms), dtype=object)
        for j in np.nonzero(exps.any(axis=0))[0]:
            col = exps[:, j]
            powers = np.array([ints[j] ** e for e in range(int(col.max()) + 1)], dtype=object)
            monos *= powers[col]
        coeffs = np.array(list(self._terms.values()), dtype=object)
        return monos, coeffs, exps.sum(axis=1, dtype=np.int64)

    def gradient(self, point: Sequence) -> list[Fraction]:
        """Exact gradient at a rational point, one entry per variable."""
        self._check_point(point)
        den, ints = _integer_point(point)
        nv = self.vt.dim
        out = [Fraction(0)] * nv
        if not self._terms:
            return out
        exps, _ = self.dense()
        monos, coeffs, deg = self._term_values(ints)
        for b in np.nonzero(exps.any(axis=0))[0]:
            b = int(b)
            rows = np.nonzero(exps[:, b])[0]
            if ints[b]:
                # c * e_b * P^(alpha - e_b), exact since P_b^e_b divides the value
                contrib = (monos[rows] // ints[b]) * coeffs[rows] * exps[rows, b].astype(object)
                dsub = deg[rows]
                out[b] = sum(
                    (Fraction(sum(contrib[dsub == d].tolist()), den ** (int(d) - 1))
                     for d in np.unique(dsub)),
                    Fraction(0),
                )
            else:
                out[b] = self.partial(b).evaluate(point)
        return out

    def dense(self):
        """Cached ``(exponents uint8 [terms x vars], float coefficients)``."""
        if self._dense is None:
            nv = self.vt.dim
            nbytes = nv * _k.EXP_BITS // 8
            raw = b"".join(k.to_bytes(nbytes, "little") for k in self._terms)
            exps = np.frombuffer(raw, dtype=np.uint8).reshape(len(self._terms), nv)
            coeffs = np.array([float(c) for c in self._terms.values()], dtype=float)
            self._dense = (exps, coeffs)
        return self._dense

    def evaluate_float(self, point: Sequence[float]) -> float:
        """Float value; terms are summed with ``math.fsum`` to limit cancellation."""
        self._check_point(point)
        if not self._terms:
            return 0.0
        exps, coeffs = self.dense()
        vals = np.asarray(point, dtype=float)
        used = np.nonzero(exps.any(axis=0))[0]
        terms = coeffs.copy()
        for j in used:
            col = exps[:, j]
            terms *= vals[j] ** col
        return math.fsum(terms.tolist())

    def substitute_linear(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose with the substitution ``u_i -> images[i]``."""
        if len(images) != self.vt.dim:
            raise ValueError("need one image per variable")
        used = self.variables()
        fast = []
        targets = set()
        for i, img in enumerate(images):
            img = self._coerce(img)
            if i not in used:
                fast.append((0, 1))
                continue
            if len(img._terms) == 1:
                (key, c), = img._terms.items()
                if key and _key_degree(key, self.vt.dim) == 1 and key not in targets:
                    targets.add(key)
                    fast.append((key, c))
                    continue
            fast = None
            break
        if fast is not None:
            return MultiPoly(self.vt, _k.substitute_monomial(self._terms, fast))
        return self._substitute_general([self._coerce(p) for p in images])

    def _substitute_general(self, images):
        powers: dict[tuple[int, int], MultiPoly] = {}

        def power(i, e):
            p = powers.get((i, e))
            if p is None:
                p = images[i] if e == 1 else power(i, e - 1) * images[i]
                powers[(i, e)] = p
            return p

        acc: dict[int, Rational] = {}
        for key, c in self._terms.items():
            term = MultiPoly.const(self.vt, c)
            for i, e in _decode(key, self.vt.dim):
                term = term * power(i, e)
            _k.accumulate(acc, term._terms, 1)
        return MultiPoly(self.vt, acc)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.vt.n,
            "terms": [
                {"coeff": format_rational(c), "exps": exps} for exps, c in self.terms()
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        try:
            vt = VarTable.for_n(int(data["n"]))
            raw = data["terms"]
            pairs = []
            for t in raw:
                exps = t["exps"]
                if any(not isinstance(e, int) or e <= 0 for e in exps.values()):
                    raise ValueError("exponents must be positive integers")
                pairs.append((exps, parse_rational(str(t["coeff"]))))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from exc
        return cls.from_terms(vt, pairs)

    @classmethod
    def loads(cls, s: str) -> "MultiPoly":
        return cls.from_json(json.loads(s))

    def _render(self, name_of, coeff_fmt, power_fmt, sep) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for key in self._sorted_keys():
            c = Fraction(self._terms[key])
            factors = [
                name_of(i) if e == 1 else power_fmt(name_of(i), e)
                for i, e in _decode(key, self.vt.dim)
            ]
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if not factors:
                body = coeff_fmt(mag)
            elif mag == 1:
                body = sep.join(factors)
            else:
                body = coeff_fmt(mag) + sep + sep.join(factors)
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self._render(
            lambda i: self.vt.names[i], str, lambda v, e: f"{v}^{e}", "*"
        )

    def to_latex(self) -> str:
        def frac(c: Fraction) -> str:
            if c.denominator == 1:
                return str(c.numerator)
            return f"\\frac{{{c.numerator}}}{{{c.denominator}}}"

        return self._render(
            self.vt.latex_name, frac, lambda v, e: f"{v}^{{{e}}}", " "
        )

    def __repr__(self):
        return f"MultiPoly(n={self.vt.n}, {self})"


# Functional spellings of the ring operations.
def add(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a + b


def mul(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    return a * b


def partial(p: MultiPoly, var) -> MultiPoly:
    return p.partial(var)


def evaluate(p: MultiPoly, point: Sequence) -> Fraction:
    return p.evaluate(point)


def evaluate_float(p: MultiPoly, point: Sequence[float]) -> float:
    return p.evaluate_float(point)


def variables(vt: VarTable) -> list[MultiPoly]:
    """All coordinate functions, in table order."""
    return [MultiPoly.var(vt, i) for i in range(vt.dim)]
