"""Floating-point reduction of a dual element to the transversal normal form.

The normal form has ``x* = A e_1``, ``v* = B e_2``, ``t* = 0``, no ``K*`` entries
in rows/columns 1 and 2, and the lower ``(n-2) x (n-2)`` block of ``K*`` in
maximal-torus form ``diag([[0, th_j], [-th_j, 0]], ..., 0)`` with
``th_1 >= th_2 >= ... >= 0``.  Four steps get there: a rotation, a time shift,
a boost/translation, and a rotation of the lower block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg

from .polyring import VarTable, parse_rational

DEGENERACY_TOL = 1e-9
RESIDUAL_TOL = 1e-10
SKEW_TOL = 1e-12


@dataclass(frozen=True)
class FloatDual:
    """Float mirror of a dual vector."""

    Kstar: np.ndarray
    vstar: np.ndarray
    xstar: np.ndarray
    tstar: float

    def __post_init__(self):
        K = np.array(self.Kstar, dtype=float)
        n = K.shape[0] if K.ndim == 2 else len(self.vstar)
        if K.size == 0:
            K = np.zeros((n, n))
        v = np.array(self.vstar, dtype=float).reshape(-1)
        x = np.array(self.xstar, dtype=float).reshape(-1)
        if K.shape != (n, n) or v.shape != (n,) or x.shape != (n,):
            raise ValueError("inconsistent shapes in dual vector")
        if n and np.max(np.abs(K + K.T)) > SKEW_TOL:
            raise ValueError("Kstar is not skew-symmetric")
        object.__setattr__(self, "Kstar", (K - K.T) / 2)
        object.__setattr__(self, "vstar", v)
        object.__setattr__(self, "xstar", x)
        object.__setattr__(self, "tstar", float(self.tstar))

    @property
    def n(self) -> int:
        return len(self.vstar)

    @classmethod
    def from_coords(cls, n: int, coords: Sequence[float]) -> "FloatDual":
        vt = VarTable.for_n(n)
        if len(coords) != vt.dim:
            raise ValueError(f"expected {vt.dim} coordinates")
        c = [float(x) for x in coords]
        K = np.zeros((n, n))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                K[i - 1, j - 1] = c[vt.k(i, j)]
                K[j - 1, i - 1] = -c[vt.k(i, j)]
        v = [c[vt.v(i)] for i in range(1, n + 1)]
        x = [c[vt.x(i)] for i in range(1, n + 1)]
        return cls(K, v, x, c[vt.t])

    def coords(self) -> list[float]:
        n = self.n
        out = [float(self.Kstar[i, j]) for i in range(n) for j in range(i + 1, n)]
        return out + self.vstar.tolist() + self.xstar.tolist() + [self.tstar]

    def matrix(self) -> np.ndarray:
        n = self.n
        m = np.zeros((n + 2, n + 2))
        m[:n, :n] = self.Kstar
        m[:n, n] = self.vstar
        m[:n, n + 1] = self.xstar
        m[n, n + 1] = self.tstar
        return m

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "FloatDual":
        n = m.shape[0] - 2
        K = (m[:n, :n] - m[:n, :n].T) / 2
        return cls(K, m[:n, n], m[:n, n + 1], m[n, n + 1])

    @classmethod
    def from_json(cls, data) -> "FloatDual":
        def num(x) -> float:
            if isinstance(x, (int, float)) and not isinstance(x, bool):
                return float(x)
            if isinstance(x, str):
                return float(Fraction(parse_rational(x)))
            raise ValueError(f"not a number: {x!r}")

        try:
            n = int(data["n"])
            K = [[num(x) for x in row] for row in data["Kstar"]] if n else []
            out = cls(
                np.array(K, dtype=float).reshape(n, n),
                [num(x) for x in data["vstar"]],
                [num(x) for x in data["xstar"]],
                num(data["tstar"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed dual vector JSON: {exc}") from exc
        if out.n != n:
            raise ValueError("declared n does not match vector lengths")
        return out

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "n": self.n,
            "Kstar": self.Kstar.tolist(),
            "vstar": self.vstar.tolist(),
            "xstar": self.xstar.tolist(),
            "tstar": self.tstar,
        }

    @classmethod
    def from_exact(cls, xi) -> "FloatDual":
        return cls(
            np.array([[float(x) for x in row] for row in xi.Kstar]).reshape(xi.n, xi.n),
            [float(x) for x in xi.vstar],
            [float(x) for x in xi.xstar],
            float(xi.tstar),
        )


def group_matrix(rho=None, boost=None, trans=None, time: float = 0.0, n: int | None = None):
    """Float (n+2)x(n+2) group matrix ``[[rho, boost, trans], [0, 1, time], [0, 0, 1]]``."""
    if n is None:
        n = len(rho) if rho is not None else len(boost if boost is not None else trans)
    g = np.eye(n + 2)
    if rho is not None:
        g[:n, :n] = rho
    if boost is not None:
        g[:n, n] = boost
    if trans is not None:
        g[:n, n + 1] = trans
    g[n, n + 1] = time
    return g


def group_inverse(g: np.ndarray) -> np.ndarray:
    n = g.shape[0] - 2
    rt = g[:n, :n].T
    w = g[:n, n:]
    u_inv = np.array([[1.0, -g[n, n + 1]], [0.0, 1.0]])
    out = np.eye(n + 2)
    out[:n, :n] = rt
    out[:n, n:] = -rt @ w @ u_inv
    out[n:, n:] = u_inv
    return out


def coadjoint_float(g: np.ndarray, xi: FloatDual) -> FloatDual:
    """Same convention as the exact action: class of ``(g M^T g^-1)^T``."""
    m = xi.matrix()
    r = (g @ m.T @ group_inverse(g)).T
    return FloatDual.from_matrix(r)


@dataclass(frozen=True)
class TransversalForm:
    A: float
    B: float
    thetas: tuple
    degenerate: bool = False
    reason: str = ""

    def to_json(self) -> dict:
        out = {
            "A": self.A,
            "B": self.B,
            "thetas": list(self.thetas),
            "degenerate": self.degenerate,
        }
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class ReductionTrace:
    n: int
    steps: list = field(default_factory=list)  # [(label, group matrix), ...]
    final: FloatDual | None = None

    def add(self, label: str, g: np.ndarray) -> None:
        self.steps.append((label, g))

    def composite(self) -> np.ndarray:
        """``g_k ... g_1``: the single group element doing all the steps."""
        out = np.eye(self.n + 2)
        for _, g in self.steps:
            out = g @ out
        return out

    def labels(self) -> list[str]:
        return [label for label, _ in self.steps]

    def is_identity(self, tol: float = RESIDUAL_TOL) -> bool:
        return bool(np.max(np.abs(self.composite() - np.eye(self.n + 2))) <= tol)

    def to_json(self) -> list:
        return [{"step": label, "matrix": g.tolist()} for label, g in self.steps]


def skew_canonical(K: np.ndarray, tol: float = RESIDUAL_TOL) -> tuple[np.ndarray, list[float]]:
    """Orthogonal ``Q`` with ``Q^T K Q`` in torus form, angles descending and >= 0.

    Uses the real Schur form, which for a skew (normal) matrix is already block
    diagonal; blocks are then sign-fixed and sorted.
    """
    K = np.asarray(K, dtype=float)
    m = K.shape[0]
    if K.shape != (m, m):
        raise ValueError("skew_canonical needs a square matrix")
    if m == 0:
        return np.eye(0), []
    if np.max(np.abs(K + K.T)) > SKEW_TOL * max(1.0, np.max(np.abs(K))):
        raise ValueError("matrix is not skew-symmetric")
    K = (K - K.T) / 2
    if _is_canonical(K, tol):
        return np.eye(m), [float(K[2 * j, 2 * j + 1]) for j in range(m // 2)]
    T, Z = scipy.linalg.schur(K, output="real")
    blocks = []  # (theta, col_a, col_b)
    singles = []
    i = 0
    while i < m:
        if i + 1 < m and abs(T[i + 1, i]) > 0.0:
            a, b = i, i + 1
            theta = (T[a, b] - T[b, a]) / 2
            if theta < 0:
                a, b, theta = b, a, -theta
            blocks.append((theta, a, b))
            i += 2
        else:
            singles.append(i)
            i += 1
    # stable: ties keep Schur order
    blocks.sort(key=lambda t: -t[0])
    cols = []
    angles = []
    for theta, a, b in blocks:
        cols += [a, b]
        angles.append(float(theta))
    while len(angles) < m // 2:
        angles.append(0.0)
    cols += singles
    Q = Z[:, cols]
    return Q, angles


def _is_canonical(K: np.ndarray, tol: float) -> bool:
    m = K.shape[0]
    pattern = np.zeros_like(K, dtype=bool)
    prev = math.inf
    for j in range(m // 2):
        a, b = 2 * j, 2 * j + 1
        pattern[a, b] = pattern[b, a] = True
        th = K[a, b]
        if th < 0 or th > prev:
            return False
        prev = th
    off = np.abs(np.where(pattern, 0.0, K))
    return bool(off.max(initial=0.0) <= tol)


def _orthonormal_frame(first: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Rows: the given orthonormal vectors, then the standard basis made orthogonal.

    When the given vectors are already ``e_1, e_2`` the frame is the identity.
    """
    rows = [np.asarray(f, dtype=float) for f in first]
    for k in range(n):
        if len(rows) == n:
            break
        e = np.zeros(n)
        e[k] = 1.0
        for _ in range(2):
            for r in rows:
                e = e - (r @ e) * r
        norm = np.linalg.norm(e)
        if norm > 0.5:
            rows.append(e / norm)
    return np.array(rows).reshape(n, n)


def pattern_residual(xi: FloatDual) -> float:
    """Largest entry that the transversal normal form requires to vanish."""
    n = xi.n
    parts = [abs(xi.tstar)]
    if n >= 2:
        parts.append(np.abs(xi.xstar[1:]).max())
        parts.append(abs(xi.vstar[0]))
    if n >= 3:
        parts.append(np.abs(xi.vstar[2:]).max())
    if n == 1:
        parts.append(abs(xi.vstar[0]))
    K = xi.Kstar
    if n >= 2:
        parts.append(np.abs(K[:2, :]).max())
    if n >= 4:
        low = K[2:, 2:]
        m = n - 2
        mask = np.ones((m, m), dtype=bool)
        for j in range(m // 2):
            mask[2 * j, 2 * j + 1] = mask[2 * j + 1, 2 * j] = False
        parts.append(np.abs(low[mask]).max(initial=0.0))
        th = [low[2 * j, 2 * j + 1] for j in range(m // 2)]
        # order and sign are part of the pattern
        parts += [max(0.0, -t) for t in th]
        parts += [max(0.0, th[j + 1] - th[j]) for j in range(len(th) - 1)]
    elif n == 3:
        parts.append(abs(K[2, 2]))
    return float(max(parts))


def reduce(xi: FloatDual, tol: float = DEGENERACY_TOL) -> tuple[TransversalForm, ReductionTrace]:
    n = xi.n
    trace = ReductionTrace(n)
    cur = xi

    def step(label, g):
        nonlocal cur
        trace.add(label, g)
        cur = coadjoint_float(g, cur)

    x = cur.xstar
    A = float(np.linalg.norm(x))
    if A <= tol:
        trace.final = cur
        return TransversalForm(A, 0.0, (), True, "x* vanishes"), trace
    e1 = x / A
    v = cur.vstar
    w = v - (e1 @ v) * e1
    B = float(np.linalg.norm(w)) if n >= 2 else 0.0
    if n == 1:
        frame = np.array([[1.0 if x[0] > 0 else -1.0]])
    elif B > tol:
        frame = _orthonormal_frame([e1, w / B], n)
    else:
        frame = _orthonormal_frame([e1], n)
    step("rotation", group_matrix(rho=frame))
    # x* = A e1 now; v* = C e1 + B e2
    C = float(cur.vstar[0])
    step("time-shift", group_matrix(time=-C / A, n=n))
    if n >= 2 and B <= tol:
        trace.final = cur
        return TransversalForm(A, B, (), True, "v* is parallel to x*"), trace

    K = cur.Kstar
    boost = np.zeros(n)
    trans = np.zeros(n)
    boost[0] = cur.tstar / A
    if n >= 2:
        Bc = float(cur.vstar[1])
        trans[1] = (-2 * K[0, 1] + Bc * boost[0]) / A
        for j in range(2, n):
            trans[j] = -2 * K[0, j] / A
            boost[j] = -2 * K[1, j] / Bc
    step("boost-translation", group_matrix(boost=boost, trans=trans, n=n))

    thetas: list[float] = []
    if n >= 4:
        Q, thetas = skew_canonical(cur.Kstar[2:, 2:])
        rho = np.eye(n)
        rho[2:, 2:] = Q.T
        step("torus-rotation", group_matrix(rho=rho))
        thetas = [float(cur.Kstar[2 + 2 * j, 3 + 2 * j]) for j in range((n - 2) // 2)]
    trace.final = cur
    A_out = float(cur.xstar[0])
    B_out = float(cur.vstar[1]) if n >= 2 else 0.0
    return TransversalForm(A_out, B_out, tuple(thetas)), trace


def elementary_symmetric(values: Sequence[float], k: int) -> float:
    if k == 0:
        return 1.0
    # e_k via the standard recurrence (no subset enumeration)
    e = [1.0] + [0.0] * k
    for v in values:
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * v
    return e[k]


def closed_form_invariants(t: TransversalForm, n: int | None = None) -> list[float]:
    """``[A^2, A^2 B^2, A^2 B^2 e_1(th^2), A^2 B^2 e_2(th^2), ...]``.

    ``n`` trims the list to the generator count of gal(n) (``n = 1`` has only
    ``A^2``); by default the length follows the number of angles.
    """
    if t.degenerate:
        raise ValueError("closed forms are only defined for non-degenerate normal forms")
    a2 = t.A * t.A
    if n == 1:
        return [a2]
    ab = a2 * t.B * t.B
    sq = [th * th for th in t.thetas]
    return [a2, ab] + [ab * elementary_symmetric(sq, k) for k in range(1, len(sq) + 1)]


def random_float_dual(n: int, rng: np.random.Generator) -> FloatDual:
    """Entries uniform in [-1, 1]."""
    dim = VarTable.for_n(n).dim
    return FloatDual.from_coords(n, rng.uniform(-1.0, 1.0, size=dim).tolist())


def gram_schmidt_AB(xi: FloatDual) -> tuple[float, float]:
    """``A = |x*|`` and ``B = |proj_{x*-perp} v*|`` computed directly."""
    A = float(np.linalg.norm(xi.xstar))
    if A == 0:
        return 0.0, 0.0
    e1 = xi.xstar / A
    w = xi.vstar - (e1 @ xi.vstar) * e1
    return A, float(np.linalg.norm(w))

