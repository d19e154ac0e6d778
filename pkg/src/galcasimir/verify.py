"""Verification suites for the generating invariants.

Every check gets its own random generator seeded from ``(suite seed, check
name)``, so running checks concurrently or in a different order never changes
a result.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import exact
from .galilean import (
    _weights,
    basis,
    bracket_with_coordinate,
    coadjoint,
    coadjoint_matrix,
    derivation_rules,
    random_dual,
    random_group_element,
    random_rational,
    reflection,
    structure_constants,
)
from .invariants import (
    charpoly_coeffs,
    generator_set,
    k_type_count,
    minor_sum,
    paper_stated_count,
    q2,
)
from .orbitreduce import FloatDual, gram_schmidt_AB, random_float_dual
from .packed import pack
from .polyring import MultiPoly, VarTable

WORKERS_ENV = "GALCASIMIR_MAX_WORKERS"
MAX_SUITE_N = 8


@dataclass(frozen=True)
class CheckOutcome:
    passed: bool
    detail: str = ""
    witness: object = None

    def __bool__(self):
        return self.passed


def check_rng(seed: int, name: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _np_rng(seed: int, name: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def check_infinitesimal_invariance(Q: MultiPoly, n: int | None = None) -> CheckOutcome:
    """``{l_Z, Q} = 0`` exactly for every basis element Z."""
    n = Q.vt.n if n is None else n
    if Q.vt.n != n:
        raise ValueError("polynomial is not over gal(n)*")
    packed = pack(Q)
    failing = []
    for label in basis(n):
        if packed is not None:
            try:
                zero = packed.derivation_vanishes(derivation_rules(n, label.index(n))[0])
            except OverflowError:
                zero = not bracket_with_coordinate(label, Q)
        else:
            zero = not bracket_with_coordinate(label, Q)
        if not zero:
            failing.append(label)
    if not failing:
        return CheckOutcome(True, f"{len(basis(n))} brackets vanish")
    residual = bracket_with_coordinate(failing[0], Q)
    return CheckOutcome(
        False,
        f"{len(failing)} nonzero brackets, first with {failing[0]}: {_short(residual)}",
        (failing[0], residual),
    )


def _short(p, limit: int = 80) -> str:
    s = str(p)
    return s if len(s) <= limit else s[: limit - 3] + "..."


@lru_cache(maxsize=None)
def _reflection_images(n: int) -> tuple:
    vt = VarTable.for_n(n)
    m = coadjoint_matrix(reflection(n))
    images = []
    for a in range(vt.dim):
        img = MultiPoly.zero(vt)
        for b, c in enumerate(m[a]):
            if c:
                img = img + MultiPoly.var(vt, b) * c
        images.append(img)
    return tuple(images)


def reflection_pullback(Q: MultiPoly) -> MultiPoly:
    """``Q o Ad*(r)`` for the reflection ``r = diag(-1, 1, ..., 1)``."""
    return Q.substitute_linear(list(_reflection_images(Q.vt.n)))


def check_reflection_invariance(Q: MultiPoly, n: int | None = None) -> CheckOutcome:
    n = Q.vt.n if n is None else n
    if Q.vt.n != n:
        raise ValueError("polynomial is not over gal(n)*")
    diff = reflection_pullback(Q) - Q
    if not diff:
        return CheckOutcome(True, "fixed by the reflection")
    return CheckOutcome(False, f"pullback differs by {_short(diff)}", diff)


def check_group_invariance_sampled(
    Q, n: int | None = None, trials: int = 100, seed: int = 0, rng: random.Random | None = None
) -> CheckOutcome:
    """Exact ``Q(Ad*(g) xi) == Q(xi)`` on random rational ``(g, xi)``.

    ``Q`` may be one polynomial or a list; all share the sampled pairs.
    """
    polys = [Q] if isinstance(Q, MultiPoly) else list(Q)
    if not polys:
        return CheckOutcome(True, "nothing to check")
    n = polys[0].vt.n if n is None else n
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else check_rng(seed, "sampled")
    for t in range(trials):
        g = random_group_element(n, rng)
        xi = random_dual(n, rng)
        moved = coadjoint(g, xi).coords()
        base = xi.coords()
        for idx, P in enumerate(polys):
            before = P.evaluate(base)
            after = P.evaluate(moved)
            if before != after:
                return CheckOutcome(
                    False,
                    f"trial {t}: polynomial #{idx + 1} changes from {before} to {after}",
                    (g, xi),
                )
    return CheckOutcome(True, f"{trials} exact trials")


def jacobian_rank(Qs: Sequence[MultiPoly], point: Sequence) -> int:
    """Exact rank of ``[dQ_i/du_j](point)`` over the rationals."""
    if not Qs:
        return 0
    dim = Qs[0].vt.dim
    if len(point) != dim:
        raise ValueError(f"point has {len(point)} coordinates, expected {dim}")
    rows = [Q.gradient(point) for Q in Qs]
    return exact.rank(rows)


def random_point(n: int, rng: random.Random) -> list[Fraction]:
    """Random rational point with all coordinates nonzero."""
    out = []
    for _ in range(VarTable.for_n(n).dim):
        x = Fraction(0)
        while x == 0:
            x = random_rational(rng)
        out.append(x)
    return out


def certify_independence(
    Qs: Sequence[MultiPoly], n: int, rng: random.Random, attempts: int = 3
) -> tuple[int, int]:
    """Best Jacobian rank over up to ``attempts`` random points, and points used."""
    best = -1
    for k in range(1, attempts + 1):
        best = max(best, jacobian_rank(Qs, random_point(n, rng)))
        if best == len(Qs):
            return best, k
    return best, attempts


def structure_matrix(n: int, point: Sequence) -> list[list[Fraction]]:
    """``[xi([Z_a, Z_b])]`` at the dual point with the given coordinates."""
    sc = structure_constants(n)
    s = _weights(n)
    d = VarTable.for_n(n).dim
    u = [Fraction(x) for x in point]
    return [
        [sum((c * s[k] * u[k] for k, c in sc.bracket(a, b).items()), Fraction(0)) for b in range(d)]
        for a in range(d)
    ]


def coadjoint_index(n: int, rng: random.Random, attempts: int = 3) -> int:
    """``dim - generic rank`` of the structure matrix: the number of generic Casimirs."""
    d = VarTable.for_n(n).dim
    best = max(exact.rank(structure_matrix(n, random_point(n, rng))) for _ in range(attempts))
    return d - best


def _projected_K(xi: FloatDual) -> tuple[np.ndarray, float, float]:
    A, B = gram_schmidt_AB(xi)
    e1 = xi.xstar / A
    w = xi.vstar - (e1 @ xi.vstar) * e1
    e2 = w / B
    P = np.eye(xi.n) - np.outer(e1, e1) - np.outer(e2, e2)
    return P @ xi.Kstar @ P, A, B


def check_minor_charpoly_identity(
    n: int, trials: int = 50, seed: int = 0, tol: float = 1e-9, rng=None
) -> CheckOutcome:
    """Minor sums of ``K'`` against ``A^2 B^2 * c_2k(P K* P)`` on random float points."""
    if n < 4:
        raise ValueError("the identity involves K-type minors, which need n >= 4")
    rng = rng if rng is not None else _np_rng(seed, "minor-charpoly")
    sums = [(k, minor_sum(n, 2 * k + 4)) for k in range(0, k_type_count(n) + 1)]
    worst = 0.0
    done = 0
    while done < trials:
        xi = random_float_dual(n, rng)
        A, B = gram_schmidt_AB(xi)
        if A <= 1e-9 or B <= 1e-9:
            continue
        M, A, B = _projected_K(xi)
        coeffs = charpoly_coeffs(M)
        pt = xi.coords()
        for k, poly in sums:
            lhs = poly.evaluate_float(pt)
            rhs = A * A * B * B * coeffs[2 * k]
            err = abs(lhs - rhs) / max(1.0, abs(lhs))
            worst = max(worst, err)
            if err > tol:
                return CheckOutcome(
                    False, f"trial {done}, size {2 * k + 4}: {lhs!r} vs {rhs!r}", err
                )
        done += 1
    return CheckOutcome(True, f"{trials} trials, max relative error {worst:.1e}", worst)


def check_minor_sum_q2(n: int) -> CheckOutcome:
    if minor_sum(n, 4) == q2(n):
        return CheckOutcome(True, "minor_sum(n, 4) == Q2 exactly")
    return CheckOutcome(False, "minor_sum(n, 4) differs from Q2")


def check_centrality(Q: MultiPoly) -> CheckOutcome:
    from .envelope import is_central, symmetrize

    u = symmetrize(Q)
    res = is_central(u)
    if res.central:
        return CheckOutcome(True, f"lambda(Q) has {len(u.terms)} PBW terms and is central")
    return CheckOutcome(
        False, f"[lambda(Q), {res.witness}] = {_short(res.residue)}", res.witness
    )


def random_generator_product(gens: Sequence[MultiPoly], rng: random.Random, max_factors: int = 2):
    k = rng.randint(1, max_factors)
    out = gens[rng.randrange(len(gens))]
    for _ in range(k - 1):
        out = out * gens[rng.randrange(len(gens))]
    return out


def check_degree_drop(n: int, pairs: int = 20, seed: int = 0, rng=None, max_degree: int = 8):
    """``deg(lambda(pq) - lambda(p) lambda(q)) < deg p + deg q`` on products of generators."""
    from .envelope import degree_drop_check

    rng = rng if rng is not None else check_rng(seed, "degree-drop")
    gens = generator_set(n).poly_list()
    done = 0
    while done < pairs:
        p = random_generator_product(gens, rng)
        q = random_generator_product(gens, rng)
        if p.degree() + q.degree() > max_degree:
            continue
        if not degree_drop_check(p, q):
            return CheckOutcome(False, f"pair {done}: no degree drop", (p, q))
        done += 1
    return CheckOutcome(True, f"{pairs} pairs")


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckEntry:
    name: str
    passed: bool
    detail: str
    runtime: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


@dataclass
class VerificationReport:
    n: int
    seed: int
    trials: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self, include_runtime: bool = False) -> dict:
        checks = []
        for e in self.entries:
            item = {"name": e.name, "status": e.status, "detail": e.detail}
            if include_runtime:
                item["runtime"] = round(e.runtime, 3)
            checks.append(item)
        return {
            "schema": "v1",
            "n": self.n,
            "seed": self.seed,
            "trials": self.trials,
            "passed": self.passed,
            "checks": checks,
        }

    def dumps(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_json(include_runtime), indent=2, sort_keys=False) + "\n"

    def to_text(self, include_runtime: bool = False) -> str:
        lines = [f"gal({self.n}) verification, seed {self.seed}, {self.trials} trials"]
        width = max((len(e.name) for e in self.entries), default=0)
        for e in self.entries:
            extra = f" ({e.runtime:.2f}s)" if include_runtime else ""
            lines.append(f"  {e.status.upper():4}  {e.name:<{width}}  {e.detail}{extra}")
        lines.append("all checks passed" if self.passed else "SOME CHECKS FAILED")
        return "\n".join(lines) + "\n"


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _suite_checks(n, seed, trials, force_centrality_n4):
    gens = generator_set(n)
    checks: list[tuple[str, Callable[[], CheckOutcome]]] = []
    stated = paper_stated_count(n)

    def count_check():
        index = coadjoint_index(n, check_rng(seed, "generator-count"))
        ok = index == len(gens)
        return CheckOutcome(
            ok, f"shipped {len(gens)}, source-stated {stated}, coadjoint index {index}"
        )

    checks.append(("generator-count", count_check))
    for name, _, poly in gens:
        checks.append((f"infinitesimal:{name}", lambda p=poly: check_infinitesimal_invariance(p, n)))
    for name, _, poly in gens:
        checks.append((f"reflection:{name}", lambda p=poly: check_reflection_invariance(p, n)))
    for name, _, poly in gens:
        checks.append(
            (
                f"sampled:{name}",
                lambda p=poly, nm=name: check_group_invariance_sampled(
                    p, n, trials, rng=check_rng(seed, f"sampled:{nm}")
                ),
            )
        )

    def rank_check():
        rank, used = certify_independence(gens.poly_list(), n, check_rng(seed, "jacobian-rank"))
        return CheckOutcome(
            rank == len(gens), f"rank {rank} of {len(gens)} (points tried: {used})"
        )

    checks.append(("jacobian-rank", rank_check))
    if n >= 2:
        checks.append(("minor-sum-q2", lambda: check_minor_sum_q2(n)))
    if n >= 4:
        checks.append(
            ("minor-charpoly", lambda: check_minor_charpoly_identity(n, 50, seed=seed))
        )
    if n <= 3 or (n == 4 and force_centrality_n4):
        for name, _, poly in gens:
            checks.append((f"centrality:{name}", lambda p=poly: check_centrality(p)))
    if n <= 3:
        checks.append(("degree-drop", lambda: check_degree_drop(n, 20, seed=seed)))
    return checks


def _timed(fn):
    start = time.perf_counter()
    try:
        out = fn()
    except Exception as exc:  # a crashing check is a failing check
        out = CheckOutcome(False, f"error: {type(exc).__name__}: {exc}")
    return out, time.perf_counter() - start


def run_suite(
    n: int,
    seed: int = 0,
    trials: int = 100,
    force_centrality_n4: bool = False,
    workers: int | None = None,
) -> VerificationReport:
    if not 1 <= n <= MAX_SUITE_N:
        raise ValueError(f"verification supports 1 <= n <= {MAX_SUITE_N}, got {n}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    checks = _suite_checks(n, seed, trials, force_centrality_n4)
    if workers == 1:
        results = [_timed(fn) for _, fn in checks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_timed, [fn for _, fn in checks]))
    report = VerificationReport(n, seed, trials)
    for (name, _), (out, dt) in zip(checks, results):
        report.entries.append(CheckEntry(name, out.passed, out.detail, dt))
    return report
