"""Compare the compiled and pure-Python term kernels on realistic inputs.

    python benchmarks/bench_kernels.py [--n 7] [--repeat 3]

Inputs are the generators of gal(n)*; the packed numpy zero test used by the
invariance check is timed next to the dict-based bracket it replaces.
"""

from __future__ import annotations

import argparse
import random
import timeit

from galcasimir import _pykernels
from galcasimir.galilean import basis, derivation_rules
from galcasimir.invariants import generator_set, pfaffian_of_minor
from galcasimir.packed import pack
from galcasimir.verify import random_point

try:
    from galcasimir import _ckernels
except ImportError:
    _ckernels = None


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def cases(n: int):
    gens = generator_set(n).poly_list()
    big = gens[-1]
    q2, q3 = gens[1], gens[min(2, len(gens) - 1)]
    pf = pfaffian_of_minor(n, tuple(range(n - 4, n + 2)))
    rules = [derivation_rules(n, lab.index(n))[0] for lab in basis(n)]
    vals = [int(x.numerator) for x in random_point(n, random.Random(0))]
    return [
        ("mul Q2*Q3", lambda k: k.mul_terms(q2._terms, q3._terms)),
        ("square pfaffian", lambda k: k.square_terms(pf._terms)),
        ("split Qmax", lambda k: k.split_by_variable(big._terms)),
        (
            "derivation Qmax (all Z)",
            lambda k, s=big.split(): [k.apply_derivation_split(s, r) for r in rules],
        ),
        ("evaluate_graded Qmax", lambda k: k.evaluate_graded(big._terms, vals)),
    ], big, rules


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if args.n < 4:
        ap.error("--n must be >= 4 so that a K-type generator exists")

    table, big, rules = cases(args.n)
    print(f"gal({args.n}), largest generator has {len(big)} terms")
    print(f"{'kernel':<26}{'python':>10}{'cython':>10}{'speedup':>9}")
    for name, fn in table:
        t_py = best(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<26}{t_py:>9.3f}s{'n/a':>10}")
            continue
        t_c = best(lambda: fn(_ckernels), args.repeat)
        print(f"{name:<26}{t_py:>9.3f}s{t_c:>9.3f}s{t_py / t_c:>8.1f}x")

    # zero test used by the invariance check: packed numpy vs dict derivation
    kern = _ckernels or _pykernels
    packed = pack(big)
    t_dict = best(lambda: [kern.apply_derivation_split(big.split(), r) for r in rules], args.repeat)
    t_packed = best(lambda: [packed.derivation_vanishes(r) for r in rules], args.repeat)
    label = "cython" if _ckernels else "python"
    print(
        f"{'bracket zero test':<26}{t_dict:>9.3f}s ({label} dict)  "
        f"{t_packed:.3f}s (packed numpy)  {t_dict / t_packed:.1f}x"
    )


if __name__ == "__main__":
    main()
