"""Backend selection for the term kernels.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module is used.  Setting ``GALCASIMIR_PURE_PYTHON=1``
forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("GALCASIMIR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

EXP_BITS = _pykernels.EXP_BITS
EXP_MASK = _pykernels.EXP_MASK

add_terms = _impl.add_terms
scale_terms = _impl.scale_terms
mul_terms = _impl.mul_terms
square_terms = _impl.square_terms
accumulate = _impl.accumulate
partial_terms = _impl.partial_terms
apply_derivation = _impl.apply_derivation
apply_derivation_split = _impl.apply_derivation_split
split_by_variable = _impl.split_by_variable
decode = _impl.decode
evaluate_terms = _impl.evaluate_terms
evaluate_graded = _impl.evaluate_graded
substitute_monomial = _impl.substitute_monomial

__all__ = [
    "BACKEND",
    "EXP_BITS",
    "EXP_MASK",
    "accumulate",
    "add_terms",
    "apply_derivation",
    "apply_derivation_split",
    "decode",
    "evaluate_graded",
    "evaluate_terms",
    "mul_terms",
    "partial_terms",
    "scale_terms",
    "split_by_variable",
    "square_terms",
    "substitute_monomial",
]
