"""Pure-Python term kernels.

A term map is a ``dict`` from a packed monomial key to a nonzero coefficient
(``int`` or ``Fraction``).  Variable ``i`` occupies bits ``[8*i, 8*i + 8)`` of
the key, so monomial multiplication is integer addition.  Callers guarantee
that no exponent exceeds 255 (see ``polyring.MAX_DEGREE``).

``_ckernels.pyx`` mirrors every function here with identical semantics.
"""

EXP_BITS = 8
EXP_MASK = (1 << EXP_BITS) - 1


def add_terms(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = dict(a)
    get = out.get
    for k, c in b.items():
        s = get(k, 0) + c
        if s:
            out[k] = s
        else:
            del out[k]
    return out


def scale_terms(a, s):
    if not s:
        return {}
    return {k: c * s for k, c in a.items()}


def mul_terms(a, b):
    if len(a) > len(b):
        a, b = b, a
    out = {}
    get = out.get
    bitems = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bitems:
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def square_terms(a):
    """``mul_terms(a, a)`` using the symmetry of the double sum."""
    items = list(a.items())
    out = {}
    get = out.get
    for i, (ka, ca) in enumerate(items):
        k = ka + ka
        out[k] = get(k, 0) + ca * ca
        ca2 = 2 * ca
        for kb, cb in items[i + 1:]:
            k = ka + kb
            out[k] = get(k, 0) + ca2 * cb
    return {k: c for k, c in out.items() if c}


def accumulate(acc, a, s):
    """In place ``acc += s * a``; zero entries are removed."""
    get = acc.get
    for k, c in a.items():
        v = get(k, 0) + s * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def partial_terms(a, shift):
    one = 1 << shift
    out = {}
    for k, c in a.items():
        e = (k >> shift) & EXP_MASK
        if e:
            out[k - one] = c * e
    return out


def apply_derivation(a, rules):
    """Apply ``sum_b L_b(u) d/du_b`` where each ``L_b`` is linear.

    ``rules`` is a sequence of ``(shift_b, [(one_c, w), ...])``; ``one_c`` is
    the packed key of variable ``c`` (or 0 for a constant term).
    """
    out = {}
    get = out.get
    for k, c in a.items():
        for shift, targets in rules:
            e = (k >> shift) & EXP_MASK
            if e:
                base = k - (1 << shift)
                ce = c * e
                for one_c, w in targets:
                    kk = base + one_c
                    out[kk] = get(kk, 0) + ce * w
    return {k: c for k, c in out.items() if c}


def split_by_variable(a):
    """All first partials of ``a`` as ``{var: [(key, coeff), ...]}``.

    Only variables present in ``a`` appear.  This is the index used by
    :func:`apply_derivation_split`; it is built once per polynomial.
    """
    out = {}
    for k, c in a.items():
        kk = k
        i = 0
        while kk:
            e = kk & EXP_MASK
            if e:
                bucket = out.get(i)
                if bucket is None:
                    out[i] = bucket = []
                bucket.append((k - (1 << (i * EXP_BITS)), c * e))
            kk >>= EXP_BITS
            i += 1
    return out


def apply_derivation_split(split, rules):
    """``sum_b L_b(u) * d/du_b`` applied through a ``split_by_variable`` index.

    ``rules`` is a sequence of ``(var_b, [(one_c, w), ...])`` with
    ``L_b = sum w * u_c``; ``one_c`` is the packed key of ``u_c``.
    """
    out = {}
    get = out.get
    for b, targets in rules:
        bucket = split.get(b)
        if not bucket:
            continue
        for base, ce in bucket:
            for one_c, w in targets:
                kk = base + one_c
                out[kk] = get(kk, 0) + ce * w
    return {k: c for k, c in out.items() if c}


def decode(key, nvars):
    """Sparse ``((index, exponent), ...)`` for a packed key."""
    out = []
    i = 0
    while key and i < nvars:
        e = key & EXP_MASK
        if e:
            out.append((i, e))
        key >>= EXP_BITS
        i += 1
    return tuple(out)


def evaluate_terms(a, values, nvars):
    """Evaluate at a point given as a sequence of numbers (any ring)."""
    total = 0
    for k, c in a.items():
        v = c
        i = 0
        while k:
            e = k & EXP_MASK
            if e:
                v = v * values[i] ** e
            k >>= EXP_BITS
            i += 1
        total = total + v
    return total


def evaluate_graded(a, values):
    """Like ``evaluate_terms`` but returns ``{total_degree: partial_sum}``.

    Used for exact evaluation: with integer ``values`` scaled by a common
    denominator ``D``, each graded piece is divided by ``D**degree``.
    """
    sums = {}
    for k, c in a.items():
        v = c
        d = 0
        i = 0
        while k:
            e = k & EXP_MASK
            if e:
                v = v * values[i] ** e
                d += e
            k >>= EXP_BITS
            i += 1
        sums[d] = sums.get(d, 0) + v
    return sums


def substitute_monomial(a, images):
    """Substitute ``u_i -> s_i * u_{p(i)}`` for every variable.

    ``images[i]`` is ``(one_target, scale)``; the map must be a bijection on
    the variables present so that keys stay packed (no carries).
    """
    out = {}
    get = out.get
    for k, c in a.items():
        nk = 0
        v = c
        i = 0
        while k:
            e = k & EXP_MASK
            if e:
                one_t, s = images[i]
                nk += one_t * e
                if s != 1:
                    v = v * s ** e
            k >>= EXP_BITS
            i += 1
        out[nk] = get(nk, 0) + v
    return {k: c for k, c in out.items() if c}
