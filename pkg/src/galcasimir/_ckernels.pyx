# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; same contract as ``_pykernels``.

Keys are arbitrary-size Python ints (8 bits per variable), so the gain over
the fallback comes from removing interpreter dispatch around the dict and
integer operations, not from C-level key arithmetic.
"""

from cpython.dict cimport PyDict_GetItem, PyDict_SetItem, PyDict_DelItem
from cpython.ref cimport PyObject

DEF _EXP_BITS = 8
EXP_BITS = _EXP_BITS
EXP_MASK = (1 << _EXP_BITS) - 1
cdef object _ONE = 1  # keeps shifts in arbitrary precision


cdef inline object _get0(dict d, object k):
    cdef PyObject* p = PyDict_GetItem(d, k)
    if p == NULL:
        return 0
    return <object>p


cdef dict _prune(dict d):
    cdef dict out = {}
    for k, c in d.items():
        if c:
            out[k] = c
    return out


def add_terms(dict a, dict b):
    if len(a) < len(b):
        a, b = b, a
    cdef dict out = dict(a)
    cdef object s
    for k, c in b.items():
        s = _get0(out, k) + c
        if s:
            PyDict_SetItem(out, k, s)
        else:
            PyDict_DelItem(out, k)
    return out


def scale_terms(dict a, s):
    if not s:
        return {}
    cdef dict out = {}
    for k, c in a.items():
        out[k] = c * s
    return out


def mul_terms(dict a, dict b):
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef list bitems = list(b.items())
    cdef object k, ka, ca, kb, cb
    cdef tuple item
    for ka, ca in a.items():
        for item in bitems:
            kb = item[0]
            cb = item[1]
            k = ka + kb
            PyDict_SetItem(out, k, _get0(out, k) + ca * cb)
    return _prune(out)


def square_terms(dict a):
    cdef list items = list(a.items())
    cdef Py_ssize_t i, j, m = len(items)
    cdef dict out = {}
    cdef object k, ka, ca, ca2, kb, cb
    for i in range(m):
        ka, ca = <tuple>items[i]
        k = ka + ka
        PyDict_SetItem(out, k, _get0(out, k) + ca * ca)
        ca2 = 2 * ca
        for j in range(i + 1, m):
            kb, cb = <tuple>items[j]
            k = ka + kb
            PyDict_SetItem(out, k, _get0(out, k) + ca2 * cb)
    return _prune(out)


def accumulate(dict acc, dict a, s):
    cdef object v
    for k, c in a.items():
        v = _get0(acc, k) + s * c
        if v:
            PyDict_SetItem(acc, k, v)
        elif k in acc:
            PyDict_DelItem(acc, k)


def partial_terms(dict a, Py_ssize_t shift):
    cdef object one = _ONE << shift
    cdef dict out = {}
    cdef object e
    for k, c in a.items():
        e = (k >> shift) & EXP_MASK
        if e:
            out[k - one] = c * e
    return out


def apply_derivation(dict a, rules):
    cdef dict out = {}
    cdef object e, base, ce, kk
    cdef Py_ssize_t shift
    for k, c in a.items():
        for shift, targets in rules:
            e = (k >> shift) & EXP_MASK
            if e:
                base = k - (_ONE << shift)
                ce = c * e
                for one_c, w in targets:
                    kk = base + one_c
                    PyDict_SetItem(out, kk, _get0(out, kk) + ce * w)
    return _prune(out)


def split_by_variable(dict a):
    cdef dict out = {}
    cdef object kk, e
    cdef Py_ssize_t i
    cdef list bucket
    for k, c in a.items():
        kk = k
        i = 0
        while kk:
            e = kk & EXP_MASK
            if e:
                if i in out:
                    bucket = out[i]
                else:
                    bucket = []
                    out[i] = bucket
                bucket.append((k - (_ONE << (i * _EXP_BITS)), c * e))
            kk = kk >> _EXP_BITS
            i += 1
    return out


def apply_derivation_split(dict split, rules):
    cdef dict out = {}
    cdef list bucket
    cdef tuple item, tgt
    cdef object base, ce, kk, one_c, w
    for b, targets in rules:
        if b not in split:
            continue
        bucket = split[b]
        for item in bucket:
            base = item[0]
            ce = item[1]
            for tgt in targets:
                one_c = tgt[0]
                w = tgt[1]
                kk = base + one_c
                PyDict_SetItem(out, kk, _get0(out, kk) + ce * w)
    return _prune(out)


def decode(key, Py_ssize_t nvars):
    cdef list out = []
    cdef Py_ssize_t i = 0
    cdef object e
    while key and i < nvars:
        e = key & EXP_MASK
        if e:
            out.append((i, e))
        key = key >> _EXP_BITS
        i += 1
    return tuple(out)


def evaluate_terms(dict a, values, Py_ssize_t nvars):
    cdef object total = 0
    cdef object v, kk, e
    cdef Py_ssize_t i
    for k, c in a.items():
        v = c
        kk = k
        i = 0
        while kk:
            e = kk & EXP_MASK
            if e:
                v = v * values[i] ** e
            kk = kk >> _EXP_BITS
            i += 1
        total = total + v
    return total


def evaluate_graded(dict a, values):
    cdef dict sums = {}
    cdef object v, kk, e
    cdef Py_ssize_t i, d
    for k, c in a.items():
        v = c
        d = 0
        kk = k
        i = 0
        while kk:
            e = kk & EXP_MASK
            if e:
                v = v * values[i] ** e
                d += e
            kk = kk >> _EXP_BITS
            i += 1
        sums[d] = _get0(sums, d) + v
    return sums


def substitute_monomial(dict a, images):
    cdef dict out = {}
    cdef object nk, v, kk, e, one_t, s
    cdef Py_ssize_t i
    for k, c in a.items():
        nk = 0
        v = c
        kk = k
        i = 0
        while kk:
            e = kk & EXP_MASK
            if e:
                one_t, s = images[i]
                nk = nk + one_t * e
                if s != 1:
                    v = v * s ** e
            kk = kk >> _EXP_BITS
            i += 1
        PyDict_SetItem(out, nk, _get0(out, nk) + v)
    return _prune(out)
