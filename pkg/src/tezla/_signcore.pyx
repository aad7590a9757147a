# cython: language_level=3
"""Compiled sign-environment kernels; same contract as ``_signcore_py``."""

cdef unsigned char _TABLE[256]


def set_alpha(bytes table):
    cdef Py_ssize_t i
    if len(table) != 256:
        raise ValueError("alpha table must have 256 entries")
    for i in range(256):
        _TABLE[i] = table[i]


def env_join(bytes a, bytes b):
    cdef Py_ssize_t i, n = len(a)
    if len(b) != n:
        raise ValueError("environments differ in width")
    cdef const unsigned char[:] pa = a
    cdef const unsigned char[:] pb = b
    out = bytearray(n)
    cdef unsigned char[:] po = out
    for i in range(n):
        po[i] = _TABLE[pa[i] | pb[i]]
    return bytes(out)


def env_leq(bytes a, bytes b):
    cdef Py_ssize_t i, n = len(a)
    if len(b) != n:
        raise ValueError("environments differ in width")
    cdef const unsigned char[:] pa = a
    cdef const unsigned char[:] pb = b
    for i in range(n):
        if pa[i] & ~pb[i]:
            return False
    return True


def env_set(bytes env, Py_ssize_t index, unsigned char value):
    if env[index] == value:
        return env
    out = bytearray(env)
    out[index] = value
    return bytes(out)
