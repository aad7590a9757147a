"""Pure-Python sign-environment kernels.

An environment is a ``bytes`` object with one sign mask per variable. Joining
ORs the masks and maps each byte back onto the lattice through a 256-entry
translation table; both steps run at C speed inside ``int`` and ``bytes``.
"""

_TABLE = bytes(256)


def set_alpha(table: bytes) -> None:
    """Install the closure table mapping any class mask onto a lattice element."""
    global _TABLE
    if len(table) != 256:
        raise ValueError("alpha table must have 256 entries")
    _TABLE = bytes(table)


def env_join(a: bytes, b: bytes) -> bytes:
    n = len(a)
    if len(b) != n:
        raise ValueError("environments differ in width")
    merged = int.from_bytes(a, "little") | int.from_bytes(b, "little")
    return merged.to_bytes(n, "little").translate(_TABLE)


def env_leq(a: bytes, b: bytes) -> bool:
    if len(a) != len(b):
        raise ValueError("environments differ in width")
    return int.from_bytes(a, "little") & ~int.from_bytes(b, "little") == 0


def env_set(env: bytes, index: int, value: int) -> bytes:
    if env[index] == value:
        return env
    out = bytearray(env)
    out[index] = value
    return bytes(out)
