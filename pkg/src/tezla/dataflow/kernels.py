"""Backend selection for the sign-environment kernels.

The compiled extension is used when it imports; setting ``TEZLA_PURE_PYTHON``
forces the fallback. ``use()`` switches at runtime (benchmarks, tests).
"""
import os

from .. import _signcore_py

try:
    from .. import _signcore as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _signcore_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled

BACKEND = "python" if os.environ.get("TEZLA_PURE_PYTHON") or _compiled is None else "cython"
env_join = env_leq = env_set = None
_alpha = None


def available():
    return sorted(_BACKENDS)


def use(name: str) -> None:
    global BACKEND, env_join, env_leq, env_set
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} is not available (have {available()})")
    mod = _BACKENDS[name]
    if _alpha is not None:
        mod.set_alpha(_alpha)
    BACKEND = name
    env_join, env_leq, env_set = mod.env_join, mod.env_leq, mod.env_set


def install_alpha(table: bytes) -> None:
    global _alpha
    _alpha = bytes(table)
    for mod in _BACKENDS.values():
        mod.set_alpha(_alpha)


use(BACKEND)
