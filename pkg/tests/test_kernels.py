import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from helpers import contract_ids, load, pipeline
from tezla import _signcore_py
from tezla.dataflow import kernels
from tezla.dataflow.sign import ALPHA

needs_ext = pytest.mark.skipif("cython" not in kernels.available(), reason="compiled kernels not built")

envs = st.integers(0, 64).flatmap(
    lambda n: st.tuples(st.binary(min_size=n, max_size=n), st.binary(min_size=n, max_size=n)))


@pytest.fixture
def restore_backend():
    before = kernels.BACKEND
    yield
    kernels.use(before)


@needs_ext
@settings(max_examples=500, deadline=None)
@given(envs)
def test_backends_agree(pair):
    from tezla import _signcore
    a, b = (x.translate(ALPHA) for x in pair)
    assert _signcore.env_join(a, b) == _signcore_py.env_join(a, b)
    assert _signcore.env_leq(a, b) == _signcore_py.env_leq(a, b)
    if a:
        i = len(a) // 2
        assert _signcore.env_set(a, i, b[i]) == _signcore_py.env_set(a, i, b[i])


@settings(max_examples=300, deadline=None)
@given(envs)
def test_join_is_pointwise(pair):
    a, b = (x.translate(ALPHA) for x in pair)
    j = kernels.env_join(a, b)
    assert j == bytes(ALPHA[x | y] for x, y in zip(a, b))
    assert kernels.env_leq(a, j) and kernels.env_leq(b, j)
    assert kernels.env_leq(a, b) == all(x & ~y == 0 for x, y in zip(a, b))


@pytest.mark.parametrize("mod_name", ["_signcore_py", "_signcore"])
def test_width_mismatch_is_an_error(mod_name):
    if mod_name == "_signcore" and "cython" not in kernels.available():
        pytest.skip("compiled kernels not built")
    mod = __import__(f"tezla.{mod_name}", fromlist=["x"])
    with pytest.raises(ValueError):
        mod.env_join(b"\x00", b"")
    with pytest.raises(ValueError):
        mod.env_leq(b"\x00", b"")
    with pytest.raises(ValueError):
        mod.set_alpha(b"short")


def test_env_set_returns_the_same_object_when_unchanged():
    env = b"\x02\x04"
    assert kernels.env_set(env, 0, 2) is env
    assert kernels.env_set(env, 0, 8) == b"\x08\x04"


def test_unknown_backend(restore_backend):
    with pytest.raises(ValueError):
        kernels.use("fortran")


@pytest.mark.parametrize("name", contract_ids())
def test_solutions_do_not_depend_on_backend(name, restore_backend):
    results = []
    for backend in kernels.available():
        kernels.use(backend)
        _, _, _, sol = pipeline(load(name))
        results.append(sol.exit)
    assert all(r == results[0] for r in results)


def test_pure_python_override():
    env = dict(os.environ, TEZLA_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from tezla.dataflow import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
def test_compiled_backend_is_the_default():
    env = {k: v for k, v in os.environ.items() if k != "TEZLA_PURE_PYTHON"}
    out = subprocess.run([sys.executable, "-c", "from tezla.dataflow import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "cython"
