import os
import subprocess
import sys

import numpy as np
import pytest

from ucov import kernels
from ucov.fields import gf_q2

try:
    kernels.backend("cython")
    HAVE_EXT = True
except ImportError:
    HAVE_EXT = False

needs_ext = pytest.mark.skipif(not HAVE_EXT, reason="compiled extension not built")


def _tables(q):
    F = gf_q2(q)
    return F, F.add_table.astype(np.uint8), F.mul_table.astype(np.uint8)


@needs_ext
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_direct_kernels_agree(q, tables):
    np_, cy = kernels.backend("numpy"), kernels.backend("cython")
    t = tables(q)
    F, add, mul = _tables(q)
    rng = np.random.default_rng(q)
    a = t.mats[rng.integers(0, t.order, 500)]
    b = t.mats[rng.integers(0, t.order, 500)]
    assert np.array_equal(np_.mat_mul(a, b, add, mul), cy.mat_mul(a, b, add, mul))
    v = t.plane.coords[: min(40, t.plane.n_points)].astype(np.uint8)
    assert np.array_equal(np_.mat_apply(a, v, add, mul), cy.mat_apply(a, v, add, mul))
    r1, k1 = np_.canon(a, t.scalars, mul, F.order)
    r2, k2 = cy.canon(a, t.scalars, mul, F.order)
    assert np.array_equal(r1, r2) and np.array_equal(k1, k2)


_SCRIPT = """
import hashlib, numpy as np
from ucov.group import GroupTable, enumerate_su3
h = hashlib.sha256()
for q in (2, 3, 4):
    t = GroupTable.build(q)
    et, fx = t.classification
    ids = np.arange(0, t.order, 7)
    k = t.imag_keys[t.imag_keys >= 0][:5]
    parts = [enumerate_su3(q), t.mats, et, fx, t.imag_keys, t.point_images(ids, np.arange(t.plane.n_points))]
    if k.size:
        parts.append(t.big_apply(ids, k))
    for a in parts:
        h.update(np.ascontiguousarray(a).tobytes())
print(h.hexdigest())
"""


def _digest(pure: bool) -> str:
    env = {k: v for k, v in os.environ.items() if k != "UCOV_PURE"}
    if pure:
        env["UCOV_PURE"] = "1"
    return subprocess.run([sys.executable, "-c", _SCRIPT], env=env, capture_output=True, text=True, check=True).stdout


@needs_ext
def test_backends_agree_end_to_end():
    # covers every kernel: frames, canon, products, classification, imaginary vertices, big-field action
    assert _digest(pure=True) == _digest(pure=False)


def test_pure_flag_selects_numpy():
    env = {**os.environ, "UCOV_PURE": "1"}
    out = subprocess.run([sys.executable, "-c", "from ucov import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    with pytest.raises(ValueError):
        kernels.backend("fortran")
