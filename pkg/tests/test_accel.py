import subprocess
import sys

import numpy as np

from spw._accel import _canonicalize, _label_4conn_py, fft_workers, label_components


def test_kernel_paths_agree():
    # the active path (numba when available) must match the scipy fallback
    # bit for bit after canonicalization
    rng = np.random.default_rng(51)
    for _ in range(10):
        cls = rng.integers(0, 4, size=(40, 40))
        via_public = label_components(cls)
        via_fallback = _canonicalize(_label_4conn_py(np.int64(1) * cls))
        assert np.array_equal(via_public, via_fallback)


def test_labels_are_raster_ordered():
    rng = np.random.default_rng(52)
    cls = rng.integers(0, 3, size=(30, 30))
    lab = label_components(cls)
    first_rows = {}
    flat = lab.ravel()
    for pos, v in enumerate(flat):
        first_rows.setdefault(int(v), pos)
    firsts = [first_rows[i] for i in sorted(first_rows)]
    assert firsts == sorted(firsts)
    assert sorted(first_rows) == list(range(len(first_rows)))


def test_pure_numpy_env_flag_forces_fallback():
    code = (
        "import os; os.environ['SPW_PURE_NUMPY']='1';"
        "import numpy as np; from spw import _accel;"
        "assert not _accel.USING_NUMBA;"
        "lab = _accel.label_components(np.array([[0,0,1],[1,0,1],[1,1,0]]));"
        "print(lab.tolist())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "[[0, 0, 1], [2, 0, 1], [2, 2, 3]]"


def test_fft_workers_default_and_floor(monkeypatch):
    monkeypatch.delenv("SPW_THREADS", raising=False)
    assert fft_workers() == 1
    monkeypatch.setenv("SPW_THREADS", "4")
    assert fft_workers() == 4
    monkeypatch.setenv("SPW_THREADS", "0")
    assert fft_workers() == 1
    monkeypatch.setenv("SPW_THREADS", "junk")
    assert fft_workers() == 1
