"""Integration kernels: backend agreement, statuses, recording."""

import numpy as np
import pytest

from geopol import _kernel
from geopol._kernel import _pykernel

try:
    from geopol._kernel import _ckernel
except ImportError:
    _ckernel = None

BACKENDS = [_pykernel] + ([_ckernel] if _ckernel is not None else [])


def workloads():
    eye2 = np.eye(2)
    fund = np.concatenate([np.hstack([eye2, 0 * eye2]).ravel(),
                           np.hstack([0 * eye2, eye2]).ravel()]).astype(complex)
    yield ("jacobi-const-real", _kernel.SYS_JACOBI_CONST,
           np.array([2, 4]), np.diag([0.0, 0.5]).ravel(), fund,
           np.array([0.0, 5.0], dtype=complex))
    yield ("jacobi-const-complex", _kernel.SYS_JACOBI_CONST,
           np.array([2, 4]), np.diag([0.0, -0.9]).ravel(), fund,
           np.array([0.0, 1.0 + 0.8j], dtype=complex))
    geo = np.array([0.3, 0.2, 0.4, 0.2], dtype=complex)
    yield ("jacobi-revolution", _kernel.SYS_JACOBI_REVOLUTION,
           np.array([2, 1, 4]), np.array([0.2, 3.0]),
           np.concatenate([geo, fund]),
           np.array([0.0, 0.5 + 0.6j], dtype=complex))
    state_cc = np.concatenate([[0.2, -0.1], [0.5, 0.3],
                               np.eye(2).ravel()]).astype(complex)
    yield ("geodesic-cc", _kernel.SYS_GEODESIC_CC,
           np.array([2]), np.array([-1.0]), state_cc,
           np.array([0.0, 2.0], dtype=complex))
    state_rev = np.concatenate([[0.3, 0.2, 0.4, 0.2],
                                np.eye(2).ravel()]).astype(complex)
    yield ("geodesic-rev", _kernel.SYS_GEODESIC_REVOLUTION,
           np.array([2, 1]), np.array([3.0]), state_rev,
           np.array([0.0, 1.5], dtype=complex))


@pytest.mark.skipif(_ckernel is None, reason="compiled kernel not built")
def test_backends_agree_on_endpoints():
    for name, system, ip, fp, y0, wps in workloads():
        results = []
        for backend in (_pykernel, _ckernel):
            status, y_end, taus, ys, na, nr = backend.integrate_path(
                system, ip, fp, y0, wps, record=True)
            assert status == 0, (name, backend.BACKEND)
            results.append((y_end, na))
        (y_py, na_py), (y_c, na_c) = results
        assert np.abs(y_py - y_c).max() < 1e-10, name
        assert abs(na_py - na_c) <= 2, name


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_record_nodes(backend):
    _, system, ip, fp, y0, wps = next(iter(workloads()))
    status, y_end, taus, ys, na, nr = backend.integrate_path(
        system, ip, fp, y0, wps, record=True)
    assert taus[0] == 0.0
    assert abs(taus[-1] - wps[-1]) < 1e-14
    assert len(taus) == na + 1
    assert ys.shape == (len(taus), len(y0))
    assert np.abs(ys[-1] - y_end).max() == 0.0
    # arclength increases monotonically
    arc = np.abs(np.diff(taus))
    assert (arc > 0).all()

    status, y2, taus2, ys2, *_ = backend.integrate_path(
        system, ip, fp, y0, wps, record=False)
    assert len(taus2) == 0 and ys2.shape[0] == 0
    assert np.abs(y2 - y_end).max() < 1e-12


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_overflow_status(backend):
    y0 = np.concatenate([np.eye(2).ravel(), np.zeros(4)]).astype(complex)
    status, *_ = backend.integrate_path(
        _kernel.SYS_JACOBI_CONST, np.array([2, 2]),
        np.diag([0.0, -400.0]).ravel(), y0,
        np.array([0.0, 3.0], dtype=complex), guard=1e12)
    assert status == _kernel.STATUS_OVERFLOW


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.BACKEND)
def test_unknown_system(backend):
    with pytest.raises(ValueError):
        backend.integrate_path(99, np.array([1]), np.array([0.0]),
                               np.zeros(2, dtype=complex),
                               np.array([0.0, 1.0], dtype=complex))


def test_facade_exports():
    assert _kernel.BACKEND in ("c", "python")
    assert callable(_kernel.integrate_path)
