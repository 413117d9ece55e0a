import math

import numpy as np
import pytest

import floquet


def test_version_and_geometry():
    assert floquet.__version__ == "1.0.0"
    g = floquet.centered_torus(8, 8, 2)
    assert g.dim() == 128
    assert (g.origin1, g.origin2) == (-4, -4)
    assert g.periodic1 and g.periodic2


def test_chern_bloch_hamiltonian_is_hermitian():
    h = floquet.chern_insulator(-1.0).bloch(0.3, -1.1)
    assert h.shape == (2, 2)
    assert np.allclose(h, h.conj().T)


def test_full_coupling_drive_is_identity_without_splitting():
    g = floquet.centered_torus(8, 8, 2)
    u = floquet.five_step_drive(g, floquet.full_coupling(1.0), 0.0, 1.0).one_period()
    assert np.linalg.norm(u - np.eye(g.dim())) < 1e-9


def test_relative_indices_five_step():
    g = floquet.centered_torus(8, 8, 2)
    drive = floquet.five_step_drive(g, floquet.full_coupling(1.0), 0.3, 1.0)
    r = floquet.relative_gap_indices(drive, math.pi, floquet.half_plane_map(g, 0, 4), min_width=0.1)
    assert r.bulk.integer == 1 and r.edge.integer == 1
    assert r.bulk.residual < 0.05 and r.loop_defect < 1e-8
    h = r.effective_hamiltonian
    assert np.allclose(h, h.conj().T)


def test_quasi_energy_phases_of_diagonal_unitary():
    phases = np.array([0.1, -2.0, 3.0])
    got = np.sort(floquet.quasi_energy_phases(np.diag(np.exp(1j * phases))))
    assert np.allclose(got, np.sort(phases))


def test_run_zero_model_config():
    report = floquet.run(
        {"schema": "floquet-experiment/1", "model": {"name": "zero"}, "period": 1.0, "sizes": [8],
         "epsilon": "auto", "min_width": 0.1}
    )
    assert report["schema"] == "floquet-report/1"
    assert report["all_passed"]
    assert all(i["integer"] == 0 for c in report["cells"] for i in c["indices"])


def test_config_errors_raise():
    with pytest.raises(floquet.ConfigError, match="min_width"):
        floquet.run({"schema": "floquet-experiment/1", "model": {"name": "zero"}, "sizes": [8], "epsilon": "auto"})
    with pytest.raises(ValueError, match="line"):
        floquet.run('{"schema": ')
