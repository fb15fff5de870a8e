import numpy as np
import pytest

import psdg


@pytest.fixture(scope="module")
def system():
    return psdg.System(psdg.Mesh("cartesian:3x3"), degree=2)


def test_mesh():
    mesh = psdg.Mesh("agglomerated:8x8/12", seed=3)
    assert mesh.num_elements == 12
    assert mesh.count_faces("neumann") > 0
    with pytest.raises(psdg.ConfigError):
        psdg.Mesh("hexagonal:3x3")


def test_matrices(system):
    m1 = psdg.csr_matrix(system.csr("M1"))
    assert m1.shape == (system.scalar_dofs, system.scalar_dofs)
    assert abs(m1 - np.eye(system.scalar_dofs)).max() < 1e-12
    a = psdg.csr_matrix(system.csr("A"))
    assert abs(a - a.T).max() <= 1e-12 * abs(a).max()
    ns = system.scalar_dofs
    b1, b2, b3 = (psdg.csr_matrix(system.csr(k)).toarray() for k in ("B1", "B2", "B3"))
    block = np.block([[b1, b2], [b2.T, b3]])
    dense = a.toarray()
    assert np.abs(dense[: 2 * ns, : 2 * ns] - block).max() < 1e-12
    assert np.abs(dense[2 * ns :, 2 * ns :] - block).max() < 1e-12


def test_solvers_agree(system):
    dt = 1e-6
    star = psdg.csr_matrix(system.system_csr(dt)).toarray()
    b = psdg.random_sigma(system.total_dofs, seed=1)
    ref = np.linalg.solve(star, b)
    for kind in ("cg", "dcg", "pcg-bj", "pcg-cbj", "direct"):
        x, report = psdg.Solver(system, dt, kind, tol=1e-10).solve(b)
        assert report["converged"], kind
        assert np.linalg.norm(x - ref) <= 1e-7 * np.linalg.norm(ref), kind


def test_condition_number(system):
    est = system.condition_number(1e-4, method="dense")
    star = psdg.csr_matrix(system.system_csr(1e-4)).toarray()
    assert est["condition"] == pytest.approx(np.linalg.cond(star), rel=1e-8)
    lanczos = system.condition_number(1e-4, method="lanczos")
    assert lanczos["condition"] == pytest.approx(est["condition"], rel=1e-4)


def test_tables():
    ini = "[mesh]\nspecs = cartesian:2x2\n[discretisation]\ndegree = 1\n" \
          "[experiment]\ndt = 1e-4\nsolvers = cg, dcg\nrepetitions = 2\n"
    csv, md = psdg.iter_table(ini)
    assert csv == psdg.iter_table(ini)[0]
    assert f"config_hash={psdg.config_hash(ini)}" in csv
    assert md.startswith("#") or "|" in md
    with pytest.raises(psdg.ConfigError):
        psdg.iter_table("[mesh]\ncolour = red\n")
