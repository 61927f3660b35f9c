"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import surfns


def test_sphere_projection_and_normals():
    s = surfns.Surface.sphere(1.0)
    cp = s.closest_point(np.array([2.0, 0.0, 0.0]))
    assert np.allclose(cp, [1.0, 0.0, 0.0])
    assert s.signed_distance(np.array([0.5, 0.0, 0.0])) == pytest.approx(-0.5)
    n = s.normal(np.array([0.0, 0.0, 1.0]))
    assert np.allclose(n, [0.0, 0.0, 1.0])
    h = s.weingarten(np.array([0.0, 0.0, 1.0]))
    assert np.trace(h) == pytest.approx(2.0)


def test_varying_surface_on_level_set():
    s = surfns.Surface.varying_curvature()
    p = s.map_from_unit_sphere(np.array([0.0, 1.0, 0.0]))
    assert abs(s.level_set_value(p)) < 1e-12


def test_icosphere_counts_and_elevation():
    s = surfns.Surface.sphere(1.0)
    base = surfns.build_base_mesh(s, 1)
    assert (base.vertex_count, base.edge_count, base.face_count) == (42, 120, 80)
    assert base.euler_characteristic == 2
    mesh = surfns.elevate_geometry(s, base, 2)
    assert mesh.node_count == 162
    assert mesh.h < 0.7


def test_quadrature_rule():
    pts, wts = surfns.quadrature(4)
    assert wts.sum() == pytest.approx(0.5)
    # integrate x^2 over the reference triangle
    val = (wts * pts[:, 0] ** 2).sum()
    assert val == pytest.approx(1.0 / 12.0)


def test_mass_matrix_row_sums():
    scipy_sparse = pytest.importorskip("scipy.sparse")
    s = surfns.Surface.sphere(1.0)
    mesh = surfns.elevate_geometry(s, surfns.build_base_mesh(s, 1), 2)
    th = surfns.build_taylor_hood(mesh, 2, 1)
    indptr, indices, values, shape = surfns.assemble_mass(th.pressure)
    m = scipy_sparse.csr_matrix((values, indices, indptr), shape=shape)
    area = m.sum()
    assert area == pytest.approx(4.0 * math.pi, rel=1e-2)
    # symmetric positive entries on the diagonal
    assert (m.diagonal() > 0).all()


def test_forcing_and_velocity_eval():
    u = surfns.exact_velocity("sphere", np.array([1.0, 0.0, 0.0]), 0.0)
    assert np.isfinite(u).all()
    f = surfns.forcing("sphere", np.array([0.0, 1.0, 0.0]), 0.5)
    assert np.isfinite(f).all()
    assert "zero" in surfns.problem_names()


def test_small_convergence_run():
    cfg = surfns.RunConfig()
    cfg.surface = "sphere"
    cfg.kg = 2
    cfg.klambda = 1
    cfg.base_refine = 0
    cfg.levels = 2
    cfg.dt0 = 0.25
    cfg.t_end = 0.5
    runs = surfns.run_convergence_study(cfg)
    assert len(runs) == 2
    for run in runs:
        assert run.max_constraint_residual <= 1e-8
        assert run.max_pressure_mean <= 1e-9
        assert run.report.err_u_linf_l2 > 0.0
    assert runs[1].report.err_u_linf_l2 < runs[0].report.err_u_linf_l2


def test_geometric_errors_and_eoc():
    cfg = surfns.RunConfig()
    cfg.surface = "sphere"
    cfg.kg = 1
    cfg.klambda = 1
    cfg.base_refine = 1
    cfg.levels = 3
    rows = surfns.geometric_errors(cfg)
    hs = [r[1] for r in rows]
    dists = [r[2] for r in rows]
    rates = surfns.eoc(dists, hs)
    assert all(rate > 1.6 for rate in rates)


def test_invalid_config_raises():
    cfg = surfns.RunConfig()
    cfg.kpr = 0
    with pytest.raises(surfns.SurfnsError):
        surfns.run_convergence_study(cfg)
