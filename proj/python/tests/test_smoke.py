import json
import math

import numpy as np
import pytest

import rollslide as rs


def test_exp_log_roundtrip():
    xi = rs.Twist(np.array([0.3, -0.2, 0.9]), np.array([1.0, 2.0, -3.0]))
    back = rs.log_map(rs.exp_map(xi))
    assert np.allclose(back.vector(), xi.vector(), atol=1e-12)


def test_adjoint_composition():
    a = rs.exp_map(rs.Twist(np.array([0.1, 0.2, 0.3]), np.array([1.0, 0.0, 0.0])))
    b = rs.exp_map(rs.Twist(np.array([-0.4, 0.0, 0.2]), np.array([0.0, 2.0, 1.0])))
    assert np.allclose(rs.adjoint(a * b), rs.adjoint(a) @ rs.adjoint(b), atol=1e-12)


def test_icosphere_counts():
    for n in range(4):
        m = rs.make_icosphere(10.0, n)
        assert m.num_vertices == 10 * 4**n + 2
        assert m.euler_characteristic == 2
        assert np.allclose(np.linalg.norm(m.vertices, axis=1), 5.0)


def test_closest_point_on_sphere():
    m = rs.make_icosphere(10.0, 3)
    point, distance = rs.closest_point(m, rs.Pose(), np.array([0.0, 0.0, 8.0]))
    assert distance == pytest.approx(3.0, abs=0.05)
    assert m.position(point)[2] == pytest.approx(5.0, abs=0.05)


def test_trace_geodesic_length():
    m = rs.make_icosphere(10.0, 3)
    base = rs.SurfacePoint(0, np.array([1 / 3, 1 / 3, 1 / 3]))
    v = m.vertices[m.faces[0]]
    t = rs.trace_geodesic(m, base, v[1] - v[0], 3.0)
    assert t["length_traced"] == pytest.approx(3.0, rel=1e-9)


def test_short_run():
    out = rs.run("SphereRingOutside", "Geodesic", "Coarse", duration=0.2)
    summary = json.loads(out["summary_json"])
    assert summary["steps"] == 20
    rows = out["metrics_csv"][0].strip().splitlines()
    assert len(rows) == 1 + 21
    assert math.isfinite(summary["max_abs_separation"])


def test_error_carries_code():
    with pytest.raises(rs.RollslideError) as info:
        rs.run(dt=0.0)
    assert info.value.code == "InvalidArgument"
