import math

import numpy as np
import pytest

import genlearn as gl


def illposed(n):
    return gl.builtin_dataset("illposed-2d", n)


def test_kernel_and_gram():
    k = {"type": "gaussian", "theta": 2.0}
    assert gl.eval_kernel(k, [0.0], [0.5]) == pytest.approx(math.exp(-1.0))
    g = gl.gram({"type": "min"}, [gl.point(0.5, 0.5), gl.point(1.0, 1.0)])
    np.testing.assert_allclose(g, [[0.25, 0.25], [0.25, 1.0]])
    assert gl.dual_norm(k, gl.point(0.3)) == pytest.approx(1.0)


def test_laplacian_needs_smooth_kernel():
    with pytest.raises(gl.CapabilityError):
        gl.gram({"type": "min"}, [gl.laplacian(0.5, 0.5)])


def test_tikhonov_on_illposed_system():
    for n, lam in [(1, 1.0), (10, 0.1)]:
        f = gl.solve_tikhonov(illposed(n), lam)
        v = gl.evaluate(f, np.eye(2))
        assert v[0] == pytest.approx(1.0 / (1.0 + lam))
        assert v[1] == pytest.approx(n / (1.0 + lam * n * n))
        assert gl.verify_representer(illposed(n), f)["passed"]


def test_solvers_agree_on_square_data():
    ds = gl.builtin_dataset("gaussian-regression", 6)
    for block in ds["blocks"]:
        block["loss"] = "square"
    tik = gl.solve_tikhonov(ds, 0.2)
    for method in ["subgradient", "prox_grad", "douglas_rachford"]:
        f = gl.solve(ds, {"method": method, "lambda": 0.2})
        assert f["objective"] == pytest.approx(tik["objective"], rel=1e-5)


def test_prox():
    assert gl.prox("square", 0.0, 1.0, 0.5) == pytest.approx(0.5)
    assert gl.prox("absolute", 0.0, 0.3, 1.0) == 0.0
    assert gl.prox("hinge", 1.0, 2.0, 1.0) == 2.0


def test_point_generators():
    np.testing.assert_allclose(gl.halton(3, 1)[:, 0], [0.5, 0.25, 0.75])
    np.testing.assert_allclose(gl.boundary_grid(4), [[0, 0], [1, 0], [1, 1], [0, 1]])
    with pytest.raises(gl.InvalidInput):
        gl.boundary_grid(3)


def test_run_experiment(tmp_path):
    out = gl.run_experiment({"problem": "illposed-2d", "output": str(tmp_path)})
    assert out["verdict"] == "converging"
    assert (tmp_path / "sweep.csv").exists()
    svg, skipped = gl.render_svg((tmp_path / "sweep.csv").read_text(), "n", ["norm"])
    assert svg.startswith("<svg") and skipped == 0


def test_bad_dataset():
    with pytest.raises(gl.InvalidInput):
        gl.solve({"kernel": {"type": "gaussian", "theta": 1.0}, "blocks": []})
