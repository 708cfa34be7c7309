import math
import os
from pathlib import Path

import numpy as np
import pytest

import vora_filter as vf

DATA = Path(os.environ.get("VORA_FILTER_DATA", Path(__file__).resolve().parents[2] / "data"))


@pytest.fixture(scope="module")
def observer():
    return vf.load_sensor_set(str(DATA / "cie1931_2deg_5nm.csv"))


@pytest.fixture(scope="module")
def camera():
    return vf.reference_gaussian_camera()


def test_grid_defaults():
    grid = vf.WavelengthGrid()
    assert (grid.start_nm, grid.step_nm, grid.count) == (400.0, 10.0, 31)
    assert len(grid.wavelengths()) == 31


def test_self_value_is_one(observer):
    assert vf.vora_value(observer, observer) == pytest.approx(1.0, abs=1e-12)


def test_unit_filter_and_scale(camera, observer):
    nu = vf.vora_value(camera, observer)
    assert 0.0 < nu < 1.0
    ones = np.ones(31)
    assert vf.filtered_vora_value(camera, observer, ones) == nu
    f = np.linspace(0.2, 1.0, 31)
    assert vf.filtered_vora_value(camera, observer, 10 * f) == pytest.approx(
        vf.filtered_vora_value(camera, observer, f), abs=1e-12)
    assert vf.regularized_objective(camera, observer, ones, 2.0) == pytest.approx(nu + 31.0, abs=1e-12)


def test_derivative_identities(camera, observer):
    f = np.linspace(0.3, 0.9, 31)
    g = vf.gradient(camera, observer, f)
    h = vf.hessian(camera, observer, f)
    assert abs(f @ g) < 1e-10 * np.linalg.norm(f) * np.linalg.norm(g)
    assert np.max(np.abs(g + h @ f)) < 1e-8
    step = 1e-6
    fd = np.array([
        (vf.filtered_vora_value(camera, observer, f + step * e)
         - vf.filtered_vora_value(camera, observer, f - step * e)) / (2 * step)
        for e in np.eye(31)
    ])
    assert np.max(np.abs(g - fd)) / np.max(np.abs(fd)) < 1e-5


def test_newton_optimize(camera, observer):
    report = vf.optimize(camera, observer, method="newton", alpha=1e-4)
    assert report["final_vora"] - report["initial_vora"] >= 1e-4
    values = [row["vora"] for row in report["iterations"]]
    assert all(b >= a for a, b in zip(values, values[1:]))
    f = report["final_filter"]
    assert f.min() >= 1e-4 and f.max() <= 1.0


def test_basis_optimize(camera, observer):
    report = vf.optimize(camera, observer, basis="cosine:8", max_iters=200)
    b = vf.make_basis("cosine:8")
    assert np.max(np.abs(b @ report["coefficients"] - report["final_filter"])) < 1e-12


def test_errors(camera, observer):
    with pytest.raises(vf.VoraError):
        vf.filtered_vora_value(camera, observer, np.zeros(31))
    with pytest.raises(ValueError):
        vf.parse_spectral_csv("wavelength,t\n400,1\n400,2", 1)
    assert vf.project_to_box(np.array([1.2, 0.5, -0.1])).tolist() == [1.0, 0.5, 1e-4]
    assert not math.isnan(vf.vora_value(camera, observer))
