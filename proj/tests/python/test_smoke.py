"""Smoke tests for the python binding."""

import json
import math

import pytest

import sitnikov as sk


def test_kepler_drive_basics():
    drive = sk.KeplerDrive()
    a = (drive.mu / (4 * math.pi**2)) ** (1 / 3)
    assert drive.amplitude == pytest.approx(a, rel=1e-14)
    assert drive.x_of_t(3.0) == 0.0
    assert drive.x_of_t(0.5) == pytest.approx(2 * a, rel=1e-14)
    e = drive.solve_radial_kepler(0.25)
    assert e - math.sin(e) == pytest.approx(math.pi / 2, abs=1e-13)
    with pytest.raises(Exception):
        drive.xdot_of_t(1.0)


def test_symbol_helpers():
    assert sk.block_lengths("+++---++", cyclic=True) == [3, 5]
    assert sk.in_m("+++---")
    assert not sk.in_m("++--++")
    assert sk.in_s("+++---++")
    assert not sk.in_s("+++---")


def test_action_and_gradient_match_numpy_fd():
    drive = sk.KeplerDrive()
    grid = sk.Grid(16, 0, 2)
    values = [1.5 + 0.3 * math.sin(math.pi * grid.time_at(i)) for i in range(grid.node_count())]
    traj = sk.Trajectory(grid, "free", values)
    g = sk.action_gradient(drive, traj)
    step = 1e-6
    for i in range(0, grid.node_count(), 7):
        hi = list(values)
        lo = list(values)
        hi[i] += step
        lo[i] -= step
        fd = (
            sk.action_value(drive, sk.Trajectory(grid, "free", hi))
            - sk.action_value(drive, sk.Trajectory(grid, "free", lo))
        ) / (2 * step)
        assert g[i] == pytest.approx(fd, abs=1e-6 * max(1.0, abs(fd)))


def test_minimize_periodic_and_verify():
    orbit = sk.minimize_periodic("+++---++", nodes=16, refine=0)
    assert orbit.converged
    assert orbit.grad_sup <= 1e-10
    assert orbit.rho_hat == pytest.approx(12.33, abs=0.05)
    assert sk.admissible(orbit.traj, "+++---++")

    report = sk.verify_periodic(orbit, samples=100)
    assert report["all_pass"]

    doc = json.loads(orbit.to_json())
    assert doc["kind"] == "periodic_orbit"
    back = sk.periodic_orbit_from_json(orbit.to_json())
    assert back.rho_hat == orbit.rho_hat


def test_connect_smoke():
    doc = sk.connect("+++---++", "+++---++", "---++", 1, nodes=8, tail_tol=1e-3, max_windows=4)
    assert doc["kind"] == "connecting_orbit"
    assert doc["spec"]["k_minus"] == 1
    assert doc["spec"]["k_plus"] == 5
    assert len(doc["defects"]) == doc["window"]["t_plus"] - doc["window"]["t_minus"]
