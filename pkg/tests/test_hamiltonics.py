import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mehler.errors import DomainError, OutOfRange, SingularShooting, SingularTime
from mehler.hamiltonics import (
    BoundaryData,
    action,
    energy,
    eval_geodesic,
    eval_geodesic_basis,
    eval_geodesic_velocity,
    hamiltonian_value,
    shooting_oracle,
    solve_geodesic,
)
from mehler.instances import random_commuting_pair, random_orthogonal, random_spd, random_time
from mehler.spectral import OperatorSpec

# frozen with mpmath at 30 digits
SINH1_OVER_SINH2 = 0.32402713683194269979
TWO_CSCH2_1 = 1.4481233219326209328
TWO_CSC2_1 = 2.8245658548747838292
COTH_1 = 1.3130352854993313036

HYP = OperatorSpec(np.eye(1), np.eye(1))
TRIG = OperatorSpec(np.eye(1), -np.eye(1))


def test_hamiltonian_value():
    assert hamiltonian_value(OperatorSpec(np.eye(2), np.eye(2)), [0, 0], [0, 0]) == 0.0
    assert hamiltonian_value(HYP, [1.0], [1.0]) == 0.0
    assert hamiltonian_value(OperatorSpec([[2.0]], [[3.0]]), [1.0], [2.0]) == -5.0


def test_boundary_data_validation():
    with pytest.raises(DomainError):
        BoundaryData([0.0], [1.0], 0.0)
    with pytest.raises(DomainError):
        BoundaryData([0.0, 1.0], [1.0], 1.0)


def test_straight_line():
    A = np.array([[2.0, 0.3], [0.3, 1.0]])
    spec = OperatorSpec(A, np.zeros((2, 2)))
    x0, x1 = np.array([1.0, -2.0]), np.array([0.5, 3.0])
    gs = solve_geodesic(spec, BoundaryData(x0, x1, 2.0))
    s = np.linspace(0, 2.0, 7)
    np.testing.assert_allclose(eval_geodesic(gs, s), x0 + np.outer(s / 2.0, x1 - x0), atol=1e-14)
    np.testing.assert_allclose(eval_geodesic(gs, 1.0), 0.5 * (x0 + x1), atol=1e-14)


def test_hyperbolic_and_trigonometric_scalar_geodesics():
    s = np.linspace(0, 1, 11)
    gh = solve_geodesic(HYP, BoundaryData([0.0], [1.0], 1.0))
    np.testing.assert_allclose(eval_geodesic(gh, s)[:, 0], np.sinh(2 * s) / np.sinh(2), atol=1e-14)
    assert eval_geodesic(gh, 0.5)[0] == pytest.approx(SINH1_OVER_SINH2, rel=1e-13)
    gt = solve_geodesic(TRIG, BoundaryData([0.0], [1.0], 1.0))
    np.testing.assert_allclose(eval_geodesic(gt, s)[:, 0], np.sin(2 * s) / np.sin(2), atol=1e-14)
    np.testing.assert_allclose(eval_geodesic_basis(gh, s), eval_geodesic(gh, s), atol=1e-13)


def test_out_of_range_and_singular():
    gs = solve_geodesic(HYP, BoundaryData([0.0], [1.0], 1.0))
    with pytest.raises(OutOfRange):
        eval_geodesic(gs, 1.5)
    with pytest.raises(OutOfRange):
        eval_geodesic(gs, -0.1)
    with pytest.raises(SingularTime):
        solve_geodesic(TRIG, BoundaryData([0.0], [1.0], math.pi / 2))


def test_energy_frozen_values():
    assert energy(HYP, BoundaryData([0.0], [1.0], 0.5)) == pytest.approx(TWO_CSCH2_1, rel=1e-13)
    assert energy(TRIG, BoundaryData([0.0], [1.0], 0.5)) == pytest.approx(TWO_CSC2_1, rel=1e-13)
    assert energy(HYP, BoundaryData([0.0], [0.0], 0.5)) == 0.0


def test_action_frozen_values():
    assert action(HYP, BoundaryData([0.0], [1.0], 0.5)) == pytest.approx(COTH_1, rel=1e-13)
    assert action(HYP, BoundaryData([0.0], [0.0], 0.5)) == 0.0


def test_action_gaussian_limit(rng):
    A = random_spd(rng, 3)
    spec = OperatorSpec(A, np.zeros((3, 3)))
    x0, x1 = rng.standard_normal(3), rng.standard_normal(3)
    d = x1 - x0
    t = 0.7
    assert action(spec, BoundaryData(x0, x1, t)) == pytest.approx(d @ np.linalg.solve(A, d) / (2 * t), rel=1e-13)
    # small B approaches the same value
    spec_eps = OperatorSpec(A, 1e-6 * A)
    assert action(spec_eps, BoundaryData(x0, x1, t)) == pytest.approx(d @ np.linalg.solve(A, d) / (2 * t), rel=1e-5)


@pytest.mark.parametrize("sig", ["hyperbolic", "trigonometric", "mixed", "any"])
def test_energy_matches_path_quantity(rng, sig):
    for n in (2, 3, 4):
        A, B = random_commuting_pair(rng, n, sig)
        spec = OperatorSpec(A, B)
        t = random_time(rng, spec)
        bd = BoundaryData(rng.standard_normal(n), rng.standard_normal(n), t)
        gs = solve_geodesic(spec, bd)
        s = np.linspace(0, t, 7)
        X, V = eval_geodesic(gs, s), eval_geodesic_velocity(gs, s)
        Ainv = np.linalg.inv(A)
        D = spec.spectral.D
        e = 0.5 * (np.einsum("ij,jk,ik->i", V, Ainv, V) - np.einsum("ij,jk,ik->i", X @ D.T, Ainv, X))
        np.testing.assert_allclose(e, energy(spec, bd), rtol=1e-9, atol=1e-9)


def test_velocity_matches_finite_difference(rng):
    A, B = random_commuting_pair(rng, 3, "mixed")
    spec = OperatorSpec(A, B)
    t = random_time(rng, spec)
    gs = solve_geodesic(spec, BoundaryData(rng.standard_normal(3), rng.standard_normal(3), t))
    s, h = 0.4 * t, 1e-6
    fd = (eval_geodesic(gs, s + h) - eval_geodesic(gs, s - h)) / (2 * h)
    np.testing.assert_allclose(eval_geodesic_velocity(gs, s), fd, rtol=1e-6, atol=1e-7)


def test_shooting_straight_line():
    spec = OperatorSpec(np.eye(2), np.zeros((2, 2)))
    bd = BoundaryData([0.0, 1.0], [2.0, -1.0], 1.5)
    tr = shooting_oracle(spec, bd)
    np.testing.assert_allclose(tr.X, eval_geodesic(solve_geodesic(spec, bd), tr.s), atol=1e-10)


def test_shooting_hyperbolic_scalar():
    tr = shooting_oracle(HYP, BoundaryData([0.0], [1.0], 1.0))
    idx = np.linspace(0, len(tr.s) - 1, 16).astype(int)
    np.testing.assert_allclose(tr.X[idx, 0], np.sinh(2 * tr.s[idx]) / np.sinh(2), atol=1e-8)


def test_shooting_flags_near_singular():
    with pytest.raises(SingularShooting):
        shooting_oracle(TRIG, BoundaryData([0.0], [1.0], 1.5707963))


@given(seed=st.integers(0, 10**6), n=st.integers(1, 4), sig=st.sampled_from(["hyperbolic", "trigonometric", "any"]))
def test_frame_invariance(seed, n, sig):
    r = np.random.default_rng(seed)
    A, B = random_commuting_pair(r, n, sig)
    P = random_orthogonal(r, n)
    spec = OperatorSpec(A, B)
    spec_p = OperatorSpec(P @ A @ P.T, P @ B @ P.T)
    t = random_time(r, spec)
    x0, x1 = r.standard_normal(n), r.standard_normal(n)
    g = solve_geodesic(spec, BoundaryData(x0, x1, t))
    gp = solve_geodesic(spec_p, BoundaryData(P @ x0, P @ x1, t))
    s = np.linspace(0, t, 9)
    np.testing.assert_allclose(eval_geodesic(gp, s), eval_geodesic(g, s) @ P.T, atol=1e-9)
    assert energy(spec_p, BoundaryData(P @ x0, P @ x1, t)) == pytest.approx(energy(spec, BoundaryData(x0, x1, t)), rel=1e-9, abs=1e-9)


def test_boundary_exactness_up_to_six_dims(rng):
    for n in range(1, 7):
        for sig in ("hyperbolic", "trigonometric", "any"):
            A, B = random_commuting_pair(rng, n, sig)
            spec = OperatorSpec(A, B)
            t = random_time(rng, spec)
            x0, x1 = rng.standard_normal(n), rng.standard_normal(n)
            gs = solve_geodesic(spec, BoundaryData(x0, x1, t))
            ends = eval_geodesic(gs, np.array([0.0, t]))
            scale = 1 + max(np.linalg.norm(x0), np.linalg.norm(x1))
            assert np.linalg.norm(ends[0] - x0) <= 1e-9 * scale
            assert np.linalg.norm(ends[1] - x1) <= 1e-9 * scale
