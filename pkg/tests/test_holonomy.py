import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from composite_berry.holonomy import (
    Provenance, connection_analytic, connection_numeric, constant_connection, gauge_transform,
    holonomy_from_matrix, invariant_deviation, numeric_connection, same_invariants, wilson_loop,
)
from composite_berry.model import basis_path

from conftest import random_hermitian, random_unitary

thetas = st.floats(0.0, np.pi)


def test_analytic_examples():
    a = connection_analytic(np.pi / 2)(0.0)
    assert np.allclose(a, [[0, 0.5], [0.5, 0]])
    a = connection_analytic(0.0)(1.0)
    assert np.allclose(a, [[0.5, 0.5], [0.5, 0.5]])
    assert connection_analytic(1.0).provenance is Provenance.ANALYTIC
    with pytest.raises(ValueError):
        connection_analytic(-0.1)


@given(thetas, st.floats(-5, 5))
def test_numeric_matches_analytic(theta, phi):
    num = connection_numeric(basis_path("reply_basis", theta), phi, 1e-4)
    assert np.max(np.abs(num - connection_analytic(theta)(phi))) <= 1e-7


@given(thetas, st.floats(-5, 5))
def test_primed_connection_is_diagonal(theta, phi):
    c = np.cos(theta / 2) ** 2
    num = connection_numeric(basis_path("primed_basis", theta), phi, 1e-4)
    assert np.max(np.abs(num - c * np.eye(2))) <= 1e-7


def test_numeric_error_is_second_order():
    theta = 1.3
    exact = connection_analytic(theta)(0.0)
    for h in (1e-2, 3e-3, 1e-3):
        err = np.max(np.abs(connection_numeric(basis_path("reply_basis", theta), 0.7, h) - exact))
        assert err <= 10 * h**2


def test_numeric_step_and_basis_validation():
    b = basis_path("reply_basis", 1.0)
    with pytest.raises(ValueError):
        connection_numeric(b, 0.0, 1e-8)
    with pytest.raises(ValueError):
        connection_numeric(lambda p: [np.array([1, 0, 0, 0]), np.array([1, 0, 0, 0])], 0.0)


def test_connection_phi_independent():
    a = numeric_connection(basis_path("reply_basis", 0.9))
    samples = [a(p) for p in np.linspace(0, 2 * np.pi, 17)]
    assert max(np.max(np.abs(s - samples[0])) for s in samples) <= 1e-8


@given(thetas)
def test_wilson_loop_constant_against_expm(theta):
    a = connection_analytic(theta)(0.0)
    h = wilson_loop(connection_analytic(theta), 256)
    assert np.max(np.abs(h.u - expm(2j * np.pi * a))) <= 1e-10
    assert np.max(np.abs(h.u - np.exp(2j * np.pi * np.cos(theta / 2) ** 2) * np.eye(2))) <= 1e-10


def test_wilson_loop_random_constant(rng):
    a = random_hermitian(rng, 3)
    h = wilson_loop(constant_connection(a), 64)
    assert np.max(np.abs(h.u - expm(2j * np.pi * a))) <= 1e-10
    assert np.max(np.abs(h.u.conj().T @ h.u - np.eye(3))) <= 1e-12


def test_wilson_loop_ordering():
    # A(phi) = a + phi b; compare with a fine ordered product built by expm
    a = np.array([[0.3, 0.1], [0.1, -0.2]], dtype=complex)
    b = np.array([[0, 0.2j], [-0.2j, 0]])
    from composite_berry.holonomy import Connection
    conn = Connection(2, lambda p: a + p * b, Provenance.NUMERIC)
    n = 4000
    d = 2 * np.pi / n
    ref = np.eye(2, dtype=complex)
    for k in range(n):
        ref = expm(1j * d * (a + (k + 0.5) * d * b)) @ ref
    assert np.max(np.abs(wilson_loop(conn, n).u - ref)) <= 1e-10
    rev = np.eye(2, dtype=complex)
    for k in range(n):
        rev = rev @ expm(1j * d * (a + (k + 0.5) * d * b))
    assert np.max(np.abs(ref - rev)) > 1e-3


def test_wilson_loop_min_steps():
    with pytest.raises(ValueError):
        wilson_loop(connection_analytic(1.0), 8)


def test_bases_share_invariants():
    for theta in (0.4, np.pi / 2, 2.6):
        hr = wilson_loop(numeric_connection(basis_path("reply_basis", theta), 1e-5), 1024)
        hp = wilson_loop(numeric_connection(basis_path("primed_basis", theta), 1e-5), 1024)
        assert invariant_deviation(hr, hp) <= 1e-8


def test_constant_gauge_change(rng):
    theta = 1.2
    v = random_unitary(rng)
    base = basis_path("reply_basis", theta)
    conn = numeric_connection(gauge_transform(base, lambda p: v), 1e-5)
    a = conn(0.3)
    a0 = connection_analytic(theta)(0.0)
    assert np.max(np.abs(a - v.conj().T @ a0 @ v)) <= 1e-8
    h = wilson_loop(conn, 512)
    assert same_invariants(h, wilson_loop(connection_analytic(theta)), 1e-8)


def test_winding_gauge_change():
    theta = 1.0
    omega = lambda p: np.array([[np.cos(p), -np.sin(p)], [np.sin(p), np.cos(p)]]) @ np.diag(
        [1, np.exp(1j * p)])
    conn = numeric_connection(gauge_transform(basis_path("reply_basis", theta), omega))
    ref = wilson_loop(connection_analytic(theta))
    errs = [invariant_deviation(wilson_loop(conn, n), ref) for n in (1024, 4096)]
    assert errs[1] <= 2e-6
    assert errs[1] < errs[0] / 8
    # connection itself is not invariant
    assert np.max(np.abs(conn(0.5) - connection_analytic(theta)(0.5))) > 0.1


def test_identity_gauge():
    b = basis_path("reply_basis", 0.7)
    t = gauge_transform(b, lambda p: np.eye(2))
    for p in (0.0, 1.0):
        assert all(np.array_equal(x, y) for x, y in zip(t(p), b(p)))


def test_gauge_rejects_bad_omega():
    b = basis_path("reply_basis", 0.7)
    with pytest.raises(ValueError, match="unitary"):
        gauge_transform(b, lambda p: 2 * np.eye(2))
    with pytest.raises(ValueError, match="periodic"):
        gauge_transform(b, lambda p: np.diag([1, np.exp(0.5j * p)]))


def test_invariants_circle_wrap():
    h1 = holonomy_from_matrix(np.diag(np.exp(1j * np.array([np.pi - 1e-12, 0.3]))))
    h2 = holonomy_from_matrix(np.diag(np.exp(1j * np.array([-np.pi + 1e-12, 0.3]))))
    assert invariant_deviation(h1, h2) <= 1e-10


@given(thetas)
def test_invariants_under_conjugation(theta):
    u = wilson_loop(connection_analytic(theta)).u
    v = random_unitary(np.random.default_rng(int(theta * 1e6)))
    assert same_invariants(holonomy_from_matrix(u), holonomy_from_matrix(v.conj().T @ u @ v), 1e-10)
