import math

import numpy as np
import pytest

from qca import channels as ch
from qca.errors import DomainError, ShapeError, ValidationError
from qca.qmath import PAULI

AXES = np.vstack([np.eye(3), -np.eye(3)])


def pauli_bloch(rho):
    return np.array([np.trace(rho @ s).real for s in PAULI])


def brute_force_affine(k):
    """Fit (M, C) from the images of the six axis states."""
    def image(r):
        rho = 0.5 * (np.eye(2) + sum(ri * s for ri, s in zip(r, PAULI)))
        return pauli_bloch(sum(e @ rho @ e.conj().T for e in k.elements))

    out = [image(r) for r in AXES]
    m = np.column_stack([(out[i] - out[i + 3]) / 2 for i in range(3)])
    return m, (out[2] + out[5]) / 2


def choi_oracle(k):
    omega = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            eij = np.zeros((2, 2))
            eij[i, j] = 1
            omega += np.kron(sum(e @ eij @ e.conj().T for e in k.elements), eij)
    return omega


def random_gad(rng):
    while True:
        e0, e2, g0, g2 = rng.random(4)
        if g0 * e0 + e2 <= 1 and e0 + g2 * e2 <= 1:
            return ch.GadParams(e0, e2, g0, g2)


def test_identity_channel():
    k = ch.identity_channel()
    a = ch.kraus_to_affine(k)
    assert np.allclose(a.m, np.eye(3)) and np.allclose(a.c, 0)


@pytest.mark.parametrize("gamma", [0.0, 0.1, 0.37, 0.9, 1.0])
def test_standard_ad_affine_matches_brute_force(gamma):
    k = ch.standard_ad(gamma)
    a = ch.kraus_to_affine(k)
    m, c = brute_force_affine(k)
    assert np.allclose(a.m, m, atol=1e-14) and np.allclose(a.c, c, atol=1e-14)
    s = math.sqrt(1 - gamma)
    assert np.allclose(a.m, np.diag([s, s, 1 - gamma]), atol=1e-14)
    assert np.allclose(a.c, [0, 0, gamma], atol=1e-14)


def test_ground_state_is_fixed_point_of_ad():
    a = ch.kraus_to_affine(ch.standard_ad(0.4))
    assert np.allclose(a([0, 0, 1]), [0, 0, 1])


@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0])
def test_phase_damping_shrinks_equator_only(lam):
    a = ch.kraus_to_affine(ch.phase_damping(lam))
    s = math.sqrt(1 - lam)
    assert np.allclose(a.m, np.diag([s, s, 1])) and np.allclose(a.c, 0)


def test_gad_closed_form_matches_kraus(rng):
    for _ in range(300):
        p = random_gad(rng)
        k = ch.gad(p)
        closed = ch.gad_affine_closed(p)
        m, c = brute_force_affine(k)
        assert np.allclose(closed.m, m, atol=1e-13) and np.allclose(closed.c, c, atol=1e-13)
        assert ch.is_trace_preserving(k)[0]
        assert ch.choi_psd_check(k)[0]


def test_gad_reduces_to_standard_ad():
    # eps2 = 0, eps0 = 1 leaves E0 and E1 only
    p = ch.GadParams(1.0, 0.0, 0.64, 0.5)
    a = ch.kraus_to_affine(ch.gad(p))
    b = ch.kraus_to_affine(ch.standard_ad(1 - 0.64))
    assert np.allclose(a.m, b.m) and np.allclose(a.c, b.c)


def test_choi_matrix_matches_oracle(rng):
    k = ch.gad(random_gad(rng))
    assert np.allclose(ch.choi_matrix(k), choi_oracle(k), atol=1e-15)


def test_non_trace_preserving_set_rejected():
    k = ch.KrausChannel((2 * np.eye(2),))
    ok, defect = ch.is_trace_preserving(k)
    assert not ok and defect == pytest.approx(3.0)
    with pytest.raises(ValidationError):
        ch.kraus_to_affine(k)


def test_choi_min_eigenvalue_of_identity():
    ok, lo = ch.choi_psd_check(ch.identity_channel())
    assert ok and abs(lo) < 1e-15


@pytest.mark.parametrize(
    "args, fragment",
    [
        ((0.9, 0.9, 1.0, 1.0), "gamma0*eps0 + eps2 <= 1"),
        ((0.9, 0.5, 0.1, 0.5), "eps0 + gamma2*eps2 <= 1"),
        ((-0.1, 0.5, 0.5, 0.5), "eps0 and eps2"),
        ((0.1, 0.5, 1.5, 0.5), "gamma0"),
        ((0.1, 0.5, 0.5, float("nan")), "gamma2"),
    ],
)
def test_gad_params_reject_infeasible(args, fragment):
    with pytest.raises(DomainError, match=fragment.replace("*", r"\*").replace("+", r"\+")):
        ch.GadParams(*args)


def test_gad_boundary_products_clamped():
    p = ch.GadParams(0.5, 0.5, 1.0, 1.0)
    assert p.eps1_gamma1 == 0.0 and p.eps3_gamma3 == 0.0
    assert ch.is_trace_preserving(ch.gad(p))[0]


def test_probability_domains():
    with pytest.raises(DomainError):
        ch.standard_ad(1.2)
    with pytest.raises(DomainError):
        ch.phase_damping(-0.1)


def test_apply_density_and_bloch_agree(rng):
    k = ch.gad(random_gad(rng))
    a = ch.kraus_to_affine(k)
    r = np.array([0.3, -0.2, 0.5])
    rho = 0.5 * (np.eye(2) + sum(ri * s for ri, s in zip(r, PAULI)))
    assert np.allclose(pauli_bloch(ch.apply(k, rho)), ch.apply(a, r))
    assert np.allclose(ch.apply(k, r), a(r))


def test_shapes_enforced():
    with pytest.raises(ShapeError):
        ch.KrausChannel((np.eye(3),))
    with pytest.raises(ShapeError):
        ch.AffineChannel(np.eye(2), np.zeros(3))


def test_json_round_trip(rng):
    k = ch.gad(random_gad(rng))
    k2, a2 = ch.channel_from_json(ch.channel_to_json(k))
    a = ch.kraus_to_affine(k)
    for e, f in zip(k.elements, k2.elements):
        assert np.array_equal(e, f)
    assert np.array_equal(a.m, a2.m) and np.array_equal(a.c, a2.c)


def test_channel_arrays_are_read_only():
    k = ch.standard_ad(0.2)
    with pytest.raises(ValueError):
        k.elements[0][0, 0] = 2
