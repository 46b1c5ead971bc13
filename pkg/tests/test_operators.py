import numpy as np
import pytest

from ramanpair import (
    DimSignature,
    OperatorMatrix,
    QuantumState,
    commutator,
    dagger,
    destroy,
    eig_herm,
    embed,
    expectation,
    identity,
    transition,
)
from ramanpair.errors import DimensionMismatchError, SimError


def test_destroy_single_quantum():
    a = destroy(1)
    expected = np.zeros((2, 2), dtype=complex)
    expected[0, 1] = 1.0
    np.testing.assert_allclose(a.dense(), expected)


def test_destroy_sqrt2_entry():
    a = destroy(2)
    assert a.dense()[1, 2] == pytest.approx(np.sqrt(2))


def test_number_operator_diagonal():
    a = destroy(3)
    n = a.dag() @ a
    np.testing.assert_allclose(np.diag(n.dense()).real, [0, 1, 2, 3], atol=1e-15)


def test_destroy_negative_rejected():
    with pytest.raises(DimensionMismatchError):
        destroy(-1)


def test_transition_two_level_raising():
    sp = transition(2, 1, 0)
    expected = np.array([[0, 0], [1, 0]], dtype=complex)
    np.testing.assert_allclose(sp.dense(), expected)


def test_transition_three_level():
    t = transition(3, 2, 0)
    assert t.dense()[2, 0] == 1.0
    assert np.count_nonzero(t.dense()) == 1


def test_transition_adjoint_identity():
    for d in (2, 3, 4):
        for j in range(d):
            for k in range(d):
                np.testing.assert_array_equal(
                    transition(d, j, k).dag().dense(), transition(d, k, j).dense()
                )


def test_transition_out_of_range():
    with pytest.raises(DimensionMismatchError):
        transition(3, 3, 0)


def test_embed_sigma_plus_middle_slot():
    sig = DimSignature((2, 2, 2))
    op = embed(transition(2, 1, 0), 1, sig)
    expected = np.kron(np.kron(np.eye(2), transition(2, 1, 0).dense()), np.eye(2))
    np.testing.assert_allclose(op.dense(), expected)
    assert op.sig.total == 8


def test_embed_identity_any_slot():
    sig = DimSignature((3, 2, 3))
    for slot, d in enumerate(sig.dims):
        op = embed(identity(DimSignature((d,))), slot, sig)
        np.testing.assert_allclose(op.dense(), np.eye(sig.total))


def test_embed_disjoint_slots_commute():
    rng = np.random.default_rng(7)
    sig = DimSignature((3, 2, 3))
    for _ in range(5):
        a = OperatorMatrix(DimSignature((2,)), rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        b = OperatorMatrix(DimSignature((3,)), rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        ea, eb = embed(a, 1, sig), embed(b, 2, sig)
        np.testing.assert_allclose((ea @ eb).dense(), (eb @ ea).dense(), atol=1e-13)


def test_embed_respects_products():
    rng = np.random.default_rng(8)
    sig = DimSignature((4, 3))
    a = OperatorMatrix(DimSignature((3,)), rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    b = OperatorMatrix(DimSignature((3,)), rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
    np.testing.assert_allclose(
        embed(a @ b, 1, sig).dense(), (embed(a, 1, sig) @ embed(b, 1, sig)).dense(), atol=1e-13
    )


def test_embed_dimension_mismatch():
    sig = DimSignature((2, 2))
    with pytest.raises(DimensionMismatchError):
        embed(transition(3, 0, 0), 1, sig)


def test_commutator_with_self_vanishes():
    a = destroy(4)
    assert commutator(a, a).norm() == 0.0


def test_truncated_commutator_corner():
    n_max = 3
    a = destroy(n_max)
    c = commutator(a, a.dag()).dense()
    expected = np.eye(n_max + 1, dtype=complex)
    expected[n_max, n_max] = -n_max
    np.testing.assert_allclose(c, expected, atol=1e-15)


def test_pauli_commutator():
    sp = transition(2, 1, 0)
    sz = commutator(sp, sp.dag()).dense()
    np.testing.assert_allclose(sz, np.diag([-1.0, 1.0]))


def test_dagger_involution_and_product_rule():
    rng = np.random.default_rng(3)
    sig = DimSignature((3, 2))
    a = OperatorMatrix(sig, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    b = OperatorMatrix(sig, rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    np.testing.assert_array_equal(dagger(dagger(a)).dense(), a.dense())
    np.testing.assert_allclose((a @ b).dag().dense(), (b.dag() @ a.dag()).dense(), atol=1e-13)


def _ket(sig, index):
    v = np.zeros(sig.total, dtype=complex)
    v[index] = 1.0
    return QuantumState(sig, "ket", v)


def test_expectation_photon_number():
    sig = DimSignature((4, 3, 3))
    n = embed(destroy(3).dag() @ destroy(3), 0, sig)
    state = _ket(sig, sig.index((1, 0, 0)))
    assert expectation(n, state) == pytest.approx(1.0)


def test_expectation_qubit_projector():
    sig = DimSignature((4, 3, 3))
    p = embed(transition(3, 1, 1), 2, sig)
    state = _ket(sig, sig.index((0, 1, 1)))
    assert expectation(p, state) == pytest.approx(1.0)


def test_expectation_mixed_fock_state():
    sig = DimSignature((2,))
    n = destroy(1).dag() @ destroy(1)
    rho = QuantumState(sig, "density", np.eye(2) / 2.0)
    assert expectation(n, rho) == pytest.approx(0.5)


def test_expectation_hermitian_real():
    rng = np.random.default_rng(11)
    sig = DimSignature((3, 2))
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = OperatorMatrix(sig, m + m.conj().T)
    v = rng.normal(size=6) + 1j * rng.normal(size=6)
    state = QuantumState(sig, "ket", v / np.linalg.norm(v))
    assert abs(expectation(h, state).imag) < 1e-10


def test_expectation_signature_mismatch():
    with pytest.raises(DimensionMismatchError):
        expectation(destroy(2), _ket(DimSignature((2,)), 0))


def test_eig_herm_sorted_diagonal():
    sig = DimSignature((3,))
    op = OperatorMatrix(sig, np.diag([3.0, 1.0, 2.0]).astype(complex))
    evals, _ = eig_herm(op)
    np.testing.assert_allclose(evals, [1.0, 2.0, 3.0])


def test_eig_herm_symmetric_splitting():
    g = 0.37
    op = OperatorMatrix(DimSignature((2,)), np.array([[0, g], [g, 0]], dtype=complex))
    evals, _ = eig_herm(op)
    np.testing.assert_allclose(evals, [-g, g], atol=1e-14)


def test_eig_herm_reconstruction():
    rng = np.random.default_rng(5)
    sig = DimSignature((4, 3))
    m = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    h = OperatorMatrix(sig, m + m.conj().T)
    evals, evecs = eig_herm(h)
    rec = (evecs * evals) @ evecs.conj().T
    assert np.linalg.norm(rec - h.dense()) <= 1e-10 * np.linalg.norm(h.dense())


def test_eig_herm_rejects_nonhermitian():
    op = OperatorMatrix(DimSignature((2,)), np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(SimError):
        eig_herm(op)


def test_eig_herm_unitary_invariance():
    rng = np.random.default_rng(17)
    sig = DimSignature((5,))
    for _ in range(5):
        m = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        h = OperatorMatrix(sig, m + m.conj().T)
        q, _ = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))
        hu = OperatorMatrix(sig, q @ h.dense() @ q.conj().T)
        ev1, _ = eig_herm(h)
        ev2, _ = eig_herm(hu)
        np.testing.assert_allclose(ev1, ev2, atol=1e-9)


def test_sparse_dense_agreement():
    sig = DimSignature((4, 3, 3))
    dense_n = embed(destroy(3).dag() @ destroy(3), 0, sig)
    sparse_n = embed((destroy(3).dag() @ destroy(3)).to_sparse(), 0, sig)
    assert sparse_n.is_sparse
    assert (sparse_n.to_dense() - dense_n).max_abs() <= 1e-12
    prod_sparse = sparse_n @ sparse_n
    prod_dense = dense_n @ dense_n
    assert (prod_sparse.to_dense() - prod_dense).max_abs() <= 1e-12


def test_operator_immutability():
    a = destroy(2)
    with pytest.raises(ValueError):
        a.data[0, 0] = 1.0


def test_state_validation():
    sig = DimSignature((2,))
    with pytest.raises(SimError):
        QuantumState(sig, "ket", np.array([1.0, 1.0]))  # unnormalized
    with pytest.raises(SimError):
        QuantumState(sig, "density", np.diag([0.7, 0.7]))  # trace != 1


def test_ket_promotion():
    sig = DimSignature((2,))
    psi = QuantumState(sig, "ket", np.array([1.0, 0.0], dtype=complex))
    rho = psi.to_density()
    np.testing.assert_allclose(rho.data, np.diag([1.0, 0.0]))
