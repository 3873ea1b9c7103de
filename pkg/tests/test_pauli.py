from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrb.pauli import (
    CliffordTableau,
    PauliOperator,
    clifford_compose,
    clifford_conjugate,
    clifford_invert,
    enumerate_single_qubit_cliffords,
    pauli_commutes,
    pauli_multiply,
    single_qubit_clifford_tables,
    single_qubit_clifford_unitaries,
    symplectic_product,
)

P = PauliOperator.from_string
H = CliffordTableau.from_strings(["Z"], ["X"])
S = CliffordTableau.from_strings(["Y"], ["Z"])


def paulis(n):
    return st.builds(PauliOperator, st.just(n), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1),
                     st.integers(0, 3))


def test_multiply_examples():
    assert pauli_multiply(P("X"), P("X")) == P("I")
    assert pauli_multiply(P("X"), P("Z")) == P("-iY")
    assert pauli_multiply(P("XXI"), P("IXX")) == P("XIX")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3).flatmap(lambda n: st.tuples(paulis(n), paulis(n))))
def test_multiply_matches_matrices(pair):
    a, b = pair
    assert np.allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix())


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(paulis(n), paulis(n), paulis(n))))
def test_group_laws(trip):
    a, b, c = trip
    assert (a * b) * c == a * (b * c)
    assert a * PauliOperator.identity(a.n_qubits) == a
    assert a * a.inverse() == PauliOperator.identity(a.n_qubits)
    ab, ba = a * b, b * a
    assert (ab.x, ab.z) == (ba.x, ba.z)
    assert (ab.phase - ba.phase) % 4 == 2 * symplectic_product(a, b)


def test_commutation_examples():
    assert not pauli_commutes(P("X"), P("Z"))
    assert pauli_commutes(P("XXX"), P("ZZI"))
    assert not pauli_commutes(P("XII"), P("ZZI"))


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        pauli_multiply(P("X"), P("XX"))
    with pytest.raises(ValueError):
        pauli_commutes(P("X"), P("XX"))


def test_parsing_is_strict():
    for bad in ("XQ", "", "x", "+-X"):
        with pytest.raises(ValueError):
            P(bad)
    assert str(P("-iXYZ")) == "-iXYZ"


def test_conjugate_examples():
    assert clifford_conjugate(H, P("X")) == P("Z")
    assert clifford_conjugate(S, P("X")) == P("Y")
    for label in ("X", "-Y", "+iZ"):
        assert clifford_conjugate(CliffordTableau.identity(1), P(label)) == P(label)


def test_conjugate_matches_unitary():
    s = np.diag([1, 1j])
    for label in "XYZ":
        want = s @ P(label).to_matrix() @ s.conj().T
        assert np.allclose(clifford_conjugate(S, P(label)).to_matrix(), want)


def test_compose_and_invert():
    ident = CliffordTableau.identity(1)
    assert clifford_compose(H, H) == ident
    assert clifford_compose(clifford_invert(S), S) == ident
    assert clifford_compose(S, clifford_invert(S)) == ident


def test_invalid_tableau_rejected():
    with pytest.raises(ValueError):
        CliffordTableau.from_strings(["X"], ["X"])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 23), min_size=10, max_size=10), paulis(1), paulis(1))
def test_random_words(word, a, b):
    group = enumerate_single_qubit_cliffords()
    t = reduce(clifford_compose, [group[i] for i in word])
    assert clifford_compose(t, clifford_invert(t)) == CliffordTableau.identity(1)
    # conjugation is a group homomorphism
    assert clifford_conjugate(t, a * b) == clifford_conjugate(t, a) * clifford_conjugate(t, b)


def test_two_qubit_tableau_distributes():
    cnot = CliffordTableau.from_strings(["XX", "IX"], ["ZI", "ZZ"])
    for a in ("XI", "YZ", "-ZY"):
        for b in ("IY", "XX"):
            lhs = clifford_conjugate(cnot, P(a) * P(b))
            assert lhs == clifford_conjugate(cnot, P(a)) * clifford_conjugate(cnot, P(b))
    u = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])  # qubit 0 is most significant
    assert CliffordTableau.from_unitary(u) == cnot


def test_single_qubit_group():
    group = enumerate_single_qubit_cliffords()
    assert len(group) == 24
    assert len({g.key() for g in group}) == 24
    assert group[0] == CliffordTableau.identity(1)
    keys = {g.key(): k for k, g in enumerate(group)}
    compose, inverse, conj = single_qubit_clifford_tables()
    for a in range(24):
        assert clifford_invert(group[a]).key() in keys
        assert keys[clifford_invert(group[a]).key()] == inverse[a]
        for b in range(24):
            c = clifford_compose(group[a], group[b])
            assert keys[c.key()] == compose[a, b]
        for code in range(4):
            img = clifford_conjugate(group[a], PauliOperator(1, code & 1, code >> 1))
            assert img.x | (img.z << 1) == conj[a, code]


def test_unitaries_match_tableaux():
    for t, u in zip(enumerate_single_qubit_cliffords(), single_qubit_clifford_unitaries()):
        assert np.allclose(u @ u.conj().T, np.eye(2))
        assert CliffordTableau.from_unitary(u) == t
