import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrb.channels import (
    PauliChannel,
    Superoperator,
    average_gate_fidelity,
    bitflip_correlated,
    bitflip_independent,
    channel_from_spec,
    channel_to_ptm,
    channel_to_spec,
    compose_channels,
    depolarizing,
    identity_channel,
    marginal_channel,
    mix_channels,
    pauli_basis_labels,
    ptm_from_map,
    sample_error,
)
from lrb.pauli import PauliOperator, pauli_matrix

P = PauliOperator.from_string
PAIRS = [(0, 1), (1, 2)]


def full_noise(p, q):
    return compose_channels(bitflip_correlated(q, PAIRS, 3), bitflip_independent(p, 3))


@st.composite
def channels(draw, n=None):
    n = draw(st.integers(1, 3)) if n is None else n
    labels = ["".join(t) for t in itertools.product("IXYZ", repeat=n)]
    w = np.array(draw(st.lists(st.floats(0, 1), min_size=len(labels), max_size=len(labels))))
    if w.sum() < 1e-3:
        w[0] = 1.0
    w = w / w.sum()
    return PauliChannel.from_dict(n, dict(zip(labels, w)))


def test_bitflip_independent():
    assert bitflip_independent(0, 3).as_dict() == {"III": 1.0}
    assert bitflip_independent(0.5, 1).as_dict() == {"I": 0.5, "X": 0.5}
    assert bitflip_independent(0.1, 3).probability("XII") == pytest.approx(0.081, abs=1e-15)
    with pytest.raises(ValueError):
        bitflip_independent(1.5, 3)


def test_bitflip_correlated():
    assert bitflip_correlated(0, PAIRS, 3).as_dict() == {"III": 1.0}
    assert bitflip_correlated(1, PAIRS, 3).as_dict() == {"XIX": 1.0}
    assert bitflip_correlated(0.01, PAIRS, 3).probability("XXI") == pytest.approx(0.01 * 0.99, abs=1e-15)
    with pytest.raises(ValueError):
        bitflip_correlated(0.1, [(0, 3)], 3)


def test_compose_examples():
    c = bitflip_independent(0.2, 3)
    assert compose_channels(identity_channel(3), c).as_dict() == pytest.approx(c.as_dict())
    p = 0.3
    two = compose_channels(bitflip_independent(p, 1), bitflip_independent(p, 1))
    assert two.as_dict() == pytest.approx(bitflip_independent(2 * p * (1 - p), 1).as_dict())
    p, q = 0.1, 0.03
    m = marginal_channel(full_noise(p, q), 0)
    assert m.probability("X") == pytest.approx(p + q - 2 * p * q, abs=1e-14)
    with pytest.raises(ValueError):
        compose_channels(c, bitflip_independent(0.1, 2))


def test_marginal_examples():
    for j in range(3):
        assert marginal_channel(bitflip_independent(0.2, 3), j).as_dict() == pytest.approx({"I": 0.8, "X": 0.2})
    p = 0.27
    singles = [PauliChannel.from_dict(3, {"III": 1 - p, lab: p}) for lab in ("XII", "IXI", "IIX")]
    anti = mix_channels([(1 / 3, c) for c in singles])
    assert marginal_channel(anti, 0).probability("X") == pytest.approx(p / 3, abs=1e-15)
    assert average_gate_fidelity(marginal_channel(anti, 0)) == pytest.approx(1 - 2 * p / 9, abs=1e-12)
    with pytest.raises(IndexError):
        marginal_channel(anti, 3)


@pytest.mark.parametrize("p,q", [(0.0, 0.0), (0.1, 0.01), (0.3, 0.2), (0.5, 0.5), (0.05, 0.3)])
def test_marginal_fidelity_matches_estimate(p, q):
    f = average_gate_fidelity(marginal_channel(full_noise(p, q), 0))
    assert f == pytest.approx(1 - 2 * p / 3 - 2 * q / 3 + 4 * p * q / 3, abs=1e-12)


def test_sampling():
    rng = np.random.default_rng(5)
    point = PauliChannel.from_dict(2, {"XZ": 1.0})
    assert all(sample_error(point, rng) == P("XZ") for _ in range(20))
    assert all(sample_error(bitflip_independent(0, 3), rng) == P("III") for _ in range(20))
    c = bitflip_independent(0.1, 3)
    n = 10**6
    idx = c.index_of_uniform(rng.random(n))
    k = int(np.sum(idx == c.paulis.index(P("XII"))))
    sigma = np.sqrt(n * 0.081 * 0.919)
    assert abs(k - n * 0.081) < 5 * sigma


def test_fidelity_examples():
    assert average_gate_fidelity(channel_to_ptm(identity_channel(1))) == pytest.approx(1.0)
    assert average_gate_fidelity(bitflip_independent(0.12, 1)) == pytest.approx(1 - 0.08, abs=1e-15)
    for lam in (1.0, 0.5, 0.0, -1 / 3):
        ch = depolarizing(lam)
        assert np.allclose(channel_to_ptm(ch).ptm, np.diag([1, lam, lam, lam]))
        f = average_gate_fidelity(ch)
        assert f == pytest.approx((1 + lam) / 2, abs=1e-14)
        # average over the six Pauli eigenstates
        states = []
        for lab in "XYZ":
            for sgn in (1, -1):
                states.append((np.eye(2) + sgn * pauli_matrix(lab)) / 2)
        probs = ch.weights
        avg = np.mean([
            sum(w * np.trace(rho @ pauli_matrix(pp.label) @ rho @ pauli_matrix(pp.label)).real
                for pp, w in zip(ch.paulis, probs))
            for rho in states
        ])
        assert avg == pytest.approx(f, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 2).flatmap(lambda n: st.tuples(channels(n), channels(n), channels(n))))
def test_composition_algebra(trip):
    a, b, c = trip
    left = compose_channels(compose_channels(a, b), c).as_dict()
    right = compose_channels(a, compose_channels(b, c)).as_dict()
    assert set(left) == set(right)
    assert all(abs(left[k] - right[k]) < 1e-12 for k in left)
    ab = channel_to_ptm(compose_channels(a, b)).ptm
    assert np.allclose(ab, channel_to_ptm(b).ptm @ channel_to_ptm(a).ptm, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(channels())
def test_ptm_diagonal_brute_force(c):
    n = c.n_qubits
    ptm = channel_to_ptm(c).ptm
    assert np.allclose(ptm, np.diag(np.diag(ptm)))
    for k, lab in enumerate(pauli_basis_labels(n)):
        basis = P(lab)
        anti = sum(w for p, w in c.items if (p * basis).phase != (basis * p).phase)
        assert ptm[k, k] == pytest.approx(1 - 2 * anti, abs=1e-12)
    dense = ptm_from_map(lambda m: sum(w * pauli_matrix(p.label) @ m @ pauli_matrix(p.label)
                                       for p, w in c.items), n)
    assert np.allclose(dense.ptm, ptm, atol=1e-12)


def test_superoperator_basics():
    s = channel_to_ptm(bitflip_independent(0.2, 1))
    assert s.is_trace_preserving()
    assert np.allclose(s.then(Superoperator.identity(2)).ptm, s.ptm)
    assert np.allclose(s.dual().ptm, s.ptm.T)
    with pytest.raises(ValueError):
        Superoperator(2, np.zeros((4, 3)))


def test_channel_validation():
    with pytest.raises(ValueError):
        PauliChannel.from_dict(1, {"I": 0.5, "X": 0.4})
    with pytest.raises(ValueError):
        PauliChannel.from_dict(1, {"I": 1.2, "X": -0.2})


def test_spec_round_trip():
    specs = [
        {"type": "bitflip_independent", "p": 0.1, "n": 3},
        {"type": "bitflip_correlated", "q": 0.02, "pairs": [[0, 1], [1, 2]], "n": 3},
        {"type": "depolarizing", "lam": 0.9},
        {"type": "identity", "n": 2},
        {"type": "composite", "channels": [{"type": "bitflip_independent", "p": 0.1, "n": 3},
                                           {"type": "bitflip_correlated", "q": 0.01, "pairs": [[0, 1]], "n": 3}]},
        {"type": "mixture", "components": [{"weight": 0.5, "channel": {"type": "identity", "n": 1}},
                                           {"weight": 0.5, "channel": {"type": "depolarizing", "lam": 0.0}}]},
        {"type": "custom", "n": 1, "probabilities": {"I": 0.9, "Y": 0.1}},
    ]
    for spec in specs:
        c = channel_from_spec(spec)
        back = channel_from_spec(channel_to_spec(c))
        assert back.as_dict() == pytest.approx(c.as_dict(), abs=1e-15)
    with pytest.raises(ValueError):
        channel_from_spec({"type": "amplitude_damping"})
