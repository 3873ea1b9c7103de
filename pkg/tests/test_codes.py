import itertools
import json

import pytest

from lrb.codes import (
    ResidualKind,
    StabilizerCode,
    bitflip_code,
    classify_residual,
    code_from_dict,
    code_to_dict,
    code_to_json,
    embed_logical,
    extract_syndrome,
    five_qubit_code,
    get_code,
    logical_action,
    syndrome_index,
)
from lrb.pauli import PauliOperator, pauli_commutes

P = PauliOperator.from_string


def all_paulis(n):
    return [P("".join(t)) for t in itertools.product("IXYZ", repeat=n)]


def test_bitflip_recovery_table():
    code = bitflip_code()
    assert code.recovery_for((0, 0)) == P("III")
    assert code.recovery_for((1, 0)) == P("XII")
    assert code.recovery_for((1, 1)) == P("IXI")
    assert code.recovery_for((0, 1)) == P("IIX")


def test_bitflip_syndromes():
    code = bitflip_code()
    assert extract_syndrome(code, P("III")) == (0, 0)
    assert extract_syndrome(code, P("XII")) == (1, 0)
    assert extract_syndrome(code, P("IIX")) == (0, 1)
    with pytest.raises(ValueError):
        extract_syndrome(code, P("XX"))


def test_classification_examples():
    code = bitflip_code()
    assert classify_residual(code, P("XXX")).kind is ResidualKind.LOGICAL_ERROR
    assert classify_residual(code, P("ZZI")).kind is ResidualKind.IDENTITY_COSET
    c = classify_residual(code, P("XII"))
    assert c.kind is ResidualKind.DETECTABLE and c.syndrome == (1, 0)


@pytest.mark.parametrize("make", [bitflip_code, five_qubit_code])
def test_recovery_consistency(make):
    code = make()
    for s in range(code.n_syndromes):
        assert syndrome_index(code, code.recovery[s]) == s


def test_single_flips_corrected():
    code = bitflip_code()
    for j in range(3):
        e = PauliOperator.single(3, j, "X")
        r = code.recovery[syndrome_index(code, e)]
        assert classify_residual(code, r * e).kind is ResidualKind.IDENTITY_COSET


def test_five_qubit_code():
    code = five_qubit_code()
    assert code.recovery[0] == P("IIIII")
    weight_one = [p for p in all_paulis(5) if p.weight == 1]
    syndromes = [syndrome_index(code, p) for p in weight_one]
    assert len(set(syndromes)) == 15 and 0 not in syndromes
    for p in weight_one:
        assert code.recovery[syndrome_index(code, p)] == p
    x3 = PauliOperator.single(5, 2, "X")
    residual = code.recovery[syndrome_index(code, x3)] * x3
    assert classify_residual(code, residual).kind is ResidualKind.IDENTITY_COSET


@pytest.mark.parametrize("make", [bitflip_code, five_qubit_code])
def test_stabilizer_membership_brute_force(make):
    code = make()
    group = {g.label for g in code.stabilizer_group()}
    assert len(group) == 2 ** len(code.stabilizers)
    for p in all_paulis(code.n_physical):
        in_group = p.label in group
        trivial = classify_residual(code, p).kind is ResidualKind.IDENTITY_COSET
        assert in_group == trivial


@pytest.mark.parametrize("make", [bitflip_code, five_qubit_code])
def test_logical_action_is_a_homomorphism(make):
    code = make()
    ps = all_paulis(code.n_physical)[::7]
    for a, b in itertools.product(ps[:20], ps[:20]):
        assert logical_action(code, a * b) == logical_action(code, a) ^ logical_action(code, b)
    for c in range(4):
        e = embed_logical(code, c)
        assert logical_action(code, e) == c and syndrome_index(code, e) == 0
    assert embed_logical(code, 1).label == code.logical_x.label


def test_pure_errors():
    code = bitflip_code()
    for j, t in enumerate(code.pure_errors):
        assert syndrome_index(code, t) == 1 << j
        assert pauli_commutes(t, code.logical_x) and pauli_commutes(t, code.logical_z)


def test_json_round_trip():
    for code in (bitflip_code(), five_qubit_code()):
        back = code_from_dict(json.loads(code_to_json(code)))
        assert back == code
    d = code_to_dict(bitflip_code())
    assert d["recovery"]["10"] == "XII"
    assert get_code(d) == bitflip_code()


def test_invalid_codes_rejected():
    d = code_to_dict(bitflip_code())
    bad = dict(d, stabilizers=["ZZI", "XXI"])
    with pytest.raises(ValueError):
        code_from_dict(bad)
    bad = dict(d, logical_x="XXI")
    with pytest.raises(ValueError):
        code_from_dict(bad)
    bad = dict(d, recovery=dict(d["recovery"], **{"10": "IIX"}))
    with pytest.raises(ValueError):
        code_from_dict(bad)
    with pytest.raises(ValueError):
        get_code("steane")
    with pytest.raises(ValueError):
        StabilizerCode("x", 3, (P("ZZI"), P("ZZI")), P("XXX"), P("ZZZ"), bitflip_code().recovery)
