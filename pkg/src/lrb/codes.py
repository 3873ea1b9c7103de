"""Stabilizer codes with one logical qubit, syndromes and lookup-table recovery."""
from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .pauli import PauliOperator, symplectic_product

__all__ = [
    "StabilizerCode",
    "ResidualKind",
    "ResidualClass",
    "bitflip_code",
    "five_qubit_code",
    "trivial_code",
    "get_code",
    "extract_syndrome",
    "syndrome_index",
    "classify_residual",
    "logical_action",
    "embed_logical",
    "min_weight_recovery_table",
    "code_to_dict",
    "code_from_dict",
    "code_to_json",
    "syndrome_table",
]


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    rows = list(rows)
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


def _paulis_by_weight(n: int):
    """All unsigned n-qubit Paulis ordered by (weight, textual label)."""
    labels = ("".join(t) for t in itertools.product("IXYZ", repeat=n))
    ordered = sorted(labels, key=lambda s: (n - s.count("I"), s))
    return [PauliOperator.from_string(s) for s in ordered]


@dataclass(frozen=True)
class StabilizerCode:
    """An [[n, 1]] stabilizer code.

    ``recovery`` is indexed by the integer syndrome whose bit j is the
    outcome of generator j.
    """

    name: str
    n_physical: int
    stabilizers: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    recovery: tuple[PauliOperator, ...]
    k_logical: int = 1

    def __post_init__(self):
        n = self.n_physical
        if self.k_logical != 1:
            raise ValueError("only k = 1 codes are supported")
        ops = self.stabilizers + (self.logical_x, self.logical_z) + self.recovery
        if any(p.n_qubits != n for p in ops):
            raise ValueError("all operators must act on n_physical qubits")
        if len(self.stabilizers) != n - self.k_logical:
            raise ValueError(f"need {n - self.k_logical} stabilizer generators")
        for a, b in itertools.combinations(self.stabilizers, 2):
            if symplectic_product(a, b):
                raise ValueError(f"generators {a} and {b} anticommute")
        if any(g.phase != 0 for g in self.stabilizers):
            raise ValueError("stabilizer generators must have sign +1")
        rows = [g.x | (g.z << n) for g in self.stabilizers]
        if _gf2_rank(rows) != len(rows):
            raise ValueError("stabilizer generators are not independent")
        for g in self.stabilizers:
            if symplectic_product(g, self.logical_x) or symplectic_product(g, self.logical_z):
                raise ValueError("logical operators must commute with the stabilizers")
        if not symplectic_product(self.logical_x, self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if len(self.recovery) != 1 << len(self.stabilizers):
            raise ValueError("recovery table must cover every syndrome")
        for s, r in enumerate(self.recovery):
            if syndrome_index(self, r) != s:
                raise ValueError(f"recovery {r} does not have syndrome {s}")

    @property
    def n_syndromes(self) -> int:
        return 1 << len(self.stabilizers)

    def recovery_for(self, syndrome) -> PauliOperator:
        if isinstance(syndrome, (tuple, list)):
            syndrome = sum(b << j for j, b in enumerate(syndrome))
        return self.recovery[syndrome]

    @cached_property
    def pure_errors(self) -> tuple[PauliOperator, ...]:
        """Destabilizers: t_j flips generator j only and commutes with both logicals."""
        out = []
        candidates = _paulis_by_weight(self.n_physical)
        for j in range(len(self.stabilizers)):
            for p in candidates:
                if (
                    syndrome_index(self, p) == 1 << j
                    and not symplectic_product(p, self.logical_x)
                    and not symplectic_product(p, self.logical_z)
                ):
                    out.append(p)
                    break
            else:  # pragma: no cover - impossible for a valid code
                raise RuntimeError("no pure error found")
        return tuple(out)

    def stabilizer_group(self) -> list[PauliOperator]:
        """All 2^(n-k) stabilizer group elements, by brute force."""
        elems = []
        for bits in itertools.product((0, 1), repeat=len(self.stabilizers)):
            p = PauliOperator.identity(self.n_physical)
            for b, g in zip(bits, self.stabilizers):
                if b:
                    p = p * g
            elems.append(p)
        return elems


class ResidualKind(enum.Enum):
    IDENTITY_COSET = "identity_coset"
    LOGICAL_ERROR = "logical_error"
    DETECTABLE = "detectable"


@dataclass(frozen=True)
class ResidualClass:
    kind: ResidualKind
    syndrome: tuple[int, ...] | None = None


def _check_frame(code: StabilizerCode, frame: PauliOperator):
    if frame.n_qubits != code.n_physical:
        raise ValueError(f"frame has {frame.n_qubits} qubits, code has {code.n_physical}")


def extract_syndrome(code: StabilizerCode, frame: PauliOperator) -> tuple[int, ...]:
    _check_frame(code, frame)
    return tuple(symplectic_product(frame, g) for g in code.stabilizers)


def syndrome_index(code: StabilizerCode, frame: PauliOperator) -> int:
    _check_frame(code, frame)
    return sum(symplectic_product(frame, g) << j for j, g in enumerate(code.stabilizers))


def logical_action(code: StabilizerCode, frame: PauliOperator) -> int:
    """Logical Pauli code (I=0, X=1, Z=2, Y=3) read off from commutation with the logicals.

    This is a group homomorphism on the whole Pauli group; for zero-syndrome
    frames it is the frame's logical coset.
    """
    _check_frame(code, frame)
    has_x = symplectic_product(frame, code.logical_z)
    has_z = symplectic_product(frame, code.logical_x)
    return has_x | (has_z << 1)


def embed_logical(code: StabilizerCode, logical: int) -> PauliOperator:
    """Unsigned physical representative X̄^x Z̄^z of a logical Pauli code."""
    p = PauliOperator.identity(code.n_physical)
    if logical & 1:
        p = p * code.logical_x
    if logical & 2:
        p = p * code.logical_z
    return p.unsigned()


def classify_residual(code: StabilizerCode, frame: PauliOperator) -> ResidualClass:
    s = extract_syndrome(code, frame)
    if any(s):
        return ResidualClass(ResidualKind.DETECTABLE, s)
    if logical_action(code, frame) == 0:
        return ResidualClass(ResidualKind.IDENTITY_COSET)
    return ResidualClass(ResidualKind.LOGICAL_ERROR)


def min_weight_recovery_table(n, stabilizers) -> tuple[PauliOperator, ...]:
    """Lowest-weight Pauli per syndrome; ties go to the smallest label (I < X < Y < Z)."""
    table: dict[int, PauliOperator] = {}
    for p in _paulis_by_weight(n):
        s = sum(symplectic_product(p, g) << j for j, g in enumerate(stabilizers))
        table.setdefault(s, p)
        if len(table) == 1 << len(stabilizers):
            break
    return tuple(table[s] for s in range(1 << len(stabilizers)))


def _build(name, stabilizers, logical_x, logical_z, recovery=None) -> StabilizerCode:
    gens = tuple(PauliOperator.from_string(s) for s in stabilizers)
    lx = PauliOperator.from_string(logical_x)
    lz = PauliOperator.from_string(logical_z)
    n = lx.n_qubits
    if recovery is None:
        rec = min_weight_recovery_table(n, gens)
    else:
        rec = tuple(PauliOperator.from_string(recovery[s]) for s in range(1 << len(gens)))
    return StabilizerCode(name, n, gens, lx, lz, rec)


def bitflip_code() -> StabilizerCode:
    """Three-qubit bit-flip code, stabilizers ZZI and IZZ."""
    return _build("bitflip", ["ZZI", "IZZ"], "XXX", "ZZZ")


def five_qubit_code() -> StabilizerCode:
    """The perfect [[5,1,3]] code with cyclic generators XZZXI."""
    gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    return _build("five_qubit", gens, "XXXXX", "ZZZZZ")


def trivial_code() -> StabilizerCode:
    """A bare physical qubit: no stabilizers, no recovery.  Used for physical RB."""
    return _build("trivial", [], "X", "Z")


_REGISTRY = {
    "bitflip": bitflip_code,
    "five_qubit": five_qubit_code,
    "trivial": trivial_code,
}


def get_code(spec) -> StabilizerCode:
    """Resolve a registered code name or a JSON-style dict."""
    if isinstance(spec, StabilizerCode):
        return spec
    if isinstance(spec, str):
        try:
            return _REGISTRY[spec]()
        except KeyError:
            raise ValueError(f"unknown code {spec!r}; known: {sorted(_REGISTRY)}") from None
    return code_from_dict(spec)


def _syndrome_str(s: int, r: int) -> str:
    return "".join(str((s >> j) & 1) for j in range(r))


def code_to_dict(code: StabilizerCode) -> dict:
    r = len(code.stabilizers)
    return {
        "name": code.name,
        "n": code.n_physical,
        "stabilizers": [p.label for p in code.stabilizers],
        "logical_x": code.logical_x.label,
        "logical_z": code.logical_z.label,
        "recovery": {_syndrome_str(s, r): p.label for s, p in enumerate(code.recovery)},
    }


def code_from_dict(d: dict) -> StabilizerCode:
    """Inverse of ``code_to_dict``.  A missing recovery map gets the minimum-weight table."""
    gens = d["stabilizers"]
    rec = d.get("recovery")
    if rec is not None:
        r = len(gens)
        by_int = {}
        for key, val in rec.items():
            if len(key) != r or set(key) - {"0", "1"}:
                raise ValueError(f"bad syndrome key {key!r}")
            by_int[sum(int(b) << j for j, b in enumerate(key))] = val
        if len(by_int) != 1 << r:
            raise ValueError("recovery map must list every syndrome")
        rec = by_int
    code = _build(d.get("name", "custom"), gens, d["logical_x"], d["logical_z"], rec)
    if "n" in d and d["n"] != code.n_physical:
        raise ValueError("declared n does not match operator length")
    return code


def code_to_json(code: StabilizerCode) -> str:
    return json.dumps(code_to_dict(code), indent=2, sort_keys=True)


def syndrome_table(code: StabilizerCode, paulis) -> np.ndarray:
    """Integer syndromes for a sequence of Paulis."""
    return np.array([syndrome_index(code, p) for p in paulis], dtype=np.int64)
