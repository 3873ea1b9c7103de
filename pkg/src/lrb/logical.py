"""Exact logical channels of small stabilizer codes under Pauli noise.

Two independent routes are provided.  The combinatorial route walks the
error distribution and reads off each residual's logical action; the dense
route builds the encoder unitary and pushes matrices through noise,
syndrome projection, recovery and decoding.  A third route models the
syndrome readout through an explicit ancilla register.

Recovery modes
--------------
``LOOKUP`` applies the code's recovery table.  ``TRIVIAL`` applies nothing,
and a round whose residual has a nonzero syndrome is scored as a logical
failure: the logical qubit receives X, Y or Z with probability 1/3 each.
With this rule the average fidelity of the trivial-recovery channel is
``1 - (2/3) Pr[residual outside the stabilizer group]``, which is the
no-recovery fidelity used for the bit-flip code polynomials.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channels import (
    PauliChannel,
    Superoperator,
    average_gate_fidelity,
    channel_to_ptm,
    compose_channels,
    ptm_from_map,
)
from .codes import StabilizerCode, logical_action, syndrome_index
from .pauli import (
    CliffordTableau,
    PauliOperator,
    clifford_conjugate,
    enumerate_single_qubit_cliffords,
    pauli_matrix,
)

__all__ = [
    "RecoveryMode",
    "ProbTriple",
    "logical_pauli_probabilities",
    "logical_channel",
    "logical_channel_ptm",
    "logical_channel_ptm_dense",
    "ancilla_logical_channel_ptm",
    "ancilla_equivalence_check",
    "logical_fidelity",
    "error_probabilities",
    "depolarizing_parameter",
    "twirl_channel",
    "twirl_explicit",
    "clifford_ptm",
    "spam_constants",
    "encoder_unitary",
    "pauli_vector",
]

LOGICAL_LABELS = ("I", "X", "Z", "Y")  # indexed by code x | z << 1


class RecoveryMode(enum.Enum):
    LOOKUP = "lookup"
    TRIVIAL = "trivial"

    @classmethod
    def parse(cls, v) -> "RecoveryMode":
        return v if isinstance(v, cls) else cls(str(v).lower())


@dataclass(frozen=True)
class ProbTriple:
    pr_no: float
    pr_co: float
    pr_un: float

    def __post_init__(self):
        for name in ("pr_no", "pr_co", "pr_un"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1 + 1e-12:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if abs(self.pr_no + self.pr_co + self.pr_un - 1) > 1e-12:
            raise ValueError("probabilities do not sum to 1")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.pr_no, self.pr_co, self.pr_un)


def _effective_noise(noise: PauliChannel, recovery_noise: PauliChannel | None) -> PauliChannel:
    # Pauli recovery noise commutes through the Pauli correction and is self-dual,
    # so it can be folded in before the syndrome is read.
    if recovery_noise is None:
        return noise
    return compose_channels(noise, recovery_noise)


def _check_noise(code: StabilizerCode, noise: PauliChannel):
    if noise.n_qubits != code.n_physical:
        raise ValueError(f"noise acts on {noise.n_qubits} qubits, code has {code.n_physical}")


def logical_pauli_probabilities(code, noise, recovery=RecoveryMode.LOOKUP, recovery_noise=None):
    """Probabilities of logical I, X, Z, Y (indexed by Pauli code) after one round."""
    _check_noise(code, noise)
    recovery = RecoveryMode.parse(recovery)
    noise = _effective_noise(noise, recovery_noise)
    probs = np.zeros(4)
    for e, w in noise.items:
        s = syndrome_index(code, e)
        if recovery is RecoveryMode.LOOKUP:
            probs[logical_action(code, code.recovery[s] * e)] += w
        elif s:
            probs[1:] += w / 3
        else:
            probs[logical_action(code, e)] += w
    return probs


def logical_channel(code, noise, recovery=RecoveryMode.LOOKUP, recovery_noise=None) -> PauliChannel:
    probs = logical_pauli_probabilities(code, noise, recovery, recovery_noise)
    return PauliChannel.from_dict(1, {LOGICAL_LABELS[c]: probs[c] for c in range(4)})


def logical_channel_ptm(code, noise, recovery=RecoveryMode.LOOKUP, recovery_noise=None) -> Superoperator:
    return channel_to_ptm(logical_channel(code, noise, recovery, recovery_noise))


def logical_fidelity(code, noise, recovery=RecoveryMode.LOOKUP, recovery_noise=None) -> float:
    return average_gate_fidelity(logical_channel_ptm(code, noise, recovery, recovery_noise))


def error_probabilities(code, noise, recovery_noise=None) -> ProbTriple:
    f_rec = logical_fidelity(code, noise, RecoveryMode.LOOKUP, recovery_noise)
    f_norec = logical_fidelity(code, noise, RecoveryMode.TRIVIAL, recovery_noise)
    return ProbTriple(pr_no=f_norec, pr_co=f_rec - f_norec, pr_un=1 - f_rec)


def depolarizing_parameter(fidelity: float, d: int = 2) -> float:
    return (d * fidelity - 1) / (d - 1)


def _check_single_qubit(s: Superoperator):
    if s.d != 2:
        raise ValueError(f"expected a single-qubit superoperator, got d={s.d}")


def twirl_channel(s: Superoperator) -> tuple[float, Superoperator]:
    """Clifford twirl of a single-qubit channel: (p, PTM diag(1, p, p, p))."""
    _check_single_qubit(s)
    p = depolarizing_parameter(average_gate_fidelity(s), s.d)
    return p, Superoperator(2, np.diag([1.0, p, p, p]))


def clifford_ptm(t: CliffordTableau) -> np.ndarray:
    """Signed-permutation PTM of a single-qubit Clifford (basis I, X, Y, Z)."""
    order = ["I", "X", "Y", "Z"]
    r = np.zeros((4, 4))
    r[0, 0] = 1
    for j, label in enumerate(order[1:], start=1):
        img = clifford_conjugate(t, PauliOperator.from_string(label))
        r[order.index(img.label), j] = 1 if img.phase == 0 else -1
    return r


def twirl_explicit(s: Superoperator) -> Superoperator:
    """Average of C^dag o s o C over the 24 single-qubit Cliffords."""
    _check_single_qubit(s)
    acc = np.zeros((4, 4))
    for t in enumerate_single_qubit_cliffords():
        rc = clifford_ptm(t)
        acc += rc.T @ s.ptm @ rc
    return Superoperator(2, acc / 24)


def pauli_vector(m: np.ndarray) -> np.ndarray:
    """Coefficients Tr(P_i m) over the single-qubit basis I, X, Y, Z."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 operator")
    return np.array([np.trace(pauli_matrix(c) @ m).real for c in "IXYZ"])


def _as_superop(ch) -> Superoperator:
    if ch is None:
        return Superoperator.identity(2)
    if isinstance(ch, PauliChannel):
        if ch.n_qubits != 1:
            raise ValueError("SPAM channels act on the single logical qubit")
        return channel_to_ptm(ch)
    _check_single_qubit(ch)
    return ch


def _check_state(rho):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or not np.allclose(rho, rho.conj().T, atol=1e-12):
        raise ValueError("state must be a Hermitian 2x2 matrix")
    ev = np.linalg.eigvalsh(rho)
    if ev.min() < -1e-12 or abs(np.trace(rho).real - 1) > 1e-12:
        raise ValueError("state must be positive with unit trace")
    return rho


def _check_effect(q):
    q = np.asarray(q, dtype=complex)
    if q.shape != (2, 2) or not np.allclose(q, q.conj().T, atol=1e-12):
        raise ValueError("effect must be a Hermitian 2x2 matrix")
    ev = np.linalg.eigvalsh(q)
    if ev.min() < -1e-12 or ev.max() > 1 + 1e-12:
        raise ValueError("effect must satisfy 0 <= Q <= 1")
    return q


KET0 = np.array([[1, 0], [0, 0]], dtype=complex)


def spam_constants(lambda_L, lambda_P=None, lambda_M=None, rho=KET0, q_effect=KET0):
    """Decay constants (A, B) of the sequence-averaged survival A p^m + B.

    A = Tr(Q_eff L[rho_L - I/2]), B = Tr(Q_eff L[I/2]) with rho_L the
    prepared state after preparation noise and Q_eff the effect pulled back
    through measurement noise.
    """
    lam = _as_superop(lambda_L)
    prep = _as_superop(lambda_P)
    meas = _as_superop(lambda_M)
    rho_v = prep.ptm @ pauli_vector(_check_state(rho))
    q_v = meas.ptm.T @ pauli_vector(_check_effect(q_effect))
    mixed = np.array([1.0, 0, 0, 0])  # I/2
    a = q_v @ lam.ptm @ (rho_v - mixed) / 2
    b = q_v @ lam.ptm @ mixed / 2
    return float(a), float(b)


# --- dense routes -----------------------------------------------------------


def encoder_unitary(code: StabilizerCode) -> np.ndarray:
    """Unitary E with E|l, s> = T(s)|l_bar>, logical qubit most significant.

    T(s) is the product of pure errors for the set bits of s, so the decoder
    E^dag reads the logical action by commutation with the logical operators.
    """
    n = code.n_physical
    r = len(code.stabilizers)
    d = 1 << n
    proj = np.eye(d, dtype=complex)
    for g in code.stabilizers + (code.logical_z,):
        proj = proj @ (np.eye(d) + g.to_matrix()) / 2
    col = next(proj[:, j] for j in range(d) if np.linalg.norm(proj[:, j]) > 1e-9)
    zero = col / np.linalg.norm(col)
    one = code.logical_x.to_matrix() @ zero
    pure = [t.to_matrix() for t in code.pure_errors]
    u = np.empty((d, d), dtype=complex)
    for s in range(1 << r):
        t = np.eye(d, dtype=complex)
        for j in range(r):
            if (s >> j) & 1:
                t = t @ pure[j]
        u[:, s] = t @ zero
        u[:, (1 << r) + s] = t @ one
    return u


def _syndrome_projector(code: StabilizerCode, s: int) -> np.ndarray:
    d = 1 << code.n_physical
    proj = np.eye(d, dtype=complex)
    for j, g in enumerate(code.stabilizers):
        sign = -1 if (s >> j) & 1 else 1
        proj = proj @ (np.eye(d) + sign * g.to_matrix()) / 2
    return proj


def logical_channel_ptm_dense(code, noise, recovery=RecoveryMode.LOOKUP, recovery_noise=None) -> Superoperator:
    """Dense-matrix construction of the logical channel (for n <= 5)."""
    _check_noise(code, noise)
    recovery = RecoveryMode.parse(recovery)
    noise = _effective_noise(noise, recovery_noise)
    n = code.n_physical
    r = len(code.stabilizers)
    enc = encoder_unitary(code)
    dec = enc.conj().T
    errors = [(e.to_matrix(), w) for e, w in noise.items]
    projectors = [_syndrome_projector(code, s) for s in range(1 << r)]
    recoveries = [p.to_matrix() for p in code.recovery]
    anc0 = np.zeros((1 << r, 1 << r), dtype=complex)
    anc0[0, 0] = 1

    def physical(m):
        rho = enc @ np.kron(m, anc0) @ dec
        noisy = sum(w * e @ rho @ e.conj().T for e, w in errors)
        if recovery is RecoveryMode.LOOKUP:
            out = sum(rc @ pj @ noisy @ pj @ rc.conj().T for rc, pj in zip(recoveries, projectors))
        else:
            out = projectors[0] @ noisy @ projectors[0]
        return dec @ out @ enc

    def logical(m):
        full = physical(m).reshape(2, 1 << r, 2, 1 << r)
        return np.einsum("asbs->ab", full)

    if recovery is RecoveryMode.LOOKUP:
        return ptm_from_map(logical, 1)
    return _complete_trivial(logical)


def _complete_trivial(compressed) -> Superoperator:
    """PTM of compressed(m) + loss * (X m X + Y m Y + Z m Z) / 3."""
    loss = 1 - np.trace(compressed(np.eye(2, dtype=complex))).real / 2
    paulis = [pauli_matrix(c) for c in "XYZ"]

    def full(m):
        return compressed(m) + loss * sum(p @ m @ p for p in paulis) / 3

    return ptm_from_map(full, 1)


def _controlled(target: np.ndarray, n_data: int, n_anc: int, anc: int) -> np.ndarray:
    """Controlled-``target`` on the data register, controlled by ancilla ``anc``."""
    da, dn = 1 << n_anc, 1 << n_data
    p0 = np.zeros((da, da))
    p1 = np.zeros((da, da))
    for k in range(da):
        # ancilla j is bit (n_anc - 1 - j) of the ancilla index (ancilla 0 most significant)
        if (k >> (n_anc - 1 - anc)) & 1:
            p1[k, k] = 1
        else:
            p0[k, k] = 1
    return np.kron(np.eye(dn), p0) + np.kron(target, p1)


def _on_ancilla(gate: np.ndarray, n_data: int, n_anc: int, anc: int) -> np.ndarray:
    ops = [np.eye(2)] * n_anc
    ops = list(ops)
    ops[anc] = gate
    m = np.ones((1, 1))
    for o in ops:
        m = np.kron(m, o)
    return np.kron(np.eye(1 << n_data), m)


def ancilla_logical_channel_ptm(code, noise, recovery=RecoveryMode.LOOKUP) -> Superoperator:
    """Logical channel with the syndrome copied onto an explicit ancilla register.

    Each generator is measured by the H / controlled-g / H gadget on a fresh
    |0> ancilla; the ancillas are then measured, the recovery is applied
    conditioned on the outcome and the ancillas are discarded.
    """
    _check_noise(code, noise)
    recovery = RecoveryMode.parse(recovery)
    n = code.n_physical
    r = len(code.stabilizers)
    dn, da = 1 << n, 1 << r
    enc = encoder_unitary(code)
    dec = enc.conj().T
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    coupling = np.eye(dn * da, dtype=complex)
    for j, g in enumerate(code.stabilizers):
        hj = _on_ancilla(h, n, r, j)
        coupling = hj @ _controlled(g.to_matrix(), n, r, j) @ hj @ coupling
    anc_zero = np.zeros(da)
    anc_zero[0] = 1

    def outcome_index(s: int) -> int:
        # measured string: ancilla j holds bit j of s; ancilla 0 is most significant
        return sum(((s >> j) & 1) << (r - 1 - j) for j in range(r))

    kraus_vectors = {0: [], 1: []}
    for a in (0, 1):
        logical_in = np.zeros(2)
        logical_in[a] = 1
        data = enc @ np.kron(logical_in, np.eye(da)[0])
        for e, w in noise.items:
            state = coupling @ np.kron(e.to_matrix() @ data, anc_zero)
            state = state.reshape(dn, da)
            branches = []
            for s in range(da):
                branch = state[:, outcome_index(s)]
                if recovery is RecoveryMode.LOOKUP:
                    branch = code.recovery[s].to_matrix() @ branch
                branches.append(np.sqrt(w) * (dec @ branch).reshape(2, da))
            kraus_vectors[a].append(branches)

    def compressed_on_units(a, b):
        acc = np.zeros((2, 2), dtype=complex)
        for ba, bb in zip(kraus_vectors[a], kraus_vectors[b]):
            for va, vb in zip(ba, bb):
                if recovery is RecoveryMode.LOOKUP:
                    acc += va @ vb.conj().T
                else:
                    acc += np.outer(va[:, 0], vb[:, 0].conj())
        return acc

    units = {(a, b): compressed_on_units(a, b) for a in (0, 1) for b in (0, 1)}

    def logical(m):
        return sum(m[a, b] * units[a, b] for a in (0, 1) for b in (0, 1))

    if recovery is RecoveryMode.LOOKUP:
        return ptm_from_map(logical, 1)
    return _complete_trivial(logical)


def ancilla_equivalence_check(code, noise, recovery=RecoveryMode.LOOKUP, tol=1e-12) -> bool:
    direct = logical_channel_ptm(code, noise, recovery)
    coupled = ancilla_logical_channel_ptm(code, noise, recovery)
    return bool(np.max(np.abs(direct.ptm - coupled.ptm)) <= tol)
