"""Monte Carlo simulation of logical and physical randomized benchmarking.

Trials are exact Pauli-frame trajectories.  Each round is: encoded logical
Clifford, physical error (then recovery-round noise), syndrome readout,
recovery, and a syndrome refresh that keeps only the logical part of the
frame.  The frame is tracked relative to the ideal circuit, so survival of
|0_bar> against the effect |0_bar><0_bar| means the final frame commutes
with the logical Z.

Randomness is keyed, not sequential.  The gate word of sequence i at length m
comes from the Philox stream (0, m, i) derived from the master seed.  Shots of
that sequence read the stream (1, m, i): shot t owns the fixed counter window
starting at t * W / 4, where W is the per-shot draw count padded to a multiple
of four.  Inside a window the draws are [prep, meas, (noise, recovery noise,
leak) per round].  The result of any trial therefore depends only on
(seed, m, i, t), whatever order or process evaluates it.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
import json
import io

import numpy as np

from .channels import PauliChannel, identity_channel
from .codes import StabilizerCode, embed_logical, logical_action, syndrome_index
from .config import RbConfig
from .logical import (
    KET0,
    RecoveryMode,
    depolarizing_parameter,
    average_gate_fidelity,
    clifford_ptm,
    encoder_unitary,
    logical_channel_ptm,
    pauli_vector,
    spam_constants,
    _as_superop,
)
from .pauli import (
    CliffordTableau,
    PauliOperator,
    clifford_conjugate,
    enumerate_single_qubit_cliffords,
    pauli_commutes,
    pauli_matrix,
    single_qubit_clifford_tables,
    single_qubit_clifford_unitaries,
)

__all__ = [
    "SurvivalDataset",
    "sequence_rng",
    "shot_rng",
    "generate_sequence",
    "generate_sequence_indices",
    "shot_width",
    "shot_uniforms",
    "draw_shot_uniforms",
    "TrialNoise",
    "realize_trial_noise",
    "propagate_frame",
    "run_lrb_trial",
    "simulate_sequence",
    "simulate_lrb",
    "simulate_physical_rb",
    "dense_trial_survival",
    "decay_constants",
    "exact_sequence_average",
    "BRUTE_FORCE_MAX_M",
]

BRUTE_FORCE_MAX_M = 4
DRAWS_PER_ROUND = 3
LEAK_CODES = np.array([1, 3, 2])  # X, Y, Z as Pauli codes


def sequence_rng(master_seed: int, m: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(0, m, i))))


def _shot_bitgen(master_seed: int, m: int, i: int) -> np.random.Philox:
    return np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(1, m, i)))


def shot_width(rounds: int) -> int:
    """Uniforms reserved per shot; a multiple of 4 so windows align with Philox blocks."""
    return 4 * -(-(2 + DRAWS_PER_ROUND * rounds) // 4)


def shot_rng(master_seed: int, m: int, i: int, t: int) -> np.random.Generator:
    """Generator positioned at the window of shot t (the sequence has m + 1 rounds)."""
    bg = _shot_bitgen(master_seed, m, i)
    bg.advance(t * shot_width(m + 1) // 4)
    return np.random.Generator(bg)


def shot_uniforms(master_seed: int, m: int, i: int, shots: int):
    """(prep, meas, rounds) uniforms for shots 0..shots-1 in one draw."""
    rounds = m + 1
    block = np.random.Generator(_shot_bitgen(master_seed, m, i)).random((shots, shot_width(rounds)))
    body = block[:, 2:2 + DRAWS_PER_ROUND * rounds].reshape(shots, rounds, DRAWS_PER_ROUND)
    return block[:, 0], block[:, 1], body


def generate_sequence_indices(m: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """m uniform indices into the canonical Clifford list, plus the index of the inverse."""
    if m < 1:
        raise ValueError("sequence length must be >= 1")
    compose, inverse, _ = single_qubit_clifford_tables()
    idx = rng.integers(0, 24, size=m)
    total = 0
    for g in idx:
        total = compose[total, g]
    return idx, int(inverse[total])


def generate_sequence(m: int, rng: np.random.Generator) -> tuple[list[CliffordTableau], CliffordTableau]:
    group = enumerate_single_qubit_cliffords()
    idx, inv = generate_sequence_indices(m, rng)
    return [group[g] for g in idx], group[inv]


def draw_shot_uniforms(rng: np.random.Generator, rounds: int):
    u = rng.random(shot_width(rounds))
    return u[0], u[1], u[2:2 + DRAWS_PER_ROUND * rounds].reshape(rounds, DRAWS_PER_ROUND)


# --- per-trial reference path ---------------------------------------------


@dataclass(frozen=True)
class TrialNoise:
    """One realization of every random event in a trial."""

    prep: int  # logical Pauli code
    meas: int
    errors: tuple[PauliOperator, ...]  # physical error per round, recovery noise folded in
    leaks: tuple[int, ...]  # logical code used if the round's residual is detectable


def _channel_or_identity(ch: PauliChannel | None, n: int) -> PauliChannel:
    return identity_channel(n) if ch is None else ch


def realize_trial_noise(config: RbConfig, uniforms) -> TrialNoise:
    prep_u, meas_u, rounds = uniforms
    n = config.code_obj().n_physical
    noise = config.noise_channel()
    rnoise = _channel_or_identity(config.recovery_noise_channel(), n)
    prep = _channel_or_identity(config.prep_channel(), 1)
    meas = _channel_or_identity(config.meas_channel(), 1)

    def code_of(ch, u):
        p = ch.items[int(ch.index_of_uniform(u))][0]
        return p.x | (p.z << 1)

    errors = []
    leaks = []
    for u_err, u_rec, u_leak in rounds:
        e = noise.items[int(noise.index_of_uniform(u_err))][0]
        r = rnoise.items[int(rnoise.index_of_uniform(u_rec))][0]
        errors.append((e * r).unsigned())
        leaks.append(int(LEAK_CODES[min(int(3 * u_leak), 2)]))
    return TrialNoise(code_of(prep, prep_u), code_of(meas, meas_u), tuple(errors), tuple(leaks))


def _logical_pauli(code: int) -> PauliOperator:
    return PauliOperator(1, code & 1, code >> 1)


def _encoded_conjugate(code: StabilizerCode, gate: CliffordTableau, frame: PauliOperator) -> PauliOperator:
    # the encoded gate acts on the logical factor only; syndrome part is untouched
    lg = logical_action(code, frame)
    rest = frame * embed_logical(code, lg)
    img = clifford_conjugate(gate, _logical_pauli(lg))
    return (embed_logical(code, img.x | (img.z << 1)) * rest).unsigned()


def propagate_frame(code: StabilizerCode, gates, noise: TrialNoise, recovery=RecoveryMode.LOOKUP,
                    timing: str = "concurrent") -> bool:
    """Survival of one trial given its gates (inverse last) and noise realization."""
    recovery = RecoveryMode.parse(recovery)
    if len(gates) != len(noise.errors):
        raise ValueError("need one error per gate")
    frame = embed_logical(code, noise.prep)
    pending = []
    for j, (gate, err) in enumerate(zip(gates, noise.errors)):
        if err.n_qubits != code.n_physical:
            raise ValueError("error size does not match code")
        before = _encoded_conjugate(code, gate, frame)
        frame = before * err
        s = syndrome_index(code, frame)
        if recovery is RecoveryMode.TRIVIAL:
            if s:
                frame = before * embed_logical(code, noise.leaks[j])
        elif timing == "concurrent":
            frame = code.recovery[s] * frame
        else:
            pending.append((j, code.recovery[s]))
        frame = embed_logical(code, logical_action(code, frame))  # refresh
    for j, rec in pending:
        # push the deferred correction through every later encoded gate
        rec = embed_logical(code, logical_action(code, rec))
        for gate in gates[j + 1:]:
            rec = _encoded_conjugate(code, gate, rec)
        frame = frame * rec
    frame = frame * embed_logical(code, noise.meas)
    return pauli_commutes(frame, code.logical_z)


def run_lrb_trial(code: StabilizerCode, config: RbConfig, sequence, rng: np.random.Generator) -> bool:
    """Sample one trial's noise from ``rng`` and return its survival."""
    gates, inverse = sequence
    gates = list(gates) + [inverse]
    noise = realize_trial_noise(config, draw_shot_uniforms(rng, len(gates)))
    return propagate_frame(code, gates, noise, config.recovery_mode, config.recovery_timing)


# --- vectorized engine ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _Tables:
    cum_noise: np.ndarray
    noise_logical: np.ndarray
    noise_syndrome: np.ndarray
    cum_rnoise: np.ndarray
    rnoise_logical: np.ndarray
    rnoise_syndrome: np.ndarray
    rec_logical: np.ndarray
    cum_prep: np.ndarray
    prep_code: np.ndarray
    cum_meas: np.ndarray
    meas_code: np.ndarray
    recovery: RecoveryMode
    timing: str


def _support_tables(code: StabilizerCode, ch: PauliChannel):
    cum = ch._cumulative
    log = np.array([logical_action(code, p) for p in ch.paulis], dtype=np.int64)
    syn = np.array([syndrome_index(code, p) for p in ch.paulis], dtype=np.int64)
    return cum, log, syn


def _logical_support(ch: PauliChannel):
    return ch._cumulative, np.array([p.x | (p.z << 1) for p in ch.paulis], dtype=np.int64)


@lru_cache(maxsize=32)
def _tables_for(config_json: str) -> _Tables:
    config = RbConfig.from_dict(json.loads(config_json))
    code = config.code_obj()
    n = code.n_physical
    cn, ln, sn = _support_tables(code, config.noise_channel())
    cr, lr, sr = _support_tables(code, _channel_or_identity(config.recovery_noise_channel(), n))
    rec = np.array([logical_action(code, r) for r in code.recovery], dtype=np.int64)
    cp, pc = _logical_support(_channel_or_identity(config.prep_channel(), 1))
    cm, mc = _logical_support(_channel_or_identity(config.meas_channel(), 1))
    return _Tables(cn, ln, sn, cr, lr, sr, rec, cp, pc, cm, mc,
                   config.recovery_mode, config.recovery_timing)


def _config_key(config: RbConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True)


def simulate_sequence(config: RbConfig, gate_idx, prep_u, meas_u, rounds_u) -> np.ndarray:
    """Survival booleans for a batch of shots of one gate word (inverse included).

    ``rounds_u`` has shape (shots, rounds, 3); ``prep_u``/``meas_u`` shape (shots,).
    """
    tb = _tables_for(_config_key(config))
    compose, _, conj = single_qubit_clifford_tables()
    gate_idx = np.asarray(gate_idx)
    shots, rounds, _ = rounds_u.shape
    if rounds != len(gate_idx):
        raise ValueError("uniform array does not match number of rounds")
    frame = tb.prep_code[np.searchsorted(tb.cum_prep, prep_u, side="right")]
    deferred = np.zeros((shots, rounds), dtype=np.int64)
    for j, g in enumerate(gate_idx):
        frame = conj[g, frame]
        e = np.searchsorted(tb.cum_noise, rounds_u[:, j, 0], side="right")
        r = np.searchsorted(tb.cum_rnoise, rounds_u[:, j, 1], side="right")
        log = tb.noise_logical[e] ^ tb.rnoise_logical[r]
        syn = tb.noise_syndrome[e] ^ tb.rnoise_syndrome[r]
        if tb.recovery is RecoveryMode.TRIVIAL:
            leak = LEAK_CODES[np.minimum((3 * rounds_u[:, j, 2]).astype(np.int64), 2)]
            frame = frame ^ np.where(syn != 0, leak, log)
        elif tb.timing == "concurrent":
            frame = frame ^ log ^ tb.rec_logical[syn]
        else:
            frame = frame ^ log
            deferred[:, j] = tb.rec_logical[syn]
    if tb.recovery is RecoveryMode.LOOKUP and tb.timing == "postprocessed":
        suffix = 0  # composite of the gates after round j
        for j in range(rounds - 1, -1, -1):
            frame = frame ^ conj[suffix, deferred[:, j]]
            suffix = compose[gate_idx[j], suffix]
    frame = frame ^ tb.meas_code[np.searchsorted(tb.cum_meas, meas_u, side="right")]
    return (frame & 1) == 0


def _run_sequence(config: RbConfig, m: int, i: int) -> tuple[int, int, int]:
    idx, inv = generate_sequence_indices(m, sequence_rng(config.master_seed, m, i))
    gates = np.append(idx, inv)
    prep, meas, body = shot_uniforms(config.master_seed, m, i, config.shots_per_sequence)
    surv = simulate_sequence(config, gates, prep, meas, body)
    return m, i, int(surv.sum())


def _run_chunk(config_dict: dict, jobs):
    config = RbConfig.from_dict(config_dict)
    return [_run_sequence(config, m, i) for m, i in jobs]


@dataclass(frozen=True)
class SurvivalDataset:
    rows: tuple[tuple[int, int, int, int], ...]  # (m, sequence_index, survivals, shots)
    config: dict = field(default_factory=dict)

    CSV_HEADER = "m,sequence_index,survivals,shots"

    def __post_init__(self):
        rows = tuple(sorted(tuple(int(v) for v in r) for r in self.rows))
        keys = [(m, i) for m, i, _, _ in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (m, sequence_index) rows")
        for m, i, s, t in rows:
            if not 0 <= s <= t or t <= 0:
                raise ValueError(f"bad row {(m, i, s, t)}")
        object.__setattr__(self, "rows", rows)

    @property
    def lengths(self) -> np.ndarray:
        return np.array(sorted({r[0] for r in self.rows}))

    def survival_fractions(self) -> dict[int, np.ndarray]:
        """Per-sequence survival fractions grouped by m, ordered by sequence index."""
        out: dict[int, list[float]] = {}
        for m, _, s, t in self.rows:
            out.setdefault(m, []).append(s / t)
        return {m: np.array(v) for m, v in out.items()}

    def mean_survival(self) -> dict[int, float]:
        out: dict[int, list[int]] = {}
        for m, _, s, t in self.rows:
            acc = out.setdefault(m, [0, 0])
            acc[0] += s
            acc[1] += t
        return {m: s / t for m, (s, t) in sorted(out.items())}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(",".join(str(v) for v in r) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, config: dict | None = None) -> "SurvivalDataset":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != cls.CSV_HEADER:
            raise ValueError(f"dataset CSV must start with header {cls.CSV_HEADER!r}")
        rows = []
        for k, ln in enumerate(lines[1:], start=2):
            parts = ln.split(",")
            if len(parts) != 4:
                raise ValueError(f"line {k}: expected 4 fields")
            rows.append(tuple(int(p) for p in parts))
        return cls(tuple(rows), config or {})


def default_workers() -> int:
    return max(1, int(os.environ.get("LRB_THREADS", "1")))


def simulate_lrb(config: RbConfig, workers: int | None = None) -> SurvivalDataset:
    """Full dataset over all lengths and sequences; independent of ``workers``."""
    workers = default_workers() if workers is None else workers
    jobs = [(m, i) for m in config.sequence_lengths for i in range(config.sequences_per_length)]
    if workers <= 1:
        results = [_run_sequence(config, m, i) for m, i in jobs]
    else:
        chunks = [jobs[k::workers] for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [config.to_dict()] * len(chunks), chunks)
            results = [r for part in parts for r in part]
    rows = tuple((m, i, s, config.shots_per_sequence) for m, i, s in results)
    return SurvivalDataset(rows, config.to_dict())


def simulate_physical_rb(channel: PauliChannel, config: RbConfig, workers: int | None = None) -> SurvivalDataset:
    """Single-qubit RB with ``channel`` after every gate, reusing the config's design."""
    if channel.n_qubits != 1:
        raise ValueError("physical RB needs a single-qubit channel")
    phys = RbConfig.for_physical_rb(
        channel,
        sequence_lengths=config.sequence_lengths,
        sequences_per_length=config.sequences_per_length,
        shots_per_sequence=config.shots_per_sequence,
        master_seed=config.master_seed,
        prep_noise=config.prep_noise,
        meas_noise=config.meas_noise,
    )
    return simulate_lrb(phys, workers)


# --- dense density-matrix check ---------------------------------------------


def dense_trial_survival(code: StabilizerCode, gate_idx, noise: TrialNoise, recovery=RecoveryMode.LOOKUP) -> bool:
    """Simulate one trial on the full 2^n density matrix (small n only).

    ``gate_idx`` lists the canonical Clifford indices, inverse last.
    """
    recovery = RecoveryMode.parse(recovery)
    ds = 1 << len(code.stabilizers)
    enc = encoder_unitary(code)
    dec = enc.conj().T
    units = single_qubit_clifford_unitaries()
    dim = enc.shape[0]
    stab = [(np.eye(dim) + g.to_matrix()) / 2 for g in code.stabilizers]
    anc0 = np.zeros((ds, ds))
    anc0[0, 0] = 1

    def encode(rho_l):
        return enc @ np.kron(rho_l, anc0) @ dec

    def logical_state(rho):
        return np.einsum("asbs->ab", (dec @ rho @ enc).reshape(2, ds, 2, ds))

    def flip(rho_l, c):
        p = pauli_matrix(_logical_pauli(c).label)
        return p @ rho_l @ p

    def outcome(proj, rho):
        plus = np.trace(proj @ rho).real
        if min(plus, 1 - plus) > 1e-9:
            raise RuntimeError("measurement outcome is not deterministic")
        return plus > 0.5

    rho = encode(flip(KET0, noise.prep))
    for j, (g, err) in enumerate(zip(gate_idx, noise.errors)):
        ubar = enc @ np.kron(units[g], np.eye(ds)) @ dec
        clean = ubar @ rho @ ubar.conj().T
        e = err.to_matrix()
        rho = e @ clean @ e.conj().T
        s = sum((0 if outcome(proj, rho) else 1) << k for k, proj in enumerate(stab))
        if recovery is RecoveryMode.TRIVIAL:
            # a detectable residual is scored as a uniformly random logical error
            rho_l = flip(logical_state(clean), noise.leaks[j]) if s else logical_state(rho)
        else:
            rc = code.recovery[s].to_matrix()
            rho_l = logical_state(rc @ rho @ rc.conj().T)
        rho = encode(rho_l)
    return bool(outcome(KET0, flip(logical_state(rho), noise.meas)))


# --- exact averages -------------------------------------------------------------


def decay_constants(config: RbConfig) -> tuple[float, float, float]:
    """(A_L, p_L, B_L) of the exact decay for the configured code, noise and SPAM."""
    lam = logical_channel_ptm(config.code_obj(), config.noise_channel(), config.recovery_mode,
                              config.recovery_noise_channel())
    a, b = spam_constants(lam, config.prep_channel(), config.meas_channel())
    p = depolarizing_parameter(average_gate_fidelity(lam))
    return a, p, b


def _sequence_average_bruteforce(lam_ptm: np.ndarray, rho_v: np.ndarray, q_v: np.ndarray, m: int) -> float:
    group = enumerate_single_qubit_cliffords()
    compose, inverse, _ = single_qubit_clifford_tables()
    step = np.stack([lam_ptm @ clifford_ptm(t) for t in group])  # noisy gate PTMs
    vecs = rho_v[None, :]
    total = np.zeros(1, dtype=np.int64)
    for _ in range(m):
        vecs = np.einsum("gij,nj->ngi", step, vecs).reshape(-1, 4)
        total = compose[total[:, None], np.arange(24)[None, :]].reshape(-1)
    final = step[inverse[total]]
    out = np.einsum("nij,nj->ni", final, vecs)
    return float(np.mean(out @ q_v) / 2)


def exact_sequence_average(code: StabilizerCode, config: RbConfig, m: int, method: str = "bruteforce") -> float:
    """Expected survival at length m.

    ``bruteforce`` averages the exact PTM product over all 24^m words;
    ``twirl`` evaluates A p^m + B.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lam = logical_channel_ptm(code, config.noise_channel(), config.recovery_mode,
                              config.recovery_noise_channel())
    if method == "twirl":
        a, b = spam_constants(lam, config.prep_channel(), config.meas_channel())
        p = depolarizing_parameter(average_gate_fidelity(lam))
        return a * p**m + b
    if method != "bruteforce":
        raise ValueError(f"unknown method {method!r}")
    if m > BRUTE_FORCE_MAX_M:
        raise ValueError(f"m={m} too large for brute force (max {BRUTE_FORCE_MAX_M}); use method='twirl'")
    rho_v = _as_superop(config.prep_channel()).ptm @ pauli_vector(KET0)
    q_v = _as_superop(config.meas_channel()).ptm.T @ pauli_vector(KET0)
    return _sequence_average_bruteforce(lam.ptm, rho_v, q_v, m)
