"""Pauli noise channels and Pauli-transfer-matrix superoperators.

The PTM of a channel L on n qubits (d = 2**n) is R[i, j] = Tr(P_i L(P_j)) / d
over the Pauli basis ordered as base-4 strings with qubit 0 most significant
and digits I, X, Y, Z.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Mapping

import numpy as np

from .pauli import PauliOperator, pauli_matrix

__all__ = [
    "PauliChannel",
    "Superoperator",
    "identity_channel",
    "bitflip_independent",
    "bitflip_correlated",
    "depolarizing",
    "compose_channels",
    "mix_channels",
    "marginal_channel",
    "sample_error",
    "channel_to_ptm",
    "average_gate_fidelity",
    "entanglement_fidelity",
    "ptm_from_map",
    "pauli_basis_labels",
    "channel_from_spec",
    "channel_to_spec",
]

PRUNE_BELOW = 1e-15
_SUM_TOL = 1e-12


def _check_prob(name, v):
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {v}")


@dataclass(frozen=True, eq=False)
class PauliChannel:
    """Probability distribution over unsigned n-qubit Paulis, sorted by label."""

    n_qubits: int
    items: tuple[tuple[PauliOperator, float], ...]

    def __post_init__(self):
        seen = set()
        total = 0.0
        for p, w in self.items:
            if p.n_qubits != self.n_qubits:
                raise ValueError("Pauli size does not match channel size")
            if p.phase != 0:
                raise ValueError("channel keys must be phase-normalized")
            if w < 0:
                raise ValueError(f"negative probability {w} for {p.label}")
            if (p.x, p.z) in seen:
                raise ValueError(f"duplicate key {p.label}")
            seen.add((p.x, p.z))
            total += w
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_dict(cls, n_qubits: int, probs: Mapping) -> "PauliChannel":
        merged: dict[tuple[int, int], float] = {}
        for key, w in probs.items():
            p = PauliOperator.from_string(key) if isinstance(key, str) else key
            if p.phase not in (0,):
                raise ValueError(f"channel keys must be unsigned Paulis, got {p}")
            if (p.x, p.z) in merged:
                raise ValueError(f"duplicate key {p.label}")
            merged[p.x, p.z] = float(w)
        return cls._from_bits(n_qubits, merged, prune=False)

    @classmethod
    def _from_bits(cls, n, merged, prune=True) -> "PauliChannel":
        if prune:
            merged = {k: w for k, w in merged.items() if w >= PRUNE_BELOW}
            total = sum(merged.values())
            merged = {k: w / total for k, w in merged.items()}
        items = [(PauliOperator(n, x, z), w) for (x, z), w in merged.items()]
        items.sort(key=lambda t: t[0].label)
        return cls(n, tuple(items))

    def as_dict(self) -> dict[str, float]:
        return {p.label: w for p, w in self.items}

    def probability(self, p) -> float:
        if isinstance(p, str):
            p = PauliOperator.from_string(p)
        for q, w in self.items:
            if q.x == p.x and q.z == p.z:
                return w
        return 0.0

    @cached_property
    def _cumulative(self) -> np.ndarray:
        cum = np.cumsum([w for _, w in self.items])
        cum[-1] = 1.0
        return cum

    @property
    def paulis(self) -> tuple[PauliOperator, ...]:
        return tuple(p for p, _ in self.items)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.items])

    def index_of_uniform(self, u):
        """Support index drawn by inverse CDF from uniform(s) ``u`` in [0, 1)."""
        return np.searchsorted(self._cumulative, u, side="right")

    def __repr__(self) -> str:
        body = ", ".join(f"{p.label}: {w:.6g}" for p, w in self.items)
        return f"PauliChannel({self.n_qubits}, {{{body}}})"


def identity_channel(n: int) -> PauliChannel:
    return PauliChannel(n, ((PauliOperator.identity(n), 1.0),))


def bitflip_independent(p: float, n: int) -> PauliChannel:
    """Each qubit suffers X independently with probability p."""
    _check_prob("p", p)
    ch = identity_channel(n)
    for j in range(n):
        flip = PauliChannel.from_dict(n, {PauliOperator.identity(n): 1 - p,
                                          PauliOperator.single(n, j, "X"): p})
        ch = compose_channels(ch, flip)
    return ch


def bitflip_correlated(q: float, pairs: Iterable[tuple[int, int]], n: int) -> PauliChannel:
    """Pairwise X_i X_j flips with probability q, composed in the order given."""
    _check_prob("q", q)
    ch = identity_channel(n)
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ValueError(f"bad qubit pair ({i}, {j}) for {n} qubits")
        xx = PauliOperator.single(n, i, "X") * PauliOperator.single(n, j, "X")
        pair = PauliChannel.from_dict(n, {PauliOperator.identity(n): 1 - q, xx.unsigned(): q})
        ch = compose_channels(ch, pair)
    return ch


def depolarizing(lam: float) -> PauliChannel:
    """Single-qubit depolarizing channel with PTM diag(1, lam, lam, lam)."""
    if not -1 / 3 <= lam <= 1:
        raise ValueError("lam must lie in [-1/3, 1]")
    e = (1 - lam) / 4
    return PauliChannel.from_dict(1, {"I": 1 - 3 * e, "X": e, "Y": e, "Z": e})


def compose_channels(a: PauliChannel, b: PauliChannel) -> PauliChannel:
    """Convolution under Pauli multiplication (phases dropped)."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    out: dict[tuple[int, int], float] = {}
    for (p, wp), (q, wq) in itertools.product(a.items, b.items):
        k = (p.x ^ q.x, p.z ^ q.z)
        out[k] = out.get(k, 0.0) + wp * wq
    return PauliChannel._from_bits(a.n_qubits, out)


def mix_channels(components: Iterable[tuple[float, PauliChannel]]) -> PauliChannel:
    """Convex combination sum_k w_k C_k."""
    components = list(components)
    n = components[0][1].n_qubits
    total = sum(w for w, _ in components)
    if abs(total - 1) > _SUM_TOL or any(w < 0 for w, _ in components):
        raise ValueError("mixture weights must be nonnegative and sum to 1")
    out: dict[tuple[int, int], float] = {}
    for w, ch in components:
        if ch.n_qubits != n:
            raise ValueError("mixture components differ in size")
        for p, wp in ch.items:
            out[p.x, p.z] = out.get((p.x, p.z), 0.0) + w * wp
    return PauliChannel._from_bits(n, out)


def marginal_channel(c: PauliChannel, qubit: int) -> PauliChannel:
    """Single-qubit channel seen on ``qubit`` after tracing out the rest."""
    if not 0 <= qubit < c.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {c.n_qubits} qubits")
    out: dict[tuple[int, int], float] = {}
    for p, w in c.items:
        k = ((p.x >> qubit) & 1, (p.z >> qubit) & 1)
        out[k] = out.get(k, 0.0) + w
    return PauliChannel._from_bits(1, out)


def sample_error(c: PauliChannel, rng: np.random.Generator) -> PauliOperator:
    return c.items[int(c.index_of_uniform(rng.random()))][0]


@dataclass(frozen=True, eq=False)
class Superoperator:
    d: int
    ptm: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.ptm, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"PTM must be square, got shape {m.shape}")
        if m.shape[0] != self.d * self.d:
            raise ValueError(f"PTM of a d={self.d} channel must be {self.d**2}x{self.d**2}")
        object.__setattr__(self, "ptm", m)

    @classmethod
    def identity(cls, d: int = 2) -> "Superoperator":
        return cls(d, np.eye(d * d))

    def then(self, other: "Superoperator") -> "Superoperator":
        """Apply self, then other."""
        return Superoperator(self.d, other.ptm @ self.ptm)

    def is_trace_preserving(self, tol=1e-12) -> bool:
        row = np.zeros(self.d * self.d)
        row[0] = 1
        return bool(np.allclose(self.ptm[0], row, atol=tol))

    def dual(self) -> "Superoperator":
        """Heisenberg-picture (adjoint) map; the PTM transposes."""
        return Superoperator(self.d, self.ptm.T.copy())


@lru_cache(maxsize=None)
def pauli_basis_labels(n: int) -> tuple[str, ...]:
    return tuple("".join(t) for t in itertools.product("IXYZ", repeat=n))


@lru_cache(maxsize=None)
def _basis_bits(n: int):
    ps = [PauliOperator.from_string(s) for s in pauli_basis_labels(n)]
    return np.array([p.x for p in ps], dtype=np.uint64), np.array([p.z for p in ps], dtype=np.uint64)


def channel_to_ptm(c: PauliChannel) -> Superoperator:
    """Diagonal PTM: entry for basis element B is sum_E w(E) (-1)^<E, B>."""
    n = c.n_qubits
    bx, bz = _basis_bits(n)
    ex = np.array([p.x for p in c.paulis], dtype=np.uint64)[:, None]
    ez = np.array([p.z for p in c.paulis], dtype=np.uint64)[:, None]
    parity = np.bitwise_count((ex & bz) ^ (ez & bx)) & 1
    diag = c.weights @ (1.0 - 2.0 * parity)
    return Superoperator(1 << n, np.diag(diag))


def entanglement_fidelity(s: Superoperator) -> float:
    return float(np.trace(s.ptm)) / (s.d * s.d)


def average_gate_fidelity(s: Superoperator) -> float:
    if isinstance(s, PauliChannel):
        s = channel_to_ptm(s)
    return (s.d * entanglement_fidelity(s) + 1) / (s.d + 1)


def ptm_from_map(fn: Callable[[np.ndarray], np.ndarray], n: int) -> Superoperator:
    """PTM of a linear map on 2^n x 2^n matrices, by feeding it each Pauli."""
    d = 1 << n
    labels = pauli_basis_labels(n)
    mats = [pauli_matrix(s) for s in labels]
    out = np.empty((d * d, d * d))
    for j, pj in enumerate(mats):
        img = fn(pj)
        for i, pi in enumerate(mats):
            out[i, j] = np.trace(pi @ img).real / d
    return Superoperator(d, out)


def channel_from_spec(spec: Mapping) -> PauliChannel:
    """Build a channel from its JSON form.

    Types: ``bitflip_independent`` {p, n}; ``bitflip_correlated`` {q, pairs, n}
    with 0-based pairs; ``depolarizing`` {lam}; ``identity`` {n};
    ``composite`` {channels: [...]} applied in list order; ``mixture``
    {components: [{weight, channel}]}; ``custom`` {n, probabilities}.
    """
    kind = spec.get("type")
    if kind == "bitflip_independent":
        return bitflip_independent(float(spec["p"]), int(spec["n"]))
    if kind == "bitflip_correlated":
        pairs = [tuple(int(v) for v in pr) for pr in spec["pairs"]]
        return bitflip_correlated(float(spec["q"]), pairs, int(spec["n"]))
    if kind == "depolarizing":
        return depolarizing(float(spec["lam"]))
    if kind == "identity":
        return identity_channel(int(spec["n"]))
    if kind == "composite":
        parts = [channel_from_spec(s) for s in spec["channels"]]
        if not parts:
            raise ValueError("composite channel needs at least one part")
        ch = parts[0]
        for nxt in parts[1:]:
            ch = compose_channels(ch, nxt)
        return ch
    if kind == "mixture":
        return mix_channels(
            (float(c["weight"]), channel_from_spec(c["channel"])) for c in spec["components"]
        )
    if kind == "custom":
        return PauliChannel.from_dict(int(spec["n"]), spec["probabilities"])
    raise ValueError(f"unknown channel type {kind!r}")


def channel_to_spec(c: PauliChannel) -> dict:
    return {"type": "custom", "n": c.n_qubits, "probabilities": c.as_dict()}
