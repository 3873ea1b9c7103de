"""Symplectic Pauli operators and Clifford tableaux.

An n-qubit Pauli is stored as two packed bitmasks (bit j is qubit j) plus a
power of i, so that

    P = i**phase * sigma(x_0, z_0) (x) ... (x) sigma(x_{n-1}, z_{n-1})

with sigma(0,0)=I, sigma(1,0)=X, sigma(1,1)=Y, sigma(0,1)=Z.  Textual form
writes qubit 0 first, e.g. ``"-iXYZ"``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PauliOperator",
    "CliffordTableau",
    "pauli_multiply",
    "pauli_commutes",
    "clifford_conjugate",
    "clifford_compose",
    "clifford_invert",
    "enumerate_single_qubit_cliffords",
    "single_qubit_clifford_tables",
    "pauli_matrix",
]

_PHASE_TEXT = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(r"^([+-]i?)?([IXYZ]+)$")
_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _check_same_size(a, b):
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")


@dataclass(frozen=True)
class PauliOperator:
    n_qubits: int
    x: int
    z: int
    phase: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be nonnegative")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("bit vector longer than n_qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        m = _PAULI_RE.match(text.strip())
        if m is None:
            raise ValueError(f"invalid Pauli string {text!r}")
        sign, body = m.groups()
        phase = {None: 0, "+": 0, "+i": 1, "-": 2, "-i": 3}[sign]
        x = z = 0
        for j, c in enumerate(body):
            if c in "XY":
                x |= 1 << j
            if c in "ZY":
                z |= 1 << j
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, label: str) -> "PauliOperator":
        """``label`` on ``qubit``, identity elsewhere."""
        if not 0 <= qubit < n:
            raise IndexError(f"qubit {qubit} out of range for {n} qubits")
        body = ["I"] * n
        body[qubit] = label
        return cls.from_string("".join(body))

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> j) & 1 for j in range(self.n_qubits))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> j) & 1 for j in range(self.n_qubits))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def label(self) -> str:
        """Unsigned Pauli letters, qubit 0 first."""
        return "".join(
            "IXZY"[((self.x >> j) & 1) | (((self.z >> j) & 1) << 1)]
            for j in range(self.n_qubits)
        )

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n_qubits, self.x, self.z, 0)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.label

    def __repr__(self) -> str:
        return f"PauliOperator({str(self)!r})"

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return pauli_multiply(self, other)

    def inverse(self) -> "PauliOperator":
        # sigma's are Hermitian and square to I, so only the scalar inverts
        return PauliOperator(self.n_qubits, self.x, self.z, -self.phase)

    def to_matrix(self) -> np.ndarray:
        return (1j ** self.phase) * pauli_matrix(self.label)


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of an unsigned Pauli string; qubit 0 is the most significant tensor factor."""
    m = np.ones((1, 1), dtype=complex)
    for c in label:
        m = np.kron(m, _SIGMA[c])
    return m


def pauli_multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    _check_same_size(a, b)
    ay, ax, az = a.x & a.z, a.x & ~a.z, a.z & ~a.x
    by, bx, bz = b.x & b.z, b.x & ~b.z, b.z & ~b.x
    # cyclic X->Y->Z products pick up +i, anticyclic ones -i
    plus = _popcount((ax & by) | (ay & bz) | (az & bx))
    minus = _popcount((ax & bz) | (ay & bx) | (az & by))
    return PauliOperator(a.n_qubits, a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + plus - minus)


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    _check_same_size(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) & 1


def pauli_commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


@dataclass(frozen=True)
class CliffordTableau:
    """Clifford unitary C, stored as the images C X_j C^dag and C Z_j C^dag."""

    n_qubits: int
    x_images: tuple[PauliOperator, ...]
    z_images: tuple[PauliOperator, ...]

    def __post_init__(self):
        n = self.n_qubits
        if len(self.x_images) != n or len(self.z_images) != n:
            raise ValueError("need one X and one Z image per qubit")
        for p in self.x_images + self.z_images:
            if p.n_qubits != n:
                raise ValueError("image has wrong number of qubits")
            if p.phase % 2:
                raise ValueError("images of Hermitian generators must have real sign")
        for j in range(n):
            for k in range(n):
                if symplectic_product(self.x_images[j], self.x_images[k]):
                    raise ValueError("X images must commute")
                if symplectic_product(self.z_images[j], self.z_images[k]):
                    raise ValueError("Z images must commute")
                if symplectic_product(self.x_images[j], self.z_images[k]) != (j == k):
                    raise ValueError("X_j and Z_k images must anticommute iff j == k")

    @classmethod
    def identity(cls, n: int) -> "CliffordTableau":
        return cls(
            n,
            tuple(PauliOperator.single(n, j, "X") for j in range(n)),
            tuple(PauliOperator.single(n, j, "Z") for j in range(n)),
        )

    @classmethod
    def from_strings(cls, x_images, z_images) -> "CliffordTableau":
        xs = tuple(PauliOperator.from_string(s) for s in x_images)
        zs = tuple(PauliOperator.from_string(s) for s in z_images)
        return cls(len(xs), xs, zs)

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "CliffordTableau":
        """Tableau of a dense Clifford unitary (exponential in n; for small n only)."""
        d = u.shape[0]
        n = d.bit_length() - 1
        if 1 << n != d:
            raise ValueError("unitary dimension must be a power of two")

        def image(p: PauliOperator) -> PauliOperator:
            m = u @ p.to_matrix() @ u.conj().T
            for label in _all_labels(n):
                q = pauli_matrix(label)
                c = np.trace(q @ m) / d
                if abs(abs(c) - 1) < 1e-9:
                    sign = 0 if c.real > 0 else 2
                    return PauliOperator.from_string(label) * PauliOperator(n, 0, 0, sign)
            raise ValueError("matrix is not a Clifford unitary")

        return cls(
            n,
            tuple(image(PauliOperator.single(n, j, "X")) for j in range(n)),
            tuple(image(PauliOperator.single(n, j, "Z")) for j in range(n)),
        )

    def conjugate(self, p: PauliOperator) -> PauliOperator:
        return clifford_conjugate(self, p)

    def key(self) -> tuple[str, ...]:
        return tuple(str(p) for p in self.x_images + self.z_images)

    def __str__(self) -> str:
        parts = [f"X{j}->{self.x_images[j]}, Z{j}->{self.z_images[j]}" for j in range(self.n_qubits)]
        return "; ".join(parts)


@lru_cache(maxsize=None)
def _all_labels(n: int) -> tuple[str, ...]:
    labels = [""]
    for _ in range(n):
        labels = [s + c for s in labels for c in "IXYZ"]
    return tuple(labels)


def clifford_conjugate(t: CliffordTableau, p: PauliOperator) -> PauliOperator:
    """Return ``C p C^dag`` with its sign tracked."""
    _check_same_size(t, p)
    # Y = i X Z per qubit, so p = i**(phase + #Y) * prod_j X_j**x_j Z_j**z_j
    out = PauliOperator(p.n_qubits, 0, 0, p.phase + _popcount(p.x & p.z))
    for j in range(p.n_qubits):
        if (p.x >> j) & 1:
            out = pauli_multiply(out, t.x_images[j])
        if (p.z >> j) & 1:
            out = pauli_multiply(out, t.z_images[j])
    return out


def clifford_compose(first: CliffordTableau, second: CliffordTableau) -> CliffordTableau:
    """Tableau of applying ``first`` and then ``second``."""
    _check_same_size(first, second)
    return CliffordTableau(
        first.n_qubits,
        tuple(clifford_conjugate(second, p) for p in first.x_images),
        tuple(clifford_conjugate(second, p) for p in first.z_images),
    )


def clifford_invert(t: CliffordTableau) -> CliffordTableau:
    n = t.n_qubits

    def preimage(target: PauliOperator) -> PauliOperator:
        # symplectic products are preserved, which pins down the bits
        x = z = 0
        for k in range(n):
            if symplectic_product(target, t.z_images[k]):
                x |= 1 << k
            if symplectic_product(target, t.x_images[k]):
                z |= 1 << k
        q = PauliOperator(n, x, z)
        if clifford_conjugate(t, q).phase != target.phase:
            q = PauliOperator(n, x, z, 2)
        return q

    return CliffordTableau(
        n,
        tuple(preimage(PauliOperator.single(n, j, "X")) for j in range(n)),
        tuple(preimage(PauliOperator.single(n, j, "Z")) for j in range(n)),
    )


# Canonical single-qubit Clifford order: sort by (image of X, image of Z), each
# drawn from the sequence below.  Index 0 is the identity.
_SIGNED_ORDER = ("+X", "-X", "+Y", "-Y", "+Z", "-Z")


@lru_cache(maxsize=None)
def enumerate_single_qubit_cliffords() -> tuple[CliffordTableau, ...]:
    """The 24 single-qubit Cliffords (modulo global phase) in canonical order.

    Elements are ordered by the image of X over ``+X, -X, +Y, -Y, +Z, -Z``
    and then by the image of Z over ``+Z, -Z, +Y, -Y, +X, -X`` (skipping
    images that commute with the X image).  Index 0 is the identity and
    index 1 is the Pauli X gate; ``single_qubit_clifford_labels()`` lists the
    full table.
    """
    out = []
    for xi in _SIGNED_ORDER:
        for zi in _z_order_for(xi):
            out.append(CliffordTableau.from_strings([xi], [zi]))
    return tuple(out)


def _z_order_for(x_image: str) -> tuple[str, ...]:
    # the Z image must anticommute with the X image; identity-like choice first
    letter = x_image[1]
    others = [s for s in ("+Z", "-Z", "+Y", "-Y", "+X", "-X") if s[1] != letter]
    return tuple(others)


def single_qubit_clifford_labels() -> list[tuple[str, str]]:
    """(X image, Z image) for each canonical index."""
    return [(str(t.x_images[0]), str(t.z_images[0])) for t in enumerate_single_qubit_cliffords()]


@lru_cache(maxsize=None)
def single_qubit_clifford_tables():
    """Lookup tables over the canonical 24-element group.

    Returns ``(compose, inverse, conj)`` where ``compose[a, b]`` is the index of
    "apply a, then b", ``inverse[a]`` the inverse index and ``conj[a, c]`` the
    unsigned image of the single-qubit Pauli with code ``c`` under element a.
    Pauli codes are ``x | z << 1`` (I=0, X=1, Z=2, Y=3).
    """
    group = enumerate_single_qubit_cliffords()
    index = {t.key(): i for i, t in enumerate(group)}
    compose = np.empty((24, 24), dtype=np.int64)
    for a, ta in enumerate(group):
        for b, tb in enumerate(group):
            compose[a, b] = index[clifford_compose(ta, tb).key()]
    inverse = np.array([index[clifford_invert(t).key()] for t in group], dtype=np.int64)
    conj = np.empty((24, 4), dtype=np.int64)
    for a, t in enumerate(group):
        for c in range(4):
            img = clifford_conjugate(t, PauliOperator(1, c & 1, c >> 1))
            conj[a, c] = img.x | (img.z << 1)
    for arr in (compose, inverse, conj):
        arr.setflags(write=False)
    return compose, inverse, conj


@lru_cache(maxsize=None)
def single_qubit_clifford_unitaries() -> tuple[np.ndarray, ...]:
    """A 2x2 unitary for each canonical Clifford, found by search over H/S words."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)
    found: dict[tuple, np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    while frontier and len(found) < 24:
        nxt = []
        for u in frontier:
            k = CliffordTableau.from_unitary(u).key()
            if k in found:
                continue
            found[k] = u
            nxt.extend([h @ u, s @ u])
        frontier = nxt
    return tuple(found[t.key()] for t in enumerate_single_qubit_cliffords())
