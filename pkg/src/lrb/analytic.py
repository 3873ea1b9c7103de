"""Closed-form logical fidelities of the three-qubit bit-flip code.

Noise model: independent X flips with probability p on each qubit, followed
by correlated X_i X_j flips with probability q on the pairs (1,2) and (2,3).
Every polynomial lives in ``POLYNOMIALS`` as {(i, j): c} meaning sum c p^i q^j.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Fr

__all__ = [
    "POLYNOMIALS",
    "MisestimationReport",
    "f_rec",
    "f_norec",
    "f_rec_ind",
    "f_norec_ind",
    "f_phys_est",
    "p_est",
    "delta_f",
    "pr_triple",
    "anticorrelated_report",
]

# Coefficients of p^i q^j.  The q = 0 parts are the independent-noise
# fidelities; the q terms are the corrections for the correlated pairs.
POLYNOMIALS: dict[str, dict[tuple[int, int], Fr]] = {
    # logical fidelity with lookup recovery
    "f_rec": {
        (0, 0): Fr(1), (2, 0): Fr(-2), (3, 0): Fr(4, 3),
        (0, 1): Fr(-4, 3), (1, 1): Fr(8, 3), (0, 2): Fr(2, 3), (1, 2): Fr(-4, 3),
    },
    # logical fidelity without recovery
    "f_norec": {
        (0, 0): Fr(1), (1, 0): Fr(-2), (2, 0): Fr(2), (3, 0): Fr(-2, 3),
        (0, 1): Fr(-4, 3), (1, 1): Fr(4), (0, 2): Fr(2, 3), (2, 1): Fr(-8, 3),
        (1, 2): Fr(-2), (2, 2): Fr(4, 3),
    },
    # single-qubit fidelity seen by physical RB on one qubit
    "f_phys_est": {
        (0, 0): Fr(1), (1, 0): Fr(-2, 3), (0, 1): Fr(-2, 3), (1, 1): Fr(4, 3),
    },
}


def _check(name, v, hi=1.0):
    if not 0.0 <= v <= hi:
        raise ValueError(f"{name}={v} outside [0, {hi}]")


def _eval(poly, p, q):
    # exact for Fraction inputs, float otherwise
    exact = isinstance(p, Fr) and isinstance(q, Fr)
    return sum((c if exact else float(c)) * p**i * q**j for (i, j), c in poly.items())


def f_rec(p: float, q: float = 0.0) -> float:
    _check("p", p)
    _check("q", q)
    return _eval(POLYNOMIALS["f_rec"], p, q)


def f_norec(p: float, q: float = 0.0) -> float:
    _check("p", p)
    _check("q", q)
    return _eval(POLYNOMIALS["f_norec"], p, q)


def f_rec_ind(p: float) -> float:
    return f_rec(p, 0.0)


def f_norec_ind(p: float) -> float:
    return f_norec(p, 0.0)


def f_phys_est(p: float, q: float = 0.0) -> float:
    _check("p", p)
    _check("q", q)
    return _eval(POLYNOMIALS["f_phys_est"], p, q)


def p_est(p: float, q: float = 0.0) -> float:
    """Flip rate inferred from the single-qubit fidelity assuming independent noise."""
    if q == 0:
        _check("p", p)
        return p
    return Fr(3, 2) * (1 - f_phys_est(p, q)) if isinstance(p, Fr) else 1.5 * (1 - f_phys_est(p, q))


def delta_f(p: float, q: float) -> float:
    """Extrapolated minus true logical fidelity (with recovery).

    Factors as (4/3) q (1 - 2p) g(p, q) with g > 0, so it vanishes on p = 1/2.
    """
    _check("p", p, 0.5)
    _check("q", q, 0.5)
    return f_rec_ind(p_est(p, q)) - f_rec(p, q)


def pr_triple(p: float, q: float = 0.0) -> tuple[float, float, float]:
    """(Pr(No), Pr(Co), Pr(Un)) from the two fidelity polynomials."""
    fr, fn = f_rec(p, q), f_norec(p, q)
    return fn, fr - fn, 1 - fr


@dataclass(frozen=True)
class MisestimationReport:
    f_phys_est: float
    p_est: float
    f_logical_extrapolated: float
    f_logical_true: float
    delta_f: float


def anticorrelated_report(p: float) -> MisestimationReport:
    """Equal mixture of single-qubit flips: physical RB sees p/3, the code sees nothing."""
    _check("p", p)
    f_phys = 1 - 2 * p / 9
    pe = 1.5 * (1 - f_phys)
    extrapolated = f_rec_ind(pe)
    true = 1.0
    return MisestimationReport(f_phys, pe, extrapolated, true, extrapolated - true)
