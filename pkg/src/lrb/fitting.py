"""Fit survival decays to A p^m + B and turn fitted decays into code properties."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .rb import SurvivalDataset

__all__ = [
    "InsufficientDesignError",
    "DecayFit",
    "CodePropertyEstimate",
    "decay_model",
    "fit_curve",
    "fit_decay",
    "estimate_code_properties",
]

LOWER = np.array([-1.0, 0.0, -1.0])  # (A, p, B)
UPPER = np.array([1.0, 1.0, 1.0])
FLAT_TOL = 1e-12


class InsufficientDesignError(ValueError):
    pass


def decay_model(m, a, p, b):
    return a * np.power(p, m) + b


@dataclass(frozen=True)
class DecayFit:
    a_hat: float
    p_hat: float
    b_hat: float
    ci_68: dict  # name -> (lo, hi)
    n_bootstrap: int
    residual_norm: float
    flat: bool = False
    p_samples: np.ndarray = field(default=None, repr=False, compare=False)
    config: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def fidelity(self) -> float:
        return (self.p_hat + 1) / 2

    @property
    def p_sigma(self) -> float:
        """Bootstrap standard deviation of p (half-width of the 68% interval if no samples)."""
        if self.p_samples is not None and len(self.p_samples) > 1:
            return float(np.std(self.p_samples, ddof=1))
        lo, hi = self.ci_68["p"]
        return (hi - lo) / 2

    def to_dict(self) -> dict:
        return {
            "a": self.a_hat,
            "p": self.p_hat,
            "b": self.b_hat,
            "ci68": {k: list(v) for k, v in self.ci_68.items()},
            "fidelity": self.fidelity,
            "residual_norm": self.residual_norm,
            "n_bootstrap": self.n_bootstrap,
            "flat": self.flat,
        }


def _initial_guesses(m, y):
    b0 = float(np.clip(y[np.argmax(m)], -1, 1))
    d = y - b0
    keep = np.abs(d) > 1e-9
    keep &= np.sign(d) == np.sign(d[np.argmin(m)] if d[np.argmin(m)] != 0 else 1)
    p0 = 0.9
    if keep.sum() >= 2:
        slope = np.polyfit(m[keep], np.log(np.abs(d[keep])), 1)[0]
        p0 = float(np.exp(slope))
    p0 = float(np.clip(p0, 1e-3, 1 - 1e-6))
    a0 = float(np.clip((y[np.argmin(m)] - b0) / p0 ** m.min(), -1, 1))
    return [np.array([a0, p0, b0]), np.array([0.5, 0.95, 0.5]), np.array([0.5, 0.5, 0.5])]


def fit_curve(m, y, weights=None, x0=None) -> tuple[np.ndarray, float]:
    """Bounded least-squares fit of y(m) = A p^m + B; returns ((A, p, B), residual norm).

    Without ``x0`` several starting points are tried and the best kept.
    """
    m = np.asarray(m, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if weights is None else np.sqrt(np.asarray(weights, dtype=float))

    def resid(th):
        a, p, b = th
        return w * (decay_model(m, a, p, b) - y)

    def jac(th):
        a, p, b = th
        pm = np.power(p, m)
        dp = np.where(m > 0, a * m * np.power(p, np.maximum(m - 1, 0)), 0.0)
        return w[:, None] * np.column_stack([pm, dp, np.ones_like(m)])

    best = None
    starts = _initial_guesses(m, y) if x0 is None else [np.asarray(x0, dtype=float)]
    for start in starts:
        start = np.clip(start, LOWER, UPPER)
        res = least_squares(resid, start, jac=jac, bounds=(LOWER, UPPER), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        if best is None or res.cost < best.cost:
            best = res
    theta = best.x
    return theta, float(np.linalg.norm((decay_model(m, *theta) - y)))


def _means(fractions: dict[int, np.ndarray], lengths):
    return np.array([fractions[m].mean() for m in lengths])


def _weights(dataset: SurvivalDataset, lengths, weighting: str, y):
    shots = {}
    for m, _, _, t in dataset.rows:
        shots[m] = shots.get(m, 0) + t
    n = np.array([shots[m] for m in lengths], dtype=float)
    if weighting == "uniform":
        return n / n.max()
    if weighting == "binomial":
        var = np.clip(y * (1 - y), 1e-6, None) / n
        return 1 / var / (1 / var).max()
    raise ValueError(f"unknown weighting {weighting!r}")


def fit_decay(dataset: SurvivalDataset, n_bootstrap: int = 1000, seed: int = 0,
              weighting: str = "uniform") -> DecayFit:
    """Fit the mean survival per length and bootstrap over sequences.

    ``weighting`` is "uniform" (weights proportional to shots per length) or
    "binomial" (inverse binomial variance of each mean).
    """
    lengths = dataset.lengths
    if len(lengths) < 3:
        raise InsufficientDesignError("need at least 3 distinct sequence lengths")
    fractions = dataset.survival_fractions()
    y = _means(fractions, lengths)
    w = _weights(dataset, lengths, weighting, y)
    m = lengths.astype(float)

    if np.ptp(y) <= FLAT_TOL:
        b = float(y.mean())
        ci = {"a": (-1.0, 1.0), "p": (0.0, 1.0), "b": (b, b)}
        return DecayFit(0.0, 1.0, b, ci, 0, 0.0, True, None, dict(dataset.config))

    theta, rnorm = fit_curve(m, y, w)
    rng = np.random.default_rng(seed)
    samples = np.empty((n_bootstrap, 3))
    for k in range(n_bootstrap):
        yb = np.array([rng.choice(fractions[L], size=len(fractions[L])).mean() for L in lengths])
        samples[k] = fit_curve(m, yb, _weights(dataset, lengths, weighting, yb), x0=theta)[0]
    ci = {}
    for j, name in enumerate("apb"):
        if n_bootstrap:
            lo, hi = np.percentile(samples[:, j], [15.865, 84.135])
        else:
            lo = hi = theta[j]
        # percentile intervals can miss a point estimate sitting on a bound
        ci[name] = (float(min(lo, theta[j])), float(max(hi, theta[j])))
    return DecayFit(float(theta[0]), float(theta[1]), float(theta[2]), ci, n_bootstrap, rnorm,
                    False, samples[:, 1] if n_bootstrap else None, dict(dataset.config))


@dataclass(frozen=True)
class CodePropertyEstimate:
    pr_no_hat: float
    pr_co_hat: float
    pr_un_hat: float
    intervals: dict  # name -> (lo, hi)
    sigmas: dict  # name -> bootstrap standard deviation

    def to_dict(self) -> dict:
        return {
            "pr_no": self.pr_no_hat,
            "pr_co": self.pr_co_hat,
            "pr_un": self.pr_un_hat,
            "ci68": {k: list(v) for k, v in self.intervals.items()},
            "sigma": dict(self.sigmas),
        }


def _triple(p_rec, p_norec):
    f_rec = (np.asarray(p_rec) + 1) / 2
    f_norec = (np.asarray(p_norec) + 1) / 2
    return f_norec, f_rec - f_norec, 1 - f_rec


def _check_pairing(fit_rec: DecayFit, fit_norec: DecayFit):
    a = {k: v for k, v in fit_rec.config.items() if k != "recovery"}
    b = {k: v for k, v in fit_norec.config.items() if k != "recovery"}
    if a and b and a != b:
        diff = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
        raise ValueError(f"fits come from different experiments (differ in {diff})")


def estimate_code_properties(fit_rec, fit_norec) -> CodePropertyEstimate:
    """(Pr(No), Pr(Co), Pr(Un)) from decays with and without recovery.

    Accepts DecayFit objects or bare decay parameters p.  Bootstrap samples of
    the two fits are paired replica by replica when both are available.
    """
    p_rec = fit_rec.p_hat if isinstance(fit_rec, DecayFit) else float(fit_rec)
    p_norec = fit_norec.p_hat if isinstance(fit_norec, DecayFit) else float(fit_norec)
    for v in (p_rec, p_norec):
        if not 0 <= v <= 1:
            raise ValueError("decay parameters must lie in [0, 1]")
    no, co, un = (float(v) for v in _triple(p_rec, p_norec))
    names = ("pr_no", "pr_co", "pr_un")
    point = dict(zip(names, (no, co, un)))
    intervals = {k: (v, v) for k, v in point.items()}
    sigmas = {k: 0.0 for k in names}
    if isinstance(fit_rec, DecayFit) and isinstance(fit_norec, DecayFit):
        _check_pairing(fit_rec, fit_norec)
        sr, sn = fit_rec.p_samples, fit_norec.p_samples
        if sr is not None and sn is not None:
            k = min(len(sr), len(sn))
            for name, col in zip(names, _triple(sr[:k], sn[:k])):
                lo, hi = np.percentile(col, [15.865, 84.135])
                intervals[name] = (float(min(lo, point[name])), float(max(hi, point[name])))
                sigmas[name] = float(np.std(col, ddof=1))
    return CodePropertyEstimate(no, co, un, intervals, sigmas)
