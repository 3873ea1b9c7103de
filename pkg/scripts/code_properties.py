"""Estimate Pr(No), Pr(Co), Pr(Un) from simulated logical RB and compare with the exact values.

    python3 scripts/code_properties.py [--config configs/bitflip_p0.1.json] [--threads 4]
"""
import argparse
import time
from pathlib import Path

from lrb import rb
from lrb.config import load_experiment_config
from lrb.fitting import estimate_code_properties, fit_decay
from lrb.logical import error_probabilities

DEFAULT = Path(__file__).resolve().parents[1] / "configs" / "bitflip_p0.1.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(DEFAULT))
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--bootstrap", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()

    exp = load_experiment_config(args.config, args.seed)
    cfg = exp.rb.with_(recovery="lookup")
    n_boot = args.bootstrap or exp.n_bootstrap
    start = time.perf_counter()
    fits = {}
    for mode in ("lookup", "trivial"):
        c = cfg.with_(recovery=mode)
        fits[mode] = fit_decay(rb.simulate_lrb(c, args.threads), n_bootstrap=n_boot)
        exact = rb.decay_constants(c)[1]
        f = fits[mode]
        print(f"{mode:8s} p_hat {f.p_hat:.6f}  68% CI [{f.ci_68['p'][0]:.6f}, {f.ci_68['p'][1]:.6f}]"
              f"  exact {exact:.6f}  z {(f.p_hat - exact) / f.p_sigma:+.2f}")
    est = estimate_code_properties(fits["lookup"], fits["trivial"])
    truth = error_probabilities(cfg.code_obj(), cfg.noise_channel(), cfg.recovery_noise_channel())
    print()
    print(f"{'':8s} {'estimate':>10s} {'sigma':>10s} {'exact':>10s}")
    for name, hat, exact in zip(("pr_no", "pr_co", "pr_un"),
                                (est.pr_no_hat, est.pr_co_hat, est.pr_un_hat), truth.as_tuple()):
        print(f"{name:8s} {hat:10.6f} {est.sigmas[name]:10.6f} {exact:10.6f}")
    print(f"\n{time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
