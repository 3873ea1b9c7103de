"""Compare logical fidelity extrapolated from physical RB with the true logical fidelity.

Physical RB runs on the single-qubit marginal of the first data qubit.  Its
fitted fidelity is turned into a flip rate assuming independent noise and fed
into the independent-noise logical fidelity.

    python3 scripts/misestimation.py [--p 0.01] [--q 0.001] [--threads 4]
"""
import argparse

from lrb import analytic, rb
from lrb.channels import (
    PauliChannel,
    bitflip_correlated,
    bitflip_independent,
    compose_channels,
    marginal_channel,
    mix_channels,
)
from lrb.codes import bitflip_code
from lrb.config import RbConfig
from lrb.fitting import fit_decay
from lrb.logical import logical_fidelity

LENGTHS = (1, 2, 4, 8, 16, 32, 64, 128, 256)


def extrapolate(channel, args):
    design = RbConfig(noise={"type": "bitflip_independent", "p": 0.0, "n": 3}, sequence_lengths=LENGTHS,
                      sequences_per_length=args.sequences, shots_per_sequence=args.shots, master_seed=args.seed)
    fit = fit_decay(rb.simulate_physical_rb(marginal_channel(channel, 0), design, args.threads),
                    n_bootstrap=args.bootstrap)
    p_flip = min(1.5 * (1 - fit.fidelity), 1.0)
    return fit.fidelity, analytic.f_rec_ind(p_flip)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--q", type=float, default=0.001)
    ap.add_argument("--anti", type=float, default=0.05, help="flip rate of the anticorrelated channel")
    ap.add_argument("--sequences", type=int, default=50)
    ap.add_argument("--shots", type=int, default=200)
    ap.add_argument("--bootstrap", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    code = bitflip_code()

    corr = compose_channels(bitflip_correlated(args.q, [(0, 1), (1, 2)], 3), bitflip_independent(args.p, 3))
    f_phys, f_ext = extrapolate(corr, args)
    f_true = logical_fidelity(code, corr)
    print(f"correlated flips p={args.p} q={args.q}")
    print(f"  physical RB fidelity   {f_phys:.6f}  (exact {analytic.f_phys_est(args.p, args.q):.6f})")
    print(f"  extrapolated logical   {f_ext:.6f}  (exact {analytic.f_rec_ind(analytic.p_est(args.p, args.q)):.6f})")
    print(f"  true logical           {f_true:.6f}")
    print(f"  overestimate           {f_ext - f_true:+.2e}  (exact {analytic.delta_f(args.p, args.q):+.2e})")

    a = args.anti
    anti = mix_channels([(1 / 3, PauliChannel.from_dict(3, {"III": 1 - a, lab: a})) for lab in ("XII", "IXI", "IIX")])
    f_phys, f_ext = extrapolate(anti, args)
    report = analytic.anticorrelated_report(a)
    print(f"\nanticorrelated single flips, rate {a}")
    print(f"  physical RB fidelity   {f_phys:.6f}  (exact {report.f_phys_est:.6f})")
    print(f"  extrapolated logical   {f_ext:.6f}  (exact {report.f_logical_extrapolated:.6f})")
    print(f"  true logical           {logical_fidelity(code, anti):.6f}")


if __name__ == "__main__":
    main()
