"""Rate-distortion behavior of the copula quantizer, and its one gotcha.

Sweeps the quantizer step alpha over the smoothed-noise fixture and prints
rate, measured distortion, and the closed-form step budget
(sqrt(ln 2) / 4) * B^2 * alpha per point. On structured input the curve
decays cleanly and a log-linear model fits the interior points.

Then the same sweep on plain white noise, where every copula cell mass sits
near 1/B^2. At alpha = 2/B^2 that mass is exactly half a step, the worst
case for round-to-nearest, and the curve spikes mid-sweep above the 1x
budget (never past 2x). This is the documented reason the experiments use
a smoothed fixture, and the reason the budget is gated at 2x rather than
assumed exact.

Run: python3 demos/rate_sweep.py
"""

from copsem.bounds import fit_encoder_model
from copsem.codec import rd_sweep
from copsem.harness import ExperimentConfig, fixture_family
from copsem.image_io import synth_noise
from copsem.rank_copula import extract_family

ALPHAS = (1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256)


def show_sweep(tag, family):
    print(f"--- {tag}")
    print(f"{'alpha':>9} {'rate_bits':>10} {'d_pc':>9} {'budget':>9} {'ratio':>6}")
    points = rd_sweep(family, ALPHAS)
    for pt in points:
        print(
            f"{pt.alpha:9.5f} {pt.rate_theory_bits:10.0f} {pt.distortion:9.5f} "
            f"{pt.bound:9.5f} {pt.distortion / pt.bound:6.2f}"
        )
    interior = points[1:-1]
    try:
        c2, d_eff, r2 = fit_encoder_model(
            [p.rate_theory_bits for p in interior],
            [p.distortion for p in interior],
        )
    except ValueError as exc:
        print(f"log-linear fit over interior points: rejected ({exc})")
    else:
        print(
            f"log-linear fit over interior points: "
            f"c2={c2:.4f} d_eff={d_eff:.0f} R^2={r2:.3f}"
        )
    print()


def main():
    cfg = ExperimentConfig()
    show_sweep("smoothed fixture (256x256)", fixture_family(cfg))
    noise = synth_noise(256, 256, seed=cfg.seed)
    show_sweep("plain white noise (256x256)", extract_family(noise))
    print("watch the white-noise ratio column at alpha = 1/32 = 2/B^2:")
    print("near-uniform cells (~1/64) sit half a step from the lattice and")
    print("the distortion jumps above the single budget, within the 2x gate.")
    print("the fixture also drifts past 1x at the finest step: quantization")
    print("error stops dominating there and copula mass that rounding pushed")
    print("to zero costs linearly, not quadratically. both stay under 2x.")


if __name__ == "__main__":
    main()
