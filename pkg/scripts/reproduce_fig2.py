"""Heading 11pi/16: noise-free robustness against both funnels, plus a noisy seed sweep.

Writes fig2_robustness.svg and fig2_noisy.svg and prints how many seeds satisfy the formula.
"""

import math

import numpy as np

from _common import outdir, parser, scenario
from stlfunnel import svg
from stlfunnel.simulator import check_satisfaction, run, run_batch

THETA0 = 11 * math.pi / 16


def main():
    p = parser(__doc__, "out/fig2")
    p.add_argument("--seeds", type=int, default=20)
    args = p.parse_args()
    out = outdir(args.out)
    base = scenario("fig1").with_overrides(theta0=THETA0)

    clean = run(base.with_overrides(noise=False))
    lo, hi = base.bundle.tasks[0].controller.aug_funnel_bounds()
    n = len(clean.times)
    extra = [("aug", clean.rho_aug[:, 0], np.full(n, lo), np.full(n, hi))]
    svg.write(out / "fig2_robustness.svg", svg.robustness_svg(clean, extra, title="11pi/16, noise-free"))
    print(f"noise-free: min(rho-gamma) {clean.min_margin()[0]:+.4f}, min(rho_aug-gamma_aug) {np.nanmin(clean.rho_aug[:, 0]) - lo:+.4f}")

    runs = [base.with_overrides(noise=True, seed=s) for s in range(args.seeds)]
    trajs = run_batch(runs, workers=args.workers)
    sat = [check_satisfaction(tr, sc.formula).satisfied for sc, tr in zip(runs, trajs)]
    print(f"noisy: {sum(sat)}/{len(sat)} seeds satisfy {base.formula_text}")
    text = svg.trajectory_svg(trajs, base.predicates.values(), base.plot_bounds, title="11pi/16, noisy seeds")
    svg.write(out / "fig2_noisy.svg", text)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
