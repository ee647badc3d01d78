"""Goal reaching from six initial headings, noise-free, single augmented task.

Writes fig1_trajectories.svg and prints the formula robustness per heading.
"""

import math

from _common import outdir, parser, scenario
from stlfunnel import svg
from stlfunnel.simulator import check_satisfaction, run_batch

ANGLES = (0.0, math.pi / 4, math.pi / 2, 11 * math.pi / 16, 15 * math.pi / 16, math.pi)
LABELS = ("0", "pi/4", "pi/2", "11pi/16", "15pi/16", "pi")


def main():
    args = parser(__doc__, "out/fig1").parse_args()
    out = outdir(args.out)
    base = scenario("fig1")
    runs = [base.with_overrides(noise=False, theta0=th) for th in ANGLES]
    trajs = run_batch(runs, workers=args.workers)
    for lab, sc, tr in zip(LABELS, runs, trajs):
        rv = check_satisfaction(tr, sc.formula)
        print(f"theta0={lab:>8}  robustness {rv.value:+.4f}  min(rho-gamma) {tr.min_margin()[0]:+.4f}")
    text = svg.trajectory_svg(trajs, base.predicates.values(), base.plot_bounds, labels=LABELS, title="initial headings")
    svg.write(out / "fig1_trajectories.svg", text)
    print(f"wrote {out / 'fig1_trajectories.svg'}")


if __name__ == "__main__":
    main()
