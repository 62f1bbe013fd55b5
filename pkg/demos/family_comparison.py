"""Compare approximator families on the sine-source problem.

J[y] = integral of (y'^2 - y^2 - 2xy) on (0, 1) with y(0) = y(1) = 0,
minimized by y = sin(x)/sin(1) - x. Each family trains from its own
random initialization with the same budget; the loss curves land in
an SVG next to this script.

Run:  python3 demos/family_comparison.py
"""

import os

from varipade import TrainConfig, case_by_name, parse_structure, relative_error, train
from varipade.plotting import write_curves_svg

case = case_by_name("sine-source")
structures = ["Pade-[4/5]", "RBF-[8]", "MLP-[[8,sigmoid]]", "Leg-8", "Poly-8"]
config = TrainConfig(steps=3000, grid_n=500, record_every=25, seed=0)

print(f"problem: {case.name}, J_exact = {case.j_exact_analytic:.10f}")
series = {}
for structure in structures:
    report = train(case.problem, parse_structure(structure), config)
    rel = relative_error(case.j_exact_analytic, report.j_final)
    print(f"  {structure:20s} J = {report.j_final:+.8f}  rel err {rel:+.2e}  "
          f"({report.wall_time_ms:.0f} ms)")
    # plot the gap to the exact functional, which is positive by optimality
    series[structure] = [
        (step, loss - case.j_exact_analytic) for step, loss in report.loss_history
    ]

out = os.path.join(os.path.dirname(__file__), "family_comparison.svg")
write_curves_svg(series, out, logy=True, ylabel="J - J_exact")
print(f"wrote {out}")
