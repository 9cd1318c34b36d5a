"""Walkthrough: rebuild the space-time convergence table.

Uniform initial data (v, w) = (0.2, 0.1), no applied current, dt = h^2.
With these choices the diffusion term vanishes identically and the exact
solution is the cell ODE, so each level's L2 error is measured against a
high-accuracy RK4 solve.  Expect sroc -> 2 and troc -> 1.

Pass --extended to add the h = 1/128 level (minutes, not seconds).
Equivalent CLI:  monofem study --model fhn --format md
"""
import sys

from monofem import StudyConfig, convergence_study, make_model
from monofem.cli import emit_table

levels = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
if "--extended" in sys.argv:
    levels.append(1 / 128)

for name in ("fhn", "rm", "ap", "ms"):
    records = convergence_study(
        StudyConfig(model=make_model(name), levels=levels, t_final=0.25)
    )
    print(f"== {name} ==")
    print(emit_table(records, "md"))
