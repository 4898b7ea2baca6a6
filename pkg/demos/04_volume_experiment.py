"""Pseudo-volume preservation on SO(3), end to end.

The frozen divergence-free field is stepped with the plain geodesic
method and with its aroma-preprocessed variant; the volume defect of one
step shrinks like t^2 for the former and t^4 for the latter.  Run as
``python3 demos/04_volume_experiment.py`` (takes a few seconds).
"""

import numpy as np

from postlie import (
    ExperimentConfig,
    divergence,
    divergence_free_field,
    geometric_grid,
    make_reference_stepper,
    random_rotation,
    run_experiment,
    step_volume,
)
import random

field = divergence_free_field()
p = np.asarray(random_rotation(random.Random(0)), dtype=np.longdouble)

print("== the field is divergence free ==")
print("Div F at 3 random points:",
      [divergence(field, np.asarray(random_rotation(random.Random(s)), float))
       for s in range(3)])

print()
print("== the exact flow preserves volume ==")
ref = make_reference_stepper(field)
for t in (1e-2, 1e-3):
    print(f"  |log det| of reference flow at t={t:g}: "
          f"{abs(float(step_volume(ref, p, t))):.2e}")

print()
print("== one-step volume defect, both methods ==")
grid = geometric_grid(1e-3, 1e-1, 6)
for method in ("lie-euler", "aromatic"):
    result = run_experiment(
        ExperimentConfig(kind="volume", method=method, t_grid=grid, seed=0))
    print(f"  {method}: slope {result.slope:.3f} "
          f"(residual {result.residual:.1e})")
    for row in result.rows:
        print(f"    t={row.t:.4e}  |log det|={row.abs_err:.3e}")
