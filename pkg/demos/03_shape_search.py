"""Searching for capacity-minimizing lattice sets at fixed cardinality.

Starting from a quasi-ball, the optimizer alternates symmetrization
descent steps (guaranteed never to increase the objective) with random
boundary exchange moves.  The audit then checks the structure the theory
predicts for minimizers: direction convexity, small diameter, and a
perimeter comparable to the lattice ball's.
"""
from isocap import (
    Objective,
    diameter,
    min_sym_diff_to_ball,
    minimize,
    quasi_ball,
    r_alpha,
    scaled_perimeter,
    structural_audit,
)

N = 33
rN = r_alpha(float(N), 3)
obj = Objective(kind="p_cap", p=2.0, truncation=3.0 * rN)

state = minimize(N, obj, d=3, seed=0, max_sweeps=6, exchange_batch=30)
X = state.best_set
print(f"N = {N}: best scaled capacity {state.best_value:.6f} "
      f"after {state.evaluations} objective evaluations")

start = quasi_ball(N, 3)
print(f"quasi-ball start value: {obj.value_of(obj.solve(start)):.6f}")

audit = structural_audit(X, obj)
print(f"direction-convex: {audit['direction_convex']}")
print(f"diameter / N^(1/3): {diameter(X) / N ** (1 / 3):.2f}")
print(f"scaled perimeter P_N: {scaled_perimeter(X):.3f} "
      f"(ball: {scaled_perimeter(start):.3f})")
_, sym = min_sym_diff_to_ball(X, rN)
print(f"symmetric difference to the best ball translate: {sym}")
