"""Pressure of the truncated shifts, two ways.

The eigen route diagonalizes the depth-m discretized transfer operator;
the iterate route sums L^n 1 over all length-n words.  Both converge to
the same number, the iterate route with a visible 1/n bias.
"""

import numpy as np

from bouquet import build_model, default_spec
from bouquet.engine import build, pressure_eigen, pressure_iterate
from bouquet.shift import ZERO

model = build_model(0.25)
spec = default_spec()

print(f"lambda = {model.lam}, attracting q = {model.q:.6f}, "
      f"repelling p = {model.p:.6f}")
print()

print("eigen route, N = 1, deepening the cylinder discretization:")
for m in range(1, 7):
    est = pressure_eigen(build(model, spec, 1, m))
    print(f"  m = {m}: P = {est.value:.12f}  (residual {est.residual:.1e})")
print()

print("iterate route from the fixed-point itinerary 0-bar:")
for est in pressure_iterate(model, spec, 1, ZERO, 10):
    print(f"  n = {est.m_or_n:2d}: (1/n) log L^n 1 = {est.value:.8f}")
print()

print("truncation level N grows, pressure is nondecreasing:")
for N in (1, 2, 3):
    est = pressure_eigen(build(model, spec, N, 4))
    print(f"  N = {N}: P = {est.value:.12f}")
