"""Hair endpoints and the induced metric on itineraries.

Each eventually-periodic itinerary resolves to the finite endpoint of
its hair by backward iteration; the distance between two itineraries is
the plane distance between their endpoints.
"""

import numpy as np

from bouquet import build_model, endpoint, induced_metric, parse_itinerary
from bouquet.geometry import hair_points, random_itinerary
from bouquet.shift import ZERO

model = build_model(0.25)

print("endpoints of a few itineraries (pre|per form):")
for text in ("|0", "1|0", "-1|0", "|1,-1", "2,0|1"):
    s = parse_itinerary(text)
    hp = endpoint(model, s)
    print(f"  {text:>7s} -> {hp.point.real:+.6f} {hp.point.imag:+.6f}i "
          f"(residual {hp.residual:.1e})")
print()

print("the 0-bar hair passes through the repelling fixed point "
      f"p = {model.p:.6f}:")
pts = hair_points(model, ZERO, depth=8)
for i, z in enumerate(pts):
    print(f"  t = {i}: {z.real:+.6f} {z.imag:+.6f}i")
print()

rng = np.random.default_rng(0)
print("induced metric between random itineraries in Sigma_2:")
for _ in range(5):
    s = random_itinerary(rng, 2)
    t = random_itinerary(rng, 2)
    print(f"  rho({str(s):>10s}, {str(t):>10s}) = "
          f"{induced_metric(model, s, t):.6f}")
