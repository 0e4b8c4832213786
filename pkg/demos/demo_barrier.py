"""Lower-bound the eigenfunction above a near-boundary hole with a parabola.

A harmonic function on the parabola region {y >= M x^2, y <= 3d/2} with a
cosine cap scaled by the boundary-flux constant of the unpunctured domain
sits below the eigenfunction; integrating the squared eigenfunction over
the box just above the hole then scales like delta^4.  This script solves
the barrier, translates it over holes of three radii in the collar of the
ellipse, counts violations of the ordering (there should be none), and
prints the quartic ratio.

Run:  python3 demos/demo_barrier.py   (about a minute)
"""

from holeopt import (Hole, PuncturedDomain, SmoothDomain, barrier_comparison,
                     solve_parabola)

print("== barrier on the vertex-coordinates parabola (M=3, d=0.25, flux 1)")
pp = solve_parabola(3.0, 0.25, 1.0)
print(f"   mesh: {pp.mesh.n_vertices} vertices; cap max = {pp.w.max():.5f} "
      f"(= flux * d / 8 = {0.25 / 8:.5f})")

ellipse = SmoothDomain.ellipse(1.4, 1.0)
delta = 0.05
pd = PuncturedDomain(ellipse, Hole((0.0, 1.0 - delta - 0.5 * delta**2), delta))
print("\n== comparison against real eigenfunctions in the collar")
rep = barrier_comparison(pd, M=3.0, d=0.25, deltas=(0.08, 0.06, 0.04), seed=0)
print(f"   flux constant of the unpunctured ellipse: {rep['flux_constant']:.4f}")
print("   delta   clearance   violations   (int u^2 over box)/delta^4")
for r in rep["per_delta"]:
    print(f"   {r['delta']:.2f}   {r['clearance']:.2e}   {r['violations']:10d}"
          f"   {r['ratio']:.4f}")
print(f"   quartic ratio stays in a band of spread {rep['ratio_spread']:.2f} "
      f"(lower estimate {rep['sigma_est']:.3f})")
