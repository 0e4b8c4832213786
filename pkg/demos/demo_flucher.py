"""Recover the small-hole asymptotic coefficient from eigenvalue data.

For a shrinking hole at a fixed point x the eigenvalue grows like
lambda0 + 2 pi u(x)^2 / (-log r + c).  This script solves a radius sweep at
the disk center, fits the two-parameter model, and compares the fitted
coefficient to 2 pi u(0)^2 from the unpunctured solve.

Run:  python3 demos/demo_flucher.py   (a few minutes)
"""

from holeopt import SmoothDomain, flucher_fit

disk = SmoothDomain.disk(1.0)
radii = (0.1, 0.07, 0.05, 0.035, 0.02)
print("== radius sweep at x = (0, 0) on the unit disk")
fit = flucher_fit(disk, (0.0, 0.0), radii, target_h=0.015,
                  hole_refine_factor=4.0, seed=0)
print("   r        lambda1")
for r, lam in zip(fit.radii, fit.lambdas):
    print(f"   {r:5.3f}   {lam:.6f}")
print(f"   lambda0 (no hole) = {fit.lambda_base:.6f}")
print(f"   fitted coefficient a = {fit.a_fit:.4f}, offset c = {fit.c_fit:.4f}")
print(f"   reference 2 pi u(0)^2 = {fit.reference:.4f}")
print(f"   relative gap: {abs(fit.a_fit - fit.reference) / fit.reference:.2%}")
print("   (the logarithmic remainder is far below desk scale; the recovered")
print("    coefficient is the meaningful check)")
