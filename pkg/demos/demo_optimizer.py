"""Push the hole to its eigenvalue-maximizing position.

Gradient ascent on the hole center of the unit disk, starting well off
center.  The classical result says the optimum is the concentric position;
the trajectory printed below walks there and a small brute-force landscape
scan confirms the argmax.

Run:  python3 demos/demo_optimizer.py   (a few minutes)
"""

import numpy as np

from holeopt import SmoothDomain, landscape_scan, optimize_hole

disk = SmoothDomain.disk(1.0)

print("== projected gradient ascent, disk, delta = 0.2, start (0.5, 0.1)")
traj = optimize_hole(disk, 0.2, (0.5, 0.1), target_h=0.04,
                     hole_refine_factor=4.0, max_iter=12, g_tol=0.05, seed=0)
print("   iter   p_x      p_y      lambda1     |grad|   clearance")
for i, it in enumerate(traj.iterates):
    print(f"   {i:3d}  {it.p[0]:+.4f}  {it.p[1]:+.4f}  {it.lambda1:.6f}"
          f"  {np.linalg.norm(it.gradient):7.4f}  {it.clearance:.4f}")
print(f"   termination: {traj.termination}, |p*| = {np.linalg.norm(traj.p_star):.4f}")

print("\n== 3x3 landscape scan as a cross-check")
res = landscape_scan(disk, 0.2, (-0.4, 0.4, 3, -0.4, 0.4, 3),
                     target_h=0.05, hole_refine_factor=4.0, seed=0)
for px, py, lam, clr in res["rows"]:
    mark = " <-- argmax" if (px, py, lam, clr) == res["argmax"] else ""
    print(f"   p=({px:+.2f},{py:+.2f})  lambda1={lam:.5f}{mark}")
