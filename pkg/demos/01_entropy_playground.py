"""A tour of the entropy functions the rest of the package is built on.

Run it, read the printed tables top to bottom.  Everything here is a plain
function of one or two floats; no randomness, no state.
"""

import numpy as np

from thresholds.infomeasures import ball_volume, fano_bound, hq, hq_multi, hql

# --- the q-ary entropy ------------------------------------------------------
# hq(q, rho) is the exponent (base q) of a Hamming ball of radius rho*n.
# hq(2, .) is the familiar binary entropy; hq(q, 1 - 1/q) = 1 for every q.

print("q-ary entropy h_q(rho)")
print("rho      q=2        q=3        q=5        q=16")
for rho in (0.05, 0.11, 0.25, 0.5):
    row = "  ".join(f"{hq(q, rho):.7f}" for q in (2, 3, 5, 16))
    print(f"{rho:<7}  {row}")
print(f"saturation: h_2(1/2) = {hq(2, 0.5)},  h_5(4/5) = {hq(5, 0.8)}")
print()

# The ball-volume exponent claim, checked at a concrete length: the exact
# count q^(n h) should bracket the true volume to within a polynomial factor.
q, n, rho = 3, 60, 0.2
r = int(rho * n)
vol = ball_volume(q, n, r)
print(f"ball volume check at q={q}, n={n}, r={r}:")
print(f"  log_q(vol)/n = {np.log(vol) / np.log(q) / n:.6f}  vs  h_q(r/n) = {hq(q, r / n):.6f}")
print()

# --- entropy of several masses at once --------------------------------------
# hq_multi(q, [x1, x2, ...]) is the entropy of the distribution that puts
# mass x_i on point i and the remaining mass on a default point.  It is the
# objective of every optimization in the engine module.

print("two-mass entropy H_2(x1, x2), base 2")
for x1, x2 in [(0.0, 0.0), (0.25, 0.25), (1 / 3, 1 / 3), (0.5, 0.5)]:
    print(f"  H_2({x1:.4f}, {x2:.4f}) = {hq_multi(2, [x1, x2]):.7f}")
print("  (the maximum log2(3) sits at x1 = x2 = 1/3, the uniform split)")
print()

# --- the input-list entropy -------------------------------------------------
# hql(q, ell, rho) generalizes hq: the receiver gets an ell-subset of symbols
# per position and rho is the fraction of positions landing outside it.
# ell = 1 recovers hq exactly; larger ell shrinks the effective alphabet.

print("list-input entropy h_{q,ell}(rho)")
print("rho      (4,1)      (4,2)      (4,3)")
for rho in (0.05, 0.15, 0.3):
    row = "  ".join(f"{hql(4, ell, rho):.7f}" for ell in (1, 2, 3))
    print(f"{rho:<7}  {row}")
print(f"consistency: hql(5,1,0.2) - hq(5,0.2) = {hql(5, 1, 0.2) - hq(5, 0.2):.2e}")
print()

# --- Fano, for scale --------------------------------------------------------
# The decoding arguments later cap a conditional entropy by fano_bound.
for pe in (0.01, 0.05, 0.1):
    print(f"fano_bound(p_err={pe}, M=4) = {fano_bound(pe, 4):.6f} bits")
