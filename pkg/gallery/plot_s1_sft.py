"""
Rational SFT Hamiltonians of the circle
=======================================

Runs the omega-recursion from the Casimir seed h_{-1} = t1 and checks the
first few Hamiltonians and their mutual brackets on the certified window.
"""
from pnrec import TruncationWindow, build_s1_sft_model, format_polynomial, s1_closed_forms
from pnrec.models import s1_pure_t_normalization
from pnrec.recursion import verify_commuting

K = 12
model = build_s1_sft_model(K)

# omega^{kl} = (k+l) v^(k+l), with v^k = p_k, v^-k = q_k and v^0 = t1
print("omega[p2, p3] =", format_polynomial(model.omega.entry("p2", "p3")))

# each step is exact only on a smaller orbit window
tower = model.sft_tower(3, normalization=s1_pure_t_normalization(model))
print("certified windows:", tower.certified)

for n in range(-1, 3):
    W = tower.certified[n + 1]
    h = tower.entry(n, "1").truncate(TruncationWindow(min(W, 3)))
    print(f"h_1,{n} (orbits <= {min(W, 3)}):", format_polynomial(h))

# with the pure-t terms t1^(n+2)/(n+2)! every level is the sum over
# (n+2)-tuples of integer labels summing to zero, divided by (n+2)!
for n in range(-1, 4):
    W = tower.certified[n + 1]
    same = tower.entry(n, "1").truncate(TruncationWindow(W)) == \
        s1_closed_forms("sft_hamiltonian", n, window=W, table=model.table, with_t=True)
    print(f"level {n} matches on window {W}:", same)

# without them the level-2 coefficient of q1^2 p1^2 flips sign
zero = model.sft_tower(2).entry(2, "1")
print("q1^2 p1^2 with zero normalization:", zero.coefficient([("q1", 2), ("p1", 2)]))

# brackets of levels <= 2 vanish on orbits <= 3
report = verify_commuting(model.structural_poisson, model.sft_tower(2, normalization=s1_pure_t_normalization(model)), 3)
print("commuting on window", report.window, ":", report.ok)
