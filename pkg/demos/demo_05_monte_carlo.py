"""
Checking the formulas by simulation
===================================

The rank experiment behind P_t is cheap to simulate in bulk, and a full
decoding run compares the end-to-end success rate with the analytic bound.
Seeds are derived per chunk and per trial, so the numbers below do not depend
on the number of worker processes.
"""

from bdlrpc.montecarlo import estimate_pt, simulate_decoding
from bdlrpc.probability import ProbParams, choose_pt, p2_exact_d2, success_lower

p = ProbParams(q=2, n=16, k=8, d=2, t=2, r=3)
st = estimate_pt(p, 50_000, seed=1)
lo, hi = st.interval()
print(f"P_2 estimate {st.estimate:.5f}  95% CI [{lo:.5f}, {hi:.5f}]  exact {p2_exact_d2(2, 16, 8, 3).value:.5f}")

p = ProbParams(q=2, n=32, k=16, d=2, t=2, r=4, m=37)
sim = simulate_decoding(p, 200, seed=42, workers=2, diagnose=True)
bound = success_lower(p, choose_pt(p)[0])
print(f"decoded {sim.successes}/{sim.trials}; analytic lower bound {bound.value:.5f}")
print("trials meeting both correctness conditions:", sim.diagnostics["cond_both"],
      "| of those decoded:", sim.diagnostics["cond_both_success"])
print(sim.to_csv(), end="")
