"""
Exact success probabilities
===========================

The first decoding phase succeeds when a random block-Toeplitz matrix M_t has
full column rank. Its probability P_t has closed forms in several regimes and
a lower bound elsewhere. Everything is computed with exact rationals.
"""

from bdlrpc.probability import ProbParams, curve_rows, prob_report, round_half_up, table_rows

# Classical LRPC probability P_1, the bound B_2 and the optimum P_{r(d-1)}.
print(" r   P_1      B_2      P_opt")
for row in table_rows(2, 32, 16, 5, range(1, 6)):
    cells = [round_half_up(row[c].raw) for c in ("P_1", "B_2", "P_opt")]
    print(f" {row['r']}  " + "  ".join(str(x) for x in cells))

# Failure bounds for the new decoder against the earlier estimates.
print("\n r   D_New        D_FL         D_G")
for row in curve_rows(2, 37, 32, 16, 2, 2, range(1, 11)):
    marks = "" if row["d_new"].in_radius else "  (outside radius)"
    print(f"{row['r']:2d}   {row['d_new'].value:.3e}    {row['d_fl'].value:.3e}    {row['d_g'].value:.3e}{marks}")

# A full report keeps tiny failure rates visible through log10(1 - p).
rep = prob_report(ProbParams(q=2, n=32, k=16, d=2, t=2, r=2, m=37))
print("\nP_t source:", rep.p_t_source, "| log10(1 - P_t) =", round(rep.p_t.log10_complement, 3))
