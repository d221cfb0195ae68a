import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from bdlrpc.exceptions import ParameterError
from bdlrpc.probability import (
    DomainViolation,
    LowerBound,
    Prob,
    ProbParams,
    choose_pt,
    conjecture_K,
    curve_rows,
    d2_remark_bound,
    failure_bounds,
    full_rank_probability,
    gaussian_binomial,
    hq,
    p1_classical,
    p2_exact_d2,
    p_corollary_bounds,
    p_lower_bound,
    p_opt_exact,
    p_upper_bound,
    prob_report,
    q_opt_exact,
    r_term,
    round_half_up,
    success_lower,
    table_rows,
)

TABLE1 = {
    1: ("0.99953", "0.99991", "0.99995"),
    2: ("0.98447", "0.99982", "0.99986"),
    3: ("0.57759", "0.99957", "0.99968"),
    4: ("0.00000", "0.99536", "0.99931"),
    5: ("0.00000", "0.74854", "0.99858"),
}


def _rounded(p):
    return str(round_half_up(p.raw))


def _count_subspaces(n, k, q):
    """Enumerate k-dim subspaces of F_q^n via their RREF bases."""
    from bdlrpc.linalg import rref

    seen = set()
    for rows in itertools.product(itertools.product(range(q), repeat=n), repeat=k):
        res = rref(np.array(rows), q)
        if res.rank == k:
            seen.add(res.rref.tobytes())
    return len(seen)


def test_gaussian_binomial_examples():
    assert gaussian_binomial(7, 0, 3) == 1
    assert gaussian_binomial(3, 1, 2) == 7 == _count_subspaces(3, 1, 2)
    assert gaussian_binomial(4, 2, 2) == 35 == _count_subspaces(4, 2, 2)
    assert gaussian_binomial(2, 3, 2) == 0


@pytest.mark.parametrize("q", [2, 3, 5])
def test_gaussian_binomial_sandwich(q):
    for n in range(0, 12):
        for k in range(0, n + 1):
            g = gaussian_binomial(n, k, q)
            assert q ** (k * (n - k)) <= g <= 4 * q ** (k * (n - k))
            assert g == gaussian_binomial(n, n - k, q)


def test_table1_values():
    for row in table_rows(2, 32, 16, 5, range(1, 6)):
        assert (_rounded(row["P_1"]), _rounded(row["B_2"]), _rounded(row["P_opt"])) == TABLE1[row["r"]]


def test_table_conventions():
    row = table_rows(2, 32, 16, 5, [0])[0]
    assert all(row[c].raw == 1 for c in ("P_1", "B_2", "P_opt"))
    row = table_rows(2, 32, 16, 1, [2])[0]
    assert isinstance(row["B_2"], DomainViolation) and isinstance(row["P_opt"], DomainViolation)
    assert isinstance(row["P_1"], Prob)


def test_p1_examples():
    assert _rounded(p1_classical(2, 32, 16, 5, 3)) == "0.57759"
    assert p1_classical(2, 32, 16, 5, 4).raw == 0
    assert p1_classical(2, 32, 16, 5, 0).raw == 1


def test_p_opt_sandwich():
    q = 2
    for r in range(1, 6):
        u = 16 - r
        val = p_opt_exact(q, 32, 16, r).raw
        lo = 1 - Fraction(q + 1, q - 1) * Fraction(1, q**u)
        hi = 1 - Fraction(q + 1, q) * Fraction(1, q**u) + Fraction(1, q ** (2 * u + 1))
        assert lo <= val <= hi


def test_p2_single_term():
    for q, n, k in [(2, 12, 6), (3, 10, 6), (5, 9, 4)]:
        u = n - k - 1
        expected = (1 - Fraction(1, q ** (n - k))) * (1 - Fraction(1, q**u))
        assert p2_exact_d2(q, n, k, 1).raw == expected


def test_p2_empty_sum():
    # n-k = 4, r = 3: u = 1 < ceil(3/2)
    assert p2_exact_d2(2, 8, 4, 3).raw == 0


def test_p2_against_enumeration():
    # q=2, n-k=3, r=1: enumerate all pairs (X_1, X_2) of 3x1 blocks; M_2 is 6x3
    from bdlrpc.linalg import rank
    from bdlrpc.montecarlo import assemble_mt

    hits = total = 0
    for x in itertools.product((0, 1), repeat=6):
        X = np.array(x).reshape(1, 2, 3, 1)
        total += 1
        hits += rank(assemble_mt(X, 2)[0], 2) == 3
    assert p2_exact_d2(2, 6, 3, 1).raw == Fraction(hits, total)


def test_lower_bound_examples():
    lb = p_lower_bound(2, 32, 16, 5, 1, 2)
    assert isinstance(lb, LowerBound) and lb.argmin_j == 2
    assert r_term(2, 32, 16, 5, 1, 2) == Fraction(1, 2**26) + 3 * Fraction(1, 2**15)
    assert _rounded(lb.prob) == "0.99991"
    assert _rounded(p_lower_bound(2, 32, 16, 5, 5, 2).prob) == "0.74854"
    for r in range(1, 6):
        assert p_lower_bound(2, 32, 16, 5, r, 2).prob.raw <= p_opt_exact(2, 32, 16, r).raw


def test_lower_bound_domain():
    assert isinstance(p_lower_bound(2, 20, 16, 3, 4, 2), DomainViolation)  # u = 0
    assert isinstance(p_lower_bound(2, 32, 16, 1, 2, 2), DomainViolation)
    assert isinstance(p_lower_bound(2, 32, 16, 2, 2, 9), DomainViolation)  # t > rd


def test_corollary():
    c = p_corollary_bounds(2, 15, 2)
    assert c.raw == 1 - 4 * Fraction(1, 2**15)
    assert isinstance(p_corollary_bounds(2, 3, 7), DomainViolation)
    assert isinstance(p_corollary_bounds(2, 0, 2), DomainViolation)
    # the closed form is stated for t = ceil(r(d-1)/u) + 1, which is 2 only for r <= 3 here
    for r in range(1, 4):
        assert -(-r * 4 // (16 - r)) + 1 == 2
        lb = p_lower_bound(2, 32, 16, 5, r, 2)
        assert p_corollary_bounds(2, 16 - r, 2).raw <= lb.prob.raw


def test_d2_remark_sign():
    for q in (2, 3, 5):
        for u in range(2, 20):
            assert d2_remark_bound(q, u, as_printed=True) > 1
            corrected = d2_remark_bound(q, u, as_printed=False)
            assert corrected < 1
            for t in range(3, u // 2 + 1):
                assert p_corollary_bounds(q, u, t).raw >= Fraction(corrected)


def test_upper_bound_and_hq():
    assert p_upper_bound(2, 32, 16, 1).raw == (1 - Fraction(1, 2**16)) ** 2
    assert abs(p_upper_bound(2, 32, 16, 1).value - 0.9999695) < 1e-7
    assert hq(0, 2) == 1
    with pytest.raises(ParameterError):
        conjecture_K(2, 2, 1, 0)


def test_conjecture_chain_small_grid():
    for nk, d, r in itertools.product((12, 16), (2, 3, 5), range(1, 5)):
        u = nk - r
        K = conjecture_K(2, d, r, u)
        Q = q_opt_exact(2, 2 * nk, nk, r)
        assert K <= Q <= 1 - Fraction(1, 2**u)


def test_reduction_identity():
    # P_opt factors as full-rank probability of X_1 times Q_opt
    for q, nk, r in [(2, 6, 2), (3, 8, 3), (2, 16, 5)]:
        assert p_opt_exact(q, 2 * nk, nk, r).raw == full_rank_probability(q, nk, r) * q_opt_exact(q, 2 * nk, nk, r)


def test_choose_pt_sources():
    assert choose_pt(ProbParams(2, 32, 16, 2, 2, 0))[1].startswith("trivial")
    assert choose_pt(ProbParams(2, 32, 16, 2, 2, 11))[0].raw == 0
    assert "d=1" in choose_pt(ProbParams(2, 32, 16, 1, 2, 3))[1]
    assert "t=1" in choose_pt(ProbParams(2, 32, 16, 3, 1, 3))[1]
    assert "t >= r(d-1)" in choose_pt(ProbParams(2, 32, 16, 2, 2, 2))[1]
    assert "d=2, t=2" in choose_pt(ProbParams(2, 32, 16, 2, 2, 4))[1]
    assert "lower bound" in choose_pt(ProbParams(2, 32, 16, 5, 2, 3))[1]


def test_failure_bounds_zero_r():
    fb = failure_bounds(ProbParams(2, 32, 16, 2, 2, 0, m=37), 1)
    assert fb.d_new.raw == fb.d_fl.raw == fb.d_g.raw == 0
    assert success_lower(ProbParams(2, 32, 16, 2, 2, 0, m=37), 1).raw == 1


def test_d_new_below_d_fl_generic():
    # exponent comparison r(d+t) <= 2(d+t-1)r - r holds whenever d+t >= 3
    for d, t, r in itertools.product((2, 3, 4), (1, 2, 3), (1, 2, 3)):
        if d + t < 4:
            continue
        p = ProbParams(2, 60, 30, d, t, r, m=101)
        fb = failure_bounds(p, choose_pt(p)[0])
        assert fb.d_new.raw <= fb.d_fl.raw


def test_radius_markers():
    rows = {row["r"]: row for row in curve_rows(2, 37, 32, 16, 2, 2, range(11))}
    assert rows[9]["d_new"].in_radius and not rows[10]["d_new"].in_radius
    assert rows[8]["d_g"].in_radius and not rows[9]["d_g"].in_radius


def test_m37_gap_small_then_strict():
    rows = {row["r"]: row for row in curve_rows(2, 37, 32, 16, 2, 2, range(11))}
    for r in range(1, 6):
        assert abs(math.log10(rows[r]["d_fl"].raw / rows[r]["d_new"].raw)) < 0.1
    for r in range(6, 11):
        assert rows[r]["d_new"].raw < rows[r]["d_fl"].raw


def test_report_fields_in_unit_interval():
    rep = prob_report(ProbParams(2, 32, 16, 2, 2, 4, m=37))
    d = rep.to_dict()
    for key, val in d.items():
        if isinstance(val, dict) and "value" in val:
            assert 0 <= val["value"] <= 1, key
            if val["value"] < 1:
                assert math.isclose(10 ** val["log10_complement"], 1 - val["value"], rel_tol=1e-9)
    row = rep.csv_row()
    assert row["r"] == 4 and row["u"] == 12


def test_report_domain_violations():
    d = prob_report(ProbParams(2, 20, 16, 3, 2, 4)).to_dict()  # u = 0, m missing
    assert "domain_violation" in d["b_lower"]
    assert "domain_violation" in d["d_new"]


def test_round_half_up():
    assert str(round_half_up(Fraction(1, 8), 2)) == "0.13"
    assert str(round_half_up(Fraction(999995, 10**6), 5)) == "1.00000"
    assert str(round_half_up(Fraction(999985, 10**6), 5)) == "0.99999"
    assert str(round_half_up(0, 5)) == "0.00000"


def test_d_new_vs_d_fl_at_d_plus_t_3():
    # exponents tie at d+t = 3; D_New's denominator q^m - q^(r-1) leaves it a hair above D_FL
    for d, t in [(2, 1), (1, 2)]:
        p = ProbParams(2, 32, 16, d, t, 2, m=37)
        fb = failure_bounds(p, choose_pt(p)[0])
        assert fb.d_new.raw >= fb.d_fl.raw
        assert fb.d_new.raw / fb.d_fl.raw - 1 < Fraction(1, 10**9)
