import math
import random

import numpy as np
import pytest

from primavoid import counting
from primavoid.counting import (
    best_split,
    brute_force_count,
    ceil_3r_4,
    chain_bound,
    char_sum,
    character_sums,
    compare_with_prior_bound,
    inequality1,
    inequality1_lhs,
    lhs_limit_check,
    q3_condition,
    q3_rhs_constant,
    rhs_limit,
    sharper_than_prior_from,
    split_sum_probe,
    theorem22_bound,
    theorem31_lower_bound,
    theorem31_report,
    threshold_search,
    verify_theorem22,
    vinogradov_count,
)
from primavoid.errors import DomainError, NoThresholdBelowCap, NumericalDrift
from primavoid.ff_core import elem_pow
from primavoid.hyperplanes import avoidance_set, enumerate_avoidance_set, random_config, standard_config
from primavoid.multiplicative import all_characters, char_eval, character, characters_of_order, euler_phi, is_primitive

from conftest import field, group_factorization, table


def direct_lhs(q, r):
    """Existence inequality left side evaluated literally, no logs."""
    return (math.sqrt(3) * q ** (0.96 * r / math.log(math.log(q**r)))) ** (1 / r)


def direct_rhs(q, r):
    return (q - 1) ** 0.5 / q ** (math.ceil(3 * r / 4) / (2 * r))


def test_trivial_character_counts_elements(f9):
    t = table(3, 1, 2)
    triv = character(f9, t.generator, 0)
    cfg = standard_config(f9, None, [0, 0])
    assert char_sum(cfg, triv, t).value == pytest.approx(4)
    cfg = standard_config(f9, None, [1, 1])  # 0 is in the coordinate set
    assert char_sum(cfg, triv, t).value == pytest.approx(3)


def test_quadratic_character_on_f9_example(f9):
    t = table(3, 1, 2)
    cfg = standard_config(f9, None, [0, 0])
    quad = characters_of_order(f9, t.generator, 2)[0]
    # Euler's criterion: chi(x) = x^4 in {1, -1}
    expected = sum(1 if elem_pow(x, 4) == f9.one else -1 for x in enumerate_avoidance_set(cfg))
    assert expected == -4
    got = char_sum(cfg, quad, t)
    assert got.value == pytest.approx(-4)
    assert got.magnitude == pytest.approx(4)


@pytest.mark.parametrize("psr", [(3, 1, 3), (2, 2, 2), (3, 2, 2)])
def test_three_routes_to_character_sums(psr):
    ctx = field(*psr)
    t = table(*psr)
    cfg = random_config(ctx, random.Random(6))
    fft = character_sums(cfg, t)
    S = list(enumerate_avoidance_set(cfg))
    for chi in all_characters(ctx, t.generator):
        loop = sum(char_eval(chi, x, t) for x in S)
        assert char_sum(cfg, chi, t).value == pytest.approx(loop, abs=1e-9)
        assert fft[chi.j] == pytest.approx(loop, abs=1e-9)
        assert char_sum(cfg, chi.conjugate(), t).value == pytest.approx(loop.conjugate(), abs=1e-9)


def test_char_sum_bound_examples():
    assert theorem22_bound(3, 4) == pytest.approx(36, rel=1e-12)
    assert theorem22_bound(4, 4) == pytest.approx(math.sqrt(3) * 72, rel=1e-12)
    assert theorem22_bound(4, 4) == pytest.approx(124.7077, abs=1e-4)
    for q in (3, 4, 5, 7):
        vals = [theorem22_bound(q, r) for r in range(2, 40)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert [ceil_3r_4(r) for r in range(1, 9)] == [math.ceil(3 * r / 4) for r in range(1, 9)]


def test_char_sum_bound_holds_f9_and_f16():
    for psr, nchars in (((3, 1, 2), 7), ((2, 2, 2), 14)):
        ctx = field(*psr)
        rng = random.Random(0)
        for _ in range(10):
            reports = verify_theorem22(random_config(ctx, rng), table(*psr))
            assert len(reports) == nchars
            assert all(rep.holds and rep.slack >= 0 for rep in reports)
    assert theorem22_bound(3, 2) == pytest.approx(math.sqrt(3) * 6)


def test_split_probe_degenerate_k_equals_r():
    ctx = field(3, 1, 3)
    t = table(3, 1, 3)
    cfg = random_config(ctx, random.Random(1))
    for chi in all_characters(ctx, t.generator)[1:]:
        inner, chain = split_sum_probe(cfg, chi, t, 3)
        assert inner.metadata["pairs"] == 0
        assert chain.bound_value == pytest.approx((2) ** 1.5 * math.sqrt(2 * 3**1.5 + 27))
        assert chain.holds
        assert chain.exact_value == pytest.approx(char_sum(cfg, chi, t).magnitude, abs=1e-9)


def test_split_probe_f81_k3():
    ctx = field(3, 1, 4)
    t = table(3, 1, 4)
    cfg = random_config(ctx, random.Random(2))
    for chi in all_characters(ctx, t.generator)[1:]:
        inner, chain = split_sum_probe(cfg, chi, t, 3)
        assert inner.bound_value == 18
        assert inner.holds and chain.holds
        assert set(inner.metadata["diagonal_values"]) <= {27, 26}
        m = chain.metadata
        assert chain.exact_value <= m["cauchy_schwarz"] + 1e-9 <= m["extended_to_span"] + 2e-9
        assert m["extended_to_span"] <= m["before_simplification"] + 1e-9 <= chain.bound_value + 2e-9


@pytest.mark.parametrize("psr", [(3, 1, 3), (2, 2, 3), (5, 1, 2)])
def test_chain_holds_for_every_k(psr):
    ctx = field(*psr)
    t = table(*psr)
    cfg = random_config(ctx, random.Random(3))
    for chi in all_characters(ctx, t.generator)[1:]:
        for k in range(1, ctx.r + 1):
            inner, chain = split_sum_probe(cfg, chi, t, k)
            assert chain.holds
            assert set(inner.metadata["diagonal_values"]) <= {ctx.q**k, ctx.q**k - 1}


def test_diagonal_minus_one_case_seen():
    # with all pairs, some w has -w in V' so its diagonal sum drops to q^k - 1
    ctx = field(3, 1, 4)
    t = table(3, 1, 4)
    cfg = random_config(ctx, random.Random(2))
    chi = character(ctx, t.generator, 1)
    inner, _ = split_sum_probe(cfg, chi, t, 3, all_pairs=True)
    assert inner.metadata["diagonal_values"] == [26, 27]
    assert inner.holds


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9, 16])
def test_best_split_near_three_quarters(q):
    for r in range(2, 60):
        assert abs(best_split(q, r) - ceil_3r_4(r)) <= 1
        assert chain_bound(q, r, ceil_3r_4(r)) <= theorem22_bound(q, r) * (1 + 1e-12)


def test_vinogradov_examples(f9):
    t = table(3, 1, 2)
    nonzero = list(f9.elements())[1:]
    assert vinogradov_count(nonzero, t) == 4
    assert vinogradov_count([f9.one], t) == 0
    ctx16 = field(2, 2, 2)
    assert vinogradov_count(list(ctx16.elements())[1:], table(2, 2, 2)) == 8
    cfg = standard_config(f9, None, [0, 0])
    brute = sum(is_primitive(x) for x in enumerate_avoidance_set(cfg))
    assert vinogradov_count(avoidance_set(cfg), t) == brute == brute_force_count(cfg)


@pytest.mark.parametrize("psr", [(3, 1, 3), (2, 2, 2), (5, 1, 2), (3, 2, 2)])
def test_vinogradov_methods_agree(psr):
    ctx = field(*psr)
    t = table(*psr)
    rng = random.Random(10)
    for _ in range(4):
        cfg = random_config(ctx, rng)
        U = avoidance_set(cfg)
        assert vinogradov_count(U, t, method="fft") == vinogradov_count(U, t, method="direct") == brute_force_count(cfg)


def test_whole_group_only_trivial_character_survives():
    ctx = field(3, 1, 4)
    t = table(3, 1, 4)
    sums = counting.sums_from_logs(t.logs_of(list(ctx.elements())[1:]), t.n)
    assert sums[0] == pytest.approx(80)
    assert np.abs(sums[1:]).max() < 1e-9
    assert vinogradov_count(list(ctx.elements())[1:], t) == euler_phi(80)


def test_numerical_drift_is_an_error(monkeypatch, f9):
    t = table(3, 1, 2)
    real = counting.sums_from_logs

    def noisy(logs, n):
        out = real(logs, n)
        out[n // 2] += 0.3  # the quadratic character; a uniform shift would cancel
        return out

    monkeypatch.setattr(counting, "sums_from_logs", noisy)
    with pytest.raises(NumericalDrift):
        vinogradov_count(list(f9.elements())[1:], t)


def test_brute_force_regression_anchor():
    cfg = random_config(field(5, 1, 3), random.Random(2024))
    assert cfg.c == (4, 0, 1)
    assert brute_force_count(cfg) == 29
    assert brute_force_count(standard_config(field(3, 1, 2))) <= 4


def test_count_lower_bound_examples():
    assert theorem31_lower_bound(3, 2) == pytest.approx(4 - math.sqrt(3) * 6 * 2)
    assert theorem31_lower_bound(3, 2) == pytest.approx(-16.7846, abs=1e-4)
    for q, r in [(3, 2), (3, 4), (4, 3), (5, 3), (7, 2)]:
        assert theorem31_lower_bound(q, r) <= (q - 1) ** r


@pytest.mark.parametrize("psr", [(3, 1, 2), (3, 1, 3), (2, 2, 2), (5, 1, 2), (7, 1, 2)])
def test_count_lower_bound_holds_on_desk_configs(psr):
    ctx = field(*psr)
    f = group_factorization(*psr)
    rng = random.Random(21)
    for _ in range(5):
        cfg = random_config(ctx, rng)
        rep = theorem31_report(ctx.q, ctx.r, brute_force_count(cfg, f), f)
        assert rep.holds and rep.metadata["direction"] == "lower"


def test_inequality1_examples():
    rep = inequality1(4, 100)
    assert not rep.holds
    assert rep.exact_value == pytest.approx(direct_lhs(4, 100), rel=1e-12)
    assert rep.bound_value == pytest.approx(direct_rhs(4, 100), rel=1e-12)
    assert rep.exact_value == pytest.approx(1.317, abs=1e-3)
    assert rep.bound_value == pytest.approx(1.030, abs=1e-3)
    assert inequality1(5, 10**8).holds
    with pytest.raises(DomainError):
        inequality1(2, 1)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_lhs_decreasing(q):
    grid = [2, 3, 5, 10, 30, 100, 10**3, 10**5, 10**8, 10**12, 10**20, 10**40]
    vals = [inequality1_lhs(q, r) for r in grid]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    for r in (5, 10, 50):
        assert inequality1_lhs(q, r) == pytest.approx(direct_lhs(q, r), rel=1e-12)


def test_rhs_limit_values():
    assert rhs_limit(3) == pytest.approx(math.sqrt(2) / 3**0.375)
    assert abs(rhs_limit(3) - 0.936687) < 5e-6
    assert abs(rhs_limit(4) - 1.02988) < 5e-6
    assert abs(rhs_limit(5) - 1.09375) < 5e-6
    # the finite-r right side approaches the limit
    assert direct_rhs(5, 4000) == pytest.approx(rhs_limit(5), abs=1e-3)


def test_lhs_limit_check():
    rep = lhs_limit_check(4, [10**2, 10**4, 10**6, 10**9])
    assert rep["decreasing"] and rep["above_one"] and rep["gap_shrinking"]
    assert rep["lhs"][-1] - 1 < 0.31
    assert rep["lhs"][-1] - 1 == pytest.approx(0.0652646, abs=1e-6)
    rep3 = lhs_limit_check(3, [10**2, 10**4, 10**6, 10**9])
    assert rep3["decreasing"] and rep3["above_one"]


def test_q3_condition_examples():
    assert q3_rhs_constant() == pytest.approx(2 ** (1 - 0.99128), rel=1e-12)
    assert q3_rhs_constant() == pytest.approx(1.00606, abs=1e-5)
    rep = q3_condition(100)
    assert not rep.holds
    assert rep.exact_value == pytest.approx(3 ** (0.96 / math.log(math.log(3**100))), rel=1e-12)
    assert q3_condition(10**80).holds


def test_threshold_pinned_values():
    # pinned after the first log-domain bisection run
    r5 = threshold_search(5)
    assert r5.r_min == 19126240
    r4 = threshold_search(4)
    assert r4.r_min == 30668739039322455048
    assert r5.condition == r4.condition == "inequality1"
    r3 = threshold_search(3)
    assert r3.condition == "q3_condition"
    assert r3.r_min == 5492341574512907475479919958956296661978797792250054633943208764893777686377
    assert "no result for q = 3" in r3.note


def test_threshold_orders_of_magnitude():
    # crossing of the limiting equation 0.96 ln q / ln(r ln q) = ln rhs_limit(q)
    for q, r_min in ((4, threshold_search(4).r_min), (5, threshold_search(5).r_min)):
        approx = math.exp(0.96 * math.log(q) / math.log(rhs_limit(q))) / math.log(q)
        assert 0.1 < r_min / approx < 10


def test_threshold_q3_inequality1_unreachable():
    with pytest.raises(NoThresholdBelowCap):
        threshold_search(3, condition="inequality1")


def test_threshold_cap():
    with pytest.raises(NoThresholdBelowCap):
        threshold_search(4, r_cap=10**10)


def test_exact_scan_prefix():
    res = threshold_search(5, mode="exact_scan", scan_prefix=200)
    assert res.r_min is None


def test_comparison_with_prior_bound():
    for q in (3, 4, 5):
        r0 = sharper_than_prior_from(q)
        assert r0 <= 10
        for r in (r0, 50, 200, 1000):
            rep = compare_with_prior_bound(q, r)
            assert rep.holds and rep.metadata["prior_exceeds_trivial"]
        assert not compare_with_prior_bound(q, r0 - 1).holds if r0 > 2 else True
