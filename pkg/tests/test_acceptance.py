"""Acceptance criteria; each test prints one PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ikplab.algorithms import (
    alg_a, compute_theta, h1, h2, h2_backward, h2_guarantee, ht2, ht2_guarantee, ptas_approx,
)
from ikplab.core import evaluate
from ikplab.lp import (
    check_fractional, lp_relax_baseline, lp_relax_fast, lp_relax_residual, round_down, work_budget,
)
from ikplab.oracle import solve_exact, solve_residual_exact
from ikplab.worstcase import (
    gen_backward_counterexample, gen_tight_astar, gen_tight_h1, gen_tight_h2, gen_tight_ht2,
    random_instance, random_residual, verify_duality_astar, verify_duality_ht2,
)


@pytest.fixture
def criterion(request, capsys):
    """Run a criterion body, print its verdict and elapsed time, re-raise failures."""
    def run(number, title, limit, body):
        t0 = time.perf_counter()
        try:
            detail = body()
            elapsed = time.perf_counter() - t0
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
        except BaseException as err:
            with capsys.disabled():
                print(f"\nFAIL criterion {number}: {title} ({err})")
            raise
        with capsys.disabled():
            print(f"\nPASS criterion {number}: {title} [{elapsed:.2f} s] {detail or ''}")
    return run


def ikp_prime(seed, max_n, T_choices, weight_range=(1, 20)):
    rng = np.random.default_rng([seed, 99])
    n = int(rng.integers(1, max_n + 1))
    T = int(rng.choice(T_choices))
    return random_instance(seed, n, T, weight_range=weight_range, multiplier_range=(1, 4),
                           weight_constrained=True)


def test_c1_worked_example(criterion):
    def body():
        inst = gen_tight_astar([1, 1, 1])
        z = solve_exact(inst).value
        a = alg_a(inst, 0)
        assert z == 11 and a.value == 6
        ratio = a.value / z
        assert ratio == Fraction(6, 11) == 1 / compute_theta(inst.multipliers) == a.guaranteed_ratio
        return f"z*={z} A*={a.value} ratio={ratio}"
    criterion(1, "worked example z*=11, A*=6, ratio 6/11", 1, body)


def test_c2_theta(criterion):
    def body():
        for T in range(1, 13):
            H = sum(Fraction(1, k) for k in range(1, T + 1))
            assert compute_theta([1] * T) == H, T
        return "H_1..H_12 exact"
    criterion(2, "Theta equals harmonic numbers", 1, body)


def test_c3_duality(criterion):
    def body():
        rng = np.random.default_rng(2024)
        for _ in range(50):
            T = int(rng.integers(2, 7))
            deltas = [Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 20))) for _ in range(T)]
            opt = Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 10)))
            rep = verify_duality_astar(deltas, opt)
            assert rep.primal_violation == 0 and rep.dual_violation == 0 and rep.gap == 0
            assert rep.dual_slacks["h_A"] == 0, "sum of lambda_t <= 1 not tight"
        for k in range(1, 101):
            r = Fraction(k, 10)
            rep = verify_duality_ht2(1, r, 1)
            assert rep.verified and rep.primal_objective == ht2_guarantee(1, r)
        return "50 astar vectors, 100 ht2 grid points"
    criterion(3, "duality certificates exact with zero gap", 5, body)


def test_c4_h1(criterion):
    def body():
        M, T = 10**6, 3
        inst = gen_tight_h1(M, T, None, Fraction(1, 1000))
        ratio = h1(inst).value / solve_exact(inst).value
        closed = Fraction(1, 2) + Fraction(T + 1, M)
        assert abs(ratio - closed) <= Fraction(1, 10**9), (ratio, closed)
        for seed in range(500):
            inst = ikp_prime(seed, 10, [1, 2, 3])
            out = h1(inst)
            assert evaluate(inst, out.schedule) == out.value
            assert 2 * out.value >= solve_exact(inst).value, seed
        return f"tight ratio {float(ratio):.9f}; 500 random ok"
    criterion(4, "H1 tightness and 1/2 guarantee", 30, body)


def test_c5_h2(criterion):
    def body():
        inst = gen_tight_h2(10**5, 3)
        ratio = h2(inst).value / solve_exact(inst).value
        assert abs(ratio - Fraction(1, 2)) <= Fraction(1, 10**4)
        for seed in range(500):
            inst = ikp_prime(10**6 + seed, 10, [1, 2, 3])
            out = h2(inst)
            assert out.value >= solve_exact(inst).value * h2_guarantee(inst.multipliers), seed
        return f"tight ratio {float(ratio):.6f}; 500 random ok"
    criterion(5, "H2 tightness and guarantee", 60, body)


def test_c6_backward(criterion):
    def body():
        g = Fraction(1, 1000)
        out = []
        for T in (10, 1000):
            inst = gen_backward_counterexample(T, g)
            v, z = h2_backward(inst).value, solve_exact(inst).value
            assert v == (1 + g) * T + 3 + 2 * g and z == 3 * T
            out.append(v / z)
        assert out[0] < Fraction(1, 2)
        assert abs(out[1] - Fraction(1, 3)) < Fraction(1, 100)
        return f"T=10 ratio {float(out[0]):.4f}, T=1000 ratio {float(out[1]):.4f}"
    criterion(6, "backward greedy counterexample", 5, body)


def test_c7_ht2(criterion):
    def body():
        g = Fraction(1, 10**4)
        ratios = {}
        for r in (Fraction(1, 2), Fraction(70711, 100000), Fraction(1), Fraction(2)):
            inst = gen_tight_ht2(1, r, g)
            ratio = ht2(inst).value / solve_exact(inst).value
            assert abs(ratio - ht2_guarantee(1, r)) <= Fraction(1, 1000), r
            ratios[r] = ratio
        assert abs(ratios[1] - Fraction(6, 7)) <= Fraction(1, 1000)
        assert float(min(ratios.values())) >= 0.5 + math.sqrt(2) / 4 - 1e-3
        for seed in range(500):
            inst = ikp_prime(2 * 10**6 + seed, 10, [2])
            out = ht2(inst)
            assert out.value >= ht2_guarantee(*inst.multipliers) * solve_exact(inst).value, seed
        return f"min tight ratio {float(min(ratios.values())):.5f}; 500 random ok"
    criterion(7, "H_T2 tightness and guarantee", 60, body)


def test_c8_ptas(criterion):
    def body():
        runs = exact_checks = 0
        for seed in range(200):
            rng = np.random.default_rng([seed, 7])
            n = int(rng.integers(1, 10))
            inst = random_instance(3 * 10**6 + seed, n, 2, multiplier_range=(1, 3),
                                   fill=(0.4, 0.8))
            z = solve_exact(inst).value
            for eps in (Fraction(3, 10), Fraction(1, 2)):
                out = ptas_approx(inst, eps)
                assert evaluate(inst, out.schedule) == out.value
                assert out.value >= (1 - eps) * z, (seed, eps)
                k = out.trace["k"]
                assert k == min(n, math.ceil(2 / eps))
                bound = sum(math.comb(n, i) * 2 ** i for i in range(k + 1))
                assert out.trace["configs"] <= bound
                if n <= math.ceil(2 / eps):
                    assert out.value == z, (seed, eps)
                    exact_checks += 1
                runs += 1
        return f"{runs} runs, {exact_checks} full-enumeration runs exact"
    criterion(8, "PTAS within (1-eps) of optimum", 600, body)


def test_c9_lemma1(criterion):
    def body():
        worst = 0
        for seed in range(1000):
            rng = np.random.default_rng([seed, 9])
            n, T = int(rng.integers(1, 7)), int(rng.integers(1, 4))
            res = random_residual(4 * 10**6 + seed, n, T, multiplier_range=(1, 3))
            frac = lp_relax_residual(res)
            check_fractional(frac, res.earliest)
            k = len(frac.fractional_items())
            assert k <= T
            worst = max(worst, k)
            _, zr = round_down(frac)
            z = solve_residual_exact(res).value
            assert zr <= z <= frac.objective
            assert z <= zr + T * res.max_contribution(), seed
        return f"max fractional items {worst}"
    criterion(9, "at most T fractional items and bound on z_R*", 300, body)


def test_c10_lp_equivalence(criterion):
    def body():
        worst = 0.0
        for seed in range(1000):
            rng = np.random.default_rng([seed, 10])
            n, T = int(rng.integers(1, 61)), int(rng.integers(1, 65))
            inst = random_instance(5 * 10**6 + seed, n, T)
            base, fast = lp_relax_baseline(inst), lp_relax_fast(inst)
            assert base.objective == fast.objective, seed
            budget = work_budget(n, T)
            assert fast.stats["work"] <= budget, (seed, fast.stats["work"], budget)
            worst = max(worst, fast.stats["work"] / budget)
        return f"max work / (4 n log2 T) = {worst:.3f}"
    criterion(10, "fast LP equals baseline within node budget", 60, body)
