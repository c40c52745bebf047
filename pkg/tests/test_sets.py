"""Triadic sets, envelopes, distance sums, cell permutations, Cantor."""

from fractions import Fraction as F

import pytest

from orthoconv.info import PointSet, info_fn
from orthoconv.sets import (
    BASE_POINTS, CellPermutation, cantor_tail_integral_oracle,
    cantor_tail_norm_sq_oracle, continuity_verdict, generate,
    is_triadic_set, monotonicity_checks, rho, rho_sums,
)
from orthoconv.stepfn import StepFunction
from orthoconv.vcalc import v_functional
from orthoconv.suites import run_suite, random_triadic_set
import random


def test_base_quadruple_is_triadic():
    assert is_triadic_set(PointSet(BASE_POINTS)) == (True, None)


def test_half_point_is_not_triadic():
    ok, witness = is_triadic_set(PointSet([0, F(1, 3), F(1, 2), F(2, 3), 1]))
    assert not ok
    assert witness == ("unpaired", F(1, 2))


def test_full_level1_grid_is_triadic():
    assert is_triadic_set(PointSet([F(n, 9) for n in range(10)])) == (True, None)


def test_missing_base_detected():
    ok, witness = is_triadic_set(PointSet([0, F(2, 3), 1]))
    assert not ok
    assert witness == ("missing-base", F(1, 3))


def test_open_cell_detected():
    # 1/81 inside the level-2 cell (0, 1/81]... choose a point pair whose
    # cell interior meets the set without carrying its endpoints
    B = PointSet([0, F(1, 3), F(2, 3), 1, F(4, 81), F(5, 81)])
    ok, witness = is_triadic_set(B)
    assert not ok


def test_generate_base_cases():
    assert generate(PointSet([0, 1])).generated == PointSet(BASE_POINTS)
    assert generate(PointSet([0, F(1, 2), 1])).generated == PointSet(BASE_POINTS)


def test_generate_clustered_point():
    res = generate(PointSet([0, F(1, 100), 1]))
    # 0.01 has a neighbor (0) within 3**-2**(i-1) for i = 1, 2, 3
    levels = sorted({i for i, _ in res.index_pairs})
    assert levels == [1, 2, 3]
    assert F(1, 81) in res.generated
    assert is_triadic_set(res.generated) == (True, None)


def test_rho_and_sums_base():
    A = PointSet([0, 1])
    s1, s2 = rho_sums(A)
    assert s1 == F(2, 3)  # 1/3 + 1/3
    assert s2 == 0
    assert rho(F(1, 3), A.points) == F(1, 3)


def test_rho_sums_covering_case():
    A = PointSet([F(n, 9) for n in range(10)])
    gen = generate(A).generated
    s1, s2 = rho_sums(A, gen)
    assert s2 == 0  # every grid point is its own envelope point
    assert s1 <= 3


def test_envelope_geometry_suite():
    r = run_suite("envelope_geometry", seed=0, count=100)
    assert r["passed"], r


def test_monotonicity_checks():
    A = PointSet([0, F(1, 2), 1])
    A1 = PointSet([0, F(1, 2), F(7, 9), 1])
    rep = monotonicity_checks(A, A1)
    assert rep["envelope_nested"]
    assert rep["h_envelope_dominates"]
    rep2 = monotonicity_checks(A, A)
    assert rep2["envelope_nested"]


def test_monotonicity_requires_inclusion():
    with pytest.raises(ValueError):
        monotonicity_checks(PointSet([0, F(1, 2), 1]), PointSet([0, F(1, 3), 1]))


def test_cell_permutation_identity():
    cp = CellPermutation(0, 0, [0, 1, 2])
    assert cp.is_identity()
    f = StepFunction.indicator(0, F(1, 9))
    assert cp.pushforward(f) == f


def test_cell_permutation_swap_relocates_indicator():
    cp = CellPermutation(0, 0, [2, 1, 0])
    f = StepFunction.indicator(0, F(1, 9))
    pf = cp.pushforward(f)
    assert pf == StepFunction.indicator(F(2, 9), F(1, 3))
    # involution
    assert cp.pushforward(pf) == f
    # measure preserved on every level set
    assert pf.integral() == f.integral()


def test_cell_permutation_point_map():
    cp = CellPermutation(0, 0, [2, 1, 0])
    assert cp.apply_point(F(1, 18)) == F(1, 18) + F(2, 9)
    assert cp.apply_point(F(1, 2)) == F(1, 2)  # outside the permuted cell


def test_cell_permutation_validates():
    with pytest.raises(ValueError):
        CellPermutation(0, 0, [0, 0, 2])


def test_cell_permutation_suite():
    r = run_suite("cell_permutation", seed=0, count=20)
    assert r["passed"], r


def test_straddling_gap_breaks_set_invariance():
    # a gap crossing the permuted subcells recomposes, and the functional
    # moves: the set-level identity needs the subcell boundaries in the set
    B = PointSet([0, F(1, 18), F(1, 3), F(2, 3), 1])
    cp = CellPermutation(0, 0, [2, 1, 0])
    v1, _ = v_functional(info_fn(B, base=3).maximum(1))
    v2, _ = v_functional(info_fn(cp.apply_point_set(B), base=3).maximum(1))
    assert abs(v1 - v2) > 1e-6


def test_random_triadic_set_generator():
    rng = random.Random(0)
    for _ in range(20):
        B = random_triadic_set(rng)
        assert is_triadic_set(B) == (True, None)


def test_cantor_oracles_closed_forms():
    for k in range(0, 13):
        sq = cantor_tail_norm_sq_oracle(k)
        assert abs(float(sq) - 15 * (2 / 3) ** k) < 1e-12
        integ = cantor_tail_integral_oracle(k)
        assert abs(float(integ) - 3 * (2 / 3) ** k) < 1e-12


def test_cantor_suite():
    r = run_suite("cantor_tail", seed=0)
    assert r["passed"], r


def test_continuity_verdict_finite_set():
    B = PointSet([0, F(1, 3), F(2, 3), 1])
    rep = continuity_verdict(B, 0, [F(1, 3)])
    assert rep["windows"][0]["trace"][0] >= 0


def test_continuity_verdict_trivial_set():
    rep = continuity_verdict(PointSet([0, 1]), 0, [F(1, 2)], clip_floor=0)
    assert rep["windows"][0]["trace"][0] == 0


def test_continuity_verdict_requires_membership():
    with pytest.raises(ValueError):
        continuity_verdict(PointSet([0, 1]), F(1, 2), [F(1, 4)])


def test_cell_permutation_preserves_level_set_measures():
    rng = random.Random(11)
    from orthoconv.suites import random_step_fn
    for _ in range(10):
        j = rng.choice([0, 1])
        m = rng.randrange(3 ** (2 ** j))
        perm = list(range(3 ** (2 ** j)))
        rng.shuffle(perm)
        cp = CellPermutation(j, m, perm)
        f = random_step_fn(rng, 81, 0.0, 9.0)
        pf = cp.pushforward(f)
        for thr in (1, 2.5, 5, 8):
            assert f.measure_ge(thr) == pf.measure_ge(thr)


def test_power_length_gaps_carry_exact_powers():
    rng = random.Random(3)
    from orthoconv.stepfn import grid_width
    for _ in range(15):
        B = random_triadic_set(rng)
        h = info_fn(B, base=3)
        for (a, b) in B.gaps():
            for i in (0, 1, 2):
                if b - a == grid_width(i):
                    assert h.eval(b) == 2 ** i
