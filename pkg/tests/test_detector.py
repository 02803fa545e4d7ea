import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lowres_psk.detector import (
    DetectionContext,
    attraction_symbol,
    decision_table,
    ml_detect_geometric,
    ml_detect_oracle,
    nearest_symbol,
    ray_distance,
    region_probabilities,
)
from lowres_psk.errors import ConfigError, DegenerateInput
from lowres_psk.geometry import QuantizerSpec, bisector_angle, region_of_attraction

PI = math.pi


def cis(x):
    return complex(math.cos(x), math.sin(x))


class TestRayDistance:
    @given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-PI, PI))
    def test_matches_discretised_ray(self, re, im, psi):
        z = complex(re, im)
        t = np.concatenate([[0.0], np.geomspace(1e-6, 200.0, 20001)])
        brute = np.min(np.abs(z - t * cis(psi)))
        # the sampled ray overestimates by at most half a grid step
        assert ray_distance(z, psi) <= brute + 1e-12
        assert ray_distance(z, psi) == pytest.approx(brute, abs=2e-3 * max(1.0, abs(z)))

    def test_behind_origin(self):
        assert ray_distance(-3 + 0j, 0.0) == pytest.approx(3.0)
        assert ray_distance(2j, 0.0) == pytest.approx(2.0)


class TestGeometric:
    def test_aligned(self):
        assert ml_detect_geometric(DetectionContext.build(4, 2, 1.0, 1.0), 2) == 2

    def test_small_rotation(self):
        assert ml_detect_geometric(DetectionContext.build(4, 2, cis(PI / 18), 1.0), 2) == 2

    def test_centering_three_bits(self):
        ctx = DetectionContext.build(4, 3, cis(4 * PI / 18), 1.0)
        # rotated symbol 3 sits at 3pi/4 + 2pi/9, nearest bisector is k = 7 (7pi/8)
        assert ml_detect_geometric(ctx, 7) == 3
        # a sample that lands in the neighbouring cone is still decoded as 3
        assert ml_detect_geometric(ctx, 0) == 3

    def test_two_bits_adjacent_cone_errs(self):
        ctx = DetectionContext.build(4, 2, cis(4 * PI / 18), 1.0)
        assert ml_detect_geometric(ctx, 3) == 3
        assert ml_detect_geometric(ctx, 0) == 0

    def test_invalid_context(self):
        with pytest.raises(DegenerateInput):
            DetectionContext.build(4, 2, 0j, 1.0)
        with pytest.raises(ConfigError):
            DetectionContext.build(4, 2, 1.0, -1.0)
        with pytest.raises(ConfigError):
            DetectionContext.build(4, 2, 1.0, math.inf)

    @pytest.mark.parametrize("k", [-1, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(IndexError):
            ml_detect_geometric(DetectionContext.build(4, 2, 1.0, 1.0), k)

    @given(st.sampled_from([2, 4, 8, 16]), st.integers(1, 6), st.floats(-PI, PI),
           st.floats(1e-3, 1e3), st.floats(1e-3, 1e4), st.floats(1e-3, 1e4), st.data())
    def test_snr_and_magnitude_invariance(self, M, n, lam, mag, snr1, snr2, data):
        k = data.draw(st.integers(0, 2 ** n - 1))
        base = ml_detect_geometric(DetectionContext.build(M, n, cis(lam), snr1), k)
        assert ml_detect_geometric(DetectionContext.build(M, n, mag * cis(lam), snr2), k) == base

    @given(st.sampled_from([2, 4, 8, 16]), st.integers(1, 6), st.floats(-PI, PI), st.data())
    def test_joint_rotation_equivariance(self, M, n, lam, data):
        q = QuantizerSpec(n)
        k = data.draw(st.integers(0, q.region_count - 1))
        # skip channel phases where two symbols are equidistant from the bisector
        x = (bisector_angle(k, q) - lam + PI) * M / (2 * PI)
        assume(abs(x - round(x)) > 1e-7)
        a = ml_detect_geometric(DetectionContext.build(M, n, cis(lam), 1.0), k)
        b = ml_detect_geometric(DetectionContext.build(M, n, cis(lam + q.sector_width), 1.0), (k + 1) % q.region_count)
        assert a == b

    def test_fast_rule_matches(self):
        rng = np.random.default_rng(0)
        for M in (2, 4, 8, 16):
            for n in range(1, 7):
                lam = rng.uniform(-PI, PI, 500)
                k = rng.integers(0, 2 ** n, 500)
                fast = nearest_symbol(lam, k, M, n)
                slow = [ml_detect_geometric(DetectionContext.build(M, n, cis(l), 2.0), int(kk)) for l, kk in zip(lam, k)]
                assert np.array_equal(fast, slow)

    def test_matches_explicit_ray_distances(self):
        rng = np.random.default_rng(5)
        for _ in range(3000):
            M, n = int(rng.choice([2, 4, 8, 16])), int(rng.integers(1, 7))
            k = int(rng.integers(2 ** n))
            ctx = DetectionContext.build(M, n, complex(*rng.normal(size=2)), float(rng.uniform(0.01, 100)))
            d = ray_distance(ctx.rotated_points(), bisector_angle(k, n))
            assert ml_detect_geometric(ctx, k) == int(np.argmin(d))

    def test_no_ties_for_random_channels(self):
        rng = np.random.default_rng(1)
        ties = 0
        for _ in range(2000):
            ctx = DetectionContext.build(8, 4, complex(*rng.normal(size=2)), 1.0)
            d = np.sort(ray_distance(ctx.rotated_points(), bisector_angle(int(rng.integers(16)), 4)))
            ties += d[1] - d[0] < 1e-13
        assert ties == 0

    def test_decision_is_rotated_decision_cone(self):
        # the chosen symbol is the one whose decision cone, rotated by Arg(h),
        # holds the bisector of the observed quantizer cone
        rng = np.random.default_rng(2)
        for M, n in ((4, 2), (4, 3), (8, 3), (8, 4), (16, 5)):
            q = QuantizerSpec(n)
            for lam in rng.uniform(-PI, PI, 40):
                for k in range(q.region_count):
                    psi = bisector_angle(k, q)
                    got = ml_detect_geometric(DetectionContext.build(M, n, cis(lam), 1.0), k)
                    cones = [region_of_attraction(i, 2 ** (n - 1), M, n).rotated(lam) for i in range(M)]
                    assert [c.contains(psi) for c in cones].index(True) == got

    def test_cell_centre_channel_uses_attraction_region(self):
        for M, n in ((4, 3), (8, 4)):
            q = QuantizerSpec(n)
            for cell in range(q.region_count):
                lam = (cell - 2 ** (n - 1)) * q.sector_width
                for k in range(q.region_count):
                    got = ml_detect_geometric(DetectionContext.build(M, n, cis(lam), 1.0), k)
                    assert got == attraction_symbol(bisector_angle(k, q), lam, M, n)


class TestOracle:
    def test_pure_noise_ties(self):
        ctx = DetectionContext.build(4, 3, cis(0.3), 0.0)
        res = ml_detect_oracle(ctx, 5)
        assert res.tie
        assert res.symbol == 0
        assert np.allclose(res.likelihoods, 1 / 8, atol=1e-12)

    @pytest.mark.parametrize("M,n,snr", [(2, 1, 0.1), (4, 3, 1.0), (8, 5, 10.0), (16, 2, 3.0), (8, 3, 50.0)])
    def test_normalisation(self, M, n, snr):
        rng = np.random.default_rng(M * n)
        for _ in range(5):
            ctx = DetectionContext.build(M, n, complex(*rng.normal(size=2)), snr)
            assert np.allclose(region_probabilities(ctx).sum(axis=0), 1.0, atol=1e-8)

    def test_probability_matches_monte_carlo(self):
        ctx = DetectionContext.build(8, 3, 0.7 - 0.4j, 2.0)
        probs = region_probabilities(ctx)
        rng = np.random.default_rng(4)
        z = ctx.rotated_points()[5]
        y = z + (rng.normal(size=400_000) + 1j * rng.normal(size=400_000)) * math.sqrt(0.5)
        from lowres_psk.geometry import quantize
        freq = np.bincount(quantize(y, 3), minlength=8) / y.size
        se = np.sqrt(probs[:, 5] * (1 - probs[:, 5]) / y.size)
        assert np.all(np.abs(freq - probs[:, 5]) < 4 * se + 1e-12)

    def test_bad_tolerance(self):
        with pytest.raises(ConfigError):
            ml_detect_oracle(DetectionContext.build(4, 2, 1.0, 1.0), 0, tol=0.0)

    def test_equivalence_sample(self):
        rng = np.random.default_rng(8)
        checked = 0
        for M in (2, 4, 8):
            for n in range(1, 6):
                for snr in (0.1, 1.0, 10.0):
                    for _ in range(10):
                        ctx = DetectionContext.build(M, n, complex(*rng.normal(size=2)), snr)
                        for k in range(2 ** n):
                            res = ml_detect_oracle(ctx, k)
                            if res.tie:
                                continue
                            checked += 1
                            assert res.symbol == ml_detect_geometric(ctx, k)
        assert checked > 5000


def test_decision_table_rows():
    rows = decision_table(4, 3, [4 * PI / 18])
    lam, cell, decisions = rows[0]
    assert cell == 5
    assert decisions[7] == 3 and decisions[0] == 3
    assert len(decisions) == 8
