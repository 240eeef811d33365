import numpy as np
import pytest
from sklearn.base import clone

from unicity import (
    Dataset,
    InvalidSizeError,
    InvalidSpecError,
    InvertedIndex,
    NotInDatasetError,
    RadEstimator,
    UnicityEstimator,
    estimate_rad,
    estimate_unicity,
    homogeneity,
    sample_size_rad,
    sample_size_unicity,
    unicity_vs_size,
)
from unicity.oracle import exact_unicity
from unicity.synthgen import GenSpec, generate


class TestSampleSizes:
    def test_headline_values(self):
        assert sample_size_unicity(0.01, 0.99) == 26_492
        assert sample_size_rad(0.01, 0.99, 10) == 38_005

    def test_rad_depth_20_rounding(self):
        # ceiling lands one above a floor-style rounding of the same formula
        assert sample_size_rad(0.01, 0.99, 20) in (41_470, 41_471)

    def test_looser_spec(self):
        assert sample_size_unicity(0.05, 0.95) == 738

    def test_depth_one_reduces_to_unicity(self):
        for eps, sig in [(0.01, 0.99), (0.05, 0.9), (0.02, 0.5)]:
            assert sample_size_rad(eps, sig, 1) == sample_size_unicity(eps, sig)

    def test_monotone_in_sigma(self):
        sizes = [sample_size_unicity(0.01, s) for s in (0.5, 0.9, 0.95, 0.99, 0.999)]
        assert sizes == sorted(sizes)

    @pytest.mark.parametrize("eps,sig", [(0, 0.9), (1, 0.9), (0.1, 0), (0.1, 1), (-0.2, 0.5)])
    def test_domain_errors(self, eps, sig):
        with pytest.raises(InvalidSpecError):
            sample_size_unicity(eps, sig)
        with pytest.raises(InvalidSpecError):
            sample_size_rad(eps, sig, 5)


class TestEstimateUnicity:
    def test_identical_records_zero(self):
        ds = Dataset.from_records([[1, 2, 3]] * 3)
        for mode in ("uniform", "biased"):
            est = estimate_unicity(
                ds, 2, epsilon=0.05, sigma=0.95, mode=mode, burn_in=50, seed=1
            )
            assert est.h1_hat == 0.0

    def test_disjoint_records_one(self):
        ds = Dataset.from_records([[1, 2], [3, 4], [5, 6]])
        for mode in ("uniform", "biased"):
            est = estimate_unicity(
                ds, 2, epsilon=0.05, sigma=0.95, mode=mode, burn_in=50, seed=2
            )
            assert est.h1_hat == 1.0

    def test_toy_within_tolerance_at_full_n(self, toy3):
        est = estimate_unicity(toy3, 2, burn_in=32, seed=3)
        assert est.n == 26_492
        assert abs(est.h1_hat - exact_unicity(toy3, 2)) < 0.01

    def test_biased_below_uniform_on_skew(self, skew10):
        biased = [
            estimate_unicity(
                skew10, 2, epsilon=0.05, sigma=0.95, mode="biased", seed=s
            ).h1_hat
            for s in range(5)
        ]
        uniform = [
            estimate_unicity(
                skew10, 2, epsilon=0.05, sigma=0.95, mode="uniform", burn_in=104, seed=s
            ).h1_hat
            for s in range(5)
        ]
        assert np.mean(biased) < np.mean(uniform)


class TestEstimateRad:
    def test_disjoint_all_unique(self):
        ds = Dataset.from_records([[1, 2], [3, 4]])
        hist = estimate_rad(ds, 2, depth=3, epsilon=0.05, sigma=0.95, burn_in=40, seed=4)
        assert hist.frequency(1) == 1.0
        assert hist.tail == 0.0

    def test_identical_records_all_in_tail(self):
        ds = Dataset.from_records([[1, 2, 3]] * 5)
        hist = estimate_rad(ds, 2, depth=3, epsilon=0.05, sigma=0.95, burn_in=40, seed=5)
        assert hist.tail == 1.0
        hist = estimate_rad(ds, 2, depth=5, epsilon=0.05, sigma=0.95, burn_in=40, seed=5)
        assert hist.frequency(5) == 1.0

    def test_toy_k1_thirds(self, toy3):
        hist = estimate_rad(toy3, 1, depth=4, epsilon=0.05, sigma=0.95, burn_in=32, seed=6)
        for support in (1, 2, 3):
            assert abs(hist.frequency(support) - 1 / 3) < 0.05
        assert hist.frequency(4) == 0.0

    def test_mass_sums_to_one(self, toy6):
        hist = estimate_rad(toy6, 2, depth=2, epsilon=0.05, sigma=0.95, burn_in=125, seed=7)
        assert abs(sum(hist.frequencies) + hist.tail - 1.0) < 1e-9

    def test_bucket1_matches_unicity_estimate(self, toy3):
        eps = 0.05
        hist = estimate_rad(toy3, 2, depth=3, epsilon=eps, sigma=0.95, burn_in=32, seed=8)
        est = estimate_unicity(toy3, 2, epsilon=eps, sigma=0.95, burn_in=32, seed=8)
        assert abs(hist.frequency(1) - est.h1_hat) < 2 * eps


class TestHomogeneity:
    def test_hand_intersection(self):
        ds = Dataset.from_records([[1, 2, 3], [1, 2, 3], [4]])
        idx = InvertedIndex(ds)
        x = ds.encode([1, 2])
        assert homogeneity(idx, ds, x) == set(ds.encode([3]))

    def test_unique_match_reveals_remainder(self, toy3):
        idx = InvertedIndex(toy3)
        x = toy3.encode([1, 2])
        assert homogeneity(idx, toy3, x) == set(toy3.encode([3]))

    def test_nothing_shared_beyond_query(self):
        ds = Dataset.from_records([[1, 2, 5], [1, 2, 6]])
        idx = InvertedIndex(ds)
        assert homogeneity(idx, ds, ds.encode([1, 2])) == set()

    def test_subset_of_every_matching_record(self, toy6):
        idx = InvertedIndex(toy6)
        for rec in toy6.records:
            x = rec[:2]
            learned = homogeneity(idx, toy6, x)
            assert learned.isdisjoint(x)
            _, users = idx.support(x)
            for u in users:
                assert learned <= set(toy6.records[int(u)])

    def test_absent_subset(self):
        ds = Dataset.from_records([[1, 2], [3, 4]])
        idx = InvertedIndex(ds)
        with pytest.raises(NotInDatasetError):
            homogeneity(idx, ds, (0, 2))


class TestUnicityVsSize:
    def test_full_size_matches_direct_estimate(self, toy6):
        eps = 0.05
        curve = unicity_vs_size(
            toy6, 2, [toy6.num_records], epsilon=eps, sigma=0.95,
            trials=1, burn_in=125, seed=9,
        )
        direct = estimate_unicity(
            toy6, 2, epsilon=eps, sigma=0.95, burn_in=125, seed=10
        )
        assert len(curve) == 1
        assert curve[0].size == toy6.num_records
        assert abs(curve[0].mean_h1 - direct.h1_hat) <= 2 * eps

    def test_degenerate_size_one(self, toy6):
        curve = unicity_vs_size(
            toy6, 2, [1], epsilon=0.05, sigma=0.95, trials=3, burn_in=20, seed=11
        )
        assert curve[0].mean_h1 == 1.0
        assert curve[0].stdev_h1 == 0.0

    def test_small_variance_across_subsamples(self):
        spec = GenSpec(num_users=400, num_items=900, popularity_exponent=1.1,
                       size_mu=2.2, size_sigma=0.6, seed=12)
        ds = generate(spec)
        curve = unicity_vs_size(
            ds, 2, [200], epsilon=0.05, sigma=0.95, trials=50, burn_in=150, seed=13
        )
        assert curve[0].stdev_h1 < 0.02

    def test_size_out_of_range(self, toy3):
        with pytest.raises(InvalidSizeError):
            unicity_vs_size(toy3, 2, [4], seed=1)
        with pytest.raises(InvalidSizeError):
            unicity_vs_size(toy3, 2, [0], seed=1)


class TestEstimatorApi:
    def test_unicity_estimator_fit(self, toy3):
        est = UnicityEstimator(
            k=2, epsilon=0.05, sigma=0.95, burn_in=32, random_state=14
        ).fit(toy3)
        assert est.n_samples_ == 738
        assert abs(est.unicity_ - 2 / 3) < 0.05

    def test_fit_accepts_raw_records(self):
        est = UnicityEstimator(
            k=2, epsilon=0.05, sigma=0.95, burn_in=40, random_state=15
        ).fit([[1, 2], [3, 4]])
        assert est.unicity_ == 1.0

    def test_get_params_round_trip(self):
        est = UnicityEstimator(k=3, epsilon=0.02, sigma=0.9, mode="biased")
        params = est.get_params()
        rebuilt = UnicityEstimator(**params)
        assert rebuilt.get_params() == params

    def test_clone_and_set_params(self, toy3):
        est = UnicityEstimator(k=2, epsilon=0.05, sigma=0.95, burn_in=32, random_state=0)
        cloned = clone(est)
        assert cloned.get_params() == est.get_params()
        cloned.set_params(k=1)
        assert cloned.k == 1

    def test_rad_estimator_fit(self, toy3):
        est = RadEstimator(
            k=1, depth=3, epsilon=0.05, sigma=0.95, burn_in=32, random_state=16
        ).fit(toy3)
        assert len(est.frequencies_) == 3
        assert abs(sum(est.frequencies_) + est.tail_ - 1.0) < 1e-9

    def test_same_seed_same_result(self, toy3):
        a = UnicityEstimator(k=2, epsilon=0.05, sigma=0.95, burn_in=32, random_state=7).fit(toy3)
        b = UnicityEstimator(k=2, epsilon=0.05, sigma=0.95, burn_in=32, random_state=7).fit(toy3)
        assert a.unicity_ == b.unicity_
