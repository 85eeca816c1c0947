import numpy as np
import pytest

from conftest import random_unitary
from photonkernel import fock, shots

HOM = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _dist(rng, m=4, n=2, r=1.0):
    s = [0] * m
    for a in range(n):
        s[a] = 1
    return fock.full_distribution(random_unitary(rng, m), s, r), tuple(s)


class TestSampleCounts:
    def test_reproducible(self, rng):
        dist, _ = _dist(rng)
        r1 = shots.sample_counts(dist, 10_000, seed=42)
        r2 = shots.sample_counts(dist, 10_000, seed=42)
        assert r1.counts == r2.counts
        assert r1.total_shots == 10_000

    def test_bunched_outcomes_are_discarded(self, rng):
        dist, _ = _dist(rng)
        record = shots.sample_counts(dist, 5_000, seed=0)
        assert all(max(occ) <= 1 for occ in record.counts)
        assert record.postselected_shots <= record.total_shots

    def test_postselection_fraction_tracks_mass(self, rng):
        dist, _ = _dist(rng)
        n_shots = 200_000
        record = shots.sample_counts(dist, n_shots, seed=1)
        mass = dist.collision_free_mass()
        sigma = np.sqrt(mass * (1 - mass) / n_shots)
        assert abs(record.postselected_shots / n_shots - mass) <= 4 * sigma + 1e-9

    def test_frequencies_within_three_sigma(self, rng):
        dist, _ = _dist(rng)
        n_shots = 500_000
        record = shots.sample_counts(dist, n_shots, seed=9)
        for occ, p in dist.entries.items():
            if max(occ) > 1:
                continue
            freq = record.counts.get(occ, 0) / n_shots
            sigma = np.sqrt(p * (1 - p) / n_shots)
            assert abs(freq - p) <= 3 * sigma + 1e-9, occ

    def test_invalid_shots(self, rng):
        dist, _ = _dist(rng)
        with pytest.raises(ValueError):
            shots.sample_counts(dist, 0, seed=0)

    def test_json_round_trip_fields(self, rng):
        dist, _ = _dist(rng)
        record = shots.sample_counts(dist, 1000, seed=3, unitary_id=(1, 2))
        payload = record.to_json_dict()
        assert payload["total_shots"] == 1000
        assert payload["seed"] == 3
        assert payload["unitary_id"] == [1, 2]
        assert sum(payload["counts"].values()) == record.postselected_shots


class TestEstimator:
    def test_unbunching_estimator(self):
        record = shots.CoincidenceRecord(
            counts={(1, 1, 0): 30, (1, 0, 1): 50, (0, 1, 1): 20},
            total_shots=200)
        assert shots.estimate_kernel_entry(record, (1, 1, 0)) == 0.3
        assert shots.estimate_kernel_entry(record, (0, 1, 1)) == 0.2

    def test_no_counts_error(self):
        record = shots.CoincidenceRecord(counts={}, total_shots=100)
        with pytest.raises(ValueError):
            shots.estimate_kernel_entry(record, (1, 1, 0))

    def test_converges_to_exact(self, rng):
        dist, psi = _dist(rng)
        mass = dist.collision_free_mass()
        exact = dist.probability(psi) / mass
        record = shots.sample_counts(dist, 2_000_000, seed=5)
        est = shots.estimate_kernel_entry(record, psi)
        assert abs(est - exact) < 3e-3


class TestFidelity:
    def test_identical_distributions(self):
        p = {(1, 0): 0.25, (0, 1): 0.75}
        assert abs(shots.distribution_fidelity(p, dict(p)) - 1.0) < 1e-12

    def test_disjoint_distributions(self):
        p = {(1, 0): 1.0}
        q = {(0, 1): 1.0}
        assert shots.distribution_fidelity(p, q) == 0.0

    def test_uniform_vs_point_on_fifteen_outcomes(self):
        states = fock.enumerate_configurations(6, 2, collision_free_only=True)
        uniform = {t: 1.0 / 15.0 for t in states}
        point = {states[0]: 1.0}
        fid = shots.distribution_fidelity(uniform, point)
        assert abs(fid - np.sqrt(1.0 / 15.0)) < 1e-12

    def test_accepts_output_distribution_objects(self):
        d = fock.full_distribution(HOM, (1, 1), r=1.0)
        assert abs(shots.distribution_fidelity(d, d) - 1.0) < 1e-12

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            shots.distribution_fidelity({(1, 0): 0.4}, {(1, 0): 1.0})


class TestBudget:
    def test_default_preset(self):
        assert shots.shot_budget_from_time() == 50_000

    def test_general_and_invalid(self):
        assert shots.shot_budget_from_time(100.0, 2.5) == 250
        with pytest.raises(ValueError):
            shots.shot_budget_from_time(0.0, 5.0)
        with pytest.raises(ValueError):
            shots.shot_budget_from_time(10.0, -1.0)
