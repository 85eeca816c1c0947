import numpy as np
import pytest

from conftest import random_unitary, two_photon_amplitudes
from photonkernel import fock, kernels
from photonkernel.kernels import (
    cross_gram,
    default_param_grid,
    gaussian_kernel,
    gram_matrix,
    linear_kernel,
    ntk_kernel,
    photonic_kernel_entry,
    polynomial_kernel,
    select_classical_params,
    unbunching_kernel_entry,
)
from photonkernel.mesh import MeshConfig, product_unitary

CFG = MeshConfig(4, 2)
PSI4 = (0, 1, 1, 0)
HOM = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _points(rng, n, cfg=CFG):
    return rng.uniform(0.0, 1.0, size=(n, cfg.data_dim))


class TestPhotonicEntries:
    def test_self_kernel_is_one(self, rng):
        x = _points(rng, 1)[0]
        for kind in ("quantum", "coherent", "unbunching"):
            assert abs(photonic_kernel_entry(CFG, PSI4, x, x, kind) - 1.0) < 1e-12

    def test_entry_matches_full_distribution(self, rng):
        x, y = _points(rng, 2)
        u = product_unitary(CFG, x, y)
        for kind, r in (("quantum", 1.0), ("coherent", 0.0)):
            dist = fock.full_distribution(u, PSI4, r)
            assert abs(photonic_kernel_entry(CFG, PSI4, x, y, kind)
                       - dist.probability(PSI4)) < 1e-14

    def test_state_vector_oracle_for_quantum_entry(self, rng):
        cfg = MeshConfig(6, 6)
        psi = (0, 0, 1, 1, 0, 0)
        x, y = rng.uniform(0, 1, (2, cfg.data_dim))
        amps = two_photon_amplitudes(product_unitary(cfg, x, y), 2, 3)
        ref = abs(amps[psi]) ** 2
        assert abs(photonic_kernel_entry(cfg, psi, x, y, "quantum") - ref) < 1e-12

    def test_symmetry_in_arguments(self, rng):
        # quantum and coherent entries are exactly symmetric; unbunching is
        # not (the post-selection mass depends on the direction), so its
        # Gram symmetry comes from evaluating one triangle only
        x, y = _points(rng, 2)
        for kind in ("quantum", "coherent"):
            kij = photonic_kernel_entry(CFG, PSI4, x, y, kind)
            kji = photonic_kernel_entry(CFG, PSI4, y, x, kind)
            assert abs(kij - kji) < 1e-12

    def test_mixed_requires_r(self, rng):
        x, y = _points(rng, 2)
        with pytest.raises(ValueError):
            photonic_kernel_entry(CFG, PSI4, x, y, "mixed")
        k = photonic_kernel_entry(CFG, PSI4, x, y, "mixed", r=0.5)
        k1 = photonic_kernel_entry(CFG, PSI4, x, y, "quantum")
        k0 = photonic_kernel_entry(CFG, PSI4, x, y, "coherent")
        assert abs(k - 0.5 * (k1 + k0)) < 1e-14

    def test_multi_occupied_psi_rejected(self, rng):
        x, y = _points(rng, 2)
        with pytest.raises(ValueError):
            photonic_kernel_entry(CFG, (0, 2, 0, 0), x, y)

    def test_unbunching_special_cases(self):
        quantum_hom = fock.full_distribution(HOM, (1, 1), r=1.0)
        # all mass is bunched: 0/0 resolves to 0
        assert unbunching_kernel_entry(quantum_hom, (1, 1)) == 0.0
        coherent_hom = fock.full_distribution(HOM, (1, 1), r=0.0)
        assert abs(unbunching_kernel_entry(coherent_hom, (1, 1)) - 1.0) < 1e-12
        identity = fock.full_distribution(np.eye(4), (0, 1, 1, 0))
        assert unbunching_kernel_entry(identity, (0, 1, 1, 0)) == 1.0
        with pytest.raises(ValueError):
            unbunching_kernel_entry(identity, (0, 2, 0, 0))


class TestGramMatrix:
    @pytest.mark.parametrize("kind", ["quantum", "coherent", "unbunching"])
    def test_structure(self, rng, kind):
        pts = _points(rng, 8)
        gram = gram_matrix(pts, kind, cfg=CFG, psi=PSI4)
        v = gram.values
        assert np.array_equal(v, v.T)
        assert np.all(np.diag(v) == 1.0)
        assert np.all(v >= 0.0) and np.all(v <= 1.0)
        assert gram.provenance == "exact"

    @pytest.mark.parametrize("kind", ["quantum", "coherent"])
    def test_positive_semidefinite(self, rng, kind):
        pts = _points(rng, 12)
        gram = gram_matrix(pts, kind, cfg=CFG, psi=PSI4)
        assert gram.min_eigenvalue() > -1e-8

    def test_cross_gram_consistency(self, rng):
        pts = _points(rng, 6)
        full = gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4).values
        cross = cross_gram(pts[:2], pts[2:], "quantum", cfg=CFG, psi=PSI4)
        assert np.max(np.abs(cross - full[:2, 2:])) < 1e-14

    def test_sampled_gram_reproducible_and_close(self, rng):
        pts = _points(rng, 4)
        exact = gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4).values
        shots = 1_000_000
        g1 = gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4,
                         engine="sampled", n_shots=shots, seed=11)
        g2 = gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4,
                         engine="sampled", n_shots=shots, seed=11)
        assert np.array_equal(g1.values, g2.values)
        assert g1.provenance == "sampled" and g1.shots == shots
        for i in range(4):
            for j in range(i + 1, 4):
                p = exact[i, j]
                bound = 3.0 * np.sqrt(p * (1 - p) / shots) + 1e-9
                assert abs(g1.values[i, j] - p) <= bound

    def test_sampled_engine_validation(self, rng):
        pts = _points(rng, 3)
        with pytest.raises(ValueError):
            gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4, engine="sampled")
        with pytest.raises(ValueError):
            gram_matrix(pts, "gaussian", engine="sampled", n_shots=10,
                        params={"gamma": 1.0})
        with pytest.raises(ValueError):
            gram_matrix(pts, "quantum", cfg=CFG, psi=PSI4, engine="bogus")

    def test_dimension_checks(self, rng):
        with pytest.raises(ValueError):
            gram_matrix(rng.uniform(0, 1, (3, 5)), "quantum", cfg=CFG, psi=PSI4)
        with pytest.raises(ValueError):
            gram_matrix(_points(rng, 3), "nope")


class TestClassicalKernels:
    def test_gaussian(self):
        assert abs(gaussian_kernel([0, 0], [0, 0], 1.0) - 1.0) < 1e-15
        assert abs(gaussian_kernel([1, 0], [0, 0], 2.0) - np.exp(-2.0)) < 1e-15
        with pytest.raises(ValueError):
            gaussian_kernel([1], [0], 0.0)

    def test_polynomial_and_linear(self):
        assert polynomial_kernel([1, 2], [3, 4], 1.0, 1.0, 2) == (11 + 1) ** 2
        assert linear_kernel([1, 2], [3, 4]) == 11.0
        with pytest.raises(ValueError):
            polynomial_kernel([1], [1], 1.0, 0.0, 0)

    def test_ntk_symmetry_and_psd(self, rng):
        pts = rng.uniform(-1, 1, size=(10, 6))
        gram = gram_matrix(pts, "ntk")
        assert np.array_equal(gram.values, gram.values.T)
        assert gram.min_eigenvalue() > -1e-8

    def test_ntk_zero_norm_rejected(self):
        with pytest.raises(ValueError):
            ntk_kernel(np.zeros(4), np.ones(4))

    def test_ntk_monte_carlo_oracle(self, rng):
        """Finite-width two-hidden-layer ReLU network gradient inner products.

        NTK parameterization: h1 = relu(W1 x / sqrt(d)), h2 = relu(W2 h1 /
        sqrt(w)), f = w3 . h2 / sqrt(w).  The empirical kernel is
        grad_theta f(x) . grad_theta f(y), averaged over initializations.
        """
        d, width, n_init = 6, 4096, 3
        xs = rng.uniform(-1, 1, size=(4, d))

        def empirical(x, y, rng_mc):
            total = 0.0
            for _ in range(n_init):
                w1 = rng_mc.normal(size=(width, d))
                w2 = rng_mc.normal(size=(width, width))
                w3 = rng_mc.normal(size=width)
                vals = {}
                for label, z in (("x", x), ("y", y)):
                    a1 = w1 @ z / np.sqrt(d)
                    h1 = np.maximum(a1, 0.0)
                    a2 = w2 @ h1 / np.sqrt(width)
                    h2 = np.maximum(a2, 0.0)
                    d2 = (a2 > 0).astype(float)
                    d1 = (a1 > 0).astype(float)
                    # backprop signals for each parameter block
                    g3 = h2 / np.sqrt(width)
                    delta2 = (w3 / np.sqrt(width)) * d2
                    g2_left = delta2
                    g2_right = h1 / np.sqrt(width)
                    delta1 = (w2.T @ delta2 / np.sqrt(width)) * d1
                    g1_right = z / np.sqrt(d)
                    vals[label] = (g3, g2_left, g2_right, delta1, g1_right)
                gx, gy = vals["x"], vals["y"]
                total += gx[0] @ gy[0]
                total += (gx[1] @ gy[1]) * (gx[2] @ gy[2])
                total += (gx[3] @ gy[3]) * (gx[4] @ gy[4])
            return total / n_init

        rng_mc = np.random.default_rng(7)
        for i, j in ((0, 1), (2, 3), (0, 3)):
            analytic = ntk_kernel(xs[i], xs[j], depth=2)
            mc = empirical(xs[i], xs[j], rng_mc)
            assert abs(mc - analytic) <= 0.05 * abs(analytic), (i, j, mc, analytic)


class TestParamSelection:
    def test_grids(self):
        assert len(default_param_grid("gaussian")) == 4
        assert len(default_param_grid("polynomial")) == 16
        assert default_param_grid("ntk") == [{}]
        with pytest.raises(ValueError):
            default_param_grid("quantum")

    def test_selection_is_deterministic(self, rng):
        pts = rng.uniform(0, 1, size=(18, 4))
        y = np.where(pts[:, 0] + pts[:, 1] > 1.0, 1, -1)
        p1 = select_classical_params("gaussian", pts, y, seed=3)
        p2 = select_classical_params("gaussian", pts, y, seed=3)
        assert p1 == p2
        assert p1["gamma"] in kernels.GAUSSIAN_GAMMA_GRID
