"""Gram matrices for photonic and classical kernels.

Photonic kinds: "quantum" (indistinguishable photons), "coherent"
(distinguishable), "mixed" (partial indistinguishability r) and
"unbunching" (quantum statistics renormalized over collision-free
outputs; not guaranteed positive definite).  Classical baselines:
"gaussian", "polynomial", "linear" and "ntk" (analytic infinite-width
ReLU neural tangent kernel, two hidden layers by default).
"""

from dataclasses import dataclass, field

import numpy as np

from . import fock, shots
from .fock import _occ
from .mesh import MeshConfig, product_unitary

PHOTONIC_KINDS = ("quantum", "coherent", "mixed", "unbunching")
CLASSICAL_KINDS = ("gaussian", "polynomial", "linear", "ntk")

# Grid searched by 3-fold cross-validation when hyperparameters are not
# supplied explicitly.
GAUSSIAN_GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)
POLY_GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)
POLY_DEGREE_GRID = (2, 3)
POLY_OFFSET_GRID = (0.0, 1.0)


@dataclass
class GramMatrix:
    """N x N kernel values plus provenance metadata."""

    values: np.ndarray
    kind: str
    provenance: str = "exact"
    shots: int | None = None
    seed: int | None = None
    r: float | None = None

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.values + self.values.T) / 2.0).min())


def _kind_r(kind: str, r: float | None) -> float:
    if kind in ("quantum", "unbunching"):
        return 1.0
    if kind == "coherent":
        return 0.0
    if kind == "mixed":
        if r is None:
            raise ValueError("mixed kind requires an explicit r in [0, 1]")
        return float(r)
    raise ValueError(f"unknown photonic kind {kind!r}")


def _check_psi(cfg: MeshConfig, psi) -> tuple:
    psi = _occ(psi)
    if len(psi) != cfg.modes:
        raise ValueError(f"encoding state has {len(psi)} modes, mesh has {cfg.modes}")
    if max(psi) > 1:
        raise ValueError(
            "multi-occupied encoding states are unsupported (normalization N' != 1)"
        )
    return psi


def photonic_kernel_entry(cfg: MeshConfig, psi, x_i, x_j, kind: str = "quantum",
                          r: float | None = None) -> float:
    """K(x_i, x_j) = P(psi | psi) through U(x_i)^dag U(x_j).

    For the quantum kind this equals |<psi| U^dag(x_i) U(x_j) |psi>|^2.
    """
    psi = _check_psi(cfg, psi)
    u = product_unitary(cfg, x_i, x_j)
    if kind == "unbunching":
        return unbunching_kernel_entry(fock.full_distribution(u, psi, 1.0), psi)
    return fock.transition_probability(u, psi, psi, _kind_r(kind, r))


def unbunching_kernel_entry(distribution: fock.OutputDistribution, psi) -> float:
    """P(psi) / (total collision-free mass) of an exact output distribution."""
    psi = _occ(psi)
    if max(psi) > 1:
        raise ValueError("unbunching kernel is defined for collision-free psi only")
    mass = distribution.collision_free_mass()
    if mass <= 0.0:
        # 0/0 (all mass bunched, e.g. the HOM dip) resolves to 0; a nonzero
        # numerator over zero mass is inconsistent input.
        if distribution.probability(psi) == 0.0:
            return 0.0
        raise ValueError("collision-free probability mass is zero; kernel undefined")
    return distribution.probability(psi) / mass


def gaussian_kernel(x_i, x_j, gamma: float) -> float:
    if gamma <= 0.0:
        raise ValueError(f"gaussian kernel needs gamma > 0, got {gamma}")
    d = np.asarray(x_i, dtype=float) - np.asarray(x_j, dtype=float)
    return float(np.exp(-gamma * d.dot(d)))


def polynomial_kernel(x_i, x_j, gamma: float, offset: float, degree: int) -> float:
    if degree < 1:
        raise ValueError(f"polynomial degree must be positive, got {degree}")
    dot = float(np.dot(np.asarray(x_i, dtype=float), np.asarray(x_j, dtype=float)))
    return (gamma * dot + offset) ** degree


def linear_kernel(x_i, x_j) -> float:
    return float(np.dot(np.asarray(x_i, dtype=float), np.asarray(x_j, dtype=float)))


def ntk_kernel(x_i, x_j, depth: int = 2) -> float:
    """Analytic infinite-width NTK of a ReLU network with ``depth`` hidden layers.

    NTK parameterization with unit weight variance and no biases; the layer
    covariance recursion uses the ReLU arc-cosine closed forms
    E[relu(u) relu(v)] and E[relu'(u) relu'(v)].
    """
    x = np.asarray(x_i, dtype=float)
    y = np.asarray(x_j, dtype=float)
    d = x.shape[0]
    sig_xx = x.dot(x) / d
    sig_yy = y.dot(y) / d
    if sig_xx <= 0.0 or sig_yy <= 0.0:
        raise ValueError("ntk kernel is undefined for zero-norm inputs")
    sig_xy = x.dot(y) / d
    theta = sig_xy
    for _ in range(depth):
        rho = np.clip(sig_xy / np.sqrt(sig_xx * sig_yy), -1.0, 1.0)
        a = np.arccos(rho)
        new_xy = np.sqrt(sig_xx * sig_yy) * (np.sin(a) + (np.pi - a) * np.cos(a)) / (2 * np.pi)
        dot_xy = (np.pi - a) / (2 * np.pi)
        theta = new_xy + theta * dot_xy
        sig_xy = new_xy
        sig_xx = sig_xx / 2.0
        sig_yy = sig_yy / 2.0
    return float(theta)


def classical_kernel_entry(kind: str, x_i, x_j, params: dict) -> float:
    if kind == "gaussian":
        return gaussian_kernel(x_i, x_j, params["gamma"])
    if kind == "polynomial":
        return polynomial_kernel(x_i, x_j, params["gamma"], params["offset"], params["degree"])
    if kind == "linear":
        return linear_kernel(x_i, x_j)
    if kind == "ntk":
        return ntk_kernel(x_i, x_j, params.get("depth", 2))
    raise ValueError(f"unknown classical kind {kind!r}")


def _pair_rng_seed(seed: int, i: int, j: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), int(i), int(j)])


def _sampled_photonic_entry(cfg, psi, x_i, x_j, kind, r, n_shots, seed_seq):
    dist = fock.full_distribution(product_unitary(cfg, x_i, x_j), psi, _kind_r(kind, r))
    record = shots.sample_counts(dist, n_shots, seed_seq)
    if kind == "unbunching":
        return shots.estimate_kernel_entry(record, psi), record
    return record.counts.get(tuple(psi), 0) / record.total_shots, record


def gram_matrix(points, kind: str, *, cfg: MeshConfig | None = None, psi=None,
                r: float | None = None, engine: str = "exact",
                n_shots: int | None = None, seed: int | None = None,
                params: dict | None = None) -> GramMatrix:
    """Symmetric N x N Gram matrix over ``points``.

    Only the upper triangle is evaluated (N(N-1)/2 entries); the diagonal
    of photonic kinds is set to exactly 1 without evaluation, since
    U(x)^dag U(x) = I analytically.  The sampled engine draws ``n_shots``
    multinomial shots per pair with a per-pair seed derived from
    (seed, i, j).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be an N x d array")
    n = pts.shape[0]
    values = np.zeros((n, n))
    sampled = engine == "sampled"
    if engine not in ("exact", "sampled"):
        raise ValueError(f"unknown engine {engine!r}")
    if sampled and (n_shots is None or n_shots <= 0):
        raise ValueError("sampled engine requires n_shots > 0")

    if kind in PHOTONIC_KINDS:
        if cfg is None or psi is None:
            raise ValueError("photonic kinds need a MeshConfig and an encoding state")
        psi = _check_psi(cfg, psi)
        if pts.shape[1] != cfg.data_dim:
            raise ValueError(f"points have d={pts.shape[1]}, mesh expects {cfg.data_dim}")
        base_seed = 0 if seed is None else seed
        for i in range(n):
            values[i, i] = 1.0
            for j in range(i + 1, n):
                if sampled:
                    entry, _ = _sampled_photonic_entry(
                        cfg, psi, pts[i], pts[j], kind, r, n_shots,
                        _pair_rng_seed(base_seed, i, j))
                else:
                    entry = photonic_kernel_entry(cfg, psi, pts[i], pts[j], kind, r)
                values[i, j] = entry
                values[j, i] = entry
    elif kind in CLASSICAL_KINDS:
        if sampled:
            raise ValueError("sampled engine applies to photonic kinds only")
        params = params or {}
        for i in range(n):
            values[i, i] = classical_kernel_entry(kind, pts[i], pts[i], params)
            for j in range(i + 1, n):
                entry = classical_kernel_entry(kind, pts[i], pts[j], params)
                values[i, j] = entry
                values[j, i] = entry
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")

    return GramMatrix(values=values, kind=kind,
                      provenance="sampled" if sampled else "exact",
                      shots=n_shots if sampled else None, seed=seed,
                      r=_kind_r(kind, r) if kind in PHOTONIC_KINDS else None)


def cross_gram(points_a, points_b, kind: str, *, cfg: MeshConfig | None = None,
               psi=None, r: float | None = None, engine: str = "exact",
               n_shots: int | None = None, seed: int | None = None,
               params: dict | None = None) -> np.ndarray:
    """Rectangular kernel matrix K[a, b] = K(points_a[a], points_b[b])."""
    pa = np.asarray(points_a, dtype=float)
    pb = np.asarray(points_b, dtype=float)
    sampled = engine == "sampled"
    if sampled and (n_shots is None or n_shots <= 0):
        raise ValueError("sampled engine requires n_shots > 0")
    values = np.zeros((pa.shape[0], pb.shape[0]))
    if kind in PHOTONIC_KINDS:
        if cfg is None or psi is None:
            raise ValueError("photonic kinds need a MeshConfig and an encoding state")
        psi = _check_psi(cfg, psi)
        base_seed = 0 if seed is None else seed
        for i in range(pa.shape[0]):
            for j in range(pb.shape[0]):
                if sampled:
                    values[i, j], _ = _sampled_photonic_entry(
                        cfg, psi, pa[i], pb[j], kind, r, n_shots,
                        _pair_rng_seed(base_seed, i, -(j + 1)))
                else:
                    values[i, j] = photonic_kernel_entry(cfg, psi, pa[i], pb[j], kind, r)
    elif kind in CLASSICAL_KINDS:
        params = params or {}
        for i in range(pa.shape[0]):
            for j in range(pb.shape[0]):
                values[i, j] = classical_kernel_entry(kind, pa[i], pb[j], params)
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return values


def default_param_grid(kind: str):
    if kind == "gaussian":
        return [{"gamma": g} for g in GAUSSIAN_GAMMA_GRID]
    if kind == "polynomial":
        return [{"gamma": g, "offset": o, "degree": d}
                for g in POLY_GAMMA_GRID for o in POLY_OFFSET_GRID for d in POLY_DEGREE_GRID]
    if kind in ("linear", "ntk"):
        return [{}]
    raise ValueError(f"no hyperparameter grid for kind {kind!r}")


def select_classical_params(kind: str, points, labels, C: float = 10.0,
                            seed: int = 0, folds: int = 3) -> dict:
    """Pick hyperparameters by k-fold cross-validation accuracy on the training split.

    Ties resolve to the earliest grid entry, so the selection is
    deterministic for a fixed seed.
    """
    from . import svm

    grid = default_param_grid(kind)
    if len(grid) == 1:
        return grid[0]
    pts = np.asarray(points, dtype=float)
    y = np.asarray(labels)
    n = pts.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0xCF]))
    perm = rng.permutation(n)
    fold_ids = np.array([k % folds for k in range(n)])[np.argsort(np.argsort(perm))]

    best_params, best_score = grid[0], -1.0
    for params in grid:
        full = gram_matrix(pts, kind, params=params).values
        scores = []
        for f in range(folds):
            tr = np.where(fold_ids != f)[0]
            te = np.where(fold_ids == f)[0]
            if len(np.unique(y[tr])) < 2 or te.size == 0:
                continue
            model = svm.train(full[np.ix_(tr, tr)], y[tr], C=C)
            pred = svm.predict(model, full[np.ix_(te, tr)])
            scores.append(svm.accuracy(pred, y[te]))
        score = float(np.mean(scores)) if scores else 0.0
        if score > best_score + 1e-12:
            best_params, best_score = params, score
    return best_params
