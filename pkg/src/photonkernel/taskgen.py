"""Kernel-separating task generation via the geometric difference.

Given unlabeled points and the exact quantum/coherent Gram matrices, the
top eigenpair of sqrt(K_Q + lambda*I) (K_C + lambda*I)^{-1} sqrt(K_Q + lambda*I)
yields the geometric difference g and the labeling that saturates
s_{K_C}(y) = g^2 * s_{K_Q}(y) for the un-thresholded labels
y = sqrt(K_Q + lambda*I) v.  At lambda = 0 this is exactly the
unregularized construction sqrt(K_Q) K_C^{-1} sqrt(K_Q).

Binary labels default to sign(sqrt(K_Q + lambda*I) v) with sign(0) -> +1;
the alternative rule sign(v) is available via ``label_rule="sign_v"``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .fock import _occ
from .mesh import MeshConfig

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 0.02
_EIG_NEG_TOL = 1e-8
_MAX_REDRAWS = 10


@dataclass
class Dataset:
    """Points in [0,1]^d with optional +±1 labels and generation metadata."""

    points: np.ndarray
    labels: np.ndarray | None = None
    seed: int | None = None
    m: int | None = None
    k: int | None = None
    psi: tuple | None = None
    lam: float | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 2:
            raise ValueError("dataset needs an N x d point array with N >= 2")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape[0] != self.points.shape[0]:
                raise ValueError("label count does not match point count")
            if not np.all(np.isin(self.labels, (-1, 1))):
                raise ValueError("labels must be +1/-1")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def subset(self, indices) -> "Dataset":
        return Dataset(points=self.points[indices],
                       labels=None if self.labels is None else self.labels[indices],
                       seed=self.seed, m=self.m, k=self.k, psi=self.psi, lam=self.lam)

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "m": self.m,
            "k": self.k,
            "psi": list(self.psi) if self.psi is not None else None,
            "lambda": self.lam,
            "points": self.points.tolist(),
            "labels": None if self.labels is None else self.labels.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Dataset":
        return cls(points=np.asarray(data["points"], dtype=float),
                   labels=None if data.get("labels") is None else np.asarray(data["labels"]),
                   seed=data.get("seed"), m=data.get("m"), k=data.get("k"),
                   psi=None if data.get("psi") is None else tuple(data["psi"]),
                   lam=data.get("lambda"))


@dataclass
class GeometricDifferenceResult:
    g: float
    eigenvector: np.ndarray
    labels: np.ndarray
    lam: float
    y_real: np.ndarray


def _gram_values(K) -> np.ndarray:
    return np.asarray(getattr(K, "values", K), dtype=float)


def model_complexity(K, y, lam: float = DEFAULT_LAMBDA) -> float:
    """s_K(y) = y^T (K + lambda*I)^{-1} y."""
    values = _gram_values(K)
    y = np.asarray(y, dtype=float)
    try:
        z = np.linalg.solve(values + lam * np.eye(values.shape[0]), y)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            f"K + {lam}*I is singular; increase the regularization lambda"
        ) from exc
    return float(y @ z)


def _sqrt_regularized(K: np.ndarray, lam: float) -> np.ndarray:
    w, V = np.linalg.eigh(K)
    if w.min() < -_EIG_NEG_TOL:
        raise ValueError(
            f"Gram matrix has eigenvalue {w.min():.3e} below -{_EIG_NEG_TOL}; not PSD"
        )
    w = np.clip(w, 0.0, None) + lam
    return (V * np.sqrt(w)) @ V.T


def _fix_sign(v: np.ndarray) -> np.ndarray:
    for comp in v:
        if abs(comp) > 1e-12:
            return v if comp > 0 else -v
    return v


def geometric_difference(K_Q, K_C, lam: float = DEFAULT_LAMBDA,
                         label_rule: str = "threshold") -> GeometricDifferenceResult:
    """g, top eigenvector and the induced binary labeling.

    ``label_rule``: "threshold" (default) thresholds the un-thresholded
    labels sqrt(K_Q + lam*I) v; "sign_v" thresholds v directly.
    """
    kq = _gram_values(K_Q)
    kc = _gram_values(K_C)
    n = kq.shape[0]
    if kq.shape != (n, n) or kc.shape != (n, n):
        raise ValueError("Gram matrices must be square and equally sized")
    for name, mat in (("K_Q", kq), ("K_C", kc)):
        if np.max(np.abs(mat - mat.T)) > 1e-8:
            raise ValueError(f"{name} is not symmetric")
    sq = _sqrt_regularized(kq, lam)
    kc_reg = kc + lam * np.eye(n)
    if lam == 0.0 and np.linalg.eigvalsh((kc_reg + kc_reg.T) / 2).min() < -_EIG_NEG_TOL:
        raise ValueError("K_C has eigenvalues below tolerance; not PSD")
    M = sq @ np.linalg.solve(kc_reg, sq)
    M = (M + M.T) / 2.0
    w, V = np.linalg.eigh(M)
    g_sq = max(w[-1], 0.0)
    v = _fix_sign(V[:, -1])
    y_real = sq @ v
    if label_rule == "threshold":
        labels = np.where(y_real >= 0.0, 1, -1)
    elif label_rule == "sign_v":
        labels = np.where(v >= 0.0, 1, -1)
    else:
        raise ValueError(f"unknown label rule {label_rule!r}")
    return GeometricDifferenceResult(g=float(np.sqrt(g_sq)), eigenvector=v,
                                     labels=labels, lam=lam, y_real=y_real)


@dataclass
class TaskResult:
    dataset: Dataset
    gram_q: kernels.GramMatrix
    gram_c: kernels.GramMatrix
    geo: GeometricDifferenceResult
    redraws: int = 0


def generate_task(cfg: MeshConfig, psi, n_points: int,
                  lam: float = DEFAULT_LAMBDA, seed: int = 0,
                  label_rule: str = "threshold") -> TaskResult:
    """Draw uniform points, compute exact K_Q/K_C, label by geometric difference.

    Draws producing a single-class labeling are redrawn with a seed derived
    from the original; more than 10 redraws raise.
    """
    if n_points < 4:
        raise ValueError(f"task generation needs N >= 4, got {n_points}")
    psi = _occ(psi)
    for attempt in range(_MAX_REDRAWS + 1):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), attempt]))
        points = rng.uniform(0.0, 1.0, size=(n_points, cfg.data_dim))
        gram_q = kernels.gram_matrix(points, "quantum", cfg=cfg, psi=psi)
        gram_c = kernels.gram_matrix(points, "coherent", cfg=cfg, psi=psi)
        geo = geometric_difference(gram_q, gram_c, lam, label_rule=label_rule)
        pos = int(np.sum(geo.labels == 1))
        if 0 < pos < n_points:
            logger.info("task seed=%s N=%d g=%.4f balance=%d/%d redraws=%d",
                        seed, n_points, geo.g, pos, n_points - pos, attempt)
            dataset = Dataset(points=points, labels=geo.labels, seed=seed,
                              m=cfg.modes, k=cfg.columns, psi=psi, lam=lam)
            return TaskResult(dataset=dataset, gram_q=gram_q, gram_c=gram_c,
                              geo=geo, redraws=attempt)
    raise RuntimeError(
        f"all {_MAX_REDRAWS} redraws produced single-class labelings (seed {seed})"
    )
