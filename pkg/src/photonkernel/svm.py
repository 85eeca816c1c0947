"""Support vector machine on precomputed Gram matrices.

Soft-margin dual solved by SMO-style pairwise coordinate ascent with
maximal-violating-pair selection.  The solver does not assume the Gram
matrix is positive semidefinite (the unbunching kernel can be indefinite);
non-convex pair curvature is floored at a small positive value, which
keeps the iteration monotone on the feasible box.
"""

from dataclasses import dataclass, field
from math import ceil

import numpy as np

DEFAULT_C = 10.0
DEFAULT_TOL = 1e-6
_BOUND_EPS = 1e-9


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    train_labels: np.ndarray
    train_indices: np.ndarray
    C: float
    kkt_residual: float
    dual_objective: float

    def to_json_dict(self) -> dict:
        return {
            "alphas": self.alphas.tolist(),
            "bias": self.bias,
            "train_labels": self.train_labels.astype(int).tolist(),
            "train_indices": self.train_indices.astype(int).tolist(),
            "C": self.C,
            "kkt_residual": self.kkt_residual,
            "dual_objective": self.dual_objective,
        }


def _gram_values(K) -> np.ndarray:
    values = getattr(K, "values", K)
    return np.asarray(values, dtype=float)


def train(K_train, y, C: float = DEFAULT_C, tol: float = DEFAULT_TOL,
          max_iter: int | None = None, train_indices=None) -> SvmModel:
    """Solve the soft-margin dual for a precomputed kernel matrix.

    Stops when the maximal KKT violation drops below ``tol``; raises on
    non-convergence with the residual in the message.
    """
    K = _gram_values(K_train)
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if K.shape != (n, n):
        raise ValueError(f"Gram matrix shape {K.shape} does not match {n} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1/-1")
    if np.unique(y).size < 2:
        raise ValueError("training labels contain a single class; nothing to separate")
    if C <= 0:
        raise ValueError(f"box constraint C must be positive, got {C}")
    if max_iter is None:
        max_iter = max(200 * n * n, 20_000)

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
    Ky = K * y  # K[:, j] * y[j]

    residual = np.inf
    for _ in range(max_iter):
        ygrad = -y * grad
        up = ((y > 0) & (alpha < C - _BOUND_EPS)) | ((y < 0) & (alpha > _BOUND_EPS))
        low = ((y < 0) & (alpha < C - _BOUND_EPS)) | ((y > 0) & (alpha > _BOUND_EPS))
        if not up.any() or not low.any():
            residual = 0.0
            break
        up_idx = np.where(up)[0]
        low_idx = np.where(low)[0]
        i = up_idx[np.argmax(ygrad[up_idx])]
        j = low_idx[np.argmin(ygrad[low_idx])]
        m_val = ygrad[i]
        M_val = ygrad[j]
        residual = m_val - M_val
        if residual < tol:
            break
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        eta = max(eta, 1e-12)
        t = residual / eta
        cap_i = (C - alpha[i]) if y[i] > 0 else alpha[i]
        cap_j = (C - alpha[j]) if y[j] < 0 else alpha[j]
        t = min(t, cap_i, cap_j)
        alpha[i] += y[i] * t
        alpha[j] -= y[j] * t
        grad += (y[i] * t) * y * Ky[:, i] - (y[j] * t) * y * Ky[:, j]
    else:
        raise RuntimeError(
            f"SMO did not converge in {max_iter} iterations; KKT residual {residual:.3e}"
        )

    decision = Ky @ alpha  # f_i without bias
    free = (alpha > _BOUND_EPS) & (alpha < C - _BOUND_EPS)
    if free.any():
        bias = float(np.mean(y[free] - decision[free]))
    else:
        # midpoint of the KKT bias interval
        ygrad = -y * grad
        up = ((y > 0) & (alpha < C - _BOUND_EPS)) | ((y < 0) & (alpha > _BOUND_EPS))
        low = ((y < 0) & (alpha < C - _BOUND_EPS)) | ((y > 0) & (alpha > _BOUND_EPS))
        hi = ygrad[up].max() if up.any() else 0.0
        lo = ygrad[low].min() if low.any() else 0.0
        bias = float((hi + lo) / 2.0)

    dual_obj = 0.5 * alpha @ (y * (Ky @ alpha)) - alpha.sum()
    if train_indices is None:
        train_indices = np.arange(n)
    return SvmModel(alphas=alpha, bias=bias, train_labels=y.copy(),
                    train_indices=np.asarray(train_indices),
                    C=C, kkt_residual=float(max(residual, 0.0)),
                    dual_objective=float(dual_obj))


def decision_function(model: SvmModel, K_cross) -> np.ndarray:
    K = np.asarray(_gram_values(K_cross), dtype=float)
    if K.ndim != 2 or K.shape[1] != model.alphas.shape[0]:
        raise ValueError(
            f"cross-kernel matrix has {K.shape[1] if K.ndim == 2 else '?'} columns, "
            f"model has {model.alphas.shape[0]} training points"
        )
    return K @ (model.alphas * model.train_labels) + model.bias


def predict(model: SvmModel, K_cross) -> np.ndarray:
    """sign(sum_i alpha_i y_i K(x, x_i) + b); sign(0) maps to +1."""
    return np.where(decision_function(model, K_cross) >= 0.0, 1, -1)


def accuracy(predicted, actual) -> float:
    p = np.asarray(predicted)
    a = np.asarray(actual)
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {a.shape}")
    return float(np.mean(p == a))


def train_test_split(n_points: int, ratio: float, seed):
    """Seeded shuffle; the first ceil(ratio * N) indices train, the rest test."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    n_train = ceil(ratio * n_points)
    if n_train >= n_points or n_train <= 0:
        raise ValueError(f"split of {n_points} points at ratio {ratio} leaves an empty side")
    perm = np.random.default_rng(seed).permutation(n_points)
    return perm[:n_train], perm[n_train:]
