"""Rectangular Mach-Zehnder interferometer mesh.

A mesh of ``m`` modes and ``k`` columns carries alternating columns of
floor(m/2) and floor((m-1)/2) MZIs.  Each MZI has two free phases
(internal theta, external phi), so a mesh encodes a data vector of
dimension d = 2 * (total MZI count); for m = k = 6 that is 15 MZIs and
d = 30.

Conventions (fixed for reproducibility):
  * MZI transfer matrix on its mode pair:
    T(theta, phi) = i e^{i theta/2} [[e^{i phi} sin(theta/2),  cos(theta/2)],
                                     [e^{i phi} cos(theta/2), -sin(theta/2)]]
  * Columns are applied left to right, U = C_k ... C_1; odd columns
    (first, third, ...) start at mode pair (0, 1), even ones at (1, 2).
  * The data vector is flattened column by column, [theta, phi] per MZI.
  * No separate output-phase layer: exactly 2 phases per MZI.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class MeshConfig:
    """Mesh topology: ``modes`` (m >= 2) and ``columns`` (k >= 1, default m)."""

    modes: int
    columns: int = 0

    def __post_init__(self):
        if self.columns == 0:
            object.__setattr__(self, "columns", self.modes)
        if self.modes < 2:
            raise ValueError(f"mesh needs at least 2 modes, got {self.modes}")
        if self.columns < 1:
            raise ValueError(f"mesh needs at least 1 column, got {self.columns}")

    def column_starts(self) -> np.ndarray:
        """Starting mode of each column (0 for odd columns, 1 for even)."""
        return np.array([c % 2 for c in range(self.columns)], dtype=np.int64)

    def column_counts(self) -> np.ndarray:
        """Number of MZIs in each column."""
        return np.array(
            [(self.modes - c % 2) // 2 for c in range(self.columns)], dtype=np.int64
        )

    @property
    def mzi_count(self) -> int:
        return int(self.column_counts().sum())

    @property
    def data_dim(self) -> int:
        """Dimension d of the data vectors this mesh encodes (2 per MZI)."""
        return 2 * self.mzi_count


def encode_phases(cfg: MeshConfig, x) -> np.ndarray:
    """Map a data point in [0,1]^d to phases theta = 2*pi*x, reduced to [0, 2*pi).

    Out-of-range components are rejected rather than wrapped: the datasets
    are defined on the unit hypercube.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != cfg.data_dim:
        raise ValueError(
            f"data point has {x.size} components, mesh expects d={cfg.data_dim}"
        )
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("data components must lie in [0, 1]")
    return np.mod(TWO_PI * x, TWO_PI)


def build_unitary(cfg: MeshConfig, phases) -> np.ndarray:
    """Unitary of the mesh at the given phase settings.

    ``phases`` is the length-2M radian vector, [theta, phi] per MZI in
    column order.
    """
    phases = np.asarray(phases, dtype=np.float64)
    if phases.ndim != 1 or phases.shape[0] != cfg.data_dim:
        raise ValueError(
            f"phase vector has {phases.size} entries, mesh expects {cfg.data_dim}"
        )
    thetas = np.ascontiguousarray(phases[0::2])
    phis = np.ascontiguousarray(phases[1::2])
    u = np.eye(cfg.modes, dtype=np.complex128)
    return _accel.apply_mzi_columns(u, thetas, phis, cfg.column_starts(), cfg.column_counts())


def unitary_from_point(cfg: MeshConfig, x) -> np.ndarray:
    """U(x): the mesh unitary at phases 2*pi*x."""
    return build_unitary(cfg, encode_phases(cfg, x))


def product_unitary(cfg: MeshConfig, x_i, x_j) -> np.ndarray:
    """U(x_i)^dag U(x_j), the single-circuit unitary used for kernel entries."""
    u_i = unitary_from_point(cfg, x_i)
    u_j = unitary_from_point(cfg, x_j)
    return u_i.conj().T @ u_j
