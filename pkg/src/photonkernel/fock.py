"""Fock-state enumeration, matrix permanents and exact output distributions.

Photon statistics supported: indistinguishable ("quantum", r = 1),
distinguishable ("coherent", r = 0) and the convex mixture for
0 < r < 1.  The mixture P_r = r*P_1 + (1-r)*P_0 is exact for two
photons (it is how a partially delayed photon pair behaves); for n > 2
it is an approximation and documented as such.
"""

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations
from math import comb, factorial

import numpy as np

from ._accel import ryser_permanent

# Negative probabilities larger than this magnitude indicate a bug rather
# than rounding noise and raise instead of being clipped.
_NEG_TOL = 1e-12
_NORM_TOL = 1e-10


def _occ(state) -> tuple:
    """Normalize a FockState or occupation sequence to a plain tuple."""
    if isinstance(state, FockState):
        return state.occupations
    return tuple(int(v) for v in state)


@dataclass(frozen=True)
class FockState:
    """Occupation-number vector |s_1, ..., s_m>."""

    occupations: tuple

    def __post_init__(self):
        occ = tuple(int(v) for v in self.occupations)
        object.__setattr__(self, "occupations", occ)
        if len(occ) < 1 or any(v < 0 for v in occ):
            raise ValueError(f"invalid occupation vector {occ}")
        if sum(occ) < 1:
            raise ValueError("Fock state must contain at least one photon")

    @property
    def modes(self) -> int:
        return len(self.occupations)

    @property
    def n(self) -> int:
        return sum(self.occupations)

    @property
    def norm_factor(self) -> int:
        """Product of occupation factorials; 1 iff collision-free."""
        out = 1
        for v in self.occupations:
            out *= factorial(v)
        return out

    @property
    def is_collision_free(self) -> bool:
        return all(v <= 1 for v in self.occupations)


def enumerate_configurations(m: int, n: int, collision_free_only: bool = False):
    """All n-photon, m-mode occupation vectors in a fixed deterministic order.

    The full space has binom(n+m-1, n) states, the collision-free subset
    binom(m, n); n > m with ``collision_free_only`` yields an empty list.
    States are ordered by their nondecreasing mode-index tuples, which is
    lexicographic and stable across platforms.
    """
    if m < 1 or n < 1:
        raise ValueError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    picker = combinations if collision_free_only else combinations_with_replacement
    states = []
    for modes in picker(range(m), n):
        occ = [0] * m
        for a in modes:
            occ[a] += 1
        states.append(tuple(occ))
    return states


def configuration_count(m: int, n: int, collision_free_only: bool = False) -> int:
    return comb(m, n) if collision_free_only else comb(n + m - 1, n)


def permanent(a: np.ndarray) -> complex:
    """Per(A) for a square matrix, Ryser/Gray-code, exact up to rounding."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise ValueError("permanent needs at least a 1x1 matrix")
    return ryser_permanent(a)


def submatrix(u: np.ndarray, s, t) -> np.ndarray:
    """U_{s,t}: column a of U repeated s_a times, row b repeated t_b times."""
    s = _occ(s)
    t = _occ(t)
    if sum(s) != sum(t):
        raise ValueError(
            f"photon-number mismatch: input has {sum(s)}, output has {sum(t)}"
        )
    rows = [b for b, v in enumerate(t) for _ in range(v)]
    cols = [a for a, v in enumerate(s) for _ in range(v)]
    return np.asarray(u)[np.ix_(rows, cols)]


def norm_factor(state) -> int:
    out = 1
    for v in _occ(state):
        out *= factorial(v)
    return out


def _clean_probability(p: float) -> float:
    if p < 0.0:
        if p < -_NEG_TOL:
            raise ValueError(f"probability {p} below numerical tolerance; likely a bug")
        return 0.0
    return min(p, 1.0) if p <= 1.0 + _NEG_TOL else _raise_above_one(p)


def _raise_above_one(p: float) -> float:
    raise ValueError(f"probability {p} exceeds 1 beyond numerical tolerance")


def transition_probability(u: np.ndarray, s, t, r: float = 1.0) -> float:
    """P(t | s) under degree of indistinguishability ``r``.

    r = 1: |Per U_{s,t}|^2 / (prod s_i! prod t_i!)
    r = 0: Per |U_{s,t}|^2 / (prod s_i! prod t_i!)   (moduli squared first)
    else:  r * P_1 + (1 - r) * P_0, exactly.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"degree of indistinguishability must be in [0, 1], got {r}")
    if r >= 1.0:
        return _quantum_probability(u, s, t)
    if r <= 0.0:
        return _coherent_probability(u, s, t)
    return r * _quantum_probability(u, s, t) + (1.0 - r) * _coherent_probability(u, s, t)


def _quantum_probability(u, s, t) -> float:
    sub = submatrix(u, s, t)
    p = abs(permanent(sub)) ** 2 / (norm_factor(s) * norm_factor(t))
    return _clean_probability(p)


def _coherent_probability(u, s, t) -> float:
    sub = np.abs(submatrix(u, s, t)) ** 2
    p = permanent(sub).real / (norm_factor(s) * norm_factor(t))
    return _clean_probability(p)


@dataclass(frozen=True)
class OutputDistribution:
    """Exact output probabilities over the full n-photon configuration space."""

    entries: dict
    r: float
    modes: int = field(default=0)
    photons: int = field(default=0)

    @property
    def statistics_kind(self) -> str:
        if self.r >= 1.0:
            return "quantum"
        if self.r <= 0.0:
            return "coherent"
        return f"mixed(r={self.r})"

    def probability(self, state) -> float:
        return self.entries.get(_occ(state), 0.0)

    def collision_free_mass(self) -> float:
        return sum(p for occ, p in self.entries.items() if max(occ) <= 1)


def full_distribution(u: np.ndarray, s, r: float = 1.0) -> OutputDistribution:
    """Distribution of all binom(n+m-1, n) outputs for input ``s`` through ``u``."""
    u = np.asarray(u)
    s = _occ(s)
    m = u.shape[0]
    if len(s) != m:
        raise ValueError(f"input state has {len(s)} modes, unitary has {m}")
    n = sum(s)
    entries = {}
    for t in enumerate_configurations(m, n):
        entries[t] = transition_probability(u, s, t, r)
    total = sum(entries.values())
    if abs(total - 1.0) > _NORM_TOL:
        raise ValueError(f"distribution sums to {total}, not 1; unitary input suspect")
    return OutputDistribution(entries=entries, r=r, modes=m, photons=n)
