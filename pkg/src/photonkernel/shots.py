"""Finite-shot coincidence counting with post-selection.

Shot noise is modeled as i.i.d. multinomial sampling of the exact output
distribution.  Bunched outcomes are sampled and then discarded, so the
post-selection fraction is itself observable in each record.
"""

from dataclasses import dataclass, field
from math import floor

import numpy as np

from .fock import OutputDistribution, _occ

DEFAULT_RATE_HZ = 10_000.0
DEFAULT_SECONDS = 5.0


@dataclass
class CoincidenceRecord:
    """Post-selected counts for one product unitary."""

    counts: dict
    total_shots: int
    unitary_id: tuple | None = None
    seed: int | None = None

    @property
    def postselected_shots(self) -> int:
        return sum(self.counts.values())

    def to_json_dict(self) -> dict:
        return {
            "counts": {",".join(map(str, occ)): int(c) for occ, c in sorted(self.counts.items())},
            "total_shots": int(self.total_shots),
            "unitary_id": list(self.unitary_id) if self.unitary_id else None,
            "seed": self.seed,
        }


def sample_counts(distribution: OutputDistribution, n_shots: int, seed,
                  unitary_id=None) -> CoincidenceRecord:
    """Draw ``n_shots`` multinomial outcomes and keep the collision-free ones.

    ``seed`` may be an int or a numpy SeedSequence; identical seeds
    reproduce identical counts bit for bit.
    """
    if n_shots <= 0:
        raise ValueError(f"shots must be positive, got {n_shots}")
    outcomes = sorted(distribution.entries)
    probs = np.array([distribution.entries[t] for t in outcomes])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(n_shots, probs)
    counts = {
        occ: int(c)
        for occ, c in zip(outcomes, draws)
        if c > 0 and max(occ) <= 1
    }
    seed_val = seed if isinstance(seed, (int, np.integer)) else None
    return CoincidenceRecord(counts=counts, total_shots=n_shots,
                             unitary_id=unitary_id, seed=seed_val)


def estimate_kernel_entry(record: CoincidenceRecord, psi) -> float:
    """counts[psi] / (all collision-free counts): the sampled unbunching estimator."""
    psi = _occ(psi)
    total = record.postselected_shots
    if total <= 0:
        raise ValueError("no post-selected counts recorded; increase the shot budget")
    return record.counts.get(psi, 0) / total


def _as_prob_map(dist) -> dict:
    if isinstance(dist, OutputDistribution):
        return dict(dist.entries)
    return {(_occ(k) if not isinstance(k, tuple) else k): float(v) for k, v in dist.items()}


def distribution_fidelity(p_theo, p_exp) -> float:
    """Bhattacharyya-type overlap sum_i sqrt(p_i * q_i) in [0, 1].

    Outcomes missing from one side count as probability 0; inputs whose
    totals deviate from 1 by more than 1e-6 are rejected.
    """
    p = _as_prob_map(p_theo)
    q = _as_prob_map(p_exp)
    for name, dist in (("theoretical", p), ("empirical", q)):
        total = sum(dist.values())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"{name} distribution sums to {total}, not 1")
    support = set(p) | set(q)
    return float(sum(np.sqrt(p.get(t, 0.0) * q.get(t, 0.0)) for t in support))


def shot_budget_from_time(rate_hz: float = DEFAULT_RATE_HZ,
                          seconds: float = DEFAULT_SECONDS) -> int:
    """floor(rate * seconds); the default preset is 10 kHz x 5 s = 50,000 shots."""
    if rate_hz <= 0 or seconds <= 0:
        raise ValueError("rate and duration must be positive")
    return floor(rate_hz * seconds)
