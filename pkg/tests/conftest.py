"""Shared helpers: independent oracles used across test modules."""

from itertools import permutations

import numpy as np
import pytest


def naive_permanent(a):
    """Permutation-sum definition of the permanent; O(q!) reference."""
    a = np.asarray(a)
    q = a.shape[0]
    total = 0.0 + 0.0j
    for perm in permutations(range(q)):
        term = 1.0 + 0.0j
        for i, j in enumerate(perm):
            term *= a[i, j]
        total += term
    return total


def random_unitary(rng, m):
    """Haar-ish unitary from the QR decomposition of a Ginibre matrix."""
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def two_photon_amplitudes(u, a, b):
    """State-vector oracle: amplitudes of U x U on the symmetrized two-photon
    input with photons in distinct modes a < b, over unordered output pairs.

    Returns a dict keyed by occupation tuple; no permanents involved.
    """
    m = u.shape[0]
    amps = {}
    for c in range(m):
        for d in range(c, m):
            occ = [0] * m
            occ[c] += 1
            occ[d] += 1
            if c == d:
                amp = u[c, a] * u[c, b] * np.sqrt(2.0)
            else:
                amp = u[c, a] * u[d, b] + u[d, a] * u[c, b]
            amps[tuple(occ)] = amp
    return amps


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
