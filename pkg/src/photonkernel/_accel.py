"""Numeric backends for the hot inner loops.

Two implementations of each kernel are provided: a numba ``@njit`` version
and a pure-numpy/python fallback.  The active backend is chosen at import
time; set ``PHOTONKERNEL_PURE_NUMPY=1`` to force the fallback (used by the
benchmark in ``benchmarks/bench_accel.py`` and by environments where numba
is unavailable).
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("PHOTONKERNEL_PURE_NUMPY", "").lower() in ("1", "true", "yes")

try:
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False


def _ryser_permanent_py(a: np.ndarray) -> complex:
    """Ryser's formula with Gray-code subset iteration, O(2^q * q).

    Per(A) = (-1)^q * sum over non-empty column subsets S of
    (-1)^|S| * prod_i sum_{j in S} a[i, j]; the Gray code updates the row
    sums with one column add/subtract per subset.
    """
    q = a.shape[0]
    row_sums = np.zeros(q, dtype=np.complex128)
    total = 0.0 + 0.0j
    sign = 1.0
    gray = 0
    for k in range(1, 1 << q):
        bit = k & -k
        j = bit.bit_length() - 1
        gray ^= bit
        if gray & bit:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        sign = -sign
        total += sign * np.prod(row_sums)
    if q % 2:
        total = -total
    return complex(total)


def _apply_mzi_columns_py(u, thetas, phis, starts, counts):
    """Left-multiply ``u`` in place by the mesh columns, first column first.

    Each MZI on mode pair (a, a+1) applies
    i*e^{i theta/2} * [[e^{i phi} sin(t/2), cos(t/2)],
                       [e^{i phi} cos(t/2), -sin(t/2)]].
    """
    idx = 0
    for c in range(starts.shape[0]):
        a = starts[c]
        for _ in range(counts[c]):
            th = thetas[idx]
            ph = phis[idx]
            idx += 1
            g = 1j * np.exp(0.5j * th)
            sn = np.sin(0.5 * th)
            cs = np.cos(0.5 * th)
            e = np.exp(1j * ph)
            r0 = g * (e * sn * u[a] + cs * u[a + 1])
            r1 = g * (e * cs * u[a] - sn * u[a + 1])
            u[a] = r0
            u[a + 1] = r1
            a += 2
    return u


if _HAVE_NUMBA:

    @njit(cache=True)
    def _ryser_permanent_nb(a):  # pragma: no cover - exercised via wrapper
        q = a.shape[0]
        row_sums = np.zeros(q, dtype=np.complex128)
        total = 0.0 + 0.0j
        sign = 1.0
        gray = 0
        for k in range(1, 1 << q):
            bit = k & -k
            j = 0
            while not (bit >> j) & 1:
                j += 1
            gray ^= bit
            if gray & bit:
                for i in range(q):
                    row_sums[i] += a[i, j]
            else:
                for i in range(q):
                    row_sums[i] -= a[i, j]
            sign = -sign
            prod = 1.0 + 0.0j
            for i in range(q):
                prod *= row_sums[i]
            total += sign * prod
        if q % 2:
            total = -total
        return total

    @njit(cache=True)
    def _apply_mzi_columns_nb(u, thetas, phis, starts, counts):  # pragma: no cover
        m = u.shape[0]
        idx = 0
        for c in range(starts.shape[0]):
            a = starts[c]
            for _ in range(counts[c]):
                th = thetas[idx]
                ph = phis[idx]
                idx += 1
                g = 1j * np.exp(0.5j * th)
                sn = np.sin(0.5 * th)
                cs = np.cos(0.5 * th)
                e = np.exp(1j * ph)
                for col in range(m):
                    x0 = u[a, col]
                    x1 = u[a + 1, col]
                    u[a, col] = g * (e * sn * x0 + cs * x1)
                    u[a + 1, col] = g * (e * cs * x0 - sn * x1)
                a += 2
        return u

    BACKEND = "numba"
else:
    _ryser_permanent_nb = None
    _apply_mzi_columns_nb = None
    BACKEND = "numpy"


def ryser_permanent(a: np.ndarray) -> complex:
    """Permanent of a square complex matrix via the active backend."""
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.shape[0] == 0:
        return 1.0 + 0.0j
    if BACKEND == "numba":
        return complex(_ryser_permanent_nb(a))
    return _ryser_permanent_py(a)


def apply_mzi_columns(u, thetas, phis, starts, counts):
    """Apply all mesh columns to ``u`` (modified in place and returned)."""
    if BACKEND == "numba":
        return _apply_mzi_columns_nb(u, thetas, phis, starts, counts)
    return _apply_mzi_columns_py(u, thetas, phis, starts, counts)
