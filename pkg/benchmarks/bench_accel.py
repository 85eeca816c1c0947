"""Benchmark the numba backend against the pure-numpy fallback.

Times the two hot kernels (Ryser permanent, MZI column application) and an
end-to-end quantum Gram matrix.  Run with::

    python3 benchmarks/bench_accel.py

The numba rows are skipped when numba is not importable or the
PHOTONKERNEL_PURE_NUMPY flag is set.
"""

import time

import numpy as np

from photonkernel import _accel
from photonkernel.kernels import gram_matrix
from photonkernel.mesh import MeshConfig


def _time(fn, *args, repeat=5, inner=1):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_permanent(rng):
    print("Ryser permanent (1000 matrices per call)")
    print(f"{'q':>3} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for q in (2, 4, 6, 8):
        mats = rng.normal(size=(1000, q, q)) + 1j * rng.normal(size=(1000, q, q))

        def run_py():
            for m in mats:
                _accel._ryser_permanent_py(m)

        t_py = _time(run_py, repeat=3)
        if _accel.BACKEND == "numba":
            def run_nb():
                for m in mats:
                    _accel._ryser_permanent_nb(m)

            run_nb()  # compile outside the timed region
            t_nb = _time(run_nb, repeat=3)
            print(f"{q:>3} {t_py * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms {t_py / t_nb:>8.1f}x")
        else:
            print(f"{q:>3} {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>9}")


def bench_mesh(rng):
    print("\nMZI mesh unitary (1000 builds per call, m = k = 6)")
    cfg = MeshConfig(6, 6)
    starts, counts = cfg.column_starts(), cfg.column_counts()
    phases = rng.uniform(0, 2 * np.pi, size=(1000, cfg.data_dim))

    def run(impl):
        for p in phases:
            u = np.eye(6, dtype=np.complex128)
            impl(u, np.ascontiguousarray(p[0::2]), np.ascontiguousarray(p[1::2]),
                 starts, counts)

    t_py = _time(run, _accel._apply_mzi_columns_py, repeat=3)
    if _accel.BACKEND == "numba":
        run(_accel._apply_mzi_columns_nb)
        t_nb = _time(run, _accel._apply_mzi_columns_nb, repeat=3)
        print(f"numpy {t_py * 1e3:8.2f}ms   numba {t_nb * 1e3:8.2f}ms   "
              f"speedup {t_py / t_nb:.1f}x")
    else:
        print(f"numpy {t_py * 1e3:8.2f}ms   (numba unavailable)")


def bench_gram(rng):
    print("\nEnd-to-end quantum Gram, N = 20, m = k = 6 "
          f"(active backend: {_accel.BACKEND})")
    cfg = MeshConfig(6, 6)
    pts = rng.uniform(0, 1, size=(20, cfg.data_dim))

    def run():
        gram_matrix(pts, "quantum", cfg=cfg, psi=(0, 0, 1, 1, 0, 0))

    t = _time(run, repeat=3)
    print(f"{t * 1e3:.1f}ms per 20x20 Gram (190 kernel entries)")


def main():
    rng = np.random.default_rng(0)
    print(f"active backend: {_accel.BACKEND}\n")
    bench_permanent(rng)
    bench_mesh(rng)
    bench_gram(rng)
    if _accel.BACKEND == "numba":
        print("\nrerun with PHOTONKERNEL_PURE_NUMPY=1 to time the full "
              "pipeline on the fallback backend")


if __name__ == "__main__":
    main()
