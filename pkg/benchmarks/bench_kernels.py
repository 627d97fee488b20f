"""Benchmark: compiled kernels vs the pure-Python twins.

Micro-benchmarks exercise the three kernels on representative workloads
(exact barycentric matvecs, pairwise squared-distance scans over
subdivision cells, winding crossings of a long polygon), and one
end-to-end subdivision workload runs through the public API under both
backends via a subprocess with ``ASCOLIM_PURE=1``.

Run:  python benchmarks/bench_kernels.py
"""

import os
import random
import subprocess
import sys
import time

from ascolim._kernels import KERNEL_BACKEND, pure

try:
    from ascolim._kernels import _core
except ImportError:
    _core = None


def _time(fn, reps=1):
    best = None
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        dt = (time.perf_counter() - t0) / reps
        best = dt if best is None else min(best, dt)
    return best


def bench_matvec(rng):
    # shapes and magnitudes of barycentric-converter applications
    cases = []
    for _ in range(400):
        rows = rng.randint(2, 5)
        cols = rows
        mat = tuple(tuple(rng.randint(-10 ** 6, 10 ** 6)
                          for _ in range(cols)) for _ in range(rows))
        vec = tuple(rng.randint(-10 ** 6, 10 ** 6) for _ in range(cols))
        cases.append((mat, 720, vec, 360))

    def run(impl):
        for mat, md, vec, vd in cases:
            impl.matvec_q(mat, md, vec, vd)

    return ("matvec_q (400 barycentric-style solves)",
            _time(lambda: run(pure), 5),
            _time(lambda: run(_core), 5) if _core else None)


def bench_sqdist(rng):
    clouds = []
    for _ in range(200):
        n = rng.randint(5, 20)
        dim = 6
        clouds.append([tuple(rng.randint(-10 ** 5, 10 ** 5)
                             for _ in range(dim)) for _ in range(n)])

    def run(impl):
        for pts in clouds:
            impl.max_pairwise_sqdist_q(pts)

    return ("max_pairwise_sqdist_q (200 vertex clouds)",
            _time(lambda: run(pure), 5),
            _time(lambda: run(_core), 5) if _core else None)


def bench_winding(rng):
    n = 100_000
    xs = [rng.randint(-1000, 1000) or 1 for _ in range(n)]
    ys = [rng.randint(-1000, 1000) or 1 for _ in range(n)]

    def run(impl):
        try:
            impl.winding_crossings_q(xs, ys, 1009, 7)
        except ValueError:
            pass

    return ("winding_crossings_q (100k-vertex polygon)",
            _time(lambda: run(pure), 3),
            _time(lambda: run(_core), 3) if _core else None)


def bench_end_to_end():
    code = (
        "import random, time;"
        "from fractions import Fraction as F;"
        "from ascolim.geometry import Simplex;"
        "from ascolim.simplicial import SimplicialComplex, "
        "barycentric_subdivide, max_diameter_sq;"
        "from ascolim.errors import InputError;"
        "rng = random.Random(0);"
        "t0 = time.perf_counter()\n"
        "for _ in range(60):\n"
        "    while True:\n"
        "        pts = [tuple(F(rng.randint(-16, 16), 4) for _ in range(6))"
        " for _ in range(5)]\n"
        "        try:\n"
        "            sx = Simplex(pts); break\n"
        "        except InputError:\n"
        "            continue\n"
        "    max_diameter_sq(barycentric_subdivide("
        "SimplicialComplex([sx])))\n"
        "print(time.perf_counter() - t0)"
    )
    out = []
    for env_extra in ({}, {"ASCOLIM_PURE": "1"}):
        env = dict(os.environ, **env_extra)
        res = subprocess.run([sys.executable, "-c", code], env=env,
                             capture_output=True, text=True, check=True)
        out.append(float(res.stdout.strip().splitlines()[-1]))
    return ("end-to-end: 60 rank-5 subdivisions + exact diameters",
            out[1], out[0])


def main():
    print(f"active backend at import: {KERNEL_BACKEND}")
    if _core is None:
        print("compiled extension not available; micro-benchmarks run "
              "pure only")
    rng = random.Random(42)
    rows = [bench_matvec(rng), bench_sqdist(rng), bench_winding(rng),
            bench_end_to_end()]
    width = max(len(r[0]) for r in rows) + 2
    print(f"\n{'workload':<{width}}{'pure':>10}{'compiled':>10}"
          f"{'speedup':>9}")
    for name, t_pure, t_comp in rows:
        if t_comp is None:
            print(f"{name:<{width}}{t_pure * 1e3:>8.2f}ms{'n/a':>10}")
        else:
            print(f"{name:<{width}}{t_pure * 1e3:>8.2f}ms"
                  f"{t_comp * 1e3:>8.2f}ms{t_pure / t_comp:>8.1f}x")


if __name__ == "__main__":
    main()
