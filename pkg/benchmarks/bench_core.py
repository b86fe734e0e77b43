"""Compiled core vs numpy fallback on the hot kernels.

Run with ``python benchmarks/bench_core.py [--n 604] [--repeat 5]``.
"""
import argparse
import math
import timeit

import numpy as np

from virtsrc import _backend, _purepy
from virtsrc.geometry import build_mesh, flower
from virtsrc.linalg import CyclicTridiagonal


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=604, help="boundary nodes")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if not _backend.HAVE_COMPILED:
        raise SystemExit("compiled core not available; build with `pip install -e . --no-build-isolation`")
    core = _backend.core

    k = 4 * math.pi * args.n / 151
    mesh = build_mesh(flower(), k, 12, 2 * math.pi / k / 12, n=args.n)
    pts, src, nrm = (np.ascontiguousarray(a) for a in (mesh.nodes, mesh.sources, mesh.normals))
    x = np.ascontiguousarray(np.linspace(1e-3, 60.0, args.n * args.n))

    rng = np.random.default_rng(0)
    diag = 4 + rng.random(args.n) + 1j * rng.random(args.n)
    off = rng.random(args.n - 1) + 0j
    rhs = rng.random((args.n, 8)) + 1j * rng.random((args.n, 8))
    fast = CyclicTridiagonal(diag, off, off, (0.5, 0.5))
    slow = CyclicTridiagonal(diag, off, off, (0.5, 0.5), pure=True)

    cases = [
        (f"hankel01 ({x.size} args)", lambda: core.hankel01(x), lambda: _purepy.hankel01(x)),
        (f"kernel_matrices ({args.n}x{args.n})", lambda: core.kernel_matrices(pts, src, nrm, k),
         lambda: _purepy.kernel_matrices(pts, src, nrm, k)),
        (f"cyclic solve (N={args.n}, 8 rhs)", lambda: fast.solve(rhs), lambda: slow.solve(rhs)),
    ]
    print(f"{'case':<36}{'compiled [s]':>14}{'numpy [s]':>12}{'speedup':>10}")
    for name, compiled, pure in cases:
        tc, tp = _best(compiled, args.repeat), _best(pure, args.repeat)
        print(f"{name:<36}{tc:>14.4f}{tp:>12.4f}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
