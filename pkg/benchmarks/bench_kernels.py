"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs under both backends; results are
checked for agreement before timings are printed. The first numba call
includes JIT compilation and is excluded (warm-up).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from treedim.cover_engine import flatten
from treedim.families import example_countable_tree
from treedim.kernels import numba_backend, numpy_backend
from treedim.profinite import as_cayley, c2_tower, cyclic_tower
from treedim.tree_core import BranchingProfile, build_tree


def _cases():
    tree = build_tree(BranchingProfile.periodic((2, 3)), 12)
    flat = flatten(tree, 12)
    costs = 6.0 ** -(0.7 * np.arange(13) / 2)
    yield f"cover_dp ({flat.level.size} nodes)", "cover_dp", (flat.level, flat.first_child, flat.n_children, costs, 12)

    flat = flatten(example_countable_tree(22), 22)
    costs = 2.0 ** -(0.3 * np.arange(23))
    yield f"cover_dp (countable, {flat.level.size})", "cover_dp", (flat.level, flat.first_child, flat.n_children, costs, 22)

    g = as_cayley(c2_tower(8)).levels[-1]
    yield "is_associative (|G|=256)", "is_associative", (g.table,)

    sys_ = as_cayley(cyclic_tower(2, 9))
    src, dst = sys_.levels[-1], sys_.levels[-2]
    yield "is_homomorphism (512->256)", "is_homomorphism", (src.table, dst.table, sys_.maps[-1].images)

    yield "subgroup_closure (|G|=512)", "subgroup_closure", (src.table, np.array([6], dtype=np.int64), 0)

    rng = np.random.default_rng(0)
    images = rng.integers(0, 4096, size=1 << 16)
    mask = rng.random(1 << 16) < 0.5
    yield "fiber_sizes (65536)", "fiber_sizes", (images, 4096, mask)


def _time(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        if a.dtype.kind == "f":
            return np.allclose(a, b, rtol=1e-12, atol=0)
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if numba_backend is None:
        print("numba is not installed; only the numpy path is available")
    print(f"{'kernel':<30} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for label, name, inputs in _cases():
        np_fn = getattr(numpy_backend, name)
        t_np = _time(np_fn, inputs, args.repeat)
        if numba_backend is None:
            print(f"{label:<30} {t_np * 1e3:>11.3f} {'-':>11} {'-':>8}")
            continue
        nb_fn = getattr(numba_backend, name)
        if not _same(np_fn(*inputs), nb_fn(*inputs)):  # also the JIT warm-up
            raise SystemExit(f"{name}: backends disagree")
        t_nb = _time(nb_fn, inputs, args.repeat)
        print(f"{label:<30} {t_np * 1e3:>11.3f} {t_nb * 1e3:>11.3f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
