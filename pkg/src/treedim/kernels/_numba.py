"""numba-compiled loop versions of the kernels in ``_numpy``."""
import numpy as np
from numba import njit

from ._numpy import TAKE_TIE_RTOL


@njit(cache=True)
def cover_dp(level, first_child, n_children, level_cost, max_level):
    n = level.shape[0]
    best = np.empty(n, dtype=np.float64)
    take = np.zeros(n, dtype=np.bool_)
    for i in range(n - 1, -1, -1):
        own = level_cost[level[i]]
        if level[i] == max_level:
            best[i] = own
            take[i] = True
            continue
        delegated = 0.0
        c0 = first_child[i]
        for c in range(c0, c0 + n_children[i]):
            delegated += best[c]
        if own <= delegated * (1.0 + TAKE_TIE_RTOL):
            best[i] = own
            take[i] = True
        else:
            best[i] = delegated
    return best, take


@njit(cache=True)
def is_associative(table):
    n = table.shape[0]
    for a in range(n):
        for b in range(n):
            ab = table[a, b]
            for c in range(n):
                if table[ab, c] != table[a, table[b, c]]:
                    return False
    return True


@njit(cache=True)
def is_homomorphism(src_table, dst_table, images):
    n = src_table.shape[0]
    for a in range(n):
        ia = images[a]
        for b in range(n):
            if images[src_table[a, b]] != dst_table[ia, images[b]]:
                return False
    return True


@njit(cache=True)
def _closure(table, gens, identity):
    n = table.shape[0]
    member = np.zeros(n, dtype=np.bool_)
    member[identity] = True
    stack = np.empty(n, dtype=np.int64)
    stack[0] = identity
    top = 1
    while top > 0:
        top -= 1
        x = stack[top]
        for g in gens:
            y = table[x, g]
            if not member[y]:
                member[y] = True
                stack[top] = y
                top += 1
    return member


def subgroup_closure(table, gens, identity):
    return _closure(table, np.asarray(gens, dtype=np.int64), identity)


@njit(cache=True)
def fiber_sizes(images, n_target, src_mask):
    out = np.zeros(n_target, dtype=np.int64)
    for i in range(images.shape[0]):
        if src_mask[i]:
            out[images[i]] += 1
    return out
