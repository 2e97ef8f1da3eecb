"""Vectorised numpy implementations of the hot loops.

These are the reference path; the numba module mirrors every function here
with the same signature and semantics.
"""
import numpy as np

# relative slack under which "take the node" wins a tie against delegating
TAKE_TIE_RTOL = 1e-12


def cover_dp(level, first_child, n_children, level_cost, max_level):
    """Bottom-up minimal cover cost over the cut lattice of a flattened tree.

    Nodes must be in breadth-first order, so each level and each sibling group
    occupies a contiguous index range. ``level_cost[k]`` is the cost of taking
    a node of length ``k`` (``inf`` where taking is forbidden). Nodes at
    ``max_level`` are leaves of the truncation and must be taken.

    Returns ``(best, take)``: the optimal subtree cost per node and whether the
    optimum takes the node itself (ties go to taking).
    """
    n = level.shape[0]
    best = np.empty(n, dtype=np.float64)
    take = np.zeros(n, dtype=np.bool_)
    starts = np.searchsorted(level, np.arange(max_level + 2), side="left")
    for k in range(max_level, -1, -1):
        lo, hi = starts[k], starts[k + 1]
        if lo == hi:
            continue
        own = np.full(hi - lo, level_cost[k])
        if k == max_level:
            best[lo:hi] = own
            take[lo:hi] = True
            continue
        fc = first_child[lo:hi]
        # leafless truncation: every node below max_level has a child, so
        # the sibling ranges tile the next level exactly
        delegated = np.add.reduceat(best[fc[0]:fc[-1] + n_children[hi - 1]], fc - fc[0])
        chosen = own <= delegated * (1.0 + TAKE_TIE_RTOL)
        take[lo:hi] = chosen
        best[lo:hi] = np.where(chosen, own, delegated)
    return best, take


def is_associative(table):
    n = table.shape[0]
    for a in range(n):
        left = table[table[a]]          # (a*b)*c over all b, c
        right = table[a][table]         # a*(b*c)
        if not np.array_equal(left, right):
            return False
    return True


def is_homomorphism(src_table, dst_table, images):
    lhs = images[src_table]
    rhs = dst_table[images[:, None], images[None, :]]
    return bool(np.array_equal(lhs, rhs))


def subgroup_closure(table, gens, identity):
    """Membership mask of the subgroup generated by ``gens``.

    In a finite group the monoid generated by a set is already a group, so
    saturating the identity under right multiplication by generators suffices.
    """
    n = table.shape[0]
    member = np.zeros(n, dtype=np.bool_)
    member[identity] = True
    frontier = np.array([identity], dtype=np.int64)
    gens = np.asarray(gens, dtype=np.int64)
    if gens.size == 0:
        return member
    while frontier.size:
        cand = np.unique(table[frontier][:, gens].ravel())
        cand = cand[~member[cand]]
        member[cand] = True
        frontier = cand
    return member


def fiber_sizes(images, n_target, src_mask):
    """Count, for each target element, the masked sources mapping onto it."""
    return np.bincount(images[src_mask], minlength=n_target).astype(np.int64)
