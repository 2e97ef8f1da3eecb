"""Slow, independent reference implementations used as test oracles.

Nothing here imports the code under test beyond plain data access; each
function recomputes its answer from first principles (direct enumeration,
naive recursion, closed-form series) so that agreement means something.
"""
from __future__ import annotations

import itertools
from fractions import Fraction


def enumerate_levels(member, alphabet: int, depth: int) -> list[list[tuple[int, ...]]]:
    """Levels of the tree of strings accepted by ``member`` (breadth first)."""
    levels = [[()]]
    for _ in range(depth):
        levels.append([s + (b,) for s in levels[-1] for b in range(alphabet) if member(s + (b,))])
    return levels


def countable_member(s) -> bool:
    # strings that are zero from position 2k on, k the position of the first 1
    n = len(s)
    k = next((i for i, c in enumerate(s) if c == 1), n)
    return all(s[r] == 0 for r in range(2 * k, n))


def min_cover_cost(levels: list[set], t_counts, r, n: int = 0):
    """Minimal ``sum t_{|v|}^{-r}`` over cuts of the tree given by its level sets.

    Plain recursion over nodes, returning a Fraction for integer ``r`` and a
    float otherwise.
    """
    depth = len(levels) - 1
    r = Fraction(r)
    exact = r.denominator == 1

    def weight(k):
        if exact:
            return Fraction(1, t_counts[k] ** int(r))
        return t_counts[k] ** -float(r)

    def best(v):
        k = len(v)
        take = weight(k) if k >= n else None
        if k == depth:
            return take
        kids = [v + (b,) for b in range(max(t_counts) + 1) if v + (b,) in levels[k + 1]]
        below = sum(best(c) for c in kids)
        return below if take is None else min(take, below)

    return best(())


def brute_force_cover_costs(levels: list[set], t_counts, r, n: int = 0):
    """Same minimum, by listing every antichain that covers the deepest level."""
    depth = len(levels) - 1
    nodes = [v for lvl in levels[n:] for v in lvl]
    leaves = sorted(levels[depth])
    best = None
    for size in range(1, len(nodes) + 1):
        for combo in itertools.combinations(nodes, size):
            if any(a != b and b[: len(a)] == a for a in combo for b in combo):
                continue
            if not all(any(leaf[: len(a)] == a for a in combo) for leaf in leaves):
                continue
            cost = sum(Fraction(1, t_counts[len(a)] ** int(r)) for a in combo)
            best = cost if best is None else min(best, cost)
    return best


def block_profile_counts(values, base: int, scale: int, depth: int) -> list[int]:
    """Level counts of a block schedule, walking every level one by one."""
    counts = [1]
    for level in range(depth):
        k = 0
        while scale * base ** (k + 1) <= level:
            k += 1
        counts.append(counts[-1] * values[k % len(values)])
    return counts


def odd_block_density_limits() -> tuple[Fraction, Fraction]:
    """liminf / limsup of ``|R ∩ [0, n)| / n`` for ``R`` = union of the odd blocks ``[4^k, 4^{k+1})``.

    Hand derivation: the extremes sit at block ends ``n = 4^{K+1}``. For even
    ``K`` the last member block is ``K-1`` and the ratio is
    ``sum_i 3 * 4^{-2-2i} = (3/16) / (1 - 1/16)``; for odd ``K`` it is
    ``sum_i 3 * 4^{-1-2i} = (3/4) / (1 - 1/16)``.
    """
    q = Fraction(1, 16)
    return Fraction(3, 16) / (1 - q), Fraction(3, 4) / (1 - q)


def odd_block_count(n: int) -> int:
    """``|R ∩ [0, n)|`` by direct counting."""
    total = 0
    for i in range(n):
        k = 0
        while 4 ** (k + 1) <= i:
            k += 1
        total += k % 2
    return total


def closure(elements, op, identity):
    """Subgroup generated by ``elements`` under ``op`` (breadth first)."""
    seen = {identity}
    frontier = [identity]
    gens = list(elements)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = op(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def c2_subgroup_orders(gen_vectors, N: int) -> list[int]:
    """``|U_n|`` for ``U`` generated in ``C_2^N`` when ``L_n`` keeps the last ``n`` coordinates."""
    gens = [tuple(v) for v in gen_vectors]
    add = lambda a, b: tuple((x + y) % 2 for x, y in zip(a, b))
    U = closure(gens, add, (0,) * N)
    return [len({u[N - n :] if n else () for u in U}) for n in range(N + 1)]


def perm_group(generators):
    """Elements of a permutation group (tuples), sorted, with its Cayley table."""
    compose = lambda a, b: tuple(a[i] for i in b)
    ident = tuple(range(len(generators[0])))
    elems = sorted(closure(generators, compose, ident))
    index = {e: i for i, e in enumerate(elems)}
    table = [[index[compose(a, b)] for b in elems] for a in elems]
    return elems, table, index[ident]


def quotient(table, normal):
    """Quotient of a Cayley table by a normal subgroup: ``(quotient table, image of each element)``."""
    n = len(table)
    labels = [-1] * n
    reps = []
    for g in range(n):
        if labels[g] < 0:
            for h in normal:
                labels[table[g][h]] = len(reps)
            reps.append(g)
    qtable = [[labels[table[a][b]] for b in reps] for a in reps]
    return qtable, labels
