"""Prefix-free node covers of a path space and their r-costs.

A cover is a finite prefix-free set ``F`` of tree nodes; it covers ``[S]``
when every path of ``S`` passes through some node of ``F``. The r-cost is
``V_r(F) = sum over rho in F of t_{|rho|}^{-r}``, the diameter of ``[rho]``
raised to ``r``.

Three things live here:

* exact / high-precision cost arithmetic (``r_cost``, ``min_level_cost``),
* ``normalize_cover``: the replacement procedure that turns any cover of a
  level-wise uniformly branching tree into a full-level cover of no larger
  cost, recorded step by step,
* ``brute_force_min_cover``: an exhaustive search over the cut lattice used
  as an independent oracle for the two above.
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import mpmath
import numpy as np

from . import kernels
from ._numeric import DEFAULT_PREC, as_exponent, ln, mpf_to_str, to_mpf
from .tree_core import Node, ROOT, TreeTruncation, is_levelwise_uniform

DEFAULT_BUDGET = 1 << 20
COST_RTOL = 1e-9
# comparisons between candidate minimisers run at working precision; values
# closer than this (relative) are treated as ties
_TIE_RTOL = mpmath.mpf(2) ** -90


class CoverError(ValueError):
    pass


class NonUniformTreeError(ValueError):
    pass


class BudgetExceededError(RuntimeError):
    pass


def is_prefix_free(nodes: Iterable[Sequence[int]]) -> bool:
    ordered = sorted({tuple(v) for v in nodes})
    # in lexicographic order a prefix sits right before some extension of it
    for a, b in zip(ordered, ordered[1:]):
        if b[: len(a)] == a:
            return False
    return True


@dataclass(frozen=True)
class Cover:
    nodes: frozenset

    def __post_init__(self):
        nodes = frozenset(tuple(int(x) for x in v) for v in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if not is_prefix_free(nodes):
            raise CoverError("cover is not prefix-free")

    @classmethod
    def of(cls, nodes: Iterable[Sequence[int]]) -> Cover:
        return cls(frozenset(tuple(v) for v in nodes))

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, node):
        return tuple(node) in self.nodes

    @property
    def min_length(self) -> int:
        return min(map(len, self.nodes))

    @property
    def max_length(self) -> int:
        return max(map(len, self.nodes))

    def sorted(self) -> list[Node]:
        return sorted(self.nodes)

    def to_list(self) -> list[list[int]]:
        return [list(v) for v in self.sorted()]


@dataclass(frozen=True)
class CostValue:
    """A positive cost stored as its natural log, plus the exact value when rational."""

    log_value: mpmath.mpf
    exact: Fraction | None = None

    @classmethod
    def from_exact(cls, q: Fraction) -> CostValue:
        q = Fraction(q)
        return cls(ln(q) if q > 0 else mpmath.ninf, q)

    @classmethod
    def from_value(cls, x) -> CostValue:
        return cls(mpmath.log(x) if x > 0 else mpmath.ninf)

    @property
    def value(self):
        if self.exact is not None:
            return to_mpf(self.exact)
        return mpmath.exp(self.log_value)

    def __float__(self):
        return float(self.exact) if self.exact is not None else float(self.value)

    def __str__(self):
        if self.exact is not None:
            return str(self.exact)
        return mpf_to_str(self.value)

    def to_json(self):
        out = {"value": mpf_to_str(self.value)}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


def cost_le(a: CostValue, b: CostValue, rtol: float = COST_RTOL) -> bool:
    """``a <= b``; exact when both are rational, relative tolerance otherwise."""
    if a.exact is not None and b.exact is not None:
        return a.exact <= b.exact
    return a.value <= b.value * (1 + mpmath.mpf(rtol))


def cost_close(a: CostValue, b: CostValue, rtol: float = COST_RTOL) -> bool:
    if a.exact is not None and b.exact is not None:
        return a.exact == b.exact
    x, y = a.value, b.value
    return abs(x - y) <= mpmath.mpf(rtol) * max(abs(x), abs(y))


def _cost_from_counts(by_len: dict[int, int], t_counts: Sequence[int], r: Fraction, prec: int) -> CostValue:
    if r.denominator == 1:
        e = r.numerator
        return CostValue.from_exact(sum((Fraction(c, t_counts[k] ** e) for k, c in by_len.items()), Fraction(0)))
    with mpmath.workprec(prec):
        rr = to_mpf(r)
        terms = [c * mpmath.exp(-rr * ln(t_counts[k])) for k, c in sorted(by_len.items())]
        total = mpmath.fsum(terms)
        return CostValue(mpmath.log(total) if total > 0 else mpmath.ninf)


def r_cost(F: Cover | Iterable[Sequence[int]], T: TreeTruncation, r, prec: int = DEFAULT_PREC) -> CostValue:
    """``sum t_{|rho|}^{-r}`` over the nodes of ``F``; exact for integer ``r``."""
    r = as_exponent(r)
    nodes = F.nodes if isinstance(F, Cover) else [tuple(v) for v in F]
    by_len = Counter(len(v) for v in nodes)
    if by_len and max(by_len) > T.depth:
        raise CoverError("cover node deeper than the ambient truncation")
    return _cost_from_counts(by_len, T.level_counts, r, prec)


def level_cost(S: TreeTruncation, T: TreeTruncation, k: int, r, prec: int = DEFAULT_PREC) -> CostValue:
    """Cost ``s_k t_k^{-r}`` of the full level-``k`` cover of ``S``."""
    r = as_exponent(r)
    if r.denominator == 1:
        return CostValue.from_exact(Fraction(S.level_counts[k], T.level_counts[k] ** r.numerator))
    with mpmath.workprec(prec):
        return CostValue(ln(S.level_counts[k]) - to_mpf(r) * ln(T.level_counts[k]))


def _strictly_less(a: CostValue, b: CostValue) -> bool:
    if a.exact is not None and b.exact is not None:
        return a.exact < b.exact
    return a.log_value < b.log_value - _TIE_RTOL * max(1, abs(b.log_value))


def min_level_cost(
    S: TreeTruncation, T: TreeTruncation, r, n: int = 0, up_to: int | None = None, prec: int = DEFAULT_PREC
) -> tuple[int, CostValue]:
    """Cheapest full-level cover ``argmin_{n <= k <= up_to} s_k t_k^{-r}`` (ties: smallest k)."""
    up_to = S.depth if up_to is None else up_to
    if not 0 <= n <= up_to <= min(S.depth, T.depth):
        raise CoverError(f"level range [{n}, {up_to}] outside the truncation")
    best_k, best = n, level_cost(S, T, n, r, prec)
    with mpmath.workprec(prec):
        for k in range(n + 1, up_to + 1):
            c = level_cost(S, T, k, r, prec)
            if _strictly_less(c, best):
                best_k, best = k, c
    return best_k, best


def covers_space(F: Cover | Iterable[Sequence[int]], S: TreeTruncation, depth: int | None = None) -> bool:
    """True iff every level-``depth`` member of ``S`` extends a node of ``F``."""
    depth = S.depth if depth is None else depth
    nodes = F.nodes if isinstance(F, Cover) else {tuple(v) for v in F}
    if not nodes:
        return False
    stack = [ROOT]
    while stack:
        v = stack.pop()
        if v in nodes:
            continue
        if len(v) >= depth:
            return False
        stack.extend(S.children(v))
    return True


# -- normalisation ---------------------------------------------------------


@dataclass(frozen=True)
class NormalizationStep:
    k: int
    sigma: Node
    case: str
    cost_before: CostValue
    cost_after: CostValue
    cover: Cover

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "sigma": list(self.sigma),
            "case": self.case,
            "cost_before": self.cost_before.to_json(),
            "cost_after": self.cost_after.to_json(),
        }


@dataclass(frozen=True)
class NormalizationTrace:
    r: Fraction
    n: int
    initial_cost: CostValue
    steps: tuple[NormalizationStep, ...]
    final_level: int
    bound: CostValue

    def to_dict(self) -> dict:
        return {
            "r": str(self.r),
            "n": self.n,
            "initial_cost": self.initial_cost.to_json(),
            "steps": [s.to_dict() for s in self.steps],
            "final_level": self.final_level,
            "bound": self.bound.to_json(),
            "bound_holds": cost_le(self.bound, self.initial_cost),
        }

    def to_text(self) -> str:
        lines = [f"r = {self.r}, n = {self.n}, initial cost V_r(F) = {self.initial_cost}"]
        for i, s in enumerate(self.steps, 1):
            sigma = "".join(map(str, s.sigma)) if all(x < 10 for x in s.sigma) else str(list(s.sigma))
            lines.append(
                f"step {i}: k={s.k} sigma={sigma or 'root'} case=({s.case}) "
                f"cost {s.cost_before} -> {s.cost_after} (|F|={len(s.cover)})"
            )
        verdict = "holds" if cost_le(self.bound, self.initial_cost) else "VIOLATED"
        lines.append(f"final level k={self.final_level}: s_k t_k^-r = {self.bound} <= {self.initial_cost} {verdict}")
        return "\n".join(lines)


def _transport(S: TreeTruncation, src: Node, dst: Node, tail: Node) -> Node:
    """Move ``src + tail`` to the matching node above ``dst``.

    Uniform branching makes the subtrees above ``src`` and ``dst`` isomorphic
    via the rank of each child among its siblings. For full-product trees the
    ranks are the symbols themselves and this is plain concatenation.
    """
    if S.is_full_product:
        return dst + tail
    a, b = src, dst
    for x in tail:
        rank = S.children(a).index(a + (x,))
        a = a + (x,)
        b = S.children(b)[rank]
    return b


def normalize_cover(
    F: Cover | Iterable[Sequence[int]],
    S: TreeTruncation,
    T: TreeTruncation,
    r,
    n: int = 0,
    prec: int = DEFAULT_PREC,
) -> NormalizationTrace:
    """Replace ``F`` by covers of no larger r-cost until a full level is reached.

    At each step ``k`` is the least node length in ``F`` and ``v(sigma)`` the
    cost of the part of ``F`` above ``sigma`` in ``S_k``. If the cheapest
    ``sigma`` (ties: lexicographically least) is itself in ``F`` the process
    stops with ``V_r(F) >= s_k t_k^{-r}``; otherwise the part above ``sigma``
    is copied above every node of ``S_k``.
    """
    r = as_exponent(r)
    F = F if isinstance(F, Cover) else Cover.of(F)
    uni = is_levelwise_uniform(S)
    if not uni:
        raise NonUniformTreeError(
            "S is not level-wise uniformly branching "
            f"(witness {list(uni.witness[0])} vs {list(uni.witness[1])} at level {uni.level}); "
            "copying the cheapest sub-cover to the other nodes of a level can leave S"
        )
    if not F.nodes:
        raise CoverError("empty cover")
    if any(not S.contains(v) for v in F.nodes):
        raise CoverError("cover contains nodes outside S")
    if F.min_length < n:
        raise CoverError(f"cover has nodes shorter than n={n}")
    if not covers_space(F, S):
        raise CoverError("F does not cover [S]")

    steps: list[NormalizationStep] = []
    cur = F
    initial = cost = r_cost(cur, T, r, prec)
    with mpmath.workprec(prec):
        while True:
            k = cur.min_length
            groups: dict[Node, list[Node]] = defaultdict(list)
            for rho in cur.sorted():
                groups[rho[:k]].append(rho)
            sigma, v_best = None, None
            for s in sorted(groups):
                v = r_cost(groups[s], T, r, prec)
                if v_best is None or _strictly_less(v, v_best):
                    sigma, v_best = s, v
            if sigma in cur.nodes:
                steps.append(NormalizationStep(k, sigma, "a", cost, cost, cur))
                return NormalizationTrace(r, n, initial, tuple(steps), k, level_cost(S, T, k, r, prec))
            tails = [rho[k:] for rho in groups[sigma]]
            nxt = Cover.of(_transport(S, sigma, eta, tau) for eta in sorted(groups) for tau in tails)
            new_cost = r_cost(nxt, T, r, prec)
            steps.append(NormalizationStep(k, sigma, "b", cost, new_cost, cur))
            cur, cost = nxt, new_cost


# -- exhaustive oracle -----------------------------------------------------


@dataclass(frozen=True)
class FlatTree:
    """Breadth-first array encoding of a truncation, the kernel input format."""

    nodes: list[Node]
    level: np.ndarray
    first_child: np.ndarray
    n_children: np.ndarray


def flatten(S: TreeTruncation, max_depth: int) -> FlatTree:
    nodes: list[Node] = [ROOT]
    first_child, n_children = [], []
    i = 0
    while i < len(nodes):
        v = nodes[i]
        kids = S.children(v) if len(v) < max_depth else ()
        first_child.append(len(nodes))
        n_children.append(len(kids))
        nodes.extend(kids)
        i += 1
    return FlatTree(
        nodes,
        np.fromiter((len(v) for v in nodes), dtype=np.int64, count=len(nodes)),
        np.asarray(first_child, dtype=np.int64),
        np.asarray(n_children, dtype=np.int64),
    )


def brute_force_min_cover(
    S: TreeTruncation,
    T: TreeTruncation,
    r,
    n: int = 0,
    max_depth: int | None = None,
    budget: int = DEFAULT_BUDGET,
    backend=None,
    prec: int = DEFAULT_PREC,
) -> tuple[Cover, CostValue]:
    """Minimal r-cost over all prefix-free covers of ``S`` with node lengths in ``[n, max_depth]``.

    Every such cover is a "cut": at each node either take it or hand the
    job to all of its children. The cost is additive over children, so the
    search memoises one optimum per node; ``budget`` caps the number of
    node subproblems. The result is relative to the truncation: covers may
    not use nodes deeper than ``max_depth``. Among tied covers the first in
    depth-first, take-before-delegate order is returned.
    """
    r = as_exponent(r)
    max_depth = S.depth if max_depth is None else max_depth
    if not 0 <= n <= max_depth <= min(S.depth, T.depth):
        raise CoverError(f"need 0 <= n <= max_depth <= depth, got n={n}, max_depth={max_depth}")
    states = sum(S.level_counts[: max_depth + 1])
    if states > budget:
        raise BudgetExceededError(f"{states} subproblems exceed the enumeration budget {budget}")
    flat = flatten(S, max_depth)
    with mpmath.workprec(prec):
        rr = to_mpf(r)
        costs = [float(mpmath.exp(-rr * ln(T.level_counts[k]))) if k >= n else np.inf for k in range(max_depth + 1)]
    if any(c == 0.0 for c in costs):
        raise BudgetExceededError("level costs underflow double precision; truncation too deep for the oracle")
    impl = backend or kernels.backend
    _, take = impl.cover_dp(flat.level, flat.first_child, flat.n_children, np.asarray(costs), max_depth)
    chosen = []
    stack = [0]
    while stack:
        i = stack.pop()
        if take[i]:
            chosen.append(flat.nodes[i])
        else:
            c0 = flat.first_child[i]
            stack.extend(range(c0, c0 + flat.n_children[i]))
    cover = Cover.of(chosen)
    return cover, r_cost(cover, T, r, prec)


def iter_covers(S: TreeTruncation, n: int = 0, max_depth: int | None = None) -> Iterator[Cover]:
    """Every prefix-free cover with node lengths in ``[n, max_depth]``, explicitly.

    Exponential; meant for cross-checking the oracle on very small trees.
    """
    max_depth = S.depth if max_depth is None else max_depth

    def cuts(v: Node) -> list[tuple[Node, ...]]:
        out = [(v,)] if len(v) >= n else []
        if len(v) < max_depth:
            for combo in itertools.product(*(cuts(c) for c in S.children(v))):
                out.append(tuple(itertools.chain.from_iterable(combo)))
        return out

    for nodes in cuts(ROOT):
        yield Cover.of(nodes)


def count_covers(S: TreeTruncation, n: int = 0, max_depth: int | None = None) -> int:
    max_depth = S.depth if max_depth is None else max_depth

    def count(v: Node) -> int:
        own = 1 if len(v) >= n else 0
        if len(v) >= max_depth:
            return own
        prod = 1
        for c in S.children(v):
            prod *= count(c)
        return own + prod

    return count(ROOT)


def random_cover(
    S: TreeTruncation, n: int, rng: np.random.Generator, p_take: float = 0.4, max_depth: int | None = None
) -> Cover:
    """Random cut of ``S`` with all node lengths in ``[n, max_depth]``."""
    max_depth = S.depth if max_depth is None else max_depth
    out, stack = [], [ROOT]
    while stack:
        v = stack.pop()
        if len(v) >= max_depth or (len(v) >= n and rng.random() < p_take):
            out.append(v)
        else:
            stack.extend(S.children(v))
    return Cover.of(out)
