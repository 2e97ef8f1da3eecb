"""Finitely branching rooted trees, truncated at a finite depth.

Nodes are tuples of naturals (strings in N*), the root is ``()`` and the
length of a node is its level. A :class:`TreeTruncation` knows its members up
to ``depth`` and caches the exact level sizes ``s_0 .. s_depth`` as Python
ints. Distances and measures are exact :class:`~fractions.Fraction` values;
nothing in this module touches floating point.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

Node = tuple[int, ...]
ROOT: Node = ()

# Hard cap on the number of nodes materialised for one level.
ENUMERATION_LIMIT = 1 << 22


class TreeError(ValueError):
    pass


class TreeValidationError(TreeError):
    pass


class EnumerationLimitError(TreeError):
    pass


class Uniformity(enum.Enum):
    UNIFORM = "uniform"
    NON_UNIFORM = "non-uniform"
    UNKNOWN = "unknown"


PROFILE_KINDS = ("constant", "eventually-periodic", "block-schedule", "explicit")


@dataclass(frozen=True)
class BranchingProfile:
    """Per-level successor counts ``b_0, b_1, ...``.

    ``values`` holds the payload for every kind: the single count for
    ``constant``, the period for ``eventually-periodic``, the cyclic list of
    per-block counts for ``block-schedule`` and the finite count list for
    ``explicit``. A block schedule assigns level ``n`` to block ``k`` when
    ``scale * base**k <= n < scale * base**(k+1)``; levels below ``scale``
    belong to block 0.
    """

    kind: str
    values: tuple[int, ...]
    preperiod: tuple[int, ...] = ()
    base: int = 0
    scale: int = 0

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise TreeValidationError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "preperiod", tuple(int(v) for v in self.preperiod))
        if not self.values:
            raise TreeValidationError("profile needs at least one branching value")
        if min(self.values + self.preperiod) < 1:
            raise TreeValidationError("branching counts must be >= 1")
        if self.kind == "constant" and len(self.values) != 1:
            raise TreeValidationError("constant profile takes exactly one value")
        if self.kind == "block-schedule" and (self.base < 2 or self.scale < 1):
            raise TreeValidationError("block schedule needs base >= 2 and scale >= 1")

    @classmethod
    def constant(cls, b: int) -> BranchingProfile:
        return cls("constant", (b,))

    @classmethod
    def periodic(cls, period: Sequence[int], preperiod: Sequence[int] = ()) -> BranchingProfile:
        return cls("eventually-periodic", tuple(period), tuple(preperiod))

    @classmethod
    def block_schedule(cls, values: Sequence[int], base: int = 4, scale: int = 1) -> BranchingProfile:
        return cls("block-schedule", tuple(values), base=base, scale=scale)

    @classmethod
    def explicit(cls, counts: Sequence[int]) -> BranchingProfile:
        return cls("explicit", tuple(counts))

    def block_index(self, n: int) -> int:
        if n < self.scale:
            return 0
        k, lo = 0, self.scale
        while lo * self.base <= n:
            lo *= self.base
            k += 1
        return k

    def branching(self, n: int) -> int:
        """Number of successors of each node at level ``n``."""
        if n < 0:
            raise TreeError("negative level")
        if self.kind == "constant":
            return self.values[0]
        if self.kind == "eventually-periodic":
            if n < len(self.preperiod):
                return self.preperiod[n]
            return self.values[(n - len(self.preperiod)) % len(self.values)]
        if self.kind == "block-schedule":
            return self.values[self.block_index(n) % len(self.values)]
        if n >= len(self.values):
            raise TreeValidationError(f"explicit profile has no count for level {n}")
        return self.values[n]

    def branchings(self, depth: int) -> list[int]:
        if self.kind == "block-schedule":
            # walk the block boundaries instead of recomputing the index per level
            out, k, lo = [], 0, self.scale
            first = self.values[0]
            out.extend([first] * min(depth, self.scale))
            while len(out) < depth:
                hi = lo * self.base
                out.extend([self.values[k % len(self.values)]] * min(hi - lo, depth - len(out)))
                lo, k = hi, k + 1
            return out
        return [self.branching(n) for n in range(depth)]

    def counts(self, depth: int) -> list[int]:
        out = [1]
        for b in self.branchings(depth):
            out.append(out[-1] * b)
        return out

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "b": self.values[0]}
        if self.kind == "eventually-periodic":
            return {"kind": self.kind, "preperiod": list(self.preperiod), "period": list(self.values)}
        if self.kind == "block-schedule":
            return {"kind": self.kind, "base": self.base, "scale": self.scale, "values": list(self.values)}
        return {"kind": "explicit", "counts": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> BranchingProfile:
        kind = d.get("kind")
        try:
            if kind == "constant":
                return cls.constant(d["b"])
            if kind == "eventually-periodic":
                return cls.periodic(d["period"], d.get("preperiod", ()))
            if kind == "block-schedule":
                return cls.block_schedule(d["values"], d.get("base", 4), d.get("scale", 1))
            if kind == "explicit":
                return cls.explicit(d["counts"])
        except KeyError as exc:
            raise TreeValidationError(f"profile of kind {kind!r} is missing field {exc}") from None
        raise TreeValidationError(f"unknown profile kind {kind!r}")


class TreeTruncation:
    """A leafless subtree of N* known up to level ``depth``.

    Construct through :func:`build_tree` or :func:`tree_from_predicate`
    rather than directly. ``symbol_bounds[j]``, when known, is an upper bound
    (exclusive) on the last symbol of members at level ``j + 1``.
    """

    def __init__(
        self,
        depth: int,
        level_counts: Sequence[int],
        contains: Callable[[Node], bool],
        children: Callable[[Node], tuple[Node, ...]],
        *,
        profile: BranchingProfile | None = None,
        uniform: Uniformity = Uniformity.UNKNOWN,
        symbol_bounds: Sequence[int] | None = None,
        within: TreeTruncation | None = None,
        spec: dict | None = None,
        name: str = "",
    ):
        self.depth = depth
        self.level_counts = tuple(level_counts)
        self._contains = contains
        self._children = children
        self.profile = profile
        self.uniform_flag = uniform
        self.symbol_bounds = None if symbol_bounds is None else tuple(symbol_bounds)
        self.within = within
        self.spec = spec
        self.name = name
        if len(self.level_counts) != depth + 1 or self.level_counts[0] != 1:
            raise TreeValidationError("level counts must cover levels 0..depth and start at 1")

    def __repr__(self):
        label = self.name or (self.profile.kind if self.profile else "tree")
        return f"TreeTruncation({label}, depth={self.depth})"

    @property
    def is_full_product(self) -> bool:
        """True when membership is exactly "symbol at level j < b_j"."""
        return self.profile is not None

    def contains(self, node: Sequence[int]) -> bool:
        node = tuple(node)
        return len(node) <= self.depth and self._contains(node)

    def children(self, node: Sequence[int]) -> tuple[Node, ...]:
        """Member successors of ``node`` in increasing symbol order."""
        node = tuple(node)
        if len(node) >= self.depth:
            return ()
        return self._children(node)

    def iter_level(self, n: int, limit: int = ENUMERATION_LIMIT) -> Iterator[Node]:
        """Members of length ``n`` in lexicographic order."""
        if not 0 <= n <= self.depth:
            raise TreeError(f"level {n} outside 0..{self.depth}")
        if self.level_counts[n] > limit:
            raise EnumerationLimitError(f"level {n} has {self.level_counts[n]} nodes (limit {limit})")
        if self.profile is not None:
            ranges = [range(b) for b in self.profile.branchings(n)]
            yield from itertools.product(*ranges)
            return
        level: list[Node] = [ROOT]
        for _ in range(n):
            level = [c for v in level for c in self.children(v)]
        yield from level

    def iter_nodes(self, up_to: int | None = None, limit: int = ENUMERATION_LIMIT) -> Iterator[Node]:
        """All members of length <= ``up_to``, level by level."""
        up_to = self.depth if up_to is None else up_to
        for n in range(up_to + 1):
            yield from self.iter_level(n, limit)

    @cached_property
    def _uniformity(self) -> UniformityResult:
        if self.uniform_flag is Uniformity.UNIFORM:
            return UniformityResult(True, None)
        for n in range(self.depth):
            first: Node | None = None
            first_count = -1
            for node in self.iter_level(n):
                k = len(self.children(node))
                if first is None:
                    first, first_count = node, k
                elif k != first_count:
                    return UniformityResult(False, (first, node), n)
        return UniformityResult(True, None)


@dataclass(frozen=True)
class UniformityResult:
    uniform: bool
    witness: tuple[Node, Node] | None
    level: int | None = None

    def __bool__(self):
        return self.uniform


class Distance(NamedTuple):
    """Prefix-level distance; ``resolved`` is False when the prefixes agree."""

    value: Fraction
    resolved: bool


def _profile_tree(profile: BranchingProfile, depth: int, ambient: bool, name: str) -> TreeTruncation:
    branchings = profile.branchings(depth)
    if ambient and depth and min(branchings) < 2:
        lvl = branchings.index(min(branchings))
        raise TreeValidationError(f"ambient branching < 2 at level {lvl}")

    def contains(node: Node) -> bool:
        return all(0 <= x < branchings[j] for j, x in enumerate(node))

    def children(node: Node) -> tuple[Node, ...]:
        return tuple(node + (i,) for i in range(branchings[len(node)]))

    spec = {"kind": "profile", "profile": profile.to_dict(), "depth": depth, "ambient": ambient}
    return TreeTruncation(
        depth,
        profile.counts(depth),
        contains,
        children,
        profile=profile,
        uniform=Uniformity.UNIFORM,
        symbol_bounds=branchings,
        spec=spec,
        name=name or f"profile:{profile.kind}",
    )


def _node_list_tree(nodes: Iterable[Sequence[int]], depth: int, ambient: bool, name: str) -> TreeTruncation:
    members = {tuple(int(x) for x in v) for v in nodes}
    members.add(ROOT)
    if any(x < 0 for v in members for x in v):
        raise TreeValidationError("node symbols must be natural numbers")
    if any(len(v) > depth for v in members):
        raise TreeValidationError("node list reaches beyond the claimed depth")
    kids: dict[Node, list[Node]] = {v: [] for v in members}
    for v in members:
        if v and v[:-1] not in members:
            raise TreeValidationError(f"node list is not prefix-closed: {v[:-1]} missing for {v}")
        if v:
            kids[v[:-1]].append(v)
    counts = [0] * (depth + 1)
    for v in members:
        counts[len(v)] += 1
        if len(v) < depth:
            if not kids[v]:
                raise TreeValidationError(f"node {v} is a leaf above the truncation depth")
            if ambient and len(kids[v]) < 2:
                raise TreeValidationError(f"ambient branching < 2 at node {v}")
    frozen = {v: tuple(sorted(c)) for v, c in kids.items()}
    bounds = [0] * depth
    for v in members:
        if v:
            bounds[len(v) - 1] = max(bounds[len(v) - 1], v[-1] + 1)
    spec = {"kind": "nodes", "nodes": sorted(list(v) for v in members), "depth": depth, "ambient": ambient}
    return TreeTruncation(
        depth,
        counts,
        members.__contains__,
        lambda v: frozen.get(v, ()),
        symbol_bounds=bounds,
        spec=spec,
        name=name or "nodes",
    )


def build_tree(
    spec: BranchingProfile | Iterable[Sequence[int]],
    depth: int,
    *,
    ambient: bool = False,
    name: str = "",
) -> TreeTruncation:
    """Build a validated truncation from a branching profile or a node list.

    ``ambient=True`` demands at least two successors everywhere, as required
    of the tree whose path space carries the metric.
    """
    if depth < 1:
        raise TreeValidationError("depth must be >= 1")
    if isinstance(spec, BranchingProfile):
        return _profile_tree(spec, depth, ambient, name)
    return _node_list_tree(spec, depth, ambient, name)


def tree_from_predicate(
    predicate: Callable[[Node], bool],
    depth: int,
    alphabet: int | Callable[[int], int],
    *,
    counter: Callable[[int], int] | None = None,
    ambient: bool = False,
    name: str = "",
    spec: dict | None = None,
) -> TreeTruncation:
    """Tree of all strings accepted by ``predicate``.

    ``alphabet`` bounds the symbols tried at each level (int or level -> int).
    ``counter(n)``, if given, must return the exact level size; it lets deep
    trees skip enumeration. Without it the levels are counted by walking the
    tree, which also checks that no member is a leaf.
    """
    if depth < 1:
        raise TreeValidationError("depth must be >= 1")
    width = alphabet if callable(alphabet) else (lambda _n, a=alphabet: a)

    def contains(node: Node) -> bool:
        return all(0 <= x < width(j) and predicate(node[: j + 1]) for j, x in enumerate(node))

    def children(node: Node) -> tuple[Node, ...]:
        return tuple(node + (c,) for c in range(width(len(node))) if predicate(node + (c,)))

    if counter is not None:
        counts = [counter(n) for n in range(depth + 1)]
    else:
        counts = [1]
        level: list[Node] = [ROOT]
        for n in range(depth):
            nxt = []
            for v in level:
                kids = children(v)
                if not kids:
                    raise TreeValidationError(f"node {v} is a leaf above the truncation depth")
                if ambient and len(kids) < 2:
                    raise TreeValidationError(f"ambient branching < 2 at node {v}")
                nxt.extend(kids)
            if len(nxt) > ENUMERATION_LIMIT:
                raise EnumerationLimitError(f"level {n + 1} exceeds the enumeration limit; supply a counter")
            counts.append(len(nxt))
            level = nxt
    return TreeTruncation(
        depth,
        counts,
        contains,
        children,
        symbol_bounds=[width(j) for j in range(depth)],
        spec=spec,
        name=name or "predicate",
    )


def level_counts(tree: TreeTruncation, up_to: int | None = None) -> list[int]:
    up_to = tree.depth if up_to is None else up_to
    if not 0 <= up_to <= tree.depth:
        raise TreeError(f"level {up_to} outside 0..{tree.depth}")
    return list(tree.level_counts[: up_to + 1])


def distance(tree: TreeTruncation, a: Sequence[int], b: Sequence[int]) -> Distance:
    """``1/t_n`` for the first index ``n`` where ``a`` and ``b`` differ."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise TreeError("distance needs nodes of equal length")
    for v in (a, b):
        if not tree.contains(v):
            raise TreeError(f"{v} is not a member of the tree")
    for n, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return Distance(Fraction(1, tree.level_counts[n]), True)
    return Distance(Fraction(0), False)


def node_measure(tree: TreeTruncation, sigma: Sequence[int]) -> Fraction:
    """Uniform measure of the cylinder ``[sigma]``: product of ``1/k`` down the path."""
    sigma = tuple(sigma)
    if not tree.contains(sigma):
        raise TreeError(f"{sigma} is not a member of the tree")
    if tree.uniform_flag is Uniformity.UNIFORM:
        return Fraction(1, tree.level_counts[len(sigma)])
    m = Fraction(1)
    for j in range(len(sigma)):
        m /= len(tree.children(sigma[:j]))
    return m


def is_levelwise_uniform(tree: TreeTruncation) -> UniformityResult:
    """Whether all members of each level below ``depth`` have equally many successors."""
    return tree._uniformity


def _inside(S: TreeTruncation, T: TreeTruncation) -> bool:
    node = S
    while node is not None:
        if node is T:
            return True
        node = node.within
    return False


def check_subtree(S: TreeTruncation, T: TreeTruncation) -> bool:
    """True iff every member of ``S`` is a member of ``T``."""
    if S.depth > T.depth:
        return False
    if _inside(S, T):
        return True
    if T.is_full_product and S.symbol_bounds is not None:
        tb = T.profile.branchings(S.depth)
        if all(sb <= b for sb, b in zip(S.symbol_bounds, tb)):
            return True
        if S.is_full_product:
            return False
    for n in range(1, S.depth + 1):
        for node in S.iter_level(n):
            if not T.contains(node):
                return False
    return True
