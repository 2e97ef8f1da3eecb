"""Inverse systems of finite groups, their trees, and closed subgroups.

An inverse system ``L_0 <- L_1 <- ... <- L_N`` (``p_n : L_{n+1} -> L_n``
onto, ``L_0`` trivial) gives a level-wise uniformly branching tree whose
level ``n`` is ``L_n``: a node of length ``n`` is the sequence of projections
of one element into ``L_1 .. L_n``. Two elements of ``L_N`` are at distance
``1/|L_n|`` when ``n`` is the largest level where their projections agree.

A subgroup generated at ``L_N`` projects to subgroups ``U_n``; they form a
subtree whose level sizes ``|U_n|`` give the subgroup's box, Hausdorff and
packing dimensions.

Groups come in two representations. ``CayleyGroup`` holds an explicit
multiplication table and is limited to ``CAYLEY_LIMIT`` elements.
``AbelianProductGroup`` is ``Z/m_1 x ... x Z/m_d`` with subgroups handled
through integer echelon forms, so levels of size ``2**40`` are fine as long
as nobody asks to enumerate them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from collections import Counter
from fractions import Fraction
from functools import cached_property
from math import prod
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from ._lattice import SubgroupLattice
from .dimension import DimensionReport, ExactLimits, dimension_report
from .families import SetSpec
from .tree_core import (
    EnumerationLimitError,
    Node,
    TreeTruncation,
    TreeValidationError,
    Uniformity,
)

CAYLEY_LIMIT = 1 << 16
# levels larger than this are never materialised as arrays
ENUMERATION_LIMIT = 1 << 16


class GroupError(ValueError):
    pass


class SystemValidationError(GroupError):
    pass


# -- groups ----------------------------------------------------------------


class CayleyGroup:
    kind = "cayley-table"

    def __init__(self, table, identity: int = 0):
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise GroupError("Cayley table must be a non-empty square array")
        n = table.shape[0]
        if n > CAYLEY_LIMIT:
            raise GroupError(f"Cayley tables are limited to {CAYLEY_LIMIT} elements")
        if table.min() < 0 or table.max() >= n:
            raise GroupError("Cayley table entries out of range")
        if not 0 <= identity < n:
            raise GroupError("identity index out of range")
        ar = np.arange(n)
        if not (np.array_equal(table[identity], ar) and np.array_equal(table[:, identity], ar)):
            raise GroupError("identity does not act trivially")
        # with an identity, a table whose rows and columns are permutations
        # has two-sided inverses once associativity holds
        if not (np.all(np.sort(table, axis=1) == ar) and np.all(np.sort(table, axis=0) == ar[:, None])):
            raise GroupError("table is not a Latin square: some element lacks an inverse")
        if not kernels.is_associative(table):
            raise GroupError("operation is not associative")
        self.table = table
        self.table.setflags(write=False)
        self.identity = identity

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def coerce(self, x) -> int:
        x = int(x)
        if not 0 <= x < self.order:
            raise GroupError(f"element {x} not in a group of order {self.order}")
        return x

    def op(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def to_dict(self) -> dict:
        return {"table": self.table.tolist(), "identity": self.identity}


class AbelianProductGroup:
    """``Z/m_1 x ... x Z/m_d``; element indices are mixed-radix, first coordinate most significant.

    Besides indices, elements may be given as dense coordinate sequences or
    as sparse ``{coordinate: value}`` dicts; the latter is what the subgroup
    code works with, since indices of ``C_2^4096`` are unwieldy.
    """

    kind = "abelian-product"
    identity = 0

    def __init__(self, orders: Sequence[int]):
        self.orders = tuple(int(m) for m in orders)
        if any(m < 2 for m in self.orders):
            raise GroupError("cyclic factor orders must be >= 2")
        self.order = prod(m**c for m, c in Counter(self.orders).items())

    @property
    def rank(self) -> int:
        return len(self.orders)

    def encode(self, vec: Sequence[int]) -> int:
        if len(vec) != len(self.orders):
            raise GroupError(f"expected {len(self.orders)} coordinates, got {len(vec)}")
        idx = 0
        for x, m in zip(vec, self.orders):
            idx = idx * m + int(x) % m
        return idx

    def decode(self, idx: int) -> tuple[int, ...]:
        out = []
        for m in reversed(self.orders):
            idx, x = divmod(idx, m)
            out.append(x)
        return tuple(reversed(out))

    def coerce(self, x) -> int:
        return self.encode(self._dense(self.coerce_vec(x)))

    def coerce_vec(self, x) -> dict[int, int]:
        """Any accepted element form as a sparse coordinate dict."""
        if isinstance(x, dict):
            vec = {}
            for k, v in x.items():
                k, v = int(k), int(v)
                if not 0 <= k < self.rank or not 0 <= v < self.orders[k]:
                    raise GroupError(f"{x} is not an element of Z/{self.orders}")
                if v:
                    vec[k] = v
            return vec
        if isinstance(x, (list, tuple)):
            if len(x) != self.rank or any(not 0 <= int(c) < m for c, m in zip(x, self.orders)):
                raise GroupError(f"{x} is not an element of Z/{self.orders}")
            return {i: int(c) for i, c in enumerate(x) if c}
        x = int(x)
        if not 0 <= x < self.order:
            raise GroupError(f"element {x} not in a group of order {self.order}")
        return {i: c for i, c in enumerate(self.decode(x)) if c}

    def _dense(self, vec: dict[int, int]) -> list[int]:
        out = [0] * self.rank
        for k, v in vec.items():
            out[k] = v
        return out

    def op(self, a: int, b: int) -> int:
        return self.encode([x + y for x, y in zip(self.decode(a), self.decode(b))])

    def decode_all(self) -> np.ndarray:
        """All elements as an ``(order, d)`` coordinate array (small groups only)."""
        if self.order > ENUMERATION_LIMIT:
            raise EnumerationLimitError(f"group of order {self.order} is too large to enumerate")
        idx = np.arange(self.order, dtype=np.int64)
        cols = []
        for m in reversed(self.orders):
            idx, x = np.divmod(idx, m)
            cols.append(x)
        return np.stack(cols[::-1], axis=1) if cols else np.zeros((self.order, 0), dtype=np.int64)

    def radix(self) -> np.ndarray:
        r = np.ones(self.rank, dtype=np.int64)
        for i in range(self.rank - 2, -1, -1):
            r[i] = r[i + 1] * self.orders[i + 1]
        return r

    def to_table(self) -> CayleyGroup:
        coords = self.decode_all()
        m = np.asarray(self.orders, dtype=np.int64)
        summed = (coords[:, None, :] + coords[None, :, :]) % np.maximum(m, 1)
        return CayleyGroup(summed @ self.radix(), 0)

    def to_dict(self) -> dict:
        return {"orders": list(self.orders)}


# -- homomorphisms ---------------------------------------------------------


class CayleyMap:
    def __init__(self, images: Sequence[int]):
        self.images = np.asarray(images, dtype=np.int64)
        self.images.setflags(write=False)

    def apply(self, x: int) -> int:
        return int(self.images[x])

    def image_array(self, src, dst) -> np.ndarray:
        return self.images

    def to_list(self):
        return self.images.tolist()


class AbelianMap:
    """Homomorphism given by the images of the standard basis vectors (dense lists or sparse dicts)."""

    def __init__(self, basis_images: Sequence, src: AbelianProductGroup, dst: AbelianProductGroup):
        self.src, self.dst = src, dst
        if len(basis_images) != src.rank:
            raise GroupError("need one image per basis vector of the source")
        images = []
        for img in basis_images:
            if isinstance(img, dict):
                vec = {int(k): int(v) for k, v in img.items() if int(v)}
                if any(not 0 <= k < dst.rank for k in vec):
                    raise GroupError("basis image has a coordinate out of range")
            else:
                if len(img) != dst.rank:
                    raise GroupError("basis image has the wrong number of coordinates")
                vec = {j: int(c) for j, c in enumerate(img) if int(c)}
            images.append(vec)
        self.images = tuple(images)

    def apply_sparse(self, vec: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, x in vec.items():
            for j, c in self.images[i].items():
                out[j] = out.get(j, 0) + x * c
        m = self.dst.orders
        return {j: v % m[j] for j, v in out.items() if v % m[j]}

    def apply_vec(self, vec: Sequence[int]) -> tuple[int, ...]:
        img = self.apply_sparse({i: int(x) for i, x in enumerate(vec) if x})
        return tuple(self.dst._dense(img))

    def apply(self, x: int) -> int:
        return self.dst.encode(self.apply_vec(self.src.decode(x)))

    def matrix(self) -> np.ndarray:
        mat = np.zeros((self.src.rank, self.dst.rank), dtype=np.int64)
        for i, img in enumerate(self.images):
            for j, c in img.items():
                mat[i, j] = c
        return mat

    def image_array(self, src, dst) -> np.ndarray:
        coords = src.decode_all()
        if not dst.rank:
            return np.zeros(src.order, dtype=np.int64)
        img = (coords @ self.matrix()) % np.asarray(dst.orders, dtype=np.int64)
        return img @ dst.radix()

    def to_list(self):
        return [self.dst._dense(img) for img in self.images]


class ProjectionMap(AbelianMap):
    """``Z/m_1 x ... x Z/m_d -> Z/m_{k+1} x ... x Z/m_d``: forget the first ``k`` coordinates."""

    def __init__(self, src: AbelianProductGroup, dst: AbelianProductGroup, drop: int = 1):
        if src.orders[drop:] != dst.orders:
            raise GroupError(f"target orders must be the source orders without the first {drop}")
        self.src, self.dst, self.drop = src, dst, drop

    @property
    def images(self):
        k = self.drop
        return tuple({} if i < k else {i - k: 1} for i in range(self.src.rank))

    def apply_sparse(self, vec: dict[int, int]) -> dict[int, int]:
        k = self.drop
        return {i - k: v for i, v in vec.items() if i >= k}


# -- inverse systems -------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    errors: tuple[str, ...]
    orders: tuple[int, ...]
    scales: tuple[Fraction, ...]

    def __bool__(self):
        return self.valid


class InverseSystem:
    """Finite groups ``L_0 .. L_N`` with maps ``maps[n] : L_{n+1} -> L_n``."""

    def __init__(self, levels: Sequence, maps: Sequence, name: str = "", spec: dict | None = None):
        self.levels = tuple(levels)
        self.maps = tuple(maps)
        self.name = name
        self.spec = spec
        if len(self.maps) != len(self.levels) - 1:
            raise SystemValidationError("need exactly one map between consecutive levels")
        kinds = {g.kind for g in self.levels}
        if len(kinds) != 1:
            raise SystemValidationError("all levels must share one representation")
        self.kind = kinds.pop()
        self._images: dict[int, np.ndarray] = {}
        self._fibers: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._validation: ValidationReport | None = None

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(g.order for g in self.levels)

    def image_array(self, n: int) -> np.ndarray:
        """``p_n`` evaluated on every element of ``L_{n+1}``."""
        if n not in self._images:
            src, dst = self.levels[n + 1], self.levels[n]
            if src.order > ENUMERATION_LIMIT:
                raise EnumerationLimitError(f"|L_{n + 1}| = {src.order} is too large to tabulate")
            self._images[n] = np.asarray(self.maps[n].image_array(src, dst), dtype=np.int64)
        return self._images[n]

    def preimages(self, n: int, x: int) -> np.ndarray:
        """Sorted elements of ``L_{n+1}`` mapped to ``x`` by ``p_n``."""
        if n not in self._fibers:
            img = self.image_array(n)
            order = np.argsort(img, kind="stable")
            bounds = np.searchsorted(img[order], np.arange(self.levels[n].order + 1))
            self._fibers[n] = (order, bounds)
        order, bounds = self._fibers[n]
        return order[bounds[x] : bounds[x + 1]]

    @cached_property
    def is_coordinate_tower(self) -> bool:
        """Every map forgets leading coordinates, so ``L_n`` is a tail of ``L_N``'s coordinates."""
        return self.kind == "abelian-product" and all(isinstance(m, ProjectionMap) for m in self.maps)

    def project_sparse(self, vec: dict[int, int], src_level: int, dst_level: int) -> dict[int, int]:
        if self.is_coordinate_tower:
            k = self.levels[src_level].rank - self.levels[dst_level].rank
            return {i - k: v for i, v in vec.items() if i >= k}
        for n in range(src_level - 1, dst_level - 1, -1):
            vec = self.maps[n].apply_sparse(vec)
        return vec

    def project(self, x: int, src_level: int, dst_level: int) -> int:
        for n in range(src_level - 1, dst_level - 1, -1):
            x = self.maps[n].apply(x)
        return x

    def encode_path(self, x: int, level: int | None = None) -> Node:
        """Tree node of ``x`` in ``L_level``: its projections into ``L_1 .. L_level``."""
        level = self.depth if level is None else level
        out = [0] * level
        for n in range(level, 0, -1):
            out[n - 1] = x
            x = self.maps[n - 1].apply(x)
        return tuple(out)


def validate_system(sys: InverseSystem) -> ValidationReport:
    """Check that each map is an onto homomorphism, ``L_0`` is trivial and orders divide."""
    errors = []
    if sys.levels[0].order != 1:
        errors.append("L_0 must be the trivial group")
    for n, p in enumerate(sys.maps):
        src, dst = sys.levels[n + 1], sys.levels[n]
        if src.order % dst.order:
            errors.append(f"|L_{n}| = {dst.order} does not divide |L_{n + 1}| = {src.order}")
        if sys.kind == "cayley-table":
            img = p.images
            if img.shape != (src.order,) or (img.size and (img.min() < 0 or img.max() >= dst.order)):
                errors.append(f"p_{n}: image table has the wrong shape or range")
                continue
            if not kernels.is_homomorphism(src.table, dst.table, img):
                errors.append(f"p_{n} is not a homomorphism")
            if np.unique(img).size != dst.order:
                errors.append(f"p_{n} is not surjective")
        elif isinstance(p, ProjectionMap):
            continue  # onto homomorphism by construction
        else:
            bad = [
                i
                for i, (m, im) in enumerate(zip(src.orders, p.images))
                if any((m * c) % dst.orders[j] for j, c in im.items())
            ]
            if bad:
                errors.append(f"p_{n} is not a homomorphism: basis vectors {bad[:8]} map to elements of the wrong order")
            if SubgroupLattice(p.images, dst.orders).order != dst.order:
                errors.append(f"p_{n} is not surjective")
    orders = sys.orders
    return ValidationReport(not errors, tuple(errors), orders, tuple(Fraction(1, o) for o in orders))


def _require_valid(sys: InverseSystem) -> None:
    if sys._validation is None:
        sys._validation = validate_system(sys)
    report = sys._validation
    if not report:
        raise SystemValidationError("; ".join(report.errors))


def system_to_tree(sys: InverseSystem) -> TreeTruncation:
    """Tree with level ``n`` equal to ``L_n`` (ambient: every level must branch)."""
    _require_valid(sys)
    orders = sys.orders
    for n in range(sys.depth):
        if orders[n + 1] // orders[n] < 2:
            raise TreeValidationError(f"ambient branching < 2 at level {n} (|L_{n + 1}| = |L_{n}|)")

    def contains(node: Node) -> bool:
        for j, x in enumerate(node):
            if not 0 <= x < orders[j + 1]:
                return False
            if j and sys.maps[j].apply(x) != node[j - 1]:
                return False
        return True

    def children(node: Node) -> tuple[Node, ...]:
        n = len(node)
        x = node[-1] if node else 0
        return tuple(node + (int(y),) for y in sys.preimages(n, x))

    return TreeTruncation(
        sys.depth,
        orders,
        contains,
        children,
        uniform=Uniformity.UNIFORM,
        symbol_bounds=orders[1:],
        name=f"system:{sys.name}" if sys.name else "system",
    )


# -- subgroups -------------------------------------------------------------


@dataclass
class SubgroupChain:
    """Projections ``U_0 .. U_N`` of the subgroup of ``L_N`` generated by ``generators``.

    Abelian levels are echelon lattices built on demand from the projected
    generators (sparse coordinate dicts); Cayley levels are boolean masks.
    ``elements(n)`` materialises a level when it is small.
    """

    system: InverseSystem
    generators: tuple
    orders: tuple[int, ...]
    masks: tuple[np.ndarray, ...] | None = None
    _lattices: dict = field(default_factory=dict, repr=False)
    _elements: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.orders) - 1

    def generators_at(self, n: int) -> list:
        if self.masks is None:
            vecs = (self.system.project_sparse(g, self.depth, n) for g in self.generators)
            return [v for v in vecs if v]
        return [self.system.project(g, self.depth, n) for g in self.generators]

    def lattice(self, n: int) -> SubgroupLattice:
        if n not in self._lattices:
            self._lattices[n] = SubgroupLattice(self.generators_at(n), self.system.levels[n].orders)
        return self._lattices[n]

    def contains(self, n: int, x: int) -> bool:
        if self.masks is not None:
            return bool(self.masks[n][x])
        if n in self._elements:
            return bool(np.isin(x, self._elements[n]))
        return self.system.levels[n].decode(x) in self.lattice(n)

    def elements(self, n: int) -> np.ndarray:
        if n not in self._elements:
            if self.masks is not None:
                self._elements[n] = np.flatnonzero(self.masks[n])
            else:
                self._elements[n] = _abelian_closure(self.system.levels[n], self.generators_at(n))
        return self._elements[n]

    def enumerable(self, n: int) -> bool:
        return self.system.levels[n].order <= ENUMERATION_LIMIT

    def fiber_sizes(self, n: int) -> np.ndarray:
        """For each ``u`` in ``U_n``, how many ``v`` in ``U_{n+1}`` map onto it."""
        src_mask = np.zeros(self.system.levels[n + 1].order, dtype=np.bool_)
        src_mask[self.elements(n + 1)] = True
        sizes = kernels.fiber_sizes(self.system.image_array(n), self.system.levels[n].order, src_mask)
        return sizes[self.elements(n)]

    def verify(self) -> None:
        """Lagrange divisibility, integral growth, and fiber uniformity where enumerable."""
        for n, (u, l) in enumerate(zip(self.orders, self.system.orders)):
            if l % u:
                raise GroupError(f"|U_{n}| = {u} does not divide |L_{n}| = {l}")
        for n in range(self.depth):
            if self.orders[n + 1] % self.orders[n]:
                raise GroupError(f"|U_{n + 1}| / |U_{n}| is not an integer")
            if self.enumerable(n + 1):
                if self.elements(n + 1).size != self.orders[n + 1]:
                    raise GroupError(f"U_{n + 1} has {self.elements(n + 1).size} elements, expected {self.orders[n + 1]}")
                sizes = self.fiber_sizes(n)
                if sizes.size and (sizes.min() != sizes.max() or sizes[0] * self.orders[n] != self.orders[n + 1]):
                    raise GroupError(f"fibers of q_{n} are not uniform")


def _abelian_closure(g: AbelianProductGroup, gens: list[dict[int, int]]) -> np.ndarray:
    """Sorted element indices of the subgroup generated by ``gens`` (small groups)."""
    if g.order > ENUMERATION_LIMIT:
        raise EnumerationLimitError(f"group of order {g.order} is too large to enumerate")
    m = np.asarray(g.orders, dtype=np.int64)
    radix = g.radix()
    coords = np.zeros((1, g.rank), dtype=np.int64)
    for gen in gens:
        step = np.asarray(g._dense(gen), dtype=np.int64)
        members = set((coords @ radix).tolist())
        cosets = [coords]
        shift = step.copy()
        # S + <g> is the union of S + k*g until k*g falls back into S
        while int(shift @ radix) not in members:
            cosets.append((coords + shift) % m)
            shift = (shift + step) % m
        coords = np.concatenate(cosets)
    return np.sort(coords @ radix) if g.rank else np.zeros(1, dtype=np.int64)


def _coerce_generators(sys: InverseSystem, generators: Iterable) -> list:
    top = sys.levels[-1]
    out = []
    for g in generators:
        try:
            out.append(top.coerce_vec(g) if sys.kind == "abelian-product" else top.coerce(g))
        except (GroupError, TypeError, ValueError) as exc:
            raise GroupError(f"generator {g!r} is not an element of L_{sys.depth}: {exc}") from None
    return out


def subgroup_projections(sys: InverseSystem, generators: Iterable) -> SubgroupChain:
    """Subgroup generated by ``generators`` in ``L_N`` and its projections.

    Each ``L_n`` is finite, so the projection of the closed subgroup generated
    by compatible lifts equals the subgroup generated by the projected
    generators; the chain is built from that identity, level by level.
    """
    _require_valid(sys)
    gens = _coerce_generators(sys, generators)
    N = sys.depth
    if sys.is_coordinate_tower:
        chain = SubgroupChain(sys, tuple(gens), _coordinate_tower_orders(sys, gens))
    elif sys.kind == "abelian-product":
        orders = [0] * (N + 1)
        cur = gens
        for n in range(N, -1, -1):
            if n < N:
                cur = [v for v in (sys.maps[n].apply_sparse(g) for g in cur) if v]
            orders[n] = SubgroupLattice(cur, sys.levels[n].orders).order
        chain = SubgroupChain(sys, tuple(gens), tuple(orders))
    else:
        masks = [None] * (N + 1)
        top = sys.levels[N]
        masks[N] = kernels.subgroup_closure(top.table, np.asarray(gens, dtype=np.int64), top.identity)
        for n in range(N - 1, -1, -1):
            m = np.zeros(sys.levels[n].order, dtype=np.bool_)
            m[sys.maps[n].images[masks[n + 1]]] = True
            masks[n] = m
        chain = SubgroupChain(sys, tuple(gens), tuple(int(m.sum()) for m in masks), masks=tuple(masks))
    chain.verify()
    return chain


def _coordinate_tower_orders(sys: InverseSystem, gens: list[dict[int, int]]) -> tuple[int, ...]:
    """All ``|U_n|`` from one echelon form of ``U_N``.

    Coordinates are eliminated last-first, so the rows pivoting on the
    coordinates forgotten below level ``n`` span ``U_N`` intersected with the
    kernel of the projection; ``|U_n|`` is the product of the remaining
    pivot factors.
    """
    top = sys.levels[-1]
    d = top.rank
    lat = SubgroupLattice(({d - 1 - i: v for i, v in g.items()} for g in gens), top.orders[::-1])
    factor = [1] * d
    for c, row in lat.rows.items():
        factor[c] = lat.moduli[c] // row[c]
    prefix = [1]
    for f in factor:
        prefix.append(prefix[-1] * f)
    return tuple(prefix[g.rank] for g in sys.levels)


def _check_chain(sys: InverseSystem, chain: SubgroupChain) -> None:
    if chain.system is not sys or chain.depth != sys.depth:
        raise GroupError("subgroup chain belongs to a different system")
    if chain.masks is None:
        # abelian chains are derived from their generators; their orders must obey Lagrange
        chain.verify()
        return
    for n in range(sys.depth):
        image = np.zeros_like(chain.masks[n])
        image[sys.maps[n].images[chain.masks[n + 1]]] = True
        if not np.array_equal(image, chain.masks[n]):
            raise GroupError(f"q_{n} does not map U_{n + 1} onto U_{n}")


def subgroup_to_subtree(sys: InverseSystem, chain: SubgroupChain, T: TreeTruncation | None = None) -> TreeTruncation:
    """Subtree of the system tree whose level ``n`` is ``U_n``."""
    _check_chain(sys, chain)
    T = system_to_tree(sys) if T is None else T

    def contains(node: Node) -> bool:
        return T.contains(node) and all(chain.contains(j + 1, x) for j, x in enumerate(node))

    def children(node: Node) -> tuple[Node, ...]:
        n = len(node)
        return tuple(c for c in T.children(node) if chain.contains(n + 1, c[-1]))

    return TreeTruncation(
        sys.depth,
        chain.orders,
        contains,
        children,
        uniform=Uniformity.UNIFORM,
        within=T,
        name="subgroup",
    )


def group_dimension_report(
    sys: InverseSystem,
    generators: Iterable,
    tail_fraction=0.5,
    prec: int = 128,
    exact_limits: ExactLimits | None = None,
    label: str = "",
) -> DimensionReport:
    """Dimensions of the closed subgroup generated by ``generators``.

    Group trees are always level-wise uniformly branching, so the report
    certifies ``dim_H = lower box`` and ``dim_P = upper box``.
    """
    chain = subgroup_projections(sys, generators)
    T = system_to_tree(sys)
    S = subgroup_to_subtree(sys, chain, T)
    return dimension_report(
        S, T, tail_fraction, prec, exact_limits, label or f"subgroup of {sys.name or 'system'}", ("|U_n|", "|L_n|")
    )


# -- standard towers -------------------------------------------------------


def c2_tower(depth: int) -> InverseSystem:
    """``L_n = C_2^n`` under coordinatewise addition; ``p_n`` drops the first coordinate."""
    levels = [AbelianProductGroup((2,) * n) for n in range(depth + 1)]
    maps = [ProjectionMap(levels[n + 1], levels[n]) for n in range(depth)]
    return InverseSystem(levels, maps, name=f"c2-tower({depth})", spec={"kind": "c2-tower", "depth": depth})


def cyclic_tower(p: int, depth: int) -> InverseSystem:
    """``L_n = Z/p^n`` with reduction maps."""
    levels = [AbelianProductGroup(())] + [AbelianProductGroup((p**n,)) for n in range(1, depth + 1)]
    maps = [AbelianMap([[]], levels[1], levels[0])] if depth else []
    maps += [AbelianMap([[1]], levels[n + 1], levels[n]) for n in range(1, depth)]
    return InverseSystem(
        levels, maps, name=f"cyclic-tower({p},{depth})", spec={"kind": "cyclic-tower", "p": p, "depth": depth}
    )


def as_cayley(sys: InverseSystem) -> InverseSystem:
    """Same system with every level tabulated (small abelian systems only)."""
    if sys.kind == "cayley-table":
        return sys
    levels = [g.to_table() for g in sys.levels]
    maps = [CayleyMap(sys.image_array(n)) for n in range(sys.depth)]
    return InverseSystem(levels, maps, name=sys.name)


@dataclass(frozen=True)
class DensitySubgroup:
    generators: tuple[dict[int, int], ...]
    lower: Fraction
    upper: Fraction
    derivation: str

    def exact_limits(self) -> ExactLimits:
        from ._numeric import to_mpf

        return ExactLimits(to_mpf(self.lower), to_mpf(self.upper), (self.lower, self.upper), self.derivation)


def density_subgroup_spec(R: SetSpec, N: int) -> DensitySubgroup:
    """Generators in ``C_2^N`` for the subgroup of sequences vanishing off ``R``.

    Position ``i`` of a sequence survives projection to ``L_n`` exactly when
    ``i < n``; with ``p_n`` dropping the first coordinate that position is
    coordinate ``N - 1 - i`` of ``L_N``. Hence ``|U_n| = 2^{|R ∩ [0, n)|}``
    and the box dimensions are the lower and upper densities of ``R``.
    """
    gens = tuple({N - 1 - i: 1} for i, b in enumerate(R.indicator(N)) if b)
    lo, hi, how = R.densities()
    return DensitySubgroup(gens, lo, hi, how)
