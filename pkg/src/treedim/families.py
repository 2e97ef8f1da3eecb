"""Named example trees and subsets of N used as fixtures and CLI families."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .tree_core import (
    BranchingProfile,
    Node,
    TreeTruncation,
    TreeValidationError,
    build_tree,
    tree_from_predicate,
)

# block k = [4^k, 4^{k+1}): one successor on even k, two on odd k
ALTERNATING_BLOCKS = BranchingProfile.block_schedule((1, 2), base=4, scale=1)


@dataclass(frozen=True)
class SetSpec:
    """A decidable set ``R`` of naturals with computable lower/upper density.

    ``eventually-periodic``: ``bits`` is the period of the indicator after
    ``preperiod``. ``geometric-block``: ``bits[k % len(bits)]`` says whether
    block ``k = [scale*base^k, scale*base^{k+1})`` lies in ``R``; naturals
    below ``scale`` follow block 0.
    """

    kind: str
    bits: tuple[int, ...]
    preperiod: tuple[int, ...] = ()
    base: int = 4
    scale: int = 1

    def __post_init__(self):
        if self.kind not in ("eventually-periodic", "geometric-block"):
            raise ValueError(f"unknown set kind {self.kind!r}")
        if not self.bits or any(b not in (0, 1) for b in self.bits + self.preperiod):
            raise ValueError("set indicator bits must be 0/1 and non-empty")

    @classmethod
    def periodic(cls, bits, preperiod=()) -> SetSpec:
        return cls("eventually-periodic", tuple(bits), tuple(preperiod))

    @classmethod
    def geometric(cls, bits, base: int = 4, scale: int = 1) -> SetSpec:
        return cls("geometric-block", tuple(bits), base=base, scale=scale)

    def as_profile(self) -> BranchingProfile:
        """Branching 2 on members of ``R``, 1 elsewhere."""
        vals = tuple(1 + b for b in self.bits)
        if self.kind == "eventually-periodic":
            return BranchingProfile.periodic(vals, tuple(1 + b for b in self.preperiod))
        return BranchingProfile.block_schedule(vals, self.base, self.scale)

    def contains(self, i: int) -> bool:
        return self.as_profile().branching(i) == 2

    def indicator(self, n: int) -> list[int]:
        return [b - 1 for b in self.as_profile().branchings(n)]

    def densities(self) -> tuple[Fraction, Fraction, str]:
        """Exact lower and upper density of ``R`` with a derivation note."""
        from .dimension import exact_box_limits

        lim = exact_box_limits(self.as_profile(), BranchingProfile.constant(2))
        return lim.exact[0], lim.exact[1], lim.derivation

    def to_dict(self) -> dict:
        if self.kind == "eventually-periodic":
            return {"kind": self.kind, "preperiod": list(self.preperiod), "bits": list(self.bits)}
        return {"kind": self.kind, "base": self.base, "scale": self.scale, "bits": list(self.bits)}

    @classmethod
    def parse(cls, text: str) -> SetSpec:
        """``periodic:1,0,0`` or ``geometric:BASE:SCALE:0,1``."""
        kind, _, rest = text.partition(":")
        try:
            if kind == "periodic":
                return cls.periodic([int(x) for x in rest.split(",")])
            if kind == "geometric":
                base, scale, bits = rest.split(":")
                return cls.geometric([int(x) for x in bits.split(",")], int(base), int(scale))
        except ValueError as exc:
            raise ValueError(f"bad set spec {text!r}: {exc}") from None
        raise ValueError(f"bad set spec {text!r}")


ODD_BLOCKS = SetSpec.geometric((0, 1), base=4, scale=1)


def full_binary(depth: int) -> TreeTruncation:
    return build_tree(BranchingProfile.constant(2), depth, ambient=True, name="full-binary")


def example_alternating_blocks(depth: int) -> TreeTruncation:
    """Subtree of the full binary tree branching only on odd blocks ``[4^k, 4^{k+1})``."""
    if depth < 4:
        raise TreeValidationError("alternating-blocks needs depth >= 4")
    return build_tree(ALTERNATING_BLOCKS, depth, name="alternating-blocks")


def countable_member(sigma: Node) -> bool:
    n = len(sigma)
    k = next((i for i, x in enumerate(sigma) if x == 1), n)
    return all(sigma[r] == 0 for r in range(2 * k, n))


def countable_level_count(n: int) -> int:
    # a member of length n is 0^n, or 0^k 1 (k >= 1) followed by
    # min(k, n - k) - 1 free bits and then zeros
    return 1 + sum(2 ** (min(k, n - k) - 1) for k in range(1, n))


def example_countable_tree(depth: int) -> TreeTruncation:
    """Binary tree of strings that are zero from position ``2k`` on, ``k`` the first 1.

    Its path space is countable, yet ``s_n`` grows like ``2^{n/2}``; the tree
    is not level-wise uniformly branching.
    """
    if depth < 2:
        raise TreeValidationError("countable tree needs depth >= 2")
    return tree_from_predicate(
        countable_member,
        depth,
        2,
        counter=countable_level_count,
        name="countable",
        spec={"kind": "predicate", "predicate-id": "countable", "depth": depth},
    )


def constant_ratio_pair(b_s: int, b_t: int, depth: int) -> tuple[TreeTruncation, TreeTruncation]:
    """Constant-branching ``S`` inside constant-branching ``T`` (symbols ``< b_s`` inside ``< b_t``)."""
    if b_s > b_t:
        raise TreeValidationError(f"b_S = {b_s} exceeds b_T = {b_t}")
    T = build_tree(BranchingProfile.constant(b_t), depth, ambient=True, name=f"constant-{b_t}")
    S = build_tree(BranchingProfile.constant(b_s), depth, name=f"constant-{b_s}")
    return S, T


PREDICATES: dict[str, Callable[[int], TreeTruncation]] = {
    "countable": example_countable_tree,
}


def family_pair(name: str, depth: int, b_s: int = 2, b_t: int = 4) -> tuple[TreeTruncation, TreeTruncation]:
    """``(S, T)`` for a named family; ``T`` is the ambient tree."""
    if name == "alternating-blocks":
        return example_alternating_blocks(depth), full_binary(depth)
    if name == "countable":
        return example_countable_tree(depth), full_binary(depth)
    if name == "constant-ratio":
        return constant_ratio_pair(b_s, b_t, depth)
    if name == "full-binary":
        T = full_binary(depth)
        return T, T
    raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}")


FAMILY_NAMES = ("alternating-blocks", "countable", "constant-ratio", "full-binary")
