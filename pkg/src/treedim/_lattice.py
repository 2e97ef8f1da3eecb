"""Subgroups of finite abelian groups ``Z/m_1 x ... x Z/m_d`` via integer echelon forms.

A subgroup generated by vectors ``g_1..g_k`` corresponds to the full-rank
lattice spanned by the ``g_i`` together with the relations ``m_j e_j``. Its
upper triangular basis gives the subgroup index (product of the pivots) and
a membership test by back-substitution, without enumerating elements.

Vectors are sparse ``{coordinate: value}`` dicts so that towers with
thousands of coordinates and unit-vector generators stay cheap.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

Sparse = dict[int, int]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def to_sparse(v: Mapping[int, int] | Sequence[int], moduli: Sequence[int]) -> Sparse:
    items = v.items() if isinstance(v, dict) else enumerate(v)
    out = {}
    for i, x in items:
        x = int(x) % moduli[i]
        if x:
            out[int(i)] = x
    return out


class SubgroupLattice:
    def __init__(self, gens: Iterable[Mapping[int, int] | Sequence[int]], moduli: Sequence[int]):
        self.moduli = tuple(int(m) for m in moduli)
        # pivot column -> row; an untouched column c stands for the relation m_c e_c
        self.rows: dict[int, Sparse] = {}
        for g in gens:
            self.add(g)

    def _combine(self, x: int, a: Sparse, y: int, b: Sparse) -> Sparse:
        """``x*a + y*b`` reduced mod the moduli (the relations lie in the lattice)."""
        out = {}
        for i in a.keys() | b.keys():
            v = (x * a.get(i, 0) + y * b.get(i, 0)) % self.moduli[i]
            if v:
                out[i] = v
        return out

    def add(self, v: Mapping[int, int] | Sequence[int]) -> None:
        v = to_sparse(v, self.moduli)
        while v:
            c = min(v)
            row = self.rows.get(c)
            b = v[c]
            if row is None and self.moduli[c] % b == 0:
                # fresh column whose relation is a multiple of v: v becomes the pivot row
                self.rows[c] = v
                k = self.moduli[c] // b
                v = {j: (-k * x) % self.moduli[j] for j, x in v.items() if j != c and (k * x) % self.moduli[j]}
                continue
            row = row or {c: self.moduli[c]}
            a = row[c]
            g, x, y = _xgcd(a, b)
            # [[x, y], [b/g, -a/g]] is unimodular, so the span is unchanged
            new = self._combine(x, row, y, v)
            new[c] = g
            self.rows[c] = new
            v = self._combine(b // g, row, -(a // g), v)
            v.pop(c, None)

    @property
    def group_order(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    @property
    def order(self) -> int:
        out = 1
        for c, row in self.rows.items():
            out *= self.moduli[c] // row[c]
        return out

    @property
    def index(self) -> int:
        return self.group_order // self.order

    def __contains__(self, v: Mapping[int, int] | Sequence[int]) -> bool:
        v = to_sparse(v, self.moduli)
        while v:
            c = min(v)
            row = self.rows.get(c)
            if row is None:
                return False
            q, rem = divmod(v[c], row[c])
            if rem:
                return False
            v = self._combine(1, v, -q, row)
            v.pop(c, None)
        return True
