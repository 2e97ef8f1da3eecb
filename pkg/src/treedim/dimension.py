"""Box, Hausdorff and packing dimensions of ``[S]`` inside the path space ``[T]``.

On trees the box dimensions reduce to level counts: lower and upper box
dimension are the liminf and limsup of ``log s_n / log t_n``. A finite
truncation only yields tail-window estimates of those limits; exact values
come from symbolic branching profiles (:func:`exact_box_limits`).

For level-wise uniformly branching ``S`` the Hausdorff dimension equals the
lower box dimension and the packing dimension the upper one. Otherwise only
``dim_H <= lower box`` and ``dim_P <= upper box`` are reported.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from ._numeric import DEFAULT_PREC, ln, mpf_to_str, to_mpf
from .cover_engine import NonUniformTreeError
from .tree_core import (
    BranchingProfile,
    EnumerationLimitError,
    TreeError,
    TreeTruncation,
    check_subtree,
    is_levelwise_uniform,
)

DEFAULT_TAIL_FRACTION = 0.5
LOCAL_TOL = 1e-6


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class RatioSequence:
    """``log s_n / log t_n`` for ``n = 1 .. depth`` (``values[n - 1]``)."""

    s_counts: tuple[int, ...]
    t_counts: tuple[int, ...]
    values: tuple
    prec: int

    @property
    def depth(self) -> int:
        return len(self.values)

    def at(self, n: int):
        if not 1 <= n <= self.depth:
            raise IndexError(f"ratio defined for 1 <= n <= {self.depth}")
        return self.values[n - 1]


def ratio_sequence(S: TreeTruncation, T: TreeTruncation, prec: int = DEFAULT_PREC) -> RatioSequence:
    if S.depth < 1:
        raise DimensionError("need depth >= 1")
    if not check_subtree(S, T):
        raise DimensionError("S is not a subtree of T")
    depth = S.depth
    s, t = S.level_counts[: depth + 1], T.level_counts[: depth + 1]
    with mpmath.workprec(prec):
        vals = []
        for n in range(1, depth + 1):
            if t[n] < 2:
                raise DimensionError(f"t_{n} = {t[n]}: ambient tree must branch")
            vals.append(ln(s[n]) / ln(t[n]))
    return RatioSequence(tuple(s), tuple(t), tuple(vals), prec)


@dataclass(frozen=True)
class BoxEstimates:
    lower: mpmath.mpf
    upper: mpmath.mpf
    window: tuple[int, int]
    tail_fraction: float


def tail_window(depth: int, tail_fraction) -> tuple[int, int]:
    frac = Fraction(str(tail_fraction))
    if not 0 < frac < 1:
        raise DimensionError("tail_fraction must lie in (0, 1)")
    start = max(1, math.ceil((1 - frac) * depth))
    return start, depth


def box_estimates(seq: RatioSequence, tail_fraction=DEFAULT_TAIL_FRACTION) -> BoxEstimates:
    """inf and sup of the ratio over the last ``tail_fraction`` of the levels.

    These are finite-depth estimates of liminf / limsup, not the limits.
    """
    start, end = tail_window(seq.depth, tail_fraction)
    tail = seq.values[start - 1 : end]
    return BoxEstimates(min(tail), max(tail), (start, end), float(tail_fraction))


# -- symbolic limits -------------------------------------------------------


@dataclass(frozen=True)
class ExactLimits:
    lower: mpmath.mpf
    upper: mpmath.mpf
    exact: tuple[Fraction, Fraction] | None
    derivation: str

    def to_dict(self) -> dict:
        d = {"lower": mpf_to_str(self.lower), "upper": mpf_to_str(self.upper), "derivation": self.derivation}
        if self.exact is not None:
            d["exact"] = [str(self.exact[0]), str(self.exact[1])]
        return d


def _int_root(v: int) -> tuple[int, int]:
    """Smallest ``q`` with ``q**e == v``; returns ``(q, e)``."""
    for e in range(v.bit_length(), 1, -1):
        q = round(v ** (1.0 / e))
        for cand in (q - 1, q, q + 1):
            if cand >= 2 and cand**e == v:
                return cand, e
    return v, 1


def _common_exponents(values: set[int]) -> dict[int, int] | None:
    """Exponents of every value over one common integer base, if one exists."""
    roots = {v: _int_root(v) for v in values if v > 1}
    bases = {q for q, _ in roots.values()}
    if len(bases) > 1:
        return None
    out = {v: e for v, (_, e) in roots.items()}
    out[1] = 0
    return out


class _Growth:
    """Limit of ``log(level count) / n`` along block boundaries ``n = c * g**(K+1)``, ``K = j mod P``."""

    def __init__(self, profile: BranchingProfile):
        self.profile = profile
        if profile.kind in ("constant", "eventually-periodic"):
            self.block = None
        elif profile.kind == "block-schedule":
            self.block = (profile.base, profile.scale)
        else:
            raise ValueError("no limit for explicit profiles")

    def values(self) -> set[int]:
        return set(self.profile.values)

    def period(self) -> int:
        return len(self.profile.values) if self.block else 1

    def rate(self, j: int, P: int, weight, exact: bool):
        """``weight(b)`` is the log (or common-base exponent) of a branching value ``b``."""
        one = Fraction(1) if exact else mpmath.mpf(1)
        vals = self.profile.values
        if self.block is None:
            return sum((weight(b) for b in vals), 0 * one) / len(vals)
        g = self.block[0] * one
        acc = sum((weight(vals[(j - i) % len(vals)]) / g**i for i in range(P)), 0 * one)
        return acc * (g - 1) / g / (1 - 1 / g**P)

    def describe(self) -> str:
        p = self.profile
        if self.block is None:
            return f"level-periodic, period {list(p.values)}"
        return f"geometric blocks [{p.scale}*{p.base}^k, {p.scale}*{p.base}^(k+1)), per-block values {list(p.values)}"


def exact_box_limits(
    profile_S: BranchingProfile | None, profile_T: BranchingProfile | None, prec: int = DEFAULT_PREC
) -> ExactLimits | None:
    """Closed-form liminf / limsup of ``log s_n / log t_n`` for recognised profiles.

    Periodic profiles have a single limit, the ratio of average log
    branchings. A geometric block schedule (block k covering
    ``[c g^k, c g^{k+1})``) is extremal at block boundaries; there the
    normalised log count tends to ``(1 - 1/g) * sum_i g^{-i} a_{K-i}``,
    which depends only on ``K`` modulo the schedule period. The ratio is
    monotone inside a block, so those boundary limits give liminf and
    limsup. Returns ``None`` for unsupported combinations.
    """
    if profile_S is None or profile_T is None:
        return None
    try:
        gs, gt = _Growth(profile_S), _Growth(profile_T)
    except ValueError:
        return None
    if gs.block and gt.block and gs.block != gt.block:
        return None
    P = math.lcm(gs.period(), gt.period())
    exps = _common_exponents(gs.values() | gt.values())
    with mpmath.workprec(prec):
        limits = []
        for j in range(P):
            num = gs.rate(j, P, ln, False)
            den = gt.rate(j, P, ln, False)
            if den <= 0:
                return None
            limits.append(num / den)
        exact = None
        if exps is not None:
            def w(b):
                return Fraction(exps[b])

            ex = [gs.rate(j, P, w, True) / gt.rate(j, P, w, True) for j in range(P)]
            exact = (min(ex), max(ex))
            limits = [to_mpf(q) for q in ex]
        lo, hi = min(limits), max(limits)
    parts = [f"S: {gs.describe()}", f"T: {gt.describe()}"]
    if P > 1:
        shown = [str(q) for q in ex] if exact else [mpmath.nstr(x, 12) for x in limits]
        parts.append(f"block-boundary limits by K mod {P}: {shown}")
    parts.append("liminf = min, limsup = max (ratio monotone within each block)" if P > 1 else "single limit")
    return ExactLimits(lo, hi, exact, "; ".join(parts))


# -- reports ---------------------------------------------------------------


class Certification(enum.Enum):
    UNIFORM_EQUALITY = "uniform-equality"
    INEQUALITY_ONLY = "inequality-only"


@dataclass(frozen=True)
class DimBound:
    """A dimension value (``relation == "="``) or an upper bound (``"<="``)."""

    value: mpmath.mpf
    relation: str
    basis: str
    exact: Fraction | None = None

    def to_dict(self) -> dict:
        d = {"relation": self.relation, "value": mpf_to_str(self.value), "basis": self.basis}
        if self.exact is not None:
            d["exact"] = str(self.exact)
        return d


@dataclass(frozen=True)
class DimensionReport:
    label: str
    ratios: RatioSequence
    estimates: BoxEstimates
    exact_limits: ExactLimits | None
    hausdorff: DimBound
    packing: DimBound
    certification: Certification
    notes: tuple[str, ...] = field(default=())
    count_labels: tuple[str, str] = ("s_n", "t_n")

    @property
    def lower_box_estimate(self):
        return self.estimates.lower

    @property
    def upper_box_estimate(self):
        return self.estimates.upper

    @property
    def depth(self) -> int:
        return self.ratios.depth

    def to_dict(self) -> dict:
        with mpmath.workprec(self.ratios.prec):
            return {
                "label": self.label,
                "depth": self.depth,
                "precision_bits": self.ratios.prec,
                "certification": self.certification.value,
                "lower_box_estimate": mpf_to_str(self.estimates.lower),
                "upper_box_estimate": mpf_to_str(self.estimates.upper),
                "tail_window": list(self.estimates.window),
                "tail_fraction": self.estimates.tail_fraction,
                "exact_limits": None if self.exact_limits is None else self.exact_limits.to_dict(),
                "hausdorff": self.hausdorff.to_dict(),
                "packing": self.packing.to_dict(),
                "notes": list(self.notes),
                "levels": [
                    {"n": n, "s_n": str(s), "t_n": str(t), "ratio": mpf_to_str(v)}
                    for n, s, t, v in self._rows()
                ],
            }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def _rows(self):
        r = self.ratios
        for n in range(1, r.depth + 1):
            yield n, r.s_counts[n], r.t_counts[n], r.values[n - 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s_n", "t_n", "ratio"])
        with mpmath.workprec(self.ratios.prec):
            for n, s, t, v in self._rows():
                w.writerow([n, s, t, mpf_to_str(v)])
        return buf.getvalue()

    def to_text(self, max_rows: int = 64) -> str:
        def short(x) -> str:
            return mpmath.nstr(x, 10)

        h, p = self.hausdorff, self.packing
        lines = [
            f"report: {self.label}" if self.label else "report",
            f"depth: {self.depth}",
            f"certification: {self.certification.value}",
            f"lower box (tail estimate, levels {self.estimates.window[0]}..{self.estimates.window[1]}): "
            f"{short(self.estimates.lower)}",
            f"upper box (tail estimate): {short(self.estimates.upper)}",
        ]
        if self.exact_limits is not None:
            ex = self.exact_limits
            pair = f"{ex.exact[0]}, {ex.exact[1]}" if ex.exact else f"{short(ex.lower)}, {short(ex.upper)}"
            lines.append(f"exact box limits (liminf, limsup): {pair}")
            lines.append(f"  derivation: {ex.derivation}")
        lines.append(f"dim_H {h.relation} {short(h.value)}  ({h.basis})")
        lines.append(f"dim_P {p.relation} {short(p.value)}  ({p.basis})")
        lines.extend(f"note: {n}" for n in self.notes)
        a, b = self.count_labels
        if self.depth <= max_rows:
            lines.append(f"{'n':>5}  {a:>24}  {b:>24}  ratio")
            for n, s, t, v in self._rows():
                lines.append(f"{n:>5}  {_big(s):>24}  {_big(t):>24}  {short(v)}")
        else:
            lines.append(f"(level table omitted for depth > {max_rows}; use --format csv)")
        return "\n".join(lines) + "\n"


def _big(x: int) -> str:
    if x < 10**20:
        return str(x)
    if x & (x - 1) == 0:
        return f"2^{x.bit_length() - 1}"
    return f"~{mpmath.nstr(mpmath.mpf(x), 6)}"


def dimension_report(
    S: TreeTruncation,
    T: TreeTruncation,
    tail_fraction=DEFAULT_TAIL_FRACTION,
    prec: int = DEFAULT_PREC,
    exact_limits: ExactLimits | None = None,
    label: str = "",
    count_labels: tuple[str, str] = ("s_n", "t_n"),
) -> DimensionReport:
    seq = ratio_sequence(S, T, prec)
    est = box_estimates(seq, tail_fraction)
    if exact_limits is None:
        exact_limits = exact_box_limits(S.profile, T.profile, prec)
    notes = []
    try:
        uniform = bool(is_levelwise_uniform(S))
    except EnumerationLimitError:
        uniform = False
        notes.append("uniformity could not be checked within the enumeration limit")
    lo_ex = exact_limits.exact[0] if exact_limits and exact_limits.exact else None
    hi_ex = exact_limits.exact[1] if exact_limits and exact_limits.exact else None
    if uniform:
        cert = Certification.UNIFORM_EQUALITY
        rel = "="
    else:
        cert = Certification.INEQUALITY_ONLY
        rel = "<="
        notes.append(
            "S is not level-wise uniformly branching: box dimensions only bound dim_H and dim_P from above"
        )
    hausdorff = DimBound(est.lower, rel, "lower box dimension", lo_ex)
    packing = DimBound(est.upper, rel, "upper box dimension", hi_ex)
    return DimensionReport(label, seq, est, exact_limits, hausdorff, packing, cert, tuple(notes), count_labels)


@dataclass(frozen=True)
class LocalCheck:
    sigma: tuple[int, ...]
    local_values: tuple
    local_sup: mpmath.mpf
    global_sup: mpmath.mpf
    discrepancy_bound: mpmath.mpf
    agree: bool


def local_upper_box_check(
    S: TreeTruncation,
    T: TreeTruncation,
    sigma: Sequence[int],
    tail_fraction=DEFAULT_TAIL_FRACTION,
    tol: float = LOCAL_TOL,
    prec: int = DEFAULT_PREC,
) -> LocalCheck:
    """Compare the upper-box tail of ``[sigma] ∩ [S]`` with that of ``[S]``.

    The cone above ``sigma`` (level ``r``) is counted directly by descending
    through ``S``. When those counts are ``s_n / s_r`` the two ratio
    sequences differ by exactly ``log s_r / log t_n``, which vanishes as
    ``n`` grows; ``agree`` is true when the tail sups differ by at most that
    vanishing term (evaluated at the window start) plus ``tol``.
    """
    sigma = tuple(sigma)
    uni = is_levelwise_uniform(S)
    if not uni:
        raise NonUniformTreeError("local upper-box check needs a level-wise uniformly branching S")
    if not S.contains(sigma):
        raise TreeError(f"{sigma} is not a member of S")
    r = len(sigma)
    if r >= S.depth:
        raise DimensionError("sigma must lie strictly below the truncation depth")
    seq = ratio_sequence(S, T, prec)
    start, end = tail_window(S.depth, tail_fraction)
    start = max(start, r + 1)
    with mpmath.workprec(prec):
        cone, node, local = 1, sigma, []
        for n in range(r, S.depth):
            kids = S.children(node)
            cone *= len(kids)
            node = kids[0]
            local.append(ln(cone) / ln(T.level_counts[n + 1]))
        # local[i] belongs to level r + 1 + i
        tail_local = local[start - r - 1 : end - r]
        local_sup = max(tail_local)
        global_sup = max(seq.values[start - 1 : end])
        bound = ln(S.level_counts[r]) / ln(T.level_counts[start])
        agree = abs(local_sup - global_sup) <= bound + mpmath.mpf(tol)
    return LocalCheck(sigma, tuple(local), local_sup, global_sup, bound, bool(agree))
