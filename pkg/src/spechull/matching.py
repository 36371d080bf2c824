"""Submultiplicative envelopes pinned at a target index.

The directional ratio bounds of a field need not be submultiplicative over
the mixed-sign domain, so they are not directly realizable as monomial
norms.  This module repairs them: given a target index, it runs a level
ladder along a permutation of the invertible axes (axes where the target is
negative come first), re-taking ratio suprema over progressively larger
index sets.  The result is a fully submultiplicative envelope that agrees
with the field on the nonnegative orthant, dominates every ratio bound, and
*equals* the ratio bound at the target.

All level suprema are windowed scans with clamped lookups: values of a
constant-tail field depend on an index only through its clamp toward the
origin, a property that propagates up the ladder and keeps every computed
value exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .lattice import (
    MultiIndex,
    NormField,
    clamp_index,
    domain_points,
    in_domain,
    invertible_directions,
    madd,
    mscale,
    norm_inf,
    orthant_points,
    ratio_sup,
    unit,
)
from .numerics import INF, as_fraction, ext_root, is_exact, is_inf
from .sequences import Bound, _root_less


class TargetOutsideDomainError(ValueError):
    """The target index is negative along a non-invertible axis."""


class EmptyOffsetSetError(ValueError):
    """A level supremum found no admissible offsets (box too small)."""

    def __init__(self, step):
        super().__init__(f"no admissible offsets for step {step}")
        self.step = step


class InexactBoundError(ValueError):
    """Envelope matching needs exact ratio bounds; the data cannot certify them."""


@dataclass(frozen=True)
class PermutationPlan:
    """Axis order for the ladder: target-negative axes first, then the rest."""

    order: Tuple[int, ...]
    negatives: int


def plan(invertible: frozenset, target: MultiIndex) -> PermutationPlan:
    """Build the ladder permutation for a target index.

    Within the negative group and the remainder the order is ascending axis
    index, which fixes a deterministic ladder.
    """
    if not in_domain(target, invertible):
        raise TargetOutsideDomainError(
            f"target {tuple(target)} is negative outside the invertible axes "
            f"{sorted(invertible)}")
    neg = sorted(k for k in invertible if target[k] < 0)
    rest = sorted(k for k in invertible if target[k] >= 0)
    return PermutationPlan(order=tuple(neg + rest), negatives=len(neg))


@dataclass
class LadderLevel:
    """One level of the repair ladder, stored on a boxed domain.

    ``cyl_radius`` is the clamp radius: values at any index equal the value
    at its clamp, so lookups are defined on the whole mixed-sign domain.
    """

    level: int
    order: Tuple[int, ...]
    invertible: frozenset
    store_radius: int
    cyl_radius: int
    values: Dict[MultiIndex, Fraction]
    exponents: Optional[Dict[MultiIndex, int]] = None  # dyadic fast path

    def in_region(self, i: MultiIndex) -> bool:
        """Membership in this level's index region R_l."""
        if not in_domain(i, self.invertible):
            return False
        return all(i[k] >= 0 for k in self.order[self.level:])

    def value_at(self, i: MultiIndex) -> Fraction:
        return self.values[clamp_index(i, self.cyl_radius)]

    def exponent_at(self, i: MultiIndex) -> int:
        return self.exponents[clamp_index(i, self.cyl_radius)]


def _dyadic_exponent(v) -> Optional[int]:
    """log2 of an exact power of two, else None."""
    if not is_exact(v):
        return None
    f = as_fraction(v)
    if f <= 0:
        return None
    num, den = f.numerator, f.denominator
    if num & (num - 1) or den & (den - 1):
        return None
    return num.bit_length() - den.bit_length()


def _base_level(field: NormField, order: Tuple[int, ...], invertible: frozenset,
                store: int) -> LadderLevel:
    """Level 0: the directional ratio bounds on the stored box."""
    values = {}
    for i in domain_points(field.n, store, invertible):
        b = ratio_sup(field, i)
        if not b.exact or not is_exact(b.value):
            raise InexactBoundError(
                f"ratio bound at {i} is not certified exact; "
                "envelope matching needs exact rational data")
        if is_inf(b.value):
            raise InexactBoundError(
                f"ratio bound at {i} is infinite; the invertible set is "
                "inconsistent with the field")
        values[i] = as_fraction(b.value)
    exps = {}
    for i, v in values.items():
        e = _dyadic_exponent(v)
        if e is None:
            exps = None
            break
        exps[i] = e
    return LadderLevel(level=0, order=order, invertible=invertible,
                       store_radius=store, cyl_radius=field.support_radius + 1,
                       values=values, exponents=exps)


def ladder_step(prev: LadderLevel) -> LadderLevel:
    """Re-take ratio suprema over the next level's index region.

    For each stored index the supremum of ``B_{m+i} / B_m`` runs over
    offsets with both points in the previous region; the scan radius
    ``cyl + |i| + 1`` is decisive because any farther offset clamps to one
    inside without changing either value.
    """
    lvl = prev.level + 1
    store, cyl = prev.store_radius, prev.cyl_radius
    n = len(next(iter(prev.values)))
    dyadic = prev.exponents is not None

    values: Dict[MultiIndex, Fraction] = {}
    exponents: Optional[Dict[MultiIndex, int]] = {} if dyadic else None
    for i in domain_points(n, store, prev.invertible):
        scan = cyl + norm_inf(i) + 1
        best = None
        best_e = None
        for m in domain_points(n, scan, prev.invertible):
            if not prev.in_region(m):
                continue
            t = madd(m, i)
            if not prev.in_region(t):
                continue
            if dyadic:
                e = prev.exponent_at(t) - prev.exponent_at(m)
                if best_e is None or e > best_e:
                    best_e = e
            else:
                den = prev.value_at(m)
                num = prev.value_at(t)
                if num == 0 and den == 0:
                    continue
                if den == 0:
                    raise RuntimeError(
                        "zero denominator against a nonzero numerator: the "
                        "previous level violates its chain bound")
                v = num / den
                if best is None or v > best:
                    best = v
        if dyadic:
            if best_e is None:
                raise EmptyOffsetSetError(i)
            exponents[i] = best_e
            values[i] = Fraction(2) ** best_e
        else:
            if best is None:
                raise EmptyOffsetSetError(i)
            values[i] = best
    return LadderLevel(level=lvl, order=prev.order, invertible=prev.invertible,
                       store_radius=store, cyl_radius=cyl + 1,
                       values=values, exponents=exponents)


def run_ladder(field: NormField, plan_: PermutationPlan, invertible: frozenset,
               box: int) -> List[LadderLevel]:
    """All ladder levels 0..p for a plan, memoized on the field."""
    key = (plan_.order, invertible, box)
    cache = _ladder_cache(field)
    if key in cache:
        return cache[key]
    p = len(plan_.order)
    store = max(box, field.support_radius + 1 + p) + 1
    levels = [_base_level(field, plan_.order, invertible, store)]
    for _ in range(p):
        levels.append(ladder_step(levels[-1]))
    cache[key] = levels
    return levels


_LADDER_CACHES: dict = {}


def _ladder_cache(field: NormField) -> dict:
    key = id(field)
    entry = _LADDER_CACHES.get(key)
    if entry is None or entry[0] is not field:
        entry = (field, {})
        _LADDER_CACHES[key] = entry
    return entry[1]


@dataclass(frozen=True)
class MatchedBounds:
    """A submultiplicative envelope equal to the ratio bound at its target."""

    field: NormField
    invertible: frozenset
    plan: PermutationPlan
    target: MultiIndex
    box: int
    levels: Tuple[LadderLevel, ...]

    @property
    def top(self) -> LadderLevel:
        return self.levels[-1]

    def value_at(self, i: MultiIndex) -> Fraction:
        """Envelope value at any domain index (clamped lookup)."""
        if not in_domain(i, self.invertible):
            raise ValueError(f"{i} is outside the admissible domain")
        return self.top.value_at(i)

    def bound(self, i: MultiIndex) -> Bound:
        return Bound(self.value_at(i), exact=True)

    def boxed_values(self) -> Dict[MultiIndex, Fraction]:
        return {i: self.top.value_at(i)
                for i in domain_points(self.field.n, self.box, self.invertible)}

    def level_dump(self) -> List[dict]:
        out = []
        for lvl in self.levels:
            vals = [{"i": list(i), "B": float(lvl.value_at(i))}
                    for i in sorted(domain_points(self.field.n, self.box,
                                                  self.invertible))]
            out.append({"l": lvl.level, "values": vals})
        return out


def match_target(field: NormField, target: MultiIndex, box: Optional[int] = None,
                 declared: Optional[Iterable[int]] = None) -> MatchedBounds:
    """Envelope with ``B = a`` on the orthant, ``B >= `` every ratio bound,
    full submultiplicativity on the domain, and equality at the target.

    With no invertible axes the domain is the orthant and the field itself
    is the (trivial) envelope.
    """
    box = field.box if box is None else box
    target = tuple(int(c) for c in target)
    if len(target) != field.n:
        raise ValueError("target dimension mismatch")
    inv, _ = invertible_directions(field, declared=declared)
    if norm_inf(target) > box:
        raise ValueError("target lies outside the box")
    plan_ = plan(inv, target)
    levels = run_ladder(field, plan_, inv, box)
    return MatchedBounds(field=field, invertible=inv, plan=plan_, target=target,
                         box=box, levels=tuple(levels))


def min_monomial_norm(field: NormField, j: MultiIndex, k_max: int,
                      declared: Optional[Iterable[int]] = None) -> Bound:
    """Smallest possible sup-norm of the ``j``-monomial on a compatible
    joint spectrum: the minimum of ``ratio_sup(k*j)**(1/k)``.

    The reported value is the k-windowed minimum.  It is flagged exact when
    it meets the certified infimum over *all* k, which the constant tail
    decides: beyond the clamp radius the bounds in direction ``j`` are
    constant, so their root sequence tends to 1 (or sits below it).
    """
    if k_max < 1:
        raise ValueError("k_max must be positive")
    j = tuple(int(c) for c in j)
    inv, _ = invertible_directions(field, declared=declared)
    if not in_domain(j, inv):
        raise TargetOutsideDomainError(f"{j} is outside the admissible domain")
    if all(c == 0 for c in j):
        return Bound(Fraction(1), exact=True)

    def bound_at(k: int):
        b = ratio_sup(field, mscale(k, j))
        return b.value

    best_v, best_k = None, None
    for k in range(1, k_max + 1):
        v = bound_at(k)
        if v == 0:
            return Bound(Fraction(0), exact=True)
        if best_v is None or _root_less(v, k, best_v, best_k):
            best_v, best_k = v, k

    # certified infimum over all k: past the stabilization order the bound
    # in direction j is a constant V, whose root tail has infimum 1 when
    # V > 1 (a limit, never attained) and is dominated by its first term
    # otherwise
    min_step = min(abs(c) for c in j if c != 0)
    k_stab = (field.support_radius + 1) // min_step + 1
    tail_v = bound_at(k_stab)
    true_v, true_k = best_v, best_k
    for k in range(k_max + 1, k_stab + 1):
        v = bound_at(k)
        if v == 0:
            true_v, true_k = Fraction(0), k
            break
        if _root_less(v, k, true_v, true_k):
            true_v, true_k = v, k
    if not (is_exact(best_v) and is_exact(true_v) and is_exact(tail_v)):
        exact = False
    else:
        undercut_by_extension = _root_less(true_v, true_k, best_v, best_k)
        undercut_by_limit = as_fraction(tail_v) > 1 and as_fraction(best_v) > 1
        exact = not (undercut_by_extension or undercut_by_limit)
    return Bound(ext_root(best_v, best_k), exact=exact)
