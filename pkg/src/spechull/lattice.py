"""Multi-index norm fields and their ratio-bound families.

A norm field assigns ``a_i`` to every multi-index ``i`` with nonnegative
coordinates, stored sparsely as explicit entries plus a constant default
tail.  From it we derive, for any ``i`` in the mixed-sign domain, the
supremum of ``a_{m+i}/a_m`` over admissible offsets -- the optimal bound any
realization's monomial norm must obey in direction ``i`` -- together with
the set of invertible directions and the inequality structure those bounds
satisfy.

Axes are 0-based throughout.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Tuple

from .numerics import INF, DEFAULT_TOL, as_fraction, ext_mul, is_exact, is_inf
from .sequences import Bound, NormSequence, ValidationError, scalar_to_json

MultiIndex = Tuple[int, ...]


# -- multi-index helpers ------------------------------------------------------


def madd(i: MultiIndex, j: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(i, j))


def mneg(i: MultiIndex) -> MultiIndex:
    return tuple(-a for a in i)

def mscale(k: int, i: MultiIndex) -> MultiIndex:
    return tuple(k * a for a in i)


def sign(v: int) -> int:
    return 1 if v > 0 else (-1 if v < 0 else 0)


def unit(k: int, n: int) -> MultiIndex:
    return tuple(1 if t == k else 0 for t in range(n))


def in_orthant(i: MultiIndex) -> bool:
    """Membership in the nonnegative orthant (indices of plain products)."""
    return all(c >= 0 for c in i)


def in_domain(i: MultiIndex, invertible: frozenset) -> bool:
    """Indices whose monomials are realizable: nonnegative outside the
    invertible directions."""
    return all(c >= 0 for k, c in enumerate(i) if k not in invertible)


def norm_inf(i: MultiIndex) -> int:
    return max((abs(c) for c in i), default=0)


def orthant_points(n: int, rho: int) -> Iterator[MultiIndex]:
    return itertools.product(range(rho + 1), repeat=n)


def domain_points(n: int, rho: int, invertible: frozenset) -> Iterator[MultiIndex]:
    ranges = [range(-rho, rho + 1) if k in invertible else range(rho + 1)
              for k in range(n)]
    return itertools.product(*ranges)


def clamp_index(i: MultiIndex, radius: int) -> MultiIndex:
    return tuple(max(-radius, min(radius, c)) for c in i)


# -- the field ----------------------------------------------------------------


class NormField:
    """Sparse multi-index norm data: explicit entries plus a constant tail.

    ``value(i)`` is defined for every ``i`` in the nonnegative orthant, not
    just inside the box; unlisted indices take the default.  The box bounds
    validation scans and enumeration, not lookups.
    """

    __slots__ = ("n", "box", "entries", "default")

    def __init__(self, n: int, box: int, entries: Mapping[MultiIndex, object],
                 default=Fraction(1)):
        if n < 1:
            raise ValueError("dimension must be positive")
        if box < 1:
            raise ValueError("box radius must be positive")
        self.n = n
        self.box = box
        norm_entries = {}
        for key, val in entries.items():
            key = tuple(int(c) for c in key)
            if len(key) != n or not in_orthant(key):
                raise ValueError(f"entry index {key} outside the nonnegative orthant")
            norm_entries[key] = val
        self.entries = norm_entries
        self.default = default

    def value(self, i: MultiIndex):
        return self.entries.get(i, self.default)

    @property
    def support_radius(self) -> int:
        """Largest coordinate among explicit entries; lookups beyond are default."""
        return max((max(k) for k in self.entries if k), default=0)

    def has_zero(self) -> bool:
        return self.default == 0 or any(v == 0 for v in self.entries.values())

    def __repr__(self):
        return (f"NormField(n={self.n}, box={self.box}, "
                f"entries={len(self.entries)}, default={self.default})")


def validate_field(raw, tol: float = DEFAULT_TOL, max_exhaustive: int = 600_000,
                   seed: int = 0, samples: int = 20_000) -> NormField:
    """Check normalization, tail consistency and submultiplicativity.

    The pair scan is exhaustive while the box stays small (the pair count is
    capped); larger boxes fall back to seeded random pair sampling.  Tail
    rules guarantee the *infinite* field described by entries-plus-default is
    valid, not merely its boxed restriction.
    """
    field = raw if isinstance(raw, NormField) else field_from_json(raw)
    origin = (0,) * field.n
    if field.value(origin) != 1:
        raise ValidationError("not-normalized", origin,
                              f"a_0 = {field.value(origin)} != 1")
    for key, val in field.entries.items():
        if (is_exact(val) and val < 0) or (isinstance(val, float) and val < 0):
            raise ValueError(f"negative entry at {key}")
    if isinstance(field.default, float) and field.default < 0:
        raise ValueError("negative default")

    d = field.default
    if d != 0:
        # a far partner forces d <= a_i * d for every i, hence values >= 1
        far = (field.box + 1,) * field.n
        if d < 1:
            raise ValidationError("not-submultiplicative", (far, far),
                                  f"tail default {d} < 1 cannot be submultiplicative")
        for key, val in field.entries.items():
            if val == 0:
                raise ValidationError("zero-not-propagated", (key, far),
                                      f"zero entry at {key} with nonzero tail")
            if val < 1:
                raise ValidationError(
                    "not-submultiplicative", (key, far),
                    f"a_{key} = {val} < 1 conflicts with the constant tail")

    pts = list(orthant_points(field.n, field.box))
    inexact = isinstance(d, float) or any(isinstance(v, float)
                                          for v in field.entries.values())

    def check_pair(i, j):
        s = madd(i, j)
        if norm_inf(s) > field.box:
            return
        lhs, prod = field.value(s), field.value(i) * field.value(j)
        ok = lhs <= prod * (1 + tol) if inexact else lhs <= prod
        if not ok:
            kind = "zero-not-propagated" if prod == 0 else "not-submultiplicative"
            raise ValidationError(kind, (i, j),
                                  f"a_{s} = {lhs} > a_{i}*a_{j} = {prod}")

    if len(pts) ** 2 <= max_exhaustive:
        for i in pts:
            for j in pts:
                check_pair(i, j)
    else:
        rng = random.Random(seed)
        for _ in range(samples):
            check_pair(rng.choice(pts), rng.choice(pts))
    return field


# -- ratio bounds -------------------------------------------------------------


def admissible_offsets(field: NormField, step: MultiIndex,
                       rho: Optional[int] = None) -> set:
    """Offsets m with m and m+step in the boxed orthant and values not both 0."""
    rho = field.box if rho is None else rho
    out = set()
    for m in orthant_points(field.n, rho):
        t = madd(m, step)
        if not in_orthant(t) or norm_inf(t) > rho:
            continue
        if field.value(m) == 0 and field.value(t) == 0:
            continue
        out.add(m)
    return out


def _scan_radius(field: NormField, step: MultiIndex) -> int:
    return field.support_radius + norm_inf(step) + 1


def ratio_sup(field: NormField, step: MultiIndex, window: Optional[int] = None) -> Bound:
    """Supremum of ``a_{m+step}/a_m`` over admissible offsets.

    With no explicit window the constant tail lets a bounded scan capture the
    true supremum: any offset can be clamped toward the origin without
    changing either value, so the result is certified exact.  With a window
    the scan is truncated to the box and flagged accordingly (a zero
    denominator against a nonzero numerator still certifies an infinite
    value, and an empty windowed offset set is reported as such).
    """
    step = tuple(step)
    if len(step) != field.n:
        raise ValueError("step dimension mismatch")
    if in_orthant(step):
        # the offset 0 attains the supremum and submultiplicativity caps it
        return Bound(field.value(step), exact=True)

    windowed = window is not None
    radius = window if windowed else _scan_radius(field, step)
    best = None
    found = False
    for m in orthant_points(field.n, radius):
        t = madd(m, step)
        if not in_orthant(t):
            continue
        if windowed and norm_inf(t) > radius:
            continue
        num, den = field.value(t), field.value(m)
        if num == 0 and den == 0:
            continue
        found = True
        if den == 0:
            return Bound(INF, exact=True)  # witnessed: the supremum is infinite
        v = num / den if (is_exact(num) and is_exact(den)) else float(num) / float(den)
        if best is None or v > best:
            best = v
    if not found:
        if windowed:
            return Bound(INF, exact=False, empty_window=True)
        # with a constant tail the entire admissible set fits in the scan,
        # so emptiness is definitive and the value is infinite by convention
        return Bound(INF, exact=True)
    exact = not windowed or radius >= _scan_radius(field, step)
    return Bound(best, exact=exact)


def invertible_directions(field: NormField, declared: Optional[Iterable[int]] = None,
                          window: Optional[int] = None):
    """The set of axes whose backward unit bound is finite.

    A declared set is authoritative and passes through.  Otherwise the set
    is inferred: certified from the constant tail when no window is forced,
    or a best-effort windowed-stability guess when one is.
    """
    if declared is not None:
        s = frozenset(int(k) for k in declared)
        if any(k < 0 or k >= field.n for k in s):
            raise ValueError("declared axis outside range")
        return s, "declared"
    members = set()
    for k in range(field.n):
        step = mneg(unit(k, field.n))
        if window is None:
            if not is_inf(ratio_sup(field, step).value):
                members.add(k)
        else:
            stages = [max(2, window // 4), max(2, window // 2), window]
            vals = [ratio_sup(field, step, w) for w in stages]
            if any(is_inf(v.value) for v in vals):
                continue
            floats = [float(v.value) for v in vals]
            if floats[0] == floats[-1] and floats[1] == floats[-1]:
                members.add(k)
    return frozenset(members), "inferred"


def pair_condition(i: MultiIndex, j: MultiIndex, rho: Optional[int] = None) -> bool:
    """Does every admissible offset of i+j route through i or through j?

    Quantifies ``m + i or m + j stays in the orthant`` over offsets ``m`` in
    the orthant with ``m + i + j`` in the orthant.  Any failing offset has
    its relevant coordinates below ``|i| + |j|``, so the default scan radius
    is decisive.
    """
    return pair_condition_witness(i, j, rho) is None


def pair_condition_witness(i: MultiIndex, j: MultiIndex,
                           rho: Optional[int] = None) -> Optional[MultiIndex]:
    n = len(i)
    rho = (norm_inf(i) + norm_inf(j)) if rho is None else rho
    s = madd(i, j)
    for m in orthant_points(n, rho):
        if not in_orthant(madd(m, s)):
            continue
        if not in_orthant(madd(m, i)) and not in_orthant(madd(m, j)):
            return m
    return None


def chain_bound(field: NormField, m: MultiIndex, i: MultiIndex):
    """Product bound: ratio_sup(m) times the unit-step bounds along i.

    Any direction's bound at ``m + i`` is at most this product.
    """
    total = ratio_sup(field, tuple(m)).value
    for k, c in enumerate(i):
        if c == 0:
            continue
        step = unit(k, field.n) if c > 0 else mneg(unit(k, field.n))
        b = ratio_sup(field, step).value
        for _ in range(abs(c)):
            total = ext_mul(total, b)
    return total


@dataclass
class RatioField:
    """All directional ratio bounds of a field over a box, plus the
    invertible-direction set they determine."""

    field: NormField
    invertible: frozenset
    provenance: str
    box: int
    values: dict

    @classmethod
    def compute(cls, field: NormField, box: Optional[int] = None,
                declared: Optional[Iterable[int]] = None,
                window: Optional[int] = None) -> "RatioField":
        box = field.box if box is None else box
        inv, prov = invertible_directions(field, declared=declared, window=window)
        values = {}
        for i in domain_points(field.n, box, inv):
            values[i] = ratio_sup(field, i, window=window)
        return cls(field=field, invertible=inv, provenance=prov, box=box,
                   values=values)

    def bound(self, i: MultiIndex) -> Bound:
        if i in self.values:
            return self.values[i]
        return ratio_sup(self.field, i)


# -- n=1 bridging and JSON ----------------------------------------------------


def field_from_sequence(seq: NormSequence, box: Optional[int] = None) -> NormField:
    """One-dimensional field holding a sequence prefix.

    The constant-tail reading does not apply to a truncated prefix, so
    derived bounds should be requested through an explicit window.
    """
    box = seq.window if box is None else min(box, seq.window)
    entries = {}
    for k in range(box + 1):
        t = seq.term(k)
        entries[(k,)] = as_fraction(t) if is_exact(t) else t
    return NormField(n=1, box=box, entries=entries, default=Fraction(1))


def field_from_json(d) -> NormField:
    n = int(d["n"])
    entries = {}
    for item in d.get("entries", []):
        entries[tuple(int(c) for c in item["i"])] = _coerce_value(item["a"])
    return NormField(n=n, box=int(d.get("box", 4)), entries=entries,
                     default=_coerce_value(d.get("default", 1)))


def _coerce_value(x):
    """JSON numbers become exact rationals via their decimal form."""
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise ValueError("boolean is not a value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def field_to_json(field: NormField) -> dict:
    return {
        "n": field.n,
        "box": field.box,
        "default": scalar_to_json(field.default),
        "entries": [{"i": list(k), "a": scalar_to_json(v)}
                    for k, v in sorted(field.entries.items())],
    }
