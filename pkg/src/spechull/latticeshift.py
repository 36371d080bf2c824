"""Commuting weighted-shift systems on a boxed multi-index lattice.

Realizes submultiplicative norm data on the mixed-sign domain as ``n``
commuting forward shifts over the basis ``{e_i}``: each shift multiplies by
a ratio of data values, falling back to the invertible-projection ratio
when the value at the source index vanishes.  Only the weight action is
stored, never a matrix; monomial norms are suprema of the scalar factors
over the basis window.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .lattice import (
    MultiIndex,
    NormField,
    domain_points,
    in_domain,
    in_orthant,
    madd,
    mneg,
    norm_inf,
    unit,
)
from .matching import MatchedBounds
from .numerics import as_fraction, is_exact


class InconsistentDirectionsError(ValueError):
    """A declared invertible axis hits a forbidden zero transition."""

    def __init__(self, axis: int, witness: MultiIndex):
        super().__init__(
            f"axis {axis} declared invertible but the value vanishes at "
            f"{madd(witness, unit(axis, len(witness)))} against a nonzero "
            f"value at {witness}")
        self.axis = axis
        self.witness = witness


class BoxOverflowError(IndexError):
    """A shift application left the basis window."""


def project_invertible(i: MultiIndex, invertible: frozenset) -> MultiIndex:
    """Zero out the coordinates of non-invertible axes.

    The projection commutes with adding any index supported on the
    invertible axes, and the data never vanishes on projected indices.
    """
    return tuple(c if k in invertible else 0 for k, c in enumerate(i))


class LatticeShiftSystem:
    """n commuting weighted shifts acting on basis indices in a box."""

    def __init__(self, n: int, box: int, invertible: frozenset, value_fn,
                 source: str):
        self.n = n
        self.box = box
        self.invertible = invertible
        self._value = value_fn
        self.source = source

    def value(self, i: MultiIndex) -> Fraction:
        return self._value(i)

    def in_basis(self, i: MultiIndex) -> bool:
        return norm_inf(i) <= self.box and in_domain(i, self.invertible)

    def basis(self):
        return domain_points(self.n, self.box, self.invertible)


def build_system(data: Union[NormField, MatchedBounds, Mapping],
                 invertible: Optional[Iterable[int]] = None,
                 box: Optional[int] = None) -> LatticeShiftSystem:
    """Assemble the shift system for one of the realizable data shapes.

    * a norm field (orthant data, no invertible axes);
    * matched envelope bounds (submultiplicative on their whole domain);
    * an explicit mapping of domain indices to values, plus the axis set --
      checked for normalization, submultiplicativity and consistency of the
      declared axes.
    """
    if isinstance(data, NormField):
        if invertible:
            raise ValueError(
                "a plain norm field carries orthant data only; match it to "
                "an envelope before declaring invertible axes")
        box = data.box if box is None else box
        return LatticeShiftSystem(data.n, box, frozenset(), data.value,
                                  source="field")
    if isinstance(data, MatchedBounds):
        box = data.box if box is None else box
        return LatticeShiftSystem(data.field.n, box, data.invertible,
                                  data.value_at, source="envelope")

    values = {tuple(k): as_fraction(v) if is_exact(v) else v
              for k, v in data.items()}
    inv = frozenset(int(k) for k in (invertible or ()))
    n = len(next(iter(values)))
    if box is None:
        box = max(norm_inf(i) for i in values)
    origin = (0,) * n
    if values.get(origin) != 1:
        raise ValueError("data must carry value 1 at the origin")
    pts = list(domain_points(n, box, inv))
    for i in pts:
        if i not in values:
            raise ValueError(f"missing value at {i}")
    # the axis check first: its failure also breaks submultiplicativity, but
    # deserves the specific message
    for k in inv:
        step = unit(k, n)
        for m in pts:
            t = madd(m, step)
            if norm_inf(t) > box:
                continue
            if values[m] != 0 and values[t] == 0:
                raise InconsistentDirectionsError(k, m)
    for i in pts:
        for j in pts:
            s = madd(i, j)
            if norm_inf(s) > box or not in_domain(s, inv):
                continue
            if values[s] > values[i] * values[j]:
                raise ValueError(
                    f"data not submultiplicative: a_{s} > a_{i} * a_{j}")
    return LatticeShiftSystem(n, box, inv, lambda i: values[i], source="mapping")


def _zero():
    return (Fraction(0), None)


def apply_shift(sys: LatticeShiftSystem, axis: int, i: MultiIndex):
    """T_axis acting on e_i: a (factor, target) pair, or a zero vector.

    When the value at ``i`` vanishes, an invertible axis shifts with the
    projected ratio instead of dying.
    """
    i = tuple(i)
    target = madd(i, unit(axis, sys.n))
    if not sys.in_basis(i) or not sys.in_basis(target):
        raise BoxOverflowError(f"shift {i} -> {target} leaves the basis window")
    ai = sys.value(i)
    if ai != 0:
        f = sys.value(target) / ai
        return (f, target) if f != 0 else _zero()
    if axis in sys.invertible:
        j = project_invertible(i, sys.invertible)
        return (sys.value(madd(j, unit(axis, sys.n))) / sys.value(j), target)
    return _zero()


def apply_inverse_shift(sys: LatticeShiftSystem, axis: int, i: MultiIndex):
    """The backward shift of an invertible axis acting on e_i."""
    if axis not in sys.invertible:
        raise ValueError(f"axis {axis} is not invertible")
    i = tuple(i)
    target = madd(i, mneg(unit(axis, sys.n)))
    if not sys.in_basis(i) or not sys.in_basis(target):
        raise BoxOverflowError(f"shift {i} -> {target} leaves the basis window")
    ai = sys.value(i)
    if ai != 0:
        return (sys.value(target) / ai, target)
    j = project_invertible(i, sys.invertible)
    return (sys.value(madd(j, mneg(unit(axis, sys.n)))) / sys.value(j), target)


def apply_monomial(sys: LatticeShiftSystem, m: MultiIndex, i: MultiIndex):
    """Closed form of the monomial shift T^m on e_i.

    Three cases: a plain value ratio when the destination value is nonzero;
    the projected ratio when it vanishes but ``m`` is supported on the
    invertible axes; the zero vector otherwise.
    """
    m, i = tuple(m), tuple(i)
    if not in_domain(m, sys.invertible):
        raise ValueError(f"{m} is outside the admissible domain")
    target = madd(i, m)
    if not sys.in_basis(i) or not sys.in_basis(target):
        raise BoxOverflowError(f"monomial lands outside the basis window")
    at = sys.value(target)
    if at != 0:
        return (at / sys.value(i), target)
    if all(c == 0 or k in sys.invertible for k, c in enumerate(m)):
        j = project_invertible(i, sys.invertible)
        return (sys.value(madd(j, m)) / sys.value(j), target)
    return _zero()


def apply_monomial_steps(sys: LatticeShiftSystem, m: MultiIndex, i: MultiIndex,
                         order: Optional[List[int]] = None):
    """T^m on e_i as a composition of single shifts.

    ``order`` lists signed axes (axis+1 forward, -(axis+1) backward) and
    defaults to ascending axes; any order must agree with the closed form.
    """
    m, i = tuple(m), tuple(i)
    if order is None:
        order = []
        for k, c in enumerate(m):
            step = (k + 1) if c > 0 else -(k + 1)
            order.extend([step] * abs(c))
    factor = Fraction(1)
    cur = i
    for signed in order:
        axis = abs(signed) - 1
        if signed > 0:
            f, cur = apply_shift(sys, axis, cur)
        else:
            f, cur = apply_inverse_shift(sys, axis, cur)
        if cur is None:
            return _zero()
        factor *= f
    if factor == 0:
        return _zero()
    return (factor, cur)


def _pair_closed_form(sys: LatticeShiftSystem, k: int, l: int, i: MultiIndex):
    """The two-step closed form for T_k T_l e_i."""
    target = madd(i, madd(unit(k, sys.n), unit(l, sys.n)))
    at = sys.value(target)
    if at != 0:
        return (at / sys.value(i), target)
    if k in sys.invertible and l in sys.invertible:
        j = project_invertible(i, sys.invertible)
        return (sys.value(madd(j, madd(unit(k, sys.n), unit(l, sys.n)))) /
                sys.value(j), target)
    return _zero()


@dataclass
class CommutationReport:
    pairs_checked: int
    violations: List[tuple]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_commutation(sys: LatticeShiftSystem, axes: Optional[Tuple[int, int]] = None,
                      rho: Optional[int] = None) -> CommutationReport:
    """Exhaustively compare T_k T_l, T_l T_k and the closed form on the box."""
    rho = sys.box if rho is None else min(rho, sys.box)
    pairs = [axes] if axes else [(k, l) for k in range(sys.n)
                                 for l in range(k, sys.n)]
    checked = 0
    violations = []
    for (k, l) in pairs:
        bump = madd(unit(k, sys.n), unit(l, sys.n))
        for i in domain_points(sys.n, rho, sys.invertible):
            if not sys.in_basis(madd(i, bump)) or norm_inf(madd(i, bump)) > rho:
                continue
            checked += 1
            kl = _compose_pair(sys, k, l, i)
            lk = _compose_pair(sys, l, k, i)
            closed = _pair_closed_form(sys, k, l, i)
            if kl != lk or kl != closed:
                violations.append((k, l, i, kl, lk, closed))
    return CommutationReport(pairs_checked=checked, violations=violations)


def _compose_pair(sys, k, l, i):
    f1, t1 = apply_shift(sys, l, i)
    if t1 is None:
        return _zero()
    f2, t2 = apply_shift(sys, k, t1)
    if t2 is None:
        return _zero()
    f = f1 * f2
    return (f, t2) if f != 0 else _zero()


def power_norms(sys: LatticeShiftSystem, m: MultiIndex) -> Fraction:
    """Windowed norm of T^m: the largest scalar factor over the basis.

    Equals the data value at ``m`` for submultiplicative data (attained at
    the origin); truncation can only lower it.
    """
    m = tuple(m)
    if not in_domain(m, sys.invertible) or norm_inf(m) > sys.box:
        raise ValueError(f"{m} is outside the boxed domain")
    best = Fraction(0)
    found = False
    for i in sys.basis():
        if not sys.in_basis(madd(i, m)):
            continue
        found = True
        f, target = apply_monomial(sys, m, i)
        mag = abs(f)
        if mag > best:
            best = mag
    if not found:
        raise BoxOverflowError("no basis vector admits this monomial in the box")
    return best
