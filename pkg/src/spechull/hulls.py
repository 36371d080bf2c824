"""Circled hull geometry: membership, separation, reduction, sections.

A hull spec records monomial constraints ``|s_1^{i_1} ... s_n^{i_n}| <=
bound_i``.  With exponents from the nonnegative orthant the constraints cut
out the smallest polynomially convex circled set compatible with the norm
data; allowing mixed-sign exponents (with every forward unit direction
present, which keeps the set bounded) they cut out the rationally convex
connected circled one.  Membership depends only on moduli, so each
constraint is a half-space in log-modulus space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .lattice import MultiIndex, NormField, RatioField, in_orthant, norm_inf, unit
from .numerics import INF, as_fraction, is_exact, is_inf
from .sequences import NormSequence, scalar_to_json

Point = Tuple[complex, ...]


class MemberError(ValueError):
    """A path endpoint lies outside the hull."""


class HullViolation(ValueError):
    """A point escapes the norm hull; carries the separating monomial."""

    def __init__(self, point, monomial):
        super().__init__(f"point {point} violates monomial {monomial}")
        self.point = point
        self.monomial = monomial


def _constraint_order(idx: MultiIndex):
    return (sum(abs(c) for c in idx), idx)


@dataclass(frozen=True)
class HullSpec:
    """Monomial modulus constraints defining a circled set."""

    n: int
    kind: str  # "polynomial" | "rational"
    constraints: Dict[MultiIndex, object]

    def __post_init__(self):
        if self.kind not in ("polynomial", "rational"):
            raise ValueError("kind must be polynomial or rational")
        for idx in self.constraints:
            if len(idx) != self.n:
                raise ValueError(f"constraint index {idx} has wrong dimension")
            if self.kind == "polynomial" and not in_orthant(idx):
                raise ValueError(f"polynomial spec cannot constrain {idx}")
        if self.kind == "rational":
            for k in range(self.n):
                e = unit(k, self.n)
                if e not in self.constraints or is_inf(self.constraints[e]):
                    raise ValueError(
                        f"rational spec needs a finite bound in direction {e}")

    def ordered_indices(self) -> List[MultiIndex]:
        return sorted(self.constraints, key=_constraint_order)

    @classmethod
    def from_sequence(cls, seq: NormSequence, window: Optional[int] = None) -> "HullSpec":
        window = seq.window if window is None else min(window, seq.window)
        cons = {(k,): seq.term(k) for k in range(1, window + 1)}
        return cls(n=1, kind="polynomial", constraints=cons)

    @classmethod
    def from_field(cls, field: NormField, box: Optional[int] = None) -> "HullSpec":
        from .lattice import orthant_points
        box = field.box if box is None else box
        cons = {i: field.value(i) for i in orthant_points(field.n, box)
                if any(c != 0 for c in i)}
        return cls(n=field.n, kind="polynomial", constraints=cons)

    @classmethod
    def from_ratio_field(cls, rf: RatioField) -> "HullSpec":
        cons = {}
        for i, b in rf.values.items():
            if all(c == 0 for c in i):
                continue
            cons[i] = b.value
        return cls(n=rf.field.n, kind="rational", constraints=cons)

    @classmethod
    def from_bounds(cls, n: int, kind: str, bounds: Mapping[MultiIndex, object]) -> "HullSpec":
        return cls(n=n, kind=kind, constraints={tuple(i): v for i, v in bounds.items()})


def moduli_of(point: Sequence) -> tuple:
    """Coordinate moduli; plain numbers are taken as moduli directly."""
    out = []
    for s in point:
        if isinstance(s, complex):
            out.append(abs(s))
        elif isinstance(s, (int, Fraction)):
            if s < 0:
                raise ValueError("a modulus cannot be negative")
            out.append(Fraction(s))
        elif isinstance(s, float):
            if s < 0:
                raise ValueError("a modulus cannot be negative")
            out.append(s)
        else:
            raise ValueError(f"unsupported coordinate {s!r}")
    return tuple(out)


def _violates_direct(idx, bound, mods, tol):
    """Monomial-product comparison; exact when both sides are exact."""
    if is_inf(bound):
        return False
    exact = all(is_exact(m) for m in mods) and is_exact(bound)
    if any(m == 0 and c < 0 for m, c in zip(mods, idx)):
        return True  # |s^i| is infinite against a finite bound
    if exact:
        prod = Fraction(1)
        for m, c in zip(mods, idx):
            if c != 0:
                prod *= Fraction(m) ** c
        return prod > as_fraction(bound)
    prod = 1.0
    for m, c in zip(mods, idx):
        if c != 0:
            prod *= float(m) ** c
    return prod > float(bound) * (1 + tol)


def _violates_log(idx, bound, mods, tol):
    """Half-space comparison in log-modulus space.

    Zero moduli carry log value -inf: against a negative exponent the
    constraint fails outright, against a positive one the whole sum is -inf
    and the constraint holds.
    """
    if is_inf(bound):
        return False
    total = 0.0
    minus_inf = False
    for m, c in zip(mods, idx):
        if c == 0:
            continue
        m = float(m)
        if m == 0.0:
            if c < 0:
                return True
            minus_inf = True
        elif not minus_inf:
            total += c * math.log(m)
    if minus_inf:
        return False
    b = float(bound)
    if b == 0.0:
        return True  # a finite log value exceeds -inf
    return total > math.log(b) + tol


def membership(spec: HullSpec, point: Sequence, method: str = "log",
               tol: float = 1e-9) -> bool:
    """Does the point satisfy every constraint?

    ``method="direct"`` multiplies modulus powers (exact arithmetic when the
    moduli and bounds are exact); ``method="log"`` evaluates the half-space
    form with an absolute log-scale tolerance.  The two are independent
    routes to the same predicate.
    """
    return separating_monomial(spec, point, method=method, tol=tol) is None


def separating_monomial(spec: HullSpec, point: Sequence, method: str = "log",
                        tol: float = 1e-9) -> Optional[MultiIndex]:
    """The first violated constraint in (total degree, lex) scan order, or None."""
    mods = moduli_of(point)
    check = _violates_direct if method == "direct" else _violates_log
    for idx in spec.ordered_indices():
        if check(idx, spec.constraints[idx], mods, tol):
            return idx
    return None


def membership_batch(spec: HullSpec, moduli: np.ndarray, method: str = "log",
                     tol: float = 1e-9) -> np.ndarray:
    """Vectorized membership for an array of positive modulus rows."""
    mods = np.asarray(moduli, dtype=float)
    if (mods <= 0).any():
        raise ValueError("batch evaluation expects strictly positive moduli")
    idxs = [i for i in spec.ordered_indices() if not is_inf(spec.constraints[i])]
    A = np.array(idxs, dtype=float)
    b = np.array([float(spec.constraints[i]) for i in idxs])
    if (b == 0).any():
        raise ValueError("batch evaluation expects positive bounds")
    if method == "log":
        lhs = np.log(mods) @ A.T
        return (lhs <= np.log(b) + tol).all(axis=1)
    powers = mods[:, None, :] ** A[None, :, :]
    prod = powers.prod(axis=2)
    return (prod <= b * (1 + tol)).all(axis=1)


def reduce_constraints(spec: HullSpec, slack: float = 1e-12) -> HullSpec:
    """Drop constraints implied by the others in log space.

    Each finite positive constraint is the half-space ``i . u <= log bound``;
    a candidate is redundant when maximizing its monomial over the remaining
    half-spaces cannot exceed its own bound.  Candidates are tried from most
    complex to simplest, so the survivors form a simplest-possible
    description of the same region.  Forward unit bounds of a rational spec
    are structural (they certify boundedness) and are never offered up.
    """
    from scipy.optimize import linprog

    survivors = dict(spec.constraints)
    structural = {unit(k, spec.n) for k in range(spec.n)} if spec.kind == "rational" else set()
    reducible = [i for i, bnd in spec.constraints.items()
                 if not is_inf(bnd) and bnd != 0 and i not in structural]
    for cand in sorted(reducible, key=_constraint_order, reverse=True):
        others = [(i, bnd) for i, bnd in survivors.items()
                  if i != cand and not is_inf(bnd) and bnd != 0]
        if not others:
            continue
        A = np.array([list(i) for i, _ in others], dtype=float)
        b = np.array([math.log(float(bnd)) for _, bnd in others])
        res = linprog(c=[-c for c in cand], A_ub=A, b_ub=b,
                      bounds=[(None, None)] * spec.n, method="highs")
        if res.status == 0 and -res.fun <= math.log(float(survivors[cand])) + slack:
            del survivors[cand]
    return HullSpec(n=spec.n, kind=spec.kind, constraints=survivors)


def connectivity_witness(spec: HullSpec, p: Sequence, q: Sequence,
                         steps: int = 100, tol: float = 1e-9) -> List[Point]:
    """A sampled in-hull path between two member points.

    Moduli interpolate geometrically (log-linearly, so every sample stays
    inside the log-convex region) and phases linearly.
    """
    if not membership(spec, p, tol=tol):
        raise MemberError(f"start point {p} is outside the hull")
    if not membership(spec, q, tol=tol):
        raise MemberError(f"end point {q} is outside the hull")
    pm, qm = moduli_of(p), moduli_of(q)
    if any(float(m) <= 0 for m in pm + qm):
        raise ValueError("path interpolation needs positive moduli")
    pa = [math.atan2(complex(s).imag, complex(s).real) for s in p]
    qa = [math.atan2(complex(s).imag, complex(s).real) for s in q]
    deltas = [(b - a + math.pi) % (2 * math.pi) - math.pi for a, b in zip(pa, qa)]
    path = []
    for step in range(steps + 1):
        t = step / steps
        coords = []
        for k in range(spec.n):
            r = float(pm[k]) ** (1 - t) * float(qm[k]) ** t
            ang = pa[k] + t * deltas[k]
            coords.append(complex(r * math.cos(ang), r * math.sin(ang)))
        pt = tuple(coords)
        if not membership(spec, pt, tol=max(tol, 1e-9)):
            raise AssertionError(f"interpolated point {pt} left the hull")
        path.append(pt)
    return path


def section_radii(spec: HullSpec, free_axis: int, resolution: int = 64,
                  margin: float = 1.1) -> List[Fraction]:
    """A rational modulus grid reaching just past the free-axis bound."""
    e = unit(free_axis, spec.n)
    top = spec.constraints.get(e)
    top = 2.0 if top is None or is_inf(top) else float(top)
    rmax = Fraction(str(round(margin * max(top, 1e-9), 9)))
    return [Fraction(j, resolution - 1) * rmax for j in range(resolution)]


def cross_section(spec: HullSpec, fixed: Mapping[int, object], free_axis: int,
                  radii: Optional[Iterable] = None, method: str = "direct",
                  tol: float = 1e-9) -> List[tuple]:
    """Radial in/out table along one coordinate with the others' moduli fixed.

    For one-variable specs this reproduces the optimal annulus.
    """
    if free_axis in fixed or len(fixed) != spec.n - 1:
        raise ValueError("fix the moduli of exactly the other coordinates")
    negative_axes = {k for idx in spec.constraints
                     for k, c in enumerate(idx) if c < 0}
    for k, v in fixed.items():
        if k in negative_axes and (v == 0):
            raise ValueError(f"axis {k} carries inverse constraints; "
                             "its fixed modulus must be positive")
    if radii is None:
        radii = section_radii(spec, free_axis)
    rows = []
    for r in radii:
        point = [None] * spec.n
        for k, v in fixed.items():
            point[k] = v
        point[free_axis] = r
        rows.append((r, membership(spec, point, method=method, tol=tol)))
    return rows


# -- spectrum models ----------------------------------------------------------


@dataclass(frozen=True)
class SpectrumDescriptor:
    """A desk-scale spectrum description: an optional hull plus extra points."""

    base: Optional[HullSpec] = None
    points: frozenset = frozenset()

    def contains(self, point, tol: float = 1e-9) -> bool:
        if self.base is not None and membership(self.base, point, method="direct", tol=tol):
            return True
        return tuple(point) in self.points


@dataclass(frozen=True)
class SpectrumModel:
    """Norm data (as its realizability hull) paired with a spectrum."""

    norms: HullSpec
    spectrum: SpectrumDescriptor


def augment_spectrum(model: SpectrumModel, K: Iterable[Sequence]) -> SpectrumModel:
    """Attach extra spectrum inside the norm hull; norms stay untouched.

    Every point of ``K`` must satisfy the norm-hull constraints -- the
    direct-sum construction preserves each monomial norm exactly then.
    Points already covered by the spectrum descriptor are absorbed.
    """
    pts = [tuple(p) for p in K]
    if not pts:
        return model
    for pt in pts:
        sep = separating_monomial(model.norms, pt, method="direct")
        if sep is not None:
            raise HullViolation(pt, sep)
    extra = frozenset(pt for pt in pts if not model.spectrum.contains(pt))
    if not extra:
        return model
    desc = SpectrumDescriptor(base=model.spectrum.base,
                              points=model.spectrum.points | extra)
    return SpectrumModel(norms=model.norms, spectrum=desc)


# -- JSON ----------------------------------------------------------------------


def hull_to_json(spec: HullSpec) -> dict:
    return {
        "n": spec.n,
        "kind": spec.kind,
        "constraints": [{"i": list(i), "bound": scalar_to_json(spec.constraints[i])}
                        for i in spec.ordered_indices()],
    }


def hull_from_json(d) -> HullSpec:
    cons = {}
    for item in d["constraints"]:
        raw = item["bound"]
        if raw == "inf":
            bound = INF
        elif isinstance(raw, str):
            bound = Fraction(raw)
        elif isinstance(raw, float):
            bound = Fraction(str(raw))
        else:
            bound = Fraction(raw)
        cons[tuple(int(c) for c in item["i"])] = bound
    return HullSpec(n=int(d["n"]), kind=d["kind"], constraints=cons)
