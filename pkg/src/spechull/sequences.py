"""One-variable submultiplicative sequence prefixes.

A valid prefix ``a_0..a_N`` has ``a_0 = 1`` and ``a_{i+j} <= a_i * a_j`` for
every in-window pair.  This module validates raw data, generates the two
recursive example families (one whose backward ratio ``a_{n-1}/a_n`` is
unbounded, one that realizes a prescribed inner spectral radius), computes
windowed ratio-supremum bounds, and derives the optimal annulus that any
realization's spectrum must meet.

Generated sequences are stored in exact base-power form (integer exponents of
a rational base), so every derived quantity stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .numerics import (
    INF,
    BasePower,
    DEFAULT_TOL,
    Scalar,
    as_fraction,
    ext_root,
    is_exact,
    is_inf,
)


class ValidationError(ValueError):
    """Raised when raw data fails a structural check.

    ``kind`` is one of ``not-normalized``, ``not-submultiplicative``,
    ``zero-not-propagated``; ``witness`` identifies the first offending
    index or pair.
    """

    def __init__(self, kind: str, witness, message: str):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class ZeroTermError(ValueError):
    """A ratio bound was requested for data containing a zero term."""


@dataclass(frozen=True)
class Bound:
    """A computed bound plus a certificate flag.

    ``exact`` is True only when the value is proven equal to the true
    supremum/infimum (closed forms, or suprema attained structurally);
    window-truncated estimates carry ``exact=False``.  ``empty_window``
    marks an infinite value that arose from an empty windowed search set
    rather than a witness.
    """

    value: Scalar
    exact: bool
    empty_window: bool = False

    def as_float(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class Annulus:
    inner: Bound
    outer: Bound

    @property
    def degenerate(self) -> bool:
        return self.outer.value == 0


@dataclass(frozen=True)
class Provenance:
    """Construction record for generated sequences.

    Carries the closed forms proven for the generating recursion, which turn
    windowed estimates into certified values.
    """

    kind: str  # "constant" | "inner-radius" | "unbounded-ratio"
    base: Fraction = Fraction(1)
    scale: Scalar = Fraction(1)
    first_instances: tuple = ()  # ((exponent, index), ...) for inner-radius

    def first_instance(self, m: int) -> Optional[int]:
        for e, n in self.first_instances:
            if e == m:
                return n
        return None

    def rescaled(self, factor) -> "Provenance":
        return Provenance(self.kind, self.base, _mul_scalar(self.scale, factor),
                          self.first_instances)


def _mul_scalar(x, y):
    if is_exact(x) and is_exact(y):
        return as_fraction(x) * as_fraction(y)
    return float(x) * float(y)


class NormSequence:
    """A validated prefix of a submultiplicative sequence.

    Exactly one representation is active: ``terms`` (a tuple of nonnegative
    rationals/floats) or base-power form (``base`` with an integer exponent
    array, term ``n`` being ``base**exponents[n]``).
    """

    __slots__ = ("terms", "base", "exponents", "provenance")

    def __init__(self, terms=None, base=None, exponents=None, provenance=None):
        if (terms is None) == (exponents is None):
            raise ValueError("exactly one of terms/exponents must be given")
        if exponents is not None:
            base = Fraction(base)
            if base <= 1:
                raise ValueError("exponent form needs a rational base > 1")
            exponents = np.asarray(exponents, dtype=np.int64)
        self.terms = tuple(terms) if terms is not None else None
        self.base = base
        self.exponents = exponents
        self.provenance = provenance

    @property
    def window(self) -> int:
        """Largest index N of the stored prefix a_0..a_N."""
        if self.terms is not None:
            return len(self.terms) - 1
        return len(self.exponents) - 1

    @property
    def is_exponent_form(self) -> bool:
        return self.exponents is not None

    def term(self, n: int):
        if self.terms is not None:
            return self.terms[n]
        return BasePower(self.base, int(self.exponents[n]))

    def term_values(self) -> list:
        """All terms as plain numbers (exact rationals where possible)."""
        if self.terms is not None:
            return list(self.terms)
        b = self.base
        return [b ** int(e) for e in self.exponents]

    def first_zero(self) -> Optional[int]:
        if self.terms is None:
            return None
        for n, a in enumerate(self.terms):
            if a == 0:
                return n
        return None

    def has_zero(self) -> bool:
        return self.first_zero() is not None

    def __len__(self):
        return self.window + 1

    def __eq__(self, other):
        if not isinstance(other, NormSequence):
            return NotImplemented
        if len(self) != len(other):
            return False
        return all(_scalar_eq(self.term(n), other.term(n)) for n in range(len(self)))

    def __repr__(self):
        if self.is_exponent_form:
            head = ",".join(str(e) for e in self.exponents[:6])
            return f"NormSequence(base={self.base}, exponents=[{head}...], N={self.window})"
        return f"NormSequence(terms={self.terms[:6]}..., N={self.window})"


def _scalar_eq(a, b) -> bool:
    if isinstance(a, BasePower) or isinstance(b, BasePower):
        return as_fraction(a) == as_fraction(b) if (is_exact(a) and is_exact(b)) else float(a) == float(b)
    return a == b


def _coerce_term(x):
    if isinstance(x, bool):
        raise ValueError("boolean is not a valid term")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, BasePower):
        return x.value()
    if isinstance(x, float):
        if not np.isfinite(x):
            raise ValueError("terms must be finite")
        return x
    raise ValueError(f"unsupported term type: {type(x).__name__}")


def validate(raw, tol: float = DEFAULT_TOL) -> NormSequence:
    """Check normalization, zero propagation and full-pair submultiplicativity.

    Returns a validated :class:`NormSequence` or raises
    :class:`ValidationError` naming the first violated index/pair.  Float
    data is compared with relative tolerance ``tol``; exact data exactly.
    """
    if isinstance(raw, NormSequence):
        seq = raw
    elif isinstance(raw, dict):
        seq = from_json_dict(raw)
    else:
        items = [_coerce_term(x) for x in raw]
        if not items:
            raise ValueError("empty sequence")
        if any((isinstance(a, Fraction) and a < 0) or (isinstance(a, float) and a < 0)
               for a in items):
            raise ValueError("terms must be nonnegative")
        seq = NormSequence(terms=items)

    if seq.is_exponent_form:
        e = seq.exponents
        if e[0] != 0:
            raise ValidationError("not-normalized", 0, "a_0 != 1")
        _scan_exponents(e)
        return seq

    a = seq.terms
    n_terms = len(a)
    if a[0] != 1:
        raise ValidationError("not-normalized", 0, f"a_0 = {a[0]} != 1")
    first_zero = None
    for n, v in enumerate(a):
        if v == 0 and first_zero is None:
            first_zero = n
        elif v != 0 and first_zero is not None:
            raise ValidationError(
                "zero-not-propagated", n,
                f"a_{first_zero} = 0 but a_{n} = {v} != 0")
    limit = first_zero if first_zero is not None else n_terms
    inexact = any(isinstance(v, float) for v in a)
    for i in range(1, limit):
        ai = a[i]
        for j in range(i, limit):
            if i + j >= n_terms:
                break
            lhs, rhs = a[i + j], ai * a[j]
            ok = lhs <= rhs * (1 + tol) if inexact else lhs <= rhs
            if not ok:
                raise ValidationError(
                    "not-submultiplicative", (i, j),
                    f"a_{i+j} = {lhs} > a_{i}*a_{j} = {rhs}")
    return seq


def _scan_exponents(e: np.ndarray) -> None:
    """Full-pair scan e[i+j] <= e[i] + e[j], vectorized over j."""
    n = len(e)
    for i in range(1, n):
        lhs = e[2 * i:]
        if lhs.size == 0:
            break
        rhs = e[i] + e[i:i + lhs.size]
        bad = lhs > rhs
        if bad.any():
            j = i + int(np.argmax(bad))
            raise ValidationError(
                "not-submultiplicative", (i, j),
                f"exponent[{i+j}] > exponent[{i}] + exponent[{j}]")


_GEN_CACHE: dict = {}


def gen_unbounded_ratio(R, N: int) -> NormSequence:
    """Sequence whose backward ratio sup grows without bound.

    Starts ``1, R, R**2`` and continues with the two-case recursion: a reset
    to ``R`` right after each new running maximum, otherwise the minimum of
    all in-window products.  Spectral radius tends to 1 while
    ``sup a_{n-1}/a_n`` is infinite in the limit.
    """
    R = Fraction(R)
    if R <= 1:
        raise ValueError("base must exceed 1")
    if N < 2:
        raise ValueError("window must be at least 2")
    key = ("u", R, N)
    if key in _GEN_CACHE:
        return _GEN_CACHE[key]
    e = np.zeros(N + 1, dtype=np.int64)
    e[1], e[2] = 1, 2
    run_max = 1  # max of e[1..n-2] while processing index n
    for n in range(3, N + 1):
        if e[n - 1] > run_max:
            e[n] = 1
        else:
            e[n] = int((e[1:n] + e[n - 1:0:-1]).min())
        run_max = max(run_max, int(e[n - 1]))
    seq = NormSequence(base=R, exponents=e,
                       provenance=Provenance("unbounded-ratio", base=R))
    _GEN_CACHE[key] = seq
    return seq


def gen_inner_radius(r, N: int) -> NormSequence:
    """Sequence forcing inner spectral radius exactly ``r`` (0 < r <= 1).

    For ``r = 1`` this is the constant sequence.  For ``r < 1`` it runs the
    recursion with base ``R = 1/r``: after the first instance of each new
    power ``R**m`` the next ``m-1`` terms step down ``R**(m-1)..R``, otherwise
    the minimum of in-window products.  First-instance indices are recorded;
    they certify that the windowed backward bounds attain ``R**k``.
    """
    r = Fraction(r)
    if not 0 < r <= 1:
        raise ValueError("radius must lie in (0, 1]")
    if N < 0:
        raise ValueError("window must be nonnegative")
    key = ("i", r, N)
    if key in _GEN_CACHE:
        return _GEN_CACHE[key]
    if r == 1:
        seq = NormSequence(base=Fraction(2), exponents=np.zeros(N + 1, dtype=np.int64),
                           provenance=Provenance("constant", base=Fraction(1)))
        _GEN_CACHE[key] = seq
        return seq
    R = 1 / r
    e = np.zeros(N + 1, dtype=np.int64)
    first = [(1, 1), (2, 2)]
    if N >= 1:
        e[1] = 1
    if N >= 2:
        e[2] = 2
    max_exp = 2 if N >= 2 else N
    forced = 1 if N >= 2 else 0  # countdown value owed after the initial R**2
    for n in range(3, N + 1):
        if forced >= 1:
            e[n] = forced
            forced -= 1
        else:
            e[n] = int((e[1:n] + e[n - 1:0:-1]).min())
            if e[n] > max_exp:
                max_exp = int(e[n])
                first.append((max_exp, n))
                forced = max_exp - 1
    seq = NormSequence(base=R, exponents=e,
                       provenance=Provenance("inner-radius", base=R,
                                             first_instances=tuple(first)))
    _GEN_CACHE[key] = seq
    return seq


def ratio_sup(seq: NormSequence, shift: int, window: Optional[int] = None) -> Bound:
    """Best bound on the norm of the ``shift``-th power of any realization.

    This is the supremum of ``a_{n+shift}/a_n``.  For ``shift >= 0`` it
    equals ``a_shift`` exactly.  For negative shifts the value is the
    windowed supremum, certified only when the generating recursion provides
    a closed form.
    """
    N = seq.window
    window = N if window is None else min(window, N)
    if abs(shift) > window:
        raise ValueError("shift exceeds the window")
    if seq.has_zero():
        raise ZeroTermError("ratio bounds need strictly positive terms")
    if shift >= 0:
        return Bound(seq.term(shift), exact=True)

    prov = seq.provenance
    k = -shift
    if prov is not None and prov.kind == "constant":
        return Bound(_scale_power(prov.scale, shift), exact=True)
    if prov is not None and prov.kind == "inner-radius":
        # backward bounds attain base**k; scaling multiplies by scale**shift
        value = BasePower(prov.base, k) if prov.scale == 1 else \
            _mul_scalar(_scale_power(prov.scale, shift), prov.base ** k)
        return Bound(value, exact=True)

    return Bound(_windowed_ratio_sup(seq, shift, window), exact=False)


def _scale_power(scale, k: int):
    if is_exact(scale):
        return as_fraction(scale) ** k
    return float(scale) ** k


def _windowed_ratio_sup(seq: NormSequence, shift: int, window: int):
    """max of a_{n+shift}/a_n with both indices inside [0, window]."""
    if seq.is_exponent_form:
        e = seq.exponents[:window + 1]
        if shift < 0:
            diffs = e[:window + 1 + shift] - e[-shift:]
        else:
            diffs = e[shift:] - e[:window + 1 - shift]
        return BasePower(seq.base, int(diffs.max()))
    lo = max(0, -shift)
    best = None
    for n in range(lo, window - max(0, shift) + 1):
        v = _div(seq.terms[n + shift], seq.terms[n])
        if best is None or v > best:
            best = v
    return best


def _div(x, y):
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x / y
    return float(x) / float(y)


def inverse_norm_lower_bound(seq: NormSequence) -> Scalar:
    """max of a_{n-1}/a_n; every invertible realization x has ||x^-1|| >= this."""
    if seq.has_zero():
        raise ZeroTermError("inverse-norm bound needs strictly positive terms")
    return _windowed_ratio_sup(seq, -1, seq.window)


def ratio_trend_unbounded(seq: NormSequence) -> bool:
    """Heuristic flag: backward-ratio bound doubles across three window doublings.

    Never a certificate -- finiteness of the limiting bound is undecidable
    from a prefix.
    """
    N = seq.window
    if N < 16:
        return False
    windows = [N // 8, N // 4, N // 2, N]
    bounds = [float(_windowed_ratio_sup(seq, -1, w)) for w in windows]
    return all(b2 >= 2 * b1 for b1, b2 in zip(bounds, bounds[1:]))


def annulus(seq: NormSequence, k_max: Optional[int] = None) -> Annulus:
    """Smallest annulus any realization's spectrum must meet.

    Zero data collapses to the origin.  Otherwise the outer radius is the
    minimum of ``a_k**(1/k)`` over the window (a certified upper bound of the
    true outer radius) and the inner radius the reciprocal minimum of the
    backward bounds, exact only when closed forms apply.
    """
    N = seq.window
    k_max = N if k_max is None else min(k_max, N)
    if k_max < 1:
        raise ValueError("window must allow k >= 1")
    if seq.has_zero():
        zero = Bound(Fraction(0), exact=True)
        return Annulus(inner=zero, outer=zero)

    outer_val, outer_k = _minimize_root(seq, k_max, forward=True)
    prov = seq.provenance
    if prov is not None and prov.kind == "constant":
        outer = Bound(outer_val, exact=True)
        inner = Bound(_scale_power(prov.scale, 1), exact=True)
        return Annulus(inner=inner, outer=outer)
    if prov is not None and prov.kind == "inner-radius":
        inner_val = _div_scalars(_scale_power(prov.scale, 1), prov.base)
        return Annulus(inner=Bound(inner_val, exact=True),
                       outer=Bound(outer_val, exact=False))
    if prov is not None and prov.kind == "unbounded-ratio":
        return Annulus(inner=Bound(Fraction(0), exact=True),
                       outer=Bound(outer_val, exact=False))

    if ratio_trend_unbounded(seq):
        return Annulus(inner=Bound(Fraction(0), exact=False),
                       outer=Bound(outer_val, exact=False))
    inner_rec, _ = _minimize_root(seq, k_max, forward=False)
    inner_val = _reciprocal(inner_rec)
    return Annulus(inner=Bound(inner_val, exact=False),
                   outer=Bound(outer_val, exact=False))


def _div_scalars(x, y):
    if is_exact(x) and is_exact(y):
        return as_fraction(x) / as_fraction(y)
    return float(x) / float(y)


def _reciprocal(x):
    if is_exact(x):
        f = as_fraction(x)
        return 1 / f
    return 1.0 / float(x)


def _minimize_root(seq: NormSequence, k_max: int, forward: bool):
    """Minimize b_k**(1/k) over 1 <= k <= k_max, with exact selection.

    ``forward`` minimizes over a_k; otherwise over the windowed backward
    bounds.  Returns (value, argmin k); the value is exact when the root is
    rational.
    """
    if seq.is_exponent_form:
        e = seq.exponents
        best_k, best_q = None, None
        for k in range(1, k_max + 1):
            if forward:
                exp = int(e[k])
            else:
                diffs = e[:seq.window + 1 - k] - e[k:]
                exp = int(diffs.max())
            q = Fraction(exp, k)
            if best_q is None or q < best_q:
                best_q, best_k = q, k
        if best_q.denominator == 1:
            return BasePower(seq.base, best_q.numerator), best_k
        return float(seq.base) ** float(best_q), best_k
    best_val, best_k = None, None
    for k in range(1, k_max + 1):
        bk = seq.terms[k] if forward else _windowed_ratio_sup(seq, -k, seq.window)
        if best_val is None or _root_less(bk, k, best_val, best_k):
            best_val, best_k = bk, k
    return ext_root(best_val, best_k), best_k


def _root_less(a, ka: int, b, kb: int) -> bool:
    """a**(1/ka) < b**(1/kb), exact for rationals via cross powers."""
    if is_exact(a) and is_exact(b):
        return as_fraction(a) ** kb < as_fraction(b) ** ka
    return float(a) ** (1.0 / ka) < float(b) ** (1.0 / kb)


def scale(seq: NormSequence, factor) -> NormSequence:
    """The rescaled sequence ``(factor**n * a_n)``; annulus radii scale along."""
    if isinstance(factor, (int, Fraction)):
        factor = Fraction(factor)
        if factor <= 0:
            raise ValueError("scale factor must be positive")
    elif not (isinstance(factor, float) and factor > 0):
        raise ValueError("scale factor must be positive")
    if factor == 1:
        return seq
    prov = seq.provenance.rescaled(factor) if seq.provenance else None
    if seq.is_exponent_form and isinstance(factor, Fraction):
        t = _exact_log(factor, seq.base)
        if t is not None:
            e = seq.exponents + t * np.arange(len(seq.exponents), dtype=np.int64)
            return NormSequence(base=seq.base, exponents=e, provenance=prov)
    terms = []
    power = Fraction(1) if isinstance(factor, Fraction) else 1.0
    for n in range(len(seq)):
        a = seq.term(n)
        a = as_fraction(a) if is_exact(a) and isinstance(factor, Fraction) else float(a)
        terms.append(_mul_scalar(power, a))
        power = _mul_scalar(power, factor)
    return NormSequence(terms=terms, provenance=prov)


def _exact_log(x: Fraction, base: Fraction) -> Optional[int]:
    """Integer t with base**t == x, if one exists."""
    if x == 1:
        return 0
    t = round(math.log(float(x)) / math.log(float(base)))
    if t != 0 and base**t == x:
        return t
    return None


def circle_possible(seq: NormSequence, k_max: Optional[int] = None) -> str:
    """Can the spectrum be exactly the circle at the limiting radius?

    ``"yes"``/``"no"`` require certified backward bounds (generated data);
    window-truncated data is ``"undetermined"``.
    """
    if seq.has_zero():
        raise ZeroTermError("circle test needs strictly positive terms")
    prov = seq.provenance
    if prov is None:
        return "undetermined"
    if prov.kind == "constant":
        return "yes"
    if prov.kind in ("inner-radius", "unbounded-ratio"):
        # inner radius is scale/base (< limit radius) or 0: the circle is
        # forced only when the two coincide, i.e. base == 1.
        return "no"
    return "undetermined"


def two_sided_bounds(seq: NormSequence, lo: int, hi: int) -> dict:
    """Exact ratio-bound collection on [lo, hi] for generated sequences.

    Forms a two-sided submultiplicative family (norms of all powers of an
    invertible realization); requires certified closed forms.
    """
    out = {}
    for i in range(lo, hi + 1):
        b = ratio_sup(seq, i)
        if not b.exact:
            raise ValueError("two-sided bounds need certified values")
        out[i] = b.value
    return out


# ---------------------------------------------------------------------------
# JSON wire format


def from_json_dict(d) -> NormSequence:
    """Parse ``{"values": [...]}`` or ``{"base": R, "exponents": [...]}``.

    A bare JSON array is accepted as shorthand for ``values``.  A null
    exponent stands for the leading ``a_0 = 1`` convention.
    """
    if isinstance(d, (list, tuple)):
        return NormSequence(terms=[_coerce_term(x) for x in d])
    if "exponents" in d:
        base = _parse_number(d.get("base", 2))
        exps = [0 if e is None else int(e) for e in d["exponents"]]
        return NormSequence(base=Fraction(base), exponents=np.asarray(exps, dtype=np.int64))
    if "values" in d:
        return NormSequence(terms=[_coerce_term(_parse_number(x)) for x in d["values"]])
    raise ValueError("sequence JSON needs 'values' or 'exponents'")


def _parse_number(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


def scalar_to_json(x):
    """Numbers pass through; infinities encode as the string "inf"."""
    if is_inf(x):
        return "inf"
    if isinstance(x, BasePower):
        x = x.value()
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    return x


def bound_to_json(b: Bound) -> dict:
    out = {"value": scalar_to_json(b.value), "exact": b.exact}
    if b.empty_window:
        out["empty_window"] = True
    return out


def annulus_to_json(a: Annulus) -> dict:
    return {"inner": bound_to_json(a.inner), "outer": bound_to_json(a.outer)}


def to_json_dict(seq: NormSequence) -> dict:
    if seq.is_exponent_form:
        return {"base": scalar_to_json(seq.base),
                "exponents": [int(e) for e in seq.exponents]}
    return {"values": [scalar_to_json(t) for t in seq.terms]}
