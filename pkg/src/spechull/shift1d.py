"""Weighted-shift realizations of one-variable norm data.

A forward shift with weights ``w_n = a_{n+1}/a_n`` realizes a valid prefix
exactly: the norm of its k-th power is the largest k-fold consecutive weight
product, which telescopes to ``max_n a_{n+k}/a_n``.  Operators are kept as
weight maps over an index window, never as matrices, so every power norm is
an exact ratio.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Optional

from .numerics import ext_root
from .sequences import Bound, NormSequence, _root_less


class ModeError(ValueError):
    """Operation requires the other shift mode."""


class ZeroWeightError(ValueError):
    """Bilateral shifts need strictly positive two-sided data."""


class WeightedShift:
    """A banded single-diagonal operator described by its weight map.

    ``unilateral`` shifts act on indices ``0..window`` and realize a norm
    prefix; ``bilateral`` shifts act on ``-window..window`` and are built
    from positive two-sided bound data, making them invertible.
    """

    __slots__ = ("mode", "direction", "window", "_norms")

    def __init__(self, mode: str, norms, window: int, direction: str = "forward"):
        if mode not in ("unilateral", "bilateral"):
            raise ValueError("mode must be unilateral or bilateral")
        self.mode = mode
        self.direction = direction
        self.window = window
        self._norms = norms

    # -- data access ---------------------------------------------------------

    def norm_at(self, n: int):
        """The underlying a_n (or two-sided bound) at index n."""
        if self.mode == "unilateral":
            if not 0 <= n <= self.window:
                raise IndexError(f"index {n} outside [0, {self.window}]")
            return self._norms.term(n)
        if not -self.window <= n <= self.window:
            raise IndexError(f"index {n} outside [-{self.window}, {self.window}]")
        return self._norms[n]

    def index_range(self):
        lo = 0 if self.mode == "unilateral" else -self.window
        return range(lo, self.window + 1)

    def weight(self, n: int):
        """Scalar sent along with e_n -> e_{n+1} (forward) or e_{n-1} (backward)."""
        if self.direction == "forward":
            lo, hi = self.norm_at(n), self.norm_at(n + 1)
        else:
            lo, hi = self.norm_at(n), self.norm_at(n - 1)
        if lo == 0:
            return Fraction(0)
        return hi / lo

    def weight_table(self):
        rng = self.index_range()
        if self.direction == "forward":
            rng = range(rng.start, rng.stop - 1)
        else:
            rng = range(rng.start + 1, rng.stop)
        return [(n, self.weight(n)) for n in rng]


def build(seq: NormSequence) -> WeightedShift:
    """Unilateral forward shift realizing a validated prefix."""
    return WeightedShift("unilateral", seq, seq.window)


def build_bilateral(values: Mapping[int, object], window: Optional[int] = None) -> WeightedShift:
    """Bilateral forward shift from positive two-sided bound data.

    ``values`` must cover ``-window..window``; any zero is rejected since an
    invertible realization needs positive norms in both directions.
    """
    if window is None:
        window = min(-min(values), max(values))
    data = {}
    for n in range(-window, window + 1):
        if n not in values:
            raise ValueError(f"missing value at index {n}")
        v = values[n]
        if v == 0:
            raise ZeroWeightError(f"zero value at index {n}")
        data[n] = v
    return WeightedShift("bilateral", data, window)


def inverse_weights(shift: WeightedShift) -> WeightedShift:
    """The backward shift inverting a bilateral forward shift.

    A unilateral shift is never invertible, so that mode is refused.
    """
    if shift.mode != "bilateral":
        raise ModeError("a unilateral weighted shift is not invertible")
    if shift.direction != "forward":
        raise ModeError("already a backward shift")
    return WeightedShift("bilateral", shift._norms, shift.window, direction="backward")


def power_norm(shift: WeightedShift, k: int, window: Optional[int] = None):
    """Exact norm of the k-th power over the window.

    Equals the max k-fold consecutive weight product, i.e. ``max_n
    a_{n+k}/a_n`` over starting indices whose whole product lies inside the
    window; for a unilateral shift over the full prefix this is ``a_k``.
    Products that cross a zero term vanish.
    """
    W = shift.window if window is None else min(window, shift.window)
    if not 1 <= k <= W:
        raise ValueError(f"power {k} outside window {W}")
    lo = 0 if shift.mode == "unilateral" else -W
    best = None
    for n in range(lo, W - k + 1):
        denom = shift.norm_at(n)
        if denom == 0:
            v = Fraction(0)
        else:
            num = shift.norm_at(n + k)
            v = Fraction(0) if num == 0 else num / denom
        if best is None or v > best:
            best = v
    return best


def numeric_spectral_radius(shift: WeightedShift, k_max: int) -> Bound:
    """min over k <= k_max of power_norm(k)**(1/k), flagged inexact.

    ``k_max`` is capped at half the window to keep boundary truncation out
    of the estimate; the estimate is nonincreasing in ``k_max``.
    """
    if k_max > shift.window // 2:
        raise ValueError("k_max must not exceed half the window")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    best_val, best_k = None, None
    for k in range(1, k_max + 1):
        v = power_norm(shift, k)
        if v == 0:
            return Bound(Fraction(0), exact=True)
        if best_val is None or _root_less(v, k, best_val, best_k):
            best_val, best_k = v, k
    return Bound(ext_root(best_val, best_k), exact=False)
