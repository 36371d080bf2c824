"""Shared field constructors and brute-force oracles for the test suite."""

from fractions import Fraction

from spechull.lattice import (
    NormField,
    in_orthant,
    madd,
    norm_inf,
    orthant_points,
    validate_field,
)


def demo_field(box=6):
    """The two-variable running example: a_(1,0) = 2, everything else 1."""
    return NormField(n=2, box=box, entries={(1, 0): Fraction(2)},
                     default=Fraction(1))


def oracle_ratio_sup(field, step, radius):
    """Direct windowed supremum of a_{m+step}/a_m, no clamping shortcuts."""
    best = None
    for m in orthant_points(field.n, radius):
        t = madd(m, step)
        if not in_orthant(t):
            continue
        num, den = field.value(t), field.value(m)
        if num == 0 and den == 0:
            continue
        if den == 0:
            return float("inf")
        v = num / den
        if best is None or v > best:
            best = v
    return best


def random_tail_field(rng, n=2, box=3, support=2, max_exp=3):
    """Random positive constant-tail field with power-of-two entries.

    Values start at random powers of two (>= 1) and are lowered to the
    submultiplicative closure, which keeps them powers of two.
    """
    values = {}
    for idx in orthant_points(n, support):
        if all(c == 0 for c in idx):
            continue
        if rng.random() < 0.7:
            values[idx] = Fraction(2) ** rng.randint(0, max_exp)
    # one ascending-total-order pass brings every value to its closure
    for s in sorted(values, key=lambda t: (sum(t), t)):
        best = values[s]
        for i in orthant_points(n, support):
            if all(c == 0 for c in i) or i == s:
                continue
            j = tuple(a - b for a, b in zip(s, i))
            if not in_orthant(j) or all(c == 0 for c in j):
                continue
            vi = values.get(i, Fraction(1))
            vj = values.get(j, Fraction(1))
            if vi * vj < best:
                best = vi * vj
        values[s] = best
    entries = {k: v for k, v in values.items() if v != 1}
    return validate_field(NormField(n=n, box=box, entries=entries,
                                    default=Fraction(1)))


def random_zero_field(rng, n=2, box=3, denom=4):
    """Random finite-support field (zero tail) with zeros on an up-set.

    Positive values live on a random coordinate down-set and respect the
    submultiplicative closure; everything else is zero.
    """
    thresholds = tuple(rng.randint(1, box) for _ in range(n))
    down = [i for i in orthant_points(n, box)
            if all(c <= t for c, t in zip(i, thresholds))]
    values = {}
    for idx in down:
        if all(c == 0 for c in idx):
            values[idx] = Fraction(1)
        else:
            values[idx] = Fraction(rng.randint(1, 3 * denom), denom)
    for s in sorted(down, key=lambda t: (sum(t), t)):
        if all(c == 0 for c in s):
            continue
        best = values[s]
        for i in down:
            if all(c == 0 for c in i):
                continue
            j = tuple(a - b for a, b in zip(s, i))
            if not in_orthant(j) or all(c == 0 for c in j):
                continue
            if j not in values:
                continue
            cand = values[i] * values[j]
            if cand < best:
                best = cand
        values[s] = best
    return validate_field(NormField(n=n, box=box, entries=values,
                                    default=Fraction(0)))
