import random
from fractions import Fraction

import numpy as np
import pytest

from spechull import (
    NormSequence,
    ValidationError,
    ZeroTermError,
    annulus,
    circle_possible,
    gen_inner_radius,
    gen_unbounded_ratio,
    inverse_norm_lower_bound,
    ratio_sup,
    scale,
    validate,
)
from spechull.numerics import BasePower, as_fraction
from spechull.sequences import (
    from_json_dict,
    ratio_trend_unbounded,
    to_json_dict,
    two_sided_bounds,
)


# -- independent oracles: literal transcriptions of the two recursions -------


def oracle_unbounded(R, N):
    R = Fraction(R)
    a = [Fraction(1), R, R * R]
    for n in range(3, N + 1):
        if a[n - 1] <= max(a[1:n - 1]):
            a.append(min(a[i] * a[n - i] for i in range(1, n)))
        else:
            a.append(R)
    return a[:N + 1]


def oracle_inner(R, N):
    R = Fraction(R)
    a = [Fraction(1), R, R * R]
    # first-instance indices of each new running maximum R**m
    for n in range(3, N + 1):
        forced = None
        for k in range(1, n - 1):
            prev = a[n - k]
            if n - k >= 1 and prev > max(a[1:n - k] or [Fraction(0)]):
                m = 0
                v = prev
                while v > 1:
                    v /= R
                    m += 1
                if m > 1 and 1 <= k <= m - 1:
                    forced = prev / R**k
                    break
        if forced is not None:
            a.append(forced)
        else:
            a.append(min(a[i] * a[n - i] for i in range(1, n)))
    return a[:N + 1]


def oracle_pair_scan(values):
    """Brute submultiplicativity check, independent of the module scan."""
    n = len(values)
    for i in range(n):
        for j in range(n - i):
            if values[i + j] > values[i] * values[j]:
                return (i, j)
    return None


# -- validation ---------------------------------------------------------------


def test_validate_accepts_generated_prefix():
    seq = validate([1, 2, 4, 2, 4, 8])
    assert oracle_pair_scan(seq.term_values()) is None


def test_validate_rejects_non_submultiplicative():
    with pytest.raises(ValidationError) as err:
        validate([1, 1, 3])
    assert err.value.kind == "not-submultiplicative"
    assert err.value.witness == (1, 1)


def test_validate_rejects_unnormalized():
    with pytest.raises(ValidationError) as err:
        validate([2, 1])
    assert err.value.kind == "not-normalized"


def test_validate_rejects_zero_gap():
    with pytest.raises(ValidationError) as err:
        validate([1, 2, 0, 1])
    assert err.value.kind == "zero-not-propagated"
    assert err.value.witness == 3


def test_validate_accepts_zero_tail():
    seq = validate([1, 2, 0, 0, 0])
    assert seq.first_zero() == 2


def test_validate_float_tolerance():
    validate([1.0, 2.0, 4.0 * (1 + 1e-12)])  # within tolerance
    with pytest.raises(ValidationError):
        validate([1.0, 2.0, 4.1])


# -- generators ---------------------------------------------------------------


def test_gen_unbounded_ratio_matches_stated_prefixes():
    assert gen_unbounded_ratio(2, 2).term_values() == [1, 2, 4]
    assert gen_unbounded_ratio(2, 9).term_values() == [1, 2, 4, 2, 4, 8, 2, 4, 8, 4]


@pytest.mark.parametrize("R", [2, 3, 10])
def test_gen_unbounded_ratio_matches_oracle(R):
    got = gen_unbounded_ratio(R, 200).term_values()
    assert got == oracle_unbounded(R, 200)


def test_gen_unbounded_sup_backward_ratio():
    seq = gen_unbounded_ratio(2, 9)
    assert inverse_norm_lower_bound(seq) == 4  # attained at a_5/a_6 = 8/2


def test_gen_inner_radius_matches_stated_prefixes():
    R = Fraction(3)
    assert gen_inner_radius(1, 4).term_values() == [1, 1, 1, 1, 1]
    assert gen_inner_radius(1 / R, 2).term_values() == [1, 3, 9]
    got = gen_inner_radius(Fraction(1, 2), 7)
    assert got.term_values() == [1, 2, 4, 2, 4, 8, 4, 2]
    assert got.provenance.first_instance(3) == 5


@pytest.mark.parametrize("R", [2, 3, 10])
def test_gen_inner_radius_matches_oracle(R):
    got = gen_inner_radius(Fraction(1, R), 200).term_values()
    assert got == oracle_inner(R, 200)


@pytest.mark.parametrize("R", [2, 3, 10])
@pytest.mark.parametrize("gen", [gen_unbounded_ratio, lambda R, N: gen_inner_radius(Fraction(1, R), N)])
def test_generated_sequences_are_submultiplicative(gen, R):
    seq = gen(R, 1000)
    validate(seq)  # full-pair exponent scan


def test_gen_inner_radius_backward_ratio_cap():
    for R in (2, 3):
        e = gen_inner_radius(Fraction(1, R), 2000).exponents
        assert (e[:-1] - e[1:] <= 1).all()  # a_{n-1}/a_n <= R


def test_gen_inner_radius_backward_bound_attained():
    seq = gen_inner_radius(Fraction(1, 2), 2000)
    fi = dict(seq.provenance.first_instances)
    e = seq.exponents
    for k in range(1, 6):
        w = fi[k + 1] + k
        window_max = int((e[:w + 1 - k] - e[k:w + 1]).max())
        assert window_max == k


def test_gen_unbounded_every_power_appears_and_bound_grows():
    seq = gen_unbounded_ratio(2, 4000)
    e = seq.exponents
    assert set(range(int(e.max()) + 1)) <= set(e.tolist())
    bounds = []
    w = 500
    while w <= 4000:
        bounds.append(int((e[:w][:-1] - e[:w][1:]).max()))
        w *= 2
    assert bounds == sorted(bounds)
    assert bounds[-1] > bounds[0]


# -- ratio bounds -------------------------------------------------------------


def test_ratio_sup_nonnegative_equals_terms():
    seq = gen_unbounded_ratio(2, 64)
    for i in range(0, 33):
        b = ratio_sup(seq, i)
        assert b.exact and as_fraction(b.value) == as_fraction(seq.term(i))


def test_ratio_sup_constant():
    b = ratio_sup(gen_inner_radius(1, 16), -1)
    assert b.exact and b.value == 1


def test_ratio_sup_inner_radius_closed_form():
    seq = gen_inner_radius(Fraction(1, 3), 64)
    b = ratio_sup(seq, -2)
    assert b.exact and as_fraction(b.value) == 9


def test_ratio_sup_unbounded_windowed():
    seq = gen_unbounded_ratio(2, 9)
    b = ratio_sup(seq, -1)
    assert not b.exact and as_fraction(b.value) == 4


def test_ratio_sup_windowed_matches_brute_force():
    seq = gen_unbounded_ratio(2, 128)
    vals = seq.term_values()
    for shift in (-1, -2, -5):
        b = ratio_sup(seq, shift)
        brute = max(vals[n + shift] / vals[n] for n in range(-shift, 129))
        assert as_fraction(b.value) == brute


def test_ratio_sup_zero_term_error():
    seq = validate([1, 1, 0, 0])
    with pytest.raises(ZeroTermError):
        ratio_sup(seq, -1)


def test_two_sided_collection_is_submultiplicative():
    # extended bound family: b_0 = 1 and b_{i+j} <= b_i * b_j on [-50, 50]
    seq = gen_inner_radius(Fraction(1, 2), 128)
    c = {i: as_fraction(v) for i, v in two_sided_bounds(seq, -50, 50).items()}
    assert c[0] == 1
    for i in range(-25, 26):
        for j in range(-25, 26):
            assert c[i + j] <= c[i] * c[j]


# -- annulus ------------------------------------------------------------------


def test_annulus_constant_is_unit_circle():
    a = annulus(gen_inner_radius(1, 32))
    assert a.inner.value == 1 and a.outer.value == 1
    assert a.inner.exact and a.outer.exact


def test_annulus_zero_sequence_is_origin():
    a = annulus(validate([1, 0, 0]))
    assert a.inner.value == 0 and a.outer.value == 0 and a.outer.exact


def test_annulus_scaled_constant():
    seq = scale(gen_inner_radius(1, 32), 3)
    a = annulus(seq)
    assert as_fraction(a.inner.value) == 3 and as_fraction(a.outer.value) == 3


def test_annulus_inner_radius_generator():
    a = annulus(gen_inner_radius(Fraction(1, 2), 256))
    assert as_fraction(a.inner.value) == Fraction(1, 2) and a.inner.exact
    assert float(a.outer.value) > 1 and not a.outer.exact


def test_annulus_unbounded_ratio_inner_zero():
    a = annulus(gen_unbounded_ratio(2, 256))
    assert a.inner.value == 0


def test_annulus_trend_flag_on_raw_prefix():
    big = gen_unbounded_ratio(2, 4096)
    raw = NormSequence(base=big.base, exponents=big.exponents)
    assert ratio_trend_unbounded(raw)
    a = annulus(raw)
    assert a.inner.value == 0 and not a.inner.exact


def test_annulus_scaling_property():
    seq = gen_inner_radius(Fraction(1, 2), 64)
    base_ann = annulus(seq)
    scaled_ann = annulus(scale(seq, Fraction(3)))
    assert as_fraction(scaled_ann.inner.value) == 3 * as_fraction(base_ann.inner.value)
    assert float(scaled_ann.outer.value) == pytest.approx(3 * float(base_ann.outer.value), rel=1e-12)


# -- scale --------------------------------------------------------------------


def test_scale_examples():
    const = gen_inner_radius(1, 4)
    assert scale(const, 3).term_values() == [1, 3, 9, 27, 81]
    assert scale(const, 1) is const


def test_scale_by_base_power_stays_exact():
    seq = gen_unbounded_ratio(2, 32)
    doubled = scale(seq, 2)
    assert doubled.is_exponent_form
    assert as_fraction(doubled.term(5)) == 2**5 * as_fraction(seq.term(5))
    validate(doubled)


# -- inverse norm bound / circle test ----------------------------------------


def test_inverse_norm_lower_bound_examples():
    assert inverse_norm_lower_bound(gen_inner_radius(1, 8)) == 1
    assert as_fraction(inverse_norm_lower_bound(gen_unbounded_ratio(2, 9))) == 4
    for N in (3, 17, 200):
        assert as_fraction(inverse_norm_lower_bound(gen_inner_radius(Fraction(1, 3), N))) == 3


def test_circle_possible():
    assert circle_possible(gen_inner_radius(1, 16)) == "yes"
    assert circle_possible(gen_inner_radius(Fraction(1, 2), 16)) == "no"
    assert circle_possible(validate([1, 1, 1, 1])) == "undetermined"


# -- random valid sequences ---------------------------------------------------


def random_valid_sequence(rng, N=64):
    """a_n drawn at or below the running submultiplicative ceiling."""
    a = [Fraction(1)]
    a.append(Fraction(rng.randint(1, 16), 4))
    for n in range(2, N + 1):
        cap = min(a[i] * a[n - i] for i in range(1, n))
        a.append(cap * Fraction(rng.randint(1, 8), 8))
    return a


def test_random_sequences_validate_and_ratio_bounds_hold():
    rng = random.Random(7)
    for _ in range(25):
        vals = random_valid_sequence(rng, 48)
        seq = validate(vals)
        assert oracle_pair_scan(vals) is None
        for i in (0, 1, 5):
            assert ratio_sup(seq, i).value == vals[i]


# -- json ---------------------------------------------------------------------


def test_json_round_trip():
    seq = gen_unbounded_ratio(2, 16)
    again = from_json_dict(to_json_dict(seq))
    assert again == seq
    term_seq = validate([1, 2, 4, 2])
    assert from_json_dict(to_json_dict(term_seq)) == term_seq
    assert from_json_dict([1, 2, 4]).term_values() == [1, 2, 4]
