import cmath
import random
from fractions import Fraction

import numpy as np
import pytest

from spechull import annulus, gen_inner_radius, validate
from spechull.hulls import (
    HullSpec,
    HullViolation,
    MemberError,
    SpectrumDescriptor,
    SpectrumModel,
    augment_spectrum,
    connectivity_witness,
    cross_section,
    hull_from_json,
    hull_to_json,
    membership,
    membership_batch,
    moduli_of,
    reduce_constraints,
    separating_monomial,
)
from spechull.lattice import RatioField, domain_points, field_from_sequence
from spechull.numerics import INF, as_fraction

from .fieldgen import demo_field, random_tail_field


def demo_rational_hull(box=3):
    return HullSpec.from_ratio_field(RatioField.compute(demo_field(), box=box))


def demo_polynomial_hull(box=3):
    return HullSpec.from_field(demo_field(), box=box)


# -- membership ---------------------------------------------------------------


def test_demo_hull_contains_unit_torus_point():
    spec = demo_rational_hull()
    assert membership(spec, (1, 1), method="direct")
    assert membership(spec, (complex(0, 1), complex(-1, 0)), method="log")


def test_demo_hull_rejects_point_with_witness():
    spec = demo_rational_hull()
    pt = (2, Fraction(2, 5))
    assert not membership(spec, pt, method="direct")
    # (2,-1) separates: |s^ (2,-1)| = 10 > 1; the scan-order witness is the
    # lowest-degree violated constraint
    mods = moduli_of(pt)
    assert mods[0] ** 2 / mods[1] > as_fraction(spec.constraints[(2, -1)])
    assert separating_monomial(spec, pt, method="direct") == (0, -1)


def test_rational_kind_rejects_zero_on_invertible_axis():
    spec = demo_rational_hull()
    assert not membership(spec, (0, 1), method="direct")
    assert not membership(spec, (0, 1), method="log")


def test_membership_methods_agree_on_random_points():
    rng = random.Random(21)
    specs = [demo_rational_hull(), demo_polynomial_hull(),
             HullSpec.from_ratio_field(
                 RatioField.compute(random_tail_field(rng, n=2, box=3), box=3))]
    for spec in specs:
        hits = 0
        while hits < 300:
            mods = tuple(Fraction(rng.randint(1, 80), 40) for _ in range(spec.n))
            gaps = []
            for idx, bound in spec.constraints.items():
                val = Fraction(1)
                for m, c in zip(mods, idx):
                    val *= m**c
                gaps.append(abs(float(val) - float(bound)))
            if min(gaps) < 1e-7:
                continue  # stay away from constraint boundaries
            hits += 1
            assert membership(spec, mods, method="direct") == \
                membership(spec, mods, method="log")


def test_membership_circled_invariance():
    rng = random.Random(5)
    spec = demo_rational_hull()
    for _ in range(50):
        mods = [Fraction(rng.randint(1, 60), 30) for _ in range(2)]
        base = membership(spec, mods, method="log")
        for _ in range(10):
            phases = [cmath.exp(1j * rng.uniform(0, 2 * cmath.pi)) for _ in range(2)]
            pt = tuple(float(m) * ph for m, ph in zip(mods, phases))
            assert membership(spec, pt, method="log") == base


def test_membership_batch_matches_scalar():
    spec = demo_rational_hull()
    rng = np.random.default_rng(17)
    mods = rng.uniform(0.05, 2.5, size=(500, 2))
    for method in ("log", "direct"):
        batch = membership_batch(spec, mods, method=method)
        single = np.array([membership(spec, tuple(row), method=method)
                           for row in mods])
        assert (batch == single).all()


def test_smallest_violated_power_for_disc_spec():
    seq = gen_inner_radius(Fraction(1, 2), 64)
    spec = HullSpec.from_sequence(seq, window=16)
    outer = annulus(seq, 16).outer
    r = float(outer.value) + 0.1
    got = separating_monomial(spec, (r,), method="direct")
    vals = seq.term_values()
    want = next(k for k in range(1, 17) if Fraction(str(r)) ** k > vals[k])
    assert got == (want,)


# -- reduction ----------------------------------------------------------------


def test_reduce_disc_spec_to_single_constraint():
    spec = HullSpec.from_bounds(1, "polynomial",
                                {(1,): Fraction(2), (2,): Fraction(4), (3,): Fraction(8)})
    reduced = reduce_constraints(spec)
    assert set(reduced.constraints) == {(1,)}


def test_reduce_demo_hull_is_minimal_and_region_preserving():
    import math
    from scipy.optimize import linprog

    spec = demo_rational_hull(box=2)
    reduced = reduce_constraints(spec)
    assert len(reduced.constraints) < len(spec.constraints)
    # region is unchanged on a modulus grid
    grid = [(Fraction(a, 8), Fraction(b, 8))
            for a in range(1, 25, 3) for b in range(1, 25, 3)]
    for mods in grid:
        assert membership(spec, mods, method="direct") == \
            membership(reduced, mods, method="direct")
    # and every non-structural survivor is essential: dropping it opens the region
    for cand in reduced.constraints:
        if cand in {(1, 0), (0, 1)}:  # structural unit bounds stay regardless
            continue
        others = [(i, b) for i, b in reduced.constraints.items() if i != cand]
        res = linprog(c=[-c for c in cand],
                      A_ub=[list(i) for i, _ in others],
                      b_ub=[math.log(float(b)) for _, b in others],
                      bounds=[(None, None)] * 2, method="highs")
        loose = res.status != 0 or -res.fun > math.log(float(reduced.constraints[cand])) + 1e-9
        assert loose, f"{cand} is redundant in the reduced spec"


def test_reduce_empty_spec_unchanged():
    spec = HullSpec.from_bounds(2, "polynomial", {})
    assert reduce_constraints(spec).constraints == {}


# -- connectivity -------------------------------------------------------------


def test_connectivity_constant_path():
    spec = demo_polynomial_hull()
    path = connectivity_witness(spec, (1, 1), (1, 1), steps=5)
    assert all(pt == (complex(1), complex(1)) for pt in path)


def test_connectivity_demo_path():
    spec = demo_polynomial_hull()
    path = connectivity_witness(spec, (1, 1), (Fraction(1, 2), 1), steps=100)
    assert len(path) == 101
    for pt in path:
        assert membership(spec, pt, method="log")


def test_connectivity_rejects_outside_endpoint():
    spec = demo_polynomial_hull()
    with pytest.raises(MemberError):
        connectivity_witness(spec, (1, 1), (3, 1), steps=10)


# -- cross sections -----------------------------------------------------------


def test_disc_section():
    seq = gen_inner_radius(1, 8)  # constant: unit disc
    spec = HullSpec.from_sequence(seq)
    radii = [Fraction(j, 8) for j in range(0, 17)]
    rows = cross_section(spec, {}, 0, radii=radii)
    for r, inside in rows:
        assert inside == (r <= 1)


def test_annulus_section_matches_sequence_annulus():
    seq = gen_inner_radius(Fraction(1, 2), 64)
    from spechull.sequences import two_sided_bounds
    bounds = two_sided_bounds(seq, -8, 8)
    spec = HullSpec.from_bounds(1, "rational",
                                {(k,): v for k, v in bounds.items() if k != 0})
    ann = annulus(seq, 8)
    inner = as_fraction(ann.inner.value)
    radii = [Fraction(j, 16) for j in range(0, 33)]
    rows = cross_section(spec, {}, 0, radii=radii)
    for r, inside in rows:
        # outer radius: every forward bound a_k^(1/k); exact via cross powers
        in_annulus = all(r**k <= as_fraction(bounds[k]) for k in range(1, 9)) \
            and r >= inner
        assert inside == in_annulus


def test_demo_unit_direction_section():
    # the unit-direction bounds alone give the band 1/2 <= |s_1| <= 2 at |s_2| = 1
    spec = HullSpec.from_bounds(2, "rational", {
        (1, 0): Fraction(2), (-1, 0): Fraction(2),
        (0, 1): Fraction(1), (0, -1): Fraction(2),
    })
    radii = [Fraction(j, 16) for j in range(0, 40)]
    rows = cross_section(spec, {1: Fraction(1)}, 0, radii=radii)
    for r, inside in rows:
        assert inside == (Fraction(1, 2) <= r <= 2)


def test_demo_full_hull_section_degenerates():
    # the complete bound family pins |s_1| = 1 on the |s_2| = 1 slice
    spec = demo_rational_hull(box=3)
    radii = [Fraction(j, 16) for j in range(0, 40)]
    rows = cross_section(spec, {1: Fraction(1)}, 0, radii=radii)
    for r, inside in rows:
        assert inside == (r == 1)


def test_section_requires_positive_fixed_moduli_on_inverse_axes():
    spec = demo_rational_hull()
    with pytest.raises(ValueError):
        cross_section(spec, {1: Fraction(0)}, 0, radii=[Fraction(1)])


# -- polynomial hulls vs spectral radius --------------------------------------


def test_one_var_polynomial_hull_is_disc_of_radius_estimate():
    seq = validate([1, 2, 4, 2, 4, 8])
    spec = HullSpec.from_sequence(seq)
    vals = seq.term_values()
    for j in range(0, 33):
        r = Fraction(j, 16)
        want = all(r**k <= vals[k] for k in range(1, 6))
        assert membership(spec, (r,), method="direct") == want


def test_hull_from_norms_equals_hull_from_radius_surrogates():
    field = demo_field()
    spec = HullSpec.from_field(field, box=3)
    surrogate = {}
    for i in spec.constraints:
        best, best_k = None, None
        for k in range(1, 5):
            v = field.value(tuple(k * c for c in i))
            if best is None or float(v) ** (1 / k) < float(best) ** (1 / best_k):
                best, best_k = v, k
        surrogate[i] = float(best) ** (1.0 / best_k)
    surro_spec = HullSpec.from_bounds(2, "polynomial", surrogate)
    for a in range(0, 22, 3):
        for b in range(0, 22, 3):
            mods = (Fraction(a, 16), Fraction(b, 16))
            got = membership(surro_spec, mods, method="log", tol=1e-12)
            want = membership(spec, mods, method="direct")
            assert got == want


# -- spectrum augmentation -----------------------------------------------------


def disc_model(radius=1):
    seq = gen_inner_radius(1, 8)
    spec = HullSpec.from_sequence(seq)
    return SpectrumModel(norms=spec,
                         spectrum=SpectrumDescriptor(base=spec, points=frozenset()))


def test_augment_with_interior_points_absorbed():
    model = disc_model()
    out = augment_spectrum(model, [(complex(0.5, 0),), (complex(0, -0.25),)])
    assert out.spectrum.points == frozenset()
    assert out.norms is model.norms


def test_augment_empty_set_is_identity():
    model = disc_model()
    assert augment_spectrum(model, []) is model


def test_augment_outside_point_raises_with_witness():
    model = disc_model()
    with pytest.raises(HullViolation) as err:
        augment_spectrum(model, [(complex(1.5, 0),)])
    assert err.value.monomial is not None


def test_augment_annulus_model_keeps_extra_points():
    # spectrum descriptor smaller than the norm hull: extra points persist
    seq = gen_inner_radius(Fraction(1, 2), 32)
    norms = HullSpec.from_sequence(seq, window=8)
    ring = HullSpec.from_bounds(1, "rational",
                                {(1,): Fraction(1), (-1,): Fraction(2)})
    model = SpectrumModel(norms=norms, spectrum=SpectrumDescriptor(base=ring))
    out = augment_spectrum(model, [(complex(0.25, 0),)])
    assert (complex(0.25, 0),) in out.spectrum.points
    assert out.spectrum.base is ring


# -- json ----------------------------------------------------------------------


def test_hull_json_round_trip():
    spec = demo_rational_hull(box=2)
    again = hull_from_json(hull_to_json(spec))
    assert again.kind == spec.kind and again.n == spec.n
    assert set(again.constraints) == set(spec.constraints)
    for i, b in spec.constraints.items():
        assert as_fraction(again.constraints[i]) == as_fraction(b)


def test_moduli_of_mixed_inputs():
    assert moduli_of((complex(3, 4), Fraction(2), 1.5)) == (5.0, Fraction(2), 1.5)
