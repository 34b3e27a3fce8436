"""Rewriting, the truncated two-family algebra, and derivation checking."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thhlab.graded_algebra import (
    DegreeMismatch,
    Element,
    MixedSpec,
    UnsupportedKind,
    divided,
    exterior,
    make_algebra,
    polynomial,
    truncated,
)
from thhlab.presentation import (
    DerivationSpec,
    NonTermination,
    Presentation,
    RewriteRule,
    check_derivation,
    hilbert_pres,
    make_theta,
    normal_form,
)


def theta(p, with_l1=False):
    extras = (exterior("l1", 2 * p - 1),) if with_l1 else ()
    return make_theta(p, extra_generators=extras)


def nf_names(pres, powers, coeff=1):
    alg = pres.algebra
    return pres.normal_form_dict({alg.mono_from_names(powers): coeff % alg.field.p})


def test_theta_frozen_products_p3():
    pres = theta(3)
    alg = pres.algebra
    # b1 b1 -> u b2, then u b2 -> 0: at p = 3 the u-truncation rule u^{p-2} b_j
    # has u-exponent 1, so every u b_j dies
    assert nf_names(pres, {"b1": 2}) == {}
    assert nf_names(pres, {"a1": 1, "a2": 1}) == {}
    # b1 b2 overflows to u^2 m2, and u^2 = 0 at p = 3
    assert nf_names(pres, {"b1": 1, "b2": 1}) == {}
    # a0 b1 -> u a1 -> 0 by the u-truncation rule
    assert nf_names(pres, {"a0": 1, "b1": 1}) == {}
    # a1 b1 -> u a2 survives: the top a is exempt from truncation
    assert nf_names(pres, {"a1": 1, "b1": 1}) == {
        alg.mono_from_names({"u": 1, "a2": 1}): 1
    }


def test_theta_frozen_basis_degrees_p3():
    pres = theta(3)
    dims = hilbert_pres(pres, 17)
    nonzero = {n for n, d in enumerate(dims) if d}
    assert nonzero == {0, 2, 3, 8, 9, 14, 15, 17}
    assert all(d <= 1 for d in dims)
    assert dims[1] == 0


def test_theta_basis_shape_p5():
    pres = theta(5)
    p = 5
    cap = 2 * p * p + 4 * p
    table = pres.basis_by_degree(cap)
    alg = pres.algebra
    for n, monos in table.items():
        for m in monos:
            powers = {g.name: e for g, e in zip(alg.generators, m) if e}
            k = powers.get("u", 0)
            a_letters = [x for x in powers if x.startswith("a")]
            b_letters = [x for x in powers if x.startswith("b")]
            assert len(a_letters) + len(b_letters) <= 1
            if b_letters:
                assert k <= p - 3
            elif a_letters == [f"a{p - 1}"]:
                assert k <= p - 2
            elif a_letters:
                assert k <= p - 3
            else:
                assert k <= p - 2


def test_normal_form_element_wrapper_and_mixed_spec():
    pres = theta(5)
    alg = pres.algebra
    e = Element(alg, {alg.mono_from_names({"b1": 2}): 2})
    out = normal_form(pres, e)
    assert out.terms == {alg.mono_from_names({"u": 1, "b2": 1}): 2}
    other = make_algebra(3, [polynomial("x", 2)])
    with pytest.raises(MixedSpec):
        normal_form(pres, Element(other, {(1,): 1}))


def test_presentation_rejects_divided_and_checks_degrees():
    alg = make_algebra(3, [divided("y", 2)])
    with pytest.raises(UnsupportedKind):
        Presentation(alg, ())
    alg2 = make_algebra(3, [polynomial("x", 2), polynomial("z", 4)])
    with pytest.raises(DegreeMismatch):
        Presentation(alg2, (RewriteRule((2, 0), {(0, 2): 1}),))
    with pytest.raises(ValueError):
        Presentation(alg2, (RewriteRule((0, 0), {}),))


def test_non_termination_guard():
    alg = make_algebra(3, [polynomial("x", 2)])
    pres = Presentation(alg, (RewriteRule((2,), {(2,): 1}),))
    with pytest.raises(NonTermination):
        pres.normal_form_dict({(2,): 1}, max_steps=50)


@pytest.mark.parametrize("p", [3, 5])
def test_rewriting_idempotent_and_shuffle_invariant(p):
    pres = theta(p)
    alg = pres.algebra
    cap = 2 * p * p + 6
    basis = alg.basis(cap)
    rng_pool = [random.Random(seed) for seed in (11, 57)]
    picker = random.Random(99)
    for m in basis:
        ordered = pres.normal_form_dict({m: 1})
        assert pres.normal_form_dict(ordered) == ordered
        for rng in rng_pool:
            assert pres.normal_form_dict({m: 1}, rng=rng) == ordered
    # products of random basis pairs, same invariance
    for _ in range(60):
        m1, m2 = picker.choice(basis), picker.choice(basis)
        raw = alg.mul_dicts({m1: 1}, {m2: 1})
        ordered = pres.normal_form_dict(raw)
        for rng in rng_pool:
            assert pres.normal_form_dict(raw, rng=rng) == ordered


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_rewriting_shuffle_invariance_property(seed):
    pres = theta(3)
    alg = pres.algebra
    rng = random.Random(seed)
    basis = alg.basis(30)
    m1, m2 = rng.choice(basis), rng.choice(basis)
    raw = alg.mul_dicts({m1: 1}, {m2: 1})
    assert pres.normal_form_dict(raw, rng=rng) == pres.normal_form_dict(raw)


# -- derivations -----------------------------------------------------------------


def suspension_on_theta(p, mutate=None):
    images = {"u": [(1, {"a0": 1})]}
    for j in range(1, p):
        images[f"b{j}"] = [(1 - j, {f"a{j}": 1})]
    if mutate:
        images.update(mutate)
    return DerivationSpec(images)


@pytest.mark.parametrize("p", [3, 5])
def test_derivation_on_theta_passes(p):
    pres = theta(p, with_l1=True)
    report = check_derivation(pres, suspension_on_theta(p))
    assert report.ok, report.failures()


@pytest.mark.parametrize("p", [3, 5])
def test_derivation_mutations_detected(p):
    pres = theta(p, with_l1=True)
    for j in range(1, p):
        mutated = {f"b{j}": [(1 + j, {f"a{j}": 1})]}
        report = check_derivation(pres, suspension_on_theta(p, mutate=mutated))
        assert not report.ok, f"b{j} mutation slipped through at p={p}"
    report = check_derivation(pres, suspension_on_theta(p, mutate={"u": []}))
    assert not report.ok


def test_derivation_m2_mutation_detectability_depends_on_height():
    # an m2 image only enters rules through u * b_s * sigma(m2); at p = 3 the
    # u-truncation kills every witness, at p = 5 it does not
    for p, expected_ok in ((3, True), (5, False)):
        pres = theta(p, with_l1=True)
        mutated = {"m2": [(1, {"l1": 1, f"b{p - 1}": 1})]}
        report = check_derivation(pres, suspension_on_theta(p, mutate=mutated))
        assert report.ok is expected_ok, (p, report.failures())


def test_derivation_degree_validation():
    pres = theta(3, with_l1=True)
    bad = DerivationSpec({"u": [(1, {"l1": 1})]})
    with pytest.raises(DegreeMismatch):
        check_derivation(pres, bad)


def test_derivation_on_plain_algebra_truncation():
    p = 5
    alg = make_algebra(
        p,
        [
            truncated("u", 2, p - 1),
            exterior("l1", 2 * p - 1),
            exterior("dlogu", 1),
            polynomial("k1", 2 * p),
        ],
    )
    d = DerivationSpec(
        {"u": [(1, {"u": 1, "dlogu": 1})], "k1": [(-1, {"k1": 1, "dlogu": 1})]}
    )
    report = check_derivation(alg, d)
    assert report.ok, report.failures()
    assert any("u^4" in desc for desc, _, _ in report.checks)


def test_derivation_rejects_divided_carrier():
    alg = make_algebra(3, [divided("y", 2)])
    with pytest.raises(UnsupportedKind):
        check_derivation(alg, DerivationSpec({}))
