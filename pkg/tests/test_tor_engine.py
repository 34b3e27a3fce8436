"""Resolutions, the brute-force Tor oracle, and the closed forms."""

import pytest

from thhlab.graded_algebra import (
    CoefficientFactor,
    MixedSpec,
    UnsupportedKind,
    UnsupportedShape,
    bigraded_dims,
    dims_add,
    dims_convolve,
    dims_shift,
    divided,
    exterior,
    hilbert,
    make_algebra,
    polynomial,
)
from thhlab.spectral_sequence import Page, PageLabel
from thhlab.tor_engine import (
    ChainComplexOfFrees,
    ModuleSpec,
    fp_module,
    module_dims,
    resolution,
    tor_closed_form,
    tor_exterior_module,
    tor_oracle,
)


def e_dv(p=3):
    return make_algebra(p, [exterior("dv", 2 * p - 1)])


def p_v(p=3):
    return make_algebra(p, [polynomial("v", 2 * p - 2)])


def base_pv_edv(p=3, coefficients=()):
    return make_algebra(
        p,
        [polynomial("v", 2 * p - 2), exterior("dv", 2 * p - 1)],
        coefficients=coefficients,
    )


def coeff_core(p=3):
    return make_algebra(
        p,
        [
            exterior("l1", 2 * p - 1),
            exterior("l2", 2 * p * p - 1),
            polynomial("m2", 2 * p * p),
        ],
    )


# -- resolution ----------------------------------------------------------------------


def test_resolution_divided_tower_frozen_p3():
    res = resolution(e_dv(), 20)
    assert res.top_filtration == 4  # sigma_k up to internal degree 5k <= 20
    for k in range(5):
        layer = res.generators[k]
        assert len(layer) == 1 and layer[0].internal_degree == 5 * k
    # d(sigma_k) = dv . sigma_{k-1} with coefficient exactly 1
    for k in range(1, 5):
        m = res.matrix(k, 5 * k)
        assert m.shape == (1, 1) and m.data[0, 0] == 1


def test_resolution_koszul_two_term_p3():
    res = resolution(p_v(), 20)
    assert res.top_filtration == 1
    assert [g.internal_degree for g in res.generators[1]] == [4]
    m = res.matrix(1, 4)
    assert m.shape == (1, 1) and m.data[0, 0] == 1


def test_resolution_empty_algebra():
    res = resolution(make_algebra(3, []), 10)
    assert res.top_filtration == 0
    assert res.homology_dims() == {(0, 0): 1}


def test_resolution_rejects_unresolvable_bases():
    with pytest.raises(UnsupportedKind):
        resolution(make_algebra(3, [divided("g", 5, filtration=1)]), 10)
    with pytest.raises(UnsupportedKind):
        resolution(
            make_algebra(3, [], coefficients=(CoefficientFactor("C", "symbolic"),)), 10
        )


def test_resolution_is_checked_on_construction():
    # sabotage: drop a layer, so the homology check must fail
    res = resolution(e_dv(), 20)
    broken = ChainComplexOfFrees(res.algebra, res.cap, res.generators[:2])
    with pytest.raises(AssertionError):
        broken.check_resolves_unit()


# -- oracle --------------------------------------------------------------------------


def test_oracle_over_empty_algebra():
    alg = make_algebra(3, [])
    assert tor_oracle(alg, fp_module(alg), fp_module(alg), 10) == {(0, 0): 1}


def test_oracle_divided_tower_frozen_p3():
    alg = e_dv()
    dims = tor_oracle(alg, fp_module(alg), fp_module(alg), 20)
    assert dims == {(k, 5 * k): 1 for k in range(5)}


def test_oracle_trivial_coefficients_window_p3():
    alg = base_pv_edv()
    left = ModuleSpec(alg, trivial_action_coefficients=coeff_core())
    dims = tor_oracle(alg, left, fp_module(alg), 40)
    expected_spec = make_algebra(
        3,
        [
            exterior("l1", 5),
            exterior("l2", 17),
            polynomial("m2", 18),
            exterior("[v]", 4, filtration=1),
            divided("[dv]", 5, filtration=1),
        ],
    )
    expected = {
        (s, t): d
        for (s, t), d in bigraded_dims(expected_spec, 44).items()
        if s <= 4 and t <= 40 and d
    }
    got = {(s, t): d for (s, t), d in dims.items() if s <= 4 and t <= 40}
    assert got == expected


def test_oracle_side_independence():
    alg = make_algebra(3, [polynomial("x", 4), exterior("y", 3)])
    left = ModuleSpec(alg, trivial_action_coefficients=make_algebra(3, [exterior("a", 5)]))
    right = ModuleSpec(alg, summands=((0, "t", "trivial"), (2, "f", "free")))
    a = tor_oracle(alg, left, right, 20, resolve_side="right")
    b = tor_oracle(alg, left, right, 20, resolve_side="left")
    assert a == b
    with pytest.raises(ValueError):
        tor_oracle(alg, left, right, 20, resolve_side="up")


def test_oracle_flatness():
    # a free module is Tor-acyclic: filtration 0 only, with its own dims
    alg = e_dv()
    free = ModuleSpec(alg, summands=((0, "g", "free"),))
    dims = tor_oracle(alg, free, fp_module(alg), 20, resolve_side="left")
    assert dims == {(0, 0): 1}  # A tensor_A F_p = F_p
    # resolved-side free summand against a nontrivial left module
    left = ModuleSpec(alg, trivial_action_coefficients=make_algebra(3, [polynomial("m", 2)]))
    dims = tor_oracle(alg, left, ModuleSpec(alg, summands=((3, "g", "free"),)), 12)
    expected = module_dims(left, 12)
    assert dims == {(0, n + 3): d for n, d in enumerate(expected) if d and n + 3 <= 12}


def test_oracle_kunneth():
    p, cap = 3, 20
    a = make_algebra(p, [polynomial("x", 4)])
    b = make_algebra(p, [exterior("y", 3)])
    ab = make_algebra(p, [polynomial("x", 4), exterior("y", 3)])
    da = tor_oracle(a, fp_module(a), fp_module(a), cap)
    db = tor_oracle(b, fp_module(b), fp_module(b), cap)
    dab = tor_oracle(ab, fp_module(ab), fp_module(ab), cap)
    conv = {}
    for (s1, t1), d1 in da.items():
        for (s2, t2), d2 in db.items():
            if t1 + t2 <= cap:
                key = (s1 + s2, t1 + t2)
                conv[key] = conv.get(key, 0) + d1 * d2
    assert dab == conv


def test_oracle_rejects_foreign_modules():
    alg = e_dv()
    other = p_v()
    with pytest.raises(MixedSpec):
        tor_oracle(alg, fp_module(other), fp_module(alg), 10)


# -- module spec validation ----------------------------------------------------------


def test_module_spec_validation():
    alg = e_dv()
    with pytest.raises(ValueError):
        ModuleSpec(alg, summands=((0, "a", "weird"),))
    with pytest.raises(ValueError):
        ModuleSpec(alg, summands=((0, "a", "free"), (1, "a", "trivial")))
    with pytest.raises(ValueError):
        ModuleSpec(alg, summands=((-1, "a", "free"),))
    with pytest.raises(UnsupportedShape):
        ModuleSpec(
            alg,
            summands=((0, "a", "free"),),
            trivial_action_coefficients=make_algebra(3, []),
        )
    with pytest.raises(UnsupportedShape):  # unknown coefficient factor
        ModuleSpec(alg, free_factors=("C",))
    with pytest.raises(UnsupportedShape):  # coefficients belong on the base
        ModuleSpec(
            alg,
            trivial_action_coefficients=make_algebra(
                3, [], coefficients=(CoefficientFactor("C"),)
            ),
        )


def test_module_dims():
    alg = e_dv()
    m = ModuleSpec(alg, summands=((0, "a", "trivial"), (2, "b", "free")))
    dims = module_dims(m, 10)
    assert dims[0] == 1 and dims[2] == 1 and dims[7] == 1  # 1, b, dv.b
    assert module_dims(fp_module(alg), 4) == [1, 0, 0, 0, 0]


# -- closed forms --------------------------------------------------------------------


def test_closed_form_matches_oracle_on_small_shapes():
    p, cap = 3, 24
    shapes = [
        [polynomial("x", 4)],
        [exterior("y", 3)],
        [polynomial("x", 4), exterior("y", 3)],
        [polynomial("x", 2), polynomial("x2", 4), exterior("y", 3), exterior("y2", 5)],
    ]
    for gens in shapes:
        alg = make_algebra(p, gens)
        page = tor_closed_form(alg, fp_module(alg), fp_module(alg), cap)
        assert page.page_index == 2
        oracle = tor_oracle(alg, fp_module(alg), fp_module(alg), cap)
        want = {bd: d for bd, d in oracle.items() if sum(bd) <= cap}
        got = {bd: d for bd, d in page.bigraded_dims(cap).items() if d}
        assert got == want, f"disagreement over {[g.name for g in gens]}"


def test_closed_form_cancels_free_coefficient_factor():
    p, cap = 3, 30
    sym = CoefficientFactor("C", "symbolic")
    alg = base_pv_edv(p, coefficients=(sym,))
    left = ModuleSpec(alg, trivial_action_coefficients=coeff_core(p))
    dlogv = make_algebra(p, [exterior("dlogv", 1)])
    right = ModuleSpec(alg, trivial_action_coefficients=dlogv, free_factors=("C",))
    page = tor_closed_form(alg, left, right, cap)
    assert [g.name for g in page.spec.generators] == [
        "l1", "l2", "m2", "dlogv", "[v]", "[dv]",
    ]
    # an uncancelled symbolic factor has no closed form
    with pytest.raises(UnsupportedShape):
        tor_closed_form(alg, left, ModuleSpec(alg, trivial_action_coefficients=dlogv), cap)
    # a literal-F_p factor just drops out
    triv = base_pv_edv(p, coefficients=(CoefficientFactor("C", "trivial"),))
    page2 = tor_closed_form(
        triv,
        ModuleSpec(triv, trivial_action_coefficients=coeff_core(p)),
        ModuleSpec(triv, trivial_action_coefficients=dlogv),
        cap,
    )
    assert page2.bigraded_dims(cap) == page.bigraded_dims(cap)


def test_closed_form_rejects_summand_modules():
    alg = e_dv()
    with pytest.raises(UnsupportedShape):
        tor_closed_form(alg, ModuleSpec(alg, summands=((0, "a", "trivial"),)), fp_module(alg), 10)


def test_closed_form_trivial_case():
    alg = make_algebra(3, [])
    page = tor_closed_form(alg, fp_module(alg), fp_module(alg), 10)
    assert page.bigraded_dims(10) == {(0, 0): 1}


# -- Tor over one exterior generator, free + trivial summands ------------------------


def sec8_module(p=3):
    du = exterior("du", 3)
    base = make_algebra(p, [du])
    summands = [
        (0, "1", "free"),
        (14, "z", "free"),
        (2, "u", "trivial"),
        (8, "b1", "trivial"),
        (9, "a1", "trivial"),
        (15, "a2", "trivial"),
    ]
    return du, ModuleSpec(base, summands=tuple(summands))


def test_exterior_module_page_matches_stated_dims_p3():
    p, cap = 3, 40
    du, module = sec8_module(p)
    coeff = make_algebra(
        p, [exterior("l1", 5), exterior("dlogu", 1), polynomial("m2", 18)]
    )
    page = tor_exterior_module(du, module, coeff, cap)
    assert [l.name for l in page.labels] == ["1", "z", "u", "b1", "a1", "a2"]
    assert [l.allows_gamma for l in page.labels] == [False, False, True, True, True, True]
    # total dims: coefficient algebra times (free shifts + towers at 4k + shift)
    free = [0] * (cap + 1)
    for d in (0, 14):
        free[d] += 1
    towers = [0] * (cap + 1)
    for d in (2, 8, 9, 15):
        k = 0
        while 4 * k + d <= cap:
            towers[4 * k + d] += 1
            k += 1
    expected = dims_convolve(hilbert(coeff, cap), dims_add(free, towers, cap), cap)
    got = page.total_dims(cap)
    assert [got[n] for n in range(cap + 1)] == expected


def test_exterior_module_oracle_crosscheck():
    p, cap = 3, 24
    du = exterior("du", 3)
    base = make_algebra(p, [du])
    module = ModuleSpec(base, summands=((0, "1", "trivial"),))
    page = tor_exterior_module(du, module, make_algebra(p, []), cap)
    oracle = tor_oracle(base, module, fp_module(base), cap)
    want = {bd: d for bd, d in oracle.items() if sum(bd) <= cap}
    assert {bd: d for bd, d in page.bigraded_dims(cap).items()} == want
    assert want == {(k, 3 * k): 1 for k in range(7)}  # 4k <= 24


def test_exterior_module_free_only_is_filtration_zero():
    p, cap = 3, 20
    du = exterior("du", 3)
    base = make_algebra(p, [du])
    module = ModuleSpec(base, summands=((0, "1", "free"), (4, "w", "free")))
    page = tor_exterior_module(du, module, make_algebra(p, []), cap)
    assert page.bigraded_dims(cap) == {(0, 0): 1, (0, 4): 1}


def test_exterior_module_validation():
    p = 3
    du = exterior("du", 3)
    base = make_algebra(p, [du])
    coeff = make_algebra(p, [])
    good = ModuleSpec(base, summands=((0, "1", "free"),))
    with pytest.raises(UnsupportedShape):  # base generator must be exterior
        tor_exterior_module(polynomial("x", 4), good, coeff, 10)
    with pytest.raises(UnsupportedShape):  # module must be over E(y) itself
        two = make_algebra(p, [du, exterior("e", 5)])
        tor_exterior_module(du, ModuleSpec(two, summands=((0, "1", "free"),)), coeff, 10)
    with pytest.raises(UnsupportedShape):  # needs explicit summands
        tor_exterior_module(du, fp_module(base), coeff, 10)
