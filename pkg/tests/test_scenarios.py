import json

import pytest

from thhlab.scenarios import (
    CapTooSmall,
    DegreeLine,
    UnknownScenario,
    emit_report,
    forced_failure_report,
    list_scenarios,
    run_scenario,
)

CATALOG = [name for name, _ in list_scenarios()]


def by_name(report):
    return {c.name: c for c in report.checks}


def test_catalog_names_and_descriptions():
    assert CATALOG == [
        "thhz", "thh-ell-log", "thh-ku-basechange", "thh-ku-ss", "ausoni",
        "les-ell", "les-ku", "suspension", "tor-oracle", "inputs",
    ]
    assert all(desc for _, desc in list_scenarios())


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_passes_p3(name):
    report = run_scenario(name, 3, 30)
    assert report.ok
    for check in report.checks:
        assert check.status in ("pass", "conditional")
        assert check.witnesses["source"] in ("literature", "identity", "computed")


def test_cap_below_window_warns_and_conditions():
    with pytest.warns(CapTooSmall):
        report = run_scenario("thhz", 3, 4)
    assert report.ok
    statuses = {c.name: c.status for c in report.checks}
    assert statuses["e2-closed-form-vs-oracle"] == "pass"
    assert statuses["d-family-scalars"] == "conditional"
    assert statuses["einfty-vs-abutment"] == "conditional"


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario("thh-nope", 3, 10)


def test_even_prime_rejected():
    with pytest.raises(ValueError):
        run_scenario("thhz", 2, 10)


def test_forced_failure_reports_first_degree():
    report = forced_failure_report(3, 30)
    assert not report.ok
    (check,) = report.checks
    assert check.status == "fail"
    assert check.degrees[0] == DegreeLine(n=5, expected=0, actual=2)
    doc = json.loads(emit_report(report, "json"))
    assert doc["checks"][0]["status"] == "fail"
    assert doc["checks"][0]["degrees"][0] == {"n": 5, "expected": 0, "actual": 2}


def test_theta_lift_conditional_at_p3():
    report = run_scenario("ausoni", 3, 30)
    lift = by_name(report)["theta-lift"]
    assert lift.status == "conditional"
    assert lift.witnesses["obstruction_degrees"] == [17, 22]


def test_theta_lift_clear_at_p5():
    report = run_scenario("ausoni", 5, 50)
    lift = by_name(report)["theta-lift"]
    assert lift.status == "pass"
    assert lift.witnesses["obstruction_degrees"] == []


def test_alternative_excluded_witnesses():
    report = run_scenario("thh-ku-ss", 3, 30)
    alt = by_name(report)["alternative-excluded"]
    assert alt.status == "pass"
    w = alt.witnesses
    assert w["survivors"] == 3
    assert w["kill_sources"] == 1
    assert w["abutment_dim"] == 1
    assert w["expected_failure_reproduced"] is True
    assert len(w["survivor_classes"]) == 3


def test_les_conditional_below_tau_onset():
    with pytest.warns(CapTooSmall):
        low = run_scenario("les-ell", 3, 10)
    assert low.ok
    assert all(c.status == "conditional" for c in low.checks)
    high = run_scenario("les-ell", 3, 20)
    assert all(c.status == "pass" for c in high.checks)


def test_emit_json_schema_and_determinism():
    first = emit_report(run_scenario("thh-ku-basechange", 3, 30), "json")
    second = emit_report(run_scenario("thh-ku-basechange", 3, 30), "json")
    assert first == second
    doc = json.loads(first)
    assert doc["scenario"] == "thh-ku-basechange"
    assert doc["prime"] == 3
    assert doc["cap"] == 30
    for check in doc["checks"]:
        assert set(check) == {"name", "status", "degrees", "witnesses"}
        assert check["status"] in ("pass", "fail", "conditional")


def test_emit_text_format():
    report = run_scenario("suspension", 3, 20)
    text = emit_report(report, "text").decode()
    assert text.startswith("scenario suspension  p=3  cap=20")
    assert "[pass" in text
    assert text.rstrip().endswith("5 pass, 0 fail, 0 conditional")


def test_emit_unknown_format():
    with pytest.raises(ValueError):
        emit_report(run_scenario("inputs", 3, 20), "yaml")


def test_suspension_checks():
    report = run_scenario("suspension", 3, 20)
    checks = by_name(report)
    assert checks["mutation-detected"].status == "pass"
    assert checks["mutation-detected"].witnesses["failing_relations"] >= 1
    assert checks["theta-carrier"].witnesses["relations_checked"] >= 5


# -- negative controls: single-site mutations must flip a check -----------------------


def _tower_pieces(p, cap):
    from thhlab import scenarios as sc
    from thhlab.graded_algebra import exterior, make_algebra, polynomial
    from thhlab.spectral_sequence import AbutmentSpec, ExtensionRule
    from thhlab.tor_engine import ModuleSpec, fp_module, tor_closed_form

    base = make_algebra(p, [polynomial("v", 2 * p - 2), exterior("dv", 2 * p - 1)])
    left = ModuleSpec(base, trivial_action_coefficients=sc._core(p))
    page = tor_closed_form(base, left, fp_module(base), cap)
    abut = AbutmentSpec(
        make_algebra(p, [exterior("e1", 2 * p - 1), exterior("l1", 2 * p - 1),
                         polynomial("m1", 2 * p)]),
        {"e1": 1, "l1": 0, "m1": 1},
    )
    ext = [ExtensionRule({"m2": 1}, [(1, {"m1": p})])]
    return page, sc._tower_rules(p, cap), abut, ext


def test_negative_control_tower_targets():
    """Dropping or rescaling any declared tower differential flips a check."""
    from thhlab.spectral_sequence import (
        DifferentialRule, DimMismatch, RuleFamily, compare_abutment,
        run_differential, verify_rule_family,
    )

    p, cap = 3, 54
    page, rules, abut, ext = _tower_pieces(p, cap)
    assert len(rules) >= 2
    compare_abutment(run_differential(page, rules), abut, ext, cap)
    for i in range(len(rules)):
        fresh = _tower_pieces(p, cap)[0]
        out = run_differential(fresh, rules[:i] + rules[i + 1:])
        with pytest.raises(DimMismatch):
            compare_abutment(out, abut, ext, cap)

    # a rescaled target deviates from the declared-scalar family expectation
    ks = list(range(1, cap // (2 * p) + 1))
    fam = RuleFamily(gamma_gen="[dv]", step=p, ks=ks, cofactor=[(1, {"l2": 1})])
    scaled = [DifferentialRule(r.page, dict(r.source),
                               [(2 * c, pw) for c, pw in r.target])
              for r in rules]
    fresh = _tower_pieces(p, cap)[0]
    scalars = verify_rule_family(fresh, scaled, fam).scalar_map()
    expected = {k: (0 if k < p else 1) for k in ks}
    assert scalars != expected
    assert scalars[p] == 2


def test_negative_control_module_page_targets():
    """Dropping any declared d^2 on the module page breaks the comparison."""
    from thhlab import scenarios as sc
    from thhlab.graded_algebra import hilbert
    from thhlab.spectral_sequence import (
        AbutmentSpec, DimMismatch, compare_abutment, run_differential,
    )

    p, cap = 3, 30
    abut = AbutmentSpec(sc._ku_answer(p), {"u": 0, "l1": 0, "dlogu": 0, "k1": 1})
    page = sc._sec8_page(p, cap)[2]
    rules = sc._sec8_rules(page, p)
    assert len(rules) >= 3
    baseline = list(run_differential(page, rules).total_dims(cap))
    assert baseline[: cap + 1] == hilbert(abut.target, cap)
    for i in range(len(rules)):
        fresh = sc._sec8_page(p, cap)[2]
        out = run_differential(fresh, rules[:i] + rules[i + 1:])
        with pytest.raises(DimMismatch):
            compare_abutment(out, abut, [], cap,
                             representative=sc._sec8_representative(out, p))


def test_negative_control_theta_relations():
    """Deleting any relation (and, where the scalars allow it, zeroing its
    right side) moves a quantity some check pins down."""
    from thhlab.graded_algebra import check_morphism
    from thhlab.les_checker import ku_sequence
    from thhlab.presentation import (
        DerivationSpec, Presentation, check_derivation, hilbert_pres,
    )

    for p in (3, 5):
        seq = ku_sequence(p)
        theta, alg = seq.A, seq.A.algebra
        window = max(alg.dict_total_degree({r.lhs: 1}) for r in theta.rules)
        base_h = hilbert_pres(theta, window)
        sigma = {"u": [(1, {"a0": 1})]}
        sigma.update({f"b{j}": [((1 - j) % p, {f"a{j}": 1})] for j in range(1, p)})
        zero_blind = []
        for i, rule in enumerate(theta.rules):
            # deletion grows the monomial basis somewhere below the window
            dropped = Presentation(
                alg, tuple(r for j, r in enumerate(theta.rules) if j != i))
            assert hilbert_pres(dropped, window) != base_h, alg.format_mono(rule.lhs)
            if not rule.rhs:
                continue
            # zeroing the right side: caught by the suspension compatibility
            # check, the rho morphism, or the basis count
            zeroed = list(theta.rules)
            zeroed[i] = type(rule)(rule.lhs, {})
            pert = Presentation(alg, tuple(zeroed))
            seen = not check_derivation(pert, DerivationSpec(sigma)).ok
            if not seen:
                try:
                    seen = not check_morphism(pert, seq.B, seq.rho, 30).relations_ok
                except ValueError:
                    seen = True
            if not seen:
                seen = hilbert_pres(pert, window) != base_h
            if not seen:
                zero_blind.append(alg.format_mono(rule.lhs))
        if p == 5:
            assert zero_blind == []
        else:
            # at p = 3 the single u-power annihilates every right side in the
            # target algebra and under sigma, so only a0*b2 can be witnessed;
            # the deletion sweep above still covers those relations
            assert "a0*b2" not in zero_blind
