"""Finitely presented graded-commutative algebras via monomial rewriting.

A Presentation is an ambient monomial algebra plus degree-homogeneous
rewrite rules (monomial -> element).  Normal forms are computed by applying
the first applicable rule until none applies, with a step guard against
bad rule orders; local confluence at desk scale is a property test, not a
theorem.  Divided generators are out of scope here (divisibility of
gamma-indices is not meaningful for rewriting).

The module also houses make_theta, the truncated two-family presentation
used throughout, and check_derivation, which verifies that a declared
degree +1 derivation is compatible with every relation and truncation of a
carrier algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .fp_linalg import PrimeField
from .graded_algebra import (
    AlgebraSpec,
    DegreeMismatch,
    Element,
    Generator,
    GradedError,
    MixedSpec,
    Mono,
    TermDict,
    UnsupportedKind,
    exterior,
    make_algebra,
    polynomial,
    truncated,
)


class NonTermination(GradedError):
    """Rewriting exceeded the step bound; the rule order is not well-founded."""


@dataclass(frozen=True, eq=False)
class RewriteRule:
    lhs: Mono
    rhs: TermDict

    def divides(self, mono: Mono) -> bool:
        return all(l <= m for l, m in zip(self.lhs, mono))


@dataclass(frozen=True, eq=False)
class Presentation:
    algebra: AlgebraSpec
    rules: tuple[RewriteRule, ...]

    def __post_init__(self) -> None:
        if any(g.kind == "divided" for g in self.algebra.generators):
            raise UnsupportedKind("presentations do not support divided generators")
        n = len(self.algebra.generators)
        for rule in self.rules:
            if len(rule.lhs) != n:
                raise ValueError("rule lhs arity does not match the algebra")
            if not any(rule.lhs):
                raise ValueError("rule lhs must not be the unit monomial")
            lhs_deg = self.algebra.total_degree_of(rule.lhs)
            rhs_deg = self.algebra.dict_total_degree(rule.rhs)
            if rhs_deg is not None and rhs_deg != lhs_deg:
                raise DegreeMismatch(
                    f"rule {self.algebra.format_mono(rule.lhs)} is not degree-homogeneous"
                )

    # -- rewriting -------------------------------------------------------------

    def _applicable(self, mono: Mono) -> list[RewriteRule]:
        return [r for r in self.rules if r.divides(mono)]

    def irreducible(self, mono: Mono) -> bool:
        return not any(r.divides(mono) for r in self.rules)

    def normal_form_dict(
        self,
        elt: TermDict,
        rng: Optional[random.Random] = None,
        max_steps: int = 100_000,
    ) -> TermDict:
        """Fixed point of rule application; rng shuffles term and rule choice."""
        alg = self.algebra
        p = alg.field.p
        work = dict(elt)
        steps = 0
        while True:
            picked = None
            monos = sorted(work)
            if rng is not None:
                rng.shuffle(monos)
            for m in monos:
                rules = self._applicable(m)
                if rules:
                    picked = (m, rules[0] if rng is None else rng.choice(rules))
                    break
            if picked is None:
                return work
            steps += 1
            if steps > max_steps:
                raise NonTermination(f"no normal form after {max_steps} rewrite steps")
            m, rule = picked
            coeff = work.pop(m)
            quotient = tuple(em - el for em, el in zip(m, rule.lhs))
            prod = alg.mono_mul(rule.lhs, quotient)
            assert prod is not None and prod[1] == m
            repl = alg.mul_dicts(rule.rhs, {quotient: 1})
            repl = alg.scale_dict(coeff * pow(prod[0], -1, p), repl)
            work = alg.add_dicts(work, repl)

    # -- basis -----------------------------------------------------------------

    def basis_by_degree(self, cap: int) -> dict[int, list[Mono]]:
        table = self.algebra.basis_by_degree(cap)
        return {n: [m for m in table[n] if self.irreducible(m)] for n in table}

    def basis(self, cap: int) -> list[Mono]:
        table = self.basis_by_degree(cap)
        return [m for n in range(cap + 1) for m in table[n]]


def normal_form(pres: Presentation, element: Element) -> Element:
    if element.spec != pres.algebra:
        raise MixedSpec("element does not live over the presentation's algebra")
    return Element(pres.algebra, pres.normal_form_dict(element.terms))


def hilbert_pres(pres: Presentation, cap: int) -> list[int]:
    """Count of normal-form (irreducible) monomials per total degree."""
    table = pres.basis_by_degree(cap)
    return [len(table[n]) for n in range(cap + 1)]


def make_theta(
    field: Union[PrimeField, int], extra_generators: tuple[Generator, ...] = ()
) -> Presentation:
    """The truncated two-family algebra over P_{p-1}(u) ox P(m2).

    Generators: u (truncated height p-1, degree 2), m2 (polynomial, degree
    2p^2), a_0..a_{p-1} (exterior, degree 2pi+3), b_1..b_{p-1} (polynomial,
    degree 2pj+2).  The index-0 b is the generator u itself, which is how
    the overflow products below acquire their u and u^2 factors.

    Rules: a_i a_j = 0; b_i b_j = u b_{i+j} or u b_{i+j-p} m2 past the top
    index; a_i b_j = u a_{i+j} or u a_{i+j-p} m2; u^{p-2} a_i = 0 for
    i <= p-2 (the top a is exempt); u^{p-2} b_j = 0.  Products of the two
    letter families strictly reduce letter count, so rewriting terminates.
    """
    if isinstance(field, int):
        field = PrimeField(field)
    p = field.p
    gens = list(extra_generators)
    gens.append(truncated("u", 2, p - 1))
    gens.append(polynomial("m2", 2 * p * p))
    gens.extend(exterior(f"a{i}", 2 * p * i + 3) for i in range(p))
    gens.extend(polynomial(f"b{j}", 2 * p * j + 2) for j in range(1, p))
    alg = make_algebra(field, gens)

    def mono(**powers: int) -> Mono:
        return alg.mono_from_names(powers)

    def b_power_product(index: int, with_m2: bool) -> TermDict:
        # u * b_index (* m2), reading b_0 as u; dies when u truncates
        parts: TermDict = {mono(u=1): 1}
        factor = {mono(u=1): 1} if index == 0 else {mono(**{f"b{index}": 1}): 1}
        parts = alg.mul_dicts(parts, factor)
        if with_m2:
            parts = alg.mul_dicts(parts, {mono(m2=1): 1})
        return parts

    def a_product(index: int, with_m2: bool) -> TermDict:
        parts: TermDict = {mono(u=1): 1}
        parts = alg.mul_dicts(parts, {mono(**{f"a{index}": 1}): 1})
        if with_m2:
            parts = alg.mul_dicts(parts, {mono(m2=1): 1})
        return parts

    rules: list[RewriteRule] = []
    for i in range(p):
        for j in range(i + 1, p):
            rules.append(RewriteRule(mono(**{f"a{i}": 1, f"a{j}": 1}), {}))
    for i in range(1, p):
        for j in range(i, p):
            lhs = mono(**{f"b{i}": 2}) if i == j else mono(**{f"b{i}": 1, f"b{j}": 1})
            s = i + j
            rules.append(
                RewriteRule(lhs, b_power_product(s if s < p else s - p, s >= p))
            )
    for i in range(p):
        for j in range(1, p):
            s = i + j
            rules.append(
                RewriteRule(
                    mono(**{f"a{i}": 1, f"b{j}": 1}),
                    a_product(s if s < p else s - p, s >= p),
                )
            )
    for i in range(p - 1):  # the top index a_{p-1} is exempt
        rules.append(RewriteRule(mono(u=p - 2, **{f"a{i}": 1}), {}))
    for j in range(1, p):
        rules.append(RewriteRule(mono(u=p - 2, **{f"b{j}": 1}), {}))
    return Presentation(alg, tuple(rules))


# -- derivations ----------------------------------------------------------------


@dataclass(eq=False)
class DerivationSpec:
    """Degree +1 derivation given on generators; missing names map to zero."""

    images: Mapping[str, object]


@dataclass(frozen=True)
class DerivationReport:
    checks: tuple[tuple[str, bool, str], ...]  # (description, ok, residual)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[str]:
        return [f"{desc}: residual {res}" for desc, ok, res in self.checks if not ok]


def check_derivation(carrier, d: DerivationSpec) -> DerivationReport:
    """Verify a declared derivation against every relation of the carrier.

    carrier is an AlgebraSpec or a Presentation.  The derivation extends by
    the graded Leibniz rule with total-degree signs.  Checks: for every
    truncated generator g of height h, sigma(g^h) = h g^{h-1} sigma(g)
    reduces to zero; for every rewrite rule, sigma(lhs) - sigma(rhs) reduces
    to zero.  Exterior squares need no check: sigma(g)g - g sigma(g)
    vanishes identically for odd g.
    """
    alg: AlgebraSpec = getattr(carrier, "algebra", carrier)
    if any(g.kind == "divided" for g in alg.generators):
        raise UnsupportedKind("derivations on divided generators are not modeled")
    p = alg.field.p

    sigma: list[TermDict] = []
    for g in alg.generators:
        terms = alg.dict_from_input(d.images.get(g.name, []))  # type: ignore[arg-type]
        deg = alg.dict_total_degree(terms)
        if deg is not None and deg != g.total_degree + 1:
            raise DegreeMismatch(
                f"sigma({g.name}) has total degree {deg}, expected {g.total_degree + 1}"
            )
        sigma.append(terms)

    def sigma_mono(mono: Mono) -> TermDict:
        out: TermDict = {}
        prefix_parity = 0
        for i, g in enumerate(alg.generators):
            e = mono[i]
            if e == 0:
                continue
            if sigma[i]:
                before = mono[:i] + (0,) * (len(mono) - i)
                after = (0,) * (i + 1) + mono[i + 1 :]
                after = after[:i] + (e - 1,) + after[i + 1 :]
                term = alg.mul_dicts({before: 1}, sigma[i])
                term = alg.mul_dicts(term, {after: 1})
                coeff = (e % p) * (-1 if prefix_parity else 1)
                out = alg.add_dicts(out, alg.scale_dict(coeff, term))
            prefix_parity = (prefix_parity + e * g.total_degree) % 2
        return out

    def sigma_dict(elt: TermDict) -> TermDict:
        out: TermDict = {}
        for m, c in elt.items():
            out = alg.add_dicts(out, alg.scale_dict(c, sigma_mono(m)))
        return out

    if hasattr(carrier, "normal_form_dict"):
        reduce = carrier.normal_form_dict
    else:
        reduce = lambda x: x  # noqa: E731 - plain algebras are already normal

    checks: list[tuple[str, bool, str]] = []
    for i, g in enumerate(alg.generators):
        if g.kind != "truncated":
            continue
        h = g.height or 0
        top = tuple(h - 1 if j == i else 0 for j in range(len(alg.generators)))
        residual = reduce(alg.scale_dict(h, alg.mul_dicts({top: 1}, sigma[i])))
        checks.append(
            (f"sigma({g.name}^{h}) -> 0", not residual, alg.format_dict(residual))
        )
    for rule in getattr(carrier, "rules", ()):
        lhs_val = sigma_mono(rule.lhs)
        rhs_val = sigma_dict(rule.rhs)
        residual = reduce(alg.add_dicts(lhs_val, alg.scale_dict(-1, rhs_val)))
        desc = (
            f"sigma compatible with {alg.format_mono(rule.lhs)} -> "
            f"{alg.format_dict(rule.rhs)}"
        )
        checks.append((desc, not residual, alg.format_dict(residual)))
    return DerivationReport(tuple(checks))
