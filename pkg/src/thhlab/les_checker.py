"""Degreewise exactness for long exact sequences given on monomial bases.

A sequence ... -> A_n -> B_n -> C_{n-1} -> A_{n-1} -> ... is specified by
three graded algebras and three maps: rho (an algebra map, extended
multiplicatively from generator images), and boundary/tau (given directly on
basis monomials).  C is stored unshifted; the boundary consumes it with a
degree drop of one.  Exactness is verified per degree both as dimension
identities and as subspace equalities, and boundary/tau are checked to be
module maps over A through a declared coefficient action."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .fp_linalg import FpMatrix, spans_equal
from .graded_algebra import (
    DegreeMismatch,
    GradedError,
    Mono,
    TermDict,
    check_morphism,
    exterior,
    make_algebra,
    polynomial,
    truncated,
)
from .presentation import make_theta

JOINT_TAU_RHO = "im(tau) = ker(rho)"
JOINT_RHO_BOUNDARY = "im(rho) = ker(boundary)"
JOINT_BOUNDARY_TAU = "im(boundary) = ker(tau)"
JOINT_ALTERNATING = "alternating dimension identity"


class InexactAt(GradedError):
    def __init__(self, degree: int, joint: str, detail: str = "") -> None:
        self.degree = degree
        self.joint = joint
        msg = f"not exact in degree {degree} at {joint}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass(eq=False)
class LongExactSpec:
    """A, B, C may be algebra specs, presentations, or None for the zero
    module.  rho maps A-generator names to B-elements; boundary and tau act on
    single basis monomials and return element data (dict, pairs, or empty).
    coefficient_action gives the algebra map A -> C that induces the A-module
    structure used for the module-map checks."""

    A: object
    B: object
    C: object
    rho: Mapping[str, object]
    boundary: Callable[[Mono], object]
    tau: Callable[[Mono], object]
    coefficient_action: Optional[Mapping[str, object]] = None


@dataclass(frozen=True)
class ExactnessReport:
    cap: int
    # (n, dim A_n, dim B_n, dim C_{n-1}, rank rho_n, rank boundary_n, rank tau_n)
    rows: tuple[tuple[int, int, int, int, int, int, int], ...]
    boundary_pairs: int
    tau_pairs: int

    def max_degree(self) -> int:
        return max((r[0] for r in self.rows), default=-1)


class _Graded:
    """Uniform view of an algebra spec, a presentation, or the zero module."""

    def __init__(self, obj, cap: int) -> None:
        self.obj = obj
        self.spec = None if obj is None else getattr(obj, "algebra", obj)
        self.table = {} if obj is None else obj.basis_by_degree(cap)
        self.index = {n: {m: i for i, m in enumerate(ms)} for n, ms in self.table.items()}

    def at(self, n: int) -> list:
        return self.table.get(n, [])

    def dim(self, n: int) -> int:
        return len(self.at(n))

    def normalize(self, data) -> TermDict:
        if self.spec is None:
            if data:
                raise DegreeMismatch("nonzero image in the zero module")
            return {}
        d = self.spec.dict_from_input(data)
        if hasattr(self.obj, "normal_form_dict"):
            d = self.obj.normal_form_dict(d)
        return d

    def apply_linear(self, fn: Callable[[Mono], object], data: TermDict,
                     target: "_Graded") -> TermDict:
        out: TermDict = {}
        for m, c in data.items():
            img = target.normalize(fn(m))
            if img and target.spec is not None:
                out = target.spec.add_dicts(out, target.spec.scale_dict(c, img))
        return out


def _require_algebra_map(source, target: _Graded, images, cap: int, what: str) -> None:
    report = check_morphism(source, target.spec, images, cap)
    if not report.relations_ok:
        bad = "; ".join(desc for desc, ok in report.relation_results if not ok)
        raise ValueError(f"{what} is not an algebra map: {bad}")


def _matrix(field, src: list, dst_index: dict, image: Callable[[Mono], TermDict]) -> FpMatrix:
    cols = []
    for m in src:
        d = image(m)
        cols.append({dst_index[m2]: c for m2, c in d.items()})
    return FpMatrix.from_columns(field, len(dst_index), cols)


def _image_rows(m: FpMatrix) -> FpMatrix:
    """The image (column span) of m, presented as rows for span comparison."""
    return FpMatrix(m.field, m.data.T.copy())


def check_les(spec: LongExactSpec, cap: int) -> ExactnessReport:
    """Verify exactness in every degree <= cap, raising InexactAt on the first
    failure (lowest degree, joints in sequence order).  Also checks that rho
    and the coefficient action are algebra maps and that boundary and tau are
    module maps over A, exhaustively on generator-times-basis pairs."""
    A = _Graded(spec.A, cap)
    B = _Graded(spec.B, cap)
    C = _Graded(spec.C, cap)
    sides = [s for s in (A, B, C) if s.spec is not None]
    if not sides:
        return ExactnessReport(cap, (), 0, 0)
    field = sides[0].spec.field
    for s in sides:
        if s.spec.field != field:
            raise ValueError("the three terms live over different fields")

    if A.spec is not None and B.spec is not None:
        _require_algebra_map(spec.A, B, spec.rho, cap, "rho")
    if spec.coefficient_action is not None and A.spec is not None and C.spec is not None:
        _require_algebra_map(spec.A, C, spec.coefficient_action, cap, "the coefficient action")

    rho_imgs = None
    if A.spec is not None and B.spec is not None:
        rho_imgs = [B.normalize(spec.rho[g.name]) for g in A.spec.generators]

    def rho_of(mono: Mono) -> TermDict:
        if rho_imgs is None:
            return {}
        out: TermDict = {(0,) * len(B.spec.generators): 1}
        for i, e in enumerate(mono):
            if e:
                out = B.spec.mul_dicts(out, B.spec.pow_dict(rho_imgs[i], e))
        return out

    def checked(fn, graded_src, graded_dst, drop, name):
        def image(mono: Mono) -> TermDict:
            d = graded_dst.normalize(fn(mono))
            want = graded_src.spec.dict_total_degree({mono: 1}) - drop
            got = graded_dst.spec.dict_total_degree(d) if d and graded_dst.spec else None
            if d and got != want:
                raise DegreeMismatch(f"{name} image of degree {want + drop} monomial has degree {got}")
            return d
        return image

    bdy_img = checked(spec.boundary, B, C, 1, "boundary") if B.spec is not None else None
    tau_img = checked(spec.tau, C, A, 0, "tau") if C.spec is not None else None

    def mat_rho(n: int) -> FpMatrix:
        return _matrix(field, A.at(n), B.index.get(n, {}), rho_of)

    def mat_bdy(n: int) -> FpMatrix:
        src = B.at(n) if bdy_img is not None else []
        return _matrix(field, src, C.index.get(n - 1, {}), bdy_img or (lambda m: {}))

    def mat_tau(n: int) -> FpMatrix:
        src = C.at(n) if tau_img is not None else []
        return _matrix(field, src, A.index.get(n, {}), tau_img or (lambda m: {}))

    rows = []
    alternating = 0
    next_bdy = mat_bdy(0)
    for n in range(cap + 1):
        m_rho, m_bdy, m_tau = mat_rho(n), next_bdy, mat_tau(n)
        next_bdy = mat_bdy(n + 1) if n < cap else None
        a_n, b_n, c_prev = A.dim(n), B.dim(n), C.dim(n - 1)
        r_rho, r_bdy, r_tau = m_rho.rank(), m_bdy.rank(), m_tau.rank()

        # dimension identities first, then the subspace comparisons
        if a_n - r_rho != r_tau:
            raise InexactAt(n, JOINT_TAU_RHO, f"ker rho has dim {a_n - r_rho}, im tau {r_tau}")
        if b_n - r_bdy != r_rho:
            raise InexactAt(n, JOINT_RHO_BOUNDARY, f"ker boundary has dim {b_n - r_bdy}, im rho {r_rho}")
        alternating = (a_n - b_n + c_prev) - alternating
        if alternating != r_tau:
            raise InexactAt(n, JOINT_ALTERNATING,
                            f"running alternating sum {alternating}, rank tau {r_tau}")
        if not spans_equal(m_rho.kernel(), _image_rows(m_tau)):
            raise InexactAt(n, JOINT_TAU_RHO, "subspaces differ")
        if not spans_equal(m_bdy.kernel(), _image_rows(m_rho)):
            raise InexactAt(n, JOINT_RHO_BOUNDARY, "subspaces differ")
        if next_bdy is not None:
            c_n, r_next = C.dim(n), next_bdy.rank()
            if c_n - r_tau != r_next:
                raise InexactAt(n, JOINT_BOUNDARY_TAU,
                                f"ker tau has dim {c_n - r_tau}, im boundary {r_next}")
            if not spans_equal(m_tau.kernel(), _image_rows(next_bdy)):
                raise InexactAt(n, JOINT_BOUNDARY_TAU, "subspaces differ")
        rows.append((n, a_n, b_n, c_prev, r_rho, r_bdy, r_tau))

    boundary_pairs = tau_pairs = 0
    if spec.coefficient_action is not None and all(s.spec is not None for s in (A, B, C)):
        nu_imgs = {g.name: C.normalize(spec.coefficient_action[g.name])
                   for g in A.spec.generators}
        for i, g in enumerate(A.spec.generators):
            g_mono = tuple(1 if j == i else 0 for j in range(len(A.spec.generators)))
            g_deg = g.total_degree
            rho_g, nu_g = rho_of(g_mono), nu_imgs[g.name]
            for n, monos in B.table.items():
                if n + g_deg > cap:
                    continue
                for b in monos:
                    lhs = B.apply_linear(bdy_img, B.spec.mul_dicts(rho_g, {b: 1}), C)
                    rhs = C.spec.mul_dicts(nu_g, C.normalize(bdy_img(b)))
                    if lhs != rhs:
                        raise InexactAt(n + g_deg, "boundary module structure",
                                        f"over {g.name} at {B.spec.format_mono(b)}")
                    boundary_pairs += 1
            for n, monos in C.table.items():
                if n + g_deg > cap:
                    continue
                for cmono in monos:
                    lhs = C.apply_linear(tau_img, C.spec.mul_dicts(nu_g, {cmono: 1}), A)
                    rhs = A.normalize(
                        A.spec.mul_dicts({g_mono: 1}, A.normalize(tau_img(cmono)))
                    )
                    if lhs != rhs:
                        raise InexactAt(n + g_deg, "tau module structure",
                                        f"over {g.name} at {C.spec.format_mono(cmono)}")
                    tau_pairs += 1

    return ExactnessReport(cap, tuple(rows), boundary_pairs, tau_pairs)


# -- the two concrete sequences ------------------------------------------------------


def _target_of_boundary(p: int):
    return make_algebra(
        p,
        [exterior("e1", 2 * p - 1), exterior("l1", 2 * p - 1), polynomial("m1", 2 * p)],
    )


def _boundary_formula(C, p: int, ambiguity: int):
    """Common core: the exterior degree-1 class maps a tower power k to m1^k;
    a bare tower power with k prime to p drops to e1 m1^{k-1}, determined only
    up to an l1 m1^{k-1} summand (the ambiguity coefficient)."""

    def base(dlog: int, k: int) -> TermDict:
        if dlog:
            return {C.mono_from_names({"m1": k}): 1}
        if k and k % p:
            out = {C.mono_from_names({"e1": 1, "m1": k - 1}): 1}
            if ambiguity:
                out[C.mono_from_names({"l1": 1, "m1": k - 1})] = ambiguity
            return out
        return {}

    return base


def ell_sequence(p: int, ambiguity: int = 0) -> LongExactSpec:
    """The sequence relating E(l1,l2) ox P(m2), the log theory
    E(l1,dlogv) ox P(k1), and (shifted) E(e1,l1) ox P(m1)."""
    A = make_algebra(
        p,
        [exterior("l1", 2 * p - 1), exterior("l2", 2 * p * p - 1),
         polynomial("m2", 2 * p * p)],
    )
    B = make_algebra(
        p,
        [exterior("l1", 2 * p - 1), exterior("dlogv", 1), polynomial("k1", 2 * p)],
    )
    C = _target_of_boundary(p)
    rho = {"l1": [(1, {"l1": 1})], "l2": [], "m2": [(1, {"k1": p})]}
    nu = {"l1": [(1, {"l1": 1})], "l2": [], "m2": [(1, {"m1": p})]}
    base = _boundary_formula(C, p, ambiguity)

    def boundary(mono: Mono) -> TermDict:
        e, dlog, k = mono
        return C.mul_dicts({C.mono_from_names({"l1": e}): 1}, base(dlog, k))

    def tau(mono: Mono) -> TermDict:
        eps, f, m = mono
        if not eps or m % p != p - 1:
            return {}
        # module linearity over the odd generator l1 fixes the sign
        target = A.mono_from_names({"l1": f, "l2": 1, "m2": m // p})
        return {target: -1 if f % 2 else 1}

    return LongExactSpec(A, B, C, rho, boundary, tau, coefficient_action=nu)


def ku_sequence(p: int, ambiguity: int = 0) -> LongExactSpec:
    """The truncated-u analogue: the source is E(l1) tensored with the
    finitely presented algebra of make_theta, the middle is
    P_{p-1}(u) ox E(l1,dlogu) ox P(k1), and the boundary factors through the
    u-free part."""
    A = make_theta(p, extra_generators=(exterior("l1", 2 * p - 1),))
    B = make_algebra(
        p,
        [truncated("u", 2, p - 1), exterior("l1", 2 * p - 1),
         exterior("dlogu", 1), polynomial("k1", 2 * p)],
    )
    C = _target_of_boundary(p)
    rho: dict[str, object] = {
        "l1": [(1, {"l1": 1})],
        "u": [(1, {"u": 1})],
        "m2": [(1, {"k1": p})],
    }
    nu: dict[str, object] = {"l1": [(1, {"l1": 1})], "u": [], "m2": [(1, {"m1": p})]}
    for i in range(p):
        rho[f"a{i}"] = [(1, {"u": 1, "dlogu": 1, "k1": i})]
        nu[f"a{i}"] = []
    for j in range(1, p):
        rho[f"b{j}"] = [(1, {"u": 1, "k1": j})]
        nu[f"b{j}"] = []
    base = _boundary_formula(C, p, ambiguity)
    aspec = A.algebra
    top = {"u": p - 2, f"a{p - 1}": 1}

    def boundary(mono: Mono) -> TermDict:
        u_exp, e, dlog, k = mono
        if u_exp:
            return {}
        return C.mul_dicts({C.mono_from_names({"l1": e}): 1}, base(dlog, k))

    def tau(mono: Mono) -> TermDict:
        eps, f, m = mono
        if not eps or m % p != p - 1:
            return {}
        target = aspec.mono_from_names({"l1": f, "m2": m // p, **top})
        return {target: -1 if f % 2 else 1}

    return LongExactSpec(A, B, C, rho, boundary, tau, coefficient_action=nu)
