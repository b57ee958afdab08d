"""Lie brackets, bounded balanced-subalgebra certificates, and conjugation.

Balanced and ideal-freeness conditions quantify over an infinite-dimensional
algebra.  Everything here is bounded evidence over a finite probe grid: the
monomial multiples ``x^a * g`` (``|a| <= d``) of the ambient generators ``g``.
A certificate records its bounds so the pass/fail/inconclusive verdict can be
replayed.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .derivations import (
    Variety,
    integral_variety,
    is_smooth,
    origin_algebra,
    singular_locus,
    tangent_algebra,
    tangent_family,
)
from .errors import DomainError, ExtractionError, InversionError
from .groebner import VfModule, module_equal
from .poly import Poly, RingCtx, VField, _check_ring, apply_field, exact_quotient


def bracket(D: VField, E: VField) -> VField:
    """[D, E]_j = D(E_j) - E(D_j)."""
    _check_ring(D.ring, E.ring)
    return VField(D.ring, [apply_field(D, e) - apply_field(E, d) for d, e in zip(D.coeffs, E.coeffs)])


def closure_witness(A: VfModule) -> tuple[VField, VField, VField] | None:
    """First generator pair whose bracket escapes A, or None."""
    gens = A.gens
    for i, j in itertools.combinations(range(len(gens)), 2):
        b = bracket(gens[i], gens[j])
        if not A.contains(b):
            return gens[i], gens[j], b
    return None


def bracket_closure_check(A: VfModule) -> bool:
    """Brackets of all generator pairs lie in A.

    Sufficient for the whole module: [fu, gv] = fg[u,v] + f u(g) v - g v(f) u.
    """
    return closure_witness(A) is None


def monomials_upto(ring: RingCtx, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree <= d, by degree, largest first within a degree."""
    out = []
    for deg in range(d + 1):
        layer = [
            e
            for e in itertools.product(range(deg + 1), repeat=ring.n)
            if sum(e) == deg
        ]
        layer.sort(key=ring.key, reverse=True)
        out.extend(layer)
    return out


def probe_grid(ambient: VfModule, d: int) -> list[VField]:
    """Monomial multiples of the ambient generators, deduplicated, in grid order."""
    ring = ambient.ring
    seen = set()
    probes = []
    for e in monomials_upto(ring, d):
        m = ring.monomial(e)
        for g in ambient.gens:
            p = m * g
            if not p.is_zero() and p not in seen:
                seen.add(p)
                probes.append(p)
    return probes


@dataclass
class Certificate:
    verdict: str  # pass | fail | inconclusive
    degree_bound: int
    depth: int
    witness: VField | None = None
    probes: tuple[VField, ...] = ()
    checked: int = 0
    counterexample: dict | None = None
    ideal_evidence: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def probe_count(self) -> int:
        return len(self.probes)

    def to_json(self) -> dict:
        from .expr_io import to_jsonable

        out = {
            "verdict": self.verdict,
            "witness": to_jsonable(self.witness),
            "d": self.degree_bound,
            "k": self.depth,
            "probe_count": self.probe_count,
            "brackets_checked": self.checked,
        }
        if self.counterexample is not None:
            out["counterexample"] = to_jsonable(self.counterexample)
        if self.ideal_evidence:
            out["ideal_freeness"] = to_jsonable(self.ideal_evidence)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _probe_brackets(a: VField, A: VfModule, probes: Sequence[VField], k: int):
    """Yield (path, bracket, inside) over depth-1 then depth-2 brackets."""
    level1 = []
    for p in probes:
        b = bracket(a, p)
        level1.append(b)
        yield (p,), b, A.contains(b)
    if k >= 2:
        for p, b in zip(probes, level1):
            for q in probes:
                c = bracket(b, q)
                yield (p, q), c, A.contains(c)


def ad_probe(a: VField, A: VfModule, ambient: VfModule, d: int = 4, k: int = 2) -> Certificate:
    """Check [a, B] ⊂ A and (k = 2) [[a, B], B] ⊂ A over the probe grid."""
    if a.is_zero():
        raise DomainError("the witness must be a nonzero field")
    if k not in (1, 2):
        raise DomainError("probe depth must be 1 or 2")
    if not A.contains(a):
        raise DomainError("the witness is not an element of A")
    probes = tuple(probe_grid(ambient, d))
    checked = 0
    for path, b, inside in _probe_brackets(a, A, probes, k):
        checked += 1
        if not inside:
            cex = {"a": a, "probes": list(path), "bracket": b}
            return Certificate("fail", d, k, witness=a, probes=probes, checked=checked, counterexample=cex)
    return Certificate("pass", d, k, witness=a, probes=probes, checked=checked)


def replay(cert: Certificate, A: VfModule) -> str:
    """Re-run every probe bracket of a certificate; returns the verdict found."""
    if cert.witness is None:
        return cert.verdict
    for _, _, inside in _probe_brackets(cert.witness, A, cert.probes, cert.depth):
        if not inside:
            return "fail"
    return "pass"


def _candidates(A: VfModule, d: int, max_total: int | None = None) -> list[VField]:
    """Monomial multiples of A's reduced basis, generator by generator."""
    ring = A.ring
    mons = monomials_upto(ring, d)
    out = []
    for g in A.basis:
        for e in mons:
            c = ring.monomial(e) * g
            if max_total is None or c.degree() <= max_total:
                out.append(c)
    return out


def _escape_search(c: VField, A: VfModule, probes: Sequence[VField], depth: int, budget: int):
    """Best-first search for an iterated bracket of c with probes leaving A."""
    heap = [(c.degree(), 0, 0, c, ())]
    seen = {c}
    counter = itertools.count(1)
    expanded = 0
    while heap and expanded < budget:
        _, lvl, _, v, path = heapq.heappop(heap)
        expanded += 1
        if lvl >= depth:
            continue
        for p in probes:
            b = bracket(v, p)
            if b.is_zero() or b in seen:
                continue
            if not A.contains(b):
                return path + (p,), b
            seen.add(b)
            heapq.heappush(heap, (b.degree(), lvl + 1, next(counter), b, path + (p,)))
    return None


def balanced_certificate(
    A: VfModule,
    ambient: VfModule,
    d: int = 4,
    k_ideal: int | None = None,
    budget: int = 200,
) -> Certificate:
    """Bounded evidence that A is balanced in the ambient algebra.

    (i) Search a witness a among monomial multiples of A's basis with
    [a, B] ⊂ A and [[a, B], B] ⊂ A on the probe grid.  (ii) For each element
    of A of degree <= d in the same grid, find an iterated bracket with
    low-degree ambient probes that escapes A, refuting that it generates an
    ideal of the ambient algebra inside A.
    """
    if not ambient.contains_module(A):
        raise DomainError("A is not contained in the ambient algebra")
    k_ideal = d + 2 if k_ideal is None else k_ideal
    probes = tuple(probe_grid(ambient, d))

    if module_equal(A, ambient):
        return Certificate(
            "fail", d, 2, probes=probes,
            ideal_evidence=[{"element": g, "escape": None} for g in A.basis[:1]],
            notes=["A equals the ambient algebra, hence is a nonzero ideal of it"],
        )

    witness_cert = None
    rejected = 0
    last_fail = None
    for a in _candidates(A, d):
        cert = ad_probe(a, A, ambient, d, 2)
        if cert.verdict == "pass":
            witness_cert = cert
            break
        rejected += 1
        last_fail = cert.counterexample

    escape_probes = tuple(probe_grid(ambient, 1))
    evidence = []
    unrefuted = 0
    for c in _candidates(A, d, max_total=d):
        hit = _escape_search(c, A, escape_probes, k_ideal, budget)
        if hit is None:
            unrefuted += 1
            evidence.append({"element": c, "escape": None})
        else:
            path, b = hit
            evidence.append({"element": c, "escape": {"probes": list(path), "bracket": b}})

    notes = [f"{rejected} witness candidates rejected before the witness"]
    if witness_cert is None:
        notes = [f"no witness among {rejected} candidates at d={d}"]
        cert = Certificate("inconclusive", d, 2, probes=probes, counterexample=last_fail,
                           ideal_evidence=evidence, notes=notes)
        return cert
    verdict = "pass" if unrefuted == 0 else "inconclusive"
    if unrefuted:
        notes.append(f"{unrefuted} low-degree elements found no escaping bracket within depth {k_ideal}")
    return Certificate(
        verdict, d, 2, witness=witness_cert.witness, probes=probes,
        checked=witness_cert.checked, ideal_evidence=evidence, notes=notes,
    )


def germ_irreducible(X: Variety) -> bool | None:
    """True when irreducibility at 0 follows cheaply, None when undecided.

    A smooth germ is irreducible; so is a hypersurface germ in n >= 3
    variables whose singular locus is at most the origin (it is normal).
    """
    if X.is_empty() or X.is_full():
        return None
    S = singular_locus(X)
    if S.is_empty():
        return True
    m = _max_ideal(X.ring)
    point = S.ideal.contains_ideal(m) and m.contains_ideal(S.ideal)
    if point and X.ideal.is_principal() and X.ring.n >= 3:
        return True
    return None


def _max_ideal(ring: RingCtx):
    from .groebner import Ideal

    return Ideal(ring, list(ring.gens))


@dataclass(frozen=True)
class VisibilityReport:
    ambient: str
    integral_variety: Variety
    equals_tangent_algebra: bool
    smooth: bool | None
    isolated_singularity: bool | None
    irreducible: bool | None
    in_ambient: bool
    verdict: str

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "ambient": self.ambient,
            "integral_variety": self.integral_variety.to_json(),
            "A == D_X(A)": self.equals_tangent_algebra,
            "X(A) smooth": self.smooth,
            "X(A) isolated singularity at 0": self.isolated_singularity,
            "X(A) irreducible": self.irreducible,
            "A in ambient": self.in_ambient,
        }


def visibility_diagnostic(
    A: VfModule, ambient: str = "full", family: Sequence[Variety] | None = None
) -> VisibilityReport:
    """Compare A with D_X(A); report the shape of a maximal visible subalgebra.

    ``full``: maximal-visible shape in D when A = D_X(A) with X(A) smooth,
    nonempty and proper.  ``at_origin``: A ⊂ D_0, A = D_X(A), X(A)
    irreducible with an isolated singularity at 0.  ``relative``: A equals the
    tangent algebra of the family together with X(A).
    """
    ring = A.ring
    XA = integral_variety(A)
    proper = not XA.is_empty() and not XA.is_full()
    equal = proper and module_equal(A, tangent_algebra(XA))
    smooth = is_smooth(XA) if proper else None
    isolated = None
    irreducible = None
    in_amb = True
    if ambient in ("at_origin", "origin"):
        ambient = "at_origin"
        in_amb = origin_algebra(ring).contains_module(A)
        if proper and not smooth:
            S = singular_locus(XA)
            m = _max_ideal(ring)
            isolated = S.ideal.contains_ideal(m) and m.contains_ideal(S.ideal)
        elif proper:
            isolated = False
        irreducible = germ_irreducible(XA) if proper else None
        ok = in_amb and equal and bool(isolated) and irreducible is True
        verdict = "maximal visible shape in D_0" if ok else "not of maximal visible shape"
    elif ambient == "relative":
        if not family:
            raise DomainError("relative ambient needs a family")
        B = tangent_family(family)
        in_amb = B.contains_module(A)
        equal = proper and module_equal(A, tangent_family([*family, XA]))
        ok = in_amb and equal
        verdict = "relative tangent-algebra shape" if ok else "not of relative tangent-algebra shape"
    elif ambient == "full":
        ok = equal and bool(smooth)
        verdict = "maximal visible shape in D" if ok else "not of maximal visible shape"
    else:
        raise DomainError(f"unknown ambient kind {ambient!r}")
    return VisibilityReport(ambient, XA, equal, smooth, isolated, irreducible, in_amb, verdict)


# automorphisms


def _linear_matrix(images: Sequence[Poly]) -> list[list[Fraction]]:
    n = len(images)
    rows = []
    for im in images:
        row = []
        for j in range(n):
            e = [0] * n
            e[j] = 1
            row.append(im.terms.get(tuple(e), Fraction(0)))
        rows.append(row)
    return rows


def _invert_matrix(M: list[list[Fraction]]) -> list[list[Fraction]] | None:
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _compose_images(outer: Sequence[Poly], inner: Sequence[Poly]) -> tuple[Poly, ...]:
    """Images of x_j under outer∘inner, i.e. inner(x_j) with x := outer images."""
    return tuple(g.subs(outer) for g in inner)


def _classify(images: Sequence[Poly]) -> str:
    if all(im.degree() <= 1 and im.constant_term == 0 for im in images):
        return "linear"
    if _triangular_order(images) is not None:
        return "elementary-triangular"
    return "composite"


def _triangular_order(images: Sequence[Poly]):
    """Order in which x_i -> a_i x_i + h_i(earlier variables), if one exists."""
    ring = images[0].ring
    n = ring.n
    chosen: list[int] = []
    remaining = set(range(n))
    while remaining:
        pick = None
        for i in sorted(remaining):
            xi = ring.var(i)
            a = images[i].terms.get(xi.leading_monomial(), Fraction(0))
            if a == 0:
                continue
            h = images[i] - xi.scale(a)
            if h.variables() <= set(chosen):
                pick = i
                break
        if pick is None:
            return None
        chosen.append(pick)
        remaining.discard(pick)
    return chosen


def _triangular_inverse(images: Sequence[Poly]) -> tuple[Poly, ...]:
    ring = images[0].ring
    order = _triangular_order(images)
    inv: dict[int, Poly] = {}
    for i in order:
        xi = ring.var(i)
        a = images[i].terms[xi.leading_monomial()]
        h = images[i] - xi.scale(a)
        # substitute already-inverted variables into h
        subs = [inv.get(j, ring.var(j)) for j in range(ring.n)]
        inv[i] = (xi - h.subs(subs)) / a
    return tuple(inv[i] for i in range(ring.n))


@dataclass(frozen=True)
class AutoMap:
    """Polynomial automorphism phi of (C^n, 0), stored through its pullback.

    ``images[j]`` is phi*(x_j); ``inverse_images[j]`` is (phi*)^{-1}(x_j).
    """

    images: tuple[Poly, ...]
    inverse_images: tuple[Poly, ...] | None = None
    kind: str = "composite"

    @classmethod
    def create(cls, images: Sequence[Poly], inverse: Sequence[Poly] | None = None) -> AutoMap:
        images = tuple(images)
        ring = images[0].ring
        if len(images) != ring.n:
            raise DomainError(f"an automorphism of {ring.n} variables needs {ring.n} images")
        for im in images:
            _check_ring(ring, im.ring)
            if im.constant_term != 0:
                raise DomainError("automorphism images must vanish at the origin")
        lin = _linear_matrix(images)
        if _invert_matrix(lin) is None:
            raise InversionError("singular linear part at the origin")
        kind = _classify(images)
        phi = cls(images, tuple(inverse) if inverse is not None else None, kind)
        if phi.inverse_images is None and kind != "composite":
            phi = invert(phi).inverse()
        return phi

    @property
    def ring(self) -> RingCtx:
        return self.images[0].ring

    def pullback(self, f: Poly) -> Poly:
        """phi*(f) = f∘phi."""
        return f.subs(self.images)

    def pullback_inverse(self, f: Poly) -> Poly:
        if self.inverse_images is None:
            raise InversionError("no inverse available for this map")
        return f.subs(self.inverse_images)

    def inverse(self) -> AutoMap:
        if self.inverse_images is None:
            raise InversionError("no inverse available for this map")
        return AutoMap(self.inverse_images, self.images, self.kind)

    def to_json(self) -> dict:
        from .expr_io import render_poly

        out = {
            "kind": self.kind,
            "images": dict(zip(self.ring.names, (render_poly(p) for p in self.images))),
        }
        if self.inverse_images is not None:
            out["inverse"] = dict(zip(self.ring.names, (render_poly(p) for p in self.inverse_images)))
        return out


def verify(phi: AutoMap) -> bool:
    """Both compositions of images and inverse images give the coordinates."""
    if phi.inverse_images is None:
        return False
    ring = phi.ring
    ident = ring.gens
    return (
        _compose_images(phi.images, phi.inverse_images) == ident
        and _compose_images(phi.inverse_images, phi.images) == ident
    )


def invert(phi: AutoMap) -> AutoMap:
    """Exact inverse for linear and triangular maps; supplied inverse otherwise."""
    ring = phi.ring
    if phi.kind == "linear":
        Minv = _invert_matrix(_linear_matrix(phi.images))
        if Minv is None:
            raise InversionError("singular linear part at the origin")
        inv = tuple(
            sum((ring.var(j).scale(Minv[i][j]) for j in range(ring.n)), ring.zero())
            for i in range(ring.n)
        )
    elif phi.kind == "elementary-triangular":
        inv = _triangular_inverse(phi.images)
    elif phi.inverse_images is not None:
        inv = phi.inverse_images
    else:
        raise InversionError("composite map without a supplied inverse")
    out = AutoMap(inv, phi.images, phi.kind)
    if not verify(out):
        raise InversionError("inverse verification failed")
    return out


def compose(phi: AutoMap, psi: AutoMap) -> AutoMap:
    """The pullback phi*∘psi*: x_j -> psi*(x_j) with x := phi* images."""
    _check_ring(phi.ring, psi.ring)
    images = _compose_images(phi.images, psi.images)
    inv = None
    if phi.inverse_images is not None and psi.inverse_images is not None:
        inv = _compose_images(psi.inverse_images, phi.inverse_images)
    return AutoMap(images, inv, "composite")


def auto_ops(phi: AutoMap, psi: AutoMap | None, tag: str):
    if tag == "compose":
        if psi is None:
            raise DomainError("compose needs two maps")
        return compose(phi, psi)
    if tag == "invert":
        return invert(phi)
    if tag == "verify":
        return verify(phi)
    raise DomainError(f"unknown automorphism operation {tag!r}")


def _verified(phi: AutoMap) -> AutoMap:
    if not verify(phi):
        raise InversionError("automorphism inverse does not verify")
    return phi


def conjugate_field(phi: AutoMap, D: VField) -> VField:
    """Phi(D) = phi*∘D∘(phi*)^{-1}; coordinates phi*(D((phi*)^{-1}(x_j)))."""
    _verified(phi)
    return VField(D.ring, [phi.pullback(apply_field(D, psi_j)) for psi_j in phi.inverse_images])


def conjugate_module(phi: AutoMap, A: VfModule) -> VfModule:
    return VfModule(A.ring, [conjugate_field(phi, g) for g in A.gens], rank=A.rank)


def map_ideal_check(phi: AutoMap, X: Variety, Y: Variety) -> None:
    """phi*(I_Y) ⊂ I_X and (phi*)^{-1}(I_X) ⊂ I_Y; raises naming the first failure."""
    from .expr_io import render_poly

    _verified(phi)
    for g in Y.gens:
        if not X.ideal.contains(phi.pullback(g)):
            raise DomainError(f"phi*({render_poly(g)}) is not in I_X")
    for f in X.gens:
        if not Y.ideal.contains(phi.pullback_inverse(f)):
            raise DomainError(f"(phi*)^-1({render_poly(f)}) is not in I_Y")


def conjugation_check(phi: AutoMap, X: Variety, Y: Variety) -> bool:
    """Phi(D_Y) == D_X for phi sending X onto Y."""
    map_ideal_check(phi, X, Y)
    return module_equal(conjugate_module(phi, tangent_algebra(Y)), tangent_algebra(X))


def lambda_apply(f: Poly, phi: AutoMap, D: VField) -> VField:
    """lambda_f(D) = Phi(f * Phi^{-1}(D)), computed literally."""
    _verified(phi)
    inner = conjugate_field(phi.inverse(), D)
    return conjugate_field(phi, f * inner)


def extract_factor(pairs: Sequence[tuple[VField, VField]]) -> Poly:
    """Common factor u with L = u * D for every (D, L) pair, or ExtractionError."""
    from .expr_io import render_field

    if len(pairs) < 2:
        raise DomainError("factor extraction needs at least two probes")
    factor = None
    for D, L in pairs:
        if D.is_zero():
            raise DomainError("probe fields must be nonzero")
        for d, l in zip(D.coeffs, L.coeffs):
            if d.is_zero():
                if not l.is_zero():
                    raise ExtractionError(f"lambda({render_field(D)}) leaves the module generated by the probe")
                continue
            q = exact_quotient(l, d)
            if q is None:
                raise ExtractionError(f"lambda({render_field(D)}) is not a multiple of the probe")
            if factor is None:
                factor = q
            elif q != factor:
                raise ExtractionError(f"factors disagree at probe {render_field(D)}")
    return factor


def lambda_factor_extract(
    phi: AutoMap,
    f: Poly,
    probes: Sequence[VField],
    table: Mapping[int, VField] | Callable[[VField], VField] | None = None,
) -> Poly:
    """Recover phi*(f) from lambda_f values on the probes.

    ``table`` overrides lambda values (by probe index, or as a function),
    which models a Phi known only through a finite table.
    """
    pairs = []
    for i, D in enumerate(probes):
        if callable(table):
            L = table(D)
        elif table is not None and i in table:
            L = table[i]
        else:
            L = lambda_apply(f, phi, D)
        pairs.append((D, L))
    return extract_factor(pairs)
