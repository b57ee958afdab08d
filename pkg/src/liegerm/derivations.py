"""Tangent algebras of varieties and integral varieties of vector-field modules.

A germ at the origin is modelled by a polynomial ideal.  The germ is empty
when the ideal is not contained in the maximal ideal of the origin, i.e. when
some generator has a nonzero constant term; it is the full germ when the
ideal is zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import DomainError
from .groebner import (
    Ideal,
    VfModule,
    ideal_intersect,
    krull_dimension,
    module_equal,
    module_intersect,
    quotient_by_unit_vector,
    syzygy_module,
)
from .poly import Poly, RingCtx, VField, apply_field, squarefree_part


@dataclass(frozen=True)
class Variety:
    """A germ X given by its ideal I_X.

    ``reduced`` is ``"asserted"`` (user claims I_X is radical), ``"verified"``
    (checked under the radical policy) or ``"unknown"``.
    """

    ideal: Ideal
    reduced: str = "asserted"
    radical_exact: bool = False
    notes: tuple[str, ...] = ()
    name: str | None = field(default=None, compare=False)

    @classmethod
    def of(cls, ring: RingCtx, gens: Sequence[Poly], **kw) -> Variety:
        return cls(Ideal(ring, gens), **kw)

    @classmethod
    def empty(cls, ring: RingCtx) -> Variety:
        return cls(Ideal(ring, [ring.one()]), reduced="verified", radical_exact=True)

    @classmethod
    def full(cls, ring: RingCtx) -> Variety:
        return cls(Ideal(ring, [ring.zero()]), reduced="verified", radical_exact=True)

    @property
    def ring(self) -> RingCtx:
        return self.ideal.ring

    @property
    def gens(self) -> tuple[Poly, ...]:
        return self.ideal.gens

    def is_empty(self) -> bool:
        return any(g.constant_term != 0 for g in self.ideal.gens) or self.ideal.is_unit()

    def is_full(self) -> bool:
        return self.ideal.is_zero()

    def same_set(self, other: Variety) -> bool:
        """Equality of (radical) ideals; both sides are taken as stored."""
        if self.is_empty() and other.is_empty():
            return True
        return self.ideal == other.ideal

    def __str__(self) -> str:
        from .expr_io import render_poly

        if self.is_empty():
            return "empty"
        return "V(" + ", ".join(render_poly(g) for g in self.ideal.basis) + ")"

    def to_json(self) -> dict:
        from .expr_io import render_poly

        out = {
            "ideal": [render_poly(g) for g in self.ideal.basis] if not self.is_empty() else ["1"],
            "empty": self.is_empty(),
            "radical_exact": self.radical_exact,
            "reduced": self.reduced,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def radical(I: Ideal) -> tuple[Ideal, bool]:
    """Radical under the policy: principal, monomial, or squarefree initial ideal.

    Returns ``(ideal, exact)``; when no rule applies the input is returned
    unchanged with ``exact=False``.
    """
    ring = I.ring
    if I.is_unit() or any(g.constant_term != 0 for g in I.gens):
        return Ideal(ring, [ring.one()]), True
    basis = I.basis
    if not basis:
        return I, True
    if len(basis) == 1:
        return Ideal(ring, [squarefree_part(basis[0]).monic()]), True
    if I.is_monomial():
        supports = set()
        for g in basis:
            e = g.leading_monomial()
            supports.add(tuple(1 if x else 0 for x in e))
        return Ideal(ring, [ring.monomial(e) for e in sorted(supports)]), True
    if all(max(lm) <= 1 for lm in I.leading_monomials()):
        # squarefree initial ideal forces I to be radical
        return I, True
    return I, False


def is_tangent(D: VField, X: Variety) -> bool:
    """D(f) ∈ I_X for every generator f of I_X."""
    return all(X.ideal.contains(apply_field(D, f)) for f in X.gens)


def full_algebra(ring: RingCtx) -> VfModule:
    return VfModule(ring, [VField.unit(ring, j) for j in range(ring.n)])


def origin_algebra(ring: RingCtx) -> VfModule:
    """Fields vanishing at 0: the maximal ideal times the free module."""
    gens = [x * VField.unit(ring, j) for x in ring.gens for j in range(ring.n)]
    return VfModule(ring, gens)


def tangent_algebra(X: Variety) -> VfModule:
    """Generators of {D : D(I_X) ⊂ I_X}.

    Solves sum_j a_j df_i/dx_j = sum_k b_ik f_k for all i by a syzygy
    computation and keeps the a-coordinates.
    """
    ring = X.ring
    fs = [f for f in X.gens if f]
    if not fs:
        return full_algebra(ring)
    if X.is_empty():
        return full_algebra(ring)
    m, n = len(fs), ring.n
    columns = []
    for j in range(n):
        columns.append(VField(ring, [f.partial(j) for f in fs]))
    for i in range(m):
        for k in range(m):
            columns.append(VField(ring, [-fs[k] if r == i else ring.zero() for r in range(m)]))
    syz = syzygy_module(columns)
    gens = [VField(ring, s.coeffs[:n]) for s in syz.gens]
    return VfModule(ring, [g for g in gens if not g.is_zero()], rank=n)


def tangent_family(family: Sequence[Variety]) -> VfModule:
    """Fields tangent to every member: the intersection of the tangent algebras."""
    if not family:
        raise DomainError("a variety family needs at least one member")
    A = tangent_algebra(family[0])
    for X in family[1:]:
        A = module_intersect(A, tangent_algebra(X))
    return A


def ambient_algebra(ring: RingCtx, kind: str = "full", family: Sequence[Variety] | None = None) -> VfModule:
    if kind == "full":
        return full_algebra(ring)
    if kind in ("at_origin", "origin"):
        return origin_algebra(ring)
    if kind == "relative":
        if not family:
            raise DomainError("relative ambient needs a nonempty family")
        return tangent_family(family)
    raise DomainError(f"unknown ambient kind {kind!r}")


def integral_ideal(A: VfModule) -> Ideal:
    """I(A) = {g : g·D ∈ A for all D} = intersection over j of (A : e_j)."""
    I = quotient_by_unit_vector(A, 0)
    for j in range(1, A.rank):
        if I.is_zero():
            break
        I = ideal_intersect(I, quotient_by_unit_vector(A, j))
    return I


def _germ(I: Ideal, exact: bool, notes: tuple[str, ...] = ()) -> Variety:
    ring = I.ring
    if I.is_unit() or any(g.constant_term != 0 for g in I.gens):
        return Variety.empty(ring)
    return Variety(
        Ideal(ring, list(I.basis) or [ring.zero()]),
        reduced="verified" if exact else "unknown",
        radical_exact=exact,
        notes=notes,
    )


def integral_variety(A: VfModule) -> Variety:
    """X(A): the germ of the radical of I(A), radical taken under the policy."""
    I = integral_ideal(A)
    rad, exact = radical(I)
    notes = () if exact else ("radical policy inapplicable; ideal stored unreduced",)
    return _germ(rad, exact, notes)


def _require_proper(X: Variety) -> None:
    if X.is_empty():
        raise DomainError("operation undefined for the empty germ")
    if X.is_full():
        raise DomainError("operation undefined for the full germ")


def _det(M: list[list[Poly]]) -> Poly:
    if len(M) == 1:
        return M[0][0]
    ring = M[0][0].ring
    total = ring.zero()
    for c, a in enumerate(M[0]):
        if a.is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in M[1:]]
        term = a * _det(minor)
        total = total + term if c % 2 == 0 else total - term
    return total


def jacobian_minors(gens: Sequence[Poly], size: int) -> list[Poly]:
    ring = gens[0].ring
    J = [[f.partial(j) for j in range(ring.n)] for f in gens]
    out = []
    for rows in itertools.combinations(range(len(gens)), size):
        for cols in itertools.combinations(range(ring.n), size):
            d = _det([[J[r][c] for c in cols] for r in rows])
            if d:
                out.append(d)
    return out


def singular_locus(X: Variety) -> Variety:
    """Sing X: zero set of I_X + (c×c Jacobian minors), c the codimension.

    The codimension comes from the Krull dimension, which is only correct for
    equidimensional X; non-principal inputs carry a note saying so.
    """
    _require_proper(X)
    notes = []
    if X.reduced == "unknown":
        notes.append("input not known to be reduced; Jacobian criterion may over-report")
    basis = list(X.ideal.basis)
    if len(basis) > 1:
        notes.append("equidimensionality assumed for the codimension")
    c = X.ring.n - krull_dimension(X.ideal)
    minors = jacobian_minors(basis, c) if c <= len(basis) else []
    rad, exact = radical(X.ideal + Ideal(X.ring, minors or [X.ring.zero()]))
    if not exact:
        notes.append("radical policy inapplicable; ideal stored unreduced")
    out = _germ(rad, exact, tuple(notes))
    return out


def is_smooth(X: Variety) -> bool:
    return singular_locus(X).is_empty()


@dataclass(frozen=True)
class SingChain:
    links: tuple[Variety, ...]

    @property
    def k_max(self) -> int:
        return len(self.links) - 1

    def to_json(self) -> dict:
        return {"k_max": self.k_max, "links": [v.to_json() for v in self.links]}


def sing_chain(X: Variety) -> SingChain:
    """[X, Sing X, Sing² X, ...] up to the last nonempty link."""
    _require_proper(X)
    links = [X]
    while True:
        S = singular_locus(links[-1])
        if S.is_empty():
            break
        if not S.ideal.contains_ideal(links[-1].ideal) or links[-1].ideal.contains_ideal(S.ideal):
            raise DomainError("singular locus did not shrink; input is probably not reduced")
        links.append(S)
        if len(links) > X.ring.n + 1:
            raise DomainError("singular-locus chain longer than n + 1")
    return SingChain(tuple(links))


@dataclass(frozen=True)
class RecoveryReport:
    integral_ideal: Ideal
    integral_variety: Variety
    integral_in_ideal: bool
    ideal_in_radical: bool
    verdict: str

    def to_json(self) -> dict:
        from .expr_io import render_poly

        return {
            "verdict": self.verdict,
            "integral_ideal": [render_poly(g) for g in self.integral_ideal.basis],
            "integral_variety": self.integral_variety.to_json(),
            "I(D_X) in I_X": self.integral_in_ideal,
            "I_X in rad I(D_X)": self.ideal_in_radical,
        }


def recovery_check(X: Variety) -> RecoveryReport:
    """Compare X with X(D_X) through both ideal containments."""
    _require_proper(X)
    I = integral_ideal(tangent_algebra(X))
    rad, exact = radical(I)
    XA = _germ(rad, exact)
    forward = X.ideal.contains_ideal(I)
    backward = rad.contains_ideal(X.ideal)
    if forward and backward:
        verdict = "equal"
    elif not exact:
        verdict = "containment only"
    else:
        verdict = "not equal"
    return RecoveryReport(I, XA, forward, backward, verdict)


def sing_stability_check(X: Variety) -> bool:
    """D_X == D_{X, Sing X}."""
    S = singular_locus(X)
    if S.is_empty():
        raise DomainError("X is smooth: Sing X is empty")
    return module_equal(tangent_algebra(X), tangent_family([X, S]))


def verify_components(X: Variety, family: Sequence[Variety]) -> bool:
    """I_X equals the intersection of the member ideals (double containment)."""
    if not family:
        return False
    meet = family[0].ideal
    for Y in family[1:]:
        meet = ideal_intersect(meet, Y.ideal)
    return meet.contains_ideal(X.ideal) and X.ideal.contains_ideal(meet)


@dataclass(frozen=True)
class IrredundancyReport:
    changes: tuple[bool, ...]
    names: tuple[str, ...]

    @property
    def irredundant(self) -> bool:
        return all(self.changes)

    @property
    def removable(self) -> list[str]:
        return [nm for nm, ch in zip(self.names, self.changes) if not ch]

    def to_json(self) -> dict:
        return {
            "irredundant": self.irredundant,
            "deletion_changes_algebra": dict(zip(self.names, self.changes)),
            "removable": self.removable,
        }


def irredundancy_check(family: Sequence[Variety]) -> IrredundancyReport:
    """For each member, does deleting it alter D_family?"""
    if not family:
        raise DomainError("a variety family needs at least one member")
    whole = tangent_family(family)
    ring = family[0].ring
    changes = []
    for i in range(len(family)):
        rest = list(family[:i]) + list(family[i + 1:])
        A = tangent_family(rest) if rest else full_algebra(ring)
        changes.append(not module_equal(A, whole))
    names = tuple(X.name or f"#{i}" for i, X in enumerate(family))
    return IrredundancyReport(tuple(changes), names)


def with_name(X: Variety, name: str) -> Variety:
    return replace(X, name=name)
