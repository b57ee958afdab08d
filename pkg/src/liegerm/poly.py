"""Exact multivariate polynomials over the rationals and polynomial vector fields.

A :class:`Poly` is an immutable map from exponent tuples to nonzero
:class:`fractions.Fraction` coefficients.  A :class:`VField` is a tuple of
polynomials ``(a_1, ..., a_r)``; when ``r`` equals the number of variables it
stands for the derivation ``sum a_i d/dx_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import DomainError, RingMismatchError

Exps = tuple[int, ...]
Scalar = Union[int, Fraction]

ORDERS = ("lex", "grlex", "grevlex")


@lru_cache(maxsize=None)
def _order_key(order: str):
    if order == "lex":
        return lambda e: e
    if order == "grlex":
        return lambda e: (sum(e),) + e
    if order == "grevlex":
        return lambda e: (sum(e),) + tuple(-x for x in reversed(e))
    raise DomainError(f"unknown monomial order {order!r}")


@dataclass(frozen=True)
class RingCtx:
    """Polynomial ring Q[names] with a monomial order tag."""

    names: tuple[str, ...]
    order: str = "grevlex"

    def __post_init__(self):
        if len(self.names) < 1:
            raise DomainError("a ring needs at least one variable")
        if len(set(self.names)) != len(self.names):
            raise DomainError("variable names must be distinct")
        _order_key(self.order)

    @property
    def n(self) -> int:
        return len(self.names)

    def key(self, exps: Exps) -> tuple[int, ...]:
        """Sort key of a monomial; larger key means larger monomial."""
        return _order_key(self.order)(exps)

    def with_order(self, order: str) -> RingCtx:
        return RingCtx(self.names, order)

    def index(self, var: int | str) -> int:
        if isinstance(var, str):
            try:
                return self.names.index(var)
            except ValueError:
                raise DomainError(f"unknown variable {var!r}") from None
        if not 0 <= var < self.n:
            raise DomainError(f"variable index {var} out of range for {self.n} variables")
        return var

    def zero_exps(self) -> Exps:
        return (0,) * self.n

    def var(self, var: int | str) -> Poly:
        i = self.index(var)
        e = [0] * self.n
        e[i] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    @property
    def gens(self) -> tuple[Poly, ...]:
        return tuple(self.var(i) for i in range(self.n))

    def const(self, c: Scalar) -> Poly:
        return Poly(self, {self.zero_exps(): Fraction(c)})

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def monomial(self, exps: Sequence[int], c: Scalar = 1) -> Poly:
        return Poly(self, {tuple(exps): Fraction(c)})


def _check_ring(a: RingCtx, b: RingCtx) -> None:
    if a != b:
        raise RingMismatchError(f"ring mismatch: {a.names}/{a.order} vs {b.names}/{b.order}")


class Poly:
    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: RingCtx, terms: Mapping[Exps, Scalar] | None = None):
        self.ring = ring
        clean: dict[Exps, Fraction] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != ring.n:
                        raise DomainError(f"exponent {e} has wrong length for {ring.n} variables")
                    clean[tuple(e)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: RingCtx, terms: dict[Exps, Fraction]) -> Poly:
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            _check_ring(self.ring, other.ring)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, VField):
            return other.__rmul__(self)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly._raw(self.ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> Poly:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(Fraction(1) / Fraction(other))

    def __pow__(self, k: int) -> Poly:
        if not isinstance(k, int) or k < 0:
            raise DomainError("polynomial powers need a nonnegative integer exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Scalar) -> Poly:
        if not c:
            return self.ring.zero()
        return Poly._raw(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, exps: Exps, c: Scalar) -> Poly:
        return Poly._raw(
            self.ring,
            {tuple(a + b for a, b in zip(e, exps)): v * c for e, v in self.terms.items()},
        )

    # comparison

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        from .expr_io import render_poly

        return f"Poly({render_poly(self)!r})"

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring.zero_exps(), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Exps, Fraction]]:
        """Terms in canonical order, largest monomial first."""
        key = self.ring.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self) -> tuple[Exps, Fraction]:
        if not self.terms:
            raise DomainError("the zero polynomial has no leading term")
        key = self.ring.key
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def leading_monomial(self) -> Exps:
        return self.leading_term()[0]

    def leading_coeff(self) -> Fraction:
        return self.leading_term()[1]

    def monic(self) -> Poly:
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coeff())

    def primitive(self) -> Poly:
        """Integer-coefficient rescaling with coprime coefficients and positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = lcm(*(c.denominator for c in self.terms.values()))
        num = gcd(*(int(c * den) for c in self.terms.values()))
        p = self.scale(Fraction(den, num))
        return -p if p.leading_coeff() < 0 else p

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, x in enumerate(e) if x}

    # calculus and substitution

    def partial(self, var: int | str) -> Poly:
        i = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Poly._raw(self.ring, out)

    def subs(self, images: Sequence[Poly]) -> Poly:
        """Substitute ``images[i]`` for the i-th variable."""
        if len(images) != self.ring.n:
            raise DomainError(f"need {self.ring.n} images, got {len(images)}")
        if not images:
            return self
        target = images[0].ring
        for im in images:
            _check_ring(target, im.ring)
        powers: dict[tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            if (i, k) not in powers:
                powers[(i, k)] = images[i] ** k
            return powers[(i, k)]

        out = target.zero()
        for e, c in self.terms.items():
            t = target.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            out = out + t
        return out

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total


def exact_quotient(f: Poly, g: Poly) -> Poly | None:
    """Return q with f = q*g, or None when g does not divide f."""
    _check_ring(f.ring, g.ring)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lm, lc = g.leading_term()
    q: dict[Exps, Fraction] = {}
    p = f
    while p.terms:
        e, c = p.leading_term()
        if any(a < b for a, b in zip(e, lm)):
            return None
        shift = tuple(a - b for a, b in zip(e, lm))
        factor = c / lc
        q[shift] = q.get(shift, 0) + factor
        p = p - g.mul_term(shift, factor)
    return Poly(f.ring, q)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    """Monic gcd of two polynomials, via the generator of (f) ∩ (g)."""
    _check_ring(f.ring, g.ring)
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return f.ring.one()
    from .groebner import Ideal, ideal_intersect

    meet = ideal_intersect(Ideal(f.ring, [f]), Ideal(g.ring, [g]))
    (lcm_,) = meet.basis
    q = exact_quotient(f * g, lcm_)
    assert q is not None
    return q.monic()


def squarefree_part(f: Poly) -> Poly:
    """f divided by gcd(f, df/dx_1, ..., df/dx_n); valid in characteristic zero."""
    if f.is_zero():
        raise DomainError("squarefree part of the zero polynomial is undefined")
    g = f
    for i in range(f.ring.n):
        if g.is_constant():
            break
        g = poly_gcd(g, f.partial(i))
    if g.is_constant():
        return f
    q = exact_quotient(f, g)
    assert q is not None
    return q


class VField:
    """Coefficient vector (a_1, ..., a_r); for r = n the field sum a_i d/dx_i."""

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: RingCtx, coeffs: Iterable[Poly | Scalar]):
        self.ring = ring
        cs = []
        for c in coeffs:
            if isinstance(c, Poly):
                _check_ring(ring, c.ring)
            else:
                c = ring.const(c)
            cs.append(c)
        self.coeffs: tuple[Poly, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def unit(cls, ring: RingCtx, j: int, rank: int | None = None) -> VField:
        rank = ring.n if rank is None else rank
        if not 0 <= j < rank:
            raise DomainError(f"unit vector index {j} out of range for rank {rank}")
        return cls(ring, [ring.one() if i == j else ring.zero() for i in range(rank)])

    @classmethod
    def zero(cls, ring: RingCtx, rank: int | None = None) -> VField:
        rank = ring.n if rank is None else rank
        return cls(ring, [ring.zero()] * rank)

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[Poly]:
        return iter(self.coeffs)

    def __getitem__(self, i: int) -> Poly:
        return self.coeffs[i]

    def _check(self, other: VField) -> None:
        _check_ring(self.ring, other.ring)
        if self.rank != other.rank:
            raise RingMismatchError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: VField) -> VField:
        if not isinstance(other, VField):
            return NotImplemented
        self._check(other)
        return VField(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: VField) -> VField:
        if not isinstance(other, VField):
            return NotImplemented
        self._check(other)
        return VField(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> VField:
        return VField(self.ring, [-a for a in self.coeffs])

    def __rmul__(self, f: Poly | Scalar) -> VField:
        if isinstance(f, Poly):
            _check_ring(self.ring, f.ring)
        elif not isinstance(f, (int, Fraction)):
            return NotImplemented
        return VField(self.ring, [f * a for a in self.coeffs])

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VField):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.coeffs))
        return self._hash

    def __repr__(self) -> str:
        from .expr_io import render_field

        return f"VField({render_field(self)!r})"

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def degree(self) -> int:
        return max(c.degree() for c in self.coeffs)

    def __call__(self, f: Poly) -> Poly:
        return apply_field(self, f)


def partial(f: Poly, var: int | str) -> Poly:
    return f.partial(var)


def ring_ops(f: Poly, g: Poly, tag: str) -> Poly:
    _check_ring(f.ring, g.ring)
    if tag == "add":
        return f + g
    if tag == "sub":
        return f - g
    if tag == "mul":
        return f * g
    raise DomainError(f"unknown ring operation {tag!r}")


def apply_field(D: VField, f: Poly) -> Poly:
    """D(f) = sum_i a_i * df/dx_i."""
    _check_ring(D.ring, f.ring)
    if D.rank != f.ring.n:
        raise RingMismatchError(f"a derivation needs {f.ring.n} coordinates, got {D.rank}")
    out = f.ring.zero()
    for i, a in enumerate(D.coeffs):
        if a:
            out = out + a * f.partial(i)
    return out
