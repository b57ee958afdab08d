"""Buchberger's algorithm for ideals and submodules of free modules over Q[x].

Internally a module element is a dict ``{(position, exponents): coefficient}``;
ideals are the rank-one case.  Module terms are ordered term-over-position:
monomials are compared first, and ties are broken in favour of the lower
position index.  Syzygies are computed by elimination: each column ``c_i`` is
extended by the unit vector ``e_i`` of an auxiliary block and a Gröbner basis
is taken for an order in which every term of the original block dominates.
"""

from __future__ import annotations

import heapq
import itertools
import threading
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

from .errors import DomainError, RingMismatchError
from .poly import Exps, Poly, RingCtx, VField, _check_ring

Term = tuple[int, Exps]
Vec = dict[Term, Fraction]
Element = Union[Poly, VField]

# number of S-pairs processed / skipped, for benchmarking
STATS = {"pairs": 0, "coprime": 0, "chain": 0}


def top_key(ring: RingCtx) -> Callable[[Term], tuple]:
    mono = ring.key

    def key(t: Term) -> tuple:
        return mono(t[1]) + (-t[0],)

    return key


def block_key(ring: RingCtx, block: int) -> Callable[[Term], tuple]:
    """Elimination order: positions < block dominate all other positions."""
    mono = ring.key

    def key(t: Term) -> tuple:
        return (1 if t[0] < block else 0,) + mono(t[1]) + (-t[0],)

    return key


def _divides(a: Exps, b: Exps) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exps, b: Exps) -> Exps:
    return tuple(max(x, y) for x, y in zip(a, b))


def _vec_mul_term(v: Vec, shift: Exps, c: Fraction) -> Vec:
    return {(p, tuple(x + y for x, y in zip(e, shift))): k * c for (p, e), k in v.items()}


def _vec_sub(a: Vec, b: Vec) -> Vec:
    out = dict(a)
    for t, c in b.items():
        s = out.get(t, 0) - c
        if s:
            out[t] = s
        else:
            out.pop(t, None)
    return out


class _Elt:
    __slots__ = ("vec", "lt", "lc")

    def __init__(self, vec: Vec, key):
        self.vec = vec
        self.lt = max(vec, key=key)
        self.lc = vec[self.lt]

    def monic(self, key) -> _Elt:
        inv = 1 / self.lc
        return _Elt({t: c * inv for t, c in self.vec.items()}, key)


def _neg_key(k: tuple) -> tuple:
    return tuple(-x for x in k)


def _reduce(vec: Vec, basis: Sequence[_Elt], key, full: bool = True) -> Vec:
    """Remainder of vec on division by basis (full reduction by default)."""
    if not vec or not basis:
        return dict(vec)
    by_pos: dict[int, list[_Elt]] = {}
    for g in basis:
        by_pos.setdefault(g.lt[0], []).append(g)
    p = dict(vec)
    heap = [(_neg_key(key(t)), t) for t in p]
    heapq.heapify(heap)
    rem: Vec = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = p.get(t)
        if c is None:
            continue
        pos, e = t
        divisor = None
        for g in by_pos.get(pos, ()):
            if _divides(g.lt[1], e):
                divisor = g
                break
        if divisor is None:
            if not full:
                rem.update(p)
                return rem
            rem[t] = c
            del p[t]
            continue
        shift = tuple(x - y for x, y in zip(e, divisor.lt[1]))
        factor = c / divisor.lc
        for (gp, ge), gc in divisor.vec.items():
            nt = (gp, tuple(x + y for x, y in zip(ge, shift)))
            old = p.get(nt)
            nc = (old or 0) - factor * gc
            if nc:
                if old is None:
                    heapq.heappush(heap, (_neg_key(key(nt)), nt))
                p[nt] = nc
            elif old is not None:
                del p[nt]
    return rem


def _spoly(f: _Elt, g: _Elt) -> Vec:
    m = _lcm(f.lt[1], g.lt[1])
    sf = tuple(x - y for x, y in zip(m, f.lt[1]))
    sg = tuple(x - y for x, y in zip(m, g.lt[1]))
    return _vec_sub(_vec_mul_term(f.vec, sf, 1 / f.lc), _vec_mul_term(g.vec, sg, 1 / g.lc))


def _groebner(vecs: Iterable[Vec], key, rank_one: bool, chain: bool = False) -> list[_Elt]:
    """Reduced Gröbner basis, monic, sorted by leading term descending."""
    G: list[_Elt] = []
    for v in vecs:
        if v:
            G.append(_Elt(dict(v), key).monic(key))
    if not G:
        return []
    pending: dict[tuple[int, int], tuple] = {}
    heap: list[tuple] = []
    seq = itertools.count()

    def add_pairs(k: int) -> None:
        gk = G[k]
        for i in range(k):
            gi = G[i]
            if gi.lt[0] != gk.lt[0]:
                continue
            if rank_one and all(a == 0 or b == 0 for a, b in zip(gi.lt[1], gk.lt[1])):
                # coprime leading monomials: valid for ideals only
                STATS["coprime"] += 1
                continue
            m = _lcm(gi.lt[1], gk.lt[1])
            item = (sum(m), next(seq), i, k)
            pending[(i, k)] = item
            heapq.heappush(heap, item)

    for k in range(len(G)):
        add_pairs(k)

    while heap:
        _, _, i, j = heapq.heappop(heap)
        if (i, j) not in pending:
            continue
        del pending[(i, j)]
        if chain and _chain_skip(G, pending, i, j):
            STATS["chain"] += 1
            continue
        STATS["pairs"] += 1
        h = _reduce(_spoly(G[i], G[j]), G, key)
        if h:
            G.append(_Elt(h, key).monic(key))
            add_pairs(len(G) - 1)

    return _interreduce(G, key)


def _chain_skip(G: list[_Elt], pending: dict, i: int, j: int) -> bool:
    pos = G[i].lt[0]
    m = _lcm(G[i].lt[1], G[j].lt[1])
    for k, g in enumerate(G):
        if k in (i, j) or g.lt[0] != pos or not _divides(g.lt[1], m):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


def _interreduce(G: list[_Elt], key) -> list[_Elt]:
    minimal: list[_Elt] = []
    for idx, g in enumerate(G):
        redundant = False
        for jdx, h in enumerate(G):
            if idx == jdx or h.lt[0] != g.lt[0] or not _divides(h.lt[1], g.lt[1]):
                continue
            if h.lt != g.lt or jdx < idx:
                redundant = True
                break
        if not redundant:
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        out.append(_Elt(_reduce(g.vec, others, key), key).monic(key))
    out.sort(key=lambda g: key(g.lt), reverse=True)
    return out


# conversions between public values and internal vectors


def _to_vec(v: Element) -> Vec:
    if isinstance(v, Poly):
        return {(0, e): c for e, c in v.terms.items()}
    return {(p, e): c for p, a in enumerate(v.coeffs) for e, c in a.terms.items()}


def _to_poly(ring: RingCtx, v: Vec) -> Poly:
    return Poly._raw(ring, {e: c for (_, e), c in v.items()})


def _to_field(ring: RingCtx, v: Vec, rank: int, offset: int = 0) -> VField:
    parts: list[dict] = [{} for _ in range(rank)]
    for (p, e), c in v.items():
        parts[p - offset][e] = c
    return VField(ring, [Poly._raw(ring, d) for d in parts])


def _from_vec(ring: RingCtx, v: Vec, like: Element) -> Element:
    if isinstance(like, Poly):
        return _to_poly(ring, v)
    return _to_field(ring, v, like.rank)


def _common_ring(elems: Sequence[Element]) -> RingCtx:
    ring = elems[0].ring
    for e in elems[1:]:
        _check_ring(ring, e.ring)
    return ring


def _rank_of(e: Element) -> int:
    return 1 if isinstance(e, Poly) else e.rank


def _check_rank(elems: Sequence[Element]) -> int:
    r = _rank_of(elems[0])
    for e in elems[1:]:
        if _rank_of(e) != r or type(e) is not type(elems[0]):
            raise RingMismatchError("module elements of different rank")
    return r


def _rering(e: Element, ring: RingCtx) -> Element:
    if isinstance(e, Poly):
        return Poly._raw(ring, dict(e.terms))
    return VField(ring, [Poly._raw(ring, dict(c.terms)) for c in e.coeffs])


# public operations


def buchberger(gens: Sequence[Element], order: str | None = None, chain: bool = False) -> list[Element]:
    """Reduced Gröbner basis of the ideal/submodule generated by ``gens``.

    The result is monic, sorted by leading term (largest first) and lives in
    the same ring as the inputs, unless ``order`` names a different monomial
    order, in which case it lives in the re-ordered ring.
    """
    gens = list(gens)
    if not gens:
        raise DomainError("buchberger needs at least one generator")
    ring = _common_ring(gens)
    rank = _check_rank(gens)
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        gens = [_rering(g, ring) for g in gens]
    key = top_key(ring)
    basis = _groebner((_to_vec(g) for g in gens), key, rank_one=rank == 1, chain=chain)
    return [_from_vec(ring, g.vec, gens[0]) for g in basis]


def _elts(basis: Sequence[Element], key) -> list[_Elt]:
    return [_Elt(_to_vec(b), key) for b in basis if not _is_zero(b)]


def _is_zero(e: Element) -> bool:
    return e.is_zero()


def normal_form(v: Element, basis: Sequence[Element]) -> Element:
    """Fully reduced remainder of v modulo a Gröbner basis."""
    if basis:
        _common_ring([v, *basis])
        _check_rank([v, *basis])
    key = top_key(v.ring)
    return _from_vec(v.ring, _reduce(_to_vec(v), _elts(basis, key), key), v)


def s_pairs_reduce_to_zero(basis: Sequence[Element]) -> bool:
    """Post-hoc Buchberger criterion check."""
    if not basis:
        return True
    key = top_key(basis[0].ring)
    G = _elts(basis, key)
    for f, g in itertools.combinations(G, 2):
        if f.lt[0] != g.lt[0]:
            continue
        if _reduce(_spoly(f, g), G, key):
            return False
    return True


class _Cached:
    """Lazily computed, then frozen, reduced Gröbner basis."""

    def _init_cache(self) -> None:
        self._basis = None
        self._lock = threading.Lock()

    def _compute_basis(self):
        raise NotImplementedError

    @property
    def basis(self):
        if self._basis is None:
            with self._lock:
                if self._basis is None:
                    self._basis = tuple(self._compute_basis())
        return self._basis


class Ideal(_Cached):
    """Ideal of Q[x] given by generators, with cached reduced Gröbner basis."""

    def __init__(self, ring: RingCtx, gens: Iterable[Poly | int | Fraction]):
        gl = []
        for g in gens:
            if not isinstance(g, Poly):
                g = ring.const(g)
            _check_ring(ring, g.ring)
            gl.append(g)
        if not gl:
            gl = [ring.zero()]
        self.ring = ring
        self.gens: tuple[Poly, ...] = tuple(gl)
        self._init_cache()

    def _compute_basis(self):
        nz = [g for g in self.gens if g]
        return buchberger(nz) if nz else []

    def __repr__(self) -> str:
        from .expr_io import render_poly

        return f"Ideal({', '.join(render_poly(g) for g in self.gens)})"

    def reduce(self, f: Poly) -> Poly:
        return normal_form(f, self.basis)

    def contains(self, f: Poly) -> bool:
        return self.reduce(f).is_zero()

    __contains__ = contains

    def contains_ideal(self, other: Ideal) -> bool:
        return all(self.contains(g) for g in other.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.basis == other.basis

    __hash__ = None

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def is_zero(self) -> bool:
        return not self.basis

    def is_principal(self) -> bool:
        return len(self.basis) <= 1

    def is_monomial(self) -> bool:
        return all(g.is_monomial() for g in self.basis)

    def leading_monomials(self) -> list[Exps]:
        return [g.leading_monomial() for g in self.basis]

    def __add__(self, other: Ideal) -> Ideal:
        _check_ring(self.ring, other.ring)
        return Ideal(self.ring, [*self.gens, *other.gens])

    def krull_dimension(self) -> int:
        return krull_dimension(self)


class VfModule(_Cached):
    """Submodule of the free module of rank ``rank`` given by generators."""

    def __init__(self, ring: RingCtx, gens: Iterable[VField], rank: int | None = None):
        gl = list(gens)
        if rank is None:
            rank = gl[0].rank if gl else ring.n
        for g in gl:
            _check_ring(ring, g.ring)
            if g.rank != rank:
                raise RingMismatchError(f"generator of rank {g.rank} in a rank-{rank} module")
        self.ring = ring
        self.rank = rank
        self.gens: tuple[VField, ...] = tuple(gl)
        self._init_cache()

    def _compute_basis(self):
        nz = [g for g in self.gens if not g.is_zero()]
        return buchberger(nz) if nz else []

    def __repr__(self) -> str:
        from .expr_io import render_field

        return f"VfModule({'; '.join(render_field(g) for g in self.gens)})"

    def _check(self, other) -> None:
        _check_ring(self.ring, other.ring)
        if self.rank != other.rank:
            raise RingMismatchError(f"rank mismatch: {self.rank} vs {other.rank}")

    def reduce(self, v: VField) -> VField:
        _check_ring(self.ring, v.ring)
        if v.rank != self.rank:
            raise RingMismatchError(f"rank mismatch: {v.rank} vs {self.rank}")
        return normal_form(v, self.basis)

    def contains(self, v: VField) -> bool:
        return self.reduce(v).is_zero()

    __contains__ = contains

    def contains_module(self, other: VfModule) -> bool:
        self._check(other)
        return all(self.contains(g) for g in other.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VfModule):
            return NotImplemented
        return module_equal(self, other)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.basis

    def generators(self) -> list[VField]:
        """Reduced basis rescaled to primitive integer content, for display."""
        return [_primitive_field(g) for g in self.basis]


def _primitive_field(v: VField) -> VField:
    from math import gcd, lcm

    cs = [c for a in v.coeffs for c in a.terms.values()]
    den = lcm(*(c.denominator for c in cs))
    num = gcd(*(int(c * den) for c in cs))
    w = Fraction(den, num)
    key = top_key(v.ring)
    vec = _to_vec(v)
    if vec[max(vec, key=key)] < 0:
        w = -w
    return VField(v.ring, [a.scale(w) for a in v.coeffs])


def membership(v: Element, M: Ideal | VfModule) -> bool:
    """v ∈ M, decided by normal form against the reduced basis."""
    if isinstance(M, Ideal):
        if not isinstance(v, Poly):
            raise RingMismatchError("ideal membership needs a polynomial")
        return M.contains(v)
    if not isinstance(v, VField):
        raise RingMismatchError("module membership needs a vector")
    return M.contains(v)


def syzygy_module(columns: Sequence[Element], chain: bool = False) -> VfModule:
    """Generators of {c : sum c_i * columns[i] = 0} in the free module of rank len(columns)."""
    columns = list(columns)
    if not columns:
        raise DomainError("syzygy module of an empty column list")
    ring = _common_ring(columns)
    r = _check_rank(columns)
    k = len(columns)
    key = block_key(ring, r)
    zero = ring.zero_exps()
    vecs = []
    for i, col in enumerate(columns):
        v = _to_vec(col)
        v[(r + i, zero)] = Fraction(1)
        vecs.append(v)
    basis = _groebner(vecs, key, rank_one=False, chain=chain)
    syz = [_to_field(ring, g.vec, k, offset=r) for g in basis if g.lt[0] >= r]
    return VfModule(ring, syz, rank=k)


def _combine(columns: Sequence[Element], coeffs: VField) -> Element:
    ring = coeffs.ring
    if isinstance(columns[0], Poly):
        out = ring.zero()
        for c, col in zip(coeffs.coeffs, columns):
            out = out + c * col
        return out
    out = VField.zero(ring, columns[0].rank)
    for c, col in zip(coeffs.coeffs, columns):
        out = out + c * col
    return out


def module_intersect(A: VfModule, B: VfModule) -> VfModule:
    """A ∩ B from the syzygies of the concatenated generator list [A | B]."""
    A._check(B)
    ga = [g for g in A.gens if not g.is_zero()]
    gb = [g for g in B.gens if not g.is_zero()]
    if not ga or not gb:
        return VfModule(A.ring, [], rank=A.rank)
    syz = syzygy_module([*ga, *gb])
    p = len(ga)
    gens = []
    for s in syz.gens:
        v = _combine(ga, VField(A.ring, s.coeffs[:p]))
        if not v.is_zero():
            gens.append(v)
    return VfModule(A.ring, gens, rank=A.rank)


def ideal_intersect(I: Ideal, J: Ideal) -> Ideal:
    _check_ring(I.ring, J.ring)
    gi = [g for g in I.gens if g]
    gj = [g for g in J.gens if g]
    if not gi or not gj:
        return Ideal(I.ring, [I.ring.zero()])
    syz = syzygy_module([*gi, *gj])
    p = len(gi)
    gens = [_combine(gi, VField(I.ring, s.coeffs[:p])) for s in syz.gens]
    return Ideal(I.ring, [g for g in gens if g] or [I.ring.zero()])


def quotient_by_unit_vector(A: VfModule, j: int) -> Ideal:
    """The ideal {g : g * e_j ∈ A}."""
    if not 0 <= j < A.rank:
        raise DomainError(f"slot index {j} out of range for rank {A.rank}")
    ring = A.ring
    gens = [g for g in A.gens if not g.is_zero()]
    e = VField.unit(ring, j, A.rank)
    if not gens:
        return Ideal(ring, [ring.zero()])
    syz = syzygy_module([e, *gens])
    return Ideal(ring, [s.coeffs[0] for s in syz.gens if s.coeffs[0]] or [ring.zero()])


def module_equal(A: VfModule, B: VfModule) -> bool:
    A._check(B)
    return A.basis == B.basis


EMPTY_DIMENSION = -1


def krull_dimension(I: Ideal) -> int:
    """Size of a largest variable set independent modulo the leading-term ideal.

    Returns ``EMPTY_DIMENSION`` (-1) for the unit ideal.
    """
    if I.is_unit():
        return EMPTY_DIMENSION
    n = I.ring.n
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in I.leading_monomials()]
    for size in range(n, -1, -1):
        for subset in itertools.combinations(range(n), size):
            s = set(subset)
            if not any(sup <= s for sup in supports):
                return size
    return EMPTY_DIMENSION
