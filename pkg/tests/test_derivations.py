import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from liegerm import DomainError, Ideal, Variety, VfModule, module_equal, module_intersect
from liegerm import integral_ideal, integral_variety, irredundancy_check, is_smooth, is_tangent
from liegerm import recovery_check, sing_chain, sing_stability_check, singular_locus, tangent_algebra, tangent_family
from liegerm.derivations import ambient_algebra, full_algebra, origin_algebra, radical, verify_components, with_name
from liegerm.poly import Poly, VField

from conftest import CORPUS, F, P, R2, R3, V
from test_poly import to_sympy


def brute_tangent_fields(f: Poly, k: int) -> list[VField]:
    """All fields with coefficients of degree <= k preserving (f), via a linear solve."""
    ring = f.ring
    syms = sympy.symbols(ring.names)
    monos = [e for d in range(k + 1) for e in itertools.product(range(d + 1), repeat=ring.n) if sum(e) == d]
    bmonos = monos
    a = [[sympy.Symbol(f"a{i}_{j}") for j in range(len(monos))] for i in range(ring.n)]
    b = [sympy.Symbol(f"b{j}") for j in range(len(bmonos))]
    m = lambda e: sympy.Mul(*[s**p for s, p in zip(syms, e)])
    fs = to_sympy(f)
    comps = [sum(c * m(e) for c, e in zip(a[i], monos)) for i in range(ring.n)]
    lhs = sum(comps[i] * sympy.diff(fs, syms[i]) for i in range(ring.n)) - fs * sum(c * m(e) for c, e in zip(b, bmonos))
    eqs = sympy.Poly(sympy.expand(lhs), *syms).coeffs()
    unknowns = [x for row in a for x in row] + b
    Mx = sympy.Matrix([[sympy.diff(eq, u) for u in unknowns] for eq in eqs])
    out = []
    for vec in Mx.nullspace():
        cs = []
        for i in range(ring.n):
            terms = {}
            for j, e in enumerate(monos):
                c = vec[i * len(monos) + j]
                if c != 0:
                    terms[e] = Fraction(int(c.p), int(c.q))
            cs.append(Poly(ring, terms))
        D = VField(ring, cs)
        if not D.is_zero():
            out.append(D)
    return out


@pytest.mark.parametrize("name", ["hyperplane", "node", "cusp", "cone", "umbrella"])
def test_tangent_algebra_complete_to_degree_2(name):
    ring, f = CORPUS[name]
    X = V(ring, f)
    A = tangent_algebra(X)
    found = brute_tangent_fields(P(f, ring), 2)
    assert found
    for D in found:
        assert is_tangent(D, X)
        assert A.contains(D)


def test_cusp_generators():
    A = tangent_algebra(V(R2, "y^2 - x^3"))
    expected = VfModule(R2, [F("[2*x, 3*y]"), F("[2*y, 3*x^2]")])
    assert module_equal(A, expected)


def test_node_is_free_and_diagonal():
    assert module_equal(tangent_algebra(V(R2, "x*y")), VfModule(R2, [F("[x, 0]"), F("[0, y]")]))


def test_full_and_empty():
    assert module_equal(tangent_algebra(Variety.full(R2)), full_algebra(R2))
    assert module_equal(tangent_algebra(V(R2, "x", "y")), origin_algebra(R2))


def test_generators_tangent(corpus_item):
    _, X = corpus_item
    for g in tangent_algebra(X).gens:
        assert is_tangent(g, X)


def test_singleton_family(corpus_item):
    _, X = corpus_item
    assert module_equal(tangent_algebra(X), tangent_family([X]))


def test_family_order_independent():
    planes = [V(R3, "x"), V(R3, "y"), V(R3, "z")]
    A = tangent_family(planes)
    for perm in itertools.permutations(planes):
        assert module_equal(A, tangent_family(list(perm)))


def test_component_property():
    A = module_intersect(tangent_algebra(V(R2, "x")), tangent_algebra(V(R2, "y")))
    assert module_equal(tangent_algebra(V(R2, "x*y")), A)


def test_integral_contained(corpus_item):
    _, X = corpus_item
    I = integral_ideal(tangent_algebra(X))
    assert X.ideal.contains_ideal(I)


def test_integral_of_full_is_unit():
    assert integral_ideal(full_algebra(R2)).is_unit()
    assert integral_variety(full_algebra(R2)).is_empty()


def test_integral_of_origin_algebra():
    I = integral_ideal(origin_algebra(R2))
    assert I == Ideal(R2, [P("x"), P("y")])


def test_recovery(corpus_item):
    _, X = corpus_item
    assert recovery_check(X).verdict == "equal"


def test_radical_policy():
    r, exact = radical(Ideal(R2, [P("x^2*y")]))
    assert exact and r == Ideal(R2, [P("x*y")])
    r, exact = radical(Ideal(R2, [P("x^2"), P("x*y^3")]))
    assert exact and r == Ideal(R2, [P("x")])
    r, exact = radical(Ideal(R2, [P("x^2 - y"), P("y^2")]))
    assert not exact


@pytest.mark.parametrize(
    "name, sing",
    [("cusp", ["x", "y"]), ("node", ["x", "y"]), ("cone", ["x", "y", "z"]), ("umbrella", ["x", "y"])],
)
def test_singular_locus(name, sing):
    ring, f = CORPUS[name]
    S = singular_locus(V(ring, f))
    assert S.ideal == Ideal(ring, [P(s, ring) for s in sing])


def test_smooth():
    assert is_smooth(V(R2, "x"))
    assert is_smooth(V(R3, "x", "y"))
    assert not is_smooth(V(R2, "x*y"))


@pytest.mark.parametrize("name", ["cone", "cusp", "node", "umbrella", "cross"])
def test_sing_stability(name):
    ring, f = CORPUS[name]
    assert sing_stability_check(V(ring, f))


def test_sing_stability_smooth_raises():
    with pytest.raises(DomainError):
        sing_stability_check(V(R2, "x"))


@pytest.mark.parametrize("name, k", [("hyperplane", 0), ("node", 1), ("cusp", 1), ("cone", 1), ("umbrella", 1), ("cross", 2)])
def test_chain_lengths(name, k):
    ring, f = CORPUS[name]
    ch = sing_chain(V(ring, f))
    assert ch.k_max == k
    assert len(ch.links) <= ring.n + 1
    for a, b in zip(ch.links, ch.links[1:]):
        assert b.ideal.contains_ideal(a.ideal) and not a.ideal.contains_ideal(b.ideal)


def test_chain_rejects_full_or_empty():
    with pytest.raises(DomainError):
        sing_chain(Variety.empty(R2))


def test_irredundancy():
    r = irredundancy_check([with_name(V(R2, "x"), "a"), with_name(V(R2, "y"), "b")])
    assert r.irredundant and r.removable == []
    r = irredundancy_check([with_name(V(R2, "x*y"), "xy"), with_name(V(R2, "x"), "x")])
    assert not r.irredundant and r.removable == ["x"]
    with pytest.raises(DomainError):
        irredundancy_check([])


def test_verify_components():
    assert verify_components(V(R2, "x*y"), [V(R2, "x"), V(R2, "y")])
    assert not verify_components(V(R2, "x*y"), [V(R2, "x")])


def test_ambient_kinds():
    assert module_equal(ambient_algebra(R2, "full"), full_algebra(R2))
    assert module_equal(ambient_algebra(R2, "at_origin"), origin_algebra(R2))
    rel = ambient_algebra(R2, "relative", [V(R2, "x")])
    assert module_equal(rel, tangent_algebra(V(R2, "x")))
    with pytest.raises(DomainError):
        ambient_algebra(R2, "bogus")


def test_germ_emptiness():
    assert V(R2, "x - 1").is_empty()
    assert not V(R2, "x + y^2").is_empty()


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["x", "x*y", "y^2 - x^3", "x^2 - y^2", "x*(x - y^2)"]),
       st.sampled_from(["x", "y"]), st.sampled_from(["x", "y"]))
def test_module_closed_under_multiplication(f, g, h):
    X = V(R2, f)
    A = tangent_algebra(X)
    for u in A.gens:
        assert A.contains(P(g) * u + P(h) * u)
