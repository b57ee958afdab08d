import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liegerm import AutoMap, DomainError, ExtractionError, InversionError, VfModule, ad_probe, apply_field
from liegerm import auto_ops, balanced_certificate, bracket, bracket_closure_check, conjugate_field
from liegerm import conjugation_check, lambda_apply, lambda_factor_extract, module_equal, tangent_algebra
from liegerm import visibility_diagnostic
from liegerm.derivations import full_algebra, origin_algebra
from liegerm.poly import exact_quotient
from liegerm.lie import closure_witness, germ_irreducible, monomials_upto, probe_grid, replay

from conftest import CORPUS, F, P, R2, R3, V, fields, polys

SCALE = AutoMap.create([P("2*x"), P("y")])
SHEAR = AutoMap.create([P("x"), P("y + x^2")])
MAPS = [SCALE, SHEAR, AutoMap.create([P("x + y"), P("y")]), AutoMap.create([P("x + y^3"), P("y")])]


@settings(max_examples=60, deadline=None)
@given(fields(R2, max_deg=2, max_terms=3), fields(R2, max_deg=2, max_terms=3), polys(R2, max_deg=3))
def test_bracket_is_commutator(D, E, g):
    lhs = apply_field(bracket(D, E), g)
    assert lhs == apply_field(D, apply_field(E, g)) - apply_field(E, apply_field(D, g))


@settings(max_examples=40, deadline=None)
@given(fields(R2, max_deg=2, max_terms=2), fields(R2, max_deg=2, max_terms=2), fields(R2, max_deg=2, max_terms=2))
def test_antisymmetry_and_jacobi(D, E, G):
    assert bracket(D, E) == -bracket(E, D)
    jac = bracket(D, bracket(E, G)) + bracket(E, bracket(G, D)) + bracket(G, bracket(D, E))
    assert jac.is_zero()


def test_bracket_example():
    assert bracket(F("[x^2, 0]"), F("[1, 0]")) == F("[-2*x, 0]")


@pytest.mark.parametrize("name", list(CORPUS))
def test_closure(name):
    ring, f = CORPUS[name]
    A = tangent_algebra(V(ring, f))
    assert bracket_closure_check(A)
    assert closure_witness(A) is None


def test_closure_fails_for_non_subalgebra():
    A = VfModule(R2, [F("[1, 0]"), F("[0, x^2]")])
    assert not bracket_closure_check(A)
    u, v, b = closure_witness(A)
    assert not A.contains(b)


def test_probe_grid_order():
    grid = probe_grid(full_algebra(R2), 1)
    assert grid[:2] == [F("[1, 0]"), F("[0, 1]")]
    assert len(grid) == 6
    assert monomials_upto(R2, 1) == [(0, 0), (1, 0), (0, 1)]


def test_ad_probe_fail_counterexample():
    A = tangent_algebra(V(R2, "x"))
    cert = ad_probe(F("[x^2, 0]"), A, full_algebra(R2), d=4, k=2)
    assert cert.verdict == "fail"
    assert cert.counterexample["bracket"] == F("[2, 0]")
    assert cert.counterexample["probes"] == [F("[1, 0]"), F("[1, 0]")]


def test_ad_probe_rejects_outside_witness():
    A = tangent_algebra(V(R2, "x"))
    with pytest.raises(DomainError):
        ad_probe(F("[1, 0]"), A, full_algebra(R2))


def test_balanced_hyperplane():
    A = tangent_algebra(V(R2, "x"))
    cert = balanced_certificate(A, full_algebra(R2), d=4)
    assert cert.verdict == "pass"
    w = cert.witness
    assert w.coeffs[1].is_zero()
    u = exact_quotient(w.coeffs[0], P("x^3"))
    assert u is not None and u.constant_term != 0
    assert replay(cert, A) == "pass"


def test_balanced_ambient_fails():
    assert balanced_certificate(full_algebra(R2), full_algebra(R2), d=2).verdict == "fail"


def test_balanced_requires_containment():
    with pytest.raises(DomainError):
        balanced_certificate(full_algebra(R2), origin_algebra(R2), d=2)


@pytest.mark.parametrize("d", [2, 3])
def test_ad_probe_monotone(d):
    A = tangent_algebra(V(R2, "x"))
    a = F("[x^3, 0]")
    assert ad_probe(a, A, full_algebra(R2), d=4).verdict == "pass"
    assert ad_probe(a, A, full_algebra(R2), d=d).verdict == "pass"


def test_ad_probe_pass_replays():
    A = tangent_algebra(V(R2, "x*y"))
    cert = ad_probe(F("[x^3*y, 0]"), A, full_algebra(R2), d=2)
    assert replay(cert, A) == cert.verdict


def test_visibility_hyperplane():
    rep = visibility_diagnostic(tangent_algebra(V(R2, "x")), "full")
    assert rep.equals_tangent_algebra and rep.smooth


def test_visibility_cone_at_origin():
    rep = visibility_diagnostic(tangent_algebra(V(R3, "x^2 + y^2 + z^2")), "at_origin")
    assert rep.equals_tangent_algebra and rep.isolated_singularity and rep.irreducible and rep.in_ambient


def test_germ_irreducible():
    assert germ_irreducible(V(R2, "x")) is True
    assert germ_irreducible(V(R3, "x^2 + y^2 + z^2")) is True
    assert germ_irreducible(V(R2, "x*y")) is None


def test_automap_validation():
    with pytest.raises(DomainError):
        AutoMap.create([P("x + 1"), P("y")])
    with pytest.raises(InversionError):
        AutoMap.create([P("x^2"), P("y")])
    with pytest.raises(InversionError):
        AutoMap.create([P("x + y"), P("x + y")])


@pytest.mark.parametrize("phi", MAPS)
def test_inverse_round_trip(phi):
    assert auto_ops(phi, None, "verify")
    inv = auto_ops(phi, None, "invert")
    assert auto_ops(phi, inv, "compose").images == R2.gens
    assert auto_ops(inv, phi, "compose").images == R2.gens


def test_auto_ops_errors():
    with pytest.raises(DomainError):
        auto_ops(SCALE, None, "compose")
    with pytest.raises(DomainError):
        auto_ops(SCALE, None, "nope")
    comp = AutoMap(SHEAR.images, None, "composite")
    with pytest.raises(InversionError):
        auto_ops(comp, None, "invert")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(MAPS), fields(R2, max_deg=2, max_terms=2), fields(R2, max_deg=2, max_terms=2), polys(R2, max_deg=2))
def test_conjugation_properties(phi, D, E, g):
    CD = conjugate_field(phi, D)
    # operator identity Phi(D)(g) = phi*(D((phi*)^-1 g))
    assert apply_field(CD, g) == phi.pullback(apply_field(D, phi.pullback_inverse(g)))
    assert conjugate_field(phi, bracket(D, E)) == bracket(CD, conjugate_field(phi, E))
    assert conjugate_field(phi.inverse(), CD) == D


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(MAPS), polys(R2, max_deg=2, max_terms=2), fields(R2, max_deg=2, max_terms=2))
def test_lambda_identity(phi, f, D):
    assert lambda_apply(f, phi, D) == phi.pullback(f) * D


def test_conjugation_check_pairs():
    assert conjugation_check(SCALE, V(R2, "x*y"), V(R2, "x*y"))
    assert conjugation_check(SHEAR, V(R2, "y + x^2"), V(R2, "y"))
    with pytest.raises(DomainError):
        conjugation_check(SHEAR, V(R2, "y"), V(R2, "y"))


def test_factor_extraction():
    probes = [F("[x, 0]"), F("[0, y]"), F("[y, x]")]
    assert lambda_factor_extract(SCALE, P("x"), probes) == P("2*x")
    assert lambda_factor_extract(SHEAR, P("y"), probes) == P("y + x^2")


def test_corrupted_tables_rejected():
    probes = [F("[x, 0]"), F("[0, y]"), F("[y, x]")]
    with pytest.raises(ExtractionError):
        lambda_factor_extract(SCALE, P("x"), probes, table={2: F("[2*x*y, x^2]")})
    with pytest.raises(ExtractionError):
        lambda_factor_extract(SCALE, P("x"), probes, table={1: F("[1, 2*x*y]")})
    with pytest.raises(ExtractionError):
        lambda_factor_extract(SCALE, P("x"), probes, table=lambda D: P("x + 1") * D if D.coeffs[0] == P("y") else P("2*x") * D)
