from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liegerm import ParseError, RingCtx, parse_field, parse_poly, parse_session, render
from liegerm.expr_io import parse_vector, render_field, render_poly, split_args, to_jsonable

from conftest import F, P, R2, R3, fields, polys


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2*x - y", "2*x - y"),
        ("y - 2*x", "-2*x + y"),
        ("x^2*y + 1/2", "x^2*y + 1/2"),
        ("(x + y)^2", "x^2 + 2*x*y + y^2"),
        ("-x", "-x"),
        ("x/2", "1/2*x"),
        ("0", "0"),
        ("3 - 3", "0"),
    ],
)
def test_canonical_render(text, expected):
    assert render_poly(parse_poly(text, R2)) == expected


def test_render_field():
    assert render_field(parse_field("[x, 0]", R2)) == "[x, 0]"
    assert render(F("[x, 0]")) == "[x, 0]"


@pytest.mark.parametrize(
    "text, offset",
    [("x +", 3), ("x + * y", 4), ("w", 0), ("2x", 1), ("x^y", 2), ("(x", 2), ("x / y", 4), ("x / 0", 4)],
)
def test_parse_errors(text, offset):
    with pytest.raises(ParseError) as exc:
        parse_poly(text, R2)
    assert exc.value.offset == offset


def test_field_arity():
    with pytest.raises(ParseError):
        parse_field("[x]", R2)
    with pytest.raises(ParseError):
        parse_field("x, y", R2)
    assert parse_vector("[x, y, 1]", R2).rank == 3


@settings(max_examples=150, deadline=None)
@given(polys(R3, max_deg=4, max_terms=5, coeff=50))
def test_poly_round_trip(f):
    assert parse_poly(render_poly(f), R3) == f


@settings(max_examples=80, deadline=None)
@given(fields(R2, max_deg=3, max_terms=3))
def test_field_round_trip(D):
    assert parse_field(render_field(D), R2) == D


@settings(max_examples=100, deadline=None)
@given(polys(R2, max_deg=2, max_terms=3), polys(R2, max_deg=2, max_terms=3))
def test_render_injective(f, g):
    assert (render_poly(f) == render_poly(g)) == (f == g)


def test_orders_change_term_order():
    lex = RingCtx(("x", "y"), "lex")
    assert render_poly(parse_poly("x + y^2", lex)) == "x + y^2"
    assert render_poly(parse_poly("x + y^2", R2)) == "y^2 + x"


def test_jsonable():
    assert to_jsonable(Fraction(1, 2)) == "1/2"
    assert to_jsonable({"f": P("x"), "v": [F("[x, 0]")]}) == {"f": "x", "v": [["x", "0"]]}


def test_json_render_deterministic():
    value = {"b": [F("[x, 0]")], "a": P("x")}
    assert render(value, "json") == render(value, "json")
    assert '"a": "x"' in render(value, "json")


def test_split_args():
    assert split_args("shear y [1, -2*x]  ex") == ["shear", "y", "[1, -2*x]", "ex"]


SESSION = """\
# comment
ring x y
ideal node: x*y
ideal pair: x; y  # two generators
field ex: [1, 0]
module m: ex; [0, y]
family axes: node, pair
auto s: x -> 2*x, y -> y
inverse s: x -> 1/2*x, y -> y
task tangent node
"""


def test_parse_session():
    s = parse_session(SESSION)
    assert s.ring.names == ("x", "y")
    assert s.ideals["pair"] == [P("x"), P("y")]
    assert s.fields["ex"] == F("[1, 0]")
    assert len(s.modules["m"]) == 2
    assert s.families["axes"] == ["node", "pair"]
    assert s.autos["s"] == [P("2*x"), P("y")]
    assert s.inverses["s"][0] == P("1/2*x")
    assert [(t.verb, t.args) for t in s.tasks] == [("tangent", ["node"])]


@pytest.mark.parametrize(
    "text, line",
    [
        ("ideal a: x", 1),
        ("ring x y\nideal a: x +", 2),
        ("ring x y\nbogus", 2),
        ("ring x y\nfield e: [1]", 2),
        ("ring x y\nauto s: z -> x", 2),
        ("ring x x", 1),
    ],
)
def test_session_errors(text, line):
    with pytest.raises(ParseError) as exc:
        parse_session(text)
    assert exc.value.line == line


def test_parse_error_message_format():
    with pytest.raises(ParseError) as exc:
        parse_session("ring x y\nideal a: x +")
    assert str(exc.value).startswith("line 2, column")
