"""Parsing and canonical printing of polynomials, fields and session files.

Grammar for polynomials (whitespace is ignored, ``*`` is mandatory)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' unary) | ('/' NUMBER))*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' NUMBER)?
    atom   := NUMBER | NAME | '(' expr ')'

Session files are line oriented; ``#`` starts a comment::

    ring x y z
    ideal cone: x^2 + y^2 + z^2
    field E: [x, y, z]
    module M: [x, 0, 0]; E
    family F: cone, plane
    auto phi: x -> 2*x, y -> y, z -> z
    inverse phi: x -> 1/2*x, y -> y, z -> z
    task tangent cone
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import ParseError
from .poly import Poly, RingCtx, VField

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            toks.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: RingCtx):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2], text=self.text)

    def expect(self, value: str):
        t = self.next()
        if t[1] != value or t[0] != "op":
            self.error(f"expected {value!r}", t)
        return t

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != "end":
            tok = self.peek()
            if tok[0] in ("num", "name") or tok[1] == "(":
                self.error("implicit multiplication is not allowed; use '*'")
            self.error(f"unexpected {tok[1]!r}")
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.next()[1]
            if op == "*":
                p = p * self.unary()
            else:
                t = self.next()
                if t[0] != "num":
                    self.error("only division by an integer literal is allowed", t)
                if int(t[1]) == 0:
                    self.error("division by zero", t)
                p = p / int(t[1])
        return p

    def unary(self) -> Poly:
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.next()
            return -self.unary()
        if t[0] == "op" and t[1] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.next()
            t = self.next()
            if t[0] != "num":
                self.error("exponent must be a nonnegative integer literal", t)
            return base ** int(t[1])
        return base

    def atom(self) -> Poly:
        t = self.next()
        if t[0] == "num":
            return self.ring.const(int(t[1]))
        if t[0] == "name":
            if t[1] not in self.ring.names:
                self.error(f"unknown variable {t[1]!r}", t)
            return self.ring.var(t[1])
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            self.expect(")")
            return p
        if t[0] == "end":
            self.error("unexpected end of input", t)
        self.error(f"unexpected {t[1]!r}", t)


def parse_poly(text: str, ring: RingCtx) -> Poly:
    return _Parser(text, ring).parse()


def _split_top(text: str, sep: str) -> list[tuple[str, int]]:
    """Split on ``sep`` outside parentheses/brackets; keeps start offsets."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append((text[start:i], start))
            start = i + 1
    parts.append((text[start:], start))
    return parts


def _parse_part(text: str, offset: int, ring: RingCtx, full: str) -> Poly:
    try:
        return parse_poly(text, ring)
    except ParseError as err:
        raise ParseError(err.message, err.offset + offset, text=full) from None


def parse_field(text: str, ring: RingCtx) -> VField:
    """Bracket form ``[a_1, ..., a_n]`` of a vector field."""
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not s.startswith("["):
        raise ParseError("a vector field must start with '['", lead, text=text)
    if not s.endswith("]"):
        raise ParseError("a vector field must end with ']'", lead + len(s), text=text)
    inner = s[1:-1]
    parts = _split_top(inner, ",")
    coeffs = [_parse_part(p, off + lead + 1, ring, text) for p, off in parts]
    if len(coeffs) != ring.n:
        raise ParseError(f"vector field has {len(coeffs)} coordinates, ring has {ring.n}", lead, text=text)
    return VField(ring, coeffs)


def parse_vector(text: str, ring: RingCtx) -> VField:
    """Bracket form of arbitrary rank (for syzygy and module inputs)."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("a vector must be written as '[...]'", 0, text=text)
    return VField(ring, [_parse_part(p, off + 1, ring, text) for p, off in _split_top(s[1:-1], ",")])


# rendering


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_monomial(ring: RingCtx, e) -> str:
    parts = []
    for name, k in zip(ring.names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def render_poly(f: Poly) -> str:
    """Canonical text, largest monomial first: ``2*x - y``, ``1/2*x^2*y + 3``."""
    if f.is_zero():
        return "0"
    out = []
    for idx, (e, c) in enumerate(f.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        mono = _render_monomial(f.ring, e)
        if not mono:
            body = _render_coeff(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_render_coeff(a)}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out)


def render_field(v: VField) -> str:
    return "[" + ", ".join(render_poly(c) for c in v.coeffs) + "]"


def to_jsonable(value: Any) -> Any:
    """Convert library values into JSON-ready data."""
    from .groebner import Ideal, VfModule

    if isinstance(value, Poly):
        return render_poly(value)
    if isinstance(value, VField):
        return [render_poly(c) for c in value.coeffs]
    if isinstance(value, Ideal):
        return [render_poly(g) for g in value.basis]
    if isinstance(value, VfModule):
        return [to_jsonable(g) for g in value.generators()]
    if isinstance(value, Fraction):
        return _render_coeff(value)
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def _render_text(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return lines
    if isinstance(value, list):
        lines = []
        for v in value:
            if isinstance(v, dict):
                sub = _render_text(v, indent + 1)
                lines.append(f"{pad}- {sub[0].strip()}")
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_inline(v)}")
        return lines
    return [f"{pad}{_inline(value)}"]


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(isinstance(x, str) for x in v)


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, dict):
        return json.dumps(v)
    return str(v)


def render(value: Any, format: str = "text") -> str:
    """Deterministic rendering of a value or report as text or JSON."""
    data = to_jsonable(value)
    if format == "json":
        return json.dumps(data, indent=2, ensure_ascii=False)
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    if isinstance(data, str):
        return data
    if _flat_list(data):
        return _inline(data)
    return "\n".join(_render_text(data))


# session files


@dataclass
class Task:
    verb: str
    args: list[str]
    line: int


@dataclass
class Session:
    ring: RingCtx
    ideals: dict[str, list[Poly]] = field(default_factory=dict)
    fields: dict[str, VField] = field(default_factory=dict)
    modules: dict[str, list[VField]] = field(default_factory=dict)
    families: dict[str, list[str]] = field(default_factory=dict)
    autos: dict[str, list[Poly]] = field(default_factory=dict)
    inverses: dict[str, list[Poly]] = field(default_factory=dict)
    tasks: list[Task] = field(default_factory=list)

    def names(self) -> set[str]:
        return set(self.ideals) | set(self.fields) | set(self.modules) | set(self.families) | set(self.autos)


def split_args(text: str) -> list[str]:
    """Whitespace split that keeps bracketed groups such as ``[1, -2*x]`` whole."""
    out, cur, depth = [], [], 0
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur))
    return out


_DECL = re.compile(r"^(ideal|field|module|family|auto|inverse)\s+([A-Za-z_][A-Za-z0-9_]*)\s*:(.*)$")


def _parse_auto(body: str, offset: int, ring: RingCtx, lineno: int, line: str) -> list[Poly]:
    images: dict[str, Poly] = {}
    for part, off in _split_top(body, ","):
        if "->" not in part:
            raise ParseError("expected 'var -> image'", offset + off, line=lineno, text=line)
        lhs, rhs = part.split("->", 1)
        var = lhs.strip()
        if var not in ring.names:
            raise ParseError(f"unknown variable {var!r}", offset + off, line=lineno, text=line)
        if var in images:
            raise ParseError(f"variable {var!r} mapped twice", offset + off, line=lineno, text=line)
        rhs_off = offset + off + len(lhs) + 2
        try:
            images[var] = parse_poly(rhs, ring)
        except ParseError as err:
            raise ParseError(err.message, rhs_off + err.offset, line=lineno, text=line) from None
    missing = [v for v in ring.names if v not in images]
    if missing:
        raise ParseError(f"no image given for {', '.join(missing)}", offset, line=lineno, text=line)
    return [images[v] for v in ring.names]


def parse_session(text: str, order: str = "grevlex") -> Session:
    """Parse a session file; raises ParseError with line/column on bad input."""
    session: Session | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith("ring"):
            names = stripped.split()[1:]
            if stripped.split()[0] != "ring" or not names:
                raise ParseError("expected 'ring NAME ...'", indent, line=lineno, text=raw)
            if session is not None:
                raise ParseError("ring declared twice", indent, line=lineno, text=raw)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
                    raise ParseError(f"bad variable name {nm!r}", raw.index(nm), line=lineno, text=raw)
            if len(set(names)) != len(names):
                raise ParseError("variable names must be distinct", indent, line=lineno, text=raw)
            session = Session(RingCtx(tuple(names), order))
            continue
        if session is None:
            raise ParseError("ring must be declared before use", indent, line=lineno, text=raw)
        ring = session.ring
        if stripped.startswith("task"):
            words = split_args(stripped)
            if words[0] != "task" or len(words) < 2:
                raise ParseError("expected 'task VERB ARGS'", indent, line=lineno, text=raw)
            session.tasks.append(Task(words[1], words[2:], lineno))
            continue
        m = _DECL.match(stripped)
        if m is None:
            raise ParseError("unrecognised directive", indent, line=lineno, text=raw)
        kind, name, body = m.groups()
        body_off = indent + m.start(3)
        if kind != "inverse" and name in session.names():
            raise ParseError(f"name {name!r} defined twice", indent, line=lineno, text=raw)
        try:
            if kind == "ideal":
                session.ideals[name] = [
                    _parse_part(p, off, ring, body) for p, off in _split_top(body, ";")
                ]
            elif kind == "field":
                session.fields[name] = parse_field(body, ring)
            elif kind == "module":
                gens = []
                for p, off in _split_top(body, ";"):
                    ref = p.strip()
                    if ref in session.fields:
                        gens.append(session.fields[ref])
                    elif ref.startswith("["):
                        gens.append(parse_field(p, ring))
                    else:
                        raise ParseError(f"unknown field {ref!r}", off, text=body)
                session.modules[name] = gens
            elif kind == "family":
                members = [p.strip() for p, _ in _split_top(body, ",")]
                for p, off in _split_top(body, ","):
                    if p.strip() not in session.ideals:
                        raise ParseError(f"unknown ideal {p.strip()!r}", off, text=body)
                session.families[name] = members
            elif kind == "auto":
                session.autos[name] = _parse_auto(body, 0, ring, lineno, body)
            else:
                if name not in session.autos:
                    raise ParseError(f"inverse for undeclared map {name!r}", 0, text=body)
                session.inverses[name] = _parse_auto(body, 0, ring, lineno, body)
        except ParseError as err:
            raise ParseError(err.message, body_off + err.offset, line=lineno, text=raw) from None
    if session is None:
        raise ParseError("session declares no ring", 0, line=1, text=text)
    return session
