"""Command-line interface: ``liegerm VERB SESSION ARGS... [flags]``.

Exit status 0 means the computation finished (a verdict of false/fail is
still 0), 2 means malformed input, 3 means a violated precondition.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import derivations as dv
from . import lie
from .errors import DomainError, LiegermError, ParseError, RingMismatchError
from .expr_io import Session, parse_field, parse_poly, parse_session, parse_vector, render, to_jsonable
from .groebner import Ideal, VfModule, buchberger, normal_form
from .poly import Poly, VField

log = logging.getLogger("liegerm")

WORKERS_ENV = "LIEGERM_WORKERS"


class InputError(LiegermError):
    """Bad command arguments or unresolved names (exit status 2)."""


class Context:
    def __init__(self, session: Session, opts: argparse.Namespace):
        self.s = session
        self.opts = opts
        self.ring = session.ring

    # name resolution

    def variety(self, name: str) -> dv.Variety:
        if name not in self.s.ideals:
            raise InputError(f"unknown ideal {name!r}")
        return dv.Variety.of(self.ring, self.s.ideals[name], name=name)

    def family(self, names: list[str]) -> list[dv.Variety]:
        if len(names) == 1 and names[0] in self.s.families:
            names = self.s.families[names[0]]
        if not names:
            raise InputError("a family needs at least one member")
        return [self.variety(n) for n in names]

    def module(self, name: str) -> VfModule:
        if name in self.s.modules:
            return VfModule(self.ring, self.s.modules[name])
        if name in self.s.ideals:
            return dv.tangent_algebra(self.variety(name))
        if name in self.s.families:
            return dv.tangent_family(self.family([name]))
        if name in ("full", "origin", "at_origin"):
            return dv.ambient_algebra(self.ring, name)
        raise InputError(f"unknown module {name!r}")

    def field(self, text: str) -> VField:
        if text in self.s.fields:
            return self.s.fields[text]
        if text.startswith("["):
            return parse_field(text, self.ring)
        raise InputError(f"unknown field {text!r}")

    def poly(self, text: str) -> Poly:
        return parse_poly(text, self.ring)

    def auto(self, name: str) -> lie.AutoMap:
        if name not in self.s.autos:
            raise InputError(f"unknown automorphism {name!r}")
        return lie.AutoMap.create(self.s.autos[name], self.s.inverses.get(name))

    def target(self, name: str) -> Ideal | VfModule:
        if name in self.s.ideals:
            return Ideal(self.ring, self.s.ideals[name])
        return self.module(name)

    def element(self, text: str, like: Ideal | VfModule) -> Poly | VField:
        if isinstance(like, Ideal):
            return self.poly(text)
        if text in self.s.fields:
            return self.s.fields[text]
        return parse_vector(text, self.ring)


def _need(args: list[str], lo: int, hi: int | None, usage: str) -> None:
    hi = lo if hi is None else hi
    if not lo <= len(args) <= hi:
        raise InputError(f"usage: {usage}")


# verb handlers: (ctx, args) -> (inputs, result, certificate or None)


def _tangent(ctx: Context, args):
    _need(args, 1, 1, "tangent IDEAL")
    X = ctx.variety(args[0])
    A = dv.tangent_algebra(X)
    return {"ideal": args[0], "gens": list(X.gens)}, {"generators": A}, None


def _family(ctx: Context, args):
    _need(args, 1, 99, "family FAMILY | family IDEAL...")
    F = ctx.family(args)
    return {"members": [X.name for X in F]}, {"generators": dv.tangent_family(F)}, None


def _integral(ctx: Context, args):
    _need(args, 1, 1, "integral MODULE")
    A = ctx.module(args[0])
    I = dv.integral_ideal(A)
    return (
        {"module": args[0]},
        {"integral_ideal": I, "integral_variety": dv.integral_variety(A)},
        None,
    )


def _sing(ctx: Context, args):
    _need(args, 1, 1, "sing IDEAL")
    S = dv.singular_locus(ctx.variety(args[0]))
    return {"ideal": args[0]}, {"singular_locus": S, "smooth": S.is_empty()}, None


def _chain(ctx: Context, args):
    _need(args, 1, 1, "chain IDEAL")
    return {"ideal": args[0]}, dv.sing_chain(ctx.variety(args[0])), None


def _recover(ctx: Context, args):
    _need(args, 1, 1, "recover IDEAL")
    return {"ideal": args[0]}, dv.recovery_check(ctx.variety(args[0])), None


def _stability(ctx: Context, args):
    _need(args, 1, 1, "stability IDEAL")
    X = ctx.variety(args[0])
    return {"ideal": args[0]}, {"stable": dv.sing_stability_check(X), "singular_locus": dv.singular_locus(X)}, None


def _irredundant(ctx: Context, args):
    _need(args, 1, 99, "irredundant FAMILY | irredundant IDEAL...")
    F = ctx.family(args)
    return {"members": [X.name for X in F]}, dv.irredundancy_check(F), None


def _bracket(ctx: Context, args):
    _need(args, 2, 2, "bracket FIELD FIELD")
    D, E = ctx.field(args[0]), ctx.field(args[1])
    return {"D": D, "E": E}, {"bracket": lie.bracket(D, E)}, None


def _closure(ctx: Context, args):
    _need(args, 1, 1, "closure MODULE")
    A = ctx.module(args[0])
    hit = lie.closure_witness(A)
    result: dict[str, Any] = {"closed": hit is None}
    if hit is not None:
        result["escaping"] = {"u": hit[0], "v": hit[1], "bracket": hit[2]}
    return {"module": args[0]}, result, None


def _balanced(ctx: Context, args):
    _need(args, 1, 2, "balanced MODULE [AMBIENT]")
    A = ctx.module(args[0])
    amb_name = args[1] if len(args) > 1 else "full"
    B = ctx.module(amb_name)
    d = ctx.opts.degree_bound
    if ctx.opts.witness:
        a = ctx.field(ctx.opts.witness)
        cert = lie.ad_probe(a, A, B, d, ctx.opts.depth)
        inputs = {"module": args[0], "ambient": amb_name, "witness": a}
    else:
        cert = lie.balanced_certificate(A, B, d, ctx.opts.ideal_depth)
        inputs = {"module": args[0], "ambient": amb_name}
    return inputs, {"verdict": cert.verdict}, cert


def _visible(ctx: Context, args):
    _need(args, 1, 2, "visible MODULE [full|origin|FAMILY]")
    A = ctx.module(args[0])
    kind = args[1] if len(args) > 1 else "full"
    if kind in ("full", "origin", "at_origin"):
        rep = lie.visibility_diagnostic(A, kind)
    else:
        rep = lie.visibility_diagnostic(A, "relative", ctx.family([kind]))
    return {"module": args[0], "ambient": kind}, rep, None


def _conjugate(ctx: Context, args):
    _need(args, 2, 3, "conjugate AUTO FIELD | conjugate AUTO IDEAL_X IDEAL_Y")
    phi = ctx.auto(args[0])
    if len(args) == 2:
        D = ctx.field(args[1])
        return {"auto": phi, "field": D}, {"image": lie.conjugate_field(phi, D)}, None
    X, Y = ctx.variety(args[1]), ctx.variety(args[2])
    ok = lie.conjugation_check(phi, X, Y)
    return {"auto": phi, "X": args[1], "Y": args[2]}, {"conjugate": ok}, None


def _lambda(ctx: Context, args):
    _need(args, 3, 3, "lambda AUTO POLY FIELD")
    phi, f, D = ctx.auto(args[0]), ctx.poly(args[1]), ctx.field(args[2])
    L = lie.lambda_apply(f, phi, D)
    pf = phi.pullback(f)
    return (
        {"auto": phi, "f": f, "field": D},
        {"lambda": L, "pullback_f": pf, "equals_pullback_times_field": L == pf * D},
        None,
    )


def _extract(ctx: Context, args):
    _need(args, 4, 99, "extract AUTO POLY FIELD FIELD...")
    phi, f = ctx.auto(args[0]), ctx.poly(args[1])
    probes = [ctx.field(a) for a in args[2:]]
    u = lie.lambda_factor_extract(phi, f, probes)
    return {"auto": phi, "f": f, "probes": probes}, {"factor": u}, None


def _gb(ctx: Context, args):
    _need(args, 1, 1, "gb IDEAL|MODULE")
    T = ctx.target(args[0])
    gens = [g for g in T.gens if not g.is_zero()]
    basis = buchberger(gens, chain=ctx.opts.chain) if gens else []
    return {"name": args[0]}, {"basis": basis}, None


def _nf(ctx: Context, args):
    _need(args, 2, 2, "nf ELEMENT IDEAL|MODULE")
    T = ctx.target(args[1])
    v = ctx.element(args[0], T)
    return {"element": v, "name": args[1]}, {"normal_form": normal_form(v, list(T.basis))}, None


def _member(ctx: Context, args):
    _need(args, 2, 2, "member ELEMENT IDEAL|MODULE")
    T = ctx.target(args[1])
    v = ctx.element(args[0], T)
    return {"element": v, "name": args[1]}, {"member": T.contains(v)}, None


VERBS: dict[str, Callable] = {
    "tangent": _tangent,
    "family": _family,
    "integral": _integral,
    "sing": _sing,
    "chain": _chain,
    "recover": _recover,
    "stability": _stability,
    "irredundant": _irredundant,
    "bracket": _bracket,
    "closure": _closure,
    "balanced": _balanced,
    "visible": _visible,
    "conjugate": _conjugate,
    "lambda": _lambda,
    "extract": _extract,
    "gb": _gb,
    "nf": _nf,
    "member": _member,
}


def execute(session: Session, verb: str, args: list[str], opts: argparse.Namespace) -> dict:
    """Run one verb and build the report {task, inputs, result, certificate?, provenance}."""
    if verb not in VERBS:
        raise InputError(f"unknown verb {verb!r}")
    ctx = Context(session, opts)
    inputs, result, cert = VERBS[verb](ctx, args)
    report: dict[str, Any] = {"task": verb, "inputs": to_jsonable(inputs), "result": to_jsonable(result)}
    if cert is not None:
        report["certificate"] = cert.to_json()
    report["provenance"] = {"order": session.ring.order, "d": opts.degree_bound, "k": opts.depth}
    return report


def _flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--order", default="grevlex", choices=["lex", "grlex", "grevlex"])
    p.add_argument("--degree-bound", type=int, default=4)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--ideal-depth", type=int, default=None)
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.add_argument("--witness", default=None, help="field for a single ad-probe check (balanced)")
    p.add_argument("--chain", action="store_true", help="enable the chain criterion (gb)")
    return p


def build_parser() -> argparse.ArgumentParser:
    flags = _flags()
    parser = argparse.ArgumentParser(prog="liegerm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb, parents=[flags])
        sp.add_argument("session")
        sp.add_argument("args", nargs="*")
    sp = sub.add_parser("run", parents=[flags], help="run every task line of a session")
    sp.add_argument("session")
    sp = sub.add_parser("corpus", help="run the bundled corpus against golden reports")
    sp.add_argument("--filter", default=None)
    sp.add_argument("--corpus-dir", default=None)
    sp.add_argument("--seed-corpus", action="store_true", help="rewrite golden reports")
    return parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _validate(opts) -> None:
    if opts.degree_bound < 0:
        raise InputError("--degree-bound must be nonnegative")
    if opts.depth not in (1, 2):
        raise InputError("--depth must be 1 or 2")
    if opts.ideal_depth is not None and opts.ideal_depth < 1:
        raise InputError("--ideal-depth must be positive")


def _task_opts(args: list[str], base: argparse.Namespace) -> tuple[list[str], argparse.Namespace]:
    """Split a task line into positional args and flags (defaults from ``base``)."""
    p = _Parser(parents=[_flags()], add_help=False)
    p.set_defaults(**{k: v for k, v in vars(base).items() if k in vars(p.parse_args([]))})
    p.add_argument("rest", nargs="*")
    ns = p.parse_args(args)
    rest = ns.rest
    del ns.rest
    _validate(ns)
    return rest, ns


def _load(path: str, order: str) -> Session:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read session {path!r}: {err.strerror}") from None
    return parse_session(text, order)


def run_session(path: str, opts: argparse.Namespace) -> list[dict]:
    session = _load(path, opts.order)
    reports = []
    for task in session.tasks:
        args, topts = _task_opts(task.args, opts)
        if topts.order != session.ring.order:
            session = _load(path, topts.order)
        reports.append(execute(session, task.verb, args, topts))
    return reports


# corpus


def default_corpus_dir() -> Path:
    return Path(str(resources.files("liegerm") / "corpus"))


def corpus_items(corpus_dir: Path, pattern: str | None = None) -> list[tuple[str, Path, int]]:
    if not corpus_dir.is_dir():
        raise InputError(f"missing corpus directory {corpus_dir}")
    items = []
    for path in sorted(corpus_dir.glob("*.session")):
        session = parse_session(path.read_text(encoding="utf-8"))
        for idx, task in enumerate(session.tasks):
            item_id = f"{path.stem}:{idx}:{task.verb} {' '.join(task.args)}".rstrip()
            if pattern is None or pattern in item_id:
                items.append((item_id, path, idx))
    return items


def _default_opts() -> argparse.Namespace:
    return _flags().parse_args([])


def _run_item(path: Path, idx: int) -> tuple[dict | None, str | None, float]:
    t0 = time.perf_counter()
    opts = _default_opts()
    try:
        session = parse_session(path.read_text(encoding="utf-8"))
        task = session.tasks[idx]
        args, topts = _task_opts(task.args, opts)
        if topts.order != session.ring.order:
            session = parse_session(path.read_text(encoding="utf-8"), topts.order)
        report = execute(session, task.verb, args, topts)
        err = None
    except LiegermError as exc:
        report, err = None, f"{type(exc).__name__}: {exc}"
    return report, err, time.perf_counter() - t0


def _golden_path(path: Path) -> Path:
    return path.parent / "golden" / f"{path.stem}.json"


def run_corpus(corpus_dir: Path, pattern: str | None = None, seed: bool = False,
               out=None) -> int:
    out = out or sys.stdout
    items = corpus_items(corpus_dir, pattern)
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    jobs = [(p, i) for _, p, i in items]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_item, *zip(*jobs)))
    else:
        results = [_run_item(p, i) for p, i in jobs]

    goldens: dict[Path, list] = {}
    failed = 0
    for (item_id, path, idx), (report, err, dt) in zip(items, results):
        gp = _golden_path(path)
        if seed:
            goldens.setdefault(gp, []).append(report)
            status = "SEED" if err is None else "FAIL"
        else:
            if gp not in goldens:
                try:
                    goldens[gp] = json.loads(gp.read_text(encoding="utf-8"))
                except (OSError, json.JSONDecodeError) as exc:
                    goldens[gp] = exc
            g = goldens[gp]
            ok = (
                err is None
                and isinstance(g, list)
                and idx < len(g)
                and json.dumps(g[idx], sort_keys=True) == json.dumps(report, sort_keys=True)
            )
            status = "PASS" if ok else "FAIL"
        if status == "FAIL":
            failed += 1
        line = f"{status}  {item_id}  {dt:.3f}s"
        if err:
            line += f"  ({err})"
        print(line, file=out)
    if seed:
        for gp, reps in goldens.items():
            gp.parent.mkdir(parents=True, exist_ok=True)
            gp.write_text(json.dumps(reps, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"{len(items)} items, {failed} failed", file=out)
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    opts = parser.parse_args(argv)
    try:
        if opts.command == "corpus":
            cdir = Path(opts.corpus_dir) if opts.corpus_dir else default_corpus_dir()
            return run_corpus(cdir, opts.filter, opts.seed_corpus)
        _validate(opts)
        if opts.command == "run":
            reports = run_session(opts.session, opts)
            if opts.format == "json":
                print(json.dumps(reports, indent=2, ensure_ascii=False))
            else:
                print("\n\n".join(render(r, "text") for r in reports))
            return 0
        session = _load(opts.session, opts.order)
        report = execute(session, opts.command, opts.args, opts)
        print(render(report, opts.format))
        return 0
    except (ParseError, InputError, RingMismatchError) as exc:
        if isinstance(exc, ParseError) and exc.text:
            print(f"error: {exc}", file=sys.stderr)
            print(f"  {exc.text}", file=sys.stderr)
            print(f"  {' ' * exc.offset}^", file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
