"""Command-line front end.

JSON goes to stdout and diagnostics to stderr.  Exit codes: 0 success or
true, 1 a negative answer (rejected, not equivalent, invalid automaton),
2 usage errors, 3 invalid input, 4 a resource cap was hit.

Automaton and graph arguments are JSON files, ``-`` for stdin, or
``fixtures:<name>`` for a built-in fixture.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixtures as fx
from . import games
from . import transforms as tf
from .automaton import Automaton, automaton_from_json, automaton_to_json, classify, validate
from .errors import DGAError, InvalidInputError, ResourceLimitError
from .graphs import LabeledGraph, enumerate_graphs, graph_from_json, graph_to_json
from .language import bounded_language_equal, ndga_emptiness

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3, 4

_stdin_cache: list = []


def _read_text(path: str) -> str:
    if path == "-":
        if not _stdin_cache:
            _stdin_cache.append(sys.stdin.read())
        return _stdin_cache[0]
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e.strerror}") from None


def _fixture(path: str, kind: str):
    name = path.split(":", 1)[1]
    try:
        e = fx.entry(name)
    except KeyError as err:
        raise InvalidInputError(err.args[0]) from None
    if e.kind != kind:
        raise InvalidInputError(f"fixture {name} is a {e.kind}, not a {kind}")
    return e.build()


def _json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from None


def load_automaton(path: str, check: bool = True) -> Automaton:
    if path.startswith("fixtures:"):
        return _fixture(path, "automaton")
    return automaton_from_json(_json(path), check=check)


def load_graph(path: str) -> LabeledGraph:
    if path.startswith("fixtures:"):
        return _fixture(path, "graph")
    return graph_from_json(_json(path))


def _symbols(text: str) -> list[str]:
    return [s for s in (x.strip() for x in text.split(",")) if s]


def _load_formula(text: str):
    from .mso import parse
    from .mso.sentences import BENCHMARKS
    if text.startswith("fixtures:"):
        name = text.split(":", 1)[1]
        if name not in BENCHMARKS:
            raise InvalidInputError(f"unknown sentence {name!r}; known: {', '.join(BENCHMARKS)}")
        return BENCHMARKS[name]()
    if text == "-" or (len(text) < 256 and Path(text).is_file()):
        text = _read_text(text)
    return parse(text)


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# subcommands ------------------------------------------------------------------------------


def cmd_validate(args) -> int:
    a = load_automaton(args.automaton, check=False)
    v = validate(a)
    out = {"valid": v.ok, "diagnostics": [{"code": d.code, "message": d.message} for d in v.diagnostics]}
    if v.ok:
        out.update(size=a.size, length=a.length, variant=classify(a).value, levels=v.levels)
    _emit(out)
    return EXIT_OK if v.ok else EXIT_FALSE


def _restricted(a: Automaton, restrict: str | None) -> Automaton:
    if restrict is None:
        return a
    sigma, gamma = a.sigma.symbols, a.gamma.symbols
    other = fx.a_conn(sigma, gamma) if restrict == "conn" else fx.a_undir(sigma, gamma)
    out, _ = tf.intersection(a, other)
    return out


def cmd_accept(args) -> int:
    a = _restricted(load_automaton(args.automaton), args.restrict)
    g = load_graph(args.graph)
    if args.run_dot or args.game_dot:
        game = games.build_game(a, g)
        verdict = games.solve(game)
        accepted = verdict.winner is games.Player.AUTOMATON
        if args.game_dot:
            Path(args.game_dot).write_text(games.game_to_dot(game, verdict))
        if args.run_dot:
            if accepted:
                Path(args.run_dot).write_text(games.run_to_dot(games.extract_run(game, verdict)))
            else:
                _note("no accepting run: the run diagram was not written")
    else:
        accepted = games.accepts(a, g)
    _emit({"accepted": accepted})
    return EXIT_OK if accepted else EXIT_FALSE


_UNARY = {"dual": tf.dual, "nonblocking": tf.make_nonblocking, "trim": tf.trim, "anf": tf.to_anf,
          "complement-ddga": tf.complement_ddga}
_BINARY = {"union": tf.union, "intersection": tf.intersection,
           "product-and": lambda x, y: tf.product(x, y, "and"),
           "product-or": lambda x, y: tf.product(x, y, "or")}
TRANSFORMS = tuple(_UNARY) + tuple(_BINARY) + ("project",)


def cmd_transform(args) -> int:
    op = args.op
    a = load_automaton(args.automaton)
    if op in _BINARY:
        if args.automaton2 is None:
            raise InvalidInputError(f"{op} needs a second automaton")
        out, rep = _BINARY[op](a, load_automaton(args.automaton2))
    else:
        if args.automaton2 is not None:
            raise InvalidInputError(f"{op} takes a single automaton")
        if op == "project":
            if args.map is None:
                raise InvalidInputError("project needs --map")
            data = _json(args.map)
            if not isinstance(data, dict):
                raise InvalidInputError("--map must hold a JSON object")
            h, target = (data["map"], data.get("sigma")) if "map" in data else (data, None)
            out, rep = tf.project(a, h, target)
        else:
            out, rep = _UNARY[op](a)
    _note(f"{rep.construction}: size {rep.input_sizes} -> {rep.output_size}, "
          f"length {rep.input_lengths} -> {rep.output_length}")
    _emit(automaton_to_json(out))
    return EXIT_OK


def cmd_mso(args) -> int:
    from .mso import compile_formula, evaluate, render
    from .mso.translate import automaton_to_sentence
    if args.mso_cmd == "eval":
        f = _load_formula(args.formula)
        g = load_graph(args.graph)
        alpha = json.loads(args.assign) if args.assign else None
        value = evaluate(f, g, alpha)
        _emit({"value": value})
        return EXIT_OK if value else EXIT_FALSE
    if args.mso_cmd == "compile":
        f = _load_formula(args.formula)
        a, rep = compile_formula(f, _symbols(args.sigma), _symbols(args.gamma))
        if args.report:
            Path(args.report).write_text(json.dumps(rep.to_json(), indent=2))
        _note(f"compiled: size {a.size}, length {a.length}, {len(rep.steps)} steps, "
              f"closure laws {'hold' if rep.laws_hold() else 'VIOLATED'}")
        _emit(automaton_to_json(a))
        return EXIT_OK
    a = load_automaton(args.automaton)
    text = render(automaton_to_sentence(a))
    if args.text:
        print(text)
    else:
        _emit({"formula": text})
    return EXIT_OK


def cmd_empty(args) -> int:
    a = load_automaton(args.automaton)
    verdict = ndga_emptiness(a, cap=args.cap, undirected=args.undirected)
    _emit(verdict.to_json())
    return EXIT_OK


def cmd_enumerate(args) -> int:
    for g in enumerate_graphs(args.n, _symbols(args.sigma), _symbols(args.gamma),
                              undirected=args.undirected, connected=args.connected):
        sys.stdout.write(json.dumps(graph_to_json(g)) + "\n")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if args.fixtures_cmd == "list":
        _emit([{"name": name, "kind": e.kind, "description": e.description} for name, e in fx.FIXTURES.items()])
        return EXIT_OK
    try:
        e = fx.entry(args.name)
    except KeyError as err:
        raise InvalidInputError(err.args[0]) from None
    obj = e.build()
    _emit(automaton_to_json(obj) if e.kind == "automaton" else graph_to_json(obj))
    return EXIT_OK


def cmd_equiv(args) -> int:
    a1, a2 = load_automaton(args.automaton1), load_automaton(args.automaton2)
    res = bounded_language_equal(a1, a2, args.n)
    out = {"equal": res.equal, "graphs_checked": res.graphs_checked}
    if not res.equal:
        out["counterexample"] = graph_to_json(res.counterexample)
        out["accepted_by"] = list(res.accepted_by)
    _emit(out)
    return EXIT_OK if res.equal else EXIT_FALSE


# parser -----------------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dga", description="Distributed graph automata toolkit.")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("validate", help="check an automaton and report its levels")
    s.add_argument("automaton")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("accept", help="decide acceptance of a graph")
    s.add_argument("automaton")
    s.add_argument("graph")
    s.add_argument("--run-dot", metavar="FILE", help="write an accepting run as DOT")
    s.add_argument("--game-dot", metavar="FILE", help="write the solved game as DOT")
    s.add_argument("--restrict", choices=("conn", "undir"),
                   help="intersect with the connected or undirected graphs first")
    s.set_defaults(fn=cmd_accept)

    s = sub.add_parser("transform", help="apply a normal form or closure construction")
    s.add_argument("op", choices=TRANSFORMS)
    s.add_argument("automaton")
    s.add_argument("automaton2", nargs="?")
    s.add_argument("--map", metavar="FILE", help="projection map as JSON {label: image}")
    s.set_defaults(fn=cmd_transform)

    s = sub.add_parser("mso", help="monadic second-order logic")
    msub = s.add_subparsers(dest="mso_cmd", required=True)
    m = msub.add_parser("eval", help="evaluate a formula on a graph")
    m.add_argument("formula", help="formula text, a file, - or fixtures:<sentence>")
    m.add_argument("graph")
    m.add_argument("--assign", metavar="JSON", help='values of free variables, e.g. {"x": 0, "X": [1, 2]}')
    m.set_defaults(fn=cmd_mso)
    m = msub.add_parser("compile", help="compile a formula into an automaton")
    m.add_argument("formula")
    m.add_argument("--sigma", required=True, help="comma-separated node labels")
    m.add_argument("--gamma", required=True, help="comma-separated edge symbols")
    m.add_argument("--report", metavar="FILE", help="write the step-by-step compile report")
    m.set_defaults(fn=cmd_mso)
    m = msub.add_parser("from-automaton", help="translate an automaton into a sentence")
    m.add_argument("automaton")
    m.add_argument("--text", action="store_true", help="print the bare formula")
    m.set_defaults(fn=cmd_mso)

    s = sub.add_parser("empty", help="bounded emptiness check for nondeterministic automata")
    s.add_argument("automaton")
    s.add_argument("--cap", type=_positive, default=4, help="largest graph size searched (default 4)")
    s.add_argument("--undirected", action="store_true", help="search undirected graphs only")
    s.set_defaults(fn=cmd_empty)

    s = sub.add_parser("enumerate", help="list graphs up to isomorphism, one JSON per line")
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--sigma", default="_")
    s.add_argument("--gamma", default="_")
    s.add_argument("--undirected", action="store_true")
    s.add_argument("--connected", action="store_true")
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("fixtures", help="built-in automata and graphs")
    fsub = s.add_subparsers(dest="fixtures_cmd", required=True)
    fsub.add_parser("list").set_defaults(fn=cmd_fixtures)
    f = fsub.add_parser("dump")
    f.add_argument("name")
    f.set_defaults(fn=cmd_fixtures)

    s = sub.add_parser("equiv", help="compare two languages on all small graphs")
    s.add_argument("automaton1")
    s.add_argument("automaton2")
    s.add_argument("--n", type=_positive, default=3)
    s.set_defaults(fn=cmd_equiv)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.fn(args)
    except ResourceLimitError as e:
        _note(f"error: {e}")
        return EXIT_CAP
    except (DGAError, ValueError, KeyError) as e:
        _note(f"error: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
