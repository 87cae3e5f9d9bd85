"""TCT-style command line front end.

Every generator-producing subcommand takes the output file first, as in
``desloc sync plant.gen m1.gen m2.gen tu.gen``. Exit codes: 0 success,
1 negative verdict, 2 usage error, 3 input error, 4 resource error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import automata as fsa
from .errors import BudgetExceeded, ConfigurationError, DESError
from .fixtures import BUFFERS, COMPONENTS, fixture_text, transfer_line
from .genfile import read_generator, write_generator, write_text_atomic
from .localization import (
    AgentSpec,
    LocalController,
    LocalControllerSet,
    event_reduction_report,
    localize_all,
    rsup_event_count,
    strip_selflooped,
    verify_control_equivalence,
)
from .oracle import DEFAULT_BUDGET, oracle_equal
from .reduction import lift, supreduce
from .synthesis import condat_table, control_data, supcon

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE = range(5)


@dataclass
class CommandResult:
    exit_code: int
    stdout_report: str = ""
    output_files: list[str] = field(default_factory=list)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _ids(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated event ids, got {text!r}")


def _agent(text: str) -> tuple[str, list[int]]:
    name, sep, ids = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=ids, got {text!r}")
    return name, _ids(ids)


def _trace(t) -> str:
    return ",".join(map(str, t)) if t else "(empty string)"


def _stats(g: fsa.Generator) -> str:
    return f"{g.name}: {g.state_count} states, {g.transition_count} transitions"


def _save(res: CommandResult, path: str, g: fsa.Generator) -> None:
    write_generator(path, g)
    res.output_files.append(path)
    res.stdout_report += _stats(g) + "\n"


def _agents(pairs, plant) -> list[AgentSpec]:
    return [AgentSpec.from_plant(name, ids, plant) for name, ids in pairs]


def _name(path: str) -> str:
    return Path(path).stem.upper()


# -- subcommands -----------------------------------------------------------

def cmd_sync(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, fsa.sync([read_generator(p) for p in a.inputs], _name(a.out)))
    return res


def cmd_meet(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, fsa.meet(read_generator(a.left), read_generator(a.right), _name(a.out)))
    return res


def cmd_trim(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, fsa.trim(read_generator(a.input), _name(a.out)))
    return res


def cmd_nonblocking(a) -> CommandResult:
    g = read_generator(a.input)
    ok = fsa.is_nonblocking(g)
    return CommandResult(EXIT_OK if ok else EXIT_NEGATIVE,
                         f"{g.name}: {'nonblocking' if ok else 'blocking'}\n")


def cmd_selfloop(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, fsa.selfloop(read_generator(a.input), a.events, _name(a.out)))
    return res


def cmd_project(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, fsa.project(read_generator(a.input), a.keep, _name(a.out)))
    return res


def cmd_supcon(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    sup = supcon(read_generator(a.plant), read_generator(a.spec), _name(a.out))
    _save(res, a.out, sup)
    if sup.is_empty:
        res.exit_code = EXIT_NEGATIVE
        res.stdout_report += "supremal controllable sublanguage is empty\n"
    return res


def cmd_condat(a) -> CommandResult:
    plant, sup = read_generator(a.plant), read_generator(a.sup)
    cd = control_data(plant, sup)
    if a.agent:
        (agent,) = _agents([a.agent], plant)
        text = condat_table(cd.restricted(agent.controllable_events), f"{sup.name} {agent.name}")
    else:
        text = condat_table(cd)
    res = CommandResult(EXIT_OK, text)
    if a.out:
        write_text_atomic(a.out, text)
        res.output_files.append(a.out)
    return res


def cmd_supreduce(a) -> CommandResult:
    res = CommandResult(EXIT_OK)
    _save(res, a.out, supreduce(read_generator(a.plant), read_generator(a.sup), _name(a.out)))
    return res


def _write_report(res: CommandResult, locs: LocalControllerSet, rsup, outdir: Path,
                  figure: str | None) -> None:
    text = event_reduction_report(locs, rsup)
    res.stdout_report += text
    report = outdir / "event_report.tsv"
    write_text_atomic(report, text)
    res.output_files.append(str(report))
    if figure:
        from .plotting import plot_event_reduction

        plot_event_reduction([c.agent.name for c in locs], [c.state_count for c in locs],
                             [c.event_count for c in locs], rsup, rsup_event_count(rsup), figure)
        res.output_files.append(figure)


def cmd_localize(a) -> CommandResult:
    plant, sup = read_generator(a.plant), read_generator(a.sup)
    agents = _agents(a.agent, plant)
    locs = localize_all(plant, sup, agents)
    outdir = Path(a.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    res = CommandResult(EXIT_OK)
    for c in locs:
        path = str(outdir / f"LOC_{c.agent.name}.gen")
        write_generator(path, c.stripped)
        res.output_files.append(path)
        seed = f"ECC pair {c.ecc_witness}" if c.ecc_used else "no ECC pair"
        loops = ",".join(map(str, sorted(c.selflooped_everywhere))) or "none"
        res.stdout_report += (f"{_stats(c.generator)}; {seed}; self-looped everywhere: {loops}; "
                              f"{c.event_count} events after stripping\n")
    rsup = read_generator(a.rsup) if a.rsup else supreduce(plant, sup)
    figure = a.figure if a.figure is not None else str(outdir / "event_report.png")
    _write_report(res, locs, rsup, outdir, figure if not a.no_figure else None)
    return res


def cmd_checkeq(a) -> CommandResult:
    plant, sup = read_generator(a.plant), read_generator(a.sup)
    locs = [read_generator(p) for p in a.locs]
    rep = verify_control_equivalence(plant, sup, locs)
    lines = [f"closed behavior (L): {'equal' if rep.closed_ok else 'DIFFERENT'}",
             f"marked behavior (Lm): {'equal' if rep.marked_ok else 'DIFFERENT'}"]
    if rep.counterexample is not None:
        lines.append(f"counterexample: {_trace(rep.counterexample)}")
    return CommandResult(EXIT_OK if rep.equivalent else EXIT_NEGATIVE, "\n".join(lines) + "\n")


def cmd_checknormal(a) -> CommandResult:
    plant, k = read_generator(a.plant), read_generator(a.k)
    ok, witness = fsa.is_normal(plant, k, a.observable)
    text = f"{k.name}: {'normal' if ok else 'not normal'}\n"
    if witness is not None:
        text += f"counterexample: {_trace(witness)}\n"
    return CommandResult(EXIT_OK if ok else EXIT_NEGATIVE, text)


def cmd_oracle_eq(a) -> CommandResult:
    left = read_generator(a.left)
    right = [read_generator(p) for p in a.right]
    ok, witness = oracle_equal(left, right if len(right) > 1 else right[0], a.maxlen, a.budget)
    text = f"bounded languages up to length {a.maxlen}: {'equal' if ok else 'DIFFERENT'}\n"
    if witness is not None:
        text += f"counterexample: {_trace(witness)}\n"
    return CommandResult(EXIT_OK if ok else EXIT_NEGATIVE, text)


def cmd_event_report(a) -> CommandResult:
    plant, rsup = read_generator(a.plant), read_generator(a.rsup)
    ctrls = []
    for path in a.locs:
        g = lift(read_generator(path), plant)
        loops, stripped = strip_selflooped(g)
        name = g.name[4:] if g.name.startswith("LOC_") else g.name
        agent = AgentSpec(name, frozenset(), frozenset())
        ctrls.append(LocalController(agent, g, loops, stripped, None))
    locs = LocalControllerSet(tuple(ctrls))
    text = event_reduction_report(locs, rsup)
    res = CommandResult(EXIT_OK, text)
    if a.out:
        write_text_atomic(a.out, text)
        res.output_files.append(a.out)
    if a.figure:
        from .plotting import plot_event_reduction

        plot_event_reduction([c.agent.name for c in locs], [c.state_count for c in locs],
                             [c.event_count for c in locs], rsup, rsup_event_count(rsup), a.figure)
        res.output_files.append(a.figure)
    return res


def cmd_fixture(a) -> CommandResult:
    outdir = Path(a.outdir)
    res = CommandResult(EXIT_OK)
    for name in COMPONENTS + BUFFERS:
        path = str(outdir / f"{name}.gen")
        write_text_atomic(path, fixture_text(name))
        res.output_files.append(path)
    tl = transfer_line()
    _save(res, str(outdir / "plant.gen"), tl.plant.rename("PLANT"))
    _save(res, str(outdir / "spec.gen"), tl.spec.rename("SPEC"))
    return res


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="desloc", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("sync", cmd_sync, "synchronous product")
    sp.add_argument("out")
    sp.add_argument("inputs", nargs="+")
    sp = add("meet", cmd_meet, "product with no private events")
    sp.add_argument("out")
    sp.add_argument("left")
    sp.add_argument("right")
    sp = add("trim", cmd_trim, "keep reachable and coreachable states")
    sp.add_argument("out")
    sp.add_argument("input")
    sp = add("nonblocking", cmd_nonblocking, "exit 0 iff nonblocking")
    sp.add_argument("input")
    sp = add("selfloop", cmd_selfloop, "add self-loops at every state")
    sp.add_argument("out")
    sp.add_argument("input")
    sp.add_argument("--events", type=_ids, required=True)
    sp = add("project", cmd_project, "natural projection")
    sp.add_argument("out")
    sp.add_argument("input")
    sp.add_argument("--keep", type=_ids, required=True)
    sp = add("supcon", cmd_supcon, "supremal controllable sublanguage")
    sp.add_argument("out")
    sp.add_argument("plant")
    sp.add_argument("spec")
    sp = add("condat", cmd_condat, "control data table")
    sp.add_argument("plant")
    sp.add_argument("sup")
    sp.add_argument("--agent", type=_agent, help="restrict to NAME=ids")
    sp.add_argument("--out")
    sp = add("supreduce", cmd_supreduce, "supervisor reduction")
    sp.add_argument("out")
    sp.add_argument("plant")
    sp.add_argument("sup")
    sp = add("localize", cmd_localize, "local controllers with event reduction")
    sp.add_argument("outdir")
    sp.add_argument("plant")
    sp.add_argument("sup")
    sp.add_argument("--agent", type=_agent, action="append", required=True)
    sp.add_argument("--rsup", help="reduced supervisor to compare against (default: computed)")
    sp.add_argument("--figure", help="figure path (default: OUTDIR/event_report.png)")
    sp.add_argument("--no-figure", action="store_true")
    sp = add("checkeq", cmd_checkeq, "control equivalence of controllers and supervisor")
    sp.add_argument("plant")
    sp.add_argument("sup")
    sp.add_argument("locs", nargs="+")
    sp = add("checknormal", cmd_checknormal, "normality of a language")
    sp.add_argument("plant")
    sp.add_argument("k")
    sp.add_argument("--observable", type=_ids, required=True)
    sp = add("oracle-eq", cmd_oracle_eq, "bounded language comparison by enumeration")
    sp.add_argument("left")
    sp.add_argument("right", nargs="+", help="one generator, or several compared jointly")
    sp.add_argument("--maxlen", type=int, required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                    help="maximum number of strings to enumerate per language")
    sp = add("event-report", cmd_event_report, "state and event counts against RSUP")
    sp.add_argument("plant")
    sp.add_argument("rsup")
    sp.add_argument("locs", nargs="+")
    sp.add_argument("--out")
    sp.add_argument("--figure")
    sp = add("fixture", cmd_fixture, "write the transfer-line model files")
    sp.add_argument("outdir")
    return p


def run_command(argv: Sequence[str]) -> CommandResult:
    try:
        args = build_parser().parse_args(list(argv))
    except _UsageError as exc:
        return CommandResult(EXIT_USAGE, str(exc) + "\n")
    except SystemExit as exc:  # --help
        return CommandResult(EXIT_OK if not exc.code else EXIT_USAGE)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        return CommandResult(EXIT_RESOURCE, f"error: {exc}\n")
    except ConfigurationError as exc:
        return CommandResult(EXIT_USAGE, f"error: {exc}\n")
    except (DESError, ValueError) as exc:
        return CommandResult(EXIT_INPUT, f"error: {exc}\n")


def main(argv: Sequence[str] | None = None) -> int:
    res = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if res.exit_code in (EXIT_OK, EXIT_NEGATIVE) else sys.stderr
    stream.write(res.stdout_report)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
