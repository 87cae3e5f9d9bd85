"""Line-oriented text format for generators.

::

    GEN <name>
    STATES <n>
    INIT <state>
    MARKED <state> ...
    EVENTS <event> ...
    CONTROLLABLE <event> ...   (optional, default: odd ids)
    TRANS
    <src> <event> <dst>
    END

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .automata import Generator, default_controllable
from .errors import InputError, NondeterminismError

_HEADERS = ("GEN", "STATES", "INIT", "MARKED", "EVENTS", "CONTROLLABLE")


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        out = [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"line {lineno}: expected integers, got {' '.join(tokens)!r}") from None
    if any(v < 0 for v in out):
        raise InputError(f"line {lineno}: ids must be non-negative")
    return out


def parse_generator(text: str) -> Generator:
    fields: dict[str, list[str]] = {}
    trans: list[tuple[int, int, int, int]] = []
    in_trans = False
    ended = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ended:
            raise InputError(f"line {lineno}: content after END")
        key, *rest = line.split()
        if in_trans:
            if key == "END":
                ended = True
                continue
            vals = _ints(line.split(), lineno)
            if len(vals) != 3:
                raise InputError(f"line {lineno}: transition needs 'src event dst'")
            trans.append((lineno, *vals))
            continue
        if key == "TRANS":
            in_trans = True
        elif key == "END":
            ended = True
        elif key in _HEADERS:
            if key in fields:
                raise InputError(f"line {lineno}: duplicate {key} line")
            fields[key] = rest
        else:
            raise InputError(f"line {lineno}: unknown keyword {key!r}")

    if "STATES" not in fields:
        raise InputError("missing STATES line")
    name = " ".join(fields.get("GEN", [])) or "G"
    counts = _ints(fields["STATES"], 0)
    if len(counts) != 1:
        raise InputError("STATES needs exactly one count")
    n = counts[0]
    init_vals = _ints(fields.get("INIT", ["0"]), 0)
    initial = init_vals[0] if init_vals else 0
    if n and not initial < n:
        raise InputError(f"initial state {initial} out of range")
    marked = _ints(fields.get("MARKED", []), 0)
    for m in marked:
        if m >= n:
            raise InputError(f"marked state {m} out of range")
    events = frozenset(_ints(fields.get("EVENTS", []), 0))
    if "CONTROLLABLE" in fields:
        ctrl = frozenset(_ints(fields["CONTROLLABLE"], 0))
        if not ctrl <= events:
            raise InputError(f"controllable events {sorted(ctrl - events)} not in EVENTS")
    else:
        ctrl = default_controllable(events)

    table: dict[tuple[int, int], int] = {}
    for lineno, src, ev, dst in trans:
        if src >= n or dst >= n:
            raise InputError(f"line {lineno}: state out of range")
        if ev not in events:
            raise InputError(f"line {lineno}: unknown event {ev}")
        if (src, ev) in table:
            raise NondeterminismError(f"line {lineno}: second transition for state {src}, event {ev}")
        table[(src, ev)] = dst
    return Generator(name, n, initial, frozenset(marked), events, ctrl, table)


def emit_generator(g: Generator) -> str:
    def ids(xs) -> str:
        return "".join(f" {x}" for x in sorted(xs))

    lines = [
        f"GEN {g.name}",
        f"STATES {g.state_count}",
        f"INIT {g.initial}",
        f"MARKED{ids(g.marked)}",
        f"EVENTS{ids(g.events)}",
        f"CONTROLLABLE{ids(g.controllable)}",
        "TRANS",
        *(f"{s} {e} {d}" for s, e, d in g.triples()),
        "END",
    ]
    return "\n".join(lines) + "\n"


def read_generator(path: str | os.PathLike) -> Generator:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_generator(text)


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        # mkstemp creates 0600 files; give the result the usual umask-based mode
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_generator(path: str | os.PathLike, g: Generator) -> None:
    write_text_atomic(path, emit_generator(g))
