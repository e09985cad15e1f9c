"""Reader and writer for the subset of the MATPOWER case format used here.

Supported: ``mpc.baseMVA`` and the ``bus``, ``gen``, ``branch`` and
``gencost`` matrices, ``%`` comments, rows ended by ``;`` or a newline.
Everything is converted to per unit on read: demands and generator limits
are divided by the base, line ratings likewise, and linear cost
coefficients are multiplied by it so that cost stays in $/h.
"""

from __future__ import annotations

import math
import re
from importlib import resources
from pathlib import Path

from .dcopf import Bus, Generator, Line, Network, NetworkError


class CaseParseError(ValueError):
    """Base class for malformed or unsupported case files."""


class MissingBlock(CaseParseError):
    pass


class MalformedRow(CaseParseError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MultipleSlack(CaseParseError):
    pass


class MissingSlack(CaseParseError):
    pass


class QuadraticCostUnsupported(CaseParseError):
    pass


class UnsupportedCostModel(CaseParseError):
    pass


class DisconnectedNetwork(CaseParseError):
    pass


class CaseUnreadable(CaseParseError):
    pass


# column indices (0-based) of the MATPOWER matrices
BUS_I, BUS_TYPE, PD = 0, 1, 2
GEN_BUS, GEN_STATUS, PMAX, PMIN = 0, 7, 8, 9
F_BUS, T_BUS, BR_X, RATE_A, TAP, BR_STATUS = 0, 1, 3, 5, 8, 10
MODEL, NCOST, COST = 0, 3, 4
REF = 3

_MIN_COLS = {"bus": 3, "gen": 10, "branch": 6, "gencost": 5}
_BLOCK = re.compile(r"mpc\.(\w+)\s*=\s*\[")
_SCALAR = re.compile(r"mpc\.baseMVA\s*=\s*([^;\s]+)\s*;")


def _strip_comments(text: str) -> list:
    return [line.split("%", 1)[0] for line in text.splitlines()]


def _read_blocks(lines: list) -> dict:
    """name -> list of (line number, row values)."""
    blocks = {}
    name, rows = None, None
    for lineno, line in enumerate(lines, start=1):
        rest = line
        if name is None:
            m = _BLOCK.search(rest)
            if not m:
                continue
            name, rows = m.group(1), []
            rest = rest[m.end():]
        done = "]" in rest
        if done:
            rest = rest.split("]", 1)[0]
        for chunk in rest.split(";"):
            tokens = chunk.replace(",", " ").split()
            if not tokens:
                continue
            try:
                rows.append((lineno, [float(t) for t in tokens]))
            except ValueError:
                raise MalformedRow(lineno, f"non-numeric entry in mpc.{name}") from None
        if done:
            blocks[name] = rows
            name = None
    if name is not None:
        raise MalformedRow(len(lines), f"mpc.{name} is not closed with ']'")
    return blocks


def _base_mva(lines: list) -> float:
    for lineno, line in enumerate(lines, start=1):
        m = _SCALAR.search(line)
        if m:
            try:
                value = float(m.group(1))
            except ValueError:
                raise MalformedRow(lineno, "baseMVA is not a number") from None
            if not value > 0:
                raise MalformedRow(lineno, "baseMVA must be positive")
            return value
    raise MissingBlock("mpc.baseMVA not found")


def _check_width(name, rows):
    for lineno, row in rows:
        if len(row) < _MIN_COLS[name]:
            raise MalformedRow(lineno, f"mpc.{name} row has {len(row)} columns, "
                                       f"need at least {_MIN_COLS[name]}")


def parse_matpower(text: str) -> Network:
    """Parse case text into a per-unit :class:`Network`."""
    lines = _strip_comments(text)
    base = _base_mva(lines)
    blocks = _read_blocks(lines)
    for name in ("bus", "gen", "branch", "gencost"):
        if name not in blocks:
            raise MissingBlock(f"mpc.{name} not found")
        _check_width(name, blocks[name])

    buses, slack_rows = [], []
    for lineno, row in blocks["bus"]:
        is_ref = int(row[BUS_TYPE]) == REF
        if is_ref:
            slack_rows.append(lineno)
        buses.append(Bus(int(row[BUS_I]), row[PD] / base, is_ref))
    if len(slack_rows) > 1:
        raise MultipleSlack(f"reference buses on lines {slack_rows}")
    if not slack_rows:
        raise MissingSlack("no bus of type 3")

    gen_rows = blocks["gen"]
    cost_rows = blocks["gencost"]
    if len(cost_rows) < len(gen_rows):
        raise MalformedRow(cost_rows[-1][0] if cost_rows else 0,
                           f"{len(gen_rows)} generators but {len(cost_rows)} gencost rows")
    generators = []
    for (lineno, g), (cline, cost) in zip(gen_rows, cost_rows):
        c1, c0 = _linear_cost(cline, cost)
        if g[GEN_STATUS] <= 0:
            continue
        generators.append(Generator(int(g[GEN_BUS]), c1 * base, g[PMIN] / base, g[PMAX] / base, c0))

    lines_out = []
    for lineno, br in blocks["branch"]:
        if len(br) > BR_STATUS and br[BR_STATUS] <= 0:
            continue
        x = br[BR_X]
        tap = br[TAP] if len(br) > TAP and br[TAP] != 0 else 1.0
        if x == 0:
            raise MalformedRow(lineno, "branch reactance is zero")
        rate = br[RATE_A]
        limit = math.inf if rate == 0 else rate / base
        lines_out.append(Line(int(br[F_BUS]), int(br[T_BUS]), 1.0 / (x * tap), limit))

    try:
        network = Network(base, buses, generators, lines_out)
    except NetworkError as exc:
        if "single island" in str(exc):
            raise DisconnectedNetwork(str(exc)) from None
        raise CaseParseError(str(exc)) from None
    return network


def _linear_cost(lineno: int, row: list) -> tuple:
    """(c1, c0) in MATPOWER units from a polynomial gencost row."""
    if int(row[MODEL]) != 2:
        raise UnsupportedCostModel(f"line {lineno}: only polynomial cost (model 2) is supported")
    n = int(row[NCOST])
    coeffs = row[COST:COST + n]
    if n < 1 or len(coeffs) < n:
        raise MalformedRow(lineno, f"gencost declares {n} coefficients, found {len(coeffs)}")
    # highest order first: c_{n-1} ... c1 c0
    if any(c != 0 for c in coeffs[:-2]):
        raise QuadraticCostUnsupported(f"line {lineno}: nonlinear cost term {coeffs[:-2]}")
    c0 = coeffs[-1]
    c1 = coeffs[-2] if n >= 2 else 0.0
    return c1, c0


def read_case(path) -> Network:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CaseUnreadable(f"{path}: {exc.strerror or exc}") from None
    return parse_matpower(text)


def bundled_case_path(name: str):
    """Traversable for a case shipped with the package, e.g. ``tri-3bus``."""
    return resources.files("dp_bilevel").joinpath("cases").joinpath(f"{name}.m")


def bundled_cases() -> list:
    folder = resources.files("dp_bilevel").joinpath("cases")
    return sorted(p.name[:-2] for p in folder.iterdir() if p.name.endswith(".m"))


def load_case(name: str) -> Network:
    """A bundled case name or a path to a ``.m`` file."""
    if name in bundled_cases():
        return parse_matpower(bundled_case_path(name).read_text())
    return read_case(name)


def _fmt(v: float) -> str:
    return repr(float(v))


def emit_matpower(network: Network, name: str = "case") -> str:
    """Case text that :func:`parse_matpower` reads back into ``network``."""
    base = network.base_mva
    gen_buses = {g.bus for g in network.generators}
    out = [f"function mpc = {name}", "mpc.version = '2';", f"mpc.baseMVA = {_fmt(base)};", "",
           "%% bus data", "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin",
           "mpc.bus = ["]
    for b in network.buses:
        kind = REF if b.slack else (2 if b.id in gen_buses else 1)
        out.append(f"\t{b.id}\t{kind}\t{_fmt(b.demand * base)}\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;")
    out += ["];", "", "%% generator data",
            "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin", "mpc.gen = ["]
    for g in network.generators:
        out.append(f"\t{g.bus}\t0\t0\t0\t0\t1\t{_fmt(base)}\t1\t{_fmt(g.p_max * base)}\t"
                   f"{_fmt(g.p_min * base)};")
    out += ["];", "", "%% branch data",
            "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax",
            "mpc.branch = ["]
    for ln in network.lines:
        rate = 0.0 if math.isinf(ln.flow_limit) else ln.flow_limit * base
        out.append(f"\t{ln.from_bus}\t{ln.to_bus}\t0\t{_fmt(1.0 / ln.susceptance)}\t0\t{_fmt(rate)}"
                   f"\t0\t0\t0\t0\t1\t-360\t360;")
    out += ["];", "", "%% generator cost data (polynomial, linear)",
            "%\tmodel\tstartup\tshutdown\tn\tc1\tc0", "mpc.gencost = ["]
    for g in network.generators:
        out.append(f"\t2\t0\t0\t2\t{_fmt(g.cost_c1 / base)}\t{_fmt(g.cost_c0)};")
    out += ["];", ""]
    return "\n".join(out)
