"""SPICE-like netlist parsing, serialization and DC topology checks.

Grammar (a strict subset of classic SPICE decks)::

    * comment                      (a comment on the very first line is the title)
    R<name> n1 n2 <value>
    C<name> n1 n2 <value>
    L<name> n1 n2 <value>
    V<name> n+ n- [DC] [<value>] [AC <mag>]
    I<name> n+ n- [DC] [<value>] [AC <mag>]
    G<name> n+ n- nc+ nc- <gm>
    J<name> drain gate source <model>
    + continuation of the previous line
    .model <name> STATZ beta=<v> vto=<v> [lambda=<v>] [alpha=<v>] cin=<v> rin=<v>
    .op
    .dc <source> <start> <stop> <step>
    .ac dec <points> <fstart> <fstop>
    .probe [in|out] V(<node>) I(<element>) P(<element>) ...
    .end

Element names, model names and numeric suffixes are case-insensitive.
Node names are kept as written except that they are lower-cased.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable

from cryoamp.device import StatzParams

GROUND = "0"

_SUFFIXES = {
    "meg": 1e6,
    "t": 1e12,
    "g": 1e9,
    "k": 1e3,
    "m": 1e-3,
    "u": 1e-6,
    "n": 1e-9,
    "p": 1e-12,
    "f": 1e-15,
}
_NUMBER_RE = re.compile(
    r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:e[+-]?\d+)?)(meg|[tgkmunpf])?[a-z]*$", re.IGNORECASE
)
_PROBE_RE = re.compile(r"^([vip])\(([^()\s]+)\)$", re.IGNORECASE)


class NetlistError(ValueError):
    """Raised for malformed netlists; carries the 1-based line and column."""

    def __init__(self, reason: str, line: int = 0, column: int = 0):
        self.reason = reason
        self.line = line
        self.column = column
        where = f"line {line}, col {column}: " if line else ""
        super().__init__(where + reason)


class ElementKind(enum.Enum):
    RESISTOR = "R"
    CAPACITOR = "C"
    INDUCTOR = "L"
    VSOURCE = "V"
    ISOURCE = "I"
    VCCS = "G"
    FET = "J"


_N_TERMINALS = {
    ElementKind.RESISTOR: 2,
    ElementKind.CAPACITOR: 2,
    ElementKind.INDUCTOR: 2,
    ElementKind.VSOURCE: 2,
    ElementKind.ISOURCE: 2,
    ElementKind.VCCS: 4,
    ElementKind.FET: 3,
}
_PASSIVE = (ElementKind.RESISTOR, ElementKind.CAPACITOR, ElementKind.INDUCTOR)


@dataclass(frozen=True)
class Element:
    name: str
    kind: ElementKind
    nodes: tuple[str, ...]
    value: float | None = None
    ac: float | None = None
    model: str | None = None


class AnalysisKind(enum.Enum):
    OP = "op"
    DC_SWEEP = "dc"
    AC_SWEEP = "ac"


@dataclass(frozen=True)
class Probe:
    target: str
    quantity: str  # "V", "I" or "P"
    port: str | None = None  # "in", "out" or None


@dataclass(frozen=True)
class AnalysisDirective:
    kind: AnalysisKind
    source: str | None = None
    start: float | None = None
    stop: float | None = None
    step: float | None = None
    points_per_decade: int | None = None
    f_start: float | None = None
    f_stop: float | None = None
    probes: tuple[Probe, ...] = ()


@dataclass(frozen=True)
class Netlist:
    title: str
    nodes: frozenset[str]
    elements: tuple[Element, ...]
    models: dict[str, StatzParams] = field(default_factory=dict)
    analyses: tuple[AnalysisDirective, ...] = ()
    probes: tuple[Probe, ...] = ()

    def element(self, name: str) -> Element:
        key = name.upper()
        for el in self.elements:
            if el.name == key:
                return el
        raise KeyError(name)

    def has_element(self, name: str) -> bool:
        key = name.upper()
        return any(el.name == key for el in self.elements)

    def of_kind(self, kind: ElementKind) -> list[Element]:
        return [el for el in self.elements if el.kind is kind]

    def port(self, label: str) -> tuple[str, str] | None:
        """(node, element) of a designated ``in``/``out`` port, if declared."""
        node = elem = None
        for p in self.probes:
            if p.port == label and p.quantity == "V":
                node = p.target
            elif p.port == label and p.quantity == "I":
                elem = p.target
        if node is None or elem is None:
            return None
        return node, elem

    def with_value(self, name: str, value: float) -> "Netlist":
        """Copy with one element's value replaced."""
        el = self.element(name)
        if el.kind in _PASSIVE and not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{el.name}: passive value must be positive and finite")
        elements = tuple(replace(e, value=float(value)) if e is el else e for e in self.elements)
        return replace(self, elements=elements)

    def to_text(self) -> str:
        return serialize(self)


def parse_value(token: str) -> float:
    """Parse a number with optional SPICE suffix: ``3.3p``, ``1MEG``, ``2e-9``, ``10kohm``."""
    m = _NUMBER_RE.match(token.strip())
    if not m:
        raise ValueError(f"not a number: {token!r}")
    value = float(m.group(1))
    if m.group(2):
        value *= _SUFFIXES[m.group(2).lower()]
    return value


def _logical_lines(text: str) -> list[tuple[int, str]]:
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("+"):
            if not lines:
                raise NetlistError("continuation line with nothing to continue", lineno, 1)
            prev_no, prev = lines[-1]
            lines[-1] = (prev_no, prev + " " + stripped[1:])
            continue
        lines.append((lineno, raw))
    return lines


def _tokens(line: str) -> list[tuple[str, int]]:
    """Split on whitespace keeping 1-based columns; ``=`` is treated as a separator."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"[^\s=]+", line)]


def parse(source_text: str) -> Netlist:
    """Parse netlist text into an immutable :class:`Netlist`."""
    title = ""
    elements: list[Element] = []
    models: dict[str, StatzParams] = {}
    raw_analyses: list[tuple[int, int, AnalysisDirective]] = []
    probes: list[tuple[int, int, Probe]] = []
    seen: dict[str, int] = {}
    model_refs: list[tuple[int, int, str]] = []

    lines = _logical_lines(source_text)
    for idx, (lineno, line) in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("*"):
            if idx == 0:
                title = stripped[1:].strip()
            continue
        toks = _tokens(line)
        head, col = toks[0]
        if head.startswith("."):
            directive = head.lower()
            if directive == ".end":
                break
            if directive == ".model":
                name, params = _parse_model(toks, lineno)
                if name in models:
                    raise NetlistError(f"duplicate model {name}", lineno, col)
                models[name] = params
            elif directive == ".op":
                raw_analyses.append((lineno, col, AnalysisDirective(AnalysisKind.OP)))
            elif directive == ".dc":
                raw_analyses.append((lineno, col, _parse_dc(toks, lineno)))
            elif directive == ".ac":
                raw_analyses.append((lineno, col, _parse_ac(toks, lineno)))
            elif directive == ".probe":
                probes.extend(_parse_probe(toks, lineno))
            else:
                raise NetlistError(f"unsupported directive {head}", lineno, col)
            continue

        el = _parse_element(toks, lineno)
        if el.name in seen:
            raise NetlistError(
                f"duplicate element name {el.name} (first on line {seen[el.name]})", lineno, col
            )
        seen[el.name] = lineno
        if el.kind is ElementKind.FET:
            model_refs.append((lineno, toks[4][1], el.model))
        elements.append(el)

    for lineno, col, model in model_refs:
        if model not in models:
            raise NetlistError(f"undeclared model {model}", lineno, col)

    nodes = frozenset(n for el in elements for n in el.nodes)
    if GROUND not in nodes:
        last = lines[-1][0] if lines else 1
        raise NetlistError("no element references ground node 0", last, 1)

    names = {el.name: el for el in elements}
    for lineno, col, p in probes:
        if p.quantity == "V" and p.target not in nodes:
            raise NetlistError(f"probe references undeclared node {p.target}", lineno, col)
        if p.quantity in ("I", "P") and p.target not in names:
            raise NetlistError(f"probe references unknown element {p.target}", lineno, col)
    probe_tuple = tuple(p for _, _, p in probes)

    analyses = []
    for lineno, col, a in raw_analyses:
        if a.kind is AnalysisKind.DC_SWEEP:
            src = names.get(a.source)
            if src is None or src.kind not in (ElementKind.VSOURCE, ElementKind.ISOURCE):
                raise NetlistError(f"sweep source {a.source} is not a declared source", lineno, col)
        analyses.append(_replace_probes(a, probe_tuple))

    return Netlist(
        title=title,
        nodes=nodes,
        elements=tuple(elements),
        models=models,
        analyses=tuple(analyses),
        probes=probe_tuple,
    )


def _replace_probes(a: AnalysisDirective, probes: tuple[Probe, ...]) -> AnalysisDirective:
    return replace(a, probes=probes)


def _number(tok: tuple[str, int], lineno: int, what: str) -> float:
    try:
        return parse_value(tok[0])
    except ValueError:
        raise NetlistError(f"bad {what} {tok[0]!r}", lineno, tok[1]) from None


def _parse_element(toks: list[tuple[str, int]], lineno: int) -> Element:
    name = toks[0][0].upper()
    try:
        kind = ElementKind(name[0])
    except ValueError:
        raise NetlistError(f"unknown element kind {name[0]!r}", lineno, toks[0][1]) from None
    nterm = _N_TERMINALS[kind]
    if len(toks) < nterm + 1:
        raise NetlistError(f"{name}: expected {nterm} nodes", lineno, toks[-1][1])
    nodes = tuple(t[0].lower() for t in toks[1 : nterm + 1])
    rest = toks[nterm + 1 :]

    if kind is ElementKind.FET:
        if len(rest) != 1:
            col = rest[1][1] if len(rest) > 1 else toks[-1][1]
            raise NetlistError(f"{name}: expected a single model name", lineno, col)
        if nodes[0] == nodes[1]:
            raise NetlistError(f"{name}: drain and gate on the same node", lineno, toks[1][1])
        return Element(name, kind, nodes, model=rest[0][0].upper())

    if kind in (ElementKind.VSOURCE, ElementKind.ISOURCE):
        value, ac = 0.0, None
        i = 0
        while i < len(rest):
            word = rest[i][0].lower()
            if word == "dc":
                if i + 1 >= len(rest):
                    raise NetlistError(f"{name}: DC needs a value", lineno, rest[i][1])
                value = _number(rest[i + 1], lineno, "DC value")
                i += 2
            elif word == "ac":
                if i + 1 >= len(rest):
                    raise NetlistError(f"{name}: AC needs a magnitude", lineno, rest[i][1])
                ac = _number(rest[i + 1], lineno, "AC magnitude")
                i += 2
            else:
                value = _number(rest[i], lineno, "source value")
                i += 1
        if not math.isfinite(value) or (ac is not None and not math.isfinite(ac)):
            raise NetlistError(f"{name}: non-finite source value", lineno, toks[0][1])
        return Element(name, kind, nodes, value=value, ac=ac)

    if len(rest) != 1:
        col = rest[1][1] if len(rest) > 1 else toks[-1][1]
        raise NetlistError(f"{name}: expected exactly one value", lineno, col)
    value = _number(rest[0], lineno, "value")
    if kind is not ElementKind.VCCS and not (value > 0 and math.isfinite(value)):
        raise NetlistError(f"{name}: value must be positive and finite", lineno, rest[0][1])
    if kind is ElementKind.VCCS and not math.isfinite(value):
        raise NetlistError(f"{name}: transconductance must be finite", lineno, rest[0][1])
    return Element(name, kind, nodes, value=value)


_MODEL_KEYS = {"beta": "beta", "vto": "u_t", "lambda": "lam", "alpha": "alpha", "cin": "c_in", "rin": "r_in"}


def _parse_model(toks: list[tuple[str, int]], lineno: int) -> tuple[str, StatzParams]:
    if len(toks) < 3:
        raise NetlistError(".model needs a name and a type", lineno, toks[0][1])
    name = toks[1][0].upper()
    if toks[2][0].upper() != "STATZ":
        raise NetlistError(f"unsupported model type {toks[2][0]}", lineno, toks[2][1])
    pairs = toks[3:]
    if len(pairs) % 2:
        raise NetlistError("model parameters must be key=value pairs", lineno, pairs[-1][1])
    kw: dict[str, float] = {}
    for (key, kcol), val in zip(pairs[::2], pairs[1::2]):
        attr = _MODEL_KEYS.get(key.lower())
        if attr is None:
            raise NetlistError(f"unknown model parameter {key}", lineno, kcol)
        kw[attr] = _number(val, lineno, key)
    for required in ("beta", "vto", "cin", "rin"):
        if _MODEL_KEYS[required] not in kw:
            raise NetlistError(f"model {name} is missing {required}", lineno, toks[1][1])
    try:
        return name, StatzParams(**kw)
    except ValueError as exc:
        raise NetlistError(f"model {name}: {exc}", lineno, toks[1][1]) from None


def _parse_dc(toks: list[tuple[str, int]], lineno: int) -> AnalysisDirective:
    if len(toks) != 5:
        raise NetlistError(".dc expects <source> <start> <stop> <step>", lineno, toks[0][1])
    start, stop, step = (_number(t, lineno, ".dc value") for t in toks[2:])
    if not step > 0:
        raise NetlistError(".dc step must be positive", lineno, toks[4][1])
    return AnalysisDirective(
        AnalysisKind.DC_SWEEP, source=toks[1][0].upper(), start=start, stop=stop, step=step
    )


def _parse_ac(toks: list[tuple[str, int]], lineno: int) -> AnalysisDirective:
    if len(toks) != 5 or toks[1][0].lower() != "dec":
        raise NetlistError(".ac expects dec <points> <fstart> <fstop>", lineno, toks[0][1])
    points = _number(toks[2], lineno, "points per decade")
    if points < 1 or points != int(points):
        raise NetlistError("points per decade must be a positive integer", lineno, toks[2][1])
    f_start = _number(toks[3], lineno, "start frequency")
    f_stop = _number(toks[4], lineno, "stop frequency")
    if not 0 < f_start < f_stop:
        raise NetlistError("need 0 < fstart < fstop", lineno, toks[3][1])
    return AnalysisDirective(
        AnalysisKind.AC_SWEEP, points_per_decade=int(points), f_start=f_start, f_stop=f_stop
    )


def _parse_probe(toks: list[tuple[str, int]], lineno: int) -> list[tuple[int, int, Probe]]:
    items = toks[1:]
    port = None
    if items and items[0][0].lower() in ("in", "out"):
        port = items[0][0].lower()
        items = items[1:]
    if not items:
        raise NetlistError(".probe needs at least one V(), I() or P() item", lineno, toks[0][1])
    out = []
    for tok, col in items:
        m = _PROBE_RE.match(tok)
        if not m:
            raise NetlistError(f"bad probe {tok!r}", lineno, col)
        qty = m.group(1).upper()
        target = m.group(2).lower() if qty == "V" else m.group(2).upper()
        out.append((lineno, col, Probe(target, qty, port)))
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize(netlist: Netlist) -> str:
    """Render a netlist back to text; ``parse(serialize(n)) == n``."""
    out = [f"* {netlist.title}" if netlist.title else "*"]
    for name, p in netlist.models.items():
        out.append(
            f".model {name} STATZ beta={_fmt(p.beta)} vto={_fmt(p.u_t)} lambda={_fmt(p.lam)} "
            f"alpha={_fmt(p.alpha)} cin={_fmt(p.c_in)} rin={_fmt(p.r_in)}"
        )
    for el in netlist.elements:
        parts = [el.name, *el.nodes]
        if el.kind is ElementKind.FET:
            parts.append(el.model)
        elif el.kind in (ElementKind.VSOURCE, ElementKind.ISOURCE):
            parts += ["DC", _fmt(el.value)]
            if el.ac is not None:
                parts += ["AC", _fmt(el.ac)]
        else:
            parts.append(_fmt(el.value))
        out.append(" ".join(parts))
    for a in netlist.analyses:
        if a.kind is AnalysisKind.OP:
            out.append(".op")
        elif a.kind is AnalysisKind.DC_SWEEP:
            out.append(f".dc {a.source} {_fmt(a.start)} {_fmt(a.stop)} {_fmt(a.step)}")
        else:
            out.append(f".ac dec {a.points_per_decade} {_fmt(a.f_start)} {_fmt(a.f_stop)}")
    for p in netlist.probes:
        prefix = f"{p.port} " if p.port else ""
        out.append(f".probe {prefix}{p.quantity}({p.target})")
    out.append(".end")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "floating node", "source loop", "current-source cutset"
    message: str
    nodes: tuple[str, ...] = ()
    elements: tuple[str, ...] = ()


class _DSU:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def validate(netlist: Netlist) -> list[Diagnostic]:
    """DC simulatability checks: floating nodes, voltage-source loops, current-source cutsets.

    Inductors count as zero-volt sources here since they are shorts at DC.
    """
    diags: list[Diagnostic] = []

    shorts = _DSU(netlist.nodes)
    loop: list[Element] = []
    for el in netlist.elements:
        if el.kind in (ElementKind.VSOURCE, ElementKind.INDUCTOR):
            a, b = el.nodes
            if a == b or not shorts.union(a, b):
                loop.append(el)
    for el in loop:
        diags.append(
            Diagnostic(
                "source loop",
                f"{el.name} closes a loop of voltage sources/inductors through nodes {', '.join(el.nodes)}",
                nodes=el.nodes,
                elements=(el.name,),
            )
        )

    conduct = _DSU(netlist.nodes)
    for el in netlist.elements:
        if el.kind in (ElementKind.RESISTOR, ElementKind.VSOURCE, ElementKind.INDUCTOR):
            conduct.union(*el.nodes)
        elif el.kind is ElementKind.FET:
            conduct.union(el.nodes[0], el.nodes[2])
    ground_root = conduct.find(GROUND)
    groups: dict[str, list[str]] = {}
    for n in sorted(netlist.nodes):
        r = conduct.find(n)
        if r != ground_root:
            groups.setdefault(r, []).append(n)
    for members in groups.values():
        mset = set(members)
        feeding = [
            el.name
            for el in netlist.elements
            if el.kind in (ElementKind.ISOURCE, ElementKind.VCCS) and set(el.nodes[:2]) & mset
        ]
        touching = [el.name for el in netlist.elements if set(el.nodes) & mset]
        if feeding:
            diags.append(
                Diagnostic(
                    "current-source cutset",
                    f"nodes {', '.join(members)} are connected to the rest only through "
                    f"current sources {', '.join(feeding)}",
                    nodes=tuple(members),
                    elements=tuple(feeding),
                )
            )
        else:
            diags.append(
                Diagnostic(
                    "floating node",
                    f"no DC path to ground from node(s) {', '.join(members)}",
                    nodes=tuple(members),
                    elements=tuple(touching),
                )
            )
    return diags
