"""Line-oriented optical-table description language.

One statement per line, ``#`` starts a comment, blank lines are ignored,
LF and CRLF both accepted::

    sites <id>...            declare spatial modes (order preserved)
    oam <int>...             declare OAM values (must contain 0)
    source <site> <H|V>      heralded single-photon source
    hwp <site> <deg>         half-wave plate at fast-axis angle
    qwp <site> <deg>         quarter-wave plate
    pbs <site> -> <siteH> <siteV>   polarizing beam splitter
    bs <site> <site>         50/50 beam splitter
    qplate <site> q=<int>    polarization-OAM coupler (needs an oam line)
    phase <site> <deg>       phase shifter

Angles are degrees in the surface syntax. Sites must be declared before use.
``parse_circuit`` never raises anything but ``CircuitSyntaxError`` (or a
subclass), each carrying the offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import elements
from .core import DEFAULT_OAM, BasisDecl, StateVector
from .errors import (
    ArityError,
    CircuitSyntaxError,
    OamRangeError,
    PhysicsError,
    UndeclaredSite,
    UnknownElement,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT = re.compile(r"[+-]?\d+\Z")

ELEMENT_KINDS = ("source", "hwp", "qwp", "pbs", "bs", "qplate", "phase")


@dataclass(frozen=True)
class ElementSpec:
    """One optical element application with its operand sites and parameters."""

    kind: str
    operands: tuple[str, ...]
    angle: float | None = None
    q: int | None = None
    pol: str | None = None


@dataclass(frozen=True)
class Circuit:
    """Ordered declarations plus elements in optical propagation order."""

    sites: tuple[str, ...]
    oam: tuple[int, ...]
    elements: tuple[ElementSpec, ...]

    @property
    def declaration(self) -> BasisDecl:
        return BasisDecl(self.sites, self.oam)


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        self.tokens: list[str] = []
        self.columns: list[int] = []
        code = text.split("#", 1)[0]
        for match in re.finditer(r"\S+", code):
            self.tokens.append(match.group())
            self.columns.append(match.start() + 1)

    def column(self, token_index: int) -> int:
        if token_index < len(self.columns):
            return self.columns[token_index]
        return (self.columns[-1] + len(self.tokens[-1])) if self.columns else 1


def _arity(line: _Line, n: int, usage: str) -> None:
    if len(line.tokens) - 1 != n:
        raise ArityError(
            f"{line.tokens[0]!r} takes {n} operand(s), got {len(line.tokens) - 1}",
            line.number,
            line.column(min(n + 1, len(line.tokens))),
            expected=usage,
        )


def _site(line: _Line, idx: int, declared: list[str]) -> str:
    token = line.tokens[idx]
    if not _IDENT.match(token):
        raise CircuitSyntaxError(
            f"invalid site identifier {token!r}", line.number, line.column(idx),
            expected="identifier",
        )
    if token not in declared:
        raise UndeclaredSite(f"site {token!r} not declared", line.number, line.column(idx))
    return token


def _angle(line: _Line, idx: int) -> float:
    token = line.tokens[idx]
    try:
        return float(token)
    except ValueError:
        raise CircuitSyntaxError(
            f"invalid angle {token!r}", line.number, line.column(idx), expected="number in degrees"
        ) from None


def parse_circuit(text: str | bytes) -> Circuit:
    """Parse circuit text into a validated :class:`Circuit`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")

    sites: list[str] = []
    oam: tuple[int, ...] | None = None
    parsed: list[ElementSpec] = []

    for number, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        line = _Line(number, raw)
        if not line.tokens:
            continue
        head = line.tokens[0]

        if head == "sites":
            for idx, token in enumerate(line.tokens[1:], start=1):
                if not _IDENT.match(token):
                    raise CircuitSyntaxError(
                        f"invalid site identifier {token!r}", number, line.column(idx),
                        expected="identifier",
                    )
                if token in sites:
                    raise CircuitSyntaxError(
                        f"duplicate site {token!r}", number, line.column(idx),
                        expected="unique site identifier",
                    )
                sites.append(token)

        elif head == "oam":
            if len(line.tokens) == 1:
                raise ArityError("oam declaration needs at least one value", number,
                                 line.column(1), expected="oam <int>...")
            values = []
            for idx, token in enumerate(line.tokens[1:], start=1):
                if not _INT.match(token):
                    raise CircuitSyntaxError(
                        f"invalid OAM value {token!r}", number, line.column(idx),
                        expected="integer",
                    )
                values.append(int(token))
            if len(set(values)) != len(values):
                raise OamRangeError("duplicate OAM value", number, line.column(1))
            if 0 not in values:
                raise OamRangeError("OAM set must contain 0 (sources emit oam=0)",
                                    number, line.column(1))
            oam = tuple(sorted(values))

        elif head == "source":
            _arity(line, 2, "source <site> <H|V>")
            site = _site(line, 1, sites)
            pol = line.tokens[2]
            if pol not in ("H", "V"):
                raise CircuitSyntaxError(f"invalid polarization {pol!r}", number,
                                         line.column(2), expected="H or V")
            parsed.append(ElementSpec("source", (site,), pol=pol))

        elif head in ("hwp", "qwp", "phase"):
            _arity(line, 2, f"{head} <site> <deg>")
            site = _site(line, 1, sites)
            parsed.append(ElementSpec(head, (site,), angle=_angle(line, 2)))

        elif head == "pbs":
            _arity(line, 4, "pbs <site> -> <siteH> <siteV>")
            if line.tokens[2] != "->":
                raise CircuitSyntaxError(f"expected '->', got {line.tokens[2]!r}", number,
                                         line.column(2), expected="->")
            src = _site(line, 1, sites)
            out_h = _site(line, 3, sites)
            out_v = _site(line, 4, sites)
            if out_h == out_v:
                raise ArityError("PBS outputs must be distinct sites", number, line.column(4),
                                 expected="two distinct sites")
            parsed.append(ElementSpec("pbs", (src, out_h, out_v)))

        elif head == "bs":
            _arity(line, 2, "bs <site> <site>")
            s1 = _site(line, 1, sites)
            s2 = _site(line, 2, sites)
            if s1 == s2:
                raise ArityError("beam splitter needs two distinct sites", number,
                                 line.column(2), expected="two distinct sites")
            parsed.append(ElementSpec("bs", (s1, s2)))

        elif head == "qplate":
            _arity(line, 2, "qplate <site> q=<int>")
            site = _site(line, 1, sites)
            token = line.tokens[2]
            if not token.startswith("q=") or not _INT.match(token[2:]):
                raise CircuitSyntaxError(f"invalid q-plate charge {token!r}", number,
                                         line.column(2), expected="q=<int>")
            if oam is None:
                raise OamRangeError(
                    "qplate needs an explicit oam declaration (default set {0} "
                    "cannot hold shifted values)", number, line.column(0))
            parsed.append(ElementSpec("qplate", (site,), q=int(token[2:])))

        else:
            raise UnknownElement(f"unknown statement {head!r}", number, line.column(0),
                                 expected="one of: sites, oam, " + ", ".join(ELEMENT_KINDS))

    return Circuit(tuple(sites), oam if oam is not None else DEFAULT_OAM, tuple(parsed))


def format_circuit(circuit: Circuit) -> str:
    """Canonical text form; ``parse_circuit(format_circuit(c))`` equals ``c``."""
    lines = ["sites" + ("" if not circuit.sites else " " + " ".join(circuit.sites))]
    if circuit.oam != DEFAULT_OAM:
        lines.append("oam " + " ".join(str(m) for m in circuit.oam))
    for el in circuit.elements:
        if el.kind == "source":
            lines.append(f"source {el.operands[0]} {el.pol}")
        elif el.kind in ("hwp", "qwp", "phase"):
            lines.append(f"{el.kind} {el.operands[0]} {el.angle!r}")
        elif el.kind == "pbs":
            src, out_h, out_v = el.operands
            lines.append(f"pbs {src} -> {out_h} {out_v}")
        elif el.kind == "bs":
            lines.append(f"bs {el.operands[0]} {el.operands[1]}")
        elif el.kind == "qplate":
            lines.append(f"qplate {el.operands[0]} q={el.q}")
        else:
            raise ValueError(f"unknown element kind {el.kind!r}")
    return "\n".join(lines) + "\n"


def run_circuit(circuit: Circuit) -> StateVector:
    """Fold the element actions over the vacuum of the declared basis."""
    state = StateVector.vacuum(circuit.declaration)
    for index, el in enumerate(circuit.elements):
        try:
            if el.kind == "source":
                state = elements.apply_source(state, el.operands[0], el.pol)
            elif el.kind in ("hwp", "qwp"):
                state = elements.waveplate(state, el.operands[0], el.kind, el.angle)
            elif el.kind == "pbs":
                state = elements.pbs_route(state, *el.operands)
            elif el.kind == "bs":
                state = elements.beamsplitter_5050(state, *el.operands)
            elif el.kind == "qplate":
                state = elements.qplate(state, el.operands[0], el.q)
            elif el.kind == "phase":
                state = elements.phase_shift(state, el.operands[0], el.angle)
            else:
                raise ValueError(f"unknown element kind {el.kind!r}")
        except PhysicsError as exc:
            raise type(exc)(f"element {index} ({el.kind}): {exc}") from exc
    return state
