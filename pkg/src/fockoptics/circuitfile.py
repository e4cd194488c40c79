"""Line-based circuit files.

One directive per line, ``#`` starts a comment::

    mode <name>
    source <mode> fermion
    source <mode> probe alpha=<float>
    bs <mode1> <mode2>
    phase <mode> <radians>
    block <mode>
    detect <mode> <label>

The order of ``mode`` lines is the Jordan-Wigner order and therefore part of
the format: reordering them can flip signs of amplitudes (never
probabilities).  Angles accept decimals or multiples of pi such as ``pi/4``,
``-3pi/2`` or ``2*pi/3``.  Probe beta is always +sqrt(1 - alpha**2).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import BeamSplitter, Block, Circuit, Detector, Phase, Source, validate
from .optics import ProbeSpec

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_PI = re.compile(r"^([+-])?(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?))?$")
MAX_PI_DENOMINATOR = 12


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


class CircuitParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass
class CircuitDocument:
    text: str
    circuit: Circuit | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.circuit is not None and not self.diagnostics


def parse_angle(token: str) -> float:
    tok = token.strip().lower()
    m = _PI.match(tok)
    if m:
        sign, coeff, denom = m.groups()
        value = (float(coeff) if coeff else 1.0) * math.pi
        if denom is not None:
            if float(denom) == 0:
                raise ValueError(f"zero denominator in {token!r}")
            value /= float(denom)
        return -value if sign == "-" else value
    value = float(tok)
    if not math.isfinite(value):
        raise ValueError(f"angle {token!r} is not finite")
    return value


def format_angle(phi: float) -> str:
    """Shortest exact spelling: a small fraction of pi when it parses back bit-identically."""
    if phi == 0:
        return "0"
    for den in range(1, MAX_PI_DENOMINATOR + 1):
        k = round(phi * den / math.pi)
        if k == 0:
            continue
        sign = "-" if k < 0 else ""
        num = "" if abs(k) == 1 else str(abs(k))
        text = f"{sign}{num}pi" + ("" if den == 1 else f"/{den}")
        if parse_angle(text) == phi:
            return text
    return repr(float(phi))


def _parse_lines(text: str):
    """Yield (line_number, tokens) for non-blank lines."""
    if text.startswith("\ufeff"):
        text = text[1:]
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield no, body.split()


def parse_document(text: str) -> CircuitDocument:
    diags: list[Diagnostic] = []
    modes: list[str] = []
    elements = []
    lines = []  # source line of each element

    def need(no, toks, n, usage):
        if len(toks) != n:
            diags.append(Diagnostic(no, f"expected '{usage}'"))
            return False
        return True

    def known(no, *names):
        good = True
        for m in names:
            if m not in modes:
                diags.append(Diagnostic(no, f"undeclared mode {m!r}"))
                good = False
        return good

    for no, toks in _parse_lines(text):
        word = toks[0].lower()
        if word == "mode":
            if need(no, toks, 2, "mode <name>"):
                name = toks[1]
                if not _NAME.match(name):
                    diags.append(Diagnostic(no, f"invalid mode name {name!r}"))
                elif name in modes:
                    diags.append(Diagnostic(no, f"duplicate mode {name!r}"))
                else:
                    modes.append(name)
        elif word == "source":
            if len(toks) == 3 and toks[2].lower() == "fermion":
                if known(no, toks[1]):
                    elements.append(Source(toks[1]))
                    lines.append(no)
            elif len(toks) == 4 and toks[2].lower() == "probe":
                key, _, val = toks[3].partition("=")
                if key.lower() != "alpha" or not val:
                    diags.append(Diagnostic(no, "expected 'alpha=<float>' after 'probe'"))
                    continue
                try:
                    alpha = float(val)
                except ValueError:
                    diags.append(Diagnostic(no, f"alpha {val!r} is not a number"))
                    continue
                if not 0 <= alpha <= 1:
                    diags.append(Diagnostic(no, f"alpha {alpha} outside [0, 1]"))
                    continue
                if known(no, toks[1]):
                    elements.append(Source(toks[1], ProbeSpec.from_alpha(alpha)))
                    lines.append(no)
            else:
                diags.append(Diagnostic(no, "expected 'source <mode> fermion' or 'source <mode> probe alpha=<float>'"))
        elif word == "bs":
            if need(no, toks, 3, "bs <mode1> <mode2>") and known(no, toks[1], toks[2]):
                if toks[1] == toks[2]:
                    diags.append(Diagnostic(no, f"beam splitter uses mode {toks[1]!r} twice"))
                else:
                    elements.append(BeamSplitter(toks[1], toks[2]))
                    lines.append(no)
        elif word == "phase":
            if need(no, toks, 3, "phase <mode> <radians>"):
                try:
                    phi = parse_angle(toks[2])
                except ValueError:
                    diags.append(Diagnostic(no, f"bad angle {toks[2]!r}"))
                    continue
                if known(no, toks[1]):
                    elements.append(Phase(toks[1], phi))
                    lines.append(no)
        elif word == "block":
            if need(no, toks, 2, "block <mode>") and known(no, toks[1]):
                elements.append(Block(toks[1]))
                lines.append(no)
        elif word == "detect":
            if need(no, toks, 3, "detect <mode> <label>") and known(no, toks[1]):
                if not _NAME.match(toks[2]):
                    diags.append(Diagnostic(no, f"invalid detector label {toks[2]!r}"))
                else:
                    elements.append(Detector(toks[1], toks[2]))
                    lines.append(no)
        else:
            diags.append(Diagnostic(no, f"unknown directive {toks[0]!r}"))

    circuit = Circuit(tuple(modes), tuple(elements))
    if not diags:
        for problem in validate(circuit):
            m = re.match(r"element (\d+)", problem)
            diags.append(Diagnostic(lines[int(m.group(1))] if m else 0, problem))
    return CircuitDocument(text, None if diags else circuit, diags)


def parse(text: str) -> Circuit:
    """Parse circuit text; raises CircuitParseError listing every problem."""
    doc = parse_document(text)
    if doc.diagnostics:
        raise CircuitParseError(doc.diagnostics)
    return doc.circuit


def load(path: str | Path) -> Circuit:
    return parse(Path(path).read_bytes().decode("utf-8"))


def serialize(circuit: Circuit) -> str:
    out = [f"mode {m}" for m in circuit.modes]
    for el in circuit.elements:
        if isinstance(el, Source):
            if el.probe is None:
                out.append(f"source {el.mode} fermion")
            elif el.probe.is_canonical:
                out.append(f"source {el.mode} probe alpha={el.probe.alpha.real!r}")
            else:
                raise ValueError(f"probe on {el.mode!r} needs real alpha in [0, 1] and derived beta")
        elif isinstance(el, BeamSplitter):
            out.append(f"bs {el.mode1} {el.mode2}")
        elif isinstance(el, Phase):
            out.append(f"phase {el.mode} {format_angle(el.phi)}")
        elif isinstance(el, Block):
            out.append(f"block {el.mode}")
        elif isinstance(el, Detector):
            out.append(f"detect {el.mode} {el.label}")
        else:
            raise TypeError(f"cannot serialize {el!r}")
    return "".join(line + "\n" for line in out)


def canonical(text: str) -> str:
    return serialize(parse(text))
