"""Textual ``.cn`` format: parser and renderer.

See ``docs/dsl.md`` for the grammar. The parser never raises anything but
:class:`~cnp.errors.ParseFailure`; the renderer's output always parses back
to an equal network.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Union

from .errors import ParseFailure
from .network import (
    RESERVED,
    Arrow,
    CallKind,
    ControlNetwork,
    Literal,
    Name,
    Neg,
    Node,
    NodeKind,
    OptionMutation,
    PrimitiveCall,
    RangeValue,
    Subnet,
    validate,
)

KEYWORDS = RESERVED | {"MAIN"}


@dataclass(frozen=True)
class SourceProgram:
    text: str
    origin: str = "<inline>"

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "SourceProgram":
        path = Path(path)
        return cls(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    origin: str = "<inline>"

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}: {self.message}"


# -- lexer ------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # ident, int, str, punct, eof
    text: str
    value: object
    line: int
    col: int


_PUNCT = ("->", "(", ")", ",", ";", ":", "[", "]", "{", "}", "=", "-")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


class _Syntax(Exception):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message


def _tokens(text: str) -> Iterator[_Token]:
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == '"':
            j, chars = i + 1, []
            while True:
                if j >= n or text[j] == "\n":
                    raise _Syntax(start_line, start_col, "unterminated string literal")
                c = text[j]
                if c == '"':
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in _ESCAPES:
                        raise _Syntax(line, col + (j - i), "unknown escape sequence in string")
                    chars.append(_ESCAPES[text[j + 1]])
                    j += 2
                    continue
                chars.append(c)
                j += 1
            yield _Token("str", text[i:j + 1], "".join(chars), start_line, start_col)
            col += j + 1 - i
            i = j + 1
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            yield _Token("ident", m.group(), m.group(), start_line, start_col)
        else:
            m = _INT_RE.match(text, i)
            if m:
                yield _Token("int", m.group(), int(m.group()), start_line, start_col)
        if m:
            col += m.end() - i
            i = m.end()
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                yield _Token("punct", p, p, start_line, start_col)
                i, col = i + len(p), col + len(p)
                break
        else:
            raise _Syntax(line, col, f"unexpected character {ch!r}")
    yield _Token("eof", "", None, line, col)


# -- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.toks[self.i]

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise _Syntax(tok.line, tok.col, f"{message}, found {found}")

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def take(self) -> _Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.take()

    def ident(self, what: str) -> _Token:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            self.fail(f"expected {what}")
        return self.take()

    def ident_list(self, what: str) -> tuple[str, ...]:
        out = [self.ident(what).text]
        while self.at(","):
            self.take()
            out.append(self.ident(what).text)
        return tuple(out)

    # program := [MAIN ident] subnet+
    def program(self) -> ControlNetwork:
        main = None
        if self.at("MAIN"):
            self.take()
            main = self.ident("main subnet name").text
        subnets = []
        while self.tok.kind != "eof":
            if not self.at("SUBNET"):
                self.fail("expected 'SUBNET'")
            subnets.append(self.subnet())
        if not subnets:
            self.fail("expected at least one SUBNET")
        return ControlNetwork(tuple(subnets), main or subnets[0].name)

    def subnet(self) -> Subnet:
        head = self.expect("SUBNET")
        name = self.ident("subnet name").text
        self.expect("(")
        params: tuple[str, ...] = ()
        if not self.at(")"):
            params = self.ident_list("parameter name")
        self.expect(")")
        local_vars: tuple[str, ...] = ()
        if self.at("VARS"):
            self.take()
            local_vars = self.ident_list("variable name")
        nodes, arrows, initial = [], [], None
        while self.at("INIT") or self.at("NODE") or self.at("ARROW"):
            kw = self.take()
            if kw.text == "ARROW":
                arrows.append(self.arrow(kw))
                continue
            node = self.node(kw)
            if kw.text == "INIT":
                if initial is not None:
                    raise _Syntax(kw.line, kw.col, f"subnet {name!r} declares a second INIT node")
                initial = node.id
            nodes.append(node)
        if initial is None:
            self.fail(f"subnet {name!r} needs an INIT node; expected 'INIT'")
        return Subnet(name, params, local_vars, tuple(nodes), initial, tuple(arrows), pos=(head.line, head.col))

    def node(self, kw: _Token) -> Node:
        node_id = self.ident("node name").text
        kind, mutations = NodeKind.ORDINARY, ()
        if self.at("FINISH"):
            self.take()
            kind = NodeKind.FINISH
        elif self.at("CONTROL"):
            self.take()
            kind = NodeKind.CONTROL
            mutations = self.mutations()
        return Node(node_id, kind, mutations, pos=(kw.line, kw.col))

    def mutations(self) -> tuple[OptionMutation, ...]:
        self.expect("{")
        out = []
        while not self.at("}"):
            if out:
                self.expect(",")
            option = self.ident("option name").text
            self.expect("=")
            if self.at("["):
                self.take()
                low = self.expr()
                self.expect(",")
                high = self.expr()
                self.expect("]")
                value = RangeValue(low, high)
            elif self.at("none"):
                self.take()
                value = None
            else:
                value = self.expr()
            out.append(OptionMutation(option, value))
        self.expect("}")
        return tuple(out)

    def arrow(self, kw: _Token) -> Arrow:
        source = self.ident("source node").text
        self.expect("->")
        target = self.ident("target node").text
        ev = None
        if self.at("["):
            self.take()
            self.expect("eval")
            self.expect("=")
            ev = self.call(subnet_allowed=False)
            self.expect("]")
        self.expect(":")
        chain = []
        if not self.at(";"):
            chain.append(self.call())
            while self.at(","):
                self.take()
                chain.append(self.call())
        self.expect(";")
        return Arrow(source, target, tuple(chain), ev, pos=(kw.line, kw.col))

    def call(self, subnet_allowed: bool = True) -> PrimitiveCall:
        start = self.tok
        kind = CallKind.PRIMITIVE
        if subnet_allowed and self.at("call"):
            self.take()
            kind = CallKind.SUBNET
        name = self.ident("subnet name" if kind is CallKind.SUBNET else "primitive name").text
        args = []
        if self.at("("):
            self.take()
            if not self.at(")"):
                args.append(self.expr())
                while self.at(","):
                    self.take()
                    args.append(self.expr())
            if not self.at(")"):
                self.fail("expected ',' or ')' to close the argument list")
            self.take()
        return PrimitiveCall(name, tuple(args), kind, pos=(start.line, start.col))

    def expr(self):
        negations = 0
        while self.at("-"):
            self.take()
            negations += 1
        tok = self.tok
        if tok.kind == "int":
            self.take()
            if negations:
                negations -= 1
                node = Literal(-tok.value)
            else:
                node = Literal(tok.value)
        elif tok.kind == "str":
            self.take()
            node = Literal(tok.value)
        elif tok.kind == "ident" and tok.text not in KEYWORDS:
            self.take()
            node = Name(tok.text)
        elif self.at("("):
            self.take()
            node = self.expr()
            self.expect(")")
        else:
            self.fail("expected an expression")
        for _ in range(negations):
            node = Neg(node)
        return node


def parse(src: Union[SourceProgram, str], origin: str | None = None) -> ControlNetwork:
    """Parse ``.cn`` text into a validated :class:`ControlNetwork`.

    Raises :class:`ParseFailure` carrying located :class:`ParseError` values,
    both for syntax errors and for structural violations.
    """
    if isinstance(src, str):
        src = SourceProgram(src, origin or "<inline>")
    try:
        net = _Parser(src.text).program()
    except _Syntax as exc:
        raise ParseFailure([ParseError(exc.line, exc.col, exc.message, src.origin)]) from None
    except RecursionError:
        raise ParseFailure([ParseError(1, 1, "expression nesting too deep", src.origin)]) from None
    violations = validate(net)
    if violations:
        errors = []
        for v in violations:
            line, col = v.pos or _fallback_pos(net, v)
            errors.append(ParseError(line, col, str(v), src.origin))
        raise ParseFailure(errors)
    return net


def load(path: Union[str, Path]) -> ControlNetwork:
    return parse(SourceProgram.from_path(path))


def _fallback_pos(net: ControlNetwork, v) -> tuple[int, int]:
    if v.subnet is not None:
        for sub in net.subnets:
            if sub.name == v.subnet and sub.pos:
                return sub.pos
    return (1, 1)


# -- renderer ---------------------------------------------------------------

def _render_str(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def render_expr(expr) -> str:
    if isinstance(expr, Literal):
        if isinstance(expr.value, str):
            return _render_str(expr.value)
        return str(expr.value)
    if isinstance(expr, Name):
        return expr.name
    if isinstance(expr, Neg):
        inner = expr.operand
        if isinstance(inner, Literal) and not isinstance(inner.value, str):
            return f"-({render_expr(inner)})"
        return "-" + render_expr(inner)
    raise TypeError(f"not an expression: {expr!r}")


def render_call(call: PrimitiveCall) -> str:
    args = "(" + ", ".join(render_expr(a) for a in call.args) + ")"
    if call.is_subnet_call:
        return f"call {call.name}{args}"
    return call.name + (args if call.args else "")


def _render_mutation(m: OptionMutation) -> str:
    if m.value is None:
        value = "none"
    elif isinstance(m.value, RangeValue):
        value = f"[{render_expr(m.value.low)}, {render_expr(m.value.high)}]"
    else:
        value = render_expr(m.value)
    return f"{m.option}={value}"


def _render_node(node: Node, initial: str) -> str:
    text = ("INIT " if node.id == initial else "NODE ") + node.id
    if node.kind is NodeKind.FINISH:
        text += " FINISH"
    elif node.kind is NodeKind.CONTROL:
        text += " CONTROL {" + ", ".join(_render_mutation(m) for m in node.mutations) + "}"
    return text


def render(net: ControlNetwork) -> SourceProgram:
    lines = []
    if net.subnets and net.subnets[0].name != net.main:
        lines += [f"MAIN {net.main}", ""]
    for sub in net.subnets:
        lines.append(f"SUBNET {sub.name}({', '.join(sub.params)})")
        if sub.locals:
            lines.append("  VARS " + ", ".join(sub.locals))
        for node in sub.nodes:
            lines.append("  " + _render_node(node, sub.initial))
        for arrow in sub.arrows:
            head = f"  ARROW {arrow.source} -> {arrow.target}"
            if arrow.eval is not None:
                head += f" [eval={render_call(arrow.eval)}]"
            chain = ", ".join(render_call(c) for c in arrow.chain)
            lines.append(f"{head} : {chain} ;" if chain else f"{head} : ;")
        lines.append("")
    return SourceProgram("\n".join(lines), "<rendered>")
