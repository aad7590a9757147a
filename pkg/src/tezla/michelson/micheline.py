"""Untyped Micheline trees, read from concrete syntax or from JSON.

Both surface syntaxes land in the same node tree, so the typed conversion in
:mod:`tezla.michelson.frontend` only has to be written once.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Tuple, Union

from ..errors import MichelineError, MichelsonSyntaxError


@dataclass(frozen=True)
class Prim:
    name: str
    args: Tuple["Node", ...] = ()
    annots: Tuple[str, ...] = ()
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class IntNode:
    value: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class StringNode:
    value: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class BytesNode:
    hex: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SeqNode:
    items: Tuple["Node", ...] = ()
    line: int = 0
    col: int = 0


Node = Union[Prim, IntNode, StringNode, BytesNode, SeqNode]


# -- concrete syntax ----------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<mcomment>/\*.*?\*/)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<bytes>0x[0-9a-fA-F]*)
  | (?P<int>-?[0-9]+)
  | (?P<annot>[%@:][_a-zA-Z0-9.%@]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}();])
    """,
    re.VERBOSE | re.DOTALL,
)

_ESCAPES = {"n": "\n", "t": "\t", "b": "\b", "r": "\r", '"': '"', "\\": "\\"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise MichelsonSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment", "mcomment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return tokens


def _unescape(raw: str, tok: Token) -> str:
    out = []
    i = 0
    body = raw[1:-1]
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise MichelsonSyntaxError(f"bad escape \\{nxt}", tok.line, tok.col)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def error(self, message, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            raise MichelsonSyntaxError(message + " (at end of input)",
                                       last.line if last else 1, last.col if last else 1)
        raise MichelsonSyntaxError(message, tok.line, tok.col)

    def next(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def at(self, text):
        tok = self.peek()
        return tok is not None and tok.kind == "punct" and tok.text == text

    def sequence_body(self, closer):
        """Items separated by ';' up to (not including) the closer."""
        items = []
        while True:
            tok = self.peek()
            if tok is None:
                if closer is None:
                    return items
                self.error(f"missing {closer!r}")
            if closer is not None and self.at(closer):
                return items
            if self.at(";"):
                self.error("empty sequence element")
            items.append(self.expr())
            if self.at(";"):
                self.next()
            elif not (closer is not None and self.at(closer)) and self.peek() is not None:
                self.error(f"expected ';' or {closer!r}, found {self.peek().text!r}")

    def expr(self):
        """A prim application, or an atom."""
        tok = self.peek()
        if tok is not None and tok.kind == "ident":
            self.next()
            annots, args = [], []
            while True:
                nxt = self.peek()
                if nxt is None or (nxt.kind == "punct" and nxt.text in ";})"):
                    break
                if nxt.kind == "annot":
                    annots.append(self.next().text)
                    continue
                args.append(self.atom())
            return Prim(tok.text, tuple(args), tuple(annots), tok.line, tok.col)
        return self.atom()

    def atom(self):
        tok = self.next()
        if tok.kind == "int":
            return IntNode(int(tok.text), tok.line, tok.col)
        if tok.kind == "string":
            return StringNode(_unescape(tok.text, tok), tok.line, tok.col)
        if tok.kind == "bytes":
            return BytesNode(tok.text[2:], tok.line, tok.col)
        if tok.kind == "ident":
            return Prim(tok.text, (), (), tok.line, tok.col)
        if tok.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.text == "{":
            items = self.sequence_body("}")
            self.expect("}")
            return SeqNode(tuple(items), tok.line, tok.col)
        self.error(f"unexpected {tok.text!r}", tok)


def parse_concrete(text: str):
    """Parse a whole script: a ';'-separated list of toplevel prims.

    An optional pair of braces around the whole script is accepted.
    """
    p = _Parser(tokenize(text))
    if p.at("{"):
        p.next()
        items = p.sequence_body("}")
        p.expect("}")
        if p.peek() is not None:
            p.error("trailing input after script")
    else:
        items = p.sequence_body(None)
    return items


def parse_expr(text: str):
    """Parse a single expression (type, literal or instruction sequence)."""
    p = _Parser(tokenize(text))
    node = p.expr()
    if p.peek() is not None:
        p.error("trailing input")
    return node


# -- JSON ---------------------------------------------------------------------

def from_json(obj):
    if isinstance(obj, list):
        return SeqNode(tuple(from_json(x) for x in obj))
    if not isinstance(obj, dict):
        raise MichelineError(f"not a Micheline node: {obj!r}")
    if "prim" in obj:
        name = obj["prim"]
        if not isinstance(name, str):
            raise MichelineError(f"prim must be a string: {name!r}")
        args = obj.get("args", [])
        annots = obj.get("annots", [])
        if not isinstance(args, list) or not isinstance(annots, list):
            raise MichelineError(f"bad args/annots in {name}")
        return Prim(name, tuple(from_json(a) for a in args), tuple(annots))
    if "int" in obj:
        try:
            return IntNode(int(obj["int"]))
        except (TypeError, ValueError):
            raise MichelineError(f"bad int literal {obj['int']!r}") from None
    if "string" in obj:
        if not isinstance(obj["string"], str):
            raise MichelineError("string node must hold a string")
        return StringNode(obj["string"])
    if "bytes" in obj:
        return BytesNode(obj["bytes"])
    raise MichelineError(f"not a Micheline node: {obj!r}")


def loads(json_text: str):
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise MichelineError(f"malformed JSON: {exc}") from None
    return from_json(obj)


def to_json(node):
    if isinstance(node, SeqNode):
        return [to_json(x) for x in node.items]
    if isinstance(node, IntNode):
        return {"int": str(node.value)}
    if isinstance(node, StringNode):
        return {"string": node.value}
    if isinstance(node, BytesNode):
        return {"bytes": node.hex}
    out = {"prim": node.name}
    if node.args:
        out["args"] = [to_json(a) for a in node.args]
    if node.annots:
        out["annots"] = list(node.annots)
    return out
