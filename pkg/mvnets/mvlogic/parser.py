"""
Recursive-descent parser for the ASCII term syntax.

    sum     := wedge ("+" wedge)*
    wedge   := product ("&" product)*
    product := unary ("*" unary)*
    unary   := "~" unary | atom
    atom    := "0" | "1" | "x[" INT "]" | NAME | "d" INT "(" sum ")" | "(" sum ")"

Bare names (x, y, ...) are shorthand for x[0], x[1], ... in order of first
appearance unless the caller passes a name table. Inside a program, names
bound by `let` refer to the bound term.
"""
import logging
import re
from typing import Dict, List, Optional

from mvnets.errors import TermSyntaxError
from mvnets.mvlogic.terms import ZERO, DmvTerm, Delta, Not, Odot, Oplus, Var, Wedge

logger = logging.getLogger(__name__)

SPACE_RE = re.compile(r"\s*")
TOKEN_RE = re.compile(
    r"(?P<var>x\s*\[\s*(?P<vi>[+-]?\d+)\s*\])"
    r"|(?P<delta>d\s*(?P<di>\d+)\s*\()"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<const>[01](?![0-9]))"
    r"|(?P<op>[~*&+()])"
)


class Token:
    def __init__(self, kind: str, text: str, pos: int, value=None):
        self.kind = kind
        self.text = text
        self.pos = pos
        self.value = value

    def __repr__(self):
        return f"Token({self.kind!r}, {self.text!r}, {self.pos})"


def tokenize(text: str, base: int = 0) -> List[Token]:
    tokens = []
    pos = SPACE_RE.match(text, 0).end()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", base + pos)
        start = base + pos
        if m.group("var"):
            offset = int(m.group("vi"))
            tokens.append(Token("var", m.group("var"), start, offset))
        elif m.group("delta"):
            tokens.append(Token("delta", m.group("delta"), start, int(m.group("di"))))
        elif m.group("name"):
            tokens.append(Token("name", m.group("name"), start))
        elif m.group("const"):
            tokens.append(Token("const", m.group("const"), start))
        else:
            tokens.append(Token(m.group("op"), m.group("op"), start))
        pos = SPACE_RE.match(text, m.end()).end()
    tokens.append(Token("eof", "", base + len(text)))
    return tokens


class TermParser:
    """One parse over a token stream; `names` and `bindings` persist across lines."""

    def __init__(self, names: Optional[Dict[str, int]] = None, bindings: Optional[Dict[str, DmvTerm]] = None):
        self.names: Dict[str, int] = dict(names or {})
        self.bindings: Dict[str, DmvTerm] = dict(bindings or {})
        self.tokens: List[Token] = []
        self.idx = 0

    # --- token stream ---
    @property
    def peek(self) -> Token:
        return self.tokens[self.idx]

    def pop(self) -> Token:
        tok = self.tokens[self.idx]
        if tok.kind != "eof":
            self.idx += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.pop()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise TermSyntaxError(f"expected {kind!r}, found {found!r}", tok.pos)
        return tok

    # --- grammar ---
    def parse(self, text: str, base: int = 0) -> DmvTerm:
        self.tokens = tokenize(text, base)
        self.idx = 0
        term = self.parse_sum()
        tok = self.peek
        if tok.kind != "eof":
            raise TermSyntaxError(f"unexpected {tok.text!r} after complete term", tok.pos)
        return term

    def parse_sum(self) -> DmvTerm:
        left = self.parse_wedge()
        while self.peek.kind == "+":
            self.pop()
            left = Oplus(left, self.parse_wedge())
        return left

    def parse_wedge(self) -> DmvTerm:
        left = self.parse_product()
        while self.peek.kind == "&":
            self.pop()
            left = Wedge(left, self.parse_product())
        return left

    def parse_product(self) -> DmvTerm:
        left = self.parse_unary()
        while self.peek.kind == "*":
            self.pop()
            left = Odot(left, self.parse_unary())
        return left

    def parse_unary(self) -> DmvTerm:
        # ~~~...x を再帰なしで処理
        depth = 0
        while self.peek.kind == "~":
            self.pop()
            depth += 1
        term = self.parse_atom()
        for _ in range(depth):
            term = Not(term)
        return term

    def parse_atom(self) -> DmvTerm:
        tok = self.pop()
        if tok.kind == "const":
            return ZERO if tok.text == "0" else Not(ZERO)
        if tok.kind == "var":
            return Var(tok.value)
        if tok.kind == "name":
            return self.resolve_name(tok)
        if tok.kind == "delta":
            if tok.value < 1:
                raise TermSyntaxError("delta index must be >= 1", tok.pos)
            inner = self.parse_sum()
            self.expect(")")
            return Delta(tok.value, inner)
        if tok.kind == "(":
            inner = self.parse_sum()
            self.expect(")")
            return inner
        found = tok.text or "end of input"
        raise TermSyntaxError(f"unexpected {found!r}", tok.pos)

    def resolve_name(self, tok: Token) -> DmvTerm:
        if tok.text in self.bindings:
            return self.bindings[tok.text]
        if tok.text not in self.names:
            self.names[tok.text] = len(self.names)
        return Var(self.names[tok.text])


def parse_term(text: str, names: Optional[Dict[str, int]] = None) -> DmvTerm:
    """Parse one term. Raises TermSyntaxError with the offending position."""
    return TermParser(names=names).parse(text)


LET_RE = re.compile(r"^\s*let\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*")


def parse_program(text: str, names: Optional[Dict[str, int]] = None) -> DmvTerm:
    """
    Parse let-style text: any number of `let tN = <term>` lines, then one term.
    Blank lines and lines starting with '#' are skipped.
    """
    parser = TermParser(names=names)
    result: Optional[DmvTerm] = None
    offset = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        line_start = offset
        offset += len(line)
        if not stripped or stripped.startswith("#"):
            continue
        if result is not None:
            raise TermSyntaxError("text after the final term", line_start)
        m = LET_RE.match(line)
        if m:
            name = m.group(1)
            if name in parser.bindings:
                raise TermSyntaxError(f"{name} is already bound", line_start + m.start(1))
            parser.bindings[name] = parser.parse(line[m.end():], base=line_start + m.end())
            continue
        result = parser.parse(line, base=line_start)
    if result is None:
        raise TermSyntaxError("program has no final term", len(text))
    logger.debug(f"parsed program with {len(parser.bindings)} let bindings")
    return result
