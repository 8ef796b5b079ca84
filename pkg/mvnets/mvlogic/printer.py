from typing import Dict, List

from mvnets.mvlogic.terms import DmvTerm, Delta, Not, Odot, Oplus, Var, Wedge, Zero, iter_postorder

BINARY_SYMBOLS = {Oplus: "+", Odot: "*", Wedge: "&"}


def render_node(node: DmvTerm, kids: List[str]) -> str:
    if isinstance(node, Zero):
        return "0"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Not):
        return "~" + kids[0]
    if isinstance(node, Delta):
        return f"d{node.i}({kids[0]})"
    symbol = BINARY_SYMBOLS.get(type(node))
    if symbol is None:
        raise TypeError(f"unknown term node {type(node).__name__}")
    return f"({kids[0]} {symbol} {kids[1]})"


def print_term(term: DmvTerm, shared: bool = False) -> str:
    """
    Fully parenthesized text of a term.

    With shared=True every non-leaf node used more than once is bound once as
    `let tN = ...` and referenced by name; the last line is the term itself.
    The result parses back with parse_program.
    """
    nodes = list(iter_postorder(term))
    if not shared:
        text: Dict[int, str] = {}
        for node in nodes:
            text[id(node)] = render_node(node, [text[id(c)] for c in node.children()])
        return text[id(term)]

    uses: Dict[int, int] = {}
    for node in nodes:
        for child in node.children():
            uses[id(child)] = uses.get(id(child), 0) + 1

    lines: List[str] = []
    text = {}
    for node in nodes:
        rendered = render_node(node, [text[id(c)] for c in node.children()])
        leaf = isinstance(node, (Zero, Var))
        if node is not term and not leaf and uses.get(id(node), 0) > 1:
            name = f"t{len(lines)}"
            lines.append(f"let {name} = {rendered}")
            text[id(node)] = name
        else:
            text[id(node)] = rendered
    lines.append(text[id(term)])
    return "\n".join(lines)
