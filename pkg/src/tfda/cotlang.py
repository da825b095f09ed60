"""The COT representation language: symbols, tree type, parser and emitter.

A COT string is the root ``β·₊`` followed by a chain of essential-saddle
symbols, each with one branch in parentheses, ending in ``β·₋``::

    β·₊ · α₋·₊(σ₋) · α₊·₋(σ₊) · β·₋

Branches are binary trees of ``b`` symbols over ``σ`` leaves. Curly braces mark
children whose order is cyclic (and therefore irrelevant); round braces are
ordered. Every symbol has an ASCII spelling for shell use: ``s+``, ``b+-``,
``a-.+``, ``o-.+`` (for α), ``B.+`` (for β), with ``*`` as the chain separator.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CotSyntaxError

SIGMA_P, SIGMA_M = "σ₊", "σ₋"
B_PP, B_MM, B_PM, B_MP = "b₊₊", "b₋₋", "b₊₋", "b₋₊"
A_PP, A_MP, A_PM, A_MM = "a₊·₊", "a₋·₊", "a₊·₋", "a₋·₋"
A_DOT_PM, A_DOT_MP = "a·₊·₋", "a·₋·₊"
ALPHA_PM, ALPHA_MP = "α₊·₋", "α₋·₊"
ALPHA_DOT_PP, ALPHA_DOT_MM = "α·₊·₊", "α·₋·₋"
BETA_P, BETA_M = "β·₊", "β·₋"
LAMBDA_P, LAMBDA_M = "λ·₊", "λ·₋"

ASCII = {
    SIGMA_P: "s+", SIGMA_M: "s-",
    B_PP: "b++", B_MM: "b--", B_PM: "b+-", B_MP: "b-+",
    A_PP: "a+.+", A_MP: "a-.+", A_PM: "a+.-", A_MM: "a-.-",
    A_DOT_PM: "a.+.-", A_DOT_MP: "a.-.+",
    ALPHA_PM: "o+.-", ALPHA_MP: "o-.+",
    ALPHA_DOT_PP: "o.+.+", ALPHA_DOT_MM: "o.-.-",
    BETA_P: "B.+", BETA_M: "B.-",
    LAMBDA_P: "L.+", LAMBDA_M: "L.-",
}
SYMBOLS = tuple(s for s in ASCII if not s.startswith("λ"))
CYCLIC = frozenset({B_PP, B_MM, ALPHA_DOT_PP, ALPHA_DOT_MM})
LEAVES = frozenset({SIGMA_P, SIGMA_M, BETA_P, BETA_M})
B_SYMBOLS = frozenset({B_PP, B_MM, B_PM, B_MP})
DOTTED = frozenset({A_DOT_PM, A_DOT_MP, ALPHA_DOT_PP, ALPHA_DOT_MM})

# chain symbol -> (branch slot, chain the successor belongs to)
CHAIN_RULES = {
    "+": {A_PP: ("p", "+"), A_MP: ("m", "+"), ALPHA_PM: ("p", "-")},
    "-": {A_PM: ("p", "-"), A_MM: ("m", "-"), ALPHA_MP: ("m", "+")},
}
# b symbol -> slot kinds of its two children
B_RULES = {
    "p": {B_PP: ("p", "p"), B_PM: ("p", "m")},
    "m": {B_MM: ("m", "m"), B_MP: ("m", "p")},
}
DOTTED_RULES = {A_DOT_PM: ("+", "-"), A_DOT_MP: ("-", "+"), ALPHA_DOT_PP: ("+", "+"), ALPHA_DOT_MM: ("-", "-")}
SIGMA_OF_SLOT = {"p": SIGMA_P, "m": SIGMA_M}

_ALIASES = {}
for _sym, _asc in ASCII.items():
    _ALIASES[_sym] = _sym
    _ALIASES[_asc] = _sym
_ALIASES["l.+"] = LAMBDA_P
_ALIASES["l.-"] = LAMBDA_M
_SEPARATORS = {"·": "·", "*": "·", "⋅": "·"}
_PUNCT = set("(){},")
_LONGEST = max(len(k) for k in _ALIASES)


@dataclass(eq=False)
class CotNode:
    """A node of a COT.

    ``children`` of a chain symbol are ``[branch, successor]``; of a ``b`` or
    dotted-pair symbol the two slots; of the root ``β·₊`` the first chain node.
    ``weight`` is the Hamiltonian gap to the parent, ``pixels`` the flat pixel
    indices of the domain swept by that edge (both absent for parsed trees).
    """

    symbol: str
    value: float = None
    children: list = field(default_factory=list)
    weight: float = None
    regions: tuple = ()
    pixels: np.ndarray = None
    reeb_node: int = None
    site: int = None  # flat pixel index of the critical point, if any

    @property
    def cyclic(self):
        return self.symbol in CYCLIC

    @property
    def is_leaf(self):
        return not self.children

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def count(self):
        return sum(1 for _ in self.walk())


@dataclass(eq=False)
class CotTree:
    root: CotNode
    cut: object = None

    def nodes(self):
        return list(self.root.walk())

    def __len__(self):
        return self.root.count()

    def chain(self):
        """The essential chain from the root to ``β·₋`` (list of nodes)."""
        out = [self.root]
        node = self.root.children[0] if self.root.children else None
        while node is not None:
            out.append(node)
            if node.symbol in LEAVES:
                break
            node = node.children[1]
        return out

    def symbols(self):
        return [n.symbol for n in self.chain()]

    def to_string(self, ascii=False):
        return emit(self, ascii=ascii)

    def to_dict(self):
        def conv(node):
            d = {"symbol": node.symbol}
            if node.value is not None:
                d["value"] = node.value
            if node.weight is not None:
                d["weight"] = node.weight
            if node.children:
                d["children"] = [conv(c) for c in node.children]
            return d

        return conv(self.root)


# ---------------------------------------------------------------------------
# tokenizer


def tokenize(text):
    """Split ``text`` into symbol, punctuation and separator tokens."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SEPARATORS:
            tokens.append("·")
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(ch)
            i += 1
            continue
        for length in range(min(_LONGEST, n - i), 0, -1):
            sym = _ALIASES.get(text[i : i + length])
            if sym is not None:
                tokens.append(sym)
                i += length
                break
        else:
            raise CotSyntaxError(f"unknown symbol starting at {text[i:i + 6]!r}", len(tokens))
    return tokens


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, tokens, strict):
        self.tokens = tokens
        self.pos = 0
        self.strict = strict

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None, what=None):
        tok = self.peek()
        if tok is None:
            raise CotSyntaxError(f"unexpected end of input, expected {what or expected!r}", self.pos)
        if expected is not None and tok != expected:
            raise CotSyntaxError(f"expected {expected!r}, got {tok!r}", self.pos)
        self.pos += 1
        return tok

    def root(self):
        tok = self.take(what="β·₊")
        if tok == LAMBDA_P and not self.strict:
            tok = BETA_P
        if tok != BETA_P:
            raise CotSyntaxError(f"COT must start with β·₊, got {tok!r}", self.pos - 1)
        self.take("·")
        tok = self.peek()
        chain_tokens = set(CHAIN_RULES["+"]) | set(CHAIN_RULES["-"]) | {BETA_M, BETA_P, LAMBDA_P, LAMBDA_M}
        if tok is not None and tok not in chain_tokens:
            raise CotSyntaxError(f"{tok!r} not allowed in a chain position", self.pos)
        if self.strict and tok != ALPHA_MP:
            raise CotSyntaxError("strict mode: first symbol must be α₋·₊", self.pos)
        # α₋·₊ is a Chain₋ production; in permissive mode the first symbol may
        # come from either chain and fixes the sign of the rest
        tok = self.peek()
        sign = "+" if tok in CHAIN_RULES["+"] or tok in (BETA_P, LAMBDA_P) else "-"
        node = CotNode(BETA_P, children=[self.chain(sign)])
        if self.peek() is not None:
            raise CotSyntaxError(f"trailing input starting with {self.peek()!r}", self.pos)
        return node

    def chain(self, sign):
        start = self.pos
        tok = self.take(what="chain symbol")
        if tok == BETA_M or (not self.strict and tok == LAMBDA_M):
            return CotNode(BETA_M)
        if not self.strict and sign == "+" and tok in (BETA_P, LAMBDA_P):
            return CotNode(BETA_P)
        rule = CHAIN_RULES[sign].get(tok)
        if rule is None:
            raise CotSyntaxError(f"{tok!r} not allowed in a {sign} chain position", start)
        slot, next_sign = rule
        self.take("(")
        branch = self.branch(slot)
        self.take(")")
        self.take("·")
        return CotNode(tok, children=[branch, self.chain(next_sign)])

    def branch(self, slot):
        start = self.pos
        tok = self.take(what="branch symbol")
        if tok == SIGMA_OF_SLOT[slot]:
            return CotNode(tok)
        if tok in B_RULES[slot]:
            kinds = B_RULES[slot][tok]
            children = self.pair(tok, lambda k: self.branch(k), kinds)
            return CotNode(tok, children=children)
        if not self.strict and tok in DOTTED_RULES:
            signs = DOTTED_RULES[tok]
            children = self.pair(tok, lambda s: self.chain(s), signs)
            return CotNode(tok, children=children)
        raise CotSyntaxError(f"{tok!r} not allowed in a b{'₊' if slot == 'p' else '₋'} slot", start)

    def pair(self, tok, sub, kinds):
        opener, closer = ("{", "}") if tok in CYCLIC else ("(", ")")
        self.take(opener)
        first = sub(kinds[0])
        self.take(",")
        second = sub(kinds[1])
        self.take(closer)
        return [first, second]


def parse(text, mode="strict"):
    """Parse a COT string (Unicode or ASCII) into a :class:`CotTree` without values."""
    if mode not in ("strict", "permissive"):
        raise ValueError(f"unknown parse mode {mode!r}")
    parser = _Parser(tokenize(text), strict=(mode == "strict"))
    return CotTree(parser.root())


# ---------------------------------------------------------------------------
# emitter


def _emit_node(node, ascii):
    name = ASCII[node.symbol] if ascii else node.symbol
    sep = " * " if ascii else " · "
    if not node.children:
        return name
    if node.symbol == BETA_P:
        return name + sep + _emit_node(node.children[0], ascii)
    if node.symbol in B_SYMBOLS or node.symbol in DOTTED:
        parts = [_emit_node(c, ascii) for c in node.children]
        if node.cyclic:
            parts.sort()
            return f"{name}{{{parts[0]}, {parts[1]}}}"
        return f"{name}({parts[0]}, {parts[1]})"
    branch, succ = node.children
    return f"{name}({_emit_node(branch, ascii)}){sep}{_emit_node(succ, ascii)}"


def emit(tree, ascii=False):
    """Canonical text of ``tree``; cyclic children are ordered by their text."""
    root = tree.root if isinstance(tree, CotTree) else tree
    return _emit_node(root, ascii)


def _canonical(node):
    kids = [_canonical(c) for c in node.children]
    if node.symbol in CYCLIC:
        kids.sort()
    return (node.symbol, tuple(kids))


def cot_equal(a, b):
    """Structural equality; cyclic children compare as unordered, values are ignored."""
    ra = a.root if isinstance(a, CotTree) else a
    rb = b.root if isinstance(b, CotTree) else b
    return _canonical(ra) == _canonical(rb)


def parse_branch(text, slot=None, mode="strict"):
    """Parse a bare branch expression such as ``b₊₊{σ₊, σ₊}`` (for tests and tools)."""
    tokens = tokenize(text)
    if slot is None:
        slot = "m" if tokens and tokens[0] in (SIGMA_M, B_MM, B_MP) else "p"
    parser = _Parser(tokens, strict=(mode == "strict"))
    node = parser.branch(slot)
    if parser.peek() is not None:
        raise CotSyntaxError(f"trailing input starting with {parser.peek()!r}", parser.pos)
    return node


# ---------------------------------------------------------------------------
# sign flip

FLIP = {
    SIGMA_P: SIGMA_M, SIGMA_M: SIGMA_P,
    B_PP: B_MM, B_MM: B_PP, B_PM: B_MP, B_MP: B_PM,
    ALPHA_MP: ALPHA_PM, ALPHA_PM: ALPHA_MP,
    BETA_P: BETA_P, BETA_M: BETA_M,
    # chain symbols also trade their current and onward sides because the
    # chain is read in the opposite direction
    A_PP: A_MP, A_MP: A_PP, A_MM: A_PM, A_PM: A_MM,
}


def _flip_branch(node):
    return CotNode(FLIP[node.symbol], children=[_flip_branch(c) for c in node.children])


def involute(tree):
    """The COT of ``-H`` predicted from the COT of ``H``.

    Every symbol is sign-flipped and the essential chain is read backwards.
    Only defined for trees without dotted-pair symbols.
    """
    chain = CotTree(tree.root if isinstance(tree, CotTree) else tree).chain()[1:-1]
    succ = CotNode(BETA_M)
    for node in chain:
        succ = CotNode(FLIP[node.symbol], children=[_flip_branch(node.children[0]), succ])
    return CotTree(CotNode(BETA_P, children=[succ]))
