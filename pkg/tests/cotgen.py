"""Random derivations from the COT grammar, used by the round-trip tests."""

import random

from tfda import cotlang as cl

_CHAIN = {sign: sorted(rules) for sign, rules in cl.CHAIN_RULES.items()}
_BS = {slot: sorted(rules) for slot, rules in cl.B_RULES.items()}
_DOTTED = sorted(cl.DOTTED_RULES)


class Generator:
    """Emit grammar-valid text; every branch and chain is at most ``max_depth`` deep."""

    def __init__(self, rng, max_depth=8, permissive=False, ascii_rate=0.0):
        self.rng = rng
        self.max_depth = max_depth
        self.permissive = permissive
        self.ascii_rate = ascii_rate

    def sym(self, s):
        if self.rng.random() < self.ascii_rate:
            return cl.ASCII[s]
        return s

    def sep(self):
        return " * " if self.rng.random() < self.ascii_rate else " · "

    def branch(self, slot, depth):
        r = self.rng.random()
        if depth >= self.max_depth or r < 0.45:
            return self.sym(cl.SIGMA_OF_SLOT[slot])
        if self.permissive and r > 0.9 and depth + 2 < self.max_depth:
            tok = self.rng.choice(_DOTTED)
            first, second = cl.DOTTED_RULES[tok]
            kids = [self.chain(first, depth + 1, 2), self.chain(second, depth + 1, 2)]
        else:
            tok = self.rng.choice(_BS[slot])
            kids = [self.branch(k, depth + 1) for k in cl.B_RULES[slot][tok]]
        o, c = ("{", "}") if tok in cl.CYCLIC else ("(", ")")
        return f"{self.sym(tok)}{o}{kids[0]}, {kids[1]}{c}"

    def chain(self, sign, depth, budget):
        """A chain of at most ``budget`` saddles that ends in a terminator."""
        if budget <= 0 or depth >= self.max_depth or self.rng.random() < 0.3:
            if sign == "-" or not self.permissive:
                if sign == "+" and not self.permissive:
                    # strict Chain₊ cannot stop; go through α₊·₋ first
                    return self._step(cl.ALPHA_PM, depth, 0)
                return self._terminal(cl.BETA_M, cl.LAMBDA_M)
            return self._terminal(cl.BETA_P, cl.LAMBDA_P) if self.rng.random() < 0.5 else self._step(
                cl.ALPHA_PM, depth, 0)
        return self._step(self.rng.choice(_CHAIN[sign]), depth, budget - 1)

    def _terminal(self, beta, lam):
        if self.permissive and self.rng.random() < 0.2:
            return self.sym(lam)
        return self.sym(beta)

    def _step(self, tok, depth, budget):
        slot, nxt = cl.CHAIN_RULES["+" if tok in cl.CHAIN_RULES["+"] else "-"][tok]
        return f"{self.sym(tok)}({self.branch(slot, depth + 1)}){self.sep()}{self.chain(nxt, depth, budget)}"

    def cot(self):
        budget = self.rng.randint(0, 6)
        if self.permissive and self.rng.random() < 0.3:
            body = self.chain(self.rng.choice("+-"), 0, budget)
        else:
            body = self._step(cl.ALPHA_MP, 0, budget)
        root = self._terminal(cl.BETA_P, cl.LAMBDA_P) if self.permissive else self.sym(cl.BETA_P)
        return root + self.sep() + body


def random_cot(seed, permissive=False, max_depth=8, ascii_rate=0.0):
    return Generator(random.Random(seed), max_depth, permissive, ascii_rate).cot()


def depth(node):
    return 1 + max((depth(c) for c in node.children), default=0)
