"""Command line: expression parser, verification driver and exporters."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .freealg import SkewPolynomial, compact_word, parse_word
from .g2 import LETTER_ORDER, LETTER_WORDS, derivative_table, generic_g2, height_table, render_coordinates
from .g2 import run_all as run_g2
from .lyndon import format_tree, is_standard, shirshov_bracketing
from .reduce import hardness_witness, is_hard, normal_form

# -- expressions -------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {message}")
        self.line, self.column = line, col


@dataclass(frozen=True)
class ExprAst:
    """kind is one of var, num, sym, sum, neg, product, quotient, bracket, power."""

    kind: str
    args: tuple = ()
    value: object = None


_SYMBOLS = ("x1", "x2", "p12", "p21", "q")


def _tokenize(text: str) -> list:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            out.append(("int", text[i:j], i))
            i = j
        elif ch.isalpha():
            for sym in _SYMBOLS:
                if text.startswith(sym, i) and not text[i + len(sym):i + len(sym) + 1].isalnum():
                    out.append(("sym", sym, i))
                    i += len(sym)
                    break
            else:
                j = i
                while j < len(text) and text[j].isalnum():
                    j += 1
                raise ParseError(f"unknown symbol {text[i:j]!r}", text, i)
        elif ch in "+-*/^()[],":
            out.append((ch, ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", text, i)
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self) -> ExprAst:
        if self.peek()[0] in "+-":
            sign = self.take()[0]
            node = self.term()
            if sign == "-":
                node = ExprAst("neg", (node,))
        else:
            node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            node = ExprAst("sum", (node, rhs if op == "+" else ExprAst("neg", (rhs,))))
        return node

    def _starts_factor(self) -> bool:
        return self.peek()[0] in ("int", "sym", "(", "[")

    def term(self) -> ExprAst:
        node = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                node = ExprAst("product", (node, self.factor()))
            elif kind == "/":
                self.take()
                node = ExprAst("quotient", (node, self.factor()))
            elif self._starts_factor():
                node = ExprAst("product", (node, self.factor()))
            else:
                return node

    def factor(self) -> ExprAst:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            node = ExprAst("num", value=int(tok[1]))
        elif tok[0] == "sym":
            self.take()
            node = ExprAst("var", value=int(tok[1][1])) if tok[1] in ("x1", "x2") else ExprAst("sym", value=tok[1])
        elif tok[0] == "(":
            self.take()
            node = self.expr()
            self.take(")")
        elif tok[0] == "[":
            self.take()
            left = self.expr()
            self.take(",")
            right = self.expr()
            self.take("]")
            node = ExprAst("bracket", (left, right))
        else:
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected a factor, found {got}", self.text, tok[2])
        while self.peek()[0] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "-":
                self.take()
                neg = True
            n = int(self.take("int")[1])
            node = ExprAst("power", (node,), -n if neg else n)
        return node


def parse(text: str) -> ExprAst:
    p = _Parser(text)
    node = p.expr()
    p.take("end")
    return node


def evaluate(node: ExprAst, g=None) -> SkewPolynomial:
    g = g or generic_g2()
    F = g.field
    k = node.kind
    if k == "num":
        return g.scalar(node.value)
    if k == "sym":
        # p21 is stored as q^-3 p12^-1
        return g.scalar({"q": F.q, "p12": F.p12, "p21": F.p21}[node.value])
    if k == "var":
        return g.x(node.value)
    if k == "neg":
        return -evaluate(node.args[0], g)
    if k == "sum":
        return evaluate(node.args[0], g) + evaluate(node.args[1], g)
    if k == "product":
        return evaluate(node.args[0], g) * evaluate(node.args[1], g)
    if k == "quotient":
        num, den = evaluate(node.args[0], g), evaluate(node.args[1], g)
        c = _as_scalar(den, "divisor")
        if not c:
            raise ZeroDivisionError("division by zero")
        return num.scale(c ** -1)
    if k == "bracket":
        return g.bracket(evaluate(node.args[0], g), evaluate(node.args[1], g))
    if k == "power":
        base = evaluate(node.args[0], g)
        if node.value >= 0:
            return base ** node.value
        c = _as_scalar(base, "base of a negative power")
        if not c:
            raise ZeroDivisionError("negative power of zero")
        return g.scalar(c ** node.value)
    raise ValueError(f"unknown node {k}")


def _as_scalar(f: SkewPolynomial, what: str):
    if any(w for w in f.terms):
        raise ValueError(f"{what} must be a scalar")
    return f.coefficient(())


def render(node: ExprAst) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    k = node.kind
    if k == "num":
        return str(node.value)
    if k == "sym":
        return node.value
    if k == "var":
        return f"x{node.value}"
    if k == "neg":
        return f"(-{render(node.args[0])})"
    if k == "sum":
        return f"({render(node.args[0])} + {render(node.args[1])})"
    if k == "product":
        return f"({render(node.args[0])} * {render(node.args[1])})"
    if k == "quotient":
        return f"({render(node.args[0])} / {render(node.args[1])})"
    if k == "bracket":
        return f"[{render(node.args[0])}, {render(node.args[1])}]"
    if k == "power":
        return f"({render(node.args[0])})^{node.value}"
    raise ValueError(f"unknown node {k}")


def parse_polynomial(text: str, g=None) -> SkewPolynomial:
    return evaluate(parse(text), g)


# -- commands --------------------------------------------------------------------


def _print_checks(checks, out) -> int:
    failed = [c for c in checks if not c.passed]
    for c in checks:
        out.write(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.anchor}\n")
    out.write(f"{len(checks)} checks, {len(checks) - len(failed)} passed, {len(failed)} failed\n")
    for c in failed:
        out.write(c.to_json() + "\n")
    return 1 if failed else 0


def cmd_verify(args, out) -> int:
    from .coideal import run_all as run_coideal

    g = generic_g2()
    checks = run_g2(g, mode=args.mode, trials=args.trials) + run_coideal(g)
    return _print_checks(checks, out)


def cmd_nf(args, out) -> int:
    g = generic_g2()
    f = parse_polynomial(args.expr, g)
    out.write(normal_form(f, g.rels).render() + "\n")
    return 0


def cmd_hard(args, out) -> int:
    g = generic_g2()
    w = parse_word(args.word)
    if not is_standard(w):
        out.write(f"{compact_word(w)}: not standard\n")
        return 0
    tree = format_tree(shirshov_bracketing(w))
    if is_hard(w, g.rels):
        names = {v: k for k, v in LETTER_WORDS.items()}
        tag = f" (word of [{names[w]}])" if w in names else ""
        out.write(f"{compact_word(w)}: hard{tag}\nbracketing: {tree}\n")
    else:
        row = hardness_witness(w, g.rels)
        out.write(f"{compact_word(w)}: not hard\nbracketing: {tree}\n")
        out.write(f"witness: {row.render()} lies in the ideal\n")
    return 0


def cmd_table(args, out) -> int:
    g = generic_g2()
    table = derivative_table(g)
    for n in LETTER_ORDER:
        for i in (1, 2):
            out.write(f"d{i}([{n}]) = {render_coordinates(table[(n, i)])}\n")
    return 0


def cmd_lattice(args, out) -> int:
    from .coideal import enumerate_lattice

    lat = enumerate_lattice(generic_g2())
    if args.format == "dot":
        out.write(lat.to_dot())
    else:
        for rec in lat.records():
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    return 0


def cmd_heights(args, out) -> int:
    if args.t <= 4 or args.t == 6:
        raise _Usage("--t must be an integer > 4 other than 6")
    for n, h in height_table(args.t).items():
        out.write(f"[{n}] {h}\n")
    return 0


class _Usage(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    p = _ArgumentParser(prog="g2lattice", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    v = sub.add_parser("verify", help="run every check")
    v.add_argument("--mode", choices=("auto", "exact", "probabilistic"), default="auto")
    v.add_argument("--trials", type=int, default=3)
    v.set_defaults(func=cmd_verify)
    n = sub.add_parser("nf", help="normal form of an expression")
    n.add_argument("expr")
    n.set_defaults(func=cmd_nf)
    h = sub.add_parser("hard", help="hardness of a standard word")
    h.add_argument("word")
    h.set_defaults(func=cmd_hard)
    t = sub.add_parser("table", help="derivatives of the six letters")
    t.set_defaults(func=cmd_table)
    lat = sub.add_parser("lattice", help="the coideal subalgebra lattice")
    lat.add_argument("--format", choices=("dot", "records"), default="dot")
    lat.set_defaults(func=cmd_lattice)
    ht = sub.add_parser("heights", help="heights of the letters at a root of unity")
    ht.add_argument("--t", type=int, required=True)
    ht.set_defaults(func=cmd_heights)
    return p


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise _Usage("--trials must be at least 1")
        return args.func(args, out)
    except _Usage as exc:
        err.write(parser.format_usage())
        err.write(f"error: {exc}\n")
        return 2
    except (ParseError, ValueError, ZeroDivisionError) as exc:
        err.write(f"error: {exc}\n")
        return 2


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
