"""Parser and AST for the evidence formula language.

The language covers what formalized evidence needs and nothing more:
arithmetic comparisons over parameters and trace signals, boolean
connectives, implication, and bounded quantifiers over a trace's sample
times or a time interval. Grammar (EBNF mirror in docs/formula-grammar.md):

    formula     = quantified ;
    quantified  = ("forall" | "exists") ident "in" domain ":" quantified
                | implication ;
    implication = disjunction [ "->" quantified ] ;   (* right-assoc *)
    disjunction = conjunction { "or" conjunction } ;
    conjunction = negation { "and" negation } ;
    negation    = "not" negation | atom ;
    atom        = "true" | "false" | term relop term
                | ident "(" term ")" | "(" quantified ")" ;
    domain      = "trace" | "[" term "," term "]" ;
    term        = product { ("+" | "-") product } ;
    product     = unary { ("*" | "/") unary } ;
    unary       = "-" unary | primary ;
    primary     = number | ident | ident "(" term ")" | "(" term ")" ;

An identifier in term position is a bound quantifier variable when in
scope, otherwise a parameter. A signal applied to a single bare
identifier requires that identifier to be bound: `x(t2)` outside a
`t2` binder is almost always a typo, so it is rejected at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .errors import FormulaSyntaxError, UnboundVariable

# --- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class NumLit:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Signal:
    name: str
    time: "Term"


@dataclass(frozen=True)
class Arith:
    op: str  # + - * /
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Neg:
    operand: "Term"


Term = Union[NumLit, Param, Var, Signal, Arith, Neg]


@dataclass(frozen=True)
class Literal:
    value: bool


@dataclass(frozen=True)
class BoolSignal:
    name: str
    time: Term


@dataclass(frozen=True)
class Compare:
    op: str  # < <= > >= == !=
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class TraceDomain:
    pass


@dataclass(frozen=True)
class Interval:
    lo: Term
    hi: Term


Domain = Union[TraceDomain, Interval]


@dataclass(frozen=True)
class Quantifier:
    kind: str  # "forall" | "exists"
    var: str
    domain: Domain
    body: "Formula"


Formula = Union[Literal, BoolSignal, Compare, Not, And, Or, Implies, Quantifier]

COMPARE_OPS = ("<=", ">=", "==", "!=", "<", ">")
KEYWORDS = frozenset(
    {"forall", "exists", "in", "trace", "and", "or", "not", "true", "false"}
)


def neg(term: Term) -> Term:
    """Unary minus with literal folding so `-2.0` round-trips."""
    if isinstance(term, NumLit):
        return NumLit(-term.value)
    if isinstance(term, Neg):
        return term.operand
    return Neg(term)


# --- lexer ------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # ident num op punct eof
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|==|!=|[<>+\-*/])
  | (?P<punct>[()\[\],:])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        value = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ---------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.scope: list[str] = []

    # -- token helpers

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            raise FormulaSyntaxError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    # -- formulas

    def parse_formula(self) -> Formula:
        if self.at_keyword("forall") or self.at_keyword("exists"):
            return self.parse_quantifier()
        return self.parse_implication()

    def parse_quantifier(self) -> Quantifier:
        kind = self.advance().text
        var_tok = self.peek()
        if var_tok.kind != "ident" or var_tok.text in KEYWORDS:
            raise FormulaSyntaxError(
                "expected a variable name after quantifier",
                var_tok.line,
                var_tok.column,
            )
        self.advance()
        tok = self.peek()
        if not self.at_keyword("in"):
            raise FormulaSyntaxError("expected 'in'", tok.line, tok.column)
        self.advance()
        domain = self.parse_domain()
        self.expect(":")
        self.scope.append(var_tok.text)
        try:
            body = self.parse_formula()
        finally:
            self.scope.pop()
        return Quantifier(kind=kind, var=var_tok.text, domain=domain, body=body)

    def parse_domain(self) -> Domain:
        tok = self.peek()
        if self.at_keyword("trace"):
            self.advance()
            return TraceDomain()
        if tok.text == "[":
            self.advance()
            lo = self.parse_term()
            self.expect(",")
            hi = self.parse_term()
            self.expect("]")
            return Interval(lo=lo, hi=hi)
        raise FormulaSyntaxError(
            "expected 'trace' or '[lo, hi]' domain", tok.line, tok.column
        )

    def parse_implication(self) -> Formula:
        lhs = self.parse_disjunction()
        if self.peek().text == "->":
            self.advance()
            rhs = self.parse_formula()  # right-assoc; rhs may quantify
            return Implies(antecedent=lhs, consequent=rhs)
        return lhs

    def parse_disjunction(self) -> Formula:
        items = [self.parse_conjunction()]
        while self.at_keyword("or"):
            self.advance()
            items.append(self.parse_conjunction())
        if len(items) == 1:
            return items[0]
        return Or(items=tuple(items))

    def parse_conjunction(self) -> Formula:
        items = [self.parse_negation()]
        while self.at_keyword("and"):
            self.advance()
            items.append(self.parse_negation())
        if len(items) == 1:
            return items[0]
        return And(items=tuple(items))

    def parse_negation(self) -> Formula:
        if self.at_keyword("not"):
            self.advance()
            return Not(operand=self.parse_negation())
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if self.at_keyword("true"):
            self.advance()
            return Literal(True)
        if self.at_keyword("false"):
            self.advance()
            return Literal(False)
        if self.at_keyword("forall") or self.at_keyword("exists"):
            raise FormulaSyntaxError(
                "quantifier must be parenthesized here", tok.line, tok.column
            )

        # try `term relop term`, falling back to boolean signal or a
        # parenthesized formula; backtracking keeps the grammar simple
        mark = self.pos
        try:
            lhs = self.parse_term()
            op_tok = self.peek()
            if op_tok.text in COMPARE_OPS:
                self.advance()
                rhs = self.parse_term()
                return Compare(op=op_tok.text, lhs=lhs, rhs=rhs)
            if isinstance(lhs, Signal):
                return BoolSignal(name=lhs.name, time=lhs.time)
            raise FormulaSyntaxError(
                f"expected a comparison operator, found "
                f"{op_tok.text or 'end of input'!r}",
                op_tok.line,
                op_tok.column,
            )
        except FormulaSyntaxError as term_err:
            self.pos = mark
            if self.peek().text == "(":
                self.advance()
                inner = self.parse_formula()
                self.expect(")")
                return inner
            raise term_err

    # -- terms

    def parse_term(self) -> Term:
        lhs = self.parse_product()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            rhs = self.parse_product()
            lhs = Arith(op=op, lhs=lhs, rhs=rhs)
        return lhs

    def parse_product(self) -> Term:
        lhs = self.parse_unary()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            rhs = self.parse_unary()
            lhs = Arith(op=op, lhs=lhs, rhs=rhs)
        return lhs

    def parse_unary(self) -> Term:
        if self.peek().text == "-":
            self.advance()
            return neg(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            value = float(tok.text)
            if value in (float("inf"), float("-inf")):
                raise FormulaSyntaxError(
                    f"number literal {tok.text} overflows", tok.line, tok.column
                )
            return NumLit(value)
        if tok.kind == "ident" and tok.text not in KEYWORDS:
            self.advance()
            if self.peek().text == "(":
                self.advance()
                arg_tok = self.peek()
                arg = self.parse_term()
                self.expect(")")
                if isinstance(arg, Param):
                    # a lone unbound name as the sample time is a typo of
                    # a quantifier variable, not a parameter reference
                    raise UnboundVariable(arg.name, arg_tok.line, arg_tok.column)
                return Signal(name=tok.text, time=arg)
            if tok.text in self.scope:
                return Var(tok.text)
            return Param(tok.text)
        if tok.text == "(":
            self.advance()
            inner = self.parse_term()
            self.expect(")")
            return inner
        raise FormulaSyntaxError(
            f"expected a term, found {tok.text or 'end of input'!r}",
            tok.line,
            tok.column,
        )


def parse_formula(text: str) -> Formula:
    parser = _Parser(text)
    formula = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise FormulaSyntaxError(
            f"unexpected trailing input {tok.text!r}", tok.line, tok.column
        )
    return formula


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    term = parser.parse_term()
    tok = parser.peek()
    if tok.kind != "eof":
        raise FormulaSyntaxError(
            f"unexpected trailing input {tok.text!r}", tok.line, tok.column
        )
    return term


# --- pretty printer ---------------------------------------------------------

_TERM_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _print_term(term: Term, parent_prec: int = 0, right: bool = False) -> str:
    if isinstance(term, NumLit):
        return repr(term.value)
    if isinstance(term, (Param, Var)):
        return term.name
    if isinstance(term, Signal):
        return f"{term.name}({_print_term(term.time)})"
    if isinstance(term, Neg):
        return f"-{_print_term(term.operand, 3)}"
    if isinstance(term, Arith):
        prec = _TERM_PREC[term.op]
        text = (
            f"{_print_term(term.lhs, prec)} {term.op} "
            f"{_print_term(term.rhs, prec, right=True)}"
        )
        if prec < parent_prec or (prec == parent_prec and right):
            return f"({text})"
        return text
    raise TypeError(f"not a term: {term!r}")


# formula precedence levels: implies/quantifier 0, or 1, and 2, not 3, atom 4
def _print_formula(f: Formula, parent_prec: int = 0) -> str:
    if isinstance(f, Literal):
        return "true" if f.value else "false"
    if isinstance(f, BoolSignal):
        return f"{f.name}({_print_term(f.time)})"
    if isinstance(f, Compare):
        return f"{_print_term(f.lhs)} {f.op} {_print_term(f.rhs)}"
    if isinstance(f, Not):
        return f"not {_print_formula(f.operand, 3)}"
    if isinstance(f, And):
        text = " and ".join(_print_formula(x, 3) for x in f.items)
        return f"({text})" if parent_prec > 2 else text
    if isinstance(f, Or):
        text = " or ".join(_print_formula(x, 2) for x in f.items)
        return f"({text})" if parent_prec > 1 else text
    if isinstance(f, Implies):
        text = (
            f"{_print_formula(f.antecedent, 1)} -> "
            f"{_print_formula(f.consequent, 0)}"
        )
        return f"({text})" if parent_prec > 0 else text
    if isinstance(f, Quantifier):
        if isinstance(f.domain, TraceDomain):
            dom = "trace"
        else:
            dom = f"[{_print_term(f.domain.lo)}, {_print_term(f.domain.hi)}]"
        text = f"{f.kind} {f.var} in {dom}: {_print_formula(f.body, 0)}"
        return f"({text})" if parent_prec > 0 else text
    raise TypeError(f"not a formula: {f!r}")


def pretty_print(f: Formula) -> str:
    """Canonical text form; parsing it yields a structurally equal AST."""
    return _print_formula(f)


def print_term(term: Term) -> str:
    return _print_term(term)


# --- analysis ----------------------------------------------------------------


def _walk_term(term: Term, params: set, signals: set) -> None:
    if isinstance(term, Param):
        params.add(term.name)
    elif isinstance(term, Signal):
        signals.add(term.name)
        _walk_term(term.time, params, signals)
    elif isinstance(term, Arith):
        _walk_term(term.lhs, params, signals)
        _walk_term(term.rhs, params, signals)
    elif isinstance(term, Neg):
        _walk_term(term.operand, params, signals)


def free_symbols(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Parameter names and signal names referenced anywhere in the formula."""
    params: set[str] = set()
    signals: set[str] = set()

    def walk(node: Formula) -> None:
        if isinstance(node, Literal):
            return
        if isinstance(node, BoolSignal):
            signals.add(node.name)
            _walk_term(node.time, params, signals)
        elif isinstance(node, Compare):
            _walk_term(node.lhs, params, signals)
            _walk_term(node.rhs, params, signals)
        elif isinstance(node, Not):
            walk(node.operand)
        elif isinstance(node, (And, Or)):
            for item in node.items:
                walk(item)
        elif isinstance(node, Implies):
            walk(node.antecedent)
            walk(node.consequent)
        elif isinstance(node, Quantifier):
            if isinstance(node.domain, Interval):
                _walk_term(node.domain.lo, params, signals)
                _walk_term(node.domain.hi, params, signals)
            walk(node.body)

    walk(f)
    return frozenset(params), frozenset(signals)


def term_params(term: Term) -> frozenset[str]:
    params: set[str] = set()
    signals: set[str] = set()
    _walk_term(term, params, signals)
    return frozenset(params)


def term_signals(term: Term) -> frozenset[str]:
    params: set[str] = set()
    signals: set[str] = set()
    _walk_term(term, params, signals)
    return frozenset(signals)


def substitute_var(f: Formula, var: str, value: float) -> Formula:
    """Replace free occurrences of a quantifier variable with a constant."""

    def sub_term(term: Term) -> Term:
        if isinstance(term, Var) and term.name == var:
            return NumLit(value)
        if isinstance(term, Signal):
            return Signal(term.name, sub_term(term.time))
        if isinstance(term, Arith):
            return Arith(term.op, sub_term(term.lhs), sub_term(term.rhs))
        if isinstance(term, Neg):
            return neg(sub_term(term.operand))
        return term

    def sub(node: Formula) -> Formula:
        if isinstance(node, Literal):
            return node
        if isinstance(node, BoolSignal):
            return BoolSignal(node.name, sub_term(node.time))
        if isinstance(node, Compare):
            return Compare(node.op, sub_term(node.lhs), sub_term(node.rhs))
        if isinstance(node, Not):
            return Not(sub(node.operand))
        if isinstance(node, And):
            return And(tuple(sub(x) for x in node.items))
        if isinstance(node, Or):
            return Or(tuple(sub(x) for x in node.items))
        if isinstance(node, Implies):
            return Implies(sub(node.antecedent), sub(node.consequent))
        if isinstance(node, Quantifier):
            domain = node.domain
            if isinstance(domain, Interval):
                domain = Interval(sub_term(domain.lo), sub_term(domain.hi))
            if node.var == var:  # shadowed below this binder
                return Quantifier(node.kind, node.var, domain, node.body)
            return Quantifier(node.kind, node.var, domain, sub(node.body))
        raise TypeError(f"not a formula: {node!r}")

    return sub(f)
