"""A small term language over the generating functions.

Concrete syntax::

    x1, x2, ...            variables (1-based)
    s /\\ t   s \\/ t        meet, join
    chi[a](t)  mu[a](t)    unary generators, ``a`` an element name
    s (+)[b] t             oplus_b
    name(t, ..., t)        registered external function

Precedence, tightest first: ``(+)[b]``, ``/\\``, ``\\/``; all left-associative.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .basis import _chi_values, _mu_values, _oplus_grid, interior_tuples, nontop_indices, nonzero_indices
from .errors import ArityMismatch, NotAggregation, TermSyntaxError, UnboundVariable, UnknownExternal
from .fntable import FnTable, coords, encode_many, is_aggregation
from .lattice import Elem, Lattice


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Join:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Chi:
    a: Elem
    arg: "Term"


@dataclass(frozen=True)
class Mu:
    a: Elem
    arg: "Term"


@dataclass(frozen=True)
class Oplus:
    b: Elem
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Ext:
    name: str
    args: tuple["Term", ...]


Term = Union[Var, Meet, Join, Chi, Mu, Oplus, Ext]
ExtRegistry = Mapping[str, FnTable]


def max_var(t: Term) -> int:
    stack, best, visited = [t], 0, set()
    while stack:
        s = stack.pop()
        if id(s) in visited:
            continue
        visited.add(id(s))
        if isinstance(s, Var):
            best = max(best, s.index)
        elif isinstance(s, (Meet, Join)):
            stack += [s.left, s.right]
        elif isinstance(s, (Chi, Mu)):
            stack.append(s.arg)
        elif isinstance(s, Oplus):
            stack += [s.left, s.right]
        else:
            stack += list(s.args)
    return best


def _external(reg: ExtRegistry | None, name: str, n_args: int) -> FnTable:
    if reg is None or name not in reg:
        raise UnknownExternal(f"no external function named {name!r}")
    table = reg[name]
    if table.arity != n_args:
        raise ArityMismatch(f"{name} has arity {table.arity}, applied to {n_args} argument(s)")
    return table


# evaluation ----------------------------------------------------------------


def evaluate(t: Term, lattice: Lattice, env: Sequence[Elem], reg: ExtRegistry | None = None) -> Elem:
    """Value of ``t`` with ``x_i`` bound to ``env[i-1]``."""
    if isinstance(t, Var):
        if not 1 <= t.index <= len(env):
            raise UnboundVariable(f"x{t.index} is not bound by an environment of length {len(env)}")
        return int(env[t.index - 1])
    if isinstance(t, Meet):
        return int(lattice.meet[evaluate(t.left, lattice, env, reg), evaluate(t.right, lattice, env, reg)])
    if isinstance(t, Join):
        return int(lattice.join[evaluate(t.left, lattice, env, reg), evaluate(t.right, lattice, env, reg)])
    if isinstance(t, Chi):
        return int(_chi_values(lattice, t.a)[evaluate(t.arg, lattice, env, reg)])
    if isinstance(t, Mu):
        return int(_mu_values(lattice, t.a)[evaluate(t.arg, lattice, env, reg)])
    if isinstance(t, Oplus):
        left = evaluate(t.left, lattice, env, reg)
        right = evaluate(t.right, lattice, env, reg)
        return int(_oplus_grid(lattice, t.b)[left, right])
    table = _external(reg, t.name, len(t.args))
    return table(*(evaluate(s, lattice, env, reg) for s in t.args))


def term_to_table(t: Term, lattice: Lattice, arity: int, reg: ExtRegistry | None = None) -> FnTable:
    """Evaluate ``t`` on every tuple of ``L**arity`` at once."""
    if arity < 1:
        raise ValueError("arity must be at least 1")
    need = max_var(t)
    if need > arity:
        raise UnboundVariable(f"x{need} exceeds arity {arity}")
    grid = coords(lattice.size, arity)
    memo: dict[int, np.ndarray] = {}
    unary: dict[tuple[str, Elem], np.ndarray] = {}

    def table_for(kind: str, a: Elem) -> np.ndarray:
        key = (kind, a)
        if key not in unary:
            if kind == "chi":
                unary[key] = _chi_values(lattice, a)
            elif kind == "mu":
                unary[key] = _mu_values(lattice, a)
            else:
                unary[key] = _oplus_grid(lattice, a)
        return unary[key]

    def run(s: Term) -> np.ndarray:
        got = memo.get(id(s))
        if got is not None:
            return got
        if isinstance(s, (Meet, Join)):
            # flatten same-connective chains to keep recursion shallow
            op = type(s)
            table = lattice.meet if op is Meet else lattice.join
            items, stack = [], [s]
            while stack:
                u = stack.pop()
                if type(u) is op and id(u) not in memo:
                    stack += [u.right, u.left]
                else:
                    items.append(u)
            out = run(items[0])
            for u in items[1:]:
                out = table[out, run(u)]
        elif isinstance(s, Var):
            out = grid[s.index - 1]
        elif isinstance(s, Chi):
            out = table_for("chi", s.a)[run(s.arg)]
        elif isinstance(s, Mu):
            out = table_for("mu", s.a)[run(s.arg)]
        elif isinstance(s, Oplus):
            out = table_for("oplus", s.b)[run(s.left), run(s.right)]
        else:
            ext = _external(reg, s.name, len(s.args))
            out = ext.values[encode_many([run(u) for u in s.args], lattice.size)]
        memo[id(s)] = out
        return out

    return FnTable(lattice, arity, run(t))


# synthesis -----------------------------------------------------------------


def _fold(b: Elem, arity: int, variables: Sequence[Var]) -> Term:
    if arity == 1:
        return Oplus(b, variables[0], variables[0])
    acc: Term = variables[0]
    for v in variables[1:]:
        acc = Oplus(b, acc, v)
    return acc


def _chain(op, items: Sequence[Term]) -> Term:
    acc = items[0]
    for t in items[1:]:
        acc = op(acc, t)
    return acc


def _right_nested(op, items: Sequence[Term]) -> Term:
    acc = items[-1]
    for t in reversed(items[:-1]):
        acc = op(t, acc)
    return acc


def _blocks(f: FnTable, dual: bool) -> list[tuple[tuple[Elem, ...], Term]]:
    if not is_aggregation(f):
        raise NotAggregation("only aggregation functions can be synthesized")
    lat, n = f.lattice, f.arity
    variables = [Var(i) for i in range(1, n + 1)]
    unary_nodes: dict[tuple[int, Elem], Term] = {}
    folds: dict[Elem, Term] = {}
    out = []
    for a in interior_tuples(lat, n):
        b = f(*a)
        if b not in folds:
            folds[b] = _fold(b, n, variables)
        positions = nontop_indices(lat, a) if dual else nonzero_indices(lat, a)
        guards = []
        for i in positions:
            key = (i, a[i - 1])
            if key not in unary_nodes:
                cls = Mu if dual else Chi
                unary_nodes[key] = cls(a[i - 1], variables[i - 1])
            guards.append(unary_nodes[key])
        if dual:
            out.append((a, Join(_chain(Join, guards), folds[b])))
        else:
            out.append((a, Meet(_chain(Meet, guards), folds[b])))
    return out


def h_terms(f: FnTable) -> list[tuple[tuple[Elem, ...], Term]]:
    """The (a, h_a term) pairs of the join decomposition, ascending in a."""
    return _blocks(f, dual=False)


def g_terms(f: FnTable) -> list[tuple[tuple[Elem, ...], Term]]:
    return _blocks(f, dual=True)


def synthesize(f: FnTable) -> Term:
    """Closed term over meet, join, chi and oplus whose table is ``f``.

    Joins the h_a terms for every interior tuple a, right-nested in ascending
    order of a.  With no interior tuples the only candidate is ``x1``.
    """
    blocks = h_terms(f)
    if not blocks:
        return Var(1)
    return _right_nested(Join, [t for _, t in blocks])


def synthesize_dual(f: FnTable) -> Term:
    """Meet of the g_a terms: a term over meet, join, mu and oplus."""
    blocks = g_terms(f)
    if not blocks:
        return Var(1)
    return _right_nested(Meet, [t for _, t in blocks])


def top_level(t: Term, op) -> list[Term]:
    """Split a right-nested chain of ``op`` into its operands."""
    out = []
    while isinstance(t, op):
        out.append(t.left)
        t = t.right
    out.append(t)
    return out


def dualize(t: Term, lattice: Lattice) -> Term:
    """Swap meet/join and chi/mu, mapping elements onto ``dual(lattice)``."""
    rev = lambda x: lattice.size - 1 - x  # noqa: E731
    if isinstance(t, Var):
        return t
    if isinstance(t, Meet):
        return Join(dualize(t.left, lattice), dualize(t.right, lattice))
    if isinstance(t, Join):
        return Meet(dualize(t.left, lattice), dualize(t.right, lattice))
    if isinstance(t, Chi):
        return Mu(rev(t.a), dualize(t.arg, lattice))
    if isinstance(t, Mu):
        return Chi(rev(t.a), dualize(t.arg, lattice))
    if isinstance(t, Oplus):
        return Oplus(rev(t.b), dualize(t.left, lattice), dualize(t.right, lattice))
    return Ext(t.name, tuple(dualize(s, lattice) for s in t.args))


# printing ------------------------------------------------------------------


def _op_key(t: Term):
    if isinstance(t, Join):
        return ("join",)
    if isinstance(t, Meet):
        return ("meet",)
    if isinstance(t, Oplus):
        return ("oplus", t.b)
    return None


def format_term(t: Term, lattice: Lattice) -> str:
    """Canonical text: binary operands are parenthesised unless they continue
    a left-associated chain of the very same operator."""
    names = lattice.names

    def operand(child: Term, parent_key, side: str) -> str:
        text = fmt(child)
        key = _op_key(child)
        if key is None or (key == parent_key and side == "left"):
            return text
        return f"({text})"

    def fmt(s: Term) -> str:
        if isinstance(s, Var):
            return f"x{s.index}"
        if isinstance(s, Chi):
            return f"chi[{names[s.a]}]({fmt(s.arg)})"
        if isinstance(s, Mu):
            return f"mu[{names[s.a]}]({fmt(s.arg)})"
        if isinstance(s, Ext):
            return f"{s.name}({', '.join(fmt(u) for u in s.args)})"
        key = _op_key(s)
        sym = {"join": "\\/", "meet": "/\\"}.get(key[0]) or f"(+)[{names[s.b]}]"
        return f"{operand(s.left, key, 'left')} {sym} {operand(s.right, key, 'right')}"

    return fmt(t)


# parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\\/|/\\|\(\+\)|[\[\](),])|([A-Za-z0-9_]+))")
_VAR = re.compile(r"x([0-9]+)\Z")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        ws_end = pos
        while ws_end < len(text) and text[ws_end].isspace():
            if text[ws_end] == "\n":
                line, line_start = line + 1, ws_end + 1
            ws_end += 1
        if ws_end == len(text):
            break
        if m is None or m.end() == ws_end:
            raise TermSyntaxError(f"unexpected character {text[ws_end]!r}", line, ws_end - line_start + 1)
        tokens.append((m.group(1) or m.group(2), line, ws_end - line_start + 1))
        pos = m.end()
    tokens.append(("<end>", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, lattice: Lattice):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.lattice = lattice

    def peek(self, offset: int = 0) -> str:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)][0]

    def fail(self, message: str):
        _, line, col = self.tokens[self.pos]
        raise TermSyntaxError(message, line, col)

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if expected is not None and tok != expected:
            self.fail(f"expected {expected!r}, found {tok!r}")
        self.pos += 1
        return tok

    def element(self) -> Elem:
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z0-9_]+", tok):
            self.fail(f"expected an element name, found {tok!r}")
        self.pos += 1
        return self.lattice.index(tok)

    def term(self) -> Term:
        acc = self.meet_t()
        while self.peek() == "\\/":
            self.take()
            acc = Join(acc, self.meet_t())
        return acc

    def meet_t(self) -> Term:
        acc = self.oplus_t()
        while self.peek() == "/\\":
            self.take()
            acc = Meet(acc, self.oplus_t())
        return acc

    def oplus_t(self) -> Term:
        acc = self.atom()
        while self.peek() == "(+)":
            self.take()
            self.take("[")
            b = self.element()
            self.take("]")
            acc = Oplus(b, acc, self.atom())
        return acc

    def atom(self) -> Term:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.term()
            self.take(")")
            return inner
        if tok in ("chi", "mu") and self.peek(1) == "[":
            self.take()
            self.take("[")
            a = self.element()
            self.take("]")
            self.take("(")
            arg = self.term()
            self.take(")")
            return Chi(a, arg) if tok == "chi" else Mu(a, arg)
        if _IDENT.match(tok) and self.peek(1) == "(":
            self.take()
            self.take("(")
            args = [self.term()]
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
            return Ext(tok, tuple(args))
        m = _VAR.match(tok)
        if m and int(m.group(1)) >= 1:
            self.take()
            return Var(int(m.group(1)))
        self.fail(f"unexpected token {tok!r}")

    def parse(self) -> Term:
        t = self.term()
        if self.peek() != "<end>":
            self.fail(f"unexpected trailing token {self.peek()!r}")
        return t


def parse_term(text: str, lattice: Lattice) -> Term:
    """Parse concrete syntax; element names are resolved against ``lattice``."""
    return _Parser(text, lattice).parse()
