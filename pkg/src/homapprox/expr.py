"""Exact symbolic expressions in t, x1..xn with rational coefficients.

Node kinds cover what analytic control vector fields need: rational
constants, variables, sums, products, quotients, non-negative integer
powers, negation and the functions sin, cos, exp.  All structural
operations (parsing, differentiation, simplification, evaluation at the
origin) are exact; floating point enters only through ``eval_float``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union


class ExprError(Exception):
    """Base class for expression errors."""


class ExprSyntaxError(ExprError):
    """Raised by the parser; carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(ExprError):
    """Base class for exact-evaluation failures."""


class DivisionByZeroError(EvalError):
    pass


class NonzeroTranscendentalError(EvalError):
    pass


@dataclass(frozen=True, slots=True)
class Expr:
    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True, slots=True)
class Var(Expr):
    # index 0 is the time variable t; index i >= 1 is the state x_i
    index: int


@dataclass(frozen=True, slots=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True, slots=True)
class Prod(Expr):
    factors: tuple


@dataclass(frozen=True, slots=True)
class Quot(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr


FUNCTIONS = ("sin", "cos", "exp")

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
T = Var(0)


def const(value) -> Const:
    return Const(Fraction(value))


def x(i: int) -> Var:
    if i < 1:
        raise ValueError("state variables are numbered from 1")
    return Var(i)


# ---------------------------------------------------------------------------
# canonical ordering key, used to sort terms and factors deterministically

@lru_cache(maxsize=None)
def _key(e: Expr) -> str:
    if isinstance(e, Const):
        return f"0({e.value})"
    if isinstance(e, Var):
        return f"1({e.index:06d})"
    if isinstance(e, Pow):
        return f"3({_key(e.base)},{e.exponent:04d})"
    if isinstance(e, Func):
        return f"4({e.name},{_key(e.arg)})"
    if isinstance(e, Quot):
        return f"5({_key(e.num)},{_key(e.den)})"
    if isinstance(e, Prod):
        return "6(" + ",".join(_key(f) for f in e.factors) + ")"
    if isinstance(e, Sum):
        return "7(" + ",".join(_key(t) for t in e.terms) + ")"
    if isinstance(e, Neg):
        return f"8({_key(e.arg)})"
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# smart constructors; arguments are assumed already simplified

def _split_coeff(e: Expr) -> tuple[Fraction, Expr | None]:
    """Split a simplified term into (rational coefficient, core)."""
    if isinstance(e, Const):
        return e.value, None
    if isinstance(e, Prod) and isinstance(e.factors[0], Const):
        rest = e.factors[1:]
        core = rest[0] if len(rest) == 1 else Prod(rest)
        return e.factors[0].value, core
    return Fraction(1), e


def _with_coeff(coeff: Fraction, core: Expr) -> Expr:
    if coeff == 0:
        return ZERO
    if coeff == 1:
        return core
    if isinstance(core, Prod):
        return Prod((Const(coeff),) + core.factors)
    return Prod((Const(coeff), core))


def mk_sum(terms: Iterable[Expr]) -> Expr:
    const_acc = Fraction(0)
    cores: dict[str, list] = {}
    for term in terms:
        if isinstance(term, Sum):
            inner = term.terms
        else:
            inner = (term,)
        for t in inner:
            coeff, core = _split_coeff(t)
            if core is None:
                const_acc += coeff
            else:
                slot = cores.setdefault(_key(core), [Fraction(0), core])
                slot[0] += coeff
    out = [_with_coeff(c, core) for c, core in cores.values() if c != 0]
    if const_acc != 0:
        out.append(Const(const_acc))
    out.sort(key=_key)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Sum(tuple(out))


def mk_prod(factors: Iterable[Expr]) -> Expr:
    coeff = Fraction(1)
    bases: dict[str, list] = {}

    def feed(base: Expr, exp: int):
        nonlocal coeff
        if isinstance(base, Const):
            coeff *= base.value ** exp
            return
        slot = bases.setdefault(_key(base), [0, base])
        slot[0] += exp

    for f in factors:
        if isinstance(f, Prod):
            parts = f.factors
        else:
            parts = (f,)
        for p in parts:
            if isinstance(p, Pow):
                feed(p.base, p.exponent)
            else:
                feed(p, 1)
    if coeff == 0:
        return ZERO
    out = []
    for exp, base in bases.values():
        if exp == 0:
            continue
        out.append(base if exp == 1 else Pow(base, exp))
    out.sort(key=_key)
    if not out:
        return Const(coeff)
    if coeff != 1:
        out.insert(0, Const(coeff))
    if len(out) == 1:
        return out[0]
    return Prod(tuple(out))


def mk_pow(base: Expr, exponent: int) -> Expr:
    if exponent < 0:
        raise ValueError("exponents must be non-negative integers")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value**exponent)
    if isinstance(base, Pow):
        return mk_pow(base.base, base.exponent * exponent)
    if isinstance(base, Prod):
        return mk_prod(mk_pow(f, exponent) for f in base.factors)
    if isinstance(base, Quot):
        return mk_quot(mk_pow(base.num, exponent), mk_pow(base.den, exponent))
    return Pow(base, exponent)


def mk_quot(num: Expr, den: Expr) -> Expr:
    if isinstance(den, Const):
        if den.value == 0:
            # keep the bad quotient; evaluation reports the error
            return Quot(num, den)
        return mk_prod((Const(1 / den.value), num))
    return Quot(num, den)


def mk_neg(e: Expr) -> Expr:
    return mk_prod((Const(Fraction(-1)), e))


def mk_func(name: str, arg: Expr) -> Expr:
    if arg == ZERO:
        if name == "sin":
            return ZERO
        return ONE  # cos(0) = exp(0) = 1
    return Func(name, arg)


def simplify(e: Expr) -> Expr:
    """Rule-based normal form: flat sorted sums/products, merged like
    terms and repeated factors, folded constants, sin/cos/exp folded at 0.
    Idempotent by construction (smart constructors are fixed points)."""
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Sum):
        return mk_sum(simplify(t) for t in e.terms)
    if isinstance(e, Prod):
        return mk_prod(simplify(f) for f in e.factors)
    if isinstance(e, Quot):
        return mk_quot(simplify(e.num), simplify(e.den))
    if isinstance(e, Pow):
        return mk_pow(simplify(e.base), e.exponent)
    if isinstance(e, Neg):
        return mk_neg(simplify(e.arg))
    if isinstance(e, Func):
        return mk_func(e.name, simplify(e.arg))
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# calculus and evaluation

def differentiate(e: Expr, v: Union[Var, int]) -> Expr:
    """Exact partial derivative with respect to t (index 0) or x_i."""
    idx = v.index if isinstance(v, Var) else int(v)
    return _diff(simplify(e), idx)


def _diff(e: Expr, idx: int) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == idx else ZERO
    if isinstance(e, Sum):
        return mk_sum(_diff(t, idx) for t in e.terms)
    if isinstance(e, Prod):
        terms = []
        for i, f in enumerate(e.factors):
            df = _diff(f, idx)
            if df == ZERO:
                continue
            rest = e.factors[:i] + e.factors[i + 1 :]
            terms.append(mk_prod(rest + (df,)))
        return mk_sum(terms)
    if isinstance(e, Quot):
        dn = _diff(e.num, idx)
        dd = _diff(e.den, idx)
        num = mk_sum((mk_prod((dn, e.den)), mk_neg(mk_prod((e.num, dd)))))
        return mk_quot(num, mk_pow(e.den, 2))
    if isinstance(e, Pow):
        return mk_prod(
            (Const(Fraction(e.exponent)), mk_pow(e.base, e.exponent - 1), _diff(e.base, idx))
        )
    if isinstance(e, Func):
        da = _diff(e.arg, idx)
        if e.name == "sin":
            outer = mk_func("cos", e.arg)
        elif e.name == "cos":
            outer = mk_neg(mk_func("sin", e.arg))
        else:
            outer = mk_func("exp", e.arg)
        return mk_prod((outer, da))
    raise TypeError(f"not an Expr: {e!r}")


def substitute(e: Expr, idx: int, replacement: Expr) -> Expr:
    """Replace the variable with the given index, then simplify."""
    return simplify(_subst(e, idx, replacement))


def _subst(e: Expr, idx: int, rep: Expr) -> Expr:
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return rep if e.index == idx else e
    if isinstance(e, Sum):
        return Sum(tuple(_subst(t, idx, rep) for t in e.terms))
    if isinstance(e, Prod):
        return Prod(tuple(_subst(f, idx, rep) for f in e.factors))
    if isinstance(e, Quot):
        return Quot(_subst(e.num, idx, rep), _subst(e.den, idx, rep))
    if isinstance(e, Pow):
        return Pow(_subst(e.base, idx, rep), e.exponent)
    if isinstance(e, Neg):
        return Neg(_subst(e.arg, idx, rep))
    if isinstance(e, Func):
        return Func(e.name, _subst(e.arg, idx, rep))
    raise TypeError(f"not an Expr: {e!r}")


def eval_at_origin(e: Expr) -> Fraction:
    """Exact value at t = 0, x = 0.

    Transcendental functions are only defined here at argument 0
    (sin 0 = 0, cos 0 = exp 0 = 1); anything else raises, as does a
    vanishing denominator.
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return Fraction(0)
    if isinstance(e, Sum):
        return sum((eval_at_origin(t) for t in e.terms), Fraction(0))
    if isinstance(e, Prod):
        acc = Fraction(1)
        for f in e.factors:
            acc *= eval_at_origin(f)
        return acc
    if isinstance(e, Quot):
        den = eval_at_origin(e.den)
        if den == 0:
            raise DivisionByZeroError("division by zero at the origin")
        return eval_at_origin(e.num) / den
    if isinstance(e, Pow):
        return eval_at_origin(e.base) ** e.exponent
    if isinstance(e, Neg):
        return -eval_at_origin(e.arg)
    if isinstance(e, Func):
        v = eval_at_origin(e.arg)
        if v != 0:
            raise NonzeroTranscendentalError(
                f"{e.name}({v}) has no exact rational value"
            )
        return Fraction(0) if e.name == "sin" else Fraction(1)
    raise TypeError(f"not an Expr: {e!r}")


def eval_float(e: Expr, t: float, xs) -> float:
    """Floating-point value at time t and state vector xs (1-based x_i)."""
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        return t if e.index == 0 else xs[e.index - 1]
    if isinstance(e, Sum):
        return sum(eval_float(term, t, xs) for term in e.terms)
    if isinstance(e, Prod):
        acc = 1.0
        for f in e.factors:
            acc *= eval_float(f, t, xs)
        return acc
    if isinstance(e, Quot):
        return eval_float(e.num, t, xs) / eval_float(e.den, t, xs)
    if isinstance(e, Pow):
        return eval_float(e.base, t, xs) ** e.exponent
    if isinstance(e, Neg):
        return -eval_float(e.arg, t, xs)
    if isinstance(e, Func):
        return getattr(math, e.name)(eval_float(e.arg, t, xs))
    raise TypeError(f"not an Expr: {e!r}")


def variables(e: Expr) -> set[int]:
    """Indices of all variables occurring in the expression."""
    if isinstance(e, Const):
        return set()
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Sum):
        out = set()
        for t in e.terms:
            out |= variables(t)
        return out
    if isinstance(e, Prod):
        out = set()
        for f in e.factors:
            out |= variables(f)
        return out
    if isinstance(e, Quot):
        return variables(e.num) | variables(e.den)
    if isinstance(e, (Pow,)):
        return variables(e.base)
    if isinstance(e, (Neg, Func)):
        return variables(e.arg)
    raise TypeError(f"not an Expr: {e!r}")


# ---------------------------------------------------------------------------
# parsing

_WS = " \t\r\n"


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        raise ExprSyntaxError(message, self.pos if pos is None else pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in _WS:
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        c = self.peek()
        self.pos += 1
        return c

    def parse(self) -> Expr:
        e = self.parse_sum()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return e

    def parse_sum(self) -> Expr:
        terms = [self.parse_term()]
        while True:
            c = self.peek()
            if c == "+":
                self.take()
                terms.append(self.parse_term())
            elif c == "-":
                self.take()
                terms.append(_negate_parsed(self.parse_term()))
            else:
                break
        if len(terms) == 1:
            return terms[0]
        return Sum(tuple(terms))

    def parse_term(self) -> Expr:
        if self.peek() == "-":
            self.take()
            return _negate_parsed(self.parse_chain())
        return self.parse_chain()

    def parse_chain(self) -> Expr:
        cur = self.parse_postfix()
        while True:
            c = self.peek()
            if c == "*":
                self.take()
                rhs = self.parse_postfix()
                if isinstance(cur, Prod):
                    cur = Prod(cur.factors + (rhs,))
                else:
                    cur = Prod((cur, rhs))
            elif c == "/":
                self.take()
                rhs = self.parse_postfix()
                if (
                    isinstance(cur, Const)
                    and isinstance(rhs, Const)
                    and rhs.value != 0
                ):
                    cur = Const(cur.value / rhs.value)
                else:
                    cur = Quot(cur, rhs)
            else:
                return cur

    def parse_postfix(self) -> Expr:
        e = self.parse_atom()
        while self.peek() == "^":
            self.take()
            e = Pow(e, self.parse_exponent())
        return e

    def parse_exponent(self) -> int:
        self.skip_ws()
        start = self.pos
        if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
            self.error("'^' requires a non-negative integer literal", start)
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.error("'^' requires an integer exponent, not a decimal", start)
        return int(self.text[start : self.pos])

    def parse_atom(self) -> Expr:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.take()
            e = self.parse_sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return e
        if c.isdigit():
            return self.parse_number()
        if c.isalpha():
            return self.parse_name()
        if c == "":
            self.error("unexpected end of input", start)
        self.error(f"unexpected character {c!r}", start)

    def parse_number(self) -> Const:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            if not (self.pos < len(self.text) and self.text[self.pos].isdigit()):
                self.error("expected digits after decimal point", self.pos)
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
        return Const(Fraction(self.text[start : self.pos]))

    def parse_name(self) -> Expr:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalnum():
            self.pos += 1
        name = self.text[start : self.pos]
        if name in FUNCTIONS:
            if self.peek() != "(":
                self.error(f"{name} requires a parenthesized argument", start)
            self.take()
            arg = self.parse_sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return Func(name, arg)
        if name == "t":
            return T
        if name.startswith("x") and name[1:].isdigit():
            idx = int(name[1:])
            if idx < 1 or idx > self.n:
                self.error(f"variable {name} out of range (n={self.n})", start)
            return Var(idx)
        self.error(f"unknown identifier {name!r}", start)


def _negate_parsed(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Prod) and isinstance(e.factors[0], Const):
        return Prod((Const(-e.factors[0].value),) + e.factors[1:])
    if isinstance(e, Quot):
        # -n/d means (-n)/d; fold the sign when the numerator absorbs it
        folded = _negate_parsed(e.num)
        if not isinstance(folded, Neg):
            return Quot(folded, e.den)
    return Neg(e)


def parse_expr(text: str, n: int = 10) -> Expr:
    """Parse the ASCII grammar: +, -, *, /, ^k, parentheses, sin/cos/exp,
    integer/rational/decimal literals, variables t and x1..xn.  There is
    no implicit multiplication."""
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# rendering; render(simplify(e)) reparses to exactly simplify(e)

def _is_pow_atom(e: Expr) -> bool:
    if isinstance(e, (Var, Func)):
        return True
    return isinstance(e, Const) and e.value.denominator == 1 and e.value >= 0


def render(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return "t" if e.index == 0 else f"x{e.index}"
    if isinstance(e, Func):
        return f"{e.name}({render(e.arg)})"
    if isinstance(e, Pow):
        base = render(e.base)
        if not _is_pow_atom(e.base):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Neg):
        inner = render(e.arg)
        if isinstance(e.arg, Sum) or inner.startswith("-"):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Prod):
        pieces = []
        for i, f in enumerate(e.factors):
            s = render(f)
            if isinstance(f, (Sum, Quot)) or (i > 0 and s.startswith("-")):
                s = f"({s})"
            pieces.append(s)
        return "*".join(pieces)
    if isinstance(e, Quot):
        num = render(e.num)
        if isinstance(e.num, Sum):
            num = f"({num})"
        den = render(e.den)
        if not (_is_pow_atom(e.den) or isinstance(e.den, Pow)):
            den = f"({den})"
        return f"{num}/{den}"
    if isinstance(e, Sum):
        out = render(e.terms[0])
        for term in e.terms[1:]:
            coeff, core = _split_coeff(term)
            if coeff >= 0:
                out += " + " + render(term)
            elif core is None:
                out += " - " + str(-coeff)
            elif coeff == -1:
                # explicit 1* so the binary minus folds back into the
                # constant and reparsing reproduces the tree exactly
                inner = render(core)
                if isinstance(core, (Sum, Quot)):
                    inner = f"({inner})"
                out += " - 1*" + inner
            else:
                out += " - " + render(_with_coeff(-coeff, core))
        return out
    raise TypeError(f"not an Expr: {e!r}")


def expr_to_str(e: Expr) -> str:
    """Canonical text of the simplified expression."""
    return render(simplify(e))
