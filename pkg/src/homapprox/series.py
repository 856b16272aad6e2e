"""Moment series of a single-input control-affine system.

The coefficient attached to the word (m1, ..., mk) is

    v = ((-1)^k / (m1! ... mk!)) ad_{R_a}^{m1} R_b ... ad_{R_a}^{mk} R_b E

evaluated at t = 0, x = 0 and applied to the identity map E, where
R_a f = f_t + f_x a and R_b f = f_x b.  Operator stacks are memoized by
(ad power, suffix word, R_a power), never by expression trees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .algebra import AlgElem, Word, enumerate_basis, word_order


class EquilibriumError(ValueError):
    """a(t,0) is not identically zero (or cannot be certified zero)."""


@dataclass(frozen=True)
class ControlSystem:
    """dx/dt = a(t,x) + b(t,x) u with analytic right-hand sides."""

    n: int
    a: tuple
    b: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("state dimension must be >= 1")
        if len(self.a) != self.n or len(self.b) != self.n:
            raise ValueError("a and b must each have n components")
        for f in (*self.a, *self.b):
            bad = [i for i in ex.variables(f) if i > self.n]
            if bad:
                raise ValueError(f"component uses x{max(bad)} but n = {self.n}")

    def render(self) -> list:
        lines = []
        for i in range(self.n):
            lines.append(
                f"dx{i + 1}/dt = {ex.expr_to_str(self.a[i])}"
                f" + ({ex.expr_to_str(self.b[i])})*u"
            )
        return lines


def system_from_strings(n: int, a_strs, b_strs) -> ControlSystem:
    a = tuple(ex.simplify(ex.parse_expr(s, n)) for s in a_strs)
    b = tuple(ex.simplify(ex.parse_expr(s, n)) for s in b_strs)
    return ControlSystem(n, a, b)


def _drift_at_zero_state(component, n: int):
    out = component
    for j in range(1, n + 1):
        out = ex.substitute(out, j, ex.ZERO)
    return out


def validate_equilibrium(sys: ControlSystem) -> None:
    """Require a(t,0) = 0: symbolically if simplification reaches 0,
    otherwise by exact evaluation at 20 rational times."""
    for i, ai in enumerate(sys.a):
        at0 = _drift_at_zero_state(ai, sys.n)
        if at0 == ex.ZERO:
            continue
        for k in range(1, 21):
            t_val = Fraction(k if k <= 10 else 10 - k, 7)
            try:
                val = ex.eval_at_origin(ex.substitute(at0, 0, ex.Const(t_val)))
            except ex.EvalError as err:
                raise EquilibriumError(
                    f"a{i + 1}(t,0) cannot be certified zero at t={t_val}: {err}; "
                    "rewrite the drift so a(t,0) simplifies to 0"
                ) from err
            if val != 0:
                raise EquilibriumError(
                    f"a{i + 1}(t,0) = {val} != 0 at t = {t_val}; "
                    "the origin must be an equilibrium of the drift"
                )


def apply_R_a(sys: ControlSystem, fs) -> tuple:
    """Componentwise f_t + f_x a."""
    out = []
    for f in fs:
        terms = [ex.differentiate(f, 0)]
        for j in range(1, sys.n + 1):
            terms.append(ex.mk_prod((ex.differentiate(f, j), sys.a[j - 1])))
        out.append(ex.mk_sum(terms))
    return tuple(out)


def apply_R_b(sys: ControlSystem, fs) -> tuple:
    """Componentwise f_x b."""
    out = []
    for f in fs:
        terms = []
        for j in range(1, sys.n + 1):
            terms.append(ex.mk_prod((ex.differentiate(f, j), sys.b[j - 1])))
        out.append(ex.mk_sum(terms))
    return tuple(out)


@dataclass
class SeriesTable:
    """Moment coefficients v(w) for all words of order <= N (zeros omitted)."""

    n: int
    N: int
    coeffs: dict

    def v(self, w: Word) -> tuple:
        w = tuple(w)
        if word_order(w) > self.N:
            raise ValueError(f"word {w} has order {word_order(w)} > N = {self.N}")
        return self.coeffs.get(w, (Fraction(0),) * self.n)

    def v_elem(self, e: AlgElem) -> tuple:
        """Linear extension to algebra elements of order <= N."""
        acc = [Fraction(0)] * self.n
        for w, c in e.terms.items():
            if w == ():
                raise ValueError("moment functional is undefined on scalars")
            vw = self.v(w)
            for i in range(self.n):
                acc[i] += c * vw[i]
        return tuple(acc)

    def nonzero_items(self) -> list:
        from .algebra import word_sort_key

        return sorted(self.coeffs.items(), key=lambda p: word_sort_key(p[0]))

    def to_json(self) -> list:
        return [
            {"word": list(w), "coeff": [str(c) for c in vec]}
            for w, vec in self.nonzero_items()
        ]


class SeriesComputer:
    """Evaluates moment coefficients with shared operator-stack memos, so
    extending the order reuses all previous work."""

    def __init__(self, sys: ControlSystem):
        validate_equilibrium(sys)
        self.sys = sys
        identity = tuple(ex.Var(i) for i in range(1, sys.n + 1))
        self._ra_powers: dict = {((), 0): identity}
        self._ad: dict = {}
        self._vectors: dict = {}

    def _ra(self, w: Word, p: int) -> tuple:
        key = (w, p)
        got = self._ra_powers.get(key)
        if got is None:
            if p == 0:
                got = self._stack(w)
            else:
                got = apply_R_a(self.sys, self._ra(w, p - 1))
            self._ra_powers[key] = got
        return got

    def _stack(self, w: Word) -> tuple:
        # operator stack of the whole suffix word applied to the identity
        if not w:
            return self._ra_powers[((), 0)]
        return self._ad_vec(w[0], w[1:], 0)

    def _ad_vec(self, j: int, w: Word, p: int) -> tuple:
        """(ad_{R_a}^j R_b) applied to R_a^p (stack of w)."""
        key = (j, w, p)
        got = self._ad.get(key)
        if got is not None:
            return got
        if j == 0:
            got = apply_R_b(self.sys, self._ra(w, p))
        else:
            left = apply_R_a(self.sys, self._ad_vec(j - 1, w, p))
            right = self._ad_vec(j - 1, w, p + 1)
            got = tuple(
                ex.mk_sum((l, ex.mk_neg(r))) for l, r in zip(left, right)
            )
        self._ad[key] = got
        return got

    def moment_vector(self, w: Word) -> tuple:
        w = tuple(w)
        if not w:
            raise ValueError("moment words are non-empty")
        got = self._vectors.get(w)
        if got is not None:
            return got
        exprs = self._stack(w)
        denom = 1
        for m in w:
            denom *= math.factorial(m)
        scale = Fraction((-1) ** len(w), denom)
        vec = tuple(scale * ex.eval_at_origin(f) for f in exprs)
        self._vectors[w] = vec
        return vec

    def table_up_to(self, N: int) -> SeriesTable:
        coeffs = {}
        for m in range(1, N + 1):
            for w in enumerate_basis(m):
                vec = self.moment_vector(w)
                if any(c != 0 for c in vec):
                    coeffs[w] = vec
        return SeriesTable(self.sys.n, N, coeffs)


def moment_coefficient(sys: ControlSystem, w: Word) -> tuple:
    return SeriesComputer(sys).moment_vector(w)


def series_up_to(sys: ControlSystem, N: int) -> SeriesTable:
    return SeriesComputer(sys).table_up_to(N)


def lie_coefficient(table: SeriesTable, elem) -> tuple:
    """v applied to a Lie basis element (or any algebra element)."""
    e = elem.expansion if hasattr(elem, "expansion") else elem
    return table.v_elem(e)
