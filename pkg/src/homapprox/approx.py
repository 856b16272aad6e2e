"""Homogeneous approximation pipeline.

From the moment series of a system the pipeline selects the core Lie
elements l_1..l_n (whose images under v are independent) together with
correction elements d_j generating a right ideal, projects each l_i onto
the orthogonal complement of the ideal's graded blocks, and reconstructs
polynomial approximating systems from the projected elements: always a
non-autonomous one, and an autonomous one exactly when the phi/psi
images of every projected element are shuffle polynomials in the
previous ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from .algebra import (
    AlgElem,
    Word,
    concat,
    devectorize,
    enumerate_basis,
    phi,
    psi,
    shuffle,
    vectorize,
)
from .lie import build_lie_basis
from .linalg import IntEchelon, dot_int, scale_to_int, solve_particular, solve_square
from .series import ControlSystem, SeriesComputer, SeriesTable

DEFAULT_MAX_ORDER = 13


class NotAccessibleError(Exception):
    """Fewer than n independent Lie coefficient directions up to order N."""

    def __init__(self, n: int, N: int, achieved: int):
        super().__init__(
            f"only {achieved} of {n} independent directions found up to order {N}; "
            "the system is not accessible at this order"
        )
        self.n = n
        self.N = N
        self.achieved = achieved


class NotRepresentableError(Exception):
    """An element is not a shuffle polynomial in the given generators."""

    def __init__(self, elem: AlgElem, order: int):
        super().__init__(
            f"element of order {order} is not a shuffle polynomial "
            f"in the projected core: {elem}"
        )
        self.elem = elem
        self.order = order


class InternalConsistencyError(Exception):
    """The construction violated one of its own guaranteed invariants."""


@dataclass
class CoreElement:
    index: int  # 1-based position g_i in the Lie basis
    word: Word
    elem: AlgElem
    order: int
    vcoeff: tuple


@dataclass
class IdealGenerator:
    elem: AlgElem
    order: int
    # combination over Lie basis indices, e.g. d = g_7 + 6 g_6
    combo: tuple


@dataclass
class CoreDecomposition:
    n: int
    ell: list
    dees: list

    @property
    def weights(self) -> tuple:
        return tuple(l.order for l in self.ell)


@dataclass
class IdealBlock:
    order: int
    dim: int
    rows: list  # independent AlgElem rows, generation order
    echelon: IntEchelon

    @property
    def rank(self) -> int:
        return self.echelon.rank


@dataclass
class ShufflePolynomial:
    """Rational polynomial in shuffle powers of the projected core
    elements; keys are exponent multi-indices over those generators."""

    weights: tuple
    degree: int
    terms: dict


@dataclass
class NoAutonomousApproximation:
    """Witness that the autonomous construction fails: the phi or psi
    image of l~_i is not a shuffle polynomial in l~_1..l~_{i-1}."""

    index: int  # 1-based i of the failing projected element
    kind: str  # "phi" or "psi"
    witness: AlgElem
    order: int


Monomial = tuple  # (t_power, (x1_power, ..., xn_power))


@dataclass
class PolynomialSystem:
    """dx_i/dt = a_i(t,x) + b_i(t,x) u with polynomial components stored
    as monomial -> coefficient maps."""

    n: int
    weights: tuple
    a: list
    b: list

    def is_autonomous(self) -> bool:
        for comp in (*self.a, *self.b):
            for (t_pow, _), _ in comp.items():
                if t_pow:
                    return False
        return True

    def component_expr(self, comp: dict) -> ex.Expr:
        terms = []
        for (t_pow, x_pows), c in sorted(comp.items()):
            factors = [ex.Const(c)]
            if t_pow:
                factors.append(ex.mk_pow(ex.T, t_pow))
            for j, q in enumerate(x_pows):
                if q:
                    factors.append(ex.mk_pow(ex.Var(j + 1), q))
            terms.append(ex.mk_prod(factors))
        return ex.mk_sum(terms)

    def to_control_system(self) -> ControlSystem:
        a = tuple(self.component_expr(c) for c in self.a)
        b = tuple(self.component_expr(c) for c in self.b)
        return ControlSystem(self.n, a, b)


@dataclass
class ApproximationResult:
    system: ControlSystem
    N: int
    table: SeriesTable
    basis: list
    core: CoreDecomposition
    blocks: dict
    projected: list  # l~_i as AlgElem, same order as core.ell
    nonautonomous: PolynomialSystem
    autonomous: object  # PolynomialSystem | NoAutonomousApproximation

    @property
    def weights(self) -> tuple:
        return self.core.weights

    def autonomous_exists(self) -> bool:
        return isinstance(self.autonomous, PolynomialSystem)


def _leading_coeff(e: AlgElem) -> Fraction:
    return e.terms[e.support()[0]]


def select_core(table: SeriesTable, basis: list, n: int) -> CoreDecomposition:
    """Split the Lie basis into core elements l (independent v-images)
    and corrected ideal generators d, scanning order by order."""
    ell: list = []
    dees: list = []
    ech = IntEchelon(n)
    by_order: dict = {}
    for g in basis:
        by_order.setdefault(g.order, []).append(g)
    for m in range(1, table.N + 1):
        for g in by_order.get(m, []):
            vec = table.v_elem(g.expansion)
            if len(ell) < n and ech.add(scale_to_int(vec)):
                ell.append(CoreElement(g.index, g.word, g.expansion, m, vec))
                continue
            # v(g) lies in span{v(l_j)}; correct with same-order l's so the
            # corrected element's v-image drops into the lower-order span
            lower = [l.vcoeff for l in ell if l.order < m]
            same = [l for l in ell if l.order == m]
            sol = solve_particular(lower + [l.vcoeff for l in same], vec)
            if sol is None:
                raise InternalConsistencyError(
                    f"v(g_{g.index}) escapes the span of the selected core"
                )
            corr = sol[len(lower):]
            d_elem = g.expansion
            combo = [(Fraction(1), g.index)]
            for c, l in zip(corr, same):
                if c != 0:
                    d_elem = d_elem + (-c) * l.elem
                    combo.append((-c, l.index))
            if _leading_coeff(d_elem) < 0:
                d_elem = -d_elem
                combo = [(-c, i) for c, i in combo]
            dees.append(IdealGenerator(d_elem, m, tuple(combo)))
        if len(ell) == n:
            return CoreDecomposition(n, ell, dees)
    raise NotAccessibleError(n, table.N, len(ell))


def build_ideal_blocks(core: CoreDecomposition) -> dict:
    """Graded blocks of the right ideal generated by the d's, at each
    core order: rows d_j (order m) and d_j xi_s (order(s) = m - order(d_j)),
    dependent rows discarded, earlier rows kept."""
    blocks: dict = {}
    for m in sorted(set(core.weights)):
        width = len(enumerate_basis(m))
        ech = IntEchelon(width)
        rows = []
        for d in core.dees:
            if d.order > m:
                continue
            if d.order == m:
                candidates = [d.elem]
            else:
                candidates = [
                    concat(d.elem, AlgElem.from_word(s))
                    for s in enumerate_basis(m - d.order)
                ]
            for r in candidates:
                if ech.add(scale_to_int(vectorize(r, m))):
                    rows.append(r)
        blocks[m] = IdealBlock(m, width, rows, ech)
    return blocks


def project_core(core: CoreDecomposition, blocks: dict) -> list:
    """Orthogonal projection of each l_i onto the complement of its
    block's row space, via exact normal equations over a kernel basis."""
    out = []
    kernel_cache: dict = {}
    for l in core.ell:
        m = l.order
        block = blocks[m]
        if block.rank == 0:
            out.append(l.elem)
            continue
        if m not in kernel_cache:
            kernel_cache[m] = block.echelon.nullspace_basis()
        kernel = kernel_cache[m]
        if not kernel:
            raise InternalConsistencyError(
                f"ideal block at order {m} swallows the whole component"
            )
        target = vectorize(l.elem, m)
        gram = [[dot_int(zi, zj) for zj in kernel] for zi in kernel]
        rhs = [sum(c * z_k for c, z_k in zip(target, z)) for z in kernel]
        beta = solve_square(gram, rhs)
        proj = [
            sum(bk * Fraction(z[col]) for bk, z in zip(beta, kernel))
            for col in range(block.dim)
        ]
        ltilde = devectorize(proj, m)
        if ltilde.is_zero():
            raise InternalConsistencyError(
                f"projected core element at order {m} vanished"
            )
        out.append(ltilde)
    return out


# ---------------------------------------------------------------------------
# shuffle polynomial representation

def weighted_multi_indices(weights, degree: int) -> list:
    """All exponent tuples q >= 0 with sum q_j * weights_j = degree,
    lexicographically ascending."""
    out = []

    def rec(pos, remaining, prefix):
        if pos == len(weights):
            if remaining == 0:
                out.append(tuple(prefix))
            return
        w = weights[pos]
        for q in range(remaining // w + 1):
            rec(pos + 1, remaining - q * w, prefix + [q])

    rec(0, degree, [])
    return out


def shuffle_monomial(generators, q) -> AlgElem:
    acc = AlgElem.scalar(1)
    for gen, power in zip(generators, q):
        for _ in range(power):
            acc = shuffle(acc, gen)
    return acc


def express_as_shuffle_poly(
    target: AlgElem, generators: list, weights, degree: int
) -> ShufflePolynomial:
    """Write a homogeneous element of the given order as a shuffle
    polynomial in the generators (weighted degree = order), or raise
    NotRepresentableError.  Dependent monomials get zero coefficients."""
    weights = tuple(weights)
    if degree == 0:
        # only constants live in degree 0
        extra = {w for w in target.terms if w != ()}
        if extra:
            raise NotRepresentableError(target, 0)
        c = target.scalar_part()
        terms = {(0,) * len(weights): c} if c != 0 else {}
        return ShufflePolynomial(weights, 0, terms)
    qs = weighted_multi_indices(weights, degree)
    if not qs:
        if target.is_zero():
            return ShufflePolynomial(weights, degree, {})
        raise NotRepresentableError(target, degree)
    columns = [
        vectorize(shuffle_monomial(generators, q), degree) for q in qs
    ]
    sol = solve_particular(columns, vectorize(target, degree))
    if sol is None:
        raise NotRepresentableError(target, degree)
    terms = {q: c for q, c in zip(qs, sol) if c != 0}
    return ShufflePolynomial(weights, degree, terms)


# ---------------------------------------------------------------------------
# reconstruction

def _pad_exponents(q, n: int) -> tuple:
    return tuple(q) + (0,) * (n - len(q))


def build_nonautonomous(core: CoreDecomposition, projected: list) -> PolynomialSystem:
    """Non-autonomous approximating system: a = 0 and

        b_i = -sum_j P_{j,i}(x_1..x_{i-1}) t^j - alpha_i t^{w_i - 1}

    where splitting l~_i by last letter gives l~_i = sum_j y_j xi_j +
    alpha_i xi_{w_i-1} and P_j represents y_j as a shuffle polynomial of
    weighted degree w_i - j - 1 in l~_1..l~_{i-1}."""
    n = core.n
    weights = core.weights
    a = [dict() for _ in range(n)]
    b = []
    for i, (l, ltilde) in enumerate(zip(core.ell, projected)):
        w_i = l.order
        alpha = Fraction(0)
        tails: dict = {}
        for word, c in ltilde.terms.items():
            if len(word) == 1:
                # the unique length-1 word of order w_i is xi_{w_i - 1}
                alpha += c
                continue
            tails.setdefault(word[-1], {})[word[:-1]] = c
        comp: dict = {}
        for j in sorted(tails):
            y = AlgElem(tails[j])
            poly = express_as_shuffle_poly(
                y, projected[:i], weights[:i], w_i - j - 1
            )
            for q, c in poly.terms.items():
                key = (j, _pad_exponents(q, n))
                comp[key] = comp.get(key, Fraction(0)) - c
        if alpha != 0:
            key = (w_i - 1, (0,) * n)
            comp[key] = comp.get(key, Fraction(0)) - alpha
        b.append({k: c for k, c in comp.items() if c != 0})
    return PolynomialSystem(n, weights, a, b)


def build_autonomous(core: CoreDecomposition, projected: list):
    """Autonomous approximating system a_i = -P_{1,i}(x), b_i = -P_{2,i}(x)
    from shuffle polynomial representations of phi(l~_i) and psi(l~_i) of
    weighted degree w_i - 1; returns a nonexistence witness when some
    image is not representable."""
    n = core.n
    weights = core.weights
    a = []
    b = []
    for i, (l, ltilde) in enumerate(zip(core.ell, projected)):
        w_i = l.order
        for kind, image, bucket in (
            ("phi", phi(ltilde), a),
            ("psi", psi(ltilde), b),
        ):
            try:
                poly = express_as_shuffle_poly(
                    image, projected[:i], weights[:i], w_i - 1
                )
            except NotRepresentableError:
                return NoAutonomousApproximation(i + 1, kind, image, w_i - 1)
            comp = {}
            for q, c in poly.terms.items():
                if c != 0:
                    comp[(0, _pad_exponents(q, n))] = -c
            bucket.append(comp)
    return PolynomialSystem(n, weights, a, b)


# ---------------------------------------------------------------------------
# driver

def approximate(
    sys: ControlSystem,
    max_order: int = DEFAULT_MAX_ORDER,
    cache_dir=None,
) -> ApproximationResult:
    """Full pipeline with iterative deepening of the series order N,
    starting at n and capped at max_order."""
    computer = SeriesComputer(sys)
    N = max(1, sys.n)
    if N > max_order:
        N = max_order
    last_error = None
    while True:
        basis = build_lie_basis(N, cache_dir)
        table = computer.table_up_to(N)
        try:
            core = select_core(table, basis, sys.n)
            break
        except NotAccessibleError as err:
            last_error = err
            if N >= max_order:
                raise
            N += 1
    blocks = build_ideal_blocks(core)
    projected = project_core(core, blocks)
    nonautonomous = build_nonautonomous(core, projected)
    autonomous = build_autonomous(core, projected)
    return ApproximationResult(
        system=sys,
        N=N,
        table=table,
        basis=basis,
        core=core,
        blocks=blocks,
        projected=projected,
        nonautonomous=nonautonomous,
        autonomous=autonomous,
    )


def check_self_consistency(result: ApproximationResult) -> None:
    """The output system's own series must reproduce each l~_k exactly at
    order w_k in component k and vanish at all lower orders."""
    approx_sys = result.nonautonomous.to_control_system()
    computer = SeriesComputer(approx_sys)
    for k, (l, ltilde) in enumerate(zip(result.core.ell, result.projected)):
        w_k = l.order
        for m in range(1, w_k + 1):
            for word in enumerate_basis(m):
                got = computer.moment_vector(word)[k]
                want = ltilde.coeff(word) if m == w_k else Fraction(0)
                if got != want:
                    raise InternalConsistencyError(
                        f"component {k + 1}, word {word}: series gives {got}, "
                        f"projection demands {want}"
                    )
