import dataclasses
from fractions import Fraction

import pytest

from homapprox.algebra import AlgElem, enumerate_basis, phi, vectorize
from homapprox.approx import (
    NoAutonomousApproximation,
    NotAccessibleError,
    NotRepresentableError,
    approximate,
    check_self_consistency,
    express_as_shuffle_poly,
    select_core,
    shuffle_monomial,
    weighted_multi_indices,
)
from homapprox.approx import InternalConsistencyError
from homapprox.lie import build_lie_basis
from homapprox.linalg import row_space_canonical
from homapprox.series import SeriesComputer, series_up_to, system_from_strings

F = Fraction


def xi(*letters):
    return AlgElem.from_word(tuple(letters))


@pytest.fixture(scope="module")
def res3(sys3):
    return approximate(sys3)


@pytest.fixture(scope="module")
def res_drift(sys3_drift):
    return approximate(sys3_drift)


@pytest.fixture(scope="module")
def res_deep(sys_deep):
    return approximate(sys_deep)


# ---------------------------------------------------------------------------
# core selection

def test_core_selection_published(sys3):
    table = series_up_to(sys3, 4)
    core = select_core(table, build_lie_basis(4), 3)
    assert [l.index for l in core.ell] == [1, 3, 6]
    assert [l.elem for l in core.ell] == [xi(0), xi(2), xi(0, 2) - xi(2, 0)]
    assert core.weights == (1, 3, 4)
    assert [l.vcoeff for l in core.ell] == [
        (F(1), F(0), F(0)),
        (F(0), F(-1), F(0)),
        (F(0), F(0), F(-1)),
    ]
    assert [(d.order, d.elem) for d in core.dees] == [
        (2, xi(1)),
        (3, 2 * xi(2) + xi(0, 1) - xi(1, 0)),
        (4, xi(3)),
        (4, 6 * xi(0, 2) - 6 * xi(2, 0) - xi(0, 0, 1) + 2 * xi(0, 1, 0) - xi(1, 0, 0)),
    ]
    assert core.dees[0].combo == ((F(1), 2),)
    assert core.dees[1].combo == ((F(1), 4), (F(2), 3))
    assert core.dees[2].combo == ((F(1), 5),)
    assert core.dees[3].combo == ((F(-1), 7), (F(6), 6))


def test_core_selection_changed(sys3_drift):
    table = series_up_to(sys3_drift, 4)
    core = select_core(table, build_lie_basis(4), 3)
    assert [l.index for l in core.ell] == [1, 4, 6]
    assert core.ell[1].elem == xi(0, 1) - xi(1, 0)
    assert core.weights == (1, 3, 4)


def test_not_accessible_without_control():
    dead = system_from_strings(1, ["0"], ["0"])
    with pytest.raises(NotAccessibleError) as err:
        approximate(dead, max_order=3)
    assert err.value.achieved == 0
    assert err.value.N == 3


# ---------------------------------------------------------------------------
# ideal blocks

def test_ideal_blocks_published(res3):
    blocks = res3.blocks
    assert sorted(blocks) == [1, 3, 4]
    assert (blocks[1].rank, blocks[1].dim) == (0, 1)
    assert (blocks[3].rank, blocks[3].dim) == (2, 4)
    assert (blocks[4].rank, blocks[4].dim) == (5, 8)
    assert blocks[3].rows == [xi(1, 0), 2 * xi(2) + xi(0, 1) - xi(1, 0)]
    assert blocks[4].rows[:2] == [xi(1, 1), xi(1, 0, 0)]


def test_ideal_block_spans_match_published_matrices(res3):
    # rows rewritten in the canonical word order (columns xi11 and xi20
    # swapped relative to the published layout)
    published_J3 = [
        [0, 0, 1, 0],
        [2, 1, -1, 0],
    ]
    published_J4 = [
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 2, 0, 1, -1, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 6, 0, -6, -1, 2, -1, 0],
    ]
    for m, published in ((3, published_J3), (4, published_J4)):
        mine = [vectorize(r, m) for r in res3.blocks[m].rows]
        assert row_space_canonical(mine) == row_space_canonical(published)


def test_block_complement_dimension_counts_monomials(res3, res_drift, res_deep):
    for res in (res3, res_drift, res_deep):
        weights = res.weights
        for m, block in res.blocks.items():
            expected = len(weighted_multi_indices(weights, m))
            assert block.dim - block.rank == expected, (res.weights, m)


# ---------------------------------------------------------------------------
# projection

def test_projection_published(res3):
    assert res3.projected[0] == xi(0)
    assert res3.projected[1] == F(1, 5) * xi(2) - F(2, 5) * xi(0, 1)
    assert res3.projected[2] == (
        F(3, 19) * xi(0, 2)
        + F(23, 285) * xi(2, 0)
        + F(8, 57) * xi(0, 0, 1)
        - F(46, 285) * xi(0, 1, 0)
    )


def test_projection_orthogonal_and_in_span(res3, res_drift, res_deep):
    for res in (res3, res_drift, res_deep):
        for l, ltilde in zip(res.core.ell, res.projected):
            block = res.blocks[l.order]
            tv = vectorize(ltilde, l.order)
            for row in block.rows:
                rv = vectorize(row, l.order)
                assert sum(a * b for a, b in zip(rv, tv)) == 0
            residual = l.elem - ltilde
            if residual.is_zero():
                continue
            from homapprox.linalg import scale_to_int

            assert block.echelon.contains(
                scale_to_int(vectorize(residual, l.order))
            )


# ---------------------------------------------------------------------------
# shuffle polynomial representation

def test_weighted_multi_indices():
    assert weighted_multi_indices((1, 3), 3) == [(0, 1), (3, 0)]
    assert weighted_multi_indices((1, 3), 2) == [(2, 0)]
    assert weighted_multi_indices((1, 3, 4), 4) == [(0, 0, 1), (1, 1, 0), (4, 0, 0)]
    assert weighted_multi_indices((), 0) == [()]
    assert weighted_multi_indices((), 2) == []


def test_shuffle_monomial():
    assert shuffle_monomial([xi(0)], (2,)) == 2 * xi(0, 0)
    assert shuffle_monomial([xi(0)], (0,)) == AlgElem.scalar(1)
    assert shuffle_monomial([xi(0), xi(1)], (1, 1)) == xi(0, 1) + xi(1, 0)


def test_express_shuffle_published_identities():
    # xi_00 = 1/2 xi_0 ^shuffle 2
    poly = express_as_shuffle_poly(xi(0, 0), [xi(0)], (1,), 2)
    assert poly.terms == {(2,): F(1, 2)}
    # xi_2 - 2 xi_01 = 5 l~_2
    l2 = F(1, 5) * xi(2) - F(2, 5) * xi(0, 1)
    poly = express_as_shuffle_poly(xi(2) - 2 * xi(0, 1), [xi(0), l2], (1, 3), 3)
    assert poly.terms == {(0, 1): F(5)}


def test_express_shuffle_not_representable():
    # phi(l~_2) = 2/5 (xi_1 - xi_00) has no representation over xi_0
    l2 = F(1, 5) * xi(2) - F(2, 5) * xi(0, 1)
    image = phi(l2)
    assert image == F(2, 5) * xi(1) - F(2, 5) * xi(0, 0)
    with pytest.raises(NotRepresentableError):
        express_as_shuffle_poly(image, [xi(0)], (1,), 2)


def test_express_shuffle_degree_zero_and_empty():
    poly = express_as_shuffle_poly(AlgElem.scalar(2), [], (), 0)
    assert poly.terms == {(): F(2)}
    assert express_as_shuffle_poly(AlgElem.zero(), [], (), 3).terms == {}
    with pytest.raises(NotRepresentableError):
        express_as_shuffle_poly(xi(0), [], (), 0)
    with pytest.raises(NotRepresentableError):
        express_as_shuffle_poly(xi(0, 0), [], (), 3)


# ---------------------------------------------------------------------------
# reconstruction

def test_nonautonomous_published(res3):
    sysp = res3.nonautonomous
    assert sysp.weights == (1, 3, 4)
    assert sysp.a == [{}, {}, {}]
    assert sysp.b == [
        {(0, (0, 0, 0)): F(-1)},
        {(2, (0, 0, 0)): F(-1, 5), (1, (1, 0, 0)): F(2, 5)},
        {
            (2, (1, 0, 0)): F(-3, 19),
            (1, (2, 0, 0)): F(-4, 57),
            (0, (0, 1, 0)): F(-23, 57),
        },
    ]
    assert not sysp.is_autonomous()


def test_autonomous_witness_published(res3):
    assert not res3.autonomous_exists()
    wit = res3.autonomous
    assert isinstance(wit, NoAutonomousApproximation)
    assert wit.index == 2
    assert wit.kind == "phi"
    assert wit.order == 2
    assert wit.witness == F(2, 5) * xi(1) - F(2, 5) * xi(0, 0)


def test_changed_system_autonomous_published(res_drift):
    assert res_drift.autonomous_exists()
    auto = res_drift.autonomous
    assert auto.weights == (1, 3, 4)
    assert auto.a == [
        {},
        {(0, (2, 0, 0)): F(-1, 2)},
        {(0, (3, 0, 0)): F(1, 27), (0, (0, 1, 0)): F(-10, 9)},
    ]
    assert auto.b == [
        {(0, (0, 0, 0)): F(-1)},
        {},
        {(0, (0, 1, 0)): F(4, 9)},
    ]
    assert auto.is_autonomous()


def test_polynomial_system_expr_roundtrip(res3):
    ctrl = res3.nonautonomous.to_control_system()
    lines = ctrl.render()
    assert lines[0] == "dx1/dt = 0 + (-1)*u"
    # the rebuilt symbolic system parses and has matching dimensions
    assert ctrl.n == 3


def test_triangular_and_weighted_degrees(res3, res_drift, res_deep):
    for res in (res3, res_drift, res_deep):
        weights = res.weights
        systems = [res.nonautonomous]
        if res.autonomous_exists():
            systems.append(res.autonomous)
        for sysp in systems:
            for i in range(sysp.n):
                w_i = weights[i]
                for comp, include_t in ((sysp.a[i], True), (sysp.b[i], True)):
                    for (t_pow, x_pows), c in comp.items():
                        assert c != 0
                        # only earlier states appear
                        assert all(q == 0 for q in x_pows[i:])
                        degree = t_pow + sum(
                            q * weights[j] for j, q in enumerate(x_pows)
                        )
                        assert degree == w_i - 1, (i, t_pow, x_pows)


def test_scalar_pipeline(sys_scalar):
    res = approximate(sys_scalar)
    assert res.N == 1
    assert res.weights == (1,)
    assert res.projected == [xi(0)]
    assert res.nonautonomous.b == [{(0, (0,)): F(-1)}]
    assert res.autonomous_exists()
    assert res.autonomous.a == [{}]
    assert res.autonomous.b == [{(0, (0,)): F(-1)}]


def test_deep_pipeline(res_deep):
    assert res_deep.N == 9
    assert res_deep.weights == (1, 9)
    assert res_deep.core.ell[1].order == 9
    block = res_deep.blocks[9]
    assert block.dim == 256
    assert block.dim - block.rank == len(
        weighted_multi_indices((1, 9), 9)
    )


def test_deepening_respects_max_order(sys_deep):
    with pytest.raises(NotAccessibleError) as err:
        approximate(sys_deep, max_order=5)
    assert err.value.achieved == 1
    assert err.value.N == 5


# ---------------------------------------------------------------------------
# consistency of the output with its own series

def test_self_consistency(res3, res_drift, res_deep):
    for res in (res3, res_drift, res_deep):
        check_self_consistency(res)


def test_self_consistency_detects_corruption(res3):
    broken = dataclasses.replace(
        res3, projected=[res3.projected[0], 2 * res3.projected[1], res3.projected[2]]
    )
    with pytest.raises(InternalConsistencyError):
        check_self_consistency(broken)


def test_idempotence_nonautonomous(res3, res_drift):
    for res in (res3, res_drift):
        again = approximate(res.nonautonomous.to_control_system())
        assert again.weights == res.weights
        assert again.nonautonomous.a == res.nonautonomous.a
        assert again.nonautonomous.b == res.nonautonomous.b


def test_idempotence_autonomous(res_drift):
    again = approximate(res_drift.autonomous.to_control_system())
    assert again.autonomous_exists()
    assert again.autonomous.a == res_drift.autonomous.a
    assert again.autonomous.b == res_drift.autonomous.b


def test_output_series_is_projection(res3):
    # the k-th component of the output series at order w_k is exactly l~_k
    computer = SeriesComputer(res3.nonautonomous.to_control_system())
    for k, (l, ltilde) in enumerate(zip(res3.core.ell, res3.projected)):
        for w in enumerate_basis(l.order):
            assert computer.moment_vector(w)[k] == ltilde.coeff(w)
