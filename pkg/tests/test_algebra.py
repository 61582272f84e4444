import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst
from scipy.linalg import null_space

from qmsdf import _linalg as lin
from qmsdf.algebra import (StarAlgebra, atomic_decomposition, block_algebra, center,
                           check_block_structure, check_invariants, commutant,
                           factor_decomposition, generated_algebra,
                           minimal_central_projections, sigma_expectation)
from qmsdf.errors import StructureError
from qmsdf.fixtures import SX, SZ, e
from qmsdf.structure import compute_NT
from qmsdf.fixtures import example_2_6


def full_units(d):
    return [lin.matrix_unit(d, i, j) for i in range(d) for j in range(d)]


def brute_commutant(mats, d):
    """Entrywise constraints [x, a] = 0 assembled one matrix unit at a time."""
    cols = []
    for i in range(d):
        for j in range(d):
            u = lin.matrix_unit(d, i, j)
            cols.append(np.concatenate([(u @ a - a @ u).ravel() for a in mats]))
    coeffs = null_space(np.array(cols).T)
    return [c.reshape(d, d) for c in coeffs.T]


def test_generated_algebra_examples():
    assert len(generated_algebra([], 3)) == 1
    alg = generated_algebra([e(3, 2, 3)], 3)
    assert len(alg) == 5
    for x in (np.eye(3), e(3, 2, 2), e(3, 2, 3), e(3, 3, 2), e(3, 3, 3)):
        assert alg.contains(x)
    assert not alg.contains(e(3, 1, 2))
    assert len(generated_algebra([SX, SZ], 2)) == 4


def test_commutant_trivial_cases():
    assert len(commutant([np.eye(4)], 4)) == 16
    assert len(commutant(full_units(3), 3)) == 1
    assert len(commutant([], 2)) == 4


def test_commutant_matches_brute_force():
    mats = [e(3, 2, 3), e(3, 3, 2)]
    ours = commutant(mats, 3)
    ref = StarAlgebra.from_matrices(brute_commutant(mats, 3), 3)
    assert len(ours) == len(ref) == 2
    assert ours.distance(ref) <= 1e-10
    assert ours.contains(e(3, 1, 1)) and ours.contains(e(3, 2, 2) + e(3, 3, 3))


def test_commutant_example_2_6_iterated_family():
    nt = compute_NT(example_2_6())
    want = StarAlgebra.from_matrices([e(3, 1, 1), e(3, 2, 2) + e(3, 3, 3)], 3)
    assert nt.distance(want) <= 1e-10


def test_center_examples():
    assert len(center(StarAlgebra.from_matrices(full_units(3), 3))) == 1
    diag = StarAlgebra.from_matrices([e(3, i, i) for i in (1, 2, 3)], 3)
    assert center(diag).distance(diag) <= 1e-12
    u = lin.random_unitary(4, np.random.default_rng(0))
    assert len(center(block_algebra([(2, 1), (2, 1)], u))) == 2


def test_minimal_central_projections_examples():
    full = StarAlgebra.from_matrices(full_units(2), 2)
    assert len(minimal_central_projections(full)) == 1
    diag = StarAlgebra.from_matrices([e(3, i, i) for i in (1, 2, 3)], 3)
    ps = minimal_central_projections(diag)
    got = sorted(tuple(np.round(np.diag(p).real, 10)) for p in ps)
    assert got == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    ps = minimal_central_projections(compute_NT(example_2_6()))
    ranks = sorted(int(round(np.trace(p).real)) for p in ps)
    assert ranks == [1, 2]
    assert any(np.allclose(p, e(3, 2, 2) + e(3, 3, 3), atol=1e-10) for p in ps)


def test_factor_decomposition_examples():
    full = StarAlgebra.from_matrices(full_units(3), 3)
    fb = factor_decomposition(full, np.eye(3))
    assert (fb.n, fb.m) == (3, 1)
    scal = StarAlgebra.from_matrices([np.eye(3)], 3)
    assert (factor_decomposition(scal, np.eye(3)).n, factor_decomposition(scal, np.eye(3)).m) == (1, 3)
    nt = compute_NT(example_2_6())
    fb = factor_decomposition(nt, e(3, 2, 2) + e(3, 3, 3))
    assert (fb.n, fb.m) == (1, 2)
    with pytest.raises(StructureError):
        factor_decomposition(nt, np.eye(3))


def test_atomic_decomposition_examples():
    bs = atomic_decomposition(StarAlgebra.from_matrices(full_units(4), 4))
    assert bs.blocks == ((4, 1),)
    nt = compute_NT(example_2_6())
    bs = atomic_decomposition(nt)
    assert bs.blocks == ((1, 1), (1, 2))
    assert check_block_structure(bs, nt)["ok"]
    u = lin.random_unitary(8, np.random.default_rng(5))
    alg = block_algebra([(2, 3), (1, 2)], u)
    bs = atomic_decomposition(alg, seed=3)
    assert sorted(bs.blocks) == [(1, 2), (2, 3)]
    assert check_block_structure(bs, alg)["ok"]


def test_atomic_decomposition_is_reproducible():
    u = lin.random_unitary(6, np.random.default_rng(6))
    alg = block_algebra([(2, 2), (1, 1), (1, 1)], u)
    a = atomic_decomposition(alg, seed=7)
    b = atomic_decomposition(alg, seed=7)
    assert np.array_equal(a.unitary, b.unitary)
    assert a.seed == 7


def test_sigma_expectation():
    rng = np.random.default_rng(7)
    a, b = lin.random_matrix(2, rng), lin.random_matrix(3, rng)
    s = lin.random_matrix(3, rng)
    sigma = s @ s.conj().T
    sigma /= np.trace(sigma)
    assert np.allclose(sigma_expectation(np.kron(a, b), sigma), np.trace(sigma @ b) * a)
    x = lin.random_matrix(6, rng)
    assert np.allclose(sigma_expectation(x, np.eye(3) / 3), lin.partial_trace_second(x, 2, 3) / 3)
    eta = lin.random_matrix(2, rng)
    lhs = np.trace(sigma_expectation(x, sigma) @ eta)
    assert abs(lhs - np.trace(x @ np.kron(eta, sigma))) <= 1e-10
    assert np.allclose(sigma_expectation(np.eye(6), sigma), np.eye(2))


BLOCKS = hst.lists(hst.tuples(hst.integers(1, 2), hst.integers(1, 3)), min_size=1, max_size=3).filter(
    lambda bl: sum(n * m for n, m in bl) <= 8)


@settings(max_examples=20, deadline=None)
@given(BLOCKS, hst.integers(0, 2 ** 31 - 1))
def test_block_algebra_properties(blocks, seed):
    d = sum(n * m for n, m in blocks)
    u = lin.random_unitary(d, np.random.default_rng(seed))
    alg = block_algebra(blocks, u)
    assert check_invariants(alg)["ok"]
    com = commutant(alg, d)
    assert len(alg) == sum(n * n for n, _ in blocks)
    assert len(com) == sum(m * m for _, m in blocks)
    assert commutant(com, d).distance(alg) <= 1e-8
    assert generated_algebra(com.basis, d).distance(com) <= 1e-8
    bs = atomic_decomposition(alg, seed=seed % 1000)
    assert sorted(bs.blocks) == sorted(blocks)
    assert check_block_structure(bs, alg)["ok"]
    # decomposing the conjugated block pattern again gives the same shapes
    again = atomic_decomposition(bs.pattern_algebra(), seed=1)
    assert sorted(again.blocks) == sorted(blocks)
