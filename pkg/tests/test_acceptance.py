import time
from functools import lru_cache

import numpy as np
import pytest

from qmsdf import _linalg as lin
from qmsdf import asymptotics as asy
from qmsdf import structure as st
from qmsdf.algebra import StarAlgebra, atomic_decomposition, block_algebra, commutant
from qmsdf.fixtures import e, example_2_6, example_4_3, tensor_K12
from qmsdf.model import GkslModel, build_generator, build_predual_generator, semigroup_map
from qmsdf.random_models import planted_model, tensor_model

crit = pytest.mark.criterion

UNITAL_PATTERNS = [[(1, 1), (1, 2)], [(2, 2)], [(2, 1), (1, 3)], [(1, 2), (1, 2)], [(1, 4)],
                   [(2, 2), (1, 2)], [(3, 1), (1, 2)], [(1, 1), (2, 2)]]
UNITAL_SEEDS = range(20)
TENSOR_SEEDS = range(20)


def span(mats, d):
    return StarAlgebra.from_matrices(mats, d)


@lru_cache(maxsize=None)
def unital(seed):
    return planted_model(UNITAL_PATTERNS[seed % len(UNITAL_PATTERNS)], seed, hermitian_jumps=True)


@lru_cache(maxsize=None)
def tensor(seed):
    n, m = (2, 2) if seed % 2 == 0 else (2, 3)
    return tensor_model(n, m, 100 + seed)


@lru_cache(maxsize=None)
def analysis(kind, seed):
    m = (unital if kind == "unital" else tensor)(seed).model
    nt, ft = st.compute_NT(m), st.compute_FT(m)
    nb, fb = atomic_decomposition(nt), atomic_decomposition(ft)
    ops = st.extract_block_operators(m, nb)
    return m, nt, ft, nb, fb, ops


# 1 -----------------------------------------------------------------------

@crit(1, "three-level dark-state model: N(T), blocks, invariant states")
def test_dark_state_model_algebra():
    t0 = time.perf_counter()
    m = example_2_6()
    nt = st.compute_NT(m)
    assert nt.distance(span([e(3, 1, 1), e(3, 2, 2) + e(3, 3, 3)], 3)) <= 1e-8
    assert sorted(atomic_decomposition(nt).blocks) == [(1, 1), (1, 2)]
    inv = asy.invariant_states(m)
    assert inv.functional_dim == 2
    want = lin.vec_rows(np.array([e(3, 1, 1), e(3, 2, 2)]))
    assert lin.span_distance(lin.orthonormal_basis(inv.functional_basis), lin.orthonormal_basis(want)) <= 1e-8
    assert asy.faithful_invariant_state(m) is None
    assert time.perf_counter() - t0 < 1.0


# 2 -----------------------------------------------------------------------

@crit(2, "three-level dark-state model: M_r is larger than N(T) and not an algebra")
def test_dark_state_model_peripheral_space():
    t0 = time.perf_counter()
    m = example_2_6()
    mr = asy.generator_spectrum(build_generator(m)).eigen_basis
    want = lin.vec_rows(np.array([e(3, 1, 1), e(3, 1, 2), e(3, 2, 1), e(3, 2, 2) + e(3, 3, 3)]))
    assert len(mr) == 4
    assert lin.span_distance(mr, lin.orthonormal_basis(want)) <= 1e-8
    nt = st.compute_NT(m)
    assert len(nt) < len(mr)
    assert max(lin.projection_residual(v, mr) for v in nt.vectors) <= 1e-8
    witness = e(3, 2, 1) @ e(3, 1, 2)
    assert lin.projection_residual(lin.vec(witness), mr) > 0.5
    assert time.perf_counter() - t0 < 1.0


# 3 -----------------------------------------------------------------------

@crit(3, "generic three-level model: trivial N(T), reversible states beyond N(T)_*")
def test_generic_three_level_model():
    t0 = time.perf_counter()
    m = example_4_3(1.0, 1.0, 1.0)
    nt = st.compute_NT(m)
    assert len(nt) == 1 and nt.contains(np.eye(3))
    pred = build_predual_generator(m)
    assert np.linalg.norm(pred.apply(e(3, 1, 1))) <= 1e-12
    inv = asy.invariant_states(m, samples=10)
    for s in inv.states + (inv.max_support_state,):
        assert abs(s[2, 2]) <= 1e-10
    rev = asy.reversible_subspace(m, nt=nt)
    assert rev.dim >= 2 > len(nt)
    assert time.perf_counter() - t0 < 1.0


# 4 -----------------------------------------------------------------------

@crit(4, "block operator round-trip on tensor models")
@pytest.mark.parametrize("seed", TENSOR_SEEDS)
def test_tensor_round_trip(seed):
    pm = tensor(seed)
    m, nt, _, nb, _, ops = analysis("tensor", seed)
    assert ops.residual <= 1e-8
    assert st.verify_block_evolution(m, ops, (0.1, 1.0)) <= 1e-7
    # independent oracle: the planted K and multiplicity-side model
    n, mm = pm.blocks[0]
    gm = build_generator(GkslModel(mm, pm.M0[0], pm.M[0]))
    g = build_generator(m)
    rng = np.random.default_rng(seed)
    for t in (0.1, 1.0):
        tt, tm = semigroup_map(g, t), semigroup_map(gm, t)
        u = lin.expm(1j * t * pm.K[0])
        x, y = lin.random_matrix(n, rng), lin.random_matrix(mm, rng)
        lhs = tt.apply(np.kron(x, y))
        rhs = np.kron(u @ x @ u.conj().T, tm.apply(y))
        assert np.linalg.norm(lhs - rhs) <= 1e-7 * max(1.0, np.linalg.norm(lhs))


# 5 -----------------------------------------------------------------------

@crit(5, "N(T) = M_r and B(h) = N(T) + M_0 on unital models")
@pytest.mark.parametrize("seed", UNITAL_SEEDS)
def test_eid_splitting(seed):
    m, nt, ft, *_ = analysis("unital", seed)
    d = m.dim
    assert asy.faithful_invariant_state(m) is not None
    split = asy.generator_spectrum(build_generator(m))
    assert lin.span_distance(nt.vectors, split.eigen_basis) <= 1e-7
    assert lin.intersection_dim(nt.vectors, split.decaying_basis, lin.TOL_RANK) == 0
    assert len(nt) + len(split.decaying_basis) == d * d
    assert lin.rank(np.vstack([nt.vectors, split.decaying_basis]), lin.TOL_RANK) == d * d
    rev = asy.reversible_subspace(m, nt=nt)
    assert rev.nt_pairing_rank == len(nt) == rev.dim
    r = asy.eid_verdict(m, nt=nt, ft=ft)
    assert r.eid_holds


# 6 -----------------------------------------------------------------------

@crit(6, "reversible states: annihilation of M_0 and block form")
@pytest.mark.parametrize("seed", UNITAL_SEEDS)
def test_reversible_states(seed):
    m, nt, _, nb, _, ops = analysis("unital", seed)
    rev = asy.reversible_subspace(m, nt=nt)
    assert rev.annihilator_pairing <= 1e-8
    pred = build_predual_generator(m)
    split = asy.generator_spectrum(pred)
    eigvecs = []
    for lam in split.peripheral_values:
        eigvecs.extend(lin.unvec_rows(lin.nullspace(pred.matrix - lam * np.eye(m.dim ** 2), 1e-7), m.dim))
    assert len(eigvecs) == rev.dim
    for eta in eigvecs:
        rep = asy.reversible_state_structure(eta, nb, ops)
        assert rep.off_block_mass <= 1e-8
        assert rep.reconstruction_error <= 1e-7


# 7 -----------------------------------------------------------------------

def _predictions(kind, seed):
    m, nt, ft, nb, fb, ops = analysis(kind, seed)
    pf = st.ft_from_nt(st.spectrum_of_K(ops), nb)
    models, _, _ = st.ft_block_models(m, fb)
    pn = st.nt_from_ft(fb, models, nt=nt)
    return nt, ft, pf, pn


@crit(7, "F(T) from N(T) and N(T) from F(T)")
@pytest.mark.parametrize("kind,seed", [("tensor", s) for s in TENSOR_SEEDS] + [("unital", s) for s in UNITAL_SEEDS])
def test_structure_predictions(kind, seed):
    nt, ft, pf, pn = _predictions(kind, seed)
    assert pf.algebra.distance(ft) <= 1e-7
    assert pn.algebra.distance(nt) <= 1e-7
    assert pn.inconsistencies == ()


@crit(7, "F(T) from N(T) and N(T) from F(T)")
def test_K12_fixture_merge():
    m = tensor_K12()
    nt, ft = st.compute_NT(m), st.compute_FT(m)
    fb = atomic_decomposition(ft)
    assert sorted(fb.blocks) == [(1, 2), (1, 2)]
    assert atomic_decomposition(nt).blocks == ((2, 2),)
    models, _, _ = st.ft_block_models(m, fb)
    pn = st.nt_from_ft(fb, models, nt=nt)
    assert pn.classes == ((0, 1),)
    assert pn.tier_spectral[0, 1] and pn.tier_linkage[0, 1]
    assert pn.blocks == ((2, 2),)
    assert pn.algebra.distance(nt) <= 1e-7


# 8 -----------------------------------------------------------------------

@crit(8, "conditional expectations onto F(T) and N(T)")
@pytest.mark.parametrize("seed", UNITAL_SEEDS)
def test_conditional_expectations(seed):
    m, nt, ft, *_ = analysis("unital", seed)
    rho = asy.faithful_invariant_state(m)
    ef = asy.conditional_expectation_FT(m, ft=ft, rho=rho, seed=seed)
    en = asy.conditional_expectation_NT(m, nt=nt, rho=rho, seed=seed)
    for ex, checks in ((ef, ("idempotent", "unital", "state_compatible", "positive", "range")),
                       (en, ("idempotent", "unital", "state_compatible", "positive", "range",
                             "kernel", "kernel_pairing"))):
        for name in checks:
            c = ex.checks[name]
            assert c["tol"] <= 1e-8 and c["ok"], (name, c)
    split = asy.generator_spectrum(build_generator(m))
    if split.gap >= 1e-3:
        assert ef.checks["cesaro"]["value"] <= 1e-6
    # state compatibility read as a pairing: tr(rho E(x)) = tr(rho x)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        x = lin.random_matrix(m.dim, rng)
        for ex in (ef, en):
            assert abs(np.trace(rho @ ex.apply(x)) - np.trace(rho @ x)) <= 1e-8 * np.linalg.norm(x)


# 9 -----------------------------------------------------------------------

@crit(9, "predual evolution on peripheral states")
@pytest.mark.parametrize("seed", UNITAL_SEEDS)
def test_predual_evolution(seed):
    m, nt, *_ = analysis("unital", seed)
    en = asy.conditional_expectation_NT(m, nt=nt, samples=0)
    basis = asy.reversible_subspace(m, nt=nt).basis
    rng = np.random.default_rng(seed)
    for _ in range(10):
        c = rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))
        sigma = lin.unvec(c @ basis / np.linalg.norm(c), m.dim)
        assert asy.predual_evolution_check(m, sigma, (0.1, 1.0), en=en) <= 1e-8


# 10 ----------------------------------------------------------------------

def _random_blocks(rng):
    d_max = int(rng.integers(2, 13))
    blocks, d = [], 0
    while True:
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        if d + n * m > d_max:
            break
        blocks.append((n, m))
        d += n * m
    return blocks or [(1, 1), (1, 1)]


@crit(10, "bicommutant and decomposition self-tests")
@pytest.mark.parametrize("seed", range(50))
def test_bicommutant(seed):
    rng = np.random.default_rng(1000 + seed)
    blocks = _random_blocks(rng)
    d = sum(n * m for n, m in blocks)
    alg = block_algebra(blocks, lin.random_unitary(d, rng))
    assert commutant(commutant(alg, d), d).distance(alg) <= 1e-8
    bs = atomic_decomposition(alg, seed=seed)
    assert sum(n * m for n, m in bs.blocks) == d
    assert sorted(bs.blocks) == sorted(blocks)
    assert lin.span_distance(bs.pattern_algebra().vectors, alg.vectors) <= 1e-8


@crit(10, "bicommutant and decomposition self-tests")
def test_full_suite_runtime(session_start):
    # ordered last by conftest, so this covers every test collected before it
    assert time.perf_counter() - session_start < 60.0
