import numpy as np
import pytest

from qmsdf import _linalg as lin
from qmsdf.algebra import atomic_decomposition
from qmsdf.asymptotics import (block_tensor_form, cesaro_mean, conditional_expectation_FT,
                               conditional_expectation_NT, eid_verdict, faithful_invariant_state,
                               generator_spectrum, invariant_state_form_check, invariant_states,
                               peripheral_group_order, peripheral_projection, predual_evolution_check,
                               reversible_state_structure, reversible_subspace, unique_invariant_state,
                               zero_projection)
from qmsdf.fixtures import (SZ, amplitude_damping_qubit, depolarizing_qubit, e, example_2_6,
                            example_4_3, tensor_K12, unitary_only)
from qmsdf.model import build_generator, build_predual_generator
from qmsdf.random_models import planted_model
from qmsdf.structure import compute_FT, compute_NT, extract_block_operators


def test_spectrum_example_2_6():
    sp = generator_spectrum(build_generator(example_2_6()))
    assert sp.jordan_ok
    assert sp.peripheral_dim == 4
    assert sorted(round(v.imag, 10) for v in sp.peripheral_values) == [-1.0, 0.0, 1.0]
    g = build_generator(example_2_6())
    assert np.allclose(g.apply(e(3, 1, 2)), 1j * e(3, 1, 2), atol=1e-14)
    assert np.allclose(g.apply(e(3, 2, 1)), -1j * e(3, 2, 1), atol=1e-14)
    for x in (e(3, 1, 1), e(3, 2, 2) + e(3, 3, 3), e(3, 1, 2), e(3, 2, 1)):
        assert lin.projection_residual(lin.vec(x), sp.eigen_basis) <= 1e-10


def test_spectrum_gaps():
    sp = generator_spectrum(build_generator(depolarizing_qubit()))
    assert np.allclose(np.sort(sp.eigenvalues.real), [-4, -4, -4, 0], atol=1e-12)
    assert sp.gap == pytest.approx(4.0)
    assert generator_spectrum(build_generator(amplitude_damping_qubit())).gap == pytest.approx(0.5)
    assert generator_spectrum(build_generator(unitary_only())).gap == float("inf")


def test_non_semisimple_peripheral_part_is_flagged():
    assert not generator_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]])).jordan_ok


def test_spectral_projections():
    g = build_generator(example_2_6())
    p, _, _ = peripheral_projection(g)
    assert np.linalg.norm(p @ p - p) <= 1e-10
    assert np.linalg.norm(g.matrix @ p - p @ g.matrix) <= 1e-10
    p0, _, _ = zero_projection(g)
    assert np.linalg.norm(g.matrix @ p0) <= 1e-10


def test_invariant_states():
    inv = invariant_states(example_2_6())
    assert inv.functional_dim == 2
    pred = build_predual_generator(example_2_6())
    for s in inv.states:
        assert abs(np.trace(s) - 1) <= 1e-12
        assert np.linalg.eigvalsh(s)[0] >= -1e-12
        assert np.linalg.norm(pred.apply(s)) <= 1e-10
    assert any(np.allclose(s, e(3, 1, 1), atol=1e-10) for s in inv.states)
    assert any(np.allclose(s, e(3, 2, 2), atol=1e-10) for s in inv.states)


def test_faithful_invariant_state():
    assert np.allclose(faithful_invariant_state(depolarizing_qubit()), np.eye(2) / 2, atol=1e-12)
    assert faithful_invariant_state(amplitude_damping_qubit()) is None
    assert faithful_invariant_state(example_2_6()) is None
    rho = faithful_invariant_state(tensor_K12())
    assert np.linalg.norm(build_predual_generator(tensor_K12()).apply(rho)) <= 1e-10


def test_reversible_subspace():
    assert reversible_subspace(example_4_3()).dim == 4
    assert len(compute_NT(example_4_3())) == 1
    rep = reversible_subspace(tensor_K12())
    assert rep.faithful and rep.equals_nt_predual
    assert rep.annihilator_pairing <= 1e-10
    assert not reversible_subspace(example_2_6()).faithful


def test_cesaro_mean_matches_projection():
    g = build_generator(depolarizing_qubit())
    p0, _, _ = zero_projection(g)
    assert np.linalg.norm(cesaro_mean(g, 1e6) - p0, 2) <= 1e-6
    ef = conditional_expectation_FT(tensor_K12())
    assert ef.checks["cesaro"]["ok"]


def test_conditional_expectations_depolarizing():
    m = depolarizing_qubit()
    for ex in (conditional_expectation_FT(m), conditional_expectation_NT(m)):
        assert ex.ok and not ex.advisory
        assert np.allclose(ex.apply(SZ), 0, atol=1e-10)
        assert np.allclose(ex.apply(np.eye(2)), np.eye(2), atol=1e-10)


def test_conditional_expectation_NT_on_block_model():
    m = tensor_K12()
    en = conditional_expectation_NT(m)
    assert en.ok
    nt = compute_NT(m)
    for x in nt.basis:
        assert np.allclose(en.apply(x), x, atol=1e-8)


def test_conditional_expectation_without_faithful_state_is_advisory():
    en = conditional_expectation_NT(example_2_6())
    assert en.advisory
    assert "state_compatible" not in en.checks
    assert not en.checks["range"]["ok"]  # M_r is larger than N(T) here


def test_predual_evolution_on_reversible_states():
    m = tensor_K12()
    rep = reversible_subspace(m)
    for s in lin.unvec_rows(rep.basis, 4):
        assert predual_evolution_check(m, s, (0.1, 1.0, 3.0)) <= 1e-8


def test_eid_verdicts():
    r = eid_verdict(depolarizing_qubit())
    assert r.eid_holds and r.nt_dim == 1 and r.peripheral_group_order == 1
    r = eid_verdict(tensor_K12())
    assert r.eid_holds and r.nt_mr_distance <= 1e-7
    r = eid_verdict(unitary_only())
    assert r.eid_holds and r.m0_dim == 0
    r = eid_verdict(example_2_6())
    assert not r.faithful_state_found and r.advisories
    assert not r.eid_holds
    assert (r.nt_dim, r.mr_dim) == (2, 4)


def test_mr_fails_to_be_an_algebra():
    m = example_2_6()
    r = eid_verdict(m)
    assert not r.mr_is_algebra
    mr = generator_spectrum(build_generator(m)).eigen_basis
    witness = e(3, 2, 1) @ e(3, 1, 2)
    assert lin.projection_residual(lin.vec(witness), mr) > 0.5


def test_peripheral_group_order():
    w = 2j * np.pi / 3
    assert peripheral_group_order([0, w, -w], 9) == 3
    assert peripheral_group_order([0, 1j], 9) is None
    assert peripheral_group_order([0], 9) == 1


def test_unique_invariant_state():
    assert np.allclose(unique_invariant_state(amplitude_damping_qubit()), e(2, 1, 1), atol=1e-10)
    assert unique_invariant_state(example_2_6()) is None


def _two_block_setup(seed):
    pm = planted_model([(1, 2), (2, 1)], seed, hermitian_jumps=True)
    m = pm.model
    nb = atomic_decomposition(compute_NT(m))
    ops = extract_block_operators(m, nb)
    return m, nb, ops


def test_reversible_state_structure():
    m, nb, ops = _two_block_setup(21)
    for s in lin.unvec_rows(reversible_subspace(m).basis, m.dim):
        rep = reversible_state_structure(s, nb, ops)
        assert rep.off_block_mass <= 1e-10
        assert rep.reconstruction_error <= 1e-8
        assert not rep.violations


def test_reversible_state_structure_negative_control():
    m, nb, ops = _two_block_setup(22)
    eta = faithful_invariant_state(m)
    y = nb.to_blocks(eta)
    z = np.zeros_like(y)
    z[0, 2] = z[2, 0] = 0.05
    rep = reversible_state_structure(nb.from_blocks(y + z), nb, ops)
    assert abs(rep.off_block_mass - np.linalg.norm(z)) <= 1e-10
    assert rep.violations


def test_block_tensor_form_without_irreducible_blocks():
    m = example_2_6()
    nb = atomic_decomposition(compute_NT(m))
    rep = block_tensor_form(e(3, 2, 2), nb, [np.ones((1, 1)), None])
    assert not rep.irreducible and rep.violations


def test_invariant_state_form():
    for m in (tensor_K12(), unitary_only(), depolarizing_qubit()):
        res = invariant_state_form_check(m, atomic_decomposition(compute_FT(m)))
        assert res["ok"]
        assert res["trace_error"] <= 1e-8
