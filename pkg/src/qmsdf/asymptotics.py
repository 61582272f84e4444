"""Peripheral/decaying spectral splitting of the generator, invariant and
reversible states, conditional expectations onto F(T) and N(T), and the
decoherence (EID) verdict."""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as la

from . import _linalg as lin
from .algebra import StarAlgebra
from .errors import DegeneracyError
from .model import build_generator, build_predual_generator, semigroup_map
from .structure import compute_FT, compute_NT, reduced_semigroup

TOL_POS = 1e-10
EID_DECAY_TOL = 1e-8
SEMISIMPLE_TOL = 1e-7


def default_tol_spec(matrix):
    return 1e-9 * max(np.linalg.norm(matrix, 2), 1.0)


def _rows(cols):
    """Column basis (orthonormal columns) -> row basis."""
    return np.ascontiguousarray(cols.T)


def _invariant_subspace(a, select):
    """Orthonormal columns spanning the invariant subspace of the
    eigenvalues picked by ``select`` (ordered complex Schur form)."""
    _, z, k = la.schur(a, output="complex", sort=select)
    return z[:, :k]


def _distinct(values, resolution):
    out = []
    for v in values:
        if all(abs(v - u) > resolution for u in out):
            out.append(v)
    return out


@dataclass(frozen=True)
class SpectralSplit:
    """Eigen-data of a superoperator split at the imaginary axis.

    ``eigen_basis`` spans the eigenvectors with purely imaginary
    eigenvalue (the space M_r, resp. R(T) for the predual);
    ``peripheral_basis`` and ``decaying_basis`` are the complementary
    invariant subspaces.  All three are orthonormal row bases.
    """

    eigenvalues: np.ndarray
    peripheral: np.ndarray  # boolean mask over eigenvalues
    peripheral_values: tuple
    eigen_basis: np.ndarray
    peripheral_basis: np.ndarray
    decaying_basis: np.ndarray
    jordan_ok: bool
    tol_spec: float
    gap: float  # smallest |Re lambda| over the decaying eigenvalues (inf if none)
    max_real: float

    @property
    def peripheral_dim(self):
        return int(self.peripheral.sum())


def generator_spectrum(gen, tol_spec=None):
    a = gen.matrix if hasattr(gen, "matrix") else np.asarray(gen)
    tol_spec = default_tol_spec(a) if tol_spec is None else tol_spec
    w = np.linalg.eigvals(a)
    per = np.abs(w.real) <= tol_spec
    p_cols = _invariant_subspace(a, lambda x: abs(x.real) <= tol_spec)
    d_cols = _invariant_subspace(a, lambda x: abs(x.real) > tol_spec)
    if p_cols.shape[1] != per.sum():
        # eigvals and the Schur reordering disagree only on borderline values
        raise DegeneracyError("peripheral eigenvalues sit on the classification threshold")
    scale = max(np.linalg.norm(a, 2), 1.0)
    values = _distinct(sorted(w[per], key=lambda z: (round(z.imag, 8), z.real)), 1e-6 * scale)
    eig_rows = []
    geo = 0
    for lam in values:
        null = lin.nullspace(a - lam * np.eye(len(a)), SEMISIMPLE_TOL)
        geo += len(null)
        eig_rows.append(null)
    eig = lin.orthonormal_basis(np.vstack(eig_rows)) if eig_rows else np.zeros((0, len(a)), complex)
    dec = w[~per]
    return SpectralSplit(
        eigenvalues=w,
        peripheral=per,
        peripheral_values=tuple(complex(v) for v in values),
        eigen_basis=eig,
        peripheral_basis=_rows(p_cols),
        decaying_basis=_rows(d_cols),
        jordan_ok=geo == int(per.sum()),
        tol_spec=float(tol_spec),
        gap=float(np.min(-dec.real)) if len(dec) else float("inf"),
        max_real=float(w.real.max()),
    )


def _projection(a, select):
    """Spectral projection of ``a`` onto the eigenvalues picked by
    ``select``, along the complementary invariant subspace."""
    n = len(a)
    p_cols = _invariant_subspace(a, select)
    d_cols = _invariant_subspace(a, lambda x: not select(x))
    k = p_cols.shape[1]
    s = np.hstack([p_cols, d_cols])
    if s.shape[1] != n:
        raise DegeneracyError("spectral subspaces do not add up to the full space")
    inv = np.linalg.solve(s, np.eye(n))
    return p_cols @ inv[:k], p_cols, d_cols


def peripheral_projection(gen, tol_spec=None):
    a = gen.matrix
    tol_spec = default_tol_spec(a) if tol_spec is None else tol_spec
    return _projection(a, lambda x: abs(x.real) <= tol_spec)


def zero_projection(gen, tol_spec=None):
    a = gen.matrix
    tol_spec = default_tol_spec(a) if tol_spec is None else tol_spec
    return _projection(a, lambda x: abs(x) <= tol_spec)


def _herm_basis(rows, d):
    mats = lin.unvec_rows(rows, d)
    herm = [(x + x.conj().T) / 2 for x in mats] + [1j * (x - x.conj().T) / 2 for x in mats]
    return lin.orthonormal_basis(lin.vec_rows(np.array(herm)))


def _normalize_state(x):
    x = (x + x.conj().T) / 2
    tr = np.trace(x).real
    return x / tr if abs(tr) > 0 else x


@dataclass(frozen=True)
class InvariantStates:
    functional_dim: int
    functional_basis: np.ndarray  # orthonormal rows, Hermitian elements, of Ker L_*
    states: tuple  # sample invariant densities
    max_support_state: np.ndarray
    zero_semisimple: bool


def _p0_star(model, tol_spec=None):
    gen = build_generator(model)
    p0, _, _ = zero_projection(gen, tol_spec)
    nil = np.linalg.norm(gen.matrix @ p0)
    return p0.conj().T, nil <= 1e-8 * max(1.0, np.linalg.norm(gen.matrix, 2))


def invariant_states(model, tol_spec=None, seed=0, samples=4):
    """Basis of the invariant functionals and invariant densities obtained
    as P0_*(rho) for basis and random pure states rho."""
    d = model.dim
    pred = build_predual_generator(model)
    ker = lin.nullspace(pred.matrix, lin.TOL_RANK)
    if len(ker) == 0:
        raise DegeneracyError("predual generator has trivial kernel; trace preservation violated")
    p0s, semisimple = _p0_star(model, tol_spec)
    rng = np.random.default_rng(seed)
    inputs = [lin.matrix_unit(d, i, i) for i in range(d)]
    for _ in range(samples):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        inputs.append(np.outer(v, v.conj()))
    states = []
    for rho in inputs:
        s = _normalize_state(lin.unvec(p0s @ lin.vec(rho), d))
        if all(np.linalg.norm(s - t) > 1e-9 for t in states):
            states.append(s)
    full = _normalize_state(lin.unvec(p0s @ lin.vec(np.eye(d) / d), d))
    return InvariantStates(len(ker), _herm_basis(ker, d), tuple(states), full, bool(semisimple))


def faithful_invariant_state(model, tol_pos=TOL_POS, tol_spec=None):
    """P0_*(1/d) normalized if it is faithful, else None.  P0_*(1/d) has
    maximal support among invariant states."""
    p0s, _ = _p0_star(model, tol_spec)
    d = model.dim
    rho = _normalize_state(lin.unvec(p0s @ lin.vec(np.eye(d) / d), d))
    if np.linalg.eigvalsh(rho)[0] > tol_pos:
        return rho
    return None


def trace_pairing(a_rows, b_rows, d):
    """Matrix of tr(a_i b_j) for row bases of operators."""
    a = lin.unvec_rows(a_rows, d)
    b = lin.unvec_rows(b_rows, d)
    return np.einsum("iab,jba->ij", a, b)


@dataclass(frozen=True)
class ReversibleReport:
    basis: np.ndarray  # R(T), span of peripheral eigenvectors of L_*
    decaying_basis: np.ndarray
    dim: int
    nt_dim: int
    faithful: bool
    annihilator_pairing: float = None  # max |tr(sigma x)|, sigma in R(T), x in M_0
    nt_pairing_rank: int = None

    @property
    def equals_nt_predual(self):
        return self.dim == self.nt_dim and (self.nt_pairing_rank == self.dim)


def reversible_subspace(model, tol_spec=None, nt=None, faithful=None):
    d = model.dim
    split = generator_spectrum(build_predual_generator(model), tol_spec)
    nt = compute_NT(model) if nt is None else nt
    if faithful is None:
        faithful = faithful_invariant_state(model) is not None
    ann = rank = None
    if faithful:
        heis = generator_spectrum(build_generator(model), tol_spec)
        pm = trace_pairing(split.eigen_basis, heis.decaying_basis, d)
        ann = float(np.abs(pm).max()) if pm.size else 0.0
        pn = trace_pairing(split.eigen_basis, nt.vectors, d)
        rank = lin.rank(pn, 1e-8) if pn.size else 0
    return ReversibleReport(split.eigen_basis, split.decaying_basis, len(split.eigen_basis),
                            len(nt), faithful, ann, rank)


def cesaro_mean(gen, horizon):
    """(1/T) ∫_0^T exp(sL) ds from the exponential of the augmented matrix
    [[L, 1], [0, 0]] (Van Loan)."""
    n = len(gen.matrix)
    aug = np.zeros((2 * n, 2 * n), dtype=complex)
    aug[:n, :n] = gen.matrix
    aug[:n, n:] = np.eye(n)
    return lin.expm(horizon * aug)[:n, n:] / horizon


def cesaro_horizon(split, scale=1e8):
    """Horizon for the Cesàro cross-check: the mean converges like
    1/(T * rate) where rate is the spectral gap or the smallest nonzero
    peripheral frequency."""
    rates = [split.gap] if np.isfinite(split.gap) else []
    rates += [abs(v.imag) for v in split.peripheral_values if abs(v.imag) > split.tol_spec]
    if not rates:
        return None
    return scale / min(rates)


@dataclass(frozen=True)
class ConditionalExpectation:
    E: np.ndarray  # d^2 x d^2, Heisenberg picture
    dim: int
    checks: dict
    advisory: bool

    def apply(self, x):
        return lin.unvec(self.E @ lin.vec(x), self.dim)

    def apply_predual(self, rho):
        return lin.unvec(self.E.conj().T @ lin.vec(rho), self.dim)

    @property
    def ok(self):
        return all(v["ok"] for v in self.checks.values() if isinstance(v, dict))


def _check(value, tol):
    return {"value": float(value), "tol": float(tol), "ok": bool(value <= tol)}


def _common_checks(e, d, rho, tol, seed, samples):
    eye = lin.vec(np.eye(d))
    out = {
        "idempotent": _check(np.linalg.norm(e @ e - e, 2), tol),
        "unital": _check(np.linalg.norm(e @ eye - eye), tol),
    }
    if rho is not None:
        r = lin.vec(rho)
        out["state_compatible"] = _check(np.linalg.norm(e.conj().T @ r - r), tol)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        x = lin.random_matrix(d, rng)
        x = x @ x.conj().T
        y = lin.unvec(e @ lin.vec(x), d)
        y = (y + y.conj().T) / 2
        worst = min(worst, np.linalg.eigvalsh(y)[0] / max(np.linalg.norm(x, 2), 1.0))
    out["positive"] = _check(-worst, tol)
    return out


def _column_space(e):
    return lin.orthonormal_basis(e.T, 1e-8)


def conditional_expectation_FT(model, tol_spec=None, tol=lin.TOL_EQ, ft=None, rho=None,
                               seed=0, samples=100, cesaro=True):
    d = model.dim
    gen = build_generator(model)
    e, _, _ = zero_projection(gen, tol_spec)
    if rho is None:
        rho = faithful_invariant_state(model)
    ft = compute_FT(model) if ft is None else ft
    checks = _common_checks(e, d, rho, tol, seed, samples)
    checks["range"] = _check(lin.span_distance(_column_space(e), ft.vectors), tol)
    if cesaro:
        split = generator_spectrum(gen, tol_spec)
        horizon = cesaro_horizon(split)
        if horizon is not None and split.gap >= 1e-3:
            c = cesaro_mean(gen, horizon)
            checks["cesaro"] = _check(np.linalg.norm(c - e, 2), 1e-6)
            checks["cesaro"]["horizon"] = float(horizon)
    return ConditionalExpectation(e, d, checks, rho is None)


def conditional_expectation_NT(model, tol_spec=None, tol=lin.TOL_EQ, nt=None, rho=None,
                               seed=0, samples=100):
    d = model.dim
    gen = build_generator(model)
    e, _, dec_cols = peripheral_projection(gen, tol_spec)
    if rho is None:
        rho = faithful_invariant_state(model)
    nt = compute_NT(model) if nt is None else nt
    checks = _common_checks(e, d, rho, tol, seed, samples)
    checks["range"] = _check(lin.span_distance(_column_space(e), nt.vectors), tol)
    kernel = lin.nullspace(e, 1e-8)
    dec = lin.orthonormal_basis(dec_cols.T) if dec_cols.shape[1] else dec_cols.T
    checks["kernel"] = _check(lin.span_distance(kernel, dec), tol)
    if rho is not None:
        # Ker E = {x : tr(rho x y) = 0 for all y in N(T)}
        m0 = lin.unvec_rows(kernel, d)
        pair = max((abs(np.trace(rho @ x @ y)) for x in m0 for y in nt.basis), default=0.0)
        checks["kernel_pairing"] = _check(pair, tol)
    return ConditionalExpectation(e, d, checks, rho is None)


def predual_evolution_check(model, sigma, t_samples=(0.1, 1.0), en=None):
    """max_t |T_{*t}(sigma) - E_{N*}(e^{-itH} sigma e^{itH})|."""
    en = conditional_expectation_NT(model, samples=0) if en is None else en
    pred = build_predual_generator(model)
    worst = 0.0
    for t in t_samples:
        lhs = semigroup_map(pred, t).apply(sigma)
        u = lin.expm(-1j * t * model.hamiltonian)
        rhs = en.apply_predual(u @ sigma @ u.conj().T)
        worst = max(worst, np.linalg.norm(lhs - rhs))
    return float(worst)


def peripheral_group_order(values, max_order, tol=1e-6):
    """Order h if exp(values) is exactly the group of h-th roots of unity."""
    z = np.exp(np.asarray(values, dtype=complex))
    h = len(z)
    if h == 0 or h > max_order:
        return None
    roots = np.exp(2j * np.pi * np.arange(h) / h)
    used = set()
    for v in z:
        k = int(np.argmin(np.abs(roots - v)))
        if abs(roots[k] - v) > tol or k in used:
            return None
        used.add(k)
    return h


@dataclass(frozen=True)
class EIDReport:
    faithful_state_found: bool
    nt_dim: int
    mr_dim: int
    m0_dim: int
    nt_mr_distance: float
    nt_cap_ms_dim: int
    eid1_complete: bool
    eid2_decay: float
    eid_holds: bool
    mr_is_algebra: bool
    mr_product_residual: float
    peripheral_group_order: int = None
    tol_spec: float = 0.0
    gap: float = 0.0
    advisories: tuple = ()


def _product_residual(rows, d):
    mats = lin.unvec_rows(rows, d)
    worst = 0.0
    for x in mats:
        for y in mats:
            worst = max(worst, lin.projection_residual(lin.vec(x @ y), rows, 1.0))
    return worst


def eid_verdict(model, tol_spec=None, tol=1e-7, nt=None, ft=None):
    d = model.dim
    gen = build_generator(model)
    split = generator_spectrum(gen, tol_spec)
    nt = compute_NT(model) if nt is None else nt
    rho = faithful_invariant_state(model)
    faithful = rho is not None
    mr = split.eigen_basis
    m0 = split.decaying_basis
    dist = lin.span_distance(nt.vectors, mr)
    cap = lin.intersection_dim(nt.vectors, m0, 1e-7)
    eid1 = len(nt) + len(m0) == d * d and lin.rank(np.vstack([nt.vectors, m0]), 1e-7) == d * d
    decay = 0.0
    if len(m0) and np.isfinite(split.gap):
        tt = semigroup_map(gen, 50.0 / split.gap)
        decay = max(np.linalg.norm(tt.matrix @ v) for v in m0)
    prod = _product_residual(mr, d)
    advisories = []
    if not faithful:
        advisories.append("no faithful invariant state: M_s is not identified with M_0, "
                          "EID verdict is advisory")
    if not split.jordan_ok:
        advisories.append("peripheral spectrum is not semisimple")
    order = None
    ft = compute_FT(model) if ft is None else ft
    if faithful and len(ft) == 1:
        order = peripheral_group_order(split.peripheral_values, d * d)
    holds = bool(faithful and dist <= tol and cap == 0 and eid1 and decay <= EID_DECAY_TOL)
    return EIDReport(
        faithful_state_found=faithful,
        nt_dim=len(nt),
        mr_dim=len(mr),
        m0_dim=len(m0),
        nt_mr_distance=float(dist),
        nt_cap_ms_dim=int(cap),
        eid1_complete=bool(eid1),
        eid2_decay=float(decay),
        eid_holds=holds,
        mr_is_algebra=prod <= tol,
        mr_product_residual=float(prod),
        peripheral_group_order=order,
        tol_spec=split.tol_spec,
        gap=split.gap,
        advisories=tuple(advisories),
    )


def unique_invariant_state(model, tol=lin.TOL_RANK):
    """The invariant state of an irreducible model; None if the invariant
    functionals are not one-dimensional."""
    if model.dim == 1:
        return np.ones((1, 1), dtype=complex)
    ker = lin.nullspace(build_predual_generator(model).matrix, tol)
    if len(ker) != 1:
        return None
    return _normalize_state(lin.unvec(ker[0], model.dim))


@dataclass(frozen=True)
class BlockFormReport:
    off_block_mass: float
    weights: tuple
    factors: tuple  # X_i = tr_m(U_i eta U_i^dag), so that eta_i = X_i ⊗ tau_i
    taus: tuple
    reconstruction_error: float
    irreducible: bool
    violations: tuple = field(default_factory=tuple)


def block_tensor_form(eta, blocks, taus, tol=1e-8):
    """Split U eta U^dag into blocks and compare with ⊕ tr_m(eta_i) ⊗ tau_i."""
    y = blocks.to_blocks(eta)
    off = y.copy()
    rec = np.zeros_like(y)
    weights, factors = [], []
    for i, ((n, m), tau) in enumerate(zip(blocks.blocks, taus)):
        o = blocks.offsets[i]
        s = slice(o, o + n * m)
        yi = y[s, s]
        off[s, s] = 0
        x = lin.partial_trace_second(yi, n, m)
        weights.append(complex(np.trace(x)))
        factors.append(x)
        if tau is not None:
            rec[s, s] = np.kron(x, tau)
    mass = float(np.linalg.norm(off))
    err = float(np.linalg.norm(y - rec))
    irreducible = all(t is not None for t in taus)
    violations = []
    if mass > tol:
        violations.append(f"off-block mass {mass:.3e}")
    if not irreducible:
        violations.append("a reduced semigroup has more than one invariant state")
    if irreducible and err > tol:
        violations.append(f"reconstruction error {err:.3e}")
    return BlockFormReport(mass, tuple(weights), tuple(factors), tuple(taus), err,
                           irreducible, tuple(violations))


def reversible_state_structure(eta, nt_blocks, blockops, tol=1e-7):
    taus = [unique_invariant_state(reduced_semigroup(blockops, i))
            for i in range(len(nt_blocks.blocks))]
    return block_tensor_form(eta, nt_blocks, taus, tol)


def invariant_state_form_check(model, ft_blocks, states=None, tol=1e-8):
    from .structure import ft_block_models

    models, _, _ = ft_block_models(model, ft_blocks)
    taus = [unique_invariant_state(m) for m in models]
    states = invariant_states(model).states if states is None else states
    reports = [block_tensor_form(s, ft_blocks, taus, tol) for s in states]
    trace_err = max(abs(sum(r.weights) - 1) for r in reports)
    return {
        "reports": reports,
        "max_reconstruction_error": max(r.reconstruction_error for r in reports),
        "max_off_block_mass": max(r.off_block_mass for r in reports),
        "trace_error": float(trace_err),
        "ok": all(not r.violations for r in reports) and trace_err <= tol,
    }
