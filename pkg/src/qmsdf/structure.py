"""Decoherence-free and fixed-point algebras of a GKSL model, block
operators on their decompositions, and the passage between the two
decompositions."""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _linalg as lin
from .algebra import BlockStructure, StarAlgebra, commutant
from .errors import DegeneracyError, StructureMismatchError
from .model import GkslModel, build_generator, semigroup_map

DEFAULT_T_SAMPLES = (0.1, 1.0, 10.0)


def commutator_family(model, tol=lin.TOL_RANK):
    """Orthonormal basis of span{delta_H^n(L_l), delta_H^n(L_l^dag) : n >= 0}.

    Iterates n until the span stops growing; since delta_H is linear this
    happens after at most d^2 rounds.
    """
    d = model.dim
    h = model.hamiltonian
    seeds = [x for l in model.jumps for x in (l, l.conj().T)]
    if not seeds:
        return np.zeros((0, d * d), dtype=complex), 0
    basis = lin.orthonormal_basis(lin.vec_rows(np.array(seeds)), tol)
    frontier = basis
    rounds = 0
    while len(frontier):
        rounds += 1
        mats = lin.unvec_rows(frontier, d)
        comm = h @ mats - mats @ h
        new = lin.extend_basis(basis, lin.vec_rows(comm), tol)
        basis = np.vstack([basis, new])
        frontier = new
    return basis, rounds


def compute_NT(model, tol=lin.TOL_RANK):
    """Decoherence-free algebra as the commutant of the iterated commutators."""
    fam, _ = commutator_family(model, tol)
    return commutant(list(lin.unvec_rows(fam, model.dim)), model.dim, tol)


def compute_FT(model, tol=lin.TOL_RANK):
    """{H, L_l, L_l^dag}'; equals the fixed points when a faithful invariant
    state exists."""
    return commutant([model.hamiltonian, *model.jumps], model.dim, tol)


def fixed_point_space(model, tol=lin.TOL_RANK):
    """Ker L directly, as a span of operators (not necessarily an algebra)."""
    gen = build_generator(model)
    return StarAlgebra(model.dim, lin.nullspace(gen.matrix, tol))


@dataclass(frozen=True)
class BlockOperators:
    """Per-block GKSL data: U L_l U^dag = ⊕ 1 ⊗ M_l^(i),
    U H U^dag = ⊕ (K_i ⊗ 1 + 1 ⊗ M_0^(i)) with tr M_0^(i) = 0."""

    structure: BlockStructure
    K: tuple
    M0: tuple
    M: tuple  # M[i] is a tuple of jump blocks for block i
    residual_jumps: float
    residual_hamiltonian: float

    @property
    def residual(self):
        return max(self.residual_jumps, self.residual_hamiltonian)


def _split_blocks(bs, y):
    """Diagonal blocks of y (already in the block frame) and the relative
    mass outside them."""
    diag, off = [], y.copy()
    for i, (n, m) in enumerate(bs.blocks):
        o = bs.offsets[i]
        s = slice(o, o + n * m)
        diag.append(y[s, s])
        off[s, s] = 0
    return diag, float(np.linalg.norm(off))


def extract_block_operators(model, blocks, tol=lin.TOL_EQ, strict=True):
    """Least-squares fit of H and the jumps to the block tensor ansatz."""
    res_l = 0.0
    ms = [[] for _ in blocks.blocks]
    for l in model.jumps:
        y = blocks.to_blocks(l)
        diag, off = _split_blocks(blocks, y)
        err = off ** 2
        for i, ((n, m), b) in enumerate(zip(blocks.blocks, diag)):
            mi = lin.partial_trace_first(b, n, m) / n
            ms[i].append(mi)
            err += np.linalg.norm(b - np.kron(np.eye(n), mi)) ** 2
        res_l = max(res_l, np.sqrt(err) / max(np.linalg.norm(l), 1.0))
    y = blocks.to_blocks(model.hamiltonian)
    diag, off = _split_blocks(blocks, y)
    err = off ** 2
    ks, m0s = [], []
    for (n, m), b in zip(blocks.blocks, diag):
        t = np.trace(b).real / (n * m)
        k = lin.partial_trace_second(b, n, m) / m
        m0 = lin.partial_trace_first(b, n, m) / n - t * np.eye(m)
        k = (k + k.conj().T) / 2
        m0 = (m0 + m0.conj().T) / 2
        ks.append(k)
        m0s.append(m0)
        err += np.linalg.norm(b - np.kron(k, np.eye(m)) - np.kron(np.eye(n), m0)) ** 2
    res_h = np.sqrt(err) / max(np.linalg.norm(model.hamiltonian), 1.0)
    out = BlockOperators(blocks, tuple(ks), tuple(m0s), tuple(tuple(x) for x in ms),
                         float(res_l), float(res_h))
    if strict and out.residual > tol:
        raise StructureMismatchError(
            f"GKSL operators do not fit the block decomposition "
            f"(jump residual {res_l:.2e}, Hamiltonian residual {res_h:.2e})",
            residual=out.residual,
        )
    return out


def reduced_semigroup(blockops, i):
    """GKSL model on the multiplicity space of block i."""
    m = blockops.structure.blocks[i][1]
    return GkslModel(m, blockops.M0[i], tuple(blockops.M[i]))


def verify_block_evolution(model, blockops, t_samples=(0.1, 1.0), seed=0):
    """max | T_t(U^dag (x ⊗ y) U) - U^dag (e^{itK} x e^{-itK} ⊗ T^m_t(y)) U |
    over blocks, random x, y and the sample times."""
    rng = np.random.default_rng(seed)
    gen = build_generator(model)
    bs = blockops.structure
    worst = 0.0
    for i, (n, m) in enumerate(bs.blocks):
        rows = bs.block_rows(i)
        red = build_generator(reduced_semigroup(blockops, i))
        x = lin.random_matrix(n, rng)
        y = lin.random_matrix(m, rng)
        full = rows.conj().T @ np.kron(x, y) @ rows
        for t in t_samples:
            lhs = semigroup_map(gen, t).apply(full)
            ut = lin.expm(1j * t * blockops.K[i])
            rhs_block = np.kron(ut @ x @ ut.conj().T, semigroup_map(red, t).apply(y))
            rhs = rows.conj().T @ rhs_block @ rows
            worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(full))
    return float(worst)


@dataclass(frozen=True)
class SpectrumOfK:
    """Distinct eigenvalues and eigenvector groups of every K_i."""

    eigenvalues: tuple  # per block: tuple of distinct kappa_j
    eigenvectors: tuple  # per block: tuple of n_i x s_j arrays
    resolution: float

    @property
    def eigenspace_dims(self):
        return tuple(tuple(v.shape[1] for v in vs) for vs in self.eigenvectors)

    def projections(self, i):
        return [v @ v.conj().T for v in self.eigenvectors[i]]


def spectrum_of_K(blockops, tol=lin.TOL_EQ):
    vals, vecs = [], []
    scale = max([1.0] + [np.linalg.norm(k, 2) for k in blockops.K])
    res = 10 * tol * scale
    for k in blockops.K:
        w, v = np.linalg.eigh(k)
        gaps = np.diff(w)
        if np.any((gaps > res) & (gaps <= 100 * res)):
            raise DegeneracyError(
                f"eigenvalues of K are neither clearly equal nor clearly distinct "
                f"(gaps {gaps[(gaps > res) & (gaps <= 100 * res)]})"
            )
        groups = np.split(np.arange(len(w)), np.nonzero(gaps > res)[0] + 1)
        vals.append(tuple(float(w[g].mean()) for g in groups))
        vecs.append(tuple(v[:, g] for g in groups))
    return SpectrumOfK(tuple(vals), tuple(vecs), res)


def _sorted_structure(rows_list, blocks):
    """Assemble a BlockStructure from per-block row groups, in the
    canonical (n, m, fingerprint) order."""
    items = []
    for rows, (n, m) in zip(rows_list, blocks):
        p = rows.conj().T @ rows
        fp = float(np.real(np.sum(np.arange(1, p.shape[0] + 1) * np.diag(p))))
        items.append((n, m, round(fp, 6), rows, p))
    items.sort(key=lambda t: t[:3])
    return BlockStructure(
        unitary=np.vstack([t[3] for t in items]),
        blocks=tuple((t[0], t[1]) for t in items),
        central_projections=tuple(t[4] for t in items),
    )


@dataclass(frozen=True)
class FtPrediction:
    algebra: StarAlgebra
    structure: BlockStructure

    @property
    def blocks(self):
        return self.structure.blocks


def ft_from_nt(spectrum, nt_blocks):
    """F(T) = ⊕_j B(S_j) ⊗ 1_{m_i}, S_j the eigenspaces of K_i."""
    rows_list, shapes = [], []
    for i, (n, m) in enumerate(nt_blocks.blocks):
        rows = nt_blocks.block_rows(i)
        for q in spectrum.eigenvectors[i]:
            # rows of (q ⊗ 1_m)^dag U_i
            rows_list.append(np.kron(q.conj().T, np.eye(m)) @ rows)
            shapes.append((q.shape[1], m))
    st = _sorted_structure(rows_list, shapes)
    return FtPrediction(st.pattern_algebra(), st)


def ft_block_models(model, ft_blocks, tol=lin.TOL_EQ, strict=True):
    """Per F(T)-block reduced models and energies lambda_j.

    On an F(T) block, H reads lambda_j 1 ⊗ 1 + 1 ⊗ N_0^(j); the fitted K
    must therefore be scalar.
    """
    ops = extract_block_operators(model, ft_blocks, tol, strict)
    lams, k_res = [], 0.0
    for k in ops.K:
        lam = np.trace(k).real / k.shape[0]
        lams.append(float(lam))
        k_res = max(k_res, np.linalg.norm(k - lam * np.eye(k.shape[0])))
    if strict and k_res > tol * max(1.0, np.linalg.norm(model.hamiltonian)):
        raise StructureMismatchError(f"H is not scalar on F(T) blocks ({k_res:.2e})", k_res)
    models = [reduced_semigroup(ops, i) for i in range(len(ft_blocks.blocks))]
    return models, tuple(lams), ops


def _spectra_match(a, b, tol):
    ea = np.linalg.eigvals(build_generator(a).matrix)
    eb = np.linalg.eigvals(build_generator(b).matrix)
    cost = np.abs(ea[:, None] - eb[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if len(r) else 0.0


def find_intertwiner(model_j, model_k, tol=lin.TOL_EQ):
    """Unitary V with V N^(j) V^dag = N^(k) for every jump and for the
    traceless Hamiltonian parts, or None.

    Solves the linear intertwining equations, then polar-corrects the
    solution and verifies that Ad_V intertwines the two Lindbladians.
    """
    m = model_j.dim
    if model_k.dim != m or len(model_j.jumps) != len(model_k.jumps):
        return None
    eye = np.eye(m)

    def traceless(h):
        return h - np.trace(h) / m * eye

    pairs = [(traceless(model_j.hamiltonian), traceless(model_k.hamiltonian))]
    for a, b in zip(model_j.jumps, model_k.jumps):
        pairs += [(a, b), (a.conj().T, b.conj().T)]
    # vec(V a) - vec(b V) = (a^T ⊗ 1 - 1 ⊗ b) vec(V)
    stacked = np.vstack([np.kron(a.T, eye) - np.kron(eye, b) for a, b in pairs])
    null = lin.nullspace(stacked, tol) if np.any(stacked) else np.eye(m * m)
    if len(null) == 0:
        return None
    v = lin.closest_unitary(lin.unvec(null[0], m))
    sj = build_generator(model_j).matrix
    sk = build_generator(model_k).matrix
    ad = np.kron(v.conj(), v)
    scale = max(1.0, np.linalg.norm(sj))
    if np.linalg.norm(ad @ sj - sk @ ad) > tol * scale * 10:
        return None
    return v


@dataclass(frozen=True)
class NtPrediction:
    classes: tuple  # tuple of tuples of F(T)-block indices
    blocks: tuple  # (dim k_n, dim m_n) per class
    algebra: StarAlgebra = None
    tier_spectral: np.ndarray = None
    tier_linkage: np.ndarray = None
    inconsistencies: tuple = ()
    intertwiners: dict = field(default_factory=dict)


def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def nt_from_ft(ft_blocks, per_block_models, nt=None, tol=lin.TOL_EQ, spectral_tol=1e-6,
               search_max_dim=3):
    """Group F(T) blocks into classes of the equivalence relation and
    predict the N(T) decomposition.

    Two tests decide whether blocks j and k belong together: equal
    multiplicity dimension with matching Lindbladian spectra (cheap and
    necessary up to gauge) and, when the directly computed ``nt`` is
    given, a nonzero compression p_j x p_k of some x in N(T).  Classes
    follow the second test; every disagreement is listed in
    ``inconsistencies``.
    """
    nb = len(ft_blocks.blocks)
    fdims = [m for _, m in ft_blocks.blocks]
    spectral = np.zeros((nb, nb), dtype=bool)
    for j in range(nb):
        for k in range(nb):
            if fdims[j] != fdims[k]:
                continue
            scale = max(1.0, np.linalg.norm(build_generator(per_block_models[j]).matrix, 2))
            spectral[j, k] = _spectra_match(per_block_models[j], per_block_models[k],
                                            spectral_tol) <= spectral_tol * scale
    linkage = None
    link_elems = {}
    if nt is not None:
        linkage = np.zeros((nb, nb), dtype=bool)
        rows = [ft_blocks.block_rows(j) for j in range(nb)]
        basis = nt.basis
        for j in range(nb):
            for k in range(nb):
                comps = [rows[j] @ x @ rows[k].conj().T for x in basis]
                norms = [np.linalg.norm(c) for c in comps]
                best = int(np.argmax(norms)) if norms else 0
                if norms and norms[best] > tol:
                    linkage[j, k] = True
                    link_elems[(j, k)] = comps[best]
    decide = linkage if linkage is not None else spectral
    parent = list(range(nb))
    for j in range(nb):
        for k in range(j + 1, nb):
            if decide[j, k]:
                parent[_find(parent, k)] = _find(parent, j)
    groups = {}
    for j in range(nb):
        groups.setdefault(_find(parent, j), []).append(j)
    classes = tuple(tuple(g) for g in sorted(groups.values()))

    issues = []
    intertwiners = {}
    if linkage is not None:
        for j in range(nb):
            for k in range(j + 1, nb):
                if spectral[j, k] and not linkage[j, k]:
                    note = ""
                    if fdims[j] <= search_max_dim:
                        v = find_intertwiner(per_block_models[j], per_block_models[k], tol)
                        intertwiners[(j, k)] = v
                        note = "; no operator intertwiner" if v is None else "; operator intertwiner exists"
                    issues.append(
                        f"blocks {j},{k}: Lindbladian spectra match but N(T) has no linking element{note}"
                    )
                elif linkage[j, k] and not spectral[j, k]:
                    issues.append(
                        f"blocks {j},{k}: linked in N(T) but reduced Lindbladian spectra differ"
                    )

    shapes = tuple((sum(ft_blocks.blocks[j][0] for j in c), fdims[c[0]]) for c in classes)
    algebra = None
    if linkage is not None:
        algebra, more = _predicted_nt(ft_blocks, classes, link_elems, nt.dim, tol)
        issues += more
    return NtPrediction(classes, shapes, algebra, spectral, linkage, tuple(issues), intertwiners)


def _link_unitary(x, sj, sk, f):
    """Write x ≈ A ⊗ W (A: S_k -> S_j, W: f_k -> f_j); return the unitary
    part of W and the relative rank-one defect."""
    t = x.reshape(sj, f, sk, f).transpose(0, 2, 1, 3).reshape(sj * sk, f * f)
    u, s, vh = np.linalg.svd(t, full_matrices=False)
    w = vh[0].reshape(f, f)
    defect = s[1] / s[0] if len(s) > 1 else 0.0
    return lin.closest_unitary(w), float(defect)


def _predicted_nt(ft_blocks, classes, link_elems, d, tol):
    issues = []
    mats = []
    for c in classes:
        j0 = c[0]
        f = ft_blocks.blocks[j0][1]
        vs = {j0: np.eye(f)}
        for j in c[1:]:
            if (j0, j) not in link_elems:
                issues.append(f"blocks {j0},{j}: same class but no direct linking element")
                continue
            w, defect = _link_unitary(link_elems[(j0, j)], ft_blocks.blocks[j0][0],
                                      ft_blocks.blocks[j][0], f)
            if defect > 1e-6:
                issues.append(f"blocks {j0},{j}: linking element is not a tensor product ({defect:.1e})")
            vs[j] = w  # w: f_j -> f_j0
        members = [j for j in c if j in vs]
        for j in members:
            rj = ft_blocks.block_rows(j)
            sj = ft_blocks.blocks[j][0]
            for k in members:
                rk = ft_blocks.block_rows(k)
                sk = ft_blocks.blocks[k][0]
                link = vs[j].conj().T @ vs[k]
                for a in range(sj):
                    for b in range(sk):
                        e = np.zeros((sj, sk), dtype=complex)
                        e[a, b] = 1
                        mats.append(rj.conj().T @ np.kron(e, link) @ rk)
    return StarAlgebra.from_matrices(mats, d), issues


@dataclass(frozen=True)
class AutomorphismReport:
    t_samples: tuple
    conjugation_error: float
    multiplicativity_error: float
    inversion_error: float
    tol: float

    @property
    def ok(self):
        return max(self.conjugation_error, self.multiplicativity_error,
                   self.inversion_error) <= self.tol


def verify_automorphism_action(model, nt, t_samples=DEFAULT_T_SAMPLES, tol=1e-7):
    """On N(T): T_t(x) = e^{itH} x e^{-itH}, T_t is multiplicative, and
    T_{-t} inverts it.

    The inverse is the group extension of the restriction of the generator
    to N(T) (which is invariant); the global e^{-tL} would amplify roundoff
    in the decaying directions by e^{t * gap}.
    """
    gen = build_generator(model)
    b = nt.vectors.T  # orthonormal columns
    restricted = b.conj().T @ gen.matrix @ b
    conj = mult = inv = 0.0
    for t in t_samples:
        tt = semigroup_map(gen, t)
        back = lin.expm(-t * restricted)
        ut = lin.expm(1j * t * model.hamiltonian)
        for x in nt.basis:
            y = tt.apply(x)
            conj = max(conj, np.linalg.norm(y - ut @ x @ ut.conj().T))
            mult = max(mult, np.linalg.norm(tt.apply(x.conj().T @ x) - y.conj().T @ y))
            mult = max(mult, np.linalg.norm(tt.apply(x @ x.conj().T) - y @ y.conj().T))
            xb = lin.unvec(b @ (back @ (b.conj().T @ lin.vec(y))), model.dim)
            inv = max(inv, np.linalg.norm(xb - x))
    return AutomorphismReport(tuple(t_samples), float(conj), float(mult), float(inv), tol)
