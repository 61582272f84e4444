"""Unital *-subalgebras of M_d: generation, commutants, centers and
explicit block (Wedderburn) decompositions.

Every randomized step takes an explicit ``seed`` so results are
reproducible bit for bit.
"""
from dataclasses import dataclass

import numpy as np

from . import _linalg as lin
from .errors import DegeneracyError, ShapeError, StructureError

MAX_RETRIES = 8


@dataclass(frozen=True)
class StarAlgebra:
    """A *-subalgebra of M_d given by a Hilbert-Schmidt orthonormal basis.

    ``vectors`` holds the vec()'d basis as rows; ``basis`` the same
    elements as d x d matrices.
    """

    dim: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[1] != self.dim ** 2:
            raise ShapeError(f"basis rows must have length {self.dim ** 2}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_matrices(cls, mats, dim, tol=lin.TOL_RANK):
        mats = list(mats)
        if not mats:
            return cls(dim, np.zeros((0, dim * dim), dtype=complex))
        return cls(dim, lin.orthonormal_basis(lin.vec_rows(np.array(mats)), tol))

    @property
    def basis(self):
        return lin.unvec_rows(self.vectors, self.dim)

    def __len__(self):
        return self.vectors.shape[0]

    def contains(self, x, tol=lin.TOL_EQ):
        return lin.projection_residual(lin.vec(x), self.vectors) <= tol

    def residual(self, x):
        return lin.projection_residual(lin.vec(x), self.vectors)

    def project(self, x):
        v = self.vectors
        return lin.unvec(v.T @ (v.conj() @ lin.vec(x)), self.dim)

    def distance(self, other):
        return lin.span_distance(self.vectors, other.vectors)

    def conjugate(self, u):
        """The algebra u A u^dag."""
        return StarAlgebra.from_matrices([u @ b @ u.conj().T for b in self.basis], self.dim)

    def hermitian_element(self, rng):
        """A random Hermitian element (the algebra is *-closed)."""
        b = self.basis
        a = rng.standard_normal(len(b))
        c = rng.standard_normal(len(b))
        h = np.tensordot(a, b + lin.dagger(b), 1) / 2 + np.tensordot(c, 1j * (b - lin.dagger(b)), 1) / 2
        return (h + h.conj().T) / 2


def check_invariants(alg, tol=lin.TOL_EQ):
    """Residuals for unit, adjoint closure and multiplicative closure."""
    b = alg.basis
    res_unit = alg.residual(np.eye(alg.dim))
    res_adj = max((alg.residual(x.conj().T) for x in b), default=0.0)
    res_mul = 0.0
    for x in b:
        for y in b:
            # basis elements have unit norm; products may vanish
            res_mul = max(res_mul, lin.projection_residual(lin.vec(x @ y), alg.vectors, 1.0))
    return {
        "unit": res_unit,
        "adjoint": res_adj,
        "product": res_mul,
        "ok": max(res_unit, res_adj, res_mul) <= tol,
    }


def generated_algebra(generators, dim, tol=lin.TOL_RANK):
    """Smallest unital *-algebra containing ``generators``.

    Spans words in the generators and their adjoints, multiplying only the
    newly found directions at each round until nothing new appears.
    """
    gens = [np.asarray(g, dtype=complex) for g in generators]
    letters = []
    for g in gens:
        if g.shape != (dim, dim):
            raise ShapeError(f"generator of shape {g.shape} in M_{dim}")
        letters.extend([g, g.conj().T])
    basis = lin.orthonormal_basis(lin.vec(np.eye(dim, dtype=complex))[None], tol)
    frontier = basis
    while len(frontier) and letters:
        words = lin.unvec_rows(frontier, dim)
        cands = [w @ s for w in words for s in letters]
        new = lin.extend_basis(basis, lin.vec_rows(np.array(cands)), tol)
        basis = np.vstack([basis, new])
        frontier = new
        if len(basis) >= dim * dim:
            break
    return StarAlgebra(dim, basis)


def _sylvester_rows(a, dim):
    eye = np.eye(dim)
    return np.kron(eye, a) - np.kron(a.T, eye)


def commutant(elements, dim, tol=lin.TOL_RANK):
    """{x : [x, a] = 0 = [x, a^dag] for every given a}.

    ``elements`` is a StarAlgebra or a sequence of d x d matrices.
    """
    if isinstance(elements, StarAlgebra):
        mats = list(elements.basis)
        star_closed = True
    else:
        mats = [np.asarray(a, dtype=complex) for a in elements]
        star_closed = False
    if not mats:
        return StarAlgebra(dim, np.eye(dim * dim, dtype=complex))
    family = list(mats)
    if not star_closed:
        span = lin.orthonormal_basis(lin.vec_rows(np.array(mats)), tol)
        for a in mats:
            if lin.projection_residual(lin.vec(a.conj().T), span) > tol:
                family.append(a.conj().T)
    stacked = np.vstack([_sylvester_rows(a, dim) for a in family])
    scale = max(np.linalg.norm(a) for a in family)
    null = lin.nullspace(stacked, tol, atol=tol * scale)
    return StarAlgebra(dim, null)


def center(alg, tol=lin.TOL_RANK):
    """A ∩ A' computed on coefficient vectors w.r.t. the algebra basis."""
    b = alg.basis
    k = len(b)
    if k == 0:
        return alg
    cols = np.empty((k * alg.dim ** 2, k), dtype=complex)
    for j, y in enumerate(b):
        cols[:, j] = np.concatenate([lin.vec(y @ x - x @ y) for x in b])
    coeffs = lin.nullspace(cols, tol, atol=tol)
    return StarAlgebra.from_matrices(np.tensordot(coeffs, b, 1), alg.dim)


def _cluster(values, resolution):
    """Group sorted real values into runs separated by more than
    ``resolution``; returns lists of indices."""
    order = np.argsort(values)
    groups = [[order[0]]]
    for a, b in zip(order[:-1], order[1:]):
        if values[b] - values[a] > resolution:
            groups.append([b])
        else:
            groups[-1].append(b)
    return groups


def minimal_central_projections(alg, seed=0, tol=lin.TOL_RANK, z=None):
    """Minimal projections of the center, as spectral projections of a
    random Hermitian central element."""
    z = center(alg, tol) if z is None else z
    nz = len(z)
    d = alg.dim
    if nz == 1:
        return [np.eye(d, dtype=complex)]
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        h = z.hermitian_element(rng)
        w, v = np.linalg.eigh(h)
        scale = max(np.abs(w).max(), 1.0)
        res = 10 * tol * scale
        groups = _cluster(w, res)
        if len(groups) != nz:
            continue
        # clusters must be well separated, not merely above the resolution
        if np.diff([w[g].mean() for g in groups]).min() < 100 * res:
            continue
        projs = [v[:, g] @ v[:, g].conj().T for g in groups]
        if all(z.residual(p) <= lin.TOL_EQ for p in projs):
            return projs
    raise DegeneracyError(
        f"could not separate {nz} central projections after {MAX_RETRIES} attempts"
    )


@dataclass(frozen=True)
class FactorBlock:
    n: int
    m: int
    isometry: np.ndarray  # d x (n*m), columns indexed (a, mu) -> a*m + mu


def _compressed_basis(alg, w, tol):
    mats = [w.conj().T @ b @ w for b in alg.basis]
    return StarAlgebra.from_matrices(mats, w.shape[1], tol)


def factor_decomposition(alg, p, seed=0, tol=lin.TOL_RANK):
    """Write the factor p A p as B(C^n) ⊗ 1_m on the range of p.

    Returns (n, m, isometry) where the isometry's columns form an
    orthonormal basis of ran(p) in which p A p reads X ⊗ 1_m.
    """
    d = alg.dim
    wv, vv = np.linalg.eigh((p + p.conj().T) / 2)
    w = vv[:, wv > 0.5]
    r = w.shape[1]
    if r == 0:
        raise StructureError("projection is zero")
    comp = _compressed_basis(alg, w, tol)
    if len(center(comp, tol)) != 1:
        raise StructureError("compressed algebra is not a factor")
    n = int(round(np.sqrt(len(comp))))
    if n * n != len(comp) or r % n:
        raise DegeneracyError(
            f"factor of dimension {len(comp)} does not fit a range of rank {r}"
        )
    m = r // n
    if n == 1:
        return FactorBlock(1, m, w)
    rng = np.random.default_rng(seed)
    for _ in range(MAX_RETRIES):
        h = comp.hermitian_element(rng)
        ev, vecs = np.linalg.eigh(h)
        scale = max(np.abs(ev).max(), 1.0)
        groups = _cluster(ev, 1e-6 * scale)
        if len(groups) != n or any(len(g) != m for g in groups):
            continue
        q1 = vecs[:, groups[0]]  # orthonormal basis of a minimal projection
        x = np.tensordot(rng.standard_normal(len(comp)) + 1j * rng.standard_normal(len(comp)),
                         comp.basis, 1)
        cols = [q1]
        ok = True
        for g in groups[1:]:
            qj = vecs[:, g]
            v = qj @ (qj.conj().T @ x @ q1)  # maps ran(q1) into ran(qj)
            sv = np.linalg.svd(v, compute_uv=False)
            if sv.min() < 1e-3 * max(sv.max(), 1e-300) or sv.max() < 1e-8:
                ok = False
                break
            # v = c * partial isometry; restore the isometry via its polar part
            u, _, vh = np.linalg.svd(v, full_matrices=False)
            cols.append(u @ vh)
        if not ok:
            continue
        frame = np.empty((r, r), dtype=complex)
        for a, c in enumerate(cols):
            frame[:, a * m:(a + 1) * m] = c
        frame = lin.closest_unitary(frame)
        iso = w @ frame
        if _block_error(comp.basis, frame, n, m) > lin.TOL_EQ:
            continue
        return FactorBlock(n, m, iso)
    raise DegeneracyError("could not build matrix units for factor")


def _block_error(mats, frame, n, m):
    """Largest distance of frame^dag x frame from (B(C^n) ⊗ 1_m)."""
    err = 0.0
    for x in mats:
        y = frame.conj().T @ x @ frame
        k = lin.partial_trace_second(y, n, m) / m
        err = max(err, np.linalg.norm(y - np.kron(k, np.eye(m))) / max(np.linalg.norm(x), 1e-300))
    return err


@dataclass(frozen=True)
class BlockStructure:
    """U A U^dag = ⊕_i B(C^{n_i}) ⊗ 1_{m_i}.

    Rows of ``unitary`` are grouped block by block; inside block i the row
    of basis vector (a, mu) is offset_i + a*m_i + mu.
    """

    unitary: np.ndarray
    blocks: tuple
    central_projections: tuple
    seed: int = 0

    @property
    def dim(self):
        return self.unitary.shape[0]

    @property
    def offsets(self):
        out, o = [], 0
        for n, m in self.blocks:
            out.append(o)
            o += n * m
        return out

    def block_rows(self, i):
        o = self.offsets[i]
        n, m = self.blocks[i]
        return self.unitary[o:o + n * m]

    def to_blocks(self, x):
        """U x U^dag."""
        return self.unitary @ x @ self.unitary.conj().T

    def from_blocks(self, y):
        return self.unitary.conj().T @ y @ self.unitary

    def pattern_algebra(self):
        """⊕ B(C^n_i) ⊗ 1_{m_i} pulled back to the original frame."""
        mats = []
        for i, (n, m) in enumerate(self.blocks):
            rows = self.block_rows(i)
            for a in range(n):
                for b in range(n):
                    y = np.kron(lin.matrix_unit(n, a, b), np.eye(m))
                    mats.append(rows.conj().T @ y @ rows)
        return StarAlgebra.from_matrices(mats, self.dim)

    def off_pattern_mass(self, x):
        """Norm of U x U^dag outside the block-diagonal tensor pattern,
        relative to ||x||."""
        y = self.to_blocks(x)
        nx = max(np.linalg.norm(x), 1e-300)
        proj = np.zeros_like(y)
        for i, (n, m) in enumerate(self.blocks):
            o = self.offsets[i]
            blk = y[o:o + n * m, o:o + n * m]
            k = lin.partial_trace_second(blk, n, m) / m
            proj[o:o + n * m, o:o + n * m] = np.kron(k, np.eye(m))
        return float(np.linalg.norm(y - proj) / nx)


def _fingerprint(p):
    return float(np.real(np.sum(np.arange(1, p.shape[0] + 1) * np.diag(p))))


def atomic_decomposition(alg, seed=0, tol=lin.TOL_RANK):
    """Full block decomposition U A U^dag = ⊕ B(C^{n_i}) ⊗ 1_{m_i}."""
    projs = minimal_central_projections(alg, seed, tol)
    parts = []
    for k, p in enumerate(projs):
        fb = factor_decomposition(alg, p, seed + 1 + k, tol)
        parts.append((fb.n, fb.m, _fingerprint(p), p, fb.isometry))
    parts.sort(key=lambda t: (t[0], t[1], round(t[2], 6)))
    u = np.vstack([iso.conj().T for *_, iso in parts])
    bs = BlockStructure(
        unitary=u,
        blocks=tuple((n, m) for n, m, *_ in parts),
        central_projections=tuple(p for _, _, _, p, _ in parts),
        seed=seed,
    )
    if sum(n * m for n, m in bs.blocks) != alg.dim:
        raise DegeneracyError("block dimensions do not add up to d")
    if sum(n * n for n, _ in bs.blocks) != len(alg):
        raise DegeneracyError("sum of n_i^2 differs from the algebra dimension")
    return bs


def check_block_structure(bs, alg, tol=lin.TOL_EQ):
    u = bs.unitary
    d = bs.dim
    unit_err = float(np.linalg.norm(u.conj().T @ u - np.eye(d), 2))
    projs = bs.central_projections
    sum_err = float(np.linalg.norm(sum(projs) - np.eye(d)))
    orth_err = max(
        (float(np.linalg.norm(p @ q)) for i, p in enumerate(projs) for q in projs[i + 1:]),
        default=0.0,
    )
    pattern = max((bs.off_pattern_mass(b) for b in alg.basis), default=0.0)
    return {
        "unitarity": unit_err,
        "projection_sum": sum_err,
        "projection_orthogonality": orth_err,
        "off_pattern": pattern,
        "dimension_sum": sum(n * m for n, m in bs.blocks) == d,
        "ok": max(unit_err, sum_err, orth_err, pattern) <= tol
        and sum(n * m for n, m in bs.blocks) == d,
    }


def sigma_expectation(x, sigma, n=None):
    """E_sigma(X) = tr_m(X (1 ⊗ sigma)) for X on C^n ⊗ C^m.

    Satisfies tr(E_sigma(X) eta) = tr(X (eta ⊗ sigma)).
    """
    x = np.asarray(x)
    sigma = np.asarray(sigma)
    m = sigma.shape[0]
    if n is None:
        if x.shape[0] % m:
            raise ShapeError(f"operator of size {x.shape[0]} does not factor through m={m}")
        n = x.shape[0] // m
    if x.shape != (n * m, n * m):
        raise ShapeError(f"operator of shape {x.shape} is not on C^{n} ⊗ C^{m}")
    return lin.partial_trace_second(x @ np.kron(np.eye(n), sigma), n, m)


def block_algebra(blocks, unitary=None):
    """Build U^dag (⊕ B(C^n) ⊗ 1_m) U; handy for tests and fixtures."""
    d = sum(n * m for n, m in blocks)
    u = np.eye(d, dtype=complex) if unitary is None else unitary
    mats, o = [], 0
    for n, m in blocks:
        for a in range(n):
            for b in range(n):
                y = np.zeros((d, d), dtype=complex)
                y[o:o + n * m, o:o + n * m] = np.kron(lin.matrix_unit(n, a, b), np.eye(m))
                mats.append(u.conj().T @ y @ u)
        o += n * m
    return StarAlgebra.from_matrices(mats, d)
