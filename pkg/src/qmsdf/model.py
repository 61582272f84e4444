"""GKSL data, generators and semigroup maps as dense superoperators."""
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _linalg as lin
from .errors import ModelValidationError, ShapeError

HERMITICITY_TOL = 1e-8


def _as_square(x, dim, what):
    a = np.asarray(x, dtype=complex)
    if a.shape != (dim, dim):
        raise ShapeError(f"{what} has shape {a.shape}, expected {(dim, dim)}")
    if not np.all(np.isfinite(a)):
        raise ModelValidationError(f"{what} has non-finite entries")
    return a


@dataclass(frozen=True)
class GkslModel:
    """Hamiltonian and jump operators of a GKSL generator on M_d.

    The Hamiltonian is symmetrized when it is Hermitian up to
    ``HERMITICITY_TOL`` (relative); larger violations are rejected.
    """

    dim: int
    hamiltonian: np.ndarray
    jumps: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ModelValidationError(f"dim must be a positive integer, got {self.dim!r}")
        h = _as_square(self.hamiltonian, self.dim, "hamiltonian")
        asym = np.linalg.norm(h - h.conj().T)
        if asym > HERMITICITY_TOL * max(np.linalg.norm(h), 1.0):
            raise ModelValidationError(f"hamiltonian is not Hermitian (|H - H^dag| = {asym:.3e})")
        h = (h + h.conj().T) / 2
        jumps = tuple(_as_square(l, self.dim, f"jumps[{k}]") for k, l in enumerate(self.jumps))
        for a in (h, *jumps):
            a.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jumps", jumps)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def all_operators(self):
        return (self.hamiltonian, *self.jumps)

    def with_hamiltonian(self, h):
        return GkslModel(self.dim, h, self.jumps, self.labels)

    def __hash__(self):
        return hash((self.dim, self.hamiltonian.tobytes(), tuple(j.tobytes() for j in self.jumps)))

    def __eq__(self, other):
        if not isinstance(other, GkslModel):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.hamiltonian, other.hamiltonian)
            and len(self.jumps) == len(other.jumps)
            and all(np.array_equal(a, b) for a, b in zip(self.jumps, other.jumps))
        )


@dataclass(frozen=True)
class Superoperator:
    """A linear map on M_d stored as a d^2 x d^2 matrix (column stacking)."""

    dim: int
    matrix: np.ndarray
    group_extension: bool = field(default=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d2 = self.dim * self.dim
        if m.shape != (d2, d2):
            raise ShapeError(f"superoperator matrix has shape {m.shape}, expected {(d2, d2)}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, x):
        x = np.asarray(x)
        if x.shape != (self.dim, self.dim):
            raise ShapeError(f"operand has shape {x.shape}, expected {(self.dim, self.dim)}")
        return lin.unvec(self.matrix @ lin.vec(x), self.dim)

    __call__ = apply

    def adjoint(self):
        """Hilbert-Schmidt adjoint; for a generator this is the predual."""
        return Superoperator(self.dim, self.matrix.conj().T)

    def __matmul__(self, other):
        if not isinstance(other, Superoperator):
            return NotImplemented
        return Superoperator(self.dim, self.matrix @ other.matrix)

    def __sub__(self, other):
        return Superoperator(self.dim, self.matrix - other.matrix)

    def norm(self):
        return float(np.linalg.norm(self.matrix, 2))

    @classmethod
    def identity(cls, dim):
        return cls(dim, np.eye(dim * dim, dtype=complex))

    @classmethod
    def zero(cls, dim):
        return cls(dim, np.zeros((dim * dim, dim * dim), dtype=complex))


def _generator_matrix(model):
    d = model.dim
    eye = np.eye(d)
    h = model.hamiltonian
    m = 1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for l in model.jumps:
        ldl = l.conj().T @ l
        m -= 0.5 * (np.kron(eye, ldl) + np.kron(ldl.T, eye))
        m += np.kron(l.T, l.conj().T)
    return m


def build_generator(model):
    """Heisenberg-picture generator

        L(x) = i[H, x] - 1/2 sum_l (L_l^dag L_l x - 2 L_l^dag x L_l + x L_l^dag L_l).
    """
    return Superoperator(model.dim, _generator_matrix(model))


def build_predual_generator(model):
    """Schrödinger-picture generator, the Hilbert-Schmidt adjoint of
    ``build_generator``: tr(L_*(rho) x) = tr(rho L(x))."""
    return build_generator(model).adjoint()


def semigroup_map(gen, t, allow_negative=False):
    """exp(t * gen).  Negative ``t`` requires ``allow_negative`` and yields a
    map flagged as a group extension."""
    t = float(t)
    if t < 0:
        if not allow_negative:
            raise ValueError("negative time requires allow_negative=True (group extension)")
        warnings.warn("negative-time map exp(tL) is a group extension, not a QMS element",
                      stacklevel=2)
    if t == 0:
        return Superoperator(gen.dim, np.eye(gen.dim ** 2, dtype=complex), group_extension=False)
    return Superoperator(gen.dim, lin.expm(t * gen.matrix), group_extension=t < 0)


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    rank: int
    family_size: int
    singular_values: tuple


def validate_minimality(model, tol_rank=lin.TOL_RANK):
    """Check that {1, L_1, ..., L_k} is linearly independent."""
    d = model.dim
    family = [np.eye(d, dtype=complex), *model.jumps]
    rows = lin.vec_rows(np.array(family))
    s = np.linalg.svd(rows, compute_uv=False)
    r = int(np.sum(s > tol_rank * s[0]))
    return MinimalityReport(r == len(family), r, len(family), tuple(float(v) for v in s))


def is_density(rho, tol=1e-8):
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False
    if np.linalg.norm(rho - rho.conj().T) > tol:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] >= -tol)


def as_density(rho, tol=1e-8):
    """Validate and return a Hermitian copy of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    if not is_density(rho, tol):
        raise ModelValidationError("matrix is not a density (PSD with unit trace)")
    return (rho + rho.conj().T) / 2


def choi_matrix(superop):
    """Choi matrix sum_ij e_ij ⊗ Phi(e_ij) of a superoperator."""
    d = superop.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            c += np.kron(lin.matrix_unit(d, i, j), superop.apply(lin.matrix_unit(d, i, j)))
    return c
