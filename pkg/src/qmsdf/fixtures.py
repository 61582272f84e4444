"""Bundled models and JSON (de)serialization of models and densities."""
import numpy as np

from .errors import ModelValidationError
from .model import GkslModel


def e(d, i, j):
    """Matrix unit |e_i><e_j| with 1-based indices."""
    x = np.zeros((d, d), dtype=complex)
    x[i - 1, j - 1] = 1
    return x


SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SMINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SPLUS = SMINUS.T.copy()


def example_2_6(omega=1.0):
    return GkslModel(3, omega * e(3, 1, 1), (e(3, 2, 3),), ("L",))


def example_4_3(g31=1.0, g32=1.0, kappa3=1.0):
    # G = (-g33/2 + i kappa3) e33 with g33 = g31 + g32, i.e. H = -kappa3 e33
    return GkslModel(
        3,
        -kappa3 * e(3, 3, 3),
        (np.sqrt(g31) * e(3, 1, 3), np.sqrt(g32) * e(3, 2, 3)),
        ("L31", "L32"),
    )


def example_4_3_G(g31=1.0, g32=1.0, kappa3=1.0):
    g33 = g31 + g32
    return (-g33 / 2 + 1j * kappa3) * e(3, 3, 3)


def depolarizing_qubit(rate=1.0):
    c = np.sqrt(rate)
    return GkslModel(2, np.zeros((2, 2)), (c * SX, c * SY, c * SZ), ("X", "Y", "Z"))


def amplitude_damping_qubit(gamma=1.0, omega=1.0):
    return GkslModel(2, omega / 2 * SZ, (np.sqrt(gamma) * SMINUS,), ("a",))


def tensor_K12():
    """H = diag(1,2) ⊗ 1 + 1 ⊗ M_0, L_1 = 1 ⊗ s_-, L_2 = 0.5 * 1 ⊗ s_+ on C^2 ⊗ C^2."""
    eye = np.eye(2)
    m0 = 0.3 * SX
    h = np.kron(np.diag([1.0, 2.0]), eye) + np.kron(eye, m0)
    jumps = (np.kron(eye, SMINUS), 0.5 * np.kron(eye, SPLUS))
    return GkslModel(4, h, jumps, ("L1", "L2"))


def tensor_K12_corrupted():
    """tensor_K12 with a Hamiltonian term that is not of block form with
    respect to the N(T) decomposition of the clean model."""
    clean = tensor_K12()
    bad = 0.2 * np.kron(SX, SZ)
    return GkslModel(4, clean.hamiltonian + bad, clean.jumps, clean.labels)


def unitary_only():
    return GkslModel(3, np.diag([0.0, 1.0, 3.0]).astype(complex), (), ())


FIXTURES = {
    "example_2_6": (example_2_6, "d=3, H = omega e11 with omega = 1, L = e23; atomic N(T), no faithful invariant state"),
    "example_4_3": (example_4_3, "generic 3-level model, gamma31 = gamma32 = 1, kappa3 = 1; "
                    "sign convention: H = -kappa3 e33, so that G = -(gamma31 + gamma32)/2 e33 + i kappa3 e33 is dissipative"),
    "depolarizing_qubit": (depolarizing_qubit, "H = 0, jumps sigma_x, sigma_y, sigma_z"),
    "amplitude_damping_qubit": (amplitude_damping_qubit, "H = sigma_z / 2, L = sigma_-"),
    "tensor_K12": (tensor_K12, "C^2 ⊗ C^2, H = diag(1,2) ⊗ 1 + 1 ⊗ 0.3 sigma_x, L = 1 ⊗ sigma_-, 0.5 * 1 ⊗ sigma_+"),
    "unitary_only": (unitary_only, "H = diag(0,1,3), no jumps"),
    "tensor_K12_corrupted": (tensor_K12_corrupted, "tensor_K12 plus 0.2 sigma_x ⊗ sigma_z in H; "
                             "negative control for block extraction against the clean frame"),
}


def fixture_names():
    return sorted(FIXTURES)


def get_fixture(name):
    if name not in FIXTURES:
        raise KeyError(name)
    return FIXTURES[name][0]()


# JSON encoding: complex scalars are [re, im], matrices are row-major.

def encode_matrix(x):
    x = np.asarray(x, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in x]


def decode_matrix(data, path="$"):
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelValidationError(f"{path}: not a numeric matrix ({exc})") from None
    if a.ndim != 3 or a.shape[2] != 2:
        raise ModelValidationError(f"{path}: expected rows of [re, im] pairs, got shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def model_to_json(model, comment=None):
    out = {
        "dim": int(model.dim),
        "hamiltonian": encode_matrix(model.hamiltonian),
        "jumps": [encode_matrix(l) for l in model.jumps],
    }
    if model.labels:
        out["labels"] = list(model.labels)
    if comment:
        out["comment"] = comment
    return out


def model_from_json(data):
    d = data["dim"]
    h = decode_matrix(data["hamiltonian"], "$.hamiltonian")
    jumps = tuple(decode_matrix(l, f"$.jumps[{k}]") for k, l in enumerate(data.get("jumps", [])))
    return GkslModel(d, h, jumps, tuple(data.get("labels", ())))
