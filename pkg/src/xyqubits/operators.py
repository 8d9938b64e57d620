"""Two-qubit operators, the product/collective basis change and superoperator helpers.

Product basis order is (ee, eg, ge, gg) with atom 1 as the left tensor factor.
Collective basis order is (eps, s, a, g). Vectorisation is row-major:
vec(A X B) = kron(A, B.T) vec(X).
"""
import numpy as np

SQRT2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|
SM = SP.T.copy()
SZ = np.diag([1.0, -1.0]).astype(complex)

I4 = np.eye(4, dtype=complex)
S1P = np.kron(SP, I2)
S1M = np.kron(SM, I2)
S2P = np.kron(I2, SP)
S2M = np.kron(I2, SM)
S1Z = np.kron(SZ, I2)
S2Z = np.kron(I2, SZ)

SIGMA_P = (S1P, S2P)
SIGMA_M = (S1M, S2M)
SIGMA_Z = (S1Z, S2Z)

# columns: |eps>, |s>, |a>, |g> in the product basis
V_COLLECTIVE = np.array(
    [
        [1, 0, 0, 0],
        [0, 1 / SQRT2, 1 / SQRT2, 0],
        [0, 1 / SQRT2, -1 / SQRT2, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)

COLLECTIVE_LABELS = ("eps", "s", "a", "g")
PRODUCT_LABELS = ("ee", "eg", "ge", "gg")
_IDX = {k: i for i, k in enumerate(COLLECTIVE_LABELS)}


def ket(label: str) -> np.ndarray:
    """Basis ket in the product basis; accepts product or collective labels."""
    if label in PRODUCT_LABELS:
        v = np.zeros(4, dtype=complex)
        v[PRODUCT_LABELS.index(label)] = 1.0
        return v
    return V_COLLECTIVE[:, _IDX[label]].copy()


def projector(label: str) -> np.ndarray:
    v = ket(label)
    return np.outer(v, v.conj())


def A(i: str, j: str) -> np.ndarray:
    """Collective-basis operator |i><j| written in the collective basis."""
    out = np.zeros((4, 4), dtype=complex)
    out[_IDX[i], _IDX[j]] = 1.0
    return out


def basis_transform(x: np.ndarray, direction: str = "to_collective") -> np.ndarray:
    """Change a 4x4 operator (or density matrix) between product and collective bases."""
    V = V_COLLECTIVE
    if direction == "to_collective":
        return V.conj().T @ x @ V
    if direction == "to_product":
        return V @ x @ V.conj().T
    raise ValueError("direction must be 'to_collective' or 'to_product'")


def left(a: np.ndarray) -> np.ndarray:
    return np.kron(a, np.eye(a.shape[0]))


def right(b: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(b.shape[0]), b.T)


def sandwich(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Superoperator of X -> a X b."""
    return np.kron(a, b.T)


def commutator_super(h: np.ndarray) -> np.ndarray:
    """Superoperator of X -> -i [h, X]."""
    return -1j * (left(h) - right(h))


def dissipator(c: np.ndarray, rate: float = 1.0) -> np.ndarray:
    """rate * (c X c^+ - {c^+ c, X}/2)."""
    cdc = c.conj().T @ c
    return rate * (sandwich(c, c.conj().T) - 0.5 * left(cdc) - 0.5 * right(cdc))


def vec(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x).reshape(-1)


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    d = dim or int(round(np.sqrt(v.size)))
    return v.reshape(d, d)


def transform_super(L: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Superoperator L expressed in the basis X' = V^+ X V."""
    U = np.kron(V.conj().T, V.T)  # vec(V^+ X V)
    Uinv = np.kron(V, V.conj())  # vec(V X' V^+)
    return U @ L @ Uinv


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)
