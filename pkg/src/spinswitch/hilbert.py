"""Spin-1/2 chain Hilbert space: basis encoding, states, and sparse operators.

Basis convention
----------------
A chain of L sites lives in integers b in [0, 2**L).  Bit (j - 1) of b stores
site j (sites are numbered 1..L).  Bit value 0 means spin up (sigma^z = +1),
bit value 1 means spin down (sigma^z = -1), so the all-up state is index 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import sparse

MAX_SITES = 20
NORM_TOL = 1e-8
HERMITIAN_TOL = 1e-12

SITE_AXES = ("x", "y", "z", "plus", "minus")
COUPLING_KINDS = ("xx", "flipflop", "double_raise", "double_lower")


@dataclass(frozen=True)
class HilbertSpace:
    """Computational basis of a chain of L spin-1/2 sites.

    Args:
        L: number of sites, between 1 and 20 (dense vectors above 2**20
           amplitudes are not supported).
    """

    L: int

    def __post_init__(self):
        if not isinstance(self.L, int) or not 1 <= self.L <= MAX_SITES:
            raise ValueError(f"L must be an integer in 1..{MAX_SITES}, got {self.L!r}")

    @property
    def dim(self) -> int:
        return 1 << self.L

    def site_mask(self, j: int) -> int:
        """Bit mask selecting site j (1-based)."""
        self.check_site(j)
        return 1 << (j - 1)

    def bond_mask(self, j: int) -> int:
        """Bit mask selecting the pair (j, j+1)."""
        self.check_bond(j)
        return (1 << (j - 1)) | (1 << j)

    def check_site(self, j: int):
        if not 1 <= j <= self.L:
            raise IndexError(f"site index {j} outside 1..{self.L}")

    def check_bond(self, j: int):
        if not 1 <= j <= self.L - 1:
            raise IndexError(f"bond index {j} outside 1..{self.L - 1}")

    def index_of(self, spins: Sequence[str]) -> int:
        """Basis index of a product configuration, e.g. ["down", "up", "up"] -> 1."""
        if len(spins) != self.L:
            raise ValueError(f"expected {self.L} spin labels, got {len(spins)}")
        index = 0
        for j, s in enumerate(spins, start=1):
            if s == "down":
                index |= 1 << (j - 1)
            elif s != "up":
                raise ValueError(f"spin label must be 'up' or 'down', got {s!r}")
        return index

    def spins_of(self, index: int) -> list[str]:
        """Inverse of index_of."""
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} outside 0..{self.dim - 1}")
        return ["down" if index >> (j - 1) & 1 else "up" for j in range(1, self.L + 1)]


class QuantumState:
    """Normalized state vector over a HilbertSpace.

    Amplitudes are stored as a dense complex128 array of length space.dim.
    The norm must be 1 within 1e-8; this is checked at construction so that
    downstream observable code can assume it.
    """

    __slots__ = ("space", "amplitudes")

    def __init__(self, space: HilbertSpace, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (space.dim,):
            raise ValueError(
                f"amplitude vector has shape {amplitudes.shape}, expected ({space.dim},)"
            )
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        self.space = space
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other: "QuantumState") -> complex:
        """<self|other>."""
        if other.space != self.space:
            raise ValueError("states live in different spaces")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "QuantumState":
        return QuantumState(self.space, self.amplitudes.copy())


@dataclass
class SparseOperator:
    """CSR-backed linear operator on a HilbertSpace.

    The hermitian flag is a promise, verified against the stored matrix to
    1e-12 at construction, so expectation values may be treated as real by
    callers that check the flag.
    """

    space: HilbertSpace
    matrix: sparse.csr_matrix
    hermitian: bool = False

    def __post_init__(self):
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match dim {self.space.dim}"
            )
        if not sparse.isspmatrix_csr(self.matrix):
            self.matrix = self.matrix.tocsr()
        if self.matrix.dtype != np.complex128:
            self.matrix = self.matrix.astype(np.complex128)
        if self.hermitian:
            defect = self.matrix - self.matrix.getH()
            worst = np.abs(defect.data).max() if defect.nnz else 0.0
            if worst > HERMITIAN_TOL:
                raise ValueError(
                    f"operator marked hermitian but |A - A^dag| reaches {worst:.3e}"
                )

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.space, self.matrix.getH().tocsr(), self.hermitian)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(
            self.space, self.matrix + other.matrix, self.hermitian and other.hermitian
        )

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_space(other)
        return SparseOperator(
            self.space, self.matrix - other.matrix, self.hermitian and other.hermitian
        )

    def __mul__(self, scalar) -> "SparseOperator":
        herm = self.hermitian and float(np.imag(scalar)) == 0.0
        return SparseOperator(self.space, self.matrix * scalar, herm)

    __rmul__ = __mul__

    def _check_space(self, other: "SparseOperator"):
        if other.space != self.space:
            raise ValueError("operators act on different spaces")


def product_state(space: HilbertSpace, spins: Sequence[str]) -> QuantumState:
    """Product state from per-site labels, site 1 first.

    Args:
        space: target Hilbert space.
        spins: length-L sequence of "up" / "down".

    Returns:
        QuantumState with a single unit amplitude on the encoded basis index.
    """
    amplitudes = np.zeros(space.dim, dtype=np.complex128)
    amplitudes[space.index_of(spins)] = 1.0
    return QuantumState(space, amplitudes)


def all_up_state(space: HilbertSpace) -> QuantumState:
    return product_state(space, ["up"] * space.L)


@lru_cache(maxsize=None)
def site_operator(space: HilbertSpace, j: int, axis: str) -> SparseOperator:
    """Single-site Pauli or ladder operator at site j (1-based).

    Args:
        space: Hilbert space.
        j: site index in 1..L.
        axis: one of "x", "y", "z", "plus", "minus".

    Returns:
        SparseOperator; hermitian flag is set for the Pauli axes.
    """
    space.check_site(j)
    if axis not in SITE_AXES:
        raise ValueError(f"axis must be one of {SITE_AXES}, got {axis!r}")
    dim = space.dim
    mask = 1 << (j - 1)
    idx = np.arange(dim, dtype=np.int64)
    bit_set = (idx & mask) != 0

    if axis == "z":
        data = np.where(bit_set, -1.0 + 0.0j, 1.0 + 0.0j)
        mat = sparse.csr_matrix((data, (idx, idx)), shape=(dim, dim))
        return SparseOperator(space, mat, hermitian=True)
    if axis == "x":
        mat = sparse.csr_matrix(
            (np.ones(dim, dtype=np.complex128), (idx ^ mask, idx)), shape=(dim, dim)
        )
        return SparseOperator(space, mat, hermitian=True)
    if axis == "y":
        # <down|sy|up> = +i, <up|sy|down> = -i
        data = np.where(bit_set, -1.0j, 1.0j)
        mat = sparse.csr_matrix((data, (idx ^ mask, idx)), shape=(dim, dim))
        return SparseOperator(space, mat, hermitian=True)
    if axis == "plus":
        cols = idx[bit_set]
    else:  # minus
        cols = idx[~bit_set]
    data = np.ones(cols.size, dtype=np.complex128)
    mat = sparse.csr_matrix((data, (cols ^ mask, cols)), shape=(dim, dim))
    return SparseOperator(space, mat, hermitian=False)


@lru_cache(maxsize=None)
def two_site_coupling(space: HilbertSpace, j: int, kind: str) -> SparseOperator:
    """Nearest-neighbour coupling on bond j, acting on sites j and j+1.

    Kinds:
        "xx":            sx_j sx_{j+1}
        "flipflop":      s+_j s-_{j+1} + s-_j s+_{j+1}
        "double_raise":  s+_j s+_{j+1}
        "double_lower":  s-_j s-_{j+1}
    """
    space.check_bond(j)
    if kind not in COUPLING_KINDS:
        raise ValueError(f"kind must be one of {COUPLING_KINDS}, got {kind!r}")
    dim = space.dim
    m1 = 1 << (j - 1)
    m2 = 1 << j
    mask = m1 | m2
    idx = np.arange(dim, dtype=np.int64)
    pair = idx & mask

    if kind == "xx":
        cols = idx
        hermitian = True
    elif kind == "flipflop":
        cols = idx[(pair == m1) | (pair == m2)]
        hermitian = True
    elif kind == "double_raise":
        cols = idx[pair == mask]  # both down, raised to both up
        hermitian = False
    else:  # double_lower
        cols = idx[pair == 0]
        hermitian = False
    data = np.ones(cols.size, dtype=np.complex128)
    mat = sparse.csr_matrix((data, (cols ^ mask, cols)), shape=(dim, dim))
    return SparseOperator(space, mat, hermitian=hermitian)


def apply(operator: SparseOperator, state: QuantumState) -> np.ndarray:
    """Matrix-vector product O|psi> as a raw complex vector (not renormalized)."""
    if operator.space != state.space:
        raise ValueError("operator and state live in different spaces")
    return operator.matrix @ state.amplitudes


def expectation(operator: SparseOperator, state: QuantumState) -> complex:
    """<psi|O|psi>.  Imaginary part is numerical noise when O is hermitian."""
    return complex(np.vdot(state.amplitudes, apply(operator, state)))


@lru_cache(maxsize=None)
def zsign_table(space: HilbertSpace) -> np.ndarray:
    """(L, dim) array of sigma^z eigenvalues: row j-1 holds the signs for site j."""
    idx = np.arange(space.dim, dtype=np.int64)
    table = np.empty((space.L, space.dim), dtype=np.float64)
    for j in range(space.L):
        table[j] = np.where(idx >> j & 1, -1.0, 1.0)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def parity_signs(space: HilbertSpace) -> np.ndarray:
    """Eigenvalues of the global flip parity prod_j sigma^z_j, one per basis state."""
    signs = zsign_table(space).prod(axis=0)
    signs.setflags(write=False)
    return signs
