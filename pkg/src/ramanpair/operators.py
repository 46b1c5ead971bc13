"""Complex linear algebra on tensor-product Hilbert spaces.

Conventions: slot 0 of a signature is the cavity Fock space (dimension
n_max + 1), the remaining slots are atoms.  Dense numpy arrays are the
reference storage; scipy.sparse CSR is accepted everywhere as a drop-in
backend and must agree with dense to 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, SimError

HERMITICITY_RTOL = 1e-12
KET_NORM_ATOL = 1e-10
TRACE_ATOL = 1e-10
POSITIVITY_ATOL = 1e-8


@dataclass(frozen=True)
class DimSignature:
    """Ordered subsystem dimensions; slot 0 is the cavity."""

    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.dims) == 0:
            raise DimensionMismatchError("signature needs at least one slot")
        if self.dims[0] < 1:
            raise DimensionMismatchError("cavity dimension must be >= 1")
        if any(d < 2 for d in self.dims[1:]):
            raise DimensionMismatchError("atom dimensions must be >= 2")

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def index(self, occupations) -> int:
        """Flat basis index of the product state |occupations...>."""
        occ = tuple(occupations)
        if len(occ) != len(self.dims):
            raise DimensionMismatchError("one occupation number per slot")
        idx = 0
        for o, d in zip(occ, self.dims):
            if not 0 <= o < d:
                raise DimensionMismatchError(f"occupation {o} outside dimension {d}")
            idx = idx * d + o
        return idx


def _is_sparse(m) -> bool:
    return sp.issparse(m)


def _as_dense(m) -> np.ndarray:
    return m.toarray() if _is_sparse(m) else np.asarray(m)


class OperatorMatrix:
    """Square complex matrix carrying its tensor-space signature.

    Immutable: the dense buffer is marked read-only after construction.
    """

    def __init__(self, sig: DimSignature, data):
        if _is_sparse(data):
            data = data.tocsr().astype(complex)
            shape = data.shape
        else:
            data = np.array(data, dtype=complex)
            data.setflags(write=False)
            shape = data.shape
        if shape != (sig.total, sig.total):
            raise DimensionMismatchError(
                f"matrix shape {shape} does not match signature dimension {sig.total}"
            )
        self.sig = sig
        self.data = data

    # -- storage ------------------------------------------------------

    @property
    def is_sparse(self) -> bool:
        return _is_sparse(self.data)

    def to_dense(self) -> "OperatorMatrix":
        return self if not self.is_sparse else OperatorMatrix(self.sig, self.data.toarray())

    def to_sparse(self) -> "OperatorMatrix":
        return self if self.is_sparse else OperatorMatrix(self.sig, sp.csr_matrix(self.data))

    def dense(self) -> np.ndarray:
        return _as_dense(self.data)

    # -- algebra ------------------------------------------------------

    def _check_sig(self, other: "OperatorMatrix"):
        if self.sig != other.sig:
            raise DimensionMismatchError("operator signatures differ")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_sig(other)
        return OperatorMatrix(self.sig, self.data + other.data)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_sig(other)
        return OperatorMatrix(self.sig, self.data - other.data)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.sig, self.data * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "OperatorMatrix":
        return self * (-1.0)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check_sig(other)
        return OperatorMatrix(self.sig, self.data @ other.data)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.sig, self.data.conj().T)

    def norm(self) -> float:
        """Frobenius norm."""
        if self.is_sparse:
            return float(sp.linalg.norm(self.data))
        return float(np.linalg.norm(self.data))

    def max_abs(self) -> float:
        if self.is_sparse:
            return float(np.abs(self.data.data).max()) if self.data.nnz else 0.0
        return float(np.abs(self.data).max()) if self.data.size else 0.0

    def is_hermitian(self, rtol: float = HERMITICITY_RTOL) -> bool:
        dev = (self - self.dag()).max_abs()
        scale = self.max_abs()
        return dev <= rtol * scale if scale > 0 else dev == 0.0

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"OperatorMatrix(dims={self.sig.dims}, {kind})"


class QuantumState:
    """Pure ket or density matrix on a tensor-product space."""

    def __init__(self, sig: DimSignature, kind: str, data, check: bool = True):
        if kind not in ("ket", "density"):
            raise SimError(f"unknown state kind {kind!r}")
        data = np.array(data, dtype=complex)
        self.sig = sig
        self.kind = kind
        self.data = data
        if kind == "ket":
            if data.shape != (sig.total,):
                raise DimensionMismatchError("ket length does not match signature")
            if check and abs(np.linalg.norm(data) - 1.0) > KET_NORM_ATOL:
                raise SimError(f"ket norm {np.linalg.norm(data):.12f} is not 1")
        else:
            if data.shape != (sig.total, sig.total):
                raise DimensionMismatchError("density matrix shape does not match signature")
            if check:
                tr = np.trace(data)
                if abs(tr - 1.0) > TRACE_ATOL:
                    raise SimError(f"density matrix trace {tr:.12f} is not 1")
                if np.abs(data - data.conj().T).max() > 1e-10:
                    raise SimError("density matrix is not Hermitian")
                if np.linalg.eigvalsh(data).min() < -POSITIVITY_ATOL:
                    raise SimError("density matrix has a significant negative eigenvalue")
        data.setflags(write=False)

    def to_density(self) -> "QuantumState":
        if self.kind == "density":
            return self
        rho = np.outer(self.data, self.data.conj())
        return QuantumState(self.sig, "density", rho, check=False)

    def __repr__(self):
        return f"QuantumState(dims={self.sig.dims}, kind={self.kind})"


# -- constructors -----------------------------------------------------


def destroy(n_max: int) -> OperatorMatrix:
    """Fock-space lowering operator on an (n_max+1)-dimensional truncation.

    a|n> = sqrt(n)|n-1>.  The truncated [a, a+] equals the identity except
    for the (n_max, n_max) corner entry, which is -n_max; dynamics must keep
    the top level unpopulated for the truncation to be faithful.
    """
    if n_max < 0:
        raise DimensionMismatchError("n_max must be >= 0")
    d = n_max + 1
    data = np.diag(np.sqrt(np.arange(1, d)), 1).astype(complex)
    return OperatorMatrix(DimSignature((d,)), data)


def transition(level_count: int, j: int, k: int) -> OperatorMatrix:
    """Projector-style transition operator |j><k| on a level_count space."""
    if not (0 <= j < level_count and 0 <= k < level_count):
        raise DimensionMismatchError(
            f"transition indices ({j},{k}) outside {level_count} levels"
        )
    data = np.zeros((level_count, level_count), dtype=complex)
    data[j, k] = 1.0
    return OperatorMatrix(DimSignature((level_count,)), data)


def identity(sig: DimSignature, sparse: bool = False) -> OperatorMatrix:
    if sparse:
        return OperatorMatrix(sig, sp.identity(sig.total, dtype=complex, format="csr"))
    return OperatorMatrix(sig, np.eye(sig.total, dtype=complex))


def embed(op: OperatorMatrix, slot: int, sig: DimSignature) -> OperatorMatrix:
    """Kronecker embedding I x ... x op x ... x I acting on one slot."""
    if not 0 <= slot < len(sig.dims):
        raise DimensionMismatchError(f"slot {slot} outside signature {sig.dims}")
    if op.sig.total != sig.dims[slot]:
        raise DimensionMismatchError(
            f"operator dimension {op.sig.total} does not fit slot {slot} "
            f"of size {sig.dims[slot]}"
        )
    if op.is_sparse:
        out = sp.identity(1, dtype=complex, format="csr")
        for s, d in enumerate(sig.dims):
            blk = op.data if s == slot else sp.identity(d, dtype=complex, format="csr")
            out = sp.kron(out, blk, format="csr")
        return OperatorMatrix(sig, out)
    out = np.eye(1, dtype=complex)
    for s, d in enumerate(sig.dims):
        blk = op.data if s == slot else np.eye(d, dtype=complex)
        out = np.kron(out, blk)
    return OperatorMatrix(sig, out)


# -- operations -------------------------------------------------------


def dagger(op: OperatorMatrix) -> OperatorMatrix:
    return op.dag()


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def expectation(op: OperatorMatrix, state: QuantumState) -> complex:
    """<psi|O|psi> for kets, tr(rho O) for density matrices."""
    if op.sig != state.sig:
        raise DimensionMismatchError("operator and state signatures differ")
    if state.kind == "ket":
        return complex(np.vdot(state.data, op.data @ state.data))
    prod = op.data @ state.data if op.is_sparse else state.data @ _as_dense(op.data)
    if _is_sparse(prod):
        return complex(prod.diagonal().sum())
    return complex(np.trace(prod))


def eig_herm(op: OperatorMatrix, rtol: float = 1e-9):
    """Spectral decomposition of a Hermitian operator.

    Returns (eigenvalues ascending, eigenvector columns).  Refuses input
    whose anti-Hermitian part exceeds rtol relative to its largest entry.
    """
    if not op.is_hermitian(rtol=rtol):
        raise SimError("eig_herm requires a Hermitian operator")
    evals, evecs = np.linalg.eigh(op.dense())
    return evals, evecs
