"""Dense linear algebra for small multi-qubit Hilbert spaces.

Conventions: qubit basis ``{|0>, |1>}`` with ``sigma_z |0> = +|0>``, so ``|0>``
is the excited level. Subsystem 0 is the most significant index of a
composite basis label.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericalIntegrityError, PreconditionError

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
# sigma_+ raises |1> (ground) to |0> (excited)
SP = np.array([[0, 1], [0, 0]], dtype=complex)
SM = SP.conj().T


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more operators, left factor most significant."""
    if not ops:
        raise ConfigError("kron needs at least one operand")
    return reduce(np.kron, ops)


def _check_dims(dim: int, dims: Sequence[int]) -> None:
    if any(d < 1 for d in dims) or int(np.prod(dims)) != dim:
        raise ConfigError(f"subsystem dims {list(dims)} do not multiply to {dim}")


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced state on the subsystems in ``keep``, in their original order."""
    dims = list(dims)
    _check_dims(rho.shape[0], dims)
    keep = sorted(set(keep))
    n = len(dims)
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ConfigError(f"keep={keep} is not a nonempty subset of range({n})")
    drop = [k for k in range(n) if k not in keep]
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = rho.reshape(dims + dims)
    order = keep + drop
    t = t.transpose(order + [n + k for k in order]).reshape(dk, dd, dk, dd)
    return np.einsum("iaja->ij", t)


def permute_operator(op: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of ``op``: factor ``perm[k]`` moves to slot ``k``."""
    dims = list(dims)
    n = len(dims)
    t = op.reshape(dims + dims)
    t = t.transpose(list(perm) + [n + p for p in perm])
    d = op.shape[0]
    return t.reshape(d, d)


def embed(u: np.ndarray, dims: Sequence[int], positions: tuple[int, int]) -> np.ndarray:
    """Lift a two-body operator on ``positions`` to the full space (identity elsewhere)."""
    dims = list(dims)
    i, j = positions
    n = len(dims)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ConfigError(f"invalid positions {positions} for {n} subsystems")
    if u.shape != (dims[i] * dims[j],) * 2:
        raise ConfigError(f"operator shape {u.shape} does not match dims {dims[i]}x{dims[j]}")
    rest = [k for k in range(n) if k not in (i, j)]
    drest = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(u, np.eye(drest, dtype=complex))
    # full acts on the factor order (i, j, *rest); undo that ordering
    order = [i, j] + rest
    inverse = [order.index(k) for k in range(n)]
    return permute_operator(full, [dims[k] for k in order], inverse)


def is_hermitian(h: np.ndarray, tol: float = HERM_TOL) -> bool:
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def hermitian_expm(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) by diagonalising h = V diag(e) V^dagger."""
    if not is_hermitian(h):
        raise PreconditionError("hermitian_expm requires a Hermitian matrix")
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * evals * t)) @ vecs.conj().T


def expectation(h: np.ndarray, rho: np.ndarray) -> float:
    """Re Tr[h rho]; the imaginary part must be negligible."""
    if h.shape != rho.shape:
        raise ConfigError(f"shape mismatch {h.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", h, rho)
    if abs(val.imag) > 1e-10:
        raise NumericalIntegrityError(f"Tr[h rho] has imaginary part {val.imag:.3e}")
    return float(val.real)


def density_violations(rho: np.ndarray, psd: bool = True) -> list[str]:
    """Describe every density-matrix invariant ``rho`` breaks (empty if valid)."""
    out = []
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERM_TOL:
        out.append(f"hermiticity defect {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1) > TRACE_TOL:
        out.append(f"trace {tr.real:.15f}{tr.imag:+.3e}j")
    if psd:
        lmin = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
        if lmin < -PSD_TOL:
            out.append(f"negative eigenvalue {lmin:.3e}")
    return out


def is_density(rho: np.ndarray) -> bool:
    return not density_violations(rho)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)
