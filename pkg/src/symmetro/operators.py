"""Dense Hermitian operator algebra.

Operators are plain complex ``numpy`` arrays; the functions here validate
them, diagonalise them deterministically and solve the symmetric operator
equation ``X A + A X = 2 B`` that both the optimal-strategy operator and the
symmetric logarithmic derivative are defined by.
"""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .exceptions import DensityError, HermitianityError, NullSpaceError

__all__ = [
    "EigenSystem",
    "ProjectorSet",
    "as_hermitian",
    "as_density",
    "eigendecompose",
    "reconstruct",
    "solve_sylvester",
    "project_eigenspaces",
    "spectral_norm",
    "PAULI",
]

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def spectral_norm(op):
    op = np.asarray(op)
    if op.size == 0:
        return 0.0
    return float(np.linalg.norm(op, 2))


def as_hermitian(op, tol: Tolerances = DEFAULT_TOLERANCES):
    """Return ``op`` as a complex square array, checking Hermiticity.

    The first entry pair violating ``op[i, j] == conj(op[j, i])`` beyond
    ``tol.hermitian`` is named in the error message.
    """
    m = np.array(op, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise HermitianityError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise HermitianityError("operator has non-finite entries")
    diff = np.abs(m - m.conj().T)
    if diff.max() > tol.hermitian:
        i, j = np.unravel_index(np.argmax(diff), diff.shape)
        i, j = sorted((int(i), int(j)))
        raise HermitianityError(
            f"operator is not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {diff[i, j]:.3e}"
        )
    return m


def as_density(op, tol: Tolerances = DEFAULT_TOLERANCES):
    m = as_hermitian(op, tol)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol.trace:
        raise DensityError(f"trace is {tr!r}, expected 1")
    lowest = np.linalg.eigvalsh(m)[0]
    if lowest < -tol.psd:
        raise DensityError(f"operator is not positive semidefinite (eigenvalue {lowest:.3e})")
    return m


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray   # ascending
    vectors: np.ndarray  # columns

    def __iter__(self):
        return iter((self.values, self.vectors))


@dataclass(frozen=True)
class ProjectorSet:
    projectors: tuple
    labels: np.ndarray
    ranks: tuple = field(default=())

    def __len__(self):
        return len(self.projectors)

    def check(self, tol: Tolerances = DEFAULT_TOLERANCES):
        """Raise ``ValueError`` unless the projectors are idempotent, orthogonal and complete."""
        dim = self.projectors[0].shape[0]
        for k, p in enumerate(self.projectors):
            if spectral_norm(p @ p - p) > tol.projector:
                raise ValueError(f"projector {k} is not idempotent")
            for l in range(k + 1, len(self.projectors)):
                if spectral_norm(p @ self.projectors[l]) > tol.projector:
                    raise ValueError(f"projectors {k} and {l} are not orthogonal")
        if spectral_norm(sum(self.projectors) - np.eye(dim)) > tol.projector:
            raise ValueError("projectors do not sum to the identity")


def _fix_phase(v, cutoff):
    for x in v:
        if abs(x) > cutoff:
            return v * (abs(x) / x)
    return v


def eigendecompose(op, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenSystem:
    """Eigendecomposition with reproducible ordering and phases.

    Eigenvalues ascend. Every eigenvector has its first non-negligible
    component made real and positive; vectors sharing an eigenvalue are
    ordered lexicographically by their (real, imag) entries.
    """
    m = as_hermitian(op, tol)
    values, vectors = np.linalg.eigh(m)
    vectors = np.array([_fix_phase(v, 1e-10) for v in vectors.T]).T

    scale = max(1.0, float(np.max(np.abs(values))))
    order = list(range(len(values)))
    start = 0
    while start < len(order):
        stop = start + 1
        while stop < len(order) and values[stop] - values[stop - 1] <= 1e-12 * scale:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            key = lambda k: tuple(np.column_stack([vectors[:, k].real, vectors[:, k].imag]).ravel())
            order[start:stop] = sorted(block, key=key)
        start = stop
    return EigenSystem(values[order], vectors[:, order])


def reconstruct(es: EigenSystem):
    v = es.vectors
    return (v * es.values) @ v.conj().T


def solve_sylvester(a, b, tol: Tolerances = DEFAULT_TOLERANCES, full_output=False):
    """Solve ``X A + A X = 2 B`` for Hermitian ``X``.

    ``A`` must be positive semidefinite. In the eigenbasis of ``A`` the
    solution is ``X_ij = 2 B_ij / (l_i + l_j)``. Where ``l_i + l_j``
    vanishes the corresponding entry of ``B`` must vanish too, otherwise
    :class:`NullSpaceError` is raised; such entries are set to zero, which
    gives the minimal-norm solution.

    With ``full_output=True`` a second value is returned, a dict with keys
    ``pseudo`` (whether any kernel entry was zeroed) and ``kernel_entries``
    (the zeroed index pairs, in the eigenbasis of ``A``).
    """
    a = as_hermitian(a, tol)
    b = as_hermitian(b, tol)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    lam, v = np.linalg.eigh(a)
    bt = v.conj().T @ b @ v
    denom = lam[:, None] + lam[None, :]
    norm_a = float(np.max(np.abs(lam)))
    norm_b = spectral_norm(b)
    singular = denom <= tol.kernel * norm_a
    kernel_entries = []
    if np.any(singular):
        bad = singular & (np.abs(bt) > tol.kernel_rhs * norm_b)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            raise NullSpaceError(
                "inconsistent null-space: the right-hand side has weight "
                f"{abs(bt[i, j]):.3e} on the kernel of the left operand (entry {i},{j})"
            )
        kernel_entries = [tuple(int(k) for k in ij) for ij in np.argwhere(singular)]
    xt = np.zeros_like(bt)
    ok = ~singular
    xt[ok] = 2.0 * bt[ok] / denom[ok]
    x = v @ xt @ v.conj().T
    x = 0.5 * (x + x.conj().T)
    if full_output:
        return x, {"pseudo": bool(kernel_entries), "kernel_entries": kernel_entries}
    return x


def project_eigenspaces(es: EigenSystem, merge_tol: float = DEFAULT_TOLERANCES.merge) -> ProjectorSet:
    """Group eigenvectors into spectral projectors.

    Eigenvalues are scanned in ascending order; each value within
    ``merge_tol`` of its predecessor joins the predecessor's cluster. A
    cluster is labelled by its mean eigenvalue.
    """
    if merge_tol < 0:
        raise ValueError("merge_tol must be non-negative")
    values, vectors = es.values, es.vectors
    clusters = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] <= merge_tol:
            clusters[-1].append(k)
        else:
            clusters.append([k])
    projectors, labels = [], []
    for c in clusters:
        v = vectors[:, c]
        p = v @ v.conj().T
        projectors.append(0.5 * (p + p.conj().T))
        labels.append(float(np.mean(values[c])))
    return ProjectorSet(tuple(projectors), np.array(labels), tuple(len(c) for c in clusters))
