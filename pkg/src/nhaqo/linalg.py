"""Dense complex linear algebra for small non-Hermitian operators.

Right and left eigensystems are computed independently (the left one from
the conjugate-transposed matrix), sorted by (real, imaginary) part and
paired by eigenvalue proximity.  Pairs whose left/right eigenvectors have
vanishing overlap are flagged as coalesced; the remaining pairs can be
rescaled into a bi-orthonormal system with ``left_vectors @ right_vectors``
equal to the identity.  A series-based matrix exponential serves as the
reference propagator for integration tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceFailure, DefectiveSystem, ScalingOverflow

#: unit-normalized |<left|right>| below this marks an eigenpair as coalesced.
DEFECT_TOLERANCE = 1e-6
#: biorthonormalize refuses when more than this fraction of pairs coalesces.
MAX_DEFECT_FRACTION = 0.5
#: eigenvalue mismatch allowed between the two decompositions, times maxnorm.
PAIRING_GUARD = 1e-6

_EXPM_THETA = 1.0
_EXPM_MAX_SQUARINGS = 64


def maxnorm(m: np.ndarray) -> float:
    """Largest entry magnitude; the scale used by relative tolerances."""
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def ensure_operator(m) -> np.ndarray:
    """Coerce to a finite square complex array or raise ``ValueError``."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_defect(m) -> float:
    """Entrywise deviation from self-adjointness, max |M - M^dagger|."""
    a = np.asarray(m, dtype=complex)
    return maxnorm(a - a.conj().T)


def is_hermitian(m, rtol: float = 1e-12) -> bool:
    """Self-adjoint up to ``rtol`` times the matrix maxnorm."""
    a = np.asarray(m, dtype=complex)
    return hermitian_defect(a) <= rtol * maxnorm(a)


@dataclass(frozen=True)
class EigenSystem:
    """Paired right/left eigensystem, sorted ascending by (Re, Im).

    ``right_vectors[:, i]`` is the i-th right (column) eigenvector and
    ``left_vectors[i]`` the i-th left (row) eigenvector.  After
    :func:`biorthonormalize`, ``left_vectors @ right_vectors`` equals the
    identity on every pair not flagged in ``defect_flags``.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    defect_flags: np.ndarray
    biorthonormal: bool = False

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


def _sort_order(values: np.ndarray) -> np.ndarray:
    return np.lexsort((values.imag, values.real))


def _fix_column_phases(cols: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry real and positive."""
    out = cols.copy()
    for i in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, i])))
        p = out[k, i]
        if p != 0:
            out[:, i] *= abs(p) / p
    return out


def _fix_row_phases(rows: np.ndarray) -> np.ndarray:
    return _fix_column_phases(rows.T).T


def _clusters(values: np.ndarray, tol: float) -> list[range]:
    """Consecutive groups of sorted values separated by at most ``tol``."""
    groups: list[range] = []
    start = 0
    n = len(values)
    for i in range(1, n + 1):
        if i == n or abs(values[i] - values[i - 1]) > tol:
            groups.append(range(start, i))
            start = i
    return groups


def _align_left_cluster(rows_l: np.ndarray, cols_r: np.ndarray, idx: range) -> list[int]:
    """Order the left members of a degenerate cluster so overlaps peak on the diagonal."""
    ids = list(idx)
    k = len(ids)
    if k == 1:
        return ids
    # ov[q, p] = |left_q . right_p| within the cluster
    ov = np.abs(rows_l[ids] @ cols_r[:, ids])
    if k <= 6:
        perms = itertools.permutations(range(k))
        best = max(perms, key=lambda p: sum(ov[p[j], j] for j in range(k)))
        return [ids[best[j]] for j in range(k)]
    # large accidental clusters: greedy best-overlap assignment
    taken: list[int] = []
    free = set(range(k))
    for p in range(k):
        q = max(free, key=lambda qq: ov[qq, p])
        taken.append(ids[q])
        free.discard(q)
    return taken


def eig_nonhermitian(m) -> EigenSystem:
    """Full eigendecomposition with independently computed left and right systems.

    Eigenvalues are sorted ascending by real part (imaginary part breaks
    ties); right eigenvectors are unit-normalized with their largest entry
    made real-positive.  Pairs whose left/right overlap vanishes are marked
    in ``defect_flags``.

    Raises
    ------
    ConvergenceFailure
        If LAPACK does not converge or the two decompositions cannot be
        matched within the pairing guard.
    """
    a = ensure_operator(m)
    n = a.shape[0]
    try:
        vals_r, vecs_r = np.linalg.eig(a)
        vals_lh, vecs_lh = np.linalg.eig(a.conj().T)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(
            f"eigensolver failed: dim={n}, maxnorm={maxnorm(a):.6e}"
        ) from exc

    vals_l = vals_lh.conj()
    rows_l = vecs_lh.conj().T  # row i satisfies row @ a = vals_l[i] * row

    ro = _sort_order(vals_r)
    vals_r, vecs_r = vals_r[ro], vecs_r[:, ro]
    lo = _sort_order(vals_l)
    vals_l, rows_l = vals_l[lo], rows_l[lo]

    guard = PAIRING_GUARD * max(maxnorm(a), np.finfo(float).tiny)
    if np.max(np.abs(vals_l - vals_r)) > guard:
        raise ConvergenceFailure(
            f"left/right eigenvalues disagree beyond guard: dim={n}, "
            f"maxnorm={maxnorm(a):.6e}"
        )

    # within near-degenerate clusters the two sorts may disagree; re-order the
    # left members by overlap so each pair matches the same invariant direction
    perm = np.arange(n)
    for cluster in _clusters(vals_r, guard):
        if len(cluster) > 1:
            perm[list(cluster)] = _align_left_cluster(rows_l, vecs_r, cluster)
    vals_l, rows_l = vals_l[perm], rows_l[perm]

    vecs_r = vecs_r / np.linalg.norm(vecs_r, axis=0)
    rows_l = rows_l / np.linalg.norm(rows_l, axis=1)[:, None]
    vecs_r = _fix_column_phases(vecs_r)
    rows_l = _fix_row_phases(rows_l)

    overlaps = np.abs(np.einsum("ij,ji->i", rows_l, vecs_r))
    flags = overlaps < DEFECT_TOLERANCE
    return EigenSystem(vals_r, vecs_r, rows_l, flags, biorthonormal=False)


def biorthonormalize(
    es: EigenSystem,
    *,
    defect_tolerance: float = DEFECT_TOLERANCE,
    max_defect_fraction: float = MAX_DEFECT_FRACTION,
) -> EigenSystem:
    """Rescale left vectors so that ``<left_m|right_n> = delta_mn``.

    Pairs whose unit-normalized overlap falls below ``defect_tolerance``
    are flagged as coalesced, left unit-normalized, and excluded from the
    delta_mn guarantee.

    Raises
    ------
    DefectiveSystem
        If more than ``max_defect_fraction`` of all pairs coalesce.
    """
    n = es.dim
    right = es.right_vectors
    left = es.left_vectors.astype(complex).copy()

    lnorm = np.linalg.norm(left, axis=1)
    rnorm = np.linalg.norm(right, axis=0)
    raw = np.einsum("ij,ji->i", left, right)
    flags = (np.abs(raw) / np.maximum(lnorm * rnorm, np.finfo(float).tiny)) < defect_tolerance
    if int(flags.sum()) > max_defect_fraction * n:
        raise DefectiveSystem(f"{int(flags.sum())}/{n} eigenpairs coalesced")

    scale = max(float(np.max(np.abs(es.eigenvalues))), np.finfo(float).tiny)
    for cluster in _clusters(es.eigenvalues, PAIRING_GUARD * scale):
        active = [i for i in cluster if not flags[i]]
        if len(active) >= 2:
            # joint solve kills cross-overlaps inside a degenerate cluster
            block = left[active] @ right[:, active]
            try:
                left[active] = np.linalg.solve(block, left[active])
            except np.linalg.LinAlgError:
                flags[list(active)] = True
                if int(flags.sum()) > max_defect_fraction * n:
                    raise DefectiveSystem(
                        f"{int(flags.sum())}/{n} eigenpairs coalesced"
                    ) from None
        elif len(active) == 1:
            i = active[0]
            left[i] = left[i] / (left[i] @ right[:, i])
    return replace(es, left_vectors=left, defect_flags=flags, biorthonormal=True)


def biorthonormal_eigensystem(m) -> EigenSystem:
    """Convenience: :func:`eig_nonhermitian` followed by :func:`biorthonormalize`."""
    return biorthonormalize(eig_nonhermitian(m))


def expm_apply(m, v, dt: float) -> np.ndarray:
    """Apply the propagator exp(-i*m*dt) to a vector.

    Scaling-and-squaring with a truncated Taylor series; relative accuracy
    around 1e-12 on well-conditioned inputs.

    Raises
    ------
    ScalingOverflow
        If the required squaring depth exceeds the configured budget.
    """
    a = ensure_operator(m)
    vec = np.asarray(v, dtype=complex)
    with np.errstate(over="ignore"):
        gen = (-1j * float(dt)) * a
        # induced 1-norm controls the series remainder
        nrm = float(np.max(np.abs(gen).sum(axis=0)))
    if not np.isfinite(nrm):
        raise ScalingOverflow("|dt|*norm overflows double precision")
    squarings = 0
    if nrm > _EXPM_THETA:
        squarings = int(np.ceil(np.log2(nrm / _EXPM_THETA)))
    if squarings > _EXPM_MAX_SQUARINGS:
        raise ScalingOverflow(
            f"needs {squarings} squarings (> {_EXPM_MAX_SQUARINGS}); |dt|*norm too large"
        )
    b = gen / (2.0**squarings)
    n = a.shape[0]
    acc = np.eye(n, dtype=complex) + b
    term = b.copy()
    for k in range(2, 64):
        term = term @ b / k
        acc += term
        if maxnorm(term) <= np.finfo(float).eps * maxnorm(acc):
            break
    for _ in range(squarings):
        acc = acc @ acc
    return acc @ vec
