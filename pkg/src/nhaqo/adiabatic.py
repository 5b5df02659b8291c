"""Adiabatic-validity criteria and runtime bounds.

All "much greater than" inequalities are reported as plain thresholds; the
caller picks a safety factor.  Schedule derivatives use centered differences
(one-sided at the interval ends) since schedules are opaque callables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._minimize import uniform_grid
from .errors import DefectiveSystem, DegenerateSpectrum, ZeroGap
from .linalg import biorthonormal_eigensystem, eig_nonhermitian, maxnorm
from .model import AnnealSpec, Schedule, total_hamiltonian
from .reduction import TwoLevelParams, min_two_level_gap, nonhermitian_min_gap

SCHEDULE_DERIV_STEP = 1e-6


@dataclass(frozen=True)
class AdiabaticBudget:
    """Runtime window: lower bound from the adiabatic criterion, upper from qubit lifetime."""

    tau_min: float
    tau_max: float | None = None
    delta_qubit: float | None = None
    measured_matrix_element: float | None = None

    @property
    def feasible(self) -> bool:
        return self.tau_max is None or self.tau_min < self.tau_max


def schedule_rates(schedule: Schedule, s: float, ds: float = SCHEDULE_DERIV_STEP) -> tuple[float, float, float]:
    """(df0/ds, df1/ds, df2/ds) by centered differences, one-sided at the ends."""
    lo = max(s - ds, 0.0)
    hi = min(s + ds, 1.0)
    span = hi - lo
    return (
        (schedule.f0(hi) - schedule.f0(lo)) / span,
        (schedule.f1(hi) - schedule.f1(lo)) / span,
        (schedule.f2(hi) - schedule.f2(lo)) / span,
    )


def _dh_ds(spec: AnnealSpec, s: float, include_decay: bool) -> np.ndarray:
    df0, df1, df2 = schedule_rates(spec.schedule, s)
    if include_decay:
        return df0 * spec.h0 + (df1 - 1j * df2) * spec.h1
    return df0 * spec.h0 + df1 * spec.h1


def hermitian_criterion_lhs(spec: AnnealSpec, s: float) -> float:
    """Sum over excited states of |<psi_m| dH/dt |psi_g>| / |E_m - E_g|^2.

    dH/dt carries the 1/tau factor, so doubling tau halves the result; a
    small value signals adiabaticity.

    Raises
    ------
    DegenerateSpectrum
        If an excited level sits within 1e-10 * maxnorm of the ground level.
    """
    h = total_hamiltonian(spec, s)
    es = eig_nonhermitian(h)
    vals = es.eigenvalues
    gaps = np.abs(vals[1:] - vals[0])
    if gaps.size and float(np.min(gaps)) <= 1e-10 * max(maxnorm(h), 1e-300):
        raise DegenerateSpectrum(f"ground state degenerate at s={s:.6g}")
    dhdt = _dh_ds(spec, s, include_decay=False) / spec.tau
    ground = es.right_vectors[:, 0]
    total = 0.0
    for m in range(1, es.dim):
        elem = abs(np.vdot(es.right_vectors[:, m], dhdt @ ground))
        total += elem / float(gaps[m - 1]) ** 2
    return float(total)


def min_time_hermitian(spec: AnnealSpec, trace, form: str = "separate") -> float:
    """Runtime threshold max|<psi_e| dH/ds |psi_g>| / g_m^2 for a Hermitian ramp.

    ``form="separate"`` (the primary reading) maximizes the matrix element
    and minimizes the gap independently over the trace grid;
    ``form="ratio"`` maximizes the pointwise ratio instead.
    """
    if form not in ("separate", "ratio"):
        raise ValueError("form must be 'separate' or 'ratio'")
    best_elem = 0.0
    best_ratio = 0.0
    for snap in trace.snapshots:
        h = total_hamiltonian(trace.spec, snap.s)
        vals, vecs = np.linalg.eigh(h)
        dh = _dh_ds(trace.spec, snap.s, include_decay=False)
        elem = float(abs(np.vdot(vecs[:, 1], dh @ vecs[:, 0])))
        best_elem = max(best_elem, elem)
        gap = float(vals[1] - vals[0])
        if gap > 0:
            best_ratio = max(best_ratio, elem / gap**2)
    if form == "ratio":
        return best_ratio
    return best_elem / trace.g_m**2


def _max_drive_flux(params: TwoLevelParams, schedule: Schedule, grid: np.ndarray) -> tuple[float, float]:
    """Max of |J dg~/ds - g~ dJ/ds| over the grid, plus the energy scale seen."""
    best = 0.0
    scale = 0.0
    for s in grid:
        df0, df1, df2 = schedule_rates(schedule, float(s))
        j = params.coupling(schedule, float(s))
        dj = df0 * params.r0_mag
        gt = params.drive(schedule, float(s))
        dgt = (df1 - 1j * df2) * params.r1_mag
        best = max(best, abs(j * dgt - gt * dj))
        scale = max(scale, abs(j) + abs(gt))
    return best, scale


def measured_matrix_element(spec: AnnealSpec, grid_points: int = 1001) -> float:
    """Max over s of the bi-orthogonal element |<psi~_e| dH/ds |psi_g>|.

    Points where the eigensystem is too defective to bi-orthonormalize are
    skipped.
    """
    best = 0.0
    for s in uniform_grid(grid_points):
        try:
            es = biorthonormal_eigensystem(total_hamiltonian(spec, float(s)))
        except DefectiveSystem:
            continue
        if es.defect_flags[0] or es.defect_flags[1]:
            continue
        dh = _dh_ds(spec, float(s), include_decay=True)
        elem = abs(es.left_vectors[1] @ (dh @ es.right_vectors[:, 0]))
        best = max(best, float(elem))
    return best


def min_time_nonhermitian(
    spec: AnnealSpec,
    params: TwoLevelParams,
    grid_points: int = 1001,
    measure_element: bool = True,
) -> AdiabaticBudget:
    """Runtime threshold for the reduced non-Hermitian model.

    tau_min = sin(alpha)_eff * max|J dg~/ds - g~ dJ/ds| / gap_min^3, where
    sin(alpha)_eff is the 2^(-n/2) estimate for n >= 2 qubits and the
    measured angle otherwise.  The directly measured bi-orthogonal matrix
    element maximum is reported alongside for comparison.

    Raises
    ------
    ZeroGap
        If the reduced-model minimum gap is numerically zero.
    """
    sched = spec.schedule
    n = spec.n_qubits
    sin_eff = 2.0 ** (-n / 2.0) if n >= 2 else params.sin_alpha
    grid = uniform_grid(grid_points)
    flux, scale = _max_drive_flux(params, sched, grid)
    _, gap_min = min_two_level_gap(params, sched, grid_points)
    if gap_min <= 1e-12 * max(scale, 1e-300):
        raise ZeroGap(f"reduced-model gap {gap_min:.3e} is numerically zero")
    measured = measured_matrix_element(spec, grid_points) if measure_element else None
    return AdiabaticBudget(
        tau_min=float(sin_eff * flux / gap_min**3),
        measured_matrix_element=measured,
    )


def estimated_matrix_element(params: TwoLevelParams, schedule: Schedule, grid_points: int = 1001) -> float:
    """Reduced-model estimate max|J dg~/ds - g~ dJ/ds| * sin(alpha) / gap_min."""
    grid = uniform_grid(grid_points)
    flux, _ = _max_drive_flux(params, schedule, grid)
    _, gap_min = min_two_level_gap(params, schedule, grid_points)
    if gap_min == 0.0:
        raise ZeroGap("reduced-model gap vanishes")
    return float(flux * params.sin_alpha / gap_min)


def tau_window(
    spec: AnnealSpec,
    params: TwoLevelParams,
    delta_qubit: float,
    grid_points: int = 1001,
) -> AdiabaticBudget:
    """Runtime window tau_min << tau << 1/delta_qubit."""
    if delta_qubit <= 0:
        raise ValueError("delta_qubit must be positive")
    budget = min_time_nonhermitian(spec, params, grid_points)
    return replace(budget, tau_max=1.0 / delta_qubit, delta_qubit=float(delta_qubit))


def min_time_linear_ramp(n_qubits: int, j_star: float, delta0: float) -> float:
    """Closed-form runtime threshold for the linear ramp.

    2^(-n/2) * J* * sqrt(delta0^2 + J*^2) / gap_min^3 with the linear-ramp
    minimum gap; diverges (returns inf) in the Hermitian limit delta0 = 0.
    Arguments are in energy units (delta0 on the same scale as j_star).
    """
    gap = nonhermitian_min_gap(j_star, delta0)
    if gap == 0.0:
        return math.inf
    flux = j_star * math.hypot(j_star, delta0)
    return float(2.0 ** (-n_qubits / 2.0) * flux / gap**3)
