"""Gap traces, crossover refinement and exceptional-point detection."""

import warnings

import numpy as np
import pytest

from nhaqo.errors import MultipleMinimaWarning
from nhaqo.linalg import maxnorm
from nhaqo.model import (
    AnnealSpec,
    PAULI_X,
    PAULI_Z,
    ising_anneal_spec,
    linear_schedule,
    make_anneal_spec,
    two_level_spec,
)
from nhaqo.spectrum import (
    detect_exceptional_point,
    find_crossover,
    gap_at,
    instantaneous_spectrum,
    trace_gap,
)

SMALL_ALPHA = float(np.arcsin(1e-3))


def test_snapshot_diagonal_endpoint():
    h0 = np.diag([-1.0, 0.0, 1.0, 2.0])
    spec = make_anneal_spec(h0, -np.kron(PAULI_X, np.eye(2)) - np.kron(np.eye(2), PAULI_X),
                            linear_schedule(0.0), 1.0, 2)
    snap = instantaneous_spectrum(spec, 1.0)
    assert np.allclose(snap.eigenvalues, [-1.0, 0.0, 1.0, 2.0], atol=1e-12)
    assert snap.gap == pytest.approx(1.0)
    assert not snap.defective


def test_snapshot_exact_crossing_aligned_driver():
    # anti-aligned driver (alpha = 0) crosses exactly at the midpoint
    spec = two_level_spec(1.0, 0.0, alpha=0.0)
    snap = instantaneous_spectrum(spec, 0.5)
    assert snap.gap == pytest.approx(0.0, abs=1e-12)


def test_snapshot_matches_dense_oracle():
    spec = ising_anneal_spec(3, seed=7, delta0=0.0)
    s = 0.5
    snap = instantaneous_spectrum(spec, s)
    # independent assembly and dense diagonalization
    h = spec.schedule.f0(s) * spec.h0 + spec.schedule.f1(s) * spec.h1
    ref = np.sort(np.linalg.eigvalsh(h))
    assert np.allclose(np.sort(snap.eigenvalues.real), ref, atol=1e-10)
    assert snap.gap == pytest.approx(ref[1] - ref[0], abs=1e-10)


def test_hermitian_trace_has_real_eigenvalues():
    spec = ising_anneal_spec(2, seed=5, delta0=0.0)
    trace = trace_gap(spec, 101)
    scale = maxnorm(spec.h0) + maxnorm(spec.h1)
    for snap in trace.snapshots:
        assert np.max(np.abs(snap.eigenvalues.imag)) <= 1e-10 * scale


def test_trace_min_gap_matches_closed_form():
    # reduced-model ramp: minimum gap 2*J*d0/sqrt(d0^2+4J^2)
    for d0, expect in [(0.25, 0.2480694691784169), (0.5, 0.4850712500726659), (1.0, 0.8944271909999159)]:
        spec = two_level_spec(1.0, d0, SMALL_ALPHA)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MultipleMinimaWarning)
            trace = trace_gap(spec, 1001)
        assert trace.g_m == pytest.approx(expect, abs=1e-4)


def test_trace_min_gap_hermitian_symmetric():
    spec = two_level_spec(1.0, 0.0, SMALL_ALPHA)
    trace = trace_gap(spec, 1001)
    # symmetric ramp crosses at s = 1/2 with gap 2*J_c*sin(alpha), J_c = 1/2
    assert trace.s_c == pytest.approx(0.5, abs=1e-8)
    assert abs(trace.g_m - 1e-3) <= 1e-6


def test_crossover_location_with_decay():
    spec = two_level_spec(1.0, 1.0, SMALL_ALPHA)
    trace = trace_gap(spec, 1001)
    # minimizer of (1-2s)^2 + d0^2 (1-s)^2 sits at (2+d0^2)/(4+d0^2)
    assert trace.s_c == pytest.approx(0.6, abs=1e-6)


def test_crossover_boundary_minimum_no_warning():
    # coupling dominates everywhere: the gap shrinks monotonically toward s=1
    h0 = PAULI_Z
    h1 = PAULI_X + 2.0 * PAULI_Z
    spec = make_anneal_spec(h0, h1, linear_schedule(0.0), 1.0, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error", MultipleMinimaWarning)
        trace = trace_gap(spec, 101)
    assert trace.s_c == pytest.approx(1.0, abs=1e-6)
    assert trace.g_m == pytest.approx(2.0, abs=1e-9)


def test_crossover_warns_on_tied_minima():
    # constant coupling against an oscillating drive: two equal-depth dips,
    # symmetric about s = 1/2
    from nhaqo.model import Schedule

    alpha = 0.1
    h0 = PAULI_Z
    h1 = np.sin(alpha) * PAULI_X - np.cos(alpha) * PAULI_Z
    sched = Schedule(
        f0=lambda s: 0.5,
        f1=lambda s: 0.5 + 0.4 * np.cos(2 * np.pi * s),
        f2=lambda s: 0.0,
    )
    spec = AnnealSpec(h0, h1, sched, 1.0, 1)
    with pytest.warns(MultipleMinimaWarning):
        trace_gap(spec, 201, refine=False)


def test_find_crossover_requires_three_snapshots():
    spec = two_level_spec(1.0, 0.0, 0.3)
    trace = trace_gap(spec, 11)
    trace.snapshots = trace.snapshots[:2]
    with pytest.raises(ValueError):
        find_crossover(trace)


def test_eigenvalue_continuity_refinement_inserts_points():
    # Hermitian eigenvalue speeds stay inside the bound: no refinement
    spec = two_level_spec(1.0, 0.0, float(np.arcsin(1e-5)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MultipleMinimaWarning)
        refined = trace_gap(spec, 101, refine=True)
    assert len(refined.snapshots) == 101
    # complex spectra jump in the (Re, Im) sort order when real parts cross:
    # the bound is violated locally and midpoints are inserted
    spec_nh = ising_anneal_spec(4, seed=130, delta0=0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MultipleMinimaWarning)
        coarse = trace_gap(spec_nh, 101, refine=False)
        dense = trace_gap(spec_nh, 101, refine=True)
    assert len(coarse.snapshots) == 101
    assert len(dense.snapshots) > 101
    assert [sn.s for sn in dense.snapshots] == sorted(sn.s for sn in dense.snapshots)


def test_ep_detected_at_constructed_coalescence():
    # drive and decay tuned to meet the coalescence conditions at s = 5/9
    alpha = float(np.arccos(0.8))
    spec = two_level_spec(1.0, 0.75, alpha)
    ep = detect_exceptional_point(spec, 1001)
    assert ep is not None
    assert ep.s == pytest.approx(5.0 / 9.0, abs=1e-6)
    assert ep.gap < 2e-6
    assert ep.overlap > 0.99


def test_ep_removed_by_decay_perturbation():
    alpha = float(np.arccos(0.8))
    d0 = 0.75 + 1e-3 * (5.0 / 9.0) / (4.0 / 9.0)  # shifts delta by 1e-3*J at the touch point
    assert detect_exceptional_point(two_level_spec(1.0, d0, alpha), 1001) is None


def test_ep_not_reported_when_decay_dominates():
    # orthogonal driver axis: the coalescence conditions have no solution
    spec = two_level_spec(1.0, 1.0, np.pi / 2)
    assert detect_exceptional_point(spec, 501) is None
    # tilted driver but decay held above the critical strength throughout
    spec2 = two_level_spec(1.0, 1.5, float(np.arccos(0.8)))
    assert detect_exceptional_point(spec2, 501) is None


def test_hermitian_avoided_crossing_is_not_an_ep():
    spec = two_level_spec(1.0, 0.0, float(np.arcsin(1e-8)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MultipleMinimaWarning)
        assert detect_exceptional_point(spec, 1001) is None
    # eigenvectors stay orthogonal at the near-crossing
    from nhaqo.spectrum import _ground_pair_overlap

    assert _ground_pair_overlap(spec, 0.5) < 0.01


def test_gap_at_matches_snapshot():
    spec = ising_anneal_spec(2, seed=1, delta0=0.3)
    for s in (0.1, 0.55, 0.9):
        assert gap_at(spec, s) == pytest.approx(instantaneous_spectrum(spec, s).gap, abs=1e-12)
