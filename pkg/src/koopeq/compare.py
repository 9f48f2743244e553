"""Distances between Koopman spectra and the conjugacy verdict.

Two algorithms are declared conjugate when their principal eigenvalue sets
match (equal size, small Wasserstein distance); semi-conjugate when the
smaller set embeds in the larger one (small directed Hausdorff distance);
distinct otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import IterativeMap
from .errors import (CardinalityMismatchError, DegenerateDataError,
                     InsufficientDataError, InvalidInputError, KoopeqError)
from .spectral import (Dictionary, KoopmanSpectrum, RankPolicy, dmd, edmd,
                       principal_eigenvalues)
from .trajectory import Centering, RunConfig, iterate, snapshots

# conjugacy tolerances: tight for plain DMD on both sides, loose when a
# dictionary lifting is involved (dictionary-induced eigenvalue error)
EPS_DMD = 1e-3
EPS_EDMD = 5e-2
# lattice product depth: default monomial dictionaries reach degree 5, so
# EDMD spectra carry lattice members (and sub-resolvable strays) past depth 4
MAX_POWER_DMD = 4
MAX_POWER_EDMD = 6


class Verdict(Enum):
    CONJUGATE = "conjugate"
    SEMI_CONJUGATE_A_INTO_B = "semi_conjugate_a_into_b"
    SEMI_CONJUGATE_B_INTO_A = "semi_conjugate_b_into_a"
    DISTINCT = "distinct"


def wasserstein_distance(A, B) -> float:
    """Order-1 Wasserstein distance between equal-size eigenvalue multisets
    with uniform weights: the minimum over pairings of the mean |a - b|,
    computed by exact optimal assignment."""
    A = np.asarray(A, dtype=complex).ravel()
    B = np.asarray(B, dtype=complex).ravel()
    if A.size == 0 or B.size == 0:
        raise InvalidInputError("eigenvalue sets must be non-empty")
    if A.size != B.size:
        raise CardinalityMismatchError(f"set sizes differ: {A.size} vs {B.size}")
    cost = np.abs(A[:, None] - B[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / A.size)


def optimal_matching(A, B) -> list[tuple[int, int]]:
    """Index pairs of the optimal assignment behind wasserstein_distance."""
    A = np.asarray(A, dtype=complex).ravel()
    B = np.asarray(B, dtype=complex).ravel()
    cost = np.abs(A[:, None] - B[None, :])
    rows, cols = linear_sum_assignment(cost)
    return [(int(i), int(j)) for i, j in zip(rows, cols)]


def directed_hausdorff(A, B) -> float:
    """max over a in A of the distance from a to its nearest element of B.
    Zero means A is a subset of B up to rounding."""
    A = np.asarray(A, dtype=complex).ravel()
    B = np.asarray(B, dtype=complex).ravel()
    if A.size == 0 or B.size == 0:
        raise InvalidInputError("eigenvalue sets must be non-empty")
    return float(np.max(np.min(np.abs(A[:, None] - B[None, :]), axis=1)))


def symmetric_hausdorff(A, B) -> float:
    return max(directed_hausdorff(A, B), directed_hausdorff(B, A))


@dataclass
class ComparisonTolerances:
    eps_conj: float
    eps_semi: float


@dataclass
class SpectrumComparison:
    """Distances, matching and verdict for a pair of spectra."""

    wasserstein: Optional[float]
    directed_hausdorff_ab: Optional[float]
    directed_hausdorff_ba: Optional[float]
    matching: list
    verdict: Verdict
    tolerances_used: ComparisonTolerances
    principal_a: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    principal_b: np.ndarray = field(default_factory=lambda: np.empty(0, complex))
    notes: list = field(default_factory=list)


def _uses_edmd(spec_a: KoopmanSpectrum, spec_b: KoopmanSpectrum) -> bool:
    return "edmd" in (spec_a.method, spec_b.method)


def classify(spec_a: KoopmanSpectrum, spec_b: KoopmanSpectrum,
             eps_conj: Optional[float] = None, eps_semi: Optional[float] = None,
             ignore_unit_constant: bool = True,
             lattice_tol: Optional[float] = None,
             max_power: Optional[int] = None) -> SpectrumComparison:
    """Issue a conjugacy verdict for two spectra.

    Principal sets are extracted first (raw spectra contain lattice products
    that would corrupt the cardinality match); the constant-mode eigenvalue 1
    from uncentered or dictionary-lifted runs is excluded by default. Verdicts:
    CONJUGATE for equal cardinality with Wasserstein <= eps_conj, otherwise a
    SEMI_CONJUGATE direction when one set embeds in the other within eps_semi,
    otherwise DISTINCT.
    """
    edmd_involved = _uses_edmd(spec_a, spec_b)
    if eps_conj is None:
        eps_conj = EPS_EDMD if edmd_involved else EPS_DMD
    if eps_semi is None:
        eps_semi = EPS_EDMD if edmd_involved else EPS_DMD
    if lattice_tol is None:
        lattice_tol = max(1e-6, eps_conj)
    if max_power is None:
        max_power = MAX_POWER_EDMD if edmd_involved else MAX_POWER_DMD
    tols = ComparisonTolerances(eps_conj=eps_conj, eps_semi=eps_semi)
    notes = []

    pa = principal_eigenvalues(spec_a, lattice_tol=lattice_tol, max_power=max_power,
                               ignore_unit=ignore_unit_constant)
    pb = principal_eigenvalues(spec_b, lattice_tol=lattice_tol, max_power=max_power,
                               ignore_unit=ignore_unit_constant)
    if ignore_unit_constant:
        notes.append(f"unit-constant eigenvalues excluded (tol {lattice_tol:g})")
    if pa.size == 0 or pb.size == 0:
        notes.append("degenerate principal set; verdict forced to distinct")
        return SpectrumComparison(None, None, None, [], Verdict.DISTINCT, tols,
                                  pa, pb, notes)

    dab = directed_hausdorff(pa, pb)
    dba = directed_hausdorff(pb, pa)
    wass = None
    matching = []
    if pa.size == pb.size:
        wass = wasserstein_distance(pa, pb)
        matching = optimal_matching(pa, pb)
        if wass <= eps_conj:
            verdict = Verdict.CONJUGATE
        elif dab <= eps_semi:
            verdict = Verdict.SEMI_CONJUGATE_A_INTO_B
        elif dba <= eps_semi:
            verdict = Verdict.SEMI_CONJUGATE_B_INTO_A
        else:
            verdict = Verdict.DISTINCT
    else:
        smaller_is_a = pa.size < pb.size
        if smaller_is_a and dab <= eps_semi:
            verdict = Verdict.SEMI_CONJUGATE_A_INTO_B
        elif not smaller_is_a and dba <= eps_semi:
            verdict = Verdict.SEMI_CONJUGATE_B_INTO_A
        else:
            verdict = Verdict.DISTINCT
        notes.append("principal cardinalities differ; Wasserstein undefined")
    return SpectrumComparison(wass, dab, dba, matching, verdict, tols, pa, pb, notes)


@dataclass(frozen=True)
class DecompositionSettings:
    """How sweep cells (and the reference) turn a trajectory into a spectrum."""

    method: str = "dmd"
    dictionary: Optional[Dictionary] = None
    rank_policy: RankPolicy = RankPolicy()
    centering: Optional[Centering] = None  # None = per-trajectory default
    discard: int = 0  # leading transient states dropped before pairing


# sweep cell flags
CELL_OK = 0
CELL_HAUSDORFF = 1  # cardinality mismatch, symmetric Hausdorff fallback
CELL_FIXED_POINT = 2  # initial condition sits on a fixed point; distance 0
CELL_FAILED = 3  # decomposition failed; value is NaN


@dataclass
class SweepResult:
    axis1: np.ndarray
    axis2: np.ndarray
    distances: np.ndarray  # shape (len(axis1), len(axis2)), row-major
    flags: np.ndarray
    spectrum_a: KoopmanSpectrum
    principal_a: np.ndarray


def _spectrum_from_trajectory(traj, settings: DecompositionSettings) -> KoopmanSpectrum:
    snap = snapshots(traj.discard_prefix(settings.discard), settings.centering)
    if settings.method == "edmd":
        if settings.dictionary is None:
            raise InvalidInputError("edmd needs a dictionary")
        return edmd(snap, settings.dictionary, settings.rank_policy)
    return dmd(snap, settings.rank_policy)


def sweep(map_a: IterativeMap, x0_a, map_b: IterativeMap, grid,
          cfg: RunConfig = RunConfig(),
          settings: DecompositionSettings = DecompositionSettings(),
          lattice_tol: float = 1e-6, max_power: int = MAX_POWER_DMD) -> SweepResult:
    """Distance field between map_a's spectrum at a fixed initial condition
    and map_b's spectrum at every point of a rectangular grid.

    `grid` is a pair of 1-D axis arrays; cell (i, j) starts map_b at
    (axis1[i], axis2[j]). Cells are Wasserstein distances between principal
    sets, falling back to symmetric Hausdorff when cardinalities differ
    (flagged). A grid point that is itself a fixed point yields no dynamics
    data and scores 0 (flagged): the vacuous limit of its neighbours. Genuine
    per-cell failures become NaN cells and never abort the sweep.
    """
    axis1 = np.asarray(grid[0], dtype=float)
    axis2 = np.asarray(grid[1], dtype=float)
    if axis1.size == 0 or axis2.size == 0:
        raise InvalidInputError("grid axes must be non-empty")
    traj_a = iterate(map_a, x0_a, cfg)
    spec_a = _spectrum_from_trajectory(traj_a, settings)
    pa = principal_eigenvalues(spec_a, lattice_tol=lattice_tol, max_power=max_power)

    distances = np.zeros((axis1.size, axis2.size))
    flags = np.zeros((axis1.size, axis2.size), dtype=int)
    for i, a in enumerate(axis1):
        for j, b in enumerate(axis2):
            try:
                traj_b = iterate(map_b, np.array([a, b]), cfg)
                spec_b = _spectrum_from_trajectory(traj_b, settings)
            except (InsufficientDataError, DegenerateDataError):
                distances[i, j] = 0.0
                flags[i, j] = CELL_FIXED_POINT
                continue
            except KoopeqError:
                distances[i, j] = np.nan
                flags[i, j] = CELL_FAILED
                continue
            pb = principal_eigenvalues(spec_b, lattice_tol=lattice_tol,
                                       max_power=max_power)
            if pb.size == 0:
                distances[i, j] = 0.0
                flags[i, j] = CELL_FIXED_POINT
            elif pb.size == pa.size:
                distances[i, j] = wasserstein_distance(pa, pb)
            else:
                distances[i, j] = symmetric_hausdorff(pa, pb)
                flags[i, j] = CELL_HAUSDORFF
    return SweepResult(axis1=axis1, axis2=axis2, distances=distances, flags=flags,
                       spectrum_a=spec_a, principal_a=pa)
