"""Run a map from an initial state, detect convergence or blow-up, and
assemble the paired snapshot matrices consumed by the spectral module."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from .corpus import IterativeMap
from .errors import (ConfigurationError, InsufficientDataError, InvalidInputError,
                     NumericFailureError)


class TrajectoryStatus(Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    DIVERGED = "diverged"


class Centering(Enum):
    NONE = "none"
    FIXED_POINT = "fixed_point"


@dataclass(frozen=True)
class RunConfig:
    """Iteration budget, fixed-point tolerance and blow-up threshold."""

    max_iters: int = 200
    eps: float = 1e-12
    overflow_cap: float = 1e8

    def __post_init__(self):
        if self.max_iters < 2:
            raise ConfigurationError("max_iters must be at least 2")
        if not self.eps > 0:
            raise ConfigurationError("eps must be positive")
        if not self.overflow_cap > self.eps:
            raise ConfigurationError("overflow_cap must exceed eps")


@dataclass
class Trajectory:
    """States x_0..x_K stacked row-wise, with the stop reason."""

    states: np.ndarray  # shape (K+1, dim)
    status: TrajectoryStatus
    fixed_point_estimate: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.states.shape[0]

    def discard_prefix(self, k: int) -> "Trajectory":
        """Drop the first k states (transient removal); keeps at least 3."""
        k = max(0, min(k, len(self) - 3))
        return replace(self, states=self.states[k:])


@dataclass
class SnapshotPair:
    """Column-paired data matrices: column j of Y is the one-step image of
    column j of X under the map, in the identity observable."""

    X: np.ndarray  # shape (dim, m)
    Y: np.ndarray
    observable_tag: str = "identity"


def iterate(imap: IterativeMap, x0, cfg: RunConfig = RunConfig()) -> Trajectory:
    """Apply imap.step repeatedly from x0.

    Stops at the first of: successive-iterate distance <= eps (CONVERGED),
    max_iters steps taken (BUDGET_EXHAUSTED), or state norm >= overflow_cap
    (DIVERGED; the crossing state is retained since growing modes are data).
    A NaN mid-run raises NumericFailureError carrying the partial trajectory.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    if x.size != imap.dim:
        raise InvalidInputError(f"x0 has length {x.size}, map expects {imap.dim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x0 contains non-finite entries")
    states = [x]
    status = TrajectoryStatus.BUDGET_EXHAUSTED
    fpe = None
    for _ in range(cfg.max_iters):
        xn = np.atleast_1d(np.asarray(imap.step(states[-1]), dtype=float))
        if xn.size != imap.dim:
            raise ConfigurationError("step changed the state dimension")
        if np.any(np.isnan(xn)):
            partial = Trajectory(np.array(states), TrajectoryStatus.BUDGET_EXHAUSTED)
            raise NumericFailureError("NaN produced mid-run", partial=partial)
        states.append(xn)
        if np.linalg.norm(xn - states[-2]) <= cfg.eps:
            status = TrajectoryStatus.CONVERGED
            fpe = xn
            break
        if np.linalg.norm(xn) >= cfg.overflow_cap:
            status = TrajectoryStatus.DIVERGED
            break
    return Trajectory(states=np.array(states), status=status, fixed_point_estimate=fpe)


def default_centering(traj: Trajectory) -> Centering:
    """FIXED_POINT for converged runs, NONE otherwise."""
    if traj.status is TrajectoryStatus.CONVERGED:
        return Centering.FIXED_POINT
    return Centering.NONE


def snapshots(traj: Trajectory, centering: Optional[Centering] = None) -> SnapshotPair:
    """Pair consecutive states into (X, Y) columns.

    centering=None applies the default policy. FIXED_POINT subtracts the
    fixed-point estimate (the final state when no estimate exists) from every
    column.
    """
    if len(traj) < 3:
        raise InsufficientDataError(f"need at least 3 states, got {len(traj)}")
    if centering is None:
        centering = default_centering(traj)
    data = traj.states
    tag = "identity"
    if centering is Centering.FIXED_POINT:
        ref = traj.fixed_point_estimate
        if ref is None:
            ref = data[-1]
        data = data - ref
        tag = "identity(centered)"
    return SnapshotPair(X=data[:-1].T.copy(), Y=data[1:].T.copy(), observable_tag=tag)


def multi_snapshots(trajs, centering: Optional[Centering] = None) -> SnapshotPair:
    """Column-concatenate per-trajectory snapshot pairs.

    Pairing never crosses trajectory boundaries; each trajectory is centered
    against its own fixed-point estimate.
    """
    trajs = list(trajs)
    if not trajs:
        raise InsufficientDataError("no trajectories given")
    dims = {t.dim for t in trajs}
    if len(dims) != 1:
        raise ConfigurationError(f"trajectories have mixed dimensions {sorted(dims)}")
    parts = [snapshots(t, centering) for t in trajs]
    return SnapshotPair(X=np.hstack([p.X for p in parts]),
                        Y=np.hstack([p.Y for p in parts]),
                        observable_tag=parts[0].observable_tag)
