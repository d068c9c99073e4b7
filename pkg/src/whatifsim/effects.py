"""Decide whether an object was affected by the action from its trajectory:
normalize poses by training-set statistics, reduce the trajectory to one
standard deviation for translation and one for rotation, and compare against
grid-searched thresholds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core.types import Trajectory

#: Variance below this is treated as exactly zero (constant component).
_ZERO_VAR = 1e-18

#: Ground-truth motion rule used to label training data: an object counts as
#: affected when it visibly moved, independent of the learned thresholds.
TRUTH_DISPLACEMENT = 5e-3
TRUTH_ROTATION_DEG = 2.0


@dataclass(frozen=True)
class PoseStats:
    """Per-component mean/std over all timesteps of all training trajectories
    (3 translation + 9 rotation entries)."""

    mean: tuple[float, ...]
    std: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.mean) != 12 or len(self.std) != 12:
            raise ValueError("pose stats carry 12 mean and 12 std components")

    @staticmethod
    def identity() -> "PoseStats":
        return PoseStats((0.0,) * 12, (1.0,) * 12)


@dataclass(frozen=True)
class MotionSummary:
    sigma_t: float
    sigma_r: float


@dataclass(frozen=True)
class Thresholds:
    tau_t: float
    tau_r: float


@dataclass(frozen=True)
class ThresholdSearch:
    thresholds: Thresholds
    accuracy: float


def _pose_matrix(traj: Trajectory) -> np.ndarray:
    """(T, 12) matrix of translation and rotation components per timestep."""
    t = traj.translations
    r = traj.rotations.reshape(len(traj), 9)
    return np.concatenate([t, r], axis=1)


def fit_pose_stats(trajectories: Iterable[Trajectory]) -> PoseStats:
    """Pooled per-component mean/std over the timesteps of every trajectory.

    Components with zero variance get std 1 so normalization stays total.
    """
    n_total = 0
    mean = np.zeros(12)
    m2 = np.zeros(12)
    for traj in trajectories:
        if traj.removed or len(traj) == 0:
            continue
        x = _pose_matrix(traj)
        nb = x.shape[0]
        mb = x.mean(axis=0)
        m2b = ((x - mb) ** 2).sum(axis=0)
        if n_total == 0:
            n_total, mean, m2 = nb, mb, m2b
        else:
            delta = mb - mean
            na = n_total
            n_total = na + nb
            mean = mean + delta * (nb / n_total)
            m2 = m2 + m2b + delta * delta * (na * nb / n_total)
    if n_total == 0:
        raise ValueError("no training data: cannot fit pose statistics")
    var = m2 / n_total
    std = np.sqrt(np.maximum(var, 0.0))
    std[var < _ZERO_VAR] = 1.0
    return PoseStats(tuple(float(v) for v in mean), tuple(float(v) for v in std))


@dataclass(frozen=True)
class PoseMoments:
    """Per-component time mean/variance of one trajectory: a sufficient
    statistic for summarize(), small enough to keep for a whole dataset."""

    n: int
    mean: tuple[float, ...]
    var: tuple[float, ...]


def pose_moments(traj: Trajectory) -> PoseMoments:
    if traj.removed:
        raise ValueError("no trajectory for removed object")
    if len(traj) < 2:
        raise ValueError("summarize needs at least 2 samples")
    x = _pose_matrix(traj)
    var = x.var(axis=0)
    # Constant components carry only float noise; snap them to exact zero so
    # an unmoved trajectory summarizes to exactly (0, 0).
    var[var < _ZERO_VAR] = 0.0
    return PoseMoments(
        x.shape[0],
        tuple(float(v) for v in x.mean(axis=0)),
        tuple(float(v) for v in var),
    )


def summarize_moments(moments: PoseMoments, stats: PoseStats) -> MotionSummary:
    """Motion summary from per-component moments.

    Each normalized component y_c = (x_c - mu_c)/s_c contributes its variance
    over time; the summary is the square root of the mean contribution. A
    trajectory that never moves therefore summarizes to exactly zero (pooling
    the raw (timestep, component) values instead would pick up the spread
    *between* constant components, which is not motion).
    """
    v = np.asarray(moments.var)
    s = np.asarray(stats.std)
    vn = v / (s * s)

    def pooled(idx: slice) -> float:
        return math.sqrt(max(float(vn[idx].mean()), 0.0))

    return MotionSummary(pooled(slice(0, 3)), pooled(slice(3, 12)))


def summarize(traj: Trajectory, stats: PoseStats) -> MotionSummary:
    """Normalize the trajectory by the training statistics and reduce it to a
    pooled standard deviation for translation and one for rotation."""
    return summarize_moments(pose_moments(traj), stats)


def is_affected(summary: MotionSummary, thresholds: Thresholds) -> bool:
    """Strict exceedance on either axis."""
    return summary.sigma_t > thresholds.tau_t or summary.sigma_r > thresholds.tau_r


def _candidates(values: np.ndarray) -> np.ndarray:
    """Threshold candidates for one axis: the distinct observed values plus one
    above the max. A zero observation is replaced by half the smallest positive
    value, preserving the 'anything that moved' boundary while keeping every
    candidate strictly positive."""
    vals = np.unique(values)
    positive = vals[vals > 0.0]
    cands: list[float] = []
    if positive.size > 0:
        if positive.size < vals.size:
            cands.append(float(positive[0]) / 2.0)
        cands.extend(float(v) for v in positive)
        cands.append(float(positive[-1]) + 1.0)
    else:
        cands.append(1.0)
    return np.asarray(cands)


def grid_search(examples: Sequence[tuple[MotionSummary, bool]]) -> ThresholdSearch:
    """Exhaustive accuracy maximization over the candidate grid.

    Ties are broken by the lexicographically smallest (tau_t, tau_r). The
    search space equals the full Cartesian product of per-axis candidates, so
    the result matches a brute-force scan by construction.
    """
    if not examples:
        raise ValueError("degenerate labels: no examples")
    labels = np.array([bool(lab) for _, lab in examples])
    if labels.all() or not labels.any():
        raise ValueError("degenerate labels: need both affected and unaffected examples")
    sig_t = np.array([s.sigma_t for s, _ in examples])
    sig_r = np.array([s.sigma_r for s, _ in examples])
    t_cands = _candidates(sig_t)
    r_cands = _candidates(sig_r)
    n = labels.size
    total_ones = int(labels.sum())

    # Point i is predicted affected by threshold index k on an axis iff
    # k < pos_i, where pos_i counts candidates strictly below its value.
    pos_t = np.searchsorted(t_cands, sig_t, side="left")
    pos_r = np.searchsorted(r_cands, sig_r, side="left")

    nr = r_cands.size
    ones_by_rank = np.zeros(nr + 1, dtype=np.int64)
    zeros_by_rank = np.zeros(nr + 1, dtype=np.int64)
    order = np.argsort(pos_t, kind="stable")

    best_acc = -1
    best_kt = 0
    best_kr = 0
    ptr = 0
    ones_in = 0
    for kt in range(t_cands.size):
        # Points below tau_t join the "decided by tau_r" pool.
        while ptr < n and pos_t[order[ptr]] <= kt:
            i = order[ptr]
            if labels[i]:
                ones_by_rank[pos_r[i]] += 1
                ones_in += 1
            else:
                zeros_by_rank[pos_r[i]] += 1
            ptr += 1
        ones_above_t = total_ones - ones_in
        # correct(kr) = ones with pos_r > kr plus zeros with pos_r <= kr.
        cum_ones = np.cumsum(ones_by_rank)
        cum_zeros = np.cumsum(zeros_by_rank)
        correct = (ones_in - cum_ones[: nr]) + cum_zeros[: nr]
        kr = int(np.argmax(correct))
        acc = int(ones_above_t + correct[kr])
        if acc > best_acc:
            best_acc = acc
            best_kt = kt
            best_kr = kr
    thresholds = Thresholds(float(t_cands[best_kt]), float(r_cands[best_kr]))
    return ThresholdSearch(thresholds, best_acc / n)


# ------------------------------------------------------------ ground truth

def max_displacement(traj: Trajectory) -> float:
    if traj.removed or len(traj) == 0:
        return 0.0
    d = traj.translations - traj.translations[0]
    return float(np.sqrt((d * d).sum(axis=1)).max())


def max_rotation_angle_deg(traj: Trajectory) -> float:
    if traj.removed or len(traj) == 0:
        return 0.0
    r0 = traj.rotations[0]
    rel = traj.rotations @ r0.T
    traces = np.einsum("tii->t", rel)
    cosang = np.clip((traces - 1.0) / 2.0, -1.0, 1.0)
    return float(np.degrees(np.arccos(cosang)).max())


def truth_affected(traj: Trajectory) -> bool:
    """Raw-motion labeling rule for training data: the object visibly moved."""
    return (
        max_displacement(traj) > TRUTH_DISPLACEMENT
        or max_rotation_angle_deg(traj) > TRUTH_ROTATION_DEG
    )


def first_motion_time(traj: Trajectory) -> float:
    """Time of the first sample where the truth rule crosses; inf if never."""
    if traj.removed or len(traj) == 0:
        return math.inf
    d = traj.translations - traj.translations[0]
    disp = np.sqrt((d * d).sum(axis=1))
    r0 = traj.rotations[0]
    rel = traj.rotations @ r0.T
    traces = np.einsum("tii->t", rel)
    ang = np.degrees(np.arccos(np.clip((traces - 1.0) / 2.0, -1.0, 1.0)))
    hits = np.nonzero((disp > TRUTH_DISPLACEMENT) | (ang > TRUTH_ROTATION_DEG))[0]
    if hits.size == 0:
        return math.inf
    return float(traj.times[hits[0]])


# ------------------------------------------------------------ serialization

def encode_stats(stats: PoseStats, thresholds: Thresholds) -> dict:
    return {
        "mean": list(stats.mean),
        "std": list(stats.std),
        "tau_t": thresholds.tau_t,
        "tau_r": thresholds.tau_r,
    }


def decode_stats(doc: dict) -> tuple[PoseStats, Thresholds]:
    stats = PoseStats(tuple(float(v) for v in doc["mean"]), tuple(float(v) for v in doc["std"]))
    return stats, Thresholds(float(doc["tau_t"]), float(doc["tau_r"]))
