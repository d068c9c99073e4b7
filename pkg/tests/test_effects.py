import math

import numpy as np
import pytest

from whatifsim.core import ObjectClass, Trajectory
from whatifsim.effects import (
    MotionSummary,
    PoseStats,
    Thresholds,
    fit_pose_stats,
    grid_search,
    is_affected,
    max_displacement,
    max_rotation_angle_deg,
    pose_moments,
    summarize,
    truth_affected,
)


def constant_trajectory(value=(0.1, -0.2, 0.05), n=100, cls=ObjectClass.BANANA):
    times = (np.arange(n) + 1.0) / 300.0
    translations = np.tile(np.asarray(value), (n, 1))
    rotations = np.tile(np.eye(3), (n, 1, 1))
    return Trajectory(cls, False, times, translations, rotations)


def ramp_trajectory(d=0.3, n=1500, cls=ObjectClass.BANANA):
    """Translation ramping linearly from 0 to d along x."""
    times = (np.arange(n) + 1.0) / 300.0
    x = np.linspace(0.0, d, n)
    translations = np.stack([x, np.zeros(n), np.zeros(n)], axis=1)
    rotations = np.tile(np.eye(3), (n, 1, 1))
    return Trajectory(cls, False, times, translations, rotations)


def rotating_trajectory(n=200, cls=ObjectClass.BANANA):
    """Pure z-rotation by pi over the window, constant translation."""
    times = (np.arange(n) + 1.0) / 300.0
    translations = np.zeros((n, 3))
    rotations = np.zeros((n, 3, 3))
    for i, a in enumerate(np.linspace(0.0, math.pi, n)):
        c, s = math.cos(a), math.sin(a)
        rotations[i] = [[c, -s, 0], [s, c, 0], [0, 0, 1]]
    return Trajectory(cls, False, times, translations, rotations)


# ---------------------------------------------------------------- stats

def test_single_constant_trajectory_gives_unit_stds():
    stats = fit_pose_stats([constant_trajectory()])
    assert stats.std == (1.0,) * 12


def test_two_level_translation_stats_hand_computed():
    # x constant at 0 in one trajectory and at 2 in another, same lengths:
    # pooled mean 1, population std 1.
    t0 = constant_trajectory((0.0, 0.0, 0.0))
    t1 = constant_trajectory((2.0, 0.0, 0.0))
    stats = fit_pose_stats([t0, t1])
    assert stats.mean[0] == pytest.approx(1.0)
    assert stats.std[0] == pytest.approx(1.0)


def test_stats_order_invariant():
    trajs = [constant_trajectory((0.0, 0.0, 0.0)), ramp_trajectory(0.4), rotating_trajectory()]
    a = fit_pose_stats(trajs)
    b = fit_pose_stats(list(reversed(trajs)))
    assert np.allclose(a.mean, b.mean, atol=1e-12)
    assert np.allclose(a.std, b.std, atol=1e-12)


def test_stats_empty_errors():
    with pytest.raises(ValueError, match="no training data"):
        fit_pose_stats([])


# ---------------------------------------------------------------- summarize

def test_summarize_constant_is_exactly_zero():
    summary = summarize(constant_trajectory(), PoseStats.identity())
    assert summary.sigma_t == 0.0
    assert summary.sigma_r == 0.0


def test_summarize_ramp_matches_closed_form():
    # Closed-form oracle: population variance of a uniform ramp 0..d over n
    # points is d^2 (n+1) / (12 (n-1)); the summary averages the three
    # translation components, two of which are constant.
    n, d = 1500, 0.3
    var_ramp = d * d * (n + 1) / (12.0 * (n - 1))
    expected = math.sqrt(var_ramp / 3.0)
    summary = summarize(ramp_trajectory(d, n), PoseStats.identity())
    assert summary.sigma_t == pytest.approx(expected, rel=1e-9)


def test_summarize_pure_rotation():
    summary = summarize(rotating_trajectory(), PoseStats.identity())
    assert summary.sigma_t == 0.0
    assert summary.sigma_r > 0.0


def test_summarize_time_reversal_invariant():
    traj = ramp_trajectory(0.25, 400)
    rev = Trajectory(
        traj.cls,
        False,
        traj.times.copy(),
        traj.translations[::-1].copy(),
        traj.rotations[::-1].copy(),
    )
    stats = PoseStats.identity()
    a, b = summarize(traj, stats), summarize(rev, stats)
    assert a.sigma_t == pytest.approx(b.sigma_t, rel=1e-12)
    assert a.sigma_r == pytest.approx(b.sigma_r, rel=1e-12)


def test_summarize_rejects_removed():
    with pytest.raises(ValueError, match="removed"):
        summarize(Trajectory.removed_for(ObjectClass.BANANA), PoseStats.identity())


def test_summarize_uses_training_normalization():
    # Doubling the std of the x component halves its contribution.
    traj = ramp_trajectory(0.3, 800)
    base = summarize(traj, PoseStats.identity())
    wide = PoseStats((0.0,) * 12, (2.0,) + (1.0,) * 11)
    assert summarize(traj, wide).sigma_t == pytest.approx(base.sigma_t / 2.0, rel=1e-12)


# ---------------------------------------------------------------- thresholds

def test_is_affected_boundary_rules():
    th = Thresholds(0.5, 0.25)
    assert not is_affected(MotionSummary(0.0, 0.0), th)
    assert is_affected(MotionSummary(1.0, 0.0), th)
    assert is_affected(MotionSummary(0.0, 0.3), th)
    assert not is_affected(MotionSummary(0.5, 0.25), th)  # strict inequality


def _brute_force(examples):
    """Independent scan over the same candidate grid (naive triple loop)."""
    sig_t = np.array([s.sigma_t for s, _ in examples])
    sig_r = np.array([s.sigma_r for s, _ in examples])
    labels = np.array([bool(l) for _, l in examples])

    def cands(vals):
        u = sorted(set(vals.tolist()))
        pos = [v for v in u if v > 0]
        out = []
        if pos:
            if len(pos) < len(u):
                out.append(pos[0] / 2.0)
            out.extend(pos)
            out.append(pos[-1] + 1.0)
        else:
            out.append(1.0)
        return out

    best = (-1.0, None, None)
    for tt in cands(sig_t):
        for tr in cands(sig_r):
            pred = (sig_t > tt) | (sig_r > tr)
            acc = float((pred == labels).mean())
            if acc > best[0]:
                best = (acc, tt, tr)
    return best


def test_grid_search_two_example_case():
    # Hand enumeration: affected at (1, 0), unaffected at (0, 0). The best
    # pair puts tau_t strictly between 0 and 1, accuracy 1.
    result = grid_search([(MotionSummary(1.0, 0.0), True), (MotionSummary(0.0, 0.0), False)])
    assert result.accuracy == 1.0
    assert 0.0 < result.thresholds.tau_t <= 1.0
    assert result.thresholds.tau_r > 0.0


def test_grid_search_perfectly_separable():
    rng = np.random.default_rng(0)
    examples = []
    for _ in range(60):
        examples.append((MotionSummary(float(rng.uniform(1.0, 2.0)), 0.0), True))
        examples.append((MotionSummary(float(rng.uniform(0.0, 0.5)), 0.0), False))
    result = grid_search(examples)
    assert result.accuracy == 1.0
    acc, tt, tr = _brute_force(examples)
    assert result.accuracy == acc


def test_grid_search_matches_brute_force_on_random_fixtures():
    rng = np.random.default_rng(42)
    for trial in range(8):
        n = int(rng.integers(20, 200))
        examples = []
        for _ in range(n):
            st = float(rng.choice([0.0, rng.uniform(0, 3)]))
            sr = float(rng.choice([0.0, rng.uniform(0, 3)]))
            examples.append((MotionSummary(st, sr), bool(rng.integers(2))))
        labels = [l for _, l in examples]
        if all(labels) or not any(labels):
            examples[0] = (examples[0][0], not labels[0])
        result = grid_search(examples)
        acc, tt, tr = _brute_force(examples)
        assert result.accuracy == acc
        # the returned pair must achieve the claimed accuracy
        pred = [
            (s.sigma_t > result.thresholds.tau_t) or (s.sigma_r > result.thresholds.tau_r)
            for s, _ in examples
        ]
        achieved = sum(p == l for p, (_, l) in zip(pred, examples)) / len(examples)
        assert achieved == result.accuracy


def test_grid_search_random_labels_beats_prior():
    rng = np.random.default_rng(9)
    examples = [
        (MotionSummary(float(rng.uniform(0.1, 2.0)), float(rng.uniform(0.1, 2.0))), bool(rng.integers(2)))
        for _ in range(150)
    ]
    labels = [l for _, l in examples]
    prior = max(sum(labels), len(labels) - sum(labels)) / len(labels)
    result = grid_search(examples)
    assert result.accuracy >= prior


def test_grid_search_degenerate_labels():
    with pytest.raises(ValueError, match="degenerate labels"):
        grid_search([(MotionSummary(1.0, 1.0), True)])
    with pytest.raises(ValueError, match="degenerate labels"):
        grid_search([(MotionSummary(1.0, 1.0), True), (MotionSummary(0.5, 0.5), True)])


def test_grid_search_tie_break_lexicographic():
    # Two equally-accurate pairs: the smaller (tau_t, tau_r) must win.
    examples = [
        (MotionSummary(1.0, 1.0), True),
        (MotionSummary(3.0, 3.0), True),
        (MotionSummary(0.5, 0.5), False),
    ]
    result = grid_search(examples)
    acc, tt, tr = _brute_force(examples)
    assert result.accuracy == acc == 1.0
    # brute force scans in ascending order with strict improvement, so it
    # also returns the lexicographically smallest pair
    assert (result.thresholds.tau_t, result.thresholds.tau_r) == (tt, tr)


# ---------------------------------------------------------------- truth rule

def test_truth_rule_displacement():
    assert not truth_affected(constant_trajectory())
    moved = ramp_trajectory(0.01, 300)
    assert max_displacement(moved) == pytest.approx(0.01, rel=1e-9)
    assert truth_affected(moved)


def test_truth_rule_rotation():
    spun = rotating_trajectory()
    assert max_rotation_angle_deg(spun) == pytest.approx(180.0, abs=1e-6)
    assert truth_affected(spun)
    assert max_displacement(spun) == 0.0
