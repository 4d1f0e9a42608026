from __future__ import annotations

import numpy as np
import pytest

from esai.common import InvalidArgumentError, PoseLookupError
from esai.events import EventStream
from esai.refocus import (
    CameraPose,
    WarpParam,
    compute_psi,
    intrinsics_matrix,
    uniform_motion_poses,
    warp_events,
    warp_events_general,
)


def test_compute_psi_examples() -> None:
    assert compute_psi((320.0, 320.0), (0.177, 0.0), 0.6).psi[0] == pytest.approx(94.4)
    assert compute_psi((320.0, 320.0), (0.0, 0.0), 0.6).psi == (0.0, 0.0)
    near = compute_psi((320.0, 320.0), (0.177, 0.05), 0.6)
    far = compute_psi((320.0, 320.0), (0.177, 0.05), 6.0)
    assert far.psi[0] == pytest.approx(near.psi[0] / 10)
    assert far.psi[1] == pytest.approx(near.psi[1] / 10)
    with pytest.raises(InvalidArgumentError):
        compute_psi((320.0, 320.0), (0.1, 0.0), 0.0)


def test_single_event_shift() -> None:
    stream = EventStream([100_000], [100], [5], [1], (200, 10))

    warped = warp_events(stream, WarpParam((50.0, 0.0), 0))

    assert warped.x[0] == pytest.approx(105.0)
    assert warped.y[0] == 5.0


def test_zero_psi_is_exact_identity(make_stream) -> None:
    stream = make_stream(500, seed=2)

    warped = warp_events(stream, WarpParam((0.0, 0.0), 40_000))

    np.testing.assert_array_equal(warped.x, stream.x)
    np.testing.assert_array_equal(warped.y, stream.y)
    np.testing.assert_array_equal(warped.t, stream.t)
    np.testing.assert_array_equal(warped.p, stream.p)


@pytest.mark.parametrize("seed", range(100))
def test_composition_and_inverse(make_stream, seed: int) -> None:
    rng = np.random.default_rng(seed)
    stream = make_stream(int(rng.integers(1, 200)), seed=seed)
    t_ref = int(rng.integers(0, 100_000))
    first = WarpParam(tuple(rng.uniform(-200, 200, 2)), t_ref)
    second = WarpParam(tuple(rng.uniform(-200, 200, 2)), t_ref)

    composed = warp_events(warp_events(stream, first), second)
    direct = warp_events(stream, first + second)
    undone = warp_events(warp_events(stream, first), -first)

    np.testing.assert_allclose(composed.x, direct.x, rtol=0, atol=1e-9)
    np.testing.assert_allclose(composed.y, direct.y, rtol=0, atol=1e-9)
    np.testing.assert_allclose(undone.x, stream.x, rtol=0, atol=1e-9)
    assert len(composed) == len(stream)
    np.testing.assert_array_equal(composed.t, stream.t)


def test_matches_scalar_reimplementation(make_stream) -> None:
    stream = make_stream(100, seed=8)
    warp = WarpParam((73.25, -12.5), 31_000)

    warped = warp_events(stream, warp)

    for index, event in enumerate(stream):
        seconds = (event.t - warp.t_ref) / 1_000_000
        assert warped.x[index] == event.x + warp.psi[0] * seconds
        assert warped.y[index] == event.y + warp.psi[1] * seconds


def test_warp_params_with_different_references_do_not_add() -> None:
    with pytest.raises(InvalidArgumentError):
        WarpParam((1.0, 0.0), 0) + WarpParam((1.0, 0.0), 5)


def test_general_warp_identity_pose(make_stream) -> None:
    stream = make_stream(50, seed=4)

    warped = warp_events_general(stream, lambda t: CameraPose(), 1.0)

    np.testing.assert_allclose(warped.x, stream.x, atol=1e-12)
    np.testing.assert_allclose(warped.y, stream.y, atol=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_general_warp_reduces_to_uniform_warp(make_stream, seed: int) -> None:
    rng = np.random.default_rng(seed)
    stream = make_stream(100, (64, 48), seed=seed)
    fx, fy = rng.uniform(100, 400, 2)
    v = tuple(rng.uniform(-0.3, 0.3, 2))
    depth = float(rng.uniform(0.3, 3.0))
    t_ref = int(rng.integers(0, 100_000))

    general = warp_events_general(
        stream, uniform_motion_poses(v, intrinsics_matrix(fx, fy, 31.5, 23.5), t_ref), depth
    )
    uniform = warp_events(stream, compute_psi((fx, fy), v, depth, t_ref))

    np.testing.assert_allclose(general.x, uniform.x, rtol=0, atol=1e-9)
    np.testing.assert_allclose(general.y, uniform.y, rtol=0, atol=1e-9)


def test_general_warp_rejects_axial_translation(make_stream) -> None:
    stream = make_stream(5, seed=1)

    with pytest.raises(InvalidArgumentError, match="optical axis"):
        warp_events_general(stream, lambda t: CameraPose(T=np.array([0.0, 0.0, 0.1])), 1.0)


def test_general_warp_reports_missing_pose(make_stream) -> None:
    stream = make_stream(5, seed=1)
    poses: dict[int, CameraPose] = {}

    with pytest.raises(PoseLookupError, match="no camera pose"):
        warp_events_general(stream, poses.__getitem__, 1.0)


def test_pose_requires_a_proper_rotation() -> None:
    with pytest.raises(InvalidArgumentError):
        CameraPose(R=np.diag([1.0, 1.0, -1.0]))


def test_general_warp_looks_up_each_timestamp_once(make_stream) -> None:
    stream = make_stream(20_000, (64, 48), duration=5_000, seed=2)
    K = intrinsics_matrix(320.0, 320.0, 31.5, 23.5)
    uniform_pose = uniform_motion_poses((0.177, 0.05), K, 2_500)
    requested: list[int] = []

    def pose_of(t_us: int) -> CameraPose:
        requested.append(t_us)
        return uniform_pose(t_us)

    general = warp_events_general(stream, pose_of, 0.6)
    uniform = warp_events(stream, compute_psi((320.0, 320.0), (0.177, 0.05), 0.6, 2_500))

    assert sorted(requested) == np.unique(stream.t).tolist()
    np.testing.assert_allclose(general.x, uniform.x, rtol=0, atol=1e-9)
    np.testing.assert_allclose(general.y, uniform.y, rtol=0, atol=1e-9)


def test_general_warp_applies_each_event_its_own_rotation() -> None:
    stream = EventStream([0, 0, 10, 20], [4, 8, 4, 4], [2, 6, 2, 2], [1, -1, 1, 1], (16, 8))
    K = intrinsics_matrix(100.0, 100.0, 7.5, 3.5)
    angle = 0.01
    tilt = np.array(
        [[np.cos(angle), 0.0, np.sin(angle)], [0.0, 1.0, 0.0], [-np.sin(angle), 0.0, np.cos(angle)]]
    )
    poses = {
        0: CameraPose(K=K),
        10: CameraPose(R=tilt, K=K),
        20: CameraPose(T=np.array([0.02, 0.0, 0.0]), K=K),
    }

    warped = warp_events_general(stream, poses.__getitem__, 2.0)

    tilted = K @ tilt @ np.linalg.inv(K) @ np.array([4.0, 2.0, 1.0])
    np.testing.assert_allclose(warped.x[:2], [4.0, 8.0], atol=1e-12)
    assert warped.x[2] == pytest.approx(tilted[0] / tilted[2])
    assert warped.y[2] == pytest.approx(tilted[1] / tilted[2])
    assert warped.x[3] == pytest.approx(5.0)
