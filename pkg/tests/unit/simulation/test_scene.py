from __future__ import annotations

import numpy as np
import pytest

from esai.common import InvalidArgumentError
from esai.events import GrayImage
from esai.simulation import (
    OccluderSegment,
    OccluderSpec,
    SceneSpec,
    Trajectory,
    make_cardboard_occluder,
    make_fence_occluder,
    make_stripe_occluder,
    make_texture,
    render_view,
)


def _scene(occluder: OccluderSpec, width: int, texture: GrayImage | None = None) -> SceneSpec:
    if texture is None:
        texture = make_texture("gradient", (4, width), mean=0.5, contrast=0.8)
    return SceneSpec(
        target_texture=texture,
        occluder=occluder,
        depth=0.6,
        occluder_depth=0.2,
        fx=320.0,
        fy=320.0,
        resolution=(4, width),
    )


def test_gap_pixel_sees_target_and_slat_pixel_sees_occluder() -> None:
    # period 10 px: slat over [0, 5), gap over [5, 10)
    fence = make_fence_occluder(0.5, 2, span=20.0, intensity=0.15)
    scene = _scene(fence, 20)

    image, mask = render_view(scene, 0.0, 0.0)

    assert image.data[1, 2] == pytest.approx(0.15)
    assert image.data[1, 7] == pytest.approx(scene.target_texture.data[1, 7])
    assert mask[1, 2] and not mask[1, 7]


@pytest.mark.parametrize("r_o, slats", [(0.9, 8), (0.908, 8), (0.5, 4), (0.75, 6)])
def test_fence_mask_fraction_matches_r_o(r_o: float, slats: int) -> None:
    fence = make_fence_occluder(r_o, slats)
    scene = _scene(fence, 346)

    _, mask = render_view(scene, 0.0, 0.0)

    assert fence.r_o == pytest.approx(r_o)
    assert abs(mask.mean() - r_o) <= 0.02


def test_zero_ratio_gives_empty_occluder() -> None:
    fence = make_fence_occluder(0.0, 8)

    _, mask = render_view(_scene(fence, 40), 0.0, 0.0)

    assert fence.is_empty
    assert not mask.any()


def test_fence_rejects_full_occlusion() -> None:
    with pytest.raises(InvalidArgumentError):
        make_fence_occluder(1.0, 4)


def test_partial_footprint_blends_occluder_and_target() -> None:
    occluder = OccluderSpec("fence", segments=(OccluderSegment(1.0, 0.2), OccluderSegment(3.0)))
    texture = GrayImage(np.full((1, 4), 0.6))
    scene = SceneSpec(texture, occluder, 0.6, 0.2, 100.0, 100.0, (1, 4))

    centred, _ = render_view(scene, 0.0, 0.0)
    # half a pixel of camera travel at the occluder plane
    shifted, _ = render_view(scene, 0.5 * scene.occluder_depth / scene.fx, 0.0)

    assert centred.data[0, 0] == pytest.approx(0.5 * 0.2 + 0.5 * 0.6)
    assert centred.data[0, 2] == pytest.approx(0.6)
    assert shifted.data[0, 0] == pytest.approx(0.2)


def test_horizontal_fence_varies_along_rows() -> None:
    fence = make_fence_occluder(0.5, 2, "horizontal", span=8.0, phase=0.5)
    texture = make_texture("constant", (8, 6))
    scene = SceneSpec(texture, fence, 0.6, 0.2, 320.0, 320.0, (8, 6))

    _, mask = render_view(scene, 0.0, 0.0)

    assert mask[:, 0].tolist() == [False, True, True, False, False, True, True, False]
    assert np.all(mask == mask[:, :1])


def test_stripe_occluder_edge_ratio() -> None:
    striped = make_stripe_occluder(0.8, 4, stripes=5, span=64.0)

    assert striped.r_t == 2.0
    assert striped.r_o == pytest.approx(0.8)
    assert len(striped.segments) == 6


def test_cardboard_slits() -> None:
    board = make_cardboard_occluder([(10.0, 4.0), (30.0, 6.0)], span=40.0)

    assert board.r_o == pytest.approx(30.0 / 40.0)
    with pytest.raises(InvalidArgumentError):
        make_cardboard_occluder([(10.0, 4.0), (12.0, 2.0)], span=40.0)


def test_texture_kinds_stay_positive_and_bounded() -> None:
    for kind in ("blobs", "checker", "gradient", "constant", "bars"):
        texture = make_texture(kind, (12, 16), mean=0.5, contrast=1.2)
        assert texture.data.min() > 0.0
        assert texture.data.max() <= 1.0
    with pytest.raises(InvalidArgumentError):
        make_texture("marble", (4, 4))


def test_principal_point_shifts_the_view() -> None:
    fence = make_fence_occluder(0.5, 2, span=20.0, intensity=0.15)
    centred = _scene(fence, 20)
    offset = SceneSpec(
        target_texture=centred.target_texture,
        occluder=fence,
        depth=0.6,
        occluder_depth=0.2,
        fx=320.0,
        fy=320.0,
        resolution=(4, 20),
        principal_point=(11.5, 1.5),
    )

    image, mask = render_view(centred, 0.0, 0.0)
    moved, moved_mask = render_view(offset, 0.0, 0.0)

    assert centred.principal_point == (9.5, 1.5)
    np.testing.assert_allclose(moved.data[:, 2:], image.data[:, :-2])
    np.testing.assert_array_equal(moved_mask[:, 2:], mask[:, :-2])


def test_scene_precondition_on_depths() -> None:
    texture = make_texture("constant", (4, 4))
    with pytest.raises(InvalidArgumentError):
        SceneSpec(texture, OccluderSpec.empty(), 0.2, 0.6, 320.0, 320.0, (4, 4))


def test_trajectory_defaults_reference_to_midpoint() -> None:
    trajectory = Trajectory(v=(0.2, 0.0), t_span=(0, 400_000))

    assert trajectory.t_ref == 200_000
    assert trajectory.position(300_000)[0] == pytest.approx(0.02)
    with pytest.raises(InvalidArgumentError):
        Trajectory(v=(0.2, 0.0), t_span=(0, 10), t_ref=20)
