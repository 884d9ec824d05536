import math

import numpy as np
import pytest

from glidersim.frames import EulerAngles
from glidersim.seeker import (ImagePoint, NotVisibleError, SeekerModel,
                              normalized_to_pixels, pixels_to_normalized,
                              project)

LEVEL = EulerAngles(0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def seeker():
    # focal = half width so a 45 deg offset maps to u = 1
    return SeekerModel(focal=320.0, resolution=(640, 480))


class TestProject:
    def test_boresight_target_centered(self, seeker):
        p = project((100.0, 0.0, 0.0), (0.0, 0.0, 0.0), LEVEL, seeker)
        assert p.visible
        assert p.u == pytest.approx(0.0, abs=1e-15)
        assert p.v == pytest.approx(0.0, abs=1e-15)

    def test_lateral_offset_hand_case(self, seeker):
        # offset 1/10 of depth with focal = half width: u = +0.1
        p = project((10.0, 1.0, 0.0), (0.0, 0.0, 0.0), LEVEL, seeker)
        assert p.visible
        assert p.u == pytest.approx(0.1, abs=1e-12)
        assert p.v == pytest.approx(0.0, abs=1e-15)

    def test_target_behind_is_invisible(self, seeker):
        p = project((-50.0, 0.0, 0.0), (0.0, 0.0, 0.0), LEVEL, seeker)
        assert not p.visible

    def test_out_of_frame_keeps_coordinates(self, seeker):
        p = project((10.0, 20.0, 0.0), (0.0, 0.0, 0.0), LEVEL, seeker)
        assert not p.visible
        assert p.u == pytest.approx(2.0, abs=1e-12)

    def test_yaw_right_moves_image_left(self, seeker):
        yawed = EulerAngles(0.0, 0.0, math.radians(5.0))
        p = project((100.0, 0.0, 0.0), (0.0, 0.0, 0.0), yawed, seeker)
        assert p.u < 0.0
        assert p.v == pytest.approx(0.0, abs=1e-12)

    def test_pitch_up_moves_image_down(self, seeker):
        pitched = EulerAngles(0.0, math.radians(5.0), 0.0)
        p = project((100.0, 0.0, 0.0), (0.0, 0.0, 0.0), pitched, seeker)
        assert p.v > 0.0
        assert p.u == pytest.approx(0.0, abs=1e-12)

    def test_scale_invariance(self, seeker):
        rng = np.random.default_rng(0)
        pos = np.array([12.0, -4.0, -30.0])
        att = EulerAngles(0.2, -0.3, 0.8)
        target = np.array([80.0, 10.0, -5.0])
        base = project(target, pos, att, seeker)
        for lam in rng.uniform(0.1, 8.0, 20):
            scaled = pos + lam * (target - pos)
            p = project(scaled, pos, att, seeker)
            assert p.u == pytest.approx(base.u, abs=1e-12)
            assert p.v == pytest.approx(base.v, abs=1e-12)

    def test_translation_moves_with_glider(self, seeker):
        # same relative geometry anywhere in space projects identically
        p1 = project((110.0, 5.0, -20.0), (10.0, 5.0, -20.0), LEVEL, seeker)
        p2 = project((100.0, 0.0, 0.0), (0.0, 0.0, 0.0), LEVEL, seeker)
        assert p1.u == pytest.approx(p2.u, abs=1e-12)
        assert p1.v == pytest.approx(p2.v, abs=1e-12)


class TestPixelConversion:
    def test_center_maps_to_principal_point(self, seeker):
        px = normalized_to_pixels(ImagePoint(0.0, 0.0, True), seeker)
        np.testing.assert_allclose(px, [320.0, 240.0], atol=0)

    def test_corner_maps_to_resolution(self, seeker):
        px = normalized_to_pixels(ImagePoint(1.0, 1.0, True), seeker)
        np.testing.assert_allclose(px, [640.0, 480.0], atol=0)

    def test_round_trip_identity(self, seeker):
        rng = np.random.default_rng(1)
        for _ in range(100):
            target = rng.uniform([5.0, -4.0, -4.0], [50.0, 4.0, 4.0])
            p = project(target, (0.0, 0.0, 0.0), LEVEL, seeker)
            if not p.visible:
                continue
            u, v = pixels_to_normalized(normalized_to_pixels(p, seeker),
                                        seeker)
            assert u == pytest.approx(p.u, abs=1e-12)
            assert v == pytest.approx(p.v, abs=1e-12)

    def test_invisible_point_rejected(self, seeker):
        with pytest.raises(NotVisibleError):
            normalized_to_pixels(ImagePoint(0.0, 0.0, False), seeker)


class TestSeekerModel:
    def test_fov_derived_from_focal(self, seeker):
        assert seeker.fov[0] == pytest.approx(2 * math.atan(320 / 320.0))
        assert seeker.fov[1] == pytest.approx(2 * math.atan(240 / 320.0))

    def test_from_fov_round_trips(self):
        s = SeekerModel.from_fov(math.radians(120.0), resolution=(640, 480))
        assert s.fov[0] == pytest.approx(math.radians(120.0), rel=1e-12)

    def test_inconsistent_fov_rejected(self):
        with pytest.raises(ValueError):
            SeekerModel(focal=320.0, resolution=(640, 480),
                        fov=(math.radians(120.0), math.radians(90.0)))

    def test_nonpositive_focal_rejected(self):
        with pytest.raises(ValueError):
            SeekerModel(focal=0.0)

    def test_mounted_camera_rotates_view(self):
        # camera yawed 90 deg right sees a target due east on boresight
        from glidersim.seeker import mounting_from_euler

        mount = mounting_from_euler(EulerAngles(0.0, 0.0, math.pi / 2))
        s = SeekerModel(focal=320.0, resolution=(640, 480),
                        mounting_body=mount)
        p = project((0.0, 50.0, 0.0), (0.0, 0.0, 0.0), LEVEL, s)
        assert p.visible
        assert p.u == pytest.approx(0.0, abs=1e-12)
        assert p.v == pytest.approx(0.0, abs=1e-12)
