import math

import numpy as np
import pytest

from conftest import SCENARIOS, box_occluder, write_scenario
from src.core.errors import (
    DegenerateLookError,
    MeshFormatError,
    ScenarioConfigError,
    TilingError,
    TrajectoryRangeError,
)
from src.stages.scene import (
    CameraRig,
    Keyframe,
    Phase,
    Trajectory,
    evaluate_pose,
    eye_cameras,
    frame_schedule,
    head_orientation,
    load_scenario,
)


def _line(phase=Phase.CRUISE):
    return Trajectory([Keyframe(0.0, (0.0, 0.0, 0.0), 0.0, phase), Keyframe(1.0, (10.0, 0.0, 0.0), 0.0)])


def test_eye_centers_straddle_the_head():
    left, right = eye_cameras(CameraRig(), np.array([0.0, 10.0, 0.0]))
    assert np.allclose(left.center, [-0.0551797, 0.0, 1.75])
    assert np.allclose(right.center, [0.0551797, 0.0, 1.75])
    assert np.allclose(left.orientation.forward, right.orientation.forward)


def test_default_rig_intrinsics():
    rig = CameraRig()
    assert rig.focal == pytest.approx(2375.3, abs=0.05)
    left, _ = eye_cameras(rig, np.array([0.0, 10.0, 0.0]))
    assert left.vfov_deg == pytest.approx(119.2, abs=0.05)
    assert rig.tile_size == (1284, 1620)


def test_scaled_rig_keeps_fov_and_grid():
    rig = CameraRig().scaled(10)
    assert (rig.width, rig.height) == (640, 810)
    assert rig.tile_size == (128, 162)
    assert rig.hfov_deg == CameraRig().hfov_deg


def test_rig_rejects_uneven_tiling():
    with pytest.raises(TilingError):
        CameraRig(width=641)


def test_schedule_counts():
    s = frame_schedule(60.0, 3.0)
    assert (s.frames, s.captures, s.tile_files) == (181, 362, 9050)
    assert frame_schedule(1.0, 2.0).times == [0.0, 1.0, 2.0]


def test_cruise_is_linear():
    pose = evaluate_pose(_line(), 0.25)
    assert np.allclose(pose.position, [2.5, 0.0, 0.0])


def test_decelerate_eases_out():
    traj = _line(Phase.DECELERATE)
    mid = evaluate_pose(traj, 0.5).position[0]
    assert mid == pytest.approx(7.5)
    near_end = evaluate_pose(traj, 1.0 - 1e-4).position[0]
    assert 10.0 - near_end < 1e-6


def test_endpoints_hit_keyframes():
    traj = _line()
    assert np.allclose(evaluate_pose(traj, 0.0).position, [0.0, 0.0, 0.0])
    assert np.allclose(evaluate_pose(traj, 1.0).position, [10.0, 0.0, 0.0])


def test_time_outside_trajectory():
    with pytest.raises(TrajectoryRangeError):
        evaluate_pose(_line(), 1.5)
    with pytest.raises(TrajectoryRangeError):
        evaluate_pose(_line(), -0.1)


def test_keyframes_must_increase():
    with pytest.raises(ScenarioConfigError):
        Trajectory([Keyframe(0.0, (0, 0, 0), 0.0), Keyframe(0.0, (1, 0, 0), 0.0)])


def test_turn_back_onto_the_start_heading_is_rejected():
    with pytest.raises(ScenarioConfigError):
        Trajectory([Keyframe(0.0, (0.0, 0.0, 0.0), 0.0, Phase.TURN), Keyframe(1.0, (-10.0, 0.0, 0.0), math.pi)])


def test_degenerate_look():
    with pytest.raises(DegenerateLookError):
        head_orientation(np.zeros(3), np.zeros(3))
    with pytest.raises(DegenerateLookError):
        head_orientation(np.zeros(3), np.array([0.0, 0.0, 5.0]))


def test_bearing_follows_target():
    o = head_orientation(np.zeros(3), np.array([1.0, 1.0, 0.0]))
    assert math.degrees(math.atan2(o.forward[1], o.forward[0])) == pytest.approx(45.0)
    assert o.up[2] > 0
    assert np.allclose(np.cross(o.right, o.up), -o.forward)


def test_projection_of_the_look_target_is_the_image_center():
    left, right = eye_cameras(CameraRig(), np.array([0.0, 10.0, 0.0]))
    target = np.array([0.0, 10.0, 0.0])
    px, z = left.project(target)
    assert z > 0
    # the eyes are offset from the head, so the target lands near the center but not on it
    assert abs(px[0] - left.width / 2) < 20
    assert px[1] == pytest.approx(left.height / 2, abs=1e-6)


def test_scenario_a_turn_and_eye_geometry():
    sc = load_scenario(SCENARIOS / "scenario_a.yaml", load_subject=False)
    assert sc.schedule().frames == 181
    turn_end = sc.pose(1.3)
    assert np.allclose(turn_end.position, [-19.0, -1.75, 0.0])
    mid = sc.pose(0.65).position
    assert math.hypot(mid[0] + 19.0, mid[1] + 9.75) == pytest.approx(8.0)
    for t in sc.schedule().times:
        left, right = sc.cameras(t)
        assert np.linalg.norm(right.center - left.center) == pytest.approx(0.1103594, abs=1e-9)
        assert left.center[2] == pytest.approx(1.75)
        assert right.center[2] == pytest.approx(1.75)


@pytest.mark.parametrize("name", ["scenario_a", "scenario_b", "scenario_c", "scenario_d"])
def test_bundled_scenarios_load(name):
    sc = load_scenario(SCENARIOS / f"{name}.yaml", load_subject=False)
    assert sc.duration == pytest.approx(3.0)
    assert sc.schedule().tile_files == 9050
    assert len(sc.occluders) >= 4


def test_scenario_file_errors(tmp_path, quad_obj):
    bad = tmp_path / "bad.yaml"
    bad.write_text("id: X\nsubject: {}\n", encoding="utf-8")
    with pytest.raises(ScenarioConfigError):
        load_scenario(bad)
    path = write_scenario(tmp_path / "s.yaml", quad_obj, occluders=[{"name": "both"}])
    with pytest.raises(ScenarioConfigError):
        load_scenario(path)


def test_box_occluder_has_twelve_triangles(tmp_path, quad_obj):
    path = write_scenario(tmp_path / "s.yaml", quad_obj, occluders=[box_occluder("b", (5, 0, 1), (1, 1, 2))])
    sc = load_scenario(path)
    assert sc.occluder_triangles().shape == (12, 3, 3)
    assert sc.subject_triangles(0.0).shape == (2, 3, 3)


@pytest.mark.parametrize("face", ["f 1 2 9", "f 1 2 x"])
def test_bad_occluder_mesh_is_format_error(tmp_path, quad_obj, face):
    occ = tmp_path / "occ.obj"
    occ.write_text(f"v 0 0 0\nv 1 0 0\n{face}\n", encoding="utf-8")
    path = write_scenario(tmp_path / "s.yaml", quad_obj, occluders=[{"name": "o", "mesh": str(occ)}])
    with pytest.raises(MeshFormatError, match="line 3"):
        load_scenario(path)


def test_due_north_target_puts_east_on_the_right():
    o = head_orientation(np.zeros(3), np.array([0.0, 1.0, 0.0]))
    assert np.allclose(o.forward, [0.0, 1.0, 0.0])
    assert np.allclose(o.right, [1.0, 0.0, 0.0])
    assert np.allclose(o.up, [0.0, 0.0, 1.0])


@pytest.mark.parametrize("boundary", [1.3, 2.3])
def test_scenario_a_pose_is_continuous_across_keyframes(boundary):
    sc = load_scenario(SCENARIOS / "scenario_a.yaml", load_subject=False)
    before, after = sc.pose(boundary - 1e-7), sc.pose(boundary + 1e-7)
    assert np.linalg.norm(after.position - before.position) < 1e-4
    assert abs(math.remainder(after.yaw - before.yaw, 2 * math.pi)) < 1e-4


def test_scenario_a_head_tracks_the_subject_every_frame():
    sc = load_scenario(SCENARIOS / "scenario_a.yaml", load_subject=False)
    rig = sc.rig
    for t in sc.schedule().times:
        target = sc.pose(t).position + rig.look_at_offset
        dist = np.linalg.norm(target - rig.center)
        bound = math.atan2(rig.ipd / 2, dist)
        for cam in sc.cameras(t):
            px, z = cam.project(target)
            assert z > 0
            assert abs(math.atan((px[0] - cam.width / 2) / cam.focal)) == pytest.approx(bound, abs=1e-9)
            assert px[1] == pytest.approx(cam.height / 2, abs=1e-6)
