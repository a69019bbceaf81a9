import numpy as np
import pytest
from pydantic import ValidationError

from polarlens.models.scene import SCENE_KINDS, SceneSpec
from polarlens.utils.scenes import synthesize_scene


@pytest.mark.parametrize('kind', SCENE_KINDS)
def test_scenes_are_physical(kind):
    scene = synthesize_scene(SceneSpec(kind=kind, height=32, width=40, seed=4))
    assert scene.shape == (32, 40, 3, 4)
    assert scene.min() >= 0.0
    i0, i45, i90, i135 = (scene[:, :, :, p] for p in range(4))
    np.testing.assert_allclose(i0 + i90, i45 + i135, rtol=0, atol=1e-12)


@pytest.mark.parametrize('kind', SCENE_KINDS)
def test_scenes_are_deterministic(kind):
    spec = SceneSpec(kind=kind, height=24, width=24, seed=9)
    assert np.array_equal(synthesize_scene(spec), synthesize_scene(spec))
    other = synthesize_scene(SceneSpec(kind=kind, height=24, width=24, seed=10))
    assert not np.array_equal(synthesize_scene(spec), other)


def test_two_source_pattern():
    scene = synthesize_scene(SceneSpec(kind='two-source', height=32, width=32, channels=1, seed=2))
    i0, i45, i90, i135 = (scene[:, :, 0, p] for p in range(4))
    s0 = i0 + i90
    np.testing.assert_allclose(i90[:, :16], 0.0, atol=1e-12)
    np.testing.assert_allclose(i0[:, 16:], 0.0, atol=1e-12)
    np.testing.assert_allclose(i0[:, :16], s0[:, :16], atol=1e-12)
    np.testing.assert_allclose(i45, i135, atol=1e-12)
    np.testing.assert_allclose(i45, 0.5 * s0, atol=1e-12)


def test_unpolarized_scene_has_equal_subimages():
    scene = synthesize_scene(SceneSpec(kind='two-source', height=16, width=16, dolp=0.0))
    for p in range(1, 4):
        np.testing.assert_allclose(scene[:, :, :, p], scene[:, :, :, 0], atol=1e-15)


def test_scene_id_and_extent():
    spec = SceneSpec(kind='birefringent-screen', height=20, width=30, seed=5)
    assert spec.scene_id() == 'birefringent-screen-s5'
    assert spec.extent == (20, 30)


def test_dolp_outside_unit_interval_is_rejected():
    with pytest.raises(ValidationError):
        SceneSpec(dolp=1.2)
    with pytest.raises(ValidationError):
        SceneSpec(kind='stars')
