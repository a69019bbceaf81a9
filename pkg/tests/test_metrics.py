import numpy as np
import pytest

from polarlens.errors import MetricError
from polarlens.models.stokes import IDENTICAL
from polarlens.utils.metrics import SSIM_K1, evaluate_against_reference, psnr, ssim


def test_psnr_identical_sentinel(rng):
    image = rng.uniform(size=(4, 4))
    assert psnr(image, image, 1.0) == IDENTICAL


def test_psnr_full_range_error_is_zero_db():
    assert psnr(np.full((3, 3), 2.0), np.zeros((3, 3)), 2.0) == pytest.approx(0.0)


def test_psnr_hand_computed():
    ref = np.arange(9, dtype=np.float64).reshape(3, 3) / 10.0
    diff = np.array([[0.1, -0.1, 0.0], [0.0, 0.2, 0.0], [0.0, 0.0, -0.2]])
    # MSE = (0.01 + 0.01 + 0.04 + 0.04) / 9
    assert psnr(ref + diff, ref, 1.0) == pytest.approx(10.0 * np.log10(90.0))


def test_psnr_validates_inputs():
    with pytest.raises(MetricError):
        psnr(np.zeros((3, 3)), np.zeros((3, 4)), 1.0)
    with pytest.raises(MetricError):
        psnr(np.zeros((3, 3)), np.ones((3, 3)), 0.0)


def test_ssim_identity(rng):
    image = rng.uniform(size=(32, 32))
    assert ssim(image, image, 1.0) == pytest.approx(1.0)


def test_ssim_constant_shift_is_the_luminance_term():
    ref = np.full((32, 32), 0.5)
    c1 = (SSIM_K1 * 1.0) ** 2
    expected = (2 * 0.5 * 0.6 + c1) / (0.5 ** 2 + 0.6 ** 2 + c1)
    assert ssim(ref + 0.1, ref, 1.0) == pytest.approx(expected, rel=1e-9)


def test_ssim_anticorrelated_checkerboard_is_negative():
    board = 0.5 * (np.indices((32, 32)).sum(axis=0) % 2 * 2 - 1)
    assert ssim(board, -board, 1.0) < 0.0


def test_ssim_is_symmetric(rng):
    a = rng.uniform(size=(24, 24))
    b = np.clip(a + rng.normal(0.0, 0.1, size=a.shape), 0, 1)
    assert ssim(a, b, 1.0) == pytest.approx(ssim(b, a, 1.0))


def test_ssim_color_channels_are_averaged(rng):
    a = rng.uniform(size=(16, 16, 3))
    b = rng.uniform(size=(16, 16, 3))
    per_channel = [ssim(a[:, :, c], b[:, :, c], 1.0) for c in range(3)]
    assert ssim(a, b, 1.0) == pytest.approx(np.mean(per_channel))


def test_ssim_window_checks():
    with pytest.raises(MetricError):
        ssim(np.zeros((8, 8)), np.zeros((8, 8)), 1.0)
    with pytest.raises(MetricError):
        ssim(np.zeros((16, 16)), np.zeros((16, 16)), 1.0, window=10)


def test_report_for_identical_scenes(rng):
    scene = rng.uniform(size=(16, 16, 1, 4))
    report = evaluate_against_reference(scene, scene)
    assert report.psnr_db == [IDENTICAL] * 4
    assert report.mean_psnr == IDENTICAL
    assert report.mean_ssim == pytest.approx(1.0)


def test_report_mean_is_the_channel_average(rng):
    truth = rng.uniform(size=(16, 16, 2, 4))
    estimate = truth + rng.normal(0.0, 0.05, size=truth.shape)
    report = evaluate_against_reference(estimate, truth, 'no-mask')
    assert report.mean_psnr == np.mean(report.psnr_db)
    assert report.mean_ssim == np.mean(report.ssim)
    rows = list(report.rows(scene_id='s'))
    assert [row['channel'] for row in rows] == ['I0', 'I45', 'I90', 'I135', 'mean']
    assert {row['reference'] for row in rows} == {'no-mask'}
    assert all(-1.0 <= row['ssim'] <= 1.0 for row in rows)


def test_report_normalizes_by_the_reference_peak(rng):
    truth = rng.uniform(size=(16, 16, 1, 4))
    estimate = truth + rng.normal(0.0, 0.05, size=truth.shape)
    base = evaluate_against_reference(estimate, truth)
    scaled = evaluate_against_reference(4.0 * estimate, 4.0 * truth)
    assert scaled.psnr_db == pytest.approx(base.psnr_db)
    assert scaled.ssim == pytest.approx(base.ssim)


def test_psnr_depends_on_which_side_is_the_reference(rng):
    truth = rng.uniform(0.0, 1.0, size=(16, 16, 1, 4))
    estimate = 0.5 * truth
    forward = evaluate_against_reference(estimate, truth)
    backward = evaluate_against_reference(truth, estimate)
    assert forward.mean_psnr != pytest.approx(backward.mean_psnr)


def test_zero_reference_is_rejected():
    with pytest.raises(MetricError):
        evaluate_against_reference(np.ones((16, 16, 1, 4)), np.zeros((16, 16, 1, 4)))
