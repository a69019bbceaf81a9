import numpy as np
import pytest

from oracles import dense_ridge
from polarlens.errors import DimensionError, SolverError
from polarlens.models.masks import MaskMaps
from polarlens.models.optics import ConvMode, PsfStack
from polarlens.models.solver import SOLVER_PRESETS, AdmmState, SolverConfig
from polarlens.utils import admm
from polarlens.utils.admm import admm_reconstruct, admm_step, reconstruct_no_mask_reference
from polarlens.utils.forward_model import ForwardOperator


def _delta_dominant_psf(rng, channels=1):
    kernels = 0.05 * rng.uniform(size=(3, 3, channels))
    kernels[1, 1, :] = 1.0
    return PsfStack(kernels)


def test_identity_operator_recovers_measurement(rng):
    x_true = rng.uniform(0.1, 1.0, size=(6, 5, 2, 1))
    op = ForwardOperator(PsfStack.delta(1, 2), MaskMaps.uniform((6, 5)), x_true.shape)
    y = op.forward(x_true)
    cfg = SolverConfig(rho=1.0, lam=0.0, nonneg=False, admm_iters=50)
    estimate, history = admm_reconstruct(op, y, cfg)
    assert np.linalg.norm(estimate - x_true) / np.linalg.norm(x_true) < 1e-3
    assert len(history) == 50


def test_least_squares_limit_matches_dense_ridge(rng):
    cfg = SolverConfig(rho=1e-3, lam=0.0, nonneg=False, admm_iters=60, cg_tol=1e-12, cg_max_iters=200,
                       conv_mode=ConvMode.CIRCULAR)
    for _ in range(20):
        psf = _delta_dominant_psf(rng)
        mask = MaskMaps(rng.uniform(0.2, 1.0, size=(6, 6, 2)), 'perturbed')
        op = ForwardOperator(psf, mask, (6, 6, 1, 2), ConvMode.CIRCULAR)
        y = rng.normal(size=(6, 6, 1))
        estimate, _ = admm_reconstruct(op, y, cfg)
        expected = dense_ridge(op, y, delta=1e-9)
        assert np.linalg.norm(estimate - expected) <= 1e-4 * np.linalg.norm(expected)


def test_v_update_satisfies_normal_equations(rng):
    psf = _delta_dominant_psf(rng)
    mask = MaskMaps(rng.uniform(0.2, 1.0, size=(6, 6, 2)), 'perturbed')
    op = ForwardOperator(psf, mask, (6, 6, 1, 2))
    y = rng.normal(size=(6, 6, 1))
    cfg = SolverConfig(rho=0.5, lam=0.0, nonneg=False, cg_tol=1e-6)
    aty = op.adjoint(y)
    state = AdmmState.zeros(op.scene_shape)
    for _ in range(5):
        rhs = aty + cfg.rho * (state.z - state.u)
        admm_step(op, y, aty, state, cfg)
        residual = np.linalg.norm(op.gram(state.v, cfg.rho) - rhs) / np.linalg.norm(rhs)
        assert residual <= 1.5 * cfg.cg_tol


def _matched_problem(rng, size=24):
    x_true = np.zeros((size, size, 1, 4))
    x_true[4:14, 6:18] = rng.uniform(0.2, 1.0, size=4)
    x_true[15:22, 2:10] = rng.uniform(0.2, 1.0, size=4)
    kernels = np.zeros((size, size, 1))
    kernels[rng.integers(0, size, 20), rng.integers(0, size, 20), 0] = rng.uniform(size=20)
    psf = PsfStack(kernels)
    index = (np.arange(size) // 3) % 4
    maps = np.stack([(index == p).astype(float) for p in range(4)], axis=1)
    mask = MaskMaps(np.broadcast_to(maps[None], (size, size, 4)), 'ideal-indicator')
    return x_true, psf, mask


def test_iterates_stay_nonnegative_and_converge(rng):
    x_true, psf, mask = _matched_problem(rng)
    op = ForwardOperator(psf, mask, x_true.shape)
    y = op.forward(x_true)
    minima = []
    estimate, history = admm_reconstruct(op, y, SolverConfig.preset('matched_sim', admm_iters=20),
                                         callback=lambda state: minima.append(state.z.min()))
    assert len(minima) == 20
    assert min(minima) >= 0.0
    assert estimate.min() >= 0.0
    assert history.primal_residual[-1] < history.primal_residual[0]
    assert history.data_fidelity[-1] < np.linalg.norm(y)


def test_runs_are_bitwise_reproducible(rng):
    x_true, psf, mask = _matched_problem(rng, size=16)
    op = ForwardOperator(psf, mask, x_true.shape)
    y = op.forward(x_true)
    cfg = SolverConfig.preset('matched_sim', admm_iters=8)
    first, history_a = admm_reconstruct(op, y, cfg)
    second, history_b = admm_reconstruct(op, y, cfg)
    assert np.array_equal(first, second)
    assert history_a.primal_residual == history_b.primal_residual


def test_unit_sum_psf_is_flagged_as_weak_data(rng, caplog):
    x_true, psf, mask = _matched_problem(rng, size=16)
    cfg = SolverConfig.preset('matched_sim', admm_iters=2)
    weak = PsfStack(psf.kernels / psf.kernels.sum())
    for kernels, flagged in ((psf, False), (weak, True)):
        caplog.clear()
        op = ForwardOperator(kernels, mask, x_true.shape)
        with caplog.at_level('WARNING', logger='polarlens.utils.admm'):
            _, history = admm_reconstruct(op, op.forward(x_true), cfg)
        assert (history.data_curvature < admm.WEAK_DATA_RATIO * cfg.rho) is flagged
        assert ('data curvature' in caplog.text) is flagged
        assert history.summary()['data_curvature'] == history.data_curvature


def test_empty_measurement_has_no_data_curvature():
    op = ForwardOperator(PsfStack.delta(1, 1), MaskMaps.uniform((4, 4)), (4, 4, 1, 1))
    assert admm.data_curvature(op, np.zeros((4, 4, 1, 1))) == 0.0
    assert admm.data_curvature(op, np.ones((4, 4, 1, 1))) == pytest.approx(1.0)


def test_measurement_extent_is_checked(rng):
    x_true, psf, mask = _matched_problem(rng, size=16)
    op = ForwardOperator(psf, mask, x_true.shape)
    with pytest.raises(DimensionError):
        admm_reconstruct(op, np.zeros((16, 15, 1)))


def test_cg_breakdown_reports_admm_iteration(rng, monkeypatch):
    op = ForwardOperator(PsfStack.delta(1, 1), MaskMaps.uniform((4, 4)), (4, 4, 1, 1))

    def broken(*args, **kwargs):
        raise SolverError('CG direction with non-positive curvature', iteration=1)

    monkeypatch.setattr(admm, 'cg_solve', broken)
    with pytest.raises(SolverError) as info:
        admm_reconstruct(op, np.ones((4, 4, 1)), SolverConfig(admm_iters=3))
    assert info.value.iteration == 1


def test_solver_presets_are_verbatim():
    real = SolverConfig.preset('real')
    assert (real.rho, real.lam, real.lambda_w, real.tv_dims) == (21.0, 0.5, 0.5, '4d')
    sim = SolverConfig.preset('matched_sim')
    assert (sim.rho, sim.lam, sim.lambda_w) == (21.0, 5e-4, 5e-4)
    ref = SolverConfig.preset('no_mask')
    assert (ref.rho, ref.lam, ref.lambda_w, ref.tv_dims) == (1.0, 0.5, 0.5, '3d')
    for name in SOLVER_PRESETS:
        cfg = SolverConfig.preset(name)
        assert (cfg.admm_iters, cfg.cg_tol, cfg.cg_max_iters) == (50, 1e-4, 100)
    with pytest.raises(KeyError):
        SolverConfig.preset('fast')


def test_noise_sigma_folds_into_lambda():
    cfg = SolverConfig(rho=2.0, lam=0.5, noise_sigma=2.0)
    assert cfg.effective_lambda == pytest.approx(2.0)
    assert cfg.threshold == pytest.approx(1.0)


def test_config_hash_tracks_every_field():
    base = SolverConfig.preset('matched_sim')
    assert base.config_hash() == SolverConfig.preset('matched_sim').config_hash()
    assert base.config_hash() != SolverConfig.preset('matched_sim', rho=20.0).config_hash()


def test_config_rejects_invalid_values():
    with pytest.raises(ValueError):
        SolverConfig(rho=0.0)
    with pytest.raises(ValueError):
        SolverConfig(admm_iters=0)


def test_no_mask_reference_with_delta_psf_returns_inputs(rng):
    y_per_angle = rng.uniform(0.1, 1.0, size=(6, 6, 2, 4))
    cfg = SolverConfig.preset('no_mask', **{'lambda': 0.0})
    reference = reconstruct_no_mask_reference(PsfStack.delta(1, 2), y_per_angle, cfg)
    assert reference.shape == y_per_angle.shape
    np.testing.assert_allclose(reference, y_per_angle, rtol=1e-6)


def test_no_mask_reference_reduces_data_residual(rng):
    x_true, psf, _ = _matched_problem(rng, size=16)
    op = ForwardOperator(psf, MaskMaps.uniform((16, 16), 4), x_true.shape)
    per_angle = op.convolve(x_true)
    reference = reconstruct_no_mask_reference(psf, per_angle, SolverConfig.preset('no_mask', admm_iters=10))
    for p in range(4):
        single = ForwardOperator(psf, MaskMaps.uniform((16, 16)), (16, 16, 1, 1))
        residual = np.linalg.norm(single.forward(reference[:, :, :, p:p + 1]) - per_angle[:, :, :, p])
        assert residual < np.linalg.norm(per_angle[:, :, :, p])


def test_no_mask_reference_needs_a_stack(rng):
    with pytest.raises(DimensionError):
        reconstruct_no_mask_reference(PsfStack.delta(1, 1), rng.uniform(size=(4, 4, 1)))
