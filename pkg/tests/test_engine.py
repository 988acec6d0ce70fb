import math
import pickle

import numpy as np
import pytest

from collisionflux import qcore
from collisionflux.engine import (
    CollisionKit,
    RoundMap,
    RunHandle,
    SteadyStateCriterion,
    collision_round,
    energy_balance,
    initial_register,
    run,
)
from collisionflux.errors import ConfigError, NumericalIntegrityError
from collisionflux.model import ModelConfig

import reference

SHORT = SteadyStateCriterion(max_rounds=400)
ZERO = dict(g12=0.0, g23=0.0, gh=0.0, gc=0.0, ga=0.0, gb=0.0)


def test_criterion_validation():
    with pytest.raises(ConfigError):
        SteadyStateCriterion(rel_tol=0)
    with pytest.raises(ConfigError):
        SteadyStateCriterion(window=1)
    with pytest.raises(ConfigError):
        SteadyStateCriterion(max_rounds=0)


def test_plateau_requires_flux_and_energy_to_settle():
    crit = SteadyStateCriterion(rel_tol=1e-8, abs_tol=1e-12)
    assert crit.plateau(0.5, 0.5)
    assert not crit.plateau(0.5, 0.5 + 1e-6)
    assert not crit.plateau(0.5, 0.5, drift=1e-6)
    assert crit.plateau(0.0, 1e-13, drift=-1e-13)


def test_steady_register_is_stationary():
    # weak gb with coherent B: A relaxes slowly while J_cold looks flat early
    cfg = ModelConfig(g12=45.86, g23=31.46, gh=25.71, gc=24.84, ga=12.38, gb=0.59,
                      Th=2.85, Tc=0.546, p=0.692)
    tr = run(cfg, SteadyStateCriterion())
    assert tr.steady
    w = 100
    gap = tr.dQ_hot[-w:].mean() + tr.dQ_hse[-w:].mean() - tr.dQ_cold[-w:].mean()
    assert abs(gap) <= 1e-8


def test_zero_couplings_leave_register_alone():
    cfg = ModelConfig(**ZERO, p=0.7)
    kit = CollisionKit.from_config(cfg)
    st0 = initial_register(cfg)
    st, rec = collision_round(st0, kit)
    assert np.allclose(st.rho, st0.rho, atol=1e-16)
    # only the Tr(rho) = 1 - O(eps) of the kron'd initial state remains
    assert max(abs(rec.dQ_cold), abs(rec.dQ_hot), abs(rec.dQ_hse)) <= 1e-16
    assert st.round == 1
    tr = run(cfg, SteadyStateCriterion(max_rounds=50))
    assert np.all(tr.J == 0) and np.all(tr.dQ_hot == 0) and np.all(tr.dQ_hse == 0)


def test_single_round_matches_partial_swap():
    cfg = ModelConfig(g12=0, g23=0, ga=0, gb=0, gh=7.5, gc=7.5, Th=10.0, Tc=1.0)
    st, rec = collision_round(initial_register(cfg), CollisionKit.from_config(cfg))
    # frozen from a standalone two-qubit scipy.linalg.expm computation
    assert rec.dQ_hot == pytest.approx(0.001157024711111565, abs=1e-15)
    pe_h = 1 / (1 + math.exp(1 / 10.0))
    pe_s = 1 / (1 + math.exp(1 / 1.0))
    assert rec.dQ_hot == pytest.approx((pe_h - pe_s) * math.sin(0.075) ** 2, abs=1e-15)
    assert abs(rec.dQ_cold) <= 1e-16


def test_equal_temperatures_no_flux():
    cfg = ModelConfig(Th=1.0, Tc=1.0, ga=30.0, gb=20.0, g12=50, g23=25)
    tr = run(cfg, SteadyStateCriterion(max_rounds=3000))
    assert np.max(np.abs(tr.J)) <= 1e-10
    assert np.max(np.abs(tr.dQ_hot)) <= 1e-12
    assert tr.steady


def test_chain_cut_converges_to_zero():
    tr = run(ModelConfig(g12=0, g23=0, ga=20, gb=40))
    assert tr.steady
    assert abs(tr.J_ss) <= 1e-12


def test_ga_zero_matches_bare_chain():
    cfg = ModelConfig(g12=30, g23=15, ga=0.0, gb=40.0, p=0.6)
    ref = reference.chain_fluxes(cfg, 300)
    assert np.max(np.abs(run(cfg, SHORT).J[:300] - ref)) <= 1e-12
    assert np.max(np.abs(run(cfg, SHORT, stepwise=True).J[:300] - ref)) <= 1e-12


def test_superoperator_matches_steps():
    cfg = ModelConfig(g12=30, g23=15, ga=20, gb=40, p=0.8)
    a, b = run(cfg, SHORT), run(cfg, SHORT, stepwise=True)
    for name in ("J", "dQ_hot", "dQ_hse", "E_register"):
        assert np.max(np.abs(getattr(a, name) - getattr(b, name))) <= 1e-12
    assert np.max(np.abs(a.final_state.rho - b.final_state.rho)) <= 1e-12


def test_round_map_is_trace_preserving():
    rmap = RoundMap.from_kit(CollisionKit.from_config(ModelConfig(ga=40, gb=30, p=1.0)))
    trace_row = np.eye(16).reshape(-1)
    assert np.max(np.abs(trace_row @ rmap.superop - trace_row)) <= 1e-13


def test_step_energy_isolation():
    cfg = ModelConfig(g12=50, g23=25, ga=40, gb=30, p=1.0)
    kit = CollisionKit.from_config(cfg)
    seen = {}

    def on_step(name, rho):
        seen[name] = rho

    st = initial_register(cfg)
    h0 = kit.h0
    local = {q: qcore.kron(*[h0 if k == q else qcore.I2 for k in range(4)]) for q in range(4)}
    for _ in range(200):
        st, rec = collision_round(st, kit, on_step=on_step)
        for q in (1, 3):
            before = qcore.expectation(local[q], seen["s12"])
            after = qcore.expectation(local[q], seen["sa"])
            assert abs(after - before) <= 1e-12
        gain_a = qcore.expectation(local[3], seen["ab"]) - qcore.expectation(local[3], seen["sa"])
        assert abs(gain_a - rec.dQ_hse) <= 1e-12


def test_hse_exchanges_no_energy_without_coherence():
    tr = run(ModelConfig(g12=50, g23=25, ga=40, gb=30, p=0.0), SHORT)
    assert np.max(np.abs(tr.dQ_hse)) <= 1e-15


def test_register_stays_physical():
    cfg = ModelConfig(g12=50, g23=25, ga=40, gb=40, p=1.0)
    tr = run(cfg, SteadyStateCriterion(max_rounds=2000), psd_every=100)
    assert qcore.density_violations(tr.final_state.rho) == []
    assert np.all(np.abs(tr.E_register) <= 2.0)


def test_hse_enhances_fig2a_flux():
    base = ModelConfig(g12=30, g23=15, ga=0, gb=40)
    assert run(base.replace(ga=20)).J_ss > run(base).J_ss


def test_nonconvergence_is_reported():
    tr = run(ModelConfig(ga=20, gb=40), SteadyStateCriterion(max_rounds=50))
    assert not tr.steady and not tr.converged
    assert tr.rounds == 50
    assert tr.J_ss == pytest.approx(tr.J[-50:].mean())


def test_steady_window_mean():
    tr = run(ModelConfig(ga=20, gb=40))
    assert tr.steady
    assert tr.J_ss == pytest.approx(tr.J[-100:].mean(), rel=0, abs=0)
    assert np.all(np.abs(np.diff(tr.J[-101:])) <= 1e-8 * np.abs(tr.J[-100:]))


def test_deterministic():
    cfg = ModelConfig(ga=12.5, gb=33.0, p=0.3)
    a, b = run(cfg, SHORT), run(cfg, SHORT)
    assert np.array_equal(a.J, b.J) and np.array_equal(a.E_register, b.E_register)


def test_energy_balance_zero_coupling_exact():
    tr = run(ModelConfig(**ZERO), SteadyStateCriterion(max_rounds=20))
    assert np.max(np.abs(energy_balance(tr))) <= 4 * np.spacing(1.0)


def test_energy_balance_with_coherent_hse():
    tr = run(ModelConfig(ga=40, gb=40, p=1.0), SteadyStateCriterion(max_rounds=1500))
    assert np.max(np.abs(energy_balance(tr))) <= 1e-10
    assert np.max(np.abs(tr.dQ_hse)) > 1e-6


def test_records_view():
    tr = run(ModelConfig(ga=20, gb=40), SteadyStateCriterion(max_rounds=5))
    recs = tr.records
    assert [r.n for r in recs] == [1, 2, 3, 4, 5]
    assert recs[-1].J_n == tr.J[-1]


def test_integrity_error_on_broken_unitary():
    cfg = ModelConfig(ga=20, gb=40)
    kit = CollisionKit.from_config(cfg)
    kit.u_s12 = 1.001 * kit.u_s12
    with pytest.raises(NumericalIntegrityError):
        collision_round(initial_register(cfg), kit)


def test_run_handle_pickles():
    h = RunHandle(ModelConfig(ga=5.0), SteadyStateCriterion(max_rounds=10))
    tr = pickle.loads(pickle.dumps(h))()
    assert tr.rounds == 10
