"""Repeated-interaction dynamics of the persistent S1-S2-S3-A register.

Each round attaches a fresh hot ancilla to S1, runs the internal chain and
HSE collisions, and ends with a fresh cold ancilla colliding with S3. Every
ancilla is appended as the last tensor factor, evolved and traced out within
its own step, so the working dimension never exceeds 32.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import qcore
from .errors import ConfigError, NumericalIntegrityError
from .model import ModelConfig, build_unitaries, free_hamiltonian, hse_ancilla, thermal_qubit

log = logging.getLogger(__name__)

S1, S2, S3, A = 0, 1, 2, 3
REG_DIMS = [2, 2, 2, 2]
FULL_DIMS = [2, 2, 2, 2, 2]
ANC = 4
STEP_NAMES = ("hot", "s12", "sa", "ab", "s23", "cold")


@dataclass(frozen=True)
class SteadyStateCriterion:
    rel_tol: float = 1e-8
    window: int = 100
    max_rounds: int = 1_000_000
    # flux-noise floor: rounding leaves |J_n| ~ 1e-14 when no heat flows
    abs_tol: float = 1e-12

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ConfigError(f"field 'rel_tol' must be > 0, got {self.rel_tol}")
        if isinstance(self.window, bool) or int(self.window) != self.window or self.window < 2:
            raise ConfigError(f"field 'window' must be an integer >= 2, got {self.window}")
        if int(self.max_rounds) != self.max_rounds or self.max_rounds < 1:
            raise ConfigError(f"field 'max_rounds' must be a positive integer, got {self.max_rounds}")
        object.__setattr__(self, "window", int(self.window))
        object.__setattr__(self, "max_rounds", int(self.max_rounds))
        if not self.abs_tol >= 0:
            raise ConfigError(f"field 'abs_tol' must be >= 0, got {self.abs_tol}")
        object.__setattr__(self, "rel_tol", float(self.rel_tol))
        object.__setattr__(self, "abs_tol", float(self.abs_tol))

    def plateau(self, j: float, prev: float, drift: float = 0.0) -> bool:
        """Flux ``j`` has settled and the register energy drift rate is negligible.

        ``drift`` is the register energy change of the round divided by t_c;
        it catches slow modes (e.g. a weakly fed HSE) the cold flux barely sees.
        """
        tol = max(self.rel_tol * max(abs(j), 1e-15), self.abs_tol)
        return abs(j - prev) <= tol and abs(drift) <= tol


@dataclass(frozen=True)
class RegisterState:
    rho: np.ndarray
    round: int = 0


@dataclass(frozen=True)
class CollisionRecord:
    """Heat bookkeeping of one round.

    ``dQ_hot`` is positive when the hot ancilla loses energy, ``dQ_cold``
    positive when the cold ancilla gains it. ``dQ_hse`` is the energy the B
    ancilla hands to A; it vanishes for incoherent (p = 0) B qubits.
    """

    n: int
    dQ_cold: float
    dQ_hot: float
    dQ_hse: float
    J_n: float
    E_register: float


@dataclass
class CollisionKit:
    """Everything a round needs, precomputed once per configuration."""

    cfg: ModelConfig
    u_hot: np.ndarray
    u_s12: np.ndarray
    u_sa: np.ndarray
    u_ab: np.ndarray
    u_s23: np.ndarray
    u_cold: np.ndarray
    rho_hot: np.ndarray
    rho_cold: np.ndarray
    rho_b: np.ndarray
    h0: np.ndarray
    h0_register_diag: np.ndarray = field(repr=False)

    @classmethod
    def from_config(cls, cfg: ModelConfig) -> "CollisionKit":
        u = build_unitaries(cfg)
        h0 = free_hamiltonian(cfg.omega)
        h0_reg = sum(
            qcore.kron(*[h0 if k == j else qcore.I2 for k in range(4)]) for j in range(4)
        )
        return cls(
            cfg=cfg,
            u_hot=qcore.embed(u.hot, FULL_DIMS, (S1, ANC)),
            u_s12=qcore.embed(u.s12, REG_DIMS, (S1, S2)),
            u_sa=qcore.embed(u.sa, REG_DIMS, (S2, A)),
            u_ab=qcore.embed(u.ab, FULL_DIMS, (A, ANC)),
            u_s23=qcore.embed(u.s23, REG_DIMS, (S2, S3)),
            u_cold=qcore.embed(u.cold, FULL_DIMS, (S3, ANC)),
            rho_hot=thermal_qubit(cfg.omega, cfg.Th),
            rho_cold=thermal_qubit(cfg.omega, cfg.Tc),
            rho_b=hse_ancilla(cfg.omega, cfg.Tc, cfg.p),
            h0=h0,
            h0_register_diag=np.real(np.diag(h0_reg)).copy(),
        )

    def qubit_energy(self, rho2: np.ndarray) -> float:
        return 0.5 * self.cfg.omega * float(rho2[0, 0].real - rho2[1, 1].real)

    def register_energy(self, rho: np.ndarray) -> float:
        return float(self.h0_register_diag @ np.real(np.diag(rho)))


def initial_register(cfg: ModelConfig) -> RegisterState:
    """All four register qubits thermal at the cold temperature."""
    th = thermal_qubit(cfg.omega, cfg.Tc)
    return RegisterState(qcore.kron(th, th, th, th), 0)


def _collide(rho: np.ndarray, u: np.ndarray, anc: np.ndarray):
    big = np.kron(rho, anc)
    big = u @ big @ u.conj().T
    t = big.reshape(16, 2, 16, 2)
    return np.einsum("iaja->ij", t), np.einsum("iaib->ab", t)


def _local_energy(kit: CollisionKit, rho: np.ndarray, qubit: int) -> float:
    d = np.real(np.diag(rho)).reshape(REG_DIMS)
    marg = d.sum(axis=tuple(k for k in range(4) if k != qubit))
    return 0.5 * kit.cfg.omega * float(marg[0] - marg[1])


def _round_linear(rho: np.ndarray, kit: CollisionKit, on_step=None):
    """One round as a complex-linear map of ``rho`` (no normalisation, no checks).

    Heats are linear functionals too: the fresh ancilla's energy before the
    collision is weighted by Tr(rho), which is 1 for physical states.
    """
    w = 0.5 * kit.cfg.omega

    def e(r2):
        return w * (r2[0, 0] - r2[1, 1])

    tr = np.trace(rho)
    rho, hot_after = _collide(rho, kit.u_hot, kit.rho_hot)
    dq_hot = tr * e(kit.rho_hot) - e(hot_after)
    if on_step:
        on_step("hot", rho)
    rho = kit.u_s12 @ rho @ kit.u_s12.conj().T
    if on_step:
        on_step("s12", rho)
    rho = kit.u_sa @ rho @ kit.u_sa.conj().T
    if on_step:
        on_step("sa", rho)
    rho, b_after = _collide(rho, kit.u_ab, kit.rho_b)
    dq_hse = tr * e(kit.rho_b) - e(b_after)
    if on_step:
        on_step("ab", rho)
    rho = kit.u_s23 @ rho @ kit.u_s23.conj().T
    if on_step:
        on_step("s23", rho)
    rho, cold_after = _collide(rho, kit.u_cold, kit.rho_cold)
    dq_cold = e(cold_after) - tr * e(kit.rho_cold)
    if on_step:
        on_step("cold", rho)
    return rho, dq_hot, dq_hse, dq_cold


def _normalise(rho: np.ndarray) -> np.ndarray:
    # rounding drift of trace/hermiticity compounds over 1e5+ rounds
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def collision_round(
    state: RegisterState,
    kit: CollisionKit,
    check: bool = True,
    on_step: Optional[Callable[[str, np.ndarray], None]] = None,
) -> tuple[RegisterState, CollisionRecord]:
    """Run the six collisions of one round and account the exchanged heat.

    With ``check`` set this also asserts, to 1e-12, that the dephasing step
    leaves the energies of S2 and A untouched, that the A-B collision
    conserves their summed energy, and that the register keeps unit trace and
    hermiticity (positivity is checked by :func:`run` at a stride). Failures
    raise :class:`NumericalIntegrityError`. ``on_step(name, rho)`` sees the
    register after each step.
    """
    snap = {}

    def hook(name, rho):
        if check:
            snap[name] = (_local_energy(kit, rho, S2), _local_energy(kit, rho, A))
        if on_step:
            on_step(name, rho)

    rho, dq_hot, dq_hse, dq_cold = _round_linear(state.rho, kit, hook)
    dq_hot, dq_hse, dq_cold = float(dq_hot.real), float(dq_hse.real), float(dq_cold.real)
    n = state.round + 1
    if check:
        drift = max(abs(snap["sa"][0] - snap["s12"][0]), abs(snap["sa"][1] - snap["s12"][1]))
        if drift > 1e-12:
            raise NumericalIntegrityError(f"round {n}: dephasing step moved energy by {drift:.3e}")
        drift = abs(snap["ab"][1] - snap["sa"][1] - dq_hse)
        if drift > 1e-12:
            raise NumericalIntegrityError(f"round {n}: A-B collision leaked energy {drift:.3e}")
        bad = qcore.density_violations(rho, psd=False)
        if bad:
            raise NumericalIntegrityError(f"round {n}: " + "; ".join(bad))
    rho = _normalise(rho)
    rec = CollisionRecord(
        n=n,
        dQ_cold=dq_cold,
        dQ_hot=dq_hot,
        dQ_hse=dq_hse,
        J_n=dq_cold / kit.cfg.tc,
        E_register=kit.register_energy(rho),
    )
    return RegisterState(rho, n), rec


@dataclass(frozen=True)
class RoundMap:
    """A full round as a superoperator on row-major vec(rho).

    ``heat`` rows are the linear functionals (dQ_hot, dQ_hse, dQ_cold) of
    the pre-round state; ``energy`` gives the register free energy.
    """

    superop: np.ndarray
    heat: np.ndarray
    energy: np.ndarray

    @classmethod
    def from_kit(cls, kit: CollisionKit) -> "RoundMap":
        d = 16
        L = np.empty((d * d, d * d), dtype=complex)
        F = np.empty((3, d * d), dtype=complex)
        basis = np.zeros((d, d), dtype=complex)
        for k in range(d * d):
            basis.flat[k] = 1.0
            out, h, b, c = _round_linear(basis, kit)
            basis.flat[k] = 0.0
            L[:, k] = out.reshape(-1)
            F[:, k] = (h, b, c)
        energy = np.zeros(d * d)
        energy[:: d + 1] = kit.h0_register_diag
        return cls(L, F, energy)


@dataclass
class Trajectory:
    """Per-round series of a run, stored column-wise."""

    cfg: ModelConfig
    criterion: SteadyStateCriterion
    n: np.ndarray
    dQ_cold: np.ndarray
    dQ_hot: np.ndarray
    dQ_hse: np.ndarray
    J: np.ndarray
    E_register: np.ndarray
    E_initial: float
    steady: bool
    J_ss: float
    final_state: RegisterState

    @property
    def rounds(self) -> int:
        return len(self.n)

    @property
    def converged(self) -> bool:
        return self.steady

    @property
    def records(self) -> list[CollisionRecord]:
        return [
            CollisionRecord(int(k), float(c), float(h), float(b), float(j), float(e))
            for k, c, h, b, j, e in zip(
                self.n, self.dQ_cold, self.dQ_hot, self.dQ_hse, self.J, self.E_register
            )
        ]

    def window_means(self) -> dict:
        w = min(self.criterion.window, self.rounds)
        tc = self.cfg.tc
        return {
            "J_cold": float(self.dQ_cold[-w:].mean() / tc),
            "J_hot": float(self.dQ_hot[-w:].mean() / tc),
            "J_hse": float(self.dQ_hse[-w:].mean() / tc),
        }


def run(
    cfg: ModelConfig,
    crit: SteadyStateCriterion = SteadyStateCriterion(),
    check: bool = True,
    psd_every: int = 1000,
    stepwise: bool = False,
) -> Trajectory:
    """Iterate rounds from the all-thermal initial register until J_n plateaus.

    The plateau test is ``|J_n - J_{n-1}| <= tol`` with
    ``tol = max(rel_tol * max(|J_n|, 1e-15), abs_tol)``, together with
    ``|E_reg(n) - E_reg(n-1)| / t_c <= tol``, holding for ``window``
    consecutive rounds; ``J_ss`` is the mean over that
    window. Reaching ``max_rounds`` first returns ``steady=False`` with the
    last-window mean.

    By default each round is one product with the precomputed round
    superoperator. ``stepwise=True`` instead executes the six collisions
    explicitly through :func:`collision_round` (slower, with per-step checks).
    """
    kit = CollisionKit.from_config(cfg)
    state = initial_register(cfg)
    e0 = kit.register_energy(state.rho)
    cols = np.empty((5, min(crit.max_rounds, 65536)))
    if not stepwise:
        rmap = RoundMap.from_kit(kit)
        L, F, Ev = rmap.superop, rmap.heat, rmap.energy
        vec = state.rho.reshape(-1).copy()
        diag = np.arange(0, 256, 17)
    streak = 0
    prev_j = None
    steady = False
    n = 0
    while n < crit.max_rounds:
        if n == cols.shape[1]:
            cols = np.concatenate([cols, np.empty_like(cols)], axis=1)
        if stepwise:
            state, rec = collision_round(state, kit, check=check)
            row = (rec.dQ_cold, rec.dQ_hot, rec.dQ_hse, rec.J_n, rec.E_register)
            n = rec.n
        else:
            dq_hot, dq_hse, dq_cold = (F @ vec).real
            vec = L @ vec
            m = vec.reshape(16, 16)
            if check:
                tr_err = abs(vec[diag].sum() - 1)
                herm = np.max(np.abs(m - m.conj().T))
                if tr_err > qcore.TRACE_TOL or herm > qcore.HERM_TOL:
                    raise NumericalIntegrityError(
                        f"round {n + 1}: trace error {tr_err:.3e}, hermiticity defect {herm:.3e}"
                    )
            vec = _normalise(m).reshape(-1)
            n += 1
            row = (dq_cold, dq_hot, dq_hse, dq_cold / cfg.tc, float(Ev @ vec.real))
            if check and psd_every and n % psd_every == 0:
                _check_psd(RegisterState(vec.reshape(16, 16), n))
        cols[:, n - 1] = row
        j = row[3]
        drift = (row[4] - (cols[4, n - 2] if n > 1 else e0)) / cfg.tc
        if prev_j is not None and crit.plateau(j, prev_j, drift):
            streak += 1
        else:
            streak = 0
        prev_j = j
        if streak >= crit.window:
            steady = True
            break
    if not stepwise:
        state = RegisterState(vec.reshape(16, 16), n)
    if check:
        _check_psd(state)

    cols = cols[:, :n]
    w = min(crit.window, n)
    traj = Trajectory(
        cfg=cfg,
        criterion=crit,
        n=np.arange(1, n + 1),
        dQ_cold=cols[0].copy(),
        dQ_hot=cols[1].copy(),
        dQ_hse=cols[2].copy(),
        J=cols[3].copy(),
        E_register=cols[4].copy(),
        E_initial=e0,
        steady=steady,
        J_ss=float(cols[3, -w:].mean()),
        final_state=state,
    )
    if not steady:
        log.warning("no steady state after %d rounds (J=%.6g)", traj.rounds, traj.J_ss)
    else:
        log.debug("steady after %d rounds, J_ss=%.12g", traj.rounds, traj.J_ss)
    return traj


def _check_psd(state: RegisterState) -> None:
    bad = qcore.density_violations(state.rho)
    if bad:
        raise NumericalIntegrityError(f"round {state.round}: " + "; ".join(bad))


def energy_balance(traj: Trajectory) -> np.ndarray:
    """Per-round residual of the free-energy ledger.

    r_n = [E_reg(n) - E_reg(n-1)] - [dQ_hot(n) - dQ_cold(n) + dQ_hse(n)],
    zero up to rounding because every collision conserves the free energy of
    its pair.
    """
    if traj.rounds < 1:
        raise ConfigError("energy_balance needs at least one round")
    e = np.concatenate([[traj.E_initial], traj.E_register])
    return np.diff(e) - (traj.dQ_hot - traj.dQ_cold + traj.dQ_hse)


@dataclass(frozen=True)
class RunHandle:
    """Picklable unit of work for process pools."""

    cfg: ModelConfig
    crit: SteadyStateCriterion = SteadyStateCriterion()

    def __call__(self) -> Trajectory:
        return run(self.cfg, self.crit)
