"""Hamiltonians, collision unitaries and initial states of the qubit network.

The network is a chain S1-S2-S3 between a hot and a cold stream of bath
qubits, plus an interface qubit A dephasingly coupled to S2 and fed by a
stream of (possibly coherent) B qubits. All qubits are resonant at ``omega``.
"""
from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import qcore
from .errors import ConfigError
from .qcore import I2, SM, SP, SZ

COUPLINGS = ("g12", "g23", "gh", "gc", "ga", "gb")


@dataclass(frozen=True)
class ModelConfig:
    """Physical parameters, dimensionless in units of the qubit frequency."""

    omega: float = 1.0
    g12: float = 50.0
    g23: float = 25.0
    gh: float = 7.5
    gc: float = 7.5
    ga: float = 0.0
    gb: float = 0.0
    tc: float = 0.01
    Th: float = 10.0
    Tc: float = 1.0
    p: float = 0.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"field '{f.name}' must be a finite number, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        if self.omega <= 0:
            raise ConfigError(f"field 'omega' must be > 0, got {self.omega}")
        for name in COUPLINGS:
            if getattr(self, name) < 0:
                raise ConfigError(f"field '{name}' must be >= 0, got {getattr(self, name)}")
        if self.tc <= 0:
            raise ConfigError(f"field 'tc' must be > 0, got {self.tc}")
        for name in ("Th", "Tc"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"field '{name}' must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"field 'p' must lie in [0, 1], got {self.p}")
        for name in COUPLINGS:
            if getattr(self, name) * self.tc >= 1.0:
                warnings.warn(
                    f"{name}*tc = {getattr(self, name) * self.tc:g} is not small; "
                    "collisions are no longer brief",
                    stacklevel=3,
                )

    def replace(self, **changes) -> "ModelConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class HamiltonianSet:
    h_free_qubit: np.ndarray
    h_sys: np.ndarray
    h_sa: np.ndarray
    h_ab: np.ndarray
    h_hb: np.ndarray
    h_cb: np.ndarray


@dataclass(frozen=True)
class CollisionUnitaries:
    """One 4x4 unitary per collision step, each acting on an ordered pair.

    hot: (S1, R_h); s12: (S1, S2); sa: (S2, A); ab: (A, B); s23: (S2, S3);
    cold: (S3, R_c).
    """

    hot: np.ndarray
    s12: np.ndarray
    sa: np.ndarray
    ab: np.ndarray
    s23: np.ndarray
    cold: np.ndarray

    def as_tuple(self):
        return (self.hot, self.s12, self.sa, self.ab, self.s23, self.cold)


def free_hamiltonian(omega: float) -> np.ndarray:
    return 0.5 * omega * SZ


def exchange(g: float) -> np.ndarray:
    """g (s+ s- + s- s+) on two qubits."""
    return g * (np.kron(SP, SM) + np.kron(SM, SP))


def dephasing(g: float) -> np.ndarray:
    """g sz sz on two qubits."""
    return g * np.kron(SZ, SZ)


def thermal_populations(omega: float, T: float) -> tuple[float, float]:
    """(excited, ground) Boltzmann populations of a qubit."""
    if not T > 0:
        raise ConfigError(f"temperature must be > 0, got {T}")
    if not omega > 0:
        raise ConfigError(f"omega must be > 0, got {omega}")
    pe = float(expit(-omega / T))
    return pe, 1.0 - pe


def thermal_qubit(omega: float, T: float) -> np.ndarray:
    pe, pg = thermal_populations(omega, T)
    return np.diag([pe, pg]).astype(complex)


def hse_ancilla(omega: float, Tc: float, p: float) -> np.ndarray:
    """Mixture of the thermal state and a pure state with the same populations.

    The pure component has amplitudes ``sqrt(p_excited)`` and ``sqrt(p_ground)``
    (both real and positive), so only the coherences depend on ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"field 'p' must lie in [0, 1], got {p}")
    pe, pg = thermal_populations(omega, Tc)
    psi = np.array([math.sqrt(pe), math.sqrt(pg)], dtype=complex)
    return p * np.outer(psi, psi.conj()) + (1 - p) * thermal_qubit(omega, Tc)


def build_hamiltonians(cfg: ModelConfig) -> HamiltonianSet:
    h0 = free_hamiltonian(cfg.omega)
    dims = [2, 2, 2]
    h_sys = (
        qcore.kron(h0, I2, I2)
        + qcore.kron(I2, h0, I2)
        + qcore.kron(I2, I2, h0)
        + qcore.embed(exchange(cfg.g12), dims, (0, 1))
        + qcore.embed(exchange(cfg.g23), dims, (1, 2))
    )
    return HamiltonianSet(
        h_free_qubit=h0,
        h_sys=h_sys,
        h_sa=dephasing(cfg.ga),
        h_ab=exchange(cfg.gb),
        h_hb=exchange(cfg.gh),
        h_cb=exchange(cfg.gc),
    )


def build_unitaries(cfg: ModelConfig) -> CollisionUnitaries:
    """exp(-i H t_c) of each interaction Hamiltonian; free evolution is not applied."""
    t = cfg.tc
    return CollisionUnitaries(
        hot=qcore.hermitian_expm(exchange(cfg.gh), t),
        s12=qcore.hermitian_expm(exchange(cfg.g12), t),
        sa=qcore.hermitian_expm(dephasing(cfg.ga), t),
        ab=qcore.hermitian_expm(exchange(cfg.gb), t),
        s23=qcore.hermitian_expm(exchange(cfg.g23), t),
        cold=qcore.hermitian_expm(exchange(cfg.gc), t),
    )


def exchange_unitary_closed(g: float, t: float) -> np.ndarray:
    c, s = math.cos(g * t), math.sin(g * t)
    u = np.eye(4, dtype=complex)
    u[1:3, 1:3] = [[c, -1j * s], [-1j * s, c]]
    return u


def dephasing_unitary_closed(g: float, t: float) -> np.ndarray:
    ph = np.exp(-1j * g * t)
    return np.diag([ph, ph.conjugate(), ph.conjugate(), ph])
