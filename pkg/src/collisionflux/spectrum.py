"""Energy levels of the chain with and without the dephasing HSE coupling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qcore
from .model import ModelConfig, build_hamiltonians, dephasing


@dataclass(frozen=True)
class Levels:
    eigenvalues: np.ndarray
    transition_gaps: np.ndarray
    include_hse: bool
    omega: float = 1.0

    @property
    def min_gap(self) -> float:
        """Smallest transition energy between distinct levels."""
        gaps = self.transition_gaps[self.transition_gaps > 1e-9]
        return float(gaps[0]) if len(gaps) else 0.0

    def bands(self, resolution: float) -> list[np.ndarray]:
        """Group consecutive levels whose spacing is at most ``resolution``."""
        cuts = np.where(np.diff(self.eigenvalues) > resolution)[0] + 1
        return np.split(self.eigenvalues, cuts)

    def band_gaps(self, resolution: float) -> np.ndarray:
        """Spacings between neighbouring bands (top of one to bottom of the next)."""
        b = self.bands(resolution)
        return np.array([b[k + 1][0] - b[k][-1] for k in range(len(b) - 1)])


def static_hamiltonian(cfg: ModelConfig, include_hse: bool, ga: float | None = None) -> np.ndarray:
    """H_sys, or H_sys x I_A + I x H0_A + g_a sz(S2) sz(A) on S1 S2 S3 A.

    ``ga`` overrides ``cfg.ga`` and may be negative.
    """
    hs = build_hamiltonians(cfg)
    if not include_hse:
        return hs.h_sys
    dims = [2, 2, 2, 2]
    return (
        np.kron(hs.h_sys, qcore.I2)
        + qcore.kron(np.eye(8), hs.h_free_qubit)
        + qcore.embed(dephasing(cfg.ga if ga is None else ga), dims, (1, 3))
    )


@dataclass(frozen=True)
class SpectrumReport:
    bare: Levels
    coupled: Levels

    @property
    def eigenvalues_bare(self) -> np.ndarray:
        return self.bare.eigenvalues

    @property
    def eigenvalues_coupled(self) -> np.ndarray:
        return self.coupled.eigenvalues


def system_spectrum(cfg: ModelConfig, include_hse: bool = False) -> Levels:
    """Sorted eigenvalues and pairwise level spacings of the static Hamiltonian."""
    evals = np.linalg.eigvalsh(static_hamiltonian(cfg, include_hse))
    iu = np.triu_indices(len(evals), k=1)
    gaps = np.sort(np.abs(evals[:, None] - evals[None, :])[iu])
    return Levels(evals, gaps, include_hse, cfg.omega)


def spectrum_report(cfg: ModelConfig) -> SpectrumReport:
    return SpectrumReport(system_spectrum(cfg, False), system_spectrum(cfg, True))


def min_band_gap(levels: Levels, resolution: float | None = None) -> float:
    """Smallest inter-band transition energy.

    The free terms split every band by multiples of omega, so by default
    levels within 3 omega of each other count as one band. Returns ``inf``
    when the spectrum is a single band.
    """
    res = 3.0 * levels.omega if resolution is None else resolution
    gaps = levels.band_gaps(res)
    return float(gaps.min()) if len(gaps) else float("inf")
