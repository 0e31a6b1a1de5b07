"""Closed-form solutions in the excitation-conserving sectors.

These serve as independent references for the numerical integrator and as
fast evaluators for sweeps: the single-excitation manifold for arbitrary N
and couplings, the two-excitation manifold for two atoms, and the peak
entanglement metrics as functions of the coupling ratio alpha.  All forms
are for the resonant rotating-frame Hamiltonian without losses; lossy runs
may use them only as short-time references.
"""

from dataclasses import dataclass

import numpy as np

from . import fockspace as fs
from .fockspace import HilbertLayout


@dataclass(frozen=True)
class CouplingVector:
    """Per-atom couplings g_i (rad/ns) and their quadrature sum."""

    g: tuple

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        if any(x < 0 for x in self.g):
            raise ValueError(f"couplings must be >= 0, got {self.g}")
        if all(x == 0 for x in self.g):
            raise ValueError("all couplings are zero; no collective mode exists")

    @property
    def g_norm(self) -> float:
        """sqrt(sum g_i^2): the collective coupling setting the exchange rate."""
        return float(np.sqrt(sum(x * x for x in self.g)))

    @property
    def n_atoms(self) -> int:
        return len(self.g)


def single_excitation_states(layout: HilbertLayout, gv: CouplingVector):
    """(chi0, chi1) of the one-excitation manifold.

    chi0 = |1, g..g> and chi1 = |0> (x) sum_i (g_i / g_norm) sigma_i^dag |g..g>;
    the initial photon state exchanges with this single collective atomic
    excitation, which for equal couplings is the N-atom W state.
    """
    if gv.n_atoms != layout.n_atoms:
        raise ValueError(
            f"coupling vector has {gv.n_atoms} atoms, layout has {layout.n_atoms}"
        )
    ground = "g" * layout.n_atoms
    chi0 = fs.basis_state(layout, 1, ground)
    chi1 = np.zeros(layout.dim, dtype=complex)
    for i, g in enumerate(gv.g):
        pattern = ground[:i] + "e" + ground[i + 1:]
        chi1 += g * fs.basis_state(layout, 0, pattern)
    chi1 /= gv.g_norm
    return chi0, chi1


def single_excitation_population(gv: CouplingVector, t):
    """P(chi1)(t) = sin^2(g_norm t) for the closed system started in chi0.

    Peaks at 1 when t = pi / (2 g_norm)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    return np.sin(gv.g_norm * t) ** 2


def two_photon_states(layout: HilbertLayout, g1: float, g2: float):
    """The four orthonormal states spanning the two-excitation manifold of
    two atoms: |2,gg>, |1>(x)(g1|eg>+g2|ge>)/W, |0,ee>, |1>(x)(g2|eg>-g1|ge>)/W.

    The last (dark combination) has no Hamiltonian matrix element to any of
    the others except |0,ee>, with element (g2^2 - g1^2)/W; at equal
    coupling it therefore decouples entirely and the dynamics stay on the
    remaining triplet.
    """
    if layout.n_atoms != 2:
        raise ValueError("two-photon manifold states are defined for 2 atoms")
    if layout.n_max < 2:
        raise ValueError("layout must retain at least 2 photons")
    if g1 == 0 and g2 == 0:
        raise ValueError("couplings cannot both be zero")
    w = float(np.hypot(g1, g2))
    chi0 = fs.basis_state(layout, 2, "gg")
    chi1 = (
        g1 * fs.basis_state(layout, 1, "eg") + g2 * fs.basis_state(layout, 1, "ge")
    ) / w
    chi2 = fs.basis_state(layout, 0, "ee")
    chi3 = (
        g2 * fs.basis_state(layout, 1, "eg") - g1 * fs.basis_state(layout, 1, "ge")
    ) / w
    return chi0, chi1, chi2, chi3


@dataclass(frozen=True)
class PeakEntanglementMetrics:
    fidelity: float
    concurrence: float
    entropy_atom2: float


def peak_entanglement_metrics(alpha: float) -> PeakEntanglementMetrics:
    """Entanglement of the peak state (g1|eg> + alpha g1|ge>)/norm.

    fidelity    = (1 + a) / sqrt(2 (1 + a^2))   (overlap with the Bell state)
    concurrence = 2 a / (1 + a^2)
    entropy_atom2 = binary entropy of a^2 / (1 + a^2), normalized by ln 2
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    a2 = alpha * alpha
    fidelity = (1.0 + alpha) / np.sqrt(2.0 * (1.0 + a2))
    conc = 2.0 * alpha / (1.0 + a2)
    p = a2 / (1.0 + a2)
    ent = 0.0
    for q in (p, 1.0 - p):
        if q > 0.0:
            ent -= q * np.log(q)
    return PeakEntanglementMetrics(
        fidelity=float(fidelity),
        concurrence=float(conc),
        entropy_atom2=float(ent / np.log(2.0)),
    )


def symmetric_bell_state(layout: HilbertLayout) -> np.ndarray:
    """|0> (x) (|eg> + |ge>)/sqrt(2), the maximal two-atom target state."""
    if layout.n_atoms != 2:
        raise ValueError("the symmetric Bell state is defined for 2 atoms")
    return (
        fs.basis_state(layout, 0, "eg") + fs.basis_state(layout, 0, "ge")
    ) / np.sqrt(2.0)
