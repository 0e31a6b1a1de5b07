"""Entanglement diagnostics: partial trace, entropy, concurrence, fidelity.

Subsystems are addressed by tensor-factor position: 0 is the photon,
1..N are the atoms (matching the fixed layout ordering).  Letters used in
observable names map A -> photon, B -> atom 1, C -> atom 2, ...

All functions are pure and operate on plain dense arrays.
"""

import string

import numpy as np

from .fockspace import HilbertLayout

PHOTON = 0

# Slightly negative eigenvalues are expected from the integrator; anything
# below this is a hard error signaling a misconfigured run.
EIGENVALUE_CLAMP_TOL = 1e-8

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SY_SY = np.kron(_SIGMA_Y, _SIGMA_Y)


def partial_trace(rho: np.ndarray, layout: HilbertLayout, keep) -> np.ndarray:
    """Reduced density matrix on the kept factors (in the order given).

    keep is a sequence of factor positions (0 = photon, i = atom i).
    """
    keep = tuple(keep)
    n_factors = layout.n_atoms + 1
    if not keep:
        raise ValueError("keep must name at least one subsystem factor")
    if len(set(keep)) != len(keep):
        raise ValueError(f"keep has duplicate factors: {keep}")
    if any(not 0 <= p < n_factors for p in keep):
        raise ValueError(
            f"keep {keep} outside valid factor positions 0..{n_factors - 1}"
        )
    dims = layout.factor_dims()
    if rho.shape != (layout.dim, layout.dim):
        raise ValueError(f"rho shape {rho.shape} does not match layout dim {layout.dim}")

    letters = string.ascii_lowercase
    ket = list(letters[:n_factors])
    bra = list(ket)
    out_ket, out_bra = [], []
    nxt = n_factors
    for p in keep:
        bra[p] = letters[nxt]
        nxt += 1
        out_ket.append(ket[p])
        out_bra.append(bra[p])
    spec = "".join(ket) + "".join(bra) + "->" + "".join(out_ket) + "".join(out_bra)
    reduced = np.einsum(spec, rho.reshape(dims + dims))
    d_keep = int(np.prod([dims[p] for p in keep]))
    return reduced.reshape(d_keep, d_keep)


def _clamped_spectrum(rho: np.ndarray) -> np.ndarray:
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -EIGENVALUE_CLAMP_TOL:
        raise ValueError(
            f"density matrix eigenvalue {evals[0]:.3e} below -{EIGENVALUE_CLAMP_TOL:g}; "
            "input is not (numerically) positive semidefinite"
        )
    return np.clip(evals, 0.0, 1.0)


def entropy_normalized(rho_sub: np.ndarray, norm_dim: int) -> float:
    """Von Neumann entropy -sum(l ln l) / ln(norm_dim), in [0, 1].

    Eigenvalues are clamped to [0, 1] (0 ln 0 := 0); see module notes on the
    clamping tolerance.
    """
    if norm_dim < 2:
        raise ValueError(f"norm_dim must be >= 2, got {norm_dim}")
    evals = _clamped_spectrum(rho_sub)
    pos = evals[evals > 0.0]
    return float(-np.sum(pos * np.log(pos)) / np.log(norm_dim))


def concurrence(rho_two_qubit: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    With rho_tilde = (sy x sy) rho* (sy x sy), the lambda_i are the ordered
    square roots of the eigenvalues of rho @ rho_tilde (equivalently the
    eigenvalues of R = sqrt(sqrt(rho) rho_tilde sqrt(rho))) and
    C = max(0, l1 - l2 - l3 - l4).  Numerically the lambda_i are computed
    as the singular values of B = sqrt(rho) (sy x sy) sqrt(rho)*, since
    B B^dag = sqrt(rho) rho_tilde sqrt(rho): unlike square roots of
    eigenvalues, singular values of the near-singular B keep full absolute
    accuracy, which pure states (rank-1 B) need.
    """
    rho = np.asarray(rho_two_qubit)
    if rho.shape != (4, 4):
        raise ValueError(f"concurrence needs a 4x4 two-qubit state, got {rho.shape}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > 1e-8:
        raise ValueError(f"input not Hermitian (deviation {herm_dev:.3e})")
    evals_rho, vecs = np.linalg.eigh(rho)
    if evals_rho[0] < -EIGENVALUE_CLAMP_TOL:
        raise ValueError(
            f"density matrix eigenvalue {evals_rho[0]:.3e} below "
            f"-{EIGENVALUE_CLAMP_TOL:g}; input is not positive semidefinite"
        )
    sqrt_rho = (vecs * np.sqrt(np.clip(evals_rho, 0.0, None))) @ vecs.conj().T
    b = sqrt_rho @ _SY_SY @ sqrt_rho.conj()
    lam = np.linalg.svd(b, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """sqrt(<psi|rho|psi>) for a normalized pure reference state."""
    psi = np.asarray(psi, dtype=complex)
    if rho.shape != (psi.size, psi.size):
        raise ValueError(
            f"dimension mismatch: rho {rho.shape}, state length {psi.size}"
        )
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"reference state norm {norm} is not 1")
    val = float(np.real(psi.conj() @ rho @ psi))
    return float(np.sqrt(max(val, 0.0)))


def splitting_magnitude(alpha: float) -> float:
    """Population-amplitude splitting |1 - a^2| / |1 + a^2| of the two atoms."""
    return abs(1.0 - alpha**2) / abs(1.0 + alpha**2)


def trajectory_splitting(pop_atom1, pop_atom2) -> float:
    """Splitting measured from two population series: the oscillation
    amplitudes differ while staying in phase, so the peak values give
    (A1 - A2) / (A1 + A2)."""
    a1 = float(np.max(pop_atom1))
    a2 = float(np.max(pop_atom2))
    if a1 + a2 <= 0:
        raise ValueError("population series carry no excitation")
    return abs(a1 - a2) / (a1 + a2)


def entanglement_fidelity_alpha(alpha: float) -> float:
    """Overlap of the peak entangled state with the symmetric Bell state:
    (1 + a) / sqrt(2 (1 + a^2)).  Unity only at equal coupling."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return (1.0 + alpha) / np.sqrt(2.0 * (1.0 + alpha**2))
