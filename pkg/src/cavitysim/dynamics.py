"""Master-equation integration and derived time-series quantities.

The integrator is a fixed-step classical Runge-Kutta (RK4) applied to the
vectorized density matrix, vec(d rho/dt) = L vec(rho) with L built once per
run.  Rotating-frame dynamics at the parameters of interest are smooth and
non-stiff, so a fixed step of min(T_osc, 1/kappa, 1/gamma)/200 (the default;
see `auto_substeps`) integrates them to well below the tolerances asserted
by the tests.  Trace is never renormalized: trace drift is a quality metric
and the run fails if it exceeds `trace_tol`.

Time is in ns throughout; rates are angular (rad/ns).
"""

import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import entanglement as ent
from . import fockspace as fs
from .fockspace import HilbertLayout
from .model import LindbladGenerator, liouvillian_matrix

TRAJECTORY_SCHEMA = "cavitysim-trajectory-v1"


class TooFewExtremaError(ValueError):
    """Series has too few oscillation extrema for the requested fit."""


class NonDecayingEnvelopeError(ValueError):
    """Envelope fit did not produce a positive, finite decay time."""


class IntegrationError(RuntimeError):
    """Integration failed (non-finite state or tolerance violated)."""


def validate_density_matrix(
    rho: np.ndarray,
    trace_tol: float = 1e-9,
    herm_tol: float = 1e-10,
    positivity_tol: float = 1e-8,
):
    """Raise if rho is not a normalized Hermitian PSD matrix within tolerance."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"trace {tr} deviates from 1 by more than {trace_tol}")
    herm_dev = np.max(np.abs(rho - rho.conj().T))
    if herm_dev > herm_tol:
        raise ValueError(f"hermiticity deviation {herm_dev} exceeds {herm_tol}")
    min_eig = float(np.linalg.eigvalsh(rho)[0])
    if min_eig < -positivity_tol:
        raise ValueError(f"minimum eigenvalue {min_eig} below -{positivity_tol}")


def pure_state_density(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a normalized ket."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


@dataclass
class Trajectory:
    """Time series of integrated states and derived observables.

    observables maps column name -> real array over `times`; snapshots, when
    stored, sit at times[snapshot_indices].
    """

    layout: HilbertLayout
    times: np.ndarray
    observables: dict
    snapshots: np.ndarray | None = None
    snapshot_indices: np.ndarray | None = None
    column_order: list = field(default_factory=list)

    def series(self, name: str) -> np.ndarray:
        if name not in self.observables:
            raise KeyError(
                f"no observable {name!r}; available: {sorted(self.observables)}"
            )
        return self.observables[name]

    def snapshot_at(self, index: int) -> np.ndarray:
        if self.snapshots is None:
            raise ValueError("trajectory stored no snapshots")
        return self.snapshots[index]


def population_labels(layout: HilbertLayout) -> list:
    """CSV column names for bare-state populations, in basis-index order."""
    return [
        "pop_" + layout.basis_label(k).replace(",", "")
        for k in range(layout.dim)
    ]


def subsystem_letter(factor: int) -> str:
    """Subsystem naming: A = photon, B..= atoms 1..N."""
    return chr(ord("A") + factor)


def sector_effective_dim(layout: HilbertLayout, factor_positions, n_exc: int) -> int:
    """Number of subsystem basis states reachable with at most n_exc excitations."""
    positions = tuple(factor_positions)
    dim = 1
    if 0 in positions:
        dim *= min(layout.n_max, n_exc) + 1
        n_atoms = len(positions) - 1
    else:
        n_atoms = len(positions)
    atom_states = sum(
        math.comb(n_atoms, j) for j in range(0, min(n_atoms, n_exc) + 1)
    )
    return dim * atom_states


def sector_norm_dim(layout: HilbertLayout, keep, n_exc: int) -> int:
    """Entropy normalization dimension for one partition block.

    min(effective dim of kept factors, effective dim of the complement),
    restricted to the excitation-preserved sector, floored at 2.  For a
    single photon shared with any number of atoms this gives 2, which makes
    the photon entropy reach 1 at maximal photon-atom entanglement even
    though the truncated photon factor is larger.
    """
    keep = tuple(keep)
    complement = tuple(
        p for p in range(layout.n_atoms + 1) if p not in keep
    )
    return max(
        2,
        min(
            sector_effective_dim(layout, keep, n_exc),
            sector_effective_dim(layout, complement, n_exc),
        ),
    )


def auto_substeps(gen: LindbladGenerator, dt_out: float, points_per_cycle: int = 320) -> int:
    """Internal RK4 substeps per output interval.

    Targets a step of min(T_osc, 1/kappa, 1/gamma)/points_per_cycle where
    T_osc = pi / ||H||_2 is the fastest population-oscillation period the
    Hamiltonian can produce.  320 points per cycle keeps the positivity
    drift of multi-excitation runs below the 1e-8 eigenvalue clamp floor.
    """
    scales = []
    h = gen.hamiltonian
    if gen.dim:
        hnorm = float(np.linalg.norm(h, 2))
        if hnorm > 0:
            scales.append(math.pi / hnorm)
    for rate, _ in gen.collapse_ops:
        if rate > 0:
            scales.append(1.0 / rate)
    if not scales:
        return 1
    h_target = min(scales) / points_per_cycle
    return max(1, math.ceil(dt_out / h_target))


def integrate(
    gen: LindbladGenerator,
    rho0: np.ndarray,
    times,
    substeps: int | None = None,
    snapshot_stride: int | None = 1,
    track: tuple = ("populations", "n_photon"),
    projections: dict | None = None,
    concurrence_pairs: tuple | None = None,
    entropy_norm_dims: dict | None = None,
    trace_tol: float = 1e-9,
) -> Trajectory:
    """Integrate d rho/dt over an increasing time grid and record observables.

    track may contain "populations", "n_photon", "entropies", "concurrence".
    projections maps extra column names to kets whose population <v|rho|v>
    is recorded.  Entropies are computed per single factor (photon and each
    atom) with sector normalization unless entropy_norm_dims overrides the
    per-letter values; concurrence is computed for the atom pairs given (all
    pairs by default).  No trace renormalization is applied; the run raises
    IntegrationError if |tr rho - 1| exceeds trace_tol at any output time.
    """
    layout = gen.layout
    dim = layout.dim
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D grid")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValueError("times must be strictly increasing")
    rho0 = np.asarray(rho0, dtype=complex)
    validate_density_matrix(rho0)
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 has shape {rho0.shape}, layout dimension is {dim}")

    liou = None
    if times.size > 1:
        liou = liouvillian_matrix(gen)
        if substeps is None:
            dt_max = float(np.max(np.diff(times)))
            substeps = auto_substeps(gen, dt_max)
        if substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {substeps}")

    n_out = times.size
    labels = population_labels(layout)
    column_order: list = []
    obs: dict = {}

    want_pops = "populations" in track
    want_nph = "n_photon" in track
    want_entropy = "entropies" in track
    want_conc = "concurrence" in track
    if want_pops:
        for name in labels:
            obs[name] = np.empty(n_out)
        column_order += labels
    if want_nph:
        obs["n_photon"] = np.empty(n_out)
        column_order.append("n_photon")

    n_exc = int(round(float(np.real(np.trace(fs.excitation_number(layout) @ rho0)))))
    entropy_factors = list(range(layout.n_atoms + 1)) if want_entropy else []
    norm_dims = {}
    for p in entropy_factors:
        letter = subsystem_letter(p)
        name = f"S_{letter}"
        if entropy_norm_dims and letter in entropy_norm_dims:
            norm_dims[p] = entropy_norm_dims[letter]
        else:
            norm_dims[p] = sector_norm_dim(layout, (p,), n_exc)
        obs[name] = np.empty(n_out)
        column_order.append(name)

    pairs = ()
    if want_conc:
        if concurrence_pairs is None:
            pairs = tuple(
                (i, j)
                for i in range(1, layout.n_atoms + 1)
                for j in range(i + 1, layout.n_atoms + 1)
            )
        else:
            pairs = tuple(concurrence_pairs)
        for i, j in pairs:
            name = f"C_{subsystem_letter(i)}{subsystem_letter(j)}"
            obs[name] = np.empty(n_out)
            column_order.append(name)

    projections = dict(projections or {})
    for name in projections:
        obs[name] = np.empty(n_out)
        column_order.append(name)

    diag_idx = np.arange(dim) * (dim + 1)
    nph_diag = np.real(np.diag(fs.number_operator(layout)))

    store_every = snapshot_stride if snapshot_stride and snapshot_stride > 0 else 0
    snap_list = []
    snap_idx = []

    vec = rho0.reshape(-1).astype(complex)

    def record(k: int):
        rho = vec.reshape(dim, dim)
        diag = np.real(vec[diag_idx])
        tr = float(diag.sum())
        if not np.isfinite(tr) or abs(tr - 1.0) > trace_tol:
            raise IntegrationError(
                f"trace deviation {tr - 1.0:.3e} at t={times[k]:.6g} ns "
                f"exceeds tolerance {trace_tol:g}"
            )
        if want_pops:
            for name, val in zip(labels, diag):
                obs[name][k] = val
        if want_nph:
            obs["n_photon"][k] = float(nph_diag @ diag)
        for p in entropy_factors:
            sub = ent.partial_trace(rho, layout, (p,))
            obs[f"S_{subsystem_letter(p)}"][k] = ent.entropy_normalized(
                sub, norm_dims[p]
            )
        for i, j in pairs:
            sub = ent.partial_trace(rho, layout, (i, j))
            obs[f"C_{subsystem_letter(i)}{subsystem_letter(j)}"][k] = ent.concurrence(sub)
        for name, ket in projections.items():
            obs[name][k] = float(np.real(ket.conj() @ rho @ ket))
        if store_every and k % store_every == 0:
            snap_list.append(rho.copy())
            snap_idx.append(k)

    record(0)
    for k in range(1, n_out):
        h = (times[k] - times[k - 1]) / substeps
        for _ in range(substeps):
            k1 = liou @ vec
            k2 = liou @ (vec + (0.5 * h) * k1)
            k3 = liou @ (vec + (0.5 * h) * k2)
            k4 = liou @ (vec + h * k3)
            vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        record(k)

    snapshots = np.array(snap_list) if snap_list else None
    indices = np.array(snap_idx, dtype=int) if snap_idx else None
    return Trajectory(
        layout=layout,
        times=times,
        observables=obs,
        snapshots=snapshots,
        snapshot_indices=indices,
        column_order=column_order,
    )


def bare_populations(traj: Trajectory) -> dict:
    """Bare-state population series keyed by pop_<n><pattern> labels."""
    out = {}
    for name in population_labels(traj.layout):
        if name in traj.observables:
            out[name] = traj.observables[name]
    if not out:
        raise ValueError("trajectory was integrated without population tracking")
    return out


def _refined_extrema(times: np.ndarray, series: np.ndarray):
    """Interior extrema with parabolic sub-sample refinement.

    Returns (t_ext, v_ext, is_max) arrays.
    """
    y = np.asarray(series, dtype=float)
    d = np.diff(y)
    t_ext, v_ext, kinds = [], [], []
    for i in range(1, len(y) - 1):
        left, right = d[i - 1], d[i]
        if left == 0.0:
            continue
        if left * right < 0:
            denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
            if denom == 0.0:
                offset = 0.0
            else:
                offset = 0.5 * (y[i - 1] - y[i + 1]) / denom
            dt = 0.5 * (times[i + 1] - times[i - 1])
            t_ext.append(times[i] + offset * dt)
            v_ext.append(y[i] - 0.25 * (y[i - 1] - y[i + 1]) * offset)
            kinds.append(left > 0)
    return np.array(t_ext), np.array(v_ext), np.array(kinds, dtype=bool)


def count_extrema(series, min_prominence: float = 1e-9) -> int:
    """Count interior extrema where the value differs from a neighbour's by
    more than min_prominence.  The default only guards against float-level
    ripple: genuine but doubly-flat extrema (e.g. entropy maxima, where both
    the entropy derivative and the population rate vanish) sit just a few
    orders above it on realistic grids."""
    y = np.asarray(series, dtype=float)
    n = 0
    for i in range(1, len(y) - 1):
        if (y[i] - y[i - 1]) * (y[i] - y[i + 1]) > 0 and (
            abs(y[i] - y[i - 1]) > min_prominence
            or abs(y[i] - y[i + 1]) > min_prominence
        ):
            n += 1
    return n


def rabi_frequency(traj: Trajectory, observable: str) -> float:
    """Oscillation frequency of a population series, in cycles/ns (= GHz).

    Estimated from the mean spacing of consecutive extrema (half-periods);
    for a single resonant atom this equals g/pi with g angular.  Requires
    at least 3 extrema in the window.
    """
    t_ext, _, _ = _refined_extrema(traj.times, traj.series(observable))
    if t_ext.size < 3:
        raise TooFewExtremaError(
            f"need >= 3 extrema to estimate a frequency, found {t_ext.size}"
        )
    mean_half_period = float(np.mean(np.diff(t_ext)))
    return 1.0 / (2.0 * mean_half_period)


@dataclass(frozen=True)
class EnvelopeFit:
    tau_ns: float
    log_rms_residual: float
    n_maxima: int


def envelope_lifetime(
    traj: Trajectory, observable: str, min_maxima: int = 10
) -> EnvelopeFit:
    """Exponential decay time of the oscillation envelope.

    Fits the local-maximum amplitudes A_k at times t_k to A0 exp(-t/tau) by
    least squares on log A_k.  Raises NonDecayingEnvelopeError when the fit
    slope is non-negative (tau <= 0 or unbounded).
    """
    t_ext, v_ext, is_max = _refined_extrema(traj.times, traj.series(observable))
    t_max = t_ext[is_max]
    a_max = v_ext[is_max]
    keep = a_max > 0
    t_max, a_max = t_max[keep], a_max[keep]
    if t_max.size < min_maxima:
        raise TooFewExtremaError(
            f"need >= {min_maxima} oscillation maxima, found {t_max.size}"
        )
    slope, intercept = np.polyfit(t_max, np.log(a_max), 1)
    window = t_max[-1] - t_max[0]
    if slope >= 0 or not np.isfinite(slope) or -1.0 / slope > 1e3 * window:
        raise NonDecayingEnvelopeError(
            f"envelope fit slope {slope:.3e} over a {window:.3g} ns window "
            "does not describe a resolvable decay"
        )
    resid = np.log(a_max) - (slope * t_max + intercept)
    return EnvelopeFit(
        tau_ns=-1.0 / slope,
        log_rms_residual=float(np.sqrt(np.mean(resid**2))),
        n_maxima=int(t_max.size),
    )


def write_trajectory_csv(traj: Trajectory, fh) -> None:
    """Emit `time_ns, <observables>` rows with a schema comment line.

    Column order is deterministic: populations in basis-index order, then
    n_photon, entropies S_A.., concurrence pairs, then any extra projection
    columns (in the order they were requested).
    """
    cols = traj.column_order
    fh.write(f"# schema: {TRAJECTORY_SCHEMA}\n")
    fh.write(",".join(["time_ns"] + cols) + "\n")
    for k, t in enumerate(traj.times):
        row = [repr(float(t))]
        row += [repr(float(traj.observables[c][k])) for c in cols]
        fh.write(",".join(row) + "\n")


def trajectory_csv_text(traj: Trajectory) -> str:
    buf = io.StringIO()
    write_trajectory_csv(traj, buf)
    return buf.getvalue()
