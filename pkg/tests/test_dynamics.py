import numpy as np
import pytest

from cavitysim import analytic, dynamics as dyn, fockspace as fs, model
from cavitysim.fockspace import HilbertLayout
from cavitysim.model import SystemParams
from cavitysim.units import ghz_to_angular

G = ghz_to_angular(9.0)


def _gen(n_max, couplings, kappa=0.0, gamma=0.0, omega_0=0.0):
    lay = HilbertLayout(n_max=n_max, n_atoms=len(couplings))
    p = SystemParams(omega_c=0.0, omega_0=omega_0, kappa=kappa, gamma=gamma,
                     couplings=couplings)
    return lay, model.build_generator(lay, p)


def _single_atom_run(kappa=0.0, gamma=0.0, t_end=None, n_points=301, substeps=None):
    lay, gen = _gen(2, (G,), kappa=kappa, gamma=gamma)
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "g"))
    t_end = t_end if t_end is not None else 3 * np.pi / G
    ts = np.linspace(0.0, t_end, n_points)
    return lay, dyn.integrate(gen, rho0, ts, substeps=substeps)


def test_closed_jaynes_cummings_thirty_periods():
    # closed-form oracle: P(|0,e>) = sin^2(g t)
    period = np.pi / G
    lay, traj = _single_atom_run(t_end=30 * period, n_points=3001)
    expected = np.sin(G * traj.times) ** 2
    assert np.max(np.abs(traj.series("pop_0e") - expected)) < 1e-6


def test_zero_length_evolution_returns_initial_state():
    lay, gen = _gen(1, (G,))
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "g"))
    traj = dyn.integrate(gen, rho0, np.array([0.0]))
    assert traj.times.shape == (1,)
    assert traj.series("pop_1g")[0] == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(traj.snapshot_at(0), rho0)


def test_times_must_increase():
    lay, gen = _gen(1, (G,))
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "g"))
    with pytest.raises(ValueError):
        dyn.integrate(gen, rho0, np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        dyn.integrate(gen, rho0, np.array([]))


def test_trace_drift_gate_raises():
    lay, gen = _gen(1, (G,), kappa=0.19, gamma=0.04)
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "g"))
    # steps far beyond the RK4 stability limit blow the state up; the gate
    # must catch it and report the failure time instead of emitting garbage
    with pytest.raises(dyn.IntegrationError):
        dyn.integrate(gen, rho0, np.linspace(0.0, 50.0, 51), substeps=1)


def test_rabi_frequency_measures_g_over_pi():
    lay, traj = _single_atom_run(n_points=601)
    f = dyn.rabi_frequency(traj, "pop_0e")
    assert f == pytest.approx(G / np.pi, rel=1e-4)


def test_rabi_frequency_dicke_ratio():
    lay1, traj1 = _single_atom_run(n_points=601)
    lay2, gen2 = _gen(2, (G, G))
    rho0 = dyn.pure_state_density(fs.basis_state(lay2, 1, "gg"))
    ts = np.linspace(0.0, 3 * np.pi / (np.sqrt(2) * G), 601)
    traj2 = dyn.integrate(gen2, rho0, ts)
    ratio = dyn.rabi_frequency(traj2, "pop_1gg") / dyn.rabi_frequency(traj1, "pop_1g")
    assert ratio == pytest.approx(np.sqrt(2.0), rel=1e-3)


def test_rabi_frequency_too_few_extrema():
    lay, gen = _gen(1, (0.0,))
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "g"))
    traj = dyn.integrate(gen, rho0, np.linspace(0, 1.0, 50))
    with pytest.raises(dyn.TooFewExtremaError):
        dyn.rabi_frequency(traj, "pop_1g")  # constant series


def test_envelope_lifetime_matches_polariton_decay():
    kappa = ghz_to_angular(29.5653e-3)  # ~0.1858 rad/ns
    gamma = ghz_to_angular(6.0666e-3)
    lay, traj = _single_atom_run(kappa=kappa, gamma=gamma, t_end=40.0, n_points=8001)
    fit = dyn.envelope_lifetime(traj, "pop_0e")
    assert fit.n_maxima >= 10
    assert fit.tau_ns == pytest.approx(2.0 / (kappa + gamma), rel=0.05)


def test_envelope_lifetime_rejects_non_decaying():
    lay, traj = _single_atom_run(t_end=15 * np.pi / G, n_points=2001)
    with pytest.raises(dyn.NonDecayingEnvelopeError):
        dyn.envelope_lifetime(traj, "pop_0e")


def test_envelope_fit_recovers_pure_exponential():
    # maxima of exp(-t/5) * (1 - cos(w t))/2 sit on the exponential envelope
    ts = np.linspace(0.0, 30.0, 6001)
    tau = 5.0
    w = 2 * np.pi / 0.2
    series = np.exp(-ts / tau) * 0.5 * (1 - np.cos(w * ts))
    traj = dyn.Trajectory(
        layout=HilbertLayout(1, 1), times=ts, observables={"probe": series},
        column_order=["probe"],
    )
    fit = dyn.envelope_lifetime(traj, "probe")
    assert fit.tau_ns == pytest.approx(tau, rel=1e-3)


def test_bare_populations_delta_state_and_sum():
    lay, gen = _gen(2, (G, 0.7 * G), kappa=0.19, gamma=0.04)
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "gg"))
    ts = np.linspace(0.0, 0.2, 501)
    traj = dyn.integrate(gen, rho0, ts)
    pops = dyn.bare_populations(traj)
    assert pops["pop_1gg"][0] == pytest.approx(1.0, abs=1e-12)
    total = sum(pops.values())
    assert np.max(np.abs(total - 1.0)) < 1e-9
    for series in pops.values():
        assert np.all(series > -1e-8) and np.all(series < 1 + 1e-8)


def test_unequal_coupling_population_amplitude_ratio():
    # single-excitation closed form: amplitudes scale as g_i^2 / (g1^2+g2^2)
    alpha = 0.7
    lay, gen = _gen(2, (G, alpha * G))
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "gg"))
    omega = G * np.hypot(1, alpha)
    ts = np.linspace(0.0, 1.2 * np.pi / omega, 601)
    traj = dyn.integrate(gen, rho0, ts)
    p_eg = traj.series("pop_0eg")
    p_ge = traj.series("pop_0ge")
    assert np.max(p_ge) / np.max(p_eg) == pytest.approx(alpha**2, rel=1e-6)
    # in phase: peak positions coincide
    assert abs(np.argmax(p_ge) - np.argmax(p_eg)) <= 1


def test_integrator_is_fourth_order():
    # halving the step must shrink the error against the sin^2 oracle by >= 8x
    errs = {}
    for sub in (4, 8):
        lay, traj = _single_atom_run(n_points=101, substeps=sub)
        expected = np.sin(G * traj.times) ** 2
        errs[sub] = np.max(np.abs(traj.series("pop_0e") - expected))
    assert errs[4] / errs[8] >= 8.0


def test_closed_system_conserves_excitation_number():
    lay, gen = _gen(2, (G, 0.6 * G))
    n_ex = fs.excitation_number(lay)
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "gg"))
    ts = np.linspace(0.0, 0.5, 201)
    traj = dyn.integrate(gen, rho0, ts, snapshot_stride=10)
    values = [np.trace(n_ex @ s).real for s in traj.snapshots]
    assert np.max(np.abs(np.array(values) - values[0])) < 1e-8


def test_snapshots_remain_valid_states():
    kappa, gamma = 0.19, 0.04
    lay, traj = _single_atom_run(kappa=kappa, gamma=gamma,
                                 t_end=2.0, n_points=801)
    assert traj.snapshots is not None
    for snap in traj.snapshots[:: max(1, len(traj.snapshots) // 50)]:
        dyn.validate_density_matrix(snap, trace_tol=1e-9, herm_tol=1e-10,
                                    positivity_tol=1e-8)


def test_projection_observables():
    lay, gen = _gen(2, (G, G))
    gv = analytic.CouplingVector((G, G))
    chi0, chi1 = analytic.single_excitation_states(lay, gv)
    rho0 = dyn.pure_state_density(chi0)
    ts = np.linspace(0.0, np.pi / (np.sqrt(2) * G), 201)
    traj = dyn.integrate(gen, rho0, ts, projections={"P_chi1": chi1})
    expected = np.sin(np.sqrt(2) * G * ts) ** 2
    assert np.max(np.abs(traj.series("P_chi1") - expected)) < 1e-6


def test_sector_norm_dims():
    lay = HilbertLayout(n_max=2, n_atoms=2)
    assert dyn.sector_norm_dim(lay, (0,), 1) == 2   # photon, single excitation
    assert dyn.sector_norm_dim(lay, (1,), 1) == 2   # one atom
    assert dyn.sector_norm_dim(lay, (0,), 2) == 3   # photon, two excitations
    assert dyn.sector_norm_dim(lay, (1, 2), 1) == 2
    lay3 = HilbertLayout(n_max=2, n_atoms=3)
    assert dyn.sector_norm_dim(lay3, (1, 2, 3), 1) == 2


def test_count_extrema():
    ts = np.linspace(0, 4 * np.pi, 400)
    assert dyn.count_extrema(np.sin(ts)) == 4
    assert dyn.count_extrema(np.ones_like(ts)) == 0


def test_csv_export_deterministic_and_schema():
    lay, traj = _single_atom_run(n_points=41)
    text1 = dyn.trajectory_csv_text(traj)
    lay, traj2 = _single_atom_run(n_points=41)
    assert text1 == dyn.trajectory_csv_text(traj2)
    lines = text1.splitlines()
    assert lines[0] == f"# schema: {dyn.TRAJECTORY_SCHEMA}"
    header = lines[1].split(",")
    assert header[0] == "time_ns"
    # populations in basis-index order, then n_photon
    assert header[1:7] == ["pop_0g", "pop_0e", "pop_1g", "pop_1e", "pop_2g", "pop_2e"]
    assert header[7] == "n_photon"
    assert len(lines) == 2 + 41


def test_observable_column_order_with_entropies_and_concurrence():
    lay, gen = _gen(2, (G, G))
    rho0 = dyn.pure_state_density(fs.basis_state(lay, 1, "gg"))
    ts = np.linspace(0.0, 0.05, 21)
    traj = dyn.integrate(
        gen, rho0, ts,
        track=("populations", "n_photon", "entropies", "concurrence"),
        projections={"P_extra": fs.basis_state(lay, 0, "gg")},
    )
    cols = traj.column_order
    assert cols[-5:] == ["S_A", "S_B", "S_C", "C_BC", "P_extra"]


def test_validate_density_matrix_rejects_bad_inputs():
    good = np.diag([0.5, 0.5]).astype(complex)
    dyn.validate_density_matrix(good)
    with pytest.raises(ValueError):
        dyn.validate_density_matrix(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        dyn.validate_density_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(ValueError):
        dyn.validate_density_matrix(np.diag([1.5, -0.5]))
