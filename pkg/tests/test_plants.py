import math

import numpy as np
import pytest

from ctrlbench.errors import CatalogError, ConfigError, UsageError
from ctrlbench.numerics import LinearStateSpace, RngStream, char_poly, rk4_step
from ctrlbench.plants import (
    AuvParams,
    AuvPlant,
    CrazyfliePlant,
    Environment,
    EpisodeTrace,
    GenericLinearPlant,
    NmpPlant,
    PerturbationProfile,
    ScenarioSpec,
    TmsPlant,
    list_scenarios,
    make_plant,
    make_scenario,
    reference_at,
    rohrs_filter,
    run_episode,
)
from ctrlbench.policy import Policy, StaticGainPolicy


class ZeroPolicy(Policy):
    def act(self, obs):
        return np.zeros(1)


def _integrator_plant():
    return GenericLinearPlant(
        LinearStateSpace(np.zeros((1, 1)), np.eye(1), np.eye(1)), "integrator"
    )


class TestNmpPlant:
    def test_transfer_function_reconstruction(self):
        # Denominator from the characteristic polynomial; numerator recovered
        # by sampling G(s) * den(s) at two real points and solving.
        plant = NmpPlant()
        ss = plant.linear_model()
        den = char_poly(ss.a)
        assert np.allclose(den, [1.0, 4.719, 5.47], atol=1e-12)
        pts = [1.0, 2.0]
        vals = []
        for s in pts:
            g = ss.c @ np.linalg.solve(s * np.eye(2) - ss.a, ss.b)
            vals.append(g[0, 0] * np.polyval(den, s))
        coeff = np.linalg.solve(np.array([[p, 1.0] for p in pts]), vals)
        assert np.allclose(coeff, [-1.135, 3.199], atol=1e-12)

    def test_open_loop_poles_stable(self):
        # poles ~ {-2.0477, -2.6714}
        roots = np.roots(char_poly(NmpPlant().linear_model().a))
        assert np.all(roots.real < 0)
        assert np.allclose(sorted(roots.real), [-2.6714, -2.0477], atol=1e-3)

    def test_rhp_zero_location(self):
        # zero of -1.135 s + 3.199 at s = +2.8185
        assert 3.199 / 1.135 == pytest.approx(2.8185, abs=1e-3)


class TestTmsPlant:
    def test_equilibrium(self):
        plant = TmsPlant()
        d = plant.derivative(np.array([1.0, 1.0, 0.0, 0.0]), 0.0)
        assert np.allclose(d, 0.0)

    def test_energy_conservation(self):
        plant = TmsPlant()
        x = np.array([1.0, 0.0, 0.0, 0.0])
        e0 = plant.energy(x)
        for _ in range(250):
            x = rk4_step(lambda x, u: plant.derivative(x, 0.0), x, None, 0.1)
        assert abs(plant.energy(x) - e0) / e0 < 1e-3

    def test_open_loop_modes(self):
        roots = np.roots(char_poly(TmsPlant().linear_model().a))
        assert np.allclose(sorted(np.abs(roots.imag)), [0.0, 0.0, math.sqrt(2), math.sqrt(2)], atol=1e-9)


class TestAuvPlant:
    def test_added_mass_determinant(self):
        det = np.linalg.det(AuvParams().added_mass())
        assert det == pytest.approx(546.06, abs=0.01)

    def test_heading_kinematics_exact(self):
        plant = AuvPlant()
        x = np.array([0.3, -0.2, 1.0])
        assert plant.derivative(x, 5.0)[2] == x[1]

    def test_straight_line_equilibrium(self):
        plant = AuvPlant()
        assert np.allclose(plant.derivative(np.array([0.0, 0.0, 0.7]), 0.0), [0.0, 0.0, 0.0])

    def test_output_in_degrees(self):
        plant = AuvPlant()
        assert plant.output(np.array([0.0, 0.0, math.pi])) == pytest.approx(180.0)

    def test_linearisation_matches_dynamics_at_origin(self):
        plant = AuvPlant()
        ss = plant.linear_model()
        eps = 1e-7
        for i in range(3):
            x = np.zeros(3)
            x[i] = eps
            col = (plant.derivative(x, 0.0) - plant.derivative(np.zeros(3), 0.0)) / eps
            assert np.allclose(col, ss.a[:, i], atol=1e-5)
        col_u = (plant.derivative(np.zeros(3), eps) - plant.derivative(np.zeros(3), 0.0)) / eps
        assert np.allclose(col_u, ss.b[:, 0], atol=1e-5)


class TestCrazyfliePlant:
    def test_hover_balance(self):
        plant = CrazyfliePlant()
        thrust = plant.m * plant.g
        assert np.allclose(plant.derivative(np.array([0.5, 0.0]), thrust), [0.0, 0.0])

    def test_feedforward_constant(self):
        assert CrazyfliePlant().input_feedforward == pytest.approx(0.26487, abs=1e-5)


class TestReferenceAt:
    SCHEDULE = ((0.0, 0.0), (2.0, 0.5), (12.0, 1.0), (22.0, 0.5))

    def test_multistep_values(self):
        assert reference_at(self.SCHEDULE, 5.0) == 0.5
        assert reference_at(self.SCHEDULE, 15.0) == 1.0
        assert reference_at(self.SCHEDULE, 23.0) == 0.5

    def test_before_first_entry(self):
        assert reference_at(((1.0, 3.0),), 0.5) == 3.0

    def test_boundary_takes_new_value(self):
        assert reference_at(self.SCHEDULE, 2.0) == 0.5
        assert reference_at(self.SCHEDULE, 12.0) == 1.0


class TestCatalog:
    def test_all_names_resolve(self):
        for name in list_scenarios():
            spec = make_scenario(name)
            assert spec.name == name
            assert spec.horizon == 25.0 and spec.dt == 0.1

    def test_unknown_name(self):
        with pytest.raises(CatalogError):
            make_scenario("nope")
        with pytest.raises(CatalogError):
            make_plant("nope")

    def test_nmp_perturbed_profile(self):
        spec = make_scenario("nmp-perturbed")
        assert spec.perturbation.dist_step == (0.20, 15.0)
        assert spec.perturbation.noise == (0.20, 20.0)

    def test_auv_operational_profile(self):
        spec = make_scenario("auv-operational")
        assert spec.schedule == ((0.0, 10.0),)
        assert spec.perturbation.saturation == (20.0, 30.0)
        assert spec.perturbation.dist_step == (2.0, 15.0)
        assert spec.perturbation.noise == (0.05, 20.0)
        assert spec.perturbation.unmodelled is not None

    def test_cf_multistep_schedule(self):
        spec = make_scenario("cf-multistep")
        assert spec.schedule == ((0.0, 0.0), (2.0, 0.5), (12.0, 1.0), (22.0, 0.5))

    def test_invalid_specs_rejected(self):
        with pytest.raises(ConfigError):
            ScenarioSpec("x", "nmp", ((0.0, 1.0),), horizon=25.0, dt=0.07)
        with pytest.raises(ConfigError):
            ScenarioSpec("x", "nmp", ((2.0, 1.0), (1.0, 0.0)))
        with pytest.raises(ConfigError):
            ScenarioSpec(
                "x",
                "nmp",
                ((0.0, 1.0),),
                perturbation=PerturbationProfile(input_delay=0.05),
            )


class TestEnvironment:
    def test_zero_reference_zero_control(self):
        spec = ScenarioSpec("zero", "nmp", ((0.0, 0.0),), q_e=3.0, q_i=2.0, r_u=1.0)
        trace = run_episode(spec, ZeroPolicy())
        assert trace.completed
        assert np.allclose(trace.reward, 0.0)
        assert trace.n_samples == spec.n_steps + 1

    def test_rate_limit_binds_before_amplitude(self):
        spec = ScenarioSpec(
            "sat", "cf", ((0.0, 0.0),),
            perturbation=PerturbationProfile(saturation=(20.0, 30.0)),
        )
        env = Environment(spec)
        env.reset()
        _, _, _, info = env.step(25.0)
        assert info["u_act"] == pytest.approx(3.0)

    def test_input_delay_three_samples(self):
        spec = ScenarioSpec(
            "delay", "cf", ((0.0, 0.0),),
            perturbation=PerturbationProfile(input_delay=0.3),
        )
        env = Environment(spec)
        env.reset()
        cmds = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        delayed = []
        for c in cmds:
            _, _, _, info = env.step(c)
            delayed.append(info["u_delayed"])
        assert delayed == [0.0, 0.0, 0.0, 1.0, 2.0, 3.0]

    def test_rohrs_filter_unit_dc_gain(self):
        spec = ScenarioSpec(
            "rohrs", "nmp", ((0.0, 0.0),),
            perturbation=PerturbationProfile(unmodelled=rohrs_filter()),
        )
        env = Environment(spec)
        env.reset()
        u_plant = None
        for _ in range(spec.n_steps):
            _, _, done, info = env.step(1.0)
            u_plant = info.get("u_plant", u_plant)
            if done:
                break
        assert u_plant == pytest.approx(1.0, abs=1e-6)

    def test_noise_free_is_deterministic_and_true_equals_meas(self):
        spec = make_scenario("nmp-nominal")
        t1 = run_episode(spec, StaticGainPolicy(0.5), rng=RngStream(1))
        t2 = run_episode(spec, StaticGainPolicy(0.5), rng=RngStream(999))
        assert np.array_equal(t1.y_true, t2.y_true)
        assert np.array_equal(t1.y_meas, t1.y_true)

    def test_noise_corrupts_observation_not_dynamics(self):
        pert = PerturbationProfile(noise=(0.2, 0.0))
        spec = ScenarioSpec("noisy", "nmp", ((0.0, 1.0),), perturbation=pert)
        noisy = run_episode(spec, ZeroPolicy(), rng=RngStream(7))
        clean = run_episode(make_scenario("nmp-nominal"), ZeroPolicy())
        # Open loop with u = 0: true output identical, measured differs.
        assert np.allclose(noisy.y_true, clean.y_true)
        assert not np.allclose(noisy.y_meas, noisy.y_true)

    def test_same_seed_identical_traces(self):
        spec = make_scenario("nmp-perturbed")
        t1 = run_episode(spec, StaticGainPolicy(0.4), rng=RngStream(5))
        t2 = run_episode(spec, StaticGainPolicy(0.4), rng=RngStream(5))
        assert np.array_equal(t1.y_meas, t2.y_meas)
        assert np.array_equal(t1.u, t2.u)

    def test_divergence_flags_trace(self):
        # Positive feedback on an integrator diverges quickly.
        spec = ScenarioSpec("blow", "cf", ((0.0, 1.0),))
        env = Environment(spec, plant=_integrator_plant())
        env.reset()
        done = False
        while not done:
            _, _, done, info = env.step(1e4)
        trace = env.trace()
        assert trace.terminal == "diverged"
        assert trace.diverged_at is not None
        assert trace.n_samples < spec.n_steps + 1

    def test_step_after_done_raises(self):
        spec = ScenarioSpec("short", "nmp", ((0.0, 0.0),), horizon=0.2)
        env = Environment(spec)
        env.reset()
        env.step(0.0)
        env.step(0.0)
        with pytest.raises(UsageError):
            env.step(0.0)

    def test_perturbation_ordering_golden(self):
        # Independent replication of the actuator pipeline: rate -> amplitude
        # -> delay -> (no filter) -> gain -> disturbance.
        pert = PerturbationProfile(
            dist_step=(1.0, 0.3),
            input_delay=0.2,
            gain_multiplier=2.0,
            saturation=(2.0, 5.0),
        )
        spec = ScenarioSpec("golden", "cf", ((0.0, 0.0),), perturbation=pert)
        env = Environment(spec, plant=_integrator_plant())
        env.reset()
        cmds = [3.0, -3.0, 1.0, 0.5, 2.5, -0.2, 0.0, 0.0]
        got = []
        for c in cmds:
            _, _, _, info = env.step(c)
            got.append((info["u_act"], info["u_plant"]))

        prev, buf, expected = 0.0, [0.0, 0.0], []
        for k, c in enumerate(cmds):
            lo, hi = prev - 0.5, prev + 0.5
            act = min(max(c, lo), hi)
            act = min(max(act, -2.0), 2.0)
            prev = act
            delayed = buf[0]
            buf = [buf[1], act]
            dist = 1.0 if k * 0.1 >= 0.3 else 0.0
            expected.append((act, 2.0 * delayed + dist))
        assert got == pytest.approx(expected)


class TestEpisodeTrace:
    def test_csv_round_trip(self, tmp_path):
        spec = make_scenario("nmp-nominal")
        trace = run_episode(spec, StaticGainPolicy(0.3))
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        back = EpisodeTrace.from_csv(path)
        assert back.terminal == "completed"
        assert np.allclose(back.y_true, trace.y_true, atol=1e-8)
        assert np.allclose(back.u, trace.u, atol=1e-8)

    def test_uniform_spacing_and_length(self):
        spec = make_scenario("cf-multistep")
        trace = run_episode(spec, ZeroPolicy())
        assert trace.n_samples == spec.n_steps + 1
        assert np.allclose(np.diff(trace.t), spec.dt)
