import math

import numpy as np
import pytest

from ctrlbench.errors import (
    DesignFailureError,
    DimensionError,
    DivergenceError,
    NonHurwitzError,
    SingularMatrixError,
)
from ctrlbench.numerics import (
    LinearStateSpace,
    RngStream,
    char_poly,
    derive_stream,
    freq_response,
    fro_norm,
    inverse,
    is_hurwitz,
    is_hurwitz_poly,
    mat_add,
    mat_mul,
    rk4_step,
    solve_care,
    solve_lyapunov,
)
from ctrlbench.numerics.riccati import care_residual
from ctrlbench.numerics.linalg import cholesky, is_psd, solve


class TestMatOps:
    def test_identity_multiply(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.allclose(mat_mul(np.eye(2), m), m)

    def test_diagonal_inverse(self):
        inv = inverse(np.array([[2.0, 0.0], [0.0, 4.0]]))
        assert np.allclose(inv, [[0.5, 0.0], [0.0, 0.25]])

    def test_singular_inverse_raises(self):
        with pytest.raises(SingularMatrixError):
            inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            mat_add(np.eye(2), np.eye(3))
        with pytest.raises(DimensionError):
            mat_mul(np.eye(2), np.eye(3))

    def test_random_inverse_roundtrip(self):
        rng = RngStream(7)
        for _ in range(20):
            n = 1 + rng.randint(5)
            a = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
            a += n * np.eye(n)  # keep comfortably nonsingular
            assert np.allclose(a @ inverse(a), np.eye(n), atol=1e-9)

    def test_complex_solve(self):
        a = np.array([[1.0 + 1j, 0.0], [0.0, 2.0]])
        x = solve(a, np.array([1.0 + 0j, 1.0 + 0j]))
        assert np.allclose(a @ x, [1.0, 1.0])

    def test_fro_norm(self):
        assert fro_norm(np.array([[3.0, 4.0]])) == pytest.approx(5.0)

    def test_cholesky_and_psd(self):
        a = np.array([[4.0, 2.0], [2.0, 3.0]])
        low = cholesky(a)
        assert np.allclose(low @ low.T, a)
        assert is_psd(np.zeros((2, 2)))
        assert not is_psd(np.array([[-1.0]]))


class TestRk4:
    def test_exponential_decay_single_step(self):
        x = rk4_step(lambda x, u: -x, np.array([1.0]), None, 0.1)
        assert abs(x[0] - math.exp(-0.1)) < 1e-7

    def test_constant_field(self):
        x = rk4_step(lambda x, u: np.zeros_like(x), np.array([3.14]), None, 0.1)
        assert x[0] == 3.14

    def test_global_error_over_horizon(self):
        # Oracle: analytic solution of xdot = -x over [0, 25] at dt = 0.1.
        x = np.array([1.0])
        for k in range(250):
            x = rk4_step(lambda x, u: -x, x, None, 0.1)
        assert abs(x[0] - math.exp(-25.0)) < 1e-6

    def test_overflow_raises_divergence(self):
        x = np.array([1e300])
        with pytest.raises(DivergenceError), np.errstate(over="ignore", invalid="ignore"):
            for _ in range(10):
                x = rk4_step(lambda x, u: x, x, None, 5.0)


class TestStability:
    def test_char_poly_known(self):
        a = np.array([[0.0, 1.0], [-5.47, -4.719]])
        assert np.allclose(char_poly(a), [1.0, 4.719, 5.47], atol=1e-12)

    def test_routh_simple(self):
        assert is_hurwitz_poly([1.0, 3.0, 2.0])  # (s+1)(s+2)
        assert not is_hurwitz_poly([1.0, -1.0, 2.0])
        assert not is_hurwitz_poly([1.0, 0.0, 1.0])  # marginal oscillator

    def test_routh_matches_root_signs_randomly(self):
        rng = RngStream(11)
        for _ in range(200):
            n = 1 + rng.randint(5)
            roots = np.array([rng.uniform(-3.0, 3.0) for _ in range(n)])
            coeffs = np.poly(roots)
            assert is_hurwitz_poly(coeffs) == bool(np.all(roots < -1e-6))


class TestLyapunov:
    def test_scalar(self):
        p = solve_lyapunov(np.array([[-1.0]]), np.array([[2.0]]))
        assert np.allclose(p, [[1.0]])

    def test_zero_q(self):
        p = solve_lyapunov(np.array([[-1.0, 0.3], [0.0, -2.0]]), np.zeros((2, 2)))
        assert np.allclose(p, 0.0)

    def test_unstable_raises(self):
        with pytest.raises(NonHurwitzError):
            solve_lyapunov(np.array([[1.0]]), np.array([[1.0]]))

    def test_residual_random(self):
        rng = RngStream(3)
        for _ in range(20):
            n = 1 + rng.randint(4)
            a = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
            a -= (1.0 + abs(max(np.diag(a)))) * 4 * np.eye(n)  # push Hurwitz
            if not is_hurwitz(a):
                continue
            m = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
            q = m @ m.T
            p = solve_lyapunov(a, q)
            assert fro_norm(a.T @ p + p @ a + q) < 1e-9 * (1 + fro_norm(q))
            assert np.allclose(p, p.T)


def _random_stabilizable(rng, max_n=5):
    n = 1 + rng.randint(max_n)
    m = 1 + rng.randint(2)
    a = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
    b = np.array([[rng.normal() for _ in range(m)] for _ in range(n)])
    g = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
    q = g @ g.T + 0.1 * np.eye(n)
    r = np.eye(m) * (0.5 + rng.uniform())
    return a, b, q, r


class TestCare:
    def test_scalar_unit(self):
        p, k = solve_care(np.array([[0.0]]), np.array([[1.0]]), np.array([[1.0]]), np.array([[1.0]]))
        assert np.allclose(p, [[1.0]], atol=1e-9)
        assert np.allclose(k, [[1.0]], atol=1e-9)

    def test_scalar_unstable_plant(self):
        # Oracle: p^2 - 2p - 2 = 0 -> p = 1 + sqrt(3); closed loop -sqrt(3).
        p, k = solve_care(np.array([[1.0]]), np.array([[1.0]]), np.array([[2.0]]), np.array([[1.0]]))
        assert p[0, 0] == pytest.approx(1.0 + math.sqrt(3.0), abs=1e-8)
        assert k[0, 0] == pytest.approx(1.0 + math.sqrt(3.0), abs=1e-8)
        assert (1.0 - k[0, 0]) == pytest.approx(-math.sqrt(3.0), abs=1e-8)

    def test_random_systems_residual_and_stability(self):
        rng = RngStream(2024)
        solved = 0
        while solved < 50:
            a, b, q, r = _random_stabilizable(rng)
            p, k = solve_care(a, b, q, r)
            res = care_residual(a, b, q, inverse(r), p)
            assert fro_norm(res) < 1e-8
            assert is_hurwitz(a - b @ k)
            assert is_psd(p)
            solved += 1

    def test_bad_weights_raise(self):
        with pytest.raises(DesignFailureError):
            solve_care(np.array([[0.0]]), np.array([[1.0]]), np.array([[-1.0]]), np.array([[1.0]]))
        with pytest.raises(DesignFailureError):
            solve_care(np.array([[0.0]]), np.array([[1.0]]), np.array([[1.0]]), np.array([[0.0]]))


class TestFreqResponse:
    def test_integrator(self):
        sys = LinearStateSpace(np.zeros((1, 1)), np.eye(1), np.eye(1))
        g = freq_response(sys, 1.0)
        assert g[0, 0] == pytest.approx(-1j, abs=1e-12)

    def test_dc_gain_of_cstr_model(self):
        sys = LinearStateSpace(
            np.array([[0.0, 1.0], [-5.47, -4.719]]),
            np.array([[0.0], [1.0]]),
            np.array([[3.199, -1.135]]),
        )
        g = freq_response(sys, 0.0)
        assert g[0, 0].real == pytest.approx(3.199 / 5.47, abs=1e-12)
        assert g[0, 0].imag == pytest.approx(0.0, abs=1e-12)

    def test_classic_crossover(self):
        # L(s) = 1/(s(s+1)(s+2)) at w = sqrt(2): magnitude 1/6, phase -180 deg.
        a = np.array([[0.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, -2.0]])
        b = np.array([[0.0], [0.0], [1.0]])
        c = np.array([[1.0, 0.0, 0.0]])
        sys = LinearStateSpace(a, b, c)
        g = freq_response(sys, math.sqrt(2.0))[0, 0]
        assert abs(g) == pytest.approx(1.0 / 6.0, abs=1e-9)
        assert math.degrees(math.atan2(g.imag, g.real)) == pytest.approx(180.0, abs=1e-6)

    def test_conjugate_symmetry(self):
        sys = LinearStateSpace(
            np.array([[0.0, 1.0], [-5.47, -4.719]]),
            np.array([[0.0], [1.0]]),
            np.array([[3.199, -1.135]]),
        )
        for w in [0.1, 1.0, 10.0]:
            assert np.allclose(freq_response(sys, -w), np.conj(freq_response(sys, w)))

    def test_pole_on_axis_raises(self):
        sys = LinearStateSpace(np.zeros((1, 1)), np.eye(1), np.eye(1))
        with pytest.raises(SingularMatrixError):
            freq_response(sys, 0.0)


class TestRngStream:
    def test_zero_sigma(self):
        assert RngStream(1).gaussian(0.0) == 0.0

    def test_determinism(self):
        a = RngStream(42)
        b = RngStream(42)
        assert [a.normal() for _ in range(100)] == [b.normal() for _ in range(100)]
        assert [a.randint(17) for _ in range(100)] == [b.randint(17) for _ in range(100)]

    def test_gaussian_moments(self):
        rng = RngStream(5)
        draws = np.array([rng.gaussian(1.0) for _ in range(100_000)])
        assert abs(draws.mean()) < 0.02
        assert 0.98 < draws.std() < 1.02

    def test_uniform_range(self):
        rng = RngStream(9)
        draws = [rng.uniform(-2.0, 3.0) for _ in range(1000)]
        assert all(-2.0 <= d < 3.0 for d in draws)

    def test_derived_streams_differ(self):
        a = derive_stream(42, 0)
        b = derive_stream(42, 1)
        assert [a.normal() for _ in range(5)] != [b.normal() for _ in range(5)]

    def test_spawn_matches_derive(self):
        assert RngStream(42).spawn(3).seed == derive_stream(42, 3).seed

    def test_shuffle_is_permutation(self):
        rng = RngStream(4)
        items = list(range(20))
        rng.shuffle(items)
        assert sorted(items) == list(range(20))
