"""The four benchmark plant models.

All plants share one interface: a state vector, a scalar control input in
"actuator units", a scalar tracked output, a ``derivative`` suitable for RK4,
and a ``linear_model`` used for LQI design and loop analysis (the AUV returns
its linearisation about straight-line travel).
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import CatalogError
from ..numerics import LinearStateSpace, inverse


class GenericLinearPlant:
    """Plant backed directly by a LinearStateSpace (single input/output)."""

    name = "linear"

    def __init__(self, ss, name=None):
        self.ss = ss
        if name is not None:
            self.name = name
        self.input_feedforward = 0.0

    @property
    def state_dim(self):
        return self.ss.n_states

    def initial_state(self):
        return np.zeros(self.state_dim)

    def derivative(self, x, u):
        return self.ss.a @ x + self.ss.b[:, 0] * u

    def output(self, x):
        return float(self.ss.c[0] @ x)

    def linear_model(self):
        return self.ss


class NmpPlant(GenericLinearPlant):
    """CSTR temperature loop with a right-half-plane zero.

    Transfer function (-1.135 s + 3.199) / (s^2 + 4.719 s + 5.47) in
    controllable canonical form.  The RHP zero at s ~ +2.82 causes the
    characteristic inverse (undershoot) step response.
    """

    name = "nmp"

    def __init__(self):
        ss = LinearStateSpace(
            np.array([[0.0, 1.0], [-5.47, -4.719]]),
            np.array([[0.0], [1.0]]),
            np.array([[3.199, -1.135]]),
        )
        super().__init__(ss, self.name)


class TmsPlant(GenericLinearPlant):
    """Two-mass-spring benchmark: force on body 1, position of body 2 sensed.

    States (x1, x2, v1, v2); m1 = m2 = k = 1.  Open-loop eigenvalues
    {0, 0, +-j sqrt(2)}; the non-collocated sensor makes it a classic
    robustness benchmark.
    """

    name = "tms"
    m1 = 1.0
    m2 = 1.0
    k = 1.0

    def __init__(self):
        k, m1, m2 = self.k, self.m1, self.m2
        ss = LinearStateSpace(
            np.array(
                [
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                    [-k / m1, k / m1, 0.0, 0.0],
                    [k / m2, -k / m2, 0.0, 0.0],
                ]
            ),
            np.array([[0.0], [0.0], [1.0 / m1], [0.0]]),
            np.array([[0.0, 1.0, 0.0, 0.0]]),
        )
        super().__init__(ss, self.name)

    def energy(self, x):
        """Spring plus kinetic energy (conserved when u = 0)."""
        spring = 0.5 * self.k * (x[0] - x[1]) ** 2
        kinetic = 0.5 * self.m1 * x[2] ** 2 + 0.5 * self.m2 * x[3] ** 2
        return spring + kinetic


@dataclass(frozen=True)
class AuvParams:
    """REMUS hydrodynamic coefficients for the sway/yaw model.

    y_rdot is not published with the rest of the set; it is taken equal to
    n_vdot by added-mass symmetry of the source vehicle.
    """

    m: float = 30.5
    i_z: float = 3.45
    x_g: float = 0.0
    y_vdot: float = -35.5
    y_rdot: float = 1.93
    y_uv: float = -28.6
    y_vv: float = -1310.0
    y_ur: float = 5.22
    y_rr: float = 0.63
    y_uudr: float = 21.37
    n_vdot: float = 1.93
    n_rdot: float = -4.88
    n_vv: float = -3.18
    n_rr: float = -94.0
    n_uudr: float = -17.5
    n_uv: float = -24.0
    n_ur: float = -2.0
    u0: float = 1.5

    def added_mass(self):
        return np.array(
            [
                [self.m - self.y_vdot, self.m * self.x_g - self.y_rdot],
                [self.m * self.x_g - self.n_vdot, self.i_z - self.n_rdot],
            ]
        )


class AuvPlant:
    """Nonlinear sway/yaw dynamics of a torpedo-shaped AUV at constant speed.

    States (v sway m/s, r yaw rate rad/s, psi heading rad).  The rudder
    command and the tracked heading output are both expressed in degrees;
    20 rad would be meaningless for a fin, and the saturation limits quoted
    for this vehicle (|dr| <= 20, rate <= 30/s) only make sense in degrees.
    """

    name = "auv"

    def __init__(self, params=None):
        self.params = params or AuvParams()
        self._m_inv = inverse(self.params.added_mass())
        self.input_feedforward = 0.0

    state_dim = 3

    def initial_state(self):
        return np.zeros(3)

    def derivative(self, x, u):
        p = self.params
        v, r = x[0], x[1]
        delta = math.radians(u)
        rhs_y = (
            (p.y_vv * abs(v) + p.y_uv * p.u0) * v
            + (p.y_rr * abs(r) + (p.y_ur - p.m) * p.u0) * r
            + p.y_uudr * p.u0 **2 * delta
        )
        rhs_n = (
            (p.n_vv * abs(v) + p.n_uv * p.u0) * v
            + (p.n_rr * abs(r) + (p.n_ur - p.m * p.x_g) * p.u0) * r
            + p.n_uudr * p.u0 **2 * delta
        )
        acc = self._m_inv @ np.array([rhs_y, rhs_n])
        return np.array([acc[0], acc[1], r])

    def output(self, x):
        return math.degrees(x[2])

    def linear_model(self):
        """Linearisation about v = r = 0 (the |.| terms vanish at origin)."""
        p = self.params
        jac = np.array(
            [
                [p.y_uv * p.u0, (p.y_ur - p.m) * p.u0],
                [p.n_uv * p.u0, (p.n_ur - p.m * p.x_g) * p.u0],
            ]
        )
        b2 = np.array([[p.y_uudr * p.u0 **2], [p.n_uudr * p.u0 **2]]) * math.pi / 180.0
        a2 = self._m_inv @ jac
        b2 = self._m_inv @ b2
        a = np.zeros((3, 3))
        a[:2, :2] = a2
        a[2, 1] = 1.0
        b = np.zeros((3, 1))
        b[:2] = b2
        c = np.array([[0.0, 0.0, 180.0 / math.pi]])
        return LinearStateSpace(a, b, c)


class CrazyfliePlant:
    """Reduced vertical-axis model of a 27 g quadrotor.

    m zdd = T - m g.  ``derivative`` takes the total thrust T; the
    environment's control channel is the thrust deviation from hover, with
    the hover feedforward m g ~ 0.26487 N added via ``input_feedforward``.
    """

    name = "cf"
    m = 0.027
    g = 9.81

    def __init__(self):
        self.input_feedforward = self.m * self.g

    state_dim = 2

    def initial_state(self):
        return np.zeros(2)

    def derivative(self, x, u):
        return np.array([x[1], u / self.m - self.g])

    def output(self, x):
        return float(x[0])

    def linear_model(self):
        """Deviation dynamics around hover (gravity cancelled by feedforward)."""
        return LinearStateSpace(
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            np.array([[0.0], [1.0 / self.m]]),
            np.array([[1.0, 0.0]]),
        )


_PLANTS = {
    "nmp": NmpPlant,
    "tms": TmsPlant,
    "auv": AuvPlant,
    "cf": CrazyfliePlant,
}


def make_plant(plant_id):
    try:
        return _PLANTS[plant_id]()
    except KeyError:
        raise CatalogError(f"unknown plant '{plant_id}' (have: {sorted(_PLANTS)})") from None
