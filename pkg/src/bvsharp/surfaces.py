"""Closed analytic surfaces: curvature, geodesic balls, and achievability.

Three model surfaces cover all the certificate branches:

* round sphere of radius r        (constant positive curvature),
* spheroid with semi-axes (a, c)  (nonconstant positive curvature),
* flat torus [0,L1] x [0,L2]      (zero curvature, the negative control).

The scalar curvature convention is S = 2K (twice the Gaussian
curvature), fixed by the Gauss-Bonnet identity int_M S = 4 pi chi(M)
that the classifier relies on.

Geodesic balls on the spheroid are computed in geodesic polar
coordinates: unit-speed geodesics are integrated from the center, the
Jacobi field J along each of them solves J'' + K J = 0 with J(0) = 0,
J'(0) = 1, and then

    area(B(a, eps))     = int_0^{2pi} int_0^eps J(s, alpha) ds dalpha,
    length(dB(a, eps))  = int_0^{2pi} J(eps, alpha) dalpha.

For a pole-centered ball the rotational symmetry reduces this to a
single meridian integration.  For generic centers the geodesics are
integrated in the R^3 embedding, which has no coordinate singularities
at the poles.  Points are parametric pairs (theta, phi) on the sphere
and spheroid (polar angle from the north pole, longitude) and (x, y)
on the torus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, simpson

from .constants import (
    gamma_half_integer,
    sharp_sobolev_constant,
    unit_sphere_area,
)
from .profiles import QuotientValue, beta_eps

__all__ = [
    "SurfaceModel",
    "AchievabilityVerdict",
    "scalar_curvature",
    "geodesic_ball_area",
    "geodesic_circle_length",
    "gray_expansion",
    "surface_two_valued_quotient",
    "critical_curvature_threshold",
    "gauss_bonnet_check",
    "hemisphere_certificate",
    "HemisphereCertificate",
    "classify_achievability",
]


@dataclass
class SurfaceModel:
    """Analytic closed surface; immutable in use (area cached lazily)."""

    kind: str  # "sphere" | "spheroid" | "flat-torus"
    r: float = 1.0
    a: float = 1.0
    c: float = 1.0
    L1: float = 1.0
    L2: float = 1.0
    _area: float | None = None

    @staticmethod
    def sphere(r: float = 1.0) -> "SurfaceModel":
        if r <= 0:
            raise ValueError("sphere radius must be positive")
        return SurfaceModel(kind="sphere", r=r)

    @staticmethod
    def spheroid(a: float, c: float) -> "SurfaceModel":
        if a <= 0 or c <= 0:
            raise ValueError("spheroid semi-axes must be positive")
        return SurfaceModel(kind="spheroid", a=a, c=c)

    @staticmethod
    def flat_torus(L1: float, L2: float) -> "SurfaceModel":
        if L1 <= 0 or L2 <= 0:
            raise ValueError("torus side lengths must be positive")
        return SurfaceModel(kind="flat-torus", L1=L1, L2=L2)

    # ----- invariants of the model --------------------------------------

    @property
    def euler_characteristic(self) -> int:
        return 0 if self.kind == "flat-torus" else 2

    @property
    def area(self) -> float:
        if self._area is None:
            if self.kind == "sphere":
                self._area = 4.0 * math.pi * self.r**2
            elif self.kind == "flat-torus":
                self._area = self.L1 * self.L2
            else:
                a, c = self.a, self.c
                val, _ = quad(
                    lambda th: a * math.sin(th) * math.sqrt(self._metric_E(th)),
                    0.0, math.pi, epsabs=1e-13, epsrel=1e-13,
                )
                self._area = 2.0 * math.pi * val
        return self._area

    def injectivity_radius(self) -> float:
        """Conservative global lower bound on the injectivity radius."""
        if self.kind == "sphere":
            return math.pi * self.r
        if self.kind == "flat-torus":
            return 0.5 * min(self.L1, self.L2)
        return 0.5 * math.pi * min(self.a, self.c)

    def pole(self) -> tuple:
        if self.kind == "flat-torus":
            return (0.0, 0.0)
        return (0.0, 0.0)

    # ----- local geometry -------------------------------------------------

    def _metric_E(self, theta):
        """theta-theta metric coefficient of the spheroid meridian."""
        return self.a**2 * np.cos(theta) ** 2 + self.c**2 * np.sin(theta) ** 2

    def gaussian_curvature(self, point) -> float:
        if self.kind == "sphere":
            return 1.0 / self.r**2
        if self.kind == "flat-torus":
            return 0.0
        theta = float(point[0])
        return float(self.c**2 / self._metric_E(theta) ** 2)

    def metric(self, point):
        """Diagonal metric (E, G) in parametric coordinates at `point`."""
        if self.kind == "sphere":
            theta = float(point[0])
            return self.r**2, (self.r * math.sin(theta)) ** 2
        if self.kind == "flat-torus":
            return 1.0, 1.0
        theta = float(point[0])
        return float(self._metric_E(theta)), (self.a * math.sin(theta)) ** 2

    def curvature_range(self):
        """(S_min, S_max, argmax point) of the scalar curvature."""
        if self.kind == "sphere":
            s = 2.0 / self.r**2
            return s, s, (0.0, 0.0)
        if self.kind == "flat-torus":
            return 0.0, 0.0, (0.0, 0.0)
        s_pole = 2.0 * self.c**2 / self.a**4
        s_equator = 2.0 / self.c**2
        # K is monotone along the meridian, so the extrema are at the ends.
        if s_pole >= s_equator:
            return s_equator, s_pole, (0.0, 0.0)
        return s_pole, s_equator, (0.5 * math.pi, 0.0)


def scalar_curvature(surface: SurfaceModel, point) -> float:
    """Scalar curvature S(p) = 2 K(p) (so that int_M S = 4 pi chi)."""
    return 2.0 * surface.gaussian_curvature(point)


# --------------------------------------------------------------------------
# geodesic-ball quadrature


def _check_radius(surface: SurfaceModel, eps: float):
    if eps <= 0:
        raise ValueError("eps must be positive")
    inj = surface.injectivity_radius()
    if eps > inj:
        raise ValueError(
            f"geodesic radius {eps} exceeds the injectivity bound {inj:.6g} "
            f"for this {surface.kind}"
        )


def _spheroid_pole_profile(a: float, c: float, eps: float, steps: int):
    """Meridian state (theta, J) sampled at `steps`+1 nodes from the pole.

    theta' = 1/sqrt(E(theta)),   J'' = -K(theta) J,   K = c^2/E^2.
    """

    def rhs(state):
        theta, J, Jp = state
        E = a * a * math.cos(theta) ** 2 + c * c * math.sin(theta) ** 2
        K = c * c / (E * E)
        return np.array([1.0 / math.sqrt(E), Jp, -K * J])

    ds = eps / steps
    state = np.array([0.0, 0.0, 1.0])
    J_nodes = np.empty(steps + 1)
    theta_nodes = np.empty(steps + 1)
    J_nodes[0], theta_nodes[0] = 0.0, 0.0
    for k in range(steps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * ds * k1)
        k3 = rhs(state + 0.5 * ds * k2)
        k4 = rhs(state + ds * k3)
        state = state + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        theta_nodes[k + 1] = state[0]
        J_nodes[k + 1] = state[1]
    return theta_nodes, J_nodes


def _spheroid_generic_profile(a: float, c: float, center, eps: float,
                              n_dirs: int, steps: int):
    """Jacobi profiles J(s_k, alpha_m) for geodesics from a generic center.

    Integration happens in the R^3 embedding of the spheroid
    (x1^2+x2^2)/a^2 + x3^2/c^2 = 1, which is immune to the coordinate
    degeneracy at the poles; the state is re-projected to the surface
    after every step.
    """
    theta0, phi0 = float(center[0]), float(center[1])
    st, ct = math.sin(theta0), math.cos(theta0)
    sp, cp = math.sin(phi0), math.cos(phi0)
    p0 = np.array([a * st * cp, a * st * sp, c * ct])
    E0 = math.sqrt(a * a * ct * ct + c * c * st * st)
    e1 = np.array([a * ct * cp, a * ct * sp, -c * st]) / E0
    e2 = np.array([-sp, cp, 0.0])

    alphas = np.linspace(0.0, 2.0 * math.pi, n_dirs, endpoint=False)
    x = np.repeat(p0[:, None], n_dirs, axis=1)
    v = np.outer(e1, np.cos(alphas)) + np.outer(e2, np.sin(alphas))
    J = np.zeros(n_dirs)
    Jp = np.ones(n_dirs)

    inv_a2 = 1.0 / (a * a)
    inv_c2 = 1.0 / (c * c)

    def accel(x, v):
        gx = 2.0 * np.array([x[0] * inv_a2, x[1] * inv_a2, x[2] * inv_c2])
        vAv = 2.0 * (v[0] ** 2 * inv_a2 + v[1] ** 2 * inv_a2 + v[2] ** 2 * inv_c2)
        lam = -vAv / np.sum(gx * gx, axis=0)
        return lam * gx

    def curvature(x):
        W = c * c + (a * a - c * c) * (x[2] ** 2) / (c * c)
        return c * c / (W * W)

    ds = eps / steps
    J_nodes = np.empty((steps + 1, n_dirs))
    J_nodes[0] = 0.0
    for k in range(steps):
        # RK4 on the joint state (x, v, J, J').
        a1x, a1v, a1J, a1Jp = v, accel(x, v), Jp, -curvature(x) * J
        x2, v2, J2, Jp2 = x + 0.5 * ds * a1x, v + 0.5 * ds * a1v, J + 0.5 * ds * a1J, Jp + 0.5 * ds * a1Jp
        a2x, a2v, a2J, a2Jp = v2, accel(x2, v2), Jp2, -curvature(x2) * J2
        x3, v3, J3, Jp3 = x + 0.5 * ds * a2x, v + 0.5 * ds * a2v, J + 0.5 * ds * a2J, Jp + 0.5 * ds * a2Jp
        a3x, a3v, a3J, a3Jp = v3, accel(x3, v3), Jp3, -curvature(x3) * J3
        x4, v4, J4, Jp4 = x + ds * a3x, v + ds * a3v, J + ds * a3J, Jp + ds * a3Jp
        a4x, a4v, a4J, a4Jp = v4, accel(x4, v4), Jp4, -curvature(x4) * J4
        x = x + (ds / 6.0) * (a1x + 2.0 * a2x + 2.0 * a3x + a4x)
        v = v + (ds / 6.0) * (a1v + 2.0 * a2v + 2.0 * a3v + a4v)
        J = J + (ds / 6.0) * (a1J + 2.0 * a2J + 2.0 * a3J + a4J)
        Jp = Jp + (ds / 6.0) * (a1Jp + 2.0 * a2Jp + 2.0 * a3Jp + a4Jp)

        # Project back to the surface and to unit speed.
        F = (x[0] ** 2 + x[1] ** 2) * inv_a2 + x[2] ** 2 * inv_c2 - 1.0
        gx = 2.0 * np.array([x[0] * inv_a2, x[1] * inv_a2, x[2] * inv_c2])
        x = x - (F / np.sum(gx * gx, axis=0)) * gx
        gx = 2.0 * np.array([x[0] * inv_a2, x[1] * inv_a2, x[2] * inv_c2])
        nhat = gx / np.sqrt(np.sum(gx * gx, axis=0))
        v = v - np.sum(v * nhat, axis=0) * nhat
        v = v / np.sqrt(np.sum(v * v, axis=0))
        J_nodes[k + 1] = J
    return J_nodes


def _even_steps(eps: float) -> int:
    steps = max(256, int(math.ceil(eps / 0.002)))
    return steps + (steps % 2)


def geodesic_ball_area(surface: SurfaceModel, center, eps: float) -> float:
    """Area of the geodesic ball B(center, eps); eps within injectivity."""
    _check_radius(surface, eps)
    if surface.kind == "sphere":
        return 2.0 * math.pi * surface.r**2 * (1.0 - math.cos(eps / surface.r))
    if surface.kind == "flat-torus":
        return math.pi * eps**2
    theta0 = float(center[0])
    steps = _even_steps(eps)
    s = np.linspace(0.0, eps, steps + 1)
    if min(abs(theta0), abs(math.pi - theta0)) < 1e-8:
        _, J = _spheroid_pole_profile(surface.a, surface.c, eps, steps)
        return 2.0 * math.pi * float(simpson(J, x=s))
    J_nodes = _spheroid_generic_profile(surface.a, surface.c, center, eps, 256, steps)
    per_dir = simpson(J_nodes, x=s, axis=0)
    return 2.0 * math.pi * float(np.mean(per_dir))


def geodesic_circle_length(surface: SurfaceModel, center, eps: float) -> float:
    """Perimeter of the geodesic ball B(center, eps)."""
    _check_radius(surface, eps)
    if surface.kind == "sphere":
        return 2.0 * math.pi * surface.r * math.sin(eps / surface.r)
    if surface.kind == "flat-torus":
        return 2.0 * math.pi * eps
    theta0 = float(center[0])
    steps = _even_steps(eps)
    if min(abs(theta0), abs(math.pi - theta0)) < 1e-8:
        _, J = _spheroid_pole_profile(surface.a, surface.c, eps, steps)
        return 2.0 * math.pi * float(J[-1])
    J_nodes = _spheroid_generic_profile(surface.a, surface.c, center, eps, 256, steps)
    return 2.0 * math.pi * float(np.mean(J_nodes[-1]))


def gray_expansion(S: float, eps: float, n: int) -> float:
    """Two-term geodesic-ball volume expansion (Gray's small-ball formula),

        (pi^(n/2) eps^n / Gamma(n/2+1)) * (1 - S eps^2 / (6 (n+2))).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    lead = math.pi ** (n / 2.0) * eps**n / gamma_half_integer(n / 2.0 + 1.0)
    return lead * (1.0 - S * eps**2 / (6.0 * (n + 2)))


def geodesic_circle_expansion(S: float, eps: float, n: int) -> float:
    """Two-term geodesic-sphere perimeter expansion,

        (n pi^(n/2) eps^(n-1) / Gamma(n/2+1)) * (1 - S eps^2 / (6 n)).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 2:
        raise ValueError("dimension must be >= 2")
    lead = n * math.pi ** (n / 2.0) * eps ** (n - 1) / gamma_half_integer(n / 2.0 + 1.0)
    return lead * (1.0 - S * eps**2 / (6.0 * n))


# --------------------------------------------------------------------------
# quotients and certificates


def surface_two_valued_quotient(surface: SurfaceModel, center, eps: float,
                                q: float, n: int = 2) -> QuotientValue:
    """Exact quadrature quotient of chi_B - beta chi_complement on M."""
    if not 0.0 < q < n / (n - 1):
        raise ValueError(f"q must lie in (0, {n/(n-1)}), got {q}")
    ball = geodesic_ball_area(surface, center, eps)
    perim = geodesic_circle_length(surface, center, eps)
    total = surface.area
    beta = beta_eps(total, ball, q)
    p = n / (n - 1)
    numerator = (1.0 + beta) * perim
    denominator = (ball + beta**p * (total - ball)) ** (1.0 - 1.0 / n)
    return QuotientValue.against(numerator, denominator, sharp_sobolev_constant(n))


def critical_curvature_threshold(n: int, area: float) -> float:
    """Scalar-curvature threshold for the critical-exponent certificate.

    Equals the scalar curvature of the round n-sphere with the given
    n-volume,

        n (n-1) (sigma_n / area)^(2/n),    sigma_n = |S^n|,

    which for n = 2 reduces to 8 pi / area.  The round sphere itself
    sits exactly at the threshold in every dimension, so the strict
    inequality required by the certificate just fails there.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if area <= 0:
        raise ValueError("area must be positive")
    return n * (n - 1) * (unit_sphere_area(n) / area) ** (2.0 / n)


def gauss_bonnet_check(surface: SurfaceModel):
    """Numerically integrated int_M S dmu and its target 4 pi chi(M)."""
    target = 4.0 * math.pi * surface.euler_characteristic
    if surface.kind == "flat-torus":
        # S vanishes identically; a plain Riemann sum keeps the check honest.
        xs = np.linspace(0.0, surface.L1, 64, endpoint=False)
        ys = np.linspace(0.0, surface.L2, 64, endpoint=False)
        cell = (surface.L1 / 64) * (surface.L2 / 64)
        integral = float(np.sum(np.zeros((64, 64))) * cell)
        return integral, target
    if surface.kind == "sphere":
        r = surface.r
        val, _ = quad(lambda th: (2.0 / r**2) * r * r * math.sin(th), 0.0, math.pi,
                      epsabs=1e-13, epsrel=1e-13)
        return 2.0 * math.pi * val, target
    a, c = surface.a, surface.c

    def integrand(th):
        E = a * a * math.cos(th) ** 2 + c * c * math.sin(th) ** 2
        S = 2.0 * c * c / (E * E)
        return S * a * math.sin(th) * math.sqrt(E)

    val, _ = quad(integrand, 0.0, math.pi, epsabs=1e-13, epsrel=1e-13)
    return 2.0 * math.pi * val, target


@dataclass(frozen=True)
class HemisphereCertificate:
    quotient: QuotientValue
    residual: float
    equals_c_star: bool


def hemisphere_certificate(q: float) -> HemisphereCertificate:
    """The hemisphere-difference profile on the unit sphere.

    u = chi(northern hemisphere) - chi(southern hemisphere) has jump
    height 2 across the equator of length 2 pi, so |Du| = 4 pi, while
    int |u|^2 = 4 pi; the quotient is 4 pi / sqrt(4 pi) = 2 sqrt(pi),
    exactly the sharp constant c*_2.  The antipodal symmetry makes the
    constraint residual vanish for every exponent q.
    """
    if not 0.0 < q < 2.0:
        raise ValueError(f"q must lie in (0, 2), got {q}")
    hemisphere = 2.0 * math.pi
    residual = hemisphere * 1.0 + hemisphere * (-1.0)  # sgn(+-1)|+-1|^q
    numerator = 2.0 * (2.0 * math.pi)  # jump height 2, equator length 2 pi
    denominator = math.sqrt(4.0 * math.pi)
    qv = QuotientValue.against(numerator, denominator, sharp_sobolev_constant(2))
    equals = abs(qv.value - sharp_sobolev_constant(2)) <= 1e-12
    return HemisphereCertificate(quotient=qv, residual=residual, equals_c_star=equals)


# --------------------------------------------------------------------------
# achievability classifier


@dataclass(frozen=True)
class AchievabilityVerdict:
    """Outcome of the certificate decision tree.

    justification is one of the rule tags "Thm4".."Thm8" (or "none");
    an "achieved" verdict always carries a witness whose hypothesis can
    be re-checked from the fields stored in it.
    """

    verdict: str
    justification: str
    witness: dict | None


def classify_achievability(surface: SurfaceModel, q: float, n: int = 2) -> AchievabilityVerdict:
    """Decide achievability of the sharp constant on a closed surface.

    Rules are tried in priority order:

      (i)   round sphere, n = 2, q in (0, 2)          -> "Thm8"
      (ii)  n >= 3 with max S > 0                      -> "Thm4"
      (iii) n = 2, chi = 2, nonconstant S              -> "Thm7"
      (iv)  n = 2, max S > critical threshold          -> "Thm6"
      (v)   n = 2, q < 1, max S > 0                    -> "Thm5"

    and anything that matches none of them is reported inconclusive
    (the zero-curvature flat torus, for instance).
    """
    if not 0.0 < q < n / (n - 1):
        raise ValueError(f"q must lie in (0, {n/(n-1)}), got {q}")
    s_min, s_max, argmax_point = surface.curvature_range()
    spread = s_max - s_min
    constant_curvature = spread <= 1e-12 * max(1.0, abs(s_max))

    is_round_sphere = surface.kind == "sphere" or (
        surface.euler_characteristic == 2 and constant_curvature and s_max > 0
    )
    if n == 2 and is_round_sphere:
        return AchievabilityVerdict(
            verdict="achieved",
            justification="Thm8",
            witness={"point": list(argmax_point), "S_a": s_max, "q": q},
        )
    if n >= 3 and s_max > 0:
        return AchievabilityVerdict(
            verdict="achieved",
            justification="Thm4",
            witness={"point": list(argmax_point), "S_a": s_max},
        )
    if n == 2 and surface.euler_characteristic == 2 and not constant_curvature:
        return AchievabilityVerdict(
            verdict="achieved",
            justification="Thm7",
            witness={
                "point": list(argmax_point),
                "S_a": s_max,
                "S_spread": spread,
                "chi": surface.euler_characteristic,
            },
        )
    if n == 2:
        threshold = critical_curvature_threshold(2, surface.area)
        if s_max > threshold:
            return AchievabilityVerdict(
                verdict="achieved",
                justification="Thm6",
                witness={"point": list(argmax_point), "S_a": s_max, "threshold": threshold},
            )
        if q < 1.0 and s_max > 0:
            return AchievabilityVerdict(
                verdict="achieved",
                justification="Thm5",
                witness={"point": list(argmax_point), "S_a": s_max, "q": q},
            )
    return AchievabilityVerdict(verdict="inconclusive", justification="none", witness=None)
