"""Orbital element sets, coordinate transformations, and Keplerian ephemerides.

All quantities are SI internally (m, s, rad, kg). AU, degrees, and MJD
appear only at I/O boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

AU = 1.495978707e11  # astronomical unit (m)
MU_SUN = 1.32712440018e20  # heliocentric gravitational parameter (m^3/s^2)
G0 = 9.80665  # standard gravity (m/s^2)
DAY_S = 86400.0  # one day (s)
YEAR_S = 365.25 * DAY_S  # Julian year (s)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Epoch:
    """Instant in time as a Modified Julian Date."""
    mjd: float  # days

    def __post_init__(self) -> None:
        if not math.isfinite(self.mjd):
            raise ValueError(f"epoch must be finite, got {self.mjd}")

    def seconds_from(self, other: "Epoch") -> float:
        """Elapsed seconds from `other` to this epoch."""
        return (self.mjd - other.mjd) * DAY_S


@dataclass(frozen=True)
class ClassicalElements:
    """Keplerian elements of an elliptic orbit.

    Attributes:
        a: Semi-major axis (m), > 0.
        e: Eccentricity, in [0, 1).
        i: Inclination (rad), in [0, pi].
        raan: Right ascension of the ascending node (rad).
        argp: Argument of periapsis (rad).
        nu: True anomaly (rad).
    """
    a: float
    e: float
    i: float
    raan: float
    argp: float
    nu: float

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError(f"semi-major axis must be positive, got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise ValueError(f"eccentricity must be in [0, 1), got {self.e}")
        if not 0.0 <= self.i <= math.pi:
            raise ValueError(f"inclination must be in [0, pi], got {self.i}")


@dataclass(frozen=True)
class Meoe:
    """Modified equinoctial orbital elements [p, f, g, h, k, L].

    Nonsingular for all elliptic orbits except i = pi. The true
    longitude L is stored unwrapped; every consumer is 2*pi periodic.
    """
    p: float  # semi-latus rectum (m)
    f: float
    g: float
    h: float
    k: float
    L: float  # true longitude (rad)

    def __post_init__(self) -> None:
        if not self.p > 0.0:
            raise ValueError(f"semi-latus rectum must be positive, got {self.p}")
        w = 1.0 + self.f * math.cos(self.L) + self.g * math.sin(self.L)
        if not w > 0.0:
            raise ValueError(f"radius denominator 1 + f cosL + g sinL = {w} <= 0")


@dataclass(frozen=True)
class CartesianState:
    """Inertial position (m) and velocity (m/s), 3-vectors."""
    r: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class Body:
    """Celestial body on a fixed Keplerian orbit about a central mass."""
    name: str
    elements: ClassicalElements
    ref_epoch: Epoch
    mu_central: float  # gravitational parameter of the central body (m^3/s^2)


def classical_to_meoe(ce: ClassicalElements) -> Meoe:
    """Convert classical elements to modified equinoctial elements.

    Rejects i = pi, where h and k are singular (tan(i/2) -> inf).
    """
    if ce.i >= math.pi - 1e-12:
        raise ValueError("equinoctial elements are singular at i = pi")
    tan_half_i = math.tan(0.5 * ce.i)
    return Meoe(
        p=ce.a * (1.0 - ce.e**2),
        f=ce.e * math.cos(ce.argp + ce.raan),
        g=ce.e * math.sin(ce.argp + ce.raan),
        h=tan_half_i * math.cos(ce.raan),
        k=tan_half_i * math.sin(ce.raan),
        L=ce.raan + ce.argp + ce.nu,
    )


def meoe_to_classical(oe: Meoe) -> ClassicalElements:
    """Invert `classical_to_meoe`. Angles come back wrapped to [0, 2*pi)."""
    e = math.hypot(oe.f, oe.g)
    if e >= 1.0:
        raise ValueError(f"non-elliptic element set (e = {e})")
    raan = math.atan2(oe.k, oe.h) % TWO_PI
    lon_peri = math.atan2(oe.g, oe.f) if e > 0.0 else raan  # raan + argp
    return ClassicalElements(
        a=oe.p / (1.0 - e**2),
        e=e,
        i=2.0 * math.atan(math.hypot(oe.h, oe.k)),
        raan=raan,
        argp=(lon_peri - raan) % TWO_PI,
        nu=(oe.L - lon_peri) % TWO_PI,
    )


def meoe_to_cartesian(oe: Meoe, mu: float) -> CartesianState:
    """Position and velocity of the osculating orbit described by `oe`."""
    cl, sl = math.cos(oe.L), math.sin(oe.L)
    alpha2 = oe.h**2 - oe.k**2
    s2 = 1.0 + oe.h**2 + oe.k**2
    w = 1.0 + oe.f * cl + oe.g * sl
    r = oe.p / w
    hk2 = 2.0 * oe.h * oe.k
    pos = (r / s2) * np.array([
        (1.0 + alpha2) * cl + hk2 * sl,
        (1.0 - alpha2) * sl + hk2 * cl,
        2.0 * (oe.h * sl - oe.k * cl),
    ])
    c = math.sqrt(mu / oe.p)
    vel = (c / s2) * np.array([
        -(sl + alpha2 * sl - hk2 * cl + oe.g - 2.0 * oe.f * oe.h * oe.k + alpha2 * oe.g),
        -(-cl + alpha2 * cl + hk2 * sl - oe.f + 2.0 * oe.g * oe.h * oe.k + alpha2 * oe.f),
        2.0 * (oe.h * cl + oe.k * sl + oe.f * oe.h + oe.g * oe.k),
    ])
    return CartesianState(r=pos, v=vel)


def solve_kepler(mean_anomaly: float, e: float, tol: float = 1e-14, max_iter: int = 50) -> float:
    """Solve E - e*sin(E) = M for the eccentric anomaly E.

    Newton iteration started at E0 = M + e*sin(M), with a Halley step
    as fallback whenever the Newton update is implausibly large.
    """
    if not 0.0 <= e < 1.0:
        raise ValueError(f"eccentricity must be in [0, 1), got {e}")
    # Reduce to [-pi, pi]; E tracks M through whole revolutions.
    m_wrapped = math.remainder(mean_anomaly, TWO_PI)
    offset = mean_anomaly - m_wrapped
    E = m_wrapped + e * math.sin(m_wrapped)
    for _ in range(max_iter):
        fE = E - e * math.sin(E) - m_wrapped
        fp = 1.0 - e * math.cos(E)
        step = fE / fp
        if abs(step) > 1.0:
            fpp = e * math.sin(E)
            step = fE / (fp - 0.5 * fE * fpp / fp)
        E -= step
        if abs(step) <= tol:
            break
    residual = E - e * math.sin(E) - m_wrapped
    if abs(residual) > 1e-13:
        raise RuntimeError(
            f"Kepler solve failed: M={mean_anomaly}, e={e}, residual={residual}")
    return E + offset


def true_to_eccentric(nu: float, e: float) -> float:
    """Eccentric anomaly from true anomaly (elliptic)."""
    return 2.0 * math.atan2(
        math.sqrt(1.0 - e) * math.sin(0.5 * nu),
        math.sqrt(1.0 + e) * math.cos(0.5 * nu),
    )


def eccentric_to_true(E: float, e: float) -> float:
    """True anomaly from eccentric anomaly (elliptic)."""
    return 2.0 * math.atan2(
        math.sqrt(1.0 + e) * math.sin(0.5 * E),
        math.sqrt(1.0 - e) * math.cos(0.5 * E),
    )


def propagate_body(body: Body, t: Epoch) -> tuple[ClassicalElements, Meoe, CartesianState]:
    """Two-body ephemeris of `body` at epoch `t`.

    Only the true anomaly (hence L) changes; the mean anomaly advances
    at the constant rate n = sqrt(mu/a^3). Energy and angular momentum
    are conserved exactly.
    """
    ce = body.elements
    n = math.sqrt(body.mu_central / ce.a**3)
    E0 = true_to_eccentric(ce.nu, ce.e)
    m0 = E0 - ce.e * math.sin(E0)
    m_now = m0 + n * t.seconds_from(body.ref_epoch)
    E_now = solve_kepler(m_now, ce.e)
    nu_now = eccentric_to_true(E_now, ce.e) % TWO_PI
    ce_now = ClassicalElements(a=ce.a, e=ce.e, i=ce.i, raan=ce.raan, argp=ce.argp, nu=nu_now)
    oe_now = classical_to_meoe(ce_now)
    oe_now = Meoe(p=oe_now.p, f=oe_now.f, g=oe_now.g, h=oe_now.h, k=oe_now.k,
                  L=oe_now.L % TWO_PI)
    return ce_now, oe_now, meoe_to_cartesian(oe_now, body.mu_central)


def orbital_period(a: float, mu: float) -> float:
    """Keplerian period 2*pi*sqrt(a^3/mu) (s)."""
    return TWO_PI * math.sqrt(a**3 / mu)


def true_longitude_span(L0_osc: float, Lf_osc: float, revs: int) -> float:
    """Total swept true longitude from L0 to Lf with `revs` extra revolutions.

    Returns ((Lf - L0) mod 2*pi) + 2*pi*revs.
    """
    if revs < 0:
        raise ValueError(f"revolution count must be non-negative, got {revs}")
    return (Lf_osc - L0_osc) % TWO_PI + TWO_PI * revs
