"""Empirical correlations used as independent baselines for the extracted
two-phase parameters: Besagni aspect ratio, Hibiki Sauter mean diameter, and
Zeitoun interfacial area concentration, plus the dimensionless groups they
need (Eotvos and Reynolds numbers, Laplace length).

The bubble Reynolds number is an explicit input everywhere: it depends on a
relative-velocity model this library deliberately does not invent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "FluidProperties",
    "WATER_AIR",
    "besagni_aspect_ratio",
    "eotvos",
    "hibiki_smd",
    "laplace_length",
    "reynolds",
    "zeitoun_iac",
]


@dataclass(frozen=True)
class FluidProperties:
    """Fluid property set in SI units."""

    rho_l: float  # liquid density, kg/m^3
    rho_g: float  # gas density, kg/m^3
    sigma: float  # surface tension, N/m
    mu_l: float  # liquid dynamic viscosity, Pa s
    g: float = 9.81  # gravitational acceleration, m/s^2

    def __post_init__(self) -> None:
        for name in ("rho_l", "rho_g", "sigma", "mu_l", "g"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.rho_l > self.rho_g:
            raise ValueError("rho_l must exceed rho_g")

    @property
    def delta_rho(self) -> float:
        return self.rho_l - self.rho_g


# Water/air at room temperature and atmospheric pressure.
WATER_AIR = FluidProperties(rho_l=997.0, rho_g=1.2, sigma=0.0718, mu_l=1.0e-3)


def eotvos(props: FluidProperties, d_eq: float) -> float:
    """Eotvos number g * (rho_l - rho_g) * d_eq^2 / sigma."""
    if d_eq < 0:
        raise ValueError("d_eq must be nonnegative")
    return props.g * props.delta_rho * d_eq**2 / props.sigma


def reynolds(props: FluidProperties, j_f: float, D: float) -> float:
    """Liquid-phase Reynolds number j_f * rho_l * D / mu_l."""
    if j_f < 0 or D < 0:
        raise ValueError("j_f and D must be nonnegative")
    return j_f * props.rho_l * D / props.mu_l


def laplace_length(props: FluidProperties) -> float:
    """Capillary length sqrt(sigma / (g * (rho_l - rho_g))) in metres."""
    return math.sqrt(props.sigma / (props.g * props.delta_rho))


def besagni_aspect_ratio(Eo: float, Re: float) -> float:
    """Besagni bubble aspect ratio E = 1 / (1 + 0.45 * Eo * Re)^0.08."""
    product = Eo * Re
    if product < 0:
        raise ValueError("Eo * Re must be nonnegative")
    return (1.0 + 0.45 * product) ** -0.08


def hibiki_smd(
    Lo: float,
    D: float,
    alpha: float,
    N_Re_b: float,
    props: FluidProperties,
) -> float:
    """Hibiki Sauter mean diameter correlation, metres.

    D_SM = 1.63 (Lo/D)^-0.335 alpha^0.170 N_Re_b^-0.239 (rho_l/rho_g)^0.138 Lo
    """
    if not (Lo > 0 and D > 0):
        raise ValueError("Lo and D must be positive")
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if alpha == 0.0:
        return 0.0
    if not N_Re_b > 0:
        raise ValueError("bubble Reynolds number must be positive")
    return (
        1.63
        * (Lo / D) ** -0.335
        * alpha**0.170
        * N_Re_b**-0.239
        * (props.rho_l / props.rho_g) ** 0.138
        * Lo
    )


def zeitoun_iac(alpha: float, j_f: float, props: FluidProperties) -> float:
    """Zeitoun interfacial area concentration correlation, 1/m.

    a_i = 3.24 alpha^0.757 (g*drho/sigma)^0.55 (mu_l/(j_f*rho_l))^0.1
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if not j_f > 0:
        raise ValueError("j_f must be positive")
    if alpha == 0.0:
        return 0.0
    return (
        3.24
        * alpha**0.757
        * (props.g * props.delta_rho / props.sigma) ** 0.55
        * (props.mu_l / (j_f * props.rho_l)) ** 0.1
    )
