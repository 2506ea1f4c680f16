"""Conversion between internal units (q = 1) and laboratory frequencies.

Laboratory inputs follow the nu = omega / 2 pi convention, in MHz; the
closed-form maps below work directly on nu because every 2 pi cancels:

    lambda/2pi = (1/2) (g/2pi) (Omega/2pi) / (Delta/2pi)
    q/2pi      = -(lambda_1/2pi)^2 / (omega_A/2pi)

A squeezing time in internal units (1/|q|) converts to nanoseconds through
the angular q, t[ns] = t_internal * 1e3 / (2 pi q[MHz]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .experiments import max_squeezing_point

#: lab reference rates for rubidium cavity experiments, nu = rate/2pi in MHz
DEFAULT_ATOM_DECAY_MHZ = 3.0
DEFAULT_PHOTON_DECAY_MHZ = 1.3


def raman_coupling_mhz(g_mhz: float, rabi_mhz: float, detuning_mhz: float) -> float:
    """Effective atom-photon coupling lambda/2pi from one Raman pair."""
    if detuning_mhz == 0.0:
        raise ValueError("detuning must be nonzero")
    return 0.5 * g_mhz * rabi_mhz / detuning_mhz


def spin_interaction_mhz(lambda_mhz: float, omega_a_mhz: float) -> float:
    """Dispersive spin-spin strength q/2pi; negative omega_A gives q > 0."""
    if omega_a_mhz == 0.0:
        raise ValueError("omega_A must be nonzero")
    return -(lambda_mhz**2) / omega_a_mhz


def internal_time_to_ns(t_internal: float, q_mhz: float) -> float:
    """Convert a time in units of 1/|q| to nanoseconds."""
    if q_mhz == 0.0:
        raise ValueError("q must be nonzero")
    return t_internal * 1e3 / (2.0 * math.pi * abs(q_mhz))


def decay_lifetime_ns(rate_mhz: float) -> float:
    """1/rate in ns for a rate quoted as rate/2pi in MHz."""
    return 1e3 / (2.0 * math.pi * rate_mhz)


@dataclass(frozen=True)
class PhysicalEstimate:
    """Laboratory-unit summary of one squeezing scenario."""

    lambda_1_mhz: float
    q_mhz: float
    omega_a_mhz: float
    atom_count: int
    chi: float
    xi_m_squared: float
    t_m_internal: float
    t_m_ns: float
    atom_lifetime_ns: float
    photon_lifetime_ns: float

    @property
    def faster_than_decay(self) -> bool:
        return self.t_m_ns < min(self.atom_lifetime_ns, self.photon_lifetime_ns)

    def summary(self) -> dict:
        return {
            "lambda_1_mhz": self.lambda_1_mhz,
            "q_mhz": self.q_mhz,
            "omega_a_mhz": self.omega_a_mhz,
            "atom_count": self.atom_count,
            "chi": self.chi,
            "xi_m_squared": self.xi_m_squared,
            "t_m_internal": self.t_m_internal,
            "t_m_ns": self.t_m_ns,
            "atom_lifetime_ns": self.atom_lifetime_ns,
            "photon_lifetime_ns": self.photon_lifetime_ns,
            "faster_than_decay": self.faster_than_decay,
        }


def estimate_physical(
    g_s1_mhz: float,
    rabi_s1_mhz: float,
    delta_s1_mhz: float,
    omega_a_mhz: float,
    atom_count: int = 100,
    chi: float = -1.0,
    gamma_mhz: float = DEFAULT_ATOM_DECAY_MHZ,
    kappa_mhz: float = DEFAULT_PHOTON_DECAY_MHZ,
    points: int = 2001,
) -> PhysicalEstimate:
    """Closed-form lambda_1 and q plus a simulated squeezing time in ns.

    The dynamics runs at omega_0 = 0 in internal units and only the time
    axis is rescaled by the physical q, so the squeezing level itself is
    unit-free.
    """
    lam = raman_coupling_mhz(g_s1_mhz, rabi_s1_mhz, delta_s1_mhz)
    q = spin_interaction_mhz(lam, omega_a_mhz)
    trace = max_squeezing_point(atom_count, chi, 0.0, points=points)
    return PhysicalEstimate(
        lambda_1_mhz=lam,
        q_mhz=q,
        omega_a_mhz=omega_a_mhz,
        atom_count=atom_count,
        chi=chi,
        xi_m_squared=trace.xi_m_squared,
        t_m_internal=trace.t_m,
        t_m_ns=internal_time_to_ns(trace.t_m, q),
        atom_lifetime_ns=decay_lifetime_ns(gamma_mhz),
        photon_lifetime_ns=decay_lifetime_ns(kappa_mhz),
    )
