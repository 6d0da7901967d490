"""Pinned physical constants and unit conversions.

Everything downstream computes in Hartree atomic units (hbar = m_e = e =
a0 = 1, energies in Hartree); I/O layers convert at the boundary through
`convert`.  The constant table is a set of fixed literals, not runtime
configurable, so outputs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IncompatibleUnits

CONSTANTS_VERSION = "codata2018-pinned-1"


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 literals (SI) plus the two conversion factors used everywhere."""

    h: float = 6.62607015e-34           # Planck constant, J s (exact)
    c: float = 299792458.0              # speed of light, m/s (exact)
    eps0: float = 8.8541878128e-12      # electric constant, F/m
    e_charge: float = 1.602176634e-19   # elementary charge, C (exact)
    a0_m: float = 0.529177210903e-10    # Bohr radius, m
    hartree_J: float = 4.3597447222071e-18  # Hartree energy, J
    hartree_to_wavenumber: float = 219474.6313632  # cm^-1 per Hartree
    amu_to_electron_mass: float = 1822.888486
    fine_structure: float = 7.2973525693e-3

    @property
    def a0_nm(self) -> float:
        return self.a0_m * 1e9

    @property
    def hbar(self) -> float:
        return self.h / (2.0 * 3.141592653589793)

    @property
    def atomic_time_s(self) -> float:
        """One atomic time unit hbar/E_h in seconds."""
        return self.hbar / self.hartree_J


CONST = PhysicalConstants()

# Hartree per unit of ordinary frequency (E = h nu).
HARTREE_PER_HZ = CONST.h / CONST.hartree_J

# Dimension groups: factor converts one unit of the tag into the group's
# reference unit (Hartree for energy-like tags).  Singleton dimensions only
# admit the identity conversion.
_ENERGY_TO_HARTREE = {
    "Hartree": 1.0,
    "cm-1": 1.0 / CONST.hartree_to_wavenumber,
    "THz": 1.0e12 * HARTREE_PER_HZ,
    "kHz": 1.0e3 * HARTREE_PER_HZ,
    "s-1": HARTREE_PER_HZ,
}

_SINGLETONS = ("ea0", "a0", "amu", "MHz/(W/cm2)", "W/cm2")

_DIMENSION = {tag: "energy" for tag in _ENERGY_TO_HARTREE}
_DIMENSION.update({tag: tag for tag in _SINGLETONS})


def supported_units() -> tuple[str, ...]:
    return tuple(_DIMENSION)


def convert(value: float, src: str, dst: str) -> float:
    """Exact linear conversion between two supported unit tags.

    Raises IncompatibleUnits for unknown tags or cross-dimension requests.
    """
    if src not in _DIMENSION:
        raise IncompatibleUnits(f"unknown unit tag {src!r}")
    if dst not in _DIMENSION:
        raise IncompatibleUnits(f"unknown unit tag {dst!r}")
    if src == dst:
        return value
    if _DIMENSION[src] != _DIMENSION[dst]:
        raise IncompatibleUnits(f"cannot convert {src!r} -> {dst!r}")
    return value * _ENERGY_TO_HARTREE[src] / _ENERGY_TO_HARTREE[dst]


# -- derived factors used by the response and decay modules ------------------

# One atomic unit of (dipole^2 / energy) expressed as an energy shift per
# intensity, in MHz/(W/cm^2): (e a0)^2/E_h / (eps0 c) is J/(W/m^2); divide by
# h for Hz/(W/m^2), then 1e4 (per cm^2) * 1e-6 (MHz).
ALPHA_AU_TO_MHZ_PER_W_CM2 = (
    (CONST.e_charge * CONST.a0_m) ** 2
    / CONST.hartree_J
    / (CONST.eps0 * CONST.c)
    / CONST.h
    * 1.0e-2
)

# Same quantity but as energy shift (Hartree) per (W/cm^2).
ALPHA_AU_TO_HARTREE_PER_W_CM2 = (
    ALPHA_AU_TO_MHZ_PER_W_CM2 * 1.0e6 * HARTREE_PER_HZ
)

# Einstein A prefactor: A[s^-1] = EINSTEIN_A_PREFACTOR * omega_au^3 * d_au^2
# where omega is the transition energy in Hartree and d the dipole matrix
# element in e*a0.  This is omega^3 d^2/(3 pi eps0 hbar c^3) rewritten in
# atomic units: (4/3) alpha^3 omega^3 d^2 per atomic time.
EINSTEIN_A_PREFACTOR = (4.0 / 3.0) * CONST.fine_structure**3 / CONST.atomic_time_s
