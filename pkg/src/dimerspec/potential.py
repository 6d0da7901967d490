"""Potential-energy curves, transition-dipole functions, and system ingestion.

Tabulated curves use a natural cubic spline between samples, a fixed
long-range dispersion tail asymptote - sum(C_n / R^n) beyond ``r_tail``,
and a linear repulsive extrapolation from the two innermost samples.
Morse curves evaluate analytically.  Internal units are Hartree / a0
throughout; the text-file format is in cm^-1 / a0 and converted on load.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InvalidParameter, ParseError, ValidationError
from .units import CONST

ALLOWED_TAIL_POWERS = (3, 5, 6, 8)
TAIL_CONTINUITY_TOL = 1e-8  # Hartree


@dataclass(frozen=True)
class PotentialCurve:
    """One adiabatic electronic potential.

    ``samples`` is an (N, 2) array of (R in a0, V in Hartree) rows with
    strictly increasing R; ``tail`` is a tuple of (n, C_n) pairs with C_n in
    Hartree*a0^n.  Morse curves keep ``morse = (D_e, a, R_e)`` and ignore the
    spline path.
    """

    label: str
    omega: int
    symmetry: str
    asymptote: float
    samples: np.ndarray
    tail: tuple[tuple[int, float], ...] = ()
    r_tail: float = 0.0
    morse: tuple[float, float, float] | None = None

    def __post_init__(self):
        if self.omega not in (0, 1):
            raise ValidationError(f"curve {self.label!r}: omega must be 0 or 1")
        if self.symmetry not in ("g", "u"):
            raise ValidationError(f"curve {self.label!r}: symmetry must be 'g' or 'u'")
        for n, _ in self.tail:
            if n not in ALLOWED_TAIL_POWERS:
                raise ValidationError(
                    f"curve {self.label!r}: tail power {n} not in {ALLOWED_TAIL_POWERS}"
                )
        if self.morse is not None:
            d_e, a, r_e = self.morse
            if d_e <= 0 or a <= 0 or r_e <= 0:
                raise InvalidParameter("Morse parameters must be positive")
            return
        r = self.samples[:, 0]
        if r.size < 8:
            raise ValidationError(
                f"curve {self.label!r}: tabulated curves need >= 8 samples"
            )
        if np.any(np.diff(r) <= 0):
            raise ValidationError(f"curve {self.label!r}: R values must increase")
        if self.r_tail <= 0.0:
            object.__setattr__(self, "r_tail", float(r[-1]))
        if self.r_tail > r[-1] + 1e-12:
            raise ValidationError(
                f"curve {self.label!r}: r_tail beyond last tabulated point"
            )
        mismatch = abs(self._spline(self.r_tail) - self.tail_value(self.r_tail))
        if mismatch >= TAIL_CONTINUITY_TOL:
            raise ValidationError(
                f"curve {self.label!r}: table/tail mismatch {mismatch:.3e} Hartree "
                f"at r_tail={self.r_tail}"
            )
        self._check_single_minimum()

    def _check_single_minimum(self):
        v = self.samples[:, 1]
        below = v < self.asymptote - 1e-12
        interior = (v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:]) & below[1:-1]
        if int(np.count_nonzero(interior)) > 1:
            raise ValidationError(
                f"curve {self.label!r}: multiple minima below the asymptote"
            )

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.samples[:, 0], self.samples[:, 1], bc_type="natural")

    def tail_value(self, r):
        r = np.asarray(r, dtype=float)
        v = np.full(r.shape, self.asymptote)
        for n, c_n in self.tail:
            v = v - c_n / r**n
        return v if v.shape else float(v)

    def evaluate(self, r):
        """V(R) in Hartree for any R > 0 (scalar or array)."""
        r_arr = np.asarray(r, dtype=float)
        scalar = r_arr.ndim == 0
        r_arr = np.atleast_1d(r_arr)
        if self.morse is not None:
            d_e, a, r_e = self.morse
            x = 1.0 - np.exp(-a * (r_arr - r_e))
            out = self.asymptote + d_e * x * x - d_e
        else:
            r0, v0 = self.samples[0]
            r1, v1 = self.samples[1]
            inner_slope = (v1 - v0) / (r1 - r0)
            out = np.empty_like(r_arr)
            lo = r_arr < r0
            hi = r_arr > self.r_tail
            mid = ~(lo | hi)
            out[lo] = v0 + inner_slope * (r_arr[lo] - r0)
            out[mid] = self._spline(r_arr[mid])
            out[hi] = self.tail_value(r_arr[hi])
        return float(out[0]) if scalar else out

    @cached_property
    def well_minimum(self) -> tuple[float, float]:
        """(R_min, V_min) located on a dense refinement of the sample range."""
        if self.morse is not None:
            _, _, r_e = self.morse
            return r_e, self.asymptote - self.morse[0]
        r = np.linspace(self.samples[0, 0], self.samples[-1, 0], 4001)
        v = self.evaluate(r)
        i = int(np.argmin(v))
        lo, hi = max(i - 2, 0), min(i + 2, r.size - 1)
        rr = np.linspace(r[lo], r[hi], 2001)
        vv = self.evaluate(rr)
        j = int(np.argmin(vv))
        return float(rr[j]), float(vv[j])

    @property
    def depth(self) -> float:
        return self.asymptote - self.well_minimum[1]


@dataclass(frozen=True)
class DipoleFunction:
    """R-dependent electronic transition dipole between two channels (e*a0)."""

    bra_channel: str
    ket_channel: str
    samples: np.ndarray
    d_infinity: float

    def __post_init__(self):
        r = self.samples[:, 0]
        if r.size < 2:
            raise ValidationError("dipole tables need >= 2 samples")
        if np.any(np.diff(r) <= 0):
            raise ValidationError(
                f"dipole {self.bra_channel}-{self.ket_channel}: R must increase"
            )
        d_last = float(self.samples[-1, 1])
        if self.d_infinity == 0.0:
            ok = d_last == 0.0
        else:
            ok = abs(d_last - self.d_infinity) < 0.05 * abs(self.d_infinity)
        if not ok:
            raise ValidationError(
                f"dipole {self.bra_channel}-{self.ket_channel}: last sample "
                f"{d_last} deviates > 5% from d_infinity {self.d_infinity}"
            )

    @cached_property
    def _spline(self) -> CubicSpline:
        return CubicSpline(self.samples[:, 0], self.samples[:, 1], bc_type="natural")

    def evaluate(self, r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r_arr)
        r0 = self.samples[0, 0]
        r1 = self.samples[-1, 0]
        lo = r_arr < r0
        hi = r_arr > r1
        mid = ~(lo | hi)
        out[lo] = self.samples[0, 1]
        out[mid] = self._spline(r_arr[mid])
        out[hi] = self.d_infinity
        return float(out[0]) if np.asarray(r).ndim == 0 else out

    def connects(self, a: str, b: str) -> bool:
        return {self.bra_channel, self.ket_channel} == {a, b}


@dataclass(frozen=True)
class MoleculeSystem:
    """Immutable bundle of one ground curve, excited curves, and dipoles.

    ``reduced_mass`` is in electron masses.  The mutable ``cache`` dict is
    working storage for solvers; it never participates in equality.
    """

    reduced_mass: float
    ground: PotentialCurve
    excited: tuple[PotentialCurve, ...]
    dipoles: tuple[DipoleFunction, ...]
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.reduced_mass <= 0:
            raise ValidationError("reduced_mass must be positive")
        labels = {self.ground.label} | {c.label for c in self.excited}
        if len(labels) != 1 + len(self.excited):
            raise ValidationError("duplicate channel labels")
        for d in self.dipoles:
            for ch in (d.bra_channel, d.ket_channel):
                if ch not in labels:
                    raise ValidationError(
                        f"dipole references unknown channel {ch!r}"
                    )

    def curve(self, label: str) -> PotentialCurve:
        if label == self.ground.label:
            return self.ground
        for c in self.excited:
            if c.label == label:
                return c
        raise ValidationError(f"no channel named {label!r}")

    def channel_labels(self) -> tuple[str, ...]:
        return (self.ground.label,) + tuple(c.label for c in self.excited)

    def dipole_between(self, a: str, b: str) -> DipoleFunction | None:
        for d in self.dipoles:
            if d.connects(a, b):
                return d
        return None


def make_morse(d_e: float, a: float, r_e: float, asymptote: float,
               label: str = "morse", omega: int = 0,
               symmetry: str = "g") -> PotentialCurve:
    """Analytic Morse curve V(R) = asymptote + D_e(1 - e^{-a(R-R_e)})^2 - D_e."""
    if d_e <= 0 or a <= 0 or r_e <= 0:
        raise InvalidParameter("make_morse requires positive D_e, a, R_e")
    r = np.linspace(max(r_e - 4.0 / a, r_e * 0.05), r_e + 14.0 / a, 64)
    x = 1.0 - np.exp(-a * (r - r_e))
    samples = np.column_stack([r, asymptote + d_e * x * x - d_e])
    return PotentialCurve(
        label=label, omega=omega, symmetry=symmetry, asymptote=asymptote,
        samples=samples, tail=(), r_tail=float(r[-1]), morse=(d_e, a, r_e),
    )


def fit_tail_coefficients(samples: np.ndarray, asymptote: float,
                          auto_powers: list[int]) -> dict[int, float]:
    """Least-squares fit of the requested C_n over the trailing samples.

    Uses the last max(len(auto_powers), 2) samples, so a single auto C6 is
    the two-point algebraic fit of (asymptote - V) R^6.
    """
    k = max(len(auto_powers), 2)
    if samples.shape[0] < k:
        raise ValidationError("not enough trailing samples for tail fit")
    r = samples[-k:, 0]
    y = asymptote - samples[-k:, 1]
    basis = np.column_stack([r**-n for n in auto_powers])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return {n: float(c) for n, c in zip(auto_powers, coef)}


def _parse_table(text: str, what: str) -> np.ndarray:
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"{what}: expected two columns, got {line!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ParseError(f"{what}: bad number in {line!r}") from exc
    if not rows:
        raise ParseError(f"{what}: empty table")
    return np.array(rows, dtype=float)


def _table_from_section(sec, cfg_dir: Path, what: str) -> np.ndarray:
    if "table" in sec:
        return _parse_table(sec["table"], what)
    if "table_file" in sec:
        path = cfg_dir / sec["table_file"]
        if not path.exists():
            raise ParseError(f"{what}: table_file {path} not found")
        return _parse_table(path.read_text(), what)
    raise ParseError(f"{what}: needs 'table' or 'table_file'")


def _curve_from_section(name: str, sec, cfg_dir: Path) -> PotentialCurve:
    try:
        omega = int(sec.get("omega", "0"))
        symmetry = sec.get("symmetry", "g").strip()[0].lower()
        asym = float(sec.get("asymptote_cm1", "0.0")) / CONST.hartree_to_wavenumber
    except ValueError as exc:
        raise ParseError(f"curve {name!r}: {exc}") from exc

    if sec.get("form", "").strip().lower() == "morse":
        try:
            d_e = float(sec["d_e_cm1"]) / CONST.hartree_to_wavenumber
            a = float(sec["a_per_a0"])
            r_e = float(sec["r_e_a0"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"curve {name!r}: bad morse parameters") from exc
        return make_morse(d_e, a, r_e, asym, label=name, omega=omega,
                          symmetry=symmetry)

    table = _table_from_section(sec, cfg_dir, f"curve {name!r}")
    table = table.copy()
    table[:, 1] /= CONST.hartree_to_wavenumber

    tail_given: list[tuple[int, float]] = []
    auto_powers: list[int] = []
    for n in ALLOWED_TAIL_POWERS:
        key = f"C{n}"
        if key in sec:
            raw = sec[key].strip()
            if raw.lower() == "auto":
                auto_powers.append(n)
            else:
                try:
                    # file units: cm^-1 * a0^n
                    tail_given.append(
                        (n, float(raw) / CONST.hartree_to_wavenumber))
                except ValueError as exc:
                    raise ParseError(f"curve {name!r}: bad {key}") from exc
    if auto_powers:
        fitted = fit_tail_coefficients(table, asym, auto_powers)
        tail_given.extend(sorted(fitted.items()))
    tail = tuple(sorted(tail_given))
    r_tail = float(sec.get("r_tail_a0", "0") or 0.0)
    return PotentialCurve(label=name, omega=omega, symmetry=symmetry,
                          asymptote=asym, samples=table, tail=tail,
                          r_tail=r_tail)


def load_system(path) -> MoleculeSystem:
    """Parse the structured-text system file into a validated MoleculeSystem."""
    path = Path(path)
    cp = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#",),
        inline_comment_prefixes=("#",), strict=True, interpolation=None,
    )
    cp.optionxform = str
    try:
        with io.StringIO(path.read_text()) as fh:
            cp.read_file(fh, source=str(path))
    except FileNotFoundError:
        raise
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc

    if "system" not in cp:
        raise ParseError(f"{path}: missing [system] section")
    sys_sec = cp["system"]
    try:
        mass_amu = float(sys_sec["reduced_mass_amu"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: bad or missing reduced_mass_amu") from exc
    ground_label = sys_sec.get("ground", "").strip()

    curves: dict[str, PotentialCurve] = {}
    dipoles: list[DipoleFunction] = []
    for section in cp.sections():
        if section == "system":
            continue
        if section.startswith("curve."):
            name = section[len("curve."):]
            curves[name] = _curve_from_section(name, cp[section], path.parent)
        elif section.startswith("dipole."):
            rest = section[len("dipole."):]
            if "." not in rest:
                raise ParseError(f"{path}: dipole section needs bra.ket: {section}")
            bra, ket = rest.split(".", 1)
            sec = cp[section]
            try:
                d_inf = float(sec["d_infinity_ea0"])
            except (KeyError, ValueError) as exc:
                raise ParseError(f"{section}: bad d_infinity_ea0") from exc
            table = _table_from_section(sec, path.parent, section)
            dipoles.append(DipoleFunction(bra, ket, table, d_inf))
        else:
            raise ParseError(f"{path}: unknown section [{section}]")

    if not curves:
        raise ParseError(f"{path}: no curves defined")
    if not ground_label:
        gerade = [c for c in curves.values() if c.symmetry == "g"]
        if len(gerade) != 1:
            raise ParseError(f"{path}: set 'ground =' in [system]")
        ground_label = gerade[0].label
    if ground_label not in curves:
        raise ValidationError(f"{path}: ground channel {ground_label!r} undefined")

    ground = curves.pop(ground_label)
    return MoleculeSystem(
        reduced_mass=mass_amu * CONST.amu_to_electron_mass,
        ground=ground,
        excited=tuple(curves[k] for k in sorted(curves)),
        dipoles=tuple(dipoles),
    )


def evaluate_potential(curve: PotentialCurve, r):
    """Module-level evaluation wrapper (total for R > 0)."""
    return curve.evaluate(r)


def evaluate_dipole(fn: DipoleFunction, r):
    return fn.evaluate(r)
