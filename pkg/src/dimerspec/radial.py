"""Single-channel radial Schrodinger solver.

Bound levels come from Numerov shooting: node-count bisection brackets each
eigenvalue (the outward solution's interior node count equals the number of
eigenvalues below E), then a matching-derivative secant iteration at the
outermost classical turning point polishes it.  Each eigenvalue is solved on
the working grid and on a half-step grid and Richardson-extrapolated, which
removes the O(h^4) discretization bias.  Continuum states are
energy-normalized by matching the asymptotic amplitude to
sqrt(2*mu/(pi*hbar^2*k)).

Grid policy (fixed so results are reproducible):
  * step h = (de Broglie wavelength at the well minimum)/ppw, ppw = 40;
  * R_min where the inner wall exceeds the working energy by a large factor,
    capped so the Numerov stability parameter h^2*W/12 stays below 0.4;
  * R_max where the bound tail has decayed below ~1e-14 of its peak for the
    shallowest binding resolved (1e-10 Hartree), or three asymptotic
    oscillations past the point where the potential is negligible for
    continuum states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._numutil import linear_fit, simpson_uniform
from .errors import (
    ConvergenceError,
    InsufficientLevels,
    InvalidEnergy,
    ValidationError,
)
from .potential import MoleculeSystem, PotentialCurve

DEFAULT_PPW = 40
THRESHOLD_BINDING = 1e-10     # Hartree; levels bound by less are dropped
_TAIL_EFOLDS = 33.0           # forbidden-region padding, exp(-33) ~ 5e-15
_WALL_FACTOR = 500.0
_STABILITY_CAP = 0.4          # max h^2*|W|/12 on the inner wall


@dataclass(frozen=True)
class RovibLevel:
    channel: str
    v: int
    v_from_top: int
    J: int
    energy: float           # Hartree, absolute (same zero as curve asymptotes)
    binding_energy: float   # Hartree, asymptote - energy

    def selector(self) -> str:
        return f"v={self.v}"


@dataclass(frozen=True)
class RadialWavefunction:
    channel: str
    J: int
    energy: float
    r0: float
    step: float
    values: np.ndarray
    kind: str                      # "bound" | "continuum"
    level: RovibLevel | None = None
    k_asym: float | None = None
    phase_shift: float | None = None

    @property
    def r(self) -> np.ndarray:
        return self.r0 + self.step * np.arange(self.values.size)

    @property
    def r_max(self) -> float:
        return self.r0 + self.step * (self.values.size - 1)


@dataclass(frozen=True)
class RadialGrid:
    r0: float
    h: float
    n: int
    v_pot: np.ndarray          # V(R) in Hartree at the nodes
    i_well: int                # index of the potential minimum
    tail_env: np.ndarray       # cummax of v_pot[i_well:], for turning lookups

    @property
    def r(self) -> np.ndarray:
        return self.r0 + self.h * np.arange(self.n)

    def turning_index(self, energy: float) -> int:
        j = int(np.searchsorted(self.tail_env, energy))
        return min(self.i_well + j, self.n - 1)


def _vbase(grid: RadialGrid, mu: float, J: int) -> np.ndarray:
    """2*mu*V_eff on the grid; the centrifugal part J(J+1)/R^2 is mass-free."""
    vb = 2.0 * mu * grid.v_pot
    if J:
        vb = vb + J * (J + 1) / grid.r**2
    return vb


def _wall_r_min(curve: PotentialCurve, e_top: float, depth_scale: float,
                h: float, mu: float) -> float:
    """Walk inward from the well until the wall is deep enough (or capped)."""
    r_well, _ = curve.well_minimum
    cap = _STABILITY_CAP * 12.0 / (2.0 * mu * h * h)
    target = min(_WALL_FACTOR * depth_scale, cap)
    r = r_well
    while r > 2.0 * h:
        r -= h
        if curve.evaluate(r) - e_top >= target:
            return r
    return max(r, h)


def _outer_radius(curve: PotentialCurve, v_target: float, r_lo: float) -> float:
    """Smallest R >= r_lo with V(R) >= v_target on the outer branch."""
    r_hi = max(r_lo * 2.0, r_lo + 10.0)
    for _ in range(200):
        if curve.evaluate(r_hi) >= v_target:
            break
        r_hi *= 1.6
    else:
        return r_hi
    lo, hi = r_lo, r_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if curve.evaluate(mid) >= v_target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-9 * hi:
            break
    return hi


def _build_grid(curve: PotentialCurve, mu: float, ppw: int, floor: float,
                halve: bool = False) -> RadialGrid:
    r_well, v_min = curve.well_minimum
    depth = curve.asymptote - v_min
    if depth <= 0:
        r0 = max(r_well, 1e-3)
        r = np.linspace(r0, r0 + 10.0, 64)
        vp = np.asarray(curve.evaluate(r), dtype=float)
        return RadialGrid(r0, float(r[1] - r[0]), r.size, vp, 0,
                          np.maximum.accumulate(vp))
    k_ref = math.sqrt(2.0 * mu * depth)
    h = 2.0 * math.pi / (ppw * k_ref)
    if halve:
        h *= 0.5
    r_min = _wall_r_min(curve, curve.asymptote, depth, h, mu)
    kappa = math.sqrt(2.0 * mu * floor)
    r_turn = _outer_radius(curve, curve.asymptote - floor, r_well)
    r_max = r_turn + _TAIL_EFOLDS / kappa
    n = int(math.ceil((r_max - r_min) / h)) + 1
    r = r_min + h * np.arange(n)
    vp = np.asarray(curve.evaluate(r), dtype=float)
    i_well = int(np.argmin(vp))
    tail_env = np.maximum.accumulate(vp[i_well:])
    return RadialGrid(r_min, h, n, vp, i_well, tail_env)


def _grid_for(system: MoleculeSystem, channel: str, ppw: int | None = None,
              floor: float | None = None, fine: bool = False) -> RadialGrid:
    ppw = ppw or DEFAULT_PPW
    floor = floor or THRESHOLD_BINDING
    key = ("grid", channel, ppw, floor, fine)
    grid = system.cache.get(key)
    if grid is None:
        grid = _build_grid(system.curve(channel), system.reduced_mass, ppw,
                           floor, halve=fine)
        system.cache[key] = grid
    return grid


def _n_for_energy(grid: RadialGrid, mu: float, asym: float, energy: float) -> int:
    """Grid prefix length that safely contains a state of this energy."""
    binding = max(asym - energy, THRESHOLD_BINDING * 0.1)
    kappa = math.sqrt(2.0 * mu * binding)
    i_turn = grid.turning_index(energy)
    pad = int(_TAIL_EFOLDS / (kappa * grid.h)) + 2
    return max(min(grid.n, i_turn + pad), min(grid.n, 16))


class _ChannelSolver:
    """Shooting machinery bound to one (grid, mu, J, asymptote)."""

    def __init__(self, grid: RadialGrid, mu: float, J: int, asym: float):
        self.grid = grid
        self.mu = mu
        self.J = J
        self.asym = asym
        self.vb = _vbase(grid, mu, J)
        self.veff_min = float(np.min(self.vb)) / (2.0 * mu)
        self.depth = asym - self.veff_min
        self.e_cut = asym - THRESHOLD_BINDING

    def count(self, energy: float) -> int:
        n_e = _n_for_energy(self.grid, self.mu, self.asym, energy)
        return int(_kernels.numerov_count_nodes(
            self.vb, 2.0 * self.mu * energy, self.grid.h, n_e))

    def n_bound(self) -> int:
        if self.depth <= THRESHOLD_BINDING:
            return 0
        return self.count(self.e_cut)

    def _match_index(self, energy: float, n_e: int) -> int:
        w = self.vb[:n_e] - 2.0 * self.mu * energy
        allowed = np.nonzero(w <= 0.0)[0]
        if allowed.size == 0:
            return max(2, n_e // 2)
        return int(min(max(allowed[-1], 2), n_e - 3))

    def mismatch(self, energy: float) -> float:
        n_e = _n_for_energy(self.grid, self.mu, self.asym, energy)
        m = self._match_index(energy, n_e)
        g, _, _ = _kernels.numerov_shoot(
            self.vb, 2.0 * self.mu * energy, self.grid.h, m, n_e)
        return g

    def solve(self, v: int, lo: float | None = None,
              hi: float | None = None) -> float:
        """Eigenvalue v on this grid (node bisection + secant polish)."""
        lo = self.veff_min + 1e-14 * max(abs(self.veff_min), 1.0) if lo is None else lo
        hi = self.e_cut if hi is None else hi
        if self.count(lo) > v or self.count(hi) < v + 1:
            raise ConvergenceError(
                f"bracket [{lo}, {hi}] does not isolate v={v}")
        for _ in range(300):
            if hi - lo <= max(1e-9 * self.depth, 1e-16):
                break
            mid = 0.5 * (lo + hi)
            if self.count(mid) >= v + 1:
                hi = mid
            else:
                lo = mid
        else:
            raise ConvergenceError(f"node bracketing stalled for v={v}")
        return self._polish(lo, hi, v)

    def _polish(self, lo: float, hi: float, v: int) -> float:
        e0, e1 = lo, hi
        g0, g1 = self.mismatch(e0), self.mismatch(e1)
        tol = max(1e-13 * max(abs(e1), self.asym - e1, 1e-3 * self.depth), 5e-18)
        for _ in range(60):
            if not (math.isfinite(g0) and math.isfinite(g1)) or g1 == g0:
                break
            e2 = e1 - g1 * (e1 - e0) / (g1 - g0)
            if not (lo - (hi - lo) <= e2 <= hi + (hi - lo)):
                e2 = 0.5 * (e0 + e1)
            if abs(e2 - e1) < tol:
                return min(e2, self.e_cut)
            e0, g0 = e1, g1
            e1 = e2
            g1 = self.mismatch(e1)
        a, b = lo, hi
        for _ in range(200):
            if b - a < tol:
                break
            mid = 0.5 * (a + b)
            if self.count(mid) >= v + 1:
                b = mid
            else:
                a = mid
        return min(0.5 * (a + b), self.e_cut)

    def solve_near(self, v: int, e_guess: float) -> float:
        """Solve v using a bracket grown around e_guess (fine-grid reuse)."""
        w = max(1e-7 * self.depth, 64.0 * abs(e_guess) * 1e-13)
        for _ in range(12):
            lo = max(e_guess - w, self.veff_min + 1e-14)
            hi = min(e_guess + w, self.e_cut)
            if self.count(lo) <= v and self.count(hi) >= v + 1:
                return self.solve(v, lo, hi)
            w *= 8.0
        return self.solve(v)


def _solver_for(system: MoleculeSystem, channel: str, J: int,
                ppw: int | None, floor: float | None,
                fine: bool) -> _ChannelSolver:
    key = ("solver", channel, J, ppw, floor, fine)
    solver = system.cache.get(key)
    if solver is None:
        grid = _grid_for(system, channel, ppw, floor, fine=fine)
        solver = _ChannelSolver(grid, system.reduced_mass, J,
                                system.curve(channel).asymptote)
        system.cache[key] = solver
    return solver


def solve_one(system: MoleculeSystem, channel: str, J: int, v: int,
              ppw: int | None = None, floor: float | None = None,
              richardson: bool = True) -> tuple[float, int]:
    """Energy of a single level plus the channel's bound count.

    Used by the mass-sensitivity machinery which re-solves one v at
    perturbed masses; raises ConvergenceError if v is not bound.
    """
    coarse = _solver_for(system, channel, J, ppw, floor, fine=False)
    n_total = coarse.n_bound()
    if v >= n_total:
        raise ConvergenceError(
            f"{channel} J={J} supports {n_total} levels; no v={v}")
    e1 = coarse.solve(v)
    if not richardson:
        return e1, n_total
    fine = _solver_for(system, channel, J, ppw, floor, fine=True)
    try:
        e2 = fine.solve_near(v, e1)
    except ConvergenceError:
        return e1, n_total
    return (16.0 * e2 - e1) / 15.0, n_total


def bound_levels(system: MoleculeSystem, channel: str, J: int,
                 ppw: int | None = None,
                 floor: float | None = None) -> list[RovibLevel]:
    """All bound levels of one channel at rotational quantum number J.

    Energies are absolute (the curve asymptote is the dissociation limit);
    returns an empty list when the effective potential supports no bound
    state.  A level must be bound by more than 1e-10 Hartree to count.
    """
    if J < 0:
        raise ValidationError("J must be >= 0")
    key = ("levels", channel, J, ppw, floor)
    cached = system.cache.get(key)
    if cached is not None:
        return cached

    coarse = _solver_for(system, channel, J, ppw, floor, fine=False)
    n_total = coarse.n_bound()
    if n_total == 0:
        system.cache[key] = []
        return []
    fine = _solver_for(system, channel, J, ppw, floor, fine=True)

    levels: list[RovibLevel] = []
    raw: dict[int, float] = {}
    asym = coarse.asym
    for v in range(n_total):
        e1 = coarse.solve(v)
        raw[v] = e1
        try:
            e2 = fine.solve_near(v, e1)
            energy = (16.0 * e2 - e1) / 15.0
        except ConvergenceError:
            energy = e1
        energy = min(energy, coarse.e_cut)
        levels.append(RovibLevel(channel=channel, v=v, v_from_top=v - n_total,
                                 J=J, energy=energy,
                                 binding_energy=asym - energy))
    system.cache[key] = levels
    system.cache[("levels_raw", channel, J, ppw, floor)] = raw
    return levels


def _node_count_of(psi: np.ndarray) -> int:
    mx = float(np.max(np.abs(psi)))
    if mx == 0.0:
        return 0
    y = psi[np.abs(psi) > 1e-12 * mx]
    return int(np.count_nonzero(np.signbit(y[1:]) != np.signbit(y[:-1])))


def wavefunction(system: MoleculeSystem, level: RovibLevel,
                 ppw: int | None = None,
                 floor: float | None = None) -> RadialWavefunction:
    """Unit-normalized bound wavefunction for a level from bound_levels."""
    key = ("wf", level.channel, level.J, level.v, ppw, floor)
    cached = system.cache.get(key)
    if cached is not None and abs(cached.energy - level.energy) <= \
            1e-6 * max(abs(level.energy), 1e-12):
        return cached

    coarse = _solver_for(system, level.channel, level.J, ppw, floor, fine=False)
    grid = coarse.grid
    raw = system.cache.get(("levels_raw", level.channel, level.J, ppw, floor), {})
    # build at this grid's own eigenvalue so the matched solution is smooth
    energy = raw.get(level.v)
    if energy is None:
        energy = coarse.solve_near(level.v, level.energy)

    for attempt in range(3):
        n_e = _n_for_energy(grid, coarse.mu, coarse.asym, energy)
        m = coarse._match_index(energy, n_e)
        psi = np.empty(n_e)
        status = _kernels.numerov_build(
            coarse.vb, 2.0 * coarse.mu * energy, grid.h, m, psi, n_e)
        if status == 0 and _node_count_of(psi) == level.v:
            break
        energy = энергия = energy + (attempt + 1) * 2e-13 * max(abs(energy), 1.0) \
            * (1 if attempt % 2 == 0 else -1)
    else:
        raise ConvergenceError(
            f"wavefunction node count mismatch for {level.channel} "
            f"J={level.J} v={level.v}")

    norm = simpson_uniform(psi * psi, grid.h)
    psi = psi / math.sqrt(norm)
    # sign convention: positive first lobe (inner turning point side)
    mx = float(np.max(np.abs(psi)))
    first = int(np.argmax(np.abs(psi) > 0.2 * mx))
    if psi[first] < 0:
        psi = -psi
    keep = int(np.nonzero(np.abs(psi) > 1e-13 * mx)[0][-1])
    psi = psi[: min(keep + 3, psi.size)].copy()

    wf = RadialWavefunction(channel=level.channel, J=level.J,
                            energy=level.energy, r0=grid.r0, step=grid.h,
                            values=psi, kind="bound", level=level)
    system.cache[key] = wf
    return wf


def continuum_wave(system: MoleculeSystem, channel: str, e_above: float,
                   J: int, r_min: float | None = None,
                   r_max: float | None = None,
                   step: float | None = None) -> RadialWavefunction:
    """Energy-normalized scattering state at energy e_above > 0 (Hartree)
    relative to the channel asymptote."""
    if e_above <= 0:
        raise InvalidEnergy("continuum energy must be positive")
    curve = system.curve(channel)
    mu = system.reduced_mass
    asym = curve.asymptote
    energy = asym + e_above
    k = math.sqrt(2.0 * mu * e_above)

    r_well, v_min = curve.well_minimum
    k_well = math.sqrt(2.0 * mu * max(energy - v_min, e_above))
    h = step or 2.0 * math.pi / (DEFAULT_PPW * k_well)
    if r_min is None:
        r_min = _wall_r_min(curve, energy, max(curve.depth, e_above), h, mu)
    lam = 2.0 * math.pi / k
    if r_max is None:
        # potential negligible: |V - asym| < 1e-3 * E keeps the amplitude
        # fit bias below 0.1%
        target = 1e-3 * e_above
        r_probe = max(r_well, r_min + h)
        for _ in range(400):
            if abs(curve.evaluate(r_probe) - asym) < target and \
                    r_probe >= curve.r_tail:
                break
            r_probe *= 1.25
        r_max = max(curve.r_tail, r_probe) + 3.0 * lam

    n = int(math.ceil((r_max - r_min) / h)) + 1
    r = r_min + h * np.arange(n)
    vp = np.asarray(curve.evaluate(r), dtype=float)
    vb = 2.0 * mu * vp
    if J:
        vb = vb + J * (J + 1) / r**2
    psi = np.empty(n)
    _kernels.numerov_forward(vb, 2.0 * mu * energy, h, 0.0, 1e-30, psi, n)

    # fit A*sin(kR) + B*cos(kR) over the last full oscillation
    n_fit = max(int(lam / h), 8)
    rr = r[-n_fit:]
    yy = psi[-n_fit:]
    mat = np.column_stack([np.sin(k * rr), np.cos(k * rr)])
    coef, *_ = np.linalg.lstsq(mat, yy, rcond=None)
    amp = math.hypot(coef[0], coef[1])
    if amp == 0.0:
        raise ConvergenceError("continuum amplitude fit failed")
    phase = math.atan2(coef[1], coef[0]) + 0.5 * math.pi * J
    target_amp = math.sqrt(2.0 * mu / (math.pi * k))
    psi *= target_amp / amp

    return RadialWavefunction(channel=channel, J=J, energy=energy, r0=r_min,
                              step=h, values=psi, kind="continuum",
                              k_asym=k, phase_shift=phase)


@dataclass(frozen=True)
class TailLawReport:
    n: int
    expected_exponent: float
    fitted_exponent: float
    v_d: float
    r_squared: float
    accepted: bool


def near_dissociation_check(levels: list[RovibLevel], n: int) -> TailLawReport:
    """LeRoy-Bernstein style fit of the outermost binding energies.

    For a -C_n/R^n tail, E_b^((n-2)/(2n)) is linear in v; the power on
    (v_D - v) is 2n/(n-2).  The exponent is estimated from consecutive level
    spacings (dE/dv ~ E^((n+2)/(2n))), which needs no v_D.
    """
    if len(levels) < 4:
        raise InsufficientLevels("need >= 4 outermost levels")
    levels = sorted(levels, key=lambda l: l.v)
    v = np.array([l.v for l in levels], dtype=float)
    eb = np.array([l.binding_energy for l in levels], dtype=float)
    if np.any(eb <= 0):
        raise ValidationError("levels must all be bound")
    p = (n - 2) / (2.0 * n)
    slope, intercept, r2 = linear_fit(v, eb**p)
    v_d = float("inf") if slope == 0 else -intercept / slope

    de = eb[:-1] - eb[1:]
    emid = np.sqrt(eb[:-1] * eb[1:])
    s_ll, _, _ = linear_fit(np.log(emid), np.log(de))
    q_fit = math.inf if s_ll >= 1.0 else 1.0 / (1.0 - s_ll)
    q_expected = 2.0 * n / (n - 2.0)
    accepted = (r2 > 0.999) and math.isfinite(q_fit) and \
        abs(q_fit - q_expected) <= 0.02 * q_expected
    return TailLawReport(n=n, expected_exponent=q_expected,
                         fitted_exponent=float(q_fit), v_d=v_d,
                         r_squared=r2, accepted=accepted)


def level_by_selector(system: MoleculeSystem, channel: str, J: int,
                      v: int) -> RovibLevel:
    """Resolve v >= 0 (from the bottom) or v < 0 (from dissociation)."""
    levels = bound_levels(system, channel, J)
    if not levels:
        raise ValidationError(f"channel {channel!r} J={J} has no bound levels")
    if v >= 0:
        if v >= len(levels):
            raise ValidationError(
                f"channel {channel!r} J={J} has only {len(levels)} levels")
        return levels[v]
    if -v > len(levels):
        raise ValidationError(
            f"channel {channel!r} J={J} has only {len(levels)} levels")
    return levels[len(levels) + v]
