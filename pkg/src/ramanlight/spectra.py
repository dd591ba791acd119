"""Probe susceptibility spectra, dispersion, group index and sweeps.

The solver works in gamma3 units; everything here that touches SI carries
an explicit PhysicalScale. The scaled susceptibility chi_s is the
dimensionless combination rho31/omega_p3 + rho41/omega_p4 of the static
optical coherences; the physical susceptibility is (k / gamma3) * chi_s
with k = density * |mu31|^2 / (eps0 * hbar).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.constants as const
from scipy.interpolate import CubicSpline

from .atom import (AtomicSystem, DriveConfig, PumpModel, build_liouvillian,
                   dissipator_superop, hamiltonian_superop, ketbra)
from .floquet import (MAX_ORDER, ConvergenceError, FloquetDensity,
                      choose_truncation, extract_dc_coherences, harmonic_tail_ok,
                      solve_floquet, steady_state_static)

GAMMA3_RB87_D1 = 2.0 * math.pi * 5.75e6      # rad/s, natural linewidth of the line
WAVELENGTH_RB87_D1 = 794.98e-9               # m
MASS_RB87 = 86.909180531 * const.atomic_mass  # kg


class BranchCutError(ValueError):
    """1 + Re(chi) <= 0: the refractive index leaves the real branch."""


class QuadratureError(RuntimeError):
    """Velocity quadrature did not converge under node refinement."""


class ScanError(RuntimeError):
    """One or more grid points of a spectrum scan failed."""

    def __init__(self, failures: list[tuple[float, Exception]]):
        self.failures = failures
        points = ", ".join(f"{p:g} ({type(e).__name__}: {e})" for p, e in failures[:3])
        more = "" if len(failures) <= 3 else f" and {len(failures) - 3} more"
        super().__init__(f"scan failed at grid point(s) {points}{more}")


class NonSmoothPointWarning(UserWarning):
    """Finite-difference slope failed its step-halving consistency check."""


@dataclass(frozen=True)
class PhysicalScale:
    """SI anchors converting the scaled susceptibility to physics.

    ``k`` is derived from the stored density and dipole and validated
    against its defining formula on construction.
    """

    density: float        # atoms / m^3
    dipole_sq: float      # |mu31|^2, C^2 m^2
    gamma3: float         # rad/s
    wavelength: float     # m
    length: float         # m
    k: float              # rad/s, density * dipole_sq / (eps0 hbar)

    def __post_init__(self):
        if self.density < 0 or self.dipole_sq <= 0 or self.gamma3 <= 0 \
                or self.wavelength <= 0 or self.length <= 0:
            raise ValueError("physical scale entries must be positive")
        expected = self.density * self.dipole_sq / (const.epsilon_0 * const.hbar)
        if abs(self.k - expected) > 1e-12 * max(abs(expected), 1.0):
            raise ValueError("k inconsistent with density * |mu31|^2 / (eps0 hbar)")

    @property
    def probe_omega(self) -> float:
        """Probe carrier angular frequency, rad/s."""
        return 2.0 * math.pi * const.c / self.wavelength

    def chi_from_scaled(self, chi_s: complex) -> complex:
        """Physical susceptibility from the gamma3-unit scaled value."""
        return (self.k / self.gamma3) * chi_s


def physical_scale(density: float, length: float = 1e-3,
                   gamma3: float = GAMMA3_RB87_D1,
                   wavelength: float = WAVELENGTH_RB87_D1,
                   branch_fraction: float = 0.25) -> PhysicalScale:
    """Build the SI scale from line data.

    The probe-transition dipole follows from the spontaneous-emission
    relation gamma = omega^3 |mu|^2 / (3 pi eps0 hbar c^3) applied to the
    branch rate ``branch_fraction * gamma3``. The default quarter shares
    the line strength equally among the four Lambda transitions of the
    symmetric dipole pattern, which reproduces the reference group-index
    values of this scheme; use 0.5 to assign each excited level's full
    decay branch to a single dipole instead.
    """
    omega = 2.0 * math.pi * const.c / wavelength
    dipole_sq = (3.0 * math.pi * const.epsilon_0 * const.hbar * const.c ** 3
                 * branch_fraction * gamma3 / omega ** 3)
    k = density * dipole_sq / (const.epsilon_0 * const.hbar)
    return PhysicalScale(density=density, dipole_sq=dipole_sq, gamma3=gamma3,
                         wavelength=wavelength, length=length, k=k)


@dataclass(frozen=True)
class DopplerConfig:
    """One-dimensional Maxwell velocity averaging for a warm vapour.

    Every beam propagates along the same axis with (approximately) equal
    wavelengths, so a moving atom sees all one-photon detunings shifted by
    the same -k v while two-photon detunings are untouched. ``gamma3``
    converts the shift to simulation units.
    """

    temperature: float = 320.0
    mass: float = MASS_RB87
    wavevector: float = 2.0 * math.pi / WAVELENGTH_RB87_D1
    nodes: int = 64
    geometry: str = "co-propagating"
    gamma3: float = GAMMA3_RB87_D1

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.nodes < 8:
            raise ValueError("need at least 8 quadrature nodes")
        if self.geometry != "co-propagating":
            raise ValueError(f"unsupported geometry {self.geometry!r}")

    @property
    def shift_sigma(self) -> float:
        """Standard deviation of the one-photon shift, gamma3 units."""
        v_sigma = math.sqrt(const.k * self.temperature / self.mass)
        return self.wavevector * v_sigma / self.gamma3


@dataclass
class SusceptibilitySpectrum:
    """Scaled susceptibility sampled on a two-photon-detuning grid."""

    grid: np.ndarray            # gamma3 units, strictly increasing
    chi: np.ndarray             # complex chi_s at each grid point
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.chi = np.asarray(self.chi, dtype=complex)
        if self.grid.ndim != 1 or self.grid.size == 0 or self.grid.size != self.chi.size:
            raise ValueError("grid and chi must be matching non-empty 1-d arrays")
        if self.grid.size > 1 and np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.chi)):
            raise ValueError("chi contains non-finite values")

    def interpolator(self) -> Callable[[np.ndarray], np.ndarray]:
        """Cubic interpolant of chi_s over the grid."""
        if self.grid.size < 4:
            raise ValueError("need at least 4 grid points to interpolate")
        return CubicSpline(self.grid, self.chi)


@dataclass(frozen=True)
class GroupIndexResult:
    """Refractive and group index of the probe at one operating point."""

    n: float                 # real refractive index
    dre_chi_domega: float    # d Re(chi) / d omega, 1/(rad/s)
    n_g: float               # group index c / v_g
    v_g: float               # m/s (signed)


@dataclass(frozen=True)
class ThreeLevelConfig:
    """Reference Lambda system: one resonant coupling, no excited doublet."""

    omega_c: float
    omega_p: float = 0.01
    delta_c: float = 0.0
    gamma31: float = 0.5
    gamma32: float = 0.5
    gamma2_deph: float = 0.01
    gamma3_deph: float = 0.0

    def __post_init__(self):
        if self.omega_c < 0 or self.omega_p <= 0:
            raise ValueError("omega_c must be >= 0 and omega_p positive")


# ---------------------------------------------------------------------------
# point evaluation

def _chi_of_density(fd: FloquetDensity, system: AtomicSystem,
                    drive: DriveConfig) -> complex:
    rho31, rho41 = extract_dc_coherences(fd)
    s31, s41 = system.dipole_signs[0], system.dipole_signs[1]
    return rho31 / (s31 * drive.omega_p) + rho41 / (s41 * drive.omega_p)


def _resonant_order_guess(system: AtomicSystem, drive: DriveConfig,
                          base: int) -> int:
    """Seed truncation order for a velocity class.

    Classes whose shifted coupling detuning (from either excited level)
    comes within reach of the coupling Rabi frequency nutate at up to twice
    omega_c, so the harmonic content extends to roughly 2 omega_c / delta;
    far-detuned classes keep the perturbative ladder order.
    """
    detuning = min(abs(drive.delta_c), abs(drive.delta_c - system.omega43))
    if detuning > 1.3 * drive.omega_c + 10.0:
        return base
    return max(base, math.ceil((2.4 * drive.omega_c + 12.0) / drive.delta) + 8)


def _solve_with_tail_guard(system: AtomicSystem, drive: DriveConfig,
                           pump: PumpModel, order: int,
                           order_cap: int) -> FloquetDensity:
    liouv = build_liouvillian(system, drive, pump)
    n = min(order, order_cap)
    while True:
        fd = solve_floquet(liouv, drive.delta, n)
        if harmonic_tail_ok(fd):
            return fd
        if n >= order_cap:
            raise ConvergenceError(
                f"harmonic tail not negligible at truncation order {n}")
        n = min(order_cap, max(n + 2, math.ceil(1.4 * n)))


def make_chi_evaluator(system: AtomicSystem, drive: DriveConfig,
                       pump: PumpModel, doppler: DopplerConfig | None = None,
                       order: int | None = None, ladder_tol: float = 1e-8,
                       order_max: int = MAX_ORDER,
                       doppler_order_max: int = 600) -> Callable[[float], complex]:
    """Scaled susceptibility as a function of two-photon detuning.

    The truncation order is fixed once from the ladder at the scan centre
    and the Raman resonances, then each solve keeps its own harmonic-tail
    guard, so evaluations are independent and deterministic. With a
    DopplerConfig the evaluator velocity-averages; near-resonant velocity
    classes get a much higher order cap since their harmonic content
    extends to the coupling nutation frequency.
    """
    if drive.omega_p == 0:
        raise ValueError("probe must be on: chi is defined relative to omega_p")
    if order is None:
        base = 1
        for d2 in (0.0, drive.delta, -drive.delta):
            liouv = build_liouvillian(system, drive.at_two_photon_detuning(d2), pump)
            base = max(base, choose_truncation(liouv, drive.delta,
                                               tol=ladder_tol, order_max=order_max))
    else:
        base = order

    def stationary(d2: float, shift: float = 0.0) -> complex:
        d = drive.at_two_photon_detuning(d2)
        if shift:
            d = d.doppler_shifted(shift)
            seed = _resonant_order_guess(system, d, base)
            fd = _solve_with_tail_guard(system, d, pump, seed, doppler_order_max)
        else:
            fd = _solve_with_tail_guard(system, d, pump, base, max(order_max, base))
        return _chi_of_density(fd, system, d)

    if doppler is None:
        return lambda d2: stationary(d2)
    return lambda d2: doppler_average(lambda s: stationary(d2, s), doppler)


def susceptibility(system: AtomicSystem, drive: DriveConfig, pump: PumpModel,
                   doppler: DopplerConfig | None = None,
                   order: int | None = None) -> complex:
    """Scaled chi_s at the drive's own probe detuning."""
    evaluator = make_chi_evaluator(system, drive, pump, doppler=doppler, order=order)
    return evaluator(drive.two_photon_detuning)


def scan(system: AtomicSystem, drive: DriveConfig, pump: PumpModel,
         grid: np.ndarray, doppler: DopplerConfig | None = None,
         order: int | None = None, threads: int = 1) -> SusceptibilitySpectrum:
    """Pointwise susceptibility over a two-photon-detuning grid.

    Points are independent; with ``threads`` > 1 they are evaluated
    concurrently and reassembled in grid order. Any failing point aborts
    the scan with the offending detunings attached.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("scan grid must be non-empty")
    evaluator = make_chi_evaluator(system, drive, pump, doppler=doppler, order=order)
    metadata = {
        "omega_c": drive.omega_c, "omega_p": drive.omega_p, "delta": drive.delta,
        "delta_c": drive.delta_c, "pump_rate": pump.rate(),
        "doppler_temperature": doppler.temperature if doppler else None,
    }
    return scan_evaluator(evaluator, grid, metadata=metadata, threads=threads)


def scan_evaluator(evaluator: Callable[[float], complex], grid: np.ndarray,
                   metadata: dict | None = None,
                   threads: int = 1) -> SusceptibilitySpectrum:
    """Scan an arbitrary chi(two-photon-detuning) evaluator over a grid."""
    grid = np.asarray(grid, dtype=float)

    def safe(d2: float):
        try:
            return evaluator(d2), None
        except Exception as exc:  # collected and re-raised with the grid point
            return None, exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(safe, grid))
    else:
        results = [safe(d2) for d2 in grid]

    failures = [(float(d2), exc) for d2, (_, exc) in zip(grid, results) if exc]
    if failures:
        raise ScanError(failures)
    chi = np.array([value for value, _ in results], dtype=complex)
    return SusceptibilitySpectrum(grid=grid, chi=chi, metadata=metadata or {})


# ---------------------------------------------------------------------------
# derived quantities

def dispersion_slope(chi_source, x0: float, step: float,
                     check_tol: float = 1e-4) -> float:
    """d Re(chi_s) / d(detuning) by central differences with step halving.

    ``chi_source`` is either a callable of the two-photon detuning or a
    SusceptibilitySpectrum (interpolated cubically). The coarse and halved
    central differences must agree to ``check_tol`` relative, otherwise a
    NonSmoothPointWarning is emitted; the Richardson combination of the two
    is returned. A step of delta/200 resolves the Raman features at the
    presets.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    fn = chi_source.interpolator() if isinstance(chi_source, SusceptibilitySpectrum) \
        else chi_source

    def re(x):
        return complex(fn(x)).real

    coarse = (re(x0 + step) - re(x0 - step)) / (2.0 * step)
    fine = (re(x0 + step / 2) - re(x0 - step / 2)) / step
    scale = max(abs(fine), abs(coarse))
    if scale > 0 and abs(fine - coarse) > check_tol * scale:
        warnings.warn(
            f"slope at {x0:g} changed by {abs(fine - coarse) / scale:.2e} "
            f"relative under step halving (step {step:g})",
            NonSmoothPointWarning, stacklevel=2)
    return (4.0 * fine - coarse) / 3.0


def group_index(chi_s: complex, slope_s: float, scale: PhysicalScale,
                omega: float | None = None) -> GroupIndexResult:
    """Group index from the scaled susceptibility and its detuning slope.

    Uses n = sqrt(1 + Re chi) and n_g = n + (omega / 2n) d Re(chi)/d omega,
    dropping the imaginary part (absorption or gain does not enter the
    group velocity here). ``slope_s`` is per gamma3 unit of detuning.
    """
    if omega is None:
        omega = scale.probe_omega
    chi = scale.chi_from_scaled(chi_s)
    radicand = 1.0 + chi.real
    if radicand <= 0:
        raise BranchCutError(f"1 + Re(chi) = {radicand:.3e} <= 0")
    dre_domega = (scale.k / scale.gamma3 ** 2) * slope_s
    n = math.sqrt(radicand)
    n_g = n + omega / (2.0 * n) * dre_domega
    v_g = const.c / n_g if n_g != 0 else math.inf
    return GroupIndexResult(n=n, dre_chi_domega=dre_domega, n_g=n_g, v_g=v_g)


def group_index_at(system: AtomicSystem, drive: DriveConfig, pump: PumpModel,
                   scale: PhysicalScale, doppler: DopplerConfig | None = None,
                   delta2: float = 0.0, step: float | None = None,
                   order: int | None = None) -> GroupIndexResult:
    """Group index at one operating point (chi and slope from the solver)."""
    evaluator = make_chi_evaluator(system, drive, pump, doppler=doppler, order=order)
    if step is None:
        step = drive.delta / 200.0
    chi_s = evaluator(delta2)
    slope_s = dispersion_slope(evaluator, delta2, step)
    return group_index(chi_s, slope_s, scale)


def doppler_average(evaluate_at_shift: Callable[[float], complex],
                    config: DopplerConfig,
                    check_convergence: bool = False) -> complex:
    """Gauss-Hermite average over the one-photon Doppler shift.

    ``evaluate_at_shift`` receives the shared one-photon shift in gamma3
    units (the two-photon detuning is velocity independent in the
    co-propagating geometry). With ``check_convergence`` the quadrature is
    repeated with half again as many nodes and must agree to 1e-3 relative.
    """
    def quadrature(nodes: int) -> complex:
        x, w = np.polynomial.hermite.hermgauss(nodes)
        shifts = math.sqrt(2.0) * config.shift_sigma * x
        total = 0.0 + 0.0j
        for weight, shift in zip(w, shifts):
            total += weight * evaluate_at_shift(float(shift))
        return total / math.sqrt(math.pi)

    value = quadrature(config.nodes)
    if check_convergence:
        refined = quadrature(round(1.5 * config.nodes))
        if abs(refined - value) > 1e-3 * max(abs(refined), 1e-300):
            raise QuadratureError(
                f"velocity average changed by {abs(refined - value):.3e} "
                f"({config.nodes} -> {round(1.5 * config.nodes)} nodes)")
        return refined
    return value


def pump_sweep(system: AtomicSystem, drive: DriveConfig, rates: np.ndarray,
               scale: PhysicalScale, doppler: DopplerConfig | None = None,
               step: float | None = None, order: int | None = None) -> np.ndarray:
    """Group index at the two-peak centre for each pump rate.

    Returns a (len(rates), 2) table of (pump rate, n_g).
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size == 0 or np.any(rates < 0):
        raise ValueError("pump rates must be non-negative")
    rows = np.empty((rates.size, 2))
    for i, rate in enumerate(rates):
        result = group_index_at(system, drive, PumpModel.direct(float(rate)),
                                scale, doppler=doppler, step=step, order=order)
        rows[i] = (rate, result.n_g)
    return rows


# ---------------------------------------------------------------------------
# three-level EIT reference

def _eit_liouvillian(config: ThreeLevelConfig, delta_p: float) -> np.ndarray:
    h = np.zeros((3, 3), dtype=complex)
    h[1, 1] = 2.0 * (delta_p - config.delta_c)
    h[2, 2] = 2.0 * delta_p
    h[0, 2] = h[2, 0] = config.omega_p
    h[1, 2] = h[2, 1] = config.omega_c
    h *= -0.5
    l0 = hamiltonian_superop(h)
    l0 += dissipator_superop(ketbra(0, 2, 3), config.gamma31)
    l0 += dissipator_superop(ketbra(1, 2, 3), config.gamma32)
    l0 += dissipator_superop(ketbra(1, 1, 3), config.gamma2_deph)
    l0 += dissipator_superop(ketbra(2, 2, 3), config.gamma3_deph)
    return l0


def eit_susceptibility(config: ThreeLevelConfig, delta_p: float) -> complex:
    """Scaled chi_s of the standard resonant-coupling Lambda system."""
    rho = steady_state_static(_eit_liouvillian(config, delta_p))
    return complex(rho[2, 0]) / config.omega_p


def make_eit_evaluator(config: ThreeLevelConfig) -> Callable[[float], complex]:
    """chi_s as a function of probe detuning (= two-photon detuning here)."""
    return lambda delta_p: eit_susceptibility(config, delta_p)


# ---------------------------------------------------------------------------
# spectrum metrics

def find_imag_peaks(spectrum: SusceptibilitySpectrum) -> np.ndarray:
    """Grid positions of the strict local maxima of Im(chi_s)."""
    y = spectrum.chi.imag
    if y.size < 3:
        return np.array([])
    interior = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    return spectrum.grid[1:-1][interior]


def transmission_window_fwhm(spectrum: SusceptibilitySpectrum,
                             scale: PhysicalScale) -> float:
    """Width (rad/s) of the low-absorption window between the Raman peaks.

    Intensity transmission exp(-2 (omega/c) Im(n) L) through the medium,
    measured relative to the most transparent point between the two
    absorption peaks; the FWHM spans the half-transmission crossings.
    """
    y = spectrum.chi.imag
    grid = spectrum.grid
    peaks = [i for i in range(1, y.size - 1) if y[i] > y[i - 1] and y[i] > y[i + 1]]
    left_peaks = [i for i in peaks if grid[i] < 0]
    right_peaks = [i for i in peaks if grid[i] > 0]
    if not left_peaks or not right_peaks:
        raise ValueError("no absorption peaks bracketing the window centre")
    lp = max(left_peaks, key=lambda i: y[i])
    rp = max(right_peaks, key=lambda i: y[i])

    chi = scale.chi_from_scaled(spectrum.chi)
    absorbance = 2.0 * (scale.probe_omega / const.c) * np.sqrt(1.0 + chi).imag \
        * scale.length
    trans = np.exp(-absorbance)
    dip = lp + int(np.argmax(trans[lp:rp + 1]))
    half = 0.5 * trans[dip]

    left = None
    for i in range(dip, lp, -1):
        if trans[i - 1] <= half < trans[i]:
            frac = (trans[i] - half) / (trans[i] - trans[i - 1])
            left = grid[i] - frac * (grid[i] - grid[i - 1])
            break
    right = None
    for i in range(dip, rp):
        if trans[i + 1] <= half < trans[i]:
            frac = (trans[i] - half) / (trans[i] - trans[i + 1])
            right = grid[i] + frac * (grid[i + 1] - grid[i])
            break
    if left is None or right is None:
        raise ValueError("no half-transmission crossings between the peaks")
    return (right - left) * scale.gamma3
