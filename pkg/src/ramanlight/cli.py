"""Command-line front end: figure scenarios, scans, pulses and sweeps.

Each run resolves a ScenarioConfig (preset and/or config file), produces
CSV tables (and optional SVG charts) in the output directory and prints a
report whose headline numbers are all also present in the emitted metrics
CSV. Failures print a single machine-readable JSON error line on stderr
and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.constants as const

from . import pulses, spectra, svgplot, tables
from .atom import PumpModel, validate_system
from .config import (PresetError, ScenarioConfig, load_config, preset,
                     PRESET_BUILDERS)
from .spectra import (DopplerConfig, PhysicalScale, ThreeLevelConfig,
                      dispersion_slope, find_imag_peaks, group_index,
                      make_chi_evaluator, make_eit_evaluator, physical_scale,
                      scan_evaluator, transmission_window_fwhm)


@dataclass
class RunReport:
    """What a scenario run produced."""

    scenario: str
    parameters: dict
    files: list[str]
    headline: dict[str, float]
    wall_time: float


def _flatten(config: ScenarioConfig) -> dict:
    flat = {}
    for group_name in ("system", "drive", "pump", "scale", "pulse", "grid"):
        group = getattr(config, group_name)
        for key, value in dataclasses.asdict(group).items():
            flat[f"{group_name}.{key}"] = value
    flat["doppler.enabled"] = config.doppler_enabled
    if config.doppler_enabled:
        for key, value in dataclasses.asdict(config.doppler).items():
            flat[f"doppler.{key}"] = value
    return flat


def _scale_of(config: ScenarioConfig) -> PhysicalScale:
    s = config.scale
    return physical_scale(s.density, length=s.length, gamma3=s.gamma3,
                          wavelength=s.wavelength)


def _scan_grid(config: ScenarioConfig) -> np.ndarray:
    half = config.grid.half_width
    if half is None:
        half = 5.0 * config.drive.delta
    return np.linspace(-half, half, config.grid.points)


def _pulse_band_grid(config: ScenarioConfig) -> np.ndarray:
    # cover the pulse spectral support (1e-6 of peak) with margin
    needed = math.sqrt(2.0 * math.log(1e6)) / config.pulse.sigma / config.scale.gamma3
    half = max(1.15 * needed, config.grid.half_width or 0.0)
    return np.linspace(-half, half, config.grid.points)


def _doppler_or_none(config: ScenarioConfig) -> DopplerConfig | None:
    return config.doppler if config.doppler_enabled else None


def _group_index_numbers(evaluator, delta: float, scale: PhysicalScale):
    chi0 = evaluator(0.0)
    slope = dispersion_slope(evaluator, 0.0, delta / 200.0)
    return group_index(chi0, slope, scale)


def _eit_config(config: ScenarioConfig, omega_c: float) -> ThreeLevelConfig:
    system = config.system
    return ThreeLevelConfig(omega_c=omega_c, omega_p=config.drive.omega_p,
                            gamma31=system.gamma31, gamma32=system.gamma32,
                            gamma2_deph=system.gamma2_deph,
                            gamma3_deph=system.gamma3_deph)


def _propagation_run(config: ScenarioConfig, evaluator, scale, threads: int):
    grid = _pulse_band_grid(config)
    spectrum = scan_evaluator(evaluator, grid, threads=threads)
    pulse = pulses.synthesize_gaussian(config.pulse.sigma, config.pulse.window,
                                       config.pulse.samples)
    reference = pulses.vacuum_reference(pulse, scale)
    out = pulses.propagate(pulse, spectrum, scale)
    return spectrum, pulse, reference, out


# ---------------------------------------------------------------------------
# scenario runners

def _run_spectrum_scenario(config: ScenarioConfig, out: Path,
                           svg: bool, threads: int) -> tuple[list, dict]:
    name = config.scenario
    evaluator = make_chi_evaluator(config.system, config.drive, config.pump,
                                   doppler=_doppler_or_none(config))
    spectrum = scan_evaluator(evaluator, _scan_grid(config), threads=threads)
    scale = _scale_of(config)

    files = [tables.write_spectrum_csv(out / f"{name}_spectrum.csv", spectrum)]
    peaks = find_imag_peaks(spectrum)
    strongest = sorted(
        peaks, key=lambda p: -spectrum.chi.imag[np.searchsorted(spectrum.grid, p)])[:2]
    result = _group_index_numbers(evaluator, config.drive.delta, scale)
    headline = {
        "center_re_chi_scaled": evaluator(0.0).real,
        "center_im_chi_scaled": evaluator(0.0).imag,
        "center_slope_scaled": result.dre_chi_domega * scale.gamma3 ** 2 / scale.k,
        "group_index_center": result.n_g,
        "imag_peak_count": float(len(peaks)),
    }
    for i, p in enumerate(sorted(strongest)):
        headline[f"imag_peak_{i}_gamma3"] = p
    if svg:
        doc = svgplot.render_line_chart(
            [("Re chi", spectrum.grid, spectrum.chi.real),
             ("Im chi", spectrum.grid, spectrum.chi.imag)],
            title=f"{name}: scaled susceptibility",
            x_label="two-photon detuning (Gamma3)", y_label="chi (scaled)")
        files.append(tables.atomic_write_text(out / f"{name}_spectrum.svg", doc))
    return files, headline


def _run_fig4(config: ScenarioConfig, out: Path, svg: bool,
              threads: int) -> tuple[list, dict]:
    scale = _scale_of(config)
    files = []
    headline = {}
    pulse_curves = []

    ev_off = make_chi_evaluator(config.system, config.drive, PumpModel.direct(0.0))
    ev_on = make_chi_evaluator(config.system, config.drive, PumpModel.direct(0.4))

    for tag, evaluator in (("pump_off", ev_off), ("pump_on", ev_on)):
        spectrum, pulse, reference, out_pulse = _propagation_run(
            config, evaluator, scale, threads)
        result = _group_index_numbers(evaluator, config.drive.delta, scale)
        summary = pulses.metrics(pulse, out_pulse, reference,
                                 (result.n_g - 1.0) * scale.length / const.c)
        files.append(tables.write_spectrum_csv(
            out / f"fig4_spectrum_{tag}.csv", spectrum))
        label = "slow" if tag == "pump_off" else "fast"
        files.append(tables.write_pulse_csv(out / f"fig4_pulse_{label}.csv", out_pulse))
        pulse_curves.append((label, pulse.times, out_pulse.intensity()))
        headline[f"group_index_{tag}"] = result.n_g
        headline[f"peak_delay_s_{tag}"] = summary.peak_delay
        headline[f"predicted_group_delay_s_{tag}"] = summary.predicted_group_delay
        headline[f"stretch_{tag}"] = summary.stretch
        headline[f"transmission_{tag}"] = summary.transmission
        if tag == "pump_off":
            window_spec = scan_evaluator(
                evaluator, np.linspace(-0.4, 0.4, 1201), threads=threads)
            headline["transmission_window_rad_per_s"] = \
                transmission_window_fwhm(window_spec, scale)
            files.append(tables.write_pulse_csv(
                out / "fig4_pulse_reference.csv", reference))
            pulse_curves.append(("reference", reference.times,
                                 reference.intensity()))

    if svg:
        order = [pulse_curves[0], pulse_curves[2], pulse_curves[1]]
        doc = svgplot.render_line_chart(
            [(label, t * 1e6, inten / inten.max()) for label, t, inten in order],
            title="fig4: pulse propagation", x_label="time (us)",
            y_label="normalised intensity")
        files.append(tables.atomic_write_text(out / "fig4_pulses.svg", doc))
    return files, headline


def _run_fig5(config: ScenarioConfig, out: Path, svg: bool,
              threads: int) -> tuple[list, dict]:
    scale = _scale_of(config)
    files = []
    headline = {}
    curves = []
    reference_pulse = None

    cases = [
        ("eit_0p5", make_eit_evaluator(_eit_config(config, 0.5)), 0.001),
        ("eit_1p0", make_eit_evaluator(_eit_config(config, 1.0)), 0.001),
        ("two_coupling_r0", make_chi_evaluator(
            config.system, config.drive, PumpModel.direct(0.0)),
            config.drive.delta / 200.0),
        ("two_coupling_r0p17", make_chi_evaluator(
            config.system, config.drive, PumpModel.direct(0.17)),
            config.drive.delta / 200.0),
    ]
    for tag, evaluator, step in cases:
        spectrum, pulse, reference, out_pulse = _propagation_run(
            config, evaluator, scale, threads)
        chi0 = evaluator(0.0)
        slope = dispersion_slope(evaluator, 0.0, step)
        result = group_index(chi0, slope, scale)
        summary = pulses.metrics(pulse, out_pulse, reference,
                                 (result.n_g - 1.0) * scale.length / const.c)
        files.append(tables.write_pulse_csv(out / f"fig5_pulse_{tag}.csv", out_pulse))
        curves.append((tag, pulse.times, out_pulse.intensity()))
        headline[f"group_index_{tag}"] = result.n_g
        headline[f"peak_delay_s_{tag}"] = summary.peak_delay
        headline[f"stretch_{tag}"] = summary.stretch
        if reference_pulse is None:
            reference_pulse = reference
            files.append(tables.write_pulse_csv(
                out / "fig5_pulse_reference.csv", reference))

    if svg:
        series = [(tag, t * 1e6, i / i.max()) for tag, t, i in curves]
        series.append(("reference", reference_pulse.times * 1e6,
                       reference_pulse.intensity() / reference_pulse.intensity().max()))
        doc = svgplot.render_line_chart(
            series, title="fig5: EIT vs two-coupling slow light",
            x_label="time (us)", y_label="normalised intensity")
        files.append(tables.atomic_write_text(out / "fig5_pulses.svg", doc))
    return files, headline


def _zero_crossing(rates: np.ndarray, values: np.ndarray) -> float:
    signs = np.sign(values)
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if flips.size == 0:
        return math.nan
    i = flips[0]
    x0, x1 = rates[i], rates[i + 1]
    y0, y1 = values[i], values[i + 1]
    return float(x0 - y0 * (x1 - x0) / (y1 - y0))


def _run_fig6(config: ScenarioConfig, out: Path, svg: bool,
              threads: int) -> tuple[list, dict]:
    scale = _scale_of(config)
    rates = np.linspace(0.0, 0.5, 15)
    bound = config.pump.gamma52  # pump-rate bound for a single pumping level

    table = spectra.pump_sweep(config.system, config.drive, rates, scale)
    ng_stationary = table[:, 1]
    table_dop = spectra.pump_sweep(config.system, config.drive, rates, scale,
                                   doppler=config.doppler)
    ng_doppler = table_dop[:, 1]

    files = [tables.write_sweep_csv(out / "fig6_sweep.csv", rates,
                                    ng_stationary, ng_doppler)]
    headline = {
        "pump_rate_bound_gamma3": bound,
        "zero_crossing_stationary_gamma3": _zero_crossing(rates, ng_stationary),
        "zero_crossing_doppler_gamma3": _zero_crossing(rates, ng_doppler),
        "group_index_stationary_r0": ng_stationary[0],
        "group_index_doppler_r0": ng_doppler[0],
    }
    if svg:
        doc = svgplot.render_line_chart(
            [("no Doppler", rates, ng_stationary),
             ("Doppler 320 K", rates, ng_doppler)],
            title="fig6: group index vs pump rate",
            x_label="pump rate (Gamma3)", y_label="group index",
            vmarkers=[(bound, "pump-rate bound")])
        files.append(tables.atomic_write_text(out / "fig6_sweep.svg", doc))
    return files, headline


def _run_pulse_command(config: ScenarioConfig, out: Path, svg: bool,
                       threads: int) -> tuple[list, dict]:
    scale = _scale_of(config)
    evaluator = make_chi_evaluator(config.system, config.drive, config.pump,
                                   doppler=_doppler_or_none(config))
    spectrum, pulse, reference, out_pulse = _propagation_run(
        config, evaluator, scale, threads)
    result = _group_index_numbers(evaluator, config.drive.delta, scale)
    summary = pulses.metrics(pulse, out_pulse, reference,
                             (result.n_g - 1.0) * scale.length / const.c)
    files = [
        tables.write_spectrum_csv(out / "pulse_spectrum.csv", spectrum),
        tables.write_pulse_csv(out / "pulse_input.csv", pulse),
        tables.write_pulse_csv(out / "pulse_output.csv", out_pulse),
        tables.write_pulse_csv(out / "pulse_reference.csv", reference),
    ]
    headline = {
        "group_index": result.n_g,
        "peak_delay_s": summary.peak_delay,
        "predicted_group_delay_s": summary.predicted_group_delay,
        "stretch": summary.stretch,
        "transmission": summary.transmission,
    }
    if svg:
        doc = svgplot.render_line_chart(
            [("input", pulse.times * 1e6, pulse.intensity()),
             ("output", out_pulse.times * 1e6, out_pulse.intensity()),
             ("reference", reference.times * 1e6, reference.intensity())],
            title="pulse propagation", x_label="time (us)", y_label="intensity")
        files.append(tables.atomic_write_text(out / "pulse.svg", doc))
    return files, headline


def _run_sweep_command(config: ScenarioConfig, out: Path, svg: bool,
                       threads: int) -> tuple[list, dict]:
    scale = _scale_of(config)
    rates = np.linspace(0.0, 0.5, 15)
    table = spectra.pump_sweep(config.system, config.drive, rates, scale,
                               doppler=_doppler_or_none(config))
    files = [tables.write_sweep_csv(out / "sweep.csv", table[:, 0], table[:, 1])]
    headline = {
        "zero_crossing_gamma3": _zero_crossing(table[:, 0], table[:, 1]),
        "group_index_r0": table[0, 1],
        "pump_rate_bound_gamma3": config.pump.gamma52,
    }
    if svg:
        doc = svgplot.render_line_chart(
            [("n_g", table[:, 0], table[:, 1])],
            title="group index vs pump rate",
            x_label="pump rate (Gamma3)", y_label="group index",
            vmarkers=[(config.pump.gamma52, "pump-rate bound")])
        files.append(tables.atomic_write_text(out / "sweep.svg", doc))
    return files, headline


_RUNNERS = {
    "fig2a": _run_spectrum_scenario,
    "fig2c": _run_spectrum_scenario,
    "fig3a": _run_spectrum_scenario,
    "fig3c": _run_spectrum_scenario,
    "fig4": _run_fig4,
    "fig5": _run_fig5,
    "fig6": _run_fig6,
    "scan": _run_spectrum_scenario,
    "pulse": _run_pulse_command,
    "sweep": _run_sweep_command,
}


def run_scenario(config: ScenarioConfig, out_dir: str | Path,
                 svg: bool = False, threads: int = 1) -> RunReport:
    """Execute one scenario and emit its files plus the metrics CSV."""
    if config.scenario is None:
        raise PresetError("scenario name not set")
    if config.scenario not in _RUNNERS:
        raise PresetError(
            f"unknown scenario {config.scenario!r}; available: "
            + ", ".join(sorted(PRESET_BUILDERS)))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    files, headline = _RUNNERS[config.scenario](config, out, svg, threads)
    metrics_path = tables.write_metrics_csv(
        out / f"{config.scenario}_metrics.csv", headline)
    files.append(metrics_path)
    return RunReport(scenario=config.scenario, parameters=_flatten(config),
                     files=[str(f) for f in files], headline=headline,
                     wall_time=time.perf_counter() - start)


# ---------------------------------------------------------------------------
# argparse front end

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramanlight",
        description="Pump-controlled slow/fast light in a far-detuned "
                    "Raman medium: spectra, pulses and sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None,
                       help="key = value configuration file")
        p.add_argument("--out", type=Path, default=Path("out"),
                       help="output directory (default: ./out)")
        p.add_argument("--svg", action="store_true",
                       help="also render SVG charts")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for grid scans")

    common(sub.add_parser("scan", help="susceptibility spectrum over detuning"))
    common(sub.add_parser("pulse", help="Gaussian pulse through the medium"))
    common(sub.add_parser("sweep", help="group index vs pump rate"))
    scenario = sub.add_parser("scenario", help="named figure reproduction")
    scenario.add_argument("name", help="preset name (fig2a ... fig6)")
    common(scenario)
    return parser


def _resolve_config(args) -> ScenarioConfig:
    overrides = load_config(args.config) if args.config else None
    if args.command == "scenario":
        config = preset(args.name)
        if overrides is not None:
            config = dataclasses.replace(overrides, scenario=args.name)
        return config
    config = overrides if overrides is not None else ScenarioConfig()
    return dataclasses.replace(config, scenario=args.command)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _resolve_config(args)
        for warning in validate_system(config.system, config.drive, config.pump):
            print(f"warning: {warning}", file=sys.stderr)
        report = run_scenario(config, args.out, svg=args.svg,
                              threads=args.threads)
    except Exception as exc:  # CLI boundary: one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    print(f"scenario {report.scenario} finished in {report.wall_time:.1f}s")
    for key, value in report.headline.items():
        print(f"  {key} = {value:.6g}")
    for name in report.files:
        print(f"  wrote {name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
