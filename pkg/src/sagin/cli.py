"""Command-line front end: ``sagin {xsection,budget,capacity,layers,waveform}``.

Each command writes plot-ready JSON and/or CSV. Output is deterministic for
a given scenario and seed. Exit codes: 0 success, 1 runtime failure,
2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import linkbudget as lb
from . import scattering as sc
from . import scenario as scn
from . import waveform as wf
from .constants import SPEED_OF_LIGHT
from .errors import ConfigError, DomainError, SaginError, UndefinedShareError

log = logging.getLogger("sagin")

SCHEMA_VERSION = 1
# default grid: the three carriers against a 2 mm rain drop and a 20 um fog droplet
DEFAULT_XSECTION_FREQS = (2.0e10, 3.0e11, 1.934e14)
DEFAULT_XSECTION_RADII = (2.0e-3, 2.0e-5)
_DEFAULT_FORMAT = {"xsection": "csv", "waveform": "json"}


class UsageError(Exception):
    """Bad command-line input; reported with exit code 2."""


# ---------------------------------------------------------------------------
# argument parsing

def _float_list(text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        values = [float(t) for t in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    if any(not v > 0 for v in values):
        raise argparse.ArgumentTypeError("values must be > 0")
    return values


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subcommand, so flags may come
    # before or after the command name
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scenario", type=Path, default=d(None), help="scenario JSON (default: shipped calibrated scenario)")
    p.add_argument("--out", type=Path, default=d(None), help="output path; .json/.csv suffix added per format")
    p.add_argument("--format", choices=("json", "csv", "both"), default=d(None))
    p.add_argument("--seed", type=int, default=d(None),
                   help=f"random seed; overrides a seed in the waveform spec (default {wf.DEFAULT_SEED})")
    p.add_argument("--jobs", type=_positive_int, default=d(1), help="worker threads for sweeps")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagin",
        description="Space-air-ground link budgets, capacity and waveform metrics.",
        parents=[_global_options(True)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = [_global_options(False)]

    p = sub.add_parser("xsection", parents=common, help="extinction efficiency over a frequency x radius grid")
    p.add_argument("--freqs", type=_float_list, default=list(DEFAULT_XSECTION_FREQS), help="frequencies in Hz")
    p.add_argument("--radii", type=_float_list, default=list(DEFAULT_XSECTION_RADII), help="particle radii in m")
    p.add_argument("--species", choices=[s.value.lower() for s in sc.Species if s is not sc.Species.AEROSOL],
                   default=None, help="water temperature preset (default: rain)")
    p.add_argument("--temperature", type=float, default=None, help="water temperature in K")

    p = sub.add_parser("budget", parents=common, help="per-factor and per-layer loss per band")
    p.add_argument("--weather-sweep", action="store_true", help="evaluate every weather in the sweep")

    p = sub.add_parser("capacity", parents=common, help="SNR and Shannon capacity per band and weather")
    p.add_argument("--weather-sweep", action="store_true", help="one column per sweep weather")

    p = sub.add_parser("layers", parents=common, help="per-layer shares of the medium-induced loss")
    p.add_argument("--weather-sweep", action="store_true")

    p = sub.add_parser("waveform", parents=common, help="PAPR statistics or ambiguity surfaces")
    p.add_argument("--spec", type=Path, required=True, help="waveform spec JSON")
    p.add_argument("--metric", choices=("papr", "ambiguity"), default=None, help="overrides the spec's metric")
    return parser


# ---------------------------------------------------------------------------
# output

def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _validate_output(doc) -> None:
    schema = scn.load_schema("output.schema.json")
    jsonschema.Draft202012Validator(schema).validate(doc)


def _emit(args, doc, header, rows) -> None:
    _validate_output(doc)
    fmt = args.format or _DEFAULT_FORMAT.get(args.command, "json")
    texts = []
    if fmt in ("json", "both"):
        texts.append((".json", _json_text(doc)))
    if fmt in ("csv", "both"):
        texts.append((".csv", _csv_text(header, rows)))
    if args.out is None:
        sys.stdout.write("\n".join(t for _, t in texts))
        return
    for suffix, text in texts:
        path = args.out
        if fmt == "both" or path.suffix.lower() not in (".json", ".csv"):
            path = path.with_suffix(suffix) if path.suffix.lower() in (".json", ".csv") else Path(str(path) + suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        log.info("wrote %s", path)


def _parallel_map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# commands

_SPECIES_TEMPERATURE = {"rain": 293.15, "fog": 283.15, "cloud": 273.15}


def cmd_xsection(args):
    species = args.species or "rain"
    temperature = args.temperature or _SPECIES_TEMPERATURE[species]
    water = sc.WaterRefractiveIndex(temperature)
    rows = []
    for f in args.freqs:
        m = water(f)
        for r in args.radii:
            wavelength = SPEED_OF_LIGHT / f
            alpha = sc.size_parameter(r, wavelength)
            res = sc.extinction(r, wavelength, m)
            rows.append({
                "frequency_hz": f, "radius_m": r, "alpha": alpha, "regime": sc.regime(alpha).value,
                "q_ext": res.q_ext, "sigma_ext_m2": res.sigma_ext,
            })
    doc = {"schema_version": SCHEMA_VERSION, "command": "xsection", "species": species,
           "water_temperature_k": temperature, "rows": rows}
    header = ["frequency_hz", "radius_m", "alpha", "regime", "q_ext", "sigma_ext_m2"]
    return doc, header, [[row[k] for k in header] for row in rows]


def _pairs(scenario, sweep: bool):
    weathers = scenario.sweep() if sweep else (scenario.weather,)
    return [(b, w) for w in weathers for b in scenario.bands], weathers


def _shares(b):
    try:
        return {k.value: v for k, v in lb.layer_shares(b).items()}
    except UndefinedShareError:
        return None


def cmd_budget(args, scenario):
    pairs, _ = _pairs(scenario, args.weather_sweep)
    breakdowns = _parallel_map(lambda p: scenario.breakdown(*p), pairs, args.jobs)
    results, rows = [], []
    for b in breakdowns:
        entry = b.to_dict()
        entry["layer_share_percent"] = _shares(b)
        results.append(entry)
        for factor, value in b.per_factor.items():
            flag = "<0.1" if factor in b.sub_threshold else ""
            rows.append([b.band, b.weather, factor.value, value, flag])
        for layer, value in b.per_layer.items():
            share = entry["layer_share_percent"]
            rows.append([b.band, b.weather, f"layer:{layer.value}", value,
                         "" if share is None else f"{share[layer.value]:.2f}%"])
    doc = {"schema_version": SCHEMA_VERSION, "command": "budget", "results": results}
    return doc, ["band", "weather", "factor", "loss_db", "flag"], rows


def cmd_capacity(args, scenario):
    pairs, weathers = _pairs(scenario, args.weather_sweep)

    def run(pair):
        band, weather = pair
        b = scenario.breakdown(band, weather)
        return b, lb.capacity(b, band)

    results = []
    table: dict[str, dict[str, float]] = {}
    for b, c in _parallel_map(run, pairs, args.jobs):
        results.append({
            "band": b.band, "weather": b.weather, "snr_db": c.snr, "bits_per_s": c.bits_per_s,
            "spectral_efficiency_bps_hz": c.spectral_efficiency, "total_loss_db": b.total,
        })
        table.setdefault(b.band, {})[b.weather] = c.spectral_efficiency
    labels = [w.label for w in weathers]
    doc = {"schema_version": SCHEMA_VERSION, "command": "capacity", "weathers": labels, "results": results}
    header = ["band"] + [f"{w}_bps_hz" for w in labels]
    rows = [[band] + [cols[w] for w in labels] for band, cols in table.items()]
    return doc, header, rows


def cmd_layers(args, scenario):
    pairs, _ = _pairs(scenario, args.weather_sweep)
    breakdowns = _parallel_map(lambda p: scenario.breakdown(*p), pairs, args.jobs)
    results, rows = [], []
    for b in breakdowns:
        shares = _shares(b)
        results.append({"band": b.band, "weather": b.weather,
                        "per_layer_db": {k.value: v for k, v in b.per_layer.items()}, "share_percent": shares})
        for layer, value in b.per_layer.items():
            rows.append([b.band, b.weather, layer.value, value, None if shares is None else shares[layer.value]])
    doc = {"schema_version": SCHEMA_VERSION, "command": "layers", "results": results}
    return doc, ["band", "weather", "layer", "loss_db", "share_percent"], [["" if v is None else v for v in r] for r in rows]


def _axis(spec, default):
    if spec is None:
        return np.asarray(default, dtype=float)
    if isinstance(spec, dict):
        return np.linspace(spec["start"], spec["stop"], int(spec["num"]))
    return np.asarray(spec, dtype=float)


def _load_waveform_spec(path: Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read waveform spec {path}: {exc}") from None
    if not isinstance(spec, dict) or "family" not in spec:
        raise UsageError("waveform spec needs a 'family' field")
    try:
        spec["family"] = wf.WaveformFamily(spec["family"]).value
    except ValueError:
        names = ", ".join(f.value for f in wf.WaveformFamily)
        raise UsageError(f"family: unknown waveform family {spec['family']!r} (expected one of {names})") from None
    return spec


def cmd_waveform(args):
    spec = _load_waveform_spec(args.spec)
    metric = args.metric or spec.get("metric", "papr")
    if metric not in ("papr", "ambiguity"):
        raise UsageError(f"metric: unknown metric {metric!r}")
    family = spec["family"]
    params = spec.get("params", {})
    seed = args.seed if args.seed is not None else int(spec.get("seed", wf.DEFAULT_SEED))
    doc = {"schema_version": SCHEMA_VERSION, "command": "waveform", "metric": metric, "family": family, "seed": seed}

    if metric == "papr":
        n_frames = int(spec.get("n_frames", 10_000))
        oversample = int(spec.get("oversample", wf.PAPR_OVERSAMPLE))
        stats = wf.papr_statistics(family, n_frames=n_frames, seed=seed, oversample_factor=oversample, **params)
        doc["papr"] = stats
        rows = [[family, p, v] for p, v in stats["percentiles_db"].items()]
        if "compare" in spec:
            other = wf.WaveformFamily(spec["compare"]).value
            other_stats = wf.papr_statistics(other, n_frames=n_frames, seed=seed, oversample_factor=oversample, **params)
            p99 = stats["percentiles_db"].get("99"), other_stats["percentiles_db"].get("99")
            doc["comparison"] = {
                "family": other, "papr": other_stats,
                "p99_difference_db": None if None in p99 else p99[0] - p99[1],
                "lower_p99": None if None in p99 else (family if p99[0] < p99[1] else other),
            }
            rows += [[other, p, v] for p, v in other_stats["percentiles_db"].items()]
        return doc, ["family", "percentile", "papr_db"], rows

    frame = wf.random_frame(family, np.random.default_rng(seed), **params)
    fs = frame.sample_rate
    delays = _axis(spec.get("delays_s"), np.arange(-8, 9) / fs)
    dopplers = _axis(spec.get("dopplers_hz"), np.linspace(-4, 4, 17) * fs / len(frame))
    echo = spec.get("echo")
    if echo is None:
        surface = wf.ambiguity(frame, delays, dopplers)
    else:
        rx = wf.inject_echo(frame, echo["delay_s"], echo["doppler_hz"], echo.get("snr_db"), seed=seed)
        surface = wf.cross_ambiguity(rx, frame, delays, dopplers)
    i, j = surface.peak()
    doc.update({
        "delay_axis_s": surface.delay_axis.tolist(),
        "doppler_axis_hz": surface.doppler_axis.tolist(),
        "magnitude": surface.magnitude.tolist(),
        "peak": {"delay_index": i, "doppler_index": j,
                 "delay_s": float(surface.delay_axis[i]), "doppler_hz": float(surface.doppler_axis[j])},
    })
    if echo is not None:
        doc["echo"] = dict(echo)
    header = ["delay_s\\doppler_hz"] + [repr(float(v)) for v in surface.doppler_axis]
    rows = [[float(d)] + [float(v) for v in row] for d, row in zip(surface.delay_axis, surface.magnitude)]
    return doc, header, rows


# ---------------------------------------------------------------------------

def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "xsection":
            out = cmd_xsection(args)
        elif args.command == "waveform":
            out = cmd_waveform(args)
        else:
            scenario = scn.load_scenario(args.scenario)
            out = {"budget": cmd_budget, "capacity": cmd_capacity, "layers": cmd_layers}[args.command](args, scenario)
        _emit(args, *out)
    except (UsageError, ConfigError, DomainError, FileNotFoundError) as exc:
        print(f"sagin: error: {exc}", file=sys.stderr)
        return 2
    except SaginError as exc:
        print(f"sagin: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
