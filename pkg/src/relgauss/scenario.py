"""Declarative scenario documents and the three experiment pipelines.

A scenario is a flat, sectioned key-value document (INI syntax) with
explicit units in key names. Parsing validates the whole document and
reports every problem found, not just the first. Unknown sections or
keys are rejected rather than ignored.

Experiments:

* ``twirl``: build the external state, move to the CM/relational
  partition, measure pre-twirl entanglement, group-average over
  translations and measure what is left.
* ``zmodel-extract``: capacitor coupling; per-branch energies,
  extractability check and the energy cost triple (mixture and both
  single-branch collapses).
* ``povm-sweep``: the binned-measurement interpolation table between the
  twirl and single-branch regimes.

Runs are deterministic: identical inputs produce byte-identical output
files (wall-clock timing is reported on stderr only, never in the
artifacts).
"""

from __future__ import annotations

import configparser
import io
import json
import os
import re
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import __version__ as _version
from .density import (
    Bipartition,
    entanglement_entropy,
    log_negativity,
    max_negativity_over_cuts,
    g_twirl,
    pure_to_density,
)
from .errors import (
    NumericToleranceError,
    ProtocolNotApplicableError,
    ScenarioValidationError,
)
from .partition import (
    ParticleConfig,
    build_partition_map,
    check_canonical,
    to_cm_relational,
)
from .povm import limit_sweep
from .serialize import encode_matrix
from .states import state_norm
from .zmodel import (
    CapacitorZModel,
    PositionCoupling,
    branch_energies,
    extraction_energy_cost,
    interaction_energy,
)

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "RELGAUSS_OUTPUT_DIR"

EXPERIMENTS = ("twirl", "zmodel-extract", "povm-sweep")

DEFAULT_OMEGA = 50.0
DEFAULT_TOLERANCES = {
    "entanglement_threshold": 1e-8,
    "coincidence": 1e-9,
    "partition_energy_deviation": 1e-10,
}

_PARTICLE_KEY = re.compile(r"^particle_(\d+)_(centers|amplitudes)$")

_SECTION_KEYS = {
    "scenario": {"name", "experiment"},
    "particles": {"count", "masses", "omega"},
    "zmodel": {"charge", "plate_charge_density", "plate_separation_natural",
               "left_plate_position_natural"},
    "detector": {"energy_uncertainty", "charge_grid", "width_grid"},
    "output": {"directory", "format"},
    "tolerances": set(DEFAULT_TOLERANCES),
}

SWEEP_COLUMNS = ("q_sigma", "b", "delta_x", "p", "log_negativity",
                 "dist_to_twirl", "dist_to_zmodel")
ROW_COLUMNS = ("quantity", "label", "stage", "value")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    experiment: str
    particles: ParticleConfig
    zmodel: CapacitorZModel = None
    energy_uncertainty: float = None
    charge_grid: tuple = ()
    width_grid: tuple = ()
    output_directory: str = None
    output_format: str = "both"
    tolerances: dict = field(default_factory=dict)


@dataclass
class ResultRecord:
    """Deterministic experiment output: fixed column order, typed rows.

    ``extras`` holds structured payloads (serialized operators) that only
    appear in the JSON emission.
    """

    schema_version: int
    name: str
    experiment: str
    columns: list
    rows: list
    provenance: dict
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _parse_floats(text: str):
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_complexes(text: str):
    return [complex(tok) for tok in text.replace(",", " ").split()]


def _parse_grid(text: str):
    """Whitespace-separated floats, or ``logspace:<lo>:<hi>:<n>`` in
    decades."""
    text = text.strip()
    if text.startswith("logspace:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError("logspace grid needs logspace:<lo>:<hi>:<n>")
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        return [float(v) for v in np.logspace(lo, hi, n)]
    return _parse_floats(text)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises:
        ScenarioValidationError: carrying every problem found.
    """
    problems = []
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ScenarioValidationError([f"document is not well formed: {exc}"])

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            problems.append(f"unknown section [{section}]")
            continue
        for key in parser[section]:
            if key in _SECTION_KEYS[section]:
                continue
            if section == "particles" and _PARTICLE_KEY.match(key):
                continue
            problems.append(f"unknown key {key!r} in section [{section}]")

    def need(section, key, default=None, required=False):
        if parser.has_option(section, key):
            return parser.get(section, key)
        if required:
            problems.append(f"missing required key {key!r} in [{section}]")
        return default

    name = need("scenario", "name", required=True) \
        if parser.has_section("scenario") else None
    experiment = need("scenario", "experiment", required=True) \
        if parser.has_section("scenario") else None
    if not parser.has_section("scenario"):
        problems.append("missing required section [scenario]")
    if experiment is not None and experiment not in EXPERIMENTS:
        problems.append(
            f"experiment must be one of {', '.join(EXPERIMENTS)}; got {experiment!r}")

    particles = None
    if not parser.has_section("particles"):
        problems.append("missing required section [particles]")
    else:
        particle_problems_start = len(problems)
        count_text = need("particles", "count", required=True)
        count = None
        if count_text is not None:
            try:
                count = int(count_text)
                if count < 1:
                    problems.append("particle count must be positive")
                    count = None
            except ValueError:
                problems.append(f"particle count is not an integer: {count_text!r}")
        omega = DEFAULT_OMEGA
        omega_text = need("particles", "omega")
        if omega_text is not None:
            try:
                omega = float(omega_text)
                if omega <= 0:
                    problems.append("omega must be positive")
            except ValueError:
                problems.append(f"omega is not a number: {omega_text!r}")
        masses = None
        masses_text = need("particles", "masses")
        if masses_text is not None:
            try:
                masses = _parse_floats(masses_text)
            except ValueError:
                problems.append(f"masses are not numbers: {masses_text!r}")
        if count is not None:
            if masses is None:
                masses = [1.0] * count
            elif len(masses) != count:
                problems.append(
                    f"expected {count} masses, got {len(masses)}")
                masses = [1.0] * count
            if any(m <= 0 for m in masses):
                problems.append("masses must be positive")
            branch_lists = []
            for k in range(1, count + 1):
                centers_text = need("particles", f"particle_{k}_centers",
                                    required=True)
                centers = []
                if centers_text is not None:
                    try:
                        centers = _parse_floats(centers_text)
                    except ValueError:
                        problems.append(
                            f"particle_{k}_centers are not numbers")
                if centers_text is not None and not centers:
                    problems.append(f"particle_{k}_centers is empty")
                amps_text = need("particles", f"particle_{k}_amplitudes")
                if amps_text is None:
                    amps = [1.0 + 0.0j] * max(len(centers), 1)
                else:
                    try:
                        amps = _parse_complexes(amps_text)
                    except ValueError:
                        problems.append(
                            f"particle_{k}_amplitudes are not complex numbers")
                        amps = [1.0 + 0.0j] * max(len(centers), 1)
                    if centers and len(amps) != len(centers):
                        problems.append(
                            f"particle_{k}: {len(centers)} centers but "
                            f"{len(amps)} amplitudes")
                        amps = amps[:len(centers)] + \
                            [1.0 + 0.0j] * max(0, len(centers) - len(amps))
                branch_lists.append(tuple(zip(amps, centers)) if centers
                                    else ((1.0 + 0.0j, 0.0),))
            for key in parser["particles"]:
                m = _PARTICLE_KEY.match(key)
                if m and not (1 <= int(m.group(1)) <= count):
                    problems.append(
                        f"key {key!r} refers to a particle outside 1..{count}")
            if len(problems) == particle_problems_start:
                particles = ParticleConfig(masses=tuple(masses),
                                           branches=tuple(branch_lists),
                                           omega=omega)

    zmodel = None
    if parser.has_section("zmodel"):
        try:
            zmodel = CapacitorZModel(
                charge=float(need("zmodel", "charge", "1.0")),
                plate_density=float(need("zmodel", "plate_charge_density", "1.0")),
                separation=float(need("zmodel", "plate_separation_natural", "10.0")),
                x_left=float(need("zmodel", "left_plate_position_natural", "-1.0")),
            )
        except ValueError as exc:
            problems.append(f"bad zmodel parameters: {exc}")
    elif experiment == "zmodel-extract":
        zmodel = CapacitorZModel(charge=1.0, plate_density=1.0,
                                 separation=10.0, x_left=-1.0)

    energy_uncertainty = None
    charge_grid = ()
    width_grid = ()
    if experiment == "povm-sweep":
        if not parser.has_section("detector"):
            problems.append("povm-sweep requires a [detector] section")
        else:
            eu = need("detector", "energy_uncertainty", required=True)
            cg = need("detector", "charge_grid", required=True)
            wg = need("detector", "width_grid", required=True)
            try:
                energy_uncertainty = float(eu) if eu is not None else None
            except ValueError:
                problems.append("energy_uncertainty is not a number")
            for label, textval in (("charge_grid", cg), ("width_grid", wg)):
                if textval is None:
                    continue
                try:
                    grid = _parse_grid(textval)
                    if not grid:
                        problems.append(f"{label} is empty")
                    if label == "charge_grid":
                        charge_grid = tuple(grid)
                    else:
                        width_grid = tuple(grid)
                        if any(b <= 0 for b in grid):
                            problems.append("width_grid entries must be positive")
                except ValueError as exc:
                    problems.append(f"bad {label}: {exc}")

    if experiment == "zmodel-extract" and particles is not None \
            and zmodel is not None:
        for k, per in enumerate(particles.branches, start=1):
            for b_idx, (_, center) in enumerate(per):
                if not zmodel.contains(center):
                    problems.append(
                        f"particle {k} branch {b_idx} at x={center} lies "
                        f"outside the capacitor "
                        f"[{zmodel.x_left}, {zmodel.x_right}]")

    tolerances = dict(DEFAULT_TOLERANCES)
    if parser.has_section("tolerances"):
        for key in parser["tolerances"]:
            if key not in DEFAULT_TOLERANCES:
                continue  # already reported as unknown
            try:
                tolerances[key] = float(parser.get("tolerances", key))
            except ValueError:
                problems.append(f"tolerance {key!r} is not a number")

    output_directory = None
    output_format = "both"
    if parser.has_section("output"):
        output_directory = need("output", "directory")
        output_format = need("output", "format", "both")
        if output_format not in ("csv", "json", "both"):
            problems.append(
                f"output format must be csv, json or both; got {output_format!r}")

    if problems:
        raise ScenarioValidationError(problems)
    return Scenario(
        name=name,
        experiment=experiment,
        particles=particles,
        zmodel=zmodel,
        energy_uncertainty=energy_uncertainty,
        charge_grid=charge_grid,
        width_grid=width_grid,
        output_directory=output_directory,
        output_format=output_format,
        tolerances=tolerances,
    )


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())


# ---------------------------------------------------------------------------
# Experiment pipelines
# ---------------------------------------------------------------------------

def _cut_label(cut: Bipartition) -> str:
    a = ",".join(str(s) for s in cut.a)
    b = ",".join(str(s) for s in cut.b)
    return f"{{{a}}}|{{{b}}}"


def _relational_cuts(n_slots: int):
    cuts = []
    for size in range(1, n_slots // 2 + 1):
        for a in combinations(range(n_slots), size):
            if 2 * size == n_slots and 0 not in a:
                continue
            cuts.append(Bipartition.of(n_slots, a))
    return cuts


def _check_norm(state, tolerances):
    if abs(state_norm(state) - 1.0) > 1e-8:
        raise NumericToleranceError("state norm drifted from 1")


def _run_twirl(scenario: Scenario) -> ResultRecord:
    particles = scenario.particles
    external = particles.build_state()
    pmap = build_partition_map(particles.masses)
    if not check_canonical(pmap):
        raise NumericToleranceError("partition map failed the symplectic check")
    cm_state = to_cm_relational(external, pmap)
    _check_norm(cm_state, scenario.tolerances)
    rows = []
    if cm_state.n_slots >= 2:
        cut = Bipartition.of(cm_state.n_slots, (0,))
        rows.append(["entropy", "cm|rel", "pre_twirl",
                     entanglement_entropy(cm_state, cut)])
        rows.append(["log_negativity", "cm|rel", "pre_twirl",
                     log_negativity(pure_to_density(cm_state), cut)])
    rho = pure_to_density(cm_state)
    twirled = g_twirl(rho)
    for cut in _relational_cuts(twirled.n_slots) if twirled.n_slots >= 2 else []:
        rows.append(["log_negativity", _cut_label(cut), "post_twirl",
                     log_negativity(twirled, cut)])
    rows.append(["log_negativity_max", "all_cuts", "post_twirl",
                 max_negativity_over_cuts(twirled)])
    rows.append(["raw_scale", "twirl", "post_twirl", twirled.raw_scale])
    extras = {
        "twirled_state": {
            "partition": twirled.partition,
            "coefficients": encode_matrix(twirled.coefficients),
            "gram": encode_matrix(twirled.gram),
        }
    }
    return _record(scenario, list(ROW_COLUMNS), rows, extras)


def _run_zmodel(scenario: Scenario) -> ResultRecord:
    particles = scenario.particles
    z = scenario.zmodel
    external = particles.build_state()
    pmap = build_partition_map(particles.masses)
    cm_state = to_cm_relational(external, pmap)
    _check_norm(cm_state, scenario.tolerances)

    e_ext = branch_energies(external, z, particles.masses)
    e_cm = branch_energies(cm_state, z)
    deviation = max(abs(a - b) for a, b in zip(e_ext, e_cm))
    if deviation > scenario.tolerances["partition_energy_deviation"]:
        raise NumericToleranceError(
            f"branch energies disagree across partitions by {deviation:.3e}")

    rows = []
    for i, (ea, eb) in enumerate(zip(e_ext, e_cm)):
        rows.append(["branch_energy", f"branch_{i}", "external", ea])
        rows.append(["branch_energy", f"branch_{i}", "cm_relational", eb])
    rows.append(["partition_energy_deviation", "max", "check", deviation])
    rows.append(["interaction_energy", "state", "initial",
                 interaction_energy(cm_state, z)])

    rho = pure_to_density(cm_state)
    coupling = PositionCoupling.cm_coupling(z, cm_state.n_slots)
    threshold = scenario.tolerances["entanglement_threshold"]
    try:
        result = extraction_energy_cost(coupling, rho, threshold=threshold)
    except ProtocolNotApplicableError:
        rows.append(["protocol_applicable", "extraction", "check", 0.0])
        return _record(scenario, list(ROW_COLUMNS), rows, {})
    rows.append(["protocol_applicable", "extraction", "check", 1.0])
    rows.append(["log_negativity_max", "all_cuts", "initial", result.negativity])
    rows.append(["delta_e", "mixture", "final", result.delta_mixture])
    for i, d in enumerate(result.delta_branches):
        rows.append(["delta_e", f"branch_{i}", "final", d])
    return _record(scenario, list(ROW_COLUMNS), rows, {})


def _run_sweep(scenario: Scenario) -> ResultRecord:
    particles = scenario.particles
    external = particles.build_state()
    pmap = build_partition_map(particles.masses)
    cm_state = to_cm_relational(external, pmap)
    points = limit_sweep(cm_state, scenario.charge_grid, scenario.width_grid,
                         scenario.energy_uncertainty)
    rows = []
    for pt in points:
        if not (-1e-9 <= pt.probability <= 1.0 + 1e-9):
            raise NumericToleranceError(
                f"bin probability {pt.probability} outside [0, 1]")
        rows.append([pt.q_sigma, pt.b, pt.delta_x, pt.probability,
                     pt.log_negativity, pt.dist_to_twirl, pt.dist_to_zmodel])
    return _record(scenario, list(SWEEP_COLUMNS), rows, {})


def _record(scenario: Scenario, columns, rows, extras) -> ResultRecord:
    return ResultRecord(
        schema_version=SCHEMA_VERSION,
        name=scenario.name,
        experiment=scenario.experiment,
        columns=columns,
        rows=rows,
        provenance={
            "library_version": _version,
            "tolerances": {k: scenario.tolerances[k]
                           for k in sorted(scenario.tolerances)},
        },
        extras=extras,
    )


def run(scenario: Scenario) -> ResultRecord:
    """Execute a validated scenario and return its result record."""
    if scenario.experiment == "twirl":
        return _run_twirl(scenario)
    if scenario.experiment == "zmodel-extract":
        return _run_zmodel(scenario)
    if scenario.experiment == "povm-sweep":
        return _run_sweep(scenario)
    raise ScenarioValidationError([f"unknown experiment {scenario.experiment!r}"])


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def record_to_csv(record: ResultRecord) -> str:
    buf = io.StringIO()
    buf.write(",".join(record.columns) + "\n")
    for row in record.rows:
        buf.write(",".join(_format_value(v) for v in row) + "\n")
    return buf.getvalue()


def record_to_json(record: ResultRecord) -> str:
    doc = {
        "schema_version": record.schema_version,
        "name": record.name,
        "experiment": record.experiment,
        "provenance": record.provenance,
        "columns": list(record.columns),
        "rows": [list(r) for r in record.rows],
        "extras": record.extras,
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def record_from_json(text: str) -> ResultRecord:
    doc = json.loads(text)
    return ResultRecord(
        schema_version=doc["schema_version"],
        name=doc["name"],
        experiment=doc["experiment"],
        columns=list(doc["columns"]),
        rows=[list(r) for r in doc["rows"]],
        provenance=doc["provenance"],
        extras=doc.get("extras", {}),
    )


def emit(record: ResultRecord, out_dir: str, formats=("csv", "json")) -> list:
    """Write the record; returns the paths created.

    File contents depend only on the record, so repeated runs of the same
    scenario emit byte-identical artifacts.
    """
    os.makedirs(out_dir, exist_ok=True)
    stem = f"{record.name}.{record.experiment}"
    paths = []
    if "csv" in formats:
        path = os.path.join(out_dir, stem + ".csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(record_to_csv(record))
        paths.append(path)
    if "json" in formats:
        path = os.path.join(out_dir, stem + ".json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(record_to_json(record))
        paths.append(path)
    return paths


def describe_schema() -> dict:
    """Machine-readable description of the scenario document and outputs."""
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_sections": {
            "scenario": {"name": "string", "experiment": "|".join(EXPERIMENTS)},
            "particles": {
                "count": "int >= 1",
                "masses": "floats, one per particle (default 1)",
                "omega": f"float > 0 (default {DEFAULT_OMEGA})",
                "particle_<k>_centers": "floats, branch centers of particle k",
                "particle_<k>_amplitudes":
                    "complex amplitudes, same length (default equal)",
            },
            "zmodel": {
                "charge": "float (default 1)",
                "plate_charge_density": "float (default 1)",
                "plate_separation_natural": "float > 0 (default 10)",
                "left_plate_position_natural": "float (default -1)",
            },
            "detector": {
                "energy_uncertainty": "float, detector energy resolution",
                "charge_grid": "floats or logspace:<lo>:<hi>:<n>",
                "width_grid": "positive floats",
            },
            "output": {"directory": "path", "format": "csv|json|both"},
            "tolerances": {k: f"float (default {v})"
                           for k, v in DEFAULT_TOLERANCES.items()},
        },
        "result_columns": {
            "twirl": list(ROW_COLUMNS),
            "zmodel-extract": list(ROW_COLUMNS),
            "povm-sweep": list(SWEEP_COLUMNS),
        },
        "matrix_encoding": "row-major, entries as [re, im] pairs",
        "exit_codes": {"0": "success", "2": "validation error",
                       "3": "numeric tolerance breach"},
        "environment": {OUTPUT_DIR_ENV: "default output directory"},
    }
