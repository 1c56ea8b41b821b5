"""Command-line front end: config ingestion, seeded runs, canonical reports.

Subcommands compose the library through its public operations only, so a
CLI run doubles as an end-to-end test.  Reports land in
``<out>/<digest>/<command>.report.json`` (machine-readable, byte-identical
for identical config and seed) and ``.report.txt`` (human-readable, the
only place a timestamp appears).  The digest is a content hash of the
canonicalized physics configuration, so reordering keys in the config
file does not move the output.

Config file grammar (JSON object; every key optional):

  lab_width      integer >= 1, pointer qubits per lab (default 1)
  seed           unsigned 64-bit integer (default 0)
  tolerance      positive float for report assertions (default 1e-10)
  robust_tol     positive float, residual-coherence threshold (default 1e-3)
  geometry       "default" | "collinear" | {"events": {"A": [t,x,y,z], ...}}
  frame_filter   boolean, drop joint contexts without a simultaneity frame
  frame_triples  list of 3-letter strings over ABCUVW (default the five
                 singled-out triples)
  dephasing      {"target": "L1", "strength": 0.5, "steps": 20}
  generators     three signed Pauli words fixing the entangled state
  stage          "full" | "friend" (paradox subcommand only)
  out            output directory (default "reports")
  format         "text" | "json" stdout rendering

Flags override file values; the WIGNERLAB_OUT environment variable
overrides the default output directory.  Exit status: 0 all checks
passed, 1 a check failed, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, qcore, spacetime
from .contexts import (
    NAMED_CONTEXT_IDS,
    common_extension,
    incompatibility_graph,
    maximal_contexts,
    primary_context,
)
from .decoherence import (
    DephasingChannel,
    correlation_decay,
    diagonality_trajectory,
    expectation_trajectory,
    onset_step,
)
from .errors import (
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    NoncommutingGeneratorsError,
    RankNotOneError,
)
from .paradox import (
    constraints_from_born,
    enumerate_satisfying,
    gf2_consistency,
    global_section_exists,
    scenario_constraints,
)
from .scenario import (
    OUTCOME_VARIABLE,
    build_scenario,
    context_born_table,
    erasure_check,
    lab_label,
    run_friend_stage,
    sample_outcomes,
    scenario_context,
)
from .stabilizer import joint_eigenstate, parse_pauli, to_operator

ENV_OUT = "WIGNERLAB_OUT"

_DEFAULT_GENERATORS = ("+XZZ", "+ZXZ", "+ZZX")
_DEFAULT_TRIPLES = ("ABC", "UVW", "UBC", "AVC", "ABW")
_DEFAULT_DEPHASING = {"target": "L1", "strength": 0.5, "steps": 20}

# Agent triples realizing the four parity constraints, in constraint order.
_CONSTRAINT_AGENTS = (
    ("Eugene", "Bob", "Charlie"),
    ("Alice", "Johnny", "Charlie"),
    ("Alice", "Bob", "Daniel"),
    ("Eugene", "Johnny", "Daniel"),
)
_RECORD_AGENTS = ("Alice", "Bob", "Charlie")


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated run configuration with every default filled in."""

    lab_width: int
    seed: int
    tolerance: float
    robust_tol: float
    geometry_name: str
    geometry: spacetime.Geometry
    frame_filter: bool
    frame_triples: tuple[str, ...]
    dephasing_target: str
    dephasing_strength: float
    dephasing_steps: int
    generators: tuple[str, ...]
    stage: str
    out: str
    format: str
    warnings: tuple[str, ...]

    def digest_payload(self) -> dict:
        if self.geometry_name == "custom":
            geometry = {
                label: [e.t, e.x, e.y, e.z]
                for label, e in sorted(self.geometry.events.items())
            }
        else:
            geometry = self.geometry_name
        return {
            "lab_width": self.lab_width,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "robust_tol": self.robust_tol,
            "geometry": geometry,
            "frame_filter": self.frame_filter,
            "frame_triples": list(self.frame_triples),
            "dephasing": {
                "target": self.dephasing_target,
                "strength": self.dephasing_strength,
                "steps": self.dephasing_steps,
            },
            "generators": list(self.generators),
            "stage": self.stage,
        }

    def digest(self) -> str:
        payload = canonical_json(self.digest_payload()).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


def _plain(value):
    """Recursively coerce to builtin JSON-serializable types."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, type(None), str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"cannot serialize {type(value).__name__} into a report")


def canonical_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def _sig12(x: float) -> float:
    """Round to 12 significant digits for report display."""
    return float(f"{float(x):.12g}")


def load_config(path: str | None) -> dict:
    """Raw config mapping from a JSON file; None or empty file mean defaults."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path!r}: {exc}") from None
    if not text.strip():
        return {}
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"config {path!r} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigParseError(f"config {path!r} must hold a JSON object")
    return raw


def _need(kind, raw, key, default):
    value = raw.get(key, default)
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ConfigValidationError(f"{key}: expected an integer, got {value!r}")
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValidationError(f"{key}: expected a number, got {value!r}")
        value = float(value)
    if kind is bool and not isinstance(value, bool):
        raise ConfigValidationError(f"{key}: expected true or false, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise ConfigValidationError(f"{key}: expected a string, got {value!r}")
    return value


def _build_geometry(value) -> tuple[str, spacetime.Geometry]:
    if value == "default":
        return "default", spacetime.default_geometry()
    if value == "collinear":
        return "collinear", spacetime.collinear_geometry()
    if isinstance(value, dict) and set(value) == {"events"}:
        events = value["events"]
        if not isinstance(events, dict) or set(events) != set(spacetime.EVENT_LABELS):
            raise ConfigValidationError(
                f"geometry: events must map exactly the labels "
                f"{'/'.join(spacetime.EVENT_LABELS)}"
            )
        built = {}
        for label, coords in events.items():
            if (not isinstance(coords, list) or len(coords) != 4
                    or any(isinstance(c, bool) or not isinstance(c, (int, float))
                           for c in coords)):
                raise ConfigValidationError(
                    f"geometry: event {label} needs four numbers [t, x, y, z]"
                )
            built[label] = spacetime.Event4(label, *map(float, coords))
        return "custom", spacetime.Geometry(built)
    raise ConfigValidationError(
        f"geometry: expected \"default\", \"collinear\", or an events table, "
        f"got {value!r}"
    )


def build_config(raw: dict, args: argparse.Namespace | None = None) -> ScenarioConfig:
    """Validate the merged file + flag configuration and fill defaults."""
    known = {"lab_width", "seed", "tolerance", "robust_tol", "geometry",
             "frame_filter", "frame_triples", "dephasing", "generators",
             "stage", "out", "format"}
    for key in raw:
        if key not in known:
            raise ConfigValidationError(f"{key}: unknown configuration key")
    merged = dict(raw)
    if args is not None:
        if args.lab_width is not None:
            merged["lab_width"] = args.lab_width
        if args.seed is not None:
            merged["seed"] = args.seed
        if args.tolerance is not None:
            merged["tolerance"] = args.tolerance
        if args.frame_filter is not None:
            merged["frame_filter"] = args.frame_filter == "on"
        if args.format is not None:
            merged["format"] = args.format
        if args.out is not None:
            merged["out"] = args.out

    lab_width = _need(int, merged, "lab_width", 1)
    if lab_width < 1:
        raise ConfigValidationError(f"lab_width: must be >= 1, got {lab_width}")
    seed = _need(int, merged, "seed", 0)
    if not 0 <= seed < 2 ** 64:
        raise ConfigValidationError(f"seed: must fit in 64 unsigned bits, got {seed}")
    tolerance = _need(float, merged, "tolerance", 1e-10)
    if tolerance <= 0:
        raise ConfigValidationError(f"tolerance: must be positive, got {tolerance}")
    robust_tol = _need(float, merged, "robust_tol", 1e-3)
    if robust_tol <= 0:
        raise ConfigValidationError(f"robust_tol: must be positive, got {robust_tol}")

    geometry_name, geometry = _build_geometry(merged.get("geometry", "default"))
    violations = spacetime.separation_violations(geometry)
    if violations:
        raise ConfigValidationError("geometry: " + "; ".join(violations))

    frame_filter = _need(bool, merged, "frame_filter", False)
    warnings = []
    if frame_filter and geometry_name == "collinear":
        warnings.append(
            "frame_filter with the collinear geometry leaves only the "
            "same-stage contexts; mixed-stage triples admit no frame there"
        )

    triples = merged.get("frame_triples", list(_DEFAULT_TRIPLES))
    if (not isinstance(triples, list) or not triples
            or any(not isinstance(t, str) for t in triples)):
        raise ConfigValidationError("frame_triples: expected a list of strings")
    for t in triples:
        if len(t) != 3 or len(set(t)) != 3 or any(
                ch not in spacetime.EVENT_LABELS for ch in t):
            raise ConfigValidationError(
                f"frame_triples: {t!r} is not three distinct letters "
                f"from {''.join(spacetime.EVENT_LABELS)}"
            )

    dephasing = merged.get("dephasing", {})
    if not isinstance(dephasing, dict):
        raise ConfigValidationError("dephasing: expected an object")
    for key in dephasing:
        if key not in _DEFAULT_DEPHASING:
            raise ConfigValidationError(f"dephasing.{key}: unknown key")
    target = dephasing.get("target", _DEFAULT_DEPHASING["target"])
    if target not in {lab_label(i) for i in (1, 2, 3)}:
        raise ConfigValidationError(
            f"dephasing.target: must be one lab pointer L1/L2/L3, got {target!r}"
        )
    strength = dephasing.get("strength", _DEFAULT_DEPHASING["strength"])
    if (isinstance(strength, bool) or not isinstance(strength, (int, float))
            or not 0.0 <= strength <= 1.0):
        raise ConfigValidationError(
            f"dephasing.strength: must lie in [0, 1], got {strength!r}"
        )
    steps = dephasing.get("steps", _DEFAULT_DEPHASING["steps"])
    if not isinstance(steps, int) or isinstance(steps, bool) or steps < 0:
        raise ConfigValidationError(
            f"dephasing.steps: must be a nonnegative integer, got {steps!r}"
        )

    generators = merged.get("generators", list(_DEFAULT_GENERATORS))
    if (not isinstance(generators, list) or len(generators) != 3
            or any(not isinstance(g, str) for g in generators)):
        raise ConfigValidationError("generators: expected three Pauli words")
    for word in generators:
        try:
            p = parse_pauli(word)
        except ValueError as exc:
            raise ConfigValidationError(f"generators: {exc}") from None
        if len(p.letters) != 3:
            raise ConfigValidationError(
                f"generators: {word!r} must act on exactly three atoms"
            )
        if not p.is_hermitian:
            raise ConfigValidationError(
                f"generators: {word!r} has an imaginary phase"
            )

    stage = _need(str, merged, "stage", "full")
    if stage not in ("full", "friend"):
        raise ConfigValidationError(
            f"stage: expected \"full\" or \"friend\", got {stage!r}"
        )
    fmt = _need(str, merged, "format", "text")
    if fmt not in ("text", "json"):
        raise ConfigValidationError(
            f"format: expected \"text\" or \"json\", got {fmt!r}"
        )
    out = merged.get("out")
    if out is None:
        out = os.environ.get(ENV_OUT, "reports")
    elif not isinstance(out, str):
        raise ConfigValidationError(f"out: expected a string, got {out!r}")
    if args is not None and args.out is not None:
        out = args.out

    return ScenarioConfig(
        lab_width=lab_width, seed=seed, tolerance=tolerance,
        robust_tol=robust_tol, geometry_name=geometry_name, geometry=geometry,
        frame_filter=frame_filter, frame_triples=tuple(triples),
        dephasing_target=target, dephasing_strength=float(strength),
        dephasing_steps=steps, generators=tuple(generators), stage=stage,
        out=out, format=fmt, warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    values: dict


@dataclass(frozen=True)
class RunReport:
    command: str
    version: str
    digest: str
    config: dict
    checks: tuple[CheckResult, ...]
    data: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def document(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "config_digest": self.digest,
            "config": self.config,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "values": _plain(c.values)}
                for c in self.checks
            ],
            "data": _plain(self.data),
        }


def _report(command: str, config: ScenarioConfig, checks, data) -> RunReport:
    return RunReport(command, __version__, config.digest(),
                     config.digest_payload(), tuple(checks), data)


def _table_rows(table: qcore.BornTable) -> list:
    return [[list(outcome), _sig12(p)] for outcome, p in table.rows.items()]


def _render_rows(value) -> bool:
    return (isinstance(value, list) and bool(value)
            and all(isinstance(r, list) for r in value))


def _text_lines(data: dict, indent: int) -> list[str]:
    pad = "  " * indent
    lines = []
    for key in sorted(data):
        value = data[key]
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(value, indent + 1))
        elif _render_rows(value):
            lines.append(f"{pad}{key}:")
            for row in value:
                if all(isinstance(x, (int, float)) and not isinstance(x, bool)
                       for x in row):
                    lines.append(f"{pad}  " + " ".join(str(x) for x in row))
                else:
                    lines.append(f"{pad}  " + canonical_json(row))
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: " + canonical_json(value))
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


def render_text(report: RunReport, timestamp: str) -> str:
    lines = [
        f"command: {report.command}",
        f"version: {report.version}",
        f"config digest: {report.digest}",
        f"generated: {timestamp}",
        "checks:",
    ]
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        detail = canonical_json(check.values)
        lines.append(f"  {status} {check.name} {detail}")
    lines.append("data:")
    lines.extend(_text_lines(_plain(report.data), 1))
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def write_report(report: RunReport, outdir: str) -> tuple[str, str]:
    """Persist the canonical JSON body and the timestamped text rendering."""
    directory = os.path.join(outdir, report.digest)
    os.makedirs(directory, exist_ok=True)
    json_path = os.path.join(directory, f"{report.command}.report.json")
    txt_path = os.path.join(directory, f"{report.command}.report.txt")
    with open(json_path, "w", encoding="utf-8") as handle:
        handle.write(canonical_json(report.document()) + "\n")
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    with open(txt_path, "w", encoding="utf-8") as handle:
        handle.write(render_text(report, stamp))
    return json_path, txt_path


def cmd_ghz_check(config: ScenarioConfig) -> RunReport:
    """Verify the three defining probability patterns of the entangled state."""
    generators = tuple(parse_pauli(w) for w in config.generators)
    state = joint_eigenstate(generators)
    labels = state.layout.labels
    tol = config.tolerance

    def single(letter: str, who: int):
        return to_operator(parse_pauli(letter), (labels[who],))

    y_table = qcore.born_table(tuple(single("Y", i) for i in range(3)), state,
                               names=("y1", "y2", "y3"))
    p_up = y_table.rows[(1, 1, 1)]
    p_down = y_table.rows[(-1, -1, -1)]
    others = max(p for o, p in y_table.rows.items()
                 if o not in ((1, 1, 1), (-1, -1, -1)))
    check1 = CheckResult(
        "condition_1_y_even_split",
        abs(p_up - 0.5) <= tol and abs(p_down - 0.5) <= tol and others <= tol,
        {"p_plus_plus_plus": _sig12(p_up), "p_minus_minus_minus": _sig12(p_down),
         "largest_other_row": _sig12(others)},
    )

    x_table = qcore.born_table(tuple(single("X", i) for i in range(3)), state,
                               names=("x1", "x2", "x3"))
    x_support = x_table.support(tol)
    x_ok = (len(x_support) == 4
            and all(s[0] * s[1] * s[2] == -1 for s in x_support)
            and all(abs(x_table.rows[s] - 0.25) <= tol for s in x_support))
    check2 = CheckResult(
        "condition_2_x_product_minus_one", x_ok,
        {"support_size": len(x_support),
         "products": sorted({s[0] * s[1] * s[2] for s in x_support})},
    )

    mixed_tables = {}
    mixed_ok = True
    mixed_values = {}
    for who in range(3):
        obs = tuple(single("X" if i == who else "Z", i) for i in range(3))
        names = tuple(("x" if i == who else "z") + str(i + 1) for i in range(3))
        table = qcore.born_table(obs, state, names=names)
        support = table.support(tol)
        ok = (len(support) == 4
              and all(s[0] * s[1] * s[2] == 1 for s in support)
              and all(abs(table.rows[s] - 0.25) <= tol for s in support))
        mixed_ok = mixed_ok and ok
        mixed_tables["".join(names)] = _table_rows(table)
        mixed_values["".join(names)] = {
            "support_size": len(support),
            "products": sorted({s[0] * s[1] * s[2] for s in support}),
        }
    check3 = CheckResult("condition_3_mixed_products_plus_one", mixed_ok,
                         mixed_values)

    data = {
        "generators": list(config.generators),
        "y_context": _table_rows(y_table),
        "x_context": _table_rows(x_table),
        "mixed_contexts": mixed_tables,
    }
    return _report("ghz-check", config, (check1, check2, check3), data)


def _constraint_tables(model, state):
    tables = []
    for agents in _CONSTRAINT_AGENTS:
        table = context_born_table(state, scenario_context(model, agents))
        tables.append(table.with_names(tuple(OUTCOME_VARIABLE[a] for a in agents)))
    return tables


def cmd_paradox(config: ScenarioConfig) -> RunReport:
    """Recover the four parity constraints and exhibit their joint failure."""
    model = build_scenario(config.lab_width)
    state = run_friend_stage(model)
    record_table = context_born_table(
        state, scenario_context(model, _RECORD_AGENTS)
    ).with_names(tuple(OUTCOME_VARIABLE[a] for a in _RECORD_AGENTS))

    checks = []
    data = {"stage": config.stage}

    if config.stage == "friend":
        section = global_section_exists([record_table], zero_tol=config.tolerance)
        checks.append(CheckResult(
            "global_section_exists", section.exists and section.count == 8,
            {"exists": section.exists, "count": section.count,
             "universe": list(section.universe)},
        ))
        data["record_context"] = _table_rows(record_table)
        data["note"] = ("with only the sealed-lab records in play, a joint "
                        "outcome assignment exists")
    else:
        tables = _constraint_tables(model, state)
        extraction = constraints_from_born(tables, zero_tol=config.tolerance)
        expected = scenario_constraints().lines()
        recovered = extraction.system.lines()
        checks.append(CheckResult(
            "constraints_recovered",
            recovered == expected and extraction.skipped == (),
            {"constraints": list(recovered), "skipped": list(extraction.skipped)},
        ))

        enumeration = enumerate_satisfying(extraction.system)
        checks.append(CheckResult(
            "no_satisfying_assignment",
            enumeration.count == 0 and enumeration.total == 64,
            {"count": enumeration.count, "total": enumeration.total},
        ))

        parity = gf2_consistency(extraction.system)
        witness = [str(c) for c in parity.witness_constraints(extraction.system)]
        checks.append(CheckResult(
            "parity_elimination_witness",
            not parity.consistent and parity.witness is not None
            and set(parity.witness) == {0, 1, 2, 3},
            {"consistent": parity.consistent,
             "witness_constraints": witness},
        ))

        five = [record_table] + tables
        section = global_section_exists(five, zero_tol=config.tolerance)
        checks.append(CheckResult(
            "no_global_section", not section.exists and section.count == 0,
            {"exists": section.exists, "count": section.count,
             "universe": list(section.universe)},
        ))

        data["constraint_tables"] = {
            "".join(t.names): _table_rows(t) for t in tables
        }
        data["record_context"] = _table_rows(record_table)
        data["note"] = ("the four constraints multiply to a contradiction, "
                        "and no joint assignment sits inside every context's "
                        "support; extremal supports rule out probabilistic "
                        "joint distributions as well")
        sampled = {}
        for agents in (_RECORD_AGENTS,) + _CONSTRAINT_AGENTS:
            outcome = sample_outcomes(state, scenario_context(model, agents),
                                      config.seed)
            key = "".join(OUTCOME_VARIABLE[a] for a in agents)
            sampled[key] = {
                "agents": list(outcome.context),
                "values": dict(outcome.values),
                "probability": _sig12(outcome.probability),
            }
        data["sampled_outcomes"] = sampled

    return _report("paradox", config, checks, data)


def _frame_entry(solution: spacetime.FrameSolution) -> dict:
    entry: dict = {"exists": solution.exists}
    if solution.exists:
        vel = solution.velocity.as_array()
        entry["velocity"] = [_sig12(v) for v in vel]
        entry["speed"] = _sig12(solution.velocity.speed)
        entry["max_time_residual"] = _sig12(solution.residual)
    else:
        entry["gram"] = [[_sig12(x) for x in row] for row in solution.gram]
        entry["gram_eigenvalues"] = [_sig12(x) for x in solution.gram_eigenvalues]
    return entry


def cmd_contexts(config: ScenarioConfig) -> RunReport:
    """Map which records can share an environment and which never can."""
    model = build_scenario(config.lab_width)
    graph = incompatibility_graph(model)
    checks = [CheckResult(
        "incompatibility_graph",
        graph == (("A", "U"), ("B", "V"), ("C", "W")),
        {"pairs": [list(p) for p in graph]},
    )]

    reports = maximal_contexts(model, geometry=config.geometry)
    named = sorted(r.environment.id for r in reports if r.named)
    checks.append(CheckResult(
        "maximal_context_count", len(reports) == 8, {"count": len(reports)},
    ))
    checks.append(CheckResult(
        "named_contexts_flagged", named == sorted(NAMED_CONTEXT_IDS),
        {"named": named, "named_count": len(named)},
    ))

    four = [primary_context(model, a)
            for a in ("Alice", "Bob", "Charlie", "Eugene")]
    checks.append(CheckResult(
        "no_common_extension_with_unsealed_lab",
        common_extension(model, four) is None,
        {"environments": ["E_A", "E_B", "E_C", "E_U"]},
    ))

    entries = []
    for report in reports:
        entries.append({
            "id": report.environment.id,
            "agents": list(report.agents),
            "named": report.named,
            "frame": _frame_entry(report.frame),
        })
    data = {
        "geometry": config.geometry_name,
        "contexts": entries,
        "frame_admissible_count": sum(
            1 for r in reports if r.frame is not None and r.frame.exists),
    }
    if config.frame_filter:
        kept = maximal_contexts(model, geometry=config.geometry,
                                require_frame=True)
        data["frame_filtered_ids"] = [r.environment.id for r in kept]
    return _report("contexts", config, checks, data)


def cmd_frames(config: ScenarioConfig) -> RunReport:
    """Simultaneity-frame verdicts for the configured event triples."""
    geometry = config.geometry
    violations = spacetime.separation_violations(geometry)
    checks = [CheckResult(
        "separation_pattern", not violations, {"violations": list(violations)},
    )]
    entries = []
    for triple in config.frame_triples:
        solution = spacetime.frame_for_events(
            [geometry.events[ch] for ch in triple])
        entry = {"events": list(triple)}
        entry.update(_frame_entry(solution))
        entries.append(entry)
    data = {"geometry": config.geometry_name, "frames": entries}
    return _report("frames", config, checks, data)


def cmd_decohere(config: ScenarioConfig) -> RunReport:
    """Trace how environmental dephasing kills the paradox-feeding correlation."""
    model = build_scenario(config.lab_width)
    channel = DephasingChannel(config.dephasing_target,
                               config.dephasing_strength)
    steps = config.dephasing_steps
    lam = config.dephasing_strength

    decay = correlation_decay(model, channel, steps)
    analytic = [-((1.0 - lam) ** k) for k in range(steps + 1)]
    drift = max(abs(d - a) for d, a in zip(decay, analytic))
    checks = [CheckResult(
        "decay_matches_analytic", drift <= 1e-12,
        {"strength": lam, "largest_drift": _sig12(drift)},
    )]

    lab_index = int(config.dephasing_target[1:])
    survivors = [agents for agents in _CONSTRAINT_AGENTS
                 if agents[lab_index - 1] in _RECORD_AGENTS]
    survivor_series = {}
    flat = True
    for agents in survivors:
        series = expectation_trajectory(model, channel, agents, steps)
        flat = flat and all(abs(v - 1.0) <= 1e-12 for v in series)
        key = "".join(OUTCOME_VARIABLE[a] for a in agents)
        survivor_series[key] = [[k, _sig12(v)] for k, v in enumerate(series)]
    checks.append(CheckResult(
        "record_constraints_unchanged", flat,
        {"contexts": sorted(survivor_series)},
    ))

    erasure = erasure_check(model)
    checks.append(CheckResult(
        "erasure_even_odds",
        abs(erasure.p_plus_given_plus - 0.5) <= config.tolerance
        and abs(erasure.p_plus_given_minus - 0.5) <= config.tolerance,
        {"p_plus_given_plus": _sig12(erasure.p_plus_given_plus),
         "p_plus_given_minus": _sig12(erasure.p_plus_given_minus)},
    ))

    trajectory = diagonality_trajectory(
        qcore.pure_density(run_friend_stage(model)), channel, steps)
    onset = onset_step(trajectory, config.robust_tol)
    data = {
        "decay_series": [[k, _sig12(v)] for k, v in enumerate(decay)],
        "record_series": survivor_series,
        "diagonality_series": [
            [k, _sig12(v)] for k, v in enumerate(trajectory.values)],
        "robust": {
            "tol": config.robust_tol,
            "onset": onset,
            "reached": onset is not None,
        },
    }
    return _report("decohere", config, checks, data)


_HANDLERS = {
    "ghz-check": cmd_ghz_check,
    "paradox": cmd_paradox,
    "contexts": cmd_contexts,
    "frames": cmd_frames,
    "decohere": cmd_decohere,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="JSON configuration file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit RNG seed")
    common.add_argument("--out", metavar="DIR", help="report output directory")
    common.add_argument("--tolerance", type=float,
                        help="assertion tolerance for report checks")
    common.add_argument("--format", choices=("text", "json"),
                        help="stdout rendering")
    common.add_argument("--frame-filter", choices=("on", "off"),
                        help="keep only joint contexts with a simultaneity frame")
    common.add_argument("--lab-width", type=int,
                        help="pointer qubits per laboratory")

    parser = argparse.ArgumentParser(
        prog="wignerlab",
        description="Three-lab entangled-measurement protocol: verify the "
                    "state, exhibit the outcome paradox, and map which "
                    "records can be jointly assessed.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ghz-check", parents=[common],
                   help="verify the entangled state's probability pattern")
    sub.add_parser("paradox", parents=[common],
                   help="derive the four constraints and show their joint failure")
    sub.add_parser("contexts", parents=[common],
                   help="enumerate compatible record environments")
    sub.add_parser("frames", parents=[common],
                   help="simultaneity-frame certificates for event triples")
    sub.add_parser("decohere", parents=[common],
                   help="dephasing trajectories and erasure statistics")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = load_config(args.config)
        config = build_config(raw, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for warning in config.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    try:
        report = _HANDLERS[args.command](config)
    except (NoncommutingGeneratorsError, RankNotOneError) as exc:
        print(f"config error: generators: {exc}", file=sys.stderr)
        return 2
    json_path, txt_path = write_report(report, config.out)
    if config.format == "json":
        print(canonical_json(report.document()))
    else:
        stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        print(render_text(report, stamp), end="")
        print(f"report: {json_path}")
    return 0 if report.passed else 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
