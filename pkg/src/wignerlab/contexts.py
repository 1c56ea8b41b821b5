"""Decoherence environments and what they can assess.

An environment is a region of spacetime plus the set of outcome records it
stably holds.  One agent's record is assessable from an environment only
if that environment compatibly extends the agent's primary context: it
must contain the record, cover the region, and keep all of its records
pairwise commuting.  Incompatible records (a sealed lab's pointer reading
versus the conjugated x-observable of the same lab) can never share an
environment, which is where the assessment algebra gets its structure.

Environment ids are stable: ``E_`` plus the event letters of the recorded
agents in canonical order (A, B, C, U, V, W), so the environment holding
the records of Bob, Charlie, and Eugene is ``E_BCU``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from . import qcore, spacetime
from .errors import RecordContextMismatchError, UnknownAgentError
from .scenario import (
    AGENTS,
    EVENT_OF_AGENT,
    FRIENDS,
    LAB_INDEX,
    OutcomeRecord,
    ScenarioModel,
    atom_label,
    lab_label,
)

_AGENT_OF_EVENT = {v: k for k, v in EVENT_OF_AGENT.items()}
_LETTER_ORDER = ("A", "B", "C", "U", "V", "W")


@dataclass(frozen=True)
class Record:
    """One agent's stably recorded outcome: who, on which systems, of what."""

    agent: str
    systems: frozenset[str]
    observable_key: str


@dataclass(frozen=True)
class DecoherenceEnvironment:
    """A spacetime region together with the records decohered into it."""

    id: str
    region: frozenset[str]
    records: frozenset[Record]


class Assessment(enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    NOT_ASSESSABLE = "NOT_ASSESSABLE"


@dataclass(frozen=True)
class Proposition:
    """Claim that an agent's outcome took the given value."""

    agent: str
    value: int

    def __post_init__(self) -> None:
        if self.agent not in AGENTS:
            raise UnknownAgentError(f"unknown agent {self.agent!r}")
        if self.value not in (1, -1):
            raise ValueError(f"outcome value must be +1 or -1, got {self.value!r}")


def _env_id(records: frozenset[Record]) -> str:
    letters = sorted(
        (EVENT_OF_AGENT[r.agent] for r in records),
        key=_LETTER_ORDER.index,
    )
    return "E_" + "".join(letters)


def resolve_observable(model: ScenarioModel, record: Record) -> qcore.Operator:
    kind, _, agent = record.observable_key.partition(":")
    if agent != record.agent:
        raise UnknownAgentError(
            f"record key {record.observable_key!r} does not match agent {record.agent!r}"
        )
    if kind == "pointer_record":
        return model.record_observable(agent)
    if kind == "lab_x":
        return model.lifted_x_observable(agent)
    raise UnknownAgentError(f"unknown observable key {record.observable_key!r}")


def primary_context(model: ScenarioModel, agent: str) -> DecoherenceEnvironment:
    """Smallest environment holding one agent's outcome record."""
    if agent not in AGENTS:
        raise UnknownAgentError(f"unknown agent {agent!r}; expected one of {AGENTS}")
    i = LAB_INDEX[agent]
    kind = "pointer_record" if agent in FRIENDS else "lab_x"
    rec = Record(agent, frozenset({atom_label(i), lab_label(i)}), f"{kind}:{agent}")
    records = frozenset({rec})
    return DecoherenceEnvironment(_env_id(records),
                                  frozenset({EVENT_OF_AGENT[agent]}), records)


def _records_commute(model: ScenarioModel, records) -> bool:
    ops = [resolve_observable(model, r) for r in records]
    for a, b in itertools.combinations(ops, 2):
        if not qcore.commutes(a, b):
            return False
    return True


def compatibly_extends(model: ScenarioModel, extension: DecoherenceEnvironment,
                       base: DecoherenceEnvironment) -> bool:
    """Whether ``extension`` holds everything ``base`` does, consistently."""
    if not base.records <= extension.records:
        return False
    if not base.region <= extension.region:
        return False
    return _records_commute(model, extension.records)


def mutually_isolated(a: DecoherenceEnvironment, b: DecoherenceEnvironment) -> bool:
    """Disjoint system support and disjoint regions."""
    sys_a = frozenset().union(*(r.systems for r in a.records)) if a.records else frozenset()
    sys_b = frozenset().union(*(r.systems for r in b.records)) if b.records else frozenset()
    return not (sys_a & sys_b) and not (a.region & b.region)


def common_extension(model: ScenarioModel, environments) -> DecoherenceEnvironment | None:
    """Union environment, or None when any two records fail to commute."""
    records: frozenset[Record] = frozenset()
    region: frozenset[str] = frozenset()
    for env in environments:
        records |= env.records
        region |= env.region
    if not _records_commute(model, records):
        return None
    return DecoherenceEnvironment(_env_id(records), region, records)


def incompatibility_graph(model: ScenarioModel) -> tuple[tuple[str, str], ...]:
    """Event-letter pairs whose record observables do not commute."""
    bad = []
    for x, y in itertools.combinations(AGENTS, 2):
        ra = primary_context(model, x).records
        rb = primary_context(model, y).records
        if not _records_commute(model, ra | rb):
            pair = tuple(sorted((EVENT_OF_AGENT[x], EVENT_OF_AGENT[y]),
                                key=_LETTER_ORDER.index))
            bad.append(pair)
    return tuple(sorted(bad))


# The five contexts the protocol narrative singles out: both homogeneous
# triples and the three with a single lab-measurement substituted in.
NAMED_CONTEXT_IDS = frozenset({"E_ABC", "E_ABW", "E_ACV", "E_BCU", "E_UVW"})


@dataclass(frozen=True)
class ContextReport:
    """One maximal joint context, its environment, and its frame status."""

    agents: tuple[str, ...]
    environment: DecoherenceEnvironment
    named: bool
    frame: spacetime.FrameSolution | None


def maximal_contexts(model: ScenarioModel,
                     geometry: spacetime.Geometry | None = None,
                     require_frame: bool = False) -> tuple[ContextReport, ...]:
    """All maximal sets of agents with pairwise-commuting records.

    With a geometry, each context also carries the simultaneity-frame
    certificate of its event triple; ``require_frame`` keeps only contexts
    whose events admit a common simultaneity frame.
    """
    if require_frame and geometry is None:
        raise ValueError("require_frame needs a geometry")
    compatible = {}
    for x, y in itertools.combinations(AGENTS, 2):
        recs = primary_context(model, x).records | primary_context(model, y).records
        compatible[frozenset((x, y))] = _records_commute(model, recs)
    cliques = []
    for size in range(len(AGENTS), 0, -1):
        for subset in itertools.combinations(AGENTS, size):
            if all(compatible[frozenset(p)] for p in itertools.combinations(subset, 2)):
                if not any(set(subset) < set(c) for c in cliques):
                    cliques.append(subset)
    reports = []
    for clique in cliques:
        env = common_extension(model, [primary_context(model, a) for a in clique])
        frame = None
        if geometry is not None:
            events = [geometry.events[EVENT_OF_AGENT[a]] for a in clique]
            frame = spacetime.frame_for_events(events)
            if require_frame and not frame.exists:
                continue
        reports.append(ContextReport(tuple(clique), env,
                                     env.id in NAMED_CONTEXT_IDS, frame))
    return tuple(sorted(reports, key=lambda r: r.environment.id))


def assess(model: ScenarioModel, proposition: Proposition,
           environment: DecoherenceEnvironment, record: OutcomeRecord) -> Assessment:
    """Evaluate a single-outcome claim relative to an environment.

    Returns NOT_ASSESSABLE when the environment does not compatibly extend
    the claimed agent's primary context; otherwise compares the claim with
    the sampled record, which must cover all of the environment's agents.
    """
    primary = primary_context(model, proposition.agent)
    if not compatibly_extends(model, environment, primary):
        return Assessment.NOT_ASSESSABLE
    needed = {r.agent for r in environment.records}
    missing = needed - set(record.values)
    if missing:
        raise RecordContextMismatchError(
            f"outcome record lacks agents {sorted(missing)} required by "
            f"{environment.id}"
        )
    claimed = record.values[proposition.agent]
    return Assessment.TRUE if claimed == proposition.value else Assessment.FALSE
