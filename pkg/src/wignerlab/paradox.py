"""Parity constraint systems over +-1 variables and their (in)consistency.

A constraint fixes the product of a few +-1 variables.  Three independent
checks live here: brute-force enumeration of satisfying assignments, GF(2)
Gaussian elimination with a contradiction witness, and a support-level
global-section search across a family of Born tables.

Serialization: one constraint per line, ``u*b*c=+1`` / ``u*v*w=-1``;
``parse_constraint`` inverts ``str()`` exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    CoverageGapError,
    MarginalMismatchError,
    UniverseTooLargeError,
)

ENUMERATION_CAP = 24


@dataclass(frozen=True)
class ParityConstraint:
    """Product of the named +-1 variables equals ``parity``."""

    variables: tuple[str, ...]
    parity: int

    def __post_init__(self) -> None:
        if self.parity not in (1, -1):
            raise ValueError(f"parity must be +1 or -1, got {self.parity!r}")
        if not self.variables:
            raise ValueError("constraint needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"repeated variable in {self.variables}")

    def satisfied_by(self, assignment: dict[str, int]) -> bool:
        prod = 1
        for v in self.variables:
            prod *= assignment[v]
        return prod == self.parity

    def __str__(self) -> str:
        return "*".join(self.variables) + ("=+1" if self.parity == 1 else "=-1")


def parse_constraint(text: str) -> ParityConstraint:
    lhs, _, rhs = text.strip().partition("=")
    if rhs == "+1":
        parity = 1
    elif rhs == "-1":
        parity = -1
    else:
        raise ValueError(f"constraint {text!r} must end in =+1 or =-1")
    return ParityConstraint(tuple(lhs.split("*")), parity)


@dataclass(frozen=True)
class ConstraintSystem:
    """Ordered constraints over an explicit variable universe."""

    constraints: tuple[ParityConstraint, ...]
    universe: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.universe)) != len(self.universe):
            raise ValueError(f"repeated variable in universe {self.universe}")
        known = set(self.universe)
        for c in self.constraints:
            stray = set(c.variables) - known
            if stray:
                raise ValueError(f"constraint {c} uses unknown variables {sorted(stray)}")

    def lines(self) -> tuple[str, ...]:
        return tuple(str(c) for c in self.constraints)


def parse_system(lines, universe=None) -> ConstraintSystem:
    constraints = tuple(parse_constraint(l) for l in lines if l.strip())
    if universe is None:
        seen: list[str] = []
        for c in constraints:
            for v in c.variables:
                if v not in seen:
                    seen.append(v)
        universe = tuple(seen)
    return ConstraintSystem(constraints, tuple(universe))


def scenario_constraints() -> ConstraintSystem:
    """The four product constraints every joint outcome table enforces."""
    return parse_system(
        ("u*b*c=+1", "a*v*c=+1", "a*b*w=+1", "u*v*w=-1"),
        universe=("a", "b", "c", "u", "v", "w"),
    )


@dataclass(frozen=True)
class EnumerationReport:
    universe: tuple[str, ...]
    total: int
    count: int
    satisfying: tuple[tuple[int, ...], ...]

    def assignments(self) -> tuple[dict[str, int], ...]:
        return tuple(dict(zip(self.universe, s)) for s in self.satisfying)


def enumerate_satisfying(system: ConstraintSystem) -> EnumerationReport:
    """Brute force over all 2**n assignments, lexicographic with +1 first."""
    n = len(system.universe)
    if n > ENUMERATION_CAP:
        raise UniverseTooLargeError(f"{n} variables exceeds cap {ENUMERATION_CAP}")
    index = {v: i for i, v in enumerate(system.universe)}
    compiled = [
        ([index[v] for v in c.variables], c.parity) for c in system.constraints
    ]
    hits = []
    for values in itertools.product((1, -1), repeat=n):
        ok = True
        for idxs, parity in compiled:
            prod = 1
            for i in idxs:
                prod *= values[i]
            if prod != parity:
                ok = False
                break
        if ok:
            hits.append(values)
    return EnumerationReport(system.universe, 2**n, len(hits), tuple(hits))


@dataclass(frozen=True)
class Gf2Report:
    """Outcome of Gaussian elimination over GF(2).

    ``witness`` indexes the constraints whose GF(2) sum is 0 = 1; it is the
    contradiction the elimination stumbled on first, None when consistent.
    """

    consistent: bool
    witness: tuple[int, ...] | None

    def witness_constraints(self, system: ConstraintSystem) -> tuple[ParityConstraint, ...]:
        if self.witness is None:
            return ()
        return tuple(system.constraints[i] for i in self.witness)


def gf2_consistency(system: ConstraintSystem) -> Gf2Report:
    """Eliminate with +1 -> 0, -1 -> 1; track row combinations for the witness."""
    index = {v: i for i, v in enumerate(system.universe)}
    rows = []
    for k, c in enumerate(system.constraints):
        mask = 0
        for v in c.variables:
            mask ^= 1 << index[v]
        rhs = 0 if c.parity == 1 else 1
        rows.append([mask, rhs, 1 << k])  # [coefficients, rhs, combination]
    pivots: dict[int, list[int]] = {}
    for row in rows:
        for col in range(len(system.universe)):
            bit = 1 << col
            if not row[0] & bit:
                continue
            if col in pivots:
                piv = pivots[col]
                row[0] ^= piv[0]
                row[1] ^= piv[1]
                row[2] ^= piv[2]
            else:
                pivots[col] = row
                break
        if row[0] == 0 and row[1] == 1:
            witness = tuple(i for i in range(len(rows)) if row[2] >> i & 1)
            return Gf2Report(False, witness)
    return Gf2Report(True, None)


@dataclass(frozen=True)
class ExtractionReport:
    """Constraints read off Born-table supports, plus tables that had none."""

    system: ConstraintSystem
    skipped: tuple[tuple[int, str], ...]


def constraints_from_born(tables, zero_tol: float = 1e-10,
                          universe=None) -> ExtractionReport:
    """Emit one parity constraint per table whose support has fixed product.

    Table outcome names are used as variable names; rename tables first if
    the constraint variables should differ.  Tables with mixed support
    product are skipped (flagged, not fatal).
    """
    constraints = []
    skipped = []
    seen: list[str] = []
    for k, table in enumerate(tables):
        for name in table.names:
            if name not in seen:
                seen.append(name)
        support = table.support(zero_tol)
        products = {_product(s) for s in support}
        if len(products) == 1:
            constraints.append(ParityConstraint(tuple(table.names), products.pop()))
        else:
            skipped.append((k, "NO_PARITY_STRUCTURE"))
    if universe is None:
        universe = tuple(seen)
    return ExtractionReport(ConstraintSystem(tuple(constraints), tuple(universe)),
                            tuple(skipped))


def _product(outcome) -> int:
    prod = 1
    for s in outcome:
        prod *= s
    return prod


@dataclass(frozen=True)
class GlobalSectionReport:
    """Support-level compatibility of one assignment with every table.

    A missing global section at the support level already rules out any
    joint distribution reproducing all tables: every joint distribution is
    a mixture of deterministic assignments, and each of those would have to
    sit inside every table's support.
    """

    exists: bool
    count: int
    universe: tuple[str, ...]
    sections: tuple[tuple[int, ...], ...]


def global_section_exists(tables, zero_tol: float = 1e-10,
                          universe=None,
                          marginal_tol: float = 1e-12) -> GlobalSectionReport:
    """Search all assignments; each must restrict into every table's support."""
    tables = list(tables)
    seen: list[str] = []
    for t in tables:
        for name in t.names:
            if name not in seen:
                seen.append(name)
    if universe is None:
        universe = tuple(seen)
    else:
        universe = tuple(universe)
        gap = set(universe) - set(seen)
        if gap:
            raise CoverageGapError(f"no table covers variables {sorted(gap)}")
    _check_shared_marginals(tables, marginal_tol)
    n = len(universe)
    if n > ENUMERATION_CAP:
        raise UniverseTooLargeError(f"{n} variables exceeds cap {ENUMERATION_CAP}")
    supports = [frozenset(t.support(zero_tol)) for t in tables]
    positions = [[universe.index(name) for name in t.names] for t in tables]
    sections = []
    for values in itertools.product((1, -1), repeat=n):
        ok = True
        for sup, pos in zip(supports, positions):
            if tuple(values[i] for i in pos) not in sup:
                ok = False
                break
        if ok:
            sections.append(values)
    return GlobalSectionReport(bool(sections), len(sections), universe, tuple(sections))


def _check_shared_marginals(tables, tol: float) -> None:
    for i in range(len(tables)):
        for j in range(i + 1, len(tables)):
            shared = [n for n in tables[i].names if n in tables[j].names]
            if not shared:
                continue
            mi = tables[i].marginal(shared)
            mj = tables[j].marginal(shared)
            for outcome, p in mi.rows.items():
                if abs(p - mj.rows[outcome]) > tol:
                    raise MarginalMismatchError(
                        f"tables {i} and {j} disagree on {shared} at {outcome}: "
                        f"{p} vs {mj.rows[outcome]}"
                    )
