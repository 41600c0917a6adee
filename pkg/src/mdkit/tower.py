"""Factor and section maps between gap subshifts at factorial gaps.

Level m of the tower is the subshift with gap m! and a fixed distance
threshold.  The factor map from level m to level m-1 sums m translates
spaced (m-1)! apart; its explicit one-sided inverse (the section) rebuilds a
preimage from anchor values on the initial block and telescoping sums
elsewhere.  All index bookkeeping is done symbolically on integer intervals
before any value is touched, so failures surface as domain errors.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .shiftspace import (
    Periodic,
    SeqPoint,
    Window,
    check_membership,
    gap_space,
    periodic_witness,
    random_torus_vec,
    seq_to_json,
)
from .torus import TorusVec, frac_from_str, frac_to_str, vec_sum


class DomainError(ValueError):
    """An index-interval precondition failed before any evaluation."""


def level_gap(m: int) -> int:
    """Gap parameter of tower level m: the factorial m!."""
    if m < 1:
        raise ValueError("level must be >= 1")
    return math.factorial(m)


# ---------------------------------------------------------------------------
# Anchors


@dataclass(frozen=True)
class AnchorTable:
    """Anchor values used by the section on its initial block.

    ``values = None`` means the all-zero anchor on every index; an explicit
    mapping must supply every index the section asks for.
    """

    dim: int
    values: Mapping[int, TorusVec] | None = None

    def value_at(self, k: int) -> TorusVec:
        if self.values is None:
            return TorusVec.zero(self.dim)
        try:
            return self.values[k]
        except KeyError:
            raise ValueError(f"anchor table missing index {k}") from None

    @classmethod
    def zeros(cls, dim: int) -> "AnchorTable":
        return cls(dim, None)

    @classmethod
    def random(
        cls, dim: int, level: int, rng: random.Random, denominator: int = 64
    ) -> "AnchorTable":
        """A full random table for the given level's initial block."""
        size = (level - 1) * level_gap(level - 1)
        return cls(
            dim,
            {k: random_torus_vec(rng, dim, denominator) for k in range(size)},
        )

    def to_json(self, level: int) -> list[list[str]]:
        size = (level - 1) * level_gap(level - 1)
        return [self.value_at(k).to_json() for k in range(size)]


# ---------------------------------------------------------------------------
# Factor maps


def factor_map(m: int, x: SeqPoint) -> SeqPoint:
    """Map level m to level m-1 by summing m translates spaced (m-1)! apart.

    Windows shrink by (m-1)*(m-1)! on the right; periodic points keep their
    period.  The distance between output entries (m-1)! apart equals the
    distance between input entries m! apart, so membership is carried along.
    """
    if m < 2:
        raise ValueError("factor map requires level >= 2")
    q = level_gap(m - 1)
    span = (m - 1) * q
    if isinstance(x, Periodic):
        p = x.period
        return Periodic(
            tuple(
                vec_sum(x.values[(i + t * q) % p] for t in range(m))
                for i in range(p)
            )
        )
    new_end = x.end - span
    if new_end < x.start:
        raise DomainError("domain shrinks to empty")
    return Window(
        x.start,
        tuple(
            vec_sum(x.value_at(k + t * q) for t in range(m))
            for k in range(x.start, new_end + 1)
        ),
    )


def factor_chain(m: int, n: int, x: SeqPoint) -> SeqPoint:
    """Compose factor maps from level m down to level n (m > n >= 1)."""
    if not 1 <= n < m:
        raise ValueError("factor chain requires m > n >= 1")
    for level in range(m, n, -1):
        x = factor_map(level, x)
    return x


# ---------------------------------------------------------------------------
# Section maps


def section_domain(m: int, lo: int, hi: int) -> tuple[int, int]:
    """Output interval of the level-m section from an input window [lo, hi].

    The input must cover the base references: lo <= 0 and hi >= (m-1)! - 1.
    The maximal computable output interval is then [lo, hi + (m-1)*(m-1)!].
    """
    if m < 2:
        raise ValueError("section requires level >= 2")
    q = level_gap(m - 1)
    if hi < lo:
        raise DomainError("output domain empty")
    if lo > 0 or hi < q - 1:
        raise DomainError(
            f"section at level {m} needs the input window to cover [0, {q - 1}] "
            f"and to start at or below 0 (got [{lo}, {hi}])"
        )
    return lo, hi + (m - 1) * q


def section_map(m: int, anchor: AnchorTable, x: Window) -> Window:
    """One-sided inverse of the level-m factor map, with prescribed anchors.

    On the initial block [0, (m-1)*(m-1)!-1] the output copies the anchor; on
    the rest of the base block [.., m!-1] it is the input shifted back minus
    the anchor sums; outside the base block it accumulates telescoping
    differences of input entries one sub-gap apart, upward and downward.
    """
    if not isinstance(x, Window):
        raise TypeError(
            "section consumes windows only; unroll periodic points first "
            "(the section does not preserve periodicity)"
        )
    if anchor.dim != x.dim:
        raise ValueError("alphabet dimension mismatch")
    q = level_gap(m - 1)
    big = level_gap(m)
    c = (m - 1) * q
    out_lo, out_hi = section_domain(m, x.start, x.end)
    values: dict[int, TorusVec] = {}
    for k in range(0, c):
        values[k] = anchor.value_at(k)
    for k in range(c, big):
        acc = x.value_at(k - c)
        for i in range(1, m):
            acc = acc - anchor.value_at(k - i * q)
        values[k] = acc
    for k in range(big, out_hi + 1):
        values[k] = values[k - big] + (x.value_at(k - big + q) - x.value_at(k - big))
    for k in range(-1, out_lo - 1, -1):
        values[k] = values[k + big] + (x.value_at(k) - x.value_at(k + q))
    return Window(out_lo, tuple(values[k] for k in range(out_lo, out_hi + 1)))


# ---------------------------------------------------------------------------
# Section identity and range verification


@dataclass(frozen=True)
class SectionIdentityReport:
    level: int
    overlap: tuple[int, int]
    windows_checked: int
    failures: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "overlap": list(self.overlap),
            "windows_checked": self.windows_checked,
            "passed": self.passed,
            "failures": list(self.failures),
        }


def windows_agree_on_overlap(a: Window, b: Window) -> tuple[bool, list[int]]:
    """Exact equality of two windows on the intersection of their domains."""
    lo = max(a.start, b.start)
    hi = min(a.end, b.end)
    if hi < lo:
        raise DomainError("empty overlap")
    bad = [k for k in range(lo, hi + 1) if a.value_at(k) != b.value_at(k)]
    return not bad, bad


def verify_section_identity(
    m: int,
    anchor: AnchorTable,
    x: Window,
    trials: int = 0,
    rng: random.Random | None = None,
    denominator: int = 64,
) -> SectionIdentityReport:
    """Assert factor(section(x)) = x exactly on the overlap of their domains.

    The identity is an algebraic telescoping fact: it needs no membership
    assumption on x and holds for every anchor.  ``trials`` extra random
    windows with the same domain are replayed through the same check.
    """
    windows = [x]
    if trials:
        if rng is None:
            raise ValueError("random trials need an rng")
        length = x.end - x.start + 1
        windows.extend(
            Window(
                x.start,
                tuple(random_torus_vec(rng, x.dim, denominator) for _ in range(length)),
            )
            for _ in range(trials)
        )
    failures: list[dict] = []
    overlap = (x.start, x.end)
    for idx, w in enumerate(windows):
        back = factor_map(m, section_map(m, anchor, w))
        ok, bad = windows_agree_on_overlap(back, w)
        lo = max(back.start, w.start)
        hi = min(back.end, w.end)
        overlap = (lo, hi)
        if not ok:
            failures.append(
                {
                    "window": idx,
                    "witnesses": [
                        {
                            "index": k,
                            "roundtrip": back.value_at(k).to_json(),
                            "expected": w.value_at(k).to_json(),
                        }
                        for k in bad[:5]
                    ],
                }
            )
    return SectionIdentityReport(
        level=m,
        overlap=overlap,
        windows_checked=len(windows),
        failures=tuple(failures),
    )


@dataclass(frozen=True)
class SectionRangeReport:
    level: int
    partition_counts: dict[str, int]
    failures: tuple[int, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "partition_counts": dict(self.partition_counts),
            "passed": self.passed,
            "failures": list(self.failures),
        }


def verify_section_range(
    m: int,
    anchor: AnchorTable,
    x: Window,
    threshold: Fraction,
) -> SectionRangeReport:
    """Check that the section of a valid level-(m-1) window is a valid level-m window.

    Requires the input to satisfy the gap-(m-1)! constraint on its domain.
    Checkable output indices k are partitioned by where the pair (k, k+m!)
    sits: the base block (k in [0, m!-1]), the upper tail (k >= m!) and the
    lower tail (k < 0); counts per partition are reported so a caller can see
    each case was exercised.
    """
    q = level_gap(m - 1)
    big = level_gap(m)
    pre = check_membership(gap_space(x.dim, q, threshold), x)
    if not pre.passed:
        raise ValueError("input window does not satisfy its own gap constraint")
    y = section_map(m, anchor, x)
    report = check_membership(gap_space(x.dim, big, threshold), y)
    counts = {"base_block": 0, "upper_tail": 0, "lower_tail": 0}
    for rec in report.records:
        if rec.index < 0:
            counts["lower_tail"] += 1
        elif rec.index < big:
            counts["base_block"] += 1
        else:
            counts["upper_tail"] += 1
    failures = tuple(r.index for r in report.failures())
    return SectionRangeReport(level=m, partition_counts=counts, failures=failures)


# ---------------------------------------------------------------------------
# Tower specification and truncated tower elements


@dataclass(frozen=True)
class TowerSpec:
    """Alphabet dimension, distance threshold, truncation depth and anchors."""

    dim: int
    delta: Fraction
    m_max: int
    anchors: Mapping[int, AnchorTable] = field(default_factory=dict)

    def __post_init__(self) -> None:
        delta = Fraction(self.delta)
        if not 0 < delta < 1:
            raise ValueError("threshold must lie strictly between 0 and 1")
        if self.m_max < 1:
            raise ValueError("truncation depth must be >= 1")
        if self.m_max > 6:
            warnings.warn(
                f"truncation depth {self.m_max} needs windows of more than "
                f"{level_gap(self.m_max)} exact-rational entries; expect slow runs",
                stacklevel=2,
            )
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "anchors", dict(self.anchors))

    def anchor_for(self, level: int) -> AnchorTable:
        return self.anchors.get(level, AnchorTable.zeros(self.dim))

    def to_json(self) -> dict:
        return {
            "N": self.dim,
            "delta": frac_to_str(self.delta),
            "m_max": self.m_max,
            "anchors": {
                str(level): table.to_json(level)
                for level, table in sorted(self.anchors.items())
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "TowerSpec":
        dim = int(data["N"])
        anchors = {}
        for level_text, rows in data.get("anchors", {}).items():
            level = int(level_text)
            anchors[level] = AnchorTable(
                dim, {k: TorusVec.from_json(row) for k, row in enumerate(rows)}
            )
        return cls(
            dim=dim,
            delta=frac_from_str(data["delta"]),
            m_max=int(data["m_max"]),
            anchors=anchors,
        )


@dataclass(frozen=True)
class TowerElementTrunc:
    """Windows at levels 1..depth, consistent under the factor maps."""

    depth: int
    components: tuple[Window, ...]

    def component(self, level: int) -> Window:
        if not 1 <= level <= self.depth:
            raise ValueError(f"no component at level {level}")
        return self.components[level - 1]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "components": [seq_to_json(w) for w in self.components],
        }


def tower_element(spec: TowerSpec, m: int, x: Window) -> TowerElementTrunc:
    """Fill a truncated tower element around a level-m window.

    Levels below m come from the factor chain, level m is x itself, levels
    above come from iterated sections with the spec's per-level anchors.  The
    result is checked for factor-consistency on every consecutive overlap.
    """
    if not 1 <= m <= spec.m_max:
        raise ValueError("level must lie within the truncation depth")
    if x.dim != spec.dim:
        raise ValueError("alphabet dimension mismatch")
    components: dict[int, Window] = {m: x}
    current = x
    for level in range(m, 1, -1):
        try:
            current = factor_map(level, current)
        except DomainError as exc:
            raise DomainError(f"factor map to level {level - 1} failed: {exc}") from exc
        components[level - 1] = current
    current = x
    for level in range(m + 1, spec.m_max + 1):
        try:
            current = section_map(level, spec.anchor_for(level), current)
        except DomainError as exc:
            raise DomainError(f"section to level {level} failed: {exc}") from exc
        components[level] = current
    element = TowerElementTrunc(
        depth=spec.m_max,
        components=tuple(components[level] for level in range(1, spec.m_max + 1)),
    )
    if element.component(m) != x:
        raise AssertionError("level-m component must be the input window")
    for level in range(1, spec.m_max):
        ok, bad = windows_agree_on_overlap(
            factor_map(level + 1, element.component(level + 1)),
            element.component(level),
        )
        if not ok:
            raise AssertionError(
                f"factor-consistency failed between levels {level + 1} and {level} "
                f"at indices {bad}"
            )
    return element


# ---------------------------------------------------------------------------
# Aperiodicity certificates at a truncation depth


def _primes_up_to(n: int) -> list[int]:
    sieve = [True] * (n + 1)
    primes = []
    for i in range(2, n + 1):
        if sieve[i]:
            primes.append(i)
            for j in range(i * i, n + 1, i):
                sieve[j] = False
    return primes


@dataclass(frozen=True)
class AperiodicityReport:
    m_max: int
    p_max: int
    certificates: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return all(c["verified"] for c in self.certificates)

    def to_json(self) -> dict:
        return {
            "m_max": self.m_max,
            "p_max": self.p_max,
            "passed": self.passed,
            "certificates": list(self.certificates),
        }


def tower_aperiodicity_report(spec: TowerSpec, p_max: int) -> AperiodicityReport:
    """Per-prime certificates about period-p points of the truncated tower.

    For p within the truncation depth, level p has gap p! which p divides, so
    every period-p point compares an entry with itself and fails the distance
    constraint: the period-p point set of level p is empty, and no period-p
    point survives to depth p.  For larger p an explicit period-p witness at
    the top level shows the truncation itself cannot rule the period out; that
    is reported honestly as undetermined at this depth.
    """
    if p_max < 2:
        raise ValueError("p_max must be >= 2")
    certificates: list[dict] = []
    for p in _primes_up_to(p_max):
        if p <= spec.m_max:
            gap = level_gap(p)
            rng = random.Random(p * 7919)
            sample = Periodic(
                tuple(random_torus_vec(rng, spec.dim) for _ in range(p))
            )
            report = check_membership(gap_space(spec.dim, gap, spec.delta), sample)
            spot_ok = report.verdict == "fail" and all(
                rec.lhs == 0 for rec in report.records
            )
            certificates.append(
                {
                    "prime": p,
                    "kind": "empty",
                    "level": p,
                    "gap": gap,
                    "verified": gap % p == 0 and spot_ok,
                    "statement": (
                        f"{p} divides the level-{p} gap {gap}, so any period-{p} "
                        f"point has distance 0 between entries {gap} apart, below "
                        f"the threshold {frac_to_str(spec.delta)}: the period-{p} "
                        f"point set at level {p} is empty"
                    ),
                }
            )
        else:
            gap = level_gap(spec.m_max)
            witness = periodic_witness(spec.dim, gap, spec.delta, p)
            verified = check_membership(
                gap_space(spec.dim, gap, spec.delta), witness
            ).passed
            certificates.append(
                {
                    "prime": p,
                    "kind": "witness",
                    "level": spec.m_max,
                    "gap": gap,
                    "verified": verified,
                    "statement": (
                        f"a period-{p} point exists at level {spec.m_max} with "
                        f"realized distance {frac_to_str(1 - Fraction(1, p))}; "
                        f"aperiodicity for period {p} is undetermined at depth "
                        f"{spec.m_max}"
                    ),
                    "witness": seq_to_json(witness),
                }
            )
    return AperiodicityReport(m_max=spec.m_max, p_max=p_max, certificates=tuple(certificates))
