"""Finitely described points of torus-alphabet sequence spaces.

A sequence point is either a full periodic orbit (period plus one period of
values) or a finite window (start index plus consecutive values).  Subshift
constraints are declarative: a minimum distance between entries a fixed gap
apart, a disjunction of distance conditions on the two adjacent steps, or a
binary subshift of finite type given by its forbidden words.  Membership
checks report every index at which a constraint was checkable and never
conflate "nothing was checkable" with "all checks passed".
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .torus import TorusVec, frac_from_str, frac_to_str, max_circle_dist

# ---------------------------------------------------------------------------
# Sequence points


@dataclass(frozen=True)
class Periodic:
    """A periodic point: ``values`` is one full period, indexed mod period."""

    values: tuple[TorusVec, ...]

    def __post_init__(self) -> None:
        values = tuple(self.values)
        if not values:
            raise ValueError("a periodic point needs period >= 1")
        dims = {v.dim for v in values}
        if len(dims) != 1:
            raise ValueError("alphabet dimension mismatch")
        object.__setattr__(self, "values", values)

    @property
    def period(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.values[0].dim

    def value_at(self, n: int) -> TorusVec:
        return self.values[n % self.period]


@dataclass(frozen=True)
class Window:
    """A finite stretch of a sequence: entries at ``start .. start+len-1``."""

    start: int
    values: tuple[TorusVec, ...]

    def __post_init__(self) -> None:
        values = tuple(self.values)
        if not values:
            raise ValueError("a window needs at least one value")
        dims = {v.dim for v in values}
        if len(dims) != 1:
            raise ValueError("alphabet dimension mismatch")
        object.__setattr__(self, "values", values)

    @property
    def end(self) -> int:
        """Last defined index (inclusive)."""
        return self.start + len(self.values) - 1

    @property
    def dim(self) -> int:
        return self.values[0].dim

    def value_at(self, n: int) -> TorusVec:
        if not self.start <= n <= self.end:
            raise IndexError(f"index {n} outside window [{self.start}, {self.end}]")
        return self.values[n - self.start]


SeqPoint = Union[Periodic, Window]


def shift(x: SeqPoint, k: int) -> SeqPoint:
    """The k-fold shift: the new value at n is the old value at n + k."""
    if isinstance(x, Periodic):
        p = x.period
        return Periodic(tuple(x.values[(i + k) % p] for i in range(p)))
    return Window(x.start - k, x.values)


def unroll(x: Periodic, lo: int, hi: int) -> Window:
    """Materialize a periodic point as a window on [lo, hi] (inclusive)."""
    if hi < lo:
        raise ValueError("unroll needs lo <= hi")
    return Window(lo, tuple(x.value_at(n) for n in range(lo, hi + 1)))


def power_map(j: int, x: Periodic) -> Periodic:
    """Index-dilation on periodic points: the new value at i is x at i*j."""
    if not isinstance(x, Periodic):
        raise ValueError("power map requires a periodic point")
    p = x.period
    return Periodic(tuple(x.values[(i * j) % p] for i in range(p)))


def seq_to_json(x: SeqPoint) -> dict:
    if isinstance(x, Periodic):
        return {
            "kind": "periodic",
            "period": x.period,
            "values": [v.to_json() for v in x.values],
        }
    return {
        "kind": "window",
        "start": x.start,
        "values": [v.to_json() for v in x.values],
    }


def seq_from_json(data: dict) -> SeqPoint:
    kind = data["kind"]
    values = tuple(TorusVec.from_json(v) for v in data["values"])
    if kind == "periodic":
        if data.get("period") != len(values):
            raise ValueError("periodic point period does not match value count")
        return Periodic(values)
    if kind == "window":
        return Window(int(data["start"]), values)
    raise ValueError(f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# Subshift constraints


@dataclass(frozen=True)
class GapAtLeast:
    """Entries a fixed gap apart must be at distance >= threshold."""

    gap: int
    threshold: Fraction
    dim: int = 1

    def __post_init__(self) -> None:
        if self.gap < 1:
            raise ValueError("gap must be >= 1")
        t = Fraction(self.threshold)
        if not 0 < t <= 1:
            raise ValueError("threshold must lie in (0, 1]")
        object.__setattr__(self, "threshold", t)


@dataclass(frozen=True)
class EitherOrAtLeast:
    """At each n, one of the two adjacent steps has distance >= threshold."""

    threshold: Fraction
    dim: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "threshold", Fraction(self.threshold))


@dataclass(frozen=True)
class EitherOrEquals:
    """At each n, one of the two adjacent steps has distance exactly value."""

    value: Fraction
    dim: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class BinarySFT:
    """Binary subshift of finite type: letters 0/1, forbidden equal-length words."""

    forbidden: frozenset[str]
    dim: int = 1

    def __post_init__(self) -> None:
        words = frozenset(self.forbidden)
        if not words:
            raise ValueError("at least one forbidden word is required")
        lengths = {len(w) for w in words}
        if len(lengths) != 1:
            raise ValueError("forbidden words must all have equal length")
        if min(lengths) < 2:
            raise ValueError("forbidden words must have length >= 2")
        for w in words:
            if set(w) - {"0", "1"}:
                raise ValueError(f"forbidden word {w!r} is not binary")
        object.__setattr__(self, "forbidden", words)

    @property
    def word_length(self) -> int:
        return len(next(iter(self.forbidden)))


SubshiftSpec = Union[GapAtLeast, EitherOrAtLeast, EitherOrEquals, BinarySFT]


def gap_space(dim: int, gap: int, threshold: Fraction) -> GapAtLeast:
    """The subshift demanding distance >= threshold between entries gap apart."""
    return GapAtLeast(gap=gap, threshold=Fraction(threshold), dim=dim)


def half_step_space() -> EitherOrAtLeast:
    """Adjacent-step space: one of the two neighbouring steps moves >= 1/2."""
    return EitherOrAtLeast(threshold=Fraction(1, 2), dim=1)


def unit_step_space() -> EitherOrEquals:
    """Adjacent-step space: one of the two neighbouring steps moves exactly 1."""
    return EitherOrEquals(value=Fraction(1), dim=1)


def no_triple_repeat_sft() -> BinarySFT:
    """The binary subshift forbidding 000 and 111."""
    return BinarySFT(forbidden=frozenset({"000", "111"}), dim=1)


def spec_to_json(spec: SubshiftSpec) -> dict:
    if isinstance(spec, GapAtLeast):
        return {
            "kind": "gap_at_least",
            "gap": spec.gap,
            "threshold": frac_to_str(spec.threshold),
            "dim": spec.dim,
        }
    if isinstance(spec, EitherOrAtLeast):
        return {
            "kind": "either_or_at_least",
            "threshold": frac_to_str(spec.threshold),
            "dim": spec.dim,
        }
    if isinstance(spec, EitherOrEquals):
        return {
            "kind": "either_or_equals",
            "value": frac_to_str(spec.value),
            "dim": spec.dim,
        }
    return {
        "kind": "binary_sft",
        "forbidden": sorted(spec.forbidden),
        "dim": spec.dim,
    }


def spec_from_json(data: dict) -> SubshiftSpec:
    kind = data["kind"]
    if kind == "gap_at_least":
        return GapAtLeast(int(data["gap"]), frac_from_str(data["threshold"]), int(data["dim"]))
    if kind == "either_or_at_least":
        return EitherOrAtLeast(frac_from_str(data["threshold"]), int(data["dim"]))
    if kind == "either_or_equals":
        return EitherOrEquals(frac_from_str(data["value"]), int(data["dim"]))
    if kind == "binary_sft":
        return BinarySFT(frozenset(data["forbidden"]), int(data["dim"]))
    raise ValueError(f"unknown subshift kind {kind!r}")


# ---------------------------------------------------------------------------
# Membership


@dataclass(frozen=True)
class CheckRecord:
    index: int
    ok: bool
    lhs: Fraction | None = None
    word: str | None = None

    def to_json(self) -> dict:
        out: dict = {"index": self.index, "ok": self.ok}
        if self.lhs is not None:
            out["lhs"] = frac_to_str(self.lhs)
        if self.word is not None:
            out["word"] = self.word
        return out


@dataclass(frozen=True)
class MembershipReport:
    """Per-index constraint results.  Verdict is "pass", "fail" or "vacuous"."""

    verdict: str
    records: tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.ok]

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "records": [r.to_json() for r in self.records],
        }


def _checkable_range(x: SeqPoint, lo_off: int, hi_off: int) -> range:
    """Indices n for which all of n+lo_off .. n+hi_off lie in the domain."""
    if isinstance(x, Periodic):
        return range(x.period)
    return range(x.start - lo_off, x.end - hi_off + 1)


def check_membership(spec: SubshiftSpec, x: SeqPoint) -> MembershipReport:
    """Check every spec constraint at every index where it is decidable.

    Periodic points are checked at all residues with index arithmetic mod the
    period; windows only at indices whose referenced entries are all defined.
    A window too short to check anything yields the distinct verdict
    "vacuous".
    """
    if spec.dim != x.dim:
        raise ValueError("alphabet dimension mismatch")
    records: list[CheckRecord] = []
    if isinstance(spec, GapAtLeast):
        for n in _checkable_range(x, 0, spec.gap):
            lhs = max_circle_dist(x.value_at(n), x.value_at(n + spec.gap))
            records.append(CheckRecord(n, lhs >= spec.threshold, lhs=lhs))
    elif isinstance(spec, (EitherOrAtLeast, EitherOrEquals)):
        for n in _checkable_range(x, -1, 1):
            d_prev = max_circle_dist(x.value_at(n - 1), x.value_at(n))
            d_next = max_circle_dist(x.value_at(n), x.value_at(n + 1))
            if isinstance(spec, EitherOrAtLeast):
                ok = d_prev >= spec.threshold or d_next >= spec.threshold
            else:
                ok = d_prev == spec.value or d_next == spec.value
            records.append(CheckRecord(n, ok, lhs=max(d_prev, d_next)))
    else:
        length = spec.word_length
        for n in _checkable_range(x, 0, length - 1):
            word, binary = _binary_word(x, n, length)
            ok = binary and word not in spec.forbidden
            records.append(CheckRecord(n, ok, word=word))
    if not records:
        return MembershipReport("vacuous", ())
    verdict = "pass" if all(r.ok for r in records) else "fail"
    return MembershipReport(verdict, tuple(records))


def _binary_word(x: SeqPoint, n: int, length: int) -> tuple[str, bool]:
    letters = []
    binary = True
    for j in range(length):
        v = x.value_at(n + j)
        vals = {c.value for c in v.coords}
        if vals == {Fraction(0)}:
            letters.append("0")
        elif vals == {Fraction(1)}:
            letters.append("1")
        else:
            letters.append("?")
            binary = False
    return "".join(letters), binary


# ---------------------------------------------------------------------------
# Random sampling (deterministic under an explicit rng)


def random_torus_vec(rng: random.Random, dim: int, denominator: int = 64) -> TorusVec:
    """A vector with coordinates uniform on {0, 1/D, ..., (2D-1)/D}."""
    return TorusVec(
        tuple(Fraction(rng.randrange(2 * denominator), denominator) for _ in range(dim))
    )


def sample_periodic_gap_point(
    dim: int,
    gap: int,
    threshold: Fraction,
    period: int,
    rng: random.Random,
    denominator: int = 64,
    max_tries: int = 500_000,
) -> Periodic:
    """Rejection-sample a random period-``period`` point of the gap space."""
    spec = gap_space(dim, gap, threshold)
    for _ in range(max_tries):
        cand = Periodic(
            tuple(random_torus_vec(rng, dim, denominator) for _ in range(period))
        )
        if check_membership(spec, cand).passed:
            return cand
    raise RuntimeError(
        f"sampling failed after {max_tries} tries: no period-{period} point "
        f"with distance >= {threshold} at gap {gap} was drawn"
    )


def sample_gap_window(
    dim: int,
    gap: int,
    threshold: Fraction,
    start: int,
    length: int,
    rng: random.Random,
    denominator: int = 64,
    per_slot_tries: int = 10_000,
) -> Window:
    """Sample a window satisfying the gap constraint at every checkable index.

    The constraint couples only entries ``gap`` apart, so positions are drawn
    left to right with per-position rejection against the entry one gap back.
    """
    threshold = Fraction(threshold)
    values: list[TorusVec] = []
    for i in range(length):
        if i < gap:
            values.append(random_torus_vec(rng, dim, denominator))
            continue
        for _ in range(per_slot_tries):
            v = random_torus_vec(rng, dim, denominator)
            if max_circle_dist(v, values[i - gap]) >= threshold:
                values.append(v)
                break
        else:
            raise RuntimeError(
                f"sampling failed: no coordinate at offset {i} with distance "
                f">= {threshold} from the entry {gap} back"
            )
    return Window(start, tuple(values))


def random_window(
    dim: int,
    start: int,
    length: int,
    rng: random.Random,
    denominator: int = 64,
) -> Window:
    """An unconstrained random window (no membership requirement)."""
    return Window(
        start, tuple(random_torus_vec(rng, dim, denominator) for _ in range(length))
    )


# ---------------------------------------------------------------------------
# Conjugacy diagram between gap spaces at coprime gaps


@dataclass(frozen=True)
class IdentityResult:
    name: str
    statement: str
    checked: int
    failures: tuple[dict, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "checked": self.checked,
            "ok": self.ok,
            "failures": list(self.failures),
        }


@dataclass(frozen=True)
class ConjugacyReport:
    p: int
    m: int
    k: int
    samples: int
    identities: tuple[IdentityResult, ...]

    @property
    def passed(self) -> bool:
        return all(i.ok for i in self.identities)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "k": self.k,
            "samples": self.samples,
            "passed": self.passed,
            "identities": [i.to_json() for i in self.identities],
        }


def verify_conjugacy_diagram(
    dim: int,
    m: int,
    threshold: Fraction,
    p: int,
    samples: int,
    seed: int,
    denominator: int = 64,
) -> ConjugacyReport:
    """Exactly verify the index-dilation conjugacy between period-p point sets.

    With k the inverse of m mod p, the dilation by m carries period-p points
    of the gap-m space to the gap-1 space, the dilation by k carries them
    back, the two dilations compose to the identity, and dilation by m
    intertwines the shift with its m-th power.  Every identity is checked by
    exact equality on seeded random samples from both spaces.
    """
    if p <= m:
        raise ValueError("diagram requires p > m")
    k = pow(m % p, -1, p)
    rng = random.Random(seed)
    gap_m = gap_space(dim, m, threshold)
    gap_1 = gap_space(dim, 1, threshold)
    samples_m = [
        sample_periodic_gap_point(dim, m, threshold, p, rng, denominator)
        for _ in range(samples)
    ]
    samples_1 = [
        sample_periodic_gap_point(dim, 1, threshold, p, rng, denominator)
        for _ in range(samples)
    ]

    def collect(name: str, statement: str, pairs) -> IdentityResult:
        failures = tuple(
            {"sample": i, "detail": detail}
            for i, (ok, detail) in enumerate(pairs)
            if not ok
        )
        return IdentityResult(name, statement, len(samples_m), failures)

    identities = [
        collect(
            "dilation_m_lands_in_gap1",
            "dilation by m maps period-p points of the gap-m space into the gap-1 space",
            [
                (check_membership(gap_1, power_map(m, x)).passed, "membership failed")
                for x in samples_m
            ],
        ),
        collect(
            "dilation_k_lands_in_gapm",
            "dilation by k maps period-p points of the gap-1 space into the gap-m space",
            [
                (check_membership(gap_m, power_map(k, z)).passed, "membership failed")
                for z in samples_1
            ],
        ),
        collect(
            "dilation_k_then_m_is_identity",
            "composing the dilations by m and k is the identity on period-p points",
            [
                (power_map(k, power_map(m, x)) == x, "composition differs from input")
                for x in samples_m
            ],
        ),
        collect(
            "dilation_m_then_k_is_identity",
            "composing the dilations by k and m is the identity on period-p points",
            [
                (power_map(m, power_map(k, z)) == z, "composition differs from input")
                for z in samples_1
            ],
        ),
        collect(
            "shift_intertwines_dilation_m",
            "shift after dilation by m equals dilation by m after the m-th shift power",
            [
                (
                    shift(power_map(m, x), 1) == power_map(m, shift(x, m)),
                    "intertwining identity failed",
                )
                for x in samples_m
            ],
        ),
        collect(
            "shift_intertwines_dilation_k",
            "the m-th shift power after dilation by k equals dilation by k after the shift",
            [
                (
                    shift(power_map(k, z), m) == power_map(k, shift(z, 1)),
                    "intertwining identity failed",
                )
                for z in samples_1
            ],
        ),
    ]
    return ConjugacyReport(p=p, m=m, k=k, samples=samples, identities=tuple(identities))


# ---------------------------------------------------------------------------
# Periodic point counting for binary SFTs


def count_periodic_sft(forbidden: frozenset[str] | set[str], n: int) -> int:
    """Number of circular binary words of length n avoiding the forbidden words.

    For n >= L-1 (L the forbidden word length) the count is the trace of the
    n-th power of the transfer matrix on (L-1)-blocks; shorter lengths are
    enumerated directly.  Both methods agree wherever both apply.
    """
    sft = BinarySFT(frozenset(forbidden))
    if n < 1:
        raise ValueError("length must be >= 1")
    length = sft.word_length
    if n < length - 1:
        return count_periodic_sft_bruteforce(sft.forbidden, n)
    blocks = ["".join(bits) for bits in _binary_words(length - 1)]
    index = {b: i for i, b in enumerate(blocks)}
    size = len(blocks)
    matrix = [[0] * size for _ in range(size)]
    for u in blocks:
        for letter in "01":
            word = u + letter
            if word in sft.forbidden:
                continue
            v = word[1:]
            matrix[index[u]][index[v]] = 1
    power = _mat_pow(matrix, n)
    return sum(power[i][i] for i in range(size))


def count_periodic_sft_bruteforce(forbidden: frozenset[str] | set[str], n: int) -> int:
    """Independent oracle: enumerate all 2^n circular words and filter."""
    sft = BinarySFT(frozenset(forbidden))
    if n < 1:
        raise ValueError("length must be >= 1")
    length = sft.word_length
    count = 0
    for bits in _binary_words(n):
        word = "".join(bits)
        if all(
            "".join(word[(i + j) % n] for j in range(length)) not in sft.forbidden
            for i in range(n)
        ):
            count += 1
    return count


def _binary_words(n: int):
    for value in range(1 << n):
        yield tuple(format(value, f"0{n}b"))


def _mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    size = len(a)
    return [
        [sum(a[i][t] * b[t][j] for t in range(size)) for j in range(size)]
        for i in range(size)
    ]


def _mat_pow(matrix: list[list[int]], n: int) -> list[list[int]]:
    size = len(matrix)
    result = [[int(i == j) for j in range(size)] for i in range(size)]
    base = [row[:] for row in matrix]
    while n:
        if n & 1:
            result = _mat_mul(result, base)
        base = _mat_mul(base, base)
        n >>= 1
    return result


# ---------------------------------------------------------------------------
# Explicit periodic witnesses for gap spaces


def best_periodic_gap(p: int) -> Fraction:
    """The distance realized by the explicit period-p witness: 1 for p = 2, else 1 - 1/p."""
    return Fraction(1) if p == 2 else 1 - Fraction(1, p)


def periodic_witness(dim: int, gap: int, threshold: Fraction, p: int) -> Periodic:
    """An explicit period-p point of the gap space, built by a rotation orbit.

    The point is x_n = (2*n*c*g / p mod 2) on every coordinate, where
    c = floor(p/2) and g is the inverse of the gap mod p.  Its entries a gap
    apart differ by exactly 2c/p in every coordinate, so the realized
    distance is 1 for p = 2 and 1 - 1/p otherwise.
    """
    threshold = Fraction(threshold)
    if gap % p == 0:
        raise ValueError("no period-p points exist when p divides the gap")
    realized = best_periodic_gap(p)
    if realized < threshold:
        raise ValueError("witness construction insufficient for this threshold")
    c = p // 2
    g = pow(gap % p, -1, p)
    values = tuple(
        TorusVec.constant(Fraction(2 * n * c * g, p), dim) for n in range(p)
    )
    point = Periodic(values)
    report = check_membership(gap_space(dim, gap, threshold), point)
    if not report.passed:
        raise AssertionError("witness construction failed its own membership check")
    return point
