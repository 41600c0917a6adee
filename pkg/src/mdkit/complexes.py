"""Finite free prime-order simplicial complexes: joins, homology, coindex.

A complex carries a vertex permutation of order dividing p that maps
simplices to simplices; freeness (no power of the action fixing a simplex
setwise) is checked, never assumed.  Homology is integral, via Smith normal
form of the boundary matrices, and serves as the computable necessary
condition for connectivity.  Coindex is never "computed": sound lower bounds
come from explicit equivariant vertex maps found by backtracking search, the
upper bound is the dimension, and every bound carries the rule chain that
produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Mapping, Sequence


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# Complexes


@dataclass(frozen=True)
class FreeZpComplex:
    """A finite simplicial complex with a vertex-level Z_p action.

    ``vertices`` are arbitrary hashable names; ``simplices`` are frozensets of
    vertex indices (nonempty, downward closed); ``action`` maps vertex index
    to vertex index and must be a simplicial automorphism with action^p = id.
    """

    p: int
    vertices: tuple
    simplices: frozenset[frozenset[int]]
    action: tuple[int, ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError("p must be prime")
        n = len(self.vertices)
        simplices = frozenset(frozenset(s) for s in self.simplices)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "simplices", simplices)
        object.__setattr__(self, "action", tuple(self.action))
        if sorted(self.action) != list(range(n)):
            raise ValueError("action must be a permutation of the vertices")
        for s in simplices:
            if not s:
                raise ValueError("simplices must be nonempty")
            if not all(0 <= v < n for v in s):
                raise ValueError("simplex references an unknown vertex")
            for facet in combinations(s, len(s) - 1):
                if facet and frozenset(facet) not in simplices:
                    raise ValueError("simplex family is not downward closed")
        current = list(range(n))
        for _ in range(self.p):
            current = [self.action[v] for v in current]
        if current != list(range(n)):
            raise ValueError("action must have order dividing p")
        for s in simplices:
            if frozenset(self.action[v] for v in s) not in simplices:
                raise ValueError("action is not simplicial")

    # -- structure ---------------------------------------------------------

    @classmethod
    def from_maximal(
        cls, p: int, vertices: Sequence, maximal: Iterable[Iterable], action: Mapping
    ) -> "FreeZpComplex":
        """Build from maximal faces given by vertex names; closure is computed."""
        vertices = tuple(vertices)
        index = {v: i for i, v in enumerate(vertices)}
        simplices: set[frozenset[int]] = set()
        for face in maximal:
            idx = frozenset(index[v] for v in face)
            for size in range(1, len(idx) + 1):
                for sub in combinations(sorted(idx), size):
                    simplices.add(frozenset(sub))
        act = tuple(index[action[v]] for v in vertices)
        return cls(p, vertices, frozenset(simplices), act)

    @classmethod
    def empty(cls, p: int) -> "FreeZpComplex":
        return cls(p, (), frozenset(), ())

    def is_empty(self) -> bool:
        return not self.vertices

    def dimension(self) -> int:
        if not self.simplices:
            return -1
        return max(len(s) for s in self.simplices) - 1

    def simplices_of_dim(self, d: int) -> list[tuple[int, ...]]:
        return sorted(
            tuple(sorted(s)) for s in self.simplices if len(s) == d + 1
        )

    def vertex_orbits(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        orbits = []
        for v in range(len(self.vertices)):
            if v in seen:
                continue
            orbit = [v]
            seen.add(v)
            w = self.action[v]
            while w != v:
                orbit.append(w)
                seen.add(w)
                w = self.action[w]
            orbits.append(tuple(orbit))
        return orbits

    def act(self, v: int, power: int = 1) -> int:
        for _ in range(power % self.p):
            v = self.action[v]
        return v

    def euler_characteristic(self) -> int:
        total = 0
        for s in self.simplices:
            total += (-1) ** (len(s) - 1)
        return total

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "vertices": [_name_to_json(v) for v in self.vertices],
            "simplices": sorted(
                (sorted(s) for s in self.simplices), key=lambda s: (len(s), s)
            ),
            "action": list(self.action),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FreeZpComplex":
        vertices = tuple(_name_from_json(v) for v in data["vertices"])
        simplices = frozenset(frozenset(s) for s in data["simplices"])
        # closure may be omitted in hand-written inputs; compute it
        closed: set[frozenset[int]] = set()
        for s in simplices:
            for size in range(1, len(s) + 1):
                for sub in combinations(sorted(s), size):
                    closed.add(frozenset(sub))
        return cls(
            int(data["p"]), vertices, frozenset(closed), tuple(data["action"])
        )


def _name_to_json(name):
    if isinstance(name, tuple):
        return list(_name_to_json(x) for x in name)
    return name


def _name_from_json(name):
    if isinstance(name, list):
        return tuple(_name_from_json(x) for x in name)
    return name


def check_free_action(complex_: FreeZpComplex) -> bool:
    """True iff no nontrivial power of the action fixes any simplex setwise.

    For a prime-order simplicial action a setwise-invariant simplex would fix
    its barycenter, so this is exactly freeness of the realized action.
    """
    for power in range(1, complex_.p):
        for s in complex_.simplices:
            if frozenset(complex_.act(v, power) for v in s) == s:
                return False
    return True


def build_en_zp(p: int, n: int) -> FreeZpComplex:
    """The standard n-dimensional free complex: (n+1)-fold join of free orbits.

    Vertices are (a, level) for a in Z_p and level in 0..n; simplices are the
    nonempty vertex sets with at most one vertex per level; the action adds 1
    to the first coordinate.  The result is n-dimensional and free.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if n < 0:
        raise ValueError("n must be >= 0")
    vertices = [(a, level) for level in range(n + 1) for a in range(p)]
    maximal = [
        tuple((choice[level], level) for level in range(n + 1))
        for choice in _tuples(p, n + 1)
    ]
    action = {(a, level): ((a + 1) % p, level) for (a, level) in vertices}
    return FreeZpComplex.from_maximal(p, vertices, maximal, action)


def _tuples(base: int, length: int):
    if length == 0:
        yield ()
        return
    for rest in _tuples(base, length - 1):
        for a in range(base):
            yield rest + (a,)


def join_complexes(k: FreeZpComplex, l: FreeZpComplex) -> FreeZpComplex:
    """Simplicial join: simplices are unions of one simplex (or nothing) per side.

    Joining with the empty complex returns the other factor unchanged.  The
    action is diagonal; the join of free complexes is free and its dimension
    is dim K + dim L + 1.
    """
    if k.p != l.p:
        raise ValueError("prime mismatch")
    if k.is_empty():
        return l
    if l.is_empty():
        return k
    vertices = [(0, v) for v in k.vertices] + [(1, w) for w in l.vertices]
    off = len(k.vertices)
    simplices: set[frozenset[int]] = set()
    k_parts = [frozenset()] + list(k.simplices)
    l_parts = [frozenset()] + list(l.simplices)
    for sk in k_parts:
        for sl in l_parts:
            merged = frozenset(sk) | frozenset(v + off for v in sl)
            if merged:
                simplices.add(merged)
    action = tuple(
        list(k.action) + [off + w for w in l.action]
    )
    return FreeZpComplex(k.p, tuple(vertices), frozenset(simplices), action)


# ---------------------------------------------------------------------------
# Integral homology via Smith normal form


def smith_normal_form_diagonal(matrix: list[list[int]]) -> list[int]:
    """Invariant factors (positive, each dividing the next) of an integer matrix."""
    mat = [row[:] for row in matrix]
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    diag: list[int] = []
    t = 0
    while t < min(rows, cols):
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = abs(mat[i][j])
                if v and (best is None or v < best):
                    best = v
                    pivot = (i, j)
        if pivot is None:
            break
        i0, j0 = pivot
        mat[t], mat[i0] = mat[i0], mat[t]
        for row in mat:
            row[t], row[j0] = row[j0], row[t]
        while True:
            changed = False
            for i in range(t + 1, rows):
                if mat[i][t]:
                    factor = mat[i][t] // mat[t][t]
                    for j in range(t, cols):
                        mat[i][j] -= factor * mat[t][j]
                    if mat[i][t]:
                        mat[t], mat[i] = mat[i], mat[t]
                    changed = True
            for j in range(t + 1, cols):
                if mat[t][j]:
                    factor = mat[t][j] // mat[t][t]
                    for i in range(t, rows):
                        mat[i][j] -= factor * mat[i][t]
                    if mat[t][j]:
                        for row in mat:
                            row[t], row[j] = row[j], row[t]
                    changed = True
            if not changed:
                break
        # enforce divisibility of the remaining block by the pivot
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if mat[i][j] % mat[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for j in range(t, cols):
                mat[t][j] += mat[offender][j]
            continue
        diag.append(abs(mat[t][t]))
        t += 1
    return diag


@dataclass(frozen=True)
class HomologyGroup:
    """A finitely generated abelian group: free rank plus torsion coefficients."""

    rank: int
    torsion: tuple[int, ...] = ()

    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def _boundary_matrix(complex_: FreeZpComplex, d: int) -> list[list[int]]:
    """Boundary from d-chains to (d-1)-chains; d = 0 gives the augmentation."""
    upper = complex_.simplices_of_dim(d)
    if d == 0:
        return [[1] * len(upper)]
    lower = complex_.simplices_of_dim(d - 1)
    index = {s: i for i, s in enumerate(lower)}
    matrix = [[0] * len(upper) for _ in range(len(lower))]
    for j, s in enumerate(upper):
        for drop in range(len(s)):
            face = s[:drop] + s[drop + 1 :]
            matrix[index[face]][j] = (-1) ** drop
    return matrix


def reduced_homology(complex_: FreeZpComplex, k: int) -> HomologyGroup:
    """Reduced integral homology in degree k via Smith normal form."""
    if k < 0 or complex_.is_empty():
        return HomologyGroup(0)
    n_k = len(complex_.simplices_of_dim(k))
    if n_k == 0:
        return HomologyGroup(0)
    d_k = _boundary_matrix(complex_, k)
    rank_k = len(smith_normal_form_diagonal(d_k)) if d_k and d_k[0] else 0
    n_k1 = len(complex_.simplices_of_dim(k + 1))
    if n_k1:
        diag_up = smith_normal_form_diagonal(_boundary_matrix(complex_, k + 1))
    else:
        diag_up = []
    rank_up = len(diag_up)
    torsion = tuple(t for t in diag_up if t > 1)
    return HomologyGroup(rank=n_k - rank_k - rank_up, torsion=torsion)


def homology_euler_consistent(complex_: FreeZpComplex) -> bool:
    """Alternating sum of reduced homology ranks must reproduce Euler - 1."""
    if complex_.is_empty():
        return True
    top = complex_.dimension()
    alternating = sum(
        (-1) ** k * reduced_homology(complex_, k).rank for k in range(top + 1)
    )
    return complex_.euler_characteristic() == 1 + alternating


# ---------------------------------------------------------------------------
# Equivariant vertex-map search


def verify_equivariant_simplicial(
    mapping: Mapping[int, int], source: FreeZpComplex, target: FreeZpComplex
) -> bool:
    """Independent checker: totality, equivariance and simpliciality."""
    if source.p != target.p:
        return False
    if set(mapping) != set(range(len(source.vertices))):
        return False
    for v in range(len(source.vertices)):
        if mapping[source.action[v]] != target.action[mapping[v]]:
            return False
    for s in source.simplices:
        if frozenset(mapping[v] for v in s) not in target.simplices:
            return False
    return True


def equivariant_map_search(
    source: FreeZpComplex, target: FreeZpComplex
) -> dict[int, int] | None:
    """Backtracking search for an equivariant simplicial vertex map.

    One image is chosen per source vertex orbit and propagated along the
    actions; a partial assignment is pruned as soon as some fully-assigned
    source simplex has a non-simplex image.  Exhausting the space proves no
    equivariant simplicial VERTEX map exists at this triangulation; it does
    not bound continuous maps, so callers must treat failure as inconclusive.
    """
    if source.p != target.p:
        raise ValueError("prime mismatch")
    if not check_free_action(source):
        raise ValueError("search requires a free source action")
    if source.is_empty():
        return {}
    if target.is_empty():
        return None
    orbits = source.vertex_orbits()
    orbit_of = {}
    for oi, orbit in enumerate(orbits):
        for v in orbit:
            orbit_of[v] = oi
    # simplices grouped by the highest orbit index they touch
    by_last_orbit: list[list[frozenset[int]]] = [[] for _ in orbits]
    for s in source.simplices:
        by_last_orbit[max(orbit_of[v] for v in s)].append(s)

    assignment: dict[int, int] = {}

    def assign_orbit(oi: int) -> bool:
        if oi == len(orbits):
            return True
        rep = orbits[oi][0]
        for w in range(len(target.vertices)):
            image = w
            trial = {}
            vertex = rep
            ok = True
            for _ in range(len(orbits[oi])):
                trial[vertex] = image
                vertex = source.action[vertex]
                image = target.action[image]
            assignment.update(trial)
            for s in by_last_orbit[oi]:
                if frozenset(assignment[v] for v in s) not in target.simplices:
                    ok = False
                    break
            if ok and assign_orbit(oi + 1):
                return True
            for v in trial:
                del assignment[v]
        return False

    if assign_orbit(0):
        result = dict(assignment)
        if not verify_equivariant_simplicial(result, source, target):
            raise AssertionError("search returned a map its checker rejects")
        return result
    return None


def complexes_isomorphic(a: FreeZpComplex, b: FreeZpComplex) -> bool:
    """Action-complex isomorphism: an equivariant simplicial vertex bijection
    matching the simplex families exactly."""
    if a.p != b.p:
        return False
    if len(a.vertices) != len(b.vertices) or len(a.simplices) != len(b.simplices):
        return False
    if a.is_empty():
        return True
    mapping = _iso_search(a, b)
    return mapping is not None


def _iso_search(a: FreeZpComplex, b: FreeZpComplex) -> dict[int, int] | None:
    orbits = a.vertex_orbits()
    assignment: dict[int, int] = {}
    used: set[int] = set()

    def assign(oi: int) -> bool:
        if oi == len(orbits):
            image_simplices = {
                frozenset(assignment[v] for v in s) for s in a.simplices
            }
            return image_simplices == set(b.simplices)
        rep = orbits[oi][0]
        for w in range(len(b.vertices)):
            if w in used:
                continue
            trial = {}
            vertex, image = rep, w
            clash = False
            for _ in range(len(orbits[oi])):
                if image in used or vertex in trial:
                    clash = True
                    break
                trial[vertex] = image
                vertex = a.action[vertex]
                image = b.action[image]
            if clash or len(set(trial.values())) != len(trial):
                continue
            assignment.update(trial)
            used.update(trial.values())
            ok = all(
                frozenset(assignment[v] for v in s) in b.simplices
                for s in a.simplices
                if all(v in assignment for v in s)
            )
            if ok and assign(oi + 1):
                return True
            for v, w2 in trial.items():
                del assignment[v]
                used.discard(w2)
        return False

    return dict(assignment) if assign(0) else None


# ---------------------------------------------------------------------------
# Coindex bounds


INFINITE = None  # sentinel for an unbounded upper coindex


@dataclass(frozen=True)
class CoindexBound:
    """An interval [lower, upper] for a coindex, with its derivation chain."""

    p: int
    lower: int
    upper: int | None
    provenance: tuple[dict, ...] = ()

    def __post_init__(self) -> None:
        if self.lower < -1:
            raise ValueError("lower bound below the empty-space convention -1")
        if self.upper is not None and self.lower > self.upper:
            raise ValueError("bound interval inverted")
        object.__setattr__(self, "provenance", tuple(self.provenance))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "lower": self.lower,
            "upper": self.upper if self.upper is not None else "inf",
            "provenance": list(self.provenance),
        }


def coindex_bounds(complex_: FreeZpComplex, search_depth: int) -> CoindexBound:
    """Sound coindex interval for a free complex.

    The lower bound is the largest n <= search_depth for which an explicit
    equivariant vertex map from the standard n-dimensional free complex was
    found; the upper bound is the dimension.  A failed search never tightens
    the upper bound (sources are not subdivided) and is recorded as
    unresolved in the provenance.
    """
    if complex_.is_empty():
        return CoindexBound(
            complex_.p,
            -1,
            -1,
            ({"rule": "empty-space convention", "statement": "coindex of the empty space is -1"},),
        )
    if not check_free_action(complex_):
        raise ValueError("coindex defined only for free actions")
    provenance: list[dict] = []
    lower = -1
    for n in range(0, search_depth + 1):
        found = equivariant_map_search(build_en_zp(complex_.p, n), complex_) is not None
        if found:
            lower = n
            provenance.append(
                {
                    "rule": "vertex-map witness",
                    "level": n,
                    "statement": (
                        f"an explicit equivariant simplicial map from the standard "
                        f"level-{n} free complex exists, so coindex >= {n}"
                    ),
                }
            )
        else:
            provenance.append(
                {
                    "rule": "search exhausted",
                    "level": n,
                    "statement": (
                        f"no equivariant simplicial vertex map from the standard "
                        f"level-{n} free complex at this triangulation; inconclusive "
                        f"without subdivision, upper bound unchanged"
                    ),
                }
            )
            break
    dim = complex_.dimension()
    provenance.append(
        {
            "rule": "dimension cap",
            "statement": (
                f"a free {dim}-dimensional complex maps equivariantly into the "
                f"standard level-{dim} free complex, and equivariant maps between "
                f"standard free complexes cannot raise the level, so coindex <= {dim}"
            ),
        }
    )
    return CoindexBound(complex_.p, lower, dim, tuple(provenance))


# ---------------------------------------------------------------------------
# Bound combinators


def bound_combine(
    rule: str,
    inputs: Sequence[CoindexBound],
    *,
    p: int | None = None,
    exponent: int | None = None,
    dim_cap: int | None = None,
) -> CoindexBound:
    """Propagate coindex bounds along the sound combination rules.

    join:            lower = l1 + l2 + 1; upper unbounded unless a dimension
                     cap is supplied.
    map:             a bound for the source of an equivariant map pushes its
                     lower bound onto the target (optional second input: a
                     prior bound for the target to merge with).
    power:           bounds are unchanged under T -> T^n for n coprime to p.
    finite-nonempty: a nonempty finite free orbit set is exactly [0, 0].
    bump:            lower = lower + 1 (join with a nonempty finite free set
                     followed by an equivariant map into a universal target).
    """
    if rule == "finite-nonempty":
        if p is None:
            raise ValueError("finite-nonempty rule needs p")
        return CoindexBound(
            p,
            0,
            0,
            (
                {
                    "rule": "finite-nonempty",
                    "statement": (
                        "a nonempty finite free orbit set admits an orbit map from "
                        "the standard level-0 complex and has dimension 0, so its "
                        "coindex is exactly 0"
                    ),
                },
            ),
        )
    if not inputs:
        raise ValueError(f"rule {rule!r} needs at least one input bound")
    shared_p = inputs[0].p
    if any(b.p != shared_p for b in inputs):
        raise ValueError("prime mismatch")
    chain = tuple(rec for b in inputs for rec in b.provenance)
    if rule == "join":
        if len(inputs) != 2:
            raise ValueError("join rule takes exactly two bounds")
        a, b = inputs
        lower = a.lower + b.lower + 1
        upper = dim_cap
        return CoindexBound(
            shared_p,
            lower,
            upper,
            chain
            + (
                {
                    "rule": "join",
                    "statement": (
                        "the coindex of a join is at least the sum of the coindexes "
                        "plus one"
                    ),
                    "inputs": [a.lower, b.lower],
                },
            ),
        )
    if rule == "map":
        if len(inputs) == 1:
            source, target = inputs[0], None
        elif len(inputs) == 2:
            source, target = inputs
        else:
            raise ValueError("map rule takes one or two bounds")
        lower = source.lower if target is None else max(source.lower, target.lower)
        upper = None if target is None else target.upper
        return CoindexBound(
            shared_p,
            lower,
            upper,
            chain
            + (
                {
                    "rule": "map",
                    "statement": (
                        "an equivariant continuous map cannot decrease coindex, so "
                        "the target inherits the source's lower bound"
                    ),
                },
            ),
        )
    if rule == "power":
        if len(inputs) != 1:
            raise ValueError("power rule takes exactly one bound")
        if exponent is None:
            raise ValueError("power rule needs the exponent")
        if gcd(exponent, shared_p) != 1:
            raise ValueError("power rule requires an exponent coprime to p")
        b = inputs[0]
        return CoindexBound(
            shared_p,
            b.lower,
            b.upper,
            chain
            + (
                {
                    "rule": "power",
                    "statement": (
                        f"replacing the action by its power {exponent} (coprime to "
                        f"{shared_p}) preserves coindex"
                    ),
                },
            ),
        )
    if rule == "bump":
        if len(inputs) != 1:
            raise ValueError("bump rule takes exactly one bound")
        b = inputs[0]
        return CoindexBound(
            shared_p,
            b.lower + 1,
            None,
            chain
            + (
                {
                    "rule": "bump",
                    "statement": (
                        "joining with a nonempty finite free set and mapping into a "
                        "universal gap space raises the periodic coindex lower bound "
                        "by one"
                    ),
                },
            ),
        )
    raise ValueError(f"unknown rule {rule!r}")
