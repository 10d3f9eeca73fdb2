"""Combinatorial types of weighted pointed stable rational curves.

A type is a tree of P^1's.  Each vertex carries the marked points
(legs) lying on that component, grouped into clusters of points that
coincide.  Since every component of a stable genus-0 curve is cut out
by the nodes, a stable type is determined by its clusters together
with the splits ``{A, A^c}`` of the legs induced by its edges; that
pair is the canonical key used for deduplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .core import (
    Level,
    LevelOutOfRange,
    MarkedSubset,
    ModuliError,
    canonical_subsets,
    check_cap,
    eps,
    parse_rational,
)


class MalformedTree(ModuliError):
    pass


class WeightsNotDominated(ModuliError):
    pass


class InvalidWeights(ModuliError):
    pass


class UnstableType(ModuliError):
    pass


@dataclass(frozen=True)
class WeightData:
    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(a) for a in self.weights)
        object.__setattr__(self, "weights", w)
        if any(not 0 < a <= 1 for a in w):
            raise InvalidWeights(f"weights must lie in (0, 1]: {[str(a) for a in w]}")
        if sum(w) <= 2:
            raise InvalidWeights(f"total weight {sum(w)} must exceed 2")

    @property
    def n(self) -> int:
        return len(self.weights)

    def __getitem__(self, leg: int) -> Fraction:
        return self.weights[leg - 1]

    def total(self, legs: Iterable[int]) -> Fraction:
        return sum((self.weights[i - 1] for i in legs), Fraction(0))

    @classmethod
    def sym(cls, n: int, weight) -> "WeightData":
        return cls((Fraction(weight),) * n)

    @classmethod
    def sym_level(cls, n: int, k: int) -> "WeightData":
        """Symmetric weights ``eps_k = 1/(m-k)`` of level ``k``."""
        return cls.sym(n, eps(n, k))

    @classmethod
    def parse(cls, n: int, text: str) -> "WeightData":
        """``"sym:1/3"`` or a comma list ``"1,1,1/2,..."``."""
        text = text.strip()
        if text.startswith("sym:"):
            return cls.sym(n, parse_rational(text[4:]))
        values = [parse_rational(t) for t in text.split(",")]
        if len(values) != n:
            raise InvalidWeights(f"expected {n} weights, got {len(values)}")
        return cls(tuple(values))

    def dominates(self, other: "WeightData") -> bool:
        return self.n == other.n and all(a >= b for a, b in zip(self.weights, other.weights))


@dataclass(frozen=True)
class Vertex:
    id: int
    legs: frozenset
    clusters: tuple  # frozensets partitioning legs, sorted by smallest leg


class CombCurveType:
    """A leg-labelled tree with collision clusters.

    Vertex ids are gauge: equality and hashing go through
    :meth:`canonical_key`.
    """

    __slots__ = ("n", "vertices", "edges", "_key")

    def __init__(self, n: int, vertices: Sequence[Vertex], edges: Iterable[Iterable[int]]):
        self.n = n
        self.vertices = tuple(sorted(vertices, key=lambda v: v.id))
        self.edges = tuple(sorted(tuple(sorted(e)) for e in edges))
        self._key = None
        self._validate()

    def _validate(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids) or not ids:
            raise MalformedTree("vertex ids must be distinct and nonempty")
        idset = set(ids)
        for a, b in self.edges:
            if a == b or a not in idset or b not in idset:
                raise MalformedTree(f"bad edge {(a, b)}")
        if len(set(self.edges)) != len(self.edges) or len(self.edges) != len(ids) - 1:
            raise MalformedTree("edges do not form a tree")
        # connectivity
        adj = self.adjacency()
        seen, stack = {ids[0]}, [ids[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != idset:
            raise MalformedTree("graph is not connected")
        legs: list[int] = []
        for v in self.vertices:
            legs.extend(v.legs)
            cl = [c for c in v.clusters]
            if any(not c for c in cl):
                raise MalformedTree(f"empty cluster at vertex {v.id}")
            flat = [i for c in cl for i in c]
            if len(flat) != len(set(flat)) or set(flat) != set(v.legs):
                raise MalformedTree(f"clusters at vertex {v.id} do not partition its legs")
        if sorted(legs) != list(range(1, self.n + 1)):
            raise MalformedTree(f"legs do not partition 1..{self.n}")

    # -- structure -------------------------------------------------------------

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v.id: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def _legs_by_id(self) -> dict[int, frozenset]:
        return {v.id: v.legs for v in self.vertices}

    def degree(self, vid: int) -> int:
        return sum(vid in e for e in self.edges)

    def degrees(self) -> dict[int, int]:
        deg = {v.id: 0 for v in self.vertices}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def clusters(self) -> list[frozenset]:
        return sorted((c for v in self.vertices for c in v.clusters), key=min)

    def _side(self, a: int, b: int, adj, legs_by_id) -> frozenset:
        """Legs on the ``b`` side of edge (a, b)."""
        legs: set[int] = set()
        seen, stack = {a, b}, [b]
        while stack:
            x = stack.pop()
            legs |= legs_by_id[x]
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return frozenset(legs)

    def splits(self) -> list[frozenset]:
        """Per edge, the side of the split that avoids leg 1."""
        adj = self.adjacency()
        legs_by_id = self._legs_by_id()
        out = []
        for a, b in self.edges:
            side = self._side(a, b, adj, legs_by_id)
            if 1 in side:
                side = frozenset(range(1, self.n + 1)) - side
            out.append(side)
        return out

    def canonical_key(self):
        if self._key is None:
            clusters = tuple(tuple(sorted(c)) for c in self.clusters())
            splits = tuple(sorted((len(s), tuple(sorted(s))) for s in self.splits()))
            self._key = (self.n, clusters, splits)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, CombCurveType):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def __repr__(self):
        parts = []
        for v in self.vertices:
            parts.append("[" + " ".join(",".join(map(str, sorted(c))) for c in v.clusters) + "]")
        return f"CombCurveType(n={self.n}, {' '.join(parts)}, edges={list(self.edges)})"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_splits(cls, n: int, clusters: Iterable[Iterable[int]], splits: Iterable[Iterable[int]]) -> "CombCurveType":
        """Build the tree whose edges realise the given leg splits.

        Splits may be given from either side; each is oriented away from
        leg 1.  Clusters must not be cut by any split.
        """
        full = frozenset(range(1, n + 1))
        oriented = []
        for s in splits:
            s = frozenset(s)
            oriented.append(full - s if 1 in s else s)
        if len(set(oriented)) != len(oriented):
            raise MalformedTree("repeated split")
        oriented.sort(key=lambda s: (-len(s), sorted(s)))
        clusters = [frozenset(c) for c in clusters]
        for s in oriented:
            for i, a in enumerate(oriented):
                if a is s:
                    continue
                if not (s <= a or a <= s or not (s & a)):
                    raise MalformedTree("incompatible splits")
            for c in clusters:
                if c & s and not c <= s:
                    raise MalformedTree("a split cuts a cluster")

        def home(legs: frozenset) -> int:
            best = 0
            best_size = n + 1
            for idx, s in enumerate(oriented, start=1):
                if legs <= s and len(s) < best_size:
                    best, best_size = idx, len(s)
            return best

        parents = []
        for idx, s in enumerate(oriented, start=1):
            parent = 0
            size = n + 1
            for jdx, a in enumerate(oriented, start=1):
                if jdx != idx and s < a and len(a) < size:
                    parent, size = jdx, len(a)
            parents.append((parent, idx))
        legs_at: dict[int, set] = {i: set() for i in range(len(oriented) + 1)}
        clusters_at: dict[int, list] = {i: [] for i in range(len(oriented) + 1)}
        for c in clusters:
            h = home(c)
            legs_at[h] |= c
            clusters_at[h].append(c)
        vertices = [
            Vertex(i, frozenset(legs_at[i]), tuple(sorted(clusters_at[i], key=min)))
            for i in range(len(oriented) + 1)
        ]
        t = cls(n, vertices, parents)
        t._key = (
            n,
            tuple(tuple(sorted(c)) for c in sorted(clusters, key=min)),
            tuple(sorted((len(s), tuple(sorted(s))) for s in oriented)),
        )
        return t

    def relabelled(self) -> "CombCurveType":
        """Same type with canonical vertex ids."""
        return CombCurveType.from_splits(self.n, self.clusters(), self.splits())

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "vertices": [
                {"id": v.id, "legs": sorted(v.legs), "clusters": [sorted(c) for c in v.clusters]}
                for v in self.vertices
            ],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, n: int | None = None) -> "CombCurveType":
        try:
            vertices = []
            for v in data["vertices"]:
                legs = frozenset(v["legs"])
                clusters = v.get("clusters")
                if clusters is None:
                    clusters = [[i] for i in sorted(legs)]
                vertices.append(Vertex(int(v["id"]), legs, tuple(sorted((frozenset(c) for c in clusters), key=min))))
            edges = [tuple(e) for e in data.get("edges", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTree(f"bad tree JSON: {exc}") from None
        if n is None:
            n = sum(len(v.legs) for v in vertices)
        return cls(n, vertices, edges)

    @classmethod
    def from_json(cls, text: str, n: int | None = None) -> "CombCurveType":
        return cls.from_dict(json.loads(text), n)


def is_stable_type(t: CombCurveType, A: WeightData) -> bool:
    if A.n != t.n:
        raise MalformedTree(f"type has {t.n} legs but weights have {A.n}")
    deg = t.degrees()
    for v in t.vertices:
        if any(A.total(c) > 1 for c in v.clusters):
            return False
        if deg[v.id] + A.total(v.legs) <= 2:
            return False
    return True


# -- enumeration -----------------------------------------------------------------

def _cluster_partitions(n: int, A: WeightData) -> Iterator[list[frozenset]]:
    """Set partitions of the legs whose blocks each weigh at most 1."""

    def rec(i: int, blocks: list[list[int]], loads: list[Fraction]):
        if i > n:
            yield [frozenset(b) for b in blocks]
            return
        w = A[i]
        for j, b in enumerate(blocks):
            if loads[j] + w <= 1:
                b.append(i)
                loads[j] += w
                yield from rec(i + 1, blocks, loads)
                loads[j] -= w
                b.pop()
        blocks.append([i])
        loads.append(w)
        yield from rec(i + 1, blocks, loads)
        loads.pop()
        blocks.pop()

    yield from rec(1, [], [])


def _compatible(a: frozenset, b: frozenset) -> bool:
    return a <= b or b <= a or not (a & b)


def enumerate_stable_types(n: int, A: WeightData) -> list[CombCurveType]:
    """Every stable type for weights ``A``, one per isomorphism class."""
    check_cap(n, "trees")
    if A.n != n:
        raise InvalidWeights(f"weights have length {A.n}, expected {n}")
    full = frozenset(range(1, n + 1))
    found: dict = {}
    for clusters in _cluster_partitions(n, A):
        others = [c for c in clusters if 1 not in c]
        candidates = []
        # unions of clusters avoiding leg 1 whose two sides both weigh > 1
        for mask in range(1, 1 << len(others)):
            side = frozenset().union(*(others[i] for i in range(len(others)) if mask >> i & 1))
            if A.total(side) > 1 and A.total(full - side) > 1:
                candidates.append(side)
        candidates.sort(key=lambda s: (len(s), sorted(s)))

        def grow(start: int, chosen: list[frozenset]):
            yield list(chosen)
            for idx in range(start, len(candidates)):
                cand = candidates[idx]
                if all(_compatible(cand, c) for c in chosen):
                    chosen.append(cand)
                    yield from grow(idx + 1, chosen)
                    chosen.pop()

        for family in grow(0, []):
            t = CombCurveType.from_splits(n, clusters, family)
            if is_stable_type(t, A):
                found.setdefault(t.canonical_key(), t)
    return [found[key] for key in sorted(found, key=lambda k: (len(k[2]), k))]


# -- reduction morphisms -----------------------------------------------------------

def reduce_type(t: CombCurveType, A: WeightData, B: WeightData) -> CombCurveType:
    """Image of a type under the reduction morphism from weights A to B.

    Lowering weights can only destabilise end components: a vertex of
    degree >= 2 carrying legs, or of degree >= 3, stays stable.  An end
    component whose legs weigh at most 1 under B is collapsed onto its
    neighbour and its legs become a single cluster at the old node.
    This is repeated until nothing changes.
    """
    if not A.dominates(B):
        raise WeightsNotDominated("reduction needs a_i >= b_i for every i")
    if not is_stable_type(t, A):
        raise UnstableType(f"{t!r} is not stable for the source weights")
    legs = {v.id: set(v.legs) for v in t.vertices}
    clusters = {v.id: [frozenset(c) for c in v.clusters] for v in t.vertices}
    adj = {vid: set(nb) for vid, nb in t.adjacency().items()}
    changed = True
    while changed:
        changed = False
        for vid in sorted(adj):
            if len(adj[vid]) == 1 and B.total(legs[vid]) <= 1:
                (nb,) = adj[vid]
                adj[nb].discard(vid)
                legs[nb] |= legs[vid]
                clusters[nb].append(frozenset(legs[vid]))
                del adj[vid], legs[vid], clusters[vid]
                changed = True
                break
    vertices = [Vertex(vid, frozenset(legs[vid]), tuple(sorted(clusters[vid], key=min))) for vid in adj]
    edges = {tuple(sorted((a, b))) for a in adj for b in adj[a]}
    return CombCurveType(t.n, vertices, edges).relabelled()


# -- boundary divisors of a level ------------------------------------------------

@dataclass(frozen=True)
class BoundaryInventory:
    level: Level
    collision: tuple
    nodal: tuple

    @property
    def total(self) -> int:
        return len(self.collision) + len(self.nodal)


def boundary_divisor_inventory(level: Level) -> BoundaryInventory:
    if level.is_git and level.n % 2 == 0:
        raise LevelOutOfRange("the GIT quotient for even n is not a weight level")
    collision = canonical_subsets(level.n, 2)
    nodal: list[MarkedSubset] = []
    for j in level.legal_sizes():
        if j > 2:
            nodal.extend(canonical_subsets(level.n, j))
    return BoundaryInventory(level, tuple(collision), tuple(nodal))


def contracted_divisors(n: int, k: int) -> list[MarkedSubset]:
    """Boundary divisors contracted by the reduction from level k to k-1."""
    m = n // 2
    if not 1 <= k <= m - 2:
        raise LevelOutOfRange(f"k={k} outside 1..{m - 2}")
    return canonical_subsets(n, m - k + 1)
