"""Finite categories, quivers, Set-valued functors, and the small-scale
universal constructions everything else consumes.

All structure is explicit finite data over opaque string identifiers:
source/target tables, composition tables, functor graphs. Values are
immutable after construction and every operation is a pure function, so
any value can be shared freely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import BaseMismatch, BoundExceeded, NotComposable, UnboundedHomSet, VertexMismatch


# ---------------------------------------------------------------------------
# core types


@dataclass(frozen=True)
class FinCategory:
    """A finite category given by explicit tables.

    ``compose`` maps a pair ``(g, f)`` with ``tgt(f) == src(g)`` to the
    composite ``g after f``. When ``closed`` is False the category is a
    truncation of a larger one: composable pairs whose composite fell
    outside the truncation bound are absent from the table, and only
    bound-aware consumers may use the value.
    """

    objects: frozenset[str]
    morphisms: frozenset[str]
    src: dict[str, str]
    tgt: dict[str, str]
    identity: dict[str, str]
    compose: dict[tuple[str, str], str]
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "objects", frozenset(self.objects))
        object.__setattr__(self, "morphisms", frozenset(self.morphisms))
        object.__setattr__(self, "src", dict(self.src))
        object.__setattr__(self, "tgt", dict(self.tgt))
        object.__setattr__(self, "identity", dict(self.identity))
        object.__setattr__(self, "compose", dict(self.compose))

    def is_identity(self, m: str) -> bool:
        return self.identity.get(self.src.get(m)) == m and self.src[m] == self.tgt[m]

    def identities(self) -> frozenset[str]:
        return frozenset(self.identity.values())

    def non_identities(self) -> list[str]:
        ids = self.identities()
        return sorted(m for m in self.morphisms if m not in ids)

    def hom(self, x: str, y: str) -> list[str]:
        return sorted(m for m in self.morphisms if self.src[m] == x and self.tgt[m] == y)

    def compose_pair(self, g: str, f: str) -> str:
        """Composite of ``f`` followed by ``g``."""
        if self.tgt[f] != self.src[g]:
            raise NotComposable(f"{g} after {f}: target {self.tgt[f]} != source {self.src[g]}")
        try:
            return self.compose[(g, f)]
        except KeyError:
            if not self.closed:
                raise BoundExceeded(f"composite of ({g}, {f}) exceeds the truncation bound")
            raise NotComposable(f"composition table has no entry for ({g}, {f})")

    def composable_pairs(self) -> Iterator[tuple[str, str]]:
        """All pairs ``(g, f)`` with ``tgt(f) == src(g)``."""
        by_src: dict[str, list[str]] = {}
        for m in self.morphisms:
            by_src.setdefault(self.src[m], []).append(m)
        for f in sorted(self.morphisms):
            for g in sorted(by_src.get(self.tgt[f], ())):
                yield g, f


@dataclass(frozen=True)
class Quiver:
    vertices: frozenset[str]
    edges: frozenset[str]
    esrc: dict[str, str]
    etgt: dict[str, str]

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "edges", frozenset(self.edges))
        object.__setattr__(self, "esrc", dict(self.esrc))
        object.__setattr__(self, "etgt", dict(self.etgt))


@dataclass(frozen=True)
class CatFunctor:
    """A functor between finite categories, as explicit object/morphism maps."""

    dom: FinCategory
    cod: FinCategory
    omap: dict[str, str]
    mmap: dict[str, str]

    def __post_init__(self):
        object.__setattr__(self, "omap", dict(self.omap))
        object.__setattr__(self, "mmap", dict(self.mmap))


@dataclass(frozen=True)
class SetFunctor:
    """A covariant functor from a finite category to finite sets.

    ``value`` assigns each object a finite set of element identifiers and
    ``action`` assigns each morphism a total function, stored as an
    explicit graph from ``value[src]`` to ``value[tgt]``. Contravariant
    assignments are represented by taking ``base`` to be the opposite of
    the category of interest.
    """

    base: FinCategory
    value: dict[str, frozenset[str]]
    action: dict[str, dict[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "value", {o: frozenset(v) for o, v in self.value.items()})
        object.__setattr__(self, "action", {m: dict(g) for m, g in self.action.items()})


@dataclass(frozen=True)
class Diagram:
    """A finite shape together with a labeling functor into a target category."""

    shape: FinCategory
    labels: CatFunctor


@dataclass(frozen=True)
class LimitCone:
    """The limit of a Set-valued functor on a finite category.

    Apex elements are tuples with one component per base object, in the
    fixed order ``order`` (sorted object identifiers), so that limit
    elements have reproducible canonical names. ``legs[o]`` is the
    projection onto the ``o`` component, as an explicit graph.
    """

    order: tuple[str, ...]
    apex: frozenset[tuple[str, ...]]
    legs: dict[str, dict[tuple[str, ...], str]]

    def __post_init__(self):
        object.__setattr__(self, "apex", frozenset(self.apex))
        object.__setattr__(self, "legs", {o: dict(g) for o, g in self.legs.items()})

    def sorted_apex(self) -> list[tuple[str, ...]]:
        return sorted(self.apex)


def tuple_name(tup: Sequence[str]) -> str:
    """Canonical printable name of a limit apex tuple."""
    return "(" + ",".join(tup) + ")"


# ---------------------------------------------------------------------------
# constructors


def discrete_category(objects: Iterable[str]) -> FinCategory:
    """The category with the given objects and only identity morphisms."""
    objs = sorted(set(objects))
    identity = {o: f"id_{o}" for o in objs}
    src = {identity[o]: o for o in objs}
    compose = {(identity[o], identity[o]): identity[o] for o in objs}
    return FinCategory(
        objects=frozenset(objs),
        morphisms=frozenset(identity.values()),
        src=src,
        tgt=dict(src),
        identity=identity,
        compose=compose,
    )


def terminal_category(obj: str = "pt") -> FinCategory:
    return discrete_category([obj])


def identity_functor(cat: FinCategory) -> CatFunctor:
    return CatFunctor(cat, cat, {o: o for o in cat.objects}, {m: m for m in cat.morphisms})


def quiver_from_edges(vertices: Iterable[str], edges: Iterable[tuple[str, str, str]]) -> Quiver:
    """Build a quiver from ``(edge_id, src, tgt)`` triples."""
    es, esrc, etgt = [], {}, {}
    for e, s, t in edges:
        es.append(e)
        esrc[e] = s
        etgt[e] = t
    return Quiver(frozenset(vertices), frozenset(es), esrc, etgt)


# ---------------------------------------------------------------------------
# validation


def validate_category(cat: FinCategory) -> list[str]:
    """Exhaustive check of the category axioms; returns violations as data.

    On a non-closed (truncated) category, composable pairs and triples
    whose composites are missing from the table are skipped.
    """
    report: list[str] = []
    for m in sorted(cat.morphisms):
        if cat.src.get(m) not in cat.objects or cat.tgt.get(m) not in cat.objects:
            report.append(f"morphism {m} has src/tgt outside the object set")
    for o in sorted(cat.objects):
        i = cat.identity.get(o)
        if i is None or i not in cat.morphisms:
            report.append(f"object {o} has no identity morphism")
            continue
        if cat.src.get(i) != o or cat.tgt.get(i) != o:
            report.append(f"identity {i} of {o} is not an endomorphism of {o}")

    for (g, f), gf in sorted(cat.compose.items()):
        if g not in cat.morphisms or f not in cat.morphisms or gf not in cat.morphisms:
            report.append(f"composition entry ({g}, {f}) -> {gf} mentions unknown morphisms")
            continue
        if cat.tgt[f] != cat.src[g]:
            report.append(f"composition entry ({g}, {f}) is not composable")
        elif cat.src.get(gf) != cat.src[f] or cat.tgt.get(gf) != cat.tgt[g]:
            report.append(f"composite {gf} of ({g}, {f}) has wrong endpoints")

    ids = cat.identities()
    for g, f in cat.composable_pairs():
        if (g, f) not in cat.compose:
            if cat.closed:
                report.append(f"no composite for composable pair ({g}, {f})")
            continue
        gf = cat.compose[(g, f)]
        if f in ids and gf != g:
            report.append(f"right identity law fails: {g} after {f} = {gf}")
        if g in ids and gf != f:
            report.append(f"left identity law fails: {g} after {f} = {gf}")

    by_src: dict[str, list[str]] = {}
    for m in cat.morphisms:
        by_src.setdefault(cat.src[m], []).append(m)
    for f in sorted(cat.morphisms):
        for g in sorted(by_src.get(cat.tgt[f], ())):
            if (g, f) not in cat.compose:
                continue
            for h in sorted(by_src.get(cat.tgt[g], ())):
                if (h, g) not in cat.compose:
                    continue
                left = cat.compose.get((h, cat.compose[(g, f)]))
                right = cat.compose.get((cat.compose[(h, g)], f))
                if left is None or right is None:
                    if cat.closed:
                        report.append(f"missing composite in triple ({h}, {g}, {f})")
                    continue
                if left != right:
                    report.append(f"associativity fails on ({h}, {g}, {f}): {left} != {right}")
    return report


def validate_functor(fun: CatFunctor) -> list[str]:
    """Check totality and preservation of endpoints, identities, composition."""
    report: list[str] = []
    dom, cod = fun.dom, fun.cod
    for o in sorted(dom.objects):
        if fun.omap.get(o) not in cod.objects:
            report.append(f"object {o} is not mapped into the codomain")
    for m in sorted(dom.morphisms):
        fm = fun.mmap.get(m)
        if fm not in cod.morphisms:
            report.append(f"morphism {m} is not mapped into the codomain")
            continue
        if cod.src[fm] != fun.omap.get(dom.src[m]) or cod.tgt[fm] != fun.omap.get(dom.tgt[m]):
            report.append(f"morphism {m} does not preserve endpoints")
    for o in sorted(dom.objects):
        i = dom.identity[o]
        if fun.mmap.get(i) != cod.identity.get(fun.omap.get(o)):
            report.append(f"identity of {o} is not preserved")
    for (g, f), gf in sorted(dom.compose.items()):
        img = cod.compose.get((fun.mmap.get(g), fun.mmap.get(f)))
        if img is None or img != fun.mmap.get(gf):
            report.append(f"composition of ({g}, {f}) is not preserved")
    return report


def validate_setfunctor(fun: SetFunctor) -> list[str]:
    """Check that the actions are total functions and functorial."""
    report: list[str] = []
    base = fun.base
    for o in sorted(base.objects):
        if o not in fun.value:
            report.append(f"object {o} has no value set")
    for m in sorted(base.morphisms):
        act = fun.action.get(m)
        if act is None:
            report.append(f"morphism {m} has no action")
            continue
        dom_set = fun.value.get(base.src[m], frozenset())
        cod_set = fun.value.get(base.tgt[m], frozenset())
        if set(act) != set(dom_set):
            report.append(f"action of {m} is not total on the source value set")
        if not set(act.values()) <= set(cod_set):
            report.append(f"action of {m} leaves the target value set")
    for o in sorted(base.objects):
        i = base.identity[o]
        act = fun.action.get(i, {})
        if any(act.get(x) != x for x in fun.value.get(o, frozenset())):
            report.append(f"action of identity {i} is not the identity function")
    for (g, f), gf in sorted(base.compose.items()):
        ag, af, agf = fun.action.get(g, {}), fun.action.get(f, {}), fun.action.get(gf, {})
        for x in sorted(fun.value.get(base.src[f], frozenset())):
            if agf.get(x) != ag.get(af.get(x)):
                report.append(f"action of composite {gf} disagrees with the composite action at {x}")
                break
    return report


# ---------------------------------------------------------------------------
# duality


def opposite(cat: FinCategory) -> FinCategory:
    """Reverse every morphism. Identifiers are preserved, so the operation
    is an involution on the nose."""
    return FinCategory(
        objects=cat.objects,
        morphisms=cat.morphisms,
        src=dict(cat.tgt),
        tgt=dict(cat.src),
        identity=dict(cat.identity),
        compose={(g, f): x for (f, g), x in cat.compose.items()},
        closed=cat.closed,
    )


def opposite_functor(fun: CatFunctor) -> CatFunctor:
    return CatFunctor(opposite(fun.dom), opposite(fun.cod), fun.omap, fun.mmap)


# ---------------------------------------------------------------------------
# quivers and free categories


def discrete_quiver(vertices: Iterable[str]) -> Quiver:
    return Quiver(frozenset(vertices), frozenset(), {}, {})


def underlying_quiver(cat: FinCategory) -> Quiver:
    """Forget composition: every morphism (identities included) becomes an edge."""
    return Quiver(cat.objects, cat.morphisms, dict(cat.src), dict(cat.tgt))


def quiver_has_cycle(q: Quiver) -> bool:
    out: dict[str, list[str]] = {v: [] for v in q.vertices}
    for e in q.edges:
        out[q.esrc[e]].append(q.etgt[e])
    state: dict[str, int] = {}

    def visit(v: str) -> bool:
        state[v] = 1
        for w in out[v]:
            s = state.get(w, 0)
            if s == 1 or (s == 0 and visit(w)):
                return True
        state[v] = 2
        return False

    return any(state.get(v, 0) == 0 and visit(v) for v in sorted(q.vertices))


def free_category_with_paths(
    q: Quiver, bound: Optional[int] = None
) -> tuple[FinCategory, dict[str, tuple[str, ...]]]:
    """Free category on a quiver, plus the edge sequence behind each morphism.

    Morphisms are paths; the empty path at a vertex is its identity and
    composition is concatenation. A cyclic quiver has infinitely many
    paths, so a ``bound`` on path length is then required and the result
    is flagged non-closed whenever paths were actually cut off.
    """
    cyclic = quiver_has_cycle(q)
    if cyclic and bound is None:
        raise UnboundedHomSet("quiver has a directed cycle; a path-length bound is required")

    def path_id(path: tuple[str, ...], at: str) -> str:
        if not path:
            return f"id_{at}"
        return "∘".join(reversed(path))

    paths: dict[str, tuple[str, ...]] = {}
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    identity: dict[str, str] = {}
    for v in sorted(q.vertices):
        pid = path_id((), v)
        paths[pid] = ()
        src[pid] = tgt[pid] = v
        identity[v] = pid

    frontier: list[tuple[tuple[str, ...], str, str]] = [((), v, v) for v in sorted(q.vertices)]
    truncated = False
    length = 0
    while frontier:
        length += 1
        if bound is not None and length > bound:
            truncated = bool(frontier)
            break
        nxt = []
        for path, s, t in frontier:
            for e in sorted(q.edges):
                if q.esrc[e] != t:
                    continue
                new = path + (e,)
                pid = path_id(new, s)
                paths[pid] = new
                src[pid] = s
                tgt[pid] = q.etgt[e]
                nxt.append((new, s, q.etgt[e]))
        frontier = nxt

    compose: dict[tuple[str, str], str] = {}
    by_path = {v: {} for v in q.vertices}  # src -> path tuple -> id
    for pid, path in paths.items():
        by_path[src[pid]][path] = pid
    for f, fpath in paths.items():
        for g, gpath in paths.items():
            if tgt[f] != src[g]:
                continue
            whole = fpath + gpath
            pid = by_path[src[f]].get(whole)
            if pid is not None:
                compose[(g, f)] = pid

    cat = FinCategory(
        objects=frozenset(q.vertices),
        morphisms=frozenset(paths),
        src=src,
        tgt=tgt,
        identity=identity,
        compose=compose,
        closed=not truncated,
    )
    return cat, paths


def free_category(q: Quiver, bound: Optional[int] = None) -> FinCategory:
    return free_category_with_paths(q, bound)[0]


def quiver_pushout(base: Quiver, extra: Quiver) -> Quiver:
    """Glue two quivers along their (shared) vertex set.

    Vertices stay put; edges are the disjoint union, tagged by origin.
    """
    if base.vertices != extra.vertices:
        raise VertexMismatch("pushout requires identical vertex sets")
    esrc, etgt = {}, {}
    for e in base.edges:
        esrc[f"base:{e}"] = base.esrc[e]
        etgt[f"base:{e}"] = base.etgt[e]
    for e in extra.edges:
        esrc[f"extra:{e}"] = extra.esrc[e]
        etgt[f"extra:{e}"] = extra.etgt[e]
    return Quiver(base.vertices, frozenset(esrc), esrc, etgt)


def compose_path(cat: FinCategory, path: Sequence[str], at: Optional[str] = None) -> str:
    """Fold a composable sequence of morphisms (listed first-to-last)
    down to a single morphism. The empty sequence needs an anchor object
    and yields its identity."""
    if not path:
        if at is None:
            raise NotComposable("empty path needs an anchor object")
        return cat.identity[at]
    out = path[0]
    for m in path[1:]:
        out = cat.compose_pair(m, out)
    return out


# ---------------------------------------------------------------------------
# comma categories and components


def comma_object_id(d: str, f: str) -> str:
    return f"({d},{f})"


def comma_category(anchor: str, fun: CatFunctor) -> tuple[FinCategory, dict[str, tuple[str, str]]]:
    """The category of pairs ``(d, f : anchor -> fun(d))``.

    A morphism ``(d1, f1) -> (d2, f2)`` is a domain morphism ``g`` with
    ``fun(g) . f1 == f2``. Returns the category plus the labeling of its
    objects by pairs.
    """
    base = fun.cod
    labels: dict[str, tuple[str, str]] = {}
    for d in sorted(fun.dom.objects):
        for f in base.hom(anchor, fun.omap[d]):
            labels[comma_object_id(d, f)] = (d, f)

    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    identity: dict[str, str] = {}
    morphs: dict[str, tuple[str, str]] = {}  # morphism id -> (g, source comma object)
    for cid, (d, f) in labels.items():
        for g in sorted(fun.dom.morphisms):
            if fun.dom.src[g] != d:
                continue
            f2 = base.compose[(fun.mmap[g], f)]
            mid = f"{g}@{cid}"
            morphs[mid] = (g, cid)
            src[mid] = cid
            tgt[mid] = comma_object_id(fun.dom.tgt[g], f2)
        identity[cid] = f"{fun.dom.identity[d]}@{cid}"

    compose: dict[tuple[str, str], str] = {}
    for m1, (g1, c1) in morphs.items():
        for m2, (g2, c2) in morphs.items():
            if tgt[m1] != c2:
                continue
            compose[(m2, m1)] = f"{fun.dom.compose[(g2, g1)]}@{c1}"

    cat = FinCategory(
        objects=frozenset(labels),
        morphisms=frozenset(morphs),
        src=src,
        tgt=tgt,
        identity=identity,
        compose=compose,
    )
    return cat, labels


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:  # path compression
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def blocks(self) -> dict[str, str]:
        """Map each item to the least identifier in its block."""
        rep: dict[str, str] = {}
        for x in self.parent:
            r = self.find(x)
            if r not in rep or x < rep[r]:
                rep[r] = x
        return {x: rep[self.find(x)] for x in self.parent}


def connected_components(cat: FinCategory) -> dict[str, str]:
    """Partition objects by zigzags of morphisms.

    Returns the map sending each object to its component representative,
    the least object identifier in the block.
    """
    uf = _UnionFind(cat.objects)
    for m in cat.morphisms:
        uf.union(cat.src[m], cat.tgt[m])
    return uf.blocks()


# ---------------------------------------------------------------------------
# Set-valued functor operations


def precompose(fun: SetFunctor, along: CatFunctor) -> SetFunctor:
    """Restrict a Set-valued functor along a functor into its base."""
    if along.cod != fun.base:
        raise BaseMismatch("functor codomain differs from the Set-valued functor base")
    return SetFunctor(
        base=along.dom,
        value={d: fun.value[along.omap[d]] for d in along.dom.objects},
        action={m: fun.action[along.mmap[m]] for m in along.dom.morphisms},
    )


def set_limit(fun: SetFunctor) -> LimitCone:
    """Limit of a Set-valued functor on a finite category.

    The apex is the set of all families, one element per object, that are
    compatible with every action; computed by enumerating the full
    product and filtering. Components are ordered by sorted object id.
    """
    order = tuple(sorted(fun.base.objects))
    index = {o: i for i, o in enumerate(order)}
    checks = [
        (index[fun.base.src[m]], index[fun.base.tgt[m]], fun.action[m])
        for m in fun.base.non_identities()
    ]
    apex = []
    pools = [sorted(fun.value[o]) for o in order]
    for tup in itertools.product(*pools):
        if all(act[tup[i]] == tup[j] for i, j, act in checks):
            apex.append(tup)
    legs = {o: {tup: tup[index[o]] for tup in apex} for o in order}
    return LimitCone(order=order, apex=frozenset(apex), legs=legs)


def natural_iso_check(
    left: SetFunctor, right: SetFunctor
) -> Optional[dict[str, dict[str, str]]]:
    """Search for a natural isomorphism between two Set-valued functors
    on the same base: a family of bijections commuting with every action.
    Returns the witness family, or None."""
    if left.base != right.base:
        raise BaseMismatch("natural isomorphism check needs a shared base category")
    objs = sorted(left.base.objects)
    if any(len(left.value[o]) != len(right.value[o]) for o in objs):
        return None
    touching: dict[str, list[str]] = {o: [] for o in objs}
    for m in left.base.non_identities():
        touching[left.base.src[m]].append(m)
        touching[left.base.tgt[m]].append(m)

    witness: dict[str, dict[str, str]] = {}

    def consistent(m: str) -> bool:
        s, t = left.base.src[m], left.base.tgt[m]
        if s not in witness or t not in witness:
            return True
        return all(
            witness[t][left.action[m][x]] == right.action[m][witness[s][x]]
            for x in left.value[s]
        )

    def extend(i: int) -> bool:
        if i == len(objs):
            return True
        o = objs[i]
        domain = sorted(left.value[o])
        for perm in itertools.permutations(sorted(right.value[o])):
            witness[o] = dict(zip(domain, perm))
            if all(consistent(m) for m in touching[o]) and extend(i + 1):
                return True
        del witness[o]
        return False

    return dict(witness) if extend(0) else None
