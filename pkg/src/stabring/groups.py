"""Finite groups as validated Cayley tables over dense 0-based element indices."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class GroupError(ValueError):
    """Raised when a group spec fails validation."""


def _as_table(rows, order: int) -> np.ndarray:
    table = np.asarray(rows, dtype=np.int64)
    if table.shape != (order, order):
        raise GroupError(f"Cayley table must be {order}x{order}, got {table.shape}")
    if table.min() < 0 or table.max() >= order:
        raise GroupError("Cayley table entries must be element indices in [0, order)")
    return table


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group; element 0 is the identity, all arithmetic is table lookup.

    Instances are immutable after validation and safe to share across workers.
    """

    order: int
    table: np.ndarray
    inverse: np.ndarray
    name: str = "G"

    identity: int = 0

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def conjugate(self, x: int, y: int) -> int:
        """x^y := y^-1 x y."""
        t = self.table
        return int(t[t[self.inverse[y], x], y])

    def commutator(self, x: int, y: int) -> int:
        """[x, y] := x y x^-1 y^-1."""
        t = self.table
        return int(t[t[t[x, y], self.inverse[x]], self.inverse[y]])

    def prod(self, elems) -> int:
        acc = self.identity
        for e in elems:
            acc = int(self.table[acc, e])
        return acc

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def hash(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.order).encode())
        h.update(self.table.astype(np.int64).tobytes())
        return h.hexdigest()

    def elements(self) -> range:
        return range(self.order)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def _validate(table: np.ndarray, name: str) -> FiniteGroup:
    order = table.shape[0]
    if not (np.array_equal(table[0], np.arange(order)) and np.array_equal(table[:, 0], np.arange(order))):
        raise GroupError("element 0 must act as the identity")
    # associativity: table[table[a,b],c] == table[a,table[b,c]] for all triples
    left = table[table, :]
    right = table[:, table]
    if not np.array_equal(left, right):
        a, b, c = (int(i) for i in np.argwhere(left != right)[0])
        raise GroupError(f"table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")
    inverse = np.full(order, -1, dtype=np.int64)
    for a in range(order):
        hits = np.flatnonzero(table[a] == 0)
        if len(hits) != 1 or table[hits[0], a] != 0:
            raise GroupError(f"element {a} has no two-sided inverse")
        inverse[a] = hits[0]
    return FiniteGroup(order=order, table=table, inverse=inverse, name=name)


def cyclic_group(k: int) -> FiniteGroup:
    if k < 1:
        raise GroupError("cyclic order must be >= 1")
    idx = np.arange(k)
    return _validate((idx[:, None] + idx[None, :]) % k, f"C{k}")


def product_group(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Direct product; index (a, b) packs to a * |G2| + b, so identity stays 0."""
    n1, n2 = g1.order, g2.order
    a1, b1 = np.divmod(np.arange(n1 * n2), n2)
    t1 = g1.table[np.ix_(a1, a1)]
    t2 = g2.table[np.ix_(b1, b1)]
    return _validate(t1 * n2 + t2, f"{g1.name}x{g2.name}")


def _perm_from_cycles(cycles, degree: int) -> tuple:
    img = list(range(degree))
    for cyc in cycles:
        pts = [p - 1 for p in cyc]
        if len(set(pts)) != len(pts) or min(pts) < 0 or max(pts) >= degree:
            raise GroupError(f"bad cycle {cyc} for degree {degree}")
        for i, p in enumerate(pts):
            img[p] = pts[(i + 1) % len(pts)]
    return tuple(img)


def perm_group(generators, order_cap: int = 4096) -> FiniteGroup:
    """Close permutation generators (cycle notation on {1..m}) under products."""
    degree = max((p for perm in generators for cyc in perm for p in cyc), default=1)
    gens = [_perm_from_cycles(cycs, degree) for cycs in generators]
    identity = tuple(range(degree))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(degree))
                if q not in seen:
                    if len(seen) >= order_cap:
                        raise GroupError(f"permutation closure exceeds order cap {order_cap}")
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    elems = sorted(seen)  # identity is the lexicographic minimum
    index = {p: i for i, p in enumerate(elems)}
    n = len(elems)
    table = np.zeros((n, n), dtype=np.int64)
    for i, p in enumerate(elems):
        for j, q in enumerate(elems):
            table[i, j] = index[tuple(q[p[k]] for k in range(degree))]
    return _validate(table, f"Perm{n}")


def load_group(spec: dict, order_cap: int = 4096) -> FiniteGroup:
    """Build a validated group from a spec document.

    Kinds: "cayley" (row-major table), "cyclic" (order), "product" (factors),
    "perm" (generators as cycle lists on {1..m}).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise GroupError("group spec must be a mapping with a 'kind' field")
    kind = spec["kind"]
    if kind == "cyclic":
        return cyclic_group(int(spec["order"]))
    if kind == "product":
        factors = [load_group(f, order_cap) for f in spec["factors"]]
        if not factors:
            raise GroupError("product needs at least one factor")
        g = factors[0]
        for h in factors[1:]:
            g = product_group(g, h)
        return g
    if kind == "perm":
        return perm_group(spec["generators"], order_cap)
    if kind == "cayley":
        rows = spec["table"]
        order = len(rows)
        g = _validate(_as_table(rows, order), spec.get("name", f"Cayley{order}"))
        return g
    raise GroupError(f"unknown group spec kind {kind!r}")


def subgroup_closure(G: FiniteGroup, gens) -> frozenset:
    """Subgroup generated by gens, as a frozenset of element indices."""
    seen = {G.identity}
    frontier = list(set(gens) - seen)
    seen.update(frontier)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(seen):
                for c in (G.mul(a, b), G.mul(b, a)):
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(seen)


@dataclass(frozen=True)
class Subgroup:
    elements: tuple
    group: FiniteGroup  # the restricted group on re-indexed elements


@dataclass(frozen=True)
class SubgroupList:
    subgroups: tuple

    def __len__(self) -> int:
        return len(self.subgroups)

    def orders(self) -> list:
        return [len(s.elements) for s in self.subgroups]


def _restrict(G: FiniteGroup, elems: tuple) -> FiniteGroup:
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    table = np.zeros((n, n), dtype=np.int64)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            table[i, j] = index[G.mul(a, b)]
    return _validate(table, f"{G.name}|{{{','.join(map(str, elems))}}}")


def enumerate_subgroups(G: FiniteGroup, order_cap: int = 16) -> SubgroupList:
    """All subgroups, each tagged with its re-indexed Cayley table.

    Grows closures one generator at a time, so every subgroup is reached.
    """
    if G.order > order_cap:
        raise GroupError(f"subgroup enumeration capped at order {order_cap}, group has {G.order}")
    found = {frozenset({G.identity})}
    frontier = [frozenset({G.identity})]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G.elements():
                if g in H:
                    continue
                K = subgroup_closure(G, set(H) | {g})
                if K not in found:
                    found.add(K)
                    nxt.append(K)
        frontier = nxt
    subs = []
    for H in sorted(found, key=lambda s: (len(s), tuple(sorted(s)))):
        elems = tuple(sorted(H))
        subs.append(Subgroup(elements=elems, group=_restrict(G, elems)))
    return SubgroupList(subgroups=tuple(subs))
