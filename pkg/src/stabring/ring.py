"""The graded ring of connected components: orbit bases, concatenation
product, the degree-raising operator U, and the stability profile."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup
from .orbits import enumerate_orbits
from .words import compile_moves, moveset_hash


class RingError(ValueError):
    """Raised on degree overflow or mismatched bases."""


@dataclass(frozen=True)
class RingElement:
    """Integer vector over the orbit basis of one graded piece."""

    degree: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def __add__(self, other: "RingElement") -> "RingElement":
        if self.degree != other.degree or len(self.coeffs) != len(other.coeffs):
            raise RingError("cannot add elements of different degrees")
        return RingElement(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, k: int) -> "RingElement":
        return RingElement(self.degree, tuple(k * c for c in self.coeffs))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


@dataclass(frozen=True)
class StabilityProfile:
    """Observed degree invariants of U on the ring, within the computed window."""

    counts: tuple             # |R_n| for n = 0..n_max
    u_injective: tuple        # per step n -> n+1, n = 0..n_max-1
    u_surjective: tuple       # per step n -> n+1
    deg_u: int                # always 1, carried symbolically
    deg_r_u: int              # last n with ker(U: R_n -> R_{n+1}) != 0, or -1
    deg_rbar: int             # last n with R_n / U(R_{n-1}) != 0 (always >= 0)
    a_r: int                  # A(R) = max(deg_r_u, deg_rbar)
    a_tilde_r: int            # max(deg_u, deg_r_u, deg_rbar)
    stable_within_window: bool

    @property
    def u_bijective(self) -> tuple:
        return tuple(i and s for i, s in zip(self.u_injective, self.u_surjective))


class GradedRing:
    """R = (+)_n Z<G^2n / moves>, product by concatenation of representatives."""

    def __init__(self, G: FiniteGroup, n_max: int, tables: list, moves_by_degree: dict):
        if len(tables) != n_max + 1:
            raise RingError("need one orbit table per degree 0..n_max")
        self.G = G
        self.n_max = n_max
        self.tables = tables
        self.moves_by_degree = moves_by_degree
        self._mult_memo = {}
        self._u_maps = {}

    # -- basis bookkeeping ------------------------------------------------

    def basis_size(self, n: int) -> int:
        return self.tables[n].count

    @property
    def counts(self) -> tuple:
        return tuple(t.count for t in self.tables)

    def class_index(self, n: int, entries) -> int:
        if len(entries) != 2 * n:
            raise RingError(f"tuple length {len(entries)} != 2n = {2 * n}")
        return self.tables[n].class_of(entries)

    def rep(self, n: int, idx: int) -> tuple:
        return self.tables[n].rep_tuple(idx)

    def basis_element(self, n: int, idx: int) -> RingElement:
        coeffs = [0] * self.basis_size(n)
        coeffs[idx] = 1
        return RingElement(n, tuple(coeffs))

    def unit(self) -> RingElement:
        return self.basis_element(0, 0)

    def element_from_tuple(self, entries) -> RingElement:
        n = len(entries) // 2
        return self.basis_element(n, self.class_index(n, entries))

    # -- product and U ----------------------------------------------------

    def mult_basis(self, m: int, i: int, n: int, j: int) -> int:
        """Index of [rep_i ++ rep_j] in the degree m+n basis."""
        if m + n > self.n_max:
            raise RingError(f"product degree {m + n} exceeds computed window {self.n_max}")
        key = (m, i, n, j)
        out = self._mult_memo.get(key)
        if out is None:
            out = self.class_index(m + n, self.rep(m, i) + self.rep(n, j))
            self._mult_memo[key] = out
        return out

    def multiply(self, x: RingElement, y: RingElement) -> RingElement:
        m, n = x.degree, y.degree
        if m + n > self.n_max:
            raise RingError(f"product degree {m + n} exceeds computed window {self.n_max}")
        coeffs = [0] * self.basis_size(m + n)
        for i, a in enumerate(x.coeffs):
            if not a:
                continue
            for j, b in enumerate(y.coeffs):
                if b:
                    coeffs[self.mult_basis(m, i, n, j)] += a * b
        return RingElement(m + n, tuple(coeffs))

    def u_index(self, n: int, i: int) -> int:
        """Class of (1, 1) ++ rep_i, i.e. the U image of basis element i."""
        if n + 1 > self.n_max:
            raise RingError(f"U target degree {n + 1} exceeds computed window {self.n_max}")
        return self.class_index(n + 1, (self.G.identity, self.G.identity) + self.rep(n, i))

    def u_map(self, n: int) -> np.ndarray:
        out = self._u_maps.get(n)
        if out is None:
            out = np.array([self.u_index(n, i) for i in range(self.basis_size(n))],
                           dtype=np.int64)
            self._u_maps[n] = out
        return out

    def apply_U(self, x: RingElement) -> RingElement:
        umap = self.u_map(x.degree)
        coeffs = [0] * self.basis_size(x.degree + 1)
        for i, a in enumerate(x.coeffs):
            if a:
                coeffs[umap[i]] += a
        return RingElement(x.degree + 1, tuple(coeffs))

    # -- stability --------------------------------------------------------

    def stability_profile(self) -> StabilityProfile:
        counts = self.counts
        inj, surj = [], []
        for n in range(self.n_max):
            umap = self.u_map(n)
            inj.append(len(np.unique(umap)) == len(umap))
            surj.append(len(np.unique(umap)) == counts[n + 1])
        deg_r_u = max((n for n in range(self.n_max) if not inj[n]), default=-1)
        deg_rbar = max(n for n in range(self.n_max + 1)
                       if n == 0 or not surj[n - 1])
        a_r = max(deg_r_u, deg_rbar)
        stable = (self.n_max >= 2
                  and counts[self.n_max] == counts[self.n_max - 1]
                  and inj[self.n_max - 1] and surj[self.n_max - 1]
                  and inj[self.n_max - 2] and surj[self.n_max - 2])
        return StabilityProfile(
            counts=counts, u_injective=tuple(inj), u_surjective=tuple(surj),
            deg_u=1, deg_r_u=deg_r_u, deg_rbar=deg_rbar,
            a_r=a_r, a_tilde_r=max(1, a_r), stable_within_window=stable)

    def moveset_hash_for(self, n: int) -> str:
        return moveset_hash(self.moves_by_degree.get(n, ()))

    def summary(self) -> dict:
        prof = self.stability_profile()
        return {
            "group": self.G.name,
            "group_hash": self.G.hash(),
            "n_max": self.n_max,
            "counts": list(prof.counts),
            "u_maps": {str(n): [int(i) for i in self.u_map(n)] for n in range(self.n_max)},
            "deg_u": prof.deg_u,
            "deg_r_u": prof.deg_r_u,
            "deg_rbar": prof.deg_rbar,
            "a_r": prof.a_r,
            "a_tilde_r": prof.a_tilde_r,
            "stable_within_window": prof.stable_within_window,
            "moveset_hashes": {str(n): self.moveset_hash_for(n) for n in range(1, self.n_max + 1)},
        }


def build_ring(G: FiniteGroup, n_max: int, depth: int = 2, state_cap: int = 2 ** 32,
               backend: str | None = None, tables: dict | None = None) -> GradedRing:
    """Assemble the graded ring up to degree n_max.

    ``tables`` may supply precomputed orbit tables per degree (cache path);
    missing degrees are enumerated here.
    """
    if n_max < 1:
        raise RingError("n_max must be >= 1")
    table_list = []
    moves_by_degree = {}
    for n in range(n_max + 1):
        moves = compile_moves(n, G, depth) if n > 0 else ()
        moves_by_degree[n] = moves
        got = tables.get(n) if tables else None
        if got is not None:
            if got.group_hash != G.hash() or got.n != n:
                raise RingError(f"supplied orbit table for degree {n} does not match the group")
            if n > 0 and got.moveset_hash != moveset_hash(moves):
                raise RingError(f"supplied orbit table for degree {n} has a different move set")
            table_list.append(got)
        else:
            table_list.append(enumerate_orbits(G, n, moves, state_cap, backend))
    return GradedRing(G, n_max, table_list, moves_by_degree)
