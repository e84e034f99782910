"""Exact sparse integer linear algebra: Smith normal form and chain homology.

All arithmetic is over Python integers, so intermediate entries may grow
without overflow.  The sparse eliminator prefers +-1 pivots (no coefficient
growth, no fraction) with a Markowitz-style fill tie-break, and falls back to
minimal-absolute-value pivoting on the residual core.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import gcd


class LinAlgError(ValueError):
    """Raised on dimension mismatches and non-chain inputs."""


@dataclass(frozen=True)
class HomologyGroup:
    """Finitely generated abelian group: free rank plus invariant factors > 1."""

    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise LinAlgError(f"torsion {self.torsion} is not a divisibility chain")
        if any(t <= 1 for t in self.torsion):
            raise LinAlgError("torsion factors must be > 1")

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self):
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


class IntMatrix:
    """Sparse integer matrix over triplets; no stored zeros, no duplicates."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        if entries:
            for (r, c), v in entries.items():
                self[r, c] = v

    def __setitem__(self, key, v):
        r, c = key
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise LinAlgError(f"index {key} out of bounds for {self.rows}x{self.cols}")
        if v:
            self.entries[r, c] = int(v)
        else:
            self.entries.pop((r, c), None)

    def __getitem__(self, key) -> int:
        return self.entries.get(key, 0)

    def add_at(self, r: int, c: int, v: int) -> None:
        self[r, c] = self.entries.get((r, c), 0) + v

    @property
    def nnz(self) -> int:
        return len(self.entries)

    @property
    def is_zero(self) -> bool:
        return not self.entries

    @classmethod
    def from_dense(cls, rows_list, rows: int | None = None, cols: int | None = None):
        rows_list = [list(r) for r in rows_list]
        m = len(rows_list) if rows is None else rows
        n = (len(rows_list[0]) if rows_list else 0) if cols is None else cols
        out = cls(m, n)
        for i, row in enumerate(rows_list):
            for j, v in enumerate(row):
                if v:
                    out[i, j] = int(v)
        return out

    def to_dense(self) -> list:
        dense = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            dense[r][c] = v
        return dense

    def transpose(self) -> "IntMatrix":
        out = IntMatrix(self.cols, self.rows)
        out.entries = {(c, r): v for (r, c), v in self.entries.items()}
        return out

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise LinAlgError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        by_col = {}
        for (r, c), v in other.entries.items():
            by_col.setdefault(c, []).append((r, v))
        left_by_col = {}
        for (r, c), v in self.entries.items():
            left_by_col.setdefault(c, []).append((r, v))
        out = IntMatrix(self.rows, other.cols)
        acc = {}
        for c, col in by_col.items():
            acc.clear()
            for k, v in col:
                for r, w in left_by_col.get(k, ()):
                    acc[r] = acc.get(r, 0) + w * v
            for r, v in acc.items():
                if v:
                    out.entries[r, c] = v
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def copy(self) -> "IntMatrix":
        out = IntMatrix(self.rows, self.cols)
        out.entries = dict(self.entries)
        return out

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz}"]
        for (r, c), v in sorted(self.entries.items()):
            lines.append(f"{r} {c} {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IntMatrix":
        lines = [l for l in text.splitlines() if l.strip()]
        if not lines:
            raise LinAlgError("empty matrix text")
        rows, cols, nnz = (int(t) for t in lines[0].split())
        if len(lines) - 1 != nnz:
            raise LinAlgError(f"matrix text declares {nnz} entries, has {len(lines) - 1}")
        out = cls(rows, cols)
        for line in lines[1:]:
            r, c, v = (int(t) for t in line.split())
            out.add_at(r, c, v)
        return out

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


def _normalize_factors(diag) -> tuple:
    """Fold a diagonal multiset into the d1 | d2 | ... divisibility chain."""
    factors = sorted(abs(d) for d in diag if d)
    hard = [d for d in factors if d != 1]
    changed = True
    while changed:
        changed = False
        for i in range(len(hard)):
            for j in range(i + 1, len(hard)):
                a, b = hard[i], hard[j]
                if b % a:
                    g = gcd(a, b)
                    hard[i], hard[j] = g, a * b // g
                    changed = True
        hard.sort()
    ones = len(factors) - len(hard)
    return tuple([1] * ones + hard)


def _snf_diagonal_sparse(A: IntMatrix) -> list:
    """Diagonal entries of an equivalent diagonal matrix (order arbitrary)."""
    rows = {}
    cols = {}
    for (r, c), v in A.entries.items():
        rows.setdefault(r, {})[c] = v
        cols.setdefault(c, set()).add(r)
    units = deque(k for k, v in A.entries.items() if abs(v) == 1)
    diag = []

    def row_sub(r2, r, q):
        """rows[r2] -= q * rows[r]; keep the column index in sync."""
        tgt = rows[r2]
        for c, v in rows[r].items():
            nv = tgt.get(c, 0) - q * v
            if nv:
                if c not in tgt:
                    cols.setdefault(c, set()).add(r2)
                tgt[c] = nv
                if abs(nv) == 1:
                    units.append((r2, c))
            elif c in tgt:
                del tgt[c]
                cols[c].discard(r2)
        if not tgt:
            del rows[r2]

    def drop(r, c):
        for c2 in rows[r]:
            if c2 != c:
                cols[c2].discard(r)
        del rows[r]
        cols.pop(c, None)

    def pick_unit():
        best = None
        tried = []
        for _ in range(min(len(units), 16)):
            r, c = units.popleft()
            v = rows.get(r, {}).get(c)
            if v is None or abs(v) != 1:
                continue
            cost = (len(rows[r]) - 1) * (len(cols[c]) - 1)
            tried.append((cost, r, c))
            if cost == 0:
                break
        if not tried:
            return None
        tried.sort()
        best = tried[0]
        for cost, r, c in tried[1:]:
            units.append((r, c))
        return best[1], best[2]

    while True:
        pos = None
        while units:
            pos = pick_unit()
            if pos:
                break
        if pos is None:
            # residual core: minimal |value| pivot, Euclidean reduction
            r0, c0, v0 = None, None, None
            for r, row in rows.items():
                for c, v in row.items():
                    if v0 is None or abs(v) < abs(v0):
                        r0, c0, v0 = r, c, v
            if v0 is None:
                break
            # clear the pivot column; remainders become smaller pivots next round
            while True:
                others = [r2 for r2 in cols[c0] if r2 != r0]
                if not others:
                    break
                for r2 in others:
                    q = rows[r2][c0] // v0
                    row_sub(r2, r0, q)
                rem = [r2 for r2 in cols[c0] if r2 != r0]
                if rem:  # nonzero remainders: switch pivot to a smaller entry
                    r0 = min(rem, key=lambda r2: abs(rows[r2][c0]))
                    v0 = rows[r0][c0]
                    continue
                break
            # clearing the pivot row only touches the pivot row now
            row = rows[r0]
            leftovers = {c: v % v0 for c, v in row.items() if c != c0 and v % v0}
            if leftovers:
                for c, v in list(row.items()):
                    if c == c0:
                        continue
                    rv = v % v0
                    if rv:
                        row[c] = rv
                        if abs(rv) == 1:
                            units.append((r0, c))
                    else:
                        del row[c]
                        cols[c].discard(r0)
                continue  # pivot row now holds smaller entries; re-pivot
            diag.append(v0)
            drop(r0, c0)
            continue
        r0, c0 = pos
        v0 = rows[r0][c0]
        for r2 in [r for r in cols[c0] if r != r0]:
            row_sub(r2, r0, rows[r2][c0] * v0)  # v0 = +-1 so q = entry * v0
        diag.append(v0)
        drop(r0, c0)
    return diag


def _snf_dense_transforms(A: IntMatrix):
    """Textbook SNF with accumulated unimodular transforms, for modest sizes.

    Maintains the invariant U0 * A * V0 = D for the original A, and enforces
    the divisibility chain inline by folding offending entries into the pivot.
    """
    m, n = A.rows, A.cols
    D = A.to_dense()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    t = 0
    while t < min(m, n):
        r0 = c0 = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best):
                    best, r0, c0 = abs(v), i, j
        if best is None:
            break
        if r0 != t:
            D[t], D[r0] = D[r0], D[t]
            U[t], U[r0] = U[r0], U[t]
        if c0 != t:
            for row in D:
                row[t], row[c0] = row[c0], row[t]
            for row in V:
                row[t], row[c0] = row[c0], row[t]
        dirty = False
        p = D[t][t]
        for i in range(t + 1, m):
            if D[i][t]:
                q = D[i][t] // p
                if q:
                    for j in range(t, n):
                        D[i][j] -= q * D[t][j]
                    for j in range(m):
                        U[i][j] -= q * U[t][j]
                if D[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if D[t][j]:
                q = D[t][j] // p
                if q:
                    for i in range(t, m):
                        D[i][j] -= q * D[i][t]
                    for i in range(n):
                        V[i][j] -= q * V[i][t]
                if D[t][j]:
                    dirty = True
        if dirty:
            continue
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if D[i][j] % p:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            for j in range(t, n):
                D[t][j] += D[offender][j]
            for j in range(m):
                U[t][j] += U[offender][j]
            continue
        if p < 0:
            for j in range(t, n):
                D[t][j] = -D[t][j]
            for j in range(m):
                U[t][j] = -U[t][j]
        t += 1
    return D, U, V


@dataclass(frozen=True)
class SmithForm:
    """Invariant factors d1 | d2 | ... (nonzero); transforms optional."""

    factors: tuple
    U: list | None = None
    V: list | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)

    @property
    def torsion(self) -> tuple:
        return tuple(f for f in self.factors if f != 1)


def smith_normal_form(A: IntMatrix, transforms: bool = False) -> SmithForm:
    if not transforms:
        return SmithForm(factors=_normalize_factors(_snf_diagonal_sparse(A)))
    D, U, V = _snf_dense_transforms(A)
    diag = [D[i][i] for i in range(min(A.rows, A.cols))]
    factors = tuple(abs(d) for d in diag if d)
    for a, b in zip(factors, factors[1:]):
        if b % a:
            raise LinAlgError("internal: transform SNF missed divisibility")
    return SmithForm(factors=factors, U=U, V=V)


def matrix_rank(A: IntMatrix) -> int:
    return smith_normal_form(A).rank


def rank_fraction_free(A: IntMatrix) -> int:
    """Rank over Q by Bareiss fraction-free elimination (dense; cross-check use)."""
    M = A.to_dense()
    m, n = A.rows, A.cols
    rank = 0
    prev = 1
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, m):
            if M[r][col]:
                piv = r
                break
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        for r in range(row + 1, m):
            for c in range(col + 1, n):
                M[r][c] = (M[row][col] * M[r][c] - M[r][col] * M[row][c]) // prev
            M[r][col] = 0
        prev = M[row][col]
        rank += 1
        row += 1
        if row == m:
            break
    return rank


def chain_homology(d_out: IntMatrix, d_in: IntMatrix) -> HomologyGroup:
    """Structure of ker(d_out)/im(d_in) for a two-step chain spot C2 -> C1 -> C0."""
    if d_out.cols != d_in.rows:
        raise LinAlgError(
            f"chain dimension mismatch: d_out has {d_out.cols} columns, d_in has {d_in.rows} rows")
    composite = d_out.matmul(d_in)
    if not composite.is_zero:
        (r, c), v = next(iter(sorted(composite.entries.items())))
        raise LinAlgError(f"d_out . d_in != 0: entry ({r},{c}) = {v}")
    snf_in = smith_normal_form(d_in)
    rank_out = matrix_rank(d_out)
    free = d_in.rows - rank_out - snf_in.rank
    if free < 0:
        raise LinAlgError("negative free rank; input is not a chain spot")
    return HomologyGroup(free_rank=free, torsion=snf_in.torsion)


def zero_matrix(rows: int, cols: int) -> IntMatrix:
    return IntMatrix(rows, cols)


def identity_matrix(n: int) -> IntMatrix:
    out = IntMatrix(n, n)
    for i in range(n):
        out[i, i] = 1
    return out
