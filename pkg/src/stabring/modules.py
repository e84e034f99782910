"""Graded modules over the connected-component ring, presented degreewise by
free components and generator-multiplication matrices, plus the derived
constructions and degree-bound battery built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ring import GradedRing
from .zlinalg import HomologyGroup, IntMatrix, chain_homology, smith_normal_form, zero_matrix


class ModuleError(ValueError):
    """Raised on budget violations and inconsistent module data."""


def _pairs(G):
    return [(a, b) for a in range(G.order) for b in range(G.order)]


@dataclass
class GradedModule:
    """Degreewise-free graded module; the action of a degree-1 class (a, b) on
    the degree-n component is the integer matrix lam[(a, b)][n].

    side "left": matrices realize m -> [a,b] m; side "right": m -> m [a,b].
    Components above n_max are unknown, not zero.
    """

    name: str
    ring: GradedRing
    side: str
    ranks: tuple
    lam: dict
    n_max: int

    def rank(self, n: int) -> int:
        if n < 0:
            return 0
        if n > self.n_max:
            raise ModuleError(f"degree {n} beyond module window {self.n_max}")
        return self.ranks[n]

    def act(self, pair, n: int) -> np.ndarray:
        """Matrix of the (a, b) action M_n -> M_{n+1}."""
        if not 0 <= n < self.n_max + 1 or n + 1 > self.n_max:
            raise ModuleError(f"action at degree {n} beyond window {self.n_max}")
        return self.lam[pair][n]

    def u_matrix(self, n: int) -> np.ndarray:
        ident = self.ring.G.identity
        return self.act((ident, ident), n)

    def act_class(self, deg: int, ring_idx: int, n: int) -> np.ndarray:
        """Matrix of multiplication by the degree-``deg`` basis class, M_n -> M_{n+deg}."""
        if n + deg > self.n_max:
            raise ModuleError(f"class action lands beyond window {self.n_max}")
        mat = np.eye(self.ranks[n], dtype=np.int64)
        rep = self.ring.rep(deg, ring_idx)
        pairs = [(rep[2 * i], rep[2 * i + 1]) for i in range(deg)]
        cur = n
        order = reversed(pairs) if self.side == "left" else iter(pairs)
        for pair in order:
            mat = self.act(pair, cur) @ mat
            cur += 1
        return mat

    def consistency_failures(self) -> list:
        """Degree-2 orbit relations violated by the lambda maps (empty when sound)."""
        ring = self.ring
        if ring.n_max < 2:
            raise ModuleError("consistency check needs ring degree >= 2")
        G = ring.G
        by_class = {}
        for a in range(G.order):
            for b in range(G.order):
                for c in range(G.order):
                    for d in range(G.order):
                        cls = ring.class_index(2, (a, b, c, d))
                        by_class.setdefault(cls, []).append((a, b, c, d))
        bad = []
        for n in range(self.n_max - 1):
            for cls, members in by_class.items():
                ref = None
                for (a, b, c, d) in members:
                    if self.side == "left":
                        comp = self.act((a, b), n + 1) @ self.act((c, d), n)
                    else:
                        comp = self.act((c, d), n + 1) @ self.act((a, b), n)
                    if ref is None:
                        ref = comp
                    elif not np.array_equal(ref, comp):
                        bad.append((n, cls, (a, b, c, d)))
                        break
        return bad


def regular_module(ring: GradedRing, side: str = "left", name: str | None = None) -> GradedModule:
    """R itself; every lambda sends a basis class to a single basis class."""
    G = ring.G
    ranks = tuple(ring.basis_size(n) for n in range(ring.n_max + 1))
    lam = {}
    for pair in _pairs(G):
        mats = []
        for n in range(ring.n_max):
            mat = np.zeros((ranks[n + 1], ranks[n]), dtype=np.int64)
            for j in range(ranks[n]):
                rep = ring.rep(n, j)
                tup = (pair + rep) if side == "left" else (rep + pair)
                mat[ring.class_index(n + 1, tup), j] = 1
            mats.append(mat)
        lam[pair] = mats
    return GradedModule(name or "R", ring, side, ranks, lam, ring.n_max)


def z_module(ring: GradedRing, side: str = "left") -> GradedModule:
    """Z = R / R_{>0}, concentrated in degree 0 with the zero action."""
    ranks = tuple([1] + [0] * ring.n_max)
    lam = {}
    for pair in _pairs(ring.G):
        lam[pair] = [np.zeros((ranks[n + 1], ranks[n]), dtype=np.int64)
                     for n in range(ring.n_max)]
    return GradedModule("Z", ring, side, ranks, lam, ring.n_max)


def shift_module(M: GradedModule, p: int) -> GradedModule:
    """M[p] with (M[p])_n = M_{n-p}."""
    if p < 0:
        raise ModuleError("shift amount must be >= 0")
    ranks = tuple([0] * p + list(M.ranks))[:M.n_max + 1]
    lam = {}
    for pair, mats in M.lam.items():
        shifted = []
        for n in range(M.n_max):
            if n < p or n - p >= len(mats):
                shifted.append(np.zeros((ranks[n + 1] if n + 1 <= M.n_max else 0,
                                         ranks[n]), dtype=np.int64))
            else:
                shifted.append(mats[n - p])
        lam[pair] = shifted
    return GradedModule(f"{M.name}[{p}]", M.ring, M.side, ranks, lam, M.n_max)


def truncate_module(M: GradedModule, k: int) -> GradedModule:
    """Quotient truncation: components above degree k become zero."""
    ranks = tuple(r if n <= k else 0 for n, r in enumerate(M.ranks))
    lam = {}
    for pair, mats in M.lam.items():
        lam[pair] = [mats[n] if n + 1 <= k else np.zeros((ranks[n + 1], ranks[n]), dtype=np.int64)
                     for n in range(M.n_max)]
    return GradedModule(f"{M.name}<= {k}", M.ring, M.side, ranks, lam, M.n_max)


def _monomial_image_rows(u: np.ndarray) -> set | None:
    """Rows spanned by the columns of a basis-to-basis (or zero) matrix."""
    rows = set()
    for j in range(u.shape[1]):
        nz = np.flatnonzero(u[:, j])
        if len(nz) == 0:
            continue
        if len(nz) > 1 or abs(int(u[nz[0], j])) != 1:
            return None
        rows.add(int(nz[0]))
    return rows


def quotient_u_module(M: GradedModule) -> GradedModule:
    """M / UM, for modules whose U action is monomial (basis to basis or zero)."""
    kept = [list(range(M.ranks[0]))]
    for n in range(1, M.n_max + 1):
        hit = _monomial_image_rows(M.u_matrix(n - 1))
        if hit is None:
            raise ModuleError(f"{M.name}: U action at degree {n - 1} is not monomial; "
                              "quotient would need a torsion presentation")
        kept.append([r for r in range(M.ranks[n]) if r not in hit])
    ranks = tuple(len(k) for k in kept)
    lam = {}
    for pair, mats in M.lam.items():
        lam[pair] = [mats[n][np.ix_(kept[n + 1], kept[n])] for n in range(M.n_max)]
    name = "Rbar" if M.name == "R" else f"{M.name}/U"
    return GradedModule(name, M.ring, M.side, ranks, lam, M.n_max)


def u_kernel_module(M: GradedModule) -> GradedModule:
    """M[U] = ker(U), for monomial U; basis vectors are fiber differences.

    The window shrinks by one degree: the kernel at the top degree would need
    the U map out of it.
    """
    n_top = M.n_max - 1
    fibers = []
    for n in range(n_top + 1):
        u = M.u_matrix(n)
        img_of = {}
        for j in range(M.ranks[n]):
            nz = np.flatnonzero(u[:, j])
            if len(nz) != 1 or abs(int(u[nz[0], j])) != 1:
                if len(nz) == 0:
                    raise ModuleError(f"{M.name}: U kills a basis vector; "
                                      "kernel basis needs the general presentation")
                raise ModuleError(f"{M.name}: U action is not monomial")
            img_of[j] = int(nz[0])
        by_img = {}
        for j, r in img_of.items():
            by_img.setdefault(r, []).append(j)
        basis = []   # (j, rep_j) with j != rep_j
        rep_of = {}
        for r, js in sorted(by_img.items()):
            rep = min(js)
            for j in js:
                rep_of[j] = rep
                if j != rep:
                    basis.append((j, rep))
        fibers.append((basis, rep_of, {j: i for i, (j, _) in enumerate(basis)}))
    ranks = tuple(len(fibers[n][0]) for n in range(n_top + 1))
    lam = {}
    for pair, mats in M.lam.items():
        out = []
        for n in range(n_top):
            basis_n, _, _ = fibers[n]
            _, rep_next, pos_next = fibers[n + 1]
            mat = np.zeros((ranks[n + 1], ranks[n]), dtype=np.int64)
            lam_n = mats[n]
            for col, (j, rep) in enumerate(basis_n):
                image = {}
                for src, sign in ((j, 1), (rep, -1)):
                    for tgt in np.flatnonzero(lam_n[:, src]):
                        tgt = int(tgt)
                        image[tgt] = image.get(tgt, 0) + sign * int(lam_n[tgt, src])
                # rewrite in the difference basis e_x - e_rep(x): valid iff the
                # image sums to zero over every fiber
                fiber_sums = {}
                for tgt, coef in image.items():
                    fiber_sums[rep_next[tgt]] = fiber_sums.get(rep_next[tgt], 0) + coef
                if any(fiber_sums.values()):
                    raise ModuleError(f"{M.name}: kernel image escapes the difference basis")
                for tgt, coef in image.items():
                    if coef and rep_next[tgt] != tgt:
                        mat[pos_next[tgt], col] += coef
            out.append(mat)
        lam[pair] = out
    name = "R[U]" if M.name == "R" else f"{M.name}[U]"
    return GradedModule(name, M.ring, M.side, ranks, lam, n_top)


def ur_ideal_module(ring: GradedRing, side: str = "left") -> GradedModule:
    """U(R) as a module: degree-n basis = distinct U images inside R_n."""
    bases = [[]]
    for n in range(1, ring.n_max + 1):
        bases.append(sorted(set(int(i) for i in ring.u_map(n - 1))))
    ranks = tuple(len(b) for b in bases)
    pos = [{r: i for i, r in enumerate(b)} for b in bases]
    lam = {}
    for pair in _pairs(ring.G):
        mats = []
        for n in range(ring.n_max):
            mat = np.zeros((ranks[n + 1], ranks[n]), dtype=np.int64)
            for j, r_idx in enumerate(bases[n]):
                rep = ring.rep(n, r_idx)
                tup = (pair + rep) if side == "left" else (rep + pair)
                tgt = ring.class_index(n + 1, tup)
                mat[pos[n + 1][tgt], j] = 1
            mats.append(mat)
        lam[pair] = mats
    mod = GradedModule("UR", ring, side, ranks, lam, ring.n_max)
    mod.r_indices = bases  # R-basis index behind each UR basis vector
    return mod


def derive_module(ring: GradedRing, recipe) -> GradedModule:
    """Left modules from the standard recipes: ("R",), ("Rbar",), ("RU",),
    ("shift", p), ("trunc", k), ("quotient_U",)."""
    kind = recipe[0]
    if kind == "R":
        return regular_module(ring)
    if kind in ("Rbar", "quotient_U"):
        return quotient_u_module(regular_module(ring))
    if kind == "RU":
        return u_kernel_module(regular_module(ring))
    if kind == "shift":
        return shift_module(regular_module(ring), recipe[1])
    if kind == "trunc":
        return truncate_module(regular_module(ring), recipe[1])
    raise ModuleError(f"unknown module recipe {recipe!r}")


# -- tensor, H0/H1, and the degree battery ---------------------------------


def _gen_offsets(N: GradedModule, M: GradedModule, n: int, min_i: int = 0):
    """Generators of (+)_{i+k=n} N_i x M_k with i >= min_i; returns offsets."""
    offsets = {}
    dim = 0
    for i in range(min_i, n + 1):
        k = n - i
        size = N.rank(i) * M.rank(k)
        offsets[i] = dim
        dim += size
    return offsets, dim


def _tensor_presentation(N: GradedModule, M: GradedModule, n: int, min_i: int = 0):
    """Relation matrix of the degree-n piece of N (x)_R M.

    Generators u (x) m over splits i + k = n (i >= min_i); relations move one
    degree-1 class across the tensor sign: (u . [a,b]) (x) m - u (x) ([a,b] m).
    """
    if N.side != "right" or M.side != "left":
        raise ModuleError("tensor needs a right module and a left module")
    G = N.ring.G
    offsets, dim = _gen_offsets(N, M, n, min_i)
    rel_cols = []
    for i in range(min_i, n):
        k = n - 1 - i
        if N.rank(i) == 0 or M.rank(k) == 0:
            continue
        for pair in _pairs(G):
            rho = N.act(pair, i)       # N_i -> N_{i+1}
            lamk = M.act(pair, k)      # M_k -> M_{k+1}
            for u in range(N.rank(i)):
                for m in range(M.rank(k)):
                    col = {}
                    base_hi = offsets[i + 1]
                    for u2 in np.flatnonzero(rho[:, u]):
                        col[base_hi + int(u2) * M.rank(n - i - 1) + m] = int(rho[u2, u])
                    base_lo = offsets[i]
                    for m2 in np.flatnonzero(lamk[:, m]):
                        idx = base_lo + u * M.rank(k + 1) + int(m2)
                        col[idx] = col.get(idx, 0) - int(lamk[m2, m])
                    rel_cols.append(col)
    rel = IntMatrix(dim, len(rel_cols))
    for c, col in enumerate(rel_cols):
        for r, v in col.items():
            if v:
                rel.add_at(r, c, v)
    return offsets, dim, rel


def graded_tensor(N: GradedModule, M: GradedModule) -> list:
    """(N (x)_R M)_n as abelian groups, degree by degree within the window."""
    budget = min(N.n_max, M.n_max)
    out = []
    for n in range(budget + 1):
        _, dim, rel = _tensor_presentation(N, M, n)
        out.append(chain_homology(zero_matrix(0, dim), rel))
    return out


def h0(M: GradedModule) -> list:
    """H0(M) = M / R_{>0} M degreewise: coker of all degree-1 actions.

    Works for either side; the act matrices already encode the side.
    """
    G = M.ring.G
    out = []
    for n in range(M.n_max + 1):
        rows = M.rank(n)
        if n == 0:
            out.append(HomologyGroup(free_rank=rows))
            continue
        cols = len(_pairs(G)) * M.rank(n - 1)
        stack = IntMatrix(rows, cols)
        for p_i, pair in enumerate(_pairs(G)):
            mat = M.act(pair, n - 1)
            base = p_i * M.rank(n - 1)
            for (r, c) in zip(*np.nonzero(mat)):
                stack.add_at(int(r), base + int(c), int(mat[r, c]))
        out.append(chain_homology(zero_matrix(0, rows), stack))
    return out


def _beta_matrix(N: GradedModule, M: GradedModule, n: int, min_i: int,
                 r_index_of=None) -> IntMatrix:
    """beta: (N (x)_R M)_n -> M_n sending u (x) m to (class behind u) . m."""
    offsets, dim = _gen_offsets(N, M, n, min_i)
    beta = IntMatrix(M.rank(n), dim)
    for i in range(min_i, n + 1):
        k = n - i
        if N.rank(i) == 0 or M.rank(k) == 0:
            continue
        for u in range(N.rank(i)):
            ring_idx = r_index_of(i, u) if r_index_of else u
            action = M.act_class(i, ring_idx, k)  # M_k -> M_n
            for m in range(M.rank(k)):
                col = offsets[i] + u * M.rank(k) + m
                for r in np.flatnonzero(action[:, m]):
                    beta.add_at(int(r), col, int(action[r, m]))
    return beta


def h1(M: GradedModule) -> list:
    """H1(M) = ker(beta: R_{>0} (x)_R M -> M) degreewise."""
    ring = M.ring
    rplus = regular_module(ring, side="right", name="R>0")
    out = []
    for n in range(M.n_max + 1):
        _, dim, rel = _tensor_presentation(rplus, M, n, min_i=1)
        beta = _beta_matrix(rplus, M, n, min_i=1)
        out.append(chain_homology(beta, rel))
    return out


def h0_h1(M: GradedModule) -> tuple:
    return h0(M), h1(M)


def deg_of(groups: list) -> int:
    """Top degree with a nonzero group; -1 when all vanish."""
    return max((n for n, g in enumerate(groups) if not g.is_zero), default=-1)


def module_deg(M: GradedModule) -> int:
    return max((n for n in range(M.n_max + 1) if M.rank(n)), default=-1)


@dataclass(frozen=True)
class DeltaBounds:
    tor0: tuple            # M/UM degreewise
    tor1: tuple            # ker(U(R) (x) M -> M) degreewise
    delta: int
    deg_m_u: int           # deg ker(U on M)
    deg_m_mod_u: int       # deg coker(U on M)
    a_m: int
    a_bound_ok: bool
    tensor_bound_ok: bool


def delta_and_bounds(M: GradedModule) -> DeltaBounds:
    """delta(M), A(M), and the two degree-bound verdicts, within the window."""
    ring = M.ring
    # tor0 = M/UM: coker of U degreewise (degree 0 piece is M_0 itself)
    tor0 = []
    deg_m_u = -1
    for n in range(M.n_max + 1):
        if n == 0:
            tor0.append(HomologyGroup(free_rank=M.rank(0)))
        else:
            u = M.u_matrix(n - 1)
            mat = IntMatrix.from_dense(u.tolist(), rows=M.rank(n), cols=M.rank(n - 1))
            tor0.append(chain_homology(zero_matrix(0, M.rank(n)), mat))
    for n in range(M.n_max):
        u = M.u_matrix(n)
        mat = IntMatrix.from_dense(u.tolist(), rows=M.rank(n + 1), cols=M.rank(n))
        if smith_normal_form(mat).rank < M.rank(n):
            deg_m_u = n
    # tor1 = ker(U(R) (x)_R M -> M) via the four-term exact sequence
    ur = ur_ideal_module(ring, side="right")
    budget = min(ur.n_max, M.n_max)
    tor1 = []
    for n in range(budget + 1):
        _, dim, rel = _tensor_presentation(ur, M, n, min_i=1)
        beta = _beta_matrix(ur, M, n, min_i=1,
                            r_index_of=lambda i, u_idx: ur.r_indices[i][u_idx])
        tor1.append(chain_homology(beta, rel))
    deg_tor0 = deg_of(tor0)
    deg_tor1 = deg_of(tor1)
    delta = max(deg_tor0, deg_tor1)
    a_m = max(deg_m_u, deg_tor0)
    a_r = ring.stability_profile().a_r
    a_bound = a_m <= delta + a_r
    # tensor degree bound at (Rbar, M): deg(Rbar (x) M) <= min(...)
    rbar_right = quotient_u_module(regular_module(ring, side="right"))
    tensor_deg = deg_of(graded_tensor(rbar_right, M))
    lhs_bound = min(module_deg(rbar_right) + deg_of(h0(M)),
                    deg_of(h0(rbar_right)) + module_deg(M))
    tensor_bound = tensor_deg <= lhs_bound
    return DeltaBounds(tor0=tuple(tor0), tor1=tuple(tor1), delta=delta,
                       deg_m_u=deg_m_u, deg_m_mod_u=deg_tor0, a_m=a_m,
                       a_bound_ok=a_bound, tensor_bound_ok=tensor_bound)


def generated_in_degrees_upto(M: GradedModule, a: int) -> bool:
    """Whether components up to degree a generate M over the ring (in window).

    Tracks the integer span: the submodule generated by degrees <= a fills
    M_n iff the accumulated image lattice is all of Z^{rank}.
    """
    G = M.ring.G
    prev_gens = None
    for n in range(M.n_max + 1):
        cols = []
        if n <= a:
            cols.append(np.eye(M.rank(n), dtype=np.int64))
        if n > 0 and prev_gens is not None and prev_gens.shape[1]:
            for pair in _pairs(G):
                cols.append(M.act(pair, n - 1) @ prev_gens)
        gens = (np.concatenate(cols, axis=1) if cols
                else np.zeros((M.rank(n), 0), dtype=np.int64))
        if gens.shape[1]:
            gens = np.unique(gens, axis=1)  # duplicate columns add nothing to the span
        if M.rank(n):
            mat = IntMatrix.from_dense(gens.tolist(), rows=M.rank(n), cols=gens.shape[1])
            snf = smith_normal_form(mat)
            full = snf.rank == M.rank(n) and all(f == 1 for f in snf.factors)
            if not full:
                return False
        prev_gens = gens
    return True
