"""The Koszul-type complex of a graded module: explicit differential with
commutator conjugators, the prepend chain homotopy, homology per spot, and
the degree-bound verdicts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup
from .modules import GradedModule
from .orbits import decode_tuple, encode_tuple
from .ring import GradedRing, StabilityProfile
from .words import boundary_eval
from .zlinalg import HomologyGroup, IntMatrix, chain_homology, zero_matrix


class KComplexError(ValueError):
    """Raised on budget violations or a non-regular module where one is required."""


@dataclass
class KComplex:
    """K_p(n) has basis (tuple in G^2p) x (basis of M_{n-p}); flat index
    tuple_rank * rank(M_{n-p}) + module_index."""

    module: GradedModule
    ring: GradedRing
    p_max: int
    n_max: int
    d: dict  # (p, n) -> IntMatrix, K_p(n) -> K_{p-1}(n), 1 <= p <= p_max

    @property
    def G(self) -> FiniteGroup:
        return self.ring.G

    def dim(self, p: int, n: int) -> int:
        if p < 0 or n < p:
            return 0
        return self.G.order ** (2 * p) * self.module.rank(n - p)

    def d_matrix(self, p: int, n: int) -> IntMatrix:
        if p < 1 or p > self.p_max:
            raise KComplexError(f"no differential stored for p={p}")
        if n > self.n_max:
            raise KComplexError(f"degree {n} beyond window {self.n_max}")
        got = self.d.get((p, n))
        if got is None:
            return zero_matrix(self.dim(p - 1, n), self.dim(p, n))
        return got


def _conjugators(G: FiniteGroup, pairs) -> list:
    """Suffix commutator products; out[k] multiplies the commutators of the
    pairs from 0-based index k on, so the conjugator of pair k is out[k + 1]."""
    p = len(pairs)
    out = [G.identity] * (p + 1)
    for k in range(p - 1, -1, -1):
        a, b = pairs[k]
        out[k] = G.mul(G.commutator(a, b), out[k + 1])
    return out


def build_kcomplex(M: GradedModule, p_max: int, n_max: int) -> KComplex:
    """Materialize the differentials d_{p,n} for 1 <= p <= p_max, n <= n_max.

    Column rule for a basis element (a_1, b_1, ..., a_p, b_p) (x) m:
    sum over k of (-1)^(k-1) (pairs minus k-th) (x) [a_k^{d_k}, b_k^{d_k}] m
    with d_k the product of the commutators of the later pairs.
    """
    if M.side != "left":
        raise KComplexError("K-complex coefficients must form a left module")
    if n_max > M.n_max:
        raise KComplexError(f"module window {M.n_max} < requested n_max {n_max}")
    ring = M.ring
    G = ring.G
    order = G.order
    d = {}
    for p in range(1, p_max + 1):
        states = order ** (2 * p)
        for n in range(p, n_max + 1):
            rank_lo = M.rank(n - p + 1)
            rank_hi = M.rank(n - p)
            mat = IntMatrix(order ** (2 * p - 2) * rank_lo, states * rank_hi)
            if rank_hi == 0 or rank_lo == 0:
                d[p, n] = mat
                continue
            acts = {}
            for t in range(states):
                flat = decode_tuple(t, order, 2 * p)
                pairs = [(flat[2 * i], flat[2 * i + 1]) for i in range(p)]
                conj = _conjugators(G, pairs)
                for k in range(p):
                    ck = conj[k + 1]
                    pair_k = (G.conjugate(pairs[k][0], ck), G.conjugate(pairs[k][1], ck))
                    act = acts.get(pair_k)
                    if act is None:
                        act = M.act(pair_k, n - p)
                        acts[pair_k] = act
                    rest = [e for i, pr in enumerate(pairs) if i != k for e in pr]
                    t2 = encode_tuple(rest, order)
                    sign = 1 if k % 2 == 0 else -1
                    for j in range(rank_hi):
                        col = t * rank_hi + j
                        for r in np.flatnonzero(act[:, j]):
                            mat.add_at(t2 * rank_lo + int(r), col, sign * int(act[r, j]))
            d[p, n] = mat
    return KComplex(module=M, ring=ring, p_max=p_max, n_max=n_max, d=d)


def verify_d_squared(K: KComplex):
    """True iff every composable composite is the zero matrix; else the first
    offending (p, n, basis column)."""
    for p in range(2, K.p_max + 1):
        for n in range(p, K.n_max + 1):
            comp = K.d_matrix(p - 1, n).matmul(K.d_matrix(p, n))
            if not comp.is_zero:
                col = min(c for (_, c) in comp.entries)
                return False, (p, n, col)
    return True, None


def u_commutes_with_d(K: KComplex):
    """Check d (Id (x) U) = (Id (x) U) d at every spot in the window."""
    M = K.module
    order = K.G.order
    for p in range(1, K.p_max + 1):
        for n in range(p, K.n_max):
            states = order ** (2 * p)
            u_hi = _id_tensor_u(M, p, n, states)
            u_lo = _id_tensor_u(M, p - 1, n, order ** (2 * p - 2))
            lhs = K.d_matrix(p, n + 1).matmul(u_hi)
            rhs = u_lo.matmul(K.d_matrix(p, n))
            if lhs != rhs:
                return False, (p, n)
    return True, None


def _id_tensor_u(M: GradedModule, p: int, n: int, states: int) -> IntMatrix:
    rank_src = M.rank(n - p)
    rank_tgt = M.rank(n + 1 - p)
    u = M.u_matrix(n - p) if rank_src and n - p < M.n_max else np.zeros((rank_tgt, rank_src), dtype=np.int64)
    out = IntMatrix(states * rank_tgt, states * rank_src)
    for t in range(states):
        for j in range(rank_src):
            for r in np.flatnonzero(u[:, j]):
                out.add_at(t * rank_tgt + int(r), t * rank_src + j, int(u[r, j]))
    return out


def _require_regular(K: KComplex) -> None:
    if K.module.name != "R" or K.module.side != "left":
        raise KComplexError("this operation needs the regular module as coefficients")


def _tau(K: KComplex, pairs, ring_idx: int, n_class: int) -> int:
    """Product of all commutators appearing: explicit pairs then the class part.

    The class part is the evaluated boundary of any representative; it is an
    orbit invariant, so the choice does not matter.
    """
    G = K.G
    acc = G.identity
    for a, b in pairs:
        acc = G.mul(acc, G.commutator(a, b))
    rep = K.ring.rep(n_class, ring_idx)
    return G.mul(acc, boundary_eval(G, rep))


def _homotopy_image(K: KComplex, g: int, h: int, p: int, n: int, t: int, j: int):
    """S_{(g,h)} of basis element (t, j) of K_p(n): flat index in K_{p+1}(n+1)."""
    G = K.G
    order = G.order
    flat = decode_tuple(t, order, 2 * p)
    pairs = [(flat[2 * i], flat[2 * i + 1]) for i in range(p)]
    tau = _tau(K, pairs, j, n - p)
    tau_inv = G.inv(tau)
    g2 = G.conjugate(g, tau_inv)
    h2 = G.conjugate(h, tau_inv)
    t2 = encode_tuple((g2, h2) + tuple(flat), order)
    rank = K.module.rank(n - p)
    return t2 * rank + j


def _apply_s_to_vector(K: KComplex, g: int, h: int, p: int, n: int, vec: dict) -> dict:
    rank = K.module.rank(n - p)
    out = {}
    for idx, coef in vec.items():
        t, j = divmod(idx, rank)
        tgt = _homotopy_image(K, g, h, p, n, t, j)
        out[tgt] = out.get(tgt, 0) + coef
        if out[tgt] == 0:
            del out[tgt]
    return out


def _matrix_column(mat: IntMatrix, col: int) -> dict:
    return {r: v for (r, c), v in mat.entries.items() if c == col}


def homotopy_check(K: KComplex, g: int, h: int):
    """Verify S d + d S = right multiplication by [g, h] on every spot with
    p < p_max and n < n_max; returns (True, None) or (False, witness)."""
    _require_regular(K)
    ring = K.ring
    order = K.G.order
    for p in range(0, K.p_max):
        for n in range(p, K.n_max):
            rank = K.module.rank(n - p)
            rank_up = K.module.rank(n - p + 1)
            if rank == 0:
                continue
            d_here = K.d_matrix(p, n) if p >= 1 else None
            d_cols = None
            if d_here is not None:
                d_cols = {}
                for (r, c), v in d_here.entries.items():
                    d_cols.setdefault(c, {})[r] = v
            d_up = K.d_matrix(p + 1, n + 1)
            up_cols = {}
            for (r, c), v in d_up.entries.items():
                up_cols.setdefault(c, {})[r] = v
            states = order ** (2 * p)
            for t in range(states):
                for j in range(rank):
                    idx = t * rank + j
                    # d(S(x))
                    s_idx = _homotopy_image(K, g, h, p, n, t, j)
                    lhs = dict(up_cols.get(s_idx, {}))
                    # S(d(x))
                    if d_cols is not None:
                        dvec = d_cols.get(idx, {})
                        for tgt, coef in _apply_s_to_vector(K, g, h, p - 1, n, dvec).items():
                            lhs[tgt] = lhs.get(tgt, 0) + coef
                            if lhs[tgt] == 0:
                                del lhs[tgt]
                    # right multiplication: append (g, h) to the class part
                    rep = ring.rep(n - p, j)
                    j2 = ring.class_index(n - p + 1, rep + (g, h))
                    rhs = {t * rank_up + j2: 1}
                    if lhs != rhs:
                        return False, (p, n, t, j)
    return True, None


def right_mult_matrix(K: KComplex, g: int, h: int, p: int, n: int) -> IntMatrix:
    """Matrix of x -> x . [g,h] from K_p(n) to K_p(n+1)."""
    _require_regular(K)
    ring = K.ring
    order = K.G.order
    rank = K.module.rank(n - p)
    rank_up = K.module.rank(n - p + 1)
    states = order ** (2 * p)
    out = IntMatrix(states * rank_up, states * rank)
    append = [ring.class_index(n - p + 1, ring.rep(n - p, j) + (g, h)) for j in range(rank)]
    for t in range(states):
        for j in range(rank):
            out.add_at(t * rank_up + append[j], t * rank + j, 1)
    return out


def right_mult_is_chain_map(K: KComplex, g: int, h: int):
    """d . Rmult = Rmult . d at every composable spot."""
    _require_regular(K)
    for p in range(1, K.p_max + 1):
        for n in range(p, K.n_max):
            lhs = K.d_matrix(p, n + 1).matmul(right_mult_matrix(K, g, h, p, n))
            rhs = right_mult_matrix(K, g, h, p - 1, n).matmul(K.d_matrix(p, n))
            if lhs != rhs:
                return False, (p, n)
    return True, None


def kc_homology(K: KComplex, p: int, n: int) -> HomologyGroup:
    """H_p of the complex at total degree n (needs d_{p+1} in the window)."""
    if p + 1 > K.p_max:
        raise KComplexError(f"homology at p={p} needs differentials to p={p + 1}")
    if p < 0 or n > K.n_max:
        raise KComplexError(f"spot ({p}, {n}) outside window")
    d_out = K.d_matrix(p, n) if p >= 1 else zero_matrix(0, K.dim(0, n))
    d_in = K.d_matrix(p + 1, n)
    return chain_homology(d_out, d_in)


@dataclass(frozen=True)
class HProfileRow:
    p: int
    n: int
    homology: HomologyGroup
    certified: bool  # False only on the open window edge where higher degrees are unknown


def h_profile(K: KComplex, p_top: int | None = None) -> list:
    """Homology at every computable spot, flagged at the window edge."""
    p_top = K.p_max - 1 if p_top is None else min(p_top, K.p_max - 1)
    rows = []
    for p in range(0, p_top + 1):
        for n in range(p, K.n_max + 1):
            hom = kc_homology(K, p, n)
            rows.append(HProfileRow(p=p, n=n, homology=hom,
                                    certified=n < K.n_max or hom.is_zero))
    return rows


def observed_h(rows: list, p: int) -> int:
    """Top degree with nonvanishing H_p among computed spots; -1 if none."""
    return max((r.n for r in rows if r.p == p and not r.homology.is_zero), default=-1)


def bound_checks(profile: StabilityProfile, rows: list, n_max: int) -> list:
    """Tri-state verdicts for the degree bound, the stabilization threshold,
    and the q = 0 instance of the main threshold."""
    a_r = profile.a_r
    a_tilde = profile.a_tilde_r
    deg_u = profile.deg_u
    verdicts = []

    # (i) h_p <= p + A(R) + deg U wherever the window certifies A(R)
    name = "hp_degree_bound"
    statement = "h_p(R) <= p + A(R) + 1 for every computed p"
    if not profile.stable_within_window:
        verdicts.append({"check": name, "statement": statement,
                         "status": "inconclusive",
                         "witness": "window too small to certify A(R)"})
    else:
        bad = [(r.p, r.n) for r in rows
               if not r.homology.is_zero and r.n > r.p + a_r + deg_u]
        verdicts.append({"check": name, "statement": statement,
                         "status": "fail" if bad else "pass",
                         "witness": f"violations at {bad}" if bad else None})

    # (ii) U iso on R_n for observed n >= max(h0, h1) + 5 A(R) + 1
    h0_obs = observed_h(rows, 0)
    h1_obs = observed_h(rows, 1) if any(r.p == 1 for r in rows) else -1
    saturated = any(r.p in (0, 1) and r.n == n_max and not r.homology.is_zero for r in rows)
    threshold = max(h0_obs, h1_obs, 0) + 5 * a_r + 1
    name = "u_iso_threshold"
    statement = "U: R_n -> R_{n+1} is an isomorphism for n >= max(h0, h1) + 5 A(R) + 1"
    in_window = list(range(threshold, n_max))
    if saturated or not profile.stable_within_window:
        verdicts.append({"check": name, "statement": statement,
                         "status": "inconclusive",
                         "witness": "h0/h1 or A(R) not certified by the window"})
    elif not in_window:
        verdicts.append({"check": name, "statement": statement,
                         "status": "inconclusive",
                         "witness": f"threshold {threshold} exceeds window {n_max}"})
    else:
        bad = [n for n in in_window if not profile.u_bijective[n]]
        verdicts.append({"check": name, "statement": statement,
                         "status": "fail" if bad else "pass",
                         "witness": f"U not bijective at {bad}" if bad else
                         f"verified for n in {in_window}"})

    # (iii) q = 0 instance of the stabilization threshold
    name = "q0_threshold"
    statement = "U: R_n -> R_{n+1} is an isomorphism for n >= A~(R) + 6 A(R) + 2"
    threshold0 = a_tilde + 6 * a_r + 2
    in_window0 = list(range(threshold0, n_max))
    if not profile.stable_within_window:
        verdicts.append({"check": name, "statement": statement,
                         "status": "inconclusive",
                         "witness": "window too small to certify A(R)"})
    elif not in_window0:
        verdicts.append({"check": name, "statement": statement,
                         "status": "inconclusive",
                         "witness": f"threshold {threshold0} exceeds window {n_max}"})
    else:
        bad = [n for n in in_window0 if not profile.u_bijective[n]]
        verdicts.append({"check": name, "statement": statement,
                         "status": "fail" if bad else "pass",
                         "witness": f"U not bijective at {bad}" if bad else
                         f"verified for n in {in_window0}"})
    return verdicts
