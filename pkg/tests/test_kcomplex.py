import numpy as np
import pytest

from stabring.kcomplex import (KComplexError, bound_checks, build_kcomplex,
                               h_profile, homotopy_check, kc_homology,
                               observed_h, right_mult_is_chain_map,
                               u_commutes_with_d, verify_d_squared)
from stabring.modules import regular_module, shift_module
from stabring.zlinalg import HomologyGroup


@pytest.fixture(scope="module")
def complexes(rings):
    out = {}
    for name, (p_built, n_max) in {"trivial": (4, 4), "C2": (4, 4), "S3": (3, 3)}.items():
        out[name] = build_kcomplex(regular_module(rings[name]), p_built, n_max)
    return out


def test_degree_one_differential_is_the_module_action(complexes, rings):
    # d((a, b) (x) m) = [a, b] m: single term, empty conjugator
    for name in ("C2", "S3"):
        K = complexes[name]
        ring = rings[name]
        R = K.module
        order = ring.G.order
        for n in (1, 2):
            d1 = K.d_matrix(1, n)
            rank = R.rank(n - 1)
            for a in range(order):
                for b in range(order):
                    t = a * order + b
                    act = R.act((a, b), n - 1)
                    for j in range(rank):
                        col = {r: v for (r, c), v in d1.entries.items() if c == t * rank + j}
                        want = {int(r): int(act[r, j]) for r in np.flatnonzero(act[:, j])}
                        assert col == want


def test_trivial_group_differential_alternates(complexes):
    # all conjugators trivial and all classes equal: d is U at odd p, 0 at even p
    K = complexes["trivial"]
    for p in range(1, K.p_max + 1):
        for n in range(p, K.n_max + 1):
            mat = K.d_matrix(p, n)
            if p % 2 == 1:
                assert mat.nnz == mat.cols and all(v == 1 for v in mat.entries.values())
            else:
                assert mat.is_zero


def test_abelian_differential_matches_unconjugated_formula(rings):
    # conjugators act trivially for abelian G
    ring = rings["C3"]
    R = regular_module(ring)
    K = build_kcomplex(R, 3, 3)
    G = ring.G
    order = G.order
    from stabring.orbits import decode_tuple, encode_tuple
    for n in (2, 3):
        mat = K.d_matrix(2, n)
        rank_hi, rank_lo = R.rank(n - 2), R.rank(n - 1)
        for t in range(order ** 4):
            flat = decode_tuple(t, order, 4)
            for j in range(rank_hi):
                col = {r: v for (r, c), v in mat.entries.items() if c == t * rank_hi + j}
                want = {}
                for k, sign in ((0, 1), (1, -1)):
                    rest = flat[2:] if k == 0 else flat[:2]
                    pair = (flat[2 * k], flat[2 * k + 1])
                    act = R.act(pair, n - 2)
                    t2 = encode_tuple(rest, order)
                    for r in np.flatnonzero(act[:, j]):
                        idx = t2 * rank_lo + int(r)
                        want[idx] = want.get(idx, 0) + sign * int(act[r, j])
                assert col == {k: v for k, v in want.items() if v}


def test_nonabelian_differential_column_with_conjugation(complexes, rings):
    # at p = 2 the first summand carries the commutator conjugator of pair 2
    K = complexes["S3"]
    ring = rings["S3"]
    R = K.module
    G = ring.G
    from stabring.orbits import encode_tuple
    n = 2
    mat = K.d_matrix(2, n)
    rank_hi, rank_lo = R.rank(0), R.rank(1)
    for pairs in (((1, 2), (3, 4)), ((2, 5), (1, 1)), ((4, 3), (5, 2))):
        (a1, b1), (a2, b2) = pairs
        t = encode_tuple((a1, b1, a2, b2), G.order)
        col = {r: v for (r, c), v in mat.entries.items() if c == t * rank_hi}
        c = G.commutator(a2, b2)
        first = (G.conjugate(a1, c), G.conjugate(b1, c))
        want = {}
        r1 = encode_tuple((a2, b2), G.order) * rank_lo + ring.class_index(1, first)
        want[r1] = want.get(r1, 0) + 1
        r2 = encode_tuple((a1, b1), G.order) * rank_lo + ring.class_index(1, (a2, b2))
        want[r2] = want.get(r2, 0) - 1
        assert col == {k: v for k, v in want.items() if v}


def test_d_squared_zero(complexes):
    for name, K in complexes.items():
        ok, witness = verify_d_squared(K)
        assert ok, f"{name}: d.d != 0 at {witness}"


def test_d_squared_zero_for_shifted_module(rings):
    K = build_kcomplex(shift_module(regular_module(rings["C2"]), 1), 3, 4)
    ok, witness = verify_d_squared(K)
    assert ok, witness


def test_u_commutes_with_differential(complexes):
    for name, K in complexes.items():
        ok, spot = u_commutes_with_d(K)
        assert ok, f"{name}: dU != Ud at {spot}"


def test_homotopy_identity_all_pairs(complexes):
    for name in ("trivial", "C2", "S3"):
        K = complexes[name]
        G = K.G
        for g in range(G.order):
            for h in range(G.order):
                ok, witness = homotopy_check(K, g, h)
                assert ok, f"{name}: failed at (g,h)=({g},{h}), spot {witness}"


def test_homotopy_trivial_pair_matches_u_append(complexes):
    # (g, h) = (1, 1): S d + d S equals appending the trivial handle
    K = complexes["C2"]
    ok, witness = homotopy_check(K, 0, 0)
    assert ok, witness


def test_right_mult_chain_map(complexes):
    K = complexes["S3"]
    for g, h in ((0, 1), (1, 2), (3, 4)):
        ok, spot = right_mult_is_chain_map(K, g, h)
        assert ok, spot


def test_homotopy_requires_regular_module(rings):
    K = build_kcomplex(shift_module(regular_module(rings["C2"]), 1), 2, 3)
    with pytest.raises(KComplexError, match="regular"):
        homotopy_check(K, 0, 0)


def test_homology_trivial_group(complexes):
    # alternating U/0 complex: zero at odd p; Z at the corner of each even p
    K = complexes["trivial"]
    for p in range(0, K.p_max):
        for n in range(p, K.n_max + 1):
            h = kc_homology(K, p, n)
            if p % 2 == 0 and n == p:
                assert h == HomologyGroup(free_rank=1)
            else:
                assert h.is_zero, (p, n, str(h))


def test_h0_spot_is_ring_h0(complexes):
    K = complexes["C2"]
    assert kc_homology(K, 0, 0) == HomologyGroup(free_rank=1)
    for n in (1, 2, 3):
        assert kc_homology(K, 0, n).is_zero


def test_homology_precondition(complexes):
    K = complexes["C2"]
    with pytest.raises(KComplexError, match="needs differentials"):
        kc_homology(K, K.p_max, K.p_max)


def test_h_profile_and_bounds(complexes, rings):
    K = complexes["C2"]
    rows = h_profile(K)
    prof = rings["C2"].stability_profile()
    assert observed_h(rows, 0) == 0
    for r in rows:
        if not r.homology.is_zero:
            assert r.n <= r.p + prof.a_r + 1
    verdicts = bound_checks(prof, rows, K.n_max)
    by_name = {v["check"]: v for v in verdicts}
    assert by_name["hp_degree_bound"]["status"] == "pass"
    assert by_name["u_iso_threshold"]["status"] in ("pass", "inconclusive")
    assert by_name["q0_threshold"]["status"] in ("pass", "inconclusive")


def test_bounds_inconclusive_without_stability(complexes, rings):
    K = complexes["S3"]
    rows = h_profile(K)
    prof = rings["S3"].stability_profile()
    verdicts = bound_checks(prof, rows, K.n_max)
    assert all(v["status"] == "inconclusive" for v in verdicts)
