import random

import pytest
import sympy
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from stabring.zlinalg import (HomologyGroup, IntMatrix, LinAlgError,
                              chain_homology, identity_matrix, matrix_rank,
                              rank_fraction_free, smith_normal_form, zero_matrix)


def random_matrix(rng, max_dim=6, max_val=9):
    m, n = rng.randint(1, max_dim), rng.randint(1, max_dim)
    A = IntMatrix(m, n)
    for _ in range(rng.randint(0, m * n)):
        A.add_at(rng.randrange(m), rng.randrange(n), rng.randint(-max_val, max_val))
    return A


def test_snf_identity():
    assert smith_normal_form(identity_matrix(3)).factors == (1, 1, 1)


def test_snf_zero():
    assert smith_normal_form(zero_matrix(4, 2)).factors == ()


def test_snf_diag_two_three():
    # two row/column reduction steps fold diag(2, 3) into diag(1, 6)
    A = IntMatrix.from_dense([[2, 0], [0, 3]])
    assert smith_normal_form(A).factors == (1, 6)


def test_snf_matches_sympy_randomized():
    rng = random.Random(11)
    for _ in range(150):
        A = random_matrix(rng)
        ref = tuple(int(x) for x in sympy_invariants(sympy.Matrix(A.to_dense())) if x != 0)
        assert smith_normal_form(A).factors == ref


def test_snf_transforms_diagonalize():
    rng = random.Random(13)
    for _ in range(60):
        A = random_matrix(rng, max_dim=5)
        snf = smith_normal_form(A, transforms=True)
        U, V = sympy.Matrix(snf.U), sympy.Matrix(snf.V)
        D = U * sympy.Matrix(A.to_dense()) * V
        assert abs(U.det()) == 1 and abs(V.det()) == 1
        for i in range(A.rows):
            for j in range(A.cols):
                want = snf.factors[i] if i == j and i < len(snf.factors) else 0
                assert D[i, j] == want


def test_snf_invariant_under_permutation():
    rng = random.Random(17)
    for _ in range(40):
        A = random_matrix(rng)
        rows = list(range(A.rows))
        cols = list(range(A.cols))
        rng.shuffle(rows)
        rng.shuffle(cols)
        B = IntMatrix(A.rows, A.cols)
        for (r, c), v in A.entries.items():
            B.add_at(rows[r], cols[c], v)
        assert smith_normal_form(A).factors == smith_normal_form(B).factors


def test_snf_no_unit_entries_exercises_residual_path():
    # all-even matrices never offer a +-1 pivot
    rng = random.Random(29)
    for _ in range(40):
        m, n = rng.randint(2, 8), rng.randint(2, 8)
        A = IntMatrix(m, n)
        for _ in range(rng.randint(1, m * n)):
            A.add_at(rng.randrange(m), rng.randrange(n), 2 * rng.randint(-8, 8))
        ref = tuple(int(x) for x in sympy_invariants(sympy.Matrix(A.to_dense())) if x != 0)
        assert smith_normal_form(A).factors == ref


def test_snf_larger_sparse_matches_sympy():
    rng = random.Random(31)
    for _ in range(10):
        m, n = rng.randint(10, 25), rng.randint(10, 25)
        A = IntMatrix(m, n)
        for _ in range(rng.randint(0, 3 * (m + n))):
            A.add_at(rng.randrange(m), rng.randrange(n), rng.randint(-9, 9))
        ref = tuple(int(x) for x in sympy_invariants(sympy.Matrix(A.to_dense())) if x != 0)
        assert smith_normal_form(A).factors == ref


def test_rank_cross_check_fraction_free():
    rng = random.Random(19)
    for _ in range(60):
        A = random_matrix(rng)
        assert matrix_rank(A) == rank_fraction_free(A)


def test_chain_homology_zero_maps():
    h = chain_homology(zero_matrix(0, 5), zero_matrix(5, 0))
    assert h == HomologyGroup(free_rank=5)


def test_chain_homology_multiplication_by_two():
    h = chain_homology(zero_matrix(0, 1), IntMatrix.from_dense([[2]]))
    assert h.free_rank == 0 and h.torsion == (2,)


def test_chain_homology_rejects_nonzero_composite():
    d_out = IntMatrix.from_dense([[1, 0]])
    d_in = IntMatrix.from_dense([[1], [0]])
    with pytest.raises(LinAlgError, match="!= 0"):
        chain_homology(d_out, d_in)


def test_chain_homology_dimension_mismatch():
    with pytest.raises(LinAlgError, match="mismatch"):
        chain_homology(zero_matrix(0, 2), zero_matrix(3, 1))


def test_chain_homology_unimodular_invariance():
    # H of C2 -> C1 -> C0 is unchanged by a unimodular change of basis on C1
    rng = random.Random(23)
    d_out = IntMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    d_in = IntMatrix.from_dense([[2], [-2], [2]])
    base = chain_homology(d_out, d_in)
    assert base == HomologyGroup(0, (2,))
    for _ in range(20):
        Pm = sympy.eye(3)
        for _ in range(4):  # product of elementary shears stays unimodular
            i, j = rng.randrange(3), rng.randrange(3)
            if i != j:
                E = sympy.eye(3)
                E[i, j] = rng.randint(-2, 2)
                Pm = Pm * E
        assert abs(Pm.det()) == 1
        d_out2 = IntMatrix.from_dense((sympy.Matrix(d_out.to_dense()) * Pm.inv()).tolist())
        d_in2 = IntMatrix.from_dense((Pm * sympy.Matrix(d_in.to_dense())).tolist())
        assert chain_homology(d_out2, d_in2) == base


def test_bar_complex_spot_of_c2():
    # H2 of the order-2 group vanishes: the degree-2 bar spot is exact
    from stabring.groups import cyclic_group
    from stabring.oracle import bar_differentials
    d2, d3 = bar_differentials(cyclic_group(2))
    h = chain_homology(d2, d3)
    assert h.free_rank == 0 and h.torsion == ()


def test_homology_group_validation():
    with pytest.raises(LinAlgError):
        HomologyGroup(free_rank=0, torsion=(3, 2))
    with pytest.raises(LinAlgError):
        HomologyGroup(free_rank=0, torsion=(1,))
    assert str(HomologyGroup(1, (2, 4))) == "Z + Z/2 + Z/4"
    assert HomologyGroup(0, (2,)).order() == 2
    assert HomologyGroup(1).order() is None


def test_matrix_text_round_trip():
    A = IntMatrix.from_dense([[0, 3], [-1, 0], [0, 7]])
    B = IntMatrix.from_text(A.to_text())
    assert A == B
    assert A.to_text().splitlines()[0] == "3 2 3"
    with pytest.raises(LinAlgError, match="declares"):
        IntMatrix.from_text("2 2 5\n0 0 1\n")


def test_matmul_and_transpose():
    A = IntMatrix.from_dense([[1, 2], [0, 1]])
    B = IntMatrix.from_dense([[1, 0], [3, 1]])
    assert A.matmul(B).to_dense() == [[7, 2], [3, 1]]
    assert A.transpose().to_dense() == [[1, 0], [2, 1]]
