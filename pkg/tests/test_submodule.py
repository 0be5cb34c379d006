import random

import pytest

from oracles import diag_tensor, ideal_by_brackets, int_hnf, subalgebras_bruteforce
from selfsim.errors import HypothesisViolated
from selfsim.lattice import LieLattice, diagonal_constants, example_family
from selfsim.submodule import (Submodule, canonical_ideal, derived_and_gamma2,
                               enumerate_subalgebras, hereditary_witness, induced_structure,
                               is_closed, is_ideal, largest_ideal_in)

p = 3


def hnf_key(M):
    return tuple(tuple(r) for r in M.hermite.data)


def test_enumerate_index_p_all_close():
    subs = enumerate_subalgebras(example_family(2, p), 1)
    assert len(subs) == 1 + p + p * p
    assert all(is_closed(example_family(2, p), M) for M in subs)


def test_enumerate_k0_is_ambient():
    subs = enumerate_subalgebras(example_family(1, p), 0)
    assert subs == [Submodule.ambient(p, example_family(1, p).precision)]


@pytest.mark.parametrize("l,k", [(1, 2), (0, 2), (1, 1)])
def test_enumerate_matches_bruteforce(l, k):
    L = example_family(l, p)
    a = [x.lift() for x in diagonal_constants(L)]
    want = subalgebras_bruteforce(diag_tensor(*a), p, k)
    got = enumerate_subalgebras(L, k)
    assert len(got) == len(want)
    assert {hnf_key(M) for M in got} == want


def test_enumerate_non_powerful_lattice():
    # unit constants: far from every index-p^2 module being closed
    L = LieLattice.from_diagonal(1, 1, 1, p, 20)
    want = subalgebras_bruteforce(diag_tensor(1, 1, 1), p, 2)
    got = enumerate_subalgebras(L, 2)
    assert {hnf_key(M) for M in got} == want
    assert 0 < len(want) < 130  # 130 index-9 sublattices in total


def test_induced_structure_ambient():
    L = example_family(1, p)
    ML, t = induced_structure(L, Submodule.ambient(p, L.precision))
    assert [a.residue for a in diagonal_constants(ML)] == \
        [a.residue % p**ML.precision for a in diagonal_constants(L)]
    assert tuple(t) == (2, 4, 6)


def test_induced_structure_t_vectors():
    L = example_family(2, p)
    s = (2, 6, 10)
    for M in enumerate_subalgebras(L, 1):
        _, t = induced_structure(L, M)
        assert tuple(t) == tuple(s[i] + 1 - 2 * M.k_vector[i] for i in range(3))
        if M.k_vector == (0, 0, 1):
            assert tuple(t) == (3, 7, 9)


def test_derived_and_gamma2_family():
    L = example_family(1, p)
    D, G = derived_and_gamma2(L, Submodule.ambient(p, L.precision))
    assert D == Submodule.monomial((2, 4, 6), p, L.precision)
    assert G == Submodule.monomial((6, 6, 8), p, L.precision)


def test_derived_and_gamma2_abelian():
    L = LieLattice(p, 10, (0,) * 27)
    D, G = derived_and_gamma2(L, Submodule.ambient(p, 10))
    assert D.is_zero and G.is_zero
    assert D == Submodule.zero(p, 10)


def test_is_ideal_examples():
    U = LieLattice.from_diagonal(1, 1, 1, p, 20)
    assert is_ideal(U, Submodule.monomial((0, 0, 0), p, 20))
    assert not is_ideal(U, Submodule.monomial((1, 0, 0), p, 20))
    L = example_family(1, p)
    S = Submodule.monomial((4, 6, 7), p, L.precision)
    assert is_ideal(L, S, method="criterion")
    assert is_ideal(L, S, method="bracket")
    assert ideal_by_brackets(diag_tensor(9, 81, -729), [[3**4, 0, 0], [0, 3**6, 0], [0, 0, 3**7]])


def test_canonical_ideal_against_module_sum():
    L = example_family(2, p)
    n = L.precision
    M = Submodule.from_params((1, 0, 0), 0, 0, 0, p, n)
    I, sc = canonical_ideal(L, M)
    assert (sc.r0, sc.r1) == (8, 2)
    assert sc.m == (4, 8, 8)
    # p^r0 M + p^r1 [M,M] + [M,[M,M]] from raw generators
    T = diag_tensor(9, 3**6, -3**10)
    from oracles import bracket
    Mb = [(3, 0, 0), (0, 1, 0), (0, 0, 1)]
    D = [bracket(T, Mb[i], Mb[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
    G = [bracket(T, m, d) for m in Mb for d in D]
    gens = [[3**8 * x for x in v] for v in Mb] + [[3**2 * x for x in v] for v in D] + G
    H = int_hnf(gens, p, n)
    assert H == [[3**4, 0, 0], [0, 3**8, 0], [0, 0, 3**8]]
    assert I == Submodule.monomial((4, 8, 8), p, n)


def test_canonical_ideal_k_at_bound():
    L = example_family(1, p)
    M = enumerate_subalgebras(L, 1)[0]
    with pytest.raises(HypothesisViolated):
        canonical_ideal(L, M)


def test_largest_ideal_examples():
    L = example_family(1, p)
    n = L.precision
    A = Submodule.ambient(p, n)
    assert largest_ideal_in(L, A) == A
    assert largest_ideal_in(L, A.scaled(1)) == Submodule.monomial((1, 1, 1), p, n)


def _monomial_ideals_inside(L, S, bound):
    n = L.precision
    out = []
    for m0 in range(bound):
        for m1 in range(bound):
            for m2 in range(bound):
                J = Submodule.monomial((m0, m1, m2), p, n)
                if J.issubset(S) and is_ideal(L, J, method="bracket"):
                    out.append(J)
    return out


def test_largest_ideal_cross_check():
    L = example_family(1, p, 24)
    n = L.precision
    rng = random.Random(4)
    for _ in range(6):
        gens = [[rng.randrange(p**4) for _ in range(3)] for _ in range(3)] + \
            [[p**4 * int(i == j) for j in range(3)] for i in range(3)]
        S = Submodule.span(gens, p, n)
        J = largest_ideal_in(L, S)
        assert J.issubset(S)
        assert is_ideal(L, J, method="bracket")
        for K in _monomial_ideals_inside(L, S, 7):
            assert K.issubset(J)


def test_hereditary_witness_shape():
    L = example_family(1, p)
    M = enumerate_subalgebras(L, 1)[5]
    z0, z1, z2 = hereditary_witness(L, M, (2, 5, 7))
    assert z0[1] == z0[2] == 0 and z0[0]
    assert z1[0] == z1[2] == 0 and z1[1]
    assert z2[0] == z2[1] == 0 and z2[2]
    assert all(M.contains(z) for z in (z0, z1, z2))
