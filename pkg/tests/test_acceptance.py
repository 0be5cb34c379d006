"""Acceptance suite: ten exact criteria, one PASS/FAIL line each."""
import itertools
import random
import time

import pytest

from oracles import diag_tensor, ideal_by_brackets, int_hnf, minors, subalgebras_bruteforce, vp
from selfsim.endo import VirtualEndomorphism, is_morphism, is_simple_at_precision, zero_endomorphism
from selfsim.harness import (dumps, lemma_ldiag_property_run, verify_example_family,
                             verify_not_self_similar)
from selfsim.lattice import diagonal_constants, example_family, harness_precision, k_bound, s_invariants
from selfsim.linalg import Matrix, hermite_data, smith_decomposition
from selfsim.submodule import Submodule, enumerate_subalgebras, hereditary_witness, is_ideal

REPLAY_CASES = [(3, 2, 1), (3, 3, 1), (3, 3, 2), (5, 2, 1)]
LDIAG_SEED = 20240601


def family_at(l, p, k):
    return example_family(l, p, harness_precision((2, 2 * l + 2, 4 * l + 2), k))


@pytest.fixture(scope="module")
def certificates():
    out = {}
    for p, l, k in REPLAY_CASES:
        t = time.perf_counter()
        cert = verify_not_self_similar(family_at(l, p, k), k)
        out[(p, l, k)] = (cert, time.perf_counter() - t)
    return out


def test_criterion_01_family_invariants(criterion):
    t = time.perf_counter()
    bad = []
    for l, p in itertools.product(range(6), (3, 5, 7)):
        L = example_family(l, p)
        s = tuple(s_invariants(L))
        if s != (2, 2 * l + 2, 4 * l + 2) or k_bound(s) != l:
            bad.append((l, p, s))
    dt = time.perf_counter() - t
    criterion(1, not bad and dt < 1.0, f"s = (2, 2l+2, 4l+2), K = l for 18 (l, p); {dt:.3f}s; bad={bad}")


def test_criterion_02_family_y_brackets(criterion):
    t = time.perf_counter()
    bad = []
    for l, p in itertools.product((0, 1, 2), (3, 5)):
        r = verify_example_family(l, p)
        want = {"[y1,y2]": (3 * l + 2, None, None, 1), "[y2,y0]": (None, None, 3 * l + 2, 2),
                "[y0,y1]": (None, 3 * l + 2, None, 2)}
        for name, (*vals, unit) in want.items():
            got = r["y_brackets"][name]
            if [c["valuation"] for c in got] != vals:
                bad.append((l, p, name))
                continue
            nz = next(c for c in got if c["valuation"] is not None)
            if (nz["unit_residue"] - unit) % p ** (nz["precision"] - nz["valuation"]):
                bad.append((l, p, name))
        if not r["passed"]:
            bad.append((l, p, "checks"))
    dt = time.perf_counter() - t
    criterion(2, not bad and dt < 1.0, f"[y1,y2]=p^(3l+2)y0, [y2,y0]=2p^(3l+2)y2, [y0,y1]=2p^(3l+2)y1 "
              f"for 6 (l, p); {dt:.3f}s; bad={bad}")


def test_criterion_03_replay(criterion, certificates):
    notes, ok = [], True
    for (p, l, k), (cert, dt) in certificates.items():
        n = len(cert.records)
        good = cert.conclusion == "NotSelfSimilarOfIndex" and cert.all_passed
        if k == 1:
            good &= n == 1 + p + p * p
            good &= dt < 30
        else:
            a = [x.lift() for x in diagonal_constants(family_at(l, p, k))]
            oracle = subalgebras_bruteforce(diag_tensor(*a), p, k)
            got = {tuple(map(tuple, Submodule.from_params(r["k_vector"], r["e"], r["f"], r["g"],
                                                          p, cert.precision).hermite.data))
                   for r in cert.records}
            good &= n == len(oracle) and got == oracle
            good &= dt < 120
        ok &= good
        notes.append(f"(p={p},l={l},k={k}) {n} records {dt:.2f}s")
    criterion(3, ok, "; ".join(notes))


def test_criterion_04_record_identities(criterion, certificates):
    fails, total = [], 0
    for (p, l, k), (cert, _) in certificates.items():
        s0, s1, s2 = s = cert.s
        for r in cert.records:
            total += 1
            k0, k1, k2 = kv = r["k_vector"]
            t = [s[i] + k - 2 * kv[i] for i in range(3)]
            r0, r1 = s0 + s1 + k1 + 2 * k2, s0 + k1 + k2
            m = [r1 + s0 + k1 + k2, s0 + s1 + k1 + 2 * k2, r0 + k2]
            sc = r["scalars"]
            checks = [
                r["t"] == t,
                t[0] < t[1] < t[2],
                sc["a3"]["valuation"] == s0 + 2 * k1 + 2 * k2,
                sc["a4"]["valuation"] == s0 + s1 + 2 * k2,
                [sc["m0"], sc["m1"], sc["m2"]] == m,
                r["ideal_hermite"] == [[p ** m[i] if i == j else 0 for j in range(3)] for i in range(3)],
                all(m[i] + s[j] >= m[j] for i in range(3) for j in range(3)),
                all(c["passed"] for c in r["checks"]),
            ]
            if not all(checks):
                fails.append((p, l, k, tuple(kv), r["e"], r["f"], r["g"]))
    criterion(4, total > 0 and not fails, f"{total} records, {len(fails)} failures")


def test_criterion_05_ldiag(criterion):
    t = time.perf_counter()
    r = lemma_ldiag_property_run(500, LDIAG_SEED, primes=(3, 5))
    dt = time.perf_counter() - t
    ok = r["trials"] == 500 and r["passes"] == 500 and dt < 30
    criterion(5, ok, f"{r['passes']}/{r['trials']} passes ({r['rejected']} rejected draws); {dt:.2f}s")


def test_criterion_06_ideal_criterion_vs_brackets(criterion):
    rng = random.Random(6)
    agree = trues = 0
    for _ in range(200):
        l, p = rng.randint(0, 3), rng.choice((3, 5))
        L = example_family(l, p)
        top = 4 * l + 6
        m = tuple(rng.randint(0, top) for _ in range(3))
        S = Submodule.monomial(m, p, L.precision)
        crit = is_ideal(L, S, method="criterion")
        direct = is_ideal(L, S, method="bracket")
        a = [x.lift() for x in diagonal_constants(L)]
        integer = ideal_by_brackets(diag_tensor(*a), [[p ** m[i] if i == j else 0 for j in range(3)]
                                                     for i in range(3)])
        agree += crit == direct == integer
        trues += crit
    criterion(6, agree == 200, f"{agree}/200 agree ({trues} ideals, {200 - trues} non-ideals)")


def _rank_one_map(rng, L, M):
    """Smallest p^j (v (x) mu) that passes the morphism test; None if none does."""
    p, n = L.prime, L.precision
    v = [rng.randrange(p**n) for _ in range(3)]
    mu = [rng.randrange(p**n) for _ in range(3)]
    for j in range(n):
        rows = [[p**j * v[i] * mu[c] for c in range(3)] for i in range(3)]
        phi = VirtualEndomorphism(M, Matrix.from_rows(rows, p, n))
        if is_morphism(L, phi):
            return phi, j
    return None


def test_criterion_07_non_injective(criterion):
    rng = random.Random(7)
    done = good = zero_maps = 0
    scales = []
    while done < 50:
        l, p = rng.randint(1, 3), rng.choice((3, 5))
        k = rng.randint(0, 1 if p == 5 else 2)
        L = example_family(l, p, 48)
        M = rng.choice(enumerate_subalgebras(L, k))
        if done % 2 == 0:
            phi = zero_endomorphism(M)
        else:
            found = _rank_one_map(rng, L, M)
            if found is None:
                continue
            phi, j = found
            scales.append(j)
        if not is_morphism(L, phi):
            continue
        zero_maps += phi.map.is_zero()
        done += 1
        v = is_simple_at_precision(L, phi)
        pkL = Submodule.monomial((M.index_exponent,) * 3, p, L.precision)
        ok = not v.simple and v.core.is_full_rank
        if phi.map.is_zero():
            ok &= pkL.issubset(v.core)
        good += ok
    criterion(7, good == 50, f"{good}/50 NotSimple with finite-index core ({zero_maps} zero maps, "
              f"rank-one scales p^{min(scales)}..p^{max(scales)})")


def _ideal_of_M_generated(L, M, y):
    p, n = L.prime, L.precision
    J = Submodule.span([y], p, n)
    for _ in range(3 * n):
        nxt = J + Submodule.span([L.bracket(m, j) for m in M.basis() for j in J.basis()], p, n)
        if nxt == J:
            break
        J = nxt
    return J


def test_criterion_08_hereditary(criterion):
    rng = random.Random(8)
    good = 0
    for _ in range(100):
        l, p = rng.randint(1, 3), rng.choice((3, 5))
        L = example_family(l, p, 96)
        n = L.precision
        M = rng.choice(enumerate_subalgebras(L, rng.randint(0, 1)))
        while True:
            c = [rng.randrange(p**n) * p ** rng.randint(0, 3) for _ in range(3)]
            y = M.hermite.apply(c)
            if y[0] % p**n:
                break
        z0, z1, z2 = hereditary_witness(L, M, y)
        shape = (z0[1] == z0[2] == 0 and z1[0] == z1[2] == 0 and z2[0] == z2[1] == 0)
        Z = Submodule.span([z0, z1, z2], p, n)
        J = _ideal_of_M_generated(L, M, y)
        ok = shape and Z.is_full_rank and J.is_full_rank and Z.issubset(J) and J.issubset(M)
        good += ok
    criterion(8, good == 100, f"{good}/100 z-chains give rank-3 ideals")


def _snf_oracle(A, p, n):
    """Elementary divisor valuations of an integer matrix, capped at n."""
    out, prev = [], 0
    for size in (1, 2, 3):
        vals = [vp(x, p) for x in minors(A, size)]
        vals = [v for v in vals if v is not None]
        if not vals:
            out.extend([n] * (4 - size))
            break
        d = min(vals)
        out.append(d - prev)
        prev = d
    # over Z/p^n each elementary divisor is simply truncated at p^n
    return tuple(min(d, n) for d in out)


def test_criterion_09_normal_forms(criterion):
    rng = random.Random(9)
    good = 0
    for trial in range(500):
        p = (2, 3, 5)[trial % 3]
        n = rng.randint(1, 12)
        A = [[rng.randrange(p**n) * p ** rng.randint(0, 3) % p**n for _ in range(3)] for _ in range(3)]
        cols = [[A[r][c] for r in range(3)] for c in range(3)]
        ks, H = hermite_data(cols, p, n)
        W = int_hnf(cols, p, n)
        hnf_ok = [list(r) for r in H] == [[x % p**n for x in r] for r in W]
        _, d, _ = smith_decomposition(Matrix.from_rows(A, p, n))
        snf_ok = tuple(d) == _snf_oracle(A, p, n)
        good += hnf_ok and snf_ok
    criterion(9, good == 500, f"{good}/500 Hermite and Smith forms match integer oracles (p in 2, 3, 5)")


def test_criterion_10_determinism(criterion, certificates):
    same = 0
    for (p, l, k), (cert, _) in certificates.items():
        same += verify_not_self_similar(family_at(l, p, k), k).to_json() == cert.to_json()
    a = dumps(lemma_ldiag_property_run(500, LDIAG_SEED, primes=(3, 5)))
    b = dumps(lemma_ldiag_property_run(500, LDIAG_SEED, primes=(3, 5)))
    ok = same == len(REPLAY_CASES) and a == b
    criterion(10, ok, f"{same}/{len(REPLAY_CASES)} certificates and the ldiag report byte-identical "
              f"on re-run")
