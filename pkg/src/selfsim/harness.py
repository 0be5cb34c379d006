"""Certificate-producing replay of the non-self-similarity bound and of the example family."""
from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .errors import HypothesisViolated, PrecisionError, PrecisionTooSmall
from .lattice import (LieLattice, diagonal_constants, example_family, harness_precision, is_powerful,
                      k_bound, s_invariants, well_diagonalize)
from .linalg import Matrix, hermite_form, smith_decomposition
from .padic import BottomAtPrecision, PAdicScalar, div_exact
from .submodule import RESIDUAL_FLOOR, Submodule, enumerate_subalgebras, is_closed, replay_subalgebra

CERTIFICATE_SCHEMA = "selfsim.certificate/1"
FAMILY_SCHEMA = "selfsim.family-certificate/1"
LDIAG_SCHEMA = "selfsim.ldiag-report/1"

NOT_SELF_SIMILAR = "NotSelfSimilarOfIndex"
HYPOTHESIS_VIOLATED = "HypothesisViolated"

# The step that turns per-subalgebra facts into a statement about every phi.
DERIVATION = (
    "reduce to injective phi: L is hereditarily just infinite and a simple phi is injective",
    "phi(M) is a subalgebra of the same index p^k, isomorphic to M",
    "isomorphic subalgebras share t-invariants; distinct k-vectors give distinct t (k-forcing check)",
    "so phi(M) has the k-vector of M and I(phi(M)) = I(M) (I depends only on the k-vector)",
    "phi(I(M)) = I(phi(M)) = I(M): a nonzero phi-invariant ideal, so phi is not simple",
)


def scalar_json(a: PAdicScalar) -> dict[str, Any]:
    v = a.valuation()
    if isinstance(v, BottomAtPrecision):
        return {"valuation": None, "unit_residue": 0, "precision": a.abs_precision}
    return {"valuation": v, "unit_residue": a.residue // a.prime**v, "precision": a.abs_precision}


def scalar_from_json(d: dict[str, Any], prime: int) -> PAdicScalar:
    if d["valuation"] is None:
        return PAdicScalar(prime, d["precision"], 0)
    return PAdicScalar.from_unit_valuation(d["unit_residue"], d["valuation"], prime, d["precision"])


def dumps(obj: dict[str, Any]) -> str:
    return json.dumps(obj, indent=2) + "\n"


@dataclass
class Certificate:
    prime: int
    precision: int
    constants: tuple[PAdicScalar, PAdicScalar, PAdicScalar]
    permutation: tuple[int, int, int]
    s: tuple[int, int, int]
    K: int
    k: int
    records: list[dict[str, Any]] = field(default_factory=list)
    cross_checks: dict[str, bool] = field(default_factory=dict)
    conclusion: str = HYPOTHESIS_VIOLATED

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": CERTIFICATE_SCHEMA,
            "lattice": {
                "prime": self.prime,
                "precision": self.precision,
                "constants": [scalar_json(a) for a in self.constants],
                "well_ordering_permutation": list(self.permutation),
            },
            "s": list(self.s),
            "K": self.K,
            "k": self.k,
            "subalgebra_count": len(self.records),
            "records": self.records,
            "cross_checks": self.cross_checks,
            "derivation": list(DERIVATION),
            "conclusion": self.conclusion,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @property
    def all_passed(self) -> bool:
        return (all(c["passed"] for r in self.records for c in r["checks"])
                and all(self.cross_checks.values()))


def lattice_from_certificate(d: dict[str, Any]) -> tuple[LieLattice, int]:
    lat = d["lattice"]
    p = lat["prime"]
    consts = [scalar_from_json(c, p) for c in lat["constants"]]
    return LieLattice.from_diagonal(*consts, p, lat["precision"]), d["k"]


def _record(L: LieLattice, M: Submodule, floor: int) -> dict[str, Any]:
    I, sc, checks = replay_subalgebra(L, M, floor)
    e, f, g = M.hermite_params()
    return {
        "k_vector": list(M.k_vector),
        "e": e, "f": f, "g": g,
        "t": list(sc.t),
        "scalars": {
            "h": scalar_json(sc.h), "a3": scalar_json(sc.a3), "a4": scalar_json(sc.a4),
            "r0": sc.r0, "r1": sc.r1, "m0": sc.m0, "m1": sc.m1, "m2": sc.m2,
        },
        "ideal_hermite": [list(r) for r in I.hermite.data] if I is not None else None,
        "checks": [{"name": n, "passed": ok} for n, ok in checks],
    }


def _record_job(args):
    return _record(*args)


def verify_not_self_similar(L: LieLattice, k: int, jobs: int = 1,
                            floor: int = RESIDUAL_FLOOR) -> Certificate:
    """Replay the invariant-ideal argument on every subalgebra of index p^k.

    Raises ``HypothesisViolated`` naming the first failed check (and its
    subalgebra); otherwise returns a certificate concluding that no virtual
    endomorphism of index p^k is simple.
    """
    consts = diagonal_constants(L)
    if consts is None:
        raise HypothesisViolated("diagonal form", "lattice must be given in a diagonalizing basis")
    Lw, perm = well_diagonalize(L)
    s = tuple(s_invariants(Lw, method="diagonal"))
    K = k_bound(s)
    cert = Certificate(L.prime, L.precision, consts, perm, s, K, k)
    if not 0 <= k < K:
        raise HypothesisViolated("k < K", f"k={k}, K={K}")
    need = harness_precision(s, k)
    if L.precision < need:
        raise PrecisionTooSmall(f"precision {L.precision} < {need} required for k={k}")
    subs = enumerate_subalgebras(Lw, k)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_record_job, [(Lw, M, floor) for M in subs]))
    else:
        records = [_record(Lw, M, floor) for M in subs]
    for r in records:
        for c in r["checks"]:
            if not c["passed"]:
                raise HypothesisViolated(c["name"], where=f"k_vector={r['k_vector']} "
                                         f"e,f,g={r['e']},{r['f']},{r['g']}")
    by_t: dict[tuple, set] = {}
    by_k: dict[tuple, set] = {}
    for r in records:
        by_t.setdefault(tuple(r["t"]), set()).add(tuple(r["k_vector"]))
        by_k.setdefault(tuple(r["k_vector"]), set()).add(
            tuple(map(tuple, r["ideal_hermite"])))
    cert.records = records
    cert.cross_checks = {
        "equal t-vectors force equal k-vectors": all(len(v) == 1 for v in by_t.values()),
        "ideal depends only on the k-vector": all(len(v) == 1 for v in by_k.values()),
        "every subalgebra replayed": len(records) == len(subs) > 0,
    }
    if not all(cert.cross_checks.values()):
        bad = next(n for n, ok in cert.cross_checks.items() if not ok)
        raise HypothesisViolated(bad)
    cert.conclusion = NOT_SELF_SIMILAR
    return cert


def reverify(cert: dict[str, Any], jobs: int = 1) -> Certificate:
    L, k = lattice_from_certificate(cert)
    return verify_not_self_similar(L, k, jobs=jobs)


def verify_example_family(l: int, p: int, precision: int | None = None) -> dict[str, Any]:
    """Check the family's stated invariants and the displayed finite-index subalgebra."""
    if p == 2:
        raise ValueError("the y-basis needs p odd")
    s_expect = (2, 2 * l + 2, 4 * l + 2)
    if precision is None:
        precision = harness_precision(s_expect, 0) + 3 * l
    L = example_family(l, p, precision)
    checks = []
    s = tuple(s_invariants(L))
    s_smith = tuple(s_invariants(L, method="smith"))
    checks.append(("powerful", is_powerful(L)))
    checks.append(("s = (2, 2l+2, 4l+2)", s == s_expect))
    checks.append(("Smith path agrees", s_smith == s))
    checks.append(("K = l", k_bound(s) == l))
    y = [(2, 0, 0), (0, p**l, -p ** (2 * l)), (0, p**l, p ** (2 * l))]
    Y = Matrix.from_columns(y, p, precision)
    M = Submodule.span(y, p, precision)
    checks.append(("<y> has full rank", M.is_full_rank))
    checks.append(("<y> closed under bracket", is_closed(L, M)))
    checks.append(("index exponent = 3l", M.index_exponent == 3 * l))
    # Coordinates with respect to the y-basis itself.
    q = p ** (3 * l + 2)
    expected = {(1, 2): (q, 0, 0), (2, 0): (0, 0, 2 * q), (0, 1): (0, 2 * q, 0)}
    brackets = {}
    det = Y.det()
    for (i, j), want in expected.items():
        v = L.bracket(y[i], y[j])
        c = _solve_general(Y, v)
        ok = c is not None and all((x.residue - w) % p**x.abs_precision == 0 for x, w in zip(c, want))
        brackets[f"[y{i},y{j}]"] = [scalar_json(x) for x in c] if c is not None else None
        checks.append((f"[y{i},y{j}] matches", ok))
    return {
        "schema": FAMILY_SCHEMA,
        "l": l, "prime": p, "precision": precision,
        "constants": [scalar_json(a) for a in diagonal_constants(L)],
        "s": list(s), "K": k_bound(s),
        "y_basis": [list(v) for v in y],
        "y_det": scalar_json(det),
        "y_hermite": [list(r) for r in M.hermite.data],
        "y_index_exponent": M.index_exponent,
        "y_brackets": brackets,
        "checks": [{"name": n, "passed": ok} for n, ok in checks],
        "passed": all(ok for _, ok in checks),
    }


def _solve_general(Y: Matrix, v):
    """Solve ``Y c = v`` for an invertible-over-Q_p 3x3 ``Y`` via its Hermite form."""
    U, d, V = smith_decomposition(Y)
    # Y = U^-1 D V^-1, so c = V D^-1 U v.
    w = U.apply(v)
    p, n = Y.prime, Y.precision
    try:
        dw = [div_exact(PAdicScalar(p, n, w[i]), PAdicScalar.from_unit_valuation(1, d[i], p, n))
              for i in range(3)]
    except ArithmeticError:
        return None
    m = min(x.abs_precision for x in dw)
    out = V.with_precision(m).apply([x.residue for x in dw])
    return tuple(PAdicScalar(p, m, x) for x in out)


# ---------------------------------------------------------------------------
# Randomised check of the diagonalisation step.


def ldiag_matrix(a, k1, k2, e, f, g, r0, r1, p, n):
    """The matrix whose Hermite form should be ``diag(p^m0, p^m1, p^m2)``."""
    a0, a1, a2 = a
    pw = lambda x: PAdicScalar.from_unit_valuation(1, x, p, n)  # noqa: E731
    e, f, g = (PAdicScalar.of(x, p, n) for x in (e, f, g))
    h = e * g - f * pw(k1)
    rows = [
        [a0 * pw(r1 + k1 + k2), a0 * (a1 * e * pw(2 * k2) + a2 * g * h), f * pw(r0)],
        [-(a1 * e * pw(r1 + k2)), a1 * (a0 * pw(k1 + 2 * k2) - a2 * f * h), g * pw(r0)],
        [a2 * h * pw(r1), -(a2 * (a0 * g * pw(k1) + a1 * e * f) * pw(k2)), pw(r0 + k2)],
    ]
    return Matrix.from_scalars(rows), h


def ldiag_check(a, s, k1, k2, e, f, g, r0, r1, p, n) -> dict[str, Any]:
    s0, s1, s2 = s
    m = (r1 + s0 + k1 + k2, s0 + s1 + k1 + 2 * k2, r0 + k2)
    W, h = ldiag_matrix(a, k1, k2, e, f, g, r0, r1, p, n)
    a0, a1, a2 = a
    a3 = a0 * PAdicScalar.from_unit_valuation(1, 2 * k1 + 2 * k2, p, n) + \
        a1 * (PAdicScalar.of(e * e, p, n) * PAdicScalar.from_unit_valuation(1, 2 * k2, p, n)) + a2 * h * h
    a4 = a0 * a1 * PAdicScalar.from_unit_valuation(1, 2 * k2, p, n) + a0 * a2 * (g * g) + a1 * a2 * (f * f)
    assumptions = [
        s0 + s1 + k1 + 2 * k2 <= r0 <= s0 + s2 + k1,
        s0 + k1 + k2 <= r1 <= s1 - k1 + k2,
        a3.valuation() == s0 + 2 * k1 + 2 * k2,
        a4.valuation() == s0 + s1 + 2 * k2,
    ]
    try:
        H = hermite_form(W)
        diag_ok = H == Matrix.diag([p**x for x in m], p, W.precision)
    except (ArithmeticError, PrecisionError):
        diag_ok = False
    ineq_ok = all(m[i] + s[j] >= m[j] for i in range(3) for j in range(3)) if s0 >= 0 else True
    return {"assumptions": assumptions, "m": m, "hermite_diag": diag_ok, "inequalities": ineq_ok}


def _sample_ldiag(rng: random.Random, p: int, n: int):
    s0 = rng.randint(0, 2)
    k1, k2 = rng.randint(0, 2), rng.randint(0, 2)
    s1 = s0 + 2 * k1 + rng.randint(0, 2)
    s2 = s1 + 2 * k2 + rng.randint(0, 2)
    r0 = rng.randint(s0 + s1 + k1 + 2 * k2, s0 + s2 + k1)
    r1 = rng.randint(s0 + k1 + k2, s1 - k1 + k2)
    mod = p**n

    def unit():
        while True:
            u = rng.randrange(1, mod)
            if u % p:
                return u

    def param():
        return rng.randrange(mod) * p ** rng.randint(0, 2) % mod

    s = (s0, s1, s2)
    a = tuple(PAdicScalar.from_unit_valuation(rng.choice((1, -1)) * unit(), si, p, n) for si in s)
    return dict(a=a, s=s, k1=k1, k2=k2, e=param(), f=param(), g=param(), r0=r0, r1=r1)


def lemma_ldiag_property_run(trials: int, seed, primes=(3,), precision: int = 64) -> dict[str, Any]:
    """Rejection-sample tuples meeting the four assumptions and check the conclusion."""
    report = {"schema": LDIAG_SCHEMA, "seed": seed, "primes": list(primes), "precision": precision,
              "trials": 0, "passes": 0, "failures": 0, "rejected": 0,
              "first_counterexample": None, "transcript": []}
    if trials <= 0:
        return report
    rng = random.Random(seed)
    while report["trials"] < trials:
        p = primes[report["trials"] % len(primes)]
        t = _sample_ldiag(rng, p, precision)
        res = ldiag_check(p=p, n=precision, **t)
        if not all(res["assumptions"]):
            report["rejected"] += 1
            continue
        ok = res["hermite_diag"] and res["inequalities"]
        report["trials"] += 1
        report["passes" if ok else "failures"] += 1
        entry = {"p": p, "s": list(t["s"]), "k1": t["k1"], "k2": t["k2"], "e": t["e"], "f": t["f"],
                 "g": t["g"], "r0": t["r0"], "r1": t["r1"],
                 "a": [scalar_json(x) for x in t["a"]], "m": list(res["m"]), "passed": ok}
        report["transcript"].append(entry)
        if not ok and report["first_counterexample"] is None:
            report["first_counterexample"] = entry
    return report
