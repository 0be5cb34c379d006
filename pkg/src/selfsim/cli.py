"""Command-line front end.

Lattice description files are YAML (JSON also parses)::

    prime: 3
    precision: 40            # optional; derived from the s-invariants otherwise
    basis_form: diagonal     # or: tensor
    a0: 9                    # [x1, x2] = a0 x0
    a1: [1, 4]               # (unit, valuation) pair: 1 * 3^4
    a2: {unit: -1, valuation: 6}

    # basis_form: tensor
    # entries:               # (i, j, k, c) means [x_i, x_j] has c on x_k
    #   - [1, 2, 0, 9]

Exit codes: 0 ok, 2 parse error, 3 unsolvable, 4 hypothesis violated, 5 precision.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .endo import VirtualEndomorphism, is_morphism, is_simple_at_precision, DEFAULT_GUARD
from .errors import ParseError, SelfSimError
from .harness import (dumps, lemma_ldiag_property_run, reverify, verify_example_family,
                      verify_not_self_similar)
from .lattice import (LieLattice, diagonal_constants, example_family, harness_precision, jacobi_check,
                      k_bound, s_invariants)
from .linalg import Matrix
from .padic import DEFAULT_PRECISION, PAdicScalar, int_valuation, is_prime
from .submodule import Submodule, enumerate_subalgebras, is_closed


def _parse_scalar(x, what: str) -> tuple[int, int]:
    """Return ``(unit, valuation)`` with ``unit * p^valuation`` the value (unit may be 0)."""
    if isinstance(x, bool):
        raise ParseError(f"{what}: expected an integer or (unit, valuation) pair")
    if isinstance(x, int):
        return x, 0
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, int) for v in x):
        return int(x[0]), int(x[1])
    if isinstance(x, dict) and set(x) == {"unit", "valuation"}:
        return int(x["unit"]), int(x["valuation"])
    raise ParseError(f"{what}: expected an integer or (unit, valuation) pair, got {x!r}")


def _exact_valuation(uv: tuple[int, int], p: int) -> int | None:
    v = int_valuation(uv[0], p)
    return None if v is None else v + uv[1]


def read_spec(path: str) -> dict:
    try:
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("lattice file must be a mapping")
    p = doc.get("prime")
    if not isinstance(p, int) or not is_prime(p):
        raise ParseError(f"prime: {p!r} is not a prime")
    prec = doc.get("precision")
    if prec is not None and (not isinstance(prec, int) or prec < 1):
        raise ParseError("precision must be a positive integer")
    form = doc.get("basis_form", "diagonal")
    if form == "diagonal":
        try:
            consts = [_parse_scalar(doc[name], name) for name in ("a0", "a1", "a2")]
        except KeyError as exc:
            raise ParseError(f"missing constant {exc.args[0]}") from exc
        entries = [(1, 2, 0, consts[0]), (2, 0, 1, consts[1]), (0, 1, 2, consts[2])]
    elif form == "tensor":
        raw = doc.get("entries")
        if not isinstance(raw, list):
            raise ParseError("tensor form needs an 'entries' list")
        entries = []
        for n, item in enumerate(raw):
            if not isinstance(item, list) or len(item) not in (4, 5):
                raise ParseError(f"entries[{n}]: expected [i, j, k, c]")
            i, j, k = item[:3]
            if not all(isinstance(v, int) and 0 <= v < 3 for v in (i, j, k)):
                raise ParseError(f"entries[{n}]: indices must be 0, 1 or 2")
            c = item[3] if len(item) == 4 else item[3:]
            entries.append((i, j, k, _parse_scalar(c, f"entries[{n}]")))
    else:
        raise ParseError(f"basis_form must be 'diagonal' or 'tensor', not {form!r}")
    return {"prime": p, "precision": prec, "form": form, "entries": entries}


def build_lattice(spec: dict, precision: int | None = None, k: int = 0) -> LieLattice:
    """Lattice at an explicit precision, else the file's, else the harness rule."""
    p = spec["prime"]
    n = precision or spec["precision"]
    if n is None:
        n = DEFAULT_PRECISION
        if spec["form"] == "diagonal":
            vals = [_exact_valuation(e[3], p) for e in spec["entries"]]
            if all(v is not None for v in vals):
                n = max(n, harness_precision(sorted(vals), k))
    entries = [(i, j, kk, PAdicScalar.from_unit_valuation(u, v, p, n).residue)
               for i, j, kk, (u, v) in spec["entries"]]
    try:
        return LieLattice.from_entries(entries, p, n)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def load_lattice(path: str, precision: int | None = None, k: int = 0) -> LieLattice:
    L = build_lattice(read_spec(path), precision, k)
    if not jacobi_check(L):
        raise ParseError("structure constants violate the Jacobi identity")
    return L


def _write_json(path: str | None, obj) -> None:
    if path:
        Path(path).write_text(dumps(obj) if isinstance(obj, dict) else obj, encoding="utf-8")


def _ints(text: str, n: int, what: str) -> list[int]:
    try:
        vals = [int(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc
    if len(vals) != n:
        raise ParseError(f"{what}: expected {n} comma-separated integers")
    return vals


def cmd_invariants(args) -> int:
    L = load_lattice(args.file, args.precision)
    s = s_invariants(L)
    K = k_bound(s)
    p = L.prime
    print(f"p = {p}")
    print(f"precision = {L.precision}")
    print(f"s-invariants = ({s.s0}, {s.s1}, {s.s2})")
    print(f"K = {K}")
    print(f"sigma(L) >= p^K = {p}^{K} = {p**K}")
    _write_json(args.json, {"prime": p, "precision": L.precision, "s": list(s), "K": K,
                            "bound": p**K, "diagonal": diagonal_constants(L) is not None})
    return 0


def cmd_verify(args) -> int:
    L = load_lattice(args.file, args.precision, args.k)
    cert = verify_not_self_similar(L, args.k, jobs=args.jobs)
    for r in cert.records:
        n_ok = sum(c["passed"] for c in r["checks"])
        print(f"k={tuple(r['k_vector'])} e,f,g={r['e']},{r['f']},{r['g']} t={tuple(r['t'])} "
              f"checks {n_ok}/{len(r['checks'])}")
    print(f"{len(cert.records)} subalgebras of index {L.prime}^{args.k}; s={cert.s}, K={cert.K}")
    print(f"conclusion: {cert.conclusion}")
    _write_json(args.json, cert.to_json())
    if args.json:
        print(f"certificate written to {args.json}")
    return 0 if cert.conclusion == "NotSelfSimilarOfIndex" else 4


def cmd_reverify(args) -> int:
    text = Path(args.certificate).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    again = reverify(doc, jobs=args.jobs).to_json()
    same = again == text
    print("certificate reproduced byte-for-byte" if same else "certificate differs on re-run")
    return 0 if same else 1


def cmd_family(args) -> int:
    L = example_family(args.l, args.p, args.precision)
    consts = tuple(a.lift() for a in diagonal_constants(L))
    print(f"L_{args.l} over Z_{args.p}: constants (a0, a1, a2) = {consts}")
    report = verify_example_family(args.l, args.p, args.precision)
    print(f"s-invariants = {tuple(report['s'])}, K = {report['K']}")
    for c in report["checks"]:
        print(f"  [{'ok' if c['passed'] else 'FAIL'}] {c['name']}")
    _write_json(args.json, report)
    return 0 if report["passed"] else 4


def cmd_enumerate(args) -> int:
    L = load_lattice(args.file, args.precision, args.k)
    subs = enumerate_subalgebras(L, args.k, backend=args.backend)
    for M in subs:
        print(f"k={M.k_vector} e,f,g={M.params}")
    print(f"count = {len(subs)}")
    _write_json(args.json, {"prime": L.prime, "k": args.k, "count": len(subs),
                            "subalgebras": [{"k_vector": list(M.k_vector), "efg": list(M.params)}
                                            for M in subs]})
    return 0


def _domain(text: str, L: LieLattice) -> Submodule:
    if text == "full":
        return Submodule.ambient(L.prime, L.precision)
    k0, k1, k2, e, f, g = _ints(text, 6, "--domain")
    return Submodule.span([(L.prime**k0, 0, 0), (e, L.prime**k1, 0), (f, g, L.prime**k2)],
                          L.prime, L.precision)


def cmd_core(args) -> int:
    L = load_lattice(args.file, args.precision)
    M = _domain(args.domain, L)
    if not is_closed(L, M):
        raise ParseError("--domain is not closed under the bracket")
    if args.map == "identity":
        A = M.hermite
    elif args.map == "zero":
        A = Matrix.from_rows([[0] * 3] * 3, L.prime, L.precision)
    else:
        v = _ints(args.map, 9, "--map")
        A = Matrix.from_rows([v[0:3], v[3:6], v[6:9]], L.prime, L.precision)
    phi = VirtualEndomorphism(M, A)
    if not is_morphism(L, phi):
        print("map is not an algebra morphism on the domain")
        return 4
    verdict = is_simple_at_precision(L, phi, args.guard)
    print(f"domain k={M.k_vector}, index {L.prime}^{M.index_exponent}")
    print(f"verdict: {verdict}")
    if verdict.core is not None:
        print("core hermite form:")
        for row in verdict.core.hermite.data:
            print("  ", list(row))
    _write_json(args.json, {
        "domain_hermite": [list(r) for r in M.hermite.data],
        "map": [list(r) for r in A.data],
        "simple_at_precision": verdict.simple,
        "core_hermite": None if verdict.core is None else [list(r) for r in verdict.core.hermite.data],
        "core_k_vector": None if verdict.core is None else list(verdict.core.k_vector),
        "precision": verdict.precision, "guard": verdict.guard,
    })
    return 0


def cmd_ldiag(args) -> int:
    report = lemma_ldiag_property_run(args.trials, args.seed, primes=tuple(args.p))
    print(f"trials={report['trials']} passes={report['passes']} failures={report['failures']} "
          f"rejected={report['rejected']}")
    if report["first_counterexample"]:
        print("first counterexample:", report["first_counterexample"])
    _write_json(args.json, report)
    return 0 if report["failures"] == 0 else 4


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfsim", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, file=True):
        if file:
            sp.add_argument("file", help="lattice description (YAML)")
        sp.add_argument("--precision", type=int, default=None)
        sp.add_argument("--json", metavar="PATH", default=None)

    sp = sub.add_parser("invariants", help="s-invariants and the bound p^K")
    common(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("verify", help="replay the lower-bound proof at index p^k")
    common(sp)
    sp.set_defaults(json="certificate.json")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("reverify", help="re-run a certificate and compare bytes")
    sp.add_argument("certificate")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_reverify)

    sp = sub.add_parser("family", help="the example family L_l")
    common(sp, file=False)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("enumerate", help="subalgebras of index p^k")
    common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--backend", choices=("numba", "numpy"), default=None)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("core", help="largest invariant ideal of a virtual endomorphism")
    common(sp)
    sp.add_argument("--domain", default="full", help="'full' or k0,k1,k2,e,f,g")
    sp.add_argument("--map", default="identity",
                    help="'identity', 'zero' or 9 integers row-major (column j = image of basis j)")
    sp.add_argument("--guard", type=int, default=DEFAULT_GUARD)
    sp.set_defaults(func=cmd_core)

    sp = sub.add_parser("ldiag", help="randomised check of the diagonalisation step")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--p", type=int, nargs="+", default=[3])
    sp.add_argument("--json", metavar="PATH", default=None)
    sp.set_defaults(func=cmd_ldiag)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SelfSimError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
