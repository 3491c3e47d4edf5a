"""One test per acceptance criterion; each prints a single PASS/FAIL line."""
import subprocess
import sys
import time
from fractions import Fraction
from math import comb, factorial

from genrep_fq.errors import Inconsistent
from genrep_fq.genrep import (builtin_case, dimension_bookkeeping, is_trivial, make_builtin, psi,
                              rank_filtration, splitting_solver, theta)
from genrep_fq.kovacs import solve_singular_unit, verify_unit
from genrep_fq.matmonoid import gl_order
from genrep_fq.morita import dimension_identity, hom_vanishing, verify_morita, verify_recollement
from genrep_fq.rook import enumerate_rook, mobius_idempotents, verify_rook
from genrep_fq.scalars import QQ, coeff_ring

BUILTINS = ["gr", "const", "proj:0", "proj:1", "proj:2", "proj:3"]


def test_criterion_01_kovacs_example(criterion):
    t0 = time.perf_counter()
    u = solve_singular_unit.__wrapped__(2, 2, QQ)
    elapsed = time.perf_counter() - t0
    by_size = {len(o): c for o, c in zip(u.orbits, u.coefficients)}
    got = tuple(by_size[s] for s in (6, 3, 1))
    ok = got == (Fraction(1, 2), Fraction(-1, 2), Fraction(-1, 2)) and elapsed < 1
    criterion(1, ok, f"sizes (6,3,1) -> {tuple(map(str, got))} in {elapsed:.2f}s")
    assert ok


def test_criterion_02_kovacs_battery(criterion):
    t0 = time.perf_counter()
    failed = []
    for q, n in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2), (5, 2)]:
        rep = verify_unit(solve_singular_unit(q, n, QQ))
        failed += [f"{q},{n}:{c['name']}" for c in rep["checks"] if c["status"] != "pass"]
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 60
    criterion(2, ok, f"failed={failed} in {elapsed:.1f}s")
    assert ok


def test_criterion_03_describing_characteristic(criterion):
    cases = [(2, 1, "gf:2"), (2, 2, "gf:2"), (3, 1, "gf:3")]
    outcome = {}
    t0 = time.perf_counter()
    for q, n, K in cases:
        try:
            solve_singular_unit(q, n, coeff_ring(K))
            outcome[(q, n, K)] = "solved"
        except Inconsistent:
            outcome[(q, n, K)] = "Inconsistent"
    elapsed = time.perf_counter() - t0
    ok = all(v == "Inconsistent" for v in outcome.values()) and elapsed < 1
    detail = ", ".join(f"q={q} n={n} {K}: {v}" for (q, n, K), v in outcome.items())
    # for n = 1 the singular ideal is K[0] and [0] is its unit over any K, so
    # those two cases are solvable; see the decision ledger
    criterion(3, ok, detail)
    assert ok


def test_criterion_04_morita(criterion):
    t0 = time.perf_counter()
    failed = []
    ids = {}
    for q, n, samples in [(2, 1, None), (2, 2, None), (3, 1, None), (3, 2, None), (2, 3, 10**5)]:
        rep = verify_morita(q, n, QQ, samples=samples, seed=0)
        failed += [f"{q},{n}:{c['name']}" for c in rep["checks"] if c["status"] != "pass"]
        mult = [c for c in rep["checks"] if c["name"] == "multiplicative"][0]
        if samples:
            failed += [] if mult["pairs"] == samples else [f"{q},{n}:sample_count"]
    for q, n, text in [(2, 2, "16 = 1+9+6"), (3, 2, "81 = 1+32+48"),
                       (2, 3, "512 = 1+49+294+168")]:
        total, terms = dimension_identity(q, n)
        ids[text] = f"{total} = " + "+".join(map(str, terms)) == text and total == sum(terms)
    elapsed = time.perf_counter() - t0
    ok = not failed and all(ids.values()) and elapsed < 300
    criterion(4, ok, f"failed={failed} identities={sorted(k for k, v in ids.items() if v)} "
                     f"in {elapsed:.1f}s")
    assert ok


def test_criterion_05_hom_vanishing(criterion):
    t0 = time.perf_counter()
    bad = []
    corners = {}
    for m in range(4):
        for n in range(4):
            r = hom_vanishing(2, m, n)
            if m == n:
                corners[n] = r["corner_dim"]
                if r["corner_dim"] != gl_order(2, n):
                    bad.append((m, n))
            elif not r["ok"] or r["checked"] != 2 ** (m * n):
                bad.append((m, n))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    criterion(5, ok, f"bad={bad} corners={corners} in {elapsed:.1f}s")
    assert ok


def test_criterion_06_rook(criterion):
    t0 = time.perf_counter()
    sizes = [len(enumerate_rook(n)) for n in range(5)]
    failed = []
    for n in range(5):
        rep = verify_rook(n, QQ)
        failed += [f"{n}:{c['name']}" for c in rep["checks"] if c["status"] != "pass"]
        if not mobius_idempotents(n).verify()["integral"]:
            failed.append(f"{n}:integral")
    sums = [sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1)) for n in range(5)]
    elapsed = time.perf_counter() - t0
    ok = sizes == [1, 2, 7, 34, 209] == sums and not failed and elapsed < 120
    criterion(6, ok, f"sizes={sizes} failed={failed} in {elapsed:.1f}s")
    assert ok


def test_criterion_07_theta(criterion):
    t0 = time.perf_counter()
    failed = []
    for name in BUILTINS:
        F = make_builtin(name, 2, QQ, 3)
        th = theta(F)
        tdims = [M.dim for M in th]
        if name == "gr" and not (tdims == [1, 1, 1, 1] and all(is_trivial(M) for M in th)):
            failed.append("gr:not_trivial")
        if not dimension_bookkeeping(F, tdims):
            failed.append(f"{name}:bookkeeping")
        if psi(th, 2, QQ, 3).dims != F.dims:
            failed.append(f"{name}:psi_theta_dims")
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < 180
    criterion(7, ok, f"functors={BUILTINS} failed={failed} in {elapsed:.1f}s")
    assert ok


def test_criterion_08_filtration(criterion):
    t0 = time.perf_counter()
    failed = []
    for name in BUILTINS:
        filt = rank_filtration(make_builtin(name, 2, QQ, 3))
        failed += [f"{name}:{k}" for k in ("monotone", "stabilizes", "splitting")
                   if filt.checks.get(k) is not True]
    table = rank_filtration(make_builtin("proj:2", 2, QQ, 2)).table
    column = tuple(table[k][2] for k in range(3))
    elapsed = time.perf_counter() - t0
    ok = not failed and column == (1, 10, 16) and elapsed < 60
    criterion(8, ok, f"proj(2) m=2 {column} failed={failed} in {elapsed:.1f}s")
    assert ok


def test_criterion_09_recollement(criterion):
    t0 = time.perf_counter()
    status = {n: verify_recollement(2, n, QQ)["status"] for n in (1, 2)}
    elapsed = time.perf_counter() - t0
    ok = all(s == "pass" for s in status.values()) and elapsed < 60
    criterion(9, ok, f"{status} in {elapsed:.1f}s")
    assert ok


def test_criterion_10_counterexamples(criterion):
    t0 = time.perf_counter()
    got = {}
    for cat, case in [("fin", "eps"), ("epi", "incl12"), ("fin", "identity")]:
        res = splitting_solver(*builtin_case(cat, case, 2, QQ))
        label = "Split" if res.split else "NoSplit"
        if not res.split and not res.certificate_valid:
            label += "(bad certificate)"
        got[case] = label
    elapsed = time.perf_counter() - t0
    ok = got == {"eps": "NoSplit", "incl12": "NoSplit", "identity": "Split"} and elapsed < 10
    criterion(10, ok, f"{got} in {elapsed:.2f}s")
    assert ok


def test_criterion_11_determinism(criterion):
    cmd = [sys.executable, "-m", "genrep_fq", "verify", "all", "--profile", "desk", "--json"]
    runs = [subprocess.run(cmd, capture_output=True, timeout=600) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    ok = same and all(r.returncode == 0 for r in runs) and len(runs[0].stdout) > 0
    criterion(11, ok, f"identical={same} bytes={len(runs[0].stdout)} "
                      f"exit={[r.returncode for r in runs]}")
    assert ok
