"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line
in the "acceptance criteria" section of the pytest summary.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import itertools
import json
import subprocess
import sys
import time

import pytest

from commrank.corpus import (
    SWEEP_CASES,
    AnalysisCache,
    a_classes,
    build_eij_semigroup,
    decomposition_instances,
    pattern_group_generators,
    verify_pattern_group,
    verify_shifted_subspaces,
)
from commrank.engine import (
    closure,
    commutator_subgroup,
    commutator_values,
    compute_invariants,
    diagonal_subgroup,
    gpqa_group,
    pair_scan_max_rank,
)
from commrank.matgroup import MonomialMatrix, is_prime
from commrank.reducibility import commutant, decompose_rank2_group, is_irreducible

P_MAX, Q_MAX, CAP = 7, 5, 100_000


def diag_signs(*signs: int) -> tuple:
    """Key of diag(+-1, ...) as a monomial over zeta_2."""
    n = len(signs)
    return MonomialMatrix(range(n), [0 if s == 1 else 1 for s in signs], 2).key()


def keys(group) -> set:
    return {x.lift(2).key() for x in group}


# groups enumerated by criteria 1-8, collected for criteria 10 and 11
ENUMERATED: dict[str, object] = {}


@pytest.fixture(scope="module")
def full_sweep():
    """All per-instance checks over prime p <= 7, q <= 5, single-threaded."""
    start = time.perf_counter()
    reports: dict[str, list] = {case: [] for case in SWEEP_CASES}
    caches = []
    for p in [x for x in range(2, P_MAX + 1) if is_prime(x)]:
        for q in [x for x in range(2, Q_MAX + 1) if is_prime(x)]:
            cache = AnalysisCache(CAP)
            caches.append(cache)
            for a in a_classes(p, q):
                for case, fn in SWEEP_CASES.items():
                    reports[case].append(fn(p, q, a, cache))
    elapsed = time.perf_counter() - start
    for cache in caches:
        for info in cache._store.values():
            if info.group is not None:
                ENUMERATED[f"G({info.p},{info.q}) lattice {info.key[1][1]}"] = info.group
    return reports, elapsed


def failing(reports) -> list:
    return [r for r in reports if r.status == "fail"]


def test_criterion_01_two_by_two(criterion):
    start = time.perf_counter()
    g = gpqa_group(2, 2, [0, 1])
    c, d = commutator_subgroup(g), diagonal_subgroup(g)
    inv = compute_invariants(g)
    elapsed = time.perf_counter() - start
    ENUMERATED["G(2,2,[0,1])"] = g
    ok = (
        keys(c) == {diag_signs(1, 1), diag_signs(-1, -1)}
        and keys(d) == {diag_signs(1, 1), diag_signs(-1, -1), diag_signs(1, -1), diag_signs(-1, 1)}
        and (inv.rho, inv.r) == (1, 2)
        and elapsed < 1.0
    )
    criterion(1, ok, f"|C|={c.order} |D|={d.order} rho={inv.rho} r={inv.r} in {elapsed:.3f}s")
    assert ok


def test_criterion_02_three_by_three_sign_group(criterion):
    start = time.perf_counter()
    g = gpqa_group(3, 2, [1, 0, 0])
    c, d = commutator_subgroup(g), diagonal_subgroup(g)
    inv = compute_invariants(g)
    elapsed = time.perf_counter() - start
    ENUMERATED["G(3,2,[1,0,0])"] = g
    printed_c = {diag_signs(1, 1, 1), diag_signs(1, -1, -1), diag_signs(-1, 1, -1), diag_signs(-1, -1, 1)}
    printed_d = printed_c | {diag_signs(-1, -1, -1), diag_signs(-1, 1, 1), diag_signs(1, -1, 1), diag_signs(1, 1, -1)}
    ok = keys(c) == printed_c and keys(d) == printed_d and inv.rho == 1 and elapsed < 1.0
    criterion(2, ok, f"|C|={c.order} |D|={d.order} rho={inv.rho} in {elapsed:.3f}s")
    assert ok


def test_criterion_03_rank_two_forces_small_primes(full_sweep, criterion):
    reports, elapsed = full_sweep
    reps = reports["rank-two-primes"]
    hits = [r for r in reps if r.status == "pass"]
    bad = failing(reps)
    capped = sum(r.status == "cap-exceeded" for r in reps)
    ok = not bad and hits and elapsed < 600
    criterion(3, ok, f"{len(hits)} instances with r=2, {len(bad)} exceptions, {capped} over cap, sweep {elapsed:.1f}s")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="C_B = D_B and rho_B <= 2 rho_A have counterexamples at (p,q) = (3,3), (5,5), (7,2); "
    "see the failing reports for witnesses",
)
def test_criterion_04_diagonal_and_commutator_structure(full_sweep, criterion):
    reports, elapsed = full_sweep
    bad = failing(reports["diagonal-commutator"])
    names = sorted({c["name"] for r in bad for c in r.checks if not c["ok"]})
    where = sorted({(r.instance["p"], r.instance["q"]) for r in bad})
    ok = not bad and elapsed < 900
    detail = f"{len(bad)} failing instances at (p,q) in {where}: {names}" if bad else "all instances hold"
    criterion(4, ok, f"{detail}, sweep {elapsed:.1f}s")
    # the factorization, C inside D and det 1 hold everywhere; only the case split fails
    structural = {"G = D S^k = S^k D for every element", "commutator subgroup inside diagonal subgroup",
                  "det = 1 on the commutator subgroup"}
    assert not structural & set(names)
    assert ok


def test_criterion_05_rho_two_classification(full_sweep, criterion):
    reports, elapsed = full_sweep
    reps = reports["rho-two"]
    hits = [r for r in reps if r.status == "pass"]
    bad = failing(reps)
    ok = not bad and hits and elapsed < 600
    criterion(5, ok, f"{len(hits)} instances with rho=2, {len(bad)} failures, witness ranks checked")
    assert ok


def naive_closure(gens) -> dict:
    elems = {g.key(): g for g in gens}
    while True:
        new = {}
        for x, y in itertools.product(list(elems.values()), repeat=2):
            z = x @ y
            if z.key() not in elems:
                new[z.key()] = z
        if not new:
            return elems
        elems.update(new)


def test_criterion_06_three_dimensional_pattern_group(criterion):
    start = time.perf_counter()
    t, s = pattern_group_generators()
    g = closure([t, s])
    ENUMERATED["<T,S>"] = g
    oracle = naive_closure([t, s])
    best, hist = pair_scan_max_rank(g.elements)
    rep = verify_pattern_group()
    elapsed = time.perf_counter() - start
    ok = (
        g.order == 12 and len(oracle) == 12
        and is_irreducible([t, s])
        and sum(hist.values()) == 144 and best == 2 and hist[2] > 0
        and rep.status == "pass"
        and elapsed < 1.0
    )
    criterion(6, ok, f"order {g.order}, 144 pairs max rank {best}, pattern checks {rep.status}, {elapsed:.3f}s")
    assert ok


def test_criterion_07_matrix_unit_semigroup(criterion):
    start = time.perf_counter()
    sg = build_eij_semigroup(4)
    nonzero = [x for x in sg if not x.is_zero()]
    best, _ = pair_scan_max_rank(sg)
    ok = (
        len(sg) == 17
        and is_irreducible(sg)
        and all(x.rank() == 1 for x in nonzero)
        and best == 2
    )
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 5.0
    criterion(7, ok, f"{len(sg)} elements, max commutator rank {best}, {elapsed:.3f}s")
    assert ok


def test_criterion_08_decomposition(criterion):
    worst = 0.0
    problems = []
    for label, gens in decomposition_instances(full=True):
        start = time.perf_counter()
        group = closure(gens)
        rep = decompose_rank2_group(group)
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        ENUMERATED[label] = group
        space = rep.space
        perp = space.orthocomplement() if space is not None else None
        direct = space is not None and all(space.is_invariant(x) and perp.is_invariant(x) for x in group)
        if not (rep.ok and direct and 1 <= space.dim <= 3 and elapsed < 30):
            problems.append(label)
    ok = not problems
    criterion(8, ok, f"{len(decomposition_instances())} instances, slowest {worst:.1f}s, problems {problems}")
    assert ok


def test_criterion_09_shifted_subspace_suite(criterion):
    start = time.perf_counter()
    rep = verify_shifted_subspaces(count=200)
    elapsed = time.perf_counter() - start
    ok = rep.status == "pass" and elapsed < 60
    criterion(9, ok, f"200 random instances, status {rep.status}, {elapsed:.1f}s")
    assert ok


def test_criterion_10_no_rank_one_commutator(full_sweep, criterion):
    assert ENUMERATED, "criteria 1-8 populate the group list"
    offenders = []
    scanned = 0
    for label, group in ENUMERATED.items():
        ranks = {v.rank for v in commutator_values(group)}
        if 1 in ranks:
            offenders.append(label)
        if group.order <= 64:
            # second route: every ordered pair directly
            _, hist = pair_scan_max_rank(group.elements)
            scanned += 1
            if hist.get(1):
                offenders.append(label + " (pair scan)")
    ok = not offenders
    criterion(10, ok, f"{len(ENUMERATED)} groups, {scanned} also pair-scanned, offenders {offenders}")
    assert ok


def test_criterion_11_burnside_against_commutant(full_sweep, criterion):
    assert ENUMERATED
    mismatches = []
    for label, group in ENUMERATED.items():
        gens = group.generators or group.elements
        if is_irreducible(gens) != (commutant(gens).dim == 1):
            mismatches.append(label)
    ok = not mismatches
    criterion(11, ok, f"{len(ENUMERATED)} groups, mismatches {mismatches}")
    assert ok


def test_criterion_12_deterministic_json(tmp_path, criterion):
    argv = [sys.executable, "-m", "commrank", "verify-paper", "--case", "all",
            "--p-max", "3", "--q-max", "3", "--format", "json"]
    bodies = []
    for _ in range(2):
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=600)
        doc = json.loads(proc.stdout)
        bodies.append(json.dumps(doc["payload"], sort_keys=True))
    ok = bodies[0] == bodies[1] and doc["schema"] == "report-v1"
    criterion(12, ok, f"payload bodies identical: {bodies[0] == bodies[1]}, exit status {proc.returncode}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
