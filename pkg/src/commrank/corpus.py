"""Instance-level checks of the structure results for G(p, q, A) and the
rank-two commutator theory, plus the exhaustive small-parameter sweep.

Every check returns a :class:`TheoremReport`.  A report with status
``"fail"`` always carries serialized matrices that reproduce the failure.
Suspected misprints in the reference case tables are reported as
*findings*, which never fail a run.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cyclotomic import CycNum, root_of_unity
from .engine import (
    CapExceeded,
    GroupSet,
    InvariantsReport,
    PreconditionError,
    closure,
    commutator_subgroup,
    commutator_values,
    compute_invariants,
    diagonal_subgroup,
    exponent_lattice_key,
    gpqa_group,
    pair_scan_max_rank,
    rho2_construction,
)
from .matgroup import (
    DenseMatrix,
    MonomialMatrix,
    cyclic_shift,
    direct_sum,
    is_prime,
    make_gpqa_generators,
    mono_identity,
)
from .reducibility import (
    Subspace,
    check_stabilizer_dichotomy,
    decompose_rank2_group,
    is_irreducible,
    matvec,
    off_block_rank,
    restrict,
    restriction_abelian,
    shifted_invariant_subspace,
)

__all__ = [
    "TheoremReport",
    "GroupAnalysis",
    "AnalysisCache",
    "CASES",
    "CASE_ALIASES",
    "SWEEP_CASES",
    "resolve_case",
    "build_eij_semigroup",
    "pattern_group_generators",
    "mixing_unitary",
    "conjugate",
    "decomposition_instances",
    "three_dim_block_instances",
    "random_shifted_instance",
    "a_classes",
    "verify_matrix_units",
    "verify_pattern_group",
    "verify_rank_two_primes",
    "verify_diagonal_commutator",
    "verify_rho_one",
    "verify_rho_two",
    "verify_rho_one_sharp",
    "verify_rank_two_tables",
    "verify_stabilizers",
    "verify_three_dim_block",
    "verify_shifted_subspaces",
    "verify_decompositions",
    "sweep",
    "run_cases",
    "summarize",
    "check_shifted_contract",
]


@dataclass
class TheoremReport:
    case: str
    instance: dict
    status: str  # "pass", "fail", "vacuous" or "cap-exceeded"
    checks: list[dict] = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    findings: list[dict] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "instance": self.instance,
            "status": self.status,
            "checks": self.checks,
            "witnesses": self.witnesses,
            "findings": self.findings,
        }


class _Checks:
    """Collects named boolean checks and the witnesses of those that fail."""

    def __init__(self) -> None:
        self.items: list[dict] = []
        self.witnesses: dict = {}
        self.findings: list[dict] = []

    def add(self, name: str, ok: bool, detail=None, witness=None) -> bool:
        entry = {"name": name, "ok": bool(ok)}
        if detail is not None:
            entry["detail"] = detail
        self.items.append(entry)
        if not ok and witness is not None:
            self.witnesses[name] = witness
        return bool(ok)

    def report(self, case: str, instance: dict, vacuous: bool = False, start: float = 0.0) -> TheoremReport:
        ok = all(c["ok"] for c in self.items)
        status = "fail" if not ok else ("vacuous" if vacuous else "pass")
        return TheoremReport(
            case, instance, status, self.items, self.witnesses, self.findings,
            time.perf_counter() - start if start else 0.0,
        )


def _diag_vector(x: MonomialMatrix) -> list[int]:
    return list(x.exps)


def _exp_set(group: GroupSet) -> list[list[int]]:
    return sorted(_diag_vector(x) for x in group)


# ---------------------------------------------------------------------------
# Shared analysis of G(p, q, A), keyed by the exponent lattice


@dataclass
class GroupAnalysis:
    p: int
    q: int
    key: tuple
    group: GroupSet | None = None
    diag: GroupSet | None = None
    comm: GroupSet | None = None
    invariants: InvariantsReport | None = None
    cap_exceeded: bool = False
    verdicts: dict = field(default_factory=dict)


class AnalysisCache:
    """G(p, q, A) depends only on the span of the cyclic shifts of A, so
    every derived quantity is computed once per span."""

    def __init__(self, cap: int | None = None) -> None:
        self.cap = cap
        self._store: dict = {}

    def get(self, p: int, q: int, a: Sequence[int]) -> GroupAnalysis:
        key = (p, exponent_lattice_key(q, a))
        hit = self._store.get(key)
        if hit is not None:
            return hit
        info = GroupAnalysis(p, q, key)
        try:
            group = gpqa_group(p, q, a, cap=self.cap)
        except CapExceeded:
            info.cap_exceeded = True
        else:
            info.group = group
            info.diag = diagonal_subgroup(group)
            values = commutator_values(group)
            info.comm = commutator_subgroup(group)
            info.invariants = compute_invariants(group, values)
        self._store[key] = info
        return info


_DEFAULT_CACHE = AnalysisCache()


def _analysis(p, q, a, cache: AnalysisCache | None) -> GroupAnalysis:
    return (cache or _DEFAULT_CACHE).get(p, q, a)


def _instance(p: int, q: int, a: Sequence[int]) -> dict:
    return {"p": p, "q": q, "a": [int(x) % q for x in a]}


def _cached_verdict(case: str, p, q, a, cache, compute: Callable[[GroupAnalysis, _Checks], bool]) -> TheoremReport:
    """Run a per-group check once per exponent lattice and relabel it per instance."""
    start = time.perf_counter()
    info = _analysis(p, q, a, cache)
    inst = _instance(p, q, a)
    if info.cap_exceeded:
        cap = (cache or _DEFAULT_CACHE).cap
        return TheoremReport(case, inst, "cap-exceeded", [], {"cap": cap}, [], time.perf_counter() - start)
    verdict = info.verdicts.get(case)
    if verdict is None:
        checks = _Checks()
        vacuous = compute(info, checks)
        verdict = (checks.items, checks.witnesses, checks.findings, vacuous)
        info.verdicts[case] = verdict
    items, witnesses, findings, vacuous = verdict
    ok = all(c["ok"] for c in items)
    status = "fail" if not ok else ("vacuous" if vacuous else "pass")
    return TheoremReport(case, inst, status, items, witnesses, findings, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Per-instance checks on G(p, q, A)


def _check_rank_two_primes(info: GroupAnalysis, c: _Checks) -> bool:
    r = info.invariants.r
    if r != 2:
        c.add("outside hypothesis: r != 2", True, {"r": r})
        return True
    p, q = info.p, info.q
    w = info.invariants.r_witness
    c.add("r = 2 forces p = 2 or (p, q) = (3, 2)", p == 2 or (p, q) == (3, 2),
          {"p": p, "q": q, "r": r}, {"r_witness": [x.to_json() for x in w]} if w else None)
    return False


def verify_rank_two_primes(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """If max commutator rank is exactly 2 then p = 2, or p = 3 and q = 2."""
    return _cached_verdict("rank-two-primes", p, q, a, cache, _check_rank_two_primes)


def _sub_analysis(info: GroupAnalysis, b: MonomialMatrix, cache) -> GroupAnalysis:
    return _analysis(info.p, info.q, b.exps, cache)


def _check_diagonal_commutator(info: GroupAnalysis, c: _Checks, cache) -> bool:
    p, q = info.p, info.q
    group, diag, comm = info.group, info.diag, info.comm
    inv = info.invariants
    s = cyclic_shift(p, q)
    dkeys = diag.key_set()
    bad = None
    for g in group:
        gamma = g.perm[0]
        if g.perm != tuple((j + gamma) % p for j in range(p)):
            bad = g
            break
        sg = s.power(gamma)
        if (g @ sg.inverse()).key() not in dkeys or (sg.inverse() @ g).key() not in dkeys:
            bad = g
            break
    c.add("G = D S^k = S^k D for every element", bad is None and group.order == diag.order * p,
          {"order": group.order, "diagonal_order": diag.order},
          {"element": bad.to_json()} if bad is not None else None)
    outside = next((x for x in comm if x.key() not in dkeys), None)
    c.add("commutator subgroup inside diagonal subgroup", outside is None, {"commutator_order": comm.order},
          {"element": outside.to_json()} if outside is not None else None)
    baddet = next((x for x in comm if not x.det().is_one()), None)
    c.add("det = 1 on the commutator subgroup", baddet is None, None,
          {"element": baddet.to_json()} if baddet is not None else None)
    if comm.order == diag.order:
        c.add("C = D: no case split required", True)
        return False
    nonscalar = [x for x in comm if not x.is_scalar()]
    rho, r = inv.rho, inv.r
    if not nonscalar:
        scalars = {tuple([k] * p) for k in range(q)}
        c.add("scalar case: 2 rho >= p", rho is not None and 2 * rho >= p, {"rho": rho, "p": p})
        c.add("scalar case: rho <= r", rho is not None and rho <= r, {"rho": rho, "r": r})
        c.add("scalar case: r = p = q", r == p == q, {"r": r, "p": p, "q": q})
        c.add("scalar case: C is the p-th roots of unity times I",
              {tuple(x.exps) for x in comm} == {e for e in scalars if (p * e[0]) % q == 0} and comm.order == p,
              {"commutator": _exp_set(comm)})
        return False
    fails = {"C_B = D_B": None, "2 <= rho_B": None, "rho_B <= r_B": None, "r_B <= r_A": None,
             "rho_A <= rho_B": None, "rho_B <= 2 rho_A": None}
    for b in nonscalar:
        sub = _sub_analysis(info, b, cache)
        rb, rhob = sub.invariants.r, sub.invariants.rho
        tests = {
            "C_B = D_B": sub.comm.order == sub.diag.order,
            "2 <= rho_B": rhob is not None and rhob >= 2,
            "rho_B <= r_B": rhob is not None and rhob <= rb,
            "r_B <= r_A": rb <= r,
            "rho_A <= rho_B": rhob is not None and rho is not None and rho <= rhob,
            "rho_B <= 2 rho_A": rhob is not None and rho is not None and rhob <= 2 * rho,
        }
        for name, ok in tests.items():
            if not ok and fails[name] is None:
                wit = {"B": b.to_json(), "rho_A": rho, "r_A": r, "rho_B": rhob, "r_B": rb,
                       "C_B_order": sub.comm.order, "D_B_order": sub.diag.order}
                if name == "C_B = D_B":
                    ck = sub.comm.key_set()
                    extra = next(x for x in sub.diag if x.key() not in ck)
                    wit["in_D_B_not_C_B"] = extra.to_json()
                if name in ("rho_A <= rho_B", "rho_B <= 2 rho_A", "2 <= rho_B") and sub.invariants.rho_witness:
                    wit["rho_B_witness"] = sub.invariants.rho_witness.to_json()
                fails[name] = wit
    for name, wit in fails.items():
        c.add(f"nonscalar case, every nonscalar B in C: {name}", wit is None,
              {"nonscalar_count": len(nonscalar)}, wit)
    return False


def verify_diagonal_commutator(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """Factorization G = D S^k, C inside D, det 1 on C, and the C != D case split."""
    return _cached_verdict("diagonal-commutator", p, q, a, cache,
                           lambda info, c: _check_diagonal_commutator(info, c, cache))


_PQ2_C = [[0, 0], [1, 1]]
_PQ2_D = [[0, 0], [0, 1], [1, 0], [1, 1]]


def _is_p2q2_table(info: GroupAnalysis) -> bool:
    return (info.p, info.q) == (2, 2) and _exp_set(info.comm) == _PQ2_C and _exp_set(info.diag) == _PQ2_D


def _check_rho_one(info: GroupAnalysis, c: _Checks, cache) -> bool:
    p, q = info.p, info.q
    inv = info.invariants
    rho, r = inv.rho, inv.r
    c.add("2 <= r <= p", 2 <= r <= p, {"r": r, "p": p})
    low = next((x for x in info.comm if not x.is_identity() and x.rank_minus_identity() < 2), None)
    c.add("rank(C - I) >= 2 for C != I in the commutator subgroup", low is None, None,
          {"element": low.to_json()} if low is not None else None)
    if (p, q) == (2, 2):
        c.add("p = q = 2 gives rho = 1 and the two-element commutator table",
              rho == 1 and _is_p2q2_table(info),
              {"rho": rho, "commutator": _exp_set(info.comm), "diagonal": _exp_set(info.diag)})
    if rho != 1:
        return False
    case1 = r == p == q == 2 and _is_p2q2_table(info)
    nonscalar = [x for x in info.comm if not x.is_scalar()]
    case2 = bool(nonscalar)
    first_bad = None
    attained = False
    for b in nonscalar:
        sub = _sub_analysis(info, b, cache)
        rhob = sub.invariants.rho
        attained = attained or rhob == 2
        if first_bad is None and not (rhob is not None and rhob >= 2 and sub.comm.order == sub.diag.order):
            first_bad = {"B": b.to_json(), "rho_B": rhob,
                         "C_B_order": sub.comm.order, "D_B_order": sub.diag.order}
    case2 = case2 and first_bad is None and attained
    wit = None
    if not (case1 or case2):
        wit = {"nonscalar_count": len(nonscalar), "first_bad_B": first_bad, "rho_B_2_attained": attained}
    c.add("rho = 1: p = q = 2 table, or every nonscalar B has rho_B >= 2, C_B = D_B, with rho_B = 2 attained",
          case1 or case2, {"table_case": case1, "nonscalar_case": case2}, wit)
    return False


def verify_rho_one(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """2 <= r <= p, no rank-one commutator-subgroup element, and the rho = 1 cases."""
    return _cached_verdict("rho-one", p, q, a, cache, lambda info, c: _check_rho_one(info, c, cache))


def _check_rho_two(info: GroupAnalysis, c: _Checks) -> bool:
    p, q = info.p, info.q
    rho, r = info.invariants.rho, info.invariants.r
    if rho != 2:
        c.add("outside hypothesis: rho != 2", True, {"rho": rho})
        return True
    if p == 2:
        c.add("p = 2: r = 2 and q > 2", r == 2 and q > 2, {"r": r, "q": q})
        return False
    first = r == p and q > 2
    second = r == p - 1 and q == 2
    c.add("exactly one of (r = p, q > 2) and (r = p - 1, q = 2)", first != second,
          {"r": r, "p": p, "q": q})
    try:
        cons = rho2_construction(info.group)
    except (RuntimeError, PreconditionError) as exc:
        c.add("witness construction", False, str(exc))
        return False
    omega_rank = cons.omega_rank
    wit = {"delta": cons.delta.to_json(), "gamma": cons.gamma.to_json(), "omega": cons.omega.to_json()}
    c.add("constructed Omega has the claimed rank", omega_rank == cons.claimed_rank,
          {"rank": omega_rank, "claimed": cons.claimed_rank}, wit)
    c.add("constructed Omega attains r", omega_rank == r, {"rank": omega_rank, "r": r}, wit)
    c.add("constructed Omega lies in the commutator subgroup", cons.omega in info.comm, None, wit)
    return False


def verify_rho_two(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """rho = 2 implies (r = p, q > 2) or (r = p - 1, q = 2), with an explicit witness."""
    return _cached_verdict("rho-two", p, q, a, cache, _check_rho_two)


def _check_rho_one_sharp(info: GroupAnalysis, c: _Checks) -> bool:
    p, q = info.p, info.q
    rho, r = info.invariants.rho, info.invariants.r
    if rho != 1:
        c.add("outside hypothesis: rho != 1", True, {"rho": rho})
        return True
    cases = [r == p == q == 2 and _is_p2q2_table(info), r == p and q > 2, r == p - 1 and q == 2]
    c.add("rho = 1: one of (r = p = q = 2 with table), (r = p, q > 2), (r = p - 1, q = 2)",
          any(cases), {"r": r, "p": p, "q": q, "cases": cases})
    return False


def verify_rho_one_sharp(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """Sharpened rho = 1 classification."""
    return _cached_verdict("rho-one-sharp", p, q, a, cache, _check_rho_one_sharp)


def _printed_tables(rho: int, p: int, q: int):
    """(label, printed C, printed D, hard) for the r = 2 table; exponent vectors mod q."""
    all_pairs = [[i, j] for i in range(q) for j in range(q)]
    if rho == 1 and p == 2 and q == 2:
        return "rho=1,p=q=2", _PQ2_C, _PQ2_D, True
    if rho == 1 and p == 2 and q > 2:
        return "rho=1,p=2,q>2", sorted([k, (-k) % q] for k in range(q)), all_pairs, True
    if rho == 1 and p == 3 and q == 2:
        cset = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
        dset = sorted(cset + [[1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]])
        return "rho=1,p=3,q=2", cset, dset, True
    if rho == 2 and p == 2 and q > 2:
        return "rho=2,p=2,q>2", all_pairs, all_pairs, False
    if rho == 2 and p == 3 and q == 2:
        pairs = sorted([k, (-k) % q] for k in range(q))
        return "rho=2,p=3,q=2", pairs, pairs, False
    return None


def _check_rank_two_tables(info: GroupAnalysis, c: _Checks) -> bool:
    p, q = info.p, info.q
    rho, r = info.invariants.rho, info.invariants.r
    if r != 2:
        c.add("outside hypothesis: r != 2", True, {"r": r})
        return True
    table = _printed_tables(rho, p, q)
    c.add("(rho, p, q) is one of the listed r = 2 cases", table is not None, {"rho": rho, "p": p, "q": q})
    if table is None:
        return False
    label, cset, dset, hard = table
    got_c, got_d = _exp_set(info.comm), _exp_set(info.diag)
    match = got_c == sorted(cset) and got_d == sorted(dset)
    detail = {"case": label, "computed_C": got_c, "computed_D": got_d, "printed_C": sorted(cset), "printed_D": sorted(dset)}
    if hard:
        c.add(f"{label}: printed C and D sets match", match, detail, detail)
    else:
        c.add(f"{label}: computed C = D", got_c == got_d, detail)
        if not match:
            note = "printed set mismatch"
            if any(len(v) != p for v in cset):
                note = f"printed matrices have {len(cset[0])} diagonal entries but the group acts on dimension {p}"
            elif any(sum(v) % q for v in cset):
                note = "printed C contains elements of determinant != 1"
            c.findings.append({"case": label, "note": note, **detail})
    return False


def verify_rank_two_tables(p: int, q: int, a: Sequence[int], cache: AnalysisCache | None = None) -> TheoremReport:
    """r = 2 case table; the last two printed sets are compared as findings only."""
    return _cached_verdict("rank-two-tables", p, q, a, cache, _check_rank_two_tables)


# ---------------------------------------------------------------------------
# Fixed instances


def build_eij_semigroup(n: int) -> list[DenseMatrix]:
    """All n^2 matrix units E_ij plus the zero matrix."""
    if n < 2:
        raise ValueError("n must be at least 2")
    units = [
        DenseMatrix([[1 if (a, b) == (i, j) else 0 for b in range(n)] for a in range(n)])
        for i in range(n)
        for j in range(n)
    ]
    return units + [DenseMatrix.zeros(n)]


def verify_matrix_units(sizes: Sequence[int] = (2, 3, 4)) -> TheoremReport:
    """Matrix units: irreducible, rank <= 1 elements, commutator rank <= 2."""
    start = time.perf_counter()
    c = _Checks()
    for n in sizes:
        sg = build_eij_semigroup(n)
        keys = {x.key() for x in sg}
        c.add(f"n={n}: {n * n + 1} elements", len(keys) == n * n + 1)
        closed = all((x @ y).key() in keys for x in sg for y in sg)
        c.add(f"n={n}: closed under products", closed)
        c.add(f"n={n}: irreducible", is_irreducible(sg))
        c.add(f"n={n}: nonzero elements have rank 1", all(x.rank() == 1 for x in sg if not x.is_zero()))
        best, hist = pair_scan_max_rank(sg)
        c.add(f"n={n}: max commutator rank 2", best == 2, {"histogram": {str(k): v for k, v in sorted(hist.items())}})
    return c.report("matrix-units", {"sizes": list(sizes)}, start=start)


def pattern_group_generators() -> tuple[MonomialMatrix, MonomialMatrix]:
    """T = diag(-1, 1, -1) and the 3-cycle S."""
    return MonomialMatrix([0, 1, 2], [1, 0, 1], 2), cyclic_shift(3, 2)


_PATTERNS = {(0, 1, 2): 1, (2, 0, 1): 2, (1, 2, 0): 3}


def verify_pattern_group() -> TheoremReport:
    """The order-12 group generated by T and S: irreducible, pattern rules, rank <= 2."""
    start = time.perf_counter()
    c = _Checks()
    t, s = pattern_group_generators()
    group = closure([t, s])
    c.add("order 12", group.order == 12, {"order": group.order})
    c.add("irreducible", is_irreducible([t, s]))
    c.add("T has pattern 1 and S pattern 3", _PATTERNS.get(t.perm) == 1 and _PATTERNS.get(s.perm) == 3)
    bad = next((x for x in group if x.perm not in _PATTERNS), None)
    c.add("every element has one of the three patterns", bad is None, None,
          {"element": bad.to_json()} if bad is not None else None)
    bad = next((x for x in group if sum(x.exps) not in (0, 2)), None)
    c.add("each element has zero or two entries equal to -1", bad is None, None,
          {"element": bad.to_json()} if bad is not None else None)
    pairs = [(x, y) for x in group for y in group]
    bad = next(((x, y) for x, y in pairs if (x @ y).perm != (y @ x).perm), None)
    c.add("AB and BA share a pattern for all ordered pairs", bad is None, {"pairs": len(pairs)},
          {"pair": [bad[0].to_json(), bad[1].to_json()]} if bad else None)
    bad = None
    for x, y in pairs:
        diff = (x @ y).dense() - (y @ x).dense()
        if sum(1 for i in range(3) for j in range(3) if diff.entry(i, j)) > 2:
            bad = (x, y)
            break
    c.add("AB - BA has at most two nonzero entries", bad is None, None,
          {"pair": [bad[0].to_json(), bad[1].to_json()]} if bad else None)
    best, hist = pair_scan_max_rank(group.elements)
    c.add("max commutator rank over all pairs is 2", best == 2,
          {"histogram": {str(k): v for k, v in sorted(hist.items())}})
    return c.report("pattern-group", {"generators": [t.to_json(), s.to_json()]}, start=start)


def mixing_unitary(n: int) -> DenseMatrix:
    """Fixed unitary over Q(zeta_8) mixing coordinate i with n-1-i.

    Each pair gets the block (1/sqrt 2) [[1, 1], [z, -z]] with z = zeta_8 and
    sqrt 2 = zeta_8 + zeta_8^7; a middle coordinate gets the phase zeta_8^3.
    """
    z = root_of_unity(1, 8)
    h = (z + root_of_unity(7, 8)) / 2
    zero = CycNum.zero(8)
    rows = [[zero] * n for _ in range(n)]
    for i in range(n // 2):
        j = n - 1 - i
        rows[i][i], rows[i][j] = h, h
        rows[j][i], rows[j][j] = h * z, -(h * z)
    if n % 2:
        rows[n // 2][n // 2] = root_of_unity(3, 8)
    return DenseMatrix(rows, order=8)


def conjugate(u: DenseMatrix, mats: Sequence) -> list[DenseMatrix]:
    ui = u.conj_transpose()
    return [u @ (x.dense() if isinstance(x, MonomialMatrix) else x) @ ui for x in mats]


def _abelian_block(dims: int, order: int, kind: str) -> list[MonomialMatrix]:
    if kind == "cyclic":
        # cyclic permutation together with a scalar phase
        perm = [(i + 1) % dims for i in range(dims)]
        return [MonomialMatrix(perm, [0] * dims, order), MonomialMatrix(list(range(dims)), [1] * dims, order)]
    gens = [MonomialMatrix(list(range(dims)), [1] + [0] * (dims - 1), order)]
    if dims > 1:
        gens.append(MonomialMatrix(list(range(dims)), [0] + [1] * (dims - 1), order))
    return gens


def _direct_sum_group(block: Sequence[MonomialMatrix], extra: Sequence[MonomialMatrix]) -> list:
    n1, n2 = block[0].n, extra[0].n
    m = 1
    for x in list(block) + list(extra):
        m = max(m, x.order)
    gens = [direct_sum(b, mono_identity(n2, b.order)) for b in block]
    gens += [direct_sum(mono_identity(n1, h.order), h) for h in extra]
    return gens


def decomposition_instances(full: bool = True) -> list[tuple[str, list]]:
    """Rank-two groups built as (nonabelian block) + (abelian block), some
    conjugated by :func:`mixing_unitary` to hide the block structure."""
    t, s = pattern_group_generators()
    out = []
    for dims, kind in [(1, "diag"), (2, "diag"), (4, "cyclic")] if full else [(2, "diag")]:
        gens = _direct_sum_group([t, s], _abelian_block(dims, 2, kind))
        out.append((f"pattern+{kind}{dims}", gens))
        out.append((f"pattern+{kind}{dims}/hidden", conjugate(mixing_unitary(3 + dims), gens)))
    qs = [(2, 2, "diag"), (3, 4, "cyclic"), (5, 3, "diag")] if full else [(3, 2, "diag")]
    for q, dims, kind in qs:
        sq, aq = make_gpqa_generators(2, q, [0, 1])
        gens = _direct_sum_group([sq, aq], _abelian_block(dims, q, kind))
        out.append((f"gpqa(2,{q})+{kind}{dims}", gens))
        out.append((f"gpqa(2,{q})+{kind}{dims}/hidden", conjugate(mixing_unitary(2 + dims), gens)))
    return out


def verify_decompositions(full: bool = True) -> TheoremReport:
    """Every constructed rank-two group splits off an M of dimension 1..3."""
    start = time.perf_counter()
    c = _Checks()
    for label, gens in decomposition_instances(full):
        group = closure(gens)
        rep = decompose_rank2_group(group)
        c.add(f"{label}: 1 <= dim M <= 3, block diagonal, abelian complement", rep.ok,
              {"order": group.order, "dim_M": rep.space.dim if rep.space else None},
              rep.to_json() if not rep.ok else None)
    return c.report("decomposition", {"instances": [lbl for lbl, _ in decomposition_instances(full)]}, start=start)


def three_dim_block_instances() -> list[dict]:
    """G(3, 2, A) (+) abelian, with the subgroup G0 acting as G(3, 2, A) on the block."""
    s, a = make_gpqa_generators(3, 2, [1, 0, 0])
    out = []
    for dims, hidden in [(1, False), (2, False), (2, True)]:
        extra = _abelian_block(dims, 2, "diag")
        g0 = [direct_sum(s, mono_identity(dims, 2)), direct_sum(a, mono_identity(dims, 2))]
        gens = g0 + [direct_sum(mono_identity(3, 2), h) for h in extra]
        n = 3 + dims
        basis = [[CycNum.one() if j == i else CycNum.zero() for j in range(n)] for i in range(3)]
        if hidden:
            u = mixing_unitary(n)
            gens, g0 = conjugate(u, gens), conjugate(u, g0)
            basis = [u.apply(b) for b in basis]
        out.append({"label": f"G(3,2,A)+diag{dims}" + ("/hidden" if hidden else ""),
                    "gens": gens, "g0": list(zip(g0, [s, a])), "basis": basis})
    # hypothesis not met: a rotated block, and an abelian group
    first = out[0]
    u = mixing_unitary(4)
    out.append({"label": "G(3,2,A)+diag1/rotated-block", "gens": first["gens"], "g0": first["g0"],
                "basis": [u.apply(b) for b in first["basis"]]})
    ad = direct_sum(a, mono_identity(1, 2))
    out.append({"label": "abelian", "gens": [ad, direct_sum(mono_identity(3, 2), MonomialMatrix([0], [1], 2))],
                "g0": [(ad, a)], "basis": first["basis"]})
    return out


def _expand(coeffs_matrix: MonomialMatrix, basis: list) -> list[list[CycNum]]:
    """Images x b_j = sum_i X_ij b_i prescribed by a 3x3 matrix X."""
    dense = coeffs_matrix.dense()
    out = []
    n = len(basis[0])
    for j in range(len(basis)):
        acc = [CycNum.zero()] * n
        for i in range(len(basis)):
            e = dense.entry(i, j)
            if e:
                acc = [u + e * v for u, v in zip(acc, basis[i])]
        out.append(acc)
    return out


def verify_three_dim_block(instance: dict) -> TheoremReport:
    """A 3-dim block carrying G(3, q, A) is invariant; G is irreducible on it
    and abelian on its orthocomplement."""
    start = time.perf_counter()
    c = _Checks()
    gens = instance["gens"]
    space = Subspace.span(instance["basis"])
    group = closure(gens)
    r = max((v.rank for v in commutator_values(group)), default=0)
    hyp = r == 2
    for g0, model in instance["g0"]:
        images = _expand(model, instance["basis"])
        hyp = hyp and all(
            all(x == y for x, y in zip(matvec(g0, b), img)) for b, img in zip(instance["basis"], images)
        )
    if not hyp:
        c.add("outside hypothesis", True, {"max_commutator_rank": r})
        return c.report("three-dim-block", {"label": instance["label"]}, vacuous=True, start=start)
    inv = all(space.is_invariant(g) for g in gens)
    c.add("block is invariant under G", inv)
    if inv:
        c.add("G restricted to the block is irreducible", is_irreducible([restrict(g, space) for g in gens]))
        c.add("G restricted to the orthocomplement is abelian", restriction_abelian(gens, space.orthocomplement()))
    return c.report("three-dim-block", {"label": instance["label"], "order": group.order}, start=start)


def verify_stabilizers() -> TheoremReport:
    """Stabilizer of M equals that of M-perp and one restriction is abelian."""
    start = time.perf_counter()
    c = _Checks()
    t, s = pattern_group_generators()
    big = closure(_direct_sum_group([t, s], _abelian_block(2, 2, "diag")))
    rng = random.Random(7)
    one, zero, neg = CycNum.one(), CycNum.zero(), -CycNum.one()
    subspaces = [("block", Subspace.coordinate(5, [0, 1, 2])),
                 ("coordinates 0,3", Subspace.coordinate(5, [0, 3])),
                 ("coordinate 4", Subspace.coordinate(5, [4]))]
    for k in range(3):
        vecs = [[rng.choice([one, zero, neg]) for _ in range(5)] for _ in range(2)]
        subspaces.append((f"random{k}", Subspace.span(vecs, 5)))
    for label, space in subspaces:
        rep = check_stabilizer_dichotomy(big, space)
        c.add(f"pattern+diag2, M={label}: dichotomy", rep.holds, rep.to_json(), rep.to_json())
    s2, a2 = make_gpqa_generators(2, 3, [0, 1])
    small = closure([s2, a2])
    rep = check_stabilizer_dichotomy(small, Subspace.coordinate(2, [0], 3))
    c.add("n = 2: dichotomy", rep.holds, rep.to_json())
    return c.report("stabilizer", {"groups": ["pattern+diag2", "gpqa(2,3)"]}, start=start)


def _semigroup_powers(z) -> list:
    powers = [z]
    acc = z
    while not acc.is_identity():
        acc = acc @ z
        powers.append(acc)
        if len(powers) > 64:
            raise ValueError("element order too large")
    return powers


def random_shifted_instance(rng: random.Random, n_max: int = 8):
    """(semigroup elements, N, Z) with every off-diagonal block of rank <= 1.

    Z is a monomial matrix with 4th-root phases, usually a block permutation
    composed with one transposition across N; a third of the instances are
    conjugated by the Q(zeta_8) mixing unitary.
    """
    one, zero = CycNum.one(4), CycNum.zero(4)
    while True:
        n = rng.randint(3, n_max)
        k = rng.randint(1, n - 1)
        inside = sorted(rng.sample(range(n), k))
        outside = [i for i in range(n) if i not in inside]
        if rng.random() < 0.75:
            perm = list(range(n))
            pin, pout = inside[:], outside[:]
            rng.shuffle(pin)
            rng.shuffle(pout)
            for src, dst in zip(inside + outside, pin + pout):
                perm[src] = dst
            a, b = rng.choice(inside), rng.choice(outside)
            swap = list(range(n))
            swap[a], swap[b] = b, a
            perm = [perm[swap[j]] for j in range(n)]
        else:
            perm = list(range(n))
            rng.shuffle(perm)
        exps = [rng.randrange(4) if rng.random() < 0.4 else 0 for _ in range(n)]
        z = MonomialMatrix(perm, exps, 4)
        if rng.random() < 0.3:
            vecs = [[one if j == i else zero for j in range(n)] for i in inside]
        else:
            vecs = [[rng.choice([one, zero, zero, -one]) for _ in range(n)] for _ in range(k)]
        space = Subspace.span(vecs, n, 4)
        if space.dim == 0 or space.dim == n:
            continue
        try:
            powers = _semigroup_powers(z)
        except ValueError:
            continue
        if len(powers) > 24:
            continue
        if any(off_block_rank(w, space) > 1 for w in powers):
            continue
        if rng.random() < 1 / 3:
            u = mixing_unitary(n)
            powers = conjugate(u, powers)
            z = powers[0]
            space = Subspace.span([u.apply(b) for b in space.basis], n)
        return powers, space, z


def check_shifted_contract(space: Subspace, z, result: Subspace) -> tuple[bool, dict]:
    invariant = result.is_invariant(z)
    inside = space.contains_space(result) and space.dim - result.dim <= 1
    around = (
        result.contains_space(space)
        and result.dim - space.dim <= 1
        and result == space + space.image(z)
    )
    return invariant and (inside or around), {
        "invariant": invariant, "inside": inside, "around": around,
        "dim_N": space.dim, "dim_N_Z": result.dim,
    }


def verify_shifted_subspaces(count: int = 40, seed: int = 2024) -> TheoremReport:
    """Random rank-one-block instances: the returned N_Z obeys the contract."""
    start = time.perf_counter()
    c = _Checks()
    # the swap e1 <-> e3 on C^4 with N = span(e1, e2)
    z = MonomialMatrix([2, 1, 0, 3], [0, 0, 0, 0], 1)
    space = Subspace.coordinate(4, [0, 1])
    res = shifted_invariant_subspace([z], space, z)
    ok, detail = check_shifted_contract(space, z, res)
    c.add("swap example", ok and res == Subspace.coordinate(4, [1]), detail)
    rng = random.Random(seed)
    bad = 0
    first = None
    for i in range(count):
        powers, space, z = random_shifted_instance(rng)
        res = shifted_invariant_subspace(powers, space, z)
        ok, detail = check_shifted_contract(space, z, res)
        if not ok:
            bad += 1
            if first is None:
                first = {"index": i, "Z": z.to_json(), "N": space.to_json(), **detail}
    c.add(f"{count} random instances satisfy the contract", bad == 0, {"failures": bad}, first)
    return c.report("shifted-subspace", {"count": count, "seed": seed}, start=start)


# ---------------------------------------------------------------------------
# Case registry and sweep


SWEEP_CASES: dict[str, Callable] = {
    "rank-two-primes": verify_rank_two_primes,
    "diagonal-commutator": verify_diagonal_commutator,
    "rho-one": verify_rho_one,
    "rho-two": verify_rho_two,
    "rho-one-sharp": verify_rho_one_sharp,
    "rank-two-tables": verify_rank_two_tables,
}

FIXED_CASES: dict[str, Callable[[], list[TheoremReport]]] = {
    "matrix-units": lambda: [verify_matrix_units()],
    "stabilizer": lambda: [verify_stabilizers()],
    "three-dim-block": lambda: [verify_three_dim_block(inst) for inst in three_dim_block_instances()],
    "shifted-subspace": lambda: [verify_shifted_subspaces()],
    "decomposition": lambda: [verify_decompositions()],
    "pattern-group": lambda: [verify_pattern_group()],
}

CASES = [
    "matrix-units", "rank-two-primes", "stabilizer", "three-dim-block", "shifted-subspace",
    "decomposition", "pattern-group", "diagonal-commutator", "rho-one", "rho-two",
    "rho-one-sharp", "rank-two-tables",
]

# numeric labels accepted on the command line
CASE_ALIASES = {
    "1.4": "matrix-units", "2.2": "rank-two-primes", "2.4": "stabilizer", "2.5": "three-dim-block",
    "2.6": "shifted-subspace", "2.7": "decomposition", "2.8": "pattern-group",
    "3.1": "diagonal-commutator", "3.2": "rho-one", "3.3": "rho-two", "3.4": "rho-one-sharp",
    "3.5": "rank-two-tables",
}


def resolve_case(name: str) -> list[str]:
    if name == "all":
        return list(CASES)
    name = CASE_ALIASES.get(name, name)
    if name not in CASES:
        raise ValueError(f"unknown case {name!r}")
    return [name]


def _primes_upto(k: int) -> list[int]:
    return [x for x in range(2, k + 1) if is_prime(x)]


def a_classes(p: int, q: int) -> list[tuple[int, ...]]:
    """Nonscalar exponent vectors mod q, one per rotation class (the
    lexicographically smallest rotation), in increasing order."""
    out = []
    for a in itertools.product(range(q), repeat=p):
        if len(set(a)) == 1:
            continue
        if all(a <= a[k:] + a[:k] for k in range(1, p)):
            out.append(a)
    return out


def _sweep_pair(args) -> list[TheoremReport]:
    p, q, cases, cap = args
    cache = AnalysisCache(cap)
    reports = []
    for a in a_classes(p, q):
        for case in cases:
            reports.append(SWEEP_CASES[case](p, q, a, cache))
    return reports


def sweep(p_max: int, q_max: int, cases: Sequence[str] | None = None, cap: int | None = None,
          threads: int = 1) -> list[TheoremReport]:
    """Run the per-instance checks over every prime p <= p_max, q <= q_max
    and every rotation class of nonscalar A.  Deterministic order."""
    cases = list(SWEEP_CASES) if cases is None else [c for c in cases if c in SWEEP_CASES]
    jobs = [(p, q, cases, cap) for p in _primes_upto(p_max) for q in _primes_upto(q_max)]
    if not cases or not jobs:
        return []
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_sweep_pair, jobs))
    else:
        chunks = [_sweep_pair(j) for j in jobs]
    return [r for chunk in chunks for r in chunk]


def run_cases(case_filter: str = "all", p_max: int = 3, q_max: int = 3, cap: int | None = None,
              threads: int = 1) -> list[TheoremReport]:
    selected = resolve_case(case_filter)
    reports = []
    for case in selected:
        if case in FIXED_CASES:
            reports.extend(FIXED_CASES[case]())
    reports.extend(sweep(p_max, q_max, [c for c in selected if c in SWEEP_CASES], cap, threads))
    return reports


def summarize(reports: Sequence[TheoremReport]) -> dict:
    counts: dict = {}
    for r in reports:
        bucket = counts.setdefault(r.case, {"pass": 0, "fail": 0, "vacuous": 0, "cap-exceeded": 0})
        bucket[r.status] += 1
    return {
        "counts": counts,
        "failures": sum(1 for r in reports if r.status == "fail"),
        "findings": sum(len(r.findings) for r in reports),
    }
