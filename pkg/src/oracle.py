"""
Independent ground truth for the solver.

Nothing here goes through the solver's sparse elimination: the checkers
evaluate the defining identities directly on elements, the naive constraint
matrix is produced by pushing unit triples through those same identities, and
the brute-force eliminator is a dense textbook Gauss-Jordan on numpy object
arrays.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from src.algebra import Algebra, Element, build_tn, jordan_product, multiply
from src.errors import BudgetExceededError, PreconditionError
from src.linmap import (
    DerivationTriple,
    LinearMap,
    jordan_mult_operator,
    packed_length,
    triple_unpack,
)
from src.scalar import ScalarDomain
from src.solver import (
    GH_BRANCHES,
    TIE_BRANCHES,
    ConstraintSystem,
    Mode,
    RowTag,
    SolutionSpace,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Defects
# ---------------------------------------------------------------------------

def gh_defect(t: DerivationTriple, x: Element, y: Element, branch: str) -> Element:
    """g(x)y + xh(y) - f(xy) (g-first) or h(x)y + xg(y) - f(xy) (h-first)"""
    first, second = (t.g, t.h) if branch == "g-first" else (t.h, t.g)
    return multiply(first(x), y) + multiply(x, second(y)) - t.f(multiply(x, y))


def jordan_defect(t: DerivationTriple, x: Element, y: Element) -> Element:
    """g(x) o y + x o h(y) - f(x o y)"""
    return jordan_product(t.g(x), y) + jordan_product(x, t.h(y)) - t.f(jordan_product(x, y))


def _swap_defect(t: DerivationTriple, x: Element, y: Element, branch: str) -> Element:
    if branch == "pro1":
        return multiply(t.h(x), x) + multiply(x, t.g(x)) - t.f(multiply(x, x))
    if branch == "pro2-g-first":
        return multiply(t.g(y), x) + multiply(y, t.h(x)) - t.f(multiply(y, x))
    return multiply(t.h(y), x) + multiply(y, t.g(x)) - t.f(multiply(y, x))


def defect_for(t: DerivationTriple, x: Element, y: Element, branch: str) -> Element:
    """Recompute the defect named by a witness branch"""
    if branch in GH_BRANCHES:
        return gh_defect(t, x, y, branch)
    if branch == "jordan":
        return jordan_defect(t, x, y)
    return _swap_defect(t, x, y, branch)


# ---------------------------------------------------------------------------
# Check reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    x: Element
    y: Element
    defect: Element
    branch: str

    def to_json(self) -> dict:
        return {"x": self.x.to_json(), "y": self.y.to_json(),
                "branch": self.branch, "defect": self.defect.to_json()}


@dataclass
class CheckReport:
    passed: bool
    trials: int
    seed: int
    witness: Optional[Witness] = None
    skipped: int = 0
    basis_passed: bool = True
    random_passed: bool = True
    inconclusive: bool = False
    qualifying: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "trials": self.trials,
            "skipped": self.skipped,
            "basis_passed": self.basis_passed,
            "random_passed": self.random_passed,
        }
        if self.qualifying:
            out["qualifying"] = dict(self.qualifying)
            out["inconclusive"] = self.inconclusive
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out["seed"] = self.seed
        return out


def _first_failure(t: DerivationTriple, x: Element, y: Element,
                   branches: Sequence[str]) -> Optional[Witness]:
    for branch in branches:
        defect = defect_for(t, x, y, branch)
        if not defect.is_zero():
            return Witness(x, y, defect, branch)
    return None


def _trial_rng(seed: int, trial: int):
    return np.random.default_rng(seed ^ trial)


def _run_check(t: DerivationTriple, branches: Sequence[str], trials: int, seed: int) -> CheckReport:
    if trials < 1:
        raise PreconditionError("a check needs at least one random trial")
    alg = t.algebra

    basis_witness = None
    for k in range(alg.dim):
        for l in range(alg.dim):
            basis_witness = _first_failure(t, alg.basis_element(k), alg.basis_element(l), branches)
            if basis_witness:
                break
        if basis_witness:
            break

    random_witness = None
    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        x, y = alg.random_element(rng), alg.random_element(rng)
        random_witness = _first_failure(t, x, y, branches)
        if random_witness:
            break

    return CheckReport(
        passed=basis_witness is None and random_witness is None,
        trials=trials,
        seed=seed,
        witness=basis_witness or random_witness,
        basis_passed=basis_witness is None,
        random_passed=random_witness is None,
    )


def is_gh_derivation(t: DerivationTriple, trials: int = settings.DEFAULT_TRIALS,
                     seed: int = settings.DEFAULT_SEED) -> CheckReport:
    """Both equalities of f(xy) = g(x)y + xh(y) = h(x)y + xg(y)"""
    return _run_check(t, GH_BRANCHES, trials, seed)


def is_jordan_gh_derivation(t: DerivationTriple, trials: int = settings.DEFAULT_TRIALS,
                            seed: int = settings.DEFAULT_SEED) -> CheckReport:
    """f(x o y) = g(x) o y + x o h(y)"""
    return _run_check(t, ("jordan",), trials, seed)


def counterexample_t2(domain: ScalarDomain) -> DerivationTriple:
    """(0, g, -g) on T_2 with g(x) = a o x, a = e11 + e12 + e22"""
    t2 = build_tn(2, domain)
    a = t2.element({(1, 1): 1, (1, 2): 1, (2, 2): 1})
    g = jordan_mult_operator(a)
    return DerivationTriple(LinearMap.zero(t2), g, -g)


def check_swap_lemmas(t: DerivationTriple, trials: int = settings.DEFAULT_TRIALS,
                      seed: int = settings.DEFAULT_SEED) -> CheckReport:
    """Sampled swap lemmas for a Jordan {g,h}-derivation.

    pro1: f(a^2) = g(a)a + ah(a) implies f(a^2) = h(a)a + ag(a).
    pro2: f(ab) = g(a)b + ah(b) = h(a)b + ag(b) implies
          f(ba) = g(b)a + bh(a) = h(b)a + bg(a).
    Samples missing a hypothesis are skipped and counted.
    """
    if not is_jordan_gh_derivation(t, trials=1, seed=seed).basis_passed:
        raise PreconditionError("the swap lemmas need a Jordan {g,h}-derivation")

    alg = t.algebra
    qualifying = {"pro1": 0, "pro2": 0}
    skipped = 0
    witness = None

    for trial in range(trials):
        rng = _trial_rng(seed, trial)
        a, b = alg.random_element(rng), alg.random_element(rng)

        if gh_defect(t, a, a, "g-first").is_zero():
            qualifying["pro1"] += 1
            witness = witness or _first_failure(t, a, a, ("pro1",))
        else:
            skipped += 1

        if gh_defect(t, a, b, "g-first").is_zero() and gh_defect(t, a, b, "h-first").is_zero():
            qualifying["pro2"] += 1
            witness = witness or _first_failure(t, a, b, ("pro2-g-first", "pro2-h-first"))
        else:
            skipped += 1

    inconclusive = min(qualifying.values()) == 0
    if inconclusive:
        logger.warning("Swap-lemma run inconclusive: qualifying samples %s", qualifying)
    return CheckReport(
        passed=witness is None and not inconclusive,
        trials=trials,
        seed=seed,
        witness=witness,
        skipped=skipped,
        random_passed=witness is None,
        inconclusive=inconclusive,
        qualifying=qualifying,
    )


# ---------------------------------------------------------------------------
# Naive constraint matrix and dense elimination
# ---------------------------------------------------------------------------

def enumerate_tags(algebra: Algebra, mode: Mode) -> List[Tuple[str, str, int, Optional[int]]]:
    """Row groups (kind, branch, left, right) of a mode, in emission order"""
    mode = Mode(mode)
    dim = algebra.dim
    pairs = [(k, l) for k in range(dim) for l in range(dim)]
    groups = []
    if mode in (Mode.GH, Mode.DERIVATION):
        groups += [("gh", br, k, l) for k, l in pairs for br in GH_BRANCHES]
    else:
        groups += [("jordan", "jordan", k, l) for k, l in pairs]
    if mode == Mode.JORDAN_CORNER:
        groups += [("corner", "corner", b.ordinal, b.ordinal) for b in algebra.diagonal]
    if mode in (Mode.DERIVATION, Mode.JORDAN_DERIVATION):
        groups += [("tie", br, k, None) for br in TIE_BRANCHES for k in range(dim)]
    return groups


def _group_residual(t: DerivationTriple, kind: str, branch: str,
                    left: int, right: Optional[int]) -> Element:
    """Left-hand side minus right-hand side of one identity, on basis elements"""
    alg = t.algebra
    x = alg.basis_element(left)
    if kind == "gh":
        return -gh_defect(t, x, alg.basis_element(right), branch)
    if kind == "jordan":
        return -jordan_defect(t, x, alg.basis_element(right))
    if kind == "corner":
        return t.f(x) - multiply(t.g(x), x) - multiply(x, t.h(x))
    if branch == "f=g":
        return t.f(x) - t.g(x)
    return t.g(x) - t.h(x)


def _unit_triples(algebra: Algebra) -> List[DerivationTriple]:
    dom = algebra.domain
    n = packed_length(algebra)
    out = []
    for j in range(n):
        v = [dom.zero()] * n
        v[j] = dom.one()
        out.append(triple_unpack(v, algebra))
    return out


def naive_constraint_system(algebra: Algebra, mode: Mode) -> ConstraintSystem:
    """The mode's constraint rows, recovered column by column from unit triples"""
    mode = Mode(mode)
    groups = enumerate_tags(algebra, mode)
    dim = algebra.dim
    rows: List[Dict[int, object]] = [dict() for _ in range(len(groups) * dim)]
    for j, unit in enumerate(_unit_triples(algebra)):
        for g_index, (kind, branch, left, right) in enumerate(groups):
            residual = _group_residual(unit, kind, branch, left, right)
            for m, c in enumerate(residual.coeffs):
                if c != 0:
                    rows[g_index * dim + m][j] = c
    tags = [RowTag(kind, branch, left, right, m)
            for kind, branch, left, right in groups for m in range(dim)]
    return ConstraintSystem(algebra, mode, rows, tags, packed_length(algebra))


def regenerate_row(algebra: Algebra, tag: RowTag) -> Dict[int, object]:
    """Recompute a single row's coefficients from its provenance tag"""
    row = {}
    for j, unit in enumerate(_unit_triples(algebra)):
        c = _group_residual(unit, tag.kind, tag.branch, tag.left, tag.right).coeffs[tag.coord]
        if c != 0:
            row[j] = c
    return row


def brute_force_null_space_dim(system: ConstraintSystem) -> int:
    """Nullity by dense Gauss-Jordan; refuses systems wider than the budget"""
    if system.n_cols > settings.ORACLE_MAX_COLUMNS:
        raise BudgetExceededError(
            f"{system.n_cols} columns exceed the dense oracle budget of {settings.ORACLE_MAX_COLUMNS}"
        )
    dom = system.algebra.domain
    n_rows, n_cols = system.n_rows, system.n_cols
    if n_rows == 0:
        return n_cols

    A = np.empty((n_rows, n_cols), dtype=object)
    A.fill(dom.zero())
    for i, row in enumerate(system.rows):
        for j, v in row.items():
            A[i, j] = v

    p = dom.characteristic if dom.is_prime_field else None
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nonzero = [i for i in range(r, n_rows) if A[i, c] != 0]
        if not nonzero:
            continue
        i0 = nonzero[0]
        if i0 != r:
            A[[r, i0], :] = A[[i0, r], :]
        A[r, :] = A[r, :] * dom.inv(A[r, c])
        if p:
            A[r, :] = A[r, :] % p
        for i in range(n_rows):
            if i != r and A[i, c] != 0:
                A[i, :] = A[i, :] - A[i, c] * A[r, :]
                if p:
                    A[i, :] = A[i, :] % p
        r += 1
    return n_cols - r


def oracle_null_space_dim(algebra: Algebra, mode: Mode) -> int:
    """Nullity of the naive system of a mode, checked against the budget before it is built"""
    n_cols = packed_length(algebra)
    if n_cols > settings.ORACLE_MAX_COLUMNS:
        raise BudgetExceededError(
            f"{n_cols} columns exceed the dense oracle budget of {settings.ORACLE_MAX_COLUMNS}"
        )
    return brute_force_null_space_dim(naive_constraint_system(algebra, mode))


# ---------------------------------------------------------------------------
# Suites over solution spaces
# ---------------------------------------------------------------------------

def _pair_family(algebra: Algebra, k: int, l: int) -> str:
    left, right = algebra.basis[k], algebra.basis[l]
    if left.is_diagonal and right.is_diagonal:
        return "diagonal-same" if k == l else "diagonal-distinct"
    if left.is_diagonal:
        return "diagonal/off-diagonal"
    if right.is_diagonal:
        return "off-diagonal/diagonal"
    return "off-diagonal/off-diagonal"


PAIR_FAMILIES = ("diagonal-same", "diagonal-distinct", "diagonal/off-diagonal",
                 "off-diagonal/diagonal", "off-diagonal/off-diagonal")


@dataclass
class FamilyAudit:
    algebra: str
    field: str
    mode: str
    families: Dict[str, Dict[str, int]]

    @property
    def clean(self) -> bool:
        return all(v["failed"] == 0 for v in self.families.values())

    def to_json(self) -> dict:
        return {"algebra": self.algebra, "field": self.field, "mode": self.mode,
                "clean": self.clean, "families": self.families}


def pair_family_audit(space: SolutionSpace) -> FamilyAudit:
    """Per pair family, how many (basis triple, pair) cases meet both GH equalities"""
    alg = space.algebra
    families = {name: {"checked": 0, "failed": 0} for name in PAIR_FAMILIES}
    for t in space.triples():
        for k in range(alg.dim):
            for l in range(alg.dim):
                name = _pair_family(alg, k, l)
                x, y = alg.basis_element(k), alg.basis_element(l)
                families[name]["checked"] += 1
                if _first_failure(t, x, y, GH_BRANCHES):
                    families[name]["failed"] += 1
    families = {k: v for k, v in families.items() if v["checked"]}
    return FamilyAudit(alg.name, alg.domain.spec, space.mode.value, families)


def check_space_soundness(space: SolutionSpace, trials: int, seed: int) -> CheckReport:
    """Every basis triple passes the checker matching the space's mode"""
    checker = (is_gh_derivation if space.mode in (Mode.GH, Mode.DERIVATION)
               else is_jordan_gh_derivation)
    for t in space.triples():
        report = checker(t, trials=trials, seed=seed)
        if not report.passed:
            return report
    return CheckReport(passed=True, trials=trials, seed=seed)


def bilinearity_agreement(spaces: Sequence[SolutionSpace], n_triples: int, seed: int,
                          trials: int = 16) -> Dict[str, int]:
    """Basis-pair and random-pair verdicts over sampled triples.

    Half of the triples are random members of the given spaces, half are
    uniformly random triples.  Returns counts; ``disagreements`` must be 0.
    """
    counts = {"triples": 0, "disagreements": 0, "gh_passed": 0, "jordan_passed": 0}
    rng = np.random.default_rng(seed)
    for i in range(n_triples):
        # even i draw a member of each space in turn, odd i a uniformly random triple
        space = spaces[(i // 2) % len(spaces)]
        if i % 2 == 0 and space.dim:
            t = triple_unpack(space.random_member(rng), space.algebra)
        else:
            t = DerivationTriple.random(space.algebra, rng)
        for checker, key in ((is_gh_derivation, "gh_passed"),
                             (is_jordan_gh_derivation, "jordan_passed")):
            report = checker(t, trials=trials, seed=seed + i)
            if report.basis_passed != report.random_passed:
                counts["disagreements"] += 1
                logger.warning("Verdict disagreement on sampled triple %d (%s)", i, key)
            counts[key] += int(report.passed)
        counts["triples"] += 1
    return counts


def swap_lemma_suite(space: SolutionSpace, trials: int, seed: int) -> List[CheckReport]:
    """check_swap_lemmas on every basis triple of a Jordan-type space"""
    return [check_swap_lemmas(t, trials=trials, seed=seed) for t in space.triples()]
