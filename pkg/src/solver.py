"""
Constraint systems over triple-space and their exact null spaces.

Both sides of f(xy) = g(x)y + xh(y) = h(x)y + xg(y) and of
f(x o y) = g(x) o y + x o h(y) are bilinear in (x, y) and linear in the
packed triple, so imposing them on every ordered pair of basis elements and
every output coordinate gives a homogeneous linear system whose null space is
exactly the set of admissible triples.
"""

from __future__ import annotations

import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from src.algebra import Algebra, parse_algebra
from src.errors import LayoutError, UsageError
from src.linmap import column_index, packed_length, triple_unpack
from src.scalar import RawScalar, parse_domain

logger = logging.getLogger(__name__)

SparseRow = Dict[int, RawScalar]
PackedVector = Tuple[RawScalar, ...]


class Mode(str, Enum):
    GH = "gh"
    JORDAN = "jordan"
    JORDAN_CORNER = "jordan-corner"
    DERIVATION = "derivation"
    JORDAN_DERIVATION = "jordan-derivation"

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls(text)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise UsageError(f"mode must be one of {choices}; got {text!r}")


# Row families emitted by each mode
_FAMILIES = {
    Mode.GH: ("gh",),
    Mode.JORDAN: ("jordan",),
    Mode.JORDAN_CORNER: ("jordan", "corner"),
    Mode.DERIVATION: ("gh", "tie"),
    Mode.JORDAN_DERIVATION: ("jordan", "tie"),
}

GH_BRANCHES = ("g-first", "h-first")
TIE_BRANCHES = ("f=g", "g=h")


@dataclass(frozen=True)
class RowTag:
    """Provenance of one constraint row.

    kind "gh"/"jordan": ``left``/``right`` are the basis ordinals of the pair.
    kind "corner": ``left == right`` is the ordinal of the diagonal unit.
    kind "tie": ``left`` is the basis ordinal whose image column is tied.
    ``coord`` is the output coordinate m in every case.
    """

    kind: str
    branch: str
    left: int
    right: Optional[int]
    coord: int

    def to_json(self, algebra: Algebra) -> dict:
        out = {"kind": self.kind, "branch": self.branch,
               "left": str(algebra.basis[self.left])}
        if self.right is not None:
            out["right"] = str(algebra.basis[self.right])
        out["coord"] = str(algebra.basis[self.coord])
        return out


def tag_is_valid(algebra: Algebra, tag: RowTag) -> bool:
    dim = algebra.dim
    if not 0 <= tag.coord < dim or not 0 <= tag.left < dim:
        return False
    if tag.kind == "gh":
        return tag.branch in GH_BRANCHES and tag.right is not None and 0 <= tag.right < dim
    if tag.kind == "jordan":
        return tag.branch == "jordan" and tag.right is not None and 0 <= tag.right < dim
    if tag.kind == "corner":
        return tag.right == tag.left and algebra.basis[tag.left].is_diagonal
    if tag.kind == "tie":
        return tag.branch in TIE_BRANCHES and tag.right is None
    return False


@dataclass
class ConstraintSystem:
    algebra: Algebra
    mode: Mode
    rows: List[SparseRow]
    tags: List[RowTag]
    n_cols: int

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def entries(self) -> Iterator[Tuple[int, int, RawScalar]]:
        """(row, column, value) triplets of the nonzero entries"""
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                yield i, j, row[j]

    def residual(self, v: Sequence[RawScalar]) -> Optional[int]:
        """Index of the first row not annihilating v, or None"""
        if len(v) != self.n_cols:
            raise LayoutError(f"vector of length {len(v)} against {self.n_cols} columns")
        dom = self.algebra.domain
        for i, row in enumerate(self.rows):
            acc = dom.zero()
            for j, a in row.items():
                if v[j] != 0:
                    acc = dom.add(acc, dom.mul(a, v[j]))
            if acc != 0:
                return i
        return None

    def satisfied_by(self, v: Sequence[RawScalar]) -> bool:
        return self.residual(v) is None


class _RowBuilder:
    """Accumulates the coordinate rows generated by one basis pair."""

    def __init__(self, algebra: Algebra):
        self.dom = algebra.domain
        self.dim = algebra.dim
        self.rows: List[SparseRow] = [dict() for _ in range(self.dim)]

    def add(self, m: int, col: int, value: RawScalar) -> None:
        row = self.rows[m]
        row[col] = self.dom.add(row.get(col, self.dom.zero()), value)

    def finish(self) -> List[SparseRow]:
        return [{c: v for c, v in row.items() if v != 0} for row in self.rows]


def _gh_rows(algebra: Algebra, k: int, l: int, branch: str) -> List[SparseRow]:
    """[f(b_k b_l) - g(b_k) b_l - b_k h(b_l)]_m, with g and h swapped for h-first"""
    dom, dim = algebra.domain, algebra.dim
    first, second = (1, 2) if branch == "g-first" else (2, 1)
    rb = _RowBuilder(algebra)
    for q, c in algebra.product_terms(k, l):
        for m in range(dim):
            rb.add(m, column_index(dim, 0, m, q), c)
    for r in range(dim):
        for m, c in algebra.product_terms(r, l):
            rb.add(m, column_index(dim, first, r, k), dom.neg(c))
        for m, c in algebra.product_terms(k, r):
            rb.add(m, column_index(dim, second, r, l), dom.neg(c))
    return rb.finish()


def _jordan_rows(algebra: Algebra, k: int, l: int) -> List[SparseRow]:
    """[f(b_k o b_l) - g(b_k) o b_l - b_k o h(b_l)]_m"""
    dom, dim = algebra.domain, algebra.dim
    rb = _RowBuilder(algebra)
    for q, c in algebra.product_terms(k, l) + algebra.product_terms(l, k):
        for m in range(dim):
            rb.add(m, column_index(dim, 0, m, q), c)
    for r in range(dim):
        for m, c in algebra.product_terms(r, l) + algebra.product_terms(l, r):
            rb.add(m, column_index(dim, 1, r, k), dom.neg(c))
        for m, c in algebra.product_terms(k, r) + algebra.product_terms(r, k):
            rb.add(m, column_index(dim, 2, r, l), dom.neg(c))
    return rb.finish()


def _corner_rows(algebra: Algebra, d: int) -> List[SparseRow]:
    """[f(e_ii) - g(e_ii) e_ii - e_ii h(e_ii)]_m"""
    dom, dim = algebra.domain, algebra.dim
    rb = _RowBuilder(algebra)
    for m in range(dim):
        rb.add(m, column_index(dim, 0, m, d), dom.one())
    for r in range(dim):
        for m, c in algebra.product_terms(r, d):
            rb.add(m, column_index(dim, 1, r, d), dom.neg(c))
        for m, c in algebra.product_terms(d, r):
            rb.add(m, column_index(dim, 2, r, d), dom.neg(c))
    return rb.finish()


def _tie_rows(algebra: Algebra, k: int, branch: str) -> List[SparseRow]:
    dom, dim = algebra.domain, algebra.dim
    a, b = (0, 1) if branch == "f=g" else (1, 2)
    return [
        {column_index(dim, a, m, k): dom.one(), column_index(dim, b, m, k): dom.neg(dom.one())}
        for m in range(dim)
    ]


def assemble(algebra: Algebra, mode: Mode) -> ConstraintSystem:
    """Emit every constraint row of the given mode, redundant ones included"""
    mode = Mode(mode)
    dim = algebra.dim
    rows: List[SparseRow] = []
    tags: List[RowTag] = []

    def extend(kind, branch, left, right, block):
        for m, row in enumerate(block):
            rows.append(row)
            tags.append(RowTag(kind, branch, left, right, m))

    for family in _FAMILIES[mode]:
        if family == "gh":
            for k in range(dim):
                for l in range(dim):
                    for branch in GH_BRANCHES:
                        extend("gh", branch, k, l, _gh_rows(algebra, k, l, branch))
        elif family == "jordan":
            for k in range(dim):
                for l in range(dim):
                    extend("jordan", "jordan", k, l, _jordan_rows(algebra, k, l))
        elif family == "corner":
            for b in algebra.diagonal:
                extend("corner", "corner", b.ordinal, b.ordinal, _corner_rows(algebra, b.ordinal))
        elif family == "tie":
            for branch in TIE_BRANCHES:
                for k in range(dim):
                    extend("tie", branch, k, None, _tie_rows(algebra, k, branch))

    system = ConstraintSystem(algebra, mode, rows, tags, packed_length(algebra))
    logger.debug("Assembled %s/%s over %s: %d rows x %d cols",
                 algebra.name, mode.value, algebra.domain.spec, system.n_rows, system.n_cols)
    return system


@dataclass
class SolutionSpace:
    algebra: Algebra
    mode: Mode
    basis: List[PackedVector]
    system: ConstraintSystem = field(repr=False)
    rank: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    def triples(self):
        return [triple_unpack(v, self.algebra) for v in self.basis]

    def combine(self, coeffs: Sequence[RawScalar]) -> PackedVector:
        """Linear combination of the basis vectors"""
        if len(coeffs) != self.dim:
            raise LayoutError(f"{len(coeffs)} coefficients for a {self.dim}-dimensional space")
        dom = self.algebra.domain
        out = [dom.zero()] * self.system.n_cols
        for alpha, v in zip(coeffs, self.basis):
            if alpha == 0:
                continue
            for j, a in enumerate(v):
                if a != 0:
                    out[j] = dom.add(out[j], dom.mul(alpha, a))
        return tuple(out)

    def random_member(self, rng) -> PackedVector:
        dom = self.algebra.domain
        return self.combine([dom.random_value(rng) for _ in range(self.dim)])

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra.name,
            "field": self.algebra.domain.spec,
            "mode": self.mode.value,
            "dim": self.dim,
            "basis": [t.to_json() for t in self.triples()],
        }


def _eliminate(target: SparseRow, pivot_row: SparseRow, col: int, dom,
               on_change=None) -> None:
    """target -= target[col] * pivot_row, in place (pivot_row[col] == 1)"""
    factor = target[col]
    for j, v in pivot_row.items():
        new = dom.sub(target.get(j, dom.zero()), dom.mul(factor, v))
        had = j in target
        if new == 0:
            if had:
                del target[j]
                if on_change:
                    on_change(j, False)
        else:
            target[j] = new
            if not had and on_change:
                on_change(j, True)


def null_space(system: ConstraintSystem) -> SolutionSpace:
    """Exact RREF null-space basis of the system.

    Columns are pivoted left to right; among the rows holding the current
    column the one with the fewest nonzeros wins, ties broken by row index.
    """
    dom = system.algebra.domain
    n_cols = system.n_cols

    active: Dict[int, SparseRow] = {i: dict(r) for i, r in enumerate(system.rows) if r}
    col_rows: Dict[int, set] = defaultdict(set)
    for i, row in active.items():
        for j in row:
            col_rows[j].add(i)

    pivots: Dict[int, SparseRow] = {}
    for c in range(n_cols):
        candidates = sorted(col_rows.get(c, ()))
        if not candidates:
            continue
        p = min(candidates, key=lambda i: (len(active[i]), i))
        prow = active.pop(p)
        for j in prow:
            col_rows[j].discard(p)

        inv = dom.inv(prow[c])
        prow = {j: dom.mul(v, inv) for j, v in prow.items()}

        for i in candidates:
            if i == p:
                continue
            row = active[i]

            def track(j, added, i=i):
                if added:
                    col_rows[j].add(i)
                else:
                    col_rows[j].discard(i)

            _eliminate(row, prow, c, dom, track)
            if not row:
                del active[i]

        # keep earlier pivot rows reduced
        for prev in pivots.values():
            if c in prev:
                _eliminate(prev, prow, c, dom)
        pivots[c] = prow

    free_cols = [c for c in range(n_cols) if c not in pivots]
    free_entries: Dict[int, List[Tuple[int, RawScalar]]] = defaultdict(list)
    for pc, prow in pivots.items():
        for j, v in prow.items():
            if j != pc:
                free_entries[j].append((pc, v))

    basis: List[PackedVector] = []
    for j in free_cols:
        v = [dom.zero()] * n_cols
        v[j] = dom.one()
        for pc, a in free_entries.get(j, ()):
            v[pc] = dom.neg(a)
        basis.append(tuple(v))

    logger.debug("Null space of %s/%s: rank %d, nullity %d",
                 system.algebra.name, system.mode.value, len(pivots), len(basis))
    return SolutionSpace(system.algebra, system.mode, basis, system, rank=len(pivots))


def solve(algebra: Algebra, mode: Mode) -> SolutionSpace:
    start = time.perf_counter()
    space = null_space(assemble(algebra, mode))
    logger.info("Solved %s/%s over %s: dim %d (%.2fs)", algebra.name, Mode(mode).value,
                algebra.domain.spec, space.dim, time.perf_counter() - start)
    return space


def _solve_task(task: Tuple[str, str, str]) -> SolutionSpace:
    algebra_spec, field_spec, mode = task
    return solve(parse_algebra(algebra_spec, parse_domain(field_spec)), Mode(mode))


def solve_many(algebra: Algebra, modes: Sequence[Mode], jobs: int = 1) -> Dict[Mode, SolutionSpace]:
    """Solve independent modes, in a process pool when jobs > 1"""
    modes = [Mode(m) for m in modes]
    if jobs <= 1 or len(modes) <= 1:
        return {m: solve(algebra, m) for m in modes}
    tasks = [(algebra.name, algebra.domain.spec, m.value) for m in modes]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        spaces = list(pool.map(_solve_task, tasks))
    return dict(zip(modes, spaces))


@dataclass
class ComparisonReport:
    relation: str
    dim_a: int
    dim_b: int
    witness: Optional[PackedVector]
    algebra: Algebra = field(repr=False)

    def to_json(self) -> dict:
        out = {"relation": self.relation, "dim_a": self.dim_a, "dim_b": self.dim_b}
        if self.witness is not None:
            out["witness"] = triple_unpack(self.witness, self.algebra).to_json()
        return out


def _first_outside(space: SolutionSpace, other: SolutionSpace) -> Optional[PackedVector]:
    for v in space.basis:
        if not other.system.satisfied_by(v):
            return v
    return None


def compare(a: SolutionSpace, b: SolutionSpace) -> ComparisonReport:
    """Decide containment both ways by residuals against the other's system"""
    if a.algebra != b.algebra or a.system.n_cols != b.system.n_cols:
        raise LayoutError(
            f"cannot compare spaces on {a.algebra!r} and {b.algebra!r}"
        )
    a_not_b = _first_outside(a, b)
    b_not_a = _first_outside(b, a)
    if a_not_b is None and b_not_a is None:
        relation, witness = "equal", None
    elif b_not_a is None:
        relation, witness = "a_strict_superset", a_not_b
    elif a_not_b is None:
        relation, witness = "b_strict_superset", b_not_a
    else:
        relation, witness = "incomparable", a_not_b
    return ComparisonReport(relation, a.dim, b.dim, witness, a.algebra)
