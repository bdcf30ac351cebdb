import pytest

from src.algebra import build_mn, build_tn
from src.errors import BudgetExceededError, PreconditionError
from src.linmap import DerivationTriple, LinearMap, inner_derivation, jordan_mult_operator
from src.oracle import (
    bilinearity_agreement,
    brute_force_null_space_dim,
    check_space_soundness,
    check_swap_lemmas,
    counterexample_t2,
    defect_for,
    enumerate_tags,
    is_gh_derivation,
    is_jordan_gh_derivation,
    naive_constraint_system,
    oracle_null_space_dim,
    pair_family_audit,
    regenerate_row,
    swap_lemma_suite,
)
from src.scalar import ScalarDomain
from src.solver import Mode, assemble, solve


class TestCheckers:
    def test_counterexample_is_jordan_but_not_gh(self, q):
        t = counterexample_t2(q)
        t2 = t.algebra
        jordan = is_jordan_gh_derivation(t, trials=200, seed=0)
        assert jordan.passed
        assert jordan.witness is None

        gh = is_gh_derivation(t, trials=200, seed=0)
        assert not gh.passed
        assert not gh.basis_passed
        assert gh.witness.x == t2.basis_element((1, 1))
        assert gh.witness.y == t2.basis_element((1, 1))
        assert gh.witness.branch == "g-first"
        assert gh.witness.defect == -t2.basis_element((1, 2))

    def test_counterexample_over_prime_field(self, f7):
        t = counterexample_t2(f7)
        assert is_jordan_gh_derivation(t, trials=50).passed
        report = is_gh_derivation(t, trials=50)
        assert report.witness.defect.to_json() == {"(1,2)": "6"}

    def test_witness_defect_recomputes(self, q, rng):
        t = DerivationTriple.random(build_tn(2, q), rng)
        report = is_gh_derivation(t, trials=10, seed=3)
        assert not report.passed
        w = report.witness
        assert defect_for(t, w.x, w.y, w.branch) == w.defect
        assert not w.defect.is_zero()

    def test_inner_derivation_passes_both(self, t3, rng):
        d = inner_derivation(t3.random_element(rng))
        t = DerivationTriple(d, d, d)
        assert is_gh_derivation(t, trials=50, seed=7).passed
        assert is_jordan_gh_derivation(t, trials=50, seed=7).passed

    def test_same_seed_same_report(self, t2, rng):
        t = DerivationTriple.random(t2, rng)
        a = is_jordan_gh_derivation(t, trials=20, seed=11).to_json()
        b = is_jordan_gh_derivation(t, trials=20, seed=11).to_json()
        assert a == b

    def test_report_json_keys(self, q):
        data = is_gh_derivation(counterexample_t2(q), trials=5, seed=42).to_json()
        assert data["passed"] is False
        assert data["seed"] == 42
        assert data["witness"]["x"] == {"(1,1)": "1"}
        assert data["witness"]["defect"] == {"(1,2)": "-1"}

    def test_zero_trials_rejected(self, q):
        with pytest.raises(PreconditionError):
            is_gh_derivation(counterexample_t2(q), trials=0)


class TestNaiveSystem:
    @pytest.mark.parametrize("mode", list(Mode))
    def test_rows_match_assembled_rows(self, t2, mode):
        naive = naive_constraint_system(t2, mode)
        fast = assemble(t2, mode)
        assert naive.tags == fast.tags
        assert naive.rows == fast.rows

    def test_row_provenance_on_t3(self, t3):
        system = assemble(t3, Mode.JORDAN_CORNER)
        for i in range(0, system.n_rows, 37):
            assert regenerate_row(t3, system.tags[i]) == system.rows[i]

    def test_enumerate_tags_counts(self, t2):
        assert len(enumerate_tags(t2, Mode.GH)) == 2 * t2.dim ** 2
        assert len(enumerate_tags(t2, Mode.JORDAN_CORNER)) == t2.dim ** 2 + 2

    @pytest.mark.parametrize("mode", [Mode.GH, Mode.JORDAN, Mode.JORDAN_CORNER, Mode.DERIVATION])
    def test_dense_nullity_matches_solver(self, t3, mode):
        space = solve(t3, mode)
        assert brute_force_null_space_dim(space.system) == space.dim

    def test_dense_nullity_over_prime_field(self, f7):
        space = solve(build_tn(2, f7), Mode.JORDAN)
        assert brute_force_null_space_dim(naive_constraint_system(space.algebra, Mode.JORDAN)) == space.dim

    def test_dense_nullity_on_m2(self, m2):
        for mode in (Mode.GH, Mode.JORDAN):
            space = solve(m2, mode)
            assert brute_force_null_space_dim(space.system) == space.dim

    def test_budget(self, q):
        system = assemble(build_tn(5, q), Mode.JORDAN)
        with pytest.raises(BudgetExceededError):
            brute_force_null_space_dim(system)


class TestSuites:
    def test_soundness_of_every_mode(self, t2):
        for mode in Mode:
            assert check_space_soundness(solve(t2, mode), trials=30, seed=1).passed

    def test_pair_family_audit(self, t2):
        assert pair_family_audit(solve(t2, Mode.JORDAN_CORNER)).clean
        audit = pair_family_audit(solve(t2, Mode.JORDAN))
        assert not audit.clean
        assert audit.families["diagonal-same"]["failed"] > 0
        assert "diagonal-distinct" in audit.families
        assert audit.to_json()["mode"] == "jordan"

    def test_bilinearity_agreement(self, t2):
        spaces = [solve(t2, Mode.GH), solve(t2, Mode.JORDAN)]
        counts = bilinearity_agreement(spaces, n_triples=20, seed=5)
        assert counts["triples"] == 20
        assert counts["disagreements"] == 0
        assert counts["gh_passed"] >= 5
        assert counts["jordan_passed"] > counts["gh_passed"]

    def test_swap_lemmas_on_m2(self, m2):
        reports = swap_lemma_suite(solve(m2, Mode.JORDAN), trials=40, seed=2)
        assert reports
        for report in reports:
            assert report.passed
            assert report.qualifying["pro1"] == 40
            assert report.skipped == 0

    def test_swap_lemmas_on_counterexample(self, q):
        report = check_swap_lemmas(counterexample_t2(q), trials=300, seed=0)
        assert report.witness is None
        assert report.qualifying["pro1"] > 0
        assert report.skipped > 0

    def test_swap_lemmas_need_jordan_triple(self, t2):
        t = DerivationTriple(LinearMap.zero(t2), LinearMap.identity(t2), LinearMap.zero(t2))
        with pytest.raises(PreconditionError):
            check_swap_lemmas(t, trials=5)

    def test_jordan_multiplier_pair(self, m2):
        # x -> 1 o x is 2 id, so (0, 2 id, -2 id) kills every Jordan defect
        g = jordan_mult_operator(m2.unit_element())
        t = DerivationTriple(LinearMap.zero(m2), g, -g)
        assert is_jordan_gh_derivation(t, trials=20).passed


ORACLE_GRID_MODES = [Mode.GH, Mode.JORDAN, Mode.JORDAN_CORNER]


@pytest.mark.parametrize("field", ["Q", "Fp:7"])
@pytest.mark.parametrize("builder,n", [(build_tn, 3), (build_mn, 2)], ids=["tn:3", "mn:2"])
@pytest.mark.parametrize("mode", ORACLE_GRID_MODES, ids=lambda m: m.value)
def test_naive_oracle_grid(field, builder, n, mode):
    domain = ScalarDomain.rationals() if field == "Q" else ScalarDomain.prime_field(7)
    algebra = builder(n, domain)
    assert oracle_null_space_dim(algebra, mode) == solve(algebra, mode).dim


def test_naive_oracle_sees_assembly_errors(t2, monkeypatch):
    import src.solver as solver_module

    real_assemble = solver_module.assemble

    def assemble_with_extra_row(algebra, mode):
        system = real_assemble(algebra, mode)
        system.rows.append({0: algebra.domain.one()})
        system.tags.append(system.tags[0])
        return system

    monkeypatch.setattr(solver_module, "assemble", assemble_with_extra_row)
    wrong = solve(t2, Mode.GH)
    assert wrong.dim == 3
    assert oracle_null_space_dim(t2, Mode.GH) == 4


def test_naive_oracle_budget_checked_before_building(q):
    with pytest.raises(BudgetExceededError):
        oracle_null_space_dim(build_tn(5, q), Mode.GH)
