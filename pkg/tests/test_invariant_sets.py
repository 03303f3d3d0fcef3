import numpy as np
import pytest

from conftest import make_map, random_valid_map
from greenp2 import ProjPoint, parse_poly
from greenp2.invariant_sets import (
    classify,
    conjugacy_check,
    exceptional_sets,
    invariant_lines,
    invariant_points,
    line_restriction,
    transition_matrix,
)
from greenp2.multiplicities import jacobian_multiplicity


def line_names(lines):
    return sorted(L.form.to_string() for L in lines)


class TestInvariantLines:
    def test_power_map_three_lines(self, power_map):
        lines = invariant_lines(power_map)
        assert line_names(lines) == ["t", "w", "z"]
        for L in lines:
            assert L.lam == pytest.approx(1.0)
            assert L.residual <= 1e-7

    def test_worked_map_single_line(self, worked_map):
        lines = invariant_lines(worked_map)
        assert line_names(lines) == ["t"]
        assert lines[0].lam == pytest.approx(1.0)

    def test_lattes_no_lines(self, lattes):
        assert invariant_lines(lattes) == []

    def test_generic_map_no_lines(self):
        rng = np.random.default_rng(2)
        f = random_valid_map(rng)
        assert invariant_lines(f) == []

    def test_total_invariance_of_fibers(self, worked_map):
        """All four preimages of a point on the line stay on the line."""
        line = invariant_lines(worked_map)[0]
        for p in line.sample_points(20, seed=5):
            fib = worked_map.preimages(p)
            assert fib.complete
            for x, _ in fib.preimages:
                assert abs(np.dot(line.form.coeffs, x.coords)) < 1e-6

    def test_jacobian_order_along_lines(self, power_map):
        """Generic points of a totally invariant line carry order d - 1."""
        for line in invariant_lines(power_map):
            for p in line.sample_points(5, seed=3):
                assert jacobian_multiplicity(power_map, p, 1) == 1


class TestLineRestriction:
    def test_worked_map_swap(self, worked_map):
        line = invariant_lines(worked_map)[0]
        rest = line_restriction(worked_map, line)
        assert rest.residual < 1e-9
        # restriction of [2zt+w^2 : z^2 : t^2] to {t=0} swaps the corners
        img = rest.apply((1.0, 0.0))
        assert abs(img[0]) < 1e-9 and abs(abs(img[1]) - 1.0) < 1e-9


class TestInvariantPoints:
    def test_power_map_corners(self, power_map):
        pts = invariant_points(power_map)
        assert len(pts) == 3
        corners = [ProjPoint(v) for v in np.eye(3)]
        for c in corners:
            assert any(p.dist(c) < 1e-4 for p in pts)

    def test_worked_map_point_and_swap_orbit(self, worked_map):
        pts = invariant_points(worked_map)
        assert len(pts) == 3
        assert any(p.dist(ProjPoint([0, 0, 1])) < 1e-4 for p in pts)
        assert any(p.dist(ProjPoint([1, 0, 0])) < 1e-4 for p in pts)
        assert any(p.dist(ProjPoint([0, 1, 0])) < 1e-4 for p in pts)

    def test_lattes_empty(self, lattes):
        assert invariant_points(lattes) == []

    def test_generic_map_empty(self):
        rng = np.random.default_rng(12)
        assert invariant_points(random_valid_map(rng)) == []


class TestTransitionMatrix:
    def test_power_map_diagonal(self, power_map):
        tm = transition_matrix(power_map)
        assert len(tm.components) == 3
        assert np.array_equal(tm.matrix, 2 * np.eye(3, dtype=int))
        assert tm.rho == pytest.approx(2.0, abs=1e-9)
        assert np.allclose(tm.perron, [1.0, 1.0, 1.0])

    def test_user_supplied_component(self):
        rng = np.random.default_rng(4)
        from greenp2.polys import HomogPoly3
        from greenp2 import ProjMap

        while True:
            P = HomogPoly3(2, rng.standard_normal(6) + 1j * rng.standard_normal(6))
            Q = HomogPoly3(2, rng.standard_normal(6) + 1j * rng.standard_normal(6))
            try:
                f = ProjMap.validate([P, Q, parse_poly("t^2")], sphere_samples=200)
                break
            except Exception:
                continue
        tm = transition_matrix(f, components=[parse_poly("t")])
        assert tm.matrix.tolist() == [[2]]
        assert tm.rho == pytest.approx(2.0, abs=1e-9)

    def test_two_supplied_components_on_structured_row(self):
        from greenp2 import configuration_map

        f = configuration_map("2-2", 2, rng_seed=6)  # [z^2+tP : w^2 : t^2]
        tm = transition_matrix(f, components=[parse_poly("w"), parse_poly("t")])
        assert tm.matrix.tolist() == [[2, 0], [0, 2]]
        assert tm.rho == pytest.approx(2.0, abs=1e-9)

    def test_invalid_component_rejected(self, power_map):
        from greenp2.errors import ComponentInvalid

        with pytest.raises(ComponentInvalid):
            transition_matrix(power_map, components=[parse_poly("z+w+t")])

    def test_rho_matches_eigenvalue_oracle(self, power_map, worked_map, lattes):
        for f in (power_map, worked_map, lattes):
            tm = transition_matrix(f)
            if tm.matrix.size == 0:
                continue
            oracle = max(abs(np.linalg.eigvals(tm.matrix.astype(float))), default=0.0)
            assert tm.rho == pytest.approx(oracle, abs=1e-5)
            assert tm.rho <= f.degree + 1e-9

    def test_rho_maximal_iff_invariant_union(self, power_map, worked_map, lattes):
        """rho reaches the degree exactly when a totally invariant union exists."""
        for f, has_lines in ((power_map, True), (worked_map, True), (lattes, False)):
            tm = transition_matrix(f)
            if has_lines:
                assert abs(tm.rho - f.degree) <= 1e-9
            else:
                assert tm.rho < f.degree - 0.5

    def test_perron_vector_identity(self, worked_map):
        tm = transition_matrix(worked_map)
        # t^T a = rho a for the reported vector
        lhs = tm.matrix.T.astype(float) @ tm.perron
        assert np.allclose(lhs, tm.rho * tm.perron, atol=1e-6)


class TestExceptionalSets:
    def test_power_map_full_structure(self, power_map):
        sets = exceptional_sets(power_map, 3)
        assert len(sets.e1_lines) == 3
        assert len(sets.e2_points) == 3
        assert all(kind == "on_E1" for _, kind in sets.e2_points)
        assert all(sets.line_order_checks)

    def test_worked_map_excludes_invariant_point(self, worked_map):
        """The totally invariant point with slow contraction stays out."""
        sets = exceptional_sets(worked_map, 3)
        assert line_names(sets.e1_lines) == ["t"]
        pts = [p for p, _ in sets.e2_points]
        assert len(pts) == 2
        assert all(
            any(p.dist(ProjPoint(c)) < 1e-4 for p in pts) for c in ([1, 0, 0], [0, 1, 0])
        )
        corner = ProjPoint([0, 0, 1])
        assert all(p.dist(corner) > 1e-3 for p in pts)

    def test_lattes_empty(self, lattes):
        sets = exceptional_sets(lattes, 3)
        assert sets.e1_lines == [] and sets.e2_points == []


class TestClassify:
    def test_power_map_row(self, power_map):
        row = classify(exceptional_sets(power_map, 3))
        assert row.row_id == "3-3"
        assert row.label == "[z^d:w^d:t^d]"
        assert sorted(len(ix) for ix in row.incidence) == [2, 2, 2]

    def test_no_structure_row(self, lattes):
        row = classify(exceptional_sets(lattes, 3))
        assert row.row_id == "0-0"
        assert "no exceptional structure" in row.label

    def test_one_line_two_points(self):
        from greenp2 import configuration_map

        f = configuration_map("1-2", 2, rng_seed=3)
        row = classify(exceptional_sets(f, 3))
        assert row.row_id == "1-2"
        assert row.label == "[P(z,t):w^d+tQ:t^d]"
        assert sorted(len(ix) for ix in row.incidence) == [1, 1]


class TestConjugacyCheck:
    def test_power_corner_already_normal(self, power_map):
        rep = conjugacy_check(power_map, ProjPoint([0, 0, 1]), terms=5)
        assert rep.kind == "pencil"
        assert rep.deviation < 1e-10

    def test_deviation_decays_geometrically(self):
        f = make_map("z^2+w*t*1", "w^2", "t^2+z*w")
        p = ProjPoint([0, 0, 1])
        d4 = conjugacy_check(f, p, terms=2).deviation
        d8 = conjugacy_check(f, p, terms=8).deviation
        assert d8 <= max(d4 * 2.0 ** -(8 - 2) * 8.0, 1e-11)

    def test_skew_point_checks(self, worked_map):
        """The swap-orbit corner sits on the line; period two, skew form."""
        rep = conjugacy_check(worked_map, ProjPoint([1, 0, 0]), terms=6)
        assert rep.kind == "line_skew"
        assert rep.period == 2
        assert rep.deviation < 1e-6

    def test_rejects_non_periodic(self, power_map):
        from greenp2.errors import NotSuperattracting

        with pytest.raises(NotSuperattracting):
            conjugacy_check(power_map, ProjPoint([2, 1, 1]), terms=4)

    def test_rejects_non_superattracting(self, worked_map):
        from greenp2.errors import NotSuperattracting

        with pytest.raises(NotSuperattracting):
            conjugacy_check(worked_map, ProjPoint([0, 0, 1]), terms=4)

    def test_contraction_series_growth(self, power_map):
        """Contraction orders at an exceptional point grow like alpha * d^n."""
        from greenp2.multiplicities import contraction_order

        p = ProjPoint([0, 0, 1])
        series = [contraction_order(power_map, p, n) for n in range(1, 6)]
        alphas = [series[n] / 2.0 ** (n + 1) for n in range(5)]
        assert min(alphas) >= 0.5
