import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from weightlab import (
    AsymmetricDistance,
    EmptyRadiusRange,
    InvalidParams,
    NonpositiveMeasure,
    ParseError,
    TriangleViolation,
    ZeroDistanceDistinctPoints,
    annular_decay_constant,
    build_space,
    doubling_constant,
    enumerate_balls,
    generate,
    load,
    save,
)


class TestBuildSpace:
    def test_two_point(self, two_point):
        assert two_point.n == 2
        assert two_point.diameter == 1.0

    def test_collinear_coordinates(self, three_path):
        assert three_path.dist[0, 2] == 2.0
        assert three_path.dist[0, 1] == 1.0

    def test_triangle_violation_reports_worst_triple(self):
        d = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]])
        with pytest.raises(TriangleViolation) as exc:
            build_space(d, "explicit-matrix", np.ones(3))
        assert exc.value.triple == (0, 1, 2)
        assert exc.value.excess == pytest.approx(3.0)

    def test_asymmetric(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(AsymmetricDistance):
            build_space(d, "explicit-matrix", np.ones(2))

    def test_zero_distance_distinct_points(self):
        d = np.zeros((2, 2))
        with pytest.raises(ZeroDistanceDistinctPoints):
            build_space(d, "explicit-matrix", np.ones(2))

    def test_nonpositive_measure(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(NonpositiveMeasure):
            build_space(d, "explicit-matrix", [1.0, 0.0])

    def test_immutability(self, two_point):
        with pytest.raises(ValueError):
            two_point.dist[0, 1] = 3.0

    def test_prefix_measure_strictly_increasing_to_total(self):
        space = generate("random-points", {"n": 11, "measure": "random"}, seed=6)
        fam = space.ball_family
        assert np.all(np.diff(fam.prefix_measure, axis=1) > 0.0)
        assert fam.prefix_measure[:, -1] == pytest.approx(
            space.total_mass, rel=1e-15)


class TestEnumerateBalls:
    def test_two_point(self, two_point):
        got = {tuple(b.members) for b in enumerate_balls(two_point)}
        assert got == {(0,), (1,), (0, 1)}

    def test_three_path(self, three_path):
        got = {tuple(b.members) for b in enumerate_balls(three_path)}
        assert got == {(0,), (1,), (2,), (0, 1), (1, 2), (0, 1, 2)}

    def test_one_point(self, one_point):
        balls = enumerate_balls(one_point)
        assert len(balls) == 1 and tuple(balls[0].members) == (0,)

    def test_no_dedupe_counts_ranks(self, two_point):
        assert len(enumerate_balls(two_point, dedupe=False)) == 4

    def test_matches_naive_enumeration(self):
        space = generate("random-points", {"n": 17, "dim": 2}, seed=3)
        fast = {tuple(b.members) for b in enumerate_balls(space)}
        naive = {tuple(m) for m in oracles.balls_naive(space)}
        assert fast == naive

    @given(st.integers(0, 2**31 - 1), st.floats(0.01, 10.0))
    def test_ball_completeness(self, seed, r):
        # every set {y: dist(x, y) < r} is the member set of some ball
        space = generate("random-points", {"n": 9, "dim": 2},
                         seed=seed % 1000)
        realized = {tuple(b.members) for b in enumerate_balls(space)}
        for x in range(space.n):
            members = tuple(np.nonzero(space.dist[x] < r)[0])
            if members:
                assert members in realized


class TestDoubling:
    def test_two_point_witness(self, two_point):
        res = doubling_constant(two_point)
        assert res.value == 2.0
        assert res.alt_value == 1.0  # witness radius r in (1/2, 1]
        assert res.witness.center == 0

    def test_one_point(self, one_point):
        assert doubling_constant(one_point).value == 1.0

    @pytest.mark.parametrize("n", [5, 12, 30])
    def test_grid_matches_bruteforce(self, n):
        space = generate("path", {"n": n, "measure": "random"}, seed=n)
        got = doubling_constant(space).value
        want = oracles.doubling_naive(space)
        assert got == pytest.approx(want, rel=1e-12)

    def test_uniform_1d_grid(self):
        space = build_space(np.arange(8.0), "l1", np.full(8, 1 / 8))
        assert doubling_constant(space).value == pytest.approx(
            oracles.doubling_naive(space), rel=1e-12)

    def test_at_least_one_and_one_only_for_singleton(self):
        for seed in range(5):
            space = generate("random-points", {"n": 6}, seed=seed)
            assert doubling_constant(space).value > 1.0


class TestAnnularDecay:
    def test_one_point_zero(self, one_point):
        assert annular_decay_constant(one_point, 1.0, 1.0).value == 0.0

    def test_two_point_worked(self, two_point):
        res = annular_decay_constant(two_point, alpha=1.0, r_min=2.0)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.witness_delta == pytest.approx(0.5, abs=1e-12)
        assert res.witness_center == 0
        assert res.witness_radius == 2.0

    @pytest.mark.parametrize("n,alpha", [(6, 1.0), (9, 0.5), (13, 1.0)])
    def test_uniform_grid_matches_oracle(self, n, alpha):
        space = build_space(np.arange(float(n)), "l1", np.full(n, 1.0 / n))
        r_min = 2.0  # twice the grid step
        got = annular_decay_constant(space, alpha, r_min).value
        want = oracles.annular_naive(space, alpha, r_min)
        assert got == pytest.approx(want, rel=1e-12)

    def test_random_spaces_match_oracle(self):
        rng = np.random.default_rng(0)
        for seed in range(6):
            space = generate("random-points",
                             {"n": 8, "measure": "random"}, seed=seed)
            r_min = float(rng.uniform(0.2, 1.0)) * space.diameter
            alpha = float(rng.uniform(0.0, 1.0))
            got = annular_decay_constant(space, alpha, r_min).value
            want = oracles.annular_naive(space, alpha, r_min)
            assert got == pytest.approx(want, rel=1e-12)

    def test_monotone_in_r_min_and_alpha(self):
        space = generate("random-points", {"n": 10}, seed=5)
        r_grid = np.linspace(0.1, 2.0, 8) * space.diameter
        vals = [annular_decay_constant(space, 1.0, float(r)).value for r in r_grid]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        a_grid = np.linspace(0.0, 1.0, 6)
        vals = [annular_decay_constant(space, float(a), 1.0).value for a in a_grid]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_empty_radius_range(self, two_point):
        with pytest.raises(EmptyRadiusRange):
            annular_decay_constant(two_point, 1.0, 2.0000001)

    def test_alpha_range_validated(self, two_point):
        with pytest.raises(InvalidParams):
            annular_decay_constant(two_point, 1.5, 1.0)


class TestGenerate:
    def test_grid_2x2_linf(self):
        space = generate("grid", {"nx": 2, "ny": 2, "metric": "linf"}, seed=0)
        assert space.n == 4
        assert space.diameter == 1.0

    def test_snowflake_two_point_unit_distance(self, two_point):
        flaked = generate("snowflake", {"base": two_point, "eps": 0.5}, seed=0)
        assert flaked.dist[0, 1] == 1.0  # 1**eps == 1

    def test_snowflake_is_metric(self):
        base = generate("random-points", {"n": 12}, seed=2)
        flaked = generate("snowflake", {"base": base, "eps": 0.4}, seed=0)
        build_space(flaked.dist, "explicit-matrix", flaked.measure)  # revalidates

    def test_determinism(self):
        a = generate("random-points", {"n": 16, "dim": 2}, seed=7)
        b = generate("random-points", {"n": 16, "dim": 2}, seed=7)
        assert np.array_equal(a.dist, b.dist)
        assert np.array_equal(a.measure, b.measure)

    def test_tree_valid(self):
        space = generate("tree", {"n": 13}, seed=1)
        build_space(space.dist, "explicit-matrix", space.measure)

    def test_invalid_params(self, two_point):
        with pytest.raises(InvalidParams):
            generate("snowflake", {"base": None, "eps": 0.5}, seed=0)
        with pytest.raises(InvalidParams):
            generate("snowflake", {"base": two_point, "eps": 1.5}, seed=0)
        with pytest.raises(InvalidParams):
            generate("no-such-kind", {}, seed=0)


class TestDocuments:
    def test_round_trip_bit_exact(self, tmp_path):
        space = generate("random-points", {"n": 9, "dim": 2,
                                           "measure": "random"}, seed=4)
        w = np.exp(np.random.default_rng(1).uniform(-1, 1, 9))
        path = tmp_path / "doc.json"
        save(space, {"w": w}, path)
        loaded, weights = load(path)
        assert np.array_equal(loaded.dist, space.dist)
        assert np.array_equal(loaded.measure, space.measure)
        assert np.array_equal(weights["w"], w)
        assert loaded.metric_kind == space.metric_kind

    def test_missing_measure_is_parse_error(self, tmp_path):
        doc = {"points": [{"id": 0}], "metric": "explicit-matrix",
               "distances": [[0.0]]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError) as exc:
            load(path)
        assert exc.value.field == "measure"

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "garbage.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load(path)

    def test_documented_sample_is_three_point_path(self, three_path):
        space, weights = load("docs/sample_space.json")
        assert np.array_equal(space.dist, three_path.dist)
        assert np.array_equal(space.measure, three_path.measure)
        assert "w" in weights
