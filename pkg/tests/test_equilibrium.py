from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from symgame.equilibrium import (build_symmetry_polytope, deviation_report,
                                 kkt_certificate, minimax_exact, nash_function, orbit_to_profile,
                                 profile_to_orbit, project_to_polytope, solve_fixed_point,
                                 support_enumeration_details, support_enumeration_orbits,
                                 team_gradient, team_orbit_gradient, team_orbit_value,
                                 zero_sum_symmetric)
from symgame.errors import BudgetExhausted, NotInDomain, NotTeamGame, NotZeroSum, Unsupported
from symgame.game import (Game, bimatrix, gen_chicken, gen_matching_pennies, gen_rps_extension,
                          gen_zero_sum_embedding)
from symgame.graph import full_symmetry_group
from symgame.symmetry import (OrbitPartition, StrategyProfile, apply_to_profile, group_closure,
                              orbits_from_generators, respects)

from corpus import four_color, random_corpus, random_game, symmetrized_game, random_blockwise


def _four_color_orbits():
    return full_symmetry_group(four_color()).orbits()


def _random_orbit_point(rng, orbits):
    r = np.zeros(orbits.num_orbits)
    for cls in orbits.classes:
        r[list(cls)] = rng.dirichlet(np.ones(len(cls)))
    return r


def _swap_orbits(game):
    N = game.num_players
    return orbits_from_generators(
        game.action_counts,
        [g for g in group_closure(full_symmetry_group(game)) if g.pi != tuple(range(N))][:1])


# -- deviation report -------------------------------------------------------

def test_deviation_examples():
    mp = gen_matching_pennies()
    rep = deviation_report(mp, StrategyProfile.uniform((2, 2)))
    assert rep.exact and rep.epsilon == 0 and rep.values == (0, 0)
    p = Fraction(9, 10)
    rep = deviation_report(gen_chicken(), StrategyProfile(((p, 1 - p), (p, 1 - p))))
    assert rep.epsilon == 0 and rep.values == (Fraction(-1, 10), Fraction(-1, 10))
    s = orbit_to_profile(_four_color_orbits(), (Fraction(2, 7), Fraction(5, 7)))
    rep = deviation_report(four_color(), s)
    assert rep.epsilon == 0 and rep.values[0] == Fraction(20, 7)


def _naive_gaps(game, s):
    """Expected utilities by summing over every profile."""
    out = []
    for i in range(game.num_players):
        av = []
        for a in range(game.action_counts[i]):
            total = 0
            for prof in product(*(range(m) for m in game.action_counts)):
                if prof[i] != a:
                    continue
                w = 1
                for j, b in enumerate(prof):
                    if j != i:
                        w *= s.strategies[j][b]
                total += w * game.payoff(i, prof)
            av.append(total)
        v = sum(p * x for p, x in zip(s.strategies[i], av))
        out.append([x - v for x in av])
    return out


def test_deviation_matches_naive_sum():
    rng = np.random.default_rng(0)
    for game in random_corpus(20, 20):
        s = StrategyProfile(tuple(tuple(Fraction(int(x), 7) for x in rng.multinomial(7, np.ones(m) / m))
                                  for m in game.action_counts))
        rep = deviation_report(game, s)
        assert [list(g) for g in rep.gaps] == _naive_gaps(game, s)
        assert rep.epsilon >= 0 and rep.ws_epsilon >= 0


def test_well_supported_gap():
    # PL1 mixes a best and a worse action against the opponent's pure play
    g = bimatrix([[1, 0], [0, 0]], [[0, 0], [0, 0]])
    s = StrategyProfile(((Fraction(1, 2), Fraction(1, 2)), (1, 0)))
    rep = deviation_report(g, s)
    assert rep.epsilon == Fraction(1, 2) and rep.ws_epsilon == 1


# -- Nash's function --------------------------------------------------------

def test_nash_function_examples():
    mp = gen_matching_pennies()
    out = nash_function(mp, StrategyProfile(((1, 0), (1, 0))))
    assert out.strategies[1] == (Fraction(1, 3), Fraction(2, 3))
    assert out.strategies[0] == (1, 0)
    u = StrategyProfile.uniform((3, 3))
    assert nash_function(gen_rps_extension(2, 3), u) == u
    for s in support_enumeration_orbits(four_color(), _four_color_orbits()):
        assert nash_function(four_color(), s) == s


def test_nash_function_is_a_profile_and_keeps_D():
    rng = np.random.default_rng(1)
    for game in random_corpus(21, 40):
        orbits = full_symmetry_group(game).orbits()
        poly = build_symmetry_polytope(game, orbits)
        for _ in range(5):
            s = orbit_to_profile(orbits, _random_orbit_point(rng, orbits))
            out = nash_function(game, s)
            out.validate(game)
            assert float(poly.violation(out)) <= 1e-12


def test_fixed_point_residual_bounds_epsilon():
    """If |F(s) - s| <= eta, a played action with nonpositive gap caps the positive gaps."""
    rng = np.random.default_rng(2)
    for game in random_corpus(22, 40):
        s = StrategyProfile(tuple(tuple(rng.dirichlet(np.ones(m))) for m in game.action_counts))
        F = nash_function(game, s)
        rep = deviation_report(game, s)
        for i, row in enumerate(s.strategies):
            eta = max(abs(a - b) for a, b in zip(row, F.strategies[i]))
            # the weighted gaps average to zero, so some played action has gap <= 0
            p = max(p for p, g in zip(row, rep.gaps[i]) if p > 0 and g <= 1e-12)
            if p > eta:
                total = sum(max(0.0, g) for g in rep.gaps[i])
                assert total <= eta / (p - eta) + 1e-9


# -- polytope and orbit maps ----------------------------------------------

def test_polytope_counts_and_dimension():
    g = four_color()
    W = _four_color_orbits()
    poly = build_symmetry_polytope(g, W)
    assert poly.num_constraints == 2 * 8 + 2 + (8 - 2) == 24
    assert poly.dimension == 1
    assert poly.contains(poly.witness())
    single = OrbitPartition.singletons((4, 4))
    poly_s = build_symmetry_polytope(g, single)
    assert not [c for c in poly_s.constraints if c.kind == "tie"]
    assert poly_s.dimension == 6
    rps = gen_rps_extension(2, 3)
    assert build_symmetry_polytope(rps, full_symmetry_group(rps).orbits()).dimension == 0
    for game in random_corpus(23, 20):
        W = full_symmetry_group(game).orbits()
        poly = build_symmetry_polytope(game, W)
        A, N = game.num_actions, game.num_players
        assert poly.num_constraints == 2 * A + N + (A - W.num_orbits)
        assert poly.dimension == W.num_orbits - len(W.classes)


def test_orbit_map_examples():
    W = _four_color_orbits()
    red = StrategyProfile.pure((4, 4), (0, 0))
    assert profile_to_orbit(W, red).values == (1, 0)
    s = orbit_to_profile(W, (Fraction(2, 7), Fraction(5, 7)))
    assert s.strategies[0] == (Fraction(2, 7),) + (Fraction(5, 21),) * 3
    assert s.strategies[1] == s.strategies[0]
    with pytest.raises(NotInDomain):
        profile_to_orbit(W, StrategyProfile.pure((4, 4), (1, 1)))
    with pytest.raises(NotInDomain):
        orbit_to_profile(W, (Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(NotInDomain):
        orbit_to_profile(W, (Fraction(3, 2), Fraction(-1, 2)))
    with pytest.raises(NotInDomain):
        orbit_to_profile(W, (1,))


def test_orbit_maps_round_trip_exactly():
    rng = np.random.default_rng(3)
    for game in random_corpus(24, 20):
        W = full_symmetry_group(game).orbits()
        for _ in range(3):
            vals = [Fraction(0)] * W.num_orbits
            for cls in W.classes:
                weights = [Fraction(int(x) + 1) for x in rng.integers(0, 5, len(cls))]
                for w, x in zip(cls, weights):
                    vals[w] = x / sum(weights)
            r = tuple(vals)
            s = orbit_to_profile(W, r)
            assert respects(s, W)
            assert profile_to_orbit(W, s).values == r
            assert orbit_to_profile(W, profile_to_orbit(W, s)) == s


def test_projection_onto_D():
    rng = np.random.default_rng(4)
    for game in random_corpus(25, 20):
        W = full_symmetry_group(game).orbits()
        poly = build_symmetry_polytope(game, W)
        for _ in range(3):
            y = rng.normal(size=game.num_actions)
            x = project_to_polytope(W, y)
            s = StrategyProfile.from_flat(game.action_counts, x.tolist())
            assert float(poly.violation(s)) <= 1e-12
            # no sampled point of D is closer to y
            best = np.sum((x - y) ** 2)
            for _ in range(20):
                z = orbit_to_profile(W, _random_orbit_point(rng, W)).as_array()
                assert np.sum((z - y) ** 2) >= best - 1e-12
            assert np.allclose(project_to_polytope(W, x), x, atol=1e-12)


# -- support enumeration ---------------------------------------------------

def test_support_enumeration_four_color():
    eqs = support_enumeration_details(four_color(), _four_color_orbits()).equilibria
    assert {e.r for e in eqs} == {(1, 0), (0, 1), (Fraction(2, 7), Fraction(5, 7))}
    assert sorted(e.values[0] for e in eqs) == [Fraction(20, 7), 4, 10]
    assert all(e.profile.exact for e in eqs)


def test_support_enumeration_single_orbit_games():
    for game in (gen_rps_extension(2, 3), gen_rps_extension(2, 5), gen_matching_pennies()):
        W = full_symmetry_group(game).orbits()
        eqs = support_enumeration_orbits(game, W)
        assert eqs == [StrategyProfile.uniform(game.action_counts)]
        assert deviation_report(game, eqs[0]).values == (0, 0)


def test_support_enumeration_rejects_three_players():
    g = gen_rps_extension(3, 3)
    with pytest.raises(Unsupported):
        support_enumeration_orbits(g, OrbitPartition.singletons(g.action_counts))


def test_support_enumeration_singletons_finds_all_chicken_equilibria():
    eqs = support_enumeration_orbits(gen_chicken(), OrbitPartition.singletons((2, 2)))
    p = Fraction(9, 10)
    found = {tuple(e.flat()) for e in eqs}
    assert found == {(0, 1, 1, 0), (1, 0, 0, 1), (p, 1 - p, p, 1 - p)}


def test_support_enumeration_grid_completeness():
    rng = np.random.default_rng(5)
    games = []
    for k in range(12):
        counts = (2, 2) if k % 2 else (3, 3)
        gens = [random_blockwise(rng, counts)]
        games.append(symmetrized_game(rng, counts, gens, values=5))
    games.append(four_color())
    checked = 0
    for game in games:
        W = full_symmetry_group(game).orbits()
        if W.num_orbits - len(W.classes) > 1 or W.num_orbits > 4:
            continue
        found = support_enumeration_orbits(game, W)
        assert all(deviation_report(game, s).epsilon == 0 for s in found)
        pts = [np.array([float(v) for v in s.flat()]) for s in found]
        free = [cls for cls in W.classes if len(cls) == 2]
        grid = np.linspace(0, 1, 10001) if free else np.array([0.0])
        base = np.zeros(W.num_orbits)
        for cls in W.classes:
            if len(cls) == 1:
                base[cls[0]] = 1.0
        R = np.repeat(base[None, :], len(grid), axis=0)
        if free:
            w0, w1 = free[0]
            R[:, w0], R[:, w1] = grid, 1 - grid
        flat = (R / np.asarray(W.cardinality))[:, np.asarray(W.orbit_of)]
        eps = _batch_epsilon(game, flat)
        for x in flat[eps < 1e-5]:
            assert min(np.max(np.abs(x - p)) for p in pts) <= 1e-3
        checked += 1
    assert checked >= 5


def _batch_epsilon(game, flat):
    m1, m2 = game.action_counts
    U1 = np.array(game.payoffs[0], dtype=float).reshape(m1, m2)
    U2 = np.array(game.payoffs[1], dtype=float).reshape(m1, m2)
    s1, s2 = flat[:, :m1], flat[:, m1:]
    a1 = s2 @ U1.T
    a2 = s1 @ U2
    g1 = a1 - np.sum(a1 * s1, axis=1, keepdims=True)
    g2 = a2 - np.sum(a2 * s2, axis=1, keepdims=True)
    return np.maximum(g1.max(axis=1), g2.max(axis=1))


# -- fixed point search ------------------------------------------------------

def test_fixed_point_examples():
    rps = gen_rps_extension(3, 3)
    s = solve_fixed_point(rps, full_symmetry_group(rps).orbits(), eps=1e-3)
    assert s == StrategyProfile.uniform(rps.action_counts)
    assert deviation_report(rps, s).epsilon == 0
    s = solve_fixed_point(four_color(), _four_color_orbits(), eps=1e-6)
    red = float(s.strategies[0][0])
    assert min(abs(red - r) for r in (0, 2 / 7, 1)) <= 1e-6
    s = solve_fixed_point(gen_chicken(), OrbitPartition.singletons((2, 2)), eps=1e-6)
    assert deviation_report(gen_chicken(), s).epsilon <= 1e-6


def test_fixed_point_chicken_swap_orbits():
    ch = gen_chicken()
    W = _swap_orbits(ch)
    s = solve_fixed_point(ch, W, eps=1e-9)
    assert abs(float(s.strategies[0][0]) - 0.9) <= 1e-6
    assert abs(deviation_report(ch, s).values[0] + 0.1) <= 1e-6


def test_fixed_point_random_games_certify():
    rng = np.random.default_rng(6)
    for k in range(10):
        counts = (3, 3, 2) if k % 2 else (2, 2, 2)
        game = random_game(rng, counts, -3, 3)
        W = full_symmetry_group(game).orbits()
        s = solve_fixed_point(game, W, eps=1e-6, seed=k)
        assert deviation_report(game, s).epsilon <= 1e-6
        assert respects(s, W)


def test_fixed_point_budget_and_bad_eps():
    # a single-point D that is not an equilibrium cannot certify
    g = bimatrix([[1, 0], [0, 0]], [[1, 0], [0, 0]])
    W = orbits_from_generators((2, 2), [])
    W1 = OrbitPartition((2, 2), ((0, 1), (2, 3)))
    with pytest.raises(BudgetExhausted):
        solve_fixed_point(g, W1, eps=1e-6)
    with pytest.raises(ValueError):
        solve_fixed_point(g, W, eps=0)


def test_symmetry_preserves_equilibrium_gap():
    for game in random_corpus(26, 20):
        G = full_symmetry_group(game)
        W = G.orbits()
        try:
            s = solve_fixed_point(game, W, eps=1e-6, seeds=4)
        except BudgetExhausted:
            continue
        eps = deviation_report(game, s).epsilon
        for g in G.generators:
            assert abs(deviation_report(game, apply_to_profile(g, s)).epsilon - eps) <= 1e-9


# -- team games ---------------------------------------------------------------

def test_team_gradient_four_color():
    g, W = four_color(), _four_color_orbits()
    s, cert = team_gradient(g, W, delta=1e-7)
    assert cert.residual <= 1e-7
    assert deviation_report(g, s).ws_epsilon <= 2e-7
    assert abs(float(s.strategies[0][0]) - 1) <= 1e-6 or abs(float(s.strategies[0][0])) <= 1e-6
    s0, _ = team_gradient(g, W, delta=1e-7, start=[0.0, 1 / 3, 1 / 3, 1 / 3] * 2)
    assert abs(deviation_report(g, s0).values[0] - 4) <= 1e-6
    s1, _ = team_gradient(g, W, delta=1e-7, start=[0.9, 0.1 / 3, 0.1 / 3, 0.1 / 3] * 2)
    assert abs(deviation_report(g, s1).values[0] - 10) <= 1e-6


def test_team_gradient_errors_and_trivial():
    with pytest.raises(NotTeamGame):
        team_gradient(gen_rps_extension(2, 3), OrbitPartition.singletons((3, 3)))
    coord = Game((2, 2), ((1, 0, 0, 1), (1, 0, 0, 1)))
    W = OrbitPartition((2, 2), ((0, 1, 2, 3),))
    s, cert = team_gradient(coord, W)
    assert s.strategies == ((0.5, 0.5), (0.5, 0.5))
    assert cert.iterations == 0 and cert.residual <= 1e-12


def test_team_gradient_matches_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-6
    for k in range(10):
        game = symmetrized_game(rng, (3, 3, 3), [random_blockwise(rng, (3, 3, 3))], team=True)
        W = full_symmetry_group(game).orbits()
        r = _random_orbit_point(rng, W)
        grad = team_orbit_gradient(game, W, r)
        for w in range(W.num_orbits):
            e = np.zeros(W.num_orbits)
            e[w] = h
            fd = (team_orbit_value(game, W, r + e) - team_orbit_value(game, W, r - e)) / (2 * h)
            assert abs(fd - grad[w]) <= 1e-4 * max(1.0, abs(grad[w]))


def test_kkt_certificate_at_known_points():
    g, W = four_color(), _four_color_orbits()
    red = [1.0, 0, 0, 0] * 2
    cert = kkt_certificate(g, W, red)
    assert cert.residual <= 1e-12 and min(cert.mu) >= 0 and cert.complementarity == 0
    mixed = orbit_to_profile(W, (2 / 7, 5 / 7)).as_array()
    # the interior critical point is a minimum of the team value but still stationary
    assert kkt_certificate(g, W, mixed).residual <= 1e-9


# -- zero-sum games ---------------------------------------------------------

def test_minimax_exact_value():
    v, s1, s2 = minimax_exact([[Fraction(x) for x in row] for row in [[3, -1], [-2, 1]]])
    assert v == Fraction(1, 7)
    assert s1 == [Fraction(3, 7), Fraction(4, 7)] and s2 == [Fraction(2, 7), Fraction(5, 7)]


def test_zero_sum_examples():
    mp = gen_matching_pennies()
    sol = zero_sum_symmetric(mp)
    assert sol.exact and sol.value == 0
    assert sol.profile == StrategyProfile.uniform((2, 2))
    for g in group_closure(full_symmetry_group(mp)):
        assert apply_to_profile(g, sol.profile) == sol.profile
    A = [[0, 1, -1], [-1, 0, 1], [1, -1, 0]]
    game = gen_zero_sum_embedding(A, [[-x for x in row] for row in A], require_positive=False)
    sol = zero_sum_symmetric(game)
    assert sol.profile.strategies[0] == sol.profile.strategies[1]
    with pytest.raises(NotZeroSum):
        zero_sum_symmetric(gen_chicken())
    with pytest.raises(NotZeroSum):
        zero_sum_symmetric(gen_rps_extension(3, 3))


def test_zero_sum_duplicate_columns_are_equalized():
    # columns 0 and 1 are duplicates; the pure column 0 is an equilibrium vertex
    U = [[1, 1, 0], [0, 0, 2]]
    game = bimatrix(U, [[-x for x in row] for row in U])
    sol = zero_sum_symmetric(game)
    s2 = sol.profile.strategies[1]
    assert s2[0] == s2[1]
    assert deviation_report(game, sol.profile).epsilon == 0


def test_zero_sum_float_path_matches_exact():
    rng = np.random.default_rng(8)
    U = rng.integers(-3, 4, (22, 22)).tolist()
    big = bimatrix(U, [[-x for x in row] for row in U])
    sol = zero_sum_symmetric(big, tol=1e-8)
    assert not sol.exact and sol.feasibility <= 1e-8
    v, _, _ = minimax_exact([[Fraction(x) for x in row] for row in U])
    assert abs(sol.value - float(v)) <= 1e-8


def test_rho_monotone_under_orbit_averaging():
    rng = np.random.default_rng(9)
    for _ in range(15):
        A = rng.integers(-2, 3, (2, 2)).tolist()
        game = gen_zero_sum_embedding(A, [[-x for x in row] for row in A], require_positive=False)
        elements = group_closure(full_symmetry_group(game))
        for s in support_enumeration_orbits(game, OrbitPartition.singletons(game.action_counts)):
            avg = np.mean([apply_to_profile(g, s.to_float()).as_array() for g in elements], axis=0)
            rho = float(np.sum(s.to_float().as_array() ** 2))
            assert float(np.sum(avg ** 2)) <= rho + 1e-12
