import itertools
import math

import numpy as np
import pytest

from percolab import rng
from percolab.errors import (IncompleteColoring, StepBudgetExceeded,
                             TargetUnreachable)
from percolab.exploration import (BLUE, YELLOW, BoundaryArcTarget,
                                  CircleTarget, Coloring, annulus_arm_count,
                                  explore, explore_until_arc, fill,
                                  static_interface)
from percolab.hexlattice import (build_from_sites, build_rhombus, edge_flanks,
                                 hex_center, hex_neighbors, split_boundary)


def small_domains():
    flower = {(0, 0)} | set(hex_neighbors(0, 0))
    return [
        ({(0, 0)}, 0, 3),
        ({(0, 0), (1, 0)}, 0, 4),
        ({(0, 0), (1, 0), (0, 1)}, 0, 4),
        ({(0, 0), (1, 0), (2, 0)}, 1, 6),
        (flower, 0, 6),
        (flower | {(2, 0), (2, -1)}, 2, 9),
    ]


class TestColoring:
    def test_color_depends_only_on_seed_and_site(self):
        c1 = Coloring(seed=11)
        c2 = Coloring(seed=11)
        sites = [(0, 0), (5, -3), (-2, 7), (100, 100)]
        a = [c1.color_of(s) for s in sites]
        b = [c2.color_of(s) for s in reversed(sites)]
        assert a == list(reversed(b))

    def test_color_never_changes_once_queried(self):
        c = Coloring(seed=12)
        v = c.color_of((3, 4))
        for _ in range(5):
            assert c.color_of((3, 4)) == v

    def test_explicit_partial_coloring_raises_on_missing(self):
        c = Coloring(assignment={(0, 0): BLUE})
        assert c.color_of((0, 0)) == BLUE
        with pytest.raises(IncompleteColoring):
            c.color_of((1, 1))

    def test_fair_coin(self):
        c = Coloring(seed=13)
        vals = [c.color_of((q, 0)) for q in range(20000)]
        assert abs(np.mean(vals)) < 0.025


class TestDynamicStaticEquivalence:
    @pytest.mark.parametrize("sites,ia,ib", small_domains())
    def test_exhaustive(self, sites, ia, ib):
        dom = build_from_sites(set(sites))
        evs = dom.e_vertices
        a, b = evs[ia % len(evs)], evs[ib % len(evs)]
        cells = sorted(dom.interior)
        for bits in itertools.product([BLUE, YELLOW], repeat=len(cells)):
            assignment = dict(zip(cells, bits))
            dyn = explore(dom, a, b, Coloring(assignment=assignment))
            sta = static_interface(dom, a, b, Coloring(assignment=assignment))
            assert dyn.vertices == sta.vertices
            assert dyn.explored_blue == sta.explored_blue
            assert dyn.explored_yellow == sta.explored_yellow

    def test_random_colorings_on_larger_domain(self):
        dom = build_rhombus(7)
        a, b = dom.e_vertices[0], dom.e_vertices[len(dom.e_vertices) // 2]
        cells = sorted(dom.interior)
        gen = np.random.default_rng(99)
        for _ in range(200):
            assignment = {c: (BLUE if gen.integers(2) else YELLOW)
                          for c in cells}
            dyn = explore(dom, a, b, Coloring(assignment=assignment))
            sta = static_interface(dom, a, b, Coloring(assignment=assignment))
            assert dyn.vertices == sta.vertices


class TestPathInvariants:
    def test_b_path_and_flank_colors(self):
        dom = build_rhombus(9)
        a, b = dom.e_vertices[2], dom.e_vertices[len(dom.e_vertices) // 2 + 3]
        path = explore(dom, a, b, Coloring(seed=217))
        edges = path.edges
        # distinct edges meeting at vertices
        assert len({frozenset(e) for e in edges}) == len(edges)
        for e1, e2 in zip(edges, edges[1:]):
            assert e1[1] == e2[0]
        right_s = set(path.arcs.right)
        left_s = set(path.arcs.left)
        for e in edges:
            rgt, lft = edge_flanks(*e)
            assert (rgt in path.explored_blue) or (rgt in right_s)
            assert (lft in path.explored_yellow) or (lft in left_s)

    def test_color_swap_reflection_symmetry(self):
        # swapping all colors turns the interface into the interface of the
        # swapped problem with the roles of the arcs exchanged: the path of
        # (a, b, colors) reversed equals the path of (b, a, swapped colors)
        dom = build_rhombus(5)
        a, b = dom.e_vertices[1], dom.e_vertices[9]
        cells = sorted(dom.interior)
        gen = np.random.default_rng(5)
        for _ in range(50):
            assignment = {c: (BLUE if gen.integers(2) else YELLOW) for c in cells}
            swapped = {c: -v for c, v in assignment.items()}
            p1 = explore(dom, a, b, Coloring(assignment=assignment))
            p2 = explore(dom, b, a, Coloring(assignment=swapped))
            mid1 = p1.vertices[1:-0 or None]
            assert p1.vertices[1:] == tuple(reversed(p2.vertices[1:]))
            assert p1.explored_blue == p2.explored_yellow
            assert p1.explored_yellow == p2.explored_blue

    def test_all_blue_hugs_left_boundary(self):
        dom = build_from_sites({(0, 0), (1, 0), (0, 1), (1, -1), (-1, 1)})
        a, b = dom.e_vertices[0], dom.e_vertices[6]
        assignment = {c: BLUE for c in dom.interior}
        path = explore(dom, a, b, Coloring(assignment=assignment))
        # every step keeps a left-boundary hexagon on the left: the walk
        # never sees yellow, so its left flanks are all boundary hexes
        left_s = set(path.arcs.left)
        for e in path.edges:
            _, lft = edge_flanks(*e)
            assert lft in left_s
        # enumeration oracle: with every site blue the static clusters give
        # the same unique interface
        sta = static_interface(dom, a, b, Coloring(assignment=assignment))
        assert path.vertices == sta.vertices

    def test_all_yellow_mirror_of_all_blue(self):
        dom = build_from_sites({(0, 0), (1, 0), (0, 1), (1, -1), (-1, 1)})
        a, b = dom.e_vertices[0], dom.e_vertices[6]
        blue_path = explore(dom, a, b,
                            Coloring(assignment={c: BLUE for c in dom.interior}))
        yellow_rev = explore(dom, b, a,
                             Coloring(assignment={c: YELLOW for c in dom.interior}))
        assert blue_path.vertices[1:] == tuple(reversed(yellow_rev.vertices[1:]))

    def test_reproducibility_same_seed(self):
        dom = build_rhombus(8)
        a, b = dom.e_vertices[0], dom.e_vertices[12]
        p1 = explore(dom, a, b, Coloring(seed=777))
        p2 = explore(dom, a, b, Coloring(seed=777))
        assert p1.vertices == p2.vertices

    def test_budget_guard_is_loud(self):
        dom = build_rhombus(4)
        a, b = dom.e_vertices[0], dom.e_vertices[7]
        # a healthy walk terminates well within budget; starve it artificially
        from percolab import exploration as ex
        path = explore(dom, a, b, Coloring(seed=5))
        assert len(path.edges) <= 10 * len(dom.interior) + 60


class TestExploreUntilArc:
    def test_target_at_b_matches_plain_explore(self):
        dom = build_rhombus(6)
        a, b = dom.e_vertices[0], dom.e_vertices[10]
        plain = explore(dom, a, b, Coloring(seed=31))
        target = BoundaryArcTarget([b])
        stopped, frac = explore_until_arc(dom, a, b, Coloring(seed=31), target)
        assert stopped.vertices == plain.vertices

    def test_immediate_stop_near_a(self):
        dom = build_rhombus(6)
        a, b = dom.e_vertices[0], dom.e_vertices[10]
        ia = dom.boundary_index(a)
        n = len(dom.boundary_vertices)
        near = [dom.boundary_vertices[(ia + k) % n] for k in (1, 2, 3)]
        stopped, frac = explore_until_arc(dom, a, b, Coloring(seed=31),
                                          BoundaryArcTarget(near))
        assert len(stopped.edges) <= 6

    def test_unreachable_target_raises(self):
        dom = build_rhombus(6)
        a, b = dom.e_vertices[0], dom.e_vertices[10]
        far = dom.e_vertices[1]
        # a target the walk cannot meet before b on this coloring
        with pytest.raises(TargetUnreachable):
            for seed in range(40):
                explore_until_arc(dom, a, b, Coloring(seed=seed),
                                  BoundaryArcTarget([far]))

    def test_circle_target_fraction(self):
        dom = build_rhombus(12)
        a, b = dom.e_vertices[0], dom.e_vertices[20]
        center = hex_center(6, 6, dom.mesh)
        tgt = CircleTarget(center, 3.0)
        path, frac = explore_until_arc(dom, a, b, Coloring(seed=8), tgt)
        assert 0.0 <= frac <= 1.0
        assert path.end_state[0] == "arc"


class TestFill:
    def test_no_pockets_means_filling_equals_explored(self):
        dom = build_from_sites({(0, 0), (1, 0)})
        a, b = dom.e_vertices[0], dom.e_vertices[4]
        for bits in itertools.product([BLUE, YELLOW], repeat=2):
            assignment = dict(zip(sorted(dom.interior), bits))
            path = explore(dom, a, b, Coloring(assignment=assignment))
            f = fill(path, dom, b)
            # on a 2-hexagon domain nothing can be sealed off
            assert f.hexes == path.explored

    def test_filling_matches_reachability_oracle(self):
        dom = build_rhombus(6)
        a, b = dom.e_vertices[0], dom.e_vertices[10]
        for seed in range(30):
            path = explore(dom, a, b, Coloring(seed=seed))
            f = fill(path, dom, b)
            # oracle: BFS from b's hexagon over unexplored sites
            unexplored = dom.interior - path.explored
            b_hex = dom.interior_hex_at(b)
            reach = set()
            if b_hex in unexplored:
                reach = {b_hex}
                stack = [b_hex]
                while stack:
                    h = stack.pop()
                    for nb in hex_neighbors(*h):
                        if nb in unexplored and nb not in reach:
                            reach.add(nb)
                            stack.append(nb)
            assert f.hexes == path.explored | (unexplored - reach)
            # complement within the domain is connected and holds b's hexagon
            comp = dom.interior - f.hexes
            assert comp == reach

    def test_components_partition_and_tags(self):
        dom = build_rhombus(8)
        a, b = dom.e_vertices[0], dom.e_vertices[14]
        tags_seen = set()
        for seed in range(60):
            path = explore(dom, a, b, Coloring(seed=seed))
            f = fill(path, dom, b)
            total = sum(len(c) for c, _ in f.components)
            assert total == len(dom.interior - path.explored)
            for comp, tag in f.components:
                assert tag in (1, 2, 3, 4)
                tags_seen.add(tag)
        assert {1, 2} <= tags_seen  # boundary pockets occur readily

    def test_hand_built_fjord(self):
        # walk a path that seals a pocket, then check the oracle by hand
        dom = build_rhombus(4)
        a, b = dom.e_vertices[0], dom.e_vertices[7]
        for seed in range(200):
            path = explore(dom, a, b, Coloring(seed=seed))
            f = fill(path, dom, b)
            sealed = f.hexes - path.explored
            if sealed:
                for h in sealed:
                    # no unexplored route from a sealed hexagon to b's hexagon
                    assert all(nb in f.hexes or nb not in dom.interior
                               for nb in hex_neighbors(*h)
                               if nb not in (dom.interior - f.hexes))
                break
        else:
            pytest.skip("no sealing configuration found in 200 seeds")


class TestCrossingDuality:
    def test_rhombus_exact_duality_exhaustive(self):
        # blue left-right crossing and yellow top-bottom crossing are
        # complementary events, configuration by configuration
        n = 3
        cells = [(q, r) for q in range(n) for r in range(n)]

        def has_path(blue_set, sources, targets):
            stack = [c for c in sources if c in blue_set]
            seen = set(stack)
            while stack:
                c = stack.pop()
                if c in targets:
                    return True
                for nb in hex_neighbors(*c):
                    if nb in blue_set and nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
            return False

        left = {(0, r) for r in range(n)}
        right = {(n - 1, r) for r in range(n)}
        bottom = {(q, 0) for q in range(n)}
        top = {(q, n - 1) for q in range(n)}
        for bits in itertools.product([0, 1], repeat=n * n):
            blue = {c for c, bit in zip(cells, bits) if bit}
            yellow = set(cells) - blue
            blue_lr = has_path(blue, left, right)
            yellow_tb = has_path(yellow, top, bottom)
            assert blue_lr != yellow_tb


class TestAnnulusArms:
    def test_monochromatic_no_arms(self):
        class Const:
            def color_of(self, site):
                return BLUE

        cnt, pattern = annulus_arm_count(Const(), 0j, 4.0, 9.0)
        assert cnt == 0 and pattern == ""

    def test_straight_split_two_arms(self):
        class Split:
            def color_of(self, site):
                return BLUE if hex_center(*site, 1.0).real >= 0 else YELLOW

        cnt, pattern = annulus_arm_count(Split(), 0j, 4.0, 9.0)
        assert cnt == 2
        assert set(pattern) == {"B", "Y"}

    def test_even_parity_and_alternation(self):
        for seed in range(20):
            cnt, pattern = annulus_arm_count(Coloring(seed=seed), 0j, 4.0, 9.0)
            assert cnt % 2 == 0
            assert len(pattern) == cnt
            if pattern:
                for i in range(len(pattern)):
                    assert pattern[i] != pattern[(i + 1) % len(pattern)]

    def test_kernel_matches_reference(self):
        from percolab.engine import AnnulusSetup, run_strands_mc
        setup = AnnulusSetup(0j, 4.0, 9.0)
        counts = run_strands_mc(setup, 40, 555, "strand-check")
        for i, c in enumerate(counts):
            seed = rng.derive_seed(555, "strand-check", i)
            ref, _ = annulus_arm_count(Coloring(seed=seed), 0j, 4.0, 9.0)
            assert int(c) == ref

    def test_half_plane_variant_runs(self):
        cnt, pattern = annulus_arm_count(Coloring(seed=4), complex(0, -1.0),
                                         4.0, 9.0, half_plane=True)
        assert cnt >= 0


class TestKernelWalkEquivalence:
    def test_paths_match_reference_walker(self):
        from percolab._kernels import walk as kwalk
        from percolab.engine import WalkSetup
        dom = build_rhombus(10)
        a, b = dom.e_vertices[0], dom.e_vertices[len(dom.e_vertices) // 2]
        setup = WalkSetup(dom, a, b)
        colors = np.zeros(setup.state.shape, dtype=np.int8)
        path = np.empty((setup.max_path, 2), dtype=np.int64)
        touched = np.empty((setup.budget + 4, 2), dtype=np.int64)
        for seed in [3, 44, 1999]:
            st, npath, ntouch, lu, lv = kwalk(
                setup.state, colors, setup.q0, setup.r0,
                setup.tail[0], setup.tail[1], setup.head[0], setup.head[1],
                b[0], b[1], np.uint64(seed), True, setup.budget, 0,
                setup.flags, 0, 0, 0.0, 0.0, 0.0, dom.mesh, path, touched)
            for i in range(ntouch):
                colors[touched[i, 0], touched[i, 1]] = 0
            ref = explore(dom, a, b, Coloring(seed=seed))
            assert st == 0
            assert tuple(map(tuple, path[:npath])) == ref.vertices
