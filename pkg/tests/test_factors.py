"""Factor systems: domain enumeration, relations, product regions.

Frozen counts come from exhaustive enumeration on windows small enough
to check by hand or against the word-level oracles.
"""

import itertools

import pytest

from cubehhs.complexes import (build_explicit, build_raag_ball,
                               ConvexSubcomplex)
from cubehhs.contact import contact_graph, factored_contact_graph
from cubehhs.errors import MaximalDomain, NotAProduct, Untrusted
from cubehhs.factors import (EQUAL, NESTED, ORTHOGONAL, REVERSE_NESTED,
                             TRANSVERSE, generate_factor_system,
                             growth_probe, walls_cross)
from oracles import Z2, F2, P4


def grid(nx, ny):
    verts = [(i, j) for i in range(nx) for j in range(ny)]
    edges = []
    for (i, j) in verts:
        if i + 1 < nx:
            edges.append(((i, j), (i + 1, j)))
        if j + 1 < ny:
            edges.append(((i, j), (i, j + 1)))
    return build_explicit(verts, edges)


@pytest.fixture(scope="module")
def z2():
    X = build_raag_ball(Z2, 8, 2)
    return X, generate_factor_system(X)


@pytest.fixture(scope="module")
def f2():
    X = build_raag_ball(F2, 7, 2)
    return X, generate_factor_system(X)


@pytest.fixture(scope="module")
def p4():
    X = build_raag_ball(P4, 4, 1)
    return X, generate_factor_system(X)


@pytest.fixture(scope="module")
def p4_small():
    X = build_raag_ball(P4, 3, 1)
    return X, generate_factor_system(X)


# -- degenerate and explicit models ------------------------------------------

def test_segment_has_only_the_ambient_domain():
    X = build_explicit([0, 1, 2], [(0, 1), (1, 2)])
    fs = generate_factor_system(X)
    assert fs.class_ids() == ["S"]
    assert fs.delta_mult == 1
    assert fs.complexity() == 1
    with pytest.raises(MaximalDomain):
        fs.product_region("S")


def test_grid_domains():
    fs = generate_factor_system(grid(3, 3))
    assert fs.class_ids() == ["S", "F0", "F1"]
    for cid in ("F0", "F1"):
        dom = fs.domain(cid)
        assert dom.level == 1
        assert sorted(len(m) for m in dom.members) == [3, 3, 3]
    assert fs.domain("S").level == 2
    assert fs.delta_mult == 3
    assert fs.complexity() == 2


def test_grid_relations():
    fs = generate_factor_system(grid(3, 3))
    assert fs.relation("F0", "F0") == EQUAL
    assert fs.relation("F0", "F1") == ORTHOGONAL
    assert fs.relation("F0", "S") == NESTED
    assert fs.relation("S", "F0") == REVERSE_NESTED


def test_grid_input_order_irrelevant():
    fs1 = generate_factor_system(grid(3, 3))
    verts = [(i, j) for i in range(3) for j in range(3)][::-1]
    edges = [((i, j), (i + 1, j)) for i in range(2) for j in range(3)]
    edges += [((i, j), (i, j + 1)) for i in range(3) for j in range(2)]
    fs2 = generate_factor_system(build_explicit(verts, edges[::-1]))
    shapes1 = {frozenset(m.labels()) for m in fs1.members()}
    shapes2 = {frozenset(m.labels()) for m in fs2.members()}
    assert shapes1 == shapes2


def test_large_grid_stays_three_classes():
    fs = generate_factor_system(grid(13, 13))
    assert len(fs.class_ids()) == 3
    assert fs.delta_mult == 3
    assert fs.complexity() == 2


def test_xi_below_two_rejected():
    with pytest.raises(ValueError):
        generate_factor_system(grid(3, 3), xi=1)


# -- flat window --------------------------------------------------------------

def test_flat_window_domains(z2):
    _, fs = z2
    assert fs.class_ids() == ["S", "a@e", "b@e"]
    assert len(fs.domain("a@e").members) == 15
    assert len(fs.domain("b@e").members) == 15
    assert fs.domain("a@e").level == 1
    assert fs.domain("S").level == 2
    assert fs.delta_mult == 3
    assert fs.complexity() == 2


def test_flat_window_relations(z2):
    _, fs = z2
    assert fs.relation("a@e", "b@e") == ORTHOGONAL
    assert fs.relation("a@e", "S") == NESTED
    assert fs.is_nested("a@e", "S") and not fs.is_nested("S", "a@e")
    assert fs.is_orthogonal("b@e", "a@e")


def test_flat_product_region_fills_the_window(z2):
    X, fs = z2
    F, E, P = fs.product_region("a@e")
    assert len(F) == 17 and len(E) == 17
    assert len(P) == len(X.vertices) == 145
    cf, ce = F.crossing_walls(), E.crossing_walls()
    assert not (cf & ce)
    assert P.crossing_walls() == cf | ce


def test_flat_orthogonal_container(z2):
    X, fs = z2
    A = {X.index[""], X.index["a"]}
    B = {X.index[""], X.index["b"]}
    ma, mb = fs.orthogonal_container(A, B)
    assert fs.class_of_member(ma) == "a@e"
    assert fs.class_of_member(mb) == "b@e"
    assert A <= ma.vertices and B <= mb.vertices


def test_container_rejects_shared_walls(z2):
    X, fs = z2
    A = {X.index[""], X.index["a"]}
    with pytest.raises(NotAProduct):
        fs.orthogonal_container(A, set(A))


def test_container_rejects_parallel_walls(z2):
    X, fs = z2
    A = {X.index[""], X.index["a"]}
    B = {X.index["a"], X.index["aa"]}
    with pytest.raises(NotAProduct):
        fs.orthogonal_container(A, B)


def test_flat_members_are_convex_and_disjoint_in_class(z2):
    X, fs = z2
    for cid in ("a@e", "b@e"):
        members = fs.domain(cid).members
        for m in members:
            assert X.is_convex(m.vertices)
        for m1, m2 in itertools.combinations(members, 2):
            assert not (m1.vertices & m2.vertices)


# -- tree window ---------------------------------------------------------------

def test_tree_window_is_a_single_domain(f2):
    _, fs = f2
    assert fs.class_ids() == ["S"]
    assert fs.delta_mult == 1
    assert fs.complexity() == 1


def test_tree_window_has_no_products(f2):
    X, fs = f2
    A = {X.index[""], X.index["a"]}
    B = {X.index[""], X.index["b"]}
    with pytest.raises(NotAProduct):
        fs.orthogonal_container(A, B)


# -- mixed window ---------------------------------------------------------------

def test_mixed_window_census(p4):
    _, fs = p4
    ids = fs.class_ids()
    assert len(ids) == 253
    assert fs.member_count() == 569
    assert fs.delta_mult == 5
    assert fs.complexity() == 3
    types = {cid.split("@")[0] for cid in ids if cid != "S"}
    assert types == {"a", "c", "bc", "ad"}


def test_mixed_window_levels(p4):
    _, fs = p4
    assert fs.domain("a@e").level == 1
    assert fs.domain("c@e").level == 1
    assert fs.domain("bc@e").level == 2
    assert fs.domain("ad@e").level == 2
    assert fs.domain("S").level == 3


def test_mixed_window_relations(p4):
    _, fs = p4
    assert fs.relation("a@e", "c@e") == ORTHOGONAL
    assert fs.relation("a@e", "bc@e") == ORTHOGONAL
    assert fs.relation("c@e", "ad@e") == ORTHOGONAL
    assert fs.relation("a@e", "ad@e") == NESTED
    assert fs.relation("c@e", "bc@e") == NESTED
    assert fs.relation("bc@e", "ad@e") == TRANSVERSE
    # parallel lines in the same class family but different offsets
    assert fs.relation("a@e", "a@d") == TRANSVERSE


def test_mixed_product_region_is_proper(p4):
    X, fs = p4
    F, E, P = fs.product_region("a@e")
    assert len(F) == 9
    assert len(E) == 161
    assert len(P) == 313 < len(X.vertices) == 1401
    # the complement factor is the whole two-letter tree through the base
    assert all(set(w) <= set("bcBC") for w in E.labels() if w)
    assert {"b", "B", "bb", "BB"} <= set(P.labels())


def test_mixed_orthogonal_container(p4):
    X, fs = p4
    A = {X.index[""], X.index["a"]}
    B = {X.index[""], X.index["c"]}
    ma, mb = fs.orthogonal_container(A, B)
    assert fs.class_of_member(ma) == "a@e"
    assert fs.class_of_member(mb) == "c@e"


def test_members_of_class_in(p4):
    _, fs = p4
    inside = fs.members_of_class_in("a@e", fs.domain("S"))
    assert len(inside) == len(fs.domain("a@e").members)
    assert fs.members_of_class_in("a@e", fs.domain("bc@e")) == []


def test_regeneration_is_deterministic(p4):
    X, fs = p4
    again = generate_factor_system(X, seed=7)
    assert again.class_ids() == fs.class_ids()
    assert ({m.vertices for m in again.members()}
            == {m.vertices for m in fs.members()})


# -- relation axioms -----------------------------------------------------------

MIRROR = {EQUAL: EQUAL, NESTED: REVERSE_NESTED, REVERSE_NESTED: NESTED,
          ORTHOGONAL: ORTHOGONAL, TRANSVERSE: TRANSVERSE}


def test_relations_mirror(p4_small):
    _, fs = p4_small
    ids = fs.class_ids()
    for a in ids:
        for b in ids:
            assert fs.relation(b, a) == MIRROR[fs.relation(a, b)]


def test_orthogonality_descends_to_nested_domains(p4_small):
    # anything orthogonal to a domain is orthogonal to everything inside it
    _, fs = p4_small
    ids = fs.class_ids()
    orth = {c: {d for d in ids if fs.relation(c, d) == ORTHOGONAL}
            for c in ids}
    for v in ids:
        for w in ids:
            if fs.relation(v, w) != NESTED:
                continue
            for u in orth[w]:
                assert u in orth[v], (v, w, u)


def test_orthogonal_families_bounded_by_complexity(z2, p4_small):
    for _, fs in (z2, p4_small):
        ids = fs.class_ids()
        orth = {c: {d for d in ids if fs.relation(c, d) == ORTHOGONAL}
                for c in ids}
        best = 0
        for a, b in itertools.combinations(ids, 2):
            if b not in orth[a]:
                continue
            best = max(best, 2)
            for c in orth[a] & orth[b]:
                best = max(best, 3)
        assert best <= fs.complexity()
    # and the flat window attains its bound
    assert z2[1].complexity() == 2


def test_ambient_contains_everything(p4_small):
    _, fs = p4_small
    for cid in fs.class_ids():
        if cid != "S":
            assert fs.relation(cid, "S") == NESTED


# -- gate closure, materially --------------------------------------------------

def closure_holds(X, fs, pairs):
    members = list(fs.members())
    checked = 0
    for m1, m2 in pairs:
        try:
            img = X.gate_set(m1, m2)
        except Untrusted:
            continue
        if ConvexSubcomplex(X, img).diameter_bound() > fs.xi:
            assert any(img <= m.vertices for m in members)
            checked += 1
    return checked


def test_gate_images_of_members_land_in_members(p4):
    # big images only arise between members sharing a direction, so pair
    # the tree members exhaustively and add a block of parallel lines
    X, fs = p4
    trees = [m for cid in fs.class_ids() if cid != "S"
             and len(cid.split("@")[0]) == 2
             for m in fs.domain(cid).members]
    lines = [m for cid in fs.class_ids()
             if cid.split("@")[0] == "a"
             for m in fs.domain(cid).members]
    pairs = list(itertools.combinations(trees, 2))
    pairs += list(itertools.combinations(lines[:40], 2))
    assert closure_holds(X, fs, pairs) > 200


def test_gate_images_flat(z2):
    X, fs = z2
    members = [m for m in fs.members()
               if fs.class_of_member(m) != "S"]
    pairs = list(itertools.combinations(members, 2))
    assert closure_holds(X, fs, pairs) > 100


# -- wall crossing, both routes --------------------------------------------------

def test_wall_crossing_routes_agree(p4_small):
    """The coset route may see crossings whose squares fall outside the
    window, but every materialized crossing must be an algebraic one."""
    X, _ = p4_small
    Xe = build_explicit(list(X.vertices),
                        [(X.vertices[u], X.vertices[v])
                         for u, v in X.edges])
    # map explicit walls back to word-level wall indices via a dual edge
    back = {}
    for (u, v), w in Xe.edge_wall.items():
        i, j = sorted((X.index[Xe.vertices[u]], X.index[Xe.vertices[v]]))
        back[w] = X.edge_wall[(i, j)]
    mat = alg = 0
    for w1, w2 in itertools.combinations(range(len(Xe.walls)), 2):
        m = walls_cross(Xe, w1, w2)
        a = walls_cross(X, back[w1], back[w2])
        if m:
            assert a, (back[w1], back[w2])
            mat += 1
        if a:
            alg += 1
    assert 0 < mat <= alg


def test_wall_crossing_central_pairs_exact(p4_small):
    # around the basepoint every crossing square is realized
    X, _ = p4_small
    Xe = build_explicit(list(X.vertices),
                        [(X.vertices[u], X.vertices[v])
                         for u, v in X.edges])

    # the wall dual to the edge from the basepoint along each generator
    def central(Xc):
        out = {}
        base = Xc.index[""]
        for g in "abcd":
            u, v = sorted((base, Xc.index[g]))
            out[g] = Xc.edge_wall[(u, v)]
        return out

    ce, ca = central(Xe), central(X)
    for g1, g2 in itertools.combinations(sorted(ce), 2):
        m = walls_cross(Xe, ce[g1], ce[g2])
        a = walls_cross(X, ca[g1], ca[g2])
        assert m == a, (g1, g2)


# -- growth of the top-level graph ----------------------------------------------

def test_flat_line_class_grows():
    diams, verdict = growth_probe(Z2, "a@e", (4, 5, 6))
    assert diams == [7, 9, 11]
    assert verdict == "unbounded"


def test_flat_ambient_is_bounded():
    diams, verdict = growth_probe(Z2, "S", (4, 5, 6))
    assert diams == [3, 3, 3]
    assert verdict == "bounded"


def test_tree_ambient_grows():
    diams, verdict = growth_probe(F2, "S", (3, 4, 5))
    assert diams == [5, 7, 9]
    assert verdict == "unbounded"


def test_mixed_ambient_grows():
    diams, verdict = growth_probe(P4, "S", (3, 4, 5))
    assert diams == [7, 9, 11]
    assert verdict == "unbounded"


# -- factored contact graphs -----------------------------------------------------

def test_factored_ambient_flat(z2):
    _, fs = z2
    G = factored_contact_graph(fs, "S")
    assert len(G) == 34          # 32 walls plus one cone per line family
    assert G.diameter() == 3


def test_factored_ambient_box_grid():
    fs = generate_factor_system(grid(13, 13))
    G = factored_contact_graph(fs, "S")
    assert len(G) == 26
    assert G.diameter() == 3


def test_factored_equals_plain_without_proper_domains(f2):
    X, fs = f2
    Gf = factored_contact_graph(fs, "S")
    Gp = contact_graph(X)
    assert sorted(Gf.nodes) == sorted(Gp.nodes)
    assert Gf.edge_count() == Gp.edge_count()
    assert not Gf.cone_map


def test_factored_line_domain_is_a_path(z2):
    _, fs = z2
    G = factored_contact_graph(fs, "a@e")
    assert len(G) == 16
    assert not G.cone_map
    assert G.is_connected()
    degs = sorted(len(G.adj[v]) for v in G.nodes)
    assert degs == [1, 1] + [2] * 14
    assert G.diameter() == 15
