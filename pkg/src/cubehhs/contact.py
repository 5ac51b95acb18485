"""Contact graphs, factored contact graphs, hyperbolicity probes.

Wall vertices are adjacent when no third wall of the region separates them.
Inside a median window that is equivalent to their carriers sharing a
vertex, which is how edges are built; the separation test itself is kept as
``separated_by_third`` for oracle use and spot checks.
"""

import random
from collections import deque


from .errors import DisconnectedGraph
from .complexes import wall_name


class ContactGraph:
    """Graph on wall names plus optional cone vertices.

    cone_map sends each cone vertex to the parallelism class it cones.
    """

    def __init__(self, nodes, edges, cone_map=None):
        self.nodes = list(nodes)
        self.cone_map = dict(cone_map or {})
        self.adj = {v: set() for v in self.nodes}
        for (u, v) in edges:
            if u != v:
                self.adj[u].add(v)
                self.adj[v].add(u)

    def __len__(self):
        return len(self.nodes)

    def edge_count(self):
        return sum(len(s) for s in self.adj.values()) // 2

    def edges(self):
        out = []
        for u in self.nodes:
            for v in self.adj[u]:
                if u < v:
                    out.append((u, v))
        return sorted(out)

    def has_edge(self, u, v):
        return v in self.adj.get(u, ())

    def bfs(self, src):
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def dist(self, u, v):
        d = self.bfs(u)
        return d.get(v)

    def is_connected(self):
        if not self.nodes:
            return True
        return len(self.bfs(self.nodes[0])) == len(self.nodes)

    def diameter(self):
        best = 0
        for u in self.nodes:
            d = self.bfs(u)
            if len(d) != len(self.nodes):
                return None
            best = max(best, max(d.values()))
        return best

    def wall_nodes(self):
        return [v for v in self.nodes if v not in self.cone_map]


def _region_indices(X, restrict_to):
    if restrict_to is None:
        return sorted(range(len(X.vertices)))
    return sorted(restrict_to.vertices)


def region_walls(X, region):
    """Walls with both sides present in the region, in window wall order."""
    it = iter(region)
    first = X.crossed[next(it)]
    union, inter = set(first), set(first)
    for v in it:
        cv = X.crossed[v]
        union |= cv
        inter &= cv
    return sorted(union - inter)


def contact_graph(X, restrict_to=None):
    """Contact graph of the region (default: the whole window).

    One vertex per crossing wall; an edge when the carriers, restricted to
    the region, share a vertex.
    """
    region = _region_indices(X, restrict_to)
    inside = set(region)
    walls = region_walls(X, region)
    wallset = set(walls)
    names = {w: wall_name(X.walls[w]) for w in walls}
    at_vertex = {}
    for (u, v) in X.edges:
        if u in inside and v in inside:
            w = X.edge_wall[(u, v)]
            if w in wallset:
                at_vertex.setdefault(u, set()).add(w)
                at_vertex.setdefault(v, set()).add(w)
    edges = set()
    for v, ws in at_vertex.items():
        ws = sorted(ws)
        for i in range(len(ws)):
            for j in range(i + 1, len(ws)):
                edges.add((names[ws[i]], names[ws[j]]))
    return ContactGraph([names[w] for w in walls], edges)


def separated_by_third(X, region, w1, w2):
    """Does some third wall of the region separate walls w1 and w2?

    Brute force over all other crossing walls; carrier vertices must lie in
    opposite halfspaces.  Oracle for the carrier-intersection edge rule.
    """
    inside = set(region)
    carr = [c & inside for c in _region_carriers(X, inside)]
    for w in region_walls(X, region):
        if w in (w1, w2):
            continue
        s1 = {w in X.crossed[v] for v in carr[w1]}
        s2 = {w in X.crossed[v] for v in carr[w2]}
        if len(s1) == 1 and len(s2) == 1 and s1 != s2:
            return True
    return False


def _region_carriers(X, inside):
    carr = [set() for _ in X.walls]
    for (u, v) in X.edges:
        if u in inside and v in inside:
            w = X.edge_wall[(u, v)]
            carr[w].add(u)
            carr[w].add(v)
    return carr


def factored_contact_graph(fs, class_id):
    """Contact graph of a domain's representative with cone vertices.

    One cone per parallelism class of proper, non-point members nested in
    the domain; the cone joins every wall crossing that class (classes cross
    well-defined wall sets).  Only classes with a realized representative of
    at least one edge inside the region are coned.
    """
    dom = fs.domain(class_id)
    X = fs.complex
    G = contact_graph(X, dom.representative)
    nodes = list(G.nodes)
    edges = set(G.edges())
    cone_map = {}
    # a member lying inside the region is itself the parallel copy that
    # witnesses nesting, so membership decides and no relation call is needed
    for other in fs.nested_below_candidates(class_id):
        members = fs.members_of_class_in(other, dom)
        if not members:
            continue
        crossing = set()
        for mem in members:
            crossing |= {wall_name(X.walls[w]) for w in mem.crossing_walls()}
        crossing = {w for w in crossing if w in G.adj}
        if not crossing:
            continue
        cone = "cone:%s" % other
        cone_map[cone] = other
        nodes.append(cone)
        for w in sorted(crossing):
            edges.add((cone, w))
    return ContactGraph(nodes, edges, cone_map)


class DeltaReport:
    """Four-point hyperbolicity probe result."""

    def __init__(self, delta, samples, max_witness):
        self.delta = delta
        self.samples = samples
        self.max_witness = max_witness

    def __repr__(self):
        return "DeltaReport(delta=%s, samples=%d)" % (self.delta, self.samples)


def delta_probe(G, seed=0, samples=200):
    """Max four-point defect over quadruples, exhaustive when |V| <= 40.

    The defect of a quadruple is (L - M)/2 where L >= M >= S are the three
    pairing sums; the reported delta halves that again (the documented
    convention: a 4-cycle scores 1/2, trees score 0).
    """
    if not G.is_connected():
        raise DisconnectedGraph("delta probe needs a connected graph")
    nodes = sorted(G.nodes)
    n = len(nodes)
    if n < 4:
        return DeltaReport(0.0, 0, None)
    if n <= 40:
        quads = []
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    for l in range(k + 1, n):
                        quads.append((nodes[i], nodes[j], nodes[k], nodes[l]))
    else:
        rng = random.Random(seed)
        quads = [tuple(rng.sample(nodes, 4)) for _ in range(samples)]
    dists = {}

    def d(u, v):
        if u not in dists:
            dists[u] = G.bfs(u)
        return dists[u][v]

    best = 0.0
    witness = None
    for (w, x, y, z) in quads:
        s1 = d(w, x) + d(y, z)
        s2 = d(w, y) + d(x, z)
        s3 = d(w, z) + d(x, y)
        L, M, _ = sorted((s1, s2, s3), reverse=True)
        defect = (L - M) / 2.0
        if defect / 2.0 > best:
            best = defect / 2.0
            witness = (w, x, y, z)
    return DeltaReport(best, len(quads), witness)
