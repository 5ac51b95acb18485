"""Finite windows of CAT(0) cube complexes.

A window is a finite median graph with its wall structure: every vertex
carries the set of walls separating it from the basepoint, distances are
sizes of symmetric differences of those sets, and medians are majority
votes wall by wall.  Explicit graphs are checked to be median; periodic
windows are Cayley balls of a right-angled Artin group and come with a
trusted sub-ball of vertices far enough from the truncation boundary for
local computations to be exact.

Wall identity in periodic windows is algebraic (generator plus link-coset),
so walls can be compared across windows of different radii.
"""

from collections import deque

from .errors import (NotMedian, Disconnected, EmptySubcomplex,
                     ClosureDiverged, Untrusted, RadiusTooSmall)

MEDIAN_CHECK_CAP = 64          # exhaustive triple checks up to this many vertices
MEDIAN_CHECK_SAMPLES = 20000


def wall_name(key):
    """Stable report label for a wall key."""
    if isinstance(key, tuple):
        g, rep = key
        return "%s@%s" % (g, rep if rep else "e")
    return "w%d" % key


class ConvexSubcomplex:
    """A vertex set of a window, assumed convex, with cached wall data."""

    def __init__(self, complex_, vertices):
        self.complex = complex_
        self.vertices = frozenset(vertices)
        if not self.vertices:
            raise EmptySubcomplex("empty subcomplex")
        self._crossing = None
        self._profile = None

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    def __eq__(self, other):
        return (isinstance(other, ConvexSubcomplex)
                and self.complex is other.complex
                and self.vertices == other.vertices)

    def __hash__(self):
        return hash(self.vertices)

    def wall_profile(self):
        """(union, intersection) of crossed-wall sets over the vertices."""
        if self._profile is None:
            cw = self.complex.crossed
            it = iter(self.vertices)
            first = cw[next(it)]
            union, inter = set(first), set(first)
            for v in it:
                union |= cw[v]
                inter &= cw[v]
            self._profile = (frozenset(union), frozenset(inter))
        return self._profile

    def crossing_walls(self):
        """Indices of walls with both sides present in the set."""
        if self._crossing is None:
            union, inter = self.wall_profile()
            self._crossing = union - inter
        return self._crossing

    def is_trusted(self):
        return all(self.complex.trusted[i] for i in self.vertices)

    def diameter_bound(self):
        return len(self.crossing_walls())

    def labels(self):
        return [self.complex.vertices[i] for i in sorted(self.vertices)]


class CubeComplex:
    """A finite window; see module docstring.

    vertices    label per index (words for periodic windows)
    edges       sorted list of index pairs
    walls       wall key per wall index
    crossed     per vertex, frozenset of walls separating it from basepoint
    trusted     bool per vertex; True when the local structure is complete
    """

    def __init__(self, vertices, edges, walls, crossed, edge_wall,
                 basepoint=0, trusted=None, presentation=None,
                 radius=None, margin=None):
        self.vertices = list(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.edges = edges
        self.walls = list(walls)
        self.wall_index = {w: i for i, w in enumerate(self.walls)}
        self.crossed = [frozenset(c) for c in crossed]
        self.edge_wall = edge_wall
        self.basepoint = basepoint
        self.trusted = (list(trusted) if trusted is not None
                        else [True] * len(self.vertices))
        self.presentation = presentation
        self.radius = radius
        self.margin = margin
        self._by_crossed = {c: i for i, c in enumerate(self.crossed)}
        self._adj = [[] for _ in self.vertices]
        for (u, v) in edges:
            self._adj[u].append(v)
            self._adj[v].append(u)
        self._carriers = None

    # -- basics -----------------------------------------------------------

    def __len__(self):
        return len(self.vertices)

    def neighbors(self, i):
        return self._adj[i]

    def trusted_radius(self):
        if self.radius is not None:
            return self.radius - (self.margin or 0)
        return self.diameter()

    def diameter(self):
        if self.presentation is not None and self.radius is not None:
            # antipodal pair x^R, x^-R always realizes 2R
            return 2 * self.radius
        d = 0
        for i in range(len(self.vertices)):
            d = max(d, max(self.dist_row(i)))
        return d

    def dist(self, u, v):
        return len(self.crossed[u] ^ self.crossed[v])

    def dist_row(self, u):
        cu = self.crossed[u]
        return [len(cu ^ c) for c in self.crossed]

    def vertex_norms(self):
        return self.dist_row(self.basepoint)

    def lookup_crossed(self, wallset):
        return self._by_crossed.get(frozenset(wallset))

    # -- medians, gates, hulls ---------------------------------------------

    def median(self, x, y, z):
        """Index of the median vertex; Untrusted if it left the window."""
        a, b, c = self.crossed[x], self.crossed[y], self.crossed[z]
        maj = (a & b) | (a & c) | (b & c)
        m = self._by_crossed.get(maj)
        if m is None:
            raise Untrusted("median outside the window", witness=(x, y, z))
        return m

    def interval(self, u, v):
        """All vertices between u and v, by descent from u toward v.

        A vertex lies between u and v exactly when its wall set is
        sandwiched between crossed(u) & crossed(v) and crossed(u) | crossed(v);
        the descent enumerates the same set without scanning the window.
        """
        cv = self.crossed[v]
        dmax = len(self.crossed[u] ^ cv)
        out = {u}
        frontier = [u]
        left = dmax
        while frontier and left > 0:
            left -= 1
            nxt = []
            for p in frontier:
                for q in self._adj[p]:
                    if q not in out and len(self.crossed[q] ^ cv) == left:
                        out.add(q)
                        nxt.append(q)
            frontier = nxt
        return sorted(out)

    def gate(self, x, sub):
        """Nearest point of the convex set sub; exact for convex sets."""
        if isinstance(sub, ConvexSubcomplex):
            union, inter = sub.wall_profile()
        else:
            if not sub:
                raise EmptySubcomplex("gate onto nothing")
            it = iter(sub)
            first = self.crossed[next(it)]
            union, inter = set(first), set(first)
            for v in it:
                cv = self.crossed[v]
                union |= cv
                inter &= cv
        # walls not crossing sub keep sub's side; crossing walls keep x's
        target = inter | (self.crossed[x] & (union - inter))
        g = self._by_crossed.get(frozenset(target))
        if g is None:
            raise Untrusted("gate outside the window", witness=x)
        return g

    def gate_set(self, sub_from, sub_to):
        return frozenset(self.gate(x, sub_to) for x in
                         (sub_from.vertices if isinstance(
                             sub_from, ConvexSubcomplex) else sub_from))

    def halfspace_hull(self, seeds):
        """Intersection of all halfspaces containing the seeds."""
        seeds = list(seeds)
        if not seeds:
            raise EmptySubcomplex("hull of nothing")
        union, inter = set(self.crossed[seeds[0]]), set(self.crossed[seeds[0]])
        for v in seeds[1:]:
            cv = self.crossed[v]
            union |= cv
            inter &= cv
        return frozenset(i for i, c in enumerate(self.crossed)
                         if inter <= c <= union)

    def convex_hull(self, seeds, cap=200000):
        """Smallest interval-closed superset, by iterated interval closure.

        Each unordered pair is expanded once, in the round where its later
        member arrived.  Verified against halfspace_hull by callers and
        tests; the two agree whenever the true hull fits in the window.
        """
        current = set(seeds)
        if not current:
            raise EmptySubcomplex("hull of nothing")
        new = sorted(current)
        while new:
            if len(current) > cap:
                raise ClosureDiverged("hull cap", witness=len(current))
            newset = set(new)
            grown = set()
            for u in new:
                for v in current:
                    if v in newset and v <= u:
                        continue
                    for m in self.interval(u, v):
                        if m not in current and m not in grown:
                            grown.add(m)
            current |= grown
            new = sorted(grown)
        return ConvexSubcomplex(self, current)

    def is_convex(self, vset):
        return frozenset(vset) == self.halfspace_hull(vset)

    # -- walls ---------------------------------------------------------------

    def carriers(self):
        """Vertex set of each wall's carrier (dual edge endpoints)."""
        if self._carriers is None:
            cs = [set() for _ in self.walls]
            for (u, v), w in self.edge_wall.items():
                cs[w].add(u)
                cs[w].add(v)
            self._carriers = [frozenset(c) for c in cs]
        return self._carriers

    def wall_trusted(self, w):
        """A wall is trusted when some dual edge has both ends trusted."""
        for u in self.carriers()[w]:
            if not self.trusted[u]:
                continue
            for v in self._adj[u]:
                if self.trusted[v] and self.edge_wall.get(
                        (min(u, v), max(u, v))) == w:
                    return True
        return False

    def halfspace(self, w, side):
        return frozenset(i for i, c in enumerate(self.crossed)
                         if (w in c) == bool(side))

    def parallel(self, F1, F2):
        """Subcomplexes are parallel iff they cross the same walls."""
        return F1.crossing_walls() == F2.crossing_walls()

    # -- validation ------------------------------------------------------------

    def check_median(self, rng=None, samples=MEDIAN_CHECK_SAMPLES):
        """Median closure on all triples (small) or a seeded sample.

        In a periodic window a missing majority vertex may just have been
        truncated away; the algebraic median decides whether that happened
        or the input genuinely is not median.
        """
        n = len(self.vertices)
        if n <= MEDIAN_CHECK_CAP:
            triples = ((x, y, z) for x in range(n) for y in range(x, n)
                       for z in range(y, n))
        else:
            import random
            rng = rng or random.Random(0)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(samples))
        for (x, y, z) in triples:
            a, b, c = self.crossed[x], self.crossed[y], self.crossed[z]
            maj = (a & b) | (a & c) | (b & c)
            if self._by_crossed.get(maj) is None:
                if self.presentation is not None:
                    P = self.presentation
                    m = P.median(self.vertices[x], self.vertices[y],
                                 self.vertices[z])
                    if len(m) > (self.radius or 0):
                        continue
                raise NotMedian("majority point missing",
                                witness=(self.vertices[x], self.vertices[y],
                                         self.vertices[z]))

    def summary(self):
        return {
            "vertices": len(self.vertices),
            "edges": len(self.edges),
            "walls": len(self.walls),
            "trusted_vertices": sum(1 for t in self.trusted if t),
            "radius": self.radius,
            "margin": self.margin,
            "basepoint": self.vertices[self.basepoint],
        }


# -- builders ------------------------------------------------------------------


def _bfs_order(n, adj, root):
    order, parent = [], {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in adj[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return order, parent


def build_explicit(vertices, edges, basepoint=None, check=True):
    """Cube-complex window from an explicit graph.

    Walls are unions of opposite edge pairs over all squares; wall sets are
    propagated over a spanning tree and cross-checked on the remaining
    edges.  Raises Disconnected or NotMedian (with a witness) on bad input.
    """
    labels = list(vertices)
    index = {v: i for i, v in enumerate(labels)}
    n = len(labels)
    if n == 0:
        raise EmptySubcomplex("no vertices")
    es = set()
    for (u, v) in edges:
        iu, iv = index[u], index[v]
        if iu == iv:
            raise NotMedian("loop edge", witness=u)
        es.add((min(iu, iv), max(iu, iv)))
    es = sorted(es)
    adj = [[] for _ in range(n)]
    for (u, v) in es:
        adj[u].append(v)
        adj[v].append(u)

    # wall classes: transitive closure of opposite-edges-in-a-square
    parent = list(range(len(es)))
    eidx = {e: i for i, e in enumerate(es)}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    adjset = [set(a) for a in adj]
    for u in range(n):
        for v in adj[u]:
            for w in adj[u]:
                if v >= w:
                    continue
                # common neighbors x != u close the square u,v,x,w
                for x in adjset[v] & adjset[w]:
                    if x == u:
                        continue
                    union(eidx[(min(u, v), max(u, v))],
                          eidx[(min(w, x), max(w, x))])
                    union(eidx[(min(u, w), max(u, w))],
                          eidx[(min(v, x), max(v, x))])

    roots = sorted({find(i) for i in range(len(es))})
    wall_of_root = {r: k for k, r in enumerate(roots)}
    edge_wall = {es[i]: wall_of_root[find(i)] for i in range(len(es))}
    W = len(roots)

    b = index[basepoint] if basepoint is not None else 0
    order, par = _bfs_order(n, adj, b)
    if len(order) != n:
        raise Disconnected("graph is not connected")
    crossed = [None] * n
    for u in order:
        if par[u] is None:
            crossed[u] = frozenset()
            continue
        p = par[u]
        w = edge_wall[(min(u, p), max(u, p))]
        crossed[u] = crossed[p] ^ {w}
    for (u, v) in es:
        w = edge_wall[(u, v)]
        if crossed[u] ^ crossed[v] != {w}:
            raise NotMedian("edge does not flip exactly its wall",
                            witness=(labels[u], labels[v]))
    seen = {}
    for i in range(n):
        if crossed[i] in seen:
            raise NotMedian("two vertices on the same side of every wall",
                            witness=(labels[seen[crossed[i]]], labels[i]))
        seen[crossed[i]] = i

    X = CubeComplex(labels, es, list(range(W)), crossed, edge_wall,
                    basepoint=b)
    if check:
        X.check_median()
        rows = range(n) if n <= 200 else range(9)
        for i in rows:
            d = X.dist_row(i)
            bfs = _graph_dists(adj, i)
            if not all(d[j] == bfs[j] for j in range(n)):
                raise NotMedian("wall count disagrees with graph distance",
                                witness=labels[i])
    return X


def _graph_dists(adj, src):
    dist = [-1] * len(adj)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def build_raag_ball(presentation, radius, margin=2, check=True):
    """Cayley-ball window of a right-angled Artin group.

    Vertices are canonical words of length <= radius; the trusted part is
    the sub-ball of radius - margin.  Wall keys are algebraic, so windows
    of different radii agree on their common part.
    """
    P = presentation
    if radius < 1:
        raise RadiusTooSmall("radius must be at least 1", witness=radius)
    if margin < 0 or margin > radius:
        raise RadiusTooSmall("margin must fit inside the radius",
                             witness=(radius, margin))
    labels = P.ball(radius)
    index = {w: i for i, w in enumerate(labels)}
    edges = set()
    edge_letter = {}
    for w in labels:
        for x in P.letters:
            v = P.mul(w, x)
            if v in index:
                e = (min(index[w], index[v]), max(index[w], index[v]))
                if e not in edges:
                    edges.add(e)
                    edge_letter[e] = (w, x)
    edges = sorted(edges)

    wall_keys = {}
    edge_wall = {}
    for e in edges:
        tail, x = edge_letter[e]
        key = P.wall(tail, x)
        if key not in wall_keys:
            wall_keys[key] = len(wall_keys)
        edge_wall[e] = wall_keys[key]
    walls = sorted(wall_keys, key=lambda k: (k[0], len(k[1]), k[1]))
    renum = {wall_keys[k]: i for i, k in enumerate(walls)}
    edge_wall = {e: renum[w] for e, w in edge_wall.items()}

    wall_pos = {k: i for i, k in enumerate(walls)}
    crossed = [frozenset(wall_pos[key] for key in P.crossed_from_identity(w))
               for w in labels]

    trusted = [len(w) <= radius - margin for w in labels]
    X = CubeComplex(labels, edges, walls, crossed, edge_wall,
                    basepoint=index[""], trusted=trusted,
                    presentation=P, radius=radius, margin=margin)
    if check:
        X.check_median()
    return X
