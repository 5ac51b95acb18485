"""Hierarchical assembly over a factor system.

Projections send a vertex to the clique of walls at its gate; relative
projections are gate images of one domain representative in another.
Constants are measured, never assumed: every sweep records the smallest
value that makes its axiom hold on the sampled instances, so a regression
shows up as a changed number rather than silent slack.  Instances the
window clips (a gate landing outside the ball) are skipped and counted.

Relation rows, factored graphs, and BFS distance rows are built lazily
and cached, because large periodic windows hold thousands of domain
classes and any eager quadratic table dwarfs the actual sweep work.
Above DOMAIN_CAP classes the sweeps walk a deterministic head of the
near-origin ordering (short coset base first) plus seeded random fill;
the head contains every class of a smaller window of the same group, so
constants measured there are comparable across radii.
"""

import itertools
import random
from collections import OrderedDict, defaultdict, deque

from .complexes import wall_name
from .contact import delta_probe, factored_contact_graph
from .errors import Inconsistent, NoFit, NotFound, Untrusted
from .factors import (AMBIENT_ID, EQUAL, NESTED, ORTHOGONAL,
                      REVERSE_NESTED, TRANSVERSE)

KAPPA_TABLE = (5, 10, 20)
GEODESIC_CAP = 64
VERTEX_CAP = 40            # sampled basepoints per sweep
PAIR_CAP = 300             # sampled vertex pairs per sweep
INSTANCE_CAP = 60000       # domain pairs times basepoints, per sweep
TRIPLE_CAP = 4000          # domain pair/triple pool below DOMAIN_CAP
EXHAUSTIVE_DOMAINS = 70    # below this every domain pair is swept
FAMILY_CAP = 60            # orthogonal families probed for realization
GRID_K_CAP = 8
GRID_C_CAP = 64
THETA_CAP = 512
D_CAP = 16
DELTA_NODE_CAP = 6000      # four-point probes skip graphs above this

DOMAIN_CAP = 320           # sweeps walk at most this many domains
ROW_CAP = 32               # relation rows expanded above DOMAIN_CAP
NESTED_TARGETS = 12        # nest parents kept per expanded row
ANCHOR_TARGETS = 2         # anchor diameters per expanded row and kind
SCALE_PAIR_CAP = 1200      # consistency pair pool above DOMAIN_CAP
TRIPLE_W_DRAWS = 6         # third-domain draws per nested pair
BGI_W_CAP = 24             # host domains probed above DOMAIN_CAP
BELOW_CAP = 8              # nested domains kept per host
DELTA_GRAPH_CAP = 48       # graphs probed for delta above DOMAIN_CAP
OTHERS_SCALE_CAP = 8       # anchor spot checks per realization candidate
ORTH_HIT_BUDGET = 40       # draws to find one orthogonal partner
ANCHOR_NODE_CAP = 64       # largest anchor measured per node at scale
GRAPH_CACHE_CAP = 96       # factored graphs kept in memory
ROW_LOAD_CAP = 1500000     # total BFS row entries kept in memory


class HHSConstants:
    """Measured constants of an assembled structure."""

    FIELDS = ("E", "kappa0", "xi", "delta", "K_lip", "n_complexity",
              "theta_e", "theta_u", "lambda_ll", "D0", "alpha", "norm_C")

    def __init__(self):
        for f in self.FIELDS:
            setattr(self, f, None)

    def as_dict(self):
        return {f: getattr(self, f) for f in self.FIELDS}

    def __repr__(self):
        inner = ", ".join("%s=%s" % (f, getattr(self, f))
                          for f in self.FIELDS)
        return "HHSConstants(%s)" % inner


class AxiomEntry:
    def __init__(self, name, constants, instances, skipped=0, witnesses=()):
        self.name = name
        self.constants = constants
        self.instances = instances
        self.skipped = skipped
        self.witnesses = list(witnesses)

    @property
    def ok(self):
        return not self.witnesses

    def lines(self):
        out = []
        for key in sorted(self.constants):
            out.append("%-24s %-12s = %s" % (self.name, key,
                                             self.constants[key]))
        if not self.constants:
            out.append("%-24s holds on %d instances"
                       % (self.name, self.instances))
        for w in self.witnesses:
            out.append("%-24s VIOLATION %r" % (self.name, w))
        return out


class AxiomReport:
    def __init__(self, entries, constants):
        self.entries = entries
        self.constants = constants

    @property
    def ok(self):
        return all(e.ok for e in self.entries)

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def lines(self):
        out = []
        for e in self.entries:
            out.extend(e.lines())
        out.append("verdict: %s" % ("all axioms hold"
                                    if self.ok else "violations found"))
        return out


class DistanceFormulaFit:
    def __init__(self, s, K_df, C_df, worst_pair, pairs_tested):
        self.s = s
        self.K_df = K_df
        self.C_df = C_df
        self.worst_pair = worst_pair
        self.pairs_tested = pairs_tested

    def __repr__(self):
        return ("DistanceFormulaFit(s=%d, K=%d, C=%d, pairs=%d)"
                % (self.s, self.K_df, self.C_df, self.pairs_tested))


class RealizedSet:
    def __init__(self, vertices, theta_e, diameter):
        self.vertices = vertices
        self.theta_e = theta_e
        self.diameter = diameter


class HierarchyPath:
    def __init__(self, vertices, D0):
        self.vertices = vertices
        self.D0 = D0

    def __len__(self):
        return len(self.vertices)


def _set_distance(G, A, B):
    """Least graph distance between two node sets, multi-source BFS."""
    A, B = set(A), set(B)
    if A & B:
        return 0
    seen = set(A)
    frontier = deque((a, 0) for a in sorted(A))
    while frontier:
        node, d = frontier.popleft()
        for nxt in G.adj[node]:
            if nxt in B:
                return d + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, d + 1))
    return None


class HierarchicalStructure:
    """Factor system plus projections into every factored contact graph."""

    def __init__(self, X, fs, seed=0):
        self.complex = X
        self.factors = fs
        self.seed = seed
        self.ids = fs.class_ids()
        self.sampled = len(self.ids) > DOMAIN_CAP
        self.reps = {cid: fs.domain(cid).representative for cid in self.ids}
        self._names = [wall_name(k) for k in X.walls]
        self._name_idx = {nm: i for i, nm in enumerate(self._names)}
        self._wall_edges = defaultdict(list)
        for (a, b), wi in X.edge_wall.items():
            self._wall_edges[wi].append((a, b))
        self._graphs = OrderedDict()
        self._above = {}
        self._below = {}
        self._orth = {}
        self._near = None
        self._pi = {}
        self._gate = {}
        self._rho = {}
        self._rho_dn = {}
        self._rows = OrderedDict()
        self._row_load = 0
        self.constants = HHSConstants()
        self.constants.n_complexity = fs.complexity()

    # -- lazy relation rows and graphs ---------------------------------------

    def rel(self, u, v):
        return self.factors.relation(u, v)

    def graph(self, cid):
        """Factored contact graph of the domain, built on first use."""
        G = self._graphs.get(cid)
        if G is None:
            G = factored_contact_graph(self.factors, cid)
            self._graphs[cid] = G
            if len(self._graphs) > GRAPH_CACHE_CAP:
                for old in self._graphs:
                    # the ambient graph is the expensive one; keep it
                    if old != AMBIENT_ID:
                        del self._graphs[old]
                        break
        else:
            self._graphs.move_to_end(cid)
        return G

    def above(self, u):
        """Domains the given one is properly nested in."""
        row = self._above.get(u)
        if row is None:
            row = frozenset(
                v for v in self.factors.nested_above_candidates(u)
                if self.rel(u, v) == NESTED)
            self._above[u] = row
        return row

    def below(self, w):
        """Domains properly nested in the given one."""
        row = self._below.get(w)
        if row is None:
            row = frozenset(
                v for v in self.factors.nested_below_candidates(w)
                if self.rel(v, w) == NESTED)
            self._below[w] = row
        return row

    def orth(self, u):
        """Domains orthogonal to the given one."""
        row = self._orth.get(u)
        if row is None:
            row = frozenset(
                v for v in self.factors.orthogonal_candidates(u)
                if self.rel(u, v) == ORTHOGONAL)
            self._orth[u] = row
        return row

    def _near_key(self, cid):
        if cid == AMBIENT_ID:
            return (0, 0, cid)
        base = self.factors.domain(cid).base or ""
        return (1, len(base), cid)

    def head(self, k):
        """First k domains in near-origin order: ambient first, then by
        coset base length.  Stable across window radii."""
        if self._near is None:
            self._near = sorted(self.ids, key=self._near_key)
        return self._near[:k]

    @property
    def sweep_ids(self):
        return self.ids if not self.sampled else self.head(DOMAIN_CAP)

    # -- projections -------------------------------------------------------

    def _clique_at(self, g, cid):
        X = self.complex
        verts = self.reps[cid].vertices
        out = set()
        for n in X.neighbors(g):
            if n in verts:
                out.add(self._names[X.edge_wall[(min(g, n), max(g, n))]])
        return frozenset(out)

    def pi(self, x, cid):
        """Clique of walls of the domain at the gate of x; Untrusted when
        the gate leaves the window."""
        key = (x, cid)
        if key not in self._pi:
            g = self.complex.gate(x, self.reps[cid])
            self._gate[key] = g
            self._pi[key] = self._clique_at(g, cid)
        return self._pi[key]

    def pi_image(self, cid, xs=None):
        """Union of pi over the given vertices (all trusted ones by
        default), skipping the ones whose gate is clipped."""
        if xs is None:
            xs = self.trusted_vertices()
        out = set()
        for x in xs:
            try:
                out |= self.pi(x, cid)
            except Untrusted:
                continue
        return frozenset(out)

    def rho(self, u, v):
        """Anchor of domain u inside the graph of domain v: the wall
        cliques along the gate image of u's representative."""
        key = (u, v)
        if key not in self._rho:
            X = self.complex
            target = self.reps[v]
            out = set()
            clipped = 0
            for x in sorted(self.reps[u].vertices):
                try:
                    g = X.gate(x, target)
                except Untrusted:
                    clipped += 1
                    continue
                out |= self._clique_at(g, v)
            if not out:
                raise Untrusted("anchor fully clipped by the window",
                                witness=(u, v, clipped))
            self._rho[key] = frozenset(out)
        return self._rho[key]

    def rho_down(self, w, v, node):
        """Image of a single node of the graph of w inside the graph of a
        nested domain v: gate of the node's carrier, or of the coned
        members for a cone node."""
        key = (w, v, node)
        if key not in self._rho_dn:
            X = self.complex
            G = self.graph(w)
            if node in G.cone_map:
                verts = set()
                for m in self.factors.members_of_class_in(
                        G.cone_map[node], self.factors.domain(w)):
                    verts |= m.vertices
            else:
                inside = self.reps[w].vertices
                verts = set()
                for a, b in self._wall_edges[self._name_idx[node]]:
                    if a in inside and b in inside:
                        verts.add(a)
                        verts.add(b)
            target = self.reps[v]
            out = set()
            for x in sorted(verts):
                try:
                    g = X.gate(x, target)
                except Untrusted:
                    continue
                out |= self._clique_at(g, v)
            self._rho_dn[key] = frozenset(out)
        return self._rho_dn[key]

    # -- distances -----------------------------------------------------------

    def dist_row(self, cid, sources):
        """BFS distance row from a node set, cached by (domain, set)."""
        key = (cid, frozenset(sources))
        row = self._rows.get(key)
        if row is not None:
            self._rows.move_to_end(key)
            return row
        G = self.graph(cid)
        row = {}
        frontier = deque()
        for a in sorted(key[1]):
            row[a] = 0
            frontier.append(a)
        while frontier:
            node = frontier.popleft()
            d = row[node] + 1
            for nxt in G.adj[node]:
                if nxt not in row:
                    row[nxt] = d
                    frontier.append(nxt)
        self._rows[key] = row
        self._row_load += len(row)
        while self._row_load > ROW_LOAD_CAP and len(self._rows) > 1:
            _, old = self._rows.popitem(last=False)
            self._row_load -= len(old)
        return row

    def dist(self, cid, A, B):
        A, B = set(A), set(B)
        if A & B:
            return 0
        row = self.dist_row(cid, B)
        best = min((row[a] for a in A if a in row), default=None)
        if best is None:
            raise Untrusted("projection sets in separate components",
                            witness=cid)
        return best

    def ddist(self, cid, x, y):
        """Distance between the projections of two vertices."""
        return self.dist(cid, self.pi(x, cid), self.pi(y, cid))

    def diam(self, cid, A):
        A = sorted(set(A))
        if len(A) <= 1:
            return 0
        G = self.graph(cid)
        best = 0
        targets = set(A)
        for a in A:
            # BFS until the last member is found; tight sets finish early
            seen = {a}
            left = len(targets) - 1
            frontier = deque(((a, 0),))
            far = 0
            while frontier and left:
                node, d = frontier.popleft()
                for nxt in G.adj[node]:
                    if nxt in seen:
                        continue
                    seen.add(nxt)
                    if nxt in targets:
                        left -= 1
                        far = d + 1
                    frontier.append((nxt, d + 1))
            if left:
                raise Untrusted("projection set in separate components",
                                witness=cid)
            if far > best:
                best = far
        return best

    def trusted_vertices(self):
        X = self.complex
        return [i for i in range(len(X.vertices)) if X.trusted[i]]

    def summary(self):
        return {
            "domains": len(self.ids),
            "complexity": self.constants.n_complexity,
            "graphs_built": {cid: len(G)
                             for cid, G in self._graphs.items()},
        }


def build_structure(X, fs, seed=0):
    return HierarchicalStructure(X, fs, seed=seed)


# -- sampling helpers ----------------------------------------------------------


def _sample_pairs(items, cap, rng):
    n = len(items)
    if n * (n - 1) // 2 <= cap:
        return list(itertools.combinations(items, 2))
    out = set()
    while len(out) < cap:
        a, b = rng.sample(items, 2)
        out.add((a, b) if a < b else (b, a))
    return sorted(out)


def _domain_pairs(H, rng):
    """Ordered domain pairs for the consistency sweep: exhaustive when
    small, every nested pair plus random fill when medium, near-origin
    rows plus random fill at scale."""
    ids = H.ids
    if len(ids) <= EXHAUSTIVE_DOMAINS:
        return [(u, v) for u in ids for v in ids if u != v]
    if not H.sampled:
        pairs = {(u, v) for u in ids for v in H.above(u)}
        cap = TRIPLE_CAP
    else:
        pairs = set()
        for u in H.head(ROW_CAP):
            for v in sorted(H.above(u), key=H._near_key)[:NESTED_TARGETS]:
                pairs.add((u, v))
        cap = SCALE_PAIR_CAP
    while len(pairs) < cap:
        u, v = rng.sample(ids, 2)
        pairs.add((u, v))
    return sorted(pairs)


def _pi_or_none(H, x, u):
    try:
        return H.pi(x, u)
    except Untrusted:
        return None


# -- axiom sweeps ---------------------------------------------------------------


def _anchor_pairs(H, rng):
    """Domain pairs whose anchor diameter feeds xi: all related pairs when
    the window is small, near-origin nested rows plus transverse draws at
    scale."""
    if not H.sampled:
        for u in H.ids:
            for v in H.ids:
                if H.rel(u, v) in (NESTED, TRANSVERSE):
                    yield u, v
        return
    pool = H.sweep_ids
    for u in H.head(ROW_CAP):
        ups = sorted(H.above(u), key=H._near_key)
        for v in ups[:ANCHOR_TARGETS]:
            yield u, v
        found = 0
        for _ in range(ORTH_HIT_BUDGET):
            w = pool[rng.randrange(len(pool))]
            if w != u and H.rel(u, w) == TRANSVERSE:
                yield u, w
                found += 1
                if found >= ANCHOR_TARGETS:
                    break


def _check_projections(H, xs, rng):
    """Defined projections are nonempty cliques; xi bounds their diameter
    and the anchors'; K_lip is the least coarse-Lipschitz constant over
    the sampled pairs."""
    X = H.complex
    xi = 0
    skipped = 0
    witnesses = []
    us = H.sweep_ids
    for u in us:
        G = H.graph(u)
        for x in xs:
            p = _pi_or_none(H, x, u)
            if p is None:
                skipped += 1
                continue
            if not p:
                witnesses.append(("empty projection", x, u))
                continue
            for a, b in itertools.combinations(sorted(p), 2):
                if not G.has_edge(a, b):
                    witnesses.append(("not a clique", x, u, a, b))
            if len(p) > 1:
                xi = max(xi, 1)
    for u, v in _anchor_pairs(H, rng):
        try:
            anchor = H.rho(u, v)
        except Untrusted:
            skipped += 1
            continue
        # at scale an anchor spanning thousands of nodes (a deep tree seen
        # from the ambient graph) costs a BFS per node; measuring it would
        # dominate the sweep, so it is skipped and counted
        if H.sampled and len(anchor) > ANCHOR_NODE_CAP:
            skipped += 1
            continue
        try:
            xi = max(xi, H.diam(v, anchor))
        except Untrusted:
            skipped += 1
    K = 1
    pairs = _sample_pairs(xs, PAIR_CAP, random.Random(0))
    budget = max(1, INSTANCE_CAP // max(1, len(us)))
    for x, y in pairs[:budget]:
        d = X.dist(x, y)
        for u in us:
            px, py = _pi_or_none(H, x, u), _pi_or_none(H, y, u)
            if px is None or py is None:
                skipped += 1
                continue
            if px == py:
                continue
            # walls along the gate geodesic chain consecutive carriers, so
            # the gate distance already bounds the graph distance
            bound = max(0, X.dist(H._gate[(x, u)], H._gate[(y, u)]) - 1)
            if bound <= K * (d + 1):
                continue
            K = max(K, -(-H.dist(u, px, py) // (d + 1)))
    return {"xi": xi, "K_lip": K}, skipped, witnesses


def _check_nesting(H):
    """Strict partial order below a unique maximal element."""
    witnesses = []
    fs = H.factors
    if fs.relation(AMBIENT_ID, AMBIENT_ID) != EQUAL:
        witnesses.append(("ambient not equal to itself",))
    us = H.ids if not H.sampled else H.head(2 * ROW_CAP)
    maximal = [u for u in us if not H.above(u)]
    if maximal != [AMBIENT_ID]:
        witnesses.append(("maximal elements", maximal))
    for u in us:
        au = H.above(u)
        if u in au:
            witnesses.append(("nested in itself", u))
        for v in au:
            if u in H.above(v):
                witnesses.append(("nesting cycle", u, v))
            for w in H.above(v):
                if w != u and w not in au:
                    witnesses.append(("not transitive", u, v, w))
    return {}, 0, witnesses


def _check_orthogonality(H):
    """Symmetric, anti-reflexive, descends under nesting, and admits
    containers: all domains orthogonal to U inside T fit in one proper
    subdomain of T.  At scale the container search walks a finite pool,
    and an exhausted pool counts as a skip, not a violation."""
    witnesses = []
    skipped = 0
    us = H.ids if not H.sampled else H.head(ROW_CAP)
    for u in us:
        ou = H.orth(u)
        if u in ou:
            witnesses.append(("self-orthogonal", u))
        for v in ou:
            if H.rel(v, u) != ORTHOGONAL:
                witnesses.append(("asymmetric", u, v))
        for v in H.above(u):
            if H.rel(v, u) == ORTHOGONAL:
                witnesses.append(("orthogonal and comparable", u, v))
    for w in us:
        ups = sorted(H.above(w))
        if H.sampled:
            # a class sits under hundreds of parallelism classes of
            # products; checking descent against the near-origin ones
            # keeps the orthogonality rows bounded
            ups = sorted(ups, key=H._near_key)[:NESTED_TARGETS]
        for u in ups:
            # w nested in u: anything orthogonal to u is orthogonal to w
            for t in sorted(H.orth(u)):
                if H.rel(t, w) != ORTHOGONAL:
                    witnesses.append(("descent failure", w, u, t))
    for t in us:
        inside = H.below(t)
        pool = sorted(inside) if not H.sampled else \
            [w for w in H.head(2 * ROW_CAP) if w in inside]
        for u in (sorted(inside) if not H.sampled else
                  [w for w in us if w in inside]):
            need = {v for v in H.orth(u) if v in inside}
            if not need:
                continue
            if any(w != t and need <= (H.below(w) | {w}) for w in pool):
                continue
            if H.sampled:
                skipped += 1
            else:
                witnesses.append(("no container", t, u, sorted(need)))
    return {}, skipped, witnesses


def _check_consistency(H, xs, rng):
    """kappa0 over the transverse inequality, the nested inequality, and
    the nested-anchor coherence clause."""
    kappa = 0
    skipped = 0
    pairs = _domain_pairs(H, rng)
    xs_sub = xs
    if len(pairs) * len(xs) > INSTANCE_CAP:
        xs_sub = xs[:max(4, INSTANCE_CAP // len(pairs))]
    nested_pairs = []
    for u, v in pairs:
        rel = H.rel(u, v)
        if rel == TRANSVERSE and u < v:
            try:
                ruv, rvu = H.rho(u, v), H.rho(v, u)
            except Untrusted:
                skipped += 1
                continue
            for x in xs_sub:
                pu, pv = _pi_or_none(H, x, u), _pi_or_none(H, x, v)
                if pu is None or pv is None:
                    skipped += 1
                    continue
                kappa = max(kappa, min(H.dist(v, pv, ruv),
                                       H.dist(u, pu, rvu)))
        elif rel == NESTED:
            nested_pairs.append((u, v))
            try:
                ruv = H.rho(u, v)
            except Untrusted:
                skipped += 1
                continue
            for x in xs_sub:
                pu, pv = _pi_or_none(H, x, u), _pi_or_none(H, x, v)
                if pu is None or pv is None:
                    skipped += 1
                    continue
                down = set()
                for node in sorted(pv):
                    down |= H.rho_down(v, u, node)
                if not down:
                    skipped += 1
                    continue
                kappa = max(kappa, min(H.dist(v, pv, ruv),
                                       H.diam(u, set(pu) | down)))
    # anchors of a nested pair agree inside any third domain over or
    # transverse to the larger one (unless it is orthogonal to the smaller)
    triples = set()
    if not H.sampled:
        for u in H.ids:
            for v in sorted(H.above(u)):
                for w in H.ids:
                    if w in (u, v) or H.rel(u, w) == ORTHOGONAL:
                        continue
                    if H.rel(v, w) in (NESTED, TRANSVERSE):
                        triples.add((u, v, w))
        if len(triples) > TRIPLE_CAP:
            triples = set(rng.sample(sorted(triples), TRIPLE_CAP))
    else:
        ids = H.ids
        for u, v in nested_pairs:
            for _ in range(TRIPLE_W_DRAWS):
                w = ids[rng.randrange(len(ids))]
                if w in (u, v) or H.rel(u, w) == ORTHOGONAL:
                    continue
                if H.rel(v, w) in (NESTED, TRANSVERSE):
                    triples.add((u, v, w))
    for u, v, w in sorted(triples):
        try:
            kappa = max(kappa, H.dist(w, H.rho(u, w), H.rho(v, w)))
        except Untrusted:
            skipped += 1
    return {"kappa0": kappa}, skipped, []


def _geodesics_between(G, A, B, cap, rng):
    """Sample up to cap geodesics between two node sets from the BFS
    parent structure, deduplicated."""
    A, B = sorted(set(A)), set(B)
    dist = {}
    frontier = deque()
    for a in A:
        dist[a] = 0
        frontier.append(a)
    while frontier:
        node = frontier.popleft()
        for nxt in G.adj[node]:
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                frontier.append(nxt)
    targets = [b for b in sorted(B) if b in dist]
    if not targets:
        return []
    closest = min(dist[b] for b in targets)
    targets = [b for b in targets if dist[b] == closest]
    out = set()
    for _ in range(cap):
        path = [rng.choice(targets)]
        while dist[path[-1]] > 0:
            back = sorted(n for n in G.adj[path[-1]]
                          if dist.get(n) == dist[path[-1]] - 1)
            path.append(rng.choice(back))
        out.add(tuple(path[::-1]))
    return [list(p) for p in sorted(out)]


def _bgi_hosts(H, rng):
    """(host, nested domains) pairs for the geodesic-image and large-link
    sweeps; hosts without nested domains carry no instances."""
    out = []
    if not H.sampled:
        for w in H.ids:
            below = sorted(H.below(w))
            if below:
                out.append((w, below))
        return out
    fs = H.factors
    hosts = [w for w in H.head(3 * BGI_W_CAP)
             if fs.nested_below_candidates(w)][:BGI_W_CAP]
    for w in hosts:
        below = sorted(H.below(w), key=H._near_key)
        if not below:
            continue
        keep = below[:BELOW_CAP // 2]
        rest = below[len(keep):]
        if rest:
            keep += [rest[rng.randrange(len(rest))]
                     for _ in range(BELOW_CAP - len(keep))]
        out.append((w, sorted(set(keep))))
    return out


def _check_bgi(H, xs, rng):
    """Geodesic image bound: every sampled geodesic in a domain either
    projects to a small set in a nested domain or comes close to its
    anchor; E_bgi is the largest unavoidable value."""
    E = 0
    skipped = 0
    pairs = _sample_pairs(xs, PAIR_CAP // 4, rng)[:20]
    for w, below in _bgi_hosts(H, rng):
        G = H.graph(w)
        for x, y in pairs:
            pw, qw = _pi_or_none(H, x, w), _pi_or_none(H, y, w)
            if pw is None or qw is None:
                skipped += 1
                continue
            geos = _geodesics_between(G, pw, qw, 8, rng)
            for v in below:
                try:
                    anchor = H.rho(v, w)
                except Untrusted:
                    skipped += 1
                    continue
                for geo in geos:
                    # min(diam, approach) cannot beat the current E once
                    # the geodesic comes this close to the anchor, and
                    # the approach side is the cheap one
                    approach = min(H.dist(w, {n}, anchor) for n in geo)
                    if approach <= E:
                        continue
                    down = set()
                    for node in geo:
                        down |= H.rho_down(w, v, node)
                    diam = H.diam(v, down) if down else 0
                    E = max(E, min(diam, approach))
    return {"E_bgi": E}, skipped, []


def _check_large_links(H, xs, E, rng):
    """lambda such that the domains where x and x' diverge by at least E
    sit under at most lambda*(d+1) maximal ones, each anchored within
    lambda*(d+1) of the projection of x."""
    lam = 1
    skipped = 0
    pairs = _sample_pairs(xs, PAIR_CAP // 4, rng)[:20]
    for w, below in _bgi_hosts(H, rng):
        for x, y in pairs:
            pw, qw = _pi_or_none(H, x, w), _pi_or_none(H, y, w)
            if pw is None or qw is None:
                skipped += 1
                continue
            d = H.dist(w, pw, qw)
            big = []
            for t in below:
                px, py = _pi_or_none(H, x, t), _pi_or_none(H, y, t)
                if px is None or py is None:
                    skipped += 1
                    continue
                if px != py and H.dist(t, px, py) >= E:
                    big.append(t)
            tops = [t for t in big
                    if not any(t2 != t and t2 in H.above(t) for t2 in big)]
            need = len(tops)
            for t in tops:
                try:
                    need = max(need, H.dist(w, pw, H.rho(t, w)))
                except Untrusted:
                    skipped += 1
            lam = max(lam, -(-need // (d + 1)))
    return {"lambda": lam}, skipped, []


def _node_carrier_vertex(H, cid, node):
    """Some window vertex witnessing a node of the domain's graph."""
    G = H.graph(cid)
    if node in G.cone_map:
        mems = H.factors.members_of_class_in(G.cone_map[node],
                                             H.factors.domain(cid))
        return min(min(m.vertices) for m in mems) if mems else None
    inside = H.reps[cid].vertices
    for a, b in sorted(H._wall_edges[H._name_idx[node]]):
        if a in inside and b in inside:
            return a
    return None


def _realization_candidates(H, picks):
    """Candidate realizing vertices for picks of (domain, node, witness
    vertex): the witnesses, the vertex crossing their joint wall set when
    the window holds one, and a median."""
    X = H.complex
    cands = {c for _, _, c in picks}
    if len(picks) >= 2:
        union = set()
        for _, _, c in picks:
            union |= X.crossed[c]
        hit = X.lookup_crossed(frozenset(union))
        if hit is not None:
            cands.add(hit)
        cs = sorted(cands)
        if len(cs) >= 2:
            cands.add(X.median(cs[0], cs[1], X.basepoint))
    return sorted(cands)


def _realization_families(H, rng):
    """Singleton and orthogonal-pair families for the realization probe."""
    if not H.sampled:
        families = [(u,) for u in H.ids]
        families += [(u, v) for u in H.ids
                     for v in sorted(H.orth(u)) if u < v]
        if len(families) > FAMILY_CAP:
            families = sorted(rng.sample(families, FAMILY_CAP))
        return families
    families = [(u,) for u in H.head(2 * FAMILY_CAP // 3)]
    pairs = set()
    for u in H.head(ROW_CAP):
        cands = H.factors.orthogonal_candidates(u)
        for _ in range(ORTH_HIT_BUDGET):
            if not cands:
                break
            v = cands[rng.randrange(len(cands))]
            if H.rel(u, v) == ORTHOGONAL:
                pairs.add((u, v) if u < v else (v, u))
                break
    families += sorted(pairs)
    return families[:FAMILY_CAP]


def _check_partial_realization(H, rng):
    """alpha over sampled orthogonal families with sampled target nodes:
    some vertex projects near every target and near the anchors of the
    family members elsewhere."""
    alpha = 0
    skipped = 0
    families = _realization_families(H, rng)
    others = H.ids
    if H.sampled:
        others = sorted(rng.sample(H.ids, OTHERS_SCALE_CAP))
    elif len(H.ids) > EXHAUSTIVE_DOMAINS:
        others = sorted(rng.sample(H.ids, 30))
    for fam in families:
        picks = []
        for u in fam:
            nodes = sorted(H.graph(u).wall_nodes())
            if not nodes:
                break
            node = rng.choice(nodes)
            c = _node_carrier_vertex(H, u, node)
            if c is None:
                break
            picks.append((u, node, c))
        if len(picks) < len(fam):
            skipped += 1
            continue
        best = None
        for x in _realization_candidates(H, picks):
            worst = 0
            feasible = True
            for u, node, _ in picks:
                p = _pi_or_none(H, x, u)
                if p is None:
                    feasible = False
                    break
                worst = max(worst, H.dist(u, p, {node}))
                for v in others:
                    if v == u or H.rel(u, v) not in (NESTED, TRANSVERSE):
                        continue
                    p2 = _pi_or_none(H, x, v)
                    if p2 is None:
                        continue
                    try:
                        worst = max(worst, H.dist(v, p2, H.rho(u, v)))
                    except Untrusted:
                        continue
            if feasible and (best is None or worst < best):
                best = worst
        if best is None:
            skipped += 1
            continue
        alpha = max(alpha, best)
    return {"alpha": alpha}, skipped, []


def _check_uniqueness(H, xs, rng):
    """theta_u per kappa: 1 plus the largest distance between sampled
    vertices all of whose coordinates stay below kappa."""
    X = H.complex
    pairs = _sample_pairs(xs, PAIR_CAP * 4, rng)
    rows = []
    skipped = 0
    for x, y in pairs:
        best = 0
        usable = False
        for u in H.sweep_ids:
            px, py = _pi_or_none(H, x, u), _pi_or_none(H, y, u)
            if px is None or py is None:
                continue
            usable = True
            if px != py:
                best = max(best, H.dist(u, px, py))
        if not usable:
            skipped += 1
            continue
        rows.append((X.dist(x, y), best))
    table = {}
    for kappa in KAPPA_TABLE:
        worst = 0
        for d, best in rows:
            if best < kappa:
                worst = max(worst, d)
        table[kappa] = worst + 1
    consts = {"theta_u(%d)" % k: table[k] for k in KAPPA_TABLE}
    return (consts, skipped, []), table


def _check_normalized(H, xs):
    """norm_C: eccentricity of the projection image among wall nodes."""
    C = 0
    skipped = 0
    for u in H.sweep_ids:
        G = H.graph(u)
        image = H.pi_image(u, xs)
        if not image:
            skipped += 1
            continue
        for node in G.wall_nodes():
            d = _set_distance(G, {node}, image)
            if d is None:
                skipped += 1
                continue
            C = max(C, d)
    return {"norm_C": C}, skipped, []


def verify_axioms(H, seed=0, samples=VERTEX_CAP, full=True):
    """Measure the smallest constants over sampled (exhaustive when
    small) instance sets, one report entry per axiom; violations are
    recorded as witnesses, never raised.  full=False stops after the
    sweeps that feed E and kappa0, for cheap stability comparisons."""
    rng = random.Random(seed)
    trusted = H.trusted_vertices()
    xs = trusted if len(trusted) <= samples \
        else sorted(rng.sample(trusted, samples))

    entries = []
    c = H.constants

    proj, sk, wit = _check_projections(H, xs, rng)
    entries.append(AxiomEntry("projections", proj, len(xs), sk, wit))
    c.xi = proj["xi"]
    c.K_lip = proj["K_lip"]

    nest, sk, wit = _check_nesting(H)
    entries.append(AxiomEntry("nesting", nest, len(H.sweep_ids) ** 2,
                              sk, wit))

    orth, sk, wit = _check_orthogonality(H)
    entries.append(AxiomEntry("orthogonality", orth,
                              len(H.sweep_ids) ** 2, sk, wit))

    cons, sk, wit = _check_consistency(H, xs, rng)
    entries.append(AxiomEntry("consistency", cons, len(xs), sk, wit))
    c.kappa0 = cons["kappa0"]

    levels = max(H.factors.domain(u).level for u in H.ids)
    comp_wit = [] if levels == c.n_complexity \
        else [("chain length vs complexity", levels, c.n_complexity)]
    entries.append(AxiomEntry("finite-complexity", {"n": c.n_complexity},
                              len(H.ids), 0, comp_wit))

    delta = 0.0
    gs = H.sweep_ids if not H.sampled else H.head(DELTA_GRAPH_CAP)
    for u in gs:
        G = H.graph(u)
        if 4 <= len(G) <= DELTA_NODE_CAP and G.is_connected():
            delta = max(delta, delta_probe(G, seed=seed).delta)
    c.delta = delta

    bgi, sk, wit = _check_bgi(H, xs, rng)
    entries.append(AxiomEntry("geodesic-image", bgi, len(xs), sk, wit))

    pr, sk, wit = _check_partial_realization(H, rng)
    entries.append(AxiomEntry("partial-realization", pr,
                              FAMILY_CAP, sk, wit))
    c.alpha = pr["alpha"]

    c.E = max(c.xi, c.kappa0, int(-(-delta // 1)), c.K_lip, c.alpha,
              bgi["E_bgi"], 1)
    if not full:
        return AxiomReport(entries, c)

    ll, sk, wit = _check_large_links(H, xs, c.E, rng)
    entries.append(AxiomEntry("large-links",
                              {"lambda": ll["lambda"], "E": c.E},
                              len(xs), sk, wit))
    c.lambda_ll = ll["lambda"]

    (uniq, sk, wit), table = _check_uniqueness(H, xs, rng)
    entries.append(AxiomEntry("uniqueness", uniq, len(xs), sk, wit))
    c.theta_u = table[max(KAPPA_TABLE)]

    norm, sk, wit = _check_normalized(H, xs)
    entries.append(AxiomEntry("normalized", norm, len(xs), sk, wit))
    c.norm_C = norm["norm_C"]

    theta_e = 0
    for x in xs[:3]:
        tup = point_tuple(H, x)
        if tup:
            theta_e = max(theta_e, realize(H, tup, c.E).theta_e)
    c.theta_e = theta_e

    d0 = 1
    path_wit = []
    for x, y in _sample_pairs(xs, 4, rng)[:4]:
        try:
            d0 = max(d0, hierarchy_path(H, x, y).D0)
        except NotFound as err:
            path_wit.append(err.witness)
    entries.append(AxiomEntry("hierarchy-paths", {"D0": d0}, 4,
                              0, path_wit))
    c.D0 = d0
    return AxiomReport(entries, c)


def orthogonal_close_check(H):
    """Anchors of an orthogonal pair inside a third domain that contains
    neither and is orthogonal to neither stay within 2E of each other."""
    E = H.constants.E
    if E is None:
        raise Untrusted("measure constants before the anchor check")
    worst = 0
    checked = 0
    witnesses = []
    for u in H.ids:
        for v in sorted(H.orth(u)):
            if v <= u:
                continue
            for w in H.ids:
                if w in (u, v):
                    continue
                ru, rv = H.rel(u, w), H.rel(v, w)
                if ru == ORTHOGONAL or rv == ORTHOGONAL:
                    continue
                if H.rel(w, u) == NESTED or H.rel(w, v) == NESTED:
                    continue
                if ru not in (NESTED, TRANSVERSE):
                    continue
                if rv not in (NESTED, TRANSVERSE):
                    continue
                try:
                    d = H.dist(w, H.rho(u, w), H.rho(v, w))
                except Untrusted:
                    continue
                checked += 1
                worst = max(worst, d)
                if d > 2 * E:
                    witnesses.append((u, v, w, d))
    return {"checked": checked, "worst": worst, "bound": 2 * E,
            "witnesses": witnesses}


# -- distance formula ------------------------------------------------------------


def distance_formula_fit(H, s, pairs=None, seed=0):
    """Least (K, C) on the integer grid with
    sum/K - C <= d <= K*sum + C over the pairs, where the sum keeps the
    coordinates of size at least s."""
    X = H.complex
    rng = random.Random(seed)
    if pairs is None:
        pairs = _sample_pairs(H.trusted_vertices(), PAIR_CAP * 4, rng)
    rows = []
    for x, y in pairs:
        total = 0
        usable = True
        for u in H.ids:
            px, py = _pi_or_none(H, x, u), _pi_or_none(H, y, u)
            if px is None or py is None:
                usable = False
                break
            if px == py:
                continue
            du = H.dist(u, px, py)
            if du >= s:
                total += du
        if usable:
            rows.append((X.dist(x, y), total, (x, y)))
    if not rows:
        raise NoFit("no pair has all projections inside the window",
                    witness=s)
    for K in range(1, GRID_K_CAP + 1):
        for C in range(0, GRID_C_CAP + 1):
            if all(total / K - C <= d <= K * total + C
                   for d, total, _ in rows):
                hardest = max(rows, key=lambda r: abs(r[0] - r[1]))
                return DistanceFormulaFit(s, K, C, hardest[2], len(rows))
    raise NoFit("no fit on the constant grid",
                witness=(GRID_K_CAP, GRID_C_CAP))


# -- realization -------------------------------------------------------------------


def point_tuple(H, x):
    """The projection tuple of a vertex, leaving out domains whose gate
    the window clips."""
    out = {}
    for u in H.ids:
        p = _pi_or_none(H, x, u)
        if p is not None:
            out[u] = p
    return out


def _tuple_consistent(H, tup, kappa):
    """None when the tuple is kappa-consistent, else a witness triple.
    Clauses the window leaves unevaluable pass."""
    ids = [u for u in H.ids if u in tup]
    for u, v in itertools.combinations(ids, 2):
        rel = H.rel(u, v)
        if rel == REVERSE_NESTED:
            u, v, rel = v, u, NESTED
        if rel == TRANSVERSE:
            try:
                m = min(H.dist(v, tup[v], H.rho(u, v)),
                        H.dist(u, tup[u], H.rho(v, u)))
            except Untrusted:
                continue
            if m > kappa:
                return (u, v, m)
        elif rel == NESTED:
            try:
                anchor = H.rho(u, v)
            except Untrusted:
                continue
            down = set()
            for node in sorted(tup[v]):
                down |= H.rho_down(v, u, node)
            if not down:
                continue
            m = min(H.dist(v, tup[v], anchor),
                    H.diam(u, set(tup[u]) | down))
            if m > kappa:
                return (u, v, m)
    return None


def realize(H, tup, kappa):
    """Vertices whose projections all come within theta_e of the tuple,
    with theta_e the smallest value leaving the set nonempty."""
    bad = _tuple_consistent(H, tup, kappa)
    if bad is not None:
        raise Inconsistent("tuple violates consistency at kappa=%d" % kappa,
                           witness=bad)
    X = H.complex
    ids = sorted(tup)
    slack = {}
    for x in H.trusted_vertices():
        worst = 0
        for u in ids:
            p = _pi_or_none(H, x, u)
            if p is None:
                worst = None
                break
            if p != tup[u]:
                worst = max(worst, H.dist(u, p, tup[u]))
        if worst is not None:
            slack[x] = worst
    if not slack:
        raise NotFound("every candidate vertex has a clipped projection",
                       witness=sorted(tup))
    theta = min(slack.values())
    if theta > THETA_CAP:
        raise NotFound("nothing realizes the tuple at theta <= %d"
                       % THETA_CAP, witness=sorted(tup))
    hits = sorted(x for x in slack if slack[x] == theta)
    diam = max((X.dist(a, b) for a, b in
                itertools.combinations(hits, 2)), default=0)
    return RealizedSet(hits, theta, diam)


# -- hierarchy paths ---------------------------------------------------------------


def _vertex_geodesics(X, x, y, cap, rng):
    """Sample edge geodesics inside the interval, deduplicated."""
    iv = set(X.interval(x, y))
    target = X.crossed[y]
    out = set()
    for _ in range(cap):
        path = [x]
        while path[-1] != y:
            cur = path[-1]
            left = len(X.crossed[cur] ^ target)
            steps = sorted(n for n in X.neighbors(cur)
                           if n in iv
                           and len(X.crossed[n] ^ target) == left - 1)
            if not steps:
                break
            path.append(rng.choice(steps))
        if path[-1] == y:
            out.add(tuple(path))
    return [list(p) for p in sorted(out)]


def _unparametrized_quality(H, u, path):
    """Least D making the projected sequence, parametrized by its own
    cumulative length, a (D, D) quasigeodesic; None when clipped."""
    seq = []
    for x in path:
        p = _pi_or_none(H, x, u)
        if p is None:
            return None
        if not seq or H.dist(u, seq[-1], p) > 0:
            seq.append(p)
    cum = [0]
    for i in range(len(seq) - 1):
        cum.append(cum[-1] + H.dist(u, seq[i], seq[i + 1]))
    need = 1.0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            d = H.dist(u, seq[i], seq[j])
            span = cum[j] - cum[i]
            # d <= span by triangle inequality; the binding constraint is
            # span/D - D <= d, quadratic in D
            need = max(need, ((d * d + 4 * span) ** 0.5 - d) / 2)
    return need


def hierarchy_path(H, x, y, D=None):
    """An edge geodesic all of whose projections are unparametrized
    quasigeodesics, with the least measured constant."""
    if x == y:
        return HierarchyPath([x], 1)
    X = H.complex
    rng = random.Random(H.seed)
    cap = D if D is not None else D_CAP
    best = None
    for path in _vertex_geodesics(X, x, y, GEODESIC_CAP, rng):
        need = 1.0
        usable = True
        for u in H.ids:
            q = _unparametrized_quality(H, u, path)
            if q is None:
                usable = False
                break
            need = max(need, q)
        if not usable:
            continue
        D0 = int(-(-need // 1))
        if best is None or D0 < best.D0:
            best = HierarchyPath(path, D0)
        if best.D0 <= 1:
            break
    if best is None or best.D0 > cap:
        raise NotFound("no hierarchy path with constant at most %d" % cap,
                       witness=(x, y))
    return best
