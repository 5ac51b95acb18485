"""Exact word calculus for right-angled Artin groups.

Generators are single lowercase letters; the inverse of ``a`` is written ``A``.
A word is a plain string of signed letters.  All public operations work with
canonical (shortlex-least reduced) representatives, so words compare by ``==``.

The calculus is the algebraic half of the package: it answers questions about
the infinite group exactly (lengths, gates onto standard subcomplexes, wall
identity, medians, membership in products of parabolics), while the geometric
half materializes finite windows of the associated cube complex.

>>> P = Presentation("ab", ["ab"])        # two commuting generators
>>> P.canon("ba")
'ab'
>>> P.dist("a", "b")
2
"""

from .errors import ParseError


def base(x):
    return x.lower()


def inv_letter(x):
    return x.swapcase()


def inverse(w):
    """Inverse word: reverse and flip case.  Canonical iff input reduced."""
    return w[::-1].swapcase()


def _letter_key(x):
    # shortlex letter order: a < A < b < B < ...
    return (x.lower(), x.isupper())


class Presentation:
    """A finite simplicial graph on single-letter generators.

    Edges are commutation relations.  ``Presentation("abc", ["ab", "bc"])`` is
    the path a-b-c.  Everything downstream (walls, factor classes, boundary
    motifs) keys off this object, so two models agree iff their presentations
    compare equal.
    """

    def __init__(self, generators, edges):
        gens = tuple(sorted(generators))
        if len(set(gens)) != len(gens):
            raise ParseError("repeated generator", witness=generators)
        for g in gens:
            if not (len(g) == 1 and g.isalpha() and g.islower()):
                raise ParseError("generators must be single lowercase letters",
                                 witness=g)
        adj = {g: set() for g in gens}
        for e in edges:
            u, v = e[0], e[1]
            if u not in adj or v not in adj:
                raise ParseError("edge uses unknown generator", witness=e)
            if u == v:
                raise ParseError("loop edge", witness=e)
            adj[u].add(v)
            adj[v].add(u)
        self.generators = gens
        self.adjacency = {g: frozenset(s) for g, s in adj.items()}
        self.letters = tuple(x for g in gens for x in (g, g.upper()))
        self._commute = {}
        for x in self.letters:
            for y in self.letters:
                self._commute[x + y] = (base(x) == base(y)
                                        or base(y) in self.adjacency[base(x)])

    def __eq__(self, other):
        return (isinstance(other, Presentation)
                and self.generators == other.generators
                and self.adjacency == other.adjacency)

    def __repr__(self):
        es = sorted("".join(sorted((g, h))) for g in self.generators
                    for h in self.adjacency[g] if g < h)
        return "Presentation(%r, %r)" % ("".join(self.generators), es)

    def commutes(self, x, y):
        return self._commute[x + y]

    def link(self, g):
        return self.adjacency[base(g)]

    def star(self, g):
        return self.adjacency[base(g)] | {base(g)}

    def check_word(self, w):
        for x in w:
            if base(x) not in self.adjacency:
                raise ParseError("unknown letter in word", witness=x)
        return w

    # -- reduction and canonical form -------------------------------------

    def reduce(self, w):
        """Fully reduced form of w (piling: right fold with cancellation)."""
        out = []
        for x in self.check_word(w):
            j = None
            for i in range(len(out) - 1, -1, -1):
                if out[i] == inv_letter(x):
                    j = i
                    break
                if not self.commutes(out[i], x):
                    break
            if j is None:
                out.append(x)
            else:
                del out[j]
        return "".join(out)

    def canon(self, w):
        """Shortlex-least reduced representative.

        Repeatedly extracts the least letter that can move to the front.
        Greedy is exact here: every representative starts with some
        front-movable letter, and extracting one leaves the commutation
        class of the remainder intact.
        """
        rest = list(self.reduce(w))
        out = []
        while rest:
            best = None
            for i, x in enumerate(rest):
                if all(self._commute[rest[j] + x] for j in range(i)):
                    if best is None or _letter_key(x) < _letter_key(rest[best]):
                        best = i
            out.append(rest.pop(best))
        return "".join(out)

    def mul(self, *ws):
        return self.canon("".join(ws))

    def inv(self, w):
        return self.canon(inverse(w))

    def length(self, w):
        return len(self.reduce(w))

    def dist(self, u, v):
        return self.length(inverse(u) + v)

    # -- prefixes, traces, cosets ------------------------------------------

    def initial_letters(self, w):
        """Letters that can start some reduced form of w."""
        w = self.reduce(w)
        out = []
        for i, x in enumerate(w):
            if all(self._commute[w[j] + x] for j in range(i)):
                if x not in out:
                    out.append(x)
        return out

    def trace(self, w, A):
        """Split w = p * r with p the longest prefix lying in <A>.

        A is a set of generators.  p is the gate of w on the standard
        subcomplex <A> based at the identity; r is the rest.  Both canonical.
        """
        A = frozenset(A)
        took, rest = [], []
        for x in self.reduce(w):
            if base(x) in A and all(self._commute[y + x] for y in rest):
                took.append(x)
            else:
                rest.append(x)
        return self.canon("".join(took)), self.canon("".join(rest))

    def gate_word(self, w, A):
        """Gate of the vertex w on <A>: the <A>-prefix of w."""
        return self.trace(w, A)[0]

    def coset_rep(self, w, A):
        """Shortlex-least minimal-length representative of the coset w<A>.

        Strips the longest <A>-suffix; what is left is the gate of the
        identity on the coset, which is the unique closest point.
        """
        p, r = self.trace(inverse(self.reduce(w)), A)
        return self.canon(inverse(r))

    def in_parabolic(self, w, A):
        A = frozenset(A)
        return all(base(x) in A for x in self.reduce(w))

    def in_product(self, w, parabolics):
        """Is w in the set product <P1><P2>...<Pk>?

        Greedy minimal-stage assignment over the reduced word: a letter's
        stage must be >= the stage of every earlier non-commuting letter, and
        the letter's generator must lie in the chosen stage's set.  Stages are
        totally ordered and the constraints are monotone, so greedy least
        stages decide membership exactly.
        """
        sets = [frozenset(Pi) for Pi in parabolics]
        k = len(sets)
        w = self.reduce(w)
        floor = []
        for i, x in enumerate(w):
            lo = 0
            for j in range(i):
                if not self._commute[w[j] + x]:
                    lo = max(lo, floor[j])
            while lo < k and base(x) not in sets[lo]:
                lo += 1
            if lo == k:
                return False
            floor.append(lo)
        return True

    # -- walls ---------------------------------------------------------------

    def wall(self, u, x):
        """Identity key of the wall dual to the edge (u, u*x).

        The wall through a g-edge is determined by g and the coset of the
        edge's tail in <link g>.  Uppercase x names the same wall as the
        lowercase letter at the shifted tail.
        """
        g = base(x)
        tail = u if x == g else self.mul(u, x)
        return (g, self.coset_rep(tail, self.link(g)))

    def crossed_from_identity(self, w):
        """Frozenset of walls separating the identity from w."""
        w = self.reduce(w)
        out = []
        for i, x in enumerate(w):
            out.append(self.wall(w[:i], x))
        return frozenset(out)

    def crossed_between(self, u, v):
        """Walls separating u from v (each crossed once by any geodesic)."""
        w = self.reduce(inverse(u) + v)
        out = []
        for i, x in enumerate(w):
            out.append(self.wall(u + w[:i], x))
        return frozenset(out)

    def separates(self, wall_key, u, v):
        return wall_key in self.crossed_between(u, v)

    # -- medians and intervals ------------------------------------------------

    def median(self, x, y, z):
        """The median vertex of x, y, z.

        Walk from x, crossing only walls that lead towards both y and z;
        such a wall is always available as a first letter of both difference
        words, so the walk greedily empties the shared wall set.
        """
        m = x
        wy = self.mul(inverse(x), y)
        wz = self.mul(inverse(x), z)
        while True:
            iy = self.initial_letters(wy)
            iz = set(self.initial_letters(wz))
            step = None
            for l in iy:
                if l in iz:
                    step = l
                    break
            if step is None:
                return self.canon(m)
            m = m + step
            wy = self.mul(inv_letter(step), wy)
            wz = self.mul(inv_letter(step), wz)

    def interval(self, u, v):
        """All vertices on geodesics from u to v, as canonical words.

        Grows from u, only ever crossing walls separating u from v, so the
        result is exactly the interval.  Size is the count of linear
        extensions; keep the endpoints close.
        """
        target = self.mul(inverse(u), v)
        seen = {target}
        frontier = [target]
        # remainder r = walls still to cross; the vertex is u * target * r^-1
        out = set()
        while frontier:
            nxt = []
            for r in frontier:
                out.add(self.mul(u, target, inverse(r)))
                for l in self.initial_letters(r):
                    r2 = self.mul(inv_letter(l), r)
                    if r2 not in seen:
                        seen.add(r2)
                        nxt.append(r2)
            frontier = nxt
        return sorted(out, key=lambda w: (len(w), w))

    # -- enumeration -----------------------------------------------------------

    def ball(self, R):
        """Canonical words of length <= R, sorted shortlex.

        >>> Presentation("ab", ["ab"]).ball(1)
        ['', 'A', 'B', 'a', 'b']
        """
        seen = {""}
        frontier = [""]
        for _ in range(R):
            nxt = []
            for w in frontier:
                for x in self.letters:
                    v = self.canon(w + x)
                    if len(v) == len(w) + 1 and v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier = nxt
        return sorted(seen, key=lambda w: (len(w), w))

    def sphere(self, R):
        return [w for w in self.ball(R) if len(w) == R]

    # -- standard subcomplex relations -----------------------------------------

    def perp(self, A):
        """Generators commuting with every generator in A (A excluded)."""
        A = frozenset(A)
        out = set()
        for g in self.generators:
            if g not in A and all(h in self.adjacency[g] for h in A):
                out.add(g)
        return frozenset(out)

    def parallel_cosets(self, v, A, u):
        """Do v<A> and u<A> have the same crossing walls?

        Parallel standard subcomplexes differ by an offset in <A u A-perp>.
        """
        A = frozenset(A)
        return self.in_parabolic(self.mul(inverse(u), v), A | self.perp(A))

    def nested_cosets(self, v, A, u, B):
        """Is v<A> parallel into a standard subcomplex of u<B>?"""
        if not frozenset(A) <= frozenset(B):
            return False
        off = self.mul(inverse(u), v)
        return self.in_product(off, [frozenset(B),
                                     frozenset(A) | self.perp(A)])

    def orthogonal_cosets(self, v, A, u, B):
        """Do v<A> and u<B> span a product (every wall pair crosses)?"""
        A, B = frozenset(A), frozenset(B)
        if not A or not B:
            return False
        for g in A:
            for h in B:
                if g != h and h not in self.adjacency[g]:
                    return False
                if g == h:
                    return False
        off = self.mul(inverse(u), v)
        return self.in_product(off, [B | self.perp(B), A | self.perp(A)])

    def shared_direction(self, v, A, u, B, g):
        """Does some g-wall cross both v<A> and u<B>?"""
        if base(g) not in frozenset(A) or base(g) not in frozenset(B):
            return False
        st = self.star(g)
        off = self.mul(inverse(u), v)
        return self.in_product(off, [frozenset(B), st, frozenset(A)])
