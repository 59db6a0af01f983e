"""Directed/bidirected graphs and the classical cut machinery.

Arcs are dense ids 0..m-1.  A graph built from an undirected edge list
("bidirected") carries two opposing arcs per undirected edge; both arcs
map to the same *cost element*, so a set of arcs is priced by its set of
underlying undirected edges.  Graphs are immutable after construction
and all queries here are pure.
"""

from dataclasses import dataclass
import heapq


class GraphError(ValueError):
    pass


class Graph:
    def __init__(self, n, arcs, element_of, reverse_arc, from_undirected):
        self.n = n
        self.arcs = arcs
        self.element_of = element_of
        self.num_elements = (max(element_of) + 1) if element_of else 0
        self.reverse_arc = reverse_arc
        self.from_undirected = from_undirected
        self.out_arcs = [[] for _ in range(n)]
        self.in_arcs = [[] for _ in range(n)]
        for a, (u, v) in enumerate(arcs):
            self.out_arcs[u].append(a)
            self.in_arcs[v].append(a)
        self._arcs_of_element = [[] for _ in range(self.num_elements)]
        for a, c in enumerate(element_of):
            self._arcs_of_element[c].append(a)

    @property
    def m(self):
        return len(self.arcs)

    @classmethod
    def directed(cls, n, edges):
        """Simple digraph; every arc is its own cost element."""
        seen = set()
        for (u, v) in edges:
            if u == v:
                raise GraphError(f"self-loop {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"arc ({u},{v}) outside node range")
            if (u, v) in seen:
                raise GraphError(f"duplicate arc ({u},{v})")
            seen.add((u, v))
        arcs = [tuple(e) for e in edges]
        return cls(n, arcs, list(range(len(arcs))), [None] * len(arcs), False)

    @classmethod
    def bidirect(cls, n, undirected_edges):
        """Two opposing arcs per undirected edge, one cost element each."""
        seen = set()
        arcs = []
        element_of = []
        reverse_arc = []
        for c, (u, v) in enumerate(undirected_edges):
            if u == v:
                raise GraphError(f"self-loop {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) outside node range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            a = len(arcs)
            arcs.append((u, v))
            arcs.append((v, u))
            element_of += [c, c]
            reverse_arc += [a + 1, a]
        return cls(n, arcs, element_of, reverse_arc, True)

    def elements_of(self, arc_ids):
        return frozenset(self.element_of[a] for a in arc_ids)

    def arcs_of_element(self, c):
        return tuple(self._arcs_of_element[c])

    def undirected_edges(self):
        """One (u, v) pair per cost element (tail of the first arc)."""
        return [self.arcs[axs[0]] for axs in self._arcs_of_element]

    def reachable(self, source, removed_arcs=frozenset()):
        seen = [False] * self.n
        seen[source] = True
        stack = [source]
        while stack:
            u = stack.pop()
            for a in self.out_arcs[u]:
                if a in removed_arcs:
                    continue
                v = self.arcs[a][1]
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return frozenset(i for i in range(self.n) if seen[i])

    def co_reachable(self, target, removed_arcs=frozenset()):
        """Nodes that can reach `target` avoiding the removed arcs."""
        seen = [False] * self.n
        seen[target] = True
        stack = [target]
        while stack:
            v = stack.pop()
            for a in self.in_arcs[v]:
                if a in removed_arcs:
                    continue
                u = self.arcs[a][0]
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        return frozenset(i for i in range(self.n) if seen[i])

    def delta_plus(self, node_set):
        node_set = set(node_set)
        return frozenset(a for a, (u, v) in enumerate(self.arcs)
                         if u in node_set and v not in node_set)

    def is_connected_undirected(self):
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for a in self.out_arcs[u] + self.in_arcs[u]:
                x, y = self.arcs[a]
                w = y if x == u else x
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def to_json(self, s=None, t=None):
        if self.from_undirected:
            edges = [[int(u), int(v)] for (u, v) in self.undirected_edges()]
            directed = False
        else:
            edges = [[int(u), int(v)] for (u, v) in self.arcs]
            directed = True
        return {"n": self.n, "directed": directed, "edges": edges, "s": s, "t": t}

    @classmethod
    def from_json(cls, obj):
        if obj["directed"]:
            return cls.directed(obj["n"], [tuple(e) for e in obj["edges"]])
        return cls.bidirect(obj["n"], [tuple(e) for e in obj["edges"]])


@dataclass(frozen=True)
class Cut:
    """An (s,t)- or global cut as a set of arc ids.

    `side` is the source-side node set when the cut is of the form
    delta+(side); `minimal` asserts no proper subset is a cut.
    """
    arcs: frozenset
    cost: float = None
    minimal: bool = False
    side: frozenset = None

    def elements(self, g):
        return g.elements_of(self.arcs)


def is_st_cut(g, cut_arcs, s, t):
    return t not in g.reachable(s, frozenset(cut_arcs))


def prune_to_minimal(g, cut_arcs, s, t):
    """Shrink a cut to a minimal one: delta+(V_s) plus a greedy sweep.

    V_s is the s-reachable set once `cut_arcs` are removed; delta+(V_s) is
    a subset of the input and already minimal on graphs where every node
    lies on some s-t path.  The greedy removal pass (ascending arc id)
    covers degenerate graphs with dead-end nodes; removability is monotone
    under shrinking C, so one pass suffices.
    """
    cut_arcs = frozenset(cut_arcs)
    if not is_st_cut(g, cut_arcs, s, t):
        raise GraphError("prune_to_minimal: input is not an (s,t)-cut")
    side = g.reachable(s, cut_arcs)
    kept = set(a for a in g.delta_plus(side))
    for a in sorted(kept):
        trial = frozenset(kept - {a})
        if is_st_cut(g, trial, s, t):
            kept.discard(a)
    kept = frozenset(kept)
    side = g.reachable(s, kept)
    return Cut(arcs=kept, minimal=True, side=side)


def shortest_path(g, lengths, s, t, forbidden=frozenset()):
    """Deterministic Dijkstra: min length, then min hops, then the
    lexicographically smallest node sequence.  Returns a list of arc ids
    or None when t is unreachable."""
    if any(lengths[a] < 0 for a in range(g.m)):
        raise GraphError("negative arc length")
    INF = (float("inf"), float("inf"))
    dist = [INF] * g.n           # (length, hops) to t, over reversed arcs
    dist[t] = (0.0, 0)
    pq = [(0.0, 0, t)]
    while pq:
        d, h, v = heapq.heappop(pq)
        if (d, h) > dist[v]:
            continue
        for a in g.in_arcs[v]:
            if a in forbidden:
                continue
            u = g.arcs[a][0]
            cand = (d + lengths[a], h + 1)
            if cand < dist[u]:
                dist[u] = cand
                heapq.heappush(pq, (cand[0], cand[1], u))
    if dist[s] == INF:
        return None
    # Greedy forward walk: among optimal continuations pick the smallest
    # next node id; hops strictly decrease so the walk is simple.
    path = []
    u = s
    while u != t:
        best = None
        for a in g.out_arcs[u]:
            if a in forbidden:
                continue
            v = g.arcs[a][1]
            if dist[v] != INF and \
               (lengths[a] + dist[v][0], 1 + dist[v][1]) == dist[u]:
                if best is None or v < g.arcs[best][1]:
                    best = a
        path.append(best)
        u = g.arcs[best][1]
    return path


class _Dinic:
    EPS = 1e-12

    def __init__(self, n):
        self.n = n
        self.to = []
        self.cap = []
        self.head = [[] for _ in range(n)]
        self.orig = []  # graph arc id behind each residual edge (None = reverse)

    def add(self, u, v, c, arc_id):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(float(c))
        self.orig.append(arc_id)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0.0)
        self.orig.append(None)

    def _bfs(self, s, t):
        level = [-1] * self.n
        level[s] = 0
        q = [s]
        for u in q:
            for i in self.head[u]:
                v = self.to[i]
                if level[v] < 0 and self.cap[i] > self.EPS:
                    level[v] = level[u] + 1
                    q.append(v)
        self.level = level
        return level[t] >= 0

    def _dfs(self, u, t, limit):
        if u == t:
            return limit
        while self.it[u] < len(self.head[u]):
            i = self.head[u][self.it[u]]
            v = self.to[i]
            if self.cap[i] > self.EPS and self.level[v] == self.level[u] + 1:
                pushed = self._dfs(v, t, min(limit, self.cap[i]))
                if pushed > 0:
                    self.cap[i] -= pushed
                    self.cap[i ^ 1] += pushed
                    return pushed
            self.it[u] += 1
        return 0.0

    def max_flow(self, s, t):
        flow = 0.0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                pushed = self._dfs(s, t, float("inf"))
                if pushed <= 0:
                    break
                flow += pushed
        return flow

    def min_cut_side(self, s):
        seen = [False] * self.n
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for i in self.head[u]:
                if self.cap[i] > self.EPS and not seen[self.to[i]]:
                    seen[self.to[i]] = True
                    stack.append(self.to[i])
        return frozenset(i for i in range(self.n) if seen[i])


def min_st_cut_modular(g, weights, s, t):
    """Exact min cut for a modular weight vector via Dinic; the cut is
    extracted as delta+(source-side residual reachability)."""
    if any(weights[a] < 0 for a in range(g.m)):
        raise GraphError("negative weight")
    din = _Dinic(g.n)
    for a, (u, v) in enumerate(g.arcs):
        din.add(u, v, weights[a], a)
    value = din.max_flow(s, t)
    side = din.min_cut_side(s)
    arcs = g.delta_plus(side)
    return Cut(arcs=arcs, cost=value, minimal=True, side=side), value


def _undirected_min_cut(n, adj_weight, s, t):
    """Dinic on a weighted undirected multigraph given as {(u,v): w} with
    u < v; returns (value, source side)."""
    din = _Dinic(n)
    for (u, v), w in sorted(adj_weight.items()):
        din.add(u, v, w, None)
        din.add(v, u, w, None)
    value = din.max_flow(s, t)
    return value, din.min_cut_side(s)


def gomory_hu_cut_basis(g, weights_per_element):
    """Classical (contraction-based) Gomory-Hu tree of the undirected
    graph underlying `g`; returns a list of n-1 (tree_u, tree_v, value,
    Cut) entries where Cut is the actual minimum cut (arc level) induced
    by removing that tree edge.

    Gusfield's no-contraction shortcut is deliberately not used: the
    basis must consist of genuine minimum cuts, not just flow values.
    """
    if not g.from_undirected:
        raise GraphError("Gomory-Hu basis needs an undirected (bidirected) graph")
    if not g.is_connected_undirected():
        raise GraphError("disconnected input")
    und = g.undirected_edges()
    n = g.n

    supernodes = {0: frozenset(range(n))}
    tree = {}  # edge (sid_a, sid_b) sorted tuple -> (value, frozenset original source-side)
    next_id = 1

    def tree_neighbors(sid):
        return [e for e in tree if sid in e]

    while True:
        big = sorted(sid for sid, mem in supernodes.items() if len(mem) > 1)
        if not big:
            break
        sid = big[0]
        members = sorted(supernodes[sid])
        u, v = members[0], members[1]

        # components of the tree hanging off sid
        comp_of = {}
        for edge in tree_neighbors(sid):
            other = edge[0] if edge[1] == sid else edge[1]
            if other in comp_of:
                continue
            comp = {other}
            stack = [other]
            while stack:
                x = stack.pop()
                for e2 in tree_neighbors(x):
                    y = e2[0] if e2[1] == x else e2[1]
                    if y != sid and y not in comp:
                        comp.add(y)
                        stack.append(y)
            root = other
            for x in comp:
                comp_of[x] = root

        # contracted node ids: members keep their own slot, one meganode per component
        node_id = {}
        for i, x in enumerate(members):
            node_id[x] = i
        mega_ids = {}
        roots = sorted(set(comp_of.values()))
        for r in roots:
            mega_ids[r] = len(members) + len(mega_ids)
        orig_to_contracted = {}
        for x in members:
            orig_to_contracted[x] = node_id[x]
        for other_sid, root in comp_of.items():
            for x in supernodes[other_sid]:
                orig_to_contracted[x] = mega_ids[root]

        nc = len(members) + len(mega_ids)
        adj = {}
        for c, (a, b) in enumerate(und):
            ca, cb = orig_to_contracted[a], orig_to_contracted[b]
            if ca == cb:
                continue
            key = (min(ca, cb), max(ca, cb))
            adj[key] = adj.get(key, 0.0) + weights_per_element[c]
        value, side_c = _undirected_min_cut(nc, adj, node_id[u], node_id[v])

        A = frozenset(x for x in members if node_id[x] in side_c)
        B = frozenset(members) - A
        src_side = set(A)
        for other_sid, root in comp_of.items():
            if mega_ids[root] in side_c:
                src_side |= set(supernodes[other_sid])

        new_id = next_id
        next_id += 1
        supernodes[sid] = A
        supernodes[new_id] = B
        # reattach neighbors
        for edge in tree_neighbors(sid):
            other = edge[0] if edge[1] == sid else edge[1]
            root = comp_of[other]
            if mega_ids[root] not in side_c:
                val, part = tree.pop(edge)
                tree[tuple(sorted((new_id, other)))] = (val, part)
        tree[tuple(sorted((sid, new_id)))] = (value, frozenset(src_side))

    rep = {sid: min(mem) for sid, mem in supernodes.items()}
    basis = []
    for (sa, sb), (value, src_side) in sorted(tree.items()):
        arcs = g.delta_plus(src_side)
        basis.append((rep[sa], rep[sb], value,
                      Cut(arcs=arcs, cost=value, minimal=True, side=src_side)))
    return basis


class EnumerationCapExceeded(RuntimeError):
    pass


def enumerate_st_cuts(g, s, t, cap=16):
    """All *minimal* (s,t)-cuts delta+(S) over node sets S (ground-truth
    oracle; 2^(n-2) bipartitions, deduplicated)."""
    if g.n > cap:
        raise EnumerationCapExceeded(f"n={g.n} exceeds cap {cap}")
    others = [x for x in range(g.n) if x not in (s, t)]
    seen = set()
    for mask in range(1 << len(others)):
        side = {s} | {others[i] for i in range(len(others)) if mask >> i & 1}
        arcs = g.delta_plus(side)
        if arcs in seen:
            continue
        seen.add(arcs)
        if not is_st_cut(g, arcs, s, t):
            continue
        reach_s = g.reachable(s, arcs)
        reach_t = g.co_reachable(t, arcs)
        if all(g.arcs[a][0] in reach_s and g.arcs[a][1] in reach_t for a in arcs):
            yield Cut(arcs=arcs, minimal=True, side=frozenset(side))


def enumerate_st_paths(g, s, t, cap=100000):
    """All simple s-t paths as arc-id lists; raises if more than `cap`."""
    paths = []
    path_arcs = []
    on_path = [False] * g.n
    on_path[s] = True

    def dfs(u):
        if u == t:
            if len(paths) >= cap:
                raise EnumerationCapExceeded(f"more than {cap} simple paths")
            paths.append(list(path_arcs))
            return
        for a in g.out_arcs[u]:
            v = g.arcs[a][1]
            if not on_path[v]:
                on_path[v] = True
                path_arcs.append(a)
                dfs(v)
                path_arcs.pop()
                on_path[v] = False

    dfs(s)
    return paths


def longest_simple_path_length(g, s, t, cap=100000):
    """|P_max| in hops; enumeration-based, desk scale only."""
    return max(len(p) for p in enumerate_st_paths(g, s, t, cap))


def uniform_spanning_tree(g, rng):
    """Wilson's loop-erased random walk; exact uniform spanning tree of
    the undirected structure.  Returns a list of element ids."""
    n = g.n
    neighbors = [[] for _ in range(n)]
    for c, (u, v) in enumerate(g.undirected_edges()):
        neighbors[u].append((v, c))
        neighbors[v].append((u, c))
    in_tree = [False] * n
    in_tree[0] = True
    parent_edge = [None] * n
    for start in range(1, n):
        if in_tree[start]:
            continue
        nxt = {}
        u = start
        while not in_tree[u]:
            v, c = rng.choice(neighbors[u])
            nxt[u] = (v, c)
            u = v
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            v, c = nxt[u]
            parent_edge[u] = c
            u = v
    return [c for c in parent_edge if c is not None]


def fundamental_cuts(g, tree_elements):
    """The n-1 fundamental cuts of a spanning tree (element id sets), as
    Cut objects with their node sides."""
    adj = [[] for _ in range(g.n)]
    for c in tree_elements:
        u, v = g.undirected_edges()[c]
        adj[u].append((v, c))
        adj[v].append((u, c))
    cuts = []
    for c in sorted(tree_elements):
        u, v = g.undirected_edges()[c]
        # component of u with edge c removed
        comp = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for (y, c2) in adj[x]:
                if c2 != c and y not in comp:
                    comp.add(y)
                    stack.append(y)
        side = frozenset(comp)
        cuts.append(Cut(arcs=g.delta_plus(side), minimal=True, side=side))
    return cuts
