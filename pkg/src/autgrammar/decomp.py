"""Tree decompositions as terms over tree-like position sets.

Positions are tuples of child indices; the root is the empty tuple.  A
position set must be prefix closed (every parent present) and well numbered
(child j present implies children 1..j-1 present).  Sorting positions as
tuples gives exactly the preorder / left-to-right traversal, which is the
canonical order used throughout.

The module covers: axiom validation (T1 vertex cover, T2 edge cover, T3
connected per-vertex subterm), construction from elimination orderings
(min-fill heuristic and an exact search for small graphs), PACE-style .td
file import/export, path decompositions from vertex layouts, and the
transform that turns any valid decomposition into a permutation-yielding
one (every vertex in exactly one leaf bag, as a singleton).
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import DisconnectedGraphError, Graph, require_connected
from .perm import Permutation

Pos = tuple[int, ...]

ROOT: Pos = ()

EXACT_SMALL_CAP = 10


class DecompositionError(Exception):
    pass


class TdParseError(DecompositionError):
    pass


def parent(p: Pos) -> Pos:
    if p == ROOT:
        raise DecompositionError("root has no parent")
    return p[:-1]


def is_prefix(p: Pos, q: Pos) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


class TreeDecomposition:
    """A map position -> bag (sorted vertex tuple) over a tree-like set.

    Immutable after construction by convention; the constructor checks the
    position set shape but not the decomposition axioms (use
    validate_tree_decomposition for those).
    """

    __slots__ = ("bags", "positions", "_children")

    def __init__(self, bags: dict[Pos, tuple[int, ...]]):
        if ROOT not in bags:
            raise DecompositionError("position set must contain the root")
        for p in bags:
            if p != ROOT and p[:-1] not in bags:
                raise DecompositionError(f"position set not prefix closed at {p}")
            if p != ROOT and p[-1] > 1 and p[:-1] + (p[-1] - 1,) not in bags:
                raise DecompositionError(f"position set not well numbered at {p}")
            if p != ROOT and p[-1] < 1:
                raise DecompositionError(f"child index must be >= 1 at {p}")
        self.bags = {p: tuple(sorted(set(bags[p]))) for p in sorted(bags)}
        self.positions = tuple(sorted(bags))
        children: dict[Pos, list[Pos]] = {p: [] for p in self.positions}
        for p in self.positions:
            if p != ROOT:
                children[p[:-1]].append(p)
        self._children = {p: tuple(sorted(cs)) for p, cs in children.items()}

    def bag(self, p: Pos) -> tuple[int, ...]:
        return self.bags[p]

    def children(self, p: Pos) -> tuple[Pos, ...]:
        return self._children[p]

    def leaves(self) -> tuple[Pos, ...]:
        return tuple(p for p in self.positions if not self._children[p])

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    def is_path_shaped(self) -> bool:
        return all(len(self._children[p]) <= 1 for p in self.positions)

    def __eq__(self, other):
        return isinstance(other, TreeDecomposition) and self.bags == other.bags

    def __repr__(self):
        return f"TreeDecomposition({self.bags})"


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    width: int
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_tree_decomposition(g: Graph, t: TreeDecomposition) -> ValidationReport:
    """Check T1 (vertices covered), T2 (edges covered), T3 (per-vertex
    positions form a connected subterm).  Violations are data, not errors."""
    violations: list[Violation] = []
    covered: set[int] = set()
    for p in t.positions:
        for v in t.bag(p):
            if not (1 <= v <= g.vertex_count):
                violations.append(
                    Violation("T1", f"bag at {p} references out-of-range vertex {v}")
                )
        covered.update(t.bag(p))
    for v in g.vertices:
        if v not in covered:
            violations.append(Violation("T1", f"vertex {v} not covered by any bag"))
    for u, v in sorted(g.edges):
        if not any(u in t.bag(p) and v in t.bag(p) for p in t.positions):
            violations.append(Violation("T2", f"edge {{{u},{v}}} not inside any bag"))
    for v in g.vertices:
        holding = [p for p in t.positions if v in t.bag(p)]
        if not holding:
            continue
        top = min(holding, key=len)
        holdset = set(holding)
        for p in holding:
            if not is_prefix(top, p):
                violations.append(
                    Violation("T3", f"positions holding vertex {v} have no common root")
                )
                break
            if p != top and p[:-1] not in holdset:
                violations.append(
                    Violation("T3", f"positions holding vertex {v} are not connected at {p}")
                )
                break
    return ValidationReport(t.width, tuple(violations))


def _decomposition_from_elimination(g: Graph, order: list[int]) -> TreeDecomposition:
    """Build a decomposition from an elimination ordering: the bag of v is v
    plus its not-yet-eliminated neighbors in the fill graph; v's node hangs
    under the node of the earliest-eliminated vertex of its bag rest."""
    rank = {v: i for i, v in enumerate(order)}
    adj: dict[int, set[int]] = {v: set(g.neighbors[v]) for v in g.vertices}
    bag_of: dict[int, tuple[int, ...]] = {}
    parent_of: dict[int, int | None] = {}
    for v in order:
        rest = sorted(adj[v], key=lambda u: rank[u])
        bag_of[v] = tuple(sorted([v] + rest))
        parent_of[v] = rest[0] if rest else None
        for a in rest:
            for b in rest:
                if a != b:
                    adj[a].add(b)
            adj[a].discard(v)
        del adj[v]
    roots = [v for v in order if parent_of[v] is None]
    if len(roots) != 1:
        raise DisconnectedGraphError("graph not connected")
    kids: dict[int, list[int]] = {v: [] for v in order}
    for v in order:
        if parent_of[v] is not None:
            kids[parent_of[v]].append(v)
    for v in kids:
        kids[v].sort(key=lambda u: rank[u])
    bags: dict[Pos, tuple[int, ...]] = {}

    def assign(v: int, pos: Pos) -> None:
        bags[pos] = bag_of[v]
        for i, c in enumerate(kids[v], start=1):
            assign(c, pos + (i,))

    assign(roots[0], ROOT)
    return TreeDecomposition(bags)


def _min_fill_order(g: Graph) -> list[int]:
    adj: dict[int, set[int]] = {v: set(g.neighbors[v]) for v in g.vertices}
    order: list[int] = []
    while adj:
        best_v, best_fill = None, None
        for v in sorted(adj):
            ns = adj[v]
            fill = sum(
                1 for a in ns for b in ns if a < b and b not in adj[a]
            )
            if best_fill is None or fill < best_fill:
                best_v, best_fill = v, fill
        ns = adj[best_v]
        for a in ns:
            for b in ns:
                if a != b:
                    adj[a].add(b)
            adj[a].discard(best_v)
        del adj[best_v]
        order.append(best_v)
    return order


def _exact_order(g: Graph, cap: int) -> list[int]:
    """Optimal elimination ordering by dynamic programming over the sets of
    already-eliminated vertices.  The cost of eliminating v after S is the
    number of vertices outside S reachable from v through S."""
    m = g.vertex_count
    if m > cap:
        raise DecompositionError(f"exact-small refused above {cap} vertices (got {m})")
    verts = list(g.vertices)
    index = {v: i for i, v in enumerate(verts)}
    nbr_bits = [0] * m
    for v in verts:
        for u in g.neighbors[v]:
            nbr_bits[index[v]] |= 1 << index[u]

    def cost(eliminated: int, vi: int) -> int:
        # vertices outside `eliminated` adjacent to vi or linked via eliminated
        seen = 1 << vi
        stack = [vi]
        out = 0
        while stack:
            w = stack.pop()
            frontier = nbr_bits[w] & ~seen
            seen |= frontier
            rest = frontier
            while rest:
                low = rest & -rest
                rest ^= low
                u = low.bit_length() - 1
                if (eliminated >> u) & 1:
                    stack.append(u)
                else:
                    out += 1
        return out

    full = (1 << m) - 1
    width = {0: 0}
    pick: dict[int, int] = {}
    for s in range(1, full + 1):
        best = None
        best_v = None
        rest = s
        while rest:
            low = rest & -rest
            rest ^= low
            vi = low.bit_length() - 1
            prev = s ^ low
            w = max(width[prev], cost(prev, vi))
            if best is None or w < best or (w == best and vi < best_v):
                best, best_v = w, vi
        width[s] = best
        pick[s] = best_v
    order_rev = []
    s = full
    while s:
        vi = pick[s]
        order_rev.append(verts[vi])
        s ^= 1 << vi
    return list(reversed(order_rev))


def compute_tree_decomposition(
    g: Graph, strategy: str = "min-fill", *, cap: int = EXACT_SMALL_CAP, text: str | None = None
) -> TreeDecomposition:
    """Construct a valid tree decomposition of a connected graph.

    Strategies: "min-fill" (elimination-ordering heuristic), "exact-small"
    (guaranteed minimum width, refused above `cap` vertices), "from-file"
    (parse PACE .td text passed via `text`).
    """
    require_connected(g)
    if strategy == "from-file":
        if text is None:
            raise DecompositionError("from-file strategy needs td text")
        t = read_pace_td(text)
        report = validate_tree_decomposition(g, t)
        if not report.ok:
            raise DecompositionError(
                f"decomposition invalid: {report.violations[0].message}"
            )
        return t
    if strategy == "min-fill":
        return _decomposition_from_elimination(g, _min_fill_order(g))
    if strategy == "exact-small":
        return _decomposition_from_elimination(g, _exact_order(g, cap))
    raise DecompositionError(f"unknown strategy {strategy!r}")


# ---------------------------------------------------------------------------
# PACE-style .td files: "s td <#bags> <width+1> <#vertices>", bag lines
# "b <id> <v...>", then tree edges "<id> <id>".  Import re-roots at bag 1.

def read_pace_td(text: str) -> TreeDecomposition:
    n_bags = None
    bag_by_id: dict[int, tuple[int, ...]] = {}
    links: dict[int, list[int]] = {}
    for ln in text.split("\n"):
        ln = ln.strip()
        if not ln or ln.startswith("c"):
            continue
        toks = ln.split()
        if toks[0] == "s":
            if len(toks) != 5 or toks[1] != "td":
                raise TdParseError(f"bad header {ln!r}")
            n_bags = int(toks[2])
        elif toks[0] == "b":
            if n_bags is None:
                raise TdParseError("bag line before header")
            bid = int(toks[1])
            if bid in bag_by_id:
                raise TdParseError(f"duplicate bag id {bid}")
            bag_by_id[bid] = tuple(sorted(int(v) for v in toks[2:]))
        else:
            a, b = int(toks[0]), int(toks[1])
            links.setdefault(a, []).append(b)
            links.setdefault(b, []).append(a)
    if n_bags is None:
        raise TdParseError("missing 's td' header")
    if set(bag_by_id) != set(range(1, n_bags + 1)):
        raise TdParseError("bag ids must be exactly 1..#bags")
    bags: dict[Pos, tuple[int, ...]] = {}
    seen = {1}

    def build(bid: int, pos: Pos) -> None:
        bags[pos] = bag_by_id[bid]
        nxt = [b for b in sorted(links.get(bid, [])) if b not in seen]
        for b in nxt:
            seen.add(b)
        for i, b in enumerate(nxt, start=1):
            build(b, pos + (i,))

    build(1, ROOT)
    if len(bags) != n_bags:
        raise TdParseError("tree edges do not connect all bags")
    return TreeDecomposition(bags)


def write_pace_td(t: TreeDecomposition, vertex_count: int) -> str:
    ids = {p: i for i, p in enumerate(t.positions, start=1)}
    lines = [f"s td {len(t.positions)} {t.width + 1} {vertex_count}"]
    for p in t.positions:
        bag = " ".join(str(v) for v in t.bag(p))
        lines.append(f"b {ids[p]} {bag}".rstrip())
    for p in t.positions:
        if p != ROOT:
            lines.append(f"{ids[p[:-1]]} {ids[p]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Permutation-yielding transform.

@dataclass(frozen=True)
class YieldOrder:
    """Left-to-right leaf order of a yielding decomposition.

    leaf_sequence is the leaves in traversal order; vertex_of_leaf maps each
    leaf to the single vertex of its bag.  alpha_t is the permutation whose
    one-line string is that vertex sequence v_1 ... v_n, and alpha is the
    alignment permutation used by the grammar pipeline: a grammar word w
    produced for an automorphism s satisfies w_i = s(alpha(i)), i.e. w is
    the string of s repositioned by alpha.  That makes alpha equal to
    alpha_t itself (see the compose order of permute_word).
    """

    leaf_sequence: tuple[Pos, ...]
    vertex_of_leaf: dict[Pos, int]
    alpha_t: Permutation
    alpha: Permutation


def leaf_order_permutation(y: YieldOrder) -> Permutation:
    """The alignment permutation recorded by the yield order."""
    return y.alpha


def yield_order_of(t: TreeDecomposition) -> YieldOrder:
    """Read the yield off an already permutation-yielding decomposition."""
    leaves = t.leaves()
    vertex_of_leaf: dict[Pos, int] = {}
    for p in leaves:
        if len(t.bag(p)) != 1:
            raise DecompositionError(f"leaf {p} bag {t.bag(p)} is not a singleton")
        vertex_of_leaf[p] = t.bag(p)[0]
    seq = tuple(vertex_of_leaf[p] for p in leaves)
    if sorted(seq) != sorted(set(seq)):
        raise DecompositionError("leaf vertices are not pairwise distinct")
    alpha_t = Permutation(seq)
    return YieldOrder(leaves, vertex_of_leaf, alpha_t, alpha_t)


def is_permutation_yielding(g: Graph, t: TreeDecomposition) -> bool:
    leaves = t.leaves()
    if len(leaves) != g.vertex_count:
        return False
    seen = set()
    for p in leaves:
        b = t.bag(p)
        if len(b) != 1 or b[0] in seen:
            return False
        seen.add(b[0])
    return seen == set(g.vertices)


def make_permutation_yielding(
    g: Graph, t: TreeDecomposition
) -> tuple[TreeDecomposition, YieldOrder]:
    """Rebuild t so that every vertex occurs in exactly one leaf bag, as a
    singleton, without increasing the width.

    Any vertex lacking a singleton leaf gets a fresh leaf attached under the
    preorder-smallest position whose bag contains it.  One singleton leaf
    per vertex is then selected (again preorder-smallest), and the
    decomposition is cut down to all positions on root-to-selected-leaf
    paths, renumbering children to restore well numbering while preserving
    their relative order.
    """
    report = validate_tree_decomposition(g, t)
    if not report.ok:
        raise DecompositionError(
            f"input decomposition invalid: {report.violations[0].message}"
        )
    bags = dict(t.bags)
    children: dict[Pos, list[Pos]] = {p: list(t.children(p)) for p in t.positions}
    singleton_leaves: dict[int, list[Pos]] = {v: [] for v in g.vertices}
    for p in t.leaves():
        b = bags[p]
        if len(b) == 1:
            singleton_leaves[b[0]].append(p)
    for v in g.vertices:
        if singleton_leaves[v]:
            continue
        host = min(p for p in bags if v in bags[p])
        leaf = host + (len(children[host]) + 1,)
        bags[leaf] = (v,)
        children[host].append(leaf)
        children[leaf] = []
        singleton_leaves[v].append(leaf)
    chosen = {v: min(ps) for v, ps in singleton_leaves.items()}
    selected = sorted(chosen.values())
    # closest ancestral closure: everything between the longest common
    # prefix of the selected leaves and the leaves themselves
    top = selected[0]
    for p in selected[1:]:
        k = 0
        while k < len(top) and k < len(p) and top[k] == p[k]:
            k += 1
        top = top[:k]
    keep = set()
    for p in selected:
        for i in range(len(top), len(p) + 1):
            keep.add(p[:i])

    renumbered: dict[Pos, tuple[int, ...]] = {}

    def rebuild(old: Pos, new: Pos) -> None:
        renumbered[new] = bags[old]
        kept_kids = [c for c in children[old] if c in keep]
        for i, c in enumerate(kept_kids, start=1):
            rebuild(c, new + (i,))

    rebuild(top, ROOT)
    out = TreeDecomposition(renumbered)
    out_report = validate_tree_decomposition(g, out)
    assert out_report.ok, "yielding transform produced an invalid decomposition"
    assert out.width == t.width, "yielding transform changed the width"
    return out, yield_order_of(out)


# ---------------------------------------------------------------------------
# Path decompositions from vertex layouts: for an ordering v_1..v_n, bag i
# is v_i plus every earlier vertex with a neighbor at or beyond i.  Each
# vertex is introduced exactly once, at its own bag.

def _layout_bags(g: Graph, order: list[int]) -> list[tuple[int, ...]]:
    rank = {v: i for i, v in enumerate(order)}
    reach = {v: max((rank[u] for u in g.neighbors[v]), default=rank[v]) for v in g.vertices}
    bags = []
    for i, v in enumerate(order):
        active = [u for u in order[:i] if reach[u] >= i]
        bags.append(tuple(sorted(active + [v])))
    return bags


def _layout_width(g: Graph, order: list[int]) -> int:
    return max(len(b) for b in _layout_bags(g, order)) - 1


def _best_layout(g: Graph, cap: int) -> list[int]:
    """Branch-and-bound over layouts minimizing the largest bag; falls back
    to the identity layout above the cap."""
    verts = list(g.vertices)
    if g.vertex_count > cap:
        return verts
    best_order = verts[:]
    best = _layout_width(g, best_order)
    rank_pos = {v: i for i, v in enumerate(verts)}

    def search(prefix: list[int], active: frozenset[int], worst: int) -> None:
        nonlocal best, best_order
        if worst >= best:
            return
        if len(prefix) == len(verts):
            best, best_order = worst, prefix[:]
            return
        placed = set(prefix)
        for v in verts:
            if v in placed:
                continue
            after = placed | {v}
            nxt = {u for u in active if any(w not in after for w in g.neighbors[u])}
            if any(w not in after for w in g.neighbors[v]):
                nxt.add(v)
            search(prefix + [v], frozenset(nxt), max(worst, len(active)))

    search([], frozenset(), 0)
    return best_order


def compute_path_decomposition(g: Graph, *, cap: int = EXACT_SMALL_CAP) -> TreeDecomposition:
    """A path-shaped decomposition in which each bag introduces exactly one
    new vertex.  Exact minimum width for graphs up to `cap` vertices."""
    require_connected(g)
    order = _best_layout(g, cap)
    bags = _layout_bags(g, order)
    positions: dict[Pos, tuple[int, ...]] = {}
    pos: Pos = ROOT
    for i, b in enumerate(bags):
        positions[pos] = b
        pos = pos + (1,)
    return TreeDecomposition(positions)


def introduced_order(g: Graph, pd: TreeDecomposition) -> list[int]:
    """The vertex introduced at each bag of a path decomposition, root to
    end; raises unless the shape is a path with one new vertex per bag."""
    if not pd.is_path_shaped():
        raise DecompositionError("decomposition is not path shaped")
    seen: set[int] = set()
    order: list[int] = []
    p: Pos = ROOT
    while True:
        fresh = [v for v in pd.bag(p) if v not in seen]
        if len(fresh) != 1:
            raise DecompositionError(
                f"bag at {p} introduces {len(fresh)} vertices, expected exactly 1"
            )
        order.append(fresh[0])
        seen.update(pd.bag(p))
        kids = pd.children(p)
        if not kids:
            break
        p = kids[0]
    if len(order) != g.vertex_count:
        raise DecompositionError("path decomposition does not introduce every vertex")
    return order
