"""Brute-force ground truth on an explicit, finite discretization of the tree.

Every unit edge is split into M segments and every branch is materialized, so no radial
symmetry is used. Segment weights are sampled at midpoints; a segment never straddles an integer
level, which keeps branch counts exact. Distances come from Dijkstra on the segment graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import depth_first_order, dijkstra

from .exceptions import BudgetExceeded, DomainError, UserError
from .geometry import TreeSpace
from .logger import logger
from .weights import FloatArray

DEFAULT_NODE_BUDGET = 2_000_000

_SNAP = 1e-9


@dataclass(frozen=True)
class NodeAddress:
    level: int
    """The segment lies in the unit edge (level, level + 1]; -1 for the root."""

    chain: int
    """Which of the K**(level + 1) edges at this level."""

    segment: int
    """Position 0..M-1 along the edge; the node is the segment's lower end."""


class DiscreteTree:
    """A depth-D discretization with M segments per unit edge.

    Node 0 is the root. Node `offset(n) + chain * M + m` is the lower end of segment m of the
    given chain of level n and sits at radial coordinate n + (m + 1) / M.
    """

    def __init__(
        self, space: TreeSpace, depth: int, subdivisions: int, budget: int = DEFAULT_NODE_BUDGET
    ):
        if depth < 1 or subdivisions < 1:
            raise UserError(f"Need depth >= 1 and subdivisions >= 1, got {depth}, {subdivisions}")
        K, M = space.K, subdivisions
        per_level = [K ** (n + 1) * M for n in range(depth)]
        if sum(per_level) > budget:
            raise BudgetExceeded(
                f"A depth-{depth} tree with {M} segments per edge has {sum(per_level)} segments, "
                f"budget {budget}"
            )

        self.space = space
        self.depth = depth
        self.subdivisions = M
        self.h = 1.0 / M
        self.offsets = np.concatenate([[1], 1 + np.cumsum(per_level)]).astype(np.int64)
        self.node_count = int(self.offsets[-1])

        # Per-(level, segment) data, shared by all chains of a level.
        mids = (np.arange(depth * M) + 0.5) * self.h
        self.segment_length: FloatArray = space.lam(mids) * self.h
        self.segment_mass: FloatArray = space.mu(mids) * self.h
        self.node_depth: FloatArray = np.cumsum(self.segment_length)
        """Metric distance from the root to the node at the lower end of each segment."""

        parents = np.empty(self.node_count - 1, dtype=np.int64)
        slot = np.empty(self.node_count - 1, dtype=np.int64)
        for n in range(depth):
            ids = np.arange(self.offsets[n], self.offsets[n + 1])
            local = ids - self.offsets[n]
            chain, m = local // M, local % M
            if n == 0:
                top = np.zeros_like(ids)
            else:
                top = self.offsets[n - 1] + (chain // K) * M + (M - 1)
            parents[ids - 1] = np.where(m > 0, ids - 1, top)
            slot[ids - 1] = n * M + m
        self.parents = np.concatenate([[-1], parents])
        self._slot = np.concatenate([[-1], slot])

        children = np.arange(1, self.node_count)
        lengths = self.segment_length[slot]
        self._children = csr_matrix(
            (lengths, (parents, children)), shape=(self.node_count, self.node_count)
        )
        logger.debug(f"Built discrete tree: K={K}, D={depth}, M={M}, {self.node_count} nodes")

    @property
    def K(self) -> int:
        return self.space.K

    def address(self, node: int) -> NodeAddress:
        if node == 0:
            return NodeAddress(level=-1, chain=0, segment=self.subdivisions - 1)
        n = int(np.searchsorted(self.offsets, node, side="right")) - 1
        local = node - int(self.offsets[n])
        chain, segment = divmod(local, self.subdivisions)
        return NodeAddress(level=n, chain=chain, segment=segment)

    def node_id(self, address: NodeAddress) -> int:
        if address.level < 0:
            return 0
        start = int(self.offsets[address.level])
        return start + address.chain * self.subdivisions + address.segment

    def coordinate(self, node: int) -> float:
        """Radial coordinate |x| of a node."""
        if node == 0:
            return 0.0
        return float(self._slot[node] + 1) * self.h

    def metric_depth(self, node: int) -> float:
        """d(0, x), summed along the node's path."""
        return 0.0 if node == 0 else float(self.node_depth[self._slot[node]])

    def node_at(self, t: float, chain: int = 0) -> int:
        """The node at radial coordinate `t` on the given chain of its level."""
        k = round(t * self.subdivisions)
        if abs(t * self.subdivisions - k) > _SNAP * max(1.0, t):
            raise DomainError(f"t={t} is not a multiple of the subdivision h={self.h}")
        if k == 0:
            return 0
        n, m = divmod(k - 1, self.subdivisions)
        if n >= self.depth:
            raise DomainError(f"t={t} lies below the tree's depth {self.depth}")
        if not 0 <= chain < self.K ** (n + 1):
            raise DomainError(f"Level {n} has {self.K ** (n + 1)} chains, got chain={chain}")
        return self.node_id(NodeAddress(level=n, chain=chain, segment=m))

    def child(self, node: int, branch: int = 0) -> int | None:
        """The next node down, taking child edge `branch` at vertices. `None` past depth D."""
        a = self.address(node)
        M = self.subdivisions
        if node != 0 and a.segment < M - 1:
            return node + 1
        level = a.level + 1
        if level >= self.depth:
            return None
        chain = (a.chain * self.K if node != 0 else 0) + branch % self.K
        return self.node_id(NodeAddress(level=level, chain=chain, segment=0))

    def _is_deepest(self, nodes: np.ndarray) -> np.ndarray:
        return nodes >= self.offsets[-2]

    def _segment_slots(self, nodes: np.ndarray) -> np.ndarray:
        return self._slot[nodes]


def build_discrete_tree(
    space: TreeSpace, depth: int, subdivisions: int, budget: int = DEFAULT_NODE_BUDGET
) -> DiscreteTree:
    return DiscreteTree(space, depth, subdivisions, budget)


def _warn_truncated(what: str, node: int, r: float) -> None:
    logger.warning(f"{what} around node {node} with r={r} reaches the tree's depth; truncated")


def discrete_ball_measure(tree: DiscreteTree, node: int, r: float) -> float:
    """μ(B(x, r)) as a sum over explicit segments, with partial boundary segments."""
    if not r > 0:
        raise DomainError(f"Radius must be positive, got {r}")
    dist = dijkstra(tree._children, directed=False, indices=node, limit=r)
    children = np.arange(1, tree.node_count)
    parent_d = dist[tree.parents[1:]]
    child_d = dist[children]
    near = np.isfinite(parent_d) | np.isfinite(child_d)
    slots = tree._segment_slots(children[near])
    length = tree.segment_length[slots]
    with np.errstate(invalid="ignore"):
        covered = np.clip(r - parent_d[near], 0.0, length)
        covered += np.clip(r - child_d[near], 0.0, length)
    fraction = np.minimum(covered, length) / length
    if np.any(tree._is_deepest(children[near]) & (child_d[near] < r)):
        _warn_truncated("Ball", node, r)
    return float(np.sum(fraction * tree.segment_mass[slots]))


def _ancestor(tree: DiscreteTree, node: int, r: float) -> tuple[int, float]:
    """Walks up from `node` by distance r. Returns the node just below x̄^r and the remaining
    distance from x̄^r down to that node (0 when x̄^r is exactly a node, or the root).
    """
    left = r
    current = node
    while current != 0:
        length = float(tree.segment_length[tree._slot[current]])
        if left < length * (1.0 - _SNAP):
            return current, left
        left -= length
        current = int(tree.parents[current])
        if abs(left) <= _SNAP * max(1.0, r):
            return current, 0.0
    return 0, 0.0


def _halfball_from(tree: DiscreteTree, top: int, radius: float) -> float:
    """Measure of the descendants of node `top` within `radius`, counted down the subtree."""
    if radius <= 0:
        return 0.0
    order = depth_first_order(tree._children, top, directed=True, return_predecessors=False)
    below = np.asarray(order[1:], dtype=np.int64)
    if below.size == 0:
        return 0.0
    base = tree.metric_depth(top)
    slots = tree._segment_slots(below)
    parent_offset = tree.node_depth[slots] - tree.segment_length[slots] - base
    length = tree.segment_length[slots]
    inside = np.clip(radius - parent_offset, 0.0, length)
    reach = parent_offset + length
    if np.any(tree._is_deepest(below) & (reach < radius)):
        _warn_truncated("Half-ball", top, radius)
    return float(np.sum(inside / length * tree.segment_mass[slots]))


def discrete_halfball_measure(tree: DiscreteTree, node: int, r: float) -> float:
    """μ(F(x̄^r, 2r)) for the node x, with x̄^r found by walking up explicit parents."""
    below, gap = _ancestor(tree, node, r)
    if gap == 0.0:
        return _halfball_from(tree, below, 2.0 * r)
    slot = tree._slot[below]
    length = float(tree.segment_length[slot])
    partial = min(gap, 2.0 * r) / length * float(tree.segment_mass[slot])
    return partial + _halfball_from(tree, below, 2.0 * r - gap)


def discrete_ap_value(tree: DiscreteTree, p: float, node: int, r: float, branch: int = 0) -> float:
    """Ap(x, r) with the numerator summed over the explicit half-ball F(x̄^r, 2r) and the bracket
    summed along one explicit descending path, taking child edge `branch` at each vertex.
    """
    if not p > 1:
        raise UserError(f"discrete_ap_value needs p > 1, got {p}")
    if not r > 0:
        raise DomainError(f"Radius must be positive, got {r}")

    numerator = discrete_halfball_measure(tree, node, r) / (2.0 * r)

    anchor = math.ceil(tree.coordinate(node) - _SNAP)
    log_k = math.log(tree.K)
    exponent = 1.0 / (1.0 - p)
    total = 0.0
    travelled = 0.0
    current: int | None = node
    while travelled < r:
        current = tree.child(current, branch) if current is not None else None
        if current is None:
            _warn_truncated("Bracket path", node, r)
            break
        slot = int(tree._slot[current])
        length = float(tree.segment_length[slot])
        level = slot // tree.subdivisions + 1
        density = math.exp((level - anchor) * log_k) * tree.segment_mass[slot] / length
        step = min(length, r - travelled)
        total += density**exponent * step
        travelled += length
    return numerator * (total / r) ** (p - 1.0)
