"""Anytime Monte Carlo tree search over the pattern lattice.

Each iteration selects the most urgent node by upper confidence bound,
expands one random pending refinement, runs a random simulation (roll-out)
from the new node, optionally memorizes patterns met on the way, and
back-propagates the aggregated reward through all parent links. Pending
children are materialized lazily on first selection; subtrees proven
exhausted are closed so the search stops early once the root closes.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .dataset import Dataset
from .measures import MeasureSpec, evaluate_mask, normalize
from .patterns import (
    EMPTY,
    Description,
    canonical_key,
    refinement_candidates,
    rho_norm,
    _action_mask,
    _child_desc,
    _iter_actions,
    action_rank_offsets,
)
from .results import MEMORY, TREE, PatternPool, filter_pool

UCBS = ("ucb1", "uct", "sp_mcts", "ucb1_tuned", "dfs_uct")
EXPANDS = ("direct", "gen", "label")
DEDUPS = ("none", "lo", "pu")
ROLLOUTS = ("naive", "direct_freq", "large_freq")
REWARD_AGGS = ("terminal", "random", "max", "mean", "top_k_mean")
MEMORIES = ("none", "all", "top_k")
UPDATES = ("max", "mean", "top_k_mean")


@dataclass(frozen=True)
class SearchConfig:
    """Full policy selection and numeric parameters for one search run."""

    measure: MeasureSpec
    budget: int = 10_000
    min_supp: int = 1
    max_length: int = 5
    ucb: str = "sp_mcts"
    cp: float = 1.0 / math.sqrt(2.0)
    c: float = 0.5
    d: float = 1.0
    expand: str = "label"
    dedup: str = "pu"
    rollout: str = "direct_freq"
    path_length: int = 20
    jump_length: int = 30
    reward_agg: str = "max"
    reward_k: int = 1
    memory: str = "top_k"
    memory_k: int = 1
    update: str = "max"
    update_k: int = 1
    theta: float = 0.5
    max_output: int = 50
    seed: int = 0

    def __post_init__(self):
        checks = (("ucb", UCBS), ("expand", EXPANDS), ("dedup", DEDUPS),
                  ("rollout", ROLLOUTS), ("reward_agg", REWARD_AGGS),
                  ("memory", MEMORIES), ("update", UPDATES))
        for name, allowed in checks:
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        if self.ucb == "dfs_uct" and self.dedup != "lo":
            raise ValueError("dfs_uct requires dedup=lo")
        if self.budget < 1 or self.min_supp < 1 or self.max_length < 1:
            raise ValueError("budget, min_supp and max_length must be >= 1")
        for name in ("path_length", "jump_length", "reward_k", "memory_k", "update_k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


class TreeNode:
    """Search-tree node: one pattern plus its visit and reward statistics."""

    __slots__ = ("description", "mask", "supp", "n", "q", "delta_sum", "delta_sq_sum",
                 "top_rewards", "parents", "children", "pending", "rank", "rho",
                 "closed", "terminal")

    def __init__(self, description: Description, mask: int, rank: int = -1,
                 rho: float = 1.0):
        self.description = description
        self.mask = mask
        self.supp = mask.bit_count()
        self.n = 0
        self.q = 0.0
        self.delta_sum = 0.0      # shadow sum of back-propagated rewards
        self.delta_sq_sum = 0.0
        self.top_rewards: Optional[list] = None
        self.parents: list = []
        self.children: list = []
        self.pending: Optional[list] = None  # None until materialized
        self.rank = rank          # provenance rank of the last restriction
        self.rho = rho            # normalized exploration rate (lectic runs)
        self.closed = False
        self.terminal = False

    @property
    def fully_expanded(self) -> bool:
        return self.pending is not None and not self.pending

    def variance(self) -> float:
        if self.n < 2:
            return 0.0
        mean = self.delta_sum / self.n
        return max(0.0, self.delta_sq_sum / self.n - mean * mean)


def ucb_score(parent: TreeNode, child: TreeNode, cfg: SearchConfig) -> float:
    """Score of `child` under the configured upper confidence bound (inf if unvisited)."""
    if child.n == 0:
        return math.inf
    q = child.q
    kind = cfg.ucb
    if kind in ("uct", "ucb1"):
        cp = cfg.cp if kind == "uct" else 0.5
        return q + 2.0 * cp * math.sqrt(2.0 * math.log(parent.n) / child.n)
    if kind == "sp_mcts":
        explore = cfg.c * math.sqrt(2.0 * math.log(parent.n) / child.n)
        return q + explore + math.sqrt(child.variance() + cfg.d / child.n)
    if kind == "ucb1_tuned":
        log_ratio = math.log(parent.n) / child.n
        bound = child.variance() + math.sqrt(2.0 * math.log(parent.n) / child.n)
        return q + math.sqrt(log_ratio * min(0.25, bound))
    # dfs_uct: both visit counts weighted by their normalized exploration rates
    return q + 2.0 * cfg.cp * math.sqrt(
        2.0 * math.log(parent.n * parent.rho) / (child.n * child.rho))


class _Search:
    """One search run; mutable state shared by the per-iteration steps."""

    def __init__(self, data: Dataset, cfg: SearchConfig):
        self.data = data
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.pool = PatternPool()
        self.registry: dict = {}
        self.node_count = 0
        self.offsets = action_rank_offsets(data)
        root = TreeNode(EMPTY, data.full_mask)
        if root.supp < cfg.min_supp:
            raise ValueError(
                f"min_supp={cfg.min_supp} exceeds the dataset size {data.n_objects}")
        self.root = root

    # -- pending candidates --------------------------------------------------

    def _materialize(self, node: TreeNode) -> None:
        if node.pending is not None:
            return
        cfg = self.cfg
        lectic_rank = node.rank if cfg.dedup == "lo" else None
        cands = refinement_candidates(
            node.description, self.data, cfg.min_supp, cfg.max_length,
            cfg.expand, target=cfg.measure.target, lectic_rank=lectic_rank)
        node.pending = cands
        if not cands and not node.children:
            node.terminal = True
            self._close(node)

    def _close(self, node: TreeNode) -> None:
        if node.closed:
            return
        node.closed = True
        for parent in node.parents:
            if parent.fully_expanded and all(c.closed for c in parent.children):
                self._close(parent)

    # -- select ---------------------------------------------------------------

    def select(self) -> Optional[TreeNode]:
        """Descend by UCB to a node with pending candidates; None once the root closes."""
        while not self.root.closed:
            node = self.root
            while True:
                self._materialize(node)
                if node.pending:
                    return node
                open_children = [c for c in node.children if not c.closed]
                if not open_children:
                    # every continuation is exhausted: close and retry from the top
                    self._close(node)
                    break
                node = self._argmax_child(node, open_children)
        return None

    def _argmax_child(self, parent: TreeNode, children: list) -> TreeNode:
        best_score = -math.inf
        best: list = []
        for child in children:
            score = ucb_score(parent, child, self.cfg)
            if score > best_score:
                best_score = score
                best = [child]
            elif score == best_score:
                best.append(child)
        return best[0] if len(best) == 1 else self.rng.choice(best)

    # -- expand ---------------------------------------------------------------

    def expand(self, sel: TreeNode) -> TreeNode:
        """Pop one random pending candidate; unify with an existing node under PU."""
        if not sel.pending:
            raise RuntimeError("expand called on a fully expanded node")
        i = self.rng.randrange(len(sel.pending))
        sel.pending[i], sel.pending[-1] = sel.pending[-1], sel.pending[i]
        desc, mask, rank, kind = sel.pending.pop()
        if self.cfg.dedup == "pu":
            key = canonical_key(desc)
            node = self.registry.get(key)
            if node is not None:
                node.parents.append(sel)
                sel.children.append(node)
                return node
        rho = 1.0
        if self.cfg.dedup == "lo":
            rho = float(rho_norm(desc, self.data, self._rank_attr(rank), kind))
        node = TreeNode(desc, mask, rank, rho)
        node.parents.append(sel)
        sel.children.append(node)
        self.node_count += 1
        if self.cfg.dedup == "pu":
            self.registry[canonical_key(desc)] = node
        phi = evaluate_mask(self.cfg.measure, mask, self.data)
        self.pool.add(desc, mask, phi, TREE)
        return node

    def _rank_attr(self, rank: int) -> int:
        attr = 0
        for i, off in enumerate(self.offsets):
            if rank >= off:
                attr = i
        return attr

    # -- roll-out ---------------------------------------------------------------

    def rollout(self, start: TreeNode) -> tuple:
        """Simulate a random refinement chain; return (reward, evaluated patterns)."""
        cfg = self.cfg
        path = [(start.description, start.mask)]
        desc, mask = start.description, start.mask
        if cfg.rollout == "naive" or cfg.rollout == "direct_freq":
            limit = cfg.path_length if cfg.rollout == "naive" else None
            steps = 0
            while limit is None or steps < limit:
                nxt = self._random_frequent_step(desc, mask)
                if nxt is None:
                    break
                desc, mask = nxt
                path.append(nxt)
                steps += 1
        else:  # large_freq: random-size jumps of direct changes
            while True:
                jump = self.rng.randint(1, cfg.jump_length)
                moved = False
                for _ in range(jump):
                    nxt = self._random_frequent_step(desc, mask)
                    if nxt is None:
                        break
                    desc, mask = nxt
                    moved = True
                if moved:
                    path.append((desc, mask))
                if not moved or nxt is None:
                    break

        if cfg.reward_agg == "terminal":
            chosen = [path[-1]]
        elif cfg.reward_agg == "random":
            chosen = [path[self.rng.randrange(len(path))]]
        else:
            chosen = path
        evaluated = [(d, m, evaluate_mask(cfg.measure, m, self.data)) for d, m in chosen]
        rewards = [normalize(cfg.measure, phi) for _, _, phi in evaluated]
        if cfg.reward_agg == "max":
            delta = max(rewards)
        elif cfg.reward_agg == "mean":
            delta = sum(rewards) / len(rewards)
        elif cfg.reward_agg == "top_k_mean":
            top = sorted(rewards, reverse=True)[:cfg.reward_k]
            delta = sum(top) / len(top)
        else:
            delta = rewards[0]
        return delta, evaluated

    def _random_frequent_step(self, desc: Description, mask: int):
        """One uniformly random frequent direct refinement, or None at a leaf.

        Draws actions without replacement (partial Fisher-Yates) and returns
        the first frequent one, which is uniform over the frequent actions.
        """
        actions = list(_iter_actions(desc, self.data, self.cfg.max_length, self.offsets, -1))
        rng = self.rng
        n = len(actions)
        while n:
            i = rng.randrange(n)
            n -= 1
            actions[i], actions[n] = actions[n], actions[i]
            _, kind, attr, payload = actions[n]
            cmask = mask & _action_mask(self.data, kind, attr, payload)
            if cmask.bit_count() >= self.cfg.min_supp:
                return _child_desc(desc, self.data, kind, attr, payload), cmask
        return None

    # -- memory ---------------------------------------------------------------

    def memorize(self, evaluated: list) -> None:
        cfg = self.cfg
        if cfg.memory == "none":
            return
        if cfg.memory == "top_k":
            evaluated = sorted(evaluated, key=lambda e: -e[2])[:cfg.memory_k]
        for desc, mask, phi in evaluated:
            self.pool.add(desc, mask, phi, MEMORY)

    # -- update ---------------------------------------------------------------

    def update(self, exp: TreeNode, delta: float) -> None:
        """Back-propagate through all parent links, touching each node once."""
        cfg = self.cfg
        stack = [exp]
        seen = {id(exp)}
        while stack:
            node = stack.pop()
            self._apply_reward(node, delta, cfg)
            for parent in node.parents:
                if id(parent) not in seen:
                    seen.add(id(parent))
                    stack.append(parent)

    @staticmethod
    def _apply_reward(node: TreeNode, delta: float, cfg: SearchConfig) -> None:
        if cfg.update == "mean":
            node.q = (node.n * node.q + delta) / (node.n + 1)
        elif cfg.update == "max":
            node.q = max(node.q, delta) if node.n else delta
        else:
            if node.top_rewards is None:
                node.top_rewards = []
            top = node.top_rewards
            top.append(delta)
            top.sort(reverse=True)
            del top[cfg.update_k:]
            node.q = sum(top) / len(top)
        node.n += 1
        node.delta_sum += delta
        node.delta_sq_sum += delta * delta


@dataclass
class Checkpoint:
    iteration: int
    elapsed_s: float
    top_entries: list = field(repr=False)


@dataclass
class MctsResult:
    """Outcome of one search: the pattern pool plus instrumentation."""

    pool: PatternPool
    iterations: int
    elapsed_s: float
    node_count: int
    exhausted: bool
    root: TreeNode = field(repr=False)


def mcts_search(data: Dataset, cfg: SearchConfig,
                checkpoint_every: Optional[int] = None,
                on_checkpoint: Optional[Callable] = None) -> MctsResult:
    """Run the configured search within the iteration budget.

    Stops early once the whole frequent lattice reachable under the config has
    been expanded. When `checkpoint_every` is set, `on_checkpoint` receives a
    Checkpoint (with the current capped filtered top patterns) after every
    interval and once more at the end of a partial interval.
    """
    search = _Search(data, cfg)
    t0 = time.perf_counter()
    iterations = 0
    exhausted = False

    def emit():
        if on_checkpoint is None:
            return
        top = filter_pool(search.pool.entries(), cfg.theta, cfg.max_output)
        on_checkpoint(Checkpoint(iterations, time.perf_counter() - t0, top.entries))

    while iterations < cfg.budget:
        sel = search.select()
        if sel is None:
            exhausted = True
            break
        exp = search.expand(sel)
        delta, evaluated = search.rollout(exp)
        search.memorize(evaluated)
        search.update(exp, delta)
        iterations += 1
        if checkpoint_every and iterations % checkpoint_every == 0:
            emit()
    if checkpoint_every and iterations % checkpoint_every != 0:
        emit()

    return MctsResult(search.pool, iterations, time.perf_counter() - t0,
                      search.node_count, exhausted, search.root)


def iter_nodes(root: TreeNode):
    """All reachable tree nodes, each once (test/instrumentation helper)."""
    seen = {id(root)}
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        for child in node.children:
            if id(child) not in seen:
                seen.add(id(child))
                stack.append(child)
