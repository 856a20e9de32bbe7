# -*- coding: utf-8 -*-

"""Compiled State Graphs.

Training, alignment and decoding all build a graph of model instances
joined by non-emitting nodes, then close the non-emitting nodes away so
every arc runs from one emitting state to the next. Each closed arc keeps
the tags of the non-emitting nodes it passes (model entries, word ends) and
the primitive model transitions it is made of.
"""

import heapq
from dataclasses import dataclass, field
from typing import Any, Hashable, Literal, Optional

import numpy as np
from scipy.special import logsumexp

from ..errors import HmmError
from .model import Gmm, Hmm

__all__ = (
    "ArcPart",
    "GraphBuilder",
    "Path",
    "Segment",
    "StateGraph",
)

Semiring = Literal["max", "sum"]
# (label, from, to) of one transition-matrix entry
Primitive = tuple[str, int, int]


@dataclass(frozen=True)
class ArcPart:
    """One non-emitting route behind a closed arc."""

    logp: float
    prims: tuple[Primitive, ...]
    via: tuple[Hashable, ...]


@dataclass(frozen=True)
class Segment:
    """Frames [start, end) spent in one model instance."""

    label: str
    start: int
    end: int
    instance: int


@dataclass(frozen=True, eq=False)
class Path:
    """Best state sequence with the tags crossed before every frame and after the last."""

    score: float
    states: np.ndarray
    vias: list[tuple[Hashable, ...]]
    end_via: tuple[Hashable, ...]
    tags: list[Any] = field(repr=False)

    def segments(self) -> list[Segment]:
        result: list[Segment] = []
        for t, state in enumerate(self.states.tolist()):
            instance, label, _ = self.tags[state]
            if t == 0 or ("model", instance) in self.vias[t]:
                result.append(Segment(label, t, t + 1, instance))
            else:
                last = result[-1]
                result[-1] = Segment(last.label, last.start, t + 1, last.instance)
        return result

    def events(self, kind: str) -> list[Any]:
        """Payloads of `(kind, payload)` tags in path order."""
        found = []
        for via in [*self.vias, self.end_via]:
            found.extend(tag[1] for tag in via if isinstance(tag, tuple) and len(tag) == 2 and tag[0] == kind)
        return found


class GraphBuilder:
    """Mutable network of emitting and non-emitting nodes."""

    def __init__(self) -> None:
        self._gmms: list[Optional[Gmm]] = []
        self._tags: list[Any] = []
        self._out: list[list[tuple[int, float, Optional[Primitive]]]] = []
        self._instances = 0
        self.start = self.null()
        self.end = self.null()

    def _node(self, gmm: Optional[Gmm], tag: Any) -> int:
        self._gmms.append(gmm)
        self._tags.append(tag)
        self._out.append([])
        return len(self._gmms) - 1

    def null(self, tag: Optional[Hashable] = None) -> int:
        return self._node(None, tag)

    def arc(self, src: int, dst: int, logp: float = 0.0, prim: Optional[Primitive] = None) -> None:
        if dst == self.start or src == self.end:
            raise HmmError("arcs may not enter the start node or leave the end node")
        self._out[src].append((dst, float(logp), prim))

    def model(self, hmm: Hmm) -> tuple[int, int]:
        """Add one instance of `hmm`; returns its (entry, exit) nodes."""
        instance = self._instances
        self._instances += 1
        entry = self.null(("model", instance))
        states = [self._node(gmm, (instance, hmm.label, k)) for k, gmm in enumerate(hmm.states)]
        exit_ = self.null()
        nodes = [entry, *states, exit_]
        rows, cols = np.nonzero(hmm.transitions)
        for i, j in zip(rows.tolist(), cols.tolist()):
            self.arc(nodes[i], nodes[j], float(np.log(hmm.transitions[i, j])), (hmm.label, i, j))
        return entry, exit_

    def chain(self, hmms: list[Hmm], src: int) -> int:
        """Models in sequence after `src`; returns the last exit node."""
        node = src
        for hmm in hmms:
            entry, exit_ = self.model(hmm)
            self.arc(node, entry)
            node = exit_
        return node

    def _null_order(self) -> dict[int, int]:
        """Topological rank of every non-emitting node."""
        nulls = [i for i, g in enumerate(self._gmms) if g is None]
        indegree = {i: 0 for i in nulls}
        for i in nulls:
            for dst, _, _ in self._out[i]:
                if dst in indegree:
                    indegree[dst] += 1
        ready = [i for i in nulls if indegree[i] == 0]
        heapq.heapify(ready)
        order: dict[int, int] = {}
        while ready:
            node = heapq.heappop(ready)
            order[node] = len(order)
            for dst, _, _ in self._out[node]:
                if dst in indegree:
                    indegree[dst] -= 1
                    if indegree[dst] == 0:
                        heapq.heappush(ready, dst)
        if len(order) != len(nulls):
            raise HmmError("graph has a cycle of non-emitting nodes")
        return order

    def _close(self, source: int, order: dict[int, int], semiring: Semiring) -> dict[int, list[ArcPart]]:
        """Emitting (or end) nodes reachable from `source` through non-emitting nodes only."""
        found: dict[int, list[ArcPart]] = {}
        pending: dict[int, list[ArcPart]] = {}
        heap: list[tuple[int, int]] = []

        def push(node: int, part: ArcPart) -> None:
            if self._gmms[node] is not None or node == self.end:
                found.setdefault(node, []).append(part)
                return
            if node not in pending:
                pending[node] = []
                heapq.heappush(heap, (order[node], node))
            pending[node].append(part)

        for dst, logp, prim in self._out[source]:
            push(dst, ArcPart(logp, (prim,) if prim else (), ()))
        while heap:
            _, node = heapq.heappop(heap)
            parts = pending.pop(node)
            if semiring == "max":
                parts = [max(parts, key=lambda p: p.logp)]
            tag = self._tags[node]
            for part in parts:
                via = part.via + (tag,) if tag is not None else part.via
                for dst, logp, prim in self._out[node]:
                    prims = part.prims + (prim,) if prim else part.prims
                    push(dst, ArcPart(part.logp + logp, prims, via))
        if semiring == "max":
            found = {node: [max(parts, key=lambda p: p.logp)] for node, parts in found.items()}
        return found

    def compile(self, semiring: Semiring = "max") -> "StateGraph":
        """Close non-emitting nodes; ties under `max` keep the first route found."""
        order = self._null_order()
        emitting = [i for i, g in enumerate(self._gmms) if g is not None]
        index = {node: k for k, node in enumerate(emitting)}
        n = len(emitting)
        if n == 0:
            raise HmmError("graph has no emitting state")

        def terminal(parts_by_node: dict[int, list[ArcPart]]) -> tuple[dict[int, list[ArcPart]], list[ArcPart]]:
            end = parts_by_node.pop(self.end, [])
            return parts_by_node, end

        init = np.full(n, -np.inf)
        init_parts: list[list[ArcPart]] = [[] for _ in range(n)]
        reach, _ = terminal(self._close(self.start, order, semiring))
        for node, parts in reach.items():
            init[index[node]] = logsumexp([p.logp for p in parts])
            init_parts[index[node]] = parts

        final = np.full(n, -np.inf)
        final_parts: list[list[ArcPart]] = [[] for _ in range(n)]
        arcs: list[tuple[int, int, float, list[ArcPart]]] = []
        for k, node in enumerate(emitting):
            reach, end = terminal(self._close(node, order, semiring))
            if end:
                final[k] = logsumexp([p.logp for p in end])
                final_parts[k] = end
            for dst, parts in reach.items():
                arcs.append((k, index[dst], float(logsumexp([p.logp for p in parts])), parts))

        arcs.sort(key=lambda a: (a[1], a[0]))
        return StateGraph(
            gmms=[self._gmms[i] for i in emitting],  # type: ignore[misc]
            tags=[self._tags[i] for i in emitting],
            src=np.array([a[0] for a in arcs], dtype=np.int64),
            dst=np.array([a[1] for a in arcs], dtype=np.int64),
            logp=np.array([a[2] for a in arcs], dtype=np.float64),
            parts=[a[3] for a in arcs],
            init=init,
            init_parts=init_parts,
            final=final,
            final_parts=final_parts,
        )


@dataclass(eq=False)
class StateGraph:
    """Emitting states with closed arcs sorted by (destination, source)."""

    gmms: list[Gmm]
    tags: list[Any]
    src: np.ndarray
    dst: np.ndarray
    logp: np.ndarray
    parts: list[list[ArcPart]]
    init: np.ndarray
    init_parts: list[list[ArcPart]]
    final: np.ndarray
    final_parts: list[list[ArcPart]]

    def __post_init__(self) -> None:
        n_arcs = self.src.shape[0]
        # group boundaries of the destination-sorted arcs
        self._dst_nodes, self._dst_starts = np.unique(self.dst, return_index=True)
        self._dst_group = np.searchsorted(self._dst_nodes, self.dst)
        by_src = np.lexsort((self.dst, self.src)) if n_arcs else np.zeros(0, dtype=np.int64)
        self._by_src = by_src
        self._src_nodes, self._src_starts = np.unique(self.src[by_src], return_index=True)

    @property
    def n_states(self) -> int:
        return len(self.gmms)

    def emissions(self, frames: np.ndarray) -> np.ndarray:
        """(T, S) state log-likelihoods, each distinct mixture evaluated once."""
        cache: dict[int, np.ndarray] = {}
        out = np.empty((frames.shape[0], self.n_states))
        for s, gmm in enumerate(self.gmms):
            key = id(gmm)
            if key not in cache:
                cache[key] = gmm.log_likelihood(frames)
            out[:, s] = cache[key]
        return out

    def _push_sum(self, prev: np.ndarray) -> np.ndarray:
        out = np.full(self.n_states, -np.inf)
        if self.src.shape[0]:
            cand = prev[self.src] + self.logp
            out[self._dst_nodes] = np.logaddexp.reduceat(cand, self._dst_starts)
        return out

    def _pull_sum(self, after: np.ndarray) -> np.ndarray:
        out = np.full(self.n_states, -np.inf)
        if self.src.shape[0]:
            order = self._by_src
            cand = self.logp[order] + after[self.dst[order]]
            out[self._src_nodes] = np.logaddexp.reduceat(cand, self._src_starts)
        return out

    def forward(self, emissions: np.ndarray) -> tuple[np.ndarray, float]:
        """Log forward variables and the total log-likelihood."""
        steps = emissions.shape[0]
        alpha = np.empty_like(emissions)
        alpha[0] = self.init + emissions[0]
        for t in range(1, steps):
            alpha[t] = self._push_sum(alpha[t - 1]) + emissions[t]
        return alpha, float(logsumexp(alpha[-1] + self.final))

    def backward(self, emissions: np.ndarray) -> tuple[np.ndarray, float]:
        """Log backward variables and the total log-likelihood."""
        steps = emissions.shape[0]
        beta = np.empty_like(emissions)
        beta[-1] = self.final
        for t in range(steps - 2, -1, -1):
            beta[t] = self._pull_sum(beta[t + 1] + emissions[t + 1])
        return beta, float(logsumexp(self.init + emissions[0] + beta[0]))

    def viterbi(self, emissions: np.ndarray) -> Path:
        """Best path; ties go to the lowest source state."""
        steps, n = emissions.shape
        n_arcs = self.src.shape[0]
        delta = self.init + emissions[0]
        back = np.full((steps, n), -1, dtype=np.int64)
        for t in range(1, steps):
            new = np.full(n, -np.inf)
            if n_arcs:
                cand = delta[self.src] + self.logp
                best = np.maximum.reduceat(cand, self._dst_starts)
                hits = np.flatnonzero(cand == best[self._dst_group])
                groups, first = np.unique(self._dst_group[hits], return_index=True)
                chosen = hits[first]
                nodes = self._dst_nodes[groups]
                new[nodes] = best[groups] + emissions[t, nodes]
                back[t, nodes] = chosen
            delta = new

        total = delta + self.final
        last = int(np.argmax(total))
        score = float(total[last])
        if not np.isfinite(score):
            raise HmmError(f"no path through the graph fits {steps} frames")

        states = np.empty(steps, dtype=np.int64)
        vias: list[tuple[Hashable, ...]] = [()] * steps
        states[-1] = last
        for t in range(steps - 1, 0, -1):
            arc = int(back[t, states[t]])
            vias[t] = self.parts[arc][0].via
            states[t - 1] = self.src[arc]
        vias[0] = self.init_parts[states[0]][0].via
        end_via = self.final_parts[last][0].via
        return Path(score=score, states=states, vias=vias, end_via=end_via, tags=self.tags)
