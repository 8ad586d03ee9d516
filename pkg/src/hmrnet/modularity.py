"""Composite modularity: exact scores and incremental single-move gains.

A unipartite subnetwork is scored as the sum over communities of the internal
edge fraction minus the squared attached fraction (both under the 1/(2m)
normalization).  A k-partite subnetwork is scored by anchoring each community
of each of the k types, pairing it with the corresponding communities in the
other types that carry the largest edge fraction to it, and averaging the
resulting e - a_1*...*a_k terms over the k types.  The composite score is a
weighted sum of subnetwork scores, weighted either by each subnetwork's share
of the total edge weight or by user-supplied per-edge-type weights entering
as 1/w (a larger custom weight down-weights its edge type).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import HeteroNetwork, NodeRef, Partition, Subnetwork


@dataclass(frozen=True)
class WeightingScheme:
    """Subnetwork weighting for the composite score.

    ``weights=None`` selects edge-fraction weighting (coefficient m_y/m).
    Custom positive weights give coefficient 1/w_y.
    """

    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.weights is not None:
            ws = tuple(float(w) for w in self.weights)
            if not ws or any(w <= 0 or not np.isfinite(w) for w in ws):
                raise ValueError("custom weights must be positive and finite")
            object.__setattr__(self, "weights", ws)

    @classmethod
    def edge_fraction(cls) -> "WeightingScheme":
        return cls(None)

    @classmethod
    def custom(cls, weights: Iterable[float]) -> "WeightingScheme":
        return cls(tuple(weights))

    def coefficients(self, network: HeteroNetwork) -> tuple[float, ...]:
        if self.weights is None:
            m = network.m
            if m <= 0:
                return (0.0,) * network.s
            return tuple(sub.total_weight / m for sub in network.subnetworks)
        if len(self.weights) != network.s:
            raise ValueError(
                f"custom weighting has {len(self.weights)} entries, "
                f"network has {network.s} edge types"
            )
        return tuple(1.0 / w for w in self.weights)


@dataclass(frozen=True)
class ModularityReport:
    subnetwork_names: tuple[str, ...]
    subnetwork_weights: tuple[float, ...]
    coefficients: tuple[float, ...]
    subnetwork_scores: tuple[float, ...]
    score: float

    def to_json(self) -> str:
        payload = {
            "subnetworks": [
                {
                    "name": name,
                    "m": round(m, 6),
                    "coefficient": round(c, 6),
                    "q": round(q, 6),
                }
                for name, m, c, q in zip(
                    self.subnetwork_names,
                    self.subnetwork_weights,
                    self.coefficients,
                    self.subnetwork_scores,
                )
            ],
            "q": round(self.score, 6),
        }
        return json.dumps(payload, indent=2)


def unipartite_modularity(subnetwork: Subnetwork, partition: Partition) -> float:
    """Newman-Girvan score of one unipartite subnetwork, over edge weights."""
    if not subnetwork.is_unipartite:
        raise ValueError(
            f"subnetwork {subnetwork.name!r} is k-partite; "
            "unipartite_modularity expects a unipartite subnetwork"
        )
    m = subnetwork.total_weight
    if m <= 0:
        return 0.0
    labels = partition.labels[subnetwork.signature[0]]
    inner: dict[int, float] = {}
    tot: dict[int, float] = {}
    for (i, j), w in subnetwork.edges:
        ci = int(labels[i])
        cj = int(labels[j])
        if ci == cj:
            inner[ci] = inner.get(ci, 0.0) + w
        tot[ci] = tot.get(ci, 0.0) + w
        tot[cj] = tot.get(cj, 0.0) + w
    two_m = 2.0 * m
    return sum(inner.values()) / m - sum((t / two_m) ** 2 for t in tot.values())


def kpartite_modularity(subnetwork: Subnetwork, partition: Partition) -> float:
    """Argmax-coupled k-partite score of one k-partite subnetwork.

    For each anchor community the corresponding communities in the other
    types are the ones with the largest edge fraction to it; exact ties take
    the lexicographically smallest community-id tuple.  Communities with no
    attached weight in this subnetwork contribute 0.
    """
    if subnetwork.is_unipartite:
        raise ValueError(
            f"subnetwork {subnetwork.name!r} is unipartite; "
            "kpartite_modularity expects a k-partite subnetwork"
        )
    m = subnetwork.total_weight
    if m <= 0:
        return 0.0
    k = subnetwork.k
    label_arrays = [partition.labels[t] for t in subnetwork.signature]
    e: dict[tuple[int, ...], float] = {}
    a: list[dict[int, float]] = [{} for _ in range(k)]
    for endpoints, w in subnetwork.edges:
        ct = tuple(int(label_arrays[p][endpoints[p]]) for p in range(k))
        e[ct] = e.get(ct, 0.0) + w
        for p in range(k):
            a[p][ct[p]] = a[p].get(ct[p], 0.0) + w
    by_anchor: list[dict[int, list[tuple[int, ...]]]] = [{} for _ in range(k)]
    for ct in e:
        for p in range(k):
            by_anchor[p].setdefault(ct[p], []).append(ct)
    total = 0.0
    for p in range(k):
        for community in a[p]:
            best = min(by_anchor[p][community], key=lambda t: (-e[t], t))
            prod = 1.0
            for q in range(k):
                prod *= a[q][best[q]] / m
            total += e[best] / m - prod
    return total / k


def composite_modularity(
    network: HeteroNetwork,
    partition: Partition,
    scheme: WeightingScheme | None = None,
) -> ModularityReport:
    """Score every subnetwork and combine per the weighting scheme."""
    scheme = scheme or WeightingScheme.edge_fraction()
    partition.validate_for(network)
    coefficients = scheme.coefficients(network)
    scores = []
    for sub in network.subnetworks:
        if sub.total_weight <= 0:
            scores.append(0.0)
        elif sub.is_unipartite:
            scores.append(unipartite_modularity(sub, partition))
        else:
            scores.append(kpartite_modularity(sub, partition))
    composite = sum(c * q for c, q in zip(coefficients, scores))
    return ModularityReport(
        subnetwork_names=tuple(sub.name for sub in network.subnetworks),
        subnetwork_weights=tuple(sub.total_weight for sub in network.subnetworks),
        coefficients=tuple(coefficients),
        subnetwork_scores=tuple(scores),
        score=composite,
    )


class _UnipartiteState:
    """e/a bookkeeping of one unipartite subnetwork with closed-form deltas."""

    __slots__ = ("m", "labels", "nbr", "self_w", "strength", "inner", "tot")

    def __init__(self, sub: Subnetwork, n_x: int, labels: list[int]):
        self.m = sub.total_weight
        self.labels = labels
        self.nbr: list[list[tuple[int, float]]] = [[] for _ in range(n_x)]
        self.self_w = [0.0] * n_x
        self.strength = [0.0] * n_x
        self.inner: dict[int, float] = {}
        self.tot: dict[int, float] = {}
        for (i, j), w in sub.edges:
            ci = labels[i]
            cj = labels[j]
            if ci == cj:
                self.inner[ci] = self.inner.get(ci, 0.0) + w
            self.tot[ci] = self.tot.get(ci, 0.0) + w
            self.tot[cj] = self.tot.get(cj, 0.0) + w
            if i == j:
                self.self_w[i] += w
                self.strength[i] += 2.0 * w
            else:
                self.nbr[i].append((j, w))
                self.nbr[j].append((i, w))
                self.strength[i] += w
                self.strength[j] += w

    def q(self) -> float:
        m = self.m
        two_m = 2.0 * m
        return sum(self.inner.values()) / m - sum(
            (t / two_m) ** 2 for t in self.tot.values()
        )

    def neighbor_weights(self, i: int) -> dict[int, float]:
        w2c: dict[int, float] = {}
        labels = self.labels
        for j, w in self.nbr[i]:
            cj = labels[j]
            w2c[cj] = w2c.get(cj, 0.0) + w
        return w2c

    def gain(self, i: int, c_old: int, c_new: int, w2c: dict[int, float]) -> float:
        d = self.strength[i]
        if d == 0.0:
            return 0.0
        m = self.m
        k_old = w2c.get(c_old, 0.0)
        k_new = w2c.get(c_new, 0.0)
        tot_old = self.tot.get(c_old, 0.0)
        tot_new = self.tot.get(c_new, 0.0)
        return (k_new - k_old) / m - d * (tot_new - tot_old + d) / (2.0 * m * m)

    def apply(self, i: int, c_old: int, c_new: int) -> None:
        d = self.strength[i]
        if d == 0.0:
            return
        w2c = self.neighbor_weights(i)
        shift = w2c.get(c_old, 0.0) + self.self_w[i]
        rest = self.inner.get(c_old, 0.0) - shift
        if rest > 1e-12 * self.m:
            self.inner[c_old] = rest
        else:
            self.inner.pop(c_old, None)
        gain_in = w2c.get(c_new, 0.0) + self.self_w[i]
        if gain_in > 0.0:
            self.inner[c_new] = self.inner.get(c_new, 0.0) + gain_in
        rest = self.tot.get(c_old, 0.0) - d
        if rest > 1e-12 * self.m:
            self.tot[c_old] = rest
        else:
            self.tot.pop(c_old, None)
        self.tot[c_new] = self.tot.get(c_new, 0.0) + d


class _KPartiteState:
    """e/a/argmax bookkeeping of one k-partite subnetwork.

    Moving a node changes e entries only for community tuples met by its
    incident edges and changes a only for its old and new community, so a
    move can touch only: the anchors of those tuples, the anchors of the two
    communities, and anchors whose current argmax tuple contains the old or
    new community (tracked by a reverse index on best tuples).  Gains
    re-evaluate exactly those anchors against an overlay of the hypothetical
    e/a changes; applying a move commits the changes and refreshes the same
    anchor set.
    """

    __slots__ = (
        "m",
        "k",
        "labels",
        "inc",
        "edges",
        "att",
        "tol",
        "e",
        "a",
        "by_anchor",
        "term",
        "best",
        "rev",
        "term_sum",
    )

    def __init__(self, sub: Subnetwork, labels_by_type: list[list[int]]):
        self.m = sub.total_weight
        self.k = sub.k
        self.labels = [labels_by_type[t] for t in sub.signature]
        self.edges = sub.edges
        self.inc = list(sub.incidence)
        self.tol = 1e-12 * max(1.0, self.m)
        self.att: list[dict[int, float]] = [{} for _ in range(self.k)]
        self.e: dict[tuple[int, ...], float] = {}
        self.a: list[dict[int, float]] = [{} for _ in range(self.k)]
        for endpoints, w in self.edges:
            ct = tuple(self.labels[p][endpoints[p]] for p in range(self.k))
            self.e[ct] = self.e.get(ct, 0.0) + w
            for p in range(self.k):
                self.a[p][ct[p]] = self.a[p].get(ct[p], 0.0) + w
                node = endpoints[p]
                self.att[p][node] = self.att[p].get(node, 0.0) + w
        self.by_anchor: list[dict[int, set[tuple[int, ...]]]] = [
            {} for _ in range(self.k)
        ]
        for ct in self.e:
            for p in range(self.k):
                self.by_anchor[p].setdefault(ct[p], set()).add(ct)
        self.term: dict[tuple[int, int], float] = {}
        self.best: dict[tuple[int, int], tuple[int, ...]] = {}
        self.rev: dict[tuple[int, int], set[tuple[int, int]]] = {}
        self.term_sum = 0.0
        for p in range(self.k):
            for community in self.a[p]:
                self._refresh_anchor((p, community))

    def q(self) -> float:
        return self.term_sum / self.k

    def _eval_anchor(self, anchor: tuple[int, int]):
        p, community = anchor
        if self.a[p].get(community, 0.0) <= self.tol:
            return 0.0, None
        candidates = self.by_anchor[p].get(community)
        if not candidates:
            return 0.0, None
        e = self.e
        best = min(candidates, key=lambda t: (-e[t], t))
        m = self.m
        prod = 1.0
        for q in range(self.k):
            prod *= self.a[q][best[q]] / m
        return e[best] / m - prod, best

    def _refresh_anchor(self, anchor: tuple[int, int]) -> None:
        new_term, new_best = self._eval_anchor(anchor)
        old_best = self.best.get(anchor)
        if old_best is not None and old_best != new_best:
            for p in range(self.k):
                entry = self.rev.get((p, old_best[p]))
                if entry is not None:
                    entry.discard(anchor)
                    if not entry:
                        del self.rev[(p, old_best[p])]
        self.term_sum += new_term - self.term.get(anchor, 0.0)
        if new_best is None:
            self.term.pop(anchor, None)
            self.best.pop(anchor, None)
            return
        if old_best != new_best:
            for p in range(self.k):
                self.rev.setdefault((p, new_best[p]), set()).add(anchor)
        self.term[anchor] = new_term
        self.best[anchor] = new_best

    def _move_effects(
        self, pos: int, i: int, c_new: int
    ) -> dict[tuple[int, ...], float]:
        delta_e: dict[tuple[int, ...], float] = {}
        labels = self.labels
        for eid in self.inc[pos].get(i, ()):
            endpoints, w = self.edges[eid]
            ct = tuple(labels[p][endpoints[p]] for p in range(self.k))
            delta_e[ct] = delta_e.get(ct, 0.0) - w
            nt = ct[:pos] + (c_new,) + ct[pos + 1 :]
            delta_e[nt] = delta_e.get(nt, 0.0) + w
        return delta_e

    def _affected(self, pos, c_old, c_new, delta_e):
        affected = {(pos, c_old), (pos, c_new)}
        for t in delta_e:
            for p in range(self.k):
                affected.add((p, t[p]))
        affected |= self.rev.get((pos, c_old), set())
        affected |= self.rev.get((pos, c_new), set())
        return affected

    def gain(self, pos: int, i: int, c_old: int, c_new: int) -> float:
        return self.gains_batch(pos, i, c_old, (c_new,))[c_new]

    def gains_batch(
        self, pos: int, i: int, c_old: int, targets
    ) -> dict[int, float]:
        """Gains for moving node ``i`` (position ``pos``) to each target.

        The expensive side of a hypothetical move, removing the node's edges
        from its current community tuples, is identical for every target, so
        its anchor re-evaluations (including any argmax rescans) are done
        once and only the addition side varies per target.
        """
        if not self.inc[pos].get(i):
            return {c: 0.0 for c in targets}
        k = self.k
        m = self.m
        e = self.e
        a = self.a
        tol = self.tol
        term = self.term
        best = self.best
        att_v = self.att[pos][i]
        labels = self.labels
        removals: dict[tuple[int, ...], float] = {}
        for eid in self.inc[pos][i]:
            endpoints, w = self.edges[eid]
            ct = tuple(labels[p][endpoints[p]] for p in range(k))
            removals[ct] = removals.get(ct, 0.0) + w
        removal_items = list(removals.items())
        a_old_pos = a[pos].get(c_old, 0.0)
        a_old_new = a_old_pos - att_v

        # Side anchors (u != pos) touched by removals; each maps 1:1 to the
        # addition tuples derived from its own removal tuples (by index).
        side: dict[tuple[int, int], list[int]] = {}
        for idx, (ct, _) in enumerate(removal_items):
            for u in range(k):
                if u != pos:
                    side.setdefault((u, ct[u]), []).append(idx)
        # Removal-only best per side anchor: cached argmax survives unless it
        # was itself weakened, in which case rescan once for the whole batch.
        # ``stable`` marks anchors whose base came from the untouched cache,
        # where the term provably stays put unless an addition overtakes it
        # or an attachment factor of its product moves.
        side_base: dict[
            tuple[int, int],
            tuple[float, tuple[int, ...] | None, bool],
        ] = {}
        for anchor in side:
            u, alpha = anchor
            cached = best.get(anchor)
            if cached is not None and cached not in removals:
                side_base[anchor] = (e[cached], cached, cached[pos] != c_old)
                continue
            base = None
            base_ev = 0.0
            for t in self.by_anchor[u].get(alpha, ()):
                ev = e[t] - removals.get(t, 0.0)
                if ev <= tol:
                    continue
                if base is None or ev > base_ev or (ev == base_ev and t < base):
                    base, base_ev = t, ev
            side_base[anchor] = (base_ev, base, False)

        # The current community's anchor: additions never land on it, so its
        # post-move term is target-independent.
        diff_shared = self._removal_anchor_term(
            pos, c_old, removals, a_old_new
        ) - term.get((pos, c_old), 0.0)
        # Anchors pointing at the old community from outside the touched set:
        # only the a-factor of their product rescales.
        rev_old = self.rev.get((pos, c_old))
        if rev_old and a_old_pos > 0.0:
            ratio = a_old_new / a_old_pos
            for anchor in rev_old:
                if anchor in side or anchor == (pos, c_old):
                    continue
                old_term = term[anchor]
                e_b = e[best[anchor]] / m
                diff_shared += (e_b - (e_b - old_term) * ratio) - old_term

        out: dict[int, float] = {}
        a_get = [a[q].get for q in range(k)]
        term_get = term.get
        for c_new in targets:
            if c_new == c_old:
                out[c_new] = 0.0
                continue
            diff = diff_shared
            a_new_old = a[pos].get(c_new, 0.0)
            a_new_new = a_new_old + att_v
            adds = []
            adds_ev = []
            for ct, w in removal_items:
                t_new = ct[:pos] + (c_new,) + ct[pos + 1 :]
                adds.append(t_new)
                adds_ev.append(e.get(t_new, 0.0) + w)
            # side anchors: base (removal-only) vs this target's additions
            for anchor, idxs in side.items():
                base_ev, base_t, stable = side_base[anchor]
                best_t = base_t
                best_ev = base_ev
                for idx in idxs:
                    ev = adds_ev[idx]
                    if ev <= tol:
                        continue
                    t_new = adds[idx]
                    if best_t is None or ev > best_ev or (
                        ev == best_ev and t_new < best_t
                    ):
                        best_t, best_ev = t_new, ev
                if best_t is None:
                    new_term = 0.0
                    diff += new_term - term_get(anchor, 0.0)
                    continue
                if stable and best_t is base_t and best_t[pos] != c_new:
                    continue  # argmax and product untouched: term unchanged
                u, alpha = anchor
                if a[u].get(alpha, 0.0) <= tol:
                    diff -= term_get(anchor, 0.0)
                    continue
                prod = 1.0
                for q in range(k):
                    cq = best_t[q]
                    if q == pos:
                        aq = a_old_new if cq == c_old else (
                            a_new_new if cq == c_new else a_get[q](cq, 0.0)
                        )
                    else:
                        aq = a_get[q](cq, 0.0)
                    prod *= aq / m
                diff += (best_ev / m - prod) - term_get(anchor, 0.0)
            # the target community's own anchor
            diff += self._addition_anchor_term(
                pos, c_new, adds, adds_ev, a_new_new, a_old_new, c_old
            ) - term_get((pos, c_new), 0.0)
            # outside anchors pointing at the target community
            rev_new = self.rev.get((pos, c_new))
            if rev_new and a_new_old > 0.0:
                ratio = a_new_new / a_new_old
                for anchor in rev_new:
                    if anchor in side or anchor == (pos, c_old) or anchor == (
                        pos,
                        c_new,
                    ):
                        continue
                    old_term = term[anchor]
                    e_b = e[best[anchor]] / m
                    diff += (e_b - (e_b - old_term) * ratio) - old_term
            out[c_new] = diff / k
        return out

    def _removal_anchor_term(self, pos, c_old, removals, a_old_new) -> float:
        """Post-move term of the vacated community's anchor (shared)."""
        if a_old_new <= self.tol:
            return 0.0
        e = self.e
        tol = self.tol
        best_t = None
        best_ev = 0.0
        cached = self.best.get((pos, c_old))
        if cached is not None and cached not in removals:
            best_t, best_ev = cached, e[cached]
        else:
            for t in self.by_anchor[pos].get(c_old, ()):
                ev = e[t] - removals.get(t, 0.0)
                if ev <= tol:
                    continue
                if best_t is None or ev > best_ev or (ev == best_ev and t < best_t):
                    best_t, best_ev = t, ev
        if best_t is None:
            return 0.0
        m = self.m
        a = self.a
        prod = 1.0
        for q in range(self.k):
            cq = best_t[q]
            aq = a_old_new if q == pos and cq == c_old else a[q].get(cq, 0.0)
            prod *= aq / m
        return best_ev / m - prod

    def _addition_anchor_term(
        self, pos, c_new, adds, adds_ev, a_new_new, a_old_new, c_old
    ) -> float:
        """Post-move term of the receiving community's anchor."""
        if a_new_new <= self.tol:
            return 0.0
        e = self.e
        tol = self.tol
        # existing tuples of this anchor are untouched by removals
        cached = self.best.get((pos, c_new))
        best_t = None
        best_ev = 0.0
        if cached is not None:
            best_t, best_ev = cached, e[cached]
        for t_new, ev in zip(adds, adds_ev):
            if ev <= tol:
                continue
            if best_t is None or ev > best_ev or (ev == best_ev and t_new < best_t):
                best_t, best_ev = t_new, ev
        if best_t is None:
            return 0.0
        m = self.m
        a = self.a
        prod = 1.0
        for q in range(self.k):
            cq = best_t[q]
            if q == pos:
                aq = a_new_new if cq == c_new else (
                    a_old_new if cq == c_old else a[q].get(cq, 0.0)
                )
            else:
                aq = a[q].get(cq, 0.0)
            prod *= aq / m
        return best_ev / m - prod

    def apply(self, pos: int, i: int, c_old: int, c_new: int) -> None:
        if not self.inc[pos].get(i):
            return
        delta_e = self._move_effects(pos, i, c_new)
        att_v = self.att[pos][i]
        affected = self._affected(pos, c_old, c_new, delta_e)
        tol = self.tol
        for t, dv in delta_e.items():
            nv = self.e.get(t, 0.0) + dv
            if nv <= tol:
                if t in self.e:
                    del self.e[t]
                    for p in range(self.k):
                        entry = self.by_anchor[p].get(t[p])
                        if entry is not None:
                            entry.discard(t)
                            if not entry:
                                del self.by_anchor[p][t[p]]
            else:
                if t not in self.e:
                    for p in range(self.k):
                        self.by_anchor[p].setdefault(t[p], set()).add(t)
                self.e[t] = nv
        for community, dv in ((c_old, -att_v), (c_new, att_v)):
            nv = self.a[pos].get(community, 0.0) + dv
            if nv <= tol:
                self.a[pos].pop(community, None)
            else:
                self.a[pos][community] = nv
        for anchor in affected:
            self._refresh_anchor(anchor)


class EvaluationState:
    """Mutable evaluation state for an optimizer run.

    Owns a working copy of the partition labels and per-subnetwork incremental
    statistics.  ``gain`` answers "what would the composite score change by if
    this node moved to that community" without mutating; ``apply`` commits a
    move.  One state instance belongs to a single optimizer run and must not
    be shared across threads.
    """

    def __init__(
        self,
        network: HeteroNetwork,
        partition: Partition,
        scheme: WeightingScheme | None = None,
    ):
        scheme = scheme or WeightingScheme.edge_fraction()
        partition.validate_for(network)
        self.network = network
        self.scheme = scheme
        self.coefficients = scheme.coefficients(network)
        self.labels: list[list[int]] = [
            [int(v) for v in arr] for arr in partition.labels
        ]
        self.community_type: dict[int, int] = {}
        self.community_size: dict[int, int] = {}
        for x, arr in enumerate(self.labels):
            for c in arr:
                self.community_type[c] = x
                self.community_size[c] = self.community_size.get(c, 0) + 1
        self._states: list[_UnipartiteState | _KPartiteState | None] = []
        self._by_type: list[list[tuple[float, object, int]]] = [
            [] for _ in range(network.r)
        ]
        for y, sub in enumerate(network.subnetworks):
            coeff = self.coefficients[y]
            if sub.total_weight <= 0 or coeff == 0.0:
                self._states.append(None)
                continue
            if sub.is_unipartite:
                x = sub.signature[0]
                st: object = _UnipartiteState(
                    sub, network.node_tables[x].node_count, self.labels[x]
                )
                self._states.append(st)
                self._by_type[x].append((coeff, st, 0))
            else:
                st = _KPartiteState(sub, self.labels)
                self._states.append(st)
                for pos, t in enumerate(sub.signature):
                    self._by_type[t].append((coeff, st, pos))

    def composite(self) -> float:
        total = 0.0
        for coeff, st in zip(self.coefficients, self._states):
            if st is not None:
                total += coeff * st.q()
        return total

    def partition(self) -> Partition:
        return Partition(self.labels)

    def _check_move(self, node: NodeRef, target: int) -> int:
        self.network.validate_ref(node)
        c_old = self.labels[node.type_id][node.index]
        if target != c_old and self.community_type.get(target) != node.type_id:
            raise ValueError(
                f"unknown target community {target} for node type {node.type_id}"
            )
        return c_old

    def gain(self, node: NodeRef, target: int) -> float:
        c_old = self._check_move(node, target)
        if target == c_old:
            return 0.0
        x, i = node
        total = 0.0
        for coeff, st, pos in self._by_type[x]:
            if isinstance(st, _UnipartiteState):
                total += coeff * st.gain(i, c_old, target, st.neighbor_weights(i))
            else:
                total += coeff * st.gain(pos, i, c_old, target)
        return total

    def gains(self, node: NodeRef, targets: Iterable[int]) -> dict[int, float]:
        """Gains for moving ``node`` to each target community."""
        x, i = node
        c_old = self.labels[x][i]
        target_list = list(targets)
        states = self._by_type[x]
        uni_parts = []
        kp_parts = []
        for coeff, st, pos in states:
            if isinstance(st, _UnipartiteState):
                if st.strength[i] > 0.0:
                    uni_parts.append((coeff, st, st.neighbor_weights(i)))
            elif st.inc[pos].get(i):
                kp_parts.append(
                    (coeff, st.gains_batch(pos, i, c_old, target_list))
                )
        out: dict[int, float] = {}
        for target in target_list:
            if target == c_old:
                out[target] = 0.0
                continue
            total = 0.0
            for coeff, st, w2c in uni_parts:
                total += coeff * st.gain(i, c_old, target, w2c)
            for coeff, batch in kp_parts:
                total += coeff * batch[target]
            out[target] = total
        return out

    def apply(self, node: NodeRef, target: int) -> None:
        c_old = self._check_move(node, target)
        if target == c_old:
            return
        x, i = node
        for _, st, pos in self._by_type[x]:
            if isinstance(st, _UnipartiteState):
                st.apply(i, c_old, target)
            else:
                st.apply(pos, i, c_old, target)
        self.labels[x][i] = target
        size = self.community_size[c_old] - 1
        if size == 0:
            del self.community_size[c_old]
            del self.community_type[c_old]
        else:
            self.community_size[c_old] = size
        self.community_size[target] = self.community_size.get(target, 0) + 1


def move_gain(state: EvaluationState, node: NodeRef, target_community: int) -> float:
    """Composite-score change from moving one node to a target community.

    Exact against full recomputation; the evaluation state is not modified.
    """
    return state.gain(node, target_community)
