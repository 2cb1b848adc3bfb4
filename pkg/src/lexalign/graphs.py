"""Nearest-neighbor graphs over word sets and their spectral comparison.

Builds undirected unweighted NN graphs, computes Laplacian spectra, the
eigenvalue-difference similarity score, exact isomorphism via VF2-style
backtracking, and the sampled-subgraph diagnostic that compares source
words against their dictionary translations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .dictionaries import BilingualDictionary
from .embeddings import EmbeddingSpace, ensure_normalized
from .errors import ValidationError

SPECTRAL_MASS_THRESHOLD = 0.9
DEFAULT_VF2_NODE_CEILING = 64


@dataclass
class NNGraph:
    """Undirected unweighted graph: ordered nodes plus 0/1 adjacency."""

    nodes: list[str]
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        n = len(self.nodes)
        if a.shape != (n, n):
            raise ValidationError(f"adjacency shape {a.shape} does not match {n} nodes")
        if not np.isin(a, (0, 1)).all():
            raise ValidationError("adjacency entries must be 0 or 1")
        if (a != a.T).any():
            raise ValidationError("adjacency must be symmetric")
        if np.diag(a).any():
            raise ValidationError("adjacency must have a zero diagonal")
        self.adjacency = a.astype(np.int64)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def build_nn_graph(
    space: EmbeddingSpace,
    nodes: list[str],
    neighbors_per_node: int = 1,
    link: str = "union",
    pool: str = "nodes",
) -> NNGraph:
    """Connect each node to its most-cosine-similar neighbors.

    Directed neighbor choices are symmetrized: ``link="union"`` keeps an
    edge when either endpoint chose the other, ``link="mutual"`` only
    when both did.  With ``pool="nodes"`` neighbors are ranked within
    the node set; with ``pool="vocab"`` they are ranked over the whole
    vocabulary and choices falling outside the node set are dropped.
    Cosine ties break toward the more frequent word.
    """
    ensure_normalized(space)
    if len(nodes) < 2:
        raise ValidationError(f"need at least 2 nodes, got {len(nodes)}")
    if neighbors_per_node < 1:
        raise ValidationError("neighbors_per_node must be at least 1")
    if link not in ("union", "mutual"):
        raise ValidationError(f"unknown link mode {link!r}")
    if pool not in ("nodes", "vocab"):
        raise ValidationError(f"unknown neighbor pool {pool!r}")
    if len(set(nodes)) != len(nodes):
        raise ValidationError("node list contains duplicates")

    positions = []
    for word in nodes:
        pos = space.position(word)
        if pos is None:
            raise ValidationError(f"node {word!r} is not in the vocabulary")
        positions.append(pos)
    positions = np.asarray(positions)
    vectors = space.vectors[positions]

    n = len(nodes)
    k = min(neighbors_per_node, n - 1)
    directed = np.zeros((n, n), dtype=np.int64)

    if pool == "nodes":
        cos = linalg.cosine_matrix(vectors, vectors)
        for i in range(n):
            # ascending by -cosine, then by frequency rank within the space
            order = np.lexsort((positions, -cos[i]))
            chosen = [j for j in order if j != i][:k]
            directed[i, chosen] = 1
    else:
        cos = linalg.cosine_matrix(vectors, space.vectors)
        node_pos = {int(p): i for i, p in enumerate(positions)}
        for i in range(n):
            order = np.lexsort((np.arange(len(space)), -cos[i]))
            picked = 0
            for j in order:
                if j == positions[i]:
                    continue
                if picked >= k:
                    break
                picked += 1
                target = node_pos.get(int(j))
                if target is not None:
                    directed[i, target] = 1

    if link == "union":
        adjacency = ((directed + directed.T) > 0).astype(np.int64)
    else:
        adjacency = ((directed * directed.T) > 0).astype(np.int64)
    return NNGraph(nodes=list(nodes), adjacency=adjacency)


def laplacian(graph: NNGraph) -> np.ndarray:
    """Degree matrix minus adjacency; integer entries, zero row sums."""
    a = graph.adjacency
    return np.diag(a.sum(axis=1)) - a


def laplacian_spectrum(graph: NNGraph) -> np.ndarray:
    return linalg.sym_eigenvalues(laplacian(graph).astype(np.float64))


def spectral_truncation_size(eigenvalues: np.ndarray) -> int:
    """Smallest k whose top-k eigenvalue mass exceeds 90% of the total."""
    total = float(eigenvalues.sum())
    if total <= 0:
        raise ValidationError("graph has no edges: spectral mass is zero")
    ratios = np.cumsum(eigenvalues) / total
    return int(np.argmax(ratios > SPECTRAL_MASS_THRESHOLD)) + 1


@dataclass(frozen=True)
class EigenSimilarity:
    """Sum of squared top-k Laplacian eigenvalue differences.

    Zero means the truncated spectra coincide; larger means less
    similar graphs.
    """

    delta: float
    k_used: int
    k_source: int
    k_target: int
    spectrum_source: np.ndarray
    spectrum_target: np.ndarray


def eigensimilarity(g1: NNGraph, g2: NNGraph) -> EigenSimilarity:
    """Compare two graphs by their truncated Laplacian spectra.

    Per graph, k is the smallest count whose eigenvalue mass exceeds
    90%; the smaller k of the two is used for the squared-difference
    sum.  Node counts may differ.
    """
    if g1.size < 2 or g2.size < 2:
        raise ValidationError("eigensimilarity needs graphs with at least 2 nodes")
    s1 = laplacian_spectrum(g1)
    s2 = laplacian_spectrum(g2)
    k1 = spectral_truncation_size(s1)
    k2 = spectral_truncation_size(s2)
    k = min(k1, k2)
    delta = float(((s1[:k] - s2[:k]) ** 2).sum())
    return EigenSimilarity(
        delta=delta,
        k_used=k,
        k_source=k1,
        k_target=k2,
        spectrum_source=s1[:k].copy(),
        spectrum_target=s2[:k].copy(),
    )


def vf2_isomorphic(g1: NNGraph, g2: NNGraph, max_nodes: int = DEFAULT_VF2_NODE_CEILING) -> bool:
    """Exact graph-isomorphism test by backtracking with VF2 pruning.

    Graphs above ``max_nodes`` nodes are rejected to guard against
    exponential blowup.
    """
    n = g1.size
    if max(n, g2.size) > max_nodes:
        raise ValidationError(
            f"isomorphism check limited to {max_nodes} nodes "
            f"(got {n} and {g2.size})"
        )
    if n != g2.size:
        return False
    a1 = g1.adjacency.astype(bool)
    a2 = g2.adjacency.astype(bool)
    if a1.sum() != a2.sum():
        return False
    deg1 = a1.sum(axis=1)
    deg2 = a2.sum(axis=1)
    if sorted(deg1) != sorted(deg2):
        return False

    neigh1 = [set(np.flatnonzero(a1[i]).tolist()) for i in range(n)]
    neigh2 = [set(np.flatnonzero(a2[i]).tolist()) for i in range(n)]
    core1: dict[int, int] = {}
    core2: dict[int, int] = {}
    order = sorted(range(n), key=lambda i: (-deg1[i], i))

    def feasible(u: int, v: int) -> bool:
        if deg1[u] != deg2[v]:
            return False
        mapped_u = 0
        for w in neigh1[u]:
            image = core1.get(w)
            if image is not None:
                if image not in neigh2[v]:
                    return False
                mapped_u += 1
        mapped_v = sum(1 for x in neigh2[v] if x in core2)
        if mapped_u != mapped_v:
            return False
        # lookahead: unmapped neighbors split by adjacency to the mapped region
        term_u = new_u = 0
        for w in neigh1[u]:
            if w in core1:
                continue
            if any(y in core1 for y in neigh1[w]):
                term_u += 1
            else:
                new_u += 1
        term_v = new_v = 0
        for x in neigh2[v]:
            if x in core2:
                continue
            if any(y in core2 for y in neigh2[x]):
                term_v += 1
            else:
                new_v += 1
        return term_u == term_v and new_u == new_v

    def extend(depth: int) -> bool:
        if depth == n:
            return True
        u = order[depth]
        for v in range(n):
            if v in core2:
                continue
            if feasible(u, v):
                core1[u] = v
                core2[v] = u
                if extend(depth + 1):
                    return True
                del core1[u]
                del core2[v]
        return False

    return extend(0)


@dataclass
class SubgraphSample:
    """One drawn sample: the two NN graphs and their spectral comparison."""

    source_words: list[str]
    target_words: list[str]
    source_graph: NNGraph
    target_graph: NNGraph
    similarity: EigenSimilarity


@dataclass
class SampledSubgraphSimilarity:
    mean_delta: float
    samples: list[SubgraphSample]


def translation_pairs_in_vocab(
    gold: BilingualDictionary, src: EmbeddingSpace, tgt: EmbeddingSpace
) -> list[tuple[str, str]]:
    """One in-vocabulary (source, translation) pair per source word.

    Among a word's gold translations the most frequent target wins;
    a target already claimed by a more frequent source falls through to
    the word's next translation so the pair list stays one-to-one.
    """
    by_source = gold.by_source()
    sources = [w for w in gold.sources() if w in src]
    sources.sort(key=lambda w: src.frequency_rank(w))
    pairs: list[tuple[str, str]] = []
    used_targets: set[str] = set()
    for word in sources:
        candidates = [t for t in by_source[word] if t in tgt]
        candidates.sort(key=lambda t: tgt.frequency_rank(t))
        for candidate in candidates:
            if candidate not in used_targets:
                used_targets.add(candidate)
                pairs.append((word, candidate))
                break
    return pairs


def sampled_subgraph_similarity(
    src: EmbeddingSpace,
    tgt: EmbeddingSpace,
    gold: BilingualDictionary,
    num_samples: int = 10,
    sample_size: int = 10,
    seed: int = 0,
    neighbors_per_node: int = 1,
) -> SampledSubgraphSimilarity:
    """Spectral similarity of sampled source NN subgraphs vs their translations.

    Each sample draws ``sample_size`` gold pairs without replacement
    (seeded), builds a NN graph over the source words and another over
    their translations, and compares the two spectra; the mean of the
    per-sample deltas is reported.
    """
    if num_samples < 1 or sample_size < 2:
        raise ValidationError("need num_samples >= 1 and sample_size >= 2")
    eligible = translation_pairs_in_vocab(gold, src, tgt)
    if len(eligible) < sample_size:
        raise ValidationError(
            f"insufficient in-vocabulary gold pairs: {len(eligible)} available, "
            f"{sample_size} needed per sample"
        )
    rng = np.random.default_rng(seed)
    samples: list[SubgraphSample] = []
    for _ in range(num_samples):
        idx = rng.choice(len(eligible), size=sample_size, replace=False)
        chosen = [eligible[int(i)] for i in idx]
        source_words = [s for s, _ in chosen]
        target_words = [t for _, t in chosen]
        g_src = build_nn_graph(src, source_words, neighbors_per_node)
        g_tgt = build_nn_graph(tgt, target_words, neighbors_per_node)
        samples.append(
            SubgraphSample(
                source_words=source_words,
                target_words=target_words,
                source_graph=g_src,
                target_graph=g_tgt,
                similarity=eigensimilarity(g_src, g_tgt),
            )
        )
    mean_delta = float(np.mean([s.similarity.delta for s in samples]))
    return SampledSubgraphSimilarity(mean_delta=mean_delta, samples=samples)
