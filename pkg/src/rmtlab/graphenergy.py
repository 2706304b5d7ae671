"""Random graphs on complete multipartite hosts and their energy.

Graph energy is the sum of the absolute eigenvalues of the adjacency
matrix.  For cross-part Bernoulli(p) edges the semicircle limits predict
E = n^(3/2) (8/(3 pi)) sqrt(c p (1-p)) with c depending on the part
structure; for hosts with a few large parts only a sandwich bound is
available, certified here through the Ky Fan singular-value inequality.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleError, PartitionSpec, counter_uniforms
from .spectral import eigenvalues_sym, singular_values

# stream tags for counter_uniforms so graph edges and decomposition fills
# never reuse the same uniforms
_EDGE_STREAM = 0
_FILL_STREAM = 1


@dataclass(frozen=True)
class GraphSample:
    """A 0/1 symmetric adjacency with zero diagonal on a multipartite host."""

    adjacency: np.ndarray
    partition: PartitionSpec
    p: float

    @property
    def n(self) -> int:
        return self.partition.n


def sample_graph(partition: PartitionSpec, p: float, seed: int,
                 replicate: int = 0) -> GraphSample:
    """Cross-part pairs appear independently with probability p.

    Intra-part pairs and the diagonal are always absent (the host is the
    complete multipartite graph); with singleton parts this is the ordinary
    binomial random graph.  Deterministic per (seed, replicate).
    """
    if not 0.0 <= p <= 1.0:
        raise EnsembleError("edge probability outside [0, 1]")
    n = partition.n
    iu = np.triu_indices(n, k=1)
    u = counter_uniforms(seed, replicate, iu[0].size, stream=_EDGE_STREAM)
    labels = partition.part_labels()
    cross = labels[iu[0]] != labels[iu[1]]
    vals = ((u < p) & cross).astype(float)
    A = np.zeros((n, n))
    A[iu] = vals
    A = A + A.T
    return GraphSample(adjacency=A, partition=partition, p=p)


def graph_energy(G) -> float:
    """Sum of absolute adjacency eigenvalues."""
    A = G.adjacency if isinstance(G, GraphSample) else np.asarray(G, float)
    return float(np.sum(np.abs(eigenvalues_sym(A))))


def singular_value_sum(M: np.ndarray) -> float:
    """Energy of an arbitrary square matrix: sum of singular values."""
    return float(np.sum(singular_values(M)))


def predicted_energy_gnp(n: int, p: float) -> float:
    """Leading term n^(3/2) (8/(3 pi)) sqrt(p(1-p)) for the binomial graph."""
    if not 0.0 < p < 1.0:
        raise EnsembleError("prediction requires 0 < p < 1")
    return n**1.5 * (8.0 / (3.0 * math.pi)) * math.sqrt(p * (1.0 - p))


def predicted_energy_multipartite(n: int, m: int, p: float) -> float:
    """Leading term n^(3/2) (8/(3 pi)) sqrt((m-1)/m * p(1-p)) for balanced hosts."""
    if m < 2:
        raise EnsembleError("at least two parts required")
    if not 0.0 < p < 1.0:
        raise EnsembleError("prediction requires 0 < p < 1")
    return n**1.5 * (8.0 / (3.0 * math.pi)) \
        * math.sqrt((m - 1) / m * p * (1.0 - p))


def energy_bounds_unbalanced(n: int, fractions, large_part_indices,
                             p: float) -> dict:
    """Sandwich bounds (1 -+ sum nu_i^(3/2)) * leading term, sum over large parts."""
    fracs = [float(f) for f in fractions]
    if not large_part_indices:
        raise EnsembleError("at least one large part required")
    if any(not 0 <= i < len(fracs) for i in large_part_indices):
        raise EnsembleError("large part index out of range")
    s = sum(fracs[i] ** 1.5 for i in large_part_indices)
    lead = n**1.5 * (8.0 / (3.0 * math.pi)) * math.sqrt(p * (1.0 - p))
    return {"lower": (1.0 - s) * lead, "upper": (1.0 + s) * lead}


def kyfan_check(X: np.ndarray, Y: np.ndarray) -> dict:
    """Subadditivity of singular value sums: E(X) + E(Y) >= E(X + Y)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape or X.shape[0] != X.shape[1]:
        raise ValueError("two square matrices of equal order required")
    lhs = singular_value_sum(X) + singular_value_sum(Y)
    rhs = singular_value_sum(X + Y)
    scale = max(lhs, rhs, 1.0)
    return {"lhs": lhs, "rhs": rhs, "holds": lhs >= rhs - 1e-9 * scale}


def energy_decomposition_check(partition: PartitionSpec, large_part_indices,
                               p: float, seed: int,
                               replicate: int = 0) -> dict:
    """Fill the large diagonal blocks and certify the energy sandwich.

    A is a multipartite sample; X keeps A's cross entries but fills
    strict-upper intra pairs of large parts with independent Bernoulli(p)
    (diagonal stays 0); D = X - A is block-diagonal on the large parts.
    Ky Fan gives E(X) - E(D) <= E(A) <= E(X) + E(D).
    """
    large = set(large_part_indices)
    if any(not 0 <= i < partition.m for i in large):
        raise EnsembleError("large part index out of range")
    G = sample_graph(partition, p, seed, replicate)
    A = G.adjacency
    n = partition.n
    labels = partition.part_labels()
    iu = np.triu_indices(n, k=1)
    in_large = np.isin(labels, sorted(large))
    fill = (labels[iu[0]] == labels[iu[1]]) & in_large[iu[0]]
    u = counter_uniforms(seed, replicate, iu[0].size, stream=_FILL_STREAM)
    X = A.copy()
    upper = X[iu]
    upper[fill] = (u[fill] < p).astype(float)
    X[iu] = upper
    X[(iu[1], iu[0])] = upper
    D = X - A
    same_large = (labels[:, None] == labels[None, :]) \
        & in_large[:, None] & in_large[None, :]
    block_diagonal = bool(np.all(D[~same_large] == 0.0))
    eA = singular_value_sum(A)
    eX = singular_value_sum(X)
    eD = singular_value_sum(D)
    slack = 1e-9 * max(eA, eX + eD, 1.0)
    return {
        "energy_A": eA,
        "energy_X": eX,
        "energy_D": eD,
        "block_diagonal": block_diagonal,
        "kyfan_upper": kyfan_check(A, D),
        "kyfan_lower": kyfan_check(X, -D),
        "holds": block_diagonal and (eX - eD - slack <= eA <= eX + eD + slack),
    }


def edge_list_to_csv(G: GraphSample, path) -> None:
    """Write the edge list as 1-based `u,v` rows."""
    rows = np.argwhere(np.triu(G.adjacency, k=1) > 0)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v"])
        for a, b in rows:
            w.writerow([int(a) + 1, int(b) + 1])
