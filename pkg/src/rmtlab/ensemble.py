"""Block-partitioned symmetric random matrix ensembles.

A matrix of order n is split by a partition of {0,...,n-1} into parts.
Entries whose endpoints share a part are drawn from one bounded scalar law,
cross-part entries from another; the upper triangle (diagonal included) is
drawn independently and mirrored.  Sampling is counter-based, so a given
(spec, replicate) pair always produces the same matrix regardless of
traversal order or thread schedule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class EnsembleError(ValueError):
    """Invalid partition, law, or ensemble description."""


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionSpec:
    """A partition of {0,...,n-1} into consecutive parts of the given sizes."""

    n: int
    sizes: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise EnsembleError("matrix order must be positive")
        if len(self.sizes) < 1:
            raise EnsembleError("partition needs at least one part")
        if any(s < 1 for s in self.sizes):
            raise EnsembleError("empty part in partition")
        if sum(self.sizes) != self.n:
            raise EnsembleError("part sizes must sum to the matrix order")

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(s / self.n for s in self.sizes)

    def part_labels(self) -> np.ndarray:
        """Array of length n mapping each index to its part (0-based)."""
        return np.repeat(np.arange(self.m), self.sizes)

    def part_of(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise EnsembleError(f"index {i} outside 0..{self.n - 1}")
        return int(self.part_labels()[i])


def make_partition(n: int, fractions) -> PartitionSpec:
    """Build a PartitionSpec with sizes as close to n*fraction as possible.

    Leftover units after flooring are assigned to the lowest-indexed parts,
    so the result is deterministic.
    """
    fracs = [float(f) for f in fractions]
    if not fracs:
        raise EnsembleError("no fractions given")
    if any(f <= 0 for f in fracs):
        raise EnsembleError("fractions must be positive")
    if abs(sum(fracs) - 1.0) > 1e-12:
        raise EnsembleError(f"fractions sum to {sum(fracs)}, expected 1")
    base = [int(math.floor(n * f)) for f in fracs]
    remainder = n - sum(base)
    if remainder < 0 or remainder > len(fracs):
        raise EnsembleError("fraction rounding failed")
    sizes = [b + (1 if i < remainder else 0) for i, b in enumerate(base)]
    if any(s < 1 for s in sizes):
        raise EnsembleError("a part would be empty at this order")
    return PartitionSpec(n=n, sizes=tuple(sizes))


def singleton_partition(n: int) -> PartitionSpec:
    """The trivial partition into n singleton parts."""
    return PartitionSpec(n=n, sizes=(1,) * n)


# ---------------------------------------------------------------------------
# bounded entry laws
# ---------------------------------------------------------------------------

_LAW_KINDS = ("constant_zero", "rademacher", "bernoulli", "two_point",
              "uniform_interval")


@dataclass(frozen=True)
class EntryLaw:
    """A bounded scalar distribution with exact raw moments.

    Supported kinds: constant_zero, rademacher, bernoulli(p),
    two_point(a, b, q) taking value a with probability q else b, and
    uniform_interval(lo, hi).  Parameters are kept as exact rationals so the
    raw moments feed the exact walk oracles without rounding.
    """

    kind: str
    params: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.kind not in _LAW_KINDS:
            raise EnsembleError(f"unknown law kind {self.kind!r}")
        if self.kind == "bernoulli":
            (p,) = self.params
            if not 0 <= p <= 1:
                raise EnsembleError("bernoulli p outside [0, 1]")
        elif self.kind == "two_point":
            _, _, q = self.params
            if not 0 <= q <= 1:
                raise EnsembleError("two_point q outside [0, 1]")
        elif self.kind == "uniform_interval":
            lo, hi = self.params
            if not lo < hi:
                raise EnsembleError("uniform_interval needs lo < hi")

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant_zero(cls) -> "EntryLaw":
        return cls("constant_zero")

    @classmethod
    def rademacher(cls) -> "EntryLaw":
        return cls("rademacher")

    @classmethod
    def bernoulli(cls, p) -> "EntryLaw":
        return cls("bernoulli", (Fraction(p),))

    @classmethod
    def two_point(cls, a, b, q) -> "EntryLaw":
        return cls("two_point", (Fraction(a), Fraction(b), Fraction(q)))

    @classmethod
    def uniform_interval(cls, lo, hi) -> "EntryLaw":
        return cls("uniform_interval", (Fraction(lo), Fraction(hi)))

    # -- exact moments ------------------------------------------------------

    def raw_moment(self, k: int) -> Fraction:
        """Exact k-th raw moment E[X^k]."""
        if k < 0:
            raise EnsembleError("moment order must be nonnegative")
        if k == 0:
            return Fraction(1)
        if self.kind == "constant_zero":
            return Fraction(0)
        if self.kind == "rademacher":
            return Fraction(1) if k % 2 == 0 else Fraction(0)
        if self.kind == "bernoulli":
            (p,) = self.params
            return p
        if self.kind == "two_point":
            a, b, q = self.params
            return q * a**k + (1 - q) * b**k
        # uniform_interval: integral of x^k / (hi - lo)
        lo, hi = self.params
        return (hi ** (k + 1) - lo ** (k + 1)) / ((k + 1) * (hi - lo))

    @property
    def mean(self) -> Fraction:
        return self.raw_moment(1)

    @property
    def variance(self) -> Fraction:
        return self.raw_moment(2) - self.mean**2

    @property
    def bound(self) -> Fraction:
        """sup |support|; always finite."""
        if self.kind == "constant_zero":
            return Fraction(0)
        if self.kind in ("rademacher", "bernoulli"):
            return Fraction(1)
        if self.kind == "two_point":
            a, b, _ = self.params
            return max(abs(a), abs(b))
        lo, hi = self.params
        return max(abs(lo), abs(hi))

    # -- sampling -----------------------------------------------------------

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Map uniform [0,1) variates to draws from this law (vectorized)."""
        if self.kind == "constant_zero":
            return np.zeros_like(u)
        if self.kind == "rademacher":
            return np.where(u < 0.5, -1.0, 1.0)
        if self.kind == "bernoulli":
            (p,) = self.params
            return (u < float(p)).astype(float)
        if self.kind == "two_point":
            a, b, q = self.params
            return np.where(u < float(q), float(a), float(b))
        lo, hi = self.params
        return float(lo) + u * float(hi - lo)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        names = {"bernoulli": ("p",),
                 "two_point": ("a", "b", "q"),
                 "uniform_interval": ("lo", "hi")}
        params = {k: float(v)
                  for k, v in zip(names.get(self.kind, ()), self.params)}
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, d: dict) -> "EntryLaw":
        kind = d.get("kind")
        params = d.get("params", {})
        if kind == "constant_zero":
            return cls.constant_zero()
        if kind == "rademacher":
            return cls.rademacher()
        if kind == "bernoulli":
            return cls.bernoulli(params["p"])
        if kind == "two_point":
            return cls.two_point(params["a"], params["b"], params["q"])
        if kind == "uniform_interval":
            return cls.uniform_interval(params["lo"], params["hi"])
        raise EnsembleError(f"unknown law kind {kind!r}")


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnsembleSpec:
    """Full description of the random matrix distribution.

    law_intra applies when both endpoints share a part (diagonal included);
    law_cross applies otherwise.
    """

    partition: PartitionSpec
    law_intra: EntryLaw
    law_cross: EntryLaw
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise EnsembleError("seed must fit in 64 unsigned bits")

    @property
    def n(self) -> int:
        return self.partition.n

    def to_dict(self) -> dict:
        return {
            "n": self.partition.n,
            "fractions": list(self.partition.fractions),
            "law_intra": self.law_intra.to_dict(),
            "law_cross": self.law_cross.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleSpec":
        return cls(
            partition=make_partition(d["n"], d["fractions"]),
            law_intra=EntryLaw.from_dict(d["law_intra"]),
            law_cross=EntryLaw.from_dict(d["law_cross"]),
            seed=int(d["seed"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, s: str) -> "EnsembleSpec":
        return cls.from_dict(json.loads(s))


def counter_uniforms(seed: int, replicate: int, count: int,
                     stream: int = 0) -> np.ndarray:
    """Deterministic uniform [0,1) stream keyed by (seed, replicate, stream).

    Backed by the Philox counter-based generator, so value j of the stream
    is a pure function of the key and j; consumers assign stream positions
    to matrix entries in a fixed order, making sampling independent of
    traversal and safe to parallelize across replicates.
    """
    if replicate < 0:
        raise EnsembleError("replicate must be nonnegative")
    key = np.array([np.uint64(seed), np.uint64(2 * replicate + stream)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random(count)


def sample_matrix(spec: EnsembleSpec, replicate: int = 0) -> np.ndarray:
    """Draw one symmetric matrix; pure function of (spec, replicate)."""
    n = spec.n
    iu = np.triu_indices(n)
    u = counter_uniforms(spec.seed, replicate, iu[0].size)
    labels = spec.partition.part_labels()
    intra = labels[iu[0]] == labels[iu[1]]
    vals = np.empty(u.size)
    vals[intra] = spec.law_intra.from_uniform(u[intra])
    vals[~intra] = spec.law_cross.from_uniform(u[~intra])
    A = np.zeros((n, n))
    A[iu] = vals
    A = A + A.T
    A[np.diag_indices(n)] /= 2.0
    return A


def scale_matrix(A: np.ndarray) -> np.ndarray:
    """Divide every entry by 2*sqrt(n)."""
    n = A.shape[0]
    if A.shape != (n, n) or n < 1:
        raise EnsembleError("square matrix of positive order required")
    return A / (2.0 * math.sqrt(n))


def centralize(spec: EnsembleSpec, A: np.ndarray, size_threshold: int):
    """Centralized companions of A for the mean-removal argument.

    Parts of size > size_threshold count as large.  With s = 1/(2*sqrt(n)),
    mu1/mu2 the law means, H' the same-large-part indicator, H'' covering
    the remaining same-part pairs and J all-ones:

        C'  = s*(A - (mu1-mu2)*H' - mu2*J)
        C'' = C' - s*(mu1-mu2)*H''
        D   = s*(mu1-mu2)*H''

    Returns (C', C'', D).
    """
    if size_threshold < 1:
        raise EnsembleError("size threshold must be at least 1")
    n = spec.n
    labels = spec.partition.part_labels()
    same = (labels[:, None] == labels[None, :]).astype(float)
    large_parts = np.array([s > size_threshold for s in spec.partition.sizes])
    is_large = large_parts[labels]
    H_prime = same * (is_large[:, None] & is_large[None, :])
    H_dprime = same - H_prime
    mu1 = float(spec.law_intra.mean)
    mu2 = float(spec.law_cross.mean)
    s = 1.0 / (2.0 * math.sqrt(n))
    C_prime = s * (A - (mu1 - mu2) * H_prime - mu2 * np.ones((n, n)))
    D = s * (mu1 - mu2) * H_dprime
    return C_prime, C_prime - D, D
