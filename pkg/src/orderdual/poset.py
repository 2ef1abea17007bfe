"""Finite partially ordered sets: the substrate every other module works on.

Elements are dense integer indices 0..n-1.  The order is stored as a full
boolean matrix ``leq`` with ``leq[x, y]`` meaning ``x <= y``.  Sizes stay
small because everything downstream is verified exhaustively, so the dense
representation wins on simplicity and speed.

Subsets of a poset are passed around as ``frozenset`` of element indices;
internally the hot loops use integer bitmasks (``n`` is capped well below
64 for those paths).
"""

from dataclasses import dataclass
import json

import numpy as np

SIZE_CAP = 4096


class PosetError(ValueError):
    """Raised when a relation or construction argument is not usable."""


@dataclass(frozen=True)
class OrderViolation:
    """First broken partial-order axiom, with a witness tuple of elements."""

    axiom: str  # "reflexivity" | "antisymmetry" | "transitivity"
    witness: tuple

    def __str__(self):
        return f"{self.axiom} violated at {self.witness}"


def validate_order(leq):
    """Check the partial-order axioms on a square boolean matrix.

    Returns an OrderViolation for the first broken axiom (reflexivity,
    then antisymmetry, then transitivity), or None if the relation is a
    partial order.
    """
    leq = np.asarray(leq, dtype=bool)
    n = leq.shape[0]
    if leq.shape != (n, n):
        raise PosetError(f"relation must be square, got {leq.shape}")
    for x in range(n):
        if not leq[x, x]:
            return OrderViolation("reflexivity", (x,))
    for x in range(n):
        for y in range(n):
            if x != y and leq[x, y] and leq[y, x]:
                return OrderViolation("antisymmetry", (x, y))
    # transitivity via boolean matrix square: leq @ leq must stay inside leq
    closure = np.matmul(leq, leq)
    bad = closure & ~leq
    if bad.any():
        x, z = map(int, np.argwhere(bad)[0])
        y = int(np.nonzero(leq[x] & leq[:, z])[0][0])
        return OrderViolation("transitivity", (x, y, z))
    return None


class Poset:
    """Immutable finite poset.  Hashes by identity; use `equal` to compare."""

    __slots__ = ("leq", "labels", "_up_masks", "_down_masks")

    def __init__(self, leq, labels=None, validate=True):
        leq = np.array(leq, dtype=bool)
        if validate:
            violation = validate_order(leq)
            if violation is not None:
                raise PosetError(str(violation))
        leq.setflags(write=False)
        object.__setattr__(self, "leq", leq)
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != leq.shape[0]:
                raise PosetError("labels length must equal element count")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_up_masks", None)
        object.__setattr__(self, "_down_masks", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poset is immutable")

    @property
    def n(self):
        return self.leq.shape[0]

    def label(self, x):
        return self.labels[x] if self.labels is not None else str(x)

    def __repr__(self):
        return f"Poset(n={self.n})"

    # -- bitmask views (lazy, n <= 64 only where used) ------------------

    @property
    def up_masks(self):
        """up_masks[x] = bitmask of {y : x <= y}."""
        if self._up_masks is None:
            masks = tuple(
                sum(1 << y for y in range(self.n) if self.leq[x, y])
                for x in range(self.n)
            )
            object.__setattr__(self, "_up_masks", masks)
        return self._up_masks

    @property
    def down_masks(self):
        """down_masks[x] = bitmask of {y : y <= x}."""
        if self._down_masks is None:
            masks = tuple(
                sum(1 << y for y in range(self.n) if self.leq[y, x])
                for x in range(self.n)
            )
            object.__setattr__(self, "_down_masks", masks)
        return self._down_masks


def equal(p, q):
    """Structural equality of two posets (order matrix and labels)."""
    return (
        p.n == q.n
        and bool(np.array_equal(p.leq, q.leq))
        and p.labels == q.labels
    )


def _as_set(p, a):
    a = frozenset(a)
    for x in a:
        if not 0 <= x < p.n:
            raise PosetError(f"element {x} outside 0..{p.n - 1}")
    return a


def up_set(p, a):
    """A^up = {x : x >= y for some y in A}; a superset of A, increasing."""
    a = _as_set(p, a)
    return frozenset(
        x for x in range(p.n) if any(p.leq[y, x] for y in a)
    )


def down_set(p, a):
    """A^down = {x : x <= y for some y in A}; a superset of A, decreasing."""
    a = _as_set(p, a)
    return frozenset(
        x for x in range(p.n) if any(p.leq[x, y] for y in a)
    )


def maximal_elements(p, a):
    """Elements of A with no strictly larger element inside A."""
    a = _as_set(p, a)
    return frozenset(
        x for x in a if not any(y != x and p.leq[x, y] for y in a)
    )


def minimal_elements(p, a):
    a = _as_set(p, a)
    return frozenset(
        x for x in a if not any(y != x and p.leq[y, x] for y in a)
    )


@dataclass(frozen=True)
class SubsetClass:
    increasing: bool
    decreasing: bool
    filter: bool
    ideal: bool
    principal_filter: bool
    principal_ideal: bool


def classify_subset(p, a):
    """Classify A by the six standard order-theoretic predicates.

    Filters/ideals are nonempty by definition; on a finite poset an ideal
    is automatically principal (and likewise for filters), which shows up
    in the flags agreeing.
    """
    a = _as_set(p, a)
    increasing = up_set(p, a) <= a
    decreasing = down_set(p, a) <= a
    filt = bool(a) and increasing and all(
        any(p.leq[z, x] and p.leq[z, y] for z in a) for x in a for y in a
    )
    ideal = bool(a) and decreasing and all(
        any(p.leq[x, z] and p.leq[y, z] for z in a) for x in a for y in a
    )
    principal_filter = any(a == up_set(p, {z}) for z in range(p.n))
    principal_ideal = any(a == down_set(p, {z}) for z in range(p.n))
    return SubsetClass(
        increasing, decreasing, filt, ideal, principal_filter, principal_ideal
    )


def decreasing_sets(p, limit=None):
    """All decreasing subsets of p, sorted by (cardinality, element tuple).

    Enumeration is output-sensitive (BFS adding one principal ideal at a
    time), so posets whose decreasing sets are few stay cheap even when
    2^n is not.  `limit` aborts with PosetError once exceeded.
    """
    down = p.down_masks
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for mask in frontier:
            for x in range(p.n):
                if mask >> x & 1:
                    continue
                grown = mask | down[x]
                if grown not in seen:
                    seen.add(grown)
                    nxt.append(grown)
                    if limit is not None and len(seen) > limit:
                        raise PosetError(
                            f"more than {limit} decreasing sets"
                        )
        frontier = nxt
    sets = [
        frozenset(x for x in range(p.n) if mask >> x & 1) for mask in seen
    ]
    sets.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return sets


def increasing_sets(p, limit=None):
    """All increasing subsets, via the decreasing sets of the dual order."""
    rev = dual_view(p).as_poset()
    return decreasing_sets(rev, limit=limit)


class DualPosetView:
    """The dual space S' of a poset: same indices, order reversed through
    a pairing bijection x -> x' (``prime``).

    ``x <= y`` in the base holds iff ``x' >= y'`` in the view.  The view
    of the view (with the inverse bijection) recovers the base.
    """

    __slots__ = ("base", "prime", "prime_inv")

    def __init__(self, base, prime=None):
        n = base.n
        if prime is None:
            prime = np.arange(n)
        prime = np.asarray(prime, dtype=np.intp)
        if sorted(prime.tolist()) != list(range(n)):
            raise PosetError("prime must be a bijection on 0..n-1")
        prime.setflags(write=False)
        inv = np.empty(n, dtype=np.intp)
        inv[prime] = np.arange(n)
        inv.setflags(write=False)
        self.base = base
        self.prime = prime
        self.prime_inv = inv

    @property
    def n(self):
        return self.base.n

    def to_prime(self, x):
        """x -> x' (base element to its dual-space partner)."""
        return int(self.prime[x])

    def from_prime(self, y):
        """y -> y' (dual-space element back to the base; x'' = x)."""
        return int(self.prime_inv[y])

    def leq(self, a, b):
        """Order on the view: a <= b in S' iff b' <= a' in the base."""
        return bool(self.base.leq[self.prime_inv[b], self.prime_inv[a]])

    def as_poset(self):
        """Materialize the view as a plain Poset (labels carried over)."""
        inv = self.prime_inv
        leq = self.base.leq[np.ix_(inv, inv)].T
        labels = None
        if self.base.labels is not None:
            labels = tuple(self.base.labels[inv[y]] for y in range(self.n))
        return Poset(leq, labels=labels, validate=False)


def dual_view(p, prime=None):
    return DualPosetView(p, prime)


# -- constructors ------------------------------------------------------


def chain(n, labels=None):
    """Total order 0 < 1 < ... < n-1."""
    if n < 1:
        raise PosetError("chain needs at least one element")
    leq = np.triu(np.ones((n, n), dtype=bool))
    return Poset(leq, labels=labels, validate=False)


def antichain(n, labels=None):
    """n pairwise incomparable elements."""
    return Poset(np.eye(n, dtype=bool), labels=labels, validate=False)


def from_covers(n, covers, labels=None):
    """Build a poset from its cover (Hasse) pairs; transitively closed here."""
    leq = np.eye(n, dtype=bool)
    for lo, hi in covers:
        if not (0 <= lo < n and 0 <= hi < n):
            raise PosetError(f"cover ({lo},{hi}) out of range")
        leq[lo, hi] = True
    # Warshall closure
    for k in range(n):
        leq |= np.outer(leq[:, k], leq[k, :])
    return Poset(leq, labels=labels)


def covers(p):
    """Hasse cover pairs (lo, hi): lo < hi with nothing strictly between."""
    lt = p.leq & ~np.eye(p.n, dtype=bool)
    between = np.matmul(lt, lt)
    out = lt & ~between
    return sorted((int(a), int(b)) for a, b in np.argwhere(out))


def product_poset(factors, cap=SIZE_CAP):
    """Coordinatewise order on the product of the factors.

    Indexing is mixed-radix little-endian: factor 0 varies fastest, so
    index = sum_k digit_k * prod_{j<k} n_j.  Fixed for reproducible traces.
    """
    sizes = [f.n for f in factors]
    total = 1
    for s in sizes:
        total *= s
    if total > cap:
        raise PosetError(f"product has {total} elements, cap is {cap}")
    if not factors:
        return Poset(np.ones((1, 1), dtype=bool), validate=False)
    digit_tables = []
    stride = 1
    for f in factors:
        idx = (np.arange(total) // stride) % f.n
        digit_tables.append(idx)
        stride *= f.n
    leq = np.ones((total, total), dtype=bool)
    for f, digits in zip(factors, digit_tables):
        leq &= f.leq[np.ix_(digits, digits)]
    labels = None
    if all(f.labels is not None for f in factors):
        labels = tuple(
            ",".join(f.labels[digits[i]] for f, digits in zip(factors, digit_tables))
            for i in range(total)
        )
    return Poset(leq, labels=labels, validate=False)


def product_index(digits, sizes):
    """Mixed-radix little-endian encode (site 0 varies fastest)."""
    idx = 0
    stride = 1
    for d, s in zip(digits, sizes):
        if not 0 <= d < s:
            raise PosetError(f"digit {d} out of range for size {s}")
        idx += d * stride
        stride *= s
    return idx


def product_digits(idx, sizes):
    """Inverse of `product_index`."""
    out = []
    for s in sizes:
        out.append(idx % s)
        idx //= s
    return tuple(out)


def random_poset(rng, n, density=0.4):
    """Random poset for property tests: upper-triangular coin flips,
    then transitive closure.  Coverage matters here, uniformity does not."""
    leq = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                leq[i, j] = True
    for k in range(n):
        leq |= np.outer(leq[:, k], leq[k, :])
    return Poset(leq, validate=False)


# -- JSON round trip ---------------------------------------------------


def to_json(p):
    """Emit the Hasse form: {"n", "cover", "labels"}."""
    doc = {"n": p.n, "cover": [list(c) for c in covers(p)]}
    if p.labels is not None:
        doc["labels"] = list(p.labels)
    return doc


def from_json(doc):
    if isinstance(doc, str):
        doc = json.loads(doc)
    return from_covers(
        int(doc["n"]),
        [tuple(c) for c in doc.get("cover", [])],
        labels=doc.get("labels"),
    )
