"""Join/meet structure, distributivity, Birkhoff representation, and the
set-embedding + additive-map-extension machinery for nondistributive
lattices.

Distributivity and friends are decided by brute force over all triples;
element counts are capped upstream and exactness is the whole point.
"""

from dataclasses import dataclass
from functools import lru_cache
import json

import numpy as np

from . import poset as ps


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeInfo:
    """Join/meet tables for a poset; -1 marks an undefined pair."""

    poset: ps.Poset
    join: np.ndarray
    meet: np.ndarray
    bottom: int  # -1 if absent
    top: int
    is_join_semilattice: bool
    is_meet_semilattice: bool
    is_lattice: bool
    is_distributive: bool
    distributivity_witness: tuple | None  # (x, y, z) violating triple


def _bound_tables(p):
    """join/meet tables; entry -1 where no least upper / greatest lower
    bound exists."""
    n = p.n
    join = np.full((n, n), -1, dtype=np.int64)
    meet = np.full((n, n), -1, dtype=np.int64)
    for x in range(n):
        for y in range(x, n):
            uppers = [z for z in range(n) if p.leq[x, z] and p.leq[y, z]]
            least = [z for z in uppers if all(p.leq[z, w] for w in uppers)]
            if len(least) == 1:
                join[x, y] = join[y, x] = least[0]
            lowers = [z for z in range(n) if p.leq[z, x] and p.leq[z, y]]
            greatest = [z for z in lowers if all(p.leq[w, z] for w in lowers)]
            if len(greatest) == 1:
                meet[x, y] = meet[y, x] = greatest[0]
    return join, meet


@lru_cache(maxsize=None)
def analyze_lattice(p):
    """Exact lattice analysis of a poset (cached per poset object)."""
    n = p.n
    join, meet = _bound_tables(p)
    is_join = bool((join >= 0).all())
    is_meet = bool((meet >= 0).all())
    is_lattice = is_join and is_meet
    bottom = next((x for x in range(n) if p.leq[x].all()), -1)
    top = next((x for x in range(n) if p.leq[:, x].all()), -1)
    distributive = False
    witness = None
    if is_lattice:
        distributive = True
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    lhs = meet[x, join[y, z]]
                    rhs = join[meet[x, y], meet[x, z]]
                    if lhs != rhs:
                        distributive = False
                        witness = (x, y, z)
                        break
                if witness:
                    break
            if witness:
                break
    join.setflags(write=False)
    meet.setflags(write=False)
    return LatticeInfo(
        poset=p,
        join=join,
        meet=meet,
        bottom=bottom,
        top=top,
        is_join_semilattice=is_join,
        is_meet_semilattice=is_meet,
        is_lattice=is_lattice,
        is_distributive=distributive,
        distributivity_witness=witness,
    )


def join_irreducibles(info):
    """Nonbottom elements x with x = a v b only when x is a or b."""
    if not info.is_lattice:
        raise LatticeError("join_irreducibles needs a lattice")
    n = info.poset.n
    out = set()
    for x in range(n):
        if x == info.bottom:
            continue
        reducible = any(
            info.join[a, b] == x and a != x and b != x
            for a in range(n)
            for b in range(n)
        )
        if not reducible:
            out.add(x)
    return frozenset(out)


@dataclass(frozen=True)
class NotDistributive:
    """Tagged failure result carrying a violating triple (x, y, z)."""

    witness: tuple

    def __bool__(self):
        return False


@dataclass(frozen=True)
class BirkhoffResult:
    """Representation of a distributive lattice as the decreasing sets of
    its join-irreducibles.

    `iso[x]` is the decreasing subset of `ground` (indices into
    `irreducibles`) that element x maps to; join goes to union, meet to
    intersection, and the map is a bijection onto all decreasing sets.
    """

    ground: ps.Poset
    irreducibles: tuple
    iso: tuple  # per element, frozenset of ground indices


def birkhoff_represent(info):
    """Distributive lattice -> (ground poset of irreducibles, verified iso);
    otherwise the NotDistributive tag with a witness triple."""
    if not info.is_lattice:
        raise LatticeError("birkhoff_represent needs a lattice")
    if not info.is_distributive:
        return NotDistributive(info.distributivity_witness)
    p = info.poset
    irr = sorted(join_irreducibles(info))
    k = len(irr)
    ground = ps.Poset(
        p.leq[np.ix_(irr, irr)],
        labels=tuple(p.label(j) for j in irr),
        validate=False,
    )
    pos = {j: i for i, j in enumerate(irr)}
    iso = tuple(
        frozenset(pos[j] for j in irr if p.leq[j, x]) for x in range(p.n)
    )
    # verify: bijective onto P_dec(ground), join -> union, meet -> intersection
    targets = set(ps.decreasing_sets(ground))
    if len(set(iso)) != p.n or set(iso) != targets:
        raise LatticeError("irreducible image is not all decreasing sets")
    for x in range(p.n):
        for y in range(p.n):
            if iso[info.join[x, y]] != iso[x] | iso[y]:
                raise LatticeError(f"join not preserved at ({x},{y})")
            if iso[info.meet[x, y]] != iso[x] & iso[y]:
                raise LatticeError(f"meet not preserved at ({x},{y})")
    return BirkhoffResult(ground=ground, irreducibles=tuple(irr), iso=iso)


# -- families of sets ---------------------------------------------------


class SetFamily:
    """A deduplicated, indexed list of subsets of a ground poset.

    `union_closed` means: contains the empty set and the union of any two
    members.  `decreasing_family` means every member is decreasing in th
    ground order.  Both are computed, not asserted.
    """

    __slots__ = ("ground", "sets", "index", "union_closed", "decreasing_family")

    def __init__(self, ground, sets):
        self.ground = ground
        uniq = []
        seen = set()
        for s in sets:
            s = frozenset(s)
            for x in s:
                if not 0 <= x < ground.n:
                    raise LatticeError(f"set member {x} outside ground")
            if s not in seen:
                seen.add(s)
                uniq.append(s)
        self.sets = tuple(uniq)
        self.index = {s: i for i, s in enumerate(self.sets)}
        self.union_closed = frozenset() in seen and all(
            (a | b) in seen for a in self.sets for b in self.sets
        )
        self.decreasing_family = all(
            ps.down_set(ground, s) <= s for s in self.sets
        )

    def __len__(self):
        return len(self.sets)

    def as_poset(self):
        """Inclusion order on the family."""
        n = len(self.sets)
        leq = np.zeros((n, n), dtype=bool)
        for i, a in enumerate(self.sets):
            for j, b in enumerate(self.sets):
                leq[i, j] = a <= b
        labels = tuple(
            "{" + ",".join(self.ground.label(x) for x in sorted(s)) + "}"
            for s in self.sets
        )
        return ps.Poset(leq, labels=labels, validate=False)

    def to_json(self):
        return {
            "ground_n": self.ground.n,
            "ground_cover": [list(c) for c in ps.covers(self.ground)],
            "sets": [sorted(s) for s in self.sets],
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        ground = ps.from_covers(
            int(doc["ground_n"]), [tuple(c) for c in doc.get("ground_cover", [])]
        )
        return cls(ground, [frozenset(s) for s in doc["sets"]])


def all_decreasing_family(ground, cap=ps.SIZE_CAP):
    """The full P_dec(ground) as a SetFamily, canonically ordered."""
    return SetFamily(ground, ps.decreasing_sets(ground, limit=cap))


def embed_join_semilattice(info):
    """Embed a lattice into sets via x -> complement of its up-set.

    The image family is union-closed, contains the empty set, and the map
    is a verified (bottom, join)-isomorphism onto it.  For nondistributive
    inputs the family is not intersection-closed -- that is Birkhoff's
    theorem working in reverse, and the reason the dual cannot ride along.
    """
    if not info.is_lattice:
        raise LatticeError("embedding needs a lattice (bounded below)")
    p = info.poset
    members = [
        frozenset(range(p.n)) - ps.up_set(p, {x}) for x in range(p.n)
    ]
    fam = SetFamily(p, members)
    if len(fam) != p.n:
        raise LatticeError("embedding is not injective")
    if members[info.bottom]:
        raise LatticeError("bottom does not map to the empty set")
    for x in range(p.n):
        for y in range(p.n):
            if members[info.join[x, y]] != members[x] | members[y]:
                raise LatticeError(f"join not preserved at ({x},{y})")
    # member order stays aligned with lattice elements
    return fam


def extend_additive_map(family, img):
    """Extend an additive self-map of a union-closed decreasing family to
    an additive self-map of all decreasing sets of the ground poset.

    Missing sets are adjoined one at a time, smallest first (ties by the
    canonical enumeration order); each step fills in values as
        extended(x | y) = m(y) | intersection of m(z) over supersets z of x
    which keeps the map additive and leaves the original family fixed.

    Returns (full_family, full_img) where full_family is the canonical
    P_dec(ground) enumeration and full_img[i] indexes into it.
    """
    if not (family.union_closed and family.decreasing_family):
        raise LatticeError("family must be union-closed and decreasing")
    img = tuple(int(i) for i in img)
    if len(img) != len(family):
        raise LatticeError("img length must match family size")
    sets = family.sets
    current = {s: sets[img[i]] for i, s in enumerate(sets)}
    if current[frozenset()] != frozenset():
        raise LatticeError("map is not additive on the family: m(0) != 0")
    for a in sets:
        for b in sets:
            if current[a | b] != current[a] | current[b]:
                raise LatticeError(
                    f"map is not additive on the family at {sorted(a)}, {sorted(b)}"
                )

    full = all_decreasing_family(family.ground)
    ground_all = frozenset(range(family.ground.n))
    known = set(current)
    while True:
        missing = [s for s in full.sets if s not in known]
        if not missing:
            break
        x = missing[0]  # full.sets is sorted by (cardinality, tuple)
        olds = list(known)
        # intersection over the supersets of x in the family; empty
        # intersections resolve to the whole ground set, the one choice
        # that keeps the three equivalent forms of the step formula equal
        # (and the step well-defined) when no superset exists
        cap = frozenset(ground_all)
        for z in olds:
            if x <= z:
                cap &= current[z]
        for y in olds:
            merged = x | y
            if merged not in known:
                current[merged] = current[y] | cap
                known.add(merged)
    full_img = tuple(full.index[current[s]] for s in full.sets)
    return full, full_img


# -- canonical fixtures --------------------------------------------------


def m3():
    """Diamond M3: bottom, three incomparable middles, top.  The smallest
    modular nondistributive lattice."""
    return ps.from_covers(
        5,
        [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
        labels=("0", "a", "b", "c", "1"),
    )


def n5():
    """Pentagon N5: 0 < a < b < 1 with c incomparable to a and b.  The
    smallest nondistributive lattice."""
    return ps.from_covers(
        5,
        [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)],
        labels=("0", "a", "b", "c", "1"),
    )
