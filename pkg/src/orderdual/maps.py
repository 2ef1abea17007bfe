"""Total maps between posets: composition, preimages, and the exact
monotone/additive classification with witnesses.

Witnesses are always the lexicographically first violating pair so error
messages are deterministic.
"""

from dataclasses import dataclass
import json

from . import poset as ps
from .lattice import analyze_lattice

# Preimage cross-checks enumerate all decreasing sets (or ideals) of the
# codomain.  The enumeration is output-sensitive but can still explode on
# wide posets, so it only runs below this element count and is skipped --
# and reported as skipped -- above it.
CROSS_CHECK_CAP = 20
_CROSS_CHECK_SET_BUDGET = 1 << 16


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class PosetMap:
    """A total function between posets, stored as an image array."""

    domain: ps.Poset
    codomain: ps.Poset
    img: tuple
    name: str = ""

    def __post_init__(self):
        img = tuple(int(v) for v in self.img)
        object.__setattr__(self, "img", img)
        if len(img) != self.domain.n:
            raise MapError(
                f"img has {len(img)} entries for a domain of {self.domain.n}"
            )
        for v in img:
            if not 0 <= v < self.codomain.n:
                raise MapError(f"image value {v} outside codomain")

    def __call__(self, x):
        return self.img[x]

    def __repr__(self):
        tag = self.name or "map"
        return f"{tag}{list(self.img)}"


def identity_map(p, name="id"):
    return PosetMap(p, p, tuple(range(p.n)), name=name)


def constant_map(p, c, name=""):
    return PosetMap(p, p, (c,) * p.n, name=name or f"const{c}")


def compose(m2, m1, name=""):
    """(m2 . m1)(x) = m2(m1(x)); codomain of m1 must be m2's domain."""
    if m1.codomain is not m2.domain and not ps.equal(m1.codomain, m2.domain):
        raise MapError("composition mismatch: codomain(m1) != domain(m2)")
    return PosetMap(
        m1.domain,
        m2.codomain,
        tuple(m2.img[v] for v in m1.img),
        name=name or f"{m2.name or 'm2'}.{m1.name or 'm1'}",
    )


def inverse_image(m, a):
    """m^{-1}(A) = {x : m(x) in A} for A a subset of the codomain."""
    a = frozenset(a)
    for y in a:
        if not 0 <= y < m.codomain.n:
            raise MapError(f"set member {y} outside codomain")
    return frozenset(x for x in range(m.domain.n) if m.img[x] in a)


@dataclass(frozen=True)
class ClassifyReport:
    ok: bool
    witness: tuple | None
    cross_checked: bool = False

    def __bool__(self):
        return self.ok


def is_monotone(m, cross_check=True):
    """x <= y implies m(x) <= m(y), checked over all pairs.

    When the codomain is small enough the verdict is re-derived from the
    preimage characterization (preimages of decreasing sets must be
    decreasing); `cross_checked` records whether that second route ran.
    """
    dom, cod = m.domain, m.codomain
    witness = None
    for x in range(dom.n):
        for y in range(dom.n):
            if dom.leq[x, y] and not cod.leq[m.img[x], m.img[y]]:
                witness = (x, y)
                break
        if witness:
            break
    ok = witness is None
    checked = False
    if cross_check and cod.n <= CROSS_CHECK_CAP:
        try:
            dec = ps.decreasing_sets(cod, limit=_CROSS_CHECK_SET_BUDGET)
        except ps.PosetError:
            dec = None
        if dec is not None:
            checked = True
            via_preimages = all(
                ps.down_set(dom, inverse_image(m, a)) <= inverse_image(m, a)
                for a in dec
            )
            if via_preimages != ok:
                raise MapError(
                    "monotonicity check disagrees with preimage route"
                )
    return ClassifyReport(ok, witness, checked)


def is_additive(m, cross_check=True):
    """m(bottom) = bottom and m(x v y) = m(x) v m(y), all pairs.

    Requires join-semilattice domain and codomain bounded below.  The
    preimage route (preimages of ideals are ideals) cross-checks the
    verdict on small codomains.
    """
    dom_info = analyze_lattice(m.domain)
    cod_info = analyze_lattice(m.codomain)
    if not (dom_info.is_join_semilattice and dom_info.bottom >= 0):
        raise MapError("domain is not a join-semilattice bounded below")
    if not (cod_info.is_join_semilattice and cod_info.bottom >= 0):
        raise MapError("codomain is not a join-semilattice bounded below")
    witness = None
    if m.img[dom_info.bottom] != cod_info.bottom:
        witness = ("zero", dom_info.bottom)
    else:
        for x in range(m.domain.n):
            for y in range(m.domain.n):
                lhs = m.img[dom_info.join[x, y]]
                rhs = cod_info.join[m.img[x], m.img[y]]
                if lhs != rhs:
                    witness = ("join", x, y)
                    break
            if witness:
                break
    ok = witness is None
    checked = False
    if cross_check and m.codomain.n <= CROSS_CHECK_CAP:
        try:
            dec = ps.decreasing_sets(m.codomain, limit=_CROSS_CHECK_SET_BUDGET)
        except ps.PosetError:
            dec = None
        if dec is not None:
            checked = True
            ideals = [a for a in dec if ps.classify_subset(m.codomain, a).ideal]
            via_preimages = all(
                ps.classify_subset(m.domain, inverse_image(m, a)).ideal
                for a in ideals
            )
            if via_preimages != ok:
                raise MapError("additivity check disagrees with preimage route")
    return ClassifyReport(ok, witness, checked)


# -- JSON ---------------------------------------------------------------


def to_json(m):
    doc = {"domain": ps.to_json(m.domain), "img": list(m.img), "name": m.name}
    if m.codomain is not m.domain:
        doc["codomain"] = ps.to_json(m.codomain)
    return doc


def from_json(doc, domain=None, codomain=None):
    if isinstance(doc, str):
        doc = json.loads(doc)
    dom = domain if domain is not None else ps.from_json(doc["domain"])
    cod = codomain
    if cod is None:
        cod = ps.from_json(doc["codomain"]) if "codomain" in doc else dom
    return PosetMap(dom, cod, tuple(doc["img"]), name=doc.get("name", ""))


# -- samplers for property tests ----------------------------------------


def random_map(rng, p):
    return PosetMap(p, p, tuple(rng.randrange(p.n) for _ in range(p.n)))


def random_monotone_map(rng, p, tries=10000):
    """Rejection-sample a monotone self-map; fine for the small posets the
    property tests use."""
    for _ in range(tries):
        m = random_map(rng, p)
        if is_monotone(m, cross_check=False):
            return m
    raise MapError("no monotone map found (poset too adversarial?)")


def random_additive_map(rng, p, tries=20000):
    """On a distributive lattice, additive maps are free assignments on the
    join-irreducibles (closed up by joins); elsewhere fall back to
    rejection, which is fine at the sizes nondistributive fixtures have."""
    from .lattice import join_irreducibles

    info = analyze_lattice(p)
    if not info.is_lattice:
        raise MapError("additive sampling needs a lattice")
    if info.is_distributive:
        irr = sorted(join_irreducibles(info))
        values = {j: rng.randrange(p.n) for j in irr}
        img = []
        for x in range(p.n):
            acc = info.bottom
            for j in irr:
                if p.leq[j, x]:
                    acc = int(info.join[acc, values[j]])
            img.append(acc)
        return PosetMap(p, p, tuple(img))
    for _ in range(tries):
        m = random_map(rng, p)
        if m.img[info.bottom] != info.bottom:
            continue
        if is_additive(m, cross_check=False):
            return m
    raise MapError("no additive map found")
