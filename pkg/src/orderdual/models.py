"""Built-in model constructors: voter, two-stage contact (Krone),
cooperative branching, totally-ordered-chain (Siegmund) systems, and
attractive spin systems, plus the constructive decompositions that turn
rate tables into monotone map representations.

State spaces are products of chains indexed little-endian: site 0 is the
fastest digit, so a {0,1}^n configuration is the usual bitmask with bit i
for site i.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import json

import numpy as np

from . import poset as ps
from .duality import DualityPairing
from .maps import PosetMap
from .markov import RandomMappingRep
from .percolation import MSet


class ModelError(ValueError):
    pass


@dataclass
class Model:
    """A built model: mapping representation, its canonical pairing, and
    the JSON-roundtrippable parameters that produced it."""

    name: str
    rep: RandomMappingRep
    pairing: DualityPairing
    additive: bool
    monotone: bool
    params: dict = field(default_factory=dict)

    def to_json(self):
        return dict(self.params)


def cube(n_sites):
    """{0,1}^n with the product order; states are bitmasks with bit i
    for site i."""
    return _cube_with_labels(n_sites)


def _cube_with_labels(n_sites):
    p = ps.product_poset([ps.chain(2)] * n_sites)
    labels = tuple(
        "".join(str(x >> i & 1) for i in range(n_sites)) for x in range(p.n)
    )
    return ps.Poset(p.leq, labels=labels, validate=False)


def _chain_power(local, n_sites):
    p = ps.product_poset([ps.chain(local)] * n_sites)
    labels = tuple(
        "".join(str(d) for d in ps.product_digits(x, [local] * n_sites))
        for x in range(p.n)
    )
    return ps.Poset(p.leq, labels=labels, validate=False)


def complement_pairing(p, n_sites, local=2):
    """x -> sitewise complement (local-1 - digit), the canonical pairing
    for product-of-chains state spaces."""
    sizes = [local] * n_sites
    prime = [
        ps.product_index(
            [local - 1 - d for d in ps.product_digits(x, sizes)], sizes
        )
        for x in range(p.n)
    ]
    return DualityPairing(p, prime=prime)


# -- voter ----------------------------------------------------------------


def voter_map(space, n_sites, i, j):
    """Site i's opinion overwrites site j."""
    img = tuple(
        x | (1 << j) if x >> i & 1 else x & ~(1 << j)
        for x in range(2**n_sites)
    )
    return PosetMap(space, space, img, name=f"vot_{i}{j}")


def rw_map(space, n_sites, j, i):
    """A walker at j jumps to i, coalescing with anything already there."""
    img = tuple(
        (x & ~(1 << j)) | (1 << i) if x >> j & 1 else x
        for x in range(2**n_sites)
    )
    return PosetMap(space, space, img, name=f"rw_{j}{i}")


def build_voter(n_sites, rates=None):
    """Voter model on {0,1}^n: rate[i][j] applies vot_{ij} (i != j)."""
    space = _cube_with_labels(n_sites)
    if rates is None:
        rates = [
            [0 if i == j else 1 for j in range(n_sites)]
            for i in range(n_sites)
        ]
    entries = []
    for i in range(n_sites):
        for j in range(n_sites):
            if i == j:
                continue
            r = rates[i][j]
            if r:
                entries.append((voter_map(space, n_sites, i, j), r))
    pairing = complement_pairing(space, n_sites)
    return Model(
        name="voter",
        rep=RandomMappingRep(space, entries),
        pairing=pairing,
        additive=True,
        monotone=True,
        params={"model": "voter", "sites": n_sites,
                "rates": [list(row) for row in rates]},
    )


# -- contact (helper; additive birth/death maps) ---------------------------


def branch_map(space, n_sites, i, j):
    img = tuple(
        x | (1 << j) if x >> i & 1 else x for x in range(2**n_sites)
    )
    return PosetMap(space, space, img, name=f"bra_{i}{j}")


def death_site_map(space, n_sites, i):
    img = tuple(x & ~(1 << i) for x in range(2**n_sites))
    return PosetMap(space, space, img, name=f"dth_{i}")


def build_contact(n_sites, branch=None, death=None):
    """Additive contact process: branch[i][j] spreads i -> j, death[i]
    clears site i."""
    space = _cube_with_labels(n_sites)
    if branch is None:
        branch = [
            [0 if i == j else 1 for j in range(n_sites)]
            for i in range(n_sites)
        ]
    if death is None:
        death = [1] * n_sites
    entries = []
    for i in range(n_sites):
        for j in range(n_sites):
            if i != j and branch[i][j]:
                entries.append((branch_map(space, n_sites, i, j), branch[i][j]))
    for i in range(n_sites):
        if death[i]:
            entries.append((death_site_map(space, n_sites, i), death[i]))
    return Model(
        name="contact",
        rep=RandomMappingRep(space, entries),
        pairing=complement_pairing(space, n_sites),
        additive=True,
        monotone=True,
        params={"model": "contact", "sites": n_sites,
                "branch": [list(r) for r in branch], "death": list(death)},
    )


# -- two-stage contact (Krone) ---------------------------------------------


def _krone_map(space, n_sites, rule, name):
    sizes = [3] * n_sites
    img = []
    for x in range(space.n):
        digits = list(ps.product_digits(x, sizes))
        rule(digits)
        img.append(ps.product_index(digits, sizes))
    return PosetMap(space, space, tuple(img), name=name)


def krone_maps(space, n_sites):
    """The five local map families of the two-stage contact process on
    {0,1,2}^n: grow up (1->2), give birth (2 at i puts a 1 on an empty j),
    young dies (1->0), death (->0), grow younger (2->1)."""
    fams = {"a": {}, "b": {}, "c": {}, "d": {}, "e": {}}
    for i in range(n_sites):
        def up(d, i=i):
            if d[i] == 1:
                d[i] = 2

        def young_dies(d, i=i):
            if d[i] == 1:
                d[i] = 0

        def die(d, i=i):
            d[i] = 0

        def younger(d, i=i):
            if d[i] == 2:
                d[i] = 1

        fams["a"][i] = _krone_map(space, n_sites, up, f"a_{i}")
        fams["c"][i] = _krone_map(space, n_sites, young_dies, f"c_{i}")
        fams["d"][i] = _krone_map(space, n_sites, die, f"d_{i}")
        fams["e"][i] = _krone_map(space, n_sites, younger, f"e_{i}")
        for j in range(n_sites):
            if i == j:
                continue

            def birth(d, i=i, j=j):
                if d[i] == 2 and d[j] == 0:
                    d[j] = 1

            fams["b"][(i, j)] = _krone_map(space, n_sites, birth, f"b_{i}{j}")
    return fams


def build_krone(n_sites, rates=None):
    """Two-stage contact process on {0,1,2}^n with per-family rates
    {"a": [..], "b": [[..]], "c": [..], "d": [..], "e": [..]}."""
    space = _chain_power(3, n_sites)
    if rates is None:
        rates = {
            "a": [1] * n_sites,
            "b": [[0 if i == j else 1 for j in range(n_sites)]
                  for i in range(n_sites)],
            "c": [1] * n_sites,
            "d": [1] * n_sites,
            "e": [1] * n_sites,
        }
    fams = krone_maps(space, n_sites)
    entries = []
    for i in range(n_sites):
        for fam in ("a", "c", "d", "e"):
            r = rates.get(fam, [0] * n_sites)[i]
            if r:
                entries.append((fams[fam][i], r))
        for j in range(n_sites):
            if i != j:
                r = rates.get("b", [])[i][j] if rates.get("b") else 0
                if r:
                    entries.append((fams["b"][(i, j)], r))
    pairing = complement_pairing(space, n_sites, local=3)
    return Model(
        name="krone",
        rep=RandomMappingRep(space, entries),
        pairing=pairing,
        additive=True,
        monotone=True,
        params={"model": "krone", "sites": n_sites, "rates": rates},
    )


def krone_ground(n_sites):
    """Sites doubled into levels: ground poset on Lambda x {0,1} with the
    level chain (i,0) < (i,1); element index is i + n*level."""
    labels = tuple(
        f"{i % n_sites},{i // n_sites}" for i in range(2 * n_sites)
    )
    base = ps.product_poset([ps.antichain(n_sites), ps.chain(2)])
    return ps.Poset(base.leq, labels=labels, validate=False)


def krone_state_to_set(x, n_sites):
    """{0,1,2}-configuration -> decreasing subset of the doubled ground:
    value 1 occupies (i,0), value 2 occupies both levels."""
    digits = ps.product_digits(x, [3] * n_sites)
    out = set()
    for i, v in enumerate(digits):
        if v >= 1:
            out.add(i)          # (i, 0)
        if v == 2:
            out.add(i + n_sites)  # (i, 1)
    return frozenset(out)


def krone_set_to_state(s, n_sites):
    digits = []
    for i in range(n_sites):
        lo = i in s
        hi = (i + n_sites) in s
        if hi and not lo:
            raise ModelError("set is not decreasing on the doubled ground")
        digits.append(2 if hi else (1 if lo else 0))
    return ps.product_index(digits, [3] * n_sites)


def krone_msets(n_sites):
    """Arrow/blocking encodings of the five families on the doubled
    ground.

    The identity's relation on an ordered ground is all pairs (a, b) with
    b <= a, so each family is that base plus or minus site-local pairs:
    a_i adds the upward arrow between i's levels (the downward one is an
    order pair already); b_ij adds the arrow from (i,1) to (j,0); c_i
    drops (i,0)'s diagonal (blocking symbol there, keeping the arrow from
    (i,1) down); d_i drops everything at site i (blocking at both
    levels); e_i drops (i,1)'s diagonal.
    """
    ground = krone_ground(n_sites)
    base = frozenset(
        (a, b)
        for a in range(2 * n_sites)
        for b in range(2 * n_sites)
        if ground.leq[b, a]
    )
    out = {"a": {}, "b": {}, "c": {}, "d": {}, "e": {}}
    for i in range(n_sites):
        lo, hi = i, i + n_sites
        out["a"][i] = MSet(ground, base | {(lo, hi)})
        out["c"][i] = MSet(ground, base - {(lo, lo)})
        out["d"][i] = MSet(ground, base - {(lo, lo), (hi, hi), (hi, lo)})
        out["e"][i] = MSet(ground, base - {(hi, hi)})
        for j in range(n_sites):
            if i != j:
                out["b"][(i, j)] = MSet(ground, base | {(hi, j)})
    return ground, out


# -- cooperative branching ---------------------------------------------------


def coop_b_map(space, n_sites, i, j, k):
    """Particles at i and j jointly put a particle at k."""
    need = (1 << i) | (1 << j)
    img = tuple(
        x | (1 << k) if (x & need) == need else x for x in range(2**n_sites)
    )
    return PosetMap(space, space, img, name=f"b_{i}{j}{k}")


def coop_b1_map(space, n_sites, i, j, k):
    """First half of the set-valued dual of the branching map."""
    img = []
    for x in range(2**n_sites):
        if x >> k & 1 and not x >> i & 1 and not x >> j & 1:
            img.append(x | (1 << j))
        else:
            img.append(x)
    return PosetMap(space, space, tuple(img), name=f"b1_{i}{j}{k}")


def coop_b2_map(space, n_sites, i, j, k):
    img = []
    for x in range(2**n_sites):
        if x >> k & 1 and not x >> i & 1 and not x >> j & 1:
            img.append(x | (1 << i))
        else:
            img.append(x)
    return PosetMap(space, space, tuple(img), name=f"b2_{i}{j}{k}")


def coop_a_map(space, n_sites, i, j):
    """Voter move: site i copies site j's value."""
    img = []
    for x in range(2**n_sites):
        if x >> j & 1:
            img.append(x | (1 << i))
        else:
            img.append(x & ~(1 << i))
    return PosetMap(space, space, tuple(img), name=f"a_{i}{j}")


def coop_c_map(space, n_sites, i, j):
    """Coalescing walk step from i to j."""
    img = tuple(
        (x & ~(1 << i)) | (1 << j) if x >> i & 1 else x
        for x in range(2**n_sites)
    )
    return PosetMap(space, space, img, name=f"c_{i}{j}")


def coop_e_map(space, n_sites, i, j):
    """Exclusion swap of sites i and j."""
    img = []
    for x in range(2**n_sites):
        bi, bj = x >> i & 1, x >> j & 1
        y = x & ~(1 << i) & ~(1 << j)
        if bi:
            y |= 1 << j
        if bj:
            y |= 1 << i
        img.append(y)
    return PosetMap(space, space, tuple(img), name=f"e_{i}{j}")


def build_coop_branching(
    n_sites, branch=None, coalesce=None, death=None, exclusion=None
):
    """Cooperative branching + coalescent, optionally with deaths and
    exclusion.  `branch` lists (i, j, k, rate) for distinct i, j, k;
    `coalesce`/`exclusion` list (i, j, rate); `death` lists (i, rate).
    Defaults: every ordered distinct triple and pair at rate 1, no deaths
    or exclusion."""
    space = _cube_with_labels(n_sites)
    if branch is None:
        branch = [
            (i, j, k, 1)
            for i in range(n_sites)
            for j in range(n_sites)
            for k in range(n_sites)
            if len({i, j, k}) == 3
        ]
    if coalesce is None:
        coalesce = [
            (i, j, 1)
            for i in range(n_sites)
            for j in range(n_sites)
            if i != j
        ]
    entries = []
    for i, j, k, r in branch:
        if len({i, j, k}) != 3:
            raise ModelError(f"branching indices must be distinct: {(i,j,k)}")
        if r:
            entries.append((coop_b_map(space, n_sites, i, j, k), r))
    for i, j, r in coalesce:
        if i == j:
            raise ModelError("coalescence indices must differ")
        if r:
            entries.append((coop_c_map(space, n_sites, i, j), r))
    for i, r in death or []:
        if r:
            entries.append(
                (death_site_map(space, n_sites, i), r)
            )
    for i, j, r in exclusion or []:
        if i == j:
            raise ModelError("exclusion indices must differ")
        if r:
            entries.append((coop_e_map(space, n_sites, i, j), r))
    return Model(
        name="coop",
        rep=RandomMappingRep(space, entries),
        pairing=complement_pairing(space, n_sites),
        additive=False,
        monotone=True,
        params={
            "model": "coop",
            "sites": n_sites,
            "branch": [list(b) for b in branch],
            "coalesce": [list(c) for c in coalesce],
            "death": [list(d) for d in (death or [])],
            "exclusion": [list(e) for e in (exclusion or [])],
        },
    )


def coop_dual_star_maps(space, n_sites, model_params):
    """Image maps of the union-additive dual, one pair of maps per
    branching event plus the additive duals of the rest (a voter move for
    each coalescence, deaths and exclusions self-dual)."""
    out = []
    for i, j, k, r in model_params["branch"]:
        if r:
            out.append(
                (
                    [coop_b1_map(space, n_sites, i, j, k),
                     coop_b2_map(space, n_sites, i, j, k)],
                    r,
                )
            )
    for i, j, r in model_params["coalesce"]:
        if r:
            out.append(([coop_a_map(space, n_sites, i, j)], r))
    for i, r in model_params.get("death", []):
        if r:
            out.append(([death_site_map(space, n_sites, i)], r))
    for i, j, r in model_params.get("exclusion", []):
        if r:
            out.append(([coop_e_map(space, n_sites, i, j)], r))
    return out


# -- totally ordered chains (Siegmund) ---------------------------------------


def build_siegmund(n, entries=None, kernel=None, kernel_rate=1):
    """Monotone chain dynamics on {0,...,n} with 0 a trap.

    Either pass (img, rate) entries directly, or a monotone stochastic
    kernel fixing 0 plus a total jump rate, which gets decomposed into
    monotone maps by the shared-uniform quantile construction.  On a
    chain, monotone plus fixing the bottom is the same as additive, and
    every dual map fixes the top.
    """
    space = ps.chain(n + 1, labels=tuple(str(i) for i in range(n + 1)))
    built = []
    if entries is None and kernel is None:
        entries = [
            (tuple(max(x - 1, 0) for x in range(n + 1)), 1),
            (tuple(0 if x == 0 else min(x + 1, n) for x in range(n + 1)), 1),
        ]
    if kernel is not None:
        for prob, m in represent_monotone_kernel_chain(kernel):
            built.append((m, prob * kernel_rate))
    for img, rate in entries or []:
        m = PosetMap(space, space, tuple(img), name=f"chain{list(img)}")
        built.append((m, rate))
    for m, _ in built:
        bad = next(
            (
                (x, y)
                for x in range(n + 1)
                for y in range(x, n + 1)
                if not m.img[x] <= m.img[y]
            ),
            None,
        )
        if bad is not None:
            raise ModelError(f"map {m.name} is not monotone: witness {bad}")
        if m.img[0] != 0:
            raise ModelError(
                f"map {m.name} does not fix 0 (required for chain additivity)"
            )
    # identity prime: the dual space is the same chain upside down
    pairing = DualityPairing.reversed_order(space)
    return Model(
        name="siegmund",
        rep=RandomMappingRep(space, built),
        pairing=pairing,
        additive=True,
        monotone=True,
        params={
            "model": "siegmund",
            "n": n,
            "maps": [
                {"img": list(m.img), "rate": float(r)} for m, r in built
            ],
        },
    )


# -- monotone function decomposition and attractive spin systems -------------


def monotone_indicator_decomposition(p, values):
    """Write a monotone real function as a base constant on the whole
    space plus nonnegative multiples of indicators of increasing level
    sets.  Exact when the values are Fractions."""
    values = list(values)
    if len(values) != p.n:
        raise ModelError("value table length must match the poset")
    for x in range(p.n):
        for y in range(p.n):
            if p.leq[x, y] and values[x] > values[y]:
                raise ModelError(f"function is not monotone: witness ({x},{y})")
    levels = sorted(set(values))
    full = frozenset(range(p.n))
    terms = [(levels[0], full)]
    for prev, cur in zip(levels, levels[1:]):
        level_set = frozenset(x for x in range(p.n) if values[x] >= cur)
        terms.append((cur - prev, level_set))
    return terms


def spin_generator(n_sites, beta, delta, exact=False):
    """Generator of the single-site flip system: beta[i][x] is the rate of
    switching site i on, delta[i][x] of switching it off."""
    n = 2**n_sites
    if exact:
        q = [[Fraction(0)] * n for _ in range(n)]
    else:
        q = np.zeros((n, n))
    for x in range(n):
        for i in range(n_sites):
            if not x >> i & 1:
                r = beta[i][x]
                y = x | (1 << i)
            else:
                r = delta[i][x]
                y = x & ~(1 << i)
            if r:
                if exact:
                    fr = Fraction(r)
                    q[x][y] += fr
                    q[x][x] -= fr
                else:
                    q[x, y] += float(r)
                    q[x, x] -= float(r)
    return q


def decompose_attractive_spin(n_sites, beta, delta):
    """Monotone map representation of an attractive spin system.

    Each monotone birth table splits into indicators of increasing sets;
    each term becomes a map that switches the site on inside its trigger
    set.  Death tables must be anti-monotone and decompose against the
    reversed order into decreasing trigger sets.  The result's generator
    matches the flip-rate generator exactly.
    """
    space = _cube_with_labels(n_sites)
    reversed_space = ps.dual_view(space).as_poset()
    entries = []
    for i in range(n_sites):
        b = list(beta[i])
        d = list(delta[i])
        terms = monotone_indicator_decomposition(space, b)
        for coeff, trigger in terms:
            if not coeff:
                continue
            img = tuple(
                x | (1 << i) if x in trigger else x for x in range(space.n)
            )
            entries.append(
                (PosetMap(space, space, img, name=f"on_{i}@{len(entries)}"),
                 coeff)
            )
        try:
            dterms = monotone_indicator_decomposition(reversed_space, d)
        except ModelError as exc:
            raise ModelError(
                f"death table {i} is not anti-monotone: {exc}"
            ) from exc
        for coeff, trigger in dterms:
            if not coeff:
                continue
            img = tuple(
                x & ~(1 << i) if x in trigger else x for x in range(space.n)
            )
            entries.append(
                (PosetMap(space, space, img, name=f"off_{i}@{len(entries)}"),
                 coeff)
            )
    return RandomMappingRep(space, entries)


def build_spin(n_sites, beta, delta):
    rep = decompose_attractive_spin(n_sites, beta, delta)
    return Model(
        name="spin",
        rep=rep,
        pairing=complement_pairing(rep.space, n_sites),
        additive=False,
        monotone=True,
        params={
            "model": "spin",
            "sites": n_sites,
            "beta": [[float(v) for v in row] for row in beta],
            "delta": [[float(v) for v in row] for row in delta],
        },
    )


# -- monotone kernels on chains ----------------------------------------------


def represent_monotone_kernel_chain(kernel):
    """Quantile (inverse-CDF) coupling of a monotone kernel on a chain.

    The shared uniform is partitioned at the distinct partial-sum values
    of the rows; each cell yields the map x -> smallest y with row-CDF at
    least the cell's upper endpoint.  Row monotonicity (stochastic
    dominance) makes every such map monotone, and the cell widths mix back
    to the kernel exactly.  Exact with Fraction entries.
    """
    rows = [[Fraction(v) for v in row] for row in kernel]
    n = len(rows)
    space = ps.chain(n, labels=tuple(str(i) for i in range(n)))
    cdf = []
    for row in rows:
        if len(row) != n:
            raise ModelError("kernel must be square")
        if any(v < 0 for v in row):
            raise ModelError("kernel entries must be nonnegative")
        acc = []
        run = Fraction(0)
        for v in row:
            run += v
            acc.append(run)
        if run != 1:
            raise ModelError("kernel rows must sum to one")
        cdf.append(acc)
    for x in range(n - 1):
        for y in range(n):
            if cdf[x][y] < cdf[x + 1][y]:
                raise ModelError(
                    f"kernel is not monotone: rows {x},{x + 1} at column {y}"
                )
    cuts = sorted({v for row in cdf for v in row if v > 0})
    out = []
    prev = Fraction(0)
    for c in cuts:
        img = tuple(
            next(y for y in range(n) if cdf[x][y] >= c) for x in range(n)
        )
        out.append(
            (c - prev, PosetMap(space, space, img, name=f"q{len(out)}"))
        )
        prev = c
    return out


# -- registry and JSON ---------------------------------------------------------


def build_model(doc):
    """Build a model from its JSON description (dict or string)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc.get("model")
    if kind == "voter":
        return build_voter(int(doc["sites"]), doc.get("rates"))
    if kind == "krone":
        return build_krone(int(doc["sites"]), doc.get("rates"))
    if kind == "coop":
        return build_coop_branching(
            int(doc["sites"]),
            branch=[tuple(b) for b in doc["branch"]] if "branch" in doc else None,
            coalesce=[tuple(c) for c in doc["coalesce"]] if "coalesce" in doc else None,
            death=[tuple(d) for d in doc.get("death", [])] or None,
            exclusion=[tuple(e) for e in doc.get("exclusion", [])] or None,
        )
    if kind == "contact":
        return build_contact(int(doc["sites"]), doc.get("branch"), doc.get("death"))
    if kind == "siegmund":
        maps = doc.get("maps")
        entries = (
            [(tuple(m["img"]), m["rate"]) for m in maps] if maps else None
        )
        return build_siegmund(int(doc["n"]), entries=entries)
    if kind == "spin":
        return build_spin(int(doc["sites"]), doc["beta"], doc["delta"])
    if kind == "custom":
        return _build_custom(doc)
    raise ModelError(f"unknown model kind {kind!r}")


def _build_custom(doc):
    space = ps.from_json(doc["poset"])
    entries = []
    for m, r in zip(doc["maps"], doc["rates"]):
        entries.append(
            (PosetMap(space, space, tuple(m["img"]), name=m.get("name", "")), r)
        )
    rep = RandomMappingRep(space, entries)
    prime = doc.get("prime")
    pairing = DualityPairing(space, prime=prime)
    return Model(
        name=doc.get("name", "custom"),
        rep=rep,
        pairing=pairing,
        additive=rep.all_additive,
        monotone=rep.all_monotone,
        params=doc,
    )


BUILTIN_DEFAULTS = {
    "voter": lambda sites=3: build_voter(sites),
    "krone": lambda sites=2: build_krone(sites),
    "coop": lambda sites=3: build_coop_branching(sites),
    "siegmund": lambda sites=4: build_siegmund(sites),
    "spin": lambda sites=2: build_spin(
        sites,
        beta=[
            [sum(x >> j & 1 for j in range(sites) if j != i)
             for x in range(2**sites)]
            for i in range(sites)
        ],
        delta=[[1] * 2**sites for _ in range(sites)],
    ),
    "contact": lambda sites=3: build_contact(sites),
}


def builtin(name, sites=None):
    if name not in BUILTIN_DEFAULTS:
        raise ModelError(f"unknown builtin {name!r}")
    fn = BUILTIN_DEFAULTS[name]
    return fn() if sites is None else fn(sites)


def model_to_custom_json(name, rep, prime=None):
    """Serialize any mapping representation as a custom model document."""
    return {
        "model": "custom",
        "name": name,
        "poset": ps.to_json(rep.space),
        "maps": [{"img": list(m.img), "name": m.name} for m, _ in rep.entries],
        "rates": [float(r) for _, r in rep.entries],
        "prime": list(prime) if prime is not None else None,
    }
