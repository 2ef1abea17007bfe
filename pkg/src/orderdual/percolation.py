"""Space-time percolation substructures for additive dynamics on lattices
of decreasing sets.

An additive self-map of the decreasing sets of a ground poset is the same
thing as a relation M on the ground set whose first coordinate is upward
closed and whose second is downward closed; drawing M's off-diagonal pairs
as arrows and its missing diagonal points as blocking symbols turns an
event log into a diagram whose open-path reachability IS the flow.
"""

from dataclasses import dataclass
import json

from . import poset as ps
from .lattice import all_decreasing_family
from .maps import PosetMap


class PercolationError(ValueError):
    pass


@dataclass(frozen=True)
class MSet:
    """Relation encoding of one additive map on P_dec(ground)."""

    ground: ps.Poset
    pairs: frozenset  # of (i, j) ground pairs

    def __post_init__(self):
        witness = mprop_violation(self.ground, self.pairs)
        if witness is not None:
            raise PercolationError(
                f"relation violates the closure conditions at {witness}"
            )

    def arrows(self):
        """Off-diagonal pairs, drawn as arrows (i, t) -> (j, t)."""
        return sorted((i, j) for i, j in self.pairs if i != j)

    def blocked_sites(self):
        """Sites whose diagonal pair is absent, drawn as blocking symbols."""
        return sorted(
            i for i in range(self.ground.n) if (i, i) not in self.pairs
        )


def mprop_violation(ground, pairs):
    """First witness breaking the M-set closure conditions, or None.

    Condition (up, i): (i, j) present and i <= i2 forces (i2, j);
    condition (down, j): (i, j) present and j2 <= j forces (i, j2).
    """
    pairs = frozenset(pairs)
    for i, j in sorted(pairs):
        for i2 in range(ground.n):
            if ground.leq[i, i2] and (i2, j) not in pairs:
                return ("first-coordinate", (i, j), i2)
        for j2 in range(ground.n):
            if ground.leq[j2, j] and (i, j2) not in pairs:
                return ("second-coordinate", (i, j), j2)
    return None


def apply_mset(mset, x):
    """One reachability step: {j : (i, j) in M for some i in x}."""
    return frozenset(j for i, j in mset.pairs if i in x)


def apply_mset_backward(mset, y):
    """Transposed step: {i : (i, j) in M for some j in y}."""
    return frozenset(i for i, j in mset.pairs if j in y)


def map_to_mset(family, img):
    """Recover the relation of an additive map on the full P_dec family:
    (i, j) is in M exactly when j lands in the image of the principal
    ideal below i."""
    ground = family.ground
    full = all_decreasing_family(ground)
    if family.sets != full.sets:
        raise PercolationError(
            "map_to_mset needs the full canonical P_dec family"
        )
    img = tuple(int(v) for v in img)
    pairs = set()
    for i in range(ground.n):
        ideal = ps.down_set(ground, {i})
        target = family.sets[img[family.index[ideal]]]
        for j in target:
            pairs.add((i, j))
    mset = MSet(ground, frozenset(pairs))
    if mset_to_map(mset, family).img != img:
        raise PercolationError("map is not additive: round trip failed")
    return mset


def mset_to_map(mset, family=None):
    """The additive self-map of P_dec(ground) induced by the relation."""
    family = family or all_decreasing_family(mset.ground)
    fam_poset = family.as_poset()
    img = []
    for s in family.sets:
        out = apply_mset(mset, s)
        if out not in family.index:
            raise PercolationError(
                f"image {sorted(out)} is not a decreasing set"
            )
        img.append(family.index[out])
    return PosetMap(fam_poset, fam_poset, tuple(img))


def transpose_mset(mset):
    """Swap the coordinates; the result satisfies the closure conditions
    for the reversed ground order and encodes the dual map."""
    rev = ps.dual_view(mset.ground).as_poset()
    return MSet(rev, frozenset((j, i) for i, j in mset.pairs))


def relabel_mset(mset, perm, ground=None):
    """Push the relation through a site bijection (used to compare a
    transposed relation with one written on the original ground order)."""
    ground = ground or mset.ground
    return MSet(
        ground, frozenset((perm[i], perm[j]) for i, j in mset.pairs)
    )


@dataclass(frozen=True)
class Diagram:
    """Time-sorted M-set events over a common ground poset."""

    ground: ps.Poset
    events: tuple  # of (time, MSet)

    def __post_init__(self):
        prev = None
        for t, m in self.events:
            if m.ground is not self.ground and not ps.equal(
                m.ground, self.ground
            ):
                raise PercolationError("event ground does not match diagram")
            if prev is not None and not (prev < t):
                raise PercolationError("event times must strictly increase")
            prev = t

    @property
    def horizon(self):
        if not self.events:
            return (0.0, 0.0)
        return (self.events[0][0], self.events[-1][0])

    def to_json(self):
        return {
            "ground": ps.to_json(self.ground),
            "events": [
                {"t": t, "pairs": [list(p) for p in sorted(m.pairs)]}
                for t, m in self.events
            ],
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        ground = ps.from_json(doc["ground"])
        events = tuple(
            (
                float(e["t"]),
                MSet(ground, frozenset(tuple(p) for p in e["pairs"])),
            )
            for e in doc["events"]
        )
        return cls(ground, events)


def diagram_of_log(log, msets, ground):
    """Pair an event log with per-map relations."""
    events = tuple(
        (t, msets[k]) for t, k in zip(log.times, log.map_ids)
    )
    return Diagram(ground, events)


def reach(diagram, x, s, u, direction="forward"):
    """Open-path reachability across the window (s, u].

    forward: sites reachable from x at time s by the end; backward: sites
    at time s from which some site of x at time u is reachable.  Both are
    computed by the one-step relation dynamic programming, which agrees
    with path enumeration (see `path_reach_oracle`)."""
    if direction not in ("forward", "backward"):
        raise PercolationError(f"unknown direction {direction!r}")
    if s > u:
        raise PercolationError("window must satisfy s <= u")
    r = frozenset(x)
    pick = [(t, m) for t, m in diagram.events if s < t <= u]
    if direction == "forward":
        for _, m in pick:
            r = apply_mset(m, r)
    else:
        for _, m in reversed(pick):
            r = apply_mset_backward(m, r)
    return r


def path_reach_oracle(diagram, x, s, u, max_events=6):
    """Reachability by explicit enumeration of site trajectories; the
    independent check for `reach` on short windows."""
    pick = [m for t, m in diagram.events if s < t <= u]
    if len(pick) > max_events:
        raise PercolationError("oracle only enumerates short windows")
    n = diagram.ground.n
    out = set()
    for start in x:
        frontier = {start}
        for m in pick:
            frontier = {
                j
                for g in frontier
                for j in range(n)
                if (g, j) in m.pairs
            }
        out |= frontier
    return frozenset(out)


@dataclass(frozen=True)
class GraphicalReport:
    ok: bool
    violating_t: float | None
    lhs_values: tuple
    rhs: int


def check_graphical_duality(diagram, x, y, s, u):
    """At every event time t, disjointness of the forward state (left
    limit) and the backward dual state must equal absence of any open path
    from (x, s) to (y, u)."""
    if not s <= u:
        raise PercolationError("need s <= u")
    rhs = int(not (reach(diagram, x, s, u, "forward") & frozenset(y)))
    times = [t for t, _ in diagram.events if s < t <= u]
    checkpoints = [s] + times + [u]
    lhs_values = []
    violating = None
    for t in checkpoints:
        fwd = frozenset(x)
        for tau, m in diagram.events:
            if s < tau < t:
                fwd = apply_mset(m, fwd)
        back = frozenset(y)
        for tau, m in reversed(diagram.events):
            if t <= tau <= u:
                back = apply_mset_backward(m, back)
        lhs = int(not (fwd & back))
        lhs_values.append(lhs)
        if lhs != rhs and violating is None:
            violating = t
    return GraphicalReport(violating is None, violating, tuple(lhs_values), rhs)


# -- rendering -------------------------------------------------------------


def _fmt(v):
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_svg(diagram, highlight=None, dual_panel=True, site_gap=60,
               time_scale=120, margin=40):
    """Deterministic SVG: vertical site lines, horizontal arrows at event
    times, thick ticks for blocking symbols; time runs upward.  With
    `dual_panel` a mirrored panel with reversed arrows is drawn next to
    the forward one.  `highlight` optionally marks (x, y) site sets at the
    bottom and top."""
    n = diagram.ground.n
    t0, t1 = diagram.horizon
    span = max(t1 - t0, 1.0)
    height = margin * 2 + span * time_scale
    panel_w = margin * 2 + (n - 1) * site_gap
    width = panel_w * (2 if dual_panel else 1)

    def sx(panel, i):
        return panel * panel_w + margin + i * site_gap

    def sy(t):
        return height - margin - (t - t0) * time_scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}">',
        '<style>line{stroke:#222;stroke-width:1.5}'
        '.arrow{stroke:#555;stroke-width:2}'
        '.block{stroke:#000;stroke-width:5}'
        '.mark{fill:#c22}</style>',
    ]
    panels = [0] + ([1] if dual_panel else [])
    for panel in panels:
        for i in range(n):
            parts.append(
                f'<line x1="{_fmt(sx(panel, i))}" y1="{_fmt(sy(t0) + 10)}" '
                f'x2="{_fmt(sx(panel, i))}" y2="{_fmt(sy(t1) - 10)}"/>'
            )
            parts.append(
                f'<text x="{_fmt(sx(panel, i))}" y="{_fmt(height - 8)}" '
                f'font-size="12" text-anchor="middle">'
                f"{diagram.ground.label(i)}</text>"
            )
        for t, m in diagram.events:
            y = sy(t)
            for i, j in m.arrows():
                a, b = (i, j) if panel == 0 else (j, i)
                x1, x2 = sx(panel, a), sx(panel, b)
                tip = 6 if x2 > x1 else -6
                parts.append(
                    f'<line class="arrow" x1="{_fmt(x1)}" y1="{_fmt(y)}" '
                    f'x2="{_fmt(x2)}" y2="{_fmt(y)}"/>'
                )
                parts.append(
                    f'<path class="arrow" fill="none" d="M {_fmt(x2 - tip)} '
                    f'{_fmt(y - 4)} L {_fmt(x2)} {_fmt(y)} L {_fmt(x2 - tip)} '
                    f'{_fmt(y + 4)}"/>'
                )
            for i in m.blocked_sites():
                cx = sx(panel, i)
                parts.append(
                    f'<line class="block" x1="{_fmt(cx - 5)}" y1="{_fmt(y)}" '
                    f'x2="{_fmt(cx + 5)}" y2="{_fmt(y)}"/>'
                )
    if highlight is not None:
        bottom, top = highlight
        for i in sorted(bottom):
            parts.append(
                f'<circle class="mark" cx="{_fmt(sx(0, i))}" '
                f'cy="{_fmt(sy(t0) + 10)}" r="4"/>'
            )
        for i in sorted(top):
            parts.append(
                f'<circle class="mark" cx="{_fmt(sx(0, i))}" '
                f'cy="{_fmt(sy(t1) - 10)}" r="4"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
