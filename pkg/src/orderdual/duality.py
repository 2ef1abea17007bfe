"""Duality pairings and dual-map construction.

A pairing couples a poset S with its dual space S' (same indices, order
reversed through a bijection x -> x') and evaluates the 0/1 function
``<x, y> = 1 if x <= y' (equivalently y <= x')``.

Additive maps have a unique dual map on S'.  Monotone maps have set-valued
duals acting on subsets of S': a minimal-form variant (``dagger``) and a
union-additive variant (``star``), plus the mirror pair (``circ``,
``bullet``) for the reversed pairing.  Everything here is checked by
literal evaluation of the definitions; `verify_map_duality` is the
exhaustive referee.
"""

from dataclasses import dataclass
import itertools

import numpy as np

from . import poset as ps
from .maps import PosetMap, inverse_image, is_monotone


class NotAdditiveError(ValueError):
    """An additive dual was requested for a map that has none.  `witness`
    is the dual element whose preimage fails to be a principal ideal."""

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"no additive dual: fails at y={witness}")


class NotMonotoneError(ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"map is not monotone: witness pair {witness}")


class DualityPairing:
    """A poset, its dual space, and the induced 0/1 pairing."""

    __slots__ = ("space", "view", "_s_prime", "_psi")

    def __init__(self, space, prime=None):
        self.space = space
        self.view = ps.dual_view(space, prime)
        self._s_prime = None
        self._psi = None

    @classmethod
    def reversed_order(cls, space):
        """Dual = same set with the order turned upside down (x' = x)."""
        return cls(space)

    @property
    def s_prime(self):
        """The dual space materialized as a Poset."""
        if self._s_prime is None:
            self._s_prime = self.view.as_poset()
        return self._s_prime

    def value(self, x, y):
        """<x, y> = 1_{x <= y'}; x lives in S, y in S'."""
        return int(self.space.leq[x, self.view.from_prime(y)])

    def psi_table(self):
        """Dense |S| x |S'| 0/1 matrix of the pairing."""
        if self._psi is None:
            inv = self.view.prime_inv
            tab = self.space.leq[:, inv].astype(np.int8)
            tab.setflags(write=False)
            self._psi = tab
        return self._psi


def phi_value(d, x, b):
    """phi(x, B) = 1 if x <= y' for some y in B (B a subset of S')."""
    return int(any(d.space.leq[x, d.view.from_prime(y)] for y in b))


def phi_tilde_value(d, x, b):
    """phi~(x, B) = 1 if x >= y' for some y in B."""
    return int(any(d.space.leq[d.view.from_prime(y), x] for y in b))


def phi_table(d, dual_states, tilde=False):
    """Pairing matrix of phi (or phi~) against an explicit list of subsets
    of S', for use with `verify_map_duality`."""
    fn = phi_tilde_value if tilde else phi_value
    tab = np.array(
        [[fn(d, x, b) for b in dual_states] for x in range(d.space.n)],
        dtype=np.int8,
    )
    tab.setflags(write=False)
    return tab


def additive_dual(d, m):
    """The unique dual map m' on S' of an additive self-map m of S.

    m'(y) is pinned down by: the preimage of the principal ideal below y'
    is itself a principal ideal, and its generator is (m'(y))'.  The
    construction succeeds at every y exactly when m is additive, so
    failures surface lazily with the offending y as witness.
    """
    p = d.space
    img = []
    for y in range(p.n):
        y_in_s = d.view.from_prime(y)
        pre = inverse_image(m, ps.down_set(p, {y_in_s}))
        tops = ps.maximal_elements(p, pre)
        if len(tops) != 1:
            raise NotAdditiveError(y)
        (z,) = tops
        if pre != ps.down_set(p, {z}):
            raise NotAdditiveError(y)
        img.append(d.view.to_prime(z))
    name = f"{m.name}'" if m.name else ""
    return PosetMap(d.s_prime, d.s_prime, tuple(img), name=name)


def _require_monotone(m):
    rep = is_monotone(m, cross_check=False)
    if not rep.ok:
        raise NotMonotoneError(rep.witness)


def _canonical(b):
    return frozenset(b)


def dual_dagger(d, m, b):
    """Minimal-form dual: the set of maximal elements of the preimage of
    the down-closure of B', pushed back through the pairing bijection."""
    _require_monotone(m)
    p = d.space
    b_in_s = {d.view.from_prime(y) for y in b}
    pre = inverse_image(m, ps.down_set(p, b_in_s))
    return _canonical(d.view.to_prime(z) for z in ps.maximal_elements(p, pre))


def dual_star(d, m, b):
    """Union-additive dual: per-singleton preimage maxima, unioned."""
    _require_monotone(m)
    p = d.space
    out = set()
    for y in b:
        pre = inverse_image(m, ps.down_set(p, {d.view.from_prime(y)}))
        out.update(d.view.to_prime(z) for z in ps.maximal_elements(p, pre))
    return _canonical(out)


def dual_circ(d, m, b):
    """Mirror of `dual_dagger` for the reversed pairing (up-closures and
    minima instead of down-closures and maxima)."""
    _require_monotone(m)
    p = d.space
    b_in_s = {d.view.from_prime(y) for y in b}
    pre = inverse_image(m, ps.up_set(p, b_in_s))
    return _canonical(d.view.to_prime(z) for z in ps.minimal_elements(p, pre))


def dual_bullet(d, m, b):
    """Mirror of `dual_star` for the reversed pairing; union-additive."""
    _require_monotone(m)
    p = d.space
    out = set()
    for y in b:
        pre = inverse_image(m, ps.up_set(p, {d.view.from_prime(y)}))
        out.update(d.view.to_prime(z) for z in ps.minimal_elements(p, pre))
    return _canonical(out)


DUAL_VARIANTS = ("prime", "dagger", "star", "circ", "bullet")


def dual_variant_fn(variant):
    return {
        "dagger": dual_dagger,
        "star": dual_star,
        "circ": dual_circ,
        "bullet": dual_bullet,
    }[variant]


# -- exhaustive verification ---------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    mode: str
    ok: bool
    counterexample: dict | None
    pairs_checked: int

    def to_json(self):
        return {
            "mode": self.mode,
            "ok": self.ok,
            "counterexample": self.counterexample,
            "pairs_checked": self.pairs_checked,
        }


def _img_of(m):
    return m.img if isinstance(m, PosetMap) else tuple(int(v) for v in m)


def verify_map_duality(psi, m, m_hat, mode="equal"):
    """Exhaustively check psi(m(x), y) ~ psi(x, m_hat(y)) over all (x, y).

    `psi` is an explicit |S| x |T| table; `m` and `m_hat` may be PosetMaps
    or raw image arrays over the row/column index spaces.  `mode` picks the
    comparison: "equal", "subdual" (lhs <= rhs) or "superdual" (lhs >= rhs).
    """
    if mode not in ("equal", "subdual", "superdual"):
        raise ValueError(f"unknown mode {mode!r}")
    psi = np.asarray(psi)
    mi = _img_of(m)
    hi = _img_of(m_hat)
    n, k = psi.shape
    if len(mi) != n or len(hi) != k:
        raise ValueError("map sizes do not match the pairing table")
    checked = 0
    for x in range(n):
        for y in range(k):
            lhs = psi[mi[x], y]
            rhs = psi[x, hi[y]]
            checked += 1
            bad = (
                lhs != rhs
                if mode == "equal"
                else lhs > rhs
                if mode == "subdual"
                else lhs < rhs
            )
            if bad:
                return DualityReport(
                    mode,
                    False,
                    {"x": x, "y": y, "lhs": int(lhs), "rhs": int(rhs)},
                    checked,
                )
    return DualityReport(mode, True, None, n * k)


# -- antichain utilities --------------------------------------------------


def is_antichain(p, b):
    return all(not p.leq[x, y] for x in b for y in b if x != y)


def antichains(p):
    """All antichains of p (including the empty one), canonically ordered."""
    out = []
    n = p.n
    for mask in range(1 << n):
        members = [x for x in range(n) if mask >> x & 1]
        if is_antichain(p, members):
            out.append(frozenset(members))
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return out


# -- Gray-style path oracle ------------------------------------------------


class BudgetExceeded(RuntimeError):
    pass


def gray_zeta_oracle(events, y, budget=65536):
    """Start states of minimal covering paths ending at y, by enumeration.

    `events` is the time-ordered list of monotone self-maps applied by a
    flow on a poset S.  A candidate path is constant between events, must
    satisfy m_k(value before event k) >= value after event k, and is kept
    only if no other accepted candidate (same endpoint) is pointwise <= it
    without being equal.  Returns the set of admissible start states.

    The enumeration touches |S|^(#events) candidates and refuses to start
    past `budget`.
    """
    if not events:
        return frozenset({y})
    p = events[0].domain
    n_ev = len(events)
    total = p.n ** n_ev
    if total > budget:
        raise BudgetExceeded(
            f"{total} candidate paths exceed the budget of {budget}"
        )
    # a candidate is the value tuple (pi_0, ..., pi_{n-1}, y): pi_k holds on
    # the k-th constancy interval, the last value is pinned to the endpoint
    good = []
    for prefix in itertools.product(range(p.n), repeat=n_ev):
        cand = prefix + (y,)
        if all(
            p.leq[cand[k + 1], events[k].img[cand[k]]] for k in range(n_ev)
        ):
            good.append(cand)
    minimal = [
        cand
        for cand in good
        if not any(
            other != cand and all(p.leq[o, c] for o, c in zip(other, cand))
            for other in good
        )
    ]
    return frozenset(cand[0] for cand in minimal)


def iterated_bullet(events, b):
    """Apply the union-additive reversed-pairing dual of each event, latest
    first, to the set b.  This is the dual flow evaluated over the whole
    horizon for the self-paired reversed-order duality."""
    if not events:
        return frozenset(b)
    d = DualityPairing.reversed_order(events[0].domain)
    out = frozenset(b)
    for m in reversed(events):
        out = dual_bullet(d, m, out)
    return out


@dataclass(frozen=True)
class GrayReport:
    ok: bool
    oracle: frozenset
    flow: frozenset
    y: int


def check_gray_equivalence(events, y, budget=65536):
    """Compare the path-enumeration oracle with the iterated dual flow."""
    oracle = gray_zeta_oracle(events, y, budget=budget)
    flow = iterated_bullet(events, {y})
    return GrayReport(oracle == flow, oracle, flow, y)
