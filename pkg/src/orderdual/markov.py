"""Generators and semigroups of random mapping representations, their
duals, and exact matrix-level duality verification.

Two arithmetic modes run side by side: floats for semigroup work and
`fractions.Fraction` for the intertwining checks, which are exact whenever
the rates are rational.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import hashlib
import io
import json
import math
import os

import numpy as np

from . import poset as ps
from . import duality as du
from .maps import is_additive, is_monotone

CLOSURE_CAP = 4096
UNIFORMIZATION_MAX_TERMS = 100_000


class MarkovError(ValueError):
    pass


class RandomMappingRep:
    """A set of self-maps of a poset with nonnegative rates; together they
    define a generator via rate-weighted map applications."""

    __slots__ = ("space", "entries", "__dict__")

    def __init__(self, space, entries):
        self.space = space
        clean = []
        for m, r in entries:
            if m.domain is not space or m.codomain is not space:
                if not (ps.equal(m.domain, space) and ps.equal(m.codomain, space)):
                    raise MarkovError(f"map {m.name!r} is not a self-map of the space")
            if r < 0:
                raise MarkovError(f"negative rate {r} for map {m.name!r}")
            clean.append((m, r))
        self.entries = tuple(clean)

    def __len__(self):
        return len(self.entries)

    @cached_property
    def all_monotone(self):
        return all(is_monotone(m, cross_check=False).ok for m, _ in self.entries)

    @cached_property
    def all_additive(self):
        return all(is_additive(m, cross_check=False).ok for m, _ in self.entries)

    @cached_property
    def total_rate(self):
        return sum(r for _, r in self.entries)

    def maps(self):
        return [m for m, _ in self.entries]

    def rates(self):
        return [r for _, r in self.entries]


def build_generator(rep, exact=False):
    """Generator matrix Q with Q[x][y] the total rate of maps sending x to
    y != x, diagonal balancing each row to zero.

    `exact=True` returns nested Fraction lists (rates must be rational);
    otherwise a float ndarray.
    """
    n = rep.space.n
    if exact:
        q = [[Fraction(0)] * n for _ in range(n)]
        for m, r in rep.entries:
            fr = Fraction(r) if not isinstance(r, Fraction) else r
            for x in range(n):
                y = m.img[x]
                if y != x:
                    q[x][y] += fr
                    q[x][x] -= fr
        return q
    q = np.zeros((n, n))
    for m, r in rep.entries:
        for x in range(n):
            y = m.img[x]
            if y != x:
                q[x, y] += r
                q[x, x] -= r
    return q


def transition_matrix(q, t, tol=1e-12, max_terms=UNIFORMIZATION_MAX_TERMS):
    """e^{tQ} by uniformization: a Poisson mixture of powers of the
    stochastic matrix I + Q/lam, truncated once the remaining Poisson tail
    is below tol/2.  Keeps every intermediate nonnegative, unlike squaring
    schemes."""
    if t < 0:
        raise MarkovError("time must be nonnegative")
    q = np.asarray(q, dtype=float)
    n = q.shape[0]
    lam = max(float(-q.diagonal().min()), 0.0)
    if lam == 0.0 or t == 0.0:
        return np.eye(n)
    p = np.eye(n) + q / lam
    mu = lam * t
    weight = math.exp(-mu)
    acc = weight * np.eye(n)
    power = np.eye(n)
    covered = weight
    k = 0
    while 1.0 - covered > tol / 2:
        k += 1
        if k > max_terms:
            raise MarkovError(
                f"uniformization needs more than {max_terms} terms for tol {tol}"
            )
        power = power @ p
        weight *= mu / k
        acc += weight * power
        covered += weight
    # the truncated tail mass is spread nowhere; renormalization is not
    # needed since rows already sum to `covered` >= 1 - tol/2
    return acc


def dual_rep_additive(d, rep):
    """Replace every (additive) map by its unique dual, keeping rates."""
    entries = [(du.additive_dual(d, m), r) for m, r in rep.entries]
    return RandomMappingRep(d.s_prime, entries)


@dataclass(frozen=True)
class MonotoneDualRep:
    """Set-valued dual dynamics restricted to the reachable closure.

    `states` lists subsets of S' (canonical frozensets); `imgs[k][i]` is
    the index of the image of state i under the dual of map k; `generator`
    is the rate matrix on the closure.
    """

    states: tuple
    imgs: tuple
    rates: tuple
    names: tuple
    generator: np.ndarray


def _cache_path(key):
    root = os.environ.get("ORDERDUAL_CACHE")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    return os.path.join(root, f"closure-{key}.json")


def _closure_key(rep, seeds, variant):
    blob = json.dumps(
        {
            "space": ps.to_json(rep.space),
            "maps": [list(m.img) for m, _ in rep.entries],
            "seeds": sorted(sorted(s) for s in seeds),
            "variant": variant,
        },
        sort_keys=True,
    ).encode()
    return hashlib.sha256(blob).hexdigest()[:24]


def dual_rep_monotone(d, rep, seeds, variant="star", cap=CLOSURE_CAP):
    """Close the seed subsets of S' under the chosen set-valued duals and
    build the generator on that closure.

    The full dual state space (all subsets of S') is exponentially large;
    every pathwise statement only ever touches states reachable from the
    initial condition, so reachability is what gets materialized.
    Closures are memoized on disk when ORDERDUAL_CACHE is set.
    """
    if variant not in ("dagger", "star", "circ", "bullet"):
        raise MarkovError(f"unknown dual variant {variant!r}")
    if not rep.all_monotone:
        raise MarkovError("all maps must be monotone")
    fn = du.dual_variant_fn(variant)

    key = _closure_key(rep, seeds, variant)
    path = _cache_path(key)
    if path and os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        states = tuple(frozenset(s) for s in doc["states"])
        imgs = tuple(tuple(row) for row in doc["imgs"])
    else:
        states = []
        index = {}
        for s in seeds:
            s = frozenset(s)
            if s not in index:
                index[s] = len(states)
                states.append(s)
        frontier = list(states)
        transitions = {}
        while frontier:
            nxt = []
            for b in frontier:
                for k, (m, _) in enumerate(rep.entries):
                    out = fn(d, m, b)
                    transitions[(index[b], k)] = out
                    if out not in index:
                        index[out] = len(states)
                        states.append(out)
                        nxt.append(out)
                        if len(states) > cap:
                            raise MarkovError(
                                f"dual closure exceeds cap of {cap} states"
                            )
            frontier = nxt
        imgs = tuple(
            tuple(index[transitions[(i, k)]] for i in range(len(states)))
            for k in range(len(rep.entries))
        )
        states = tuple(states)
        if path:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(
                    {
                        "states": [sorted(s) for s in states],
                        "imgs": [list(r) for r in imgs],
                    },
                    fh,
                )

    n = len(states)
    gen = np.zeros((n, n))
    for k, (_, r) in enumerate(rep.entries):
        for i in range(n):
            j = imgs[k][i]
            if j != i:
                gen[i, j] += r
                gen[i, i] -= r
    return MonotoneDualRep(
        states=states,
        imgs=imgs,
        rates=tuple(r for _, r in rep.entries),
        names=tuple(m.name for m, _ in rep.entries),
        generator=gen,
    )


@dataclass(frozen=True)
class ResidualReport:
    residual: object  # float or Fraction
    ok: bool
    exact: bool

    def to_json(self):
        return {
            "residual": float(self.residual),
            "ok": self.ok,
            "exact": self.exact,
        }


def check_intertwining(q_x, q_dual, psi, tol=1e-12):
    """Max-abs residual of Q_X Psi - Psi Q_dual^T.

    If both generators are Fraction matrices the computation is exact and
    `ok` means the residual is literally zero; float inputs compare the
    residual against `tol`.
    """
    exact = isinstance(q_x, list) and isinstance(q_dual, list)
    if exact:
        n = len(q_x)
        k = len(q_dual)
        psi_f = [[Fraction(int(v)) for v in row] for row in np.asarray(psi)]
        if len(psi_f) != n or (n and len(psi_f[0]) != k):
            raise MarkovError("pairing table shape mismatch")
        worst = Fraction(0)
        for x in range(n):
            for y in range(k):
                lhs = sum(q_x[x][z] * psi_f[z][y] for z in range(n))
                rhs = sum(psi_f[x][w] * q_dual[y][w] for w in range(k))
                diff = abs(lhs - rhs)
                if diff > worst:
                    worst = diff
        return ResidualReport(worst, worst == 0, True)
    q_x = np.asarray(q_x, dtype=float)
    q_dual = np.asarray(q_dual, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (q_x.shape[0], q_dual.shape[0]):
        raise MarkovError("pairing table shape mismatch")
    res = float(np.abs(q_x @ psi - psi @ q_dual.T).max())
    return ResidualReport(res, res < tol, False)


def semigroup_duality_check(q_x, q_dual, psi, t, tol=1e-8, uni_tol=1e-12):
    """Residual of P_t Psi - Psi (dual P_t)^T with uniformized exponentials."""
    p_x = transition_matrix(np.asarray(q_x, dtype=float), t, tol=uni_tol)
    p_y = transition_matrix(np.asarray(q_dual, dtype=float), t, tol=uni_tol)
    psi = np.asarray(psi, dtype=float)
    res = float(np.abs(p_x @ psi - psi @ p_y.T).max())
    return ResidualReport(res, res < tol, False)


def check_kernel_monotone(k, domain, codomain=None, tol=1e-9):
    """A stochastic matrix is monotone iff it maps monotone functions to
    monotone functions; indicators of increasing sets suffice because every
    monotone function is a nonnegative combination of them."""
    codomain = codomain or domain
    k = np.asarray(k, dtype=float)
    if k.shape != (domain.n, codomain.n):
        raise MarkovError("kernel shape mismatch")
    if (k < -tol).any() or np.abs(k.sum(axis=1) - 1).max() > tol:
        raise MarkovError("kernel is not row-stochastic")
    for a in ps.increasing_sets(codomain):
        mass = k[:, sorted(a)].sum(axis=1) if a else np.zeros(domain.n)
        for x in range(domain.n):
            for y in range(domain.n):
                if domain.leq[x, y] and mass[x] > mass[y] + tol:
                    return False
    return True


def generator_to_csv(q, labels):
    """Dense CSV dump with a header row of state labels."""
    out = io.StringIO()
    out.write("state," + ",".join(labels) + "\n")
    arr = np.asarray(q, dtype=float)
    for i, lab in enumerate(labels):
        out.write(lab + "," + ",".join(repr(float(v)) for v in arr[i]) + "\n")
    return out.getvalue()
