"""Poisson event logs, stochastic-flow evaluation, reversed dual logs, and
the pathwise-constancy verification.

A log drives the flow X_{s,t}: compose the event maps with times in (s, t]
in time order.  The dual log negates and reverses the times; evaluating
the dual flow composes dual maps directly, so both flows share one
realization of the randomness, which is exactly what makes the pathwise
identity hold event by event rather than merely in expectation.

See `_flowkern_py` for the portable RNG contract (splitmix64, documented
constants, fixed draw order).
"""

from dataclasses import dataclass
import json
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ._backend import BACKEND, kernel  # noqa: F401  (BACKEND is public)


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class EventLog:
    """Time-ordered (map index, time) events on a horizon [s, u]."""

    s: float
    u: float
    times: tuple
    map_ids: tuple
    rng_seed: int | None = None

    def __post_init__(self):
        if self.u < self.s:
            raise FlowError("horizon must satisfy s <= u")
        if len(self.times) != len(self.map_ids):
            raise FlowError("times and map_ids must have equal length")
        prev = None
        for t in self.times:
            if not (self.s < t <= self.u):
                raise FlowError(f"event time {t} outside ({self.s}, {self.u}]")
            if prev is not None and not (prev < t):
                raise FlowError("event times must be strictly increasing")
            prev = t

    def __len__(self):
        return len(self.times)

    def restrict(self, s, t, left_open=True, right_closed=True):
        """Event indices with time in the requested subinterval."""
        out = []
        for i, tau in enumerate(self.times):
            lo_ok = tau > s if left_open else tau >= s
            hi_ok = tau <= t if right_closed else tau < t
            if lo_ok and hi_ok:
                out.append(i)
        return out

    def to_json(self):
        return {
            "s": self.s,
            "u": self.u,
            "seed": self.rng_seed,
            "events": [
                {"t": t, "map": k} for t, k in zip(self.times, self.map_ids)
            ],
        }

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        events = doc.get("events", [])
        return cls(
            s=float(doc["s"]),
            u=float(doc["u"]),
            times=tuple(float(e["t"]) for e in events),
            map_ids=tuple(int(e["map"]) for e in events),
            rng_seed=doc.get("seed"),
        )


def _cum_rates(rep):
    rates = [float(r) for r in rep.rates()]
    total = float(sum(rates))
    acc = []
    run = 0.0
    for r in rates:
        run += r
        acc.append(run)
    return np.asarray(acc), total


def sample_event_log(rep, s, u, seed):
    """Poisson log with intensity r_m dt per map; deterministic in seed."""
    if u < s:
        raise FlowError("horizon must satisfy s <= u")
    cum, total = _cum_rates(rep)
    times, ids = kernel.sample_log(seed, total, cum, float(s), float(u))
    return EventLog(
        s=float(s),
        u=float(u),
        times=tuple(times),
        map_ids=tuple(ids),
        rng_seed=seed,
    )


def flow_eval(log, rep, s, t, x, side="right"):
    """X_{s,t}(x) (side="right", events in (s,t]) or the left limit
    X_{s,t-} (side="left", events in (s,t))."""
    if side not in ("left", "right"):
        raise FlowError(f"side must be left or right, not {side!r}")
    if not (log.s <= s <= t <= log.u):
        raise FlowError("evaluation window outside the log horizon")
    idx = log.restrict(s, t, right_closed=(side == "right"))
    for i in idx:
        x = rep.entries[log.map_ids[i]][0].img[x]
    return x


@dataclass(frozen=True)
class DualEventLog:
    """The reversed log: event (m, t) becomes (dual of m, -t)."""

    s: float
    u: float
    times: tuple      # ascending negated times
    map_ids: tuple    # original map indices, to be applied as duals
    source: EventLog

    def __len__(self):
        return len(self.times)


def dual_event_log(log, dualizer=None):
    """Negate and re-sort the times; `dualizer` (map index -> anything) is
    applied eagerly only to surface failures early, the log itself keeps
    indices."""
    if dualizer is not None:
        for k in sorted(set(log.map_ids)):
            dualizer(k)
    times = tuple(-t for t in reversed(log.times))
    ids = tuple(reversed(log.map_ids))
    return DualEventLog(
        s=-log.u, u=-log.s, times=times, map_ids=ids, source=log
    )


@dataclass(frozen=True)
class ConstancyReport:
    ok: bool
    violating_t: float | None
    values: tuple

    def __bool__(self):
        return self.ok


def check_pathwise_constancy(
    log, rep, dual_apply, pair_value, x, y0, s=None, u=None
):
    """Verify that psi(X_{s,t-}(x), Y_{-u,-t}(y0)) does not move.

    The function is evaluated at t = s, at every event time, and at t = u;
    `dual_apply(map_index, dual_state)` steps the dual flow and
    `pair_value(state, dual_state)` scores the pairing (so the same code
    verifies both the one-element dual of additive systems and the
    set-valued duals of monotone ones).  The endpoint identity
    psi(x, Y_{-u,-s}(y0)) = psi(X_{s,u}(x), y0) is asserted as well.
    """
    s = log.s if s is None else s
    u = log.u if u is None else u
    if not (log.s <= s <= u <= log.u):
        raise FlowError("window outside the log horizon")
    idx = log.restrict(s, u)
    checkpoints = [s] + [log.times[i] for i in idx] + [u]

    values = []
    for t in checkpoints:
        xs = x
        for i in idx:
            if s < log.times[i] < t:
                xs = rep.entries[log.map_ids[i]][0].img[xs]
        yd = y0
        for i in reversed(idx):
            if t <= log.times[i] < u:
                yd = dual_apply(log.map_ids[i], yd)
        values.append(pair_value(xs, yd))
    ok = all(v == values[0] for v in values)
    violating = None
    if not ok:
        violating = checkpoints[
            next(i for i, v in enumerate(values) if v != values[0])
        ]
        return ConstancyReport(False, violating, tuple(values))

    # endpoint identity: pairing against the fully evolved opposite side
    x_end = x
    for i in idx:
        x_end = rep.entries[log.map_ids[i]][0].img[x_end]
    y_end = y0
    for i in reversed(idx):
        if log.times[i] < u:
            y_end = dual_apply(log.map_ids[i], y_end)
    if pair_value(x, y_end) != pair_value(x_end, y0):
        return ConstancyReport(False, u, tuple(values))
    return ConstancyReport(True, None, tuple(values))


@dataclass(frozen=True)
class McResult:
    mean_lhs: float
    mean_rhs: float
    stderr: float
    n: int

    def to_json(self):
        return {
            "mean_lhs": self.mean_lhs,
            "mean_rhs": self.mean_rhs,
            "stderr": self.stderr,
            "n": self.n,
        }


def _mc_chunk(args):
    (imgs_x, imgs_y, cum, total, t, x0, y0, psi, count, seed_x, seed_y) = args
    lhs = rhs = 0
    for i in range(count):
        _, ids = kernel.sample_log(seed_x + i, total, cum, 0.0, t)
        xt = x0
        for k in ids:
            xt = imgs_x[k][xt]
        lhs += psi[xt][y0]
        _, ids = kernel.sample_log(seed_y + i, total, cum, 0.0, t)
        yt = y0
        for k in ids:
            yt = imgs_y[k][yt]
        rhs += psi[x0][yt]
    return lhs, rhs


def monte_carlo_duality(
    rep, dual_imgs, psi, x0, y0, t, n, seed, jobs=1
):
    """Independent simulations of both sides of the duality identity.

    `dual_imgs` is the dual dynamics as one image row per map (over
    whatever index space y0 and the psi columns use: S' for additive
    duals, a reachability closure for set-valued ones).  Replica i uses
    seed+i for the forward run and seed+n+i for the dual run, so results
    do not depend on `jobs`.  Returns means and the pooled standard error
    of the difference; significance rules are the caller's business.
    """
    if n < 1:
        raise FlowError("need at least one replica")
    cum, total = _cum_rates(rep)
    psi = np.asarray(psi, dtype=np.int8)
    if not rep.entries:
        value = float(psi[x0][y0])
        return McResult(value, value, 0.0, n)
    imgs_x = np.asarray([m.img for m in rep.maps()], dtype=np.int64)
    imgs_y = np.asarray(dual_imgs, dtype=np.int64)
    if imgs_x.shape[0] != imgs_y.shape[0]:
        raise FlowError("dual must provide one image row per map")

    if jobs <= 1:
        lhs, rhs = kernel.mc_duality(
            imgs_x, imgs_y, cum, total, float(t), int(x0), int(y0), psi,
            int(n), seed,
        )
    else:
        bounds = [n * j // jobs for j in range(jobs + 1)]
        tasks = []
        px = imgs_x.tolist()
        py = imgs_y.tolist()
        pp = psi.tolist()
        for j in range(jobs):
            lo, hi = bounds[j], bounds[j + 1]
            tasks.append(
                (px, py, cum, total, float(t), int(x0), int(y0), pp,
                 hi - lo, seed + lo, seed + n + lo)
            )
        lhs = rhs = 0
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for a, b in pool.map(_mc_chunk, tasks):
                lhs += a
                rhs += b

    mean_lhs = lhs / n
    mean_rhs = rhs / n
    var_lhs = mean_lhs * (1 - mean_lhs)
    var_rhs = mean_rhs * (1 - mean_rhs)
    stderr = math.sqrt((var_lhs + var_rhs) / n)
    return McResult(mean_lhs, mean_rhs, stderr, n)


# -- adapters for the two dual styles -------------------------------------


def additive_pathwise(d, rep, dual_rep):
    """(dual_apply, pair_value) pair for one-element dual states."""
    duals = [m.img for m, _ in dual_rep.entries]
    psi = d.psi_table()

    def dual_apply(k, y):
        return duals[k][y]

    def pair_value(x, y):
        return int(psi[x, y])

    return dual_apply, pair_value


def monotone_pathwise(d, rep, variant="star"):
    """(dual_apply, pair_value) for set-valued dual states under phi."""
    from . import duality as du

    fn = du.dual_variant_fn(variant)
    maps = rep.maps()

    def dual_apply(k, b):
        return fn(d, maps[k], b)

    def pair_value(x, b):
        return du.phi_value(d, x, b)

    return dual_apply, pair_value
