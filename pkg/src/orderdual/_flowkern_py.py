"""Pure-Python flow kernels: the reference implementation the compiled
extension must match bit for bit.

RNG is splitmix64: state advances by adding 0x9E3779B97F4A7C15; output is
the state mixed by two xor-shift-multiply rounds with constants
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB and a final 31-bit xor-shift.
Unit doubles take the top 53 bits.  The generator, the draw order
(count, times, map picks, tie redraws) and the float arithmetic are the
portability contract: any implementation following them reproduces every
trace exactly.
"""

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)

BACKEND = "python"


def unit_stream(seed):
    """Infinite stream of doubles in [0, 1) from a 64-bit seed."""
    state = seed & _MASK
    while True:
        state = (state + _GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        z ^= z >> 31
        yield (z >> 11) * _INV53


def _poisson(draw, lam):
    """Knuth multiplication method; lam is kept below ~700 by chunking in
    the caller so the running product cannot underflow to zero."""
    target = math.exp(-lam)
    k = 0
    prod = draw()
    while prod > target:
        k += 1
        prod *= draw()
    return k


_CHUNK_RATE = 500.0


def sample_log(seed, total_rate, cum_rates, s, u):
    """One Poisson event log on (s, u): (times, map_ids), times strictly
    increasing and strictly inside the interval.

    Draw order per chunk: event count, then all times, then all map picks;
    colliding or boundary-touching times are redrawn (times only) until
    distinct.  Long horizons are split into sub-intervals of expected
    count <= 500 and concatenated, which preserves the Poisson law.
    """
    length = u - s
    if total_rate <= 0.0 or length <= 0.0:
        return [], []
    n_chunks = max(1, math.ceil(total_rate * length / _CHUNK_RATE))
    stream = unit_stream(seed)
    draw = lambda: next(stream)
    times = []
    ids = []
    n_maps = len(cum_rates)
    for c in range(n_chunks):
        lo = s + length * c / n_chunks
        hi = s + length * (c + 1) / n_chunks
        lam = total_rate * (hi - lo)
        count = _poisson(draw, lam)
        while True:
            chunk_times = [lo + draw() * (hi - lo) for _ in range(count)]
            chunk_times.sort()
            ok = all(lo < t < hi for t in chunk_times) and all(
                chunk_times[i] < chunk_times[i + 1] for i in range(count - 1)
            )
            if ok:
                break
        chunk_ids = []
        for _ in range(count):
            r = draw() * total_rate
            k = 0
            while k < n_maps - 1 and cum_rates[k] <= r:
                k += 1
            chunk_ids.append(k)
        times.extend(chunk_times)
        ids.extend(chunk_ids)
    return times, ids


def apply_events(imgs, ids, x):
    """Compose the maps named by `ids` in order, applied to state x."""
    for k in ids:
        x = imgs[k][x]
    return x


def mc_duality(
    imgs_x,
    imgs_y,
    cum_rates,
    total_rate,
    t,
    x0,
    y0,
    psi,
    n_rep,
    seed,
):
    """Monte Carlo estimate of both sides of the duality identity.

    Replica i simulates the forward process from seed+i and, independently,
    the dual process from seed+n_rep+i, each over (0, t], and scores the
    0/1 pairing against the opposite initial state.  Returns the two sums
    of scores (the caller turns them into means and standard errors).
    """
    imgs_x = [[int(v) for v in row] for row in imgs_x]
    imgs_y = [[int(v) for v in row] for row in imgs_y]
    psi = [[int(v) for v in row] for row in psi]
    cum_rates = [float(v) for v in cum_rates]
    sum_lhs = 0
    sum_rhs = 0
    for i in range(n_rep):
        _, ids = sample_log(seed + i, total_rate, cum_rates, 0.0, t)
        xt = apply_events(imgs_x, ids, x0)
        sum_lhs += psi[xt][y0]
        _, ids = sample_log(seed + n_rep + i, total_rate, cum_rates, 0.0, t)
        yt = apply_events(imgs_y, ids, y0)
        sum_rhs += psi[x0][yt]
    return sum_lhs, sum_rhs
