"""Monte Carlo checks of the transport-capacity bounds on concrete networks.

Nodes live in a disk of unit area (radius ``1/sqrt(pi)`` km).  A
transmission set is the group of links active in one slot; a link succeeds
when its SINR, evaluated at the center frequency of its band, reaches
``beta``.  Links in different bands do not interfere.

The bounds are derived from the fact that, in every feasible set and band,

    sum_i d_i^alpha * a^d_i <= gamma_alpha * (beta + 1) / beta,
    gamma_alpha = (2/sqrt(pi))^alpha * a^(2/sqrt(pi)),

with ``d_i`` the length of link ``i``.  ``verify_sum_inequality`` returns the
slack of that inequality and ``measure_transport`` the bit-meters per second
a schedule actually delivers.  Bit accounting here is slot based: a hop moves
up to ``W * slot_duration`` bits of one flow, and bits count once they reach
the flow's destination, credited with the source-destination distance.
"""

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .bands import BandPlan, band_of_frequency, make_plan
from .bounds import MultiBandScenario, NarrowbandScenario, bound_fixed_narrowband, bound_multiband
from .channel import ChannelParams, absorption_linear, noise_psd, optimal_center_frequency
from .errors import DerivationViolation, DomainError

RADIUS = 1.0 / math.sqrt(math.pi)
DIAMETER = 2.0 * RADIUS
DEPLOY_MODES = ("uniform-random", "grid", "adversarial-line")


@dataclass(frozen=True)
class Deployment:
    positions: np.ndarray  # (n, 2), km
    dest: tuple

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise DomainError("positions must be an (n, 2) array")
        if np.any(np.hypot(pos[:, 0], pos[:, 1]) > RADIUS * (1 + 1e-12)):
            raise DomainError("every node must lie inside the unit-area disk")
        if len(self.dest) != len(pos) or any(j == i for i, j in enumerate(self.dest)):
            raise DomainError("dest must map every node to a different node")
        object.__setattr__(self, "positions", pos)

    @property
    def n(self):
        return len(self.positions)

    def distance(self, i, j):
        return float(np.hypot(*(self.positions[i] - self.positions[j])))

    def flow_length(self, i):
        """Source-destination distance of node ``i``'s traffic."""
        return self.distance(i, self.dest[i])


def deploy(n, mode="uniform-random", seed=0):
    """Place ``n >= 2`` nodes in the unit-area disk and pick their destinations.

    ``uniform-random`` draws positions and a single-cycle destination
    permutation from ``seed``; ``grid`` takes the ``n`` square-lattice points
    nearest the center; ``adversarial-line`` spreads nodes evenly over a
    diameter and pairs them end to end.  The last two ignore ``seed``.
    """
    if n < 2:
        raise DomainError(f"need at least two nodes, got {n}")
    if mode == "uniform-random":
        rng = np.random.default_rng(seed)
        r = RADIUS * np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        pos = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        perm = rng.permutation(n)
        dest = [0] * n
        for k in range(n):
            dest[perm[k]] = int(perm[(k + 1) % n])
    elif mode == "grid":
        pos = _lattice_points(n)
        dest = [(i + n // 2) % n for i in range(n)]
    elif mode == "adversarial-line":
        x = np.linspace(-RADIUS, RADIUS, n)
        pos = np.column_stack([x, np.zeros(n)])
        dest = [n - 1 - i for i in range(n)]
        if n % 2:
            dest[n // 2] = 0
    else:
        raise DomainError(f"unknown deployment mode {mode!r}; choose from {DEPLOY_MODES}")
    return Deployment(pos, tuple(dest))


def _lattice_points(n):
    spacing = RADIUS * math.sqrt(math.pi / n)
    while True:
        k = int(RADIUS / spacing) + 1
        ax = spacing * np.arange(-k, k + 1)
        xx, yy = np.meshgrid(ax, ax)
        pts = np.column_stack([xx.ravel(), yy.ravel()])
        r = np.hypot(pts[:, 0], pts[:, 1])
        inside = r <= RADIUS
        if inside.sum() >= n:
            pts, r = pts[inside], r[inside]
            order = np.lexsort((np.arctan2(pts[:, 1], pts[:, 0]), np.round(r, 12)))
            return pts[order[:n]]
        spacing *= 0.9


@dataclass(frozen=True)
class BandChannel:
    """Narrowband link budget of one band: constant absorption and noise."""

    alpha: float
    a_f: float
    noise: float
    l_ref: float = 0.001

    @classmethod
    def at_frequency(cls, f_khz, params):
        return cls(params.alpha, absorption_linear(f_khz), noise_psd(f_khz, params), params.l_ref)

    def attenuation(self, d):
        d = np.asarray(d, dtype=float)
        return (d / self.l_ref) ** self.alpha * self.a_f**d

    @property
    def gamma_alpha(self):
        return DIAMETER**self.alpha * self.a_f ** DIAMETER


class Transmission(NamedTuple):
    tx: int
    rx: int
    band: int = 0
    power: float = 1.0
    flow: int = -1  # source whose bits are carried; -1 means tx itself

    @property
    def source(self):
        return self.tx if self.flow < 0 else self.flow


@dataclass(frozen=True)
class TransmissionSet:
    members: tuple
    slot: int = 0

    def __post_init__(self):
        seen = set()
        for m in self.members:
            if m.rx == m.tx:
                raise DomainError(f"node {m.tx} cannot transmit to itself")
            if (m.tx, m.band) in seen:
                raise DomainError(f"node {m.tx} transmits twice in band {m.band}")
            seen.add((m.tx, m.band))

    def __len__(self):
        return len(self.members)

    def by_band(self):
        groups = defaultdict(list)
        for idx, m in enumerate(self.members):
            groups[m.band].append(idx)
        return groups


def _channel_for(channels, band):
    if isinstance(channels, BandChannel):
        return channels
    return channels[band]


def sinr_values(ts, d, channels):
    """SINR of every member, interferers restricted to the member's band."""
    out = np.empty(len(ts))
    pos = d.positions
    for band, idx in ts.by_band().items():
        ch = _channel_for(channels, band)
        tx = np.array([ts.members[i].tx for i in idx])
        rx = np.array([ts.members[i].rx for i in idx])
        power = np.array([ts.members[i].power for i in idx], dtype=float)
        # dist[r, k]: transmitter k to the receiver of member r
        dist = np.hypot(*(pos[tx][None, :, :] - pos[rx][:, None, :]).transpose(2, 0, 1))
        with np.errstate(divide="ignore"):
            received = power[None, :] / ch.attenuation(dist)
        signal = np.diag(received).copy()
        np.fill_diagonal(received, 0.0)
        out[idx] = signal / (ch.noise + received.sum(axis=1))
    return out


def sinr_feasible(ts, d, channels, beta):
    """Per-member success flags: ``SINR >= beta``."""
    return [bool(v) for v in sinr_values(ts, d, channels) >= beta]


def sum_inequality_margin(ts, d, channels, beta):
    """Per-band slack ``gamma_alpha (beta+1)/beta - sum_i d_i^alpha a^d_i``."""
    margins = {}
    for band, idx in ts.by_band().items():
        ch = _channel_for(channels, band)
        lengths = np.array([d.distance(ts.members[i].tx, ts.members[i].rx) for i in idx])
        margins[band] = ch.gamma_alpha * (beta + 1.0) / beta - float(np.sum(lengths**ch.alpha * ch.a_f**lengths))
    return margins


def verify_sum_inequality(ts, d, channels, beta, *, check=False):
    """Smallest per-band slack of the feasible-set inequality.

    An empty set returns the full right-hand side.  With ``check=True`` a
    negative slack raises ``DerivationViolation``.
    """
    margins = sum_inequality_margin(ts, d, channels, beta)
    if not margins:
        chans = [channels] if isinstance(channels, BandChannel) else list(channels.values())
        return min(ch.gamma_alpha * (beta + 1.0) / beta for ch in chans)
    margin = min(margins.values())
    if check and margin < 0:
        raise DerivationViolation(f"feasible set violates the sum inequality by {-margin!r} (slot {ts.slot})")
    return margin


def random_feasible_set(d, channel, beta, rng, *, max_links=6, power_range=(1.0, 1e3), near_prob=0.5, slot=0):
    """Draw a random transmission set and prune it until every link is feasible.

    Transmitters and powers (log-uniform over ``power_range`` times the power
    that just closes the longest possible link) are random; each receiver is
    the nearest free node with probability ``near_prob``, else a random one;
    the member with the worst SINR is dropped until the rest pass.  Every
    node takes part in at most one link.
    """
    k = int(rng.integers(1, max(1, min(max_links, d.n // 2)) + 1))
    order = rng.permutation(d.n)
    tx = [int(i) for i in order[:k]]
    free = [int(i) for i in order[k:]]
    rx = []
    for i in tx:
        if rng.random() < near_prob:
            # short links make multi-link feasible sets common
            j = min(free, key=lambda c: d.distance(i, c))
        else:
            j = free[int(rng.integers(len(free)))]
        free.remove(j)
        rx.append(j)
    base = beta * channel.noise * float(channel.attenuation(DIAMETER))
    lo, hi = np.log(power_range[0]), np.log(power_range[1])
    powers = base * np.exp(rng.uniform(lo, hi, size=k))
    members = [Transmission(tx[i], rx[i], 0, float(powers[i])) for i in range(k)]
    while members:
        ts = TransmissionSet(tuple(members), slot)
        sinr = sinr_values(ts, d, channel)
        if np.all(sinr >= beta):
            return ts
        members.pop(int(np.argmin(sinr)))
    return TransmissionSet((), slot)


class TransportMeasurement(NamedTuple):
    transport: float  # bit-meters/s, with distances in km
    delivered_bits: float
    hops: int
    max_hops_per_slot: int
    horizon: float


def measure_transport(schedule, d, w_rate, *, slot_duration=1.0, horizon_slots=None):
    """Transport actually achieved by a schedule, ``sum(bits * L) / T``.

    Sources hold an infinite backlog of their own flow; relays forward only
    bits received in earlier slots.  Bits still in flight after the horizon
    are not counted.
    """
    slots = list(schedule) if horizon_slots is None else list(schedule)[:horizon_slots]
    horizon = len(slots) * slot_duration
    if horizon <= 0:
        return TransportMeasurement(0.0, 0.0, 0, 0, 0.0)
    per_hop = w_rate * slot_duration
    queue = defaultdict(float)
    delivered = defaultdict(float)
    hops = 0
    max_hops = 0
    for ts in slots:
        moves = []
        for m in ts.members:
            src = m.source
            have = math.inf if m.tx == src else queue[(m.tx, src)]
            amount = min(per_hop, have)
            if amount > 0:
                moves.append((m, src, amount))
        for m, src, amount in moves:
            if m.tx != src:
                queue[(m.tx, src)] -= amount
            if m.rx == d.dest[src]:
                delivered[src] += amount
            else:
                queue[(m.rx, src)] += amount
        hops += len(moves)
        max_hops = max(max_hops, len(moves))
    bit_meters = sum(bits * d.flow_length(src) for src, bits in delivered.items())
    return TransportMeasurement(bit_meters / horizon, sum(delivered.values()), hops, max_hops, horizon)


def greedy_schedule(d, channels, beta, slots, *, power, band_of=None):
    """Direct source-to-destination schedule, one greedy maximal set per slot.

    Each slot visits the links least served so far first, longest first
    among equals, and keeps a link when the set stays feasible with it.  A
    node takes part in at most one link per slot.  ``band_of(i)`` gives the
    band of flow ``i`` (band 0 when omitted).
    """
    n = d.n
    lengths = [d.flow_length(i) for i in range(n)]
    bands = [0 if band_of is None else band_of(i) for i in range(n)]
    served = [0] * n
    schedule = []
    for slot in range(slots):
        order = sorted(range(n), key=lambda i: (served[i], -lengths[i], i))
        busy = set()
        members = []
        for i in order:
            j = d.dest[i]
            if i in busy or j in busy:
                continue
            trial = members + [Transmission(i, j, bands[i], power, i)]
            ts = TransmissionSet(tuple(trial), slot)
            if all(sinr_feasible(ts, d, channels, beta)):
                members = trial
                busy.update((i, j))
        for m in members:
            served[m.tx] += 1
        schedule.append(TransmissionSet(tuple(members), slot))
    return schedule


@dataclass(frozen=True)
class SimConfig:
    """One simulation run.

    With ``multiband`` off, every link shares the first band of ``plan`` and
    the absorption there is ``a_f`` (or Thorp's value at the band center
    when ``a_f`` is None).  With ``multiband`` on, each link is assigned the
    band holding its optimal center frequency and ``w_rate`` is the per-band
    rate.
    """

    n: int
    alpha: float = 1.0
    beta: float = 2.0
    plan: BandPlan = field(default_factory=lambda: make_plan(10.0, 12.0, 2.0))
    slots: int = 20
    seed: int = 0
    w_rate: float = 1.0
    a_f: float = None
    noise: float = 1.0
    snr_margin: float = 10.0
    mode: str = "uniform-random"
    multiband: bool = False

    def __post_init__(self):
        if self.n < 2 or self.slots < 1:
            raise DomainError("need n >= 2 nodes and at least one slot")
        if not self.beta > 0 or not self.alpha >= 1 or not self.w_rate > 0:
            raise DomainError("beta and W must be > 0 and alpha >= 1")


def _channels(config, params):
    if not config.multiband:
        f = config.plan.bands[0].center
        a_f = absorption_linear(f) if config.a_f is None else config.a_f
        return {0: BandChannel(config.alpha, a_f, config.noise, params.l_ref)}
    return {
        m: BandChannel(config.alpha, absorption_linear(b.center), config.noise, params.l_ref)
        for m, b in enumerate(config.plan.bands)
    }


def run_simulation(config, params=None):
    """Deploy, schedule greedily, and compare against the matching bound.

    Returns the JSON-lines run record as a dict.
    """
    if params is None:
        params = ChannelParams(alpha=config.alpha)
    d = deploy(config.n, config.mode, config.seed)
    channels = _channels(config, params)
    worst = max(channels.values(), key=lambda ch: float(ch.attenuation(DIAMETER)))
    power = config.snr_margin * config.beta * config.noise * float(worst.attenuation(DIAMETER))

    band_of = None
    if config.multiband:
        fc = [optimal_center_frequency(d.flow_length(i), params) for i in range(d.n)]
        band_of = lambda i: band_of_frequency(fc[i], config.plan, clamp=True)

    schedule = greedy_schedule(d, channels, config.beta, config.slots, power=power, band_of=band_of)
    margin_min = min(verify_sum_inequality(ts, d, channels, config.beta) for ts in schedule)
    achieved = measure_transport(schedule, d, config.w_rate)

    if config.multiband:
        a_values = [channels[m].a_f for m in sorted(channels)]
        bound = bound_multiband(MultiBandScenario(config.n, config.alpha, config.beta, config.w_rate, a_values))
        a_report = min(a_values)
    else:
        a_report = channels[0].a_f
        bound = bound_fixed_narrowband(NarrowbandScenario(config.n, config.alpha, config.beta, config.w_rate, a_report))
    return {
        "seed": config.seed,
        "n": config.n,
        "alpha": config.alpha,
        "beta": config.beta,
        "a_f": a_report,
        "margin_min": margin_min,
        "transport_achieved": achieved.transport,
        "transport_bound": bound.transport_bound,
    }
