"""Path simulation under ``P^x`` and the diagnostics built on it.

All randomness comes from :mod:`gchains.rng`; replica ``r`` of stream ``s``
only ever reads the uniforms keyed ``(seed, s, r, step)``.
"""

from __future__ import annotations

import bisect
import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import AlphabetInfinite, BudgetExceeded, IncompatibleSupports, TolUnachievable
from .intervals import Interval
from .kernel import DEFAULT_NODE_BUDGET, Kernel, _word_prob, paired_rows, propagate
from .rng import replica_uniforms, uniforms
from .words import PastSpec

CHUNK = 1024
MAX_WINDOW = 1024


@dataclass(frozen=True)
class SimConfig:
    seed: int
    replicas: int = 1
    horizon: int = 1000
    burn_in: int = 0
    tol: float = 1e-12
    stream: int = 0

    def __post_init__(self):
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")

    def to_json(self) -> dict:
        return asdict(self)


class Sampler:
    """Inverse-CDF sampling from renormalized row midpoints.

    Rows of collapsible kernels are cached per state.
    """

    def __init__(self, kernel: Kernel, tol: float):
        self.kernel = kernel
        self.tol = tol
        self.cache = {} if kernel.collapsible else None

    def table(self, state):
        if self.cache is not None:
            hit = self.cache.get(state)
            if hit is not None:
                return hit
        row = self.kernel.row(state, self.tol)
        mids = []
        for p in row.probs:
            if p.width > self.tol:
                raise TolUnachievable(f"{self.kernel.tag}: width {p.width:g} exceeds tol {self.tol:g}")
            mids.append(p.mid)
        cum = list(itertools.accumulate(mids))
        defect = abs(1.0 - cum[-1]) + row.tail_mass if cum else 1.0
        out = (row.symbols, cum, defect)
        if self.cache is not None:
            self.cache[state] = out
        return out

    def draw(self, state, u: float) -> tuple[int, float]:
        symbols, cum, defect = self.table(state)
        i = bisect.bisect_right(cum, u * cum[-1])
        return symbols[min(i, len(symbols) - 1)], defect


@dataclass
class Path:
    symbols: tuple
    defect: float  # largest per-step gap between the sampled row and a probability vector

    def __len__(self) -> int:
        return len(self.symbols)


def _run(kernel: Kernel, sampler: Sampler, state, us: np.ndarray, out: list) -> tuple:
    worst = 0.0
    for u in us:
        a, d = sampler.draw(state, float(u))
        worst = max(worst, d)
        out.append(a)
        state = kernel.state_update(state, a)
    return state, worst


def simulate_path(
    kernel: Kernel,
    past: PastSpec,
    length: int,
    seed: int = 0,
    *,
    stream: int = 0,
    replica: int = 0,
    burn_in: int = 0,
    tol: float = 1e-12,
) -> Path:
    """A path of ``length`` symbols drawn from ``P^past`` (after discarding
    ``burn_in`` symbols)."""
    if length < 1:
        raise ValueError("length must be >= 1")
    sampler = Sampler(kernel, tol)
    state = kernel.state_init(past)
    out: list = []
    worst = 0.0
    total = burn_in + length
    for start in range(0, total, CHUNK):
        us = replica_uniforms(seed, stream, replica, start, min(CHUNK, total - start))
        state, d = _run(kernel, sampler, state, us, out)
        worst = max(worst, d)
    return Path(tuple(out[burn_in:]), worst)


def simulate_paths(kernel: Kernel, past: PastSpec, length: int, config: SimConfig) -> list[Path]:
    sampler = Sampler(kernel, config.tol)
    init = kernel.state_init(past)
    us = uniforms(config.seed, config.stream, np.arange(config.replicas), np.arange(length))
    paths = []
    for r in range(config.replicas):
        out: list = []
        _, d = _run(kernel, sampler, init, us[r], out)
        paths.append(Path(tuple(out), d))
    return paths


# -- hitting times --------------------------------------------------------------


@dataclass
class HittingReport:
    samples: list  # hitting time or None for a timeout
    cap: int

    @property
    def hits(self) -> list:
        return [t for t in self.samples if t is not None]

    @property
    def empirical_mean(self) -> float:
        h = self.hits
        return float(np.mean(h)) if h else math.nan

    @property
    def standard_error(self) -> float:
        h = self.hits
        return float(np.std(h, ddof=1) / math.sqrt(len(h))) if len(h) > 1 else math.nan

    @property
    def timeout_fraction(self) -> float:
        return 1.0 - len(self.hits) / len(self.samples)

    def to_json(self) -> dict:
        return {
            "cap": self.cap,
            "replicas": len(self.samples),
            "empirical_mean": self.empirical_mean,
            "standard_error": self.standard_error,
            "timeout_fraction": self.timeout_fraction,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["replica", "hitting_time"])
        for r, t in enumerate(self.samples):
            w.writerow([r, "timeout" if t is None else t])
        return buf.getvalue()


def _first_entrance(kernel, sampler, state, window: tuple, p_k: set, cap: int, cfg: SimConfig, replica, head):
    """``head`` holds this replica's first uniforms; later ones are drawn
    on demand from the same keys."""
    K = len(window)
    win = list(window)
    m = 0
    us = head[: min(len(head), cap)]
    while m < cap:
        for u in us:
            a, _ = sampler.draw(state, float(u))
            state = kernel.state_update(state, a)
            m += 1
            if K:
                win.append(a)
                del win[0]
            if tuple(win) in p_k:
                return m
        if m < cap:
            us = replica_uniforms(cfg.seed, cfg.stream, replica, m, min(CHUNK, cap - m))
    return None


HEAD = 32
BATCH = 4096


def hitting_time(kernel: Kernel, past: PastSpec, p_k, K: int, cap: int, config: SimConfig) -> HittingReport:
    """Samples of ``T = inf{m >= 1 : eta_{m-K+1}^m in p_k}``.

    The window at time ``m < K`` still contains ``K - m`` symbols of the
    past, so ``T = 1`` whenever ``p_k`` is all of ``A^K``.
    """
    p_k = {tuple(w) for w in p_k}
    if not p_k:
        raise ValueError("p_k must be nonempty")
    if cap < K:
        raise ValueError("cap must be >= K")
    sampler = Sampler(kernel, config.tol)
    init = kernel.state_init(past)
    window = past.suffix(K)
    samples = []
    for lo in range(0, config.replicas, BATCH):
        reps = np.arange(lo, min(lo + BATCH, config.replicas))
        head = uniforms(config.seed, config.stream, reps, np.arange(HEAD))
        for i, r in enumerate(reps):
            samples.append(_first_entrance(kernel, sampler, init, window, p_k, cap, config, int(r), head[i]))
    return HittingReport(samples, cap)


@dataclass
class DecompositionReport:
    total_mass: Interval
    passed: bool
    exact_steps: int
    exact_mass: Interval
    residual: Interval
    residual_kind: str  # exact | monte_carlo

    def to_json(self) -> dict:
        return {
            "total_mass": [self.total_mass.lo, self.total_mass.hi],
            "pass": self.passed,
            "exact_steps": self.exact_steps,
            "exact_mass": [self.exact_mass.lo, self.exact_mass.hi],
            "residual": [self.residual.lo, self.residual.hi],
            "residual_kind": self.residual_kind,
        }


def hitting_decomposition_check(
    kernel: Kernel,
    past: PastSpec,
    p_k,
    K: int,
    cap: int,
    config: SimConfig,
    tol: float = 1e-9,
    budget: int = 10**5,
) -> DecompositionReport:
    """Check that first-entrance masses ``P[eta_1^n = y, T = n]`` for
    ``n <= cap`` plus ``P[T > cap]`` add up to 1.

    First-entrance words are enumerated exactly while the node count stays
    within ``budget``; if enumeration stops at ``n_e < cap`` the mass
    ``P[T > n_e]`` is estimated by simulation and the check widens by three
    standard errors.
    """
    p_k = {tuple(w) for w in p_k}
    if past.suffix(K) in p_k:
        raise ValueError("past must not end in p_k")
    ktol = min(config.tol, 1e-12)
    nodes = [(kernel.state_init(past), past.suffix(K), 1.0, 1.0)]
    entered_lo = entered_hi = 0.0
    lost = 0.0
    steps = 0
    while steps < cap and nodes:
        merged: dict = {}
        out = []
        for s, win, lo, hi in nodes:
            row = kernel.row(s, ktol)
            lost += hi * row.tail_mass
            for a, p in zip(row.symbols, row.probs):
                if p.is_zero:
                    continue
                w2 = (win + (a,))[1:] if K else win
                plo, phi = lo * p.lo, hi * p.hi
                if w2 in p_k:
                    entered_lo += plo
                    entered_hi += phi
                    continue
                s2 = kernel.state_update(s, a)
                if kernel.collapsible:
                    acc = merged.setdefault((s2, w2), [s2, w2, 0.0, 0.0])
                    acc[2] += plo
                    acc[3] += phi
                else:
                    out.append((s2, w2, plo, phi))
        nodes = [tuple(v) for v in merged.values()] if kernel.collapsible else out
        steps += 1
        if len(nodes) > budget:
            break
    exact = Interval(entered_lo, entered_hi + lost)
    if steps >= cap or not nodes:
        rest = Interval(math.fsum(n[2] for n in nodes), math.fsum(n[3] for n in nodes) + lost)
        total = exact + rest
        return DecompositionReport(total, total.contains(1.0, tol), steps, exact, rest, "exact")
    # Monte-Carlo estimate of P[T > steps]
    rep = hitting_time(kernel, past, p_k, K, cap, config)
    late = sum(1 for t in rep.samples if t is None or t > steps)
    n = len(rep.samples)
    phat = late / n
    se = math.sqrt(max(phat * (1 - phat), 1.0 / n) / n)
    rest = Interval(max(0.0, phat - 3 * se), min(1.0, phat + 3 * se))
    total = exact + rest
    return DecompositionReport(total, total.contains(1.0, tol), steps, exact, rest, "monte_carlo")


# -- ACS d_k series -----------------------------------------------------------


@dataclass
class DkSeries:
    ks: np.ndarray  # 2 .. horizon
    dk: np.ndarray  # (replicas, len(ks))
    contexts: np.ndarray  # (replicas, len(ks), 2): last two shared symbols before step n + k
    n_offset: int
    use_sqrt: bool
    verdict: str  # summable_evidence | diverging_evidence | inconclusive
    gamma_scale: float | None = None  # 1 / (4 gamma) for the plain variant
    paths: list = field(default_factory=list)

    @property
    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.dk, axis=1)

    def to_json(self) -> dict:
        ps = self.partial_sums
        return {
            "n_offset": self.n_offset,
            "use_sqrt": self.use_sqrt,
            "verdict": self.verdict,
            "replicas": int(self.dk.shape[0]),
            "horizon": int(self.ks[-1]) if len(self.ks) else 1,
            "mean_partial_sum": float(ps[:, -1].mean()) if ps.size else 0.0,
            "max_partial_sum": float(ps[:, -1].max()) if ps.size else 0.0,
            "gamma_scale": self.gamma_scale,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "mean_dk", "max_dk", "mean_partial_sum"])
        ps = self.partial_sums
        for j, k in enumerate(self.ks):
            w.writerow([int(k), repr(float(self.dk[:, j].mean())), repr(float(self.dk[:, j].max())), repr(float(ps[:, j].mean()))])
        return buf.getvalue()


def _dk_from_rows(px, py, use_sqrt: bool) -> float:
    total = 0.0
    for p, q in zip(px, py):
        a, b = p.mid, q.mid
        if p.is_zero and q.is_zero:
            continue  # 0/0 = 0
        d = math.sqrt(a) - math.sqrt(b) if use_sqrt else a - b
        total += d * d
    return total


def _support_clash(px, py) -> bool:
    return any(q.is_zero and not p.is_zero for p, q in zip(px, py))


def _dk_replica(kernel, sampler, x, y, n, horizon, use_sqrt, config, r):
    """One replica: returns (dk list, contexts, path) or None on a support clash."""
    tol = config.tol
    sx, sy = kernel.state_init(x), kernel.state_init(y)
    length = n + horizon - 1
    us = replica_uniforms(config.seed, config.stream, r, 0, length)
    dks, ctxs, path = [], [], []
    prev = (x.lag(1), x.lag(0))
    for L in range(length + 1):
        k = L - n + 1
        if k >= 1:
            syms, px, py, _ = paired_rows(kernel, sx, sy, tol)
            if _support_clash(px, py):
                return None
            if k >= 2:
                dks.append(_dk_from_rows(px, py, use_sqrt))
                ctxs.append(prev)
        if L == length:
            break
        a, _ = sampler.draw(sx, float(us[L]))
        path.append(a)
        prev = (prev[1], a)
        sx, sy = kernel.state_update(sx, a), kernel.state_update(sy, a)
    return dks, ctxs, path


def acs_dk_series(
    kernel: Kernel,
    x: PastSpec,
    y: PastSpec,
    n: int | None = None,
    horizon: int = 40,
    use_sqrt: bool = True,
    config: SimConfig | None = None,
    verdict_tol: float = 1e-6,
) -> DkSeries:
    """Sample ``w`` from ``P^x`` and compute, for ``k = 2..horizon``,

        d_k(w) = sum_a (h(x w_1^{n+k-1} a) - h(y w_1^{n+k-1} a))**2

    with ``h = sqrt(g)`` (or ``h = g`` when ``use_sqrt`` is false) and the
    convention 0/0 = 0.  When a sampled step has ``g(y w a) = 0 < g(x w a)``
    the window start ``n`` is doubled (starting from 1 when not given) up to
    1024; past that :class:`IncompatibleSupports` is raised.
    """
    if horizon < 2:
        raise ValueError("horizon must be >= 2")
    config = config or SimConfig(seed=0, replicas=100)
    sampler = Sampler(kernel, config.tol)
    n = 1 if n is None else n
    if n < 0:
        raise ValueError("n must be >= 0")
    while True:
        rows = []
        for r in range(config.replicas):
            res = _dk_replica(kernel, sampler, x, y, n, horizon, use_sqrt, config, r)
            if res is None:
                break
            rows.append(res)
        if len(rows) == config.replicas:
            break
        n = max(1, 2 * n)
        if n > MAX_WINDOW:
            raise IncompatibleSupports(f"supports still differ with window start {MAX_WINDOW}")
    dk = np.array([r[0] for r in rows], dtype=float).reshape(config.replicas, horizon - 1)
    ctx = np.array([r[1] for r in rows], dtype=np.int64).reshape(config.replicas, horizon - 1, 2)
    ks = np.arange(2, horizon + 1)
    gamma = None if use_sqrt or not kernel.positive_floor else 1.0 / (4.0 * kernel.positive_floor)
    return DkSeries(ks, dk, ctx, n, use_sqrt, _dk_verdict(dk, verdict_tol), gamma, [r[2] for r in rows])


def _dk_verdict(dk: np.ndarray, tol: float) -> str:
    """Heuristic only: finite horizons cannot certify convergence."""
    m = dk.shape[1]
    if m < 2:
        return "inconclusive"
    half = m // 2
    late = dk[:, half:].sum(axis=1)
    early = dk[:, :half].sum(axis=1)
    if np.mean(late < tol) >= 0.95:
        return "summable_evidence"
    if np.median(late) >= np.median(early) > 0:
        return "diverging_evidence"
    return "inconclusive"


# -- total variation -----------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloTV:
    config: SimConfig


@dataclass
class TVReport:
    value: Interval
    mode: str
    standard_error: float | None = None

    def to_json(self) -> dict:
        return {"tv": [self.value.lo, self.value.hi], "mode": self.mode, "standard_error": self.standard_error}


def _window_law(kernel, past, start, length, tol, budget):
    nodes, lost = propagate(kernel, kernel.state_init(past), start, tol, budget)
    law = {}
    for v in itertools.product(kernel.alphabet.symbols(), repeat=length):
        lo = hi = 0.0
        for s, mlo, mhi in nodes:
            wlo, whi = _word_prob(kernel, s, v, tol)
            lo += mlo * wlo
            hi += mhi * whi
        law[v] = (lo, hi + lost)
    return law


def tv_window(
    kernel: Kernel,
    x: PastSpec,
    y: PastSpec,
    window_start: int,
    window_len: int,
    mode="exact",
    tol: float = 1e-12,
    budget: int = DEFAULT_NODE_BUDGET,
) -> TVReport:
    """Total variation between the laws of ``eta_{n+1}^{n+len}`` under
    ``P^x`` and ``P^y`` (``n = window_start``)."""
    if window_len < 1 or window_start < 0:
        raise ValueError("need window_len >= 1 and window_start >= 0")
    if mode == "exact":
        if not kernel.alphabet.is_finite:
            raise AlphabetInfinite("exact TV needs a finite alphabet")
        if kernel.alphabet.size**window_len > budget:
            raise BudgetExceeded("too many window words")
        lx = _window_law(kernel, x, window_start, window_len, tol, budget)
        ly = _window_law(kernel, y, window_start, window_len, tol, budget)
        total = Interval(0.0, 0.0)
        for v in lx:
            total = total + (Interval(*lx[v]) - Interval(*ly[v])).abs()
        half = total.scale(0.5)
        return TVReport(Interval(max(0.0, half.lo), min(1.0, half.hi)), "exact")
    if not isinstance(mode, MonteCarloTV):
        raise ValueError(f"unknown mode {mode!r}")
    cfg = mode.config
    fx = _window_hist(kernel, x, window_start, window_len, SimConfig(cfg.seed, cfg.replicas, stream=2 * cfg.stream, tol=cfg.tol))
    fy = _window_hist(kernel, y, window_start, window_len, SimConfig(cfg.seed, cfg.replicas, stream=2 * cfg.stream + 1, tol=cfg.tol))
    N = cfg.replicas
    tv = 0.0
    se = 0.0
    for v in set(fx) | set(fy):
        a, b = fx.get(v, 0) / N, fy.get(v, 0) / N
        tv += abs(a - b)
        se += math.sqrt((a * (1 - a) + b * (1 - b)) / N)
    return TVReport(Interval.point(0.5 * tv), "monte_carlo", 0.5 * se)


def _window_hist(kernel, past, start, length, cfg: SimConfig) -> dict:
    hist: dict = {}
    for p in simulate_paths(kernel, past, start + length, cfg):
        w = p.symbols[start:]
        hist[w] = hist.get(w, 0) + 1
    return hist


# -- stationary statistics -------------------------------------------------------


def empirical_cylinder_distribution(kernel: Kernel, past: PastSpec, cyl_len: int, config: SimConfig) -> dict:
    """Frequencies of the length-``cyl_len`` windows along one path of
    ``config.horizon`` symbols after ``config.burn_in``."""
    if cyl_len < 1:
        raise ValueError("cyl_len must be >= 1")
    path = simulate_path(
        kernel, past, config.horizon, config.seed, stream=config.stream, burn_in=config.burn_in, tol=config.tol
    ).symbols
    counts: dict = {}
    total = len(path) - cyl_len + 1
    for i in range(total):
        w = path[i:i + cyl_len]
        counts[w] = counts.get(w, 0) + 1
    return {w: c / total for w, c in sorted(counts.items())}
