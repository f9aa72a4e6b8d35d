"""Zero structure: bound matrices, e.r.i. decision, assumptions (B) and (C).

Words of length ``K`` are tuples of symbol indices, oldest symbol first,
and index the matrices in lexicographic order.  Everything here is driven
by the kernel's :class:`ZeroDeclaration`; numeric smallness never counts as
a zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import AlphabetInfinite, BudgetExceeded, InconsistentBounds
from .kernel import Kernel
from .words import History, PastSpec, format_word

MAX_ROWS = 2**20


@dataclass
class BoolMatrix:
    """Boolean matrix on ``A^K`` with boolean sum and product."""

    data: sparse.csr_matrix
    words: list
    labels: list | None = None

    def __post_init__(self):
        self.data = sparse.csr_matrix(self.data, dtype=bool)
        self.data.eliminate_zeros()
        self.index = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def from_dense(cls, rows, words=None, labels=None) -> "BoolMatrix":
        arr = np.asarray(rows, dtype=bool)
        if words is None:
            words = list(range(arr.shape[0]))
        return cls(sparse.csr_matrix(arr), list(words), labels)

    @classmethod
    def identity(cls, words, labels=None) -> "BoolMatrix":
        return cls(sparse.identity(len(words), dtype=bool, format="csr"), list(words), labels)

    @property
    def dim(self) -> int:
        return len(self.words)

    def dense(self, order: Sequence | None = None) -> np.ndarray:
        """0/1 array, optionally with rows and columns in the given word order."""
        arr = self.data.toarray().astype(np.uint8)
        if order is None:
            return arr
        idx = [self.index[tuple(w) if not isinstance(w, int) else w] for w in order]
        return arr[np.ix_(idx, idx)]

    def __getitem__(self, key) -> bool:
        u, v = key
        return bool(self.data[self.index[u], self.index[v]])

    def __matmul__(self, other: "BoolMatrix") -> "BoolMatrix":
        prod = self.data.astype(np.int32) @ other.data.astype(np.int32)
        return BoolMatrix(prod > 0, self.words, self.labels)

    def __add__(self, other: "BoolMatrix") -> "BoolMatrix":
        return BoolMatrix(self.data + other.data, self.words, self.labels)

    def __le__(self, other: "BoolMatrix") -> bool:
        return (self.data > other.data).nnz == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolMatrix):
            return NotImplemented
        return self.words == other.words and (self.data != other.data).nnz == 0

    def edges(self) -> list[tuple]:
        coo = self.data.tocoo()
        return sorted((self.words[i], self.words[j]) for i, j in zip(coo.row, coo.col))

    def word_label(self, w) -> str:
        return format_word(w, self.labels)

    def bit_rows(self) -> list[str]:
        return ["".join(str(b) for b in row) for row in self.dense()]

    def to_json(self) -> dict:
        return {
            "words": [self.word_label(w) for w in self.words],
            "rows": self.bit_rows(),
            "edges": [[self.word_label(u), self.word_label(v)] for u, v in self.edges()],
        }


def bool_power(m: BoolMatrix, n: int) -> BoolMatrix:
    """``m**n`` under boolean arithmetic, by repeated squaring."""
    if n < 1:
        raise ValueError("n must be >= 1")
    result = None
    base = m
    while n:
        if n & 1:
            result = base if result is None else result @ base
        n >>= 1
        if n:
            base = base @ base
    return result


# -- bound matrices ---------------------------------------------------------


def _symbols_for(kernel: Kernel, K: int):
    if kernel.alphabet.is_finite:
        return tuple(kernel.alphabet.symbols()), list(kernel.labels) if kernel.labels else None
    quotient = kernel.finite_quotient()
    if quotient is None or K != 1:
        raise AlphabetInfinite("bound matrices need a finite alphabet (or a K = 1 finite quotient)")
    reps, names = quotient
    # matrix words are representatives; labels are indexed by symbol value
    labels = [str(i) for i in range(max(reps) + 1)]
    for r, name in zip(reps, names):
        labels[r] = name
    return tuple(reps), labels


def _rule_hits(zeros, context: tuple, symbol: int, symbols) -> bool:
    """Some extension of ``context`` to the past triggers a rule for ``symbol``."""
    for r in zeros.rules:
        need = r.context_len - len(context)
        if need <= 0:
            if r.predicate(context[len(context) - r.context_len:], symbol):
                return True
        else:
            for pre in itertools.product(symbols, repeat=need):
                if r.predicate(pre + context, symbol):
                    return True
    return False


def possibly_zero(kernel: Kernel, u: tuple, a: int, symbols) -> bool:
    """Whether ``g(y u a) = 0`` for at least one past ``y`` (by declaration)."""
    zeros = kernel.zeros
    for ctx, b in zeros.cylinder_zeros:
        if b != a:
            continue
        n = min(len(ctx), len(u))
        if ctx[len(ctx) - n:] == u[len(u) - n:]:
            return True
    for p, b in zeros.isolated_zeros:
        if b == a and p.suffix(len(u)) == u:
            return True
    return _rule_hits(zeros, u, a, symbols)


def surely_zero(kernel: Kernel, u: tuple, a: int, symbols) -> bool:
    """Whether ``g(y u a) = 0`` for every past ``y`` (by declaration).

    Cylinder contexts longer than ``u`` count when together they cover every
    extension of ``u``; isolated zeros never cover a cylinder.
    """
    zeros = kernel.zeros
    if zeros.is_cylinder_zero(u, a):
        return True
    if len(u) >= zeros.max_context:
        return False
    return all(surely_zero(kernel, (b,) + u, a, symbols) for b in symbols)


def build_bound_matrices(kernel: Kernel, K: int, max_rows: int = MAX_ROWS) -> tuple[BoolMatrix, BoolMatrix]:
    """``(under, over)``: transitions positive for all pasts, and transitions
    not forced to zero for all pasts."""
    if K < 1:
        raise ValueError("K must be >= 1")
    symbols, labels = _symbols_for(kernel, K)
    n = len(symbols) ** K
    if n > max_rows:
        raise BudgetExceeded(f"|A|^K = {n} exceeds {max_rows} rows")
    words = list(itertools.product(symbols, repeat=K))
    index = {w: i for i, w in enumerate(words)}
    complete = kernel.zeros.complete
    ur, uc, orow, ocol = [], [], [], []
    for i, u in enumerate(words):
        for a in symbols:
            j = index[u[1:] + (a,)]
            if not surely_zero(kernel, u, a, symbols):
                orow.append(i)
                ocol.append(j)
                # an incomplete declaration cannot certify positivity
                if complete and not possibly_zero(kernel, u, a, symbols):
                    ur.append(i)
                    uc.append(j)
    under = sparse.csr_matrix((np.ones(len(ur), dtype=bool), (ur, uc)), shape=(n, n))
    over = sparse.csr_matrix((np.ones(len(orow), dtype=bool), (orow, ocol)), shape=(n, n))
    return BoolMatrix(under, words, labels), BoolMatrix(over, words, labels)


# -- e.r.i. -------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloHitting:
    """Hitting evidence by simulation; ``trials`` are split evenly over the
    start pasts."""

    trials: int = 10**4
    cap: int = 10**6
    seed: int = 0


@dataclass
class EriReport:
    verdict: str  # ERI | NotERI | Undecided
    reason: str = ""
    p_k: list = field(default_factory=list)
    primitivity_witness: dict = field(default_factory=dict)
    hitting_evidence: dict = field(default_factory=dict)
    candidates: list = field(default_factory=list)
    labels: list | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "ERI"

    def to_json(self) -> dict:
        fmt = lambda w: format_word(w, self.labels)  # noqa: E731
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "P_K": [fmt(w) for w in self.p_k],
            "witnesses": {fmt(w): n for w, n in self.primitivity_witness.items()},
            "hitting": self.hitting_evidence,
            "candidates": [[fmt(w) for w in c] for c in self.candidates],
        }


def terminal_classes(over: BoolMatrix) -> list[list[int]]:
    """Strongly connected components of the over-graph with no edge leaving."""
    ncomp, comp = connected_components(over.data, directed=True, connection="strong")
    coo = over.data.tocoo()
    leaves = np.zeros(ncomp, dtype=bool)
    for i, j in zip(coo.row, coo.col):
        if comp[i] != comp[j]:
            leaves[comp[i]] = True
    return [sorted(np.flatnonzero(comp == c).tolist()) for c in range(ncomp) if not leaves[c]]


def primitivity(under: BoolMatrix, members: list[int], cap: int) -> tuple[dict, int | None]:
    """For each row ``i`` in ``members`` the least ``n <= cap`` with
    ``under**n`` all ones on ``members``; returns the witness map and the
    first failing row (``None`` if all rows succeed)."""
    m = len(members)
    sub = under.data[members][:, members].astype(np.int32)
    reach = np.eye(m, dtype=bool)
    found = np.zeros(m, dtype=np.int64)
    for n in range(1, cap + 1):
        reach = (sparse.csr_matrix(reach.astype(np.int32)) @ sub).toarray() > 0
        full = reach.all(axis=1) & (found == 0)
        found[full] = n
        if (found > 0).all():
            break
    witness = {members[i]: int(found[i]) for i in range(m) if found[i] > 0}
    bad = [members[i] for i in range(m) if found[i] == 0]
    return witness, (bad[0] if bad else None)


def _hitting_analytic(kernel, K) -> bool:
    return kernel is not None and kernel.markov_order is not None and kernel.markov_order <= K


def check_eri(under: BoolMatrix, over: BoolMatrix, kernel: Kernel | None = None, hitting="auto") -> EriReport:
    """Decide whether ``(under, over)`` is e.r.i.

    ``hitting`` is ``"analytic_markov"``, a :class:`MonteCarloHitting`, or
    ``"auto"`` (analytic when the kernel is K-step Markov, Monte-Carlo with
    defaults otherwise).
    """
    if not under <= over:
        raise InconsistentBounds("under has a 1 where over has a 0")
    words = under.words
    labels = under.labels
    K = len(words[0]) if words and isinstance(words[0], tuple) else 1
    classes = terminal_classes(over)
    cand = [[words[i] for i in c] for c in classes]
    complete = kernel is None or kernel.zeros.complete
    if len(classes) != 1:
        rep = EriReport("NotERI", "no unique closed class", candidates=cand, labels=labels)
        if not complete:
            rep.verdict, rep.reason = "Undecided", "incomplete zero declaration: " + rep.reason
        return rep
    members = classes[0]
    p_k = [words[i] for i in members]
    cap = 2 * len(words)
    witness, bad = primitivity(under, members, cap)
    witness = {words[i]: n for i, n in witness.items()}
    if bad is not None:
        reason = f"row {format_word(words[bad], labels)} never covers the class within n <= {cap}"
        verdict = "NotERI" if complete else "Undecided"
        return EriReport(verdict, reason, p_k, witness, candidates=cand, labels=labels)
    inside = set(members)
    outside = [words[i] for i in range(len(words)) if i not in inside]
    if not outside:
        evidence = {"kind": "analytic", "detail": "class is all of A^K"}
    elif hitting == "analytic_markov" or (hitting == "auto" and _hitting_analytic(kernel, K)):
        if not _hitting_analytic(kernel, K):
            return EriReport(
                "Undecided", "analytic hitting needs a K-step Markov kernel", p_k, witness, candidates=cand, labels=labels
            )
        evidence = {"kind": "analytic", "detail": "unique closed class of a finite Markov chain absorbs a.s."}
    else:
        mc = hitting if isinstance(hitting, MonteCarloHitting) else MonteCarloHitting()
        if kernel is None:
            return EriReport("Undecided", "Monte-Carlo hitting needs the kernel", p_k, witness, candidates=cand, labels=labels)
        evidence = _hitting_monte_carlo(kernel, K, set(p_k), outside, mc)
        if evidence["failures"]:
            return EriReport(
                "Undecided", "some trial exceeded the hitting cap", p_k, witness, evidence, cand, labels
            )
    if not complete:
        return EriReport("Undecided", "incomplete zero declaration", p_k, witness, evidence, cand, labels)
    return EriReport("ERI", "", p_k, witness, evidence, cand, labels)


def _hitting_monte_carlo(kernel: Kernel, K: int, p_k: set, outside: list, mc: MonteCarloHitting) -> dict:
    from .simulation import SimConfig, hitting_time

    starts = [PastSpec(t, u) for u in outside for t in kernel.canonical_tails()]
    failures = 0
    worst = 0
    per_start = max(1, -(-mc.trials // len(starts)))
    for s, past in enumerate(starts):
        cfg = SimConfig(seed=mc.seed, replicas=per_start, stream=s)
        rep = hitting_time(kernel, past, p_k, K, mc.cap, cfg)
        failures += sum(1 for t in rep.samples if t is None)
        worst = max([worst] + [t for t in rep.samples if t is not None])
    return {
        "kind": "monte_carlo",
        "trials": per_start * len(starts),
        "cap": mc.cap,
        "starts": len(starts),
        "failures": failures,
        "max_hitting_time": worst,
    }


def check_eri_for(kernel: Kernel, K: int, hitting="auto") -> tuple[EriReport, BoolMatrix, BoolMatrix]:
    under, over = build_bound_matrices(kernel, K)
    return check_eri(under, over, kernel, hitting), under, over


# -- assumptions (B) and (C) -------------------------------------------------


@dataclass
class AssumptionVerdict:
    verdict: str  # holds | violated | undecided
    witness: object = None
    detail: dict = field(default_factory=dict)

    def to_json(self, labels=None) -> dict:
        w = self.witness
        if isinstance(w, tuple):
            w = format_word(w, labels)
        elif isinstance(w, PastSpec):
            w = str(w)
        return {"verdict": self.verdict, "witness": w, **self.detail}


def _symbols(kernel: Kernel):
    if kernel.alphabet.is_finite:
        return tuple(kernel.alphabet.symbols())
    quotient = kernel.finite_quotient()
    if quotient is None:
        raise AlphabetInfinite("need a finite alphabet or a finite quotient")
    return tuple(quotient[0])


def check_assumption_B(kernel: Kernel, K: int, p_k) -> AssumptionVerdict:
    """Pasts whose zero needs a context longer than ``K`` must not end in ``p_k``."""
    if not kernel.zeros.complete:
        return AssumptionVerdict("undecided", detail={"reason": "incomplete zero declaration"})
    p_k = {tuple(w) for w in p_k}
    symbols = _symbols(kernel)
    for ctx, _ in kernel.zeros.cylinder_zeros:
        if len(ctx) <= K:
            continue
        tail = ctx[len(ctx) - K:]
        # a past already in D^(K) is exempt
        if any(surely_zero(kernel, tail, a, symbols) for a in symbols):
            continue
        if tail in p_k:
            return AssumptionVerdict("violated", ctx)
    for r in kernel.zeros.rules:
        if r.context_len > K:
            return AssumptionVerdict("undecided", detail={"reason": f"rule with context {r.context_len} > K"})
    return AssumptionVerdict("holds")


def s_x(kernel: Kernel, x: PastSpec, max_len: int) -> tuple[list[tuple], bool]:
    """Elements of ``S_x`` of length ``<= max_len + slack`` plus whether
    ``S_x`` is infinite.

    ``u a`` is in ``S_x`` when ``x u`` equals a declared isolated-zero past
    ``p`` with forbidden symbol ``a``, i.e. ``p.drop(|u|) == x``.
    """
    out = []
    infinite = False
    for p, a in kernel.zeros.isolated_zeros:
        horizon = len(p.transient) + p.period * (max_len + 2) + max_len
        for n in range(horizon + 1):
            if p.drop(n) == x:
                out.append(p.suffix(n) + (a,))
                if n >= len(p.transient):
                    infinite = True
    return out, infinite


def _is_substring(v: tuple, words: list[tuple]) -> bool:
    k = len(v)
    return any(w[i:i + k] == v for w in words for i in range(len(w) - k + 1))


def _positive_words(kernel: Kernel, x: PastSpec, length: int, symbols, tol: float = 1e-12):
    """Words ``v`` of the given length with ``g_1(x, v) > 0`` by declaration,
    paired with the midpoint of their probability."""
    out = []
    stack = [((), History(x), kernel.state_init(x), 1.0)]
    while stack:
        v, hist, state, prob = stack.pop()
        if len(v) == length:
            out.append((v, prob))
            continue
        for a in symbols:
            if kernel.zeros.forbids(hist, a):
                continue
            p = kernel.eval(state, a, tol).mid
            stack.append((v + (a,), hist.push(a), kernel.state_update(state, a), prob * p))
    return out


def check_assumption_C(
    kernel: Kernel, K: int, p_k, probe_pasts: Sequence[PastSpec], max_len: int = 6
) -> AssumptionVerdict:
    """Search, for each probe past, a positive word avoiding ``S_x``.

    Among avoiding words of the least length the most probable is returned.
    A finite ``S_x`` always admits a witness (any positive word longer than
    its elements); an infinite ``S_x`` with no witness up to ``max_len`` is
    reported as a violation.
    """
    if not kernel.zeros.complete:
        return AssumptionVerdict("undecided", detail={"reason": "incomplete zero declaration"})
    symbols = _symbols(kernel)
    p_k = {tuple(w) for w in p_k}
    witnesses = {}
    for x in probe_pasts:
        if x.suffix(K) not in p_k:
            continue
        elems, infinite = s_x(kernel, x, max_len)
        limit = max_len if infinite else max(max_len, 1 + max((len(e) for e in elems), default=0))
        found = None
        for length in range(1, limit + 1):
            cands = [(v, p) for v, p in _positive_words(kernel, x, length, symbols) if not _is_substring(v, elems)]
            if cands:
                found = max(cands, key=lambda vp: (vp[1], tuple(-s for s in vp[0])))[0]
                break
        if found is None:
            return AssumptionVerdict("violated", x, {"S_x_infinite": infinite, "max_len": max_len})
        witnesses[x] = found
    return AssumptionVerdict("holds", None, {"witnesses": witnesses})


def probe_pasts(kernel: Kernel, K: int, p_k) -> list[PastSpec]:
    """Pasts ``t^inf u`` for ``u`` in ``p_k`` and each canonical tail ``t``,
    plus declared isolated pasts ending in ``p_k``."""
    out = []
    p_k = [tuple(w) for w in p_k]
    for u in p_k:
        for t in kernel.canonical_tails():
            x = PastSpec(t, u)
            if x not in out:
                out.append(x)
    for p in kernel.zeros.isolated_pasts:
        if p.suffix(K) in p_k and p not in out:
            out.append(p)
    return out


def positivity_profile(kernel: Kernel, past: PastSpec, n: int, K: int, budget: int = 10**6) -> set:
    """``{v in A^K : g_n(past, v) > 0}``, decided from the zero declaration."""
    if n < 1 or K < 1:
        raise ValueError("n and K must be >= 1")
    if not kernel.alphabet.is_finite:
        raise AlphabetInfinite("positivity profile needs a finite alphabet")
    symbols = tuple(kernel.alphabet.symbols())
    zeros = kernel.zeros
    keep = max(zeros.max_context, K)
    isolated = zeros.isolated_pasts

    def key(h: History):
        # the future zero pattern depends on the last `keep` symbols and on
        # whether the full past can still grow into an isolated-zero past
        suffix = tuple(h.lag(i) for i in range(keep - 1, -1, -1))
        track = None
        if isolated:
            full = h.to_past()
            for p in isolated:
                if any(p.drop(j) == full for j in range(len(p.transient) + p.period + 1)):
                    track = full
                    break
        return suffix, track

    frontier = {key(History(past)): History(past)}
    created = 1
    for _ in range(n - 1 + K):
        nxt = {}
        for h in frontier.values():
            for a in symbols:
                if zeros.forbids(h, a):
                    continue
                h2 = h.push(a)
                k2 = key(h2)
                if k2 not in nxt:
                    nxt[k2] = h2
                    created += 1
                    if created > budget:
                        raise BudgetExceeded("positivity profile enumeration too large")
        frontier = nxt
    return {tuple(h.lag(i) for i in range(K - 1, -1, -1)) for h in frontier.values()}
