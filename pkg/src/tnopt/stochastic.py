"""Genetic algorithm and generalized simulated annealing over sequences.

Both searches are resumable: a run is a generator that pauses before every
full evaluation of the cost function, and :meth:`advance` drives it until the
next evaluation would exceed the requested budget.  A run therefore never
overshoots its limit, and growing the limit continues the same run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .deterministic import OptimizerResult
from .network import Contractor, EvalBudget, TensorNetwork

FITNESS_OFFSET = 0.99
TAIL_LIMIT = 1.0e8


def fitness(costs) -> list[float]:
    """Log-scaled fitness of a population, in ``[0.01, e - 0.99]``.

    The cheapest member scores ``e - 0.99`` and the most expensive ``0.01``.
    A population of identical costs scores 1.0 everywhere.
    """
    costs = list(costs)
    if not costs:
        raise ValueError("fitness of an empty population")
    if any(c < 1 for c in costs):
        raise ValueError("costs must be >= 1")
    logs = [math.log(c) for c in costs]
    lo, hi = min(logs), max(logs)
    if min(costs) == max(costs) or hi == lo:
        return [1.0] * len(costs)
    span = hi - lo
    out = []
    for c, lc in zip(costs, logs):
        if c == max(costs):
            out.append(1.0 - FITNESS_OFFSET)
        elif c == min(costs):
            out.append(math.e - FITNESS_OFFSET)
        else:
            out.append(math.exp((hi - lc) / span) - FITNESS_OFFSET)
    return out


@dataclass
class GAConfig:
    population_size: int = 20
    mutation_rate: float = 0.6
    seed: int | None = 0
    max_full_evaluations: float = 1000.0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must lie in [0, 1]")


@dataclass
class SAConfig:
    initial_temp: float = 5230.0
    restart_temp_ratio: float = 2e-5
    visit: float = 2.62
    accept: float = -5.0
    local_search: bool = True
    seed: int | None = 0
    max_full_evaluations: float = 1000.0
    energy: str = "log"
    chain_length: int = 1
    moves: str = "single"

    def __post_init__(self):
        if self.energy not in ("log", "raw"):
            raise ValueError("energy must be 'log' or 'raw'")
        if self.moves not in ("single", "all", "alternate"):
            raise ValueError("moves must be 'single', 'all' or 'alternate'")
        if self.chain_length < 1:
            raise ValueError("chain_length must be >= 1")
        if not 1.0 < self.visit <= 3.0:
            raise ValueError("visit parameter must lie in (1, 3]")
        if not 0.0 < self.restart_temp_ratio < 1.0:
            raise ValueError("restart_temp_ratio must lie in (0, 1)")
        if self.initial_temp <= 0:
            raise ValueError("initial_temp must be positive")


class _ResumableSearch:
    """Shared bookkeeping for the budgeted searches."""

    name = ""

    def __init__(self, net: TensorNetwork, seed, budget: EvalBudget | None):
        if net.n_edges < 2:
            raise ValueError("stochastic search needs at least two edges")
        self.net = net
        self.eng = Contractor(net)
        self.n = self.eng.n_edges
        self.rng = np.random.default_rng(seed)
        self.budget = budget if budget is not None else EvalBudget(self.n)
        self.best_cost: int | None = None
        self.best_bits: list[int] = []
        self.trace: list[tuple[float, int]] = []
        self._gen = self._run()

    def _evaluate(self, bits) -> int:
        cost = self.eng.bits_cost(bits)
        self.budget.charge(self.n)
        if self.best_cost is None or cost < self.best_cost:
            self.best_cost = cost
            self.best_bits = list(bits)
            self.trace.append((self.budget.full_evaluations, cost))
        return cost

    def advance(self, max_full_evaluations: float) -> "_ResumableSearch":
        """Run until one more full evaluation would exceed the limit."""
        while self.budget.can_afford(max_full_evaluations):
            next(self._gen)
        return self

    def result(self) -> OptimizerResult:
        return OptimizerResult(
            best_sequence=[self.eng.edge_ids[b] for b in self.best_bits],
            best_cost=self.best_cost,
            trace=list(self.trace),
            evaluations_used=self.budget.report(),
            algorithm=self.name,
        )

    def _run(self):
        raise NotImplementedError


class GeneticSearch(_ResumableSearch):
    """Fitness-proportional selection with swap mutation and elitism.

    Every generation the cheapest individual is copied unchanged into slot 0
    of the next population; the remaining slots are drawn with replacement
    in proportion to fitness and each is mutated with probability
    ``mutation_rate`` by exchanging two distinct positions.
    """

    name = "ga"

    def __init__(self, net, cfg: GAConfig, budget=None):
        self.cfg = cfg
        self.generation_best: list[int] = []
        self.population: list[list[int]] = []
        super().__init__(net, cfg.seed, budget)

    def _run(self):
        rng = self.rng
        size = self.cfg.population_size
        pop = [rng.permutation(self.n).tolist() for _ in range(size)]
        while True:
            self.population = pop
            costs = []
            for ind in pop:
                yield
                costs.append(self._evaluate(ind))
            self.generation_best.append(min(costs))
            fit = np.array(fitness(costs))
            probs = fit / fit.sum()
            elite = pop[int(np.argmin(costs))]
            picks = rng.choice(size, size=size - 1, replace=True, p=probs).tolist()
            nxt = [list(elite)]
            for i in picks:
                child = list(pop[i])
                if rng.random() < self.cfg.mutation_rate:
                    a, b = rng.choice(self.n, size=2, replace=False).tolist()
                    child[a], child[b] = child[b], child[a]
                nxt.append(child)
            pop = nxt


def ga_run(net: TensorNetwork, cfg: GAConfig, budget: EvalBudget | None = None) -> OptimizerResult:
    return GeneticSearch(net, cfg, budget).advance(cfg.max_full_evaluations).result()


# ---------------------------------------------------------------------------
# Local search


def _local_search_steps(eng: Contractor, bits: list[int], budget: EvalBudget, on_trial=None):
    """Best-improvement hill climb over adjacent transpositions.

    Swapping positions ``i`` and ``i+1`` leaves every other step cost
    unchanged (the state after a set of contractions does not depend on
    their order), so a trial costs two step computations given the cached
    prefix states.  Generator: yields before each batch of at most ``E``
    step computations, returns the final ``(bits, cost)``.
    """
    bits = list(bits)
    n = len(bits)
    yield
    prefix = [eng.initial_state()]
    step = []
    for b in bits:
        st = eng.copy(prefix[-1])
        step.append(eng.contract(st, b))
        prefix.append(st)
    budget.charge(n)
    cost = sum(step)
    while True:
        best_i, best_c, best_pair = None, cost, None
        for i in range(n - 1):
            yield
            st = eng.copy(prefix[i])
            ca = eng.contract(st, bits[i + 1])
            cb = eng.contract(st, bits[i])
            budget.charge(2)
            c = cost - step[i] - step[i + 1] + ca + cb
            if on_trial is not None:
                on_trial(bits, i, c)
            if c < best_c:
                best_i, best_c, best_pair = i, c, (ca, cb)
        if best_i is None:
            return bits, cost
        i = best_i
        bits[i], bits[i + 1] = bits[i + 1], bits[i]
        step[i], step[i + 1] = best_pair
        yield
        st = eng.copy(prefix[i])
        eng.contract(st, bits[i])
        budget.charge(1)
        prefix[i + 1] = st
        cost = best_c


def local_search(net: TensorNetwork, seq, budget: EvalBudget | None = None,
                 max_full_evaluations: float = math.inf) -> list[int]:
    """Hill-climb ``seq`` by adjacent swaps until no swap strictly helps.

    When the budget runs out the best sequence seen so far is returned.
    """
    eng = Contractor(net)
    if budget is None:
        budget = EvalBudget(eng.n_edges)
    bits = [eng.bit_of[e] for e in seq]
    best = [bits, None]

    def on_trial(cur, i, c):
        if best[1] is None or c < best[1]:
            trial = cur[:]
            trial[i], trial[i + 1] = trial[i + 1], trial[i]
            best[0], best[1] = trial, c

    steps = _local_search_steps(eng, bits, budget, on_trial)
    try:
        while budget.can_afford(max_full_evaluations):
            next(steps)
        out = best[0]
    except StopIteration as stop:
        out = stop.value[0]
    return [eng.edge_ids[b] for b in out]


# ---------------------------------------------------------------------------
# Generalized simulated annealing


class TsallisVisitor:
    """Draws displacements from the Tsallis visiting distribution.

    Uses the two-Gaussian construction of generalized simulated annealing:
    a scaled normal deviate divided by a power of a second normal deviate.
    """

    def __init__(self, q_v: float, rng: np.random.Generator):
        self.q = q_v
        self.rng = rng
        q = q_v
        self._f2 = math.exp((4.0 - q) * math.log(q - 1.0))
        self._f3 = math.exp((2.0 - q) * math.log(2.0) / (q - 1.0))
        self._f4p = math.sqrt(math.pi) * self._f2 / (self._f3 * (3.0 - q))
        f5 = 1.0 / (q - 1.0) - 0.5
        self._f6 = math.pi * (1.0 - f5) / math.sin(math.pi * (1.0 - f5)) / math.exp(math.lgamma(2.0 - f5))

    def sample(self, temperature: float, size: int) -> np.ndarray:
        q = self.q
        x, y = self.rng.normal(size=(size, 2)).T
        f1 = math.exp(math.log(temperature) / (q - 1.0))
        f4 = self._f4p * f1
        x = x * math.exp(-(q - 1.0) * math.log(self._f6 / f4) / (3.0 - q))
        den = np.exp((q - 1.0) * np.log(np.fabs(y)) / (3.0 - q))
        out = x / den
        # heavy tails are capped and re-randomised, keeping the sign
        hi = out > TAIL_LIMIT
        lo = out < -TAIL_LIMIT
        if hi.any() or lo.any():
            out[hi] = TAIL_LIMIT * self.rng.random(int(hi.sum()))
            out[lo] = -TAIL_LIMIT * self.rng.random(int(lo.sum()))
        return out


def _wrap_unit(x):
    return np.mod(x, 1.0)


def acceptance_probability(delta: float, t_accept: float, q_a: float) -> float:
    """Generalized Metropolis acceptance for an energy increase ``delta``."""
    if delta <= 0:
        return 1.0
    try:
        base = 1.0 - (1.0 - q_a) * delta / t_accept
    except OverflowError:
        return 0.0 if q_a < 1.0 else 1.0
    if base <= 0.0:
        return 0.0
    return math.exp(math.log(base) / (1.0 - q_a))


def visiting_temperature(t: int, initial_temp: float, q_v: float) -> float:
    """Visiting temperature at schedule index ``t >= 1``; equals T0 at t=1."""
    return initial_temp * (2.0 ** (q_v - 1.0) - 1.0) / ((1.0 + t) ** (q_v - 1.0) - 1.0)


class DualAnnealingSearch(_ResumableSearch):
    """Generalized simulated annealing on random-key vectors.

    At schedule index ``t`` the visiting temperature is
    :func:`visiting_temperature` and the acceptance temperature is ``T / t``;
    ``chain_length`` proposals are made per index.  With ``moves="single"``
    each proposal displaces one key (cycling through the coordinates), with
    ``"all"`` every key, and ``"alternate"`` spends the first half of each
    chain on full moves and the second half on single ones.  Keys are
    wrapped into [0, 1).

    The energy is ``ln(cost)`` by default; ``energy="raw"`` uses the exact
    cost, which makes every uphill move at realistic scales fail the
    acceptance test.  After a chain that improved the global best the best
    sequence is refined by local search and the walker moves there if that
    beats its current state.  Once the temperature drops below
    ``restart_temp_ratio * T0`` the schedule restarts from fresh keys.
    """

    name = "sa"

    def __init__(self, net, cfg: SAConfig, budget=None):
        self.cfg = cfg
        super().__init__(net, cfg.seed, budget)
        self.visitor = TsallisVisitor(cfg.visit, self.rng)
        self._coord = 0

    def _energy(self, cost: int):
        return math.log(cost) if self.cfg.energy == "log" else cost

    def _bits(self, keys) -> list[int]:
        return np.argsort(keys, kind="stable").tolist()

    def _keys_for(self, bits, keys):
        """Keys that decode to ``bits``, reusing the current key values."""
        new = np.empty_like(keys)
        new[bits] = np.sort(keys)
        if self._bits(new) != list(bits):
            new[bits] = (np.arange(self.n) + 0.5) / self.n
        return new

    def _propose(self, keys, temp, j):
        moves = self.cfg.moves
        if moves == "alternate":
            moves = "all" if j < self.cfg.chain_length // 2 else "single"
        if moves == "all":
            return _wrap_unit(keys + self.visitor.sample(temp, self.n))
        cand = keys.copy()
        idx = self._coord
        self._coord = (self._coord + 1) % self.n
        cand[idx] = _wrap_unit(cand[idx] + self.visitor.sample(temp, 1)[0])
        return cand

    def _run(self):
        cfg = self.cfg
        rng = self.rng
        t_restart = cfg.restart_temp_ratio * cfg.initial_temp
        while True:
            keys = rng.random(self.n)
            yield
            cur = self._evaluate(self._bits(keys))
            cur_e = self._energy(cur)
            t = 1
            while True:
                temp = visiting_temperature(t, cfg.initial_temp, cfg.visit)
                if temp < t_restart:
                    break
                t_accept = temp / t
                improved = False
                for j in range(cfg.chain_length):
                    cand = self._propose(keys, temp, j)
                    before = self.best_cost
                    yield
                    c = self._evaluate(self._bits(cand))
                    if c < before:
                        improved = True
                    if c < cur:
                        keys, cur, cur_e = cand, c, self._energy(c)
                        continue
                    delta = self._energy(c) - cur_e
                    if rng.random() <= acceptance_probability(delta, t_accept, cfg.accept):
                        keys, cur, cur_e = cand, c, self._energy(c)
                if improved and cfg.local_search:
                    bits, cost = yield from _local_search_steps(
                        self.eng, self.best_bits, self.budget, self._on_trial)
                    if cost < cur:
                        keys = self._keys_for(bits, keys)
                        cur, cur_e = cost, self._energy(cost)
                t += 1

    def _on_trial(self, bits, i, cost):
        if cost < self.best_cost:
            trial = list(bits)
            trial[i], trial[i + 1] = trial[i + 1], trial[i]
            self.best_cost = cost
            self.best_bits = trial
            self.trace.append((self.budget.full_evaluations, cost))


def sa_run(net: TensorNetwork, cfg: SAConfig, budget: EvalBudget | None = None) -> OptimizerResult:
    return DualAnnealingSearch(net, cfg, budget).advance(cfg.max_full_evaluations).result()
