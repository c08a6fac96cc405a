"""
Conflict-driven nogood learning over a CompiledStore
First-UIP learning, backjumping, Luby restarts, activity-based deletion
of learned nogoods and two decision heuristics.
"""

import heapq
import logging
import random
import time
from dataclasses import dataclass, field

from .asp_program import BOTTOM, Atom
from .encoders import BOUND, RANGE
from .errors import NotAModelError
from .propagation_engine import BODY, Propagator, _Nogood, reason_literals

logger = logging.getLogger(__name__)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

ACTIVITY = "activity"
SMALLEST_DOMAIN = "smallest-domain"
HEURISTICS = (ACTIVITY, SMALLEST_DOMAIN)
PHASES = ("false", "true", "saved")

VAR_DECAY = 0.95
NOGOOD_DECAY = 0.999
# learned nogoods this short survive every deletion round
KEEP_SIZE = 4


@dataclass(frozen=True)
class SolverConfig:
    heuristic: str = ACTIVITY
    phase: str = "false"
    restart_unit: int = 256
    deletion_threshold: int = 2000
    seed: int = 0
    max_conflicts: int | None = None
    time_budget_s: float | None = None

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic: {self.heuristic}")
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase: {self.phase}")
        if self.restart_unit < 1 or self.deletion_threshold < 1:
            raise ValueError("restart unit and deletion threshold must be positive")
        if (self.max_conflicts is not None and self.max_conflicts < 0) or (
            self.time_budget_s is not None and self.time_budget_s < 0
        ):
            raise ValueError("budgets must be non-negative")


@dataclass
class SolverStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0
    deleted: int = 0
    time_s: float = 0.0

    def as_dict(self):
        return {
            "decisions": self.decisions,
            "conflicts": self.conflicts,
            "propagations": self.propagations,
            "restarts": self.restarts,
            "learned": self.learned,
            "deleted": self.deleted,
            "time_s": round(self.time_s, 6),
        }


@dataclass(frozen=True)
class SolveResult:
    """model is the set of true program atoms (fresh body atoms left out) when sat"""

    status: str
    model: frozenset | None = None
    stats: SolverStats = field(default_factory=SolverStats)
    # learned nogoods as tuples of Literals, kept for entailment checks
    learned: tuple = ()


def luby(i):
    """i-th element (1-based) of 1, 1, 2, 1, 1, 2, 4, 1, ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Search(Propagator):
    def __init__(self, store, cfg):
        # the base constructor assigns root units through assign()
        self.saved_phase = [False] * (store.size + 1)
        super().__init__(store)
        self.cfg = cfg
        self.stats = SolverStats()
        rng = random.Random(cfg.seed)
        n = store.size
        # tiny seeded jitter breaks ties between untouched variables
        self.activity = [0.0] + [rng.random() * 1e-5 for _ in range(n)]
        self.var_inc = 1.0
        self.nogood_inc = 1.0
        self.heap = [(-self.activity[v], v) for v in range(1, n + 1)]
        heapq.heapify(self.heap)
        self.learned = []
        self.max_learned = cfg.deletion_threshold
        self.all_learned = []

    # --- heuristics

    def bump_var(self, var):
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[v], v) for v in range(1, self.store.size + 1) if self.value[v] is None]
            heapq.heapify(self.heap)
        elif self.value[var] is None:
            heapq.heappush(self.heap, (-self.activity[var], var))

    def bump_nogood(self, reason):
        if isinstance(reason, _Nogood) and reason.learned:
            reason.activity += self.nogood_inc

    def decay(self):
        self.var_inc /= VAR_DECAY
        self.nogood_inc /= NOGOOD_DECAY

    def _phase(self, var):
        if self.cfg.phase == "true":
            return var
        if self.cfg.phase == "saved" and self.saved_phase[var]:
            return var
        return -var

    def _activity_pick(self):
        while self.heap:
            neg, var = heapq.heappop(self.heap)
            if self.value[var] is None and -neg == self.activity[var]:
                return self._phase(var)
        for var in range(1, self.store.size + 1):
            if self.value[var] is None:
                return self._phase(var)
        return None

    def _domain_size(self, letter, values):
        if letter == "b":
            lo = max((i for i, v in values if self.value[v] is False), default=0) + 1
            hi = min((i for i, v in values if self.value[v] is True), default=values[-1][0])
            return hi - lo + 1, lo
        open_values = [i for i, v in values if self.value[v] is not False]
        return len(open_values), (open_values[0] if open_values else None)

    def _smallest_domain_pick(self):
        best = None
        for name in sorted(self.store.groups):
            letter, values = self.store.groups[name]
            size, lo = self._domain_size(letter, values)
            if size <= 1:
                continue
            if best is None or size < best[0]:
                best = (size, letter, values, lo)
        if best is not None:
            _, letter, values, lo = best
            for i, var in values:
                if i == lo and self.value[var] is None:
                    return var
        return self._activity_pick()

    def pick(self):
        if self.cfg.heuristic == SMALLEST_DOMAIN:
            return self._smallest_domain_pick()
        return self._activity_pick()

    # --- learning

    def analyze(self, conflict):
        """First-UIP nogood (all literals true) and the level to backjump to."""
        current = self.decision_level
        seen = set()
        learnt = []
        pending = 0
        lits = reason_literals(conflict)
        self.bump_nogood(conflict)
        skip = None
        idx = len(self.trail) - 1
        while True:
            for q in lits:
                if q == skip:
                    continue
                var = abs(q)
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                self.bump_var(var)
                if self.level[var] == current:
                    pending += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            pending -= 1
            if pending == 0:
                break
            reason = self.reason[abs(p)]
            self.bump_nogood(reason)
            lits = reason_literals(reason)
            skip = -p
        learnt.sort(key=lambda q: -self.level[abs(q)])
        learnt.insert(0, p)
        jump = self.level[abs(learnt[1])] if len(learnt) > 1 else 0
        return learnt, jump

    def learn(self, lits, jump):
        self.unassign_to(jump)
        ng = _Nogood(lits, learned=True)
        ng.activity = self.nogood_inc
        self.stats.learned += 1
        self.all_learned.append(tuple(lits))
        if len(lits) > 1:
            self.attach(ng)
            self.learned.append(ng)
        self.assign(-lits[0], ng)

    def unassign_to(self, level):
        for var in self.backjump(level):
            heapq.heappush(self.heap, (-self.activity[var], var))

    def assign(self, lit, reason=None):
        super().assign(lit, reason)
        self.saved_phase[abs(lit)] = lit > 0

    def reduce(self):
        """Drop half of the long learned nogoods by activity once over the threshold."""
        if len(self.learned) <= self.max_learned:
            return
        locked = {id(self.reason[abs(lit)]) for lit in self.trail}
        long = [ng for ng in self.learned if len(ng.lits) > KEEP_SIZE and id(ng) not in locked]
        long.sort(key=lambda ng: ng.activity)
        doomed = long[: len(long) // 2]
        for ng in doomed:
            ng.deleted = True
        doomed_ids = {id(ng) for ng in doomed}
        self.learned = [ng for ng in self.learned if id(ng) not in doomed_ids]
        self.stats.deleted += len(doomed)
        self.max_learned *= 2
        logger.debug("deleted %d learned nogoods, threshold now %d", len(doomed), self.max_learned)

    # --- main loop

    def run(self):
        cfg = self.cfg
        start = time.perf_counter()
        if self.root_conflict is not None:
            return UNSAT
        restart_index = 1
        restart_limit = luby(restart_index) * cfg.restart_unit
        since_restart = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                self.stats.conflicts += 1
                since_restart += 1
                level = max(self.level[abs(q)] for q in reason_literals(conflict))
                if level == 0:
                    return UNSAT
                if level < self.decision_level:
                    self.unassign_to(level)
                lits, jump = self.analyze(conflict)
                self.learn(lits, jump)
                self.decay()
                if cfg.max_conflicts is not None and self.stats.conflicts >= cfg.max_conflicts:
                    logger.info("conflict budget of %d exhausted", cfg.max_conflicts)
                    return UNKNOWN
                if cfg.time_budget_s is not None and time.perf_counter() - start > cfg.time_budget_s:
                    logger.info("time budget of %.1fs exhausted", cfg.time_budget_s)
                    return UNKNOWN
                continue

            if since_restart >= restart_limit:
                since_restart = 0
                restart_index += 1
                restart_limit = luby(restart_index) * cfg.restart_unit
                self.stats.restarts += 1
                self.unassign_to(0)
                logger.debug("restart %d after %d conflicts", self.stats.restarts, self.stats.conflicts)
                self.reduce()
                continue

            lit = self.pick()
            if lit is None:
                return SAT
            if cfg.time_budget_s is not None and self.stats.decisions % 256 == 0:
                if time.perf_counter() - start > cfg.time_budget_s:
                    logger.info("time budget of %.1fs exhausted", cfg.time_budget_s)
                    return UNKNOWN
            self.stats.decisions += 1
            self.new_level()
            self.assign(lit)

    def model(self):
        return frozenset(
            atom for v, atom in enumerate(self.store.atoms, start=1) if self.value[v] and atom.name != BODY
        )


def solve(store, cfg=None):
    """
    Decide satisfiability of a compiled store

    Returns:
        SolveResult with status sat, unsat or unknown (budget exhausted)
    """
    cfg = cfg or SolverConfig()
    search = _Search(store, cfg)
    started = time.perf_counter()
    status = search.run()
    search.stats.propagations = search.propagations
    search.stats.time_s = time.perf_counter() - started
    model = search.model() if status == SAT else None
    learned = tuple(tuple(store.decode_literal(lit) for lit in lits) for lits in search.all_learned)
    logger.debug("solve finished: %s %s", status, search.stats.as_dict())
    return SolveResult(status, model, search.stats, learned)


def extract_solution(model, kind, csp):
    """
    Read a CSP assignment off a model of kind's encoding of csp

    Raises:
        NotAModelError when a variable gets no value or several
    """
    model = frozenset(model)
    if BOTTOM in model:
        raise NotAModelError("the bottom atom is true")
    d = csp.max_value
    assignment = {}
    for name in csp.names:
        if kind.name == BOUND:
            values = [i for i in range(1, d + 1) if Atom("b", (name, i)) in model][:1]
        elif kind.name == RANGE:
            values = [i for i in range(1, d + 1) if Atom("r", (name, i, i)) in model]
        else:
            values = [i for i in range(1, d + 1) if Atom("e", (name, i)) in model]
        if len(values) != 1:
            raise NotAModelError(f"{name} takes {len(values)} values")
        assignment[name] = values[0]
    return assignment
