"""Plays, sweeps, pairwise suites and the ad hoc evaluation procedure."""

from __future__ import annotations

import hashlib
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Iterable, Iterator, Sequence, Union

import numpy as np

from . import metrics
from .games import GameClass, RepeatedGame, classify, enumerate_distinct_2x2, random_strictly_ordinal
from .learners import LEARNERS, ROSTER, Learner, LearnerConfig, Observation, make_learner
from .simulate import simulate

SUITES = ("no-conflict", "conflict", "random")
MAX_PAYOFF = {"no-conflict": 4.0, "conflict": 4.0, "random": 8.0}

LearnerSpec = Union[str, Callable[..., Learner]]


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "no-conflict"
    # None: 25 for the pairwise suites, 1 for the ad hoc procedure (one play per game)
    sweeps: int | None = None
    repetitions: int = 100_000
    games: int = 500
    roster: tuple[str, ...] = ROSTER
    seed: int = 0
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    workers: int = 1
    metric_source: str = metrics.POLICY
    keep_logs: bool = False

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"suite must be one of {', '.join(SUITES)}, got {self.suite!r}")
        if self.sweeps is None:
            object.__setattr__(self, "sweeps", 1 if self.suite == "random" else 25)
        if self.sweeps < 1:
            raise ValueError("sweeps must be at least 1")
        if self.repetitions < 5:
            raise ValueError("repetitions must be at least 5")
        if self.games < 1:
            raise ValueError("games must be at least 1")
        if not self.roster:
            raise ValueError("roster must not be empty")
        for name in self.roster:
            if name not in LEARNERS:
                raise ValueError(f"unknown learner {name!r} in roster; known: {', '.join(LEARNERS)}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.metric_source not in (metrics.POLICY, metrics.SELECTION):
            raise ValueError("metric_source must be 'policy' or 'selection'")
        object.__setattr__(self, "roster", tuple(self.roster))

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "learner"}
        out["roster"] = list(self.roster)
        out.update(asdict(self.learner))
        return out


def play_seed(master: int, suite: str, game_id: str, team: Sequence[str], permutation: int, sweep: int) -> int:
    """Stable 63-bit seed for one play, independent of execution order."""
    key = json.dumps([int(master), suite, game_id, list(team), int(permutation), int(sweep)])
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big") >> 1


def seat_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(n)


# -- a single play ------------------------------------------------------------


def _run_kernel(game: RepeatedGame, names: Sequence[str], t_f: int, seeds, config: LearnerConfig):
    kinds = np.array([LEARNERS[name].kind for name in names], dtype=np.int64)
    uniforms = np.stack([np.random.default_rng(s).random(t_f) for s in seeds])
    mu = float(config.regmat_mu or game.outcome_count)
    return simulate(
        kinds, np.ascontiguousarray(game.flat_payoffs(), dtype=float),
        np.asarray(game.action_counts, dtype=np.int64), uniforms,
        config.alpha, config.epsilon, config.regmat_delta, config.regmat_gamma, config.wolf_base, mu,
    )


def _run_objects(game: RepeatedGame, agents: Sequence[Learner], t_f: int):
    n, counts = game.player_count, game.action_counts
    mmax = max(counts)
    strategies = np.zeros((t_f, n, mmax))
    selections = np.zeros((t_f, n, mmax))
    actions = np.zeros((t_f, n), dtype=np.int64)
    rewards = np.zeros((t_f, n))
    u = game.payoffs
    for t in range(t_f):
        for i, agent in enumerate(agents):
            strategies[t, i, : counts[i]] = agent.current_strategy()
            selections[t, i, : counts[i]] = agent.selection_distribution()
        joint = tuple(int(agent.select_action()) for agent in agents)
        payoffs = u[(slice(None), *joint)].copy()
        actions[t] = joint
        rewards[t] = payoffs
        for i, agent in enumerate(agents):
            cf = np.array([u[(i, *joint[:i], b, *joint[i + 1 :])] for b in range(counts[i])])
            agent.observe(Observation(joint[i], float(payoffs[i]), joint, payoffs.copy(), cf))
    failures = np.array([getattr(a, "solver_failures", 0) for a in agents], dtype=float)
    return strategies, selections, actions, rewards, failures


def run_play(
    game: RepeatedGame,
    learners: Sequence[LearnerSpec],
    t_f: int,
    seed: int,
    config: LearnerConfig | None = None,
    compiled: bool = True,
) -> metrics.PlayRecord:
    """Play ``t_f`` steps with fresh learners, one per seat.

    ``learners`` holds registry names or factories called as
    ``factory(player, action_counts, config, seed)``. Teams made only of
    registry names run in the compiled loop unless ``compiled`` is False;
    both paths give identical records. A learner that raises marks the play
    as failed instead of propagating.
    """
    if t_f < 1:
        raise ValueError(f"t_f must be positive, got {t_f}")
    if len(learners) != game.player_count:
        raise ValueError(f"{len(learners)} learners for a {game.player_count}-player game")
    config = config or LearnerConfig()
    seeds = seat_seeds(seed, game.player_count)
    names = tuple(s if isinstance(s, str) else getattr(s, "name", getattr(s, "__name__", "custom")) for s in learners)
    try:
        if compiled and all(isinstance(s, str) for s in learners):
            for s in learners:
                if s not in LEARNERS:
                    raise KeyError(f"unknown learner {s!r}")
            if "nashq" in learners and (game.player_count not in (2, 3) or set(game.action_counts) != {2}):
                raise ValueError("NashQ supports two-action games with two or three players")
            out = _run_kernel(game, learners, t_f, seeds, config)
        else:
            agents = [
                make_learner(s, i, game.action_counts, config, seeds[i]) if isinstance(s, str)
                else s(i, game.action_counts, config, seeds[i])
                for i, s in enumerate(learners)
            ]
            out = _run_objects(game, agents, t_f)
    except Exception as exc:  # recorded, never dropped
        mmax = max(game.action_counts)
        n = game.player_count
        return metrics.PlayRecord(
            game, names, seed, np.zeros((0, n, mmax)), np.zeros((0, n), dtype=np.int64),
            np.zeros((0, n)), None, (), True, f"{type(exc).__name__}: {exc}",
        )
    strategies, selections, actions, rewards, failures = out
    return metrics.PlayRecord(
        game, names, seed, strategies, actions, rewards, selections,
        tuple(int(x) for x in failures),
    )


# -- result rows --------------------------------------------------------------


@dataclass
class ResultRow:
    suite: str
    game_id: str
    team: tuple[str, ...]  # learner names by seat
    sweep: int
    permutation: int
    seed: int
    focal: int | None = None  # only this seat counts (ad hoc procedure)
    failed: bool = False
    error: str = ""
    converged: tuple[bool, ...] = ()
    final_payoffs: tuple[float, ...] = ()
    welfare: float = float("nan")
    fairness: float = float("nan")
    afp: list[list[float]] = field(default_factory=list)
    ne: bool | None = None
    po: bool | None = None
    wo: bool | None = None
    fo: bool | None = None
    solver_failures: tuple[int, ...] = ()
    # per-step arrays, kept only when logs are requested; never serialized inline
    log: dict | None = field(default=None, repr=False, compare=False)

    @property
    def key(self) -> tuple:
        return (self.suite, self.game_id, self.team, self.sweep, self.permutation)

    def seats(self) -> list[int]:
        return [self.focal] if self.focal is not None else list(range(len(self.team)))

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "log"}
        for k in ("team", "converged", "final_payoffs", "solver_failures"):
            d[k] = list(d[k])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ResultRow":
        known = {f.name for f in fields(cls)}
        d = {k: v for k, v in d.items() if k in known}
        for k in ("team", "converged", "final_payoffs", "solver_failures"):
            if k in d:
                d[k] = tuple(d[k])
        return cls(**d)


def make_row(suite, game_id, play: metrics.PlayRecord, sweep, permutation, focal=None,
             source=metrics.POLICY, keep_log=False) -> ResultRow:
    row = ResultRow(suite, game_id, tuple(play.learners), sweep, permutation, play.seed, focal)
    if keep_log:
        row.log = {"strategies": play.strategies, "selections": play.selections,
                   "actions": play.actions, "rewards": play.rewards}
    row.solver_failures = tuple(play.solver_failures)
    if play.failed:
        row.failed, row.error = True, play.error
        return row
    report = metrics.evaluate(play, source)
    row.converged = tuple(bool(c) for c in report.converged)
    row.final_payoffs = tuple(float(r) for r in report.final_payoffs)
    row.welfare, row.fairness = float(report.welfare), float(report.fairness)
    row.afp = [p.tolist() for p in report.afp]
    row.ne, row.po, row.wo, row.fo = report.ne, report.po, report.wo, report.fo
    return row


def run_sweep(
    game: RepeatedGame,
    team: Sequence[str],
    t_f: int,
    master_seed: int = 0,
    suite: str = "adhoc",
    game_id: str | None = None,
    sweep: int = 0,
    config: LearnerConfig | None = None,
) -> list[tuple[int, metrics.PlayRecord]]:
    """One play per seating permutation of ``team``; returns ``(permutation index, play)`` pairs.

    Algorithms are tracked by identity: ``play.learners`` lists who sat where.
    """
    if len(team) != game.player_count:
        raise ValueError("team size must equal the player count")
    game_id = game_id if game_id is not None else game.name
    out = []
    for p, order in enumerate(itertools.permutations(range(len(team)))):
        seated = tuple(team[j] for j in order)
        seed = play_seed(master_seed, suite, game_id, seated, p, sweep)
        out.append((p, run_play(game, seated, t_f, seed, config)))
    return out


# -- suites -------------------------------------------------------------------


@dataclass(frozen=True)
class _Task:
    suite: str
    game: RepeatedGame
    game_id: str
    team: tuple[str, ...]
    sweeps: tuple[int, ...]
    repetitions: int
    master: int
    learner: LearnerConfig
    source: str
    focal: int | None = None
    fixed_seating: bool = False
    keep_logs: bool = False


def _execute(task: _Task) -> list[ResultRow]:
    rows = []
    for s in task.sweeps:
        if task.fixed_seating:
            seed = play_seed(task.master, task.suite, task.game_id, task.team, 0, s)
            plays = [(0, run_play(task.game, task.team, task.repetitions, seed, task.learner))]
        else:
            plays = run_sweep(task.game, task.team, task.repetitions, task.master, task.suite,
                              task.game_id, s, task.learner)
        for p, play in plays:
            rows.append(make_row(task.suite, task.game_id, play, s, p, task.focal, task.source, task.keep_logs))
    return rows


def _pairwise_tasks(config: SuiteConfig) -> list[_Task]:
    games = enumerate_distinct_2x2(GameClass(config.suite))
    tasks = []
    for pair in itertools.combinations_with_replacement(config.roster, 2):
        for game in games:
            tasks.append(_Task(config.suite, game, game.name, pair, tuple(range(config.sweeps)),
                               config.repetitions, config.seed, config.learner, config.metric_source,
                               keep_logs=config.keep_logs))
    return tasks


def adhoc_draws(config: SuiteConfig) -> list[tuple[RepeatedGame, tuple[str, str]]]:
    """Random games and partner teams of the ad hoc procedure, fixed by the master seed."""
    rng = np.random.default_rng(play_seed(config.seed, "random-draws", "", [], 0, 0))
    draws = []
    for g in range(config.games):
        game = random_strictly_ordinal((2, 2, 2), rng, name=f"r{g:03d}")
        picks = rng.integers(len(config.roster), size=2)
        draws.append((game, tuple(config.roster[int(j)] for j in picks)))
    return draws


def _adhoc_tasks(config: SuiteConfig) -> list[_Task]:
    tasks = []
    for game, partners in adhoc_draws(config):
        for name in config.roster:
            tasks.append(_Task("random", game, game.name, (name, *partners), tuple(range(config.sweeps)),
                               config.repetitions, config.seed, config.learner, config.metric_source,
                               focal=0, fixed_seating=True, keep_logs=config.keep_logs))
    return tasks


def suite_tasks(config: SuiteConfig) -> list[_Task]:
    return _adhoc_tasks(config) if config.suite == "random" else _pairwise_tasks(config)


def iter_suite(config: SuiteConfig) -> Iterator[ResultRow]:
    """Rows of a suite in a fixed order, whatever the worker count."""
    tasks = suite_tasks(config)
    if config.workers == 1:
        for task in tasks:
            yield from _execute(task)
        return
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for rows in pool.map(_execute, tasks):
            yield from rows


def run_pairwise_suite(config: SuiteConfig) -> list[ResultRow]:
    """Every unordered roster pair (self-pairs included) on every game of the suite class."""
    if config.suite == "random":
        raise ValueError("pairwise suites are 'no-conflict' or 'conflict'")
    return list(iter_suite(config))


def run_adhoc_procedure(config: SuiteConfig) -> list[ResultRow]:
    """Random 2x2x2 games; each roster member plays seat 0 beside a random partner team.

    Partners are drawn uniformly with replacement. Only seat 0 counts
    toward the member's metrics (``ResultRow.focal``).
    """
    if config.suite != "random":
        raise ValueError("the ad hoc procedure runs the 'random' suite")
    return list(iter_suite(config))


def no_conflict_fraction(config: SuiteConfig) -> float:
    draws = adhoc_draws(config)
    return sum(classify(g) is GameClass.NO_CONFLICT for g, _ in draws) / len(draws)


def sort_rows(rows: Iterable[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=lambda r: r.key)
