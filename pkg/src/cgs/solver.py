"""Set-based retrograde analysis and meet-in-the-middle solving.

Retrograde analysis grows, per side to move, the sets ``W_j`` (mover wins
within ``j`` ply) and ``L_j`` (mover loses within ``j`` ply)::

    W_{j+1} = W_0 | reverse(L_j)
    L_{j+1} = L_0 | (inverse(T) - reverse(inverse(W_j)))

where ``reverse`` uses the mover's moves and ``L_j``/``W_j`` on the right are
the opponent's sets. Meet-in-the-middle computes the reachable sets
``R_i = forward(R_{i-1})`` until some ``R_i`` is fully decided by ``W_j0`` /
``L_j0``, then backs the decision up to the initial position.
"""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field

from .algebra import difference, intersection, inverse, union
from .checkpoint import INF, Checkpoint, PlyStat, StatsWriter, TaggedSet, _ply_value
from .dfa import empty_set, equal
from .errors import CheckpointError, SeedNotClosedError
from .games import GameDef, Player
from .moves import forward, reverse

logger = logging.getLogger(__name__)


class Outcome(str, enum.Enum):
    P1_WIN = "P1_WIN"
    P2_WIN = "P2_WIN"
    DRAW = "DRAW"
    UNKNOWN = "UNKNOWN"

    @property
    def short(self) -> str:
        return {"P1_WIN": "P1", "P2_WIN": "P2"}.get(self.value, self.value)


@dataclass
class SolveConfig:
    mode: str = "mitm"
    forward_plies: int | None = None
    backward_plies: int = 0
    max_iterations: int | None = None
    checkpoint_dir: str | None = None
    resume: bool = False
    stats_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("retro", "mitm"):
            raise ValueError(f"mode must be 'retro' or 'mitm', got {self.mode!r}")
        if self.backward_plies < 0:
            raise ValueError("backward_plies must be >= 0")
        if self.forward_plies is not None and self.forward_plies < 0:
            raise ValueError("forward_plies must be >= 0")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def fingerprint(self) -> dict:
        """The parts of the config that change the computed sets."""
        return {
            "mode": self.mode,
            "forward_plies": self.forward_plies,
            "backward_plies": self.backward_plies,
            "max_iterations": self.max_iterations,
        }


@dataclass
class SolveResult:
    value: Outcome
    witness_ply: int | None = None
    stats: list[PlyStat] = field(default_factory=list)
    truncated: bool = False
    uncovered: int = 0
    mode: str = "mitm"

    def to_json(self) -> dict:
        return {
            "value": self.value.value,
            "witness_ply": self.witness_ply,
            "truncated": self.truncated,
            "uncovered": str(self.uncovered),
            "mode": self.mode,
        }


class _Run:
    """Bookkeeping shared by one solve: checkpoint, stats and workers."""

    def __init__(self, checkpoint=None, stats=None, workers=1):
        self.checkpoint = checkpoint
        self.stats = stats if stats is not None else StatsWriter()
        self.workers = workers

    def get(self, kind, player, forward_ply, backward_ply, compute, stat_ply=None):
        """Load a named set from the checkpoint or compute and record it.

        ``stat_ply`` overrides the backward ply written to the stats file
        (sets tagged with an infinite backward ply report their depth).
        """
        probe = TaggedSet(None, player, kind, forward_ply, backward_ply)
        if self.checkpoint is not None and self.checkpoint.has(probe.name):
            probe.set = self.checkpoint.load(probe.name)
            return probe
        start = time.perf_counter()
        probe.set = compute()
        seconds = time.perf_counter() - start
        if self.checkpoint is not None:
            self.checkpoint.save(probe, stat_ply)
        self.stats.add(
            PlyStat(
                kind,
                player.tag,
                forward_ply,
                backward_ply if stat_ply is None else stat_ply,
                probe.set.count(),
                probe.set.num_states(),
                seconds,
            )
        )
        logger.info("%s: %d positions, %d states", probe.name, probe.set.count(), probe.set.num_states())
        return probe


def _players_to_compute(game):
    # Impartial games share every input between the players, so one
    # computation serves both.
    return [Player.P1] if game.impartial else list(Player)


# -- retrograde -------------------------------------------------------------
def retrograde_step(game: GameDef, win: dict, loss: dict, workers: int = 1):
    """One application of the W/L recurrences for both sides to move."""
    new_win, new_loss = {}, {}
    for p in _players_to_compute(game):
        opp = p.opponent
        moves = game.moves[p]
        new_win[p] = union(game.win0[p], reverse(loss[opp], moves, workers))
        escapes = reverse(inverse(win[opp]), moves, workers)
        new_loss[p] = union(game.loss0[p], difference(game.nonterminal(p), escapes))
    if game.impartial:
        new_win[Player.P2] = new_win[Player.P1]
        new_loss[Player.P2] = new_loss[Player.P1]
    return new_win, new_loss


@dataclass
class RetrogradeResult:
    win: dict
    loss: dict
    ply: int
    converged: bool
    history: list = field(default_factory=list)


def retrograde_solve(game: GameDef, max_iterations: int | None = None, *, run: _Run | None = None,
                     keep_history: bool = False) -> RetrogradeResult:
    """Iterate the recurrences until neither side's W or L changes.

    ``ply`` is the first index ``i >= 1`` with ``W_i = W_{i+1}`` and
    ``L_i = L_{i+1}`` for both sides (W_0/L_0 are inputs, so at least one
    step is always taken). Without convergence, ``ply`` is the last index
    computed and ``converged`` is false.
    """
    if max_iterations is None:
        max_iterations = (game.max_ply or 0) + 2
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    run = run or _Run()
    win = {p: game.win0[p] for p in Player}
    loss = {p: game.loss0[p] for p in Player}
    for p in Player:
        run.get("W", p, None, 0, lambda p=p: win[p])
        run.get("L", p, None, 0, lambda p=p: loss[p])
    history = [(win, loss)] if keep_history else []
    for i in range(1, max_iterations + 1):
        step = {}

        def compute(i=i, win=win, loss=loss):
            if "sets" not in step:
                step["sets"] = retrograde_step(game, win, loss, run.workers)
            return step["sets"]

        new_win, new_loss = {}, {}
        for p in Player:
            new_win[p] = run.get("W", p, None, i, lambda p=p: compute()[0][p]).set
            new_loss[p] = run.get("L", p, None, i, lambda p=p: compute()[1][p]).set
        if keep_history:
            history.append((new_win, new_loss))
        stable = all(equal(new_win[p], win[p]) and equal(new_loss[p], loss[p]) for p in Player)
        win, loss = new_win, new_loss
        if stable:
            return RetrogradeResult(win, loss, max(1, i - 1), True, history)
    return RetrogradeResult(win, loss, max_iterations, False, history)


# -- forward reachability -----------------------------------------------------
def iter_reachable(game: GameDef, up_to_ply: int | None = None, *, run: _Run | None = None):
    """Yield ``R_0, R_1, ...`` as :class:`TaggedSet`, stopping after an empty set."""
    if up_to_ply is None:
        up_to_ply = (game.max_ply or 0) + 1
    run = run or _Run()
    current = run.get("R", game.initial_player, 0, None, lambda: game.singleton(game.initial))
    yield current
    for i in range(1, up_to_ply + 1):
        if current.set.is_empty:
            return
        prev = current
        player = game.initial_player.at_ply(i)
        current = run.get(
            "R", player, i, None,
            lambda prev=prev: forward(prev.set, game.moves[prev.player], run.workers),
        )
        yield current


def reachable(game: GameDef, up_to_ply: int | None = None, *, run: _Run | None = None) -> list[TaggedSet]:
    """``R_0 .. R_up_to_ply`` (fewer if some ``R_i`` is empty)."""
    return list(iter_reachable(game, up_to_ply, run=run))


# -- meet in the middle ---------------------------------------------------------
@dataclass
class Backup:
    """Backed-up levels ``i -> (RW_i, RL_i, RU_i)`` plus the seed parameters."""

    levels: dict
    start: int
    j0: int
    closed: bool

    def rw(self, i):
        return self.levels[i][0]

    def rl(self, i):
        return self.levels[i][1]

    def ru(self, i):
        return self.levels[i][2]


def mitm_backup(game: GameDef, reach: list[TaggedSet], win_seed: dict, loss_seed: dict, start: int,
                j0: int = 0, *, allow_open: bool = False, run: _Run | None = None) -> Backup:
    """Back solved sets up from ``R_start`` to ``R_0``.

    The seed is ``RW = R_start & W_j0`` and ``RL = R_start & L_j0``. When the
    seed leaves nothing unresolved, every lower level is fully resolved too
    and ``RL_i = R_i - RW_i``; all levels are then tagged with an infinite
    backward ply. Otherwise (only with ``allow_open``) the full recursive
    equations are used and unresolved positions stay in ``RU``.
    """
    run = run or _Run()
    top = reach[start]
    p = top.player
    rw = intersection(top.set, win_seed[p])
    rl = intersection(top.set, loss_seed[p])
    ru = difference(top.set, union(rw, rl))
    closed = ru.is_empty
    if not closed and not allow_open:
        raise SeedNotClosedError(
            f"{ru.count()} positions of R_{start} are undecided within {j0} ply"
        )

    def tag(i):
        return INF if closed else j0 + (start - i)

    levels = {}
    rw_t = run.get("RW", p, start, tag(start), lambda: rw, stat_ply=j0)
    rl_t = run.get("RL", p, start, tag(start), lambda: rl, stat_ply=j0)
    levels[start] = (rw_t.set, rl_t.set, ru)
    for i in range(start - 1, -1, -1):
        cur = reach[i]
        p = cur.player
        above_rw, above_rl, above_ru = levels[i + 1]
        moves = game.moves[p]

        def compute_rw(cur=cur, p=p, above_rl=above_rl, moves=moves):
            return intersection(cur.set, union(game.win0[p], reverse(above_rl, moves, run.workers)))

        rw_t = run.get("RW", p, i, tag(i), compute_rw, stat_ply=j0 + start - i)

        def compute_rl(cur=cur, p=p, above_rw=above_rw, above_ru=above_ru, moves=moves, rw_set=rw_t.set):
            if above_ru.is_empty:
                return difference(cur.set, rw_set)
            escapes = reverse(inverse(above_rw), moves, run.workers)
            stuck = difference(game.nonterminal(p), escapes)
            return intersection(cur.set, union(game.loss0[p], stuck))

        rl_t = run.get("RL", p, i, tag(i), compute_rl, stat_ply=j0 + start - i)
        if above_ru.is_empty:
            # RL was taken as R - RW, so nothing is left undecided
            ru = empty_set(cur.set.alphabet, cur.set.length)
        else:
            ru = difference(cur.set, union(rw_t.set, rl_t.set))
        levels[i] = (rw_t.set, rl_t.set, ru)
    return Backup(levels, start, j0, closed)


def _outcome(player_wins: bool, player: Player) -> Outcome:
    winner = player if player_wins else player.opponent
    return Outcome.P1_WIN if winner is Player.P1 else Outcome.P2_WIN


# -- driver --------------------------------------------------------------------
def solve(game: GameDef, config: SolveConfig | None = None) -> SolveResult:
    """Solve the initial position, checkpointing every completed named set."""
    config = config or SolveConfig()
    checkpoint = None
    if config.checkpoint_dir is not None:
        checkpoint = Checkpoint(config.checkpoint_dir, game, config.fingerprint(), resume=config.resume)
        if config.resume and checkpoint.result is not None:
            return _result_from_manifest(checkpoint)
    stats_path = config.stats_path
    if stats_path is None and config.checkpoint_dir is not None:
        stats_path = f"{config.checkpoint_dir}/stats.csv"
    stats = StatsWriter(stats_path, append=config.resume)
    run = _Run(checkpoint, stats, config.workers)
    if config.mode == "retro":
        result = _solve_retro(game, config, run)
    else:
        result = _solve_mitm(game, config, run)
    if checkpoint is not None:
        checkpoint.set_result(result.to_json())
        result.stats = _stats_from_manifest(checkpoint)
    else:
        result.stats = list(stats.rows)
    return result


def finished_result(description: dict, config: SolveConfig) -> SolveResult | None:
    """Stored result of a completed solve, read without building the game.

    Returns ``None`` unless ``config`` resumes a checkpoint directory whose
    manifest matches ``description`` and ``config`` and already holds a result.
    """
    if not (config.resume and config.checkpoint_dir):
        return None
    try:
        checkpoint = Checkpoint.open_existing(config.checkpoint_dir, description)
    except CheckpointError:
        return None
    if checkpoint.config != config.fingerprint() or checkpoint.result is None:
        return None
    return _result_from_manifest(checkpoint)


def _solve_retro(game, config, run):
    p0 = game.initial_player
    res = retrograde_solve(game, config.max_iterations, run=run, keep_history=True)
    witness = None
    for j, (win, loss) in enumerate(res.history):
        if game.initial in win[p0] or game.initial in loss[p0]:
            witness = j
            break
    if game.initial in res.win[p0]:
        value = _outcome(True, p0)
    elif game.initial in res.loss[p0]:
        value = _outcome(False, p0)
    else:
        value = Outcome.DRAW if res.converged else Outcome.UNKNOWN
    uncovered = 0
    if not res.converged:
        undecided = inverse(union(res.win[p0], res.loss[p0]))
        uncovered = undecided.count()
    return SolveResult(value, witness, truncated=not res.converged, uncovered=uncovered, mode="retro")


def _solve_mitm(game, config, run):
    j0 = config.backward_plies
    if j0 == 0:
        win_seed = dict(game.win0)
        loss_seed = dict(game.loss0)
    else:
        seed = retrograde_solve(game, j0, run=run)
        win_seed, loss_seed = seed.win, seed.loss
    reach = []
    start = None
    for tagged in iter_reachable(game, config.forward_plies, run=run):
        reach.append(tagged)
        p = tagged.player
        undecided = difference(tagged.set, union(win_seed[p], loss_seed[p]))
        if undecided.is_empty:
            start = tagged.forward_ply
            break
    truncated = start is None
    if truncated:
        start = len(reach) - 1
    backup = mitm_backup(game, reach, win_seed, loss_seed, start, j0, allow_open=truncated, run=run)
    p0 = game.initial_player
    if game.initial in backup.rw(0):
        value = _outcome(True, p0)
    elif game.initial in backup.rl(0):
        value = _outcome(False, p0)
    else:
        value = Outcome.UNKNOWN
    uncovered = sum(backup.ru(i).count() for i in backup.levels)
    return SolveResult(value, start, truncated=truncated, uncovered=uncovered, mode="mitm")


def _stats_from_manifest(checkpoint: Checkpoint) -> list[PlyStat]:
    stats = []
    for name in checkpoint.names():
        entry = checkpoint.entry(name)
        stats.append(
            PlyStat(
                entry["kind"],
                entry["player"],
                _ply_value(entry["ply_forward"]),
                _ply_value(entry["stat_ply_backward"]),
                int(entry["positions"]),
                entry["states"],
            )
        )
    return stats


def _result_from_manifest(checkpoint: Checkpoint) -> SolveResult:
    data = checkpoint.result
    return SolveResult(
        Outcome(data["value"]),
        data["witness_ply"],
        _stats_from_manifest(checkpoint),
        truncated=data["truncated"],
        uncovered=int(data["uncovered"]),
        mode=data["mode"],
    )
