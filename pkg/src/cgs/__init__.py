"""Layered-DFA position sets and set-based game solving (Nim, Breakthrough)."""

from .algebra import (
    difference,
    intersection,
    intersection_many,
    inverse,
    is_disjoint,
    is_subset,
    union,
    union_many,
)
from .checkpoint import Checkpoint, PlyStat, TaggedSet
from .dfa import (
    Alphabet,
    PositionSet,
    contains,
    count,
    cube,
    deserialize,
    empty_set,
    enumerate_strings,
    from_strings,
    num_states,
    serialize,
    universe_set,
)
from .errors import (
    AlphabetMismatchError,
    BudgetExceededError,
    CGSError,
    CheckpointError,
    ContractError,
    FormatError,
    InvalidSymbolError,
    LengthMismatchError,
    SeedNotClosedError,
    StructuralError,
)
from .games import GameDef, Player, breakthrough_game, make_game, nim_game
from .moves import Change, MoveList, MoveSpec, apply_changes, forward, reverse
from .oracle import Value, brute_force_oracle, rules_for
from .solver import (
    Outcome,
    SolveConfig,
    SolveResult,
    mitm_backup,
    reachable,
    retrograde_solve,
    solve,
)

__version__ = "0.1.0"
