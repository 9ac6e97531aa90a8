# Solve a Breakthrough board with checkpoints, then look positions up.
import tempfile

from cgs.checkpoint import Checkpoint
from cgs.cli import classify
from cgs.games import Player, breakthrough_game
from cgs.solver import SolveConfig, solve

game = breakthrough_game(3, 5)
directory = tempfile.mkdtemp(prefix="cgs-3x5-")
result = solve(game, SolveConfig(checkpoint_dir=directory))
print(game.format_position(game.initial, Player.P1), "->", result.value.short, "wins")
print("forward phase closed at ply", result.witness_ply, "; uncovered:", result.uncovered)

# every completed set is a file plus a manifest entry
ck = Checkpoint.open_existing(directory, game)
print(len(ck.names()), "sets in", directory, ":", ", ".join(ck.names()[:4]), "...")

# membership lookups only; no set is rebuilt here
for text in ["111/111/.../222/222 p1", "111/1.1/.1./222/222 p2", "1../.../.../.../..2 p1"]:
    string, player = game.parse_position(text)
    print(f"{text:<26} {classify(ck, string, player)}")

# running again with resume reads the stored result back
again = solve(game, SolveConfig(checkpoint_dir=directory, resume=True))
print("resumed result identical:", again == result)
