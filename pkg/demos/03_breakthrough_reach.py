# Reachable Breakthrough positions by ply, and how well the DFA compresses them.
# Usage: python demos/03_breakthrough_reach.py [width height]
import sys
import time

from cgs.cli import fit_exponent
from cgs.games import breakthrough_game
from cgs.solver import iter_reachable

w, h = (int(x) for x in sys.argv[1:3]) if len(sys.argv) >= 3 else (4, 5)
game = breakthrough_game(w, h)
print(f"{w}x{h}: {game.length} squares, at most {game.max_ply} ply")

points = []
start = time.perf_counter()
for t in iter_reachable(game):
    n, s = t.set.count(), t.set.num_states()
    points.append((n, s))
    ratio = n / s if s else 0
    print(f"R_{t.forward_ply:<3d} {t.player.tag}  {n:>14,d} positions  {s:>9,d} states  {ratio:12.1f} per state")
print(f"{time.perf_counter() - start:.1f}s")

# states ~ positions^c over the large sets
c = fit_exponent(points)
print("fitted exponent c =", "n/a" if c is None else round(c, 3))
