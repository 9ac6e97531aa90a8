# Retrograde analysis on Nim: the lost set is "XOR of heaps = 0",
# and its DFA stays tiny as heaps and sticks grow.
import itertools
from functools import reduce
from operator import xor

from cgs.dfa import contains
from cgs.games import Player, nim_game
from cgs.solver import SolveConfig, retrograde_solve, solve

game = nim_game(3, 5)
res = retrograde_solve(game, keep_history=True)
print("fixpoint after", res.ply, "ply; converged:", res.converged)

lost = res.loss[Player.P1]
bad = [p for p in itertools.product(range(6), repeat=3) if contains(lost, p) != (reduce(xor, p) == 0)]
print("positions where L disagrees with the XOR rule:", len(bad))

# how W_j and L_j grow ply by ply
for j, (w, l) in enumerate(res.history[:8]):
    print(f"j={j:2d}  |W|={w[Player.P1].count():4d}  |L|={l[Player.P1].count():4d}")

print("winner:", solve(game, SolveConfig(mode="retro")).value.short)  # XOR 5^5^5 = 5, first player wins

# states of L stay linear in heaps * sticks
for m, n in [(2, 7), (3, 7), (4, 7), (4, 15)]:
    l_inf = retrograde_solve(nim_game(m, n)).loss[Player.P1]
    print(f"Nim({m},{n}): {l_inf.count():6d} lost positions, {l_inf.num_states():3d} states, m(n+1)={m * (n + 1)}")
