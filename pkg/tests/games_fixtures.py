"""Hand-built games used across the test modules."""
from __future__ import annotations

from congames.constraints import Table
from congames.csp import OptGoal
from congames.domains import Domain
from congames.model import Game, PlayerSpec


def matrix_3x3() -> Game:
    """Two-player 3x3 satisfaction game with a single equilibrium at (2, 3).

    Player 1 picks the column ``y`` in 1..3, player 2 picks the row ``x`` in
    1..3 (1=a, 2=b, 3=c in the usual grid reading). Win sets transcribe the
    payoff grid:

        row a: (0,1) (1,0) (1,0)
        row b: (0,1) (0,0) (1,0)
        row c: (1,0) (1,1) (0,0)

    where a cell reads (row player's payoff, column player's payoff).
    """
    y, x = 0, 1
    col_wins = ((1, 1), (1, 2), (2, 3))  # (y, x) cells where the column player is paid
    row_wins = ((2, 1), (3, 1), (3, 2), (1, 3), (2, 3))
    return Game(
        title="demo-3x3",
        var_names=("y", "x"),
        domains=(Domain.range(1, 3), Domain.range(1, 3)),
        players=(PlayerSpec("Column", (y,)), PlayerSpec("Row", (x,))),
        existential=(),
        goals=((Table((y, x), col_wins),), (Table((y, x), row_wins),)),
        opts=(None, None),
        hard=(),
    )


def backjump_showcase() -> Game:
    """Three-player game engineered to exercise counter-driven backjumping.

    Player X has a single strategy, Y has nine, Z has three. Best responses
    (payoff 1 cells, everything else 0, both maximize):

        Z against y: 1->3, 2->1, 3->3, 4->2, 5..9->2
        Y against z: 1->3, 2->8, 3->1

    X is indifferent everywhere. Equilibria: (1, 1, 3) and (1, 8, 2).
    """
    xv, yv, zv = 0, 1, 2
    pay_y, pay_z = 3, 4
    best_z = {1: 3, 2: 1, 3: 3, 4: 2, 5: 2, 6: 2, 7: 2, 8: 2, 9: 2}
    best_y = {1: 3, 2: 8, 3: 1}
    z_rows = tuple(
        (y, z, 1 if best_z[y] == z else 0) for y in range(1, 10) for z in range(1, 4)
    )
    y_rows = tuple(
        (z, y, 1 if best_y[z] == y else 0) for z in range(1, 4) for y in range(1, 10)
    )
    return Game(
        title="backjump-showcase",
        var_names=("x", "y", "z", "pay_y", "pay_z"),
        domains=(
            Domain.singleton(1),
            Domain.range(1, 9),
            Domain.range(1, 3),
            Domain.range(0, 1),
            Domain.range(0, 1),
        ),
        players=(PlayerSpec("X", (xv,)), PlayerSpec("Y", (yv,)), PlayerSpec("Z", (zv,))),
        existential=(pay_y, pay_z),
        goals=(
            (),
            (Table((zv, yv, pay_y), y_rows),),
            (Table((yv, zv, pay_z), z_rows),),
        ),
        opts=(None, OptGoal("max", pay_y), OptGoal("max", pay_z)),
        hard=(),
    )
