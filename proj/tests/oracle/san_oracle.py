"""Freeze python-chess SAN listings for random reachable positions.

Output: one JSON object per line {"fen": ..., "san": [sorted SAN of every legal move],
"uci_to_san": {uci: san}}. Consumed by the C++ chess-core tests as an
independent formatter oracle.
"""
import json
import random
import sys

import chess

EXTRA = [
    # Rooks on the same rank both reaching d1; knights on b1/f3 reaching d2.
    "4k3/8/8/8/8/5N2/8/R2NK2R w - - 0 1",
    "4k3/8/8/8/8/5N2/8/RN2K2R w KQ - 0 1",
    # Three queens forcing full-square disambiguation.
    "4k3/8/8/8/8/Q1Q5/8/Q3K3 w - - 0 1",
    # Promotions with captures and en passant available.
    "r3k3/1P6/8/3pP3/8/8/8/4K3 w q d6 0 1",
    # Rooks on the same file.
    "4k3/8/3r4/8/8/3r4/8/4K3 b - - 0 1",
]


def main(count, seed, out):
    rng = random.Random(seed)
    rows = []
    for fen in EXTRA:
        rows.append(chess.Board(fen))
    while len(rows) < count:
        board = chess.Board()
        plies = rng.randint(0, 120)
        for _ in range(plies):
            moves = list(board.legal_moves)
            if not moves or board.is_game_over():
                break
            board.push(rng.choice(moves))
        if board.is_game_over():
            continue
        rows.append(board.copy(stack=False))
    with open(out, "w") as fh:
        for board in rows:
            table = {m.uci(): board.san(m) for m in board.legal_moves}
            fh.write(json.dumps({"fen": board.fen(), "uci_to_san": dict(sorted(table.items()))}) + "\n")


if __name__ == "__main__":
    main(int(sys.argv[1]), int(sys.argv[2]), sys.argv[3])
