"""Scripted probe answers with hand-assigned scores.

Reads the probe cuts (game id, truncated plies, next move) listed by a probe
run over tests/fixtures/acceptance/probe_games.jsonl and writes one scripted
answer per cut. Answers come in five shapes; the expected alignment and
suggestion validity of each shape are fixed by hand:

  0  names only the move the game continued with        aligned, valid
  1  that move plus a pawn push no black pawn can make   aligned, not valid
  2  only an impossible promotion                        neither
  3  no move at all                                      neither
  4  the continuation twice, decorated                   aligned, valid

The continuation is the recorded model's greedy reply, which the material
engine ranks first, so shapes 0 and 4 suggest only top-four moves.
"""
import json
import sys

SHAPES = [
    ("I would play {m}.", True, True),
    ("{m} looks right, although a7 was tempting.", True, False),
    ("My choice is b8=Q.", False, False),
    ("It is hard to say without seeing the board.", False, False),
    ("{m}! Definitely {m}, it keeps everything together.", True, True),
]


def main(probes_path, out_path):
    rows = []
    for i, line in enumerate(open(probes_path)):
        p = json.loads(line)
        text, aligned, valid = SHAPES[i % len(SHAPES)]
        rows.append({"game_id": p["game_id"], "truncated_plies": p["truncated_plies"], "next_move": p["next_move"],
                     "response": text.format(m=p["next_move"]), "aligned": aligned, "valid": valid})
    with open(out_path, "w") as f:
        json.dump(rows, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2] if len(sys.argv) > 2 else "tests/fixtures/acceptance/probe_script.json")
