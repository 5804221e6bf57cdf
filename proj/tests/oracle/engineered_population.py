"""Engineered synthetic populations with pre-computed aggregate metrics.

Each game of a population follows an explicit plan: chosen model moves
open with a fixed list of illegal texts before the legal (greedy) reply, and
the final move never turns legal, so the game ends by the illegal-move limit
after exactly L legal moves. The expected IMR, RBLM, GL and MRS per
population, and the RBLM/MRS correlation across populations, are counted
here from the plans alone.

The baseline population is tuned so its rounded means land on the published
baseline figures (IMR 0.26, RBLM 6.78, GL 18.79); the others spread RBLM and
MRS so the cross-population correlation rounds to -0.86.

Plans must give up before the game would end on its own. The natural
length of each game id (tests/fixtures/acceptance/engineered_horizons.json,
from engineered_horizons.sh) caps L; it is a property of the game seeds, not
of the metrics.

Output: tests/fixtures/acceptance/engineered_population.json
"""
import json
import random
import statistics
import sys

# Never legal for black: pawns cannot move back to ranks 7 or 8.
TEXTS = ["a7", "b7", "c7", "d7", "e7", "f7", "g7", "h7", "a8=Q", "b8=Q"]
LIMIT = 10


def counts_for(texts):
    c = {}
    for t in texts:
        c[t] = c.get(t, 0) + 1
    return c


def move_mrs(texts):
    a = len(texts)
    return sum((k / a) ** 2 for k in counts_for(texts).values())


def attempt_texts(rng, r, distinct):
    d = max(1, min(distinct, r))
    chosen = rng.sample(TEXTS, d)
    return [chosen[i % d] for i in range(r)]


def game_metrics(game):
    L = game["legal_moves"]
    offending = game["offending"]  # {move index: [texts]}
    final = game["final"]
    t = L + 1
    p = len(offending) + 1
    r = sum(len(v) for v in offending.values()) + LIMIT
    cycled = [final[i % len(final)] for i in range(LIMIT)]
    shares = [move_mrs(v) for v in offending.values()] + [move_mrs(cycled)]
    return {"imr": p / t, "rblm": r / p, "gl": L, "mrs": sum(shares) / len(shares)}


def summarize(games):
    ms = [game_metrics(g) for g in games]
    return {k: statistics.fmean(m[k] for m in ms) for k in ("imr", "rblm", "gl", "mrs")}


def make_game(rng, L, k, mean_r, distinct):
    idx = sorted(rng.sample(range(1, L + 1), k)) if k else []
    offending = {}
    for i in idx:
        r = max(1, min(LIMIT - 1, round(rng.gauss(mean_r, 1.5))))
        offending[i] = attempt_texts(rng, r, distinct)
    final = rng.sample(TEXTS, max(1, min(distinct, LIMIT)))
    return {"legal_moves": L, "offending": offending, "final": final}


def bounds(horizon, lo, hi):
    top = hi if horizon is None else min(hi, horizon - 1)
    return min(lo, top), top


def tune_baseline(rng, horizons, games=100, gl_total=1879, target=(0.26, 6.78)):
    limits = [bounds(h, 8, 30) for h in horizons[:games]]
    lengths = [rng.randint(lo, hi) for lo, hi in limits]
    while sum(lengths) != gl_total:
        i = rng.randrange(games)
        step = 1 if sum(lengths) < gl_total else -1
        lo, hi = limits[i]
        if lo <= lengths[i] + step <= hi:
            lengths[i] += step
    pop = []
    for L in lengths:
        k = max(0, round(0.26 * (L + 1)) - 1)
        pop.append(make_game(rng, L, k, 6.0, rng.randint(3, 7)))

    def score(p):
        s = summarize(p)
        return abs(s["imr"] - target[0]) + abs(s["rblm"] - target[1]) / 10

    best = score(pop)
    for _ in range(20000):
        s = summarize(pop)
        if round(s["imr"], 2) == target[0] and round(s["rblm"], 2) == target[1] and \
                abs(s["imr"] - target[0]) < 1e-3 and abs(s["rblm"] - target[1]) < 1e-3:
            break
        g = rng.randrange(games)
        old = pop[g]
        L = old["legal_moves"]
        k = len(old["offending"])
        choice = rng.random()
        if choice < 0.3:
            k = max(0, min(L, k + rng.choice([-1, 1])))
            cand = make_game(rng, L, k, rng.uniform(4, 8), rng.randint(3, 7))
        else:
            cand = json.loads(json.dumps(old))
            cand["offending"] = {int(i): v for i, v in cand["offending"].items()}
            if not cand["offending"]:
                continue
            i = rng.choice(list(cand["offending"]))
            texts = cand["offending"][i]
            r = max(1, min(LIMIT - 1, len(texts) + rng.choice([-1, 1])))
            cand["offending"][i] = attempt_texts(rng, r, len(set(texts)))
        pop[g] = cand
        new = score(pop)
        if new <= best:
            best = new
        else:
            pop[g] = old
    return pop


def spread_population(rng, horizons, games, mean_r, distinct):
    pop = []
    for g in range(games):
        L = rng.randint(*bounds(horizons[g], 8, 26))
        k = max(0, round(rng.uniform(0.15, 0.35) * (L + 1)) - 1)
        pop.append(make_game(rng, L, k, mean_r, distinct))
    return pop


def profile(game):
    plan = {str(i): {"illegal": v} for i, v in sorted(game["offending"].items())}
    plan[str(game["legal_moves"] + 1)] = {"illegal": game["final"], "give_up": True}
    return {"p_offend": 0.0, "legal": "greedy", "style": "plain", "plan": plan}


def main(out_path, horizons_path, seed=86):
    rng = random.Random(seed)
    with open(horizons_path) as f:
        horizons = json.load(f)
    baseline = tune_baseline(rng, horizons["Baseline"])
    others = [("Int-Illegal", 3.0, 2), ("Int-Rules", 8.0, 8), ("Move-Repeat", 4.0, 2), ("Dsc-Base", 6.5, 6)]
    for _ in range(2000):
        pops = [("Baseline", baseline)] + [
            (v, spread_population(rng, horizons[v], 20, r + rng.uniform(-1.5, 1.5), d + rng.randint(-2, 2))) for v, r, d in others]
        sums = {v: summarize(p) for v, p in pops}
        r = statistics.correlation([s["rblm"] for s in sums.values()], [s["mrs"] for s in sums.values()])
        if round(r, 2) == -0.86:
            break
    else:
        raise SystemExit("no population set reached the target correlation")
    doc = {
        "seed": 20230301,
        "move_cap": 200,
        "populations": [{"variation": v, "profiles": [profile(g) for g in p]} for v, p in pops],
        "expected": {v: s for v, s in sums.items()},
        "rblm_mrs_r": r,
    }
    with open(out_path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    for v, s in sums.items():
        print(v, {k: round(x, 4) for k, x in s.items()})
    print("r", r)


if __name__ == "__main__":
    d = "tests/fixtures/acceptance/"
    main(sys.argv[1] if len(sys.argv) > 1 else d + "engineered_population.json",
         sys.argv[2] if len(sys.argv) > 2 else d + "engineered_horizons.json")
