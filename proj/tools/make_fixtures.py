#!/usr/bin/env python3
"""Regenerates the bundled analysis fixtures under data/fixtures.

The count tables are the published contingency counts. The comment-level
datasets are synthetic: responses and codes are generated so that the coded
tuples aggregate exactly to those counts. Output is deterministic.
"""

import csv
import random
import sys
from pathlib import Path

MEETING_WEEKS = [24, 28, 32, 36, 40, 44, 48, 52]
LEVELS = ["perception", "comprehension", "projection"]

CODEBOOK = {
    "perception": (
        ["inventory cost", "backlog cost", "costs", "profit", "inventory", "demand", "backlog", "order"],
        ["increase", "decrease", "consistent", "zero", "over-order", "under-order"],
    ),
    "comprehension": (
        ["general", "inventory", "demand", "backlog", "supply line", "order"],
        ["positive", "negative", "neutral", "uncertain"],
    ),
    "projection": (
        ["general", "profit", "inventory", "demand", "backlog", "order", "allocation"],
        ["improve", "anticipate problem/uncertainty", "increase", "decrease", "constant", "uncertain",
         "proportionally", "HC with higher delivery rate", "HC2"],
    ),
}

PHRASES = {
    "perception": "{topic} went {desc}",
    "comprehension": "{topic} looks {desc}",
    "projection": "next we expect {topic} to {desc}",
}

# Study 1: (disrupted, info) -> players and per-level code counts.
STUDY1 = {
    ("MN1", "none"): (17, (13, 118, 9)),
    ("MN2", "none"): (19, (19, 119, 18)),
    ("MN1", "partial"): (20, (30, 120, 17)),
    ("MN2", "partial"): (21, (50, 126, 34)),
    ("MN1", "complete"): (18, (26, 120, 12)),
    ("MN2", "complete"): (20, (34, 124, 22)),
}

# Study 2: (profile, info) -> players and per-level code counts.
STUDY2 = {
    ("Hoarder", "partial"): (25, (57, 163, 36)),
    ("Hoarder", "none"): (31, (31, 224, 20)),
    ("Reactor", "partial"): (27, (21, 185, 14)),
    ("Reactor", "none"): (21, (39, 148, 28)),
    ("Follower", "partial"): (8, (3, 46, 2)),
    ("Follower", "none"): (9, (1, 49, 2)),
}

UNANSWERED_RATE = 0.05


def random_code(rng, level):
    topics, descs = CODEBOOK[level]
    return (level, rng.choice(topics), rng.choice(descs))


def text_for(codes):
    if not codes:
        return ""
    parts = [PHRASES[l].format(topic=t, desc=d) for l, t, d in codes]
    return "; ".join(parts).capitalize() + "."


def make_cell(rng, players, counts):
    """Comments (player index, week) -> list of codes, summing to counts."""
    slots = [(p, w) for p in range(players) for w in MEETING_WEEKS]
    rng.shuffle(slots)
    n_empty = int(round(UNANSWERED_RATE * len(slots)))
    answered = slots[n_empty:]
    codes = {s: [] for s in slots}
    pool = [lvl for lvl, n in zip(LEVELS, counts) for _ in range(n)]
    rng.shuffle(pool)
    for i, lvl in enumerate(pool):
        codes[answered[i % len(answered)]].append(random_code(rng, lvl))
    return codes


def write_rows(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["player", "week", "text", "rater", "level", "topic", "description"])
        w.writerows(rows)


def comment_rows(player, week, text, rater, codes):
    if not codes:
        return [[player, week, text, rater, "", "", ""]]
    return [[player, week, text, rater, l, t, d] for l, t, d in codes]


def perturb(rng, codes):
    """A dissenting rater's coding: drop, add or relabel one tuple."""
    out = list(codes)
    move = rng.choice(["drop", "add", "relabel"]) if out else "add"
    if move == "drop":
        out.pop(rng.randrange(len(out)))
    elif move == "add":
        out.append(random_code(rng, rng.choice(LEVELS)))
    else:
        i = rng.randrange(len(out))
        lvl = rng.choice([l for l in LEVELS if l != out[i][0]])
        out[i] = random_code(rng, lvl)
    return out


def study1(out, rng):
    players, rows = [], []
    pid = 0
    for (mn, info), (n, counts) in STUDY1.items():
        cell = make_cell(rng, n, counts)
        for p in range(n):
            name = f"PL1-{pid + p + 1:03d}"
            players.append([name, "study1", mn, info, ""])
            for w in MEETING_WEEKS:
                codes = cell[(p, w)]
                rows += comment_rows(name, w, text_for(codes), "R1", codes)
        pid += n
    write_rows(out / "study1_comments.csv", rows)
    write_players(out / "study1_players.csv", players)


def study2(out, rng):
    players, rows = [], []
    pid = 0
    for (profile, info), (n, counts) in STUDY2.items():
        cell = make_cell(rng, n, counts)
        for p in range(n):
            name = f"PL2-{pid + p + 1:03d}"
            players.append([name, "study2", "MN1", info, profile])
            for w in MEETING_WEEKS:
                codes = cell[(p, w)]
                text = text_for(codes)
                # Two raters agree on the resolved coding; in about a third of
                # the responses the remaining rater dissents.
                dissent = rng.randrange(3) if codes and rng.random() < 0.35 else None
                for r in range(3):
                    given = perturb(rng, codes) if r == dissent else codes
                    rows += comment_rows(name, w, text, f"R{r + 1}", given)
        pid += n
    write_rows(out / "study2_comments.csv", rows)
    write_players(out / "study2_players.csv", players)


def write_players(path, players):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["player", "study", "disrupted", "info", "profile"])
        w.writerows(players)


def count_tables(out):
    with open(out / "study1_counts.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["table", "row", "players", "perception", "comprehension", "projection"])
        w.writerow(["disruption", "MN1", 55, 69, 358, 38])
        w.writerow(["disruption", "MN2", 60, 103, 369, 74])
        w.writerow(["info", "Complete", 38, 60, 244, 34])
        w.writerow(["info", "Partial", 41, 80, 246, 51])
        w.writerow(["info", "No-Info", 36, 32, 237, 27])
    with open(out / "study2_counts.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["table", "row", "players", "perception", "comprehension", "projection"])
        w.writerow(["profile", "Hoarder", 56, 88, 387, 56])
        w.writerow(["profile", "Reactor", 48, 60, 333, 42])
        w.writerow(["profile", "Follower", 17, 4, 95, 4])
        for (profile, info), (n, counts) in STUDY2.items():
            label = "Info" if info == "partial" else "No-Info"
            w.writerow([profile, label, n, *counts])


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixtures"
    out.mkdir(parents=True, exist_ok=True)
    count_tables(out)
    study1(out, random.Random(1011))
    study2(out, random.Random(1069))


if __name__ == "__main__":
    main()
