#!/usr/bin/env python3
# Copyright 2026 The pipebench Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent reference values for the C++ tests.

Everything here is written from the definitions, sharing no code with the
library: simHash bit by bit, band dedup by exhaustive pairwise check, DPO
loss and gradients in 50-digit arithmetic. Run to regenerate the JSON files
beside this script.
"""

import json
import random
import re
from pathlib import Path

import mpmath

HERE = Path(__file__).resolve().parent
MASK = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & MASK
    return h


def mix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def words(text: str):
    # ASCII fixtures only: lowercase alphanumeric runs.
    return re.findall(r"[a-z0-9]+", text.lower())


def simhash(text: str) -> int:
    ws = words(text)
    if not ws:
        raise ValueError("no words")
    counts = {}
    for w in ws:
        counts[w] = counts.get(w, 0) + 1
    hashes = {w: mix64(fnv1a64(w.encode())) for w in counts}
    out = 0
    for bit in range(64):
        total = 0
        for w, c in counts.items():
            total += c if (hashes[w] >> bit) & 1 else -c
        if total > 0:
            out |= 1 << bit
    return out


def similarity(a: int, b: int) -> float:
    return 1.0 - bin(a ^ b).count("1") / 64.0


def jaccard(a: str, b: str) -> float:
    sa, sb = set(words(a)), set(words(b))
    return len(sa & sb) / len(sa | sb)


SENTENCES = [
    "How does pixel aging in OLED panels affect long term luminance uniformity?",
    "How does pixel aging in OLED displays affect long term luminance uniformity?",
    "What limits the mobility of amorphous silicon thin film transistors?",
    "Why do quantum dot color converters degrade under blue light flux?",
    "Which mass transfer methods are used for micro LED displays?",
    "the the the panel panel backplane",
]

VOCAB = """oled lcd tft micro led quantum dot pixel panel backplane luminance
uniformity aging mobility threshold voltage compensation circuit encapsulation
layer cathode anode emission efficiency lifetime color gamut brightness contrast
ratio refresh rate driver ic polarizer substrate glass flexible foldable hinge
crease touch sensor yield defect inspection repair laser annealing oxide igzo
ltps mask evaporation inkjet printing""".split()
TAILS = "why how which what".split()


def synth_corpus(n: int, seed: int):
    rng = random.Random(seed)
    bases = []
    records = []
    for i in range(n):
        if bases and rng.random() < 0.45:
            base = rng.choice(bases)
            ws = base.split()
            for _ in range(rng.choice([0, 1, 1, 2, 3, 4, 6])):
                ws[rng.randrange(len(ws))] = rng.choice(VOCAB)
            text = " ".join(ws)
        else:
            text = rng.choice(TAILS) + " " + " ".join(rng.choice(VOCAB) for _ in range(rng.randint(8, 16)))
            bases.append(text)
        records.append({"id": f"s{i:03d}", "text": text + "?"})
    return records


def band_oracle(records, low, high, adjudicate_min_jaccard):
    """Exhaustive rule application: a record survives iff no earlier survivor
    is above `high`, or inside the band and judged duplicate."""
    recs = sorted(records, key=lambda r: r["id"])
    fps = {r["id"]: simhash(r["text"]) for r in recs}
    kept = []
    pairs = {"below": 0, "band": 0, "above": 0}
    for i, r in enumerate(recs):
        for e in recs[:i]:
            s = similarity(fps[e["id"]], fps[r["id"]])
            pairs["below" if s < low else "above" if s > high else "band"] += 1
        dup = False
        for e in kept:
            s = similarity(fps[e["id"]], fps[r["id"]])
            if s > high or (low <= s <= high and jaccard(e["text"], r["text"]) >= adjudicate_min_jaccard):
                dup = True
        if not dup:
            kept.append(r)
    return {
        "records": [dict(r, simhash=f"{fps[r['id']]:016x}") for r in recs],
        "low": low,
        "high": high,
        "adjudicate_min_jaccard": adjudicate_min_jaccard,
        "retained": [r["id"] for r in kept],
        "pair_regions": pairs,
    }


def dpo_oracle():
    mpmath.mp.dps = 50
    rng = random.Random(7)
    items = []
    for _ in range(100):
        vals = [round(rng.uniform(-60, -1), 6) for _ in range(4)]
        items.append({"policy_chosen": vals[0], "policy_rejected": vals[1],
                      "ref_chosen": vals[2], "ref_rejected": vals[3]})
    beta = mpmath.mpf("0.1")
    cases = []
    for it in items:
        z = beta * ((mpmath.mpf(it["policy_chosen"]) - mpmath.mpf(it["ref_chosen"]))
                    - (mpmath.mpf(it["policy_rejected"]) - mpmath.mpf(it["ref_rejected"])))
        loss = -mpmath.log(1 / (1 + mpmath.exp(-z)))
        # d loss / d policy_chosen = -beta * sigmoid(-z)
        grad = -beta / (1 + mpmath.exp(z))
        cases.append(dict(it, loss=float(loss), grad_policy_chosen=float(grad)))
    mean = sum(mpmath.mpf(c["loss"]) for c in cases) / len(cases)
    fixed = []
    for b, margins in ((1.0, [1.0, -1.0]), (0.5, [4.0]), (2.0, [-3.0, 0.25])):
        vals = [-mpmath.log(1 / (1 + mpmath.exp(-mpmath.mpf(b) * m))) for m in margins]
        fixed.append({"beta": b, "margins": margins, "mean_loss": float(sum(vals) / len(vals))})
    return {"beta": 0.1, "items": cases, "mean_loss": float(mean), "ln2": float(mpmath.log(2)), "fixed": fixed}


def main():
    table = {"sentences": [], "hamming": []}
    fps = [simhash(s) for s in SENTENCES]
    for s, f in zip(SENTENCES, fps):
        table["sentences"].append({"text": s, "simhash": f"{f:016x}"})
    for i in range(len(fps)):
        for j in range(i + 1, len(fps)):
            table["hamming"].append({"a": i, "b": j, "distance": bin(fps[i] ^ fps[j]).count("1")})
    (HERE / "simhash.json").write_text(json.dumps(table, indent=1) + "\n")

    band = {"small": band_oracle(synth_corpus(50, 1), 0.7, 0.9, 0.6),
            "large": band_oracle(synth_corpus(200, 2), 0.7, 0.9, 0.6)}
    (HERE / "band_dedup.json").write_text(json.dumps(band, indent=1) + "\n")
    (HERE / "dpo.json").write_text(json.dumps(dpo_oracle(), indent=1) + "\n")
    for k, v in band.items():
        print(k, len(v["records"]), "retained", len(v["retained"]), v["pair_regions"])


if __name__ == "__main__":
    main()
