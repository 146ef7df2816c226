#!/usr/bin/env python3
"""Regenerates the bundled fixtures under fixtures/. Output is deterministic."""

import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"

SUBJECTS = [
    ("unemployment rate", "Ohio", "percent"),
    ("median household income", "Texas", "dollars"),
    ("population", "Lagos", "people"),
    ("minimum wage", "Florida", "dollars per hour"),
    ("number of new homes built", "Arizona", "homes"),
    ("state budget deficit", "Illinois", "million dollars"),
    ("number of registered voters", "Georgia", "voters"),
    ("teen birth rate", "Mississippi", "per thousand"),
    ("average rent", "Boston", "dollars"),
    ("number of police officers", "Chicago", "officers"),
    ("annual rainfall", "Seattle", "millimetres"),
    ("graduation rate", "Nevada", "percent"),
    ("number of hospital beds", "Kerala", "beds"),
    ("gasoline price", "California", "cents per gallon"),
    ("prison population", "Louisiana", "inmates"),
    ("tourist arrivals", "Bali", "visitors"),
    ("wind power capacity", "Iowa", "megawatts"),
    ("public debt", "Japan", "billion yen"),
    ("number of measles cases", "Samoa", "cases"),
    ("coal production", "Wyoming", "thousand tonnes"),
]

VERBS = ["rose to", "fell to", "reached", "stood at", "climbed to", "dropped to"]
FILLER = [
    "officials said in a statement", "according to the annual report", "the agency reported",
    "figures released on Monday show", "a spokesperson confirmed", "the survey found",
]
DISTRACT = [
    "The city council approved a new parking ordinance covering {n} streets.",
    "Local farmers harvested {n} bushels of corn during an unusually dry season.",
    "The museum welcomed {n} visitors to its spring exhibition on maritime history.",
    "A regional airline added {n} weekly flights between the two coastal cities.",
    "The library system lent {n} electronic books over the holiday period.",
    "Volunteers planted {n} trees along the river as part of a restoration project.",
    "The stadium renovation will add {n} seats before the next football season.",
    "School districts reported {n} snow days across the northern counties.",
]
SPLITS = ["train"] * 12 + ["validation"] * 5 + ["test"] * 3
LABELS = ["True", "False", "Conflicting"]


def number(rng):
    return rng.choice([rng.randint(2, 99), rng.randint(100, 9999), rng.randint(10000, 9999999)])


def toy():
    rng = random.Random(20240601)
    # Every labeled split carries all three classes.
    train = ["True"] * 4 + ["False"] * 5 + ["Conflicting"] * 3
    val = ["True"] * 2 + ["False"] * 2 + ["Conflicting"]
    rng.shuffle(train)
    rng.shuffle(val)
    labels = train + val + ["True", "False", "Conflicting"]
    claims, evidence, decomps = [], [], []
    doc_no = 0

    def add_doc(text):
        nonlocal doc_no
        evidence.append({"doc_id": f"ev-{doc_no:04d}", "text": text})
        doc_no += 1

    for i, (what, where, unit) in enumerate(SUBJECTS):
        cid = f"toy-{i:02d}"
        year = rng.randint(2008, 2022)
        value = number(rng)
        verb = rng.choice(VERBS)
        text = f"The {what} in {where} {verb} {value} {unit} in {year}."
        split = SPLITS[i]
        label = labels[i]
        claim = {"claim_id": cid, "text": text, "split": split}
        if split != "test":
            claim["label"] = label
        claims.append(claim)

        wrong = value + rng.randint(1, max(2, value // 3))
        support = [value] * 3
        if label == "False":
            support = [wrong] * 3
        elif label == "Conflicting":
            support = [value, wrong, value]
        for k, v in enumerate(support):
            add_doc(f"In {year} the {what} in {where} was {v} {unit}, {rng.choice(FILLER)}.")
        add_doc(f"Historical data on the {what} in {where} goes back to {year - rng.randint(10, 40)}.")
        add_doc(f"Analysts expect the {what} across the region to change by {rng.randint(2, 15)} percent next year.")

        decomps.append({
            "claim_id": cid,
            "questions": [
                f"Was the {what} in {where} {value} {unit}?",
                f"Did the {what} in {where} change in {year}?",
                f"Is {value} the official figure for {where}?",
            ],
            "source": "cache",
        })

    while len(evidence) < 200:
        add_doc(rng.choice(DISTRACT).format(n=number(rng)))
    order = list(range(len(evidence)))
    rng.shuffle(order)
    evidence = [{"doc_id": f"ev-{j:04d}", "text": evidence[o]["text"]} for j, o in enumerate(order)]

    queries = [d["questions"][0] for d in decomps]
    queries += ["number of visitors in 2019", "1234567", "corn harvest dry season",
                "percent change next year", "official figure"]

    out = ROOT / "toy"
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "claims.jsonl", claims)
    write_jsonl(out / "evidence.jsonl", evidence)
    write_jsonl(out / "decompositions.jsonl", decomps)
    (out / "queries.txt").write_text("\n".join(queries) + "\n")


def separable():
    rng = random.Random(42)
    rows = []
    for i in range(60):
        cls = i % 3
        angle = 2 * math.pi * cls / 3
        x = 3 * math.cos(angle) + rng.gauss(0, 0.5)
        y = 3 * math.sin(angle) + rng.gauss(0, 0.5)
        rows.append({"label": LABELS[cls], "indices": [0, 1, 2], "values": [round(x, 6), round(y, 6), 1.0]})
    write_jsonl(ROOT / "separable.jsonl", rows)


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    toy()
    separable()
