#!/usr/bin/env python3
"""Writes the bundled mini fixture: a synthetic dependency corpus over four
animal groups, three toy dictionaries, a build recipe, a feature config and
gold/label files. Output is deterministic for a given seed."""

import argparse
import json
import random
from collections import Counter
from pathlib import Path

GROUPS = {
    "horned": {
        "prototypes": ["cow", "deer", "ram"],
        "targets": ["goat", "bison", "antelope"],
        "body": ["horn", "hoof", "mane", "ear", "skin"],
        "place": ["meadow", "pasture", "farm", "field", "mountain"],
        "motion": ["graze", "gallop", "walk", "trot", "leap"],
        "features": ["has_horns", "lives_in_meadows", "grazes"],
    },
    "winged": {
        "prototypes": ["eagle", "owl", "crow"],
        "targets": ["sparrow", "hawk", "pigeon"],
        "body": ["wing", "feather", "beak", "talon", "eye"],
        "place": ["sky", "nest", "tree", "cliff", "roost"],
        "motion": ["fly", "soar", "glide", "hop", "perch"],
        "features": ["has_feathers", "nests_in_trees", "flies"],
    },
    "aquatic": {
        "prototypes": ["shark", "trout", "salmon"],
        "targets": ["eel", "tuna", "carp"],
        "body": ["fin", "gill", "scale", "tail", "jaw"],
        "place": ["river", "sea", "lake", "ocean", "reef"],
        "motion": ["swim", "dive", "float", "drift", "spawn"],
        "features": ["has_fins", "lives_in_water", "swims"],
    },
    "predator": {
        "prototypes": ["wolf", "fox", "bear"],
        "targets": ["lynx", "badger", "weasel"],
        "body": ["fur", "claw", "paw", "snout", "fang"],
        "place": ["forest", "den", "cave", "valley", "hill"],
        "motion": ["hunt", "prowl", "roam", "climb", "stalk"],
        "features": ["has_fur", "lives_in_forests", "hunts"],
    },
}

FAMILIES = [("body", "BODY"), ("location", "LOCATION"), ("locomotion", "MOTION")]
GENERIC_NOUNS = ["food", "water", "day", "night", "season"]
GENERIC_VERBS = ["eat", "see", "need"]
# Dictionary entries outside the selected tags; they must not become dims.
DISTRACTORS = {
    "body": [("stone", "Mat"), ("rope", "Art")],
    "place": [("idea", "Abs"), ("song", "Abs")],
    "motion": [("think", "Cogn"), ("say", "Comm")],
}


def token(i, form, upos, head, deprel):
    xpos = {"NOUN": "S", "VERB": "V", "DET": "RD", "ADP": "E"}[upos]
    return [str(i), form, form, upos, xpos, "_", str(head), deprel, "_", "_"]


def pick(rng, group, slot, noise):
    if rng.random() < noise:
        other = rng.choice([g for g in GROUPS if g != group])
        return rng.choice(GROUPS[other][slot])
    return rng.choice(GROUPS[group][slot])


def sentence_habit(rng, group, animal, noise):
    # the ANIMAL with PART VERB in the PLACE
    return [
        token(1, "the", "DET", 2, "det"),
        token(2, animal, "NOUN", 5, "nsubj"),
        token(3, "with", "ADP", 4, "case"),
        token(4, pick(rng, group, "body", noise), "NOUN", 2, "nmod"),
        token(5, pick(rng, group, "motion", noise), "VERB", 0, "root"),
        token(6, "in", "ADP", 8, "case"),
        token(7, "the", "DET", 8, "det"),
        token(8, pick(rng, group, "place", noise), "NOUN", 5, "obl"),
    ]


def sentence_chase(rng, predator, prey):
    # the PREDATOR VERB the PREY
    return [
        token(1, "the", "DET", 2, "det"),
        token(2, predator, "NOUN", 3, "nsubj"),
        token(3, rng.choice(["hunt", "stalk"]), "VERB", 0, "root"),
        token(4, "the", "DET", 5, "det"),
        token(5, prey, "NOUN", 3, "obj"),
    ]


def sentence_generic(rng, animal):
    # the ANIMAL VERB NOUN
    return [
        token(1, "the", "DET", 2, "det"),
        token(2, animal, "NOUN", 3, "nsubj"),
        token(3, rng.choice(GENERIC_VERBS), "VERB", 0, "root"),
        token(4, rng.choice(GENERIC_NOUNS), "NOUN", 3, "obj"),
    ]


def corpus(rng, n, noise):
    animals = [(g, a) for g, d in GROUPS.items() for a in d["prototypes"] + d["targets"]]
    prey = [a for g in ("horned", "aquatic") for a in GROUPS[g]["prototypes"] + GROUPS[g]["targets"]]
    predators = GROUPS["predator"]["prototypes"] + GROUPS["predator"]["targets"]
    out = []
    for i in range(n):
        r = rng.random()
        if r < 0.1:
            toks = sentence_chase(rng, rng.choice(predators), rng.choice(prey))
        elif r < 0.2:
            toks = sentence_generic(rng, rng.choice(animals)[1])
        else:
            group, animal = animals[i % len(animals)]
            toks = sentence_habit(rng, group, animal, noise)
        out.append((f"mini-{i + 1:04d}", toks))
    return out


def dictionary(slot, tag, pos, extra_tags=()):
    entries = []
    for g in GROUPS.values():
        for i, lemma in enumerate(g[slot]):
            tags = [tag] if not extra_tags or i % 2 == 0 else [extra_tags[0]]
            entries.append([lemma, {"POS": pos, "SEM": tags, "num": "s", "lemma": lemma}])
    for lemma, t in DISTRACTORS[slot]:
        entries.append([lemma, {"POS": pos, "SEM": [t], "lemma": lemma}])
    return entries


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="tests/data/mini")
    ap.add_argument("--sentences", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20240517)
    ap.add_argument("--noise", type=float, default=0.12)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sents = corpus(rng, args.sentences, args.noise)
    counts = Counter()
    with open(out / "corpus.conllu", "w") as f:
        for sid, toks in sents:
            f.write(f"# sent_id = {sid}\n")
            f.write("# text = " + " ".join(t[1] for t in toks) + "\n")
            for t in toks:
                f.write("\t".join(t) + "\n")
                counts[t[2]] += 1
            f.write("\n")

    with open(out / "freq.tsv", "w") as f:
        for w, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            f.write(f"{w}\t{c}\n")

    (out / "body.json").write_text(json.dumps(dictionary("body", "Body", "S"), indent=1) + "\n")
    # Locations split across two tags joined by a merge rule.
    (out / "places.json").write_text(
        json.dumps(dictionary("place", "Loc", "S", extra_tags=("Locnat",)), indent=1) + "\n")
    (out / "verbs.json").write_text(json.dumps(dictionary("motion", "Motion", "V"), indent=1) + "\n")

    recipe = {
        "row_cutoff": len(counts),
        "min_dims": 15,
        "matrices": [
            {"name": "GENERIC", "kind": "generic"},
            {"name": "BODY", "kind": "noun", "dictionary": "body.json", "tags": ["Body"]},
            {"name": "LOCATION", "kind": "noun", "dictionary": "places.json",
             "tags": ["Loc"], "merges": [["Loc", "Locnat"]]},
            {"name": "MOTION", "kind": "verb", "dictionary": "verbs.json", "tags": ["Motion"]},
        ],
    }
    (out / "recipe.json").write_text(json.dumps(recipe, indent=2) + "\n")

    prototypes = [p for g in GROUPS.values() for p in g["prototypes"]]
    targets = [t for g in GROUPS.values() for t in g["targets"]]
    lines = ["# Feature inventory for the mini fixture.",
             "prototypes\t" + ",".join(prototypes),
             "generic\tGENERIC"]
    for (family, matrix), k in zip(FAMILIES, range(3)):
        for g in GROUPS.values():
            lines.append("\t".join(["feature", g["features"][k], family, matrix,
                                    ",".join(g["prototypes"])]))
    (out / "features.cfg").write_text("\n".join(lines) + "\n")

    (out / "targets.txt").write_text("\n".join(targets) + "\n")
    (out / "animals.txt").write_text("\n".join(prototypes + targets) + "\n")
    with open(out / "gold.tsv", "w") as f:
        for g in GROUPS.values():
            for t in g["targets"]:
                for feat in g["features"]:
                    f.write(f"{t}\t{feat}\n")
    with open(out / "labels.tsv", "w") as f:
        for name, g in GROUPS.items():
            for a in g["prototypes"] + g["targets"]:
                f.write(f"{a}\t{name}\n")


if __name__ == "__main__":
    main()
