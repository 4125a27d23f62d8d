#!/usr/bin/env python3
"""Generate a small PTB-style treebank from a seeded probabilistic grammar.

The trees carry function tags, coindexed empty elements, unary chains and
punctuation so that they exercise the same preprocessing paths as real
Penn Treebank files.

    python3 tools/make_treebank.py --out data --seed 2024
"""

import argparse
import pathlib
import random
import re

LEXICON = {
    "DT": ["the", "a", "this", "that", "every", "some", "no", "another"],
    "NN": ["dog", "market", "company", "report", "price", "child", "city", "plan",
           "game", "teacher", "river", "board", "deal", "letter", "week", "team",
           "car", "house", "bank", "question", "résumé", "music", "book", "door"],
    "NNS": ["dogs", "markets", "prices", "children", "shares", "plans", "games",
            "teachers", "investors", "years", "books", "cars", "workers", "rules"],
    "NNP": ["Smith", "Boston", "Monday", "Acme", "Paris", "Jones", "Ford", "Tokyo",
            "Mary", "Congress"],
    "PRP": ["she", "he", "they", "we", "it", "I", "you"],
    "JJ": ["big", "new", "old", "small", "strong", "quiet", "early", "public",
           "major", "red", "local", "final"],
    "RB": ["quickly", "also", "never", "still", "often", "already", "slowly"],
    "VBD": ["saw", "said", "bought", "sold", "found", "made", "liked", "took",
            "left", "opened", "wanted", "expected", "tried", "reported"],
    "VBZ": ["enjoys", "says", "sees", "likes", "needs", "owns", "wants", "expects"],
    "VBG": ["playing", "reading", "building", "selling", "watching", "writing"],
    "VB": ["buy", "see", "sell", "make", "open", "win", "read", "build"],
    "MD": ["will", "can", "may", "should", "would"],
    "IN": ["in", "on", "with", "for", "from", "near", "after", "under"],
    "CD": ["two", "three", "ten", "100", "1990", "five"],
    "CC": ["and", "but", "or"],
    "TO": ["to"],
}

CONTROL_VERBS = ["wanted", "expected", "tried"]
THAT = "that"
RUNNING_EXAMPLE = ("( (S (NP-SBJ (PRP She)) (VP (VBZ enjoys) (S (NP-SBJ (-NONE- *)) "
                   "(VP (VBG playing) (NP (NN tennis))))) (. .)) )")


class Grammar:
    def __init__(self, rng):
        self.rng = rng
        self.index = 0

    def pick(self, options):
        items, weights = zip(*options)
        return self.rng.choices(items, weights=weights)[0]

    def word(self, tag):
        words = LEXICON[tag]
        # mild Zipf skew so that some words stay rare
        weights = [1.0 / (rank + 1) ** 0.8 for rank in range(len(words))]
        return f"({tag} {self.rng.choices(words, weights=weights)[0]})"

    def coindex(self):
        self.index += 1
        return self.index

    # --- phrases -------------------------------------------------------

    def np(self, depth, tag=""):
        label = "NP" + tag
        form = self.pick([
            ("dt_nn", 5), ("dt_jj_nn", 3), ("prp", 3), ("nnp", 2), ("nnp2", 1),
            ("nns", 2), ("cd_nns", 1), ("np_pp", 2 if depth < 3 else 0),
        ])
        if form == "dt_nn":
            body = [self.word("DT"), self.word("NN")]
        elif form == "dt_jj_nn":
            body = [self.word("DT"), self.word("JJ"), self.word("NN")]
        elif form == "prp":
            body = [self.word("PRP")]
        elif form == "nnp":
            body = [self.word("NNP")]
        elif form == "nnp2":
            body = [self.word("NNP"), self.word("NNP")]
        elif form == "nns":
            body = [self.word("JJ"), self.word("NNS")] if self.rng.random() < 0.4 else [self.word("NNS")]
        elif form == "cd_nns":
            body = [self.word("CD"), self.word("NNS")]
        else:
            body = [self.np(depth + 1), self.pp(depth + 1, self.pick([("", 3), ("-LOC", 1)]))]
        return f"({label} {' '.join(body)})"

    def pp(self, depth, tag=""):
        return f"(PP{tag} {self.word('IN')} {self.np(depth + 1)})"

    def vp(self, depth):
        form = self.pick([
            ("vbd_np", 5), ("vbd", 1), ("vbz_np_pp", 2), ("vbd_sbar", 1 if depth < 2 else 0),
            ("md_vp", 2), ("vbz_gerund", 2 if depth < 3 else 0),
            ("control", 2 if depth < 2 else 0), ("rb_vp", 1 if depth < 3 else 0),
        ])
        if form == "vbd_np":
            return f"(VP {self.word('VBD')} {self.np(depth + 1)})"
        if form == "vbd":
            return f"(VP {self.word('VBD')})"
        if form == "vbz_np_pp":
            tag = self.pick([("", 2), ("-LOC", 1), ("-TMP", 1)])
            return f"(VP {self.word('VBZ')} {self.np(depth + 1)} {self.pp(depth + 1, tag)})"
        if form == "vbd_sbar":
            return f"(VP (VBD said) (SBAR (IN {THAT}) {self.clause(depth + 1)}))"
        if form == "md_vp":
            return f"(VP {self.word('MD')} (VP {self.word('VB')} {self.np(depth + 1)}))"
        if form == "vbz_gerund":
            # S over a bare VP: the empty subject is pruned, leaving a unary chain
            return (f"(VP {self.word('VBZ')} (S (NP-SBJ (-NONE- *)) "
                    f"(VP {self.word('VBG')} {self.np(depth + 1)})))")
        if form == "control":
            verb = self.rng.choice(CONTROL_VERBS)
            i = self.coindex()
            return (f"(VP (VBD {verb}) (S (NP-SBJ (-NONE- *-{i})) "
                    f"(VP (TO to) (VP {self.word('VB')} {self.np(depth + 1)}))))")
        return f"(VP (ADVP {self.word('RB')}) {self.vp(depth + 1)})"

    def clause(self, depth):
        subject = self.np(depth + 1, "-SBJ")
        if self.rng.random() < 0.15 and depth < 2:
            front = self.pp(depth + 1, "-TMP") if self.rng.random() < 0.5 else f"(NP-TMP {self.word('NNP')})"
            return f"(S {front} (, ,) {subject} {self.vp(depth + 1)})"
        return f"(S {subject} {self.vp(depth + 1)})"

    def sentence(self):
        self.index = 0
        if self.rng.random() < 0.1:
            left, right = self.clause(1), self.clause(1)
            body = f"(S {left} (, ,) {self.word('CC')} {right} (. .))"
        elif self.rng.random() < 0.05:
            body = f"(FRAG {self.np(1)} (. .))"
        else:
            clause = self.clause(0)
            body = clause[:-1] + (" (. .))" if self.rng.random() < 0.9 else ")")
        return f"( {body} )"


LEAF = re.compile(r"\((?!-NONE-)[^\s()]+ [^\s()]+\)")


def leaf_count(tree):
    return len(LEAF.findall(tree))


def generate(rng, count, max_len=30):
    grammar = Grammar(rng)
    out = []
    while len(out) < count:
        tree = grammar.sentence()
        if 2 <= leaf_count(tree) <= max_len:
            out.append(tree)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=pathlib.Path, default=pathlib.Path("data"))
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    splits = {"train.mrg": 500, "dev.mrg": 100, "test.mrg": 100}
    trees = {name: generate(rng, n) for name, n in splits.items()}
    trees["overfit50.mrg"] = [RUNNING_EXAMPLE] + trees["train.mrg"][:49]
    for name, items in trees.items():
        (args.out / name).write_text("\n".join(items) + "\n", encoding="utf-8")
        print(f"{name}: {len(items)} trees")


if __name__ == "__main__":
    main()
