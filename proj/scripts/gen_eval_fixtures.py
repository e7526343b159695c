#!/usr/bin/env python3
# Copyright 2026 The isnad Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes calibrated evaluation-record fixtures to tests/fixtures/.

Each fixture is a synthetic set of expert records whose aggregate report
prints a given set of two-decimal figures. The records are built backwards
from the targets: integer scores with exact per-aspect sums, error units
with exact pooled totals, cascade links whose suppressed errors must not
leak into the rates. A reference implementation of the report arithmetic
below re-derives every printed figure before anything is written.

  rezwan_sample.jsonl      headline figures, aspect means, macro error rates
  rezwan_comparison.jsonl  the primary column of the side-by-side tables
  noor_comparison.jsonl    the comparison column
"""

import argparse
import json
import random
from pathlib import Path

ASPECTS = ["chain_text_separation", "summarization", "grouping", "analytical_commentary", "thematic_tagging",
           "key_points", "thematic_similarity", "lexical_similarity", "semantic_similarity"]
DIMS = ["typos", "translation", "missing_words", "tagging", "key_phrases", "diacritization_char"]
CORE = {"translation", "diacritization_char", "missing_words"}
UNIT_RANGE = {"typos": (40, 160), "translation": (3, 9), "missing_words": (40, 160), "tagging": (2, 6),
              "key_phrases": (3, 8), "diacritization_char": (150, 600)}

SAMPLE = {
    "name": "rezwan_sample", "seed": 11, "size": 1213, "non_hadith": 185, "critical": 71, "duplicates": 30,
    "aspects": {"chain_text_separation": 9.30, "summarization": 9.33, "grouping": 9.19,
                "analytical_commentary": 8.77, "thematic_tagging": 8.84, "key_points": 8.47,
                "thematic_similarity": 8.77, "lexical_similarity": 7.30, "semantic_similarity": 7.28},
    "optional": ["thematic_similarity", "lexical_similarity", "semantic_similarity"],
    "overall": 8.46,
    "errors": {"typos": 0.43, "translation": 3.51, "missing_words": 1.39, "tagging": 4.51, "key_phrases": 1.00,
               "diacritization_char": 2.49},
    "cascades": 60,
}
COMPARISON = dict(SAMPLE, name="rezwan_comparison", seed=12,
                  aspects={"chain_text_separation": 9.30, "summarization": 9.33, "grouping": 9.19,
                           "analytical_commentary": 8.77, "thematic_tagging": 8.84, "key_points": 8.84,
                           "thematic_similarity": 8.47, "lexical_similarity": 7.28, "semantic_similarity": 7.30},
                  errors={"typos": 0.85, "translation": 4.80, "missing_words": 2.02, "tagging": 4.51,
                          "key_phrases": 1.00, "diacritization_char": 2.48})
NOOR = {
    "name": "noor_comparison", "seed": 13, "size": 67, "non_hadith": 0, "critical": 0, "duplicates": 0,
    "aspects": {"chain_text_separation": 9.63, "grouping": 9.23, "lexical_similarity": 7.61,
                "semantic_similarity": 6.71},
    "optional": ["grouping", "lexical_similarity", "semantic_similarity"],
    "overall": 3.66,
    "errors": {"typos": 2.66, "translation": 10.43, "missing_words": 0.16, "diacritization_char": 0.03},
    "cascades": 0,
}


def fmt2(x):
    return "%.2f" % x


def safe(x, target):
    """Prints as target and is not within rounding noise of a tie."""
    return fmt2(x) == fmt2(target) and abs((x * 100) % 1 - 0.5) > 1e-7


# -- reference report arithmetic ----------------------------------------------

def suppress(r):
    out = json.loads(json.dumps(r))
    for dim in r.get("root_cause_links", {}):
        if dim in out["error_counts"]:
            out["error_counts"][dim]["error_units"] = 0
    return out


def consolidate(records):
    order, groups = [], {}
    for r in records:
        if r["narration_id"] not in groups:
            order.append(r["narration_id"])
            groups[r["narration_id"]] = []
        groups[r["narration_id"]].append(suppress(r))
    out = []
    for nid in order:
        g = groups[nid]
        sums = {}
        errs = {}
        for r in g:
            for a, s in r["aspect_scores"].items():
                if s is None:
                    continue
                sums.setdefault(a, []).append(s)
            for d, c in r["error_counts"].items():
                e = errs.setdefault(d, [0, 0])
                e[0] += c["error_units"]
                e[1] += c["total_units"]
        votes = sum(1 for r in g if r["is_non_hadith"])
        out.append({"scores": {a: sum(v) / len(v) for a, v in sums.items()},
                    "errors": errs, "non_hadith": 2 * votes >= len(g)})
    return out


def report(records):
    recs = consolidate(records)
    non_hadith = [r for r in recs if r["non_hadith"]]
    rest = [r for r in recs if not r["non_hadith"]]
    critical = [r for r in rest if any(d in CORE and e * 100.0 / t > 60.0 for d, (e, t) in r["errors"].items())]
    kept = [r for r in rest if r not in critical]
    n = len(recs)
    out = {"sample": n, "non_hadith": 100.0 * len(non_hadith) / n, "critical": 100.0 * len(critical) / n}
    out["overall"] = sum(sum(r["scores"].values()) / 9.0 for r in kept) / len(kept)
    for a in ASPECTS:
        vals = [r["scores"][a] for r in kept if a in r["scores"]]
        if vals:
            out[a] = sum(vals) / len(vals)
    for d in DIMS:
        e = sum(r["errors"][d][0] for r in kept if d in r["errors"])
        t = sum(r["errors"][d][1] for r in kept if d in r["errors"])
        if t:
            out["macro:" + d] = 100.0 * e / t
    return out


# -- construction -------------------------------------------------------------

def scores_with_sum(rng, n, total):
    """n integer scores in [0,10] summing to total, spread around the mean."""
    mean = total / n
    s = [min(10, max(0, round(rng.gauss(mean, 0.9)))) for _ in range(n)]
    diff = total - sum(s)
    while diff:
        i = rng.randrange(n)
        step = 1 if diff > 0 else -1
        if 0 <= s[i] + step <= 10:
            s[i] += step
            diff -= step
    return s


def plan_aspects(spec, kept, rng):
    """Per-aspect (count scored, integer sum) hitting every mean and the overall."""
    choices = {}
    for a, m in spec["aspects"].items():
        lo = kept - 60 if a in spec["optional"] else kept
        opts = []
        for n in range(lo, kept + 1):
            t = round(m * n)
            for tt in (t - 1, t, t + 1):
                if 0 <= tt <= 10 * n and safe(tt / n, m):
                    opts.append((n, tt))
        choices[a] = opts
    target = spec["overall"]
    fixed = sum(max(o, key=lambda x: x[0])[1] for a, o in choices.items() if a not in spec["optional"])
    for _ in range(200000):
        pick = {a: (max(o, key=lambda x: x[0]) if a not in spec["optional"] else rng.choice(o))
                for a, o in choices.items()}
        total = fixed + sum(pick[a][1] for a in spec["optional"])
        if safe(total / (9.0 * kept), target):
            return pick
    raise SystemExit(f"{spec['name']}: no aspect plan found")


def totals_for(rng, dim, kept):
    lo, hi = UNIT_RANGE[dim]
    return [rng.randint(lo, hi) for _ in range(kept)]


def plan_errors(spec, kept, rng, linked):
    """Post-suppression error units per kept record, per dimension."""
    plan = {}
    for d, target in spec["errors"].items():
        totals = totals_for(rng, d, kept)
        while True:
            t = sum(totals)
            e = round(target * t / 100.0)
            if safe(100.0 * e / t, target):
                break
            totals[rng.randrange(kept)] += 1
        errs = [0] * kept
        cap = [int(0.6 * x) if d in CORE else x for x in totals]
        blocked = {i for i, dims in linked.items() if d in dims}
        need_root = [i for i, dims in linked.items() if d == "translation"]
        for i in need_root:
            errs[i] = 1
        left = e - sum(errs)
        assert left >= 0, (spec["name"], d)
        pool = [i for i in range(kept) if i not in blocked]
        while left:
            i = rng.choice(pool)
            if errs[i] < cap[i] and errs[i] < max(1, totals[i] // 5):
                errs[i] += 1
                left -= 1
        plan[d] = (totals, errs)
    return plan


def build(spec):
    rng = random.Random(spec["seed"])
    n, nh, cr = spec["size"], spec["non_hadith"], spec["critical"]
    kept = n - nh - cr
    aspects = plan_aspects(spec, kept, rng)

    # Cascades: key_phrases -> translation, and tagging -> key_phrases -> translation.
    linked = {}
    cascade_ids = rng.sample(range(kept), spec["cascades"])
    for k, i in enumerate(cascade_ids):
        linked[i] = {"key_phrases": "translation"} if k % 3 else {"tagging": "key_phrases",
                                                                  "key_phrases": "translation"}
    errors = plan_errors(spec, kept, rng, linked)

    score_cols = {}
    for a, (cnt, total) in aspects.items():
        vals = scores_with_sum(rng, cnt, total)
        who = sorted(rng.sample(range(kept), cnt))
        col = [None] * kept
        for i, v in zip(who, vals):
            col[i] = v
        score_cols[a] = col

    records = []
    evaluators = [f"expert-{k}" for k in range(1, 7)]
    for i in range(kept):
        r = {"narration_id": "", "evaluator_id": rng.choice(evaluators),
             "aspect_scores": {a: score_cols[a][i] for a in spec["aspects"] if score_cols[a][i] is not None},
             "error_counts": {}, "is_non_hadith": False, "root_cause_links": {}, "free_notes": ""}
        for d, (totals, errs) in errors.items():
            r["error_counts"][d] = {"error_units": errs[i], "total_units": totals[i]}
        if i in linked:
            r["root_cause_links"] = dict(linked[i])
            for d in linked[i]:
                c = r["error_counts"][d]
                c["error_units"] = rng.randint(1, max(1, c["total_units"] // 3))
            r["free_notes"] = "errors follow from the translation"
        records.append(r)

    for _ in range(cr):
        r = {"narration_id": "", "evaluator_id": rng.choice(evaluators),
             "aspect_scores": {a: rng.randint(0, 5) for a in spec["aspects"]},
             "error_counts": {}, "is_non_hadith": False, "root_cause_links": {}, "free_notes": "critical"}
        for d in spec["errors"]:
            lo, hi = UNIT_RANGE[d]
            t = rng.randint(lo, hi)
            r["error_counts"][d] = {"error_units": rng.randint(0, t // 10), "total_units": t}
        core = rng.choice(sorted(CORE & set(spec["errors"])))
        t = r["error_counts"][core]["total_units"]
        r["error_counts"][core]["error_units"] = t * 6 // 10 + 1
        records.append(r)

    for _ in range(nh):
        r = {"narration_id": "", "evaluator_id": rng.choice(evaluators),
             "aspect_scores": {a: rng.randint(0, 10) for a in spec["aspects"]},
             "error_counts": {}, "is_non_hadith": True, "root_cause_links": {},
             "free_notes": "commentary, not a narration"}
        records.append(r)

    rng.shuffle(records)
    for k, r in enumerate(records):
        r["narration_id"] = f"{spec['name'][:5]}-{k + 1:05d}"

    # A few narrations scored by two experts: same scores, units split.
    extra = []
    for r in rng.sample(records, spec["duplicates"]):
        if not r["error_counts"] or r["root_cause_links"]:
            continue
        second = json.loads(json.dumps(r))
        second["evaluator_id"] = next(e for e in evaluators if e != r["evaluator_id"])
        for d, c in list(r["error_counts"].items()):
            if c["total_units"] < 2:
                del second["error_counts"][d]
                continue
            t2 = c["total_units"] // 2
            e2 = min(c["error_units"] // 2, t2)
            second["error_counts"][d] = {"error_units": e2, "total_units": t2}
            c["error_units"] -= e2
            c["total_units"] -= t2
            if c["error_units"] > c["total_units"]:
                raise SystemExit("split broke an invariant")
        extra.append(second)
    records += extra
    return records


def check(spec, records):
    rep = report(records)
    printed = {"non_hadith": fmt2(rep["non_hadith"]), "critical": fmt2(rep["critical"]),
               "overall": fmt2(rep["overall"])}
    want = {"non_hadith": fmt2(100.0 * spec["non_hadith"] / spec["size"]),
            "critical": fmt2(100.0 * spec["critical"] / spec["size"]), "overall": fmt2(spec["overall"])}
    for a, m in spec["aspects"].items():
        printed[a] = fmt2(rep[a])
        want[a] = fmt2(m)
    for d, m in spec["errors"].items():
        printed["macro:" + d] = fmt2(rep["macro:" + d])
        want["macro:" + d] = fmt2(m)
    assert rep["sample"] == spec["size"], rep["sample"]
    bad = {k: (printed[k], want[k]) for k in want if printed[k] != want[k]}
    if bad:
        raise SystemExit(f"{spec['name']}: {bad}")
    return printed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for spec in (SAMPLE, COMPARISON, NOOR):
        records = build(spec)
        printed = check(spec, records)
        with open(out / f"{spec['name']}.jsonl", "w", encoding="utf-8") as f:
            for r in records:
                f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")
        print(spec["name"], len(records), json.dumps(printed))


if __name__ == "__main__":
    main()
