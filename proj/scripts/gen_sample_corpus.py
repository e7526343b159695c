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

"""Writes the bundled synthetic corpus to data/sample_corpus/.

Books are built as normalized sentences first and decorated afterwards
(diacritics, tatweel, alef and ya spellings, page numbers, footnotes), so
the gold spans are known in normalized stream coordinates without running
any of the C++ code. A small independent normalizer checks that the
decoration round-trips.

Output:
  manifest.json, reclassification.tsv, books/..., gold.jsonl, expected.json
"""

import argparse
import json
import random
import re
import unicodedata
from pathlib import Path

SEED = 20260301

OPENERS = ["حدثنا", "حدثني", "اخبرنا", "اخبرني", "وحدثنا", "واخبرنا"]
NARRATORS = [
    "محمد بن يعقوب", "علي بن ابراهيم", "ابيه", "محمد بن يحيي", "احمد بن محمد",
    "الحسين بن سعيد", "ابن ابي عمير", "حماد بن عيسي", "زرارة", "محمد بن مسلم",
    "ابي بصير", "هشام بن سالم", "يونس بن عبد الرحمن", "الحلبي", "سماعة بن مهران",
    "معاوية بن عمار", "عبد الله بن سنان", "جميل بن دراج", "صفوان بن يحيي", "ابان بن عثمان",
]
SOURCES = ["ابي عبد الله عليه السلام", "ابي جعفر عليه السلام", "ابي الحسن عليه السلام"]
SUBJECTS = ["المؤمن", "العالم", "الصائم", "المصلي", "الرجل", "المسلم", "الجار", "التاجر", "الولد", "الضيف"]
VERBS = ["يحب", "يكرم", "يحفظ", "يطلب", "يعين", "يذكر", "يصل", "يترك", "يؤدي", "يرحم"]
OBJECTS = ["اخاه في السر والعلانية", "العلم ولو كان بعيدا", "الصلاة في اول وقتها", "الصدقة في الليل",
           "الرحم وان قطعته", "الامانة الي اهلها", "لسانه عن الغيبة", "جاره كما يحفظ نفسه",
           "الحق وان كان مرا", "اليتيم والمسكين", "الدعاء عند الشدة", "الطهارة قبل الصلاة"]
TAILS = ["في كل حال", "ابتغاء وجه الله", "ولا يرجو جزاء", "حتي يلقي ربه", "في الدنيا والاخرة",
         "من غير ان يسال", "وهو راض بذلك", "كلما وجد اليه سبيلا"]
REWARDS = ["فله اجر عظيم", "وكان له نورا يوم القيامة", "ودخل الجنة بغير حساب", "وغفر الله له ما تقدم من ذنبه",
           "ورفع الله درجته", "وكتب الله له حسنة"]
HEADING_TOPICS = ["النية", "فضل العلم", "الصلاة", "الصوم", "الزكاة", "صلة الرحم", "حق الجار",
                  "التجارة", "الطهارة", "الدعاء", "بر الوالدين", "الصدقة"]
HEADING_WORDS = ["باب", "باب", "باب", "كتاب", "فصل"]
ORPHANS = ["وفيه احاديث كثيرة نذكر منها ما يلي.", "وهذا مما اتفقت عليه الروايات.",
           "ونذكر في هذا الموضع ما ورد في معناه."]

# Normalized word -> raw spelling, each a fixed point of the rules below.
RAW_SPELLING = {
    "اخبرنا": "أخبرنا", "اخبرني": "أخبرني", "واخبرنا": "وأخبرنا", "ابيه": "أبيه", "ابي": "أبي",
    "ابن": "ابن", "ابان": "أبان", "احمد": "أحمد", "ابراهيم": "إبراهيم", "يحيي": "يحيى", "عيسي": "عيسى",
    "الي": "إلى", "حتي": "حتى", "يلقي": "يلقى", "اول": "أول", "اهلها": "أهلها", "ان": "أن",
    "اخاه": "أخاه", "اليه": "إليه", "الاخرة": "الآخرة", "اجر": "أجر", "يسال": "يسأل",
    "يؤدي": "يؤدّي", "الامانة": "الأمانة", "احاديث": "أحاديث", "ابواب": "أبواب",
}

HARAKAT = ["َ", "ُ", "ِ", "ْ", "ّ"]
TATWEEL = "ـ"


# -- independent normalizer (mirrors the documented profile) ---------------

def is_diacritic(c):
    o = ord(c)
    return (0x0610 <= o <= 0x061A or 0x064B <= o <= 0x065F or o == 0x0670 or 0x06D6 <= o <= 0x06DC
            or 0x06DF <= o <= 0x06E4 or 0x06E7 <= o <= 0x06E8 or 0x06EA <= o <= 0x06ED
            or 0x08D3 <= o <= 0x08E1 or 0x08E3 <= o <= 0x08FF)


def normalize_page(raw):
    s = unicodedata.normalize("NFC", raw)
    lines = []
    for line in s.split("\n"):
        if re.fullmatch(r"\s*_{5,}\s*", line):
            break
        core = re.sub(r"[\s\-–—()\[\]]", "", line)
        if core.startswith("ص"):
            core = core[1:]
        if core and all(c.isdigit() for c in core):
            continue
        lines.append(re.sub(r"\([0-9٠-٩۰-۹]{1,3}\)", "", line))
    s = "\n".join(lines)
    out = []
    for c in s:
        if is_diacritic(c) or c == TATWEEL:
            continue
        if c in "آأإٱٲٳ":
            c = "ا"
        if c == "ى":
            c = "ي"
        out.append(c)
    return " ".join("".join(out).split())


# -- construction ------------------------------------------------------------

class Builder:
    def __init__(self, rng):
        self.rng = rng
        self.matn_pool = []

    def chain(self):
        r = self.rng
        names = r.sample(NARRATORS, r.randint(2, 4))
        source = r.choice(SOURCES)
        opener = r.choice(OPENERS)
        if r.random() < 0.2:
            return f"{opener} {' عن '.join(names)} قال سمعت {source} يقول"
        return f"{opener} {' عن '.join(names)} عن {source} قال"

    def sentence(self):
        r = self.rng
        parts = [r.choice(SUBJECTS), r.choice(VERBS), r.choice(OBJECTS)]
        if r.random() < 0.6:
            parts.append(r.choice(TAILS))
        if r.random() < 0.5:
            parts.append(r.choice(REWARDS))
        return " ".join(parts) + "."

    def matn(self):
        """1-3 sentences; about a fifth repeat an earlier matn verbatim."""
        r = self.rng
        if self.matn_pool and r.random() < 0.2:
            return r.choice(self.matn_pool)
        m = [self.sentence() for _ in range(r.choice([1, 1, 2, 2, 3]))]
        self.matn_pool.append(m)
        return m

    def heading(self):
        return f"{self.rng.choice(HEADING_WORDS)} {self.rng.choice(HEADING_TOPICS)}."


def build_items(b, narrations, rng):
    """Sequence of items: ("heading", [s]), ("orphan", [s...]), ("narration", chain, [s...])."""
    items = []
    for i in range(narrations):
        if i == 0 or rng.random() < 0.18:
            items.append(("heading", [b.heading()]))
            if rng.random() < 0.3:
                items.append(("orphan", [rng.choice(ORPHANS)]))
        ch = b.chain()
        m = b.matn()
        # The chain shares the first sentence with the first matn sentence.
        first = f"{ch}: {m[0]}"
        items.append(("narration", ch, [first] + m[1:]))
    return items


def paginate(items, rng, target_chars):
    """Returns pages as lists of words. Breaks fall at word boundaries; a
    narration never exceeds three semantic units (sentence pieces)."""
    sentences = []  # (item index, words)
    for idx, it in enumerate(items):
        sents = it[2] if it[0] == "narration" else it[1]
        for s in sents:
            sentences.append((idx, s.split(" ")))

    pages, cur, cur_len = [], [], 0
    units = {}  # item index -> semantic units the item will occupy
    for idx, it in enumerate(items):
        units[idx] = len(it[2] if it[0] == "narration" else it[1])
    for idx, words in sentences:
        is_narr = items[idx][0] == "narration"
        for w_i, w in enumerate(words):
            cur.append(w)
            cur_len += len(w) + 1
            at_sentence_end = w_i == len(words) - 1
            if cur_len >= target_chars and rng.random() < 0.35:
                if at_sentence_end:
                    pages.append(cur)
                    cur, cur_len = [], 0
                elif not is_narr or units[idx] < 3:
                    if is_narr:
                        units[idx] += 1
                    pages.append(cur)
                    cur, cur_len = [], 0
    if cur:
        pages.append(cur)
    return pages


def decorate_word(w, rng):
    lead = re.match(r"^([^؀-ۿ]*)(.*?)([^؀-ۿ]*)$", w)
    pre, core, post = lead.group(1), lead.group(2), lead.group(3)
    core = RAW_SPELLING.get(core, core)
    if rng.random() < 0.25:
        core = "".join(c + (rng.choice(HARAKAT) if "ء" <= c <= "ي" else "") for c in core)
    elif len(core) >= 4 and rng.random() < 0.08:
        k = len(core) // 2
        core = core[:k] + TATWEEL + core[k:]
    return pre + core + post


def raw_page(words, page_no, rng):
    out = []
    for i, w in enumerate(words):
        out.append(decorate_word(w, rng))
        if w.endswith(".") and rng.random() < 0.5:
            out.append("\n")
        elif rng.random() < 0.03 and i + 1 < len(words):
            out[-1] += f"({rng.randint(1, 9)})"
    text = ""
    for tok in out:
        if tok == "\n":
            text = text.rstrip(" ") + "\n"
        else:
            text += tok + " "
    text = text.rstrip() + "\n"
    if rng.random() < 0.7:
        text += f"\n{page_no}\n" if rng.random() < 0.5 else f"\n- ص {page_no} -\n"
    if rng.random() < 0.3:
        text += "_____\n(1) انظر الكافي الجزء الاول ص 12.\n"
    return text


def gold_for(book_id, items, pages):
    """Walks the normalized stream and records every narration span."""
    stream_pages = [" ".join(p) for p in pages]
    page_begin, pos = [], 0
    for i, p in enumerate(stream_pages):
        page_begin.append(pos)
        pos += len(p) + (1 if i + 1 < len(stream_pages) else 0)
    stream = " ".join(stream_pages)

    def page_at(off):
        k = 0
        for i, b in enumerate(page_begin):
            if b <= off:
                k = i
        return k + 1

    gold, spans, cursor = [], [], 0
    for it in items:
        sents = it[2] if it[0] == "narration" else it[1]
        body = " ".join(sents)
        start = stream.index(body, cursor)
        end = start + len(body)
        cursor = end
        spans.append((start, end, it[0]))
        if it[0] == "narration":
            chain = it[1]
            text = body[len(chain) + 2:]
            gold.append({"book_id": book_id, "page_start": page_at(start), "page_end": page_at(end - 1),
                         "char_start": start, "char_end": end, "chain": chain, "text": text})
    return gold, spans, stream_pages


def non_hadith_spans(spans):
    """The segmenter reports each heading alone and merges runs of orphans."""
    out = []
    for s, e, kind in spans:
        if kind == "orphan" and out and out[-1][2] == "orphan" and out[-1][1] < s:
            out[-1] = (out[-1][0], e, "orphan")
        elif kind != "narration":
            out.append((s, e, kind))
    return out


def bigrams(t):
    w = t.split()
    if len(w) < 2:
        return set(w)
    return {w[i] + " " + w[i + 1] for i in range(len(w) - 1)}


def brute_groups(texts, threshold=0.9):
    n = len(texts)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    grams = []
    for t in texts:
        w = t.split()
        grams.append(set(w) if len(w) < 2 else {w[i] + " " + w[i + 1] for i in range(len(w) - 1)})
    for i in range(n):
        for j in range(i + 1, n):
            a, b = grams[i], grams[j]
            wa, wb = texts[i].split(), texts[j].split()
            if len(wa) < 2 or len(wb) < 2:
                a, b = set(wa), set(wb)
            union = a | b
            sim = 1.0 if not union else len(a & b) / len(union)
            if sim >= threshold:
                parent[find(i)] = find(j)
    return len({find(i) for i in range(n)})


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "sample_corpus"))
    args = ap.parse_args()
    out = Path(args.out)
    rng = random.Random(SEED)
    b = Builder(rng)

    books = [
        {"book_id": "usul", "title": "كتاب الاصول", "category": "hadith", "n": 40, "layout": "file"},
        {"book_id": "furu", "title": "كتاب الفروع", "category": "hadith", "n": 36, "layout": "file"},
        {"book_id": "amali", "title": "كتاب الامالي", "category": "hadith", "n": 32, "layout": "dir"},
        {"book_id": "tafsir_qummi", "title": "تفسير", "category": "tafsir", "n": 16, "layout": "file"},
        {"book_id": "fiqh_mukhtasar", "title": "مختصر الفقه", "category": "fiqh", "n": 10, "layout": "file"},
    ]
    reclass = {"tafsir_qummi": "hadith"}

    (out / "books").mkdir(parents=True, exist_ok=True)
    manifest_books, gold_all = [], []
    expected = {"books": len(books), "hadith_books": 0, "filtered_books": 0, "reclassified": len(reclass),
                "gold_narrations": 0, "non_hadith_spans": 0, "page_straddling": 0}
    all_spans_text = []
    for spec in books:
        items = build_items(b, spec["n"], rng)
        pages = paginate(items, rng, rng.randint(550, 800))
        raws = [raw_page(p, i + 1, rng) for i, p in enumerate(pages)]
        for i, (p, r) in enumerate(zip(pages, raws)):
            assert normalize_page(r) == " ".join(p), (spec["book_id"], i + 1)
        if spec["layout"] == "dir":
            d = out / "books" / spec["book_id"]
            d.mkdir(exist_ok=True)
            for f in d.glob("*.txt"):
                f.unlink()
            for i, r in enumerate(raws):
                (d / f"page_{i + 1:03d}.txt").write_text(r, encoding="utf-8")
            path = f"books/{spec['book_id']}"
        else:
            content = "".join(f"[[page {i + 1}]]\n{r}" for i, r in enumerate(raws))
            (out / "books" / f"{spec['book_id']}.txt").write_text(content, encoding="utf-8")
            path = f"books/{spec['book_id']}.txt"
        manifest_books.append({"path": path, "book_id": spec["book_id"], "title": spec["title"],
                               "category": spec["category"]})

        final_category = reclass.get(spec["book_id"], spec["category"])
        if final_category != "hadith":
            expected["filtered_books"] += 1
            continue
        expected["hadith_books"] += 1
        gold, spans, stream_pages = gold_for(spec["book_id"], items, pages)
        gold_all.extend(gold)
        nh = non_hadith_spans(spans)
        expected["non_hadith_spans"] += len(nh)
        expected["page_straddling"] += sum(1 for g in gold if g["page_start"] != g["page_end"])
        stream = " ".join(stream_pages)
        all_spans_text += [g["text"] for g in gold] + [stream[s:e] for s, e, _ in nh]

    expected["gold_narrations"] = len(gold_all)
    expected["segment_narrations"] = len(gold_all) + expected["non_hadith_spans"]
    expected["groups"] = brute_groups(all_spans_text)

    (out / "reclassification.tsv").write_text(
        "# book_id\tcategory\n" + "".join(f"{k}\t{v}\n" for k, v in reclass.items()), encoding="utf-8")
    manifest = {
        "name": "sample",
        "source": "synthetic narration corpus for tests",
        "pivot_language": "fa",
        "books": manifest_books,
        "reclassification_table": "reclassification.tsv",
    }
    (out / "manifest.json").write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    with open(out / "gold.jsonl", "w", encoding="utf-8") as f:
        for g in gold_all:
            f.write(json.dumps(g, ensure_ascii=False) + "\n")
    (out / "expected.json").write_text(json.dumps(expected, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(expected))


if __name__ == "__main__":
    main()
