#!/usr/bin/env python3
"""Reference extraction for the distant dump fixture.

Usage: distant_oracle.py dump.jsonl out_dir
Writes imho.jsonl, qr.jsonl and their .summary.json sidecars.
"""
import html
import json
import os
import re
import sys

TRIGGER = re.compile(r"(?<![A-Za-z0-9_\-])(imho|imo)(?![A-Za-z0-9_\-])", re.IGNORECASE)
SENT_BREAK = re.compile(r"([.!?][\"'”’)\]]*)\s+(?=[A-Z0-9\"'“‘])")


def sentences(text):
    out = []
    for block in re.split(r"\n[ \t]*\n", text):
        pieces = SENT_BREAK.sub(lambda m: m.group(1) + "\x00", block).split("\x00")
        out.extend(p.strip() for p in pieces if p.strip())
    return out


def strip_id(s):
    return re.sub(r"^t\d_", "", s or "")


def load(path):
    skips = {}
    comments = []
    lines = 0
    with open(path, "rb") as f:
        for raw in f:
            raw = raw.rstrip(b"\n")
            if not raw.strip():
                continue
            lines += 1
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                skips["invalid-utf8"] = skips.get("invalid-utf8", 0) + 1
                continue
            try:
                obj = json.loads(text)
                assert isinstance(obj, dict)
            except Exception:
                skips["malformed-line"] = skips.get("malformed-line", 0) + 1
                continue
            body = obj.get("body")
            if body is None:
                body = obj.get("selftext") or ""
            body = html.unescape(body)
            cid = strip_id(obj.get("id"))
            link = strip_id(obj.get("link_id")) or cid
            parent = strip_id(obj.get("parent_id"))
            if parent == cid:
                parent = ""
            deleted = body.strip() in ("[deleted]", "[removed]")
            if deleted:
                skips["deleted"] = skips.get("deleted", 0) + 1
            comments.append(dict(id=cid, parent=parent, link=link, body=body, deleted=deleted))
    return lines, comments, skips


def strip_trigger(s):
    while True:
        m = TRIGGER.search(s)
        if not m:
            break
        a, b = m.start(), m.end()
        if a > 0 and b < len(s) and s[a - 1] == "(" and s[b] == ")":
            a, b = a - 1, b + 1
        after = len(s[:b]) + (len(s[b:]) - len(s[b:].lstrip(" ")))
        before = len(s[:a].rstrip(" "))
        if after < len(s) and s[after] == ",":
            b = after + 1
        elif before > 0 and s[before - 1] == ",":
            a = before - 1
        elif before > 0 and s[before - 1] in ".!?" and after < len(s) and s[after] in ".!?":
            b = after + 1
        s = s[:a] + " " + s[b:]
    s = re.sub(r"\s+", " ", s)
    s = re.sub(r" (?=[.,!?;:)])", "", s)
    s = re.sub(r"\( ", "(", s)
    return s.strip()


def dump(obj):
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def summary(kind, lines, n, skips):
    return json.dumps({"kind": kind, "lines_read": lines, "records": n,
                       "skipped": dict(sorted(skips.items()))}, indent=2, ensure_ascii=False)


def imho(lines, comments, skips):
    skips = dict(skips)
    out = []
    for c in comments:
        if c["deleted"]:
            continue
        sents = sentences(c["body"])
        for i, s in enumerate(sents):
            if not TRIGGER.search(s):
                continue
            claim = strip_trigger(s)
            if not re.search(r"[A-Za-z0-9_]", claim):
                skips["empty-claim"] = skips.get("empty-claim", 0) + 1
                continue
            out.append(dump({"comment_id": c["id"], "claim_sentence": claim,
                             "premise_sentence": sents[i + 1] if i + 1 < len(sents) else None,
                             "acronym_stripped": True}))
    return out, summary("imho", lines, len(out), skips)


FOLD = {"‘": "'", "’": "'", "“": '"', "”": '"', "−": "-"}
FOLD.update({chr(c): "-" for c in range(0x2010, 0x2016)})


def normalize(text):
    """Normalized text plus, per output char, the source byte range."""
    chars, begins, ends = [], [], []
    pos = 0
    pend = None
    for ch in text:
        n = len(ch.encode("utf-8"))
        if ch in " \t\n\r\f\v ":
            pend = (pend[0] if pend else pos, pos + n)
        else:
            if pend and chars:
                chars.append(" "); begins.append(pend[0]); ends.append(pend[1])
            pend = None
            chars.append(FOLD.get(ch, ch)); begins.append(pos); ends.append(pos + n)
        pos += n
    return "".join(chars), begins, ends


def blockquotes(body):
    """(quote, nested, tail) per maximal run of `>` lines outside code fences."""
    quotes = []
    tail = []
    run = None
    fence = None
    for line in body.split("\n"):
        if fence:
            tail.append(line)
            if line.strip() == fence:
                fence = None
            continue
        if line.lstrip().startswith("```"):
            fence = "```"
            run = None
            tail.append(line)
            continue
        m = re.match(r"^ {0,3}>(.*)$", line)
        if m:
            rest = m.group(1)
            if run is None:
                if quotes:
                    quotes[-1][2] = "\n".join(tail).strip()
                tail = []
                run = [[], False]
                quotes.append(["", False, ""])
            if rest.lstrip().startswith(">"):
                run[1] = True
                rest = rest.lstrip()[1:]
            part = rest.strip()
            if part:
                run[0].append(part)
            quotes[-1][0] = " ".join(run[0])
            quotes[-1][1] = run[1]
        else:
            run = None
            tail.append(line)
    if quotes:
        quotes[-1][2] = "\n".join(tail).strip()
    return quotes


def qr(lines, comments, skips, min_chars=20):
    skips = dict(skips)

    def bump(k, n=1):
        skips[k] = skips.get(k, 0) + n

    threads = {}
    for c in comments:
        threads.setdefault(c["link"], []).append(c)
    recs = []
    for link, posts in threads.items():
        by_id = {}
        for p in posts:
            by_id.setdefault(p["id"], p)
        for p in posts:
            if not p["parent"] or p["deleted"]:
                continue
            qs = blockquotes(p["body"])
            if not qs:
                continue
            parent = by_id.get(p["parent"])
            if parent is None:
                bump("orphan-response", len(qs)); continue
            if parent["deleted"]:
                bump("deleted-parent", len(qs)); continue
            hay, hb, he = normalize(parent["body"])
            for quote, nested, tail in qs:
                if nested:
                    bump("nested-quote"); continue
                needle = normalize(quote)[0]
                if len(needle) < min_chars:
                    bump("short-quote"); continue
                at = hay.find(needle)
                if at < 0:
                    bump("quote-not-in-parent"); continue
                ss = sentences(tail)
                if not ss:
                    bump("empty-response"); continue
                recs.append((link, p["id"], hb[at], he[at + len(needle) - 1], {
                    "thread_id": link, "parent_post_id": parent["id"], "response_post_id": p["id"],
                    "quote_text": quote, "response_sentence": ss[0],
                    "parent_char_span": [hb[at], he[at + len(needle) - 1]],
                    "ambiguous": hay.find(needle, at + 1) >= 0}))
    # byte order on ids, matching a plain string comparison
    recs.sort(key=lambda r: (r[0].encode(), r[1].encode(), r[2], r[3]))
    out = [dump(r[4]) for r in recs]
    return out, summary("qr", lines, len(out), skips)


def main():
    dump_path, out_dir = sys.argv[1], sys.argv[2]
    lines, comments, skips = load(dump_path)
    for kind, fn in (("imho", imho), ("qr", qr)):
        recs, summ = fn(lines, comments, skips)
        with open(os.path.join(out_dir, kind + ".jsonl"), "w", encoding="utf-8", newline="\n") as f:
            f.write("".join(r + "\n" for r in recs))
        with open(os.path.join(out_dir, kind + ".jsonl.summary.json"), "w", encoding="utf-8", newline="\n") as f:
            f.write(summ + "\n")


if __name__ == "__main__":
    main()
