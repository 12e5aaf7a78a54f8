#!/usr/bin/env python3
"""Independent corpus statistics for *.thread files.

Usage: corpus_stats.py <dir-or-file> > expected.txt
Prints the same key = value layout as `threadmine stats`.
"""
import os
import sys

KINDS = ["IntraTurn", "InterTurn"]
TYPES = ["Support", "Attack", "Agreement", "PartialAgreement", "Rebuttal", "Undercutter", "PartialAttack"]
LABELS = ["MainClaim", "Claim", "Premise", "NonArgument"]


def parse(text):
    threads = []
    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i].rstrip("\r")
        i += 1
        words = line.split()
        if not words or words[0].startswith("#"):
            continue
        if words[0] == "thread":
            threads.append({"id": words[1], "posts": [], "rels": []})
        elif words[0] == "post":
            fields = dict(w.split("=", 1) for w in words[2:])
            parent = None if fields["parent"] == "-" else fields["parent"]
            threads[-1]["posts"].append({"id": words[1], "parent": parent, "adus": []})
        elif words[0] == "adu":
            threads[-1]["posts"][-1]["adus"].append({"id": words[1], "sent": int(words[2]), "label": words[5]})
        elif words[0] == "rel":
            threads[-1]["rels"].append((words[1], words[2], words[3], words[4]))
        elif line.startswith("```"):
            fence = line.strip()
            while lines[i].strip() != fence:
                i += 1
            i += 1
    return threads


def fmt(x):
    if isinstance(x, float):
        r = repr(x)
        return r[:-2] if r.endswith(".0") else r
    return str(x)


def stats(threads):
    posts = sentences = 0
    labels = {}
    rel_counts = {}
    hist = {}
    intra_pairs = intra_pos = inter_pairs = inter_pos = 0
    for t in threads:
        post_of = {}
        adu = {}
        by_id = {p["id"]: p for p in t["posts"]}
        for p in t["posts"]:
            posts += 1
            sentences += len({a["sent"] for a in p["adus"]})
            c = sum(a["label"] in ("Claim", "MainClaim") for a in p["adus"])
            pr = sum(a["label"] == "Premise" for a in p["adus"])
            intra_pairs += pr * (c + pr - 1) if pr else 0
            for a in p["adus"]:
                labels[a["label"]] = labels.get(a["label"], 0) + 1
                post_of[a["id"]] = p["id"]
                adu[a["id"]] = a
        for p in t["posts"]:
            if p["parent"] is None:
                continue
            claims = sum(a["label"] in ("Claim", "MainClaim") for a in p["adus"])
            args = sum(a["label"] != "NonArgument" for a in by_id[p["parent"]]["adus"])
            inter_pairs += claims * args
        seen = set()
        for s, g, kind, typ in t["rels"]:
            rel_counts[(kind, typ)] = rel_counts.get((kind, typ), 0) + 1
            if (s, g, kind) in seen:
                continue
            seen.add((s, g, kind))
            if kind == "IntraTurn":
                d = adu[s]["sent"] - adu[g]["sent"]
                hist[d] = hist.get(d, 0) + 1
                intra_pos += 1
            elif by_id[post_of[s]]["parent"] == post_of[g]:
                inter_pos += 1
    out = []
    out.append(("threads", len(threads)))
    out.append(("posts", posts))
    out.append(("sentences", sentences))
    out.append(("sentences_per_post", sentences / posts if posts else 0.0))
    for label in LABELS:
        if label in labels:
            out.append(("components." + label, labels[label]))
    for kind in KINDS:
        for typ in TYPES:
            if (kind, typ) in rel_counts:
                out.append(("relations.%s.%s" % (kind, typ), rel_counts[(kind, typ)]))
    for d in sorted(hist):
        out.append(("intra_distance.%s%d" % ("+" if d > 0 else "", d), hist[d]))
    out.append(("intra_pairs", intra_pairs))
    out.append(("intra_positive", intra_pos))
    out.append(("positive_rate_intra", intra_pos / intra_pairs if intra_pairs else 0.0))
    out.append(("positive_rate_intra_defined", 1 if intra_pairs else 0))
    out.append(("inter_pairs", inter_pairs))
    out.append(("inter_positive", inter_pos))
    out.append(("positive_rate_inter", inter_pos / inter_pairs if inter_pairs else 0.0))
    out.append(("positive_rate_inter_defined", 1 if inter_pairs else 0))
    return "".join("%s = %s\n" % (k, fmt(v)) for k, v in out)


def main():
    path = sys.argv[1]
    files = sorted(os.path.join(path, f) for f in os.listdir(path) if f.endswith(".thread")) if os.path.isdir(path) else [path]
    threads = []
    for f in files:
        with open(f) as fh:
            threads += parse(fh.read())
    sys.stdout.write(stats(threads))


if __name__ == "__main__":
    main()
