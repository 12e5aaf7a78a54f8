#!/usr/bin/env python3
"""Writes tests/fixtures/mini_corpus/*.thread: ten small annotated threads.

Component labels follow lexical cues (claims carry opinion markers, premises
carry reasons, non-arguments are chatter) so that in-repo models can learn
them. Output is deterministic for a given seed.
"""
import os
import random
import sys

SEED = 20240611

TOPICS = [
    ("public transit", "fares", "riders", "buses"),
    ("school uniforms", "dress codes", "students", "parents"),
    ("remote work", "offices", "employees", "commutes"),
    ("nuclear power", "reactors", "emissions", "waste"),
    ("video games", "violence", "players", "studies"),
    ("zoos", "animals", "habitats", "visitors"),
    ("tipping", "wages", "servers", "restaurants"),
    ("homework", "teachers", "kids", "grades"),
    ("voting age", "teenagers", "elections", "civics"),
    ("space programs", "budgets", "rockets", "research"),
]

CLAIMS = [
    "I think {a} should be changed for good.",
    "In my opinion {a} is a bad idea for {c}.",
    "Clearly {b} should be reformed right away.",
    "I believe {c} would be better off without {b}.",
    "We should rethink how {a} works.",
    "I think {d} must come first here.",
]
PREMISES = [
    "Because {b} cost {c} far more than anyone admits.",
    "For example, {d} in other places show the same pattern.",
    "Since {c} already struggle with {b}, the burden grows.",
    "Studies show that {d} rarely improve when {b} rise.",
    "Because most {c} never asked for {a} in the first place.",
    "For instance, {b} went up twice in the last decade.",
]
ATTACK_PREMISES = [
    "But {d} actually got better after {b} changed.",
    "However, {c} report that {a} helps them.",
]
NON_ARGS = [
    "Thanks for reading.",
    "Edit: fixed a typo.",
    "Hi everyone.",
    "Long time lurker here.",
    "Good question.",
]
REPLY_CLAIMS = [
    "I think you are wrong about {a}.",
    "I agree that {b} should be reformed.",
    "I don't think {c} would accept that.",
    "In my opinion you overstate the problem with {d}.",
    "You should consider what {c} actually want.",
]
INTER_TYPES = ["Agreement", "Rebuttal", "Attack", "PartialAgreement", "Undercutter"]


def fill(template, topic):
    a, b, c, d = topic
    return template.format(a=a, b=b, c=c, d=d)


class PostBuilder:
    def __init__(self, pid, parent, author, first_sentence):
        self.pid = pid
        self.parent = parent
        self.author = author
        self.sentences = []
        self.props = []  # (id, sentence_index, start, end, label)
        self.next_sentence = first_sentence
        self.title = None

    def pick(self, rng, templates, topic):
        fresh = [t for t in templates if fill(t, topic) not in self.sentences]
        return fill(rng.choice(fresh or templates), topic)

    def add(self, text, label, prop_id):
        offset = sum(len(s) + 1 for s in self.sentences)
        self.sentences.append(text)
        self.props.append((prop_id, self.next_sentence, offset, offset + len(text), label))
        self.next_sentence += 1

    def text(self):
        return " ".join(self.sentences)


def build_thread(rng, index, topic):
    tid = "t%02d" % (index + 1)
    counter = [0]

    def new_id():
        counter[0] += 1
        return "%s_a%02d" % (tid, counter[0])

    relations = []
    posts = []

    op = PostBuilder(tid + "_p0", None, "u%d" % rng.randrange(100), 1)
    title = "CMV: %s" % fill(rng.choice(CLAIMS), topic)
    op.title = title
    main_id = new_id()
    op.props.append((main_id, 0, 0, len(title), "MainClaim"))

    if rng.random() < 0.5:
        op.add(rng.choice(NON_ARGS), "NonArgument", new_id())
    claims_in_op = []
    for block in range(rng.randint(1, 2)):
        if rng.random() < 0.25:
            # A reason stated before its claim: distance -1.
            pid = new_id()
            op.add(op.pick(rng, PREMISES, topic), "Premise", pid)
            cid = new_id()
            op.add(op.pick(rng, CLAIMS, topic), "Claim", cid)
            relations.append((pid, cid, "IntraTurn", "Support"))
        else:
            cid = new_id()
            op.add(op.pick(rng, CLAIMS, topic), "Claim", cid)
        claims_in_op.append(cid)
        for k in range(rng.randint(1, 2)):
            pid = new_id()
            attack = rng.random() < 0.2
            op.add(op.pick(rng, ATTACK_PREMISES if attack else PREMISES, topic), "Premise", pid)
            relations.append((pid, cid, "IntraTurn", "Attack" if attack else "Support"))
    if rng.random() < 0.6:
        # A late premise backing the title claim directly (long distance).
        pid = new_id()
        op.add(op.pick(rng, PREMISES, topic), "Premise", pid)
        relations.append((pid, main_id, "IntraTurn", "Support"))
    if rng.random() < 0.5:
        op.add(rng.choice(NON_ARGS), "NonArgument", new_id())
    posts.append(op)
    claims_by_post = {op.pid: [main_id] + claims_in_op}

    for r in range(rng.randint(3, 4)):
        parent = rng.choice(posts)
        reply = PostBuilder("%s_p%d" % (tid, r + 1), parent.pid, "u%d" % rng.randrange(100), 0)
        if rng.random() < 0.3:
            reply.add(rng.choice(NON_ARGS), "NonArgument", new_id())
        cid = new_id()
        reply.add(reply.pick(rng, REPLY_CLAIMS, topic), "Claim", cid)
        target = rng.choice(claims_by_post[parent.pid])
        relations.append((cid, target, "InterTurn", rng.choice(INTER_TYPES)))
        for k in range(rng.randint(1, 2)):
            pid = new_id()
            reply.add(reply.pick(rng, PREMISES, topic), "Premise", pid)
            relations.append((pid, cid, "IntraTurn", "Support"))
        posts.append(reply)
        claims_by_post[reply.pid] = [cid]
    return tid, posts, relations


def serialize(tid, posts, relations):
    lines = ["thread " + tid]
    for p in posts:
        lines.append("post %s parent=%s author=%s" % (p.pid, p.parent or "-", p.author))
        if p.title is not None:
            lines.append("title: " + p.title)
        for pid, sent, start, end, label in p.props:
            lines.append("adu %s %d %d %d %s" % (pid, sent, start, end, label))
        lines.append("```")
        lines.append(p.text())
        lines.append("```")
    for src, tgt, kind, typ in relations:
        lines.append("rel %s %s %s %s" % (src, tgt, kind, typ))
    return "\n".join(lines) + "\n"


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "mini_corpus")
    os.makedirs(out_dir, exist_ok=True)
    rng = random.Random(SEED)
    for i, topic in enumerate(TOPICS):
        tid, posts, relations = build_thread(rng, i, topic)
        with open(os.path.join(out_dir, tid + ".thread"), "w") as f:
            f.write(serialize(tid, posts, relations))


if __name__ == "__main__":
    main()
