#!/usr/bin/env python3
"""Independent reference computations for the frozen values in the unit tests.

Run with plain python3; nothing here imports the C++ library.
"""
import math
from collections import Counter
from fractions import Fraction


def bleu(gold, attempt, max_n=4, floor=1e-9):
    if not attempt:
        return 0.0
    top = min(max_n, len(attempt))
    logs = []
    for n in range(1, top + 1):
        cand = Counter(tuple(attempt[i:i + n]) for i in range(len(attempt) - n + 1))
        ref = Counter(tuple(gold[i:i + n]) for i in range(len(gold) - n + 1))
        clipped = sum(min(c, ref[g]) for g, c in cand.items())
        p = clipped / sum(cand.values())
        logs.append(math.log(max(p, floor)))
    bp = 1.0 if len(attempt) >= len(gold) else math.exp(1 - len(gold) / len(attempt))
    return bp * math.exp(sum(logs) / len(logs))


def tfidf_cosine(corpus, gold, attempt):
    n = len(corpus)
    df = Counter(t for doc in corpus for t in set(doc))
    idf = {t: math.log((1 + n) / (1 + d)) + 1 for t, d in df.items()}
    def vec(seq):
        c = Counter(t for t in seq if t in idf)
        return {t: k * idf[t] for t, k in c.items()}
    g, a = vec(gold), vec(attempt)
    dot = sum(v * a.get(t, 0.0) for t, v in g.items())
    ng = math.sqrt(sum(v * v for v in g.values()))
    na = math.sqrt(sum(v * v for v in a.values()))
    return dot / (ng * na)


def pearson_exact(x, y):
    x = [Fraction(v) for v in x]
    y = [Fraction(v) for v in y]
    mx, my = sum(x) / len(x), sum(y) / len(y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy, sxx, syy, float(sxy) / math.sqrt(float(sxx * syy))


def average_ranks(v):
    order = sorted(range(len(v)), key=lambda i: v[i])
    ranks = [0] * len(v)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
            j += 1
        r = Fraction(i + j + 2, 2)
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


if __name__ == "__main__":
    print("bleu cat sat mat      %.17g" % bleu("cat sat on mat".split(), "cat sat mat".split()))
    print("tfidf [a,b] vs [a]    %.17g" % tfidf_cosine([["a", "b"], ["a"]], ["a", "b"], ["a"]))
    print("idf ln(3/2)+1         %.17g" % (math.log(1.5) + 1))
    print("rouge_l 6/7           %.17g" % (6 / 7))
    print("pearson               ", pearson_exact([1, 2, 3, 5], [2, 2, 5, 4]))
    rx, ry = average_ranks([1, 2, 2, 4]), average_ranks([1, 3, 2, 4])
    print("spearman ranks        ", rx, ry, pearson_exact(rx, ry))
