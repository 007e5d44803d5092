"""Exact per-class and averaged metrics for the two published confusion
matrices, using rational arithmetic. Values are frozen in the metrics tests."""
from fractions import Fraction as Fr

RUNS = {
    "skipgram": [[729, 35, 236], [24, 624, 252], [175, 210, 715]],
    "cbow": [[709, 41, 250], [33, 630, 237], [232, 240, 628]],
}

for name, m in RUNS.items():
    k = len(m)
    total = sum(map(sum, m))
    rows = []
    for c in range(k):
        tp = m[c][c]
        p = Fr(tp, sum(m[g][c] for g in range(k)))
        r = Fr(tp, sum(m[c]))
        f = 2 * p * r / (p + r)
        rows.append((p, r, f, sum(m[c])))
    w = [sum(row[i] * row[3] for row in rows) / total for i in range(3)]
    mac = [sum(row[i] for row in rows) / k for i in range(3)]
    acc = Fr(sum(m[c][c] for c in range(k)), total)
    print("==", name)
    for c, row in enumerate(rows):
        print(" class", c, " ".join(f"{float(v):.17g}" for v in row[:3]), row[3])
    print(" weighted", " ".join(f"{float(v):.17g}" for v in w))
    print(" macro   ", " ".join(f"{float(v):.17g}" for v in mac))
    print(" accuracy", f"{float(acc):.17g}")
