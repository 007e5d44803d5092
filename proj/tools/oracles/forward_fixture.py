"""Scalar desk calculation of the RCNN forward pass at 50 digits.

Loops over scalars only, no matrix library, so it shares nothing with the
Eigen implementation. Prints the values frozen in tests/rcnn_test.cpp.
"""
from mpmath import mp, mpf, tanh, exp

mp.dps = 50


def matvec(m, v):
    return [sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m))]


def forward(p, emb, ids):
    n = len(ids)
    e = [emb[t] for t in ids]
    cl = [p["cl0"]]
    for i in range(1, n):
        a = matvec(p["Wl"], cl[i - 1])
        b = matvec(p["Wsl"], e[i - 1])
        cl.append([tanh(a[k] + b[k]) for k in range(len(a))])
    cr = [None] * n
    cr[n - 1] = p["cr0"]
    for i in range(n - 2, -1, -1):
        a = matvec(p["Wr"], cr[i + 1])
        b = matvec(p["Wsr"], e[i + 1])
        cr[i] = [tanh(a[k] + b[k]) for k in range(len(a))]
    y2 = []
    for i in range(n):
        x = cl[i] + e[i] + cr[i]
        z = matvec(p["W2"], x)
        y2.append([tanh(z[j] + p["b2"][j]) for j in range(len(z))])
    h = len(y2[0])
    y3 = [max(y2[i][j] for i in range(n)) for j in range(h)]
    y4 = [s + b for s, b in zip(matvec(p["W4"], y3), p["b4"])]
    m = max(y4)
    z = sum(exp(v - m) for v in y4)
    probs = [exp(v - m) / z for v in y4]
    return cl, cr, y2, y3, y4, probs


def show(name, rows):
    print(name)
    for r in rows:
        print("   ", ", ".join(mp.nstr(v, 20) for v in r))


def F(*xs):
    return [mpf(x) for x in xs]


# Symmetric instance: every weight 0.1, biases and boundary contexts zero.
c01 = mpf("0.1")
sym = {
    "Wl": [[c01] * 2 for _ in range(2)], "Wr": [[c01] * 2 for _ in range(2)],
    "Wsl": [[c01] * 2 for _ in range(2)], "Wsr": [[c01] * 2 for _ in range(2)],
    "cl0": F(0, 0), "cr0": F(0, 0),
    "W2": [[c01] * 6 for _ in range(2)], "b2": F(0, 0),
    "W4": [[c01] * 2 for _ in range(2)], "b4": F(0, 0),
}
emb = {2: F(1, 0), 3: F(0, 1)}
cl, cr, y2, y3, y4, probs = forward(sym, emb, [2, 3])
print("== symmetric")
show("cl", cl); show("cr", cr); show("y2", y2); show("y3", [y3]); show("y4", [y4]); show("p", [probs])

asym = {
    "Wl": [F("0.2", "-0.1"), F("0.05", "0.3")],
    "Wr": [F("-0.15", "0.25"), F("0.1", "0.05")],
    "Wsl": [F("0.4", "-0.2"), F("0.1", "0.3")],
    "Wsr": [F("-0.3", "0.2"), F("0.25", "-0.1")],
    "cl0": F("0.05", "-0.02"), "cr0": F("-0.03", "0.04"),
    "W2": [F("0.1", "-0.2", "0.3", "-0.1", "0.2", "0.05"),
           F("-0.05", "0.15", "-0.25", "0.2", "-0.1", "0.3")],
    "b2": F("0.01", "-0.02"),
    "W4": [F("0.5", "-0.4"), F("-0.3", "0.6"), F("0.2", "0.1")],
    "b4": F("0.1", "0", "-0.1"),
}
emb3 = {2: F(1, 0), 3: F(0, 1), 4: F("0.5", "-0.5")}
cl, cr, y2, y3, y4, probs = forward(asym, emb3, [2, 3, 4])
print("== asymmetric")
show("cl", cl); show("cr", cr); show("y2", y2); show("y3", [y3]); show("y4", [y4]); show("p", [probs])
# argmax positions per hidden unit, first index on ties
print("argmax", [max(range(3), key=lambda i: (y2[i][j], -i)) for j in range(2)])
