"""Independent reference implementations used only by the tests.

None of these share code with the package: they enumerate, sum pairwise or
evaluate in extended precision.
"""
from itertools import combinations

import mpmath as mp


def gauss_pdf_mp(x, mu):
    x, mu = mp.mpf(x), mp.mpf(mu)
    return mp.exp(-((x - mu) ** 2) / 2) / mp.sqrt(2 * mp.pi)


def bayes_posterior_mp(x, mu1, mu0, prior1):
    """P(Y=1|x) for two unit-variance Gaussians, 50 significant digits."""
    with mp.workdps(50):
        a = gauss_pdf_mp(x, mu1) * mp.mpf(prior1)
        b = gauss_pdf_mp(x, mu0) * (1 - mp.mpf(prior1))
        return float(a / (a + b))


def auc_pairs(scores, labels):
    """O(n^2) Mann-Whitney AUC with ties as one half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            total += 1.0 if sp > sn else 0.5 if sp == sn else 0.0
    return total / (len(pos) * len(neg))


def mmd2_double_sum(a, b, bandwidth):
    import math

    def k(u, w):
        d2 = sum((ui - wi) ** 2 for ui, wi in zip(u, w))
        return math.exp(-d2 / (2 * bandwidth**2))

    a = [tuple(p) if hasattr(p, "__len__") else (p,) for p in a]
    b = [tuple(p) if hasattr(p, "__len__") else (p,) for p in b]
    m, n = len(a), len(b)
    saa = sum(k(a[i], a[j]) for i in range(m) for j in range(m) if i != j) / (m * (m - 1))
    sbb = sum(k(b[i], b[j]) for i in range(n) for j in range(n) if i != j) / (n * (n - 1))
    sab = sum(k(u, w) for u in a for w in b) / (m * n)
    return saa + sbb - 2 * sab


def counting_weights(ys, vs):
    """P(y)/P(y|v) by plain dictionary counting."""
    n = len(ys)
    cell, ny, nv = {}, {}, {}
    for y, v in zip(ys, vs):
        cell[y, v] = cell.get((y, v), 0) + 1
        ny[y] = ny.get(y, 0) + 1
        nv[v] = nv.get(v, 0) + 1
    return [(ny[y] / n) / (cell[y, v] / nv[v]) for y, v in zip(ys, vs)]


def _simple_paths(adj, a, b):
    stack = [(a, [a])]
    while stack:
        node, path = stack.pop()
        for nxt in adj[node]:
            if nxt == b:
                yield path + [b]
            elif nxt not in path:
                stack.append((nxt, path + [nxt]))


def all_paths(nodes, edges, a, b):
    """Every simple path between a and b in the skeleton."""
    adj = {n: set() for n in nodes}
    for u, w in edges:
        adj[u].add(w)
        adj[w].add(u)
    return list(_simple_paths(adj, a, b))


def descendants(nodes, edges, n):
    ch = {x: [w for u, w in edges if u == x] for x in nodes}
    out, stack = set(), [n]
    while stack:
        x = stack.pop()
        for c in ch[x]:
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def path_blocked(path, edge_set, z, desc):
    for i in range(1, len(path) - 1):
        prev, mid, nxt = path[i - 1], path[i], path[i + 1]
        collider = (prev, mid) in edge_set and (nxt, mid) in edge_set
        if collider:
            if mid not in z and not (desc[mid] & z):
                return True
        elif mid in z:
            return True
    return False


def dsep_bruteforce(nodes, edges, a, b, z, paths=None, desc=None):
    """d-separation by checking every simple path for a blocking node."""
    z = set(z)
    edge_set = set(edges)
    if desc is None:
        desc = {n: descendants(nodes, edges, n) for n in nodes}
    if paths is None:
        paths = all_paths(nodes, edges, a, b)
    return all(path_blocked(p, edge_set, z, desc) for p in paths)


def subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from combinations(items, r)
