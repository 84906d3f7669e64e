"""Jitted inner loops shared by the operators and all four algorithms.

Populations are int64 gene matrices plus float64 objective rows in the
internal minimization frame: g = (-profit, weight_sum) for feasible solutions
and (violation, M + violation) otherwise, with M the current capacity sum.
The public operator and objective functions wrap these kernels, so tests of
the public API exercise the same code the optimizers run.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def evaluate_one(genes, mu, var, prof, caps, k_alpha):
    """Profit, chance-weight sum, and violation of one assignment vector."""
    m = caps.shape[0]
    mean_sum = np.zeros(m + 1)
    var_sum = np.zeros(m + 1)
    profit = 0.0
    for j in range(genes.shape[0]):
        g = genes[j]
        if g > 0:
            mean_sum[g] += mu[j]
            var_sum[g] += var[j]
            profit += prof[j]
    wsum = 0.0
    viol = 0.0
    for i in range(1, m + 1):
        w = mean_sum[i] + k_alpha * np.sqrt(var_sum[i])
        wsum += w
        over = w - caps[i - 1]
        if over > 0.0:
            viol += over
    return profit, wsum, viol


@njit(cache=True)
def evaluate_batch(genes, mu, var, prof, caps, k_alpha, cap_sum, G, viol_out):
    """Fill min-frame objectives G[x] and violations for every row of genes."""
    for x in range(genes.shape[0]):
        profit, wsum, viol = evaluate_one(genes[x], mu, var, prof, caps, k_alpha)
        if viol == 0.0:
            G[x, 0] = -profit
            G[x, 1] = wsum
        else:
            G[x, 0] = viol
            G[x, 1] = cap_sum + viol
        viol_out[x] = viol
    return genes.shape[0]


@njit(cache=True)
def sbx_pair(a, b, cx_prob, eta, upper, rng):
    """Bounded integer SBX on [0, upper]; round half up and clamp.

    One uniform draw per crossed gene drives both children, and the children
    swap sides with probability 1/2 per gene, as in the reference real-coded
    operator. Identical parent genes pass through untouched.
    """
    n = a.shape[0]
    c1 = np.empty(n, np.int64)
    c2 = np.empty(n, np.int64)
    do_cx = rng.random() < cx_prob
    xl = 0.0
    xu = float(upper)
    exp = 1.0 / (eta + 1.0)
    for j in range(n):
        v1 = float(a[j])
        v2 = float(b[j])
        if do_cx and a[j] != b[j] and rng.random() < 0.5:
            y1 = v1 if v1 < v2 else v2
            y2 = v2 if v1 < v2 else v1
            d = y2 - y1
            u = rng.random()
            beta = 1.0 + 2.0 * (y1 - xl) / d
            alpha = 2.0 - beta ** (-(eta + 1.0))
            if u <= 1.0 / alpha:
                betaq = (u * alpha) ** exp
            else:
                betaq = (1.0 / (2.0 - u * alpha)) ** exp
            v1 = 0.5 * ((y1 + y2) - betaq * d)
            beta = 1.0 + 2.0 * (xu - y2) / d
            alpha = 2.0 - beta ** (-(eta + 1.0))
            if u <= 1.0 / alpha:
                betaq = (u * alpha) ** exp
            else:
                betaq = (1.0 / (2.0 - u * alpha)) ** exp
            v2 = 0.5 * ((y1 + y2) + betaq * d)
            if rng.random() < 0.5:
                v1, v2 = v2, v1
        i1 = np.int64(np.floor(v1 + 0.5))
        i2 = np.int64(np.floor(v2 + 0.5))
        if i1 < 0:
            i1 = 0
        elif i1 > upper:
            i1 = upper
        if i2 < 0:
            i2 = 0
        elif i2 > upper:
            i2 = upper
        c1[j] = i1
        c2[j] = i2
    return c1, c2


@njit(cache=True)
def poly_mutation(genes, p_m, eta, upper, rng):
    """Bounded integer polynomial mutation on [0, upper], per-gene rate p_m."""
    n = genes.shape[0]
    out = np.empty(n, np.int64)
    if upper == 0:
        for j in range(n):
            out[j] = genes[j]
        return out
    xl = 0.0
    xu = float(upper)
    span = xu - xl
    mut_pow = 1.0 / (eta + 1.0)
    for j in range(n):
        x = float(genes[j])
        if rng.random() < p_m:
            u = rng.random()
            if u < 0.5:
                delta1 = (x - xl) / span
                xy = 1.0 - delta1
                val = 2.0 * u + (1.0 - 2.0 * u) * xy ** (eta + 1.0)
                deltaq = val ** mut_pow - 1.0
            else:
                delta2 = (xu - x) / span
                xy = 1.0 - delta2
                val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy ** (eta + 1.0)
                deltaq = 1.0 - val ** mut_pow
            x = x + deltaq * span
        i = np.int64(np.floor(x + 0.5))
        if i < 0:
            i = 0
        elif i > upper:
            i = upper
        out[j] = i
    return out


@njit(cache=True)
def _shuffle(arr, rng):
    for i in range(arr.shape[0] - 1, 0, -1):
        j = rng.integers(0, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(cache=True)
def moead_pass(
    genes,
    G,
    viol,
    z,
    neighbors,
    weights,
    mu,
    var,
    prof,
    caps,
    k_alpha,
    cap_sum,
    cx_prob,
    eta_c,
    p_m,
    eta_m,
    replace_cap,
    order,
    rng,
):
    """One pass of subproblem updates over the given visit order.

    Each visit mates two distinct neighbors, evaluates both children, and lets
    each child replace at most replace_cap neighbors (Tchebycheff, scanned in
    random order, ties replace). Returns evaluations consumed.
    """
    m = caps.shape[0]
    T = neighbors.shape[1]
    evals = 0
    scan = np.empty(T, np.int64)
    for t in range(order.shape[0]):
        i = order[t]
        nb = neighbors[i]
        p1 = nb[rng.integers(0, T)]
        p2 = nb[rng.integers(0, T)]
        while p2 == p1:
            p2 = nb[rng.integers(0, T)]
        c1, c2 = sbx_pair(genes[p1], genes[p2], cx_prob, eta_c, m, rng)
        for which in range(2):
            child = c1 if which == 0 else c2
            child = poly_mutation(child, p_m, eta_m, m, rng)
            profit, wsum, cviol = evaluate_one(child, mu, var, prof, caps, k_alpha)
            evals += 1
            if cviol == 0.0:
                g0 = -profit
                g1 = wsum
            else:
                g0 = cviol
                g1 = cap_sum + cviol
            if g0 < z[0]:
                z[0] = g0
            if g1 < z[1]:
                z[1] = g1
            for q in range(T):
                scan[q] = q
            _shuffle(scan, rng)
            replaced = 0
            for q in range(T):
                k = nb[scan[q]]
                g_old = max(
                    weights[k, 0] * abs(G[k, 0] - z[0]),
                    weights[k, 1] * abs(G[k, 1] - z[1]),
                )
                g_new = max(
                    weights[k, 0] * abs(g0 - z[0]),
                    weights[k, 1] * abs(g1 - z[1]),
                )
                if g_new <= g_old:
                    genes[k] = child
                    G[k, 0] = g0
                    G[k, 1] = g1
                    viol[k] = cviol
                    replaced += 1
                    if replaced >= replace_cap:
                        break
    return evals


@njit(cache=True)
def nd_rank(G):
    """Non-domination rank of each row (front 0 = non-dominated)."""
    N = G.shape[0]
    rank = np.full(N, -1, np.int64)
    ndom = np.zeros(N, np.int64)
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            if (
                G[j, 0] <= G[i, 0]
                and G[j, 1] <= G[i, 1]
                and (G[j, 0] < G[i, 0] or G[j, 1] < G[i, 1])
            ):
                ndom[i] += 1
    current = 0
    remaining = N
    while remaining > 0:
        for i in range(N):
            if rank[i] == -1 and ndom[i] == 0:
                rank[i] = current
                remaining -= 1
        for i in range(N):
            if rank[i] == current:
                for j in range(N):
                    if rank[j] == -1:
                        if (
                            G[i, 0] <= G[j, 0]
                            and G[i, 1] <= G[j, 1]
                            and (G[i, 0] < G[j, 0] or G[i, 1] < G[j, 1])
                        ):
                            ndom[j] -= 1
        current += 1
    return rank


@njit(cache=True)
def crowding(G, rank):
    """Crowding distance per member, computed within each rank class.

    Objective boundaries get +inf; a constant objective contributes 0.
    """
    N = G.shape[0]
    dist = np.zeros(N)
    max_rank = 0
    for i in range(N):
        if rank[i] > max_rank:
            max_rank = rank[i]
    for r in range(max_rank + 1):
        idx = np.where(rank == r)[0]
        k = idx.shape[0]
        if k == 0:
            continue
        for obj in range(G.shape[1]):
            vals = G[idx, obj]
            order = np.argsort(vals, kind="mergesort")
            dist[idx[order[0]]] = np.inf
            dist[idx[order[k - 1]]] = np.inf
            span = vals[order[k - 1]] - vals[order[0]]
            if span <= 0.0:
                continue
            for t in range(1, k - 1):
                a = idx[order[t]]
                if dist[a] != np.inf:
                    dist[a] += (vals[order[t + 1]] - vals[order[t - 1]]) / span
    return dist


@njit(cache=True)
def variation_batch(
    genes,
    parent_idx,
    mu,
    var,
    prof,
    caps,
    k_alpha,
    cap_sum,
    cx_prob,
    eta_c,
    p_m,
    eta_m,
    rng,
    kid_genes,
    kid_G,
    kid_viol,
):
    """Pair consecutive parents, produce len(parent_idx) evaluated children."""
    m = caps.shape[0]
    count = parent_idx.shape[0]
    t = 0
    while t < count:
        pa = parent_idx[t]
        pb = parent_idx[t + 1] if t + 1 < count else parent_idx[t]
        c1, c2 = sbx_pair(genes[pa], genes[pb], cx_prob, eta_c, m, rng)
        for which in range(2):
            if t + which >= count:
                break
            child = c1 if which == 0 else c2
            child = poly_mutation(child, p_m, eta_m, m, rng)
            profit, wsum, cviol = evaluate_one(child, mu, var, prof, caps, k_alpha)
            kid_genes[t + which] = child
            if cviol == 0.0:
                kid_G[t + which, 0] = -profit
                kid_G[t + which, 1] = wsum
            else:
                kid_G[t + which, 0] = cviol
                kid_G[t + which, 1] = cap_sum + cviol
            kid_viol[t + which] = cviol
        t += 2
    return count


@njit(cache=True)
def spea2_raw_density(G, k):
    """SPEA2 fitness R + D over one combined objective matrix."""
    N = G.shape[0]
    strength = np.zeros(N, np.int64)
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            if (
                G[i, 0] <= G[j, 0]
                and G[i, 1] <= G[j, 1]
                and (G[i, 0] < G[j, 0] or G[i, 1] < G[j, 1])
            ):
                strength[i] += 1
    fitness = np.zeros(N)
    for i in range(N):
        raw = 0.0
        for j in range(N):
            if i == j:
                continue
            if (
                G[j, 0] <= G[i, 0]
                and G[j, 1] <= G[i, 1]
                and (G[j, 0] < G[i, 0] or G[j, 1] < G[i, 1])
            ):
                raw += strength[j]
        fitness[i] = raw
    kk = k if k < N - 1 else N - 1
    if kk < 0:
        kk = 0
    row = np.empty(N)
    for i in range(N):
        for j in range(N):
            dx = G[i, 0] - G[j, 0]
            dy = G[i, 1] - G[j, 1]
            row[j] = np.sqrt(dx * dx + dy * dy)
        row_sorted = np.sort(row)
        sigma_k = row_sorted[kk]  # row includes self at distance 0
        fitness[i] += 1.0 / (sigma_k + 2.0)
    return fitness


@njit(cache=True)
def spea2_truncate(G, keep):
    """Indices surviving iterated removal of the lexicographically nearest.

    Repeatedly drops the member whose sorted distance vector to the remaining
    members is lexicographically smallest, until `keep` members remain.
    """
    N = G.shape[0]
    alive = np.ones(N, np.bool_)
    dist = np.empty((N, N))
    for i in range(N):
        dist[i, i] = np.inf
        for j in range(i + 1, N):
            dx = G[i, 0] - G[j, 0]
            dy = G[i, 1] - G[j, 1]
            d = np.sqrt(dx * dx + dy * dy)
            dist[i, j] = d
            dist[j, i] = d
    count = N
    while count > keep:
        best = -1
        best_row = np.empty(0)
        for i in range(N):
            if not alive[i]:
                continue
            row = np.empty(count - 1)
            t = 0
            for j in range(N):
                if alive[j] and j != i:
                    row[t] = dist[i, j]
                    t += 1
            row = np.sort(row)
            if best == -1:
                best = i
                best_row = row
            else:
                for q in range(row.shape[0]):
                    if row[q] < best_row[q]:
                        best = i
                        best_row = row
                        break
                    if row[q] > best_row[q]:
                        break
        alive[best] = False
        count -= 1
    return np.where(alive)[0]
