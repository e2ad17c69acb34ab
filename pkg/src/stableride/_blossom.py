"""Maximum-weight matching in general graphs (Edmonds' blossom algorithm).

Array-based primal-dual implementation in the style of Van Rantwijk's
``mwmatching``. Every function here is plain Python restricted to constructs
numba can compile; :mod:`stableride.matching` runs it either as is (weights as
Python integers in an object array, exact for arbitrarily large values) or
jit-compiled over ``int64`` arrays.

Weights must be integers so that all dual values stay integral. Endpoint
``2k`` of edge ``k`` is ``eu[k]`` and endpoint ``2k + 1`` is ``ev[k]``;
``mate[v]`` holds the remote endpoint index of ``v``'s matched edge.
"""

import numpy as np


def blossom_leaves(b, n, childs):
    out = np.empty(n, np.int64)
    cnt = 0
    stack = np.empty(2 * n, np.int64)
    stack[0] = b
    sp = 1
    while sp > 0:
        sp -= 1
        t = stack[sp]
        if t < n:
            out[cnt] = t
            cnt += 1
        else:
            ch = childs[t]
            for q in range(len(ch) - 1, -1, -1):
                stack[sp] = ch[q]
                sp += 1
    return out[:cnt]


def slack(k, eu, ev, w, dualvar):
    return dualvar[eu[k]] + dualvar[ev[k]] - 2 * w[k]


def assign_label(wv, t, p, n, endpoint, mate, label, labelend, inblossom,
                 blossombase, bestedge, childs, queue):
    while True:
        b = inblossom[wv]
        label[wv] = t
        label[b] = t
        labelend[wv] = p
        labelend[b] = p
        bestedge[wv] = -1
        bestedge[b] = -1
        if t == 1:
            for v in blossom_leaves(b, n, childs):
                queue.append(v)
            return
        # T-blossom: its base is matched; label the mate S
        base = blossombase[b]
        mb = mate[base]
        wv = endpoint[mb]
        t = 1
        p = mb ^ 1


def scan_blossom(v, wv, endpoint, mate, label, labelend, inblossom, blossombase):
    """Trace back from v and w to find a new blossom base, or -1 for an augmenting path."""
    path = [np.int64(0)]
    path.clear()
    base = -1
    while v != -1 or wv != -1:
        b = inblossom[v]
        if label[b] & 4:
            base = blossombase[b]
            break
        path.append(b)
        label[b] = 5
        if labelend[b] == -1:
            v = -1
        else:
            v = endpoint[labelend[b]]
            b = inblossom[v]
            v = endpoint[labelend[b]]
        if wv != -1:
            v, wv = wv, v
    for b in path:
        label[b] = 1
    return base


def add_blossom(base, k, n, eu, ev, w, endpoint, nb_start, nb, label, labelend,
                inblossom, blossomparent, childs, blossombase, endps, bestedge,
                bbe, has_bbe, unused, n_unused, dualvar, queue):
    v = eu[k]
    wv = ev[k]
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[wv]
    b = unused[n_unused - 1]
    blossombase[b] = base
    blossomparent[b] = -1
    blossomparent[bb] = b
    path = [np.int64(0)]
    path.clear()
    ends = [np.int64(0)]
    ends.clear()
    while bv != bb:
        blossomparent[bv] = b
        path.append(bv)
        ends.append(labelend[bv])
        v = endpoint[labelend[bv]]
        bv = inblossom[v]
    path.append(bb)
    path.reverse()
    ends.reverse()
    ends.append(2 * k)
    while bw != bb:
        blossomparent[bw] = b
        path.append(bw)
        ends.append(labelend[bw] ^ 1)
        wv = endpoint[labelend[bw]]
        bw = inblossom[wv]
    label[b] = 1
    labelend[b] = labelend[bb]
    dualvar[b] = dualvar[b] - dualvar[b]
    childs[b] = np.array(path, dtype=np.int64)
    endps[b] = np.array(ends, dtype=np.int64)
    for v in blossom_leaves(b, n, childs):
        if label[inblossom[v]] == 2:
            queue.append(v)
        inblossom[v] = b

    # least-slack edges from the new blossom to each neighbouring S-blossom
    bestedgeto = np.full(2 * n, -1, np.int64)
    for sub in path:
        if has_bbe[sub]:
            cand = bbe[sub]
        else:
            leaves = blossom_leaves(sub, n, childs)
            total = 0
            for v in leaves:
                total += nb_start[v + 1] - nb_start[v]
            cand = np.empty(total, np.int64)
            c = 0
            for v in leaves:
                for idx in range(nb_start[v], nb_start[v + 1]):
                    cand[c] = nb[idx] // 2
                    c += 1
        for k2 in cand:
            i = eu[k2]
            j = ev[k2]
            if inblossom[j] == b:
                i, j = j, i
            bj = inblossom[j]
            if bj != b and label[bj] == 1:
                if bestedgeto[bj] == -1 or slack(k2, eu, ev, w, dualvar) < slack(bestedgeto[bj], eu, ev, w, dualvar):
                    bestedgeto[bj] = k2
        has_bbe[sub] = False
        bbe[sub] = np.empty(0, np.int64)
        bestedge[sub] = -1
    cnt = 0
    for x in bestedgeto:
        if x != -1:
            cnt += 1
    best = np.empty(cnt, np.int64)
    cnt = 0
    for x in bestedgeto:
        if x != -1:
            best[cnt] = x
            cnt += 1
    bbe[b] = best
    has_bbe[b] = True
    bestedge[b] = -1
    for k2 in best:
        if bestedge[b] == -1 or slack(k2, eu, ev, w, dualvar) < slack(bestedge[b], eu, ev, w, dualvar):
            bestedge[b] = k2
    return n_unused - 1


def _index_of(arr, x):
    for q in range(len(arr)):
        if arr[q] == x:
            return q
    return -1


def expand_blossom(b, endstage, n, endpoint, mate, label, labelend, inblossom,
                   blossomparent, childs, blossombase, endps, bestedge, bbe,
                   has_bbe, unused, n_unused, dualvar, allowedge, queue):
    for s in childs[b]:
        blossomparent[s] = -1
        if s < n:
            inblossom[s] = s
        elif endstage and dualvar[s] == 0:
            n_unused = expand_blossom(s, endstage, n, endpoint, mate, label, labelend, inblossom,
                                      blossomparent, childs, blossombase, endps, bestedge, bbe,
                                      has_bbe, unused, n_unused, dualvar, allowedge, queue)
        else:
            for v in blossom_leaves(s, n, childs):
                inblossom[v] = s
    if (not endstage) and label[b] == 2:
        # relabel the sub-blossoms along the even path from the entry child to the base
        ch = childs[b]
        en = endps[b]
        entrychild = inblossom[endpoint[labelend[b] ^ 1]]
        j = _index_of(ch, entrychild)
        if j & 1:
            j -= len(ch)
            jstep = 1
            endptrick = 0
        else:
            jstep = -1
            endptrick = 1
        p = labelend[b]
        while j != 0:
            label[endpoint[p ^ 1]] = 0
            label[endpoint[en[j - endptrick] ^ endptrick ^ 1]] = 0
            assign_label(endpoint[p ^ 1], 2, p, n, endpoint, mate, label, labelend,
                         inblossom, blossombase, bestedge, childs, queue)
            allowedge[en[j - endptrick] // 2] = True
            j += jstep
            p = en[j - endptrick] ^ endptrick
            allowedge[p // 2] = True
            j += jstep
        bv = ch[j]
        label[endpoint[p ^ 1]] = 2
        label[bv] = 2
        labelend[endpoint[p ^ 1]] = p
        labelend[bv] = p
        bestedge[bv] = -1
        j += jstep
        while ch[j] != entrychild:
            bv = ch[j]
            if label[bv] == 1:
                j += jstep
                continue
            found = -1
            for v in blossom_leaves(bv, n, childs):
                if label[v] != 0:
                    found = v
                    break
            if found >= 0:
                label[found] = 0
                label[endpoint[mate[blossombase[bv]]]] = 0
                assign_label(found, 2, labelend[found], n, endpoint, mate, label, labelend,
                             inblossom, blossombase, bestedge, childs, queue)
            j += jstep
    label[b] = -1
    labelend[b] = -1
    childs[b] = np.empty(0, np.int64)
    endps[b] = np.empty(0, np.int64)
    blossombase[b] = -1
    bbe[b] = np.empty(0, np.int64)
    has_bbe[b] = False
    bestedge[b] = -1
    unused[n_unused] = b
    return n_unused + 1


def augment_blossom(b, v, n, endpoint, mate, blossomparent, childs, blossombase, endps):
    """Swap matched/unmatched edges inside blossom b so that v becomes its base."""
    t = v
    while blossomparent[t] != b:
        t = blossomparent[t]
    if t >= n:
        augment_blossom(t, v, n, endpoint, mate, blossomparent, childs, blossombase, endps)
    ch = childs[b]
    en = endps[b]
    i = _index_of(ch, t)
    j = i
    if i & 1:
        j -= len(ch)
        jstep = 1
        endptrick = 0
    else:
        jstep = -1
        endptrick = 1
    while j != 0:
        j += jstep
        t = ch[j]
        p = en[j - endptrick] ^ endptrick
        if t >= n:
            augment_blossom(t, endpoint[p], n, endpoint, mate, blossomparent, childs, blossombase, endps)
        j += jstep
        t = ch[j]
        if t >= n:
            augment_blossom(t, endpoint[p ^ 1], n, endpoint, mate, blossomparent, childs, blossombase, endps)
        mate[endpoint[p]] = p ^ 1
        mate[endpoint[p ^ 1]] = p
    childs[b] = np.concatenate((ch[i:], ch[:i]))
    endps[b] = np.concatenate((en[i:], en[:i]))
    blossombase[b] = blossombase[childs[b][0]]


def augment_matching(k, n, eu, ev, endpoint, mate, labelend, inblossom,
                     blossomparent, childs, blossombase, endps):
    for side in range(2):
        if side == 0:
            s = eu[k]
            p = 2 * k + 1
        else:
            s = ev[k]
            p = 2 * k
        while True:
            bs = inblossom[s]
            if bs >= n:
                augment_blossom(bs, s, n, endpoint, mate, blossomparent, childs, blossombase, endps)
            mate[s] = p
            if labelend[bs] == -1:
                break
            t = endpoint[labelend[bs]]
            bt = inblossom[t]
            s = endpoint[labelend[bt]]
            j = endpoint[labelend[bt] ^ 1]
            if bt >= n:
                augment_blossom(bt, j, n, endpoint, mate, blossomparent, childs, blossombase, endps)
            mate[j] = labelend[bt]
            p = labelend[bt] ^ 1


def solve(n, eu, ev, w, dualvar):
    """Return ``mate`` (vertex -> vertex, or -1) of a maximum-weight matching.

    ``dualvar`` is scratch space of length ``2n`` with the same element type
    as ``w``; edges must be simple with positive weights.
    """
    m = len(eu)
    endpoint = np.empty(2 * m, np.int64)
    deg = np.zeros(n + 1, np.int64)
    for k in range(m):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    nb_start = np.cumsum(deg)
    fill = nb_start[:n].copy()
    nb = np.empty(2 * m, np.int64)
    for k in range(m):
        nb[fill[eu[k]]] = 2 * k + 1
        fill[eu[k]] += 1
        nb[fill[ev[k]]] = 2 * k
        fill[ev[k]] += 1

    mate = np.full(n, -1, np.int64)
    label = np.zeros(2 * n, np.int64)
    labelend = np.full(2 * n, -1, np.int64)
    inblossom = np.arange(n)
    blossomparent = np.full(2 * n, -1, np.int64)
    childs = [np.empty(0, np.int64) for _ in range(2 * n)]
    endps = [np.empty(0, np.int64) for _ in range(2 * n)]
    bbe = [np.empty(0, np.int64) for _ in range(2 * n)]
    has_bbe = np.zeros(2 * n, np.bool_)
    blossombase = np.full(2 * n, -1, np.int64)
    for v in range(n):
        blossombase[v] = v
    bestedge = np.full(2 * n, -1, np.int64)
    unused = np.empty(n, np.int64)
    for q in range(n):
        unused[q] = n + q
    n_unused = n
    zero = w[0] - w[0] if m > 0 else dualvar[0] - dualvar[0]
    maxweight = zero
    for k in range(m):
        if w[k] > maxweight:
            maxweight = w[k]
    for v in range(2 * n):
        dualvar[v] = maxweight if v < n else zero
    allowedge = np.zeros(m, np.bool_)
    queue = [np.int64(0)]
    queue.clear()

    for _stage in range(n):
        label[:] = 0
        bestedge[:] = -1
        for b in range(n, 2 * n):
            bbe[b] = np.empty(0, np.int64)
            has_bbe[b] = False
        allowedge[:] = False
        queue.clear()
        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                assign_label(v, 1, -1, n, endpoint, mate, label, labelend, inblossom,
                             blossombase, bestedge, childs, queue)
        augmented = False
        while True:
            while len(queue) > 0 and not augmented:
                v = queue.pop()
                for idx in range(nb_start[v], nb_start[v + 1]):
                    p = nb[idx]
                    k = p // 2
                    wv = endpoint[p]
                    if inblossom[v] == inblossom[wv]:
                        continue
                    kslack = zero
                    if not allowedge[k]:
                        kslack = slack(k, eu, ev, w, dualvar)
                        if kslack <= 0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[wv]] == 0:
                            assign_label(wv, 2, p ^ 1, n, endpoint, mate, label, labelend,
                                         inblossom, blossombase, bestedge, childs, queue)
                        elif label[inblossom[wv]] == 1:
                            base = scan_blossom(v, wv, endpoint, mate, label, labelend,
                                                inblossom, blossombase)
                            if base >= 0:
                                n_unused = add_blossom(base, k, n, eu, ev, w, endpoint, nb_start, nb,
                                                       label, labelend, inblossom, blossomparent,
                                                       childs, blossombase, endps, bestedge, bbe,
                                                       has_bbe, unused, n_unused, dualvar, queue)
                            else:
                                augment_matching(k, n, eu, ev, endpoint, mate, labelend, inblossom,
                                                 blossomparent, childs, blossombase, endps)
                                augmented = True
                                break
                        elif label[wv] == 0:
                            label[wv] = 2
                            labelend[wv] = p ^ 1
                    elif label[inblossom[wv]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < slack(bestedge[b], eu, ev, w, dualvar):
                            bestedge[b] = k
                    elif label[wv] == 0:
                        if bestedge[wv] == -1 or kslack < slack(bestedge[wv], eu, ev, w, dualvar):
                            bestedge[wv] = k
            if augmented:
                break

            # choose the dual adjustment
            deltatype = 1
            delta = dualvar[0]
            for v in range(n):
                if dualvar[v] < delta:
                    delta = dualvar[v]
            deltaedge = -1
            deltablossom = -1
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = slack(bestedge[v], eu, ev, w, dualvar)
                    if d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = bestedge[v]
            for b in range(2 * n):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    d = slack(bestedge[b], eu, ev, w, dualvar) // 2
                    if d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = bestedge[b]
            for b in range(n, 2 * n):
                if blossombase[b] >= 0 and blossomparent[b] == -1 and label[b] == 2 and dualvar[b] < delta:
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b

            for v in range(n):
                if label[inblossom[v]] == 1:
                    dualvar[v] -= delta
                elif label[inblossom[v]] == 2:
                    dualvar[v] += delta
            for b in range(n, 2 * n):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i = eu[deltaedge]
                j = ev[deltaedge]
                if label[inblossom[i]] == 0:
                    i, j = j, i
                queue.append(i)
            elif deltatype == 3:
                allowedge[deltaedge] = True
                queue.append(eu[deltaedge])
            else:
                n_unused = expand_blossom(deltablossom, False, n, endpoint, mate, label, labelend,
                                          inblossom, blossomparent, childs, blossombase, endps,
                                          bestedge, bbe, has_bbe, unused, n_unused, dualvar,
                                          allowedge, queue)
        if not augmented:
            break
        for b in range(n, 2 * n):
            if (blossomparent[b] == -1 and blossombase[b] >= 0 and label[b] == 1
                    and dualvar[b] == 0):
                n_unused = expand_blossom(b, True, n, endpoint, mate, label, labelend, inblossom,
                                          blossomparent, childs, blossombase, endps, bestedge,
                                          bbe, has_bbe, unused, n_unused, dualvar, allowedge, queue)

    out = np.full(n, -1, np.int64)
    for v in range(n):
        if mate[v] >= 0:
            out[v] = endpoint[mate[v]]
    return out
