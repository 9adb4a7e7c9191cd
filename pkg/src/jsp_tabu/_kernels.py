"""Compiled kernels shared by the public API and the tabu search loop.

Operations are flat int64 indices (job-major).  A selection is stored as a
padded ``(m, L)`` array ``seq`` plus ``mlen`` (ops per machine); ``mpos``,
``mprev`` and ``mnext`` are the derived machine links (-1 = dummy).
Heads exclude the operation's own duration, tails include it.
"""

import numpy as np
from numba import njit

FORWARD = 0  # insert u right after v
BACKWARD = 1  # insert v right before u

N5, N6, N7, N8 = 5, 6, 7, 8

# search state slots
S_IT, S_NOIMP, S_BEST, S_CUR, S_IMPROVE, S_RESTARTS, S_IT_BEST, S_TB_PTR, S_STATUS = range(9)
S_FALLBACKS, S_TRACE_N = 9, 10
STATE_SIZE = 11

# search params slots
P_KIND, P_IMPROVE_ITER, P_TEN_LO, P_TEN_HI, P_TARGET, P_MAX_ITERS, P_CAP = range(7)
P_WINDOW, P_EXACT, P_ALL_PATHS, P_CLIP = range(7, 11)
PARAMS_SIZE = 11

RUNNING, STOP_TARGET, STOP_ITERS, STOP_EMPTY, STOP_CYCLE = 0, 1, 2, 3, 4

BIG = np.int64(1) << np.int64(62)


@njit(cache=True)
def link(seq, mlen, mpos, mprev, mnext):
    for h in range(seq.shape[0]):
        n = mlen[h]
        for i in range(n):
            o = seq[h, i]
            mpos[o] = i
            mprev[o] = seq[h, i - 1] if i > 0 else -1
            mnext[o] = seq[h, i + 1] if i + 1 < n else -1


@njit(cache=True)
def relink_span(seq, h, lo, hi, mlen, mpos, mprev, mnext):
    n = mlen[h]
    a = max(lo - 1, 0)
    b = min(hi + 1, n - 1)
    for i in range(a, b + 1):
        o = seq[h, i]
        mpos[o] = i
        mprev[o] = seq[h, i - 1] if i > 0 else -1
        mnext[o] = seq[h, i + 1] if i + 1 < n else -1


@njit(cache=True)
def evaluate(dur, jprev, jnext, mprev, mnext, head, tail, order, indeg):
    """Forward/backward longest-path passes; returns makespan or -1 on a cycle."""
    n = dur.shape[0]
    top = 0
    for o in range(n):
        d = 0
        if jprev[o] >= 0:
            d += 1
        if mprev[o] >= 0:
            d += 1
        indeg[o] = d
        if d == 0:
            order[top] = o
            top += 1
    k = 0
    while k < top:
        o = order[k]
        k += 1
        s = jnext[o]
        if s >= 0:
            indeg[s] -= 1
            if indeg[s] == 0:
                order[top] = s
                top += 1
        s = mnext[o]
        if s >= 0:
            indeg[s] -= 1
            if indeg[s] == 0:
                order[top] = s
                top += 1
    if top < n:
        return -1
    mk = 0
    for k in range(n):
        o = order[k]
        r = 0
        p = jprev[o]
        if p >= 0:
            r = head[p] + dur[p]
        p = mprev[o]
        if p >= 0 and head[p] + dur[p] > r:
            r = head[p] + dur[p]
        head[o] = r
        if r + dur[o] > mk:
            mk = r + dur[o]
    for k in range(n - 1, -1, -1):
        o = order[k]
        q = 0
        s = jnext[o]
        if s >= 0:
            q = tail[s]
        s = mnext[o]
        if s >= 0 and tail[s] > q:
            q = tail[s]
        tail[o] = q + dur[o]
    return mk


@njit(cache=True)
def critical_path(dur, jprev, mprev, head, mk, path):
    """Backtrack from the smallest-index op ending at ``mk``; machine arcs win ties."""
    n = dur.shape[0]
    o = -1
    for i in range(n):
        if head[i] + dur[i] == mk:
            o = i
            break
    k = 0
    while True:
        path[k] = o
        k += 1
        if head[o] == 0:
            break
        p = mprev[o]
        if p >= 0 and head[p] + dur[p] == head[o]:
            o = p
        else:
            o = jprev[o]
    # reverse in place
    i, j = 0, k - 1
    while i < j:
        t = path[i]
        path[i] = path[j]
        path[j] = t
        i += 1
        j -= 1
    return k


@njit(cache=True)
def path_blocks(path, plen, mach, mnext, bops, bstart, bfirst, blast):
    """Split a critical path into maximal machine-adjacent runs.

    Block b holds ``bops[bstart[b]:bstart[b + 1]]``.  Returns the block count.
    """
    nb = 0
    for i in range(plen):
        o = path[i]
        bops[i] = o
        if i == 0 or mach[path[i - 1]] != mach[o] or mnext[path[i - 1]] != o:
            bstart[nb] = i
            nb += 1
    bstart[nb] = plen
    for b in range(nb):
        bfirst[b] = b == 0
        blast[b] = b == nb - 1
    return nb


@njit(cache=True)
def all_blocks(seq, mlen, dur, head, tail, mk, bops, bstart, bfirst, blast, keys, tmp_ops, tmp_start):
    """Blocks over every critical operation: maximal tight machine runs.

    Ordered by (head of first op, machine).  ``bfirst`` marks runs starting at
    time 0, ``blast`` runs ending at the makespan.
    """
    nb = 0
    k = 0
    for h in range(seq.shape[0]):
        prev_in = False
        for i in range(mlen[h]):
            o = seq[h, i]
            crit = head[o] + tail[o] == mk
            if not crit:
                prev_in = False
                continue
            if prev_in:
                p = seq[h, i - 1]
                if head[p] + dur[p] != head[o]:
                    prev_in = False
            if not prev_in:
                tmp_start[nb] = k
                keys[nb] = head[o] * seq.shape[0] + h
                nb += 1
            tmp_ops[k] = o
            k += 1
            prev_in = True
    tmp_start[nb] = k
    idx = np.argsort(keys[:nb])
    w = 0
    for bi in range(nb):
        b = idx[bi]
        bstart[bi] = w
        for t in range(tmp_start[b], tmp_start[b + 1]):
            bops[w] = tmp_ops[t]
            w += 1
        first = bops[bstart[bi]]
        last = bops[w - 1]
        bfirst[bi] = head[first] == 0
        blast[bi] = head[last] + dur[last] == mk
    bstart[nb] = w
    return nb


@njit(cache=True)
def prop1(u, v, dur, jnext, tail):
    js = jnext[u]
    rhs = 0
    if js >= 0:
        rhs = tail[js] - dur[js]
    return tail[v] >= rhs


@njit(cache=True)
def prop2(u, v, dur, jprev, head):
    jp = jprev[v]
    rhs = 0
    if jp >= 0:
        rhs = head[jp]
    return head[u] + dur[u] >= rhs


@njit(cache=True)
def _push(kind, u, v, cnt, out_k, out_u, out_v, mpos, dur, jprev, jnext, head, tail, seen, stamp, gate):
    if mpos[v] == mpos[u] + 1:
        # adjacent: forward and backward give the same sequence
        if seen[u] == stamp:
            return cnt
        if gate and not (prop1(u, v, dur, jnext, tail) or prop2(u, v, dur, jprev, head)):
            return cnt
        seen[u] = stamp
        kind = FORWARD
    elif gate:
        if kind == FORWARD:
            if not prop1(u, v, dur, jnext, tail):
                return cnt
        elif not prop2(u, v, dur, jprev, head):
            return cnt
    out_k[cnt] = kind
    out_u[cnt] = u
    out_v[cnt] = v
    return cnt + 1


@njit(cache=True)
def generate(
    nkind, bops, bstart, nb, seq, mlen, mach, mpos, dur, jprev, jnext, head, tail,
    window, gate, out_k, out_u, out_v, seen, stamp, keys, L,
):
    """Fill ``out_*`` with the sorted, deduplicated move list; returns its size."""
    cnt = 0
    for b in range(nb):
        s0 = bstart[b]
        s = bstart[b + 1] - s0
        first = bops[s0]
        last = bops[s0 + s - 1]
        if s >= 2:
            cnt = _push(BACKWARD, first, bops[s0 + 1], cnt, out_k, out_u, out_v,
                        mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
            cnt = _push(FORWARD, bops[s0 + s - 2], last, cnt, out_k, out_u, out_v,
                        mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
        if nkind >= N6:
            for i in range(1, s - 1):
                w = bops[s0 + i]
                cnt = _push(BACKWARD, first, w, cnt, out_k, out_u, out_v,
                            mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
                cnt = _push(FORWARD, w, last, cnt, out_k, out_u, out_v,
                            mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
        if nkind >= N7:
            for i in range(1, s - 1):
                w = bops[s0 + i]
                cnt = _push(FORWARD, first, w, cnt, out_k, out_u, out_v,
                            mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
                cnt = _push(BACKWARD, w, last, cnt, out_k, out_u, out_v,
                            mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
        if nkind >= N8:
            h = mach[first]
            pf = mpos[first]
            pl = mpos[last]
            hi = mlen[h] - 1
            if window > 0 and pl + window < hi:
                hi = pl + window
            lo = 0
            if window > 0 and pf - window > 0:
                lo = pf - window
            for i in range(s):
                x = bops[s0 + i]
                for p in range(pl + 1, hi + 1):
                    cnt = _push(FORWARD, x, seq[h, p], cnt, out_k, out_u, out_v,
                                mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
                for p in range(pf - 1, lo - 1, -1):
                    cnt = _push(BACKWARD, seq[h, p], x, cnt, out_k, out_u, out_v,
                                mpos, dur, jprev, jnext, head, tail, seen, stamp, gate)
    sort_moves(cnt, out_k, out_u, out_v, mach, mpos, keys, L)
    return cnt


@njit(cache=True)
def sort_moves(cnt, out_k, out_u, out_v, mach, mpos, keys, L):
    for i in range(cnt):
        u = out_u[i]
        keys[i] = ((mach[u] * L + mpos[u]) * L + mpos[out_v[i]]) * 2 + out_k[i]
    idx = np.argsort(keys[:cnt])
    ck = out_k[:cnt][idx]
    cu = out_u[:cnt][idx]
    cv = out_v[:cnt][idx]
    out_k[:cnt] = ck
    out_u[:cnt] = cu
    out_v[:cnt] = cv


@njit(cache=True)
def clip(cnt, out_k, out_u, out_v, bops, bstart, nb, bfirst, blast, blk_of, blk_idx):
    """Drop moves that provably cannot shorten the makespan; returns new count."""
    for b in range(nb):
        for t in range(bstart[b], bstart[b + 1]):
            blk_of[bops[t]] = b
            blk_idx[bops[t]] = t - bstart[b]
    w = 0
    for i in range(cnt):
        k, u, v = out_k[i], out_u[i], out_v[i]
        drop = False
        bu = blk_of[u]
        if bu >= 0 and bu == blk_of[v]:
            s = bstart[bu + 1] - bstart[bu]
            iu = blk_idx[u]
            iv = blk_idx[v]
            if bfirst[bu] and iu == 0 and 0 < iv < s - 1:
                # first op with an inner op of the first block (either direction)
                drop = True
            if blast[bu] and iv == s - 1 and 0 < iu < s - 1:
                # inner op with the last op of the last block (either direction)
                drop = True
        if not drop:
            out_k[w] = k
            out_u[w] = u
            out_v[w] = v
            w += 1
    for b in range(nb):
        for t in range(bstart[b], bstart[b + 1]):
            blk_of[bops[t]] = -1
    return w


@njit(cache=True)
def span_order(kind, u, v, seq, mpos, buf):
    """Write the post-move order of positions pos(u)..pos(v) into ``buf``."""
    h_row = seq
    pu = mpos[u]
    pv = mpos[v]
    ln = pv - pu + 1
    if kind == FORWARD:
        for i in range(ln - 1):
            buf[i] = h_row[pu + 1 + i]
        buf[ln - 1] = u
    else:
        buf[0] = v
        for i in range(1, ln):
            buf[i] = h_row[pu + i - 1]
    return ln


@njit(cache=True)
def apply_move(kind, u, v, seq, mlen, mach, mpos, mprev, mnext, saved, buf):
    """Apply in place; the pre-move segment is left in ``saved``. Returns its length."""
    h = mach[u]
    pu = mpos[u]
    ln = span_order(kind, u, v, seq[h], mpos, buf)
    for i in range(ln):
        saved[i] = seq[h, pu + i]
        seq[h, pu + i] = buf[i]
    relink_span(seq, h, pu, pu + ln - 1, mlen, mpos, mprev, mnext)
    return ln


@njit(cache=True)
def restore(h, pu, ln, seq, mlen, mpos, mprev, mnext, saved):
    for i in range(ln):
        seq[h, pu + i] = saved[i]
    relink_span(seq, h, pu, pu + ln - 1, mlen, mpos, mprev, mnext)


@njit(cache=True)
def estimate(
    kind, u, v, seq, mlen, mach, mpos, mprev, mnext, dur, jprev, jnext, head, tail,
    buf, rr, qq, saved, head2, tail2, order2, indeg2, fast_only,
):
    """Post-move makespan estimate: max over the moved span of new head + tail.

    Head/tail recurrences on the reordered span are used when no job neighbour
    of a span op can itself be shifted by the move; otherwise the span values
    are recomputed exactly.  Returns (estimate, used_fallback).
    """
    h = mach[u]
    pu = mpos[u]
    ln = span_order(kind, u, v, seq[h], mpos, buf)
    a = mprev[u]
    b = mnext[v]
    ru = head[u] + dur[u]
    qv = tail[v]
    safe = True
    if not fast_only:
        for i in range(ln):
            x = buf[i]
            jp = jprev[x]
            if jp >= 0 and (mach[jp] == h or (head[jp] >= ru and tail[jp] <= tail[u] - dur[u])):
                safe = False
                break
            js = jnext[x]
            if js >= 0 and (mach[js] == h or (tail[js] - dur[js] >= qv and head[js] + dur[js] <= head[v])):
                safe = False
                break
    if safe:
        start = 0
        if a >= 0:
            start = head[a] + dur[a]
        for i in range(ln):
            x = buf[i]
            r = start
            jp = jprev[x]
            if jp >= 0 and head[jp] + dur[jp] > r:
                r = head[jp] + dur[jp]
            rr[i] = r
            start = r + dur[x]
        after = 0
        if b >= 0:
            after = tail[b]
        for i in range(ln - 1, -1, -1):
            x = buf[i]
            q = after
            js = jnext[x]
            if js >= 0 and tail[js] > q:
                q = tail[js]
            qq[i] = q + dur[x]
            after = qq[i]
        best = 0
        for i in range(ln):
            if rr[i] + qq[i] > best:
                best = rr[i] + qq[i]
        return best, False
    # exact span values
    for i in range(ln):
        saved[i] = seq[h, pu + i]
        seq[h, pu + i] = buf[i]
    relink_span(seq, h, pu, pu + ln - 1, mlen, mpos, mprev, mnext)
    mk = evaluate(dur, jprev, jnext, mprev, mnext, head2, tail2, order2, indeg2)
    best = -1
    if mk >= 0:
        best = 0
        for i in range(ln):
            x = buf[i]
            if head2[x] + tail2[x] > best:
                best = head2[x] + tail2[x]
    restore(h, pu, ln, seq, mlen, mpos, mprev, mnext, saved)
    return best, True


@njit(cache=True)
def exact_after(kind, u, v, seq, mlen, mach, mpos, mprev, mnext, dur, jprev, jnext,
                buf, saved, head2, tail2, order2, indeg2):
    """Exact post-move makespan (-1 if the move creates a cycle); seq is restored."""
    h = mach[u]
    pu = mpos[u]
    ln = apply_move(kind, u, v, seq, mlen, mach, mpos, mprev, mnext, saved, buf)
    mk = evaluate(dur, jprev, jnext, mprev, mnext, head2, tail2, order2, indeg2)
    restore(h, pu, ln, seq, mlen, mpos, mprev, mnext, saved)
    return mk


@njit(cache=True)
def is_tabu(kind, u, v, seq, mach, mpos, it, tb_mach, tb_start, tb_len, tb_exp, tb_ops, buf):
    """True if the move recreates an unexpired recorded segment that its span overlaps.

    The post-move machine order is compared with each entry at the entry's own
    positions, so a chain of moves with different spans cannot walk back to an
    arrangement that is still forbidden.
    """
    h = mach[u]
    pu = mpos[u]
    pv = mpos[v]
    computed = False
    for e in range(tb_mach.shape[0]):
        if tb_exp[e] < it or tb_mach[e] != h:
            continue
        s = tb_start[e]
        t = s + tb_len[e] - 1
        if t < pu or s > pv:
            continue
        if not computed:
            span_order(kind, u, v, seq[h], mpos, buf)
            computed = True
        same = True
        for i in range(s, t + 1):
            if pu <= i <= pv:
                o = buf[i - pu]
            else:
                o = seq[h, i]
            if tb_ops[e, i - s] != o:
                same = False
                break
        if same:
            return True
    return False


@njit(cache=True)
def record_tabu(h, pu, ln, saved, expires, state, tb_mach, tb_start, tb_len, tb_exp, tb_ops):
    e = state[S_TB_PTR]
    tb_mach[e] = h
    tb_start[e] = pu
    tb_len[e] = ln
    tb_exp[e] = expires
    for i in range(ln):
        tb_ops[e, i] = saved[i]
    state[S_TB_PTR] = (e + 1) % tb_mach.shape[0]


@njit(cache=True)
def select_index(est, tabu, cnt, best):
    """Lowest estimate among non-tabu or aspirating moves; -1 if none qualifies."""
    bi = -1
    be = BIG
    for i in range(cnt):
        if (not tabu[i]) or est[i] < best:
            if est[i] < be:
                be = est[i]
                bi = i
    return bi


@njit(cache=True)
def seed_rng(seed):
    np.random.seed(seed)


@njit(cache=True)
def search_chunk(dur, mach, jprev, jnext, seq, mlen, best_seq,
                 tb_mach, tb_start, tb_len, tb_exp, tb_ops, state, params, n_iters,
                 trace_it, trace_mk):
    """Run up to ``n_iters`` tabu-search iterations; all state lives in the arrays.

    Each improvement of the best makespan is appended to ``trace_*`` while room
    is left.
    """
    n = dur.shape[0]
    m = seq.shape[0]
    L = seq.shape[1]
    mpos = np.empty(n, np.int64)
    mprev = np.empty(n, np.int64)
    mnext = np.empty(n, np.int64)
    head = np.empty(n, np.int64)
    tail = np.empty(n, np.int64)
    order = np.empty(n, np.int64)
    indeg = np.empty(n, np.int64)
    head2 = np.empty(n, np.int64)
    tail2 = np.empty(n, np.int64)
    order2 = np.empty(n, np.int64)
    indeg2 = np.empty(n, np.int64)
    path = np.empty(n, np.int64)
    bops = np.empty(n, np.int64)
    bstart = np.empty(n + 1, np.int64)
    bfirst = np.empty(n, np.bool_)
    blast = np.empty(n, np.bool_)
    bkeys = np.empty(n, np.int64)
    tmp_ops = np.empty(n, np.int64)
    tmp_start = np.empty(n + 1, np.int64)
    blk_of = np.full(n, -1, np.int64)
    blk_idx = np.empty(n, np.int64)
    seen = np.zeros(n, np.int64)
    cap = n * (L + 4) + 16
    mk_ = np.empty(cap, np.int64)
    mu = np.empty(cap, np.int64)
    mv = np.empty(cap, np.int64)
    keys = np.empty(cap, np.int64)
    est = np.empty(cap, np.int64)
    tabu = np.empty(cap, np.bool_)
    buf = np.empty(L, np.int64)
    rr = np.empty(L, np.int64)
    qq = np.empty(L, np.int64)
    saved = np.empty(L, np.int64)
    saved2 = np.empty(L, np.int64)

    nkind = params[P_KIND]
    nmax = params[P_IMPROVE_ITER]
    ten_lo = params[P_TEN_LO]
    ten_hi = params[P_TEN_HI]
    target = params[P_TARGET]
    max_iters = params[P_MAX_ITERS]
    children_cap = params[P_CAP]
    window = params[P_WINDOW]
    exact_rank = params[P_EXACT] != 0
    all_paths = params[P_ALL_PATHS] != 0
    do_clip = params[P_CLIP] != 0

    link(seq, mlen, mpos, mprev, mnext)
    cur = evaluate(dur, jprev, jnext, mprev, mnext, head, tail, order, indeg)
    if cur < 0:
        state[S_STATUS] = STOP_CYCLE
        return STOP_CYCLE
    state[S_CUR] = cur
    stamp = 0
    status = RUNNING
    for _ in range(n_iters):
        it = state[S_IT]
        if state[S_BEST] <= target:
            status = STOP_TARGET
            break
        if it >= max_iters:
            status = STOP_ITERS
            break
        if all_paths:
            nb = all_blocks(seq, mlen, dur, head, tail, cur, bops, bstart, bfirst, blast,
                            bkeys, tmp_ops, tmp_start)
        else:
            plen = critical_path(dur, jprev, mprev, head, cur, path)
            nb = path_blocks(path, plen, mach, mnext, bops, bstart, bfirst, blast)
        stamp += 1
        cnt = generate(nkind, bops, bstart, nb, seq, mlen, mach, mpos, dur, jprev, jnext,
                       head, tail, window, True, mk_, mu, mv, seen, stamp, keys, L)
        if do_clip:
            cnt = clip(cnt, mk_, mu, mv, bops, bstart, nb, bfirst, blast, blk_of, blk_idx)
        if cnt == 0:
            status = STOP_EMPTY
            break
        if children_cap > 0 and cnt > children_cap:
            # random subset, original order kept
            for i in range(children_cap):
                j = np.random.randint(i, cnt)
                t = mk_[i]; mk_[i] = mk_[j]; mk_[j] = t
                t = mu[i]; mu[i] = mu[j]; mu[j] = t
                t = mv[i]; mv[i] = mv[j]; mv[j] = t
            cnt = children_cap
            sort_moves(cnt, mk_, mu, mv, mach, mpos, keys, L)
        best = state[S_BEST]
        for i in range(cnt):
            if exact_rank:
                est[i] = exact_after(mk_[i], mu[i], mv[i], seq, mlen, mach, mpos, mprev, mnext,
                                     dur, jprev, jnext, buf, saved, head2, tail2, order2, indeg2)
            else:
                e, fb = estimate(mk_[i], mu[i], mv[i], seq, mlen, mach, mpos, mprev, mnext, dur,
                                 jprev, jnext, head, tail, buf, rr, qq, saved, head2, tail2,
                                 order2, indeg2, False)
                est[i] = e
                if fb:
                    state[S_FALLBACKS] += 1
            tabu[i] = is_tabu(mk_[i], mu[i], mv[i], seq, mach, mpos, it,
                              tb_mach, tb_start, tb_len, tb_exp, tb_ops, buf)
        sel = select_index(est, tabu, cnt, best)
        if sel < 0:
            sel = np.random.randint(0, cnt)
        h = mach[mu[sel]]
        pu = mpos[mu[sel]]
        ln = apply_move(mk_[sel], mu[sel], mv[sel], seq, mlen, mach, mpos, mprev, mnext, saved, buf)
        cur = evaluate(dur, jprev, jnext, mprev, mnext, head, tail, order, indeg)
        if cur < 0:
            status = STOP_CYCLE
            break
        if cur < best:
            state[S_BEST] = cur
            best_seq[:, :] = seq
            state[S_NOIMP] = 0
            state[S_IMPROVE] += 1
            state[S_IT_BEST] = it + 1
            t = state[S_TRACE_N]
            if t < trace_it.shape[0]:
                trace_it[t] = it + 1
                trace_mk[t] = cur
                state[S_TRACE_N] = t + 1
        else:
            state[S_NOIMP] += 1
        if state[S_NOIMP] == nmax:
            restore(h, pu, ln, seq, mlen, mpos, mprev, mnext, saved)
            r = np.random.randint(0, cnt)
            h = mach[mu[r]]
            pu = mpos[mu[r]]
            ln = apply_move(mk_[r], mu[r], mv[r], seq, mlen, mach, mpos, mprev, mnext, saved, buf)
            cur = evaluate(dur, jprev, jnext, mprev, mnext, head, tail, order, indeg)
            if cur < 0:
                status = STOP_CYCLE
                break
            state[S_NOIMP] = 0
            state[S_RESTARTS] += 1
            if cur < state[S_BEST]:
                state[S_BEST] = cur
                best_seq[:, :] = seq
                state[S_IMPROVE] += 1
                state[S_IT_BEST] = it + 1
                t = state[S_TRACE_N]
                if t < trace_it.shape[0]:
                    trace_it[t] = it + 1
                    trace_mk[t] = cur
                    state[S_TRACE_N] = t + 1
        tenure = np.random.randint(ten_lo, ten_hi + 1)
        record_tabu(h, pu, ln, saved, it + tenure, state, tb_mach, tb_start, tb_len, tb_exp, tb_ops)
        state[S_CUR] = cur
        state[S_IT] = it + 1
    if status == RUNNING:
        if state[S_BEST] <= target:
            status = STOP_TARGET
        elif state[S_IT] >= max_iters:
            status = STOP_ITERS
    state[S_STATUS] = status
    return status
