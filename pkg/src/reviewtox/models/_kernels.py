"""Hot loops for tree growth, tree traversal and the Pegasos SVM.

Each kernel exists twice: ``*_nb`` (numba, compiled) and ``*_np`` (numpy,
interpreted). The tree kernels perform the same floating-point operations in
the same order, so both backends grow bit-identical trees; Pegasos agrees to
rounding only (row dot products are summed in a different order).

Tree growth works on a copy of the CSC matrix restricted to rows with positive
weight ("triples": feature, row, value). A node owns a contiguous slice of the
sample array and a contiguous, feature-sorted slice of the triples; a split
stably partitions both, so children never re-sort.
"""

import numpy as np

from .._backend import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_MASK = (1 << 64) - 1

GINI = 0
MSE = 1


# SplitMix64 ---------------------------------------------------------------

@njit
def _sm_next_nb(state):
    s = state[0] + _GOLDEN
    state[0] = s
    z = (s ^ (s >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit
def _shuffle_nb(arr, n, state):
    for i in range(n - 1, 0, -1):
        j = np.int64(_sm_next_nb(state) % np.uint64(i + 1))
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


class _SplitMixPy:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def shuffle(self, arr):
        for i in range(len(arr) - 1, 0, -1):
            j = self.next() % (i + 1)
            arr[i], arr[j] = arr[j], arr[i]


# Tree growth (numba) --------------------------------------------------------

@njit
def build_tree_nb(n_features, csc_indptr, csc_rows, csc_vals, y, w,
                  max_depth, min_split, min_leaf, max_features, mode, seed):
    n_rows = y.shape[0]
    m0 = 0
    for r in range(n_rows):
        if w[r] > 0:
            m0 += 1
    samples = np.empty(m0, np.int64)
    q = 0
    for r in range(n_rows):
        if w[r] > 0:
            samples[q] = r
            q += 1

    nnz = 0
    for k in range(csc_indptr[n_features]):
        if w[csc_rows[k]] > 0 and csc_vals[k] != 0.0:
            nnz += 1
    tf = np.empty(nnz, np.int64)
    tr = np.empty(nnz, np.int64)
    tv = np.empty(nnz, np.float64)
    q = 0
    for f in range(n_features):
        for k in range(csc_indptr[f], csc_indptr[f + 1]):
            r = csc_rows[k]
            if w[r] > 0 and csc_vals[k] != 0.0:
                tf[q] = f
                tr[q] = r
                tv[q] = csc_vals[k]
                q += 1

    cap = 2 * m0 + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap, np.float64)
    n_samp = np.zeros(cap, np.int64)
    w_sum = np.zeros(cap, np.float64)

    st_node = np.empty(cap, np.int64)
    st_s0 = np.empty(cap, np.int64)
    st_s1 = np.empty(cap, np.int64)
    st_t0 = np.empty(cap, np.int64)
    st_t1 = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)

    go_right = np.zeros(n_rows, np.bool_)
    samp_tmp = np.empty(m0, np.int64)
    tf_tmp = np.empty(nnz, np.int64)
    tr_tmp = np.empty(nnz, np.int64)
    tv_tmp = np.empty(nnz, np.float64)
    seg_feat = np.empty(n_features, np.int64)
    seg_a = np.empty(n_features, np.int64)
    seg_b = np.empty(n_features, np.int64)
    order = np.empty(n_features, np.int64)
    vbuf = np.empty(m0 + 1, np.float64)
    wbuf = np.empty(m0 + 1, np.float64)
    sbuf = np.empty(m0 + 1, np.float64)
    cbuf = np.empty(m0 + 1, np.int64)

    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)
    random_features = max_features < n_features

    n_nodes = 1
    sp = 0
    st_node[0] = 0
    st_s0[0] = 0
    st_s1[0] = m0
    st_t0[0] = 0
    st_t1[0] = nnz
    st_depth[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = st_node[sp]
        s0 = st_s0[sp]
        s1 = st_s1[sp]
        t0 = st_t0[sp]
        t1 = st_t1[sp]
        depth = st_depth[sp]

        W = 0.0
        S = 0.0
        for k in range(s0, s1):
            r = samples[k]
            W += w[r]
            S += w[r] * y[r]
        m = s1 - s0
        value[node] = S / W
        n_samp[node] = m
        w_sum[node] = W

        if depth >= max_depth or m < min_split or m < 2 * min_leaf:
            continue
        if mode == GINI:
            if S <= 0.0 or S >= W:
                continue
        else:
            y0 = y[samples[s0]]
            same = True
            for k in range(s0 + 1, s1):
                if y[samples[k]] != y0:
                    same = False
                    break
            if same:
                continue

        nseg = 0
        k = t0
        while k < t1:
            f = tf[k]
            a = k
            while k < t1 and tf[k] == f:
                k += 1
            seg_feat[nseg] = f
            seg_a[nseg] = a
            seg_b[nseg] = k
            nseg += 1
        for i in range(nseg):
            order[i] = i
        if random_features:
            _shuffle_nb(order, nseg, state)

        best_proxy = -np.inf
        best_f = -1
        best_seg = -1
        best_thr = 0.0
        visited = 0
        for oi in range(nseg):
            if visited >= max_features:
                break
            si = order[oi]
            f = seg_feat[si]
            a = seg_a[si]
            L = seg_b[si] - a
            sw = 0.0
            ss = 0.0
            for qq in range(L):
                r = tr[a + qq]
                vbuf[qq] = tv[a + qq]
                wbuf[qq] = w[r]
                sbuf[qq] = w[r] * y[r]
                cbuf[qq] = 1
                sw += wbuf[qq]
                ss += sbuf[qq]
            cnt = L
            if m - L > 0:
                vbuf[L] = 0.0
                wbuf[L] = W - sw
                sbuf[L] = S - ss
                cbuf[L] = m - L
                cnt = L + 1
            ordv = np.argsort(vbuf[:cnt], kind="mergesort")
            if vbuf[ordv[0]] == vbuf[ordv[cnt - 1]]:
                continue
            visited += 1
            cw = 0.0
            cs = 0.0
            cc = 0
            for qq in range(cnt - 1):
                i = ordv[qq]
                cw += wbuf[i]
                cs += sbuf[i]
                cc += cbuf[i]
                v_now = vbuf[i]
                v_next = vbuf[ordv[qq + 1]]
                if v_now >= v_next:
                    continue
                if cc < min_leaf or m - cc < min_leaf:
                    continue
                wr = W - cw
                sr = S - cs
                if mode == GINI:
                    proxy = (cs * cs + (cw - cs) * (cw - cs)) / cw + (sr * sr + (wr - sr) * (wr - sr)) / wr
                else:
                    proxy = cs * cs / cw + sr * sr / wr
                if proxy > best_proxy or (proxy == best_proxy and f < best_f):
                    best_proxy = proxy
                    best_f = f
                    best_seg = si
                    thr = (v_now + v_next) / 2.0
                    if thr >= v_next:
                        thr = v_now
                    best_thr = thr

        if best_f < 0:
            continue

        zero_right = 0.0 > best_thr
        for k in range(s0, s1):
            go_right[samples[k]] = zero_right
        for k in range(seg_a[best_seg], seg_b[best_seg]):
            go_right[tr[k]] = tv[k] > best_thr

        nl = 0
        for k in range(s0, s1):
            if not go_right[samples[k]]:
                samp_tmp[nl] = samples[k]
                nl += 1
        nr = nl
        for k in range(s0, s1):
            if go_right[samples[k]]:
                samp_tmp[nr] = samples[k]
                nr += 1
        for k in range(m):
            samples[s0 + k] = samp_tmp[k]

        tl = 0
        for k in range(t0, t1):
            if not go_right[tr[k]]:
                tf_tmp[tl] = tf[k]
                tr_tmp[tl] = tr[k]
                tv_tmp[tl] = tv[k]
                tl += 1
        tn = tl
        for k in range(t0, t1):
            if go_right[tr[k]]:
                tf_tmp[tn] = tf[k]
                tr_tmp[tn] = tr[k]
                tv_tmp[tn] = tv[k]
                tn += 1
        for k in range(t1 - t0):
            tf[t0 + k] = tf_tmp[k]
            tr[t0 + k] = tr_tmp[k]
            tv[t0 + k] = tv_tmp[k]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid

        st_node[sp] = rid
        st_s0[sp] = s0 + nl
        st_s1[sp] = s1
        st_t0[sp] = t0 + tl
        st_t1[sp] = t1
        st_depth[sp] = depth + 1
        sp += 1
        st_node[sp] = lid
        st_s0[sp] = s0
        st_s1[sp] = s0 + nl
        st_t0[sp] = t0
        st_t1[sp] = t0 + tl
        st_depth[sp] = depth + 1
        sp += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), n_samp[:n_nodes].copy(),
            w_sum[:n_nodes].copy())


# Tree growth (numpy) --------------------------------------------------------

def _seqsum(a):
    # left-to-right accumulation, matching the compiled loops bit for bit
    return float(np.cumsum(a)[-1]) if a.size else 0.0


def build_tree_np(n_features, csc_indptr, csc_rows, csc_vals, y, w,
                  max_depth, min_split, min_leaf, max_features, mode, seed):
    samples = np.flatnonzero(w > 0).astype(np.int64)
    m0 = samples.size
    col_of = np.repeat(np.arange(n_features, dtype=np.int64), np.diff(csc_indptr[: n_features + 1]))
    nnz_all = csc_indptr[n_features]
    rows_all = csc_rows[:nnz_all]
    vals_all = csc_vals[:nnz_all]
    keep = (w[rows_all] > 0) & (vals_all != 0.0)
    tf = col_of[keep]
    tr = rows_all[keep].astype(np.int64)
    tv = vals_all[keep].astype(np.float64)

    feature, threshold, left, right, value, n_samp, w_sum = [], [], [], [], [], [], []

    def new_node():
        for lst, v in ((feature, -1), (threshold, 0.0), (left, -1), (right, -1),
                       (value, 0.0), (n_samp, 0), (w_sum, 0.0)):
            lst.append(v)
        return len(feature) - 1

    rng = _SplitMixPy(seed)
    random_features = max_features < n_features
    go_right = np.zeros(y.shape[0], dtype=bool)

    root = new_node()
    stack = [(root, 0, m0, 0, tf.size, 0)]
    while stack:
        node, s0, s1, t0, t1, depth = stack.pop()
        ns = samples[s0:s1]
        W = _seqsum(w[ns])
        S = _seqsum(w[ns] * y[ns])
        m = s1 - s0
        value[node] = S / W
        n_samp[node] = m
        w_sum[node] = W

        if depth >= max_depth or m < min_split or m < 2 * min_leaf:
            continue
        if mode == GINI:
            if S <= 0.0 or S >= W:
                continue
        elif np.all(y[ns] == y[ns[0]]):
            continue

        seg_f = tf[t0:t1]
        if seg_f.size:
            starts = np.concatenate(([0], np.flatnonzero(np.diff(seg_f)) + 1))
            ends = np.concatenate((starts[1:], [seg_f.size]))
        else:
            starts = ends = np.empty(0, np.int64)
        order = list(range(starts.size))
        if random_features:
            rng.shuffle(order)

        best_proxy, best_f, best_seg, best_thr = -np.inf, -1, -1, 0.0
        visited = 0
        for si in order:
            if visited >= max_features:
                break
            a, b = t0 + starts[si], t0 + ends[si]
            f = int(tf[a])
            L = b - a
            r = tr[a:b]
            vb = tv[a:b]
            wb = w[r]
            sb = wb * y[r]
            cb = np.ones(L, dtype=np.int64)
            if m - L > 0:
                vb = np.append(vb, 0.0)
                wb = np.append(wb, W - _seqsum(wb))
                sb = np.append(sb, S - _seqsum(sb))
                cb = np.append(cb, m - L)
            ordv = np.argsort(vb, kind="stable")
            vs = vb[ordv]
            if vs[0] == vs[-1]:
                continue
            visited += 1
            cw = np.cumsum(wb[ordv])[:-1]
            cs = np.cumsum(sb[ordv])[:-1]
            cc = np.cumsum(cb[ordv])[:-1]
            ok = (vs[:-1] < vs[1:]) & (cc >= min_leaf) & (m - cc >= min_leaf)
            if not ok.any():
                continue
            wr = W - cw
            sr = S - cs
            with np.errstate(divide="ignore", invalid="ignore"):
                if mode == GINI:
                    proxy = (cs * cs + (cw - cs) * (cw - cs)) / cw + (sr * sr + (wr - sr) * (wr - sr)) / wr
                else:
                    proxy = cs * cs / cw + sr * sr / wr
            proxy = np.where(ok, proxy, -np.inf)
            qq = int(np.argmax(proxy))  # first maximum = lowest threshold
            p = proxy[qq]
            if p > best_proxy or (p == best_proxy and f < best_f):
                best_proxy, best_f, best_seg = p, f, (a, b)
                v_now, v_next = vs[qq], vs[qq + 1]
                thr = (v_now + v_next) / 2.0
                if thr >= v_next:
                    thr = v_now
                best_thr = float(thr)

        if best_f < 0:
            continue

        go_right[ns] = 0.0 > best_thr
        a, b = best_seg
        go_right[tr[a:b]] = tv[a:b] > best_thr

        gr = go_right[ns]
        samples[s0:s1] = np.concatenate((ns[~gr], ns[gr]))
        nl = int((~gr).sum())
        tgr = go_right[tr[t0:t1]]
        for arr in (tf, tr, tv):
            seg = arr[t0:t1]
            arr[t0:t1] = np.concatenate((seg[~tgr], seg[tgr]))
        tl = int((~tgr).sum())

        lid = new_node()
        rid = new_node()
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack.append((rid, s0 + nl, s1, t0 + tl, t1, depth + 1))
        stack.append((lid, s0, s0 + nl, t0, t0 + tl, depth + 1))

    return (np.asarray(feature, np.int64), np.asarray(threshold, np.float64),
            np.asarray(left, np.int64), np.asarray(right, np.int64),
            np.asarray(value, np.float64), np.asarray(n_samp, np.int64),
            np.asarray(w_sum, np.float64))


# Tree traversal -------------------------------------------------------------

@njit
def apply_tree_nb(indptr, indices, data, feature, threshold, left, right):
    n = indptr.shape[0] - 1
    out = np.empty(n, np.int64)
    for i in range(n):
        a = indptr[i]
        b = indptr[i + 1]
        node = 0
        while feature[node] >= 0:
            f = feature[node]
            lo = a
            hi = b
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < f:
                    lo = mid + 1
                else:
                    hi = mid
            x = 0.0
            if lo < b and indices[lo] == f:
                x = data[lo]
            if x <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def apply_tree_np(X, feature, threshold, left, right):
    """Level-synchronous traversal; ``X`` is a scipy CSR matrix."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    active = np.flatnonzero(feature[node] >= 0)
    while active.size:
        f = feature[node[active]]
        x = np.asarray(X[active, f]).ravel()
        goes_left = x <= threshold[node[active]]
        node[active] = np.where(goes_left, left[node[active]], right[node[active]])
        active = active[feature[node[active]] >= 0]
    return node


# Pegasos linear SVM ---------------------------------------------------------

@njit
def pegasos_nb(indptr, indices, data, n_features, ysign, lam, epochs, seed, avg_from):
    n = indptr.shape[0] - 1
    d = n_features + 1  # last coordinate is the bias, fed a constant 1
    v = np.zeros(d)
    scale = 1.0
    sq = 0.0
    avg = np.zeros(d)
    n_avg = 0
    radius = 1.0 / np.sqrt(lam)
    rownorm = np.empty(n)
    for i in range(n):
        s = 1.0
        for k in range(indptr[i], indptr[i + 1]):
            s += data[k] * data[k]
        rownorm[i] = s
    perm = np.arange(n)
    state = np.empty(1, np.uint64)
    state[0] = np.uint64(seed)
    t = 0
    for ep in range(epochs):
        _shuffle_nb(perm, n, state)
        for pi in range(n):
            i = perm[pi]
            t += 1
            eta = 1.0 / (lam * (t + 1))
            dot = v[d - 1]
            for k in range(indptr[i], indptr[i + 1]):
                dot += v[indices[k]] * data[k]
            margin = ysign[i] * scale * dot
            scale *= 1.0 - eta * lam
            if margin < 1.0:
                c = eta * ysign[i] / scale
                sq += 2.0 * c * dot + c * c * rownorm[i]
                v[d - 1] += c
                for k in range(indptr[i], indptr[i + 1]):
                    v[indices[k]] += c * data[k]
            norm = scale * np.sqrt(max(sq, 0.0))
            if norm > radius:
                scale *= radius / norm
            if scale < 1e-6:
                for j in range(d):
                    v[j] *= scale
                sq = 0.0
                for j in range(d):
                    sq += v[j] * v[j]
                scale = 1.0
        if ep >= avg_from:
            for j in range(d):
                avg[j] += scale * v[j]
            n_avg += 1
    for j in range(d):
        avg[j] /= n_avg
    return avg


def pegasos_np(indptr, indices, data, n_features, ysign, lam, epochs, seed, avg_from):
    n = indptr.shape[0] - 1
    d = n_features + 1
    v = np.zeros(d)
    scale, sq = 1.0, 0.0
    avg = np.zeros(d)
    n_avg = 0
    radius = 1.0 / np.sqrt(lam)
    rows = [(indices[indptr[i]:indptr[i + 1]], data[indptr[i]:indptr[i + 1]]) for i in range(n)]
    rownorm = [1.0 + float(x @ x) for _, x in rows]
    perm = list(range(n))
    rng = _SplitMixPy(seed)
    t = 0
    for ep in range(epochs):
        rng.shuffle(perm)
        for i in perm:
            t += 1
            eta = 1.0 / (lam * (t + 1))
            idx, x = rows[i]
            dot = v[d - 1] + float(v[idx] @ x)
            margin = ysign[i] * scale * dot
            scale *= 1.0 - eta * lam
            if margin < 1.0:
                c = eta * ysign[i] / scale
                sq += 2.0 * c * dot + c * c * rownorm[i]
                v[d - 1] += c
                v[idx] += c * x
            norm = scale * np.sqrt(max(sq, 0.0))
            if norm > radius:
                scale *= radius / norm
            if scale < 1e-6:
                v *= scale
                sq = float(v @ v)
                scale = 1.0
        if ep >= avg_from:
            avg += scale * v
            n_avg += 1
    return avg / n_avg
