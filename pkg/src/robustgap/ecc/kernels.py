"""Batch decoder for the concatenated Reed-Solomon / simplex code.

All polynomials are int64 coefficient arrays, lowest degree first. Field
elements of GF(2^b) are ints in ``[0, 2^b)``; ``exp`` has doubled length so
``exp[log[a] + log[b]]`` never wraps.
"""
from __future__ import annotations

import numpy as np

from .._accel import njit
from ..algebra.kernels import popcount64


@njit
def gmul(a, b, exp, log):
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@njit
def ginv(a, exp, log, order):
    return exp[order - log[a]]


@njit
def rs_encode_sys(msg, gen, nsym, exp, log, out):
    """Systematic codeword: parity in positions [0, nsym), message above."""
    K = msg.shape[0]
    rem = np.zeros(nsym, dtype=np.int64)
    for i in range(K - 1, -1, -1):
        fb = msg[i] ^ rem[nsym - 1]
        for j in range(nsym - 1, 0, -1):
            rem[j] = rem[j - 1] ^ gmul(fb, gen[j], exp, log)
        rem[0] = gmul(fb, gen[0], exp, log)
    for j in range(nsym):
        out[j] = rem[j]
    for i in range(K):
        out[nsym + i] = msg[i]


@njit
def _poly_eval_log(p, lx, exp, log, order):
    """p(alpha^lx); terms are independent lookups rather than a Horner chain."""
    acc = 0
    e = 0
    for i in range(p.shape[0]):
        if p[i] != 0:
            acc ^= exp[log[p[i]] + e]
        e += lx
        if e >= order:
            e -= order
    return acc


@njit
def rs_errata_decode(sym, S, erasures, n_eras, N, nsym, exp, log, order, out, work):
    """Errors-and-erasures decoding of one RS word; returns False on failure.

    ``S[1..nsym]`` are the syndromes of ``sym`` at alpha^1..alpha^nsym;
    ``work`` is a scratch array of shape ``(5, nsym + 2)``.
    """
    s = n_eras
    if s > nsym:
        return False
    size = nsym + 2
    lam = work[0]
    B = work[1]
    xB = work[2]
    omega = work[3]
    dlam = work[4]
    for i in range(size):
        lam[i] = 0
    lam[0] = 1
    for e in range(s):
        xj = exp[erasures[e]]
        # lam *= (1 + xj x)
        for i in range(size - 1, 0, -1):
            lam[i] ^= gmul(lam[i - 1], xj, exp, log)
    for i in range(size):
        B[i] = lam[i]
    L = s
    for r in range(s + 1, nsym + 1):
        delta = 0
        for j in range(0, r):
            if lam[j] != 0:
                delta ^= gmul(lam[j], S[r - j], exp, log)
        xB[0] = 0
        for i in range(1, size):
            xB[i] = B[i - 1]
        if delta != 0:
            dinv = ginv(delta, exp, log, order)
            if 2 * L <= r + s - 1:
                for i in range(size):
                    B[i] = gmul(lam[i], dinv, exp, log)
                L = r + s - L
            else:
                for i in range(size):
                    B[i] = xB[i]
            for i in range(size):
                lam[i] ^= gmul(delta, xB[i], exp, log)
        else:
            for i in range(size):
                B[i] = xB[i]
    deg = 0
    for i in range(size):
        if lam[i] != 0:
            deg = i
    if deg != L or L > nsym:
        return False
    if L == 0:
        for j in range(N):
            out[j] = sym[j]
        return True
    # omega = S(x) lam(x) mod x^nsym
    for i in range(nsym):
        acc = 0
        for j in range(0, min(i, deg) + 1):
            acc ^= gmul(lam[j], S[i - j + 1], exp, log)
        omega[i] = acc
    for i in range(size):
        dlam[i] = 0
    for i in range(1, size, 2):
        dlam[i - 1] = lam[i]
    for j in range(N):
        out[j] = sym[j]
    roots = 0
    for j in range(N):
        lx = (order - j) % order
        if _poly_eval_log(lam, lx, exp, log, order) == 0:
            den = _poly_eval_log(dlam, lx, exp, log, order)
            if den == 0:
                return False
            y = gmul(_poly_eval_log(omega[:nsym], lx, exp, log, order), ginv(den, exp, log, order), exp, log)
            out[j] ^= y
            roots += 1
    return roots == L


@njit
def try_candidate(sym, S, eras, k, N, K, nsym, exp, log, order, cand, recode, work,
                  codebook, blocks, radius, pad_mask, gen):
    if k > nsym:
        return False
    if not rs_errata_decode(sym, S, eras, k, N, nsym, exp, log, order, cand, work):
        return False
    if cand[N - 1] & pad_mask:
        return False
    total = 0
    for i in range(N):
        total += np.int64(popcount64(codebook[cand[i]] ^ blocks[i]))
        if total > radius:
            return False
    # cand must be a genuine codeword: re-encode its message part
    rs_encode_sys(cand[nsym:], gen, nsym, exp, log, recode)
    for i in range(nsym):
        if recode[i] != cand[i]:
            return False
    return True


@njit
def decode_batch(Y, codebook, exp, log, gen, N, K, b, L_in, radius, msg_bits):
    """GMD decode every row of ``Y`` (0/1 uint8, length N * L_in).

    Returns ``(bits, ok)``; rows with ``ok == False`` had no codeword
    within ``radius``.
    """
    count = Y.shape[0]
    nsym = N - K
    order = (1 << b) - 1
    nsymb = 1 << b
    pad_mask = 0
    pad_bits = K * b - msg_bits
    if pad_bits > 0:
        pad_mask = ((1 << pad_bits) - 1) << (b - pad_bits)
    bits_out = np.zeros((count, msg_bits), dtype=np.uint8)
    ok = np.zeros(count, dtype=np.bool_)
    blocks = np.zeros(N, dtype=np.uint64)
    sym = np.zeros(N, dtype=np.int64)
    dist = np.zeros(N, dtype=np.int64)
    key = np.zeros(N, dtype=np.int64)
    S = np.zeros(nsym + 1, dtype=np.int64)
    cand = np.zeros(N, dtype=np.int64)
    recode = np.zeros(N, dtype=np.int64)
    eras = np.zeros(N, dtype=np.int64)
    work = np.zeros((5, nsym + 2), dtype=np.int64)
    half_d = (L_in + 1) // 4
    for row in range(count):
        for i in range(N):
            w = np.uint64(0)
            base = i * L_in
            for j in range(L_in):
                if Y[row, base + j]:
                    w |= np.uint64(1) << np.uint64(j)
            blocks[i] = w
            best = L_in + 1
            arg = 0
            for u in range(nsymb):
                d = np.int64(popcount64(codebook[u] ^ w))
                if d < best:
                    best = d
                    arg = u
            sym[i] = arg
            dist[i] = best
            # least reliable first; ties by position for determinism
            key[i] = (L_in + 1 - best) * N + i
        order_idx = np.argsort(key)
        for i in range(1, nsym + 1):
            S[i] = _poly_eval_log(sym, i, exp, log, order)
        # derandomised GMD: blocks at distance >= d/2 are always erased, exact
        # blocks never, and only cuts between distinct distances matter
        k_min = 0
        k_max = 0
        for i in range(N):
            if dist[i] >= half_d:
                k_min += 1
            if dist[i] > 0:
                k_max += 1
        if k_max > nsym:
            k_max = nsym
        for e in range(N):
            eras[e] = order_idx[e]
        k = k_min
        while k <= k_max:
            if k == k_min or k == N or dist[order_idx[k - 1]] != dist[order_idx[k]]:
                if try_candidate(sym, S, eras, k, N, K, nsym, exp, log, order, cand, recode,
                                 work, codebook, blocks, radius, pad_mask, gen):
                    for i in range(K):
                        v = recode[nsym + i]
                        for t in range(b):
                            pos = i * b + t
                            if pos < msg_bits:
                                bits_out[row, pos] = (v >> t) & 1
                    ok[row] = True
                    break
            k += 1
    return bits_out, ok
