"""Event-driven simulation kernels, one per policy.

Each kernel advances an exact piecewise-linear age trajectory (unit slope
between events, resets at deliveries), accumulates time integrals of the
monitor age and of the per-step busy-server counts, and attributes every
busy-second to the update that consumed it so effort can be classified by
the update's eventual fate.

Kernels are deterministic given their 32-bit seed: they seed the local
Mersenne-Twister stream on entry and consume draws in a fixed order.  They
are compiled with numba when available and fall back to plain Python
otherwise (slow, but identical arithmetic).

Shared accumulator layout (``out`` array):

==  =======================================================
 0  end time of the run
 1  measurement-window start time
 2  integral of monitor age over the window
 3  busy-seconds on step 1 (window)
 4  busy-seconds on step 2 (window)
 5  deliveries inside the window
 6  deliveries that strictly reduced the monitor age
 7   useful busy-seconds, step 1
 8   useful busy-seconds, step 2
 9   preempted-in-service busy-seconds, step 1
10   preempted-in-service busy-seconds, step 2
11   discarded-on-arrival busy-seconds, step 1
12   discarded-on-arrival busy-seconds, step 2 (always 0)
13   preempted-in-waiting busy-seconds, step 1
14   preempted-in-waiting busy-seconds, step 2 (always 0)
15   useless-parallel-delivery busy-seconds, step 1
16   useless-parallel-delivery busy-seconds, step 2
17  busy-seconds of updates still in flight at the end, step 1
18  busy-seconds in flight, step 2
19  unused (reserved)
20  total state transitions processed
21  number of log records emitted (may exceed capacity)
22  monitor age at the end of the run
==  =======================================================

Event-log kind codes: 0 generate, 1 step-1 done, 2 serve/step-2 start,
3 delivery, 4 preempted in service, 5 discarded on arrival, 6 preempted
in waiting, 7 step-1 update abandoned at a delivery reset.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


OUT_SIZE = 24

KIND_GENERATE = 0
KIND_STEP1_DONE = 1
KIND_SERVE_START = 2
KIND_DELIVERY = 3
KIND_PREEMPT_SERVICE = 4
KIND_DISCARD_ARRIVAL = 5
KIND_PREEMPT_WAITING = 6
KIND_ABANDON_STEP1 = 7

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, n,
          t, kind, server, update, step, x0b, x0a, age, s1, s2):
    cap = lt.shape[0]
    if 0 <= n < cap:
        lt[n] = t
        lk[n] = kind
        lsv[n] = server
        lu[n] = update
        lst[n] = step
        lxb[n] = x0b
        lxa[n] = x0a
        lag[n] = age
        ls1[n] = s1
        ls2[n] = s2
    return n + 1


@njit(**_JIT)
def mm1star_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                   out, bsums, bdurs, log_on,
                   lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0

    uid = 0  # server-1 in-flight update
    next_uid = 1
    s1_acc = 0.0
    t1 = np.random.exponential(sc1)
    serving = False
    t2 = np.inf
    g2 = 0.0
    sv_uid = -1
    sv_s1 = 0.0
    sv_s2 = 0.0

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    if log_on:
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)

    while dcount < target:
        events += 1.0
        tn = t1 if t1 <= t2 else t2
        dt = tn - t
        if win:
            out[2] += x0 * dt + 0.5 * dt * dt
            out[3] += dt
            if serving:
                out[4] += dt
                sv_s2 += dt
            s1_acc += dt
        x0 += dt
        t = tn

        if t1 <= t2:
            # server 1 hands a fresh update to server 2
            if serving:
                if win:
                    out[9] += sv_s1
                    out[10] += sv_s2
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_PREEMPT_SERVICE, 1, sv_uid, 2, x0, x0,
                                 t - g2, sv_s1, sv_s2)
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_STEP1_DONE, 0, uid, 1, x0, x0, 0.0, s1_acc, 0.0)
            serving = True
            g2 = t
            sv_uid = uid
            sv_s1 = s1_acc
            sv_s2 = 0.0
            s1_acc = 0.0
            uid = next_uid
            next_uid += 1
            t1 = t + np.random.exponential(sc1)
            t2 = t + np.random.exponential(sc2)
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_SERVE_START, 1, sv_uid, 2, x0, x0, 0.0, 0.0, 0.0)
        else:
            # server 2 delivers
            age = t - g2
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_DELIVERY, 1, sv_uid, 2, x0,
                             age if age < x0 else x0, age, sv_s1, sv_s2)
            if win:
                dcount += 1
                if age < x0:
                    out[6] += 1.0
                out[7] += sv_s1
                out[8] += sv_s2
                if age < x0:
                    x0 = age
                if dcount % batch_len == 0:
                    k = dcount // batch_len - 1
                    bsums[k] = out[2] - prev_int
                    bdurs[k] = t - prev_t
                    prev_int = out[2]
                    prev_t = t
            else:
                if age < x0:
                    x0 = age
                total_deliv += 1
                if total_deliv == warmup:
                    win = True
                    t_w0 = t
                    prev_t = t
                    prev_int = 0.0
                    s1_acc = 0.0
                    sv_s1 = 0.0
                    sv_s2 = 0.0
            serving = False
            t2 = np.inf

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    out[17] = s1_acc + (sv_s1 if serving else 0.0)
    out[18] = sv_s2 if serving else 0.0
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def mm11_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                out, bsums, bdurs, log_on,
                lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0

    uid = 0
    next_uid = 1
    gen1 = 0.0  # generation time of the server-1 in-flight update
    s1_acc = 0.0
    t1 = np.random.exponential(sc1)
    serving = False
    t2 = np.inf
    g2 = 0.0  # generation time of the in-service update
    sv_uid = -1
    sv_s1 = 0.0
    sv_s2 = 0.0

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    if log_on:
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)

    while dcount < target:
        events += 1.0
        tn = t1 if t1 <= t2 else t2
        dt = tn - t
        if win:
            out[2] += x0 * dt + 0.5 * dt * dt
            out[3] += dt
            if serving:
                out[4] += dt
                sv_s2 += dt
            s1_acc += dt
        x0 += dt
        t = tn

        if t1 <= t2:
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_STEP1_DONE, 0, uid, 1, x0, x0, t - gen1, s1_acc, 0.0)
            if serving:
                # server 2 busy: the fresh arrival is discarded
                if win:
                    out[11] += s1_acc
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_DISCARD_ARRIVAL, 1, uid, 1, x0, x0,
                                 t - gen1, s1_acc, 0.0)
            else:
                serving = True
                g2 = gen1
                sv_uid = uid
                sv_s1 = s1_acc
                sv_s2 = 0.0
                t2 = t + np.random.exponential(sc2)
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, 1, sv_uid, 2, x0, x0,
                                 t - g2, 0.0, 0.0)
            gen1 = t
            s1_acc = 0.0
            uid = next_uid
            next_uid += 1
            t1 = t + np.random.exponential(sc1)
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)
        else:
            age = t - g2
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_DELIVERY, 1, sv_uid, 2, x0,
                             age if age < x0 else x0, age, sv_s1, sv_s2)
            if win:
                dcount += 1
                if age < x0:
                    out[6] += 1.0
                out[7] += sv_s1
                out[8] += sv_s2
                if age < x0:
                    x0 = age
                if dcount % batch_len == 0:
                    k = dcount // batch_len - 1
                    bsums[k] = out[2] - prev_int
                    bdurs[k] = t - prev_t
                    prev_int = out[2]
                    prev_t = t
            else:
                if age < x0:
                    x0 = age
                total_deliv += 1
                if total_deliv == warmup:
                    win = True
                    t_w0 = t
                    prev_t = t
                    prev_int = 0.0
                    s1_acc = 0.0
                    sv_s1 = 0.0
                    sv_s2 = 0.0
            serving = False
            t2 = np.inf

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    out[17] = s1_acc + (sv_s1 if serving else 0.0)
    out[18] = sv_s2 if serving else 0.0
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def mm12star_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                    out, bsums, bdurs, log_on,
                    lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0

    uid = 0
    next_uid = 1
    gen1 = 0.0
    s1_acc = 0.0
    t1 = np.random.exponential(sc1)
    serving = False
    t2 = np.inf
    g2 = 0.0
    sv_uid = -1
    sv_s1 = 0.0
    sv_s2 = 0.0
    waiting = False
    w_gen = 0.0
    w_s1 = 0.0
    w_uid = -1

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    if log_on:
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)

    while dcount < target:
        events += 1.0
        tn = t1 if t1 <= t2 else t2
        dt = tn - t
        if win:
            out[2] += x0 * dt + 0.5 * dt * dt
            out[3] += dt
            if serving:
                out[4] += dt
                sv_s2 += dt
            s1_acc += dt
        x0 += dt
        t = tn

        if t1 <= t2:
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_STEP1_DONE, 0, uid, 1, x0, x0, t - gen1, s1_acc, 0.0)
            if not serving:
                serving = True
                g2 = gen1
                sv_uid = uid
                sv_s1 = s1_acc
                sv_s2 = 0.0
                t2 = t + np.random.exponential(sc2)
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, 1, sv_uid, 2, x0, x0,
                                 t - g2, 0.0, 0.0)
            else:
                if waiting:
                    # fresh arrival displaces the queued update
                    if win:
                        out[13] += w_s1
                    if log_on:
                        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                     t, KIND_PREEMPT_WAITING, 1, w_uid, 1, x0, x0,
                                     t - w_gen, w_s1, 0.0)
                waiting = True
                w_gen = gen1
                w_s1 = s1_acc
                w_uid = uid
            gen1 = t
            s1_acc = 0.0
            uid = next_uid
            next_uid += 1
            t1 = t + np.random.exponential(sc1)
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)
        else:
            age = t - g2
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_DELIVERY, 1, sv_uid, 2, x0,
                             age if age < x0 else x0, age, sv_s1, sv_s2)
            if win:
                dcount += 1
                if age < x0:
                    out[6] += 1.0
                out[7] += sv_s1
                out[8] += sv_s2
                if age < x0:
                    x0 = age
                if dcount % batch_len == 0:
                    k = dcount // batch_len - 1
                    bsums[k] = out[2] - prev_int
                    bdurs[k] = t - prev_t
                    prev_int = out[2]
                    prev_t = t
            else:
                if age < x0:
                    x0 = age
                total_deliv += 1
                if total_deliv == warmup:
                    win = True
                    t_w0 = t
                    prev_t = t
                    prev_int = 0.0
                    s1_acc = 0.0
                    sv_s1 = 0.0
                    sv_s2 = 0.0
                    w_s1 = 0.0
            if waiting:
                serving = True
                g2 = w_gen
                sv_uid = w_uid
                sv_s1 = w_s1
                sv_s2 = 0.0
                waiting = False
                t2 = t + np.random.exponential(sc2)
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, 1, sv_uid, 2, x0, x0,
                                 t - g2, 0.0, 0.0)
            else:
                serving = False
                t2 = np.inf

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    pend1 = s1_acc
    pend2 = 0.0
    if serving:
        pend1 += sv_s1
        pend2 += sv_s2
    if waiting:
        pend1 += w_s1
    out[17] = pend1
    out[18] = pend2
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def sss_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
               out, bsums, bdurs, log_on,
               lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0
    next_uid = 0

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    while dcount < target:
        events += 1.0
        uid = next_uid
        next_uid += 1
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t, KIND_GENERATE, 0, uid, 1, x0, x0, 0.0, 0.0, 0.0)
        d1 = np.random.exponential(sc1)
        d2 = np.random.exponential(sc2)
        dur = d1 + d2
        if win:
            out[2] += x0 * dur + 0.5 * dur * dur
            out[3] += d1
            out[4] += d2
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t + d1, KIND_STEP1_DONE, 0, uid, 1, x0 + d1, x0 + d1,
                         d1, d1, 0.0)
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t + d1, KIND_SERVE_START, 1, uid, 2, x0 + d1, x0 + d1,
                         d1, 0.0, 0.0)
        t += dur
        x0 += dur
        age = dur
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t, KIND_DELIVERY, 1, uid, 2, x0,
                         age if age < x0 else x0, age, d1, d2)
        if win:
            dcount += 1
            if age < x0:
                out[6] += 1.0
            out[7] += d1
            out[8] += d2
            if age < x0:
                x0 = age
            if dcount % batch_len == 0:
                k = dcount // batch_len - 1
                bsums[k] = out[2] - prev_int
                bdurs[k] = t - prev_t
                prev_int = out[2]
                prev_t = t
        else:
            if age < x0:
                x0 = age
            total_deliv += 1
            if total_deliv == warmup:
                win = True
                t_w0 = t
                prev_t = t
                prev_int = 0.0

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def psiu_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                out, bsums, bdurs, log_on,
                lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / (2.0 * mu1)
    sc2 = 1.0 / (2.0 * mu2)
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0
    next_uid = 0

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    while dcount < target:
        events += 1.0
        uid = next_uid
        next_uid += 1
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t, KIND_GENERATE, -1, uid, 1, x0, x0, 0.0, 0.0, 0.0)
        d1 = np.random.exponential(sc1)
        d2 = np.random.exponential(sc2)
        dur = d1 + d2
        if win:
            out[2] += x0 * dur + 0.5 * dur * dur
            out[3] += 2.0 * d1
            out[4] += 2.0 * d2
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t + d1, KIND_STEP1_DONE, -1, uid, 1, x0 + d1, x0 + d1,
                         d1, 2.0 * d1, 0.0)
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t + d1, KIND_SERVE_START, -1, uid, 2, x0 + d1, x0 + d1,
                         d1, 0.0, 0.0)
        t += dur
        x0 += dur
        age = dur
        if log_on:
            nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                         t, KIND_DELIVERY, -1, uid, 2, x0,
                         age if age < x0 else x0, age, 2.0 * d1, 2.0 * d2)
        if win:
            dcount += 1
            if age < x0:
                out[6] += 1.0
            out[7] += 2.0 * d1
            out[8] += 2.0 * d2
            if age < x0:
                x0 = age
            if dcount % batch_len == 0:
                k = dcount // batch_len - 1
                bsums[k] = out[2] - prev_int
                bdurs[k] = t - prev_t
                prev_int = out[2]
                prev_t = t
        else:
            if age < x0:
                x0 = age
            total_deliv += 1
            if total_deliv == warmup:
                win = True
                t_w0 = t
                prev_t = t
                prev_int = 0.0

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def pcaf_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                out, bsums, bdurs, log_on,
                lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc_pair = 1.0 / (2.0 * mu1)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0

    # state 1: both servers run step 1 of update u1
    # state 2: u2 in step 2 on one server, u1 in step 1 on the other
    state = 1
    u1_uid = 0
    next_uid = 1
    g1 = 0.0
    u1_s1 = 0.0
    u2_uid = -1
    g2 = 0.0
    u2_s1 = 0.0
    u2_s2 = 0.0

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    if log_on:
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, -1, u1_uid, 1, x0, x0, 0.0, 0.0, 0.0)

    while dcount < target:
        events += 1.0
        if state == 1:
            d = np.random.exponential(sc_pair)
            if win:
                out[2] += x0 * d + 0.5 * d * d
                out[3] += 2.0 * d
                u1_s1 += 2.0 * d
            x0 += d
            t += d
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_STEP1_DONE, -1, u1_uid, 1, x0, x0,
                             t - g1, u1_s1, 0.0)
            u2_uid = u1_uid
            g2 = g1
            u2_s1 = u1_s1
            u2_s2 = 0.0
            u1_uid = next_uid
            next_uid += 1
            g1 = t
            u1_s1 = 0.0
            state = 2
            if log_on:
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_SERVE_START, -1, u2_uid, 2, x0, x0,
                             t - g2, 0.0, 0.0)
                nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                             t, KIND_GENERATE, -1, u1_uid, 1, x0, x0, 0.0, 0.0, 0.0)
        else:
            e1 = np.random.exponential(sc1)
            e2 = np.random.exponential(sc2)
            d = e1 if e1 <= e2 else e2
            if win:
                out[2] += x0 * d + 0.5 * d * d
                out[3] += d
                out[4] += d
                u1_s1 += d
                u2_s2 += d
            x0 += d
            t += d
            if e1 <= e2:
                # step-1 server finishes first: the step-2 update is aborted
                if win:
                    out[9] += u2_s1
                    out[10] += u2_s2
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_PREEMPT_SERVICE, -1, u2_uid, 2, x0, x0,
                                 t - g2, u2_s1, u2_s2)
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_STEP1_DONE, -1, u1_uid, 1, x0, x0,
                                 t - g1, u1_s1, 0.0)
                u2_uid = u1_uid
                g2 = g1
                u2_s1 = u1_s1
                u2_s2 = 0.0
                u1_uid = next_uid
                next_uid += 1
                g1 = t
                u1_s1 = 0.0
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, -1, u2_uid, 2, x0, x0,
                                 t - g2, 0.0, 0.0)
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_GENERATE, -1, u1_uid, 1, x0, x0, 0.0, 0.0, 0.0)
            else:
                # delivery; the in-progress step-1 update is abandoned
                age = t - g2
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_DELIVERY, -1, u2_uid, 2, x0,
                                 age if age < x0 else x0, age, u2_s1, u2_s2)
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_ABANDON_STEP1, -1, u1_uid, 1, x0, x0,
                                 t - g1, u1_s1, 0.0)
                if win:
                    dcount += 1
                    if age < x0:
                        out[6] += 1.0
                    out[7] += u2_s1
                    out[8] += u2_s2
                    out[9] += u1_s1
                    if age < x0:
                        x0 = age
                    if dcount % batch_len == 0:
                        k = dcount // batch_len - 1
                        bsums[k] = out[2] - prev_int
                        bdurs[k] = t - prev_t
                        prev_int = out[2]
                        prev_t = t
                else:
                    if age < x0:
                        x0 = age
                    total_deliv += 1
                    if total_deliv == warmup:
                        win = True
                        t_w0 = t
                        prev_t = t
                        prev_int = 0.0
                u1_uid = next_uid
                next_uid += 1
                g1 = t
                u1_s1 = 0.0
                state = 1
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_GENERATE, -1, u1_uid, 1, x0, x0, 0.0, 0.0, 0.0)

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    pend1 = u1_s1
    pend2 = 0.0
    if state == 2:
        pend1 += u2_s1
        pend2 += u2_s2
    out[17] = pend1
    out[18] = pend2
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


@njit(**_JIT)
def psss_kernel(seed, mu1, mu2, warmup, batch_len, n_batches,
                out, bsums, bdurs, log_on,
                lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2):
    np.random.seed(seed)
    sc1 = 1.0 / mu1
    sc2 = 1.0 / mu2
    target = batch_len * n_batches

    t = 0.0
    x0 = 0.0
    win = warmup == 0
    t_w0 = 0.0
    nlog = 0
    next_uid = 2

    # per-server state; server 0 wins ties
    ph_a = 1
    ph_b = 1
    g_a = 0.0
    g_b = 0.0
    uid_a = 0
    uid_b = 1
    s1_a = 0.0
    s1_b = 0.0
    s2_a = 0.0
    s2_b = 0.0
    if log_on:
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, 0, uid_a, 1, x0, x0, 0.0, 0.0, 0.0)
        nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                     0.0, KIND_GENERATE, 1, uid_b, 1, x0, x0, 0.0, 0.0, 0.0)
    tc_a = np.random.exponential(sc1)
    tc_b = np.random.exponential(sc1)

    total_deliv = 0
    dcount = 0
    prev_int = 0.0
    prev_t = 0.0
    events = 0.0

    while dcount < target:
        events += 1.0
        is_a = tc_a <= tc_b
        tn = tc_a if is_a else tc_b
        dt = tn - t
        if win:
            out[2] += x0 * dt + 0.5 * dt * dt
            n1 = (1.0 if ph_a == 1 else 0.0) + (1.0 if ph_b == 1 else 0.0)
            out[3] += n1 * dt
            out[4] += (2.0 - n1) * dt
            if ph_a == 1:
                s1_a += dt
            else:
                s2_a += dt
            if ph_b == 1:
                s1_b += dt
            else:
                s2_b += dt
        x0 += dt
        t = tn

        if is_a:
            if ph_a == 1:
                ph_a = 2
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_STEP1_DONE, 0, uid_a, 1, x0, x0,
                                 t - g_a, s1_a, 0.0)
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, 0, uid_a, 2, x0, x0,
                                 t - g_a, 0.0, 0.0)
                tc_a = t + np.random.exponential(sc2)
            else:
                age = t - g_a
                useful = age < x0
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_DELIVERY, 0, uid_a, 2, x0,
                                 age if useful else x0, age, s1_a, s2_a)
                if win:
                    dcount += 1
                    if useful:
                        out[6] += 1.0
                        out[7] += s1_a
                        out[8] += s2_a
                        x0 = age
                    else:
                        out[15] += s1_a
                        out[16] += s2_a
                    if dcount % batch_len == 0:
                        k = dcount // batch_len - 1
                        bsums[k] = out[2] - prev_int
                        bdurs[k] = t - prev_t
                        prev_int = out[2]
                        prev_t = t
                else:
                    if useful:
                        x0 = age
                    total_deliv += 1
                    if total_deliv == warmup:
                        win = True
                        t_w0 = t
                        prev_t = t
                        prev_int = 0.0
                        s1_a = 0.0
                        s2_a = 0.0
                        s1_b = 0.0
                        s2_b = 0.0
                ph_a = 1
                g_a = t
                uid_a = next_uid
                next_uid += 1
                s1_a = 0.0
                s2_a = 0.0
                tc_a = t + np.random.exponential(sc1)
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_GENERATE, 0, uid_a, 1, x0, x0, 0.0, 0.0, 0.0)
        else:
            if ph_b == 1:
                ph_b = 2
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_STEP1_DONE, 1, uid_b, 1, x0, x0,
                                 t - g_b, s1_b, 0.0)
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_SERVE_START, 1, uid_b, 2, x0, x0,
                                 t - g_b, 0.0, 0.0)
                tc_b = t + np.random.exponential(sc2)
            else:
                age = t - g_b
                useful = age < x0
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_DELIVERY, 1, uid_b, 2, x0,
                                 age if useful else x0, age, s1_b, s2_b)
                if win:
                    dcount += 1
                    if useful:
                        out[6] += 1.0
                        out[7] += s1_b
                        out[8] += s2_b
                        x0 = age
                    else:
                        out[15] += s1_b
                        out[16] += s2_b
                    if dcount % batch_len == 0:
                        k = dcount // batch_len - 1
                        bsums[k] = out[2] - prev_int
                        bdurs[k] = t - prev_t
                        prev_int = out[2]
                        prev_t = t
                else:
                    if useful:
                        x0 = age
                    total_deliv += 1
                    if total_deliv == warmup:
                        win = True
                        t_w0 = t
                        prev_t = t
                        prev_int = 0.0
                        s1_a = 0.0
                        s2_a = 0.0
                        s1_b = 0.0
                        s2_b = 0.0
                ph_b = 1
                g_b = t
                uid_b = next_uid
                next_uid += 1
                s1_b = 0.0
                s2_b = 0.0
                tc_b = t + np.random.exponential(sc1)
                if log_on:
                    nlog = _emit(lt, lk, lsv, lu, lst, lxb, lxa, lag, ls1, ls2, nlog,
                                 t, KIND_GENERATE, 1, uid_b, 1, x0, x0, 0.0, 0.0, 0.0)

    out[0] = t
    out[1] = t_w0
    out[5] = float(dcount)
    out[17] = s1_a + s1_b
    out[18] = s2_a + s2_b
    out[20] = events
    out[21] = float(nlog)
    out[22] = x0


KERNELS = {
    "mm1star": mm1star_kernel,
    "mm12star": mm12star_kernel,
    "mm11": mm11_kernel,
    "sss": sss_kernel,
    "psss": psss_kernel,
    "pcaf": pcaf_kernel,
    "psiu": psiu_kernel,
}
