"""Online fixed-lag smoothing of 1-D trajectories.

Each smoothed value minimizes, over a sliding window of recent samples,

    J(x) = sum_t w_t (x_t - raw_t)^2
         + lam1 * sum |D1 x| + lam2 * sum |D2 x| + lam3 * sum |D3 x|

where D1..D3 are first/second/third finite differences.  The L1 penalties
drive runs of the derivatives to exactly zero, so the minimizer is built from
static, constant-velocity and constant-acceleration segments.  The window is
[previously emitted values || pending raw samples]; emitted values act as
anchors with ANCHOR_WEIGHT times the data weight, which keeps the already
published trajectory effectively frozen.

Solver: writing each L1 term as max over a multiplier nu_i in [-lam_i, lam_i]
of nu_i * (D_i x), the dual is a box-constrained concave quadratic with the
closed-form primal recovery x = r - (2W)^-1 D' nu.  Scalar coordinate ascent
zigzags on the coupled interior coordinates and joint Newton steps hit the
rank deficiency across difference orders, so the solver maximizes exactly
over one difference order at a time: within an order the rows are linearly
independent and only overlap within three positions, giving a strictly
concave block whose box-constrained maximum is found by a small active-set
loop of banded Newton solves with exact line steps.  Cycling the three blocks
plus a scalar sweep is monotone ascent; the duality gap J(x) - g(nu)
certifies convergence and iteration stops once it falls below GAP_TOL (far
tighter than the 1e-6 objective tolerance this module promises).  The dual is
warm-started across pushes by shifting the previous window's multipliers.
"""
from __future__ import annotations

import numpy as np
from numba import njit, prange

ANCHOR_WEIGHT = 10.0
GAP_TOL = 1e-8
MAX_ROUNDS = 400

# Newton band halfwidth: interior rows sorted by start position overlap only
# within 3 positions, i.e. at most 11 rows apart.
_BW = 12


@njit(cache=True, inline="always")
def _row_of(i, m1, m2):
    """Coefficients of difference row i: (start, c0, c1, c2, c3, length)."""
    if i < m1:
        return i, -1.0, 1.0, 0.0, 0.0, 2
    if i < m1 + m2:
        return i - m1, 1.0, -2.0, 1.0, 0.0, 3
    return i - m1 - m2, -1.0, 3.0, -3.0, 1.0, 4


@njit(cache=True)
def _cd_sweep(x, nu, iw, h1, h2, h3, lam1, lam2, lam3, m1, m2, m3):
    """One cycle of exact coordinate ascent over all multipliers."""
    for i in range(m1):
        g = x[i + 1] - x[i]
        v = nu[i] + g / h1[i]
        if v > lam1:
            v = lam1
        elif v < -lam1:
            v = -lam1
        dv = v - nu[i]
        if dv != 0.0:
            nu[i] = v
            x[i] += iw[i] * dv
            x[i + 1] -= iw[i + 1] * dv
    for i in range(m2):
        g = x[i + 2] - 2.0 * x[i + 1] + x[i]
        v = nu[m1 + i] + g / h2[i]
        if v > lam2:
            v = lam2
        elif v < -lam2:
            v = -lam2
        dv = v - nu[m1 + i]
        if dv != 0.0:
            nu[m1 + i] = v
            x[i] -= iw[i] * dv
            x[i + 1] += 2.0 * iw[i + 1] * dv
            x[i + 2] -= iw[i + 2] * dv
    for i in range(m3):
        g = x[i + 3] - 3.0 * x[i + 2] + 3.0 * x[i + 1] - x[i]
        v = nu[m1 + m2 + i] + g / h3[i]
        if v > lam3:
            v = lam3
        elif v < -lam3:
            v = -lam3
        dv = v - nu[m1 + m2 + i]
        if dv != 0.0:
            nu[m1 + m2 + i] = v
            x[i] += iw[i] * dv
            x[i + 1] -= 3.0 * iw[i + 1] * dv
            x[i + 2] += 3.0 * iw[i + 2] * dv
            x[i + 3] -= iw[i + 3] * dv


@njit(cache=True)
def _gap(x, r, w, lam1, lam2, lam3, n, m1, m2, m3):
    """Duality gap and a magnitude reference for its rounding noise.

    With e = r - x:  J(x) = e'W e + sum lam|Dx|,  g(nu) = 2 e'W r - e'W e,
    so gap = sum lam|Dx| + 2 e'W (e - r).
    """
    gap = 0.0
    for i in range(m1):
        gap += lam1 * abs(x[i + 1] - x[i])
    for i in range(m2):
        gap += lam2 * abs(x[i + 2] - 2.0 * x[i + 1] + x[i])
    for i in range(m3):
        gap += lam3 * abs(x[i + 3] - 3.0 * x[i + 2] + 3.0 * x[i + 1] - x[i])
    mag = gap
    for i in range(n):
        e = r[i] - x[i]
        t = 2.0 * w[i] * e * (e - r[i])
        gap += t
        mag += abs(t)
    return gap, mag


@njit(cache=True)
def _block_max(x, nu, iw, lam_k, off, mk, coef, ln, free, gtol, idx, grad, Sb):
    """Maximize the dual exactly over one difference order's multipliers.

    Rows within an order are linearly independent and overlap only within
    three start positions, so the block is strictly concave and each Newton
    system is a nonsingular banded SPD solve (bandwidth 3 among the free
    rows).  Active-set loop: Newton with an exact line step to the first
    bound; at a full step, bound rows whose gradient points inward (beyond
    gtol) are freed.  Strict ascent per pass, so it terminates.
    """
    if mk == 0 or lam_k <= 0.0:
        return
    for i in range(mk):
        free[i] = abs(nu[off + i]) < lam_k
    for _pass in range(3 * mk + 10):
        nf = 0
        for i in range(mk):
            if free[i]:
                idx[nf] = i
                nf += 1
        theta = 1.0
        if nf > 0:
            for a in range(nf):
                st = idx[a]
                g = 0.0
                for q in range(ln):
                    g += coef[q] * x[st + q]
                grad[a] = g
                for k in range(4):
                    Sb[k, a] = 0.0
                for b in range(a, min(nf, a + 4)):
                    sb = idx[b]
                    if sb > st + ln - 1:
                        break
                    acc = 0.0
                    for p in range(sb, st + ln):
                        acc += coef[p - st] * coef[p - sb] * iw[p]
                    Sb[b - a, a] = acc
                Sb[0, a] += 1e-12
            ok = True
            for j in range(nf):
                s = Sb[0, j]
                for k in range(max(0, j - 3), j):
                    v = Sb[j - k, k]
                    s -= v * v
                if s <= 0.0:
                    ok = False
                    break
                Sb[0, j] = np.sqrt(s)
                for i2 in range(j + 1, min(nf, j + 4)):
                    s = Sb[i2 - j, j]
                    for k in range(max(0, i2 - 3), j):
                        if i2 - k <= 3:
                            s -= Sb[i2 - k, k] * Sb[j - k, k]
                    Sb[i2 - j, j] = s / Sb[0, j]
            if not ok:
                return
            for i2 in range(nf):
                s = grad[i2]
                for k in range(max(0, i2 - 3), i2):
                    s -= Sb[i2 - k, k] * grad[k]
                grad[i2] = s / Sb[0, i2]
            for i2 in range(nf - 1, -1, -1):
                s = grad[i2]
                for k in range(i2 + 1, min(nf, i2 + 4)):
                    s -= Sb[k - i2, i2] * grad[k]
                grad[i2] = s / Sb[0, i2]
            for a in range(nf):
                dv = grad[a]
                if dv == 0.0:
                    continue
                v = nu[off + idx[a]]
                t = (lam_k - v) / dv if dv > 0.0 else (-lam_k - v) / dv
                if t < theta:
                    theta = t
            if theta > 0.0:
                for a in range(nf):
                    dv = theta * grad[a]
                    if dv == 0.0:
                        continue
                    i = idx[a]
                    v = nu[off + i] + dv
                    if v >= lam_k:
                        v = lam_k
                        free[i] = False
                    elif v <= -lam_k:
                        v = -lam_k
                        free[i] = False
                    dvc = v - nu[off + i]
                    nu[off + i] = v
                    for q in range(ln):
                        x[i + q] -= coef[q] * iw[i + q] * dvc
        if theta >= 1.0 or nf == 0:
            released = False
            for i in range(mk):
                if free[i]:
                    continue
                g = 0.0
                for q in range(ln):
                    g += coef[q] * x[i + q]
                v = nu[off + i]
                if (v >= lam_k and g < -gtol) or (v <= -lam_k and g > gtol):
                    free[i] = True
                    released = True
            if not released:
                return


@njit(cache=True)
def _joint_newton(x, nu, iw, lam, m1, m2, m3, st_a, ln_a, cf_a, id_a, Sb, grad):
    """One damped Newton ascent step over all interior multipliers jointly.

    Rows from different orders are linearly dependent, so the system is
    regularized fairly strongly (the bias only hits directions that barely
    move x) and near-bound multipliers are snapped onto their bound first so
    that rounding noise in the step cannot produce microscopic line steps.
    Returns True when the step was not blocked by a bound.
    """
    m = m1 + m2 + m3
    for i in range(m):
        lim = lam[i]
        snap = 1e-7 * lim
        near_hi = nu[i] < lim and lim - nu[i] <= snap
        near_lo = nu[i] > -lim and nu[i] + lim <= snap
        if not (near_hi or near_lo):
            continue
        # only park rows whose gradient points outward; rows pulling away
        # from the bound are genuinely leaving and must stay free
        st, c0, c1, c2, c3, ln = _row_of(i, m1, m2)
        g = c0 * x[st] + c1 * x[st + 1]
        if ln >= 3:
            g += c2 * x[st + 2]
        if ln == 4:
            g += c3 * x[st + 3]
        if near_hi and g >= 0.0:
            dvc = lim - nu[i]
            nu[i] = lim
        elif near_lo and g <= 0.0:
            dvc = -lim - nu[i]
            nu[i] = -lim
        else:
            continue
        x[st] -= c0 * iw[st] * dvc
        x[st + 1] -= c1 * iw[st + 1] * dvc
        if ln >= 3:
            x[st + 2] -= c2 * iw[st + 2] * dvc
        if ln == 4:
            x[st + 3] -= c3 * iw[st + 3] * dvc
    ni = 0
    for i in range(m):
        if lam[i] > 0.0 and abs(nu[i]) < lam[i]:
            ni += 1
    if ni == 0:
        return True
    a = 0
    for st in range(m1):
        if abs(nu[st]) < lam[st]:
            st_a[a] = st; ln_a[a] = 2
            cf_a[a, 0] = -1.0; cf_a[a, 1] = 1.0; cf_a[a, 2] = 0.0; cf_a[a, 3] = 0.0
            id_a[a] = st; a += 1
        i2 = m1 + st
        if st < m2 and abs(nu[i2]) < lam[i2]:
            st_a[a] = st; ln_a[a] = 3
            cf_a[a, 0] = 1.0; cf_a[a, 1] = -2.0; cf_a[a, 2] = 1.0; cf_a[a, 3] = 0.0
            id_a[a] = i2; a += 1
        i3 = m1 + m2 + st
        if st < m3 and abs(nu[i3]) < lam[i3]:
            st_a[a] = st; ln_a[a] = 4
            cf_a[a, 0] = -1.0; cf_a[a, 1] = 3.0; cf_a[a, 2] = -3.0; cf_a[a, 3] = 1.0
            id_a[a] = i3; a += 1
    bw = 1
    for aj in range(ni):
        for k in range(_BW + 1):
            Sb[k, aj] = 0.0
        sj = st_a[aj]
        lj = ln_a[aj]
        acc = 0.0
        for q in range(lj):
            acc += cf_a[aj, q] * x[sj + q]
        grad[aj] = acc
        for ai in range(aj, min(ni, aj + _BW + 1)):
            si = st_a[ai]
            if si > sj + lj - 1:
                break
            acc = 0.0
            hi = min(si + ln_a[ai] - 1, sj + lj - 1)
            for p in range(max(si, sj), hi + 1):
                acc += cf_a[ai, p - si] * cf_a[aj, p - sj] * iw[p]
            Sb[ai - aj, aj] = acc
            if ai - aj > bw:
                bw = ai - aj
        Sb[0, aj] += 1e-6
    for j in range(ni):
        s = Sb[0, j]
        for k in range(max(0, j - bw), j):
            v = Sb[j - k, k]
            s -= v * v
        if s <= 0.0:
            return True
        Sb[0, j] = np.sqrt(s)
        for i2 in range(j + 1, min(ni, j + bw + 1)):
            s = Sb[i2 - j, j]
            for k in range(max(0, i2 - bw), j):
                s -= Sb[i2 - k, k] * Sb[j - k, k]
            Sb[i2 - j, j] = s / Sb[0, j]
    for i in range(ni):
        s = grad[i]
        for k in range(max(0, i - bw), i):
            s -= Sb[i - k, k] * grad[k]
        grad[i] = s / Sb[0, i]
    for i in range(ni - 1, -1, -1):
        s = grad[i]
        for k in range(i + 1, min(ni, i + bw + 1)):
            s -= Sb[k - i, i] * grad[k]
        grad[i] = s / Sb[0, i]
    theta = 1.0
    for a in range(ni):
        dv = grad[a]
        if dv == 0.0:
            continue
        i = id_a[a]
        lim = lam[i]
        t = (lim - nu[i]) / dv if dv > 0.0 else (-lim - nu[i]) / dv
        if t < theta:
            theta = t
    if theta <= 0.0:
        return True
    for a in range(ni):
        dv = theta * grad[a]
        if dv == 0.0:
            continue
        i = id_a[a]
        v = nu[i] + dv
        lim = lam[i]
        if v > lim:
            v = lim
        elif v < -lim:
            v = -lim
        dvc = v - nu[i]
        nu[i] = v
        sj = st_a[a]
        for q in range(ln_a[a]):
            x[sj + q] -= cf_a[a, q] * iw[sj + q] * dvc
    return theta >= 1.0


@njit(cache=True)
def _recover_x(x, r, nu, iw, m1, m2, m3):
    """x = r - (2W)^-1 D' nu, computed fresh to drop incremental drift."""
    n = r.shape[0]
    for i in range(n):
        x[i] = 0.0
    for i in range(m1):
        v = nu[i]
        x[i] -= v
        x[i + 1] += v
    for i in range(m2):
        v = nu[m1 + i]
        x[i] += v
        x[i + 1] -= 2.0 * v
        x[i + 2] += v
    for i in range(m3):
        v = nu[m1 + m2 + i]
        x[i] -= v
        x[i + 1] += 3.0 * v
        x[i + 2] -= 3.0 * v
        x[i + 3] += v
    for i in range(n):
        x[i] = r[i] - iw[i] * x[i]


@njit(cache=True)
def _dual_solve(r0, w, lam1, lam2, lam3, nu, x, max_rounds, gap_tol):
    """Hybrid coordinate/Newton ascent on the dual; returns rounds used.

    Works on a mean-centered copy of the targets: the objective only sees
    x - r and differences of x, so centering is exact in real arithmetic and
    keeps the duality gap far above its rounding floor.
    """
    n = r0.shape[0]
    m1 = max(0, n - 1)
    m2 = max(0, n - 2)
    m3 = max(0, n - 3)
    m = m1 + m2 + m3

    c = 0.0
    for i in range(n):
        c += r0[i]
    c /= n
    r = np.empty(n)
    for i in range(n):
        r[i] = r0[i] - c

    iw = np.empty(n)
    for i in range(n):
        iw[i] = 0.5 / w[i]
    lam = np.empty(max(m, 1))
    for i in range(m):
        lam[i] = lam1 if i < m1 else (lam2 if i < m1 + m2 else lam3)
    for i in range(m):
        lim = lam[i]
        if nu[i] > lim:
            nu[i] = lim
        elif nu[i] < -lim:
            nu[i] = -lim
    _recover_x(x, r, nu, iw, m1, m2, m3)
    if m == 0:
        for i in range(n):
            x[i] += c
        return 0

    h1 = np.empty(max(m1, 1))
    for i in range(m1):
        h1[i] = iw[i] + iw[i + 1]
    h2 = np.empty(max(m2, 1))
    for i in range(m2):
        h2[i] = iw[i] + 4.0 * iw[i + 1] + iw[i + 2]
    h3 = np.empty(max(m3, 1))
    for i in range(m3):
        h3[i] = iw[i] + 9.0 * iw[i + 1] + 9.0 * iw[i + 2] + iw[i + 3]

    coef1 = np.empty(4)
    coef1[0] = -1.0; coef1[1] = 1.0; coef1[2] = 0.0; coef1[3] = 0.0
    coef2 = np.empty(4)
    coef2[0] = 1.0; coef2[1] = -2.0; coef2[2] = 1.0; coef2[3] = 0.0
    coef3 = np.empty(4)
    coef3[0] = -1.0; coef3[1] = 3.0; coef3[2] = -3.0; coef3[3] = 1.0
    free = np.empty(max(m1, 1), np.bool_)
    blk_idx = np.empty(max(m1, 1), np.int64)
    blk_grad = np.empty(max(m1, 1))
    blk_Sb = np.empty((4, max(m1, 1)))
    jt_st = np.empty(max(m, 1), np.int64)
    jt_ln = np.empty(max(m, 1), np.int64)
    jt_id = np.empty(max(m, 1), np.int64)
    jt_cf = np.empty((max(m, 1), 4))
    jt_Sb = np.empty((_BW + 1, max(m, 1)))
    jt_grad = np.empty(max(m, 1))
    scale = 1.0
    for i in range(n):
        if abs(r[i]) > scale:
            scale = abs(r[i])
    gtol = 3e-7 + 1e-13 * scale

    prev_gap = 1.0e300
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        _cd_sweep(x, nu, iw, h1, h2, h3, lam1, lam2, lam3, m1, m2, m3)
        _block_max(x, nu, iw, lam1, 0, m1, coef1, 2, free, gtol, blk_idx, blk_grad, blk_Sb)
        _block_max(x, nu, iw, lam2, m1, m2, coef2, 3, free, gtol, blk_idx, blk_grad, blk_Sb)
        _block_max(x, nu, iw, lam3, m1 + m2, m3, coef3, 4, free, gtol, blk_idx, blk_grad, blk_Sb)
        _recover_x(x, r, nu, iw, m1, m2, m3)
        gap, mag = _gap(x, r, w, lam1, lam2, lam3, n, m1, m2, m3)
        if gap <= gap_tol + 1e-13 * mag:
            break
        if gap > 0.2 * prev_gap:
            # cross-order coupling makes pure block cycling zigzag; joint
            # damped Newton over all interior multipliers breaks it
            for _inner in range(40):
                if _joint_newton(x, nu, iw, lam, m1, m2, m3, jt_st, jt_ln, jt_cf, jt_id, jt_Sb, jt_grad):
                    break
            _recover_x(x, r, nu, iw, m1, m2, m3)
            gap, mag = _gap(x, r, w, lam1, lam2, lam3, n, m1, m2, m3)
            if gap <= gap_tol + 1e-13 * mag:
                break
        prev_gap = gap
    for i in range(n):
        x[i] += c
    return rounds


@njit(cache=True)
def _solve_window_jit(r, w, lam1, lam2, lam3, nu):
    x = np.empty(r.shape[0])
    rounds = _dual_solve(r, w, lam1, lam2, lam3, nu, x, MAX_ROUNDS, GAP_TOL)
    return x, rounds


@njit(cache=True)
def _solve_bank_jit(r_all, w, lam1, lam2, lam3, nu_all):
    x_all = np.empty_like(r_all)
    for b in range(r_all.shape[0]):
        _dual_solve(r_all[b], w, lam1, lam2, lam3, nu_all[b], x_all[b], MAX_ROUNDS, GAP_TOL)
    return x_all


@njit(cache=True, parallel=True)
def _solve_bank_par(r_all, w, lam1, lam2, lam3, nu_all):
    x_all = np.empty_like(r_all)
    for b in prange(r_all.shape[0]):
        _dual_solve(r_all[b], w, lam1, lam2, lam3, nu_all[b], x_all[b], MAX_ROUNDS, GAP_TOL)
    return x_all


def solve_window(
    targets: np.ndarray,
    weights: np.ndarray,
    lam1: float,
    lam2: float,
    lam3: float,
    warm_nu: np.ndarray | None = None,
) -> np.ndarray:
    """Minimize the window objective J for given targets and data weights."""
    r = np.ascontiguousarray(targets, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if r.shape != w.shape or r.ndim != 1 or r.size == 0:
        raise ValueError("targets and weights must be equal-length 1-D arrays")
    if not (np.all(np.isfinite(r)) and np.all(w > 0)):
        raise ValueError("targets must be finite and weights positive")
    n = r.size
    m = max(0, n - 1) + max(0, n - 2) + max(0, n - 3)
    if warm_nu is None or warm_nu.size != m:
        nu = np.zeros(m)
    else:
        nu = np.ascontiguousarray(warm_nu, dtype=np.float64).copy()
    x, _ = _solve_window_jit(r, w, float(lam1), float(lam2), float(lam3), nu)
    return x


def _shift_nu(nu: np.ndarray, n_old: int, n_new: int, lam1: float = 1.0,
              lam2: float = 10.0, lam3: float = 100.0) -> np.ndarray:
    """Map a window's multipliers onto the next window's difference rows.

    Steady state drops the oldest sample (rows shift left, a fresh zero
    enters on the right); during warm-up the window grows instead (rows keep
    their position, new rightmost rows start at zero).  Dropping the oldest
    sample removes the old leftmost rows' contribution to the stationarity of
    the surviving left-edge coordinates, so the three new leftmost rows are
    adjusted to reproduce it exactly (a nonsingular 3x3 system), then clipped
    into the box.  Without this the warm start carries an O(lam3) defect that
    forces global re-equilibration every push.
    """
    def seg(old_m: int, new_m: int, part: np.ndarray) -> np.ndarray:
        out = np.zeros(new_m)
        if old_m <= 0 or new_m <= 0:
            return out
        if n_new == n_old:  # slide: drop row 0
            k = min(old_m - 1, new_m)
            if k > 0:
                out[:k] = part[1 : 1 + k]
        else:  # grow: keep aligned from the left
            k = min(old_m, new_m)
            out[:k] = part[:k]
        return out

    m1o, m2o, m3o = max(0, n_old - 1), max(0, n_old - 2), max(0, n_old - 3)
    m1n, m2n, m3n = max(0, n_new - 1), max(0, n_new - 2), max(0, n_new - 3)
    p1 = nu[:m1o]
    p2 = nu[m1o : m1o + m2o]
    p3 = nu[m1o + m2o :]
    out = np.concatenate([seg(m1o, m1n, p1), seg(m2o, m2n, p2), seg(m3o, m3n, p3)])
    if n_new == n_old and n_old >= 5 and m1n > 0:
        v1 = p1[0] if m1o > 0 else 0.0
        v2 = p2[0] if m2o > 0 else 0.0
        v3 = p3[0] if m3o > 0 else 0.0
        # dropped contribution at surviving coords (old 1..3 -> new 0..2):
        # D1_0 -> (+1, 0, 0), D2_0 -> (-2, +1, 0), D3_0 -> (+3, -3, +1)
        d0 = v1 - 2.0 * v2 + 3.0 * v3
        d1 = v2 - 3.0 * v3
        d2 = v3
        # reproduce via the new leftmost rows D1'(-1,1,0,0), D2'(1,-2,1,0),
        # D3'(-1,3,-3,1); the spill at new coord 3 is left to the solver
        a3 = -d0 - d1 - d2
        a2 = d2 + 3.0 * a3
        a1 = a2 - a3 - d0
        i2 = m1n
        i3 = m1n + m2n
        out[0] = min(max(out[0] + a1, -lam1), lam1)
        if m2n > 0:
            out[i2] = min(max(out[i2] + a2, -lam2), lam2)
        if m3n > 0:
            out[i3] = min(max(out[i3] + a3, -lam3), lam3)
    return out


class FilterState:
    """Streaming fixed-lag smoother for one scalar signal.

    push() buffers raw samples; once w_future + 1 samples are pending, each
    push emits the smoothed value for the oldest pending frame (lag w_future).
    flush() drains the remaining values at end of stream.
    """

    def __init__(self, w_past: int, w_future: int,
                 lam1: float = 1.0, lam2: float = 10.0, lam3: float = 100.0):
        if w_past < 0 or w_future < 0:
            raise ValueError("window sizes must be >= 0")
        self.w_past = int(w_past)
        self.w_future = int(w_future)
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)
        self.lam3 = float(lam3)
        self._past: list[float] = []
        self._future: list[float] = []
        self._nu: np.ndarray | None = None
        self._n_prev = 0
        self.emitted_count = 0

    def _solve(self) -> np.ndarray:
        npast = len(self._past)
        n = npast + len(self._future)
        r = np.array(self._past + self._future, dtype=np.float64)
        w = np.ones(n)
        w[:npast] = ANCHOR_WEIGHT
        m = max(0, n - 1) + max(0, n - 2) + max(0, n - 3)
        if self._nu is not None and self._n_prev > 1:
            nu = _shift_nu(self._nu, self._n_prev, n, self.lam1, self.lam2, self.lam3)
        else:
            nu = np.zeros(m)
        x, _ = _solve_window_jit(r, w, self.lam1, self.lam2, self.lam3, nu)
        self._nu = nu
        self._n_prev = n
        return x

    def push(self, raw: float):
        """Feed one raw sample; returns the smoothed value it unlocks, if any."""
        v = float(raw)
        if not np.isfinite(v):
            raise ValueError(f"non-finite input {raw!r}")
        self._future.append(v)
        if len(self._future) <= self.w_future:
            return None
        x = self._solve()
        out = float(x[len(self._past)])
        self._emit(out)
        self._future.pop(0)
        return out

    def flush(self) -> list[float]:
        """Re-solve the final window and emit everything still pending."""
        if not self._future:
            return []
        x = self._solve()
        out = [float(v) for v in x[len(self._past) :]]
        for v in out:
            self._emit(v)
        self._future.clear()
        self._nu = None
        self._n_prev = 0
        return out

    def _emit(self, value: float) -> None:
        self._past.append(value)
        if len(self._past) > self.w_past:
            self._past.pop(0)
        self.emitted_count += 1

    @property
    def pending(self) -> int:
        return len(self._future)

    def current_window(self) -> tuple[np.ndarray, np.ndarray]:
        """Targets and weights of the window the next solve would use."""
        npast = len(self._past)
        r = np.array(self._past + self._future, dtype=np.float64)
        w = np.ones(r.size)
        w[:npast] = ANCHOR_WEIGHT
        return r, w


def _shift_nu_rows(nu: np.ndarray, n_old: int, n_new: int, rows: int,
                   lam1: float = 1.0, lam2: float = 10.0, lam3: float = 100.0) -> np.ndarray:
    """Row-batched version of _shift_nu for a (rows, m_old) multiplier array."""
    def seg(old_m: int, new_m: int, part: np.ndarray) -> np.ndarray:
        out = np.zeros((rows, new_m))
        if old_m <= 0 or new_m <= 0:
            return out
        if n_new == n_old:
            k = min(old_m - 1, new_m)
            if k > 0:
                out[:, :k] = part[:, 1 : 1 + k]
        else:
            k = min(old_m, new_m)
            out[:, :k] = part[:, :k]
        return out

    m1o, m2o, m3o = max(0, n_old - 1), max(0, n_old - 2), max(0, n_old - 3)
    m1n, m2n, m3n = max(0, n_new - 1), max(0, n_new - 2), max(0, n_new - 3)
    out = np.concatenate(
        [
            seg(m1o, m1n, nu[:, :m1o]),
            seg(m2o, m2n, nu[:, m1o : m1o + m2o]),
            seg(m3o, m3n, nu[:, m1o + m2o :]),
        ],
        axis=1,
    )
    if n_new == n_old and n_old >= 5 and m1n > 0:
        v1 = nu[:, 0] if m1o > 0 else 0.0
        v2 = nu[:, m1o] if m2o > 0 else 0.0
        v3 = nu[:, m1o + m2o] if m3o > 0 else 0.0
        d0 = v1 - 2.0 * v2 + 3.0 * v3
        d1 = v2 - 3.0 * v3
        d2 = v3
        a3 = -d0 - d1 - d2
        a2 = d2 + 3.0 * a3
        a1 = a2 - a3 - d0
        out[:, 0] = np.clip(out[:, 0] + a1, -lam1, lam1)
        if m2n > 0:
            out[:, m1n] = np.clip(out[:, m1n] + a2, -lam2, lam2)
        if m3n > 0:
            out[:, m1n + m2n] = np.clip(out[:, m1n + m2n] + a3, -lam3, lam3)
    return out


class FilterBank:
    """Fixed-lag smoothing of many signals in lockstep with one jit call per
    push.  Emits exactly what per-signal FilterState instances would."""

    def __init__(self, n_signals: int, w_past: int, w_future: int,
                 lam1: float = 1.0, lam2: float = 10.0, lam3: float = 100.0,
                 parallel: bool = False):
        if n_signals < 1:
            raise ValueError("need at least one signal")
        if w_past < 0 or w_future < 0:
            raise ValueError("window sizes must be >= 0")
        self.parallel = bool(parallel)
        self.n_signals = int(n_signals)
        self.w_past = int(w_past)
        self.w_future = int(w_future)
        self.lam1 = float(lam1)
        self.lam2 = float(lam2)
        self.lam3 = float(lam3)
        self._past = np.zeros((n_signals, max(w_past, 1)))
        self._future = np.zeros((n_signals, w_future + 1))
        self._npast = 0
        self._nfut = 0
        self._nu: np.ndarray | None = None
        self._n_prev = 0

    def _solve(self) -> np.ndarray:
        n = self._npast + self._nfut
        r_all = np.concatenate(
            [self._past[:, : self._npast], self._future[:, : self._nfut]], axis=1
        )
        w = np.ones(n)
        w[: self._npast] = ANCHOR_WEIGHT
        m = max(0, n - 1) + max(0, n - 2) + max(0, n - 3)
        if self._nu is not None and self._n_prev > 1:
            nu = _shift_nu_rows(self._nu, self._n_prev, n, self.n_signals,
                                self.lam1, self.lam2, self.lam3)
        else:
            nu = np.zeros((self.n_signals, m))
        solve = _solve_bank_par if self.parallel else _solve_bank_jit
        x_all = solve(r_all, w, self.lam1, self.lam2, self.lam3, nu)
        self._nu = nu
        self._n_prev = n
        return x_all

    def push(self, values: np.ndarray) -> np.ndarray | None:
        """Feed one sample per signal; returns the unlocked smoothed values."""
        v = np.asarray(values, dtype=np.float64)
        if v.shape != (self.n_signals,):
            raise ValueError(f"expected {self.n_signals} values, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite input")
        self._future[:, self._nfut] = v
        self._nfut += 1
        if self._nfut <= self.w_future:
            return None
        x_all = self._solve()
        out = x_all[:, self._npast].copy()
        self._emit(out)
        self._future[:, :-1] = self._future[:, 1:]
        self._nfut -= 1
        return out

    def flush(self) -> np.ndarray:
        """Drain pending values; returns (n_signals, n_pending)."""
        if self._nfut == 0:
            return np.empty((self.n_signals, 0))
        x_all = self._solve()
        out = x_all[:, self._npast :].copy()
        for col in range(out.shape[1]):
            self._emit(out[:, col])
        self._nfut = 0
        self._nu = None
        self._n_prev = 0
        return out

    def _emit(self, values: np.ndarray) -> None:
        if self.w_past == 0:
            return
        if self._npast < self.w_past:
            self._past[:, self._npast] = values
            self._npast += 1
        else:
            self._past[:, :-1] = self._past[:, 1:]
            self._past[:, self.w_past - 1] = values


def smooth_offline(values: np.ndarray, w_past: int, w_future: int,
                   lam1: float = 1.0, lam2: float = 10.0, lam3: float = 100.0) -> np.ndarray:
    """Run the streaming filter over a whole signal and return aligned output.

    Identical to pushing every sample and flushing; output[i] is the smoothed
    value for input frame i.
    """
    state = FilterState(w_past, w_future, lam1, lam2, lam3)
    out: list[float] = []
    for v in values:
        got = state.push(float(v))
        if got is not None:
            out.append(got)
    out.extend(state.flush())
    return np.asarray(out)


def warmup_jit() -> None:
    """Force numba compilation so later calls run at full speed."""
    state = FilterState(4, 4)
    for i in range(12):
        state.push(float(i % 3))
    state.flush()
