"""Compiled inner loops for time stepping.

The Hamiltonian is held as a static real diagonal plus a list of masked hops:
term b adds coef[b] * v[i ^ xor_mask[b]] to component i when
(i & select_mask[b]) == select_value[b].  A step advances psi by the truncated
Taylor expansion of exp(-i*dt*H(t_mid)) with per-step coefficients looked up
in a precomputed table, one row per step.

Lab-frame chains have real hop coefficients, so the state is carried as
separate real/imag arrays and H is applied to each half with real arithmetic
(half the multiplies of the complex product).  Rotating-frame term lists get
the complex variant.  Both step routines fold the norm accumulation into the
final Taylor term so the drift monitor costs no extra pass.

fastmath deliberately excludes the nnan/ninf flags: the drift monitor is the
place where a non-finite amplitude must be caught, not optimized away.
"""

import numpy as np
from numba import njit

FM = {"contract", "reassoc", "nsz", "arcp"}


# ---------------------------------------------------------------------------
# real-coefficient path
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=FM)
def _apply_real(diag, xorm, selm, selv, coefs, vre, vim, ore, oim):
    dim = vre.shape[0]
    nb = xorm.shape[0]
    for i in range(dim):
        d = diag[i]
        ar = d * vre[i]
        ai = d * vim[i]
        for b in range(nb):
            if (i & selm[b]) == selv[b]:
                j = i ^ xorm[b]
                c = coefs[b]
                ar += c * vre[j]
                ai += c * vim[j]
        ore[i] = ar
        oim[i] = ai


@njit(cache=True, fastmath=FM)
def _step_real(diag, xorm, selm, selv, coefs, pre, pim, tre, tim, wre, wim, dt, order):
    """One Taylor step in place; returns the squared norm of the new state."""
    dim = pre.shape[0]
    for i in range(dim):
        tre[i] = pre[i]
        tim[i] = pim[i]
    for k in range(1, order):
        _apply_real(diag, xorm, selm, selv, coefs, tre, tim, wre, wim)
        s = dt / k
        for i in range(dim):
            nr = s * wim[i]  # (-i*s) * w
            ni = -s * wre[i]
            tre[i] = nr
            tim[i] = ni
            pre[i] += nr
            pim[i] += ni
    _apply_real(diag, xorm, selm, selv, coefs, tre, tim, wre, wim)
    s = dt / order
    nrm2 = 0.0
    for i in range(dim):
        pr = pre[i] + s * wim[i]
        pi = pim[i] - s * wre[i]
        pre[i] = pr
        pim[i] = pi
        nrm2 += pr * pr + pi * pi
    return nrm2


# ---------------------------------------------------------------------------
# complex-coefficient path
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=FM)
def _apply_cplx(diag, xorm, selm, selv, cre, cim, vre, vim, ore, oim):
    dim = vre.shape[0]
    nb = xorm.shape[0]
    for i in range(dim):
        d = diag[i]
        ar = d * vre[i]
        ai = d * vim[i]
        for b in range(nb):
            if (i & selm[b]) == selv[b]:
                j = i ^ xorm[b]
                br = cre[b]
                bi = cim[b]
                xr = vre[j]
                xi = vim[j]
                ar += br * xr - bi * xi
                ai += br * xi + bi * xr
        ore[i] = ar
        oim[i] = ai


@njit(cache=True, fastmath=FM)
def _step_cplx(diag, xorm, selm, selv, cre, cim, pre, pim, tre, tim, wre, wim, dt, order):
    dim = pre.shape[0]
    for i in range(dim):
        tre[i] = pre[i]
        tim[i] = pim[i]
    for k in range(1, order):
        _apply_cplx(diag, xorm, selm, selv, cre, cim, tre, tim, wre, wim)
        s = dt / k
        for i in range(dim):
            nr = s * wim[i]
            ni = -s * wre[i]
            tre[i] = nr
            tim[i] = ni
            pre[i] += nr
            pim[i] += ni
    _apply_cplx(diag, xorm, selm, selv, cre, cim, tre, tim, wre, wim)
    s = dt / order
    nrm2 = 0.0
    for i in range(dim):
        pr = pre[i] + s * wim[i]
        pi = pim[i] - s * wre[i]
        pre[i] = pr
        pim[i] = pi
        nrm2 += pr * pr + pi * pi
    return nrm2


# ---------------------------------------------------------------------------
# trajectory drivers
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=FM)
def _record(pre, pim, zsigns, par, beta_idx, mag, corr, parity, norms, alpha, beta,
            prob, nrm, rptr):
    dim = pre.shape[0]
    n_sites = zsigns.shape[0]
    for i in range(dim):
        prob[i] = pre[i] * pre[i] + pim[i] * pim[i]
    for j in range(n_sites):
        m = 0.0
        for i in range(dim):
            m += prob[i] * zsigns[j, i]
        mag[rptr, j] = m
    for j in range(n_sites - 1):
        zz = 0.0
        for i in range(dim):
            zz += prob[i] * zsigns[j, i] * zsigns[j + 1, i]
        corr[rptr, j] = zz - mag[rptr, j] * mag[rptr, j + 1]
    pacc = 0.0
    for i in range(dim):
        pacc += prob[i] * par[i]
    parity[rptr] = pacc
    norms[rptr] = nrm
    alpha[rptr] = complex(pre[0], pim[0])
    for j in range(n_sites - 1):
        b = beta_idx[j]
        beta[rptr, j] = complex(pre[b], pim[b])


@njit(cache=True, fastmath=FM)
def run_trajectory(is_real, diag, xorm, selm, selv, cre, cim, dt, order, pre, pim,
                   record_steps, zsigns, par, beta_idx,
                   mag, corr, parity, norms, alpha, beta, renorm_tol):
    """Advance (pre, pim) over the whole step table, recording observables.

    Returns (renormalizations, failed_step, max_norm_drift); failed_step is -1
    unless a non-finite norm shows up, in which case stepping stops there.
    """
    n_steps = cre.shape[0]
    dim = pre.shape[0]
    tre = np.empty(dim)
    tim = np.empty(dim)
    wre = np.empty(dim)
    wim = np.empty(dim)
    prob = np.empty(dim)
    rptr = 0
    renorms = 0
    max_drift = 0.0

    nrm2 = 0.0
    for i in range(dim):
        nrm2 += pre[i] * pre[i] + pim[i] * pim[i]

    for s in range(n_steps + 1):
        if not np.isfinite(nrm2):
            return renorms, s, max_drift
        nrm = np.sqrt(nrm2)
        drift = abs(nrm - 1.0)
        if drift > max_drift:
            max_drift = drift
        if drift > renorm_tol:
            inv = 1.0 / nrm
            for i in range(dim):
                pre[i] *= inv
                pim[i] *= inv
            nrm = 1.0
            renorms += 1
        if rptr < record_steps.shape[0] and s == record_steps[rptr]:
            _record(pre, pim, zsigns, par, beta_idx, mag, corr, parity, norms,
                    alpha, beta, prob, nrm, rptr)
            rptr += 1
        if s < n_steps:
            if is_real:
                nrm2 = _step_real(diag, xorm, selm, selv, cre[s], pre, pim,
                                  tre, tim, wre, wim, dt, order)
            else:
                nrm2 = _step_cplx(diag, xorm, selm, selv, cre[s], cim[s], pre, pim,
                                  tre, tim, wre, wim, dt, order)

    return renorms, -1, max_drift


# ---------------------------------------------------------------------------
# propagator drivers (matrix columns evolved together, no renormalization)
# ---------------------------------------------------------------------------

@njit(cache=True, fastmath=FM)
def _apply_real_2d(diag, xorm, selm, selv, coefs, vre, vim, ore, oim):
    dim, nc = vre.shape
    nb = xorm.shape[0]
    for i in range(dim):
        d = diag[i]
        for c in range(nc):
            ore[i, c] = d * vre[i, c]
            oim[i, c] = d * vim[i, c]
        for b in range(nb):
            if (i & selm[b]) == selv[b]:
                j = i ^ xorm[b]
                cf = coefs[b]
                for c in range(nc):
                    ore[i, c] += cf * vre[j, c]
                    oim[i, c] += cf * vim[j, c]


@njit(cache=True, fastmath=FM)
def _apply_cplx_2d(diag, xorm, selm, selv, cre, cim, vre, vim, ore, oim):
    dim, nc = vre.shape
    nb = xorm.shape[0]
    for i in range(dim):
        d = diag[i]
        for c in range(nc):
            ore[i, c] = d * vre[i, c]
            oim[i, c] = d * vim[i, c]
        for b in range(nb):
            if (i & selm[b]) == selv[b]:
                j = i ^ xorm[b]
                br = cre[b]
                bi = cim[b]
                for c in range(nc):
                    xr = vre[j, c]
                    xi = vim[j, c]
                    ore[i, c] += br * xr - bi * xi
                    oim[i, c] += br * xi + bi * xr


@njit(cache=True, fastmath=FM)
def run_propagator(is_real, diag, xorm, selm, selv, cre, cim, dt, order, ure, uim):
    """Apply the full step table to every column of (ure, uim) in place."""
    n_steps = cre.shape[0]
    dim, nc = ure.shape
    tre = np.empty((dim, nc))
    tim = np.empty((dim, nc))
    wre = np.empty((dim, nc))
    wim = np.empty((dim, nc))
    for s in range(n_steps):
        for i in range(dim):
            for c in range(nc):
                tre[i, c] = ure[i, c]
                tim[i, c] = uim[i, c]
        for k in range(1, order + 1):
            if is_real:
                _apply_real_2d(diag, xorm, selm, selv, cre[s], tre, tim, wre, wim)
            else:
                _apply_cplx_2d(diag, xorm, selm, selv, cre[s], cim[s], tre, tim,
                               wre, wim)
            sc = dt / k
            for i in range(dim):
                for c in range(nc):
                    nr = sc * wim[i, c]
                    ni = -sc * wre[i, c]
                    tre[i, c] = nr
                    tim[i, c] = ni
                    ure[i, c] += nr
                    uim[i, c] += ni
