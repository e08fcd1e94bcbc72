"""Hot numeric loops: CHSH coordinate ascent and seeded Poisson sampling.

Each kernel exists twice. The scalar-loop version is compiled with numba when
available; the fallback is plain numpy (vectorised across starts for the
maximizer, interpreted numpy scalars for the sampler). ``_accel.USE_NUMBA``
picks one at call time. Both paths perform the same floating point
operations in the same order so their outputs agree to the last bit on the
sampler and to rounding on the maximizer.
"""
import math

import numpy as np

from . import _accel

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 2.0 ** -53

_MASK64 = (1 << 64) - 1

# coordinate search: 8 coarse samples per period, then golden section on +-pi/8
_N_COARSE = 8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_XTOL = 1e-11
_N_GOLDEN = int(math.ceil(math.log(_XTOL / (math.pi / 4.0)) / math.log(_INVPHI)))


# ---------------------------------------------------------------------------
# seeding (python ints, shared by both paths)
# ---------------------------------------------------------------------------

def mix64(z):
    """splitmix64 finalizer on a python int."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def point_seed(seed, index):
    """Seed of scan point ``index``: ``seed XOR mix64((index + 1) * golden)``."""
    return (int(seed) ^ mix64((int(index) + 1) * 0x9E3779B97F4A7C15)) & _MASK64


# ---------------------------------------------------------------------------
# Poisson sampling
# ---------------------------------------------------------------------------

def _next_uniform(state):
    # splitmix64 step on a length-1 uint64 array; returns a double in [0, 1)
    state[0] += GOLDEN_GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    z = z ^ (z >> _S31)
    return (z >> _S11) * _INV_2_53


def _log_factorial(k):
    if k < 10:
        f = 1.0
        for i in range(2, k + 1):
            f *= i
        return math.log(f)
    n = float(k)
    r = 1.0 / n
    r2 = r * r
    series = r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
    return n * math.log(n) - n + 0.5 * math.log(2.0 * math.pi * n) + series


def _poisson_inversion(lam, state):
    u = _next_uniform(state)
    p = math.exp(-lam)
    s = p
    k = 0
    while u > s and k < 1000:
        k += 1
        p *= lam / k
        s += p
    return k


def _poisson_ptrs(lam, state):
    # transformed rejection with squeeze (Hormann 1993), valid for lam >= 10
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = _next_uniform(state) - 0.5
        v = _next_uniform(state)
        us = 0.5 - abs(u)
        k = int(math.floor((2.0 * a / us + b) * u + lam + 0.43))
        if us >= 0.07 and v <= vr:
            return k
        if k < 0 or (us < 0.013 and v > us):
            continue
        lhs = math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
        if lhs <= -lam + k * loglam - _log_factorial(k):
            return k


def _poisson_block(means, seed_arr):
    state = seed_arr.copy()
    out = np.zeros(means.shape[0], dtype=np.int64)
    for i in range(means.shape[0]):
        lam = means[i]
        if lam <= 0.0:
            out[i] = 0
        elif lam < 30.0:
            out[i] = _poisson_inversion(lam, state)
        else:
            out[i] = _poisson_ptrs(lam, state)
    return out


_next_uniform_nb = _accel.njit(_next_uniform)
_log_factorial_nb = _accel.njit(_log_factorial)


def _build_poisson_nb():
    # numba resolves globals at compile time, so the jitted block needs jitted callees
    if not _accel.HAVE_NUMBA:
        return None
    nu = _next_uniform_nb
    lf = _log_factorial_nb

    @_accel.njit
    def inversion(lam, state):
        u = nu(state)
        p = math.exp(-lam)
        s = p
        k = 0
        while u > s and k < 1000:
            k += 1
            p *= lam / k
            s += p
        return k

    @_accel.njit
    def ptrs(lam, state):
        slam = math.sqrt(lam)
        loglam = math.log(lam)
        b = 0.931 + 2.53 * slam
        a = -0.059 + 0.02483 * b
        invalpha = 1.1239 + 1.1328 / (b - 3.4)
        vr = 0.9277 - 3.6224 / (b - 2.0)
        while True:
            u = nu(state) - 0.5
            v = nu(state)
            us = 0.5 - abs(u)
            k = int(math.floor((2.0 * a / us + b) * u + lam + 0.43))
            if us >= 0.07 and v <= vr:
                return k
            if k < 0 or (us < 0.013 and v > us):
                continue
            lhs = math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
            if lhs <= -lam + k * loglam - lf(k):
                return k

    @_accel.njit
    def block(means, seed_arr):
        state = seed_arr.copy()
        out = np.zeros(means.shape[0], dtype=np.int64)
        for i in range(means.shape[0]):
            lam = means[i]
            if lam <= 0.0:
                out[i] = 0
            elif lam < 30.0:
                out[i] = inversion(lam, state)
            else:
                out[i] = ptrs(lam, state)
        return out

    return block


_poisson_block_nb = _build_poisson_nb()


def poisson_draws(means, seed, use_numba=None):
    """Draw one Poisson variate per entry of ``means`` from a single seeded stream."""
    means = np.ascontiguousarray(means, dtype=np.float64)
    seed_arr = np.array([int(seed) & _MASK64], dtype=np.uint64)
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba and _poisson_block_nb is not None:
        return _poisson_block_nb(means, seed_arr)
    with np.errstate(over="ignore"):
        return _poisson_block(means, seed_arr)


# ---------------------------------------------------------------------------
# CHSH coordinate ascent
# ---------------------------------------------------------------------------

def _chsh_s(c2, s2, a, ap, b, bp):
    e1 = c2 * math.cos(2.0 * (a - b)) + s2 * math.cos(2.0 * (a + b))
    e2 = c2 * math.cos(2.0 * (a - bp)) + s2 * math.cos(2.0 * (a + bp))
    e3 = c2 * math.cos(2.0 * (ap - b)) + s2 * math.cos(2.0 * (ap + b))
    e4 = c2 * math.cos(2.0 * (ap - bp)) + s2 * math.cos(2.0 * (ap + bp))
    return e1 + e2 + e3 - e4


_chsh_s_nb = _accel.njit(_chsh_s)


def _build_ascent_nb():
    if not _accel.HAVE_NUMBA:
        return None
    S = _chsh_s_nb
    n_coarse = _N_COARSE
    n_golden = _N_GOLDEN
    invphi = _INVPHI

    @_accel.njit
    def eval_at(c2, s2, x, j, t):
        old = x[j]
        x[j] = t
        v = S(c2, s2, x[0], x[1], x[2], x[3])
        x[j] = old
        return v

    @_accel.njit
    def ascent(phi, starts, tol, max_evals):
        c2 = math.cos(phi / 2.0) ** 2
        s2 = math.sin(phi / 2.0) ** 2
        n = starts.shape[0]
        best_x = starts.copy()
        best_s = np.empty(n)
        evals = np.zeros(n, dtype=np.int64)
        converged = np.zeros(n, dtype=np.bool_)
        for i in range(n):
            x = starts[i].copy()
            cur = S(c2, s2, x[0], x[1], x[2], x[3])
            evals[i] = 1
            while evals[i] < max_evals:
                prev = cur
                for j in range(4):
                    base = x[j]
                    kbest = 0
                    vbest = eval_at(c2, s2, x, j, base)
                    for k in range(1, n_coarse):
                        v = eval_at(c2, s2, x, j, base + k * math.pi / n_coarse)
                        if v > vbest:
                            vbest = v
                            kbest = k
                    centre = base + kbest * math.pi / n_coarse
                    lo = centre - math.pi / n_coarse
                    hi = centre + math.pi / n_coarse
                    x1 = hi - invphi * (hi - lo)
                    x2 = lo + invphi * (hi - lo)
                    f1 = eval_at(c2, s2, x, j, x1)
                    f2 = eval_at(c2, s2, x, j, x2)
                    for _ in range(n_golden):
                        if f1 < f2:
                            lo = x1
                            x1 = x2
                            f1 = f2
                            x2 = lo + invphi * (hi - lo)
                            f2 = eval_at(c2, s2, x, j, x2)
                        else:
                            hi = x2
                            x2 = x1
                            f2 = f1
                            x1 = hi - invphi * (hi - lo)
                            f1 = eval_at(c2, s2, x, j, x1)
                    xm = 0.5 * (lo + hi)
                    fm = eval_at(c2, s2, x, j, xm)
                    evals[i] += n_coarse + n_golden + 3
                    if fm >= vbest:
                        x[j] = xm
                        cur = fm
                    else:
                        x[j] = centre
                        cur = vbest
                if cur - prev < tol / 10.0:
                    converged[i] = True
                    break
            best_x[i] = x
            best_s[i] = cur
        return best_s, best_x, evals, converged

    return ascent


_ascent_nb = _build_ascent_nb()


def _chsh_s_vec(c2, s2, x):
    a, ap, b, bp = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    e1 = c2 * np.cos(2.0 * (a - b)) + s2 * np.cos(2.0 * (a + b))
    e2 = c2 * np.cos(2.0 * (a - bp)) + s2 * np.cos(2.0 * (a + bp))
    e3 = c2 * np.cos(2.0 * (ap - b)) + s2 * np.cos(2.0 * (ap + b))
    e4 = c2 * np.cos(2.0 * (ap - bp)) + s2 * np.cos(2.0 * (ap + bp))
    return e1 + e2 + e3 - e4


def _ascent_np(phi, starts, tol, max_evals):
    c2 = math.cos(phi / 2.0) ** 2
    s2 = math.sin(phi / 2.0) ** 2
    x = starts.copy()
    n = x.shape[0]
    cur = _chsh_s_vec(c2, s2, x)
    evals = np.ones(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    rows = np.arange(n)

    def at(j, t):
        y = x.copy()
        y[:, j] = t
        return _chsh_s_vec(c2, s2, y)

    active = np.ones(n, dtype=bool)
    while active.any():
        prev = cur.copy()
        for j in range(4):
            base = x[:, j].copy()
            samples = np.stack([at(j, base + k * math.pi / _N_COARSE) for k in range(_N_COARSE)], axis=1)
            kbest = np.argmax(samples, axis=1)
            vbest = samples[rows, kbest]
            centre = base + kbest * math.pi / _N_COARSE
            lo = centre - math.pi / _N_COARSE
            hi = centre + math.pi / _N_COARSE
            x1 = hi - _INVPHI * (hi - lo)
            x2 = lo + _INVPHI * (hi - lo)
            f1 = at(j, x1)
            f2 = at(j, x2)
            for _ in range(_N_GOLDEN):
                left = f1 < f2
                lo = np.where(left, x1, lo)
                hi = np.where(left, hi, x2)
                nx1 = np.where(left, x2, hi - _INVPHI * (hi - lo))
                nx2 = np.where(left, lo + _INVPHI * (hi - lo), x1)
                fnew = at(j, np.where(left, nx2, nx1))
                f1, f2 = np.where(left, f2, fnew), np.where(left, fnew, f1)
                x1, x2 = nx1, nx2
            xm = 0.5 * (lo + hi)
            fm = at(j, xm)
            take = fm >= vbest
            newx = np.where(take, xm, centre)
            newv = np.where(take, fm, vbest)
            x[:, j] = np.where(active, newx, x[:, j])
            cur = np.where(active, newv, cur)
        evals += np.where(active, 4 * (_N_COARSE + _N_GOLDEN + 3), 0)
        done = active & (cur - prev < tol / 10.0)
        converged |= done
        active &= ~done & (evals < max_evals)
    return cur, x, evals, converged


def chsh_coordinate_ascent(phi, starts, tol, max_evals, use_numba=None):
    """Maximise the CHSH combination of |Phi(phi)> from each start in ``starts``.

    Returns ``(s, x, evals, converged)`` with one entry per start.
    """
    starts = np.ascontiguousarray(starts, dtype=np.float64)
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    if use_numba and _ascent_nb is not None:
        return _ascent_nb(float(phi), starts, float(tol), int(max_evals))
    return _ascent_np(float(phi), starts, float(tol), int(max_evals))
