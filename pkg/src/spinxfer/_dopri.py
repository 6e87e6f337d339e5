"""Compiled Dormand-Prince 5(4) kernel for i dc/dt = H(t) c with a linear ramp.

H(t) is tridiagonal: diagonal ``diag + (f0 + rate t) e_site``, off-diagonal
``off``. Integration happens in a frame shifted by the constant energy
``shift`` (a global phase, undone on output) so the dominant terminal
amplitudes rotate slowly.
"""

import numba
import numpy as np

A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# difference between the 5th- and embedded 4th-order weights
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

SAFETY = 0.9
# proportional-integral controller exponents for a 5(4) pair
K_I = 0.7 / 5
K_P = 0.4 / 5
FAC_MIN, FAC_MAX = 0.2, 5.0

STATUS_OK = 0
STATUS_UNDERFLOW = 1


@numba.njit(cache=True)
def _rhs(t, c, diag, off, site, f0, rate, out):
    n = c.shape[0]
    for i in range(n):
        acc = diag[i] * c[i]
        if i > 0:
            acc += off[i - 1] * c[i - 1]
        if i < n - 1:
            acc += off[i] * c[i + 1]
        out[i] = -1j * acc
    out[site] += -1j * (f0 + rate * t) * c[site]


@numba.njit(cache=True)
def integrate(diag, off, site, f0, rate, c0, out_times, tol, h0, h_min, fixed):
    """Integrate from t=0 and record the state at each of ``out_times``.

    Error control: a step is accepted when the 2-norm of the embedded error
    estimate is below ``tol * h`` (error per unit time). With ``fixed`` the
    step ``h0`` is used unconditionally (clipped to hit output times).

    Returns (states, status, n_accepted, n_rejected, max_norm_drift).
    """
    n = c0.shape[0]
    states = np.empty((out_times.shape[0], n), dtype=np.complex128)
    c = c0.copy()
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty_like(k1)
    k3 = np.empty_like(k1)
    k4 = np.empty_like(k1)
    k5 = np.empty_like(k1)
    k6 = np.empty_like(k1)
    k7 = np.empty_like(k1)
    y = np.empty_like(k1)
    cn = np.empty_like(k1)
    t = 0.0
    h = h0
    err_prev = 1e-4
    n_acc = 0
    n_rej = 0
    drift = 0.0
    _rhs(t, c, diag, off, site, f0, rate, k1)
    for j in range(out_times.shape[0]):
        t_out = out_times[j]
        while t < t_out:
            step = h
            last = False
            if t + step >= t_out:
                step = t_out - t
                last = True
            if not fixed and step < h_min and not last:
                return states, STATUS_UNDERFLOW, n_acc, n_rej, drift
            for i in range(n):
                y[i] = c[i] + step * A21 * k1[i]
            _rhs(t + step / 5, y, diag, off, site, f0, rate, k2)
            for i in range(n):
                y[i] = c[i] + step * (A31 * k1[i] + A32 * k2[i])
            _rhs(t + 3 * step / 10, y, diag, off, site, f0, rate, k3)
            for i in range(n):
                y[i] = c[i] + step * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            _rhs(t + 4 * step / 5, y, diag, off, site, f0, rate, k4)
            for i in range(n):
                y[i] = c[i] + step * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            _rhs(t + 8 * step / 9, y, diag, off, site, f0, rate, k5)
            for i in range(n):
                y[i] = c[i] + step * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                      + A64 * k4[i] + A65 * k5[i])
            _rhs(t + step, y, diag, off, site, f0, rate, k6)
            for i in range(n):
                cn[i] = c[i] + step * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                       + B5 * k5[i] + B6 * k6[i])
            _rhs(t + step, cn, diag, off, site, f0, rate, k7)
            if fixed:
                err = 0.0
            else:
                e2 = 0.0
                for i in range(n):
                    e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                                + E6 * k6[i] + E7 * k7[i])
                    e2 += e.real * e.real + e.imag * e.imag
                err = np.sqrt(e2) / (tol * step)
            if err <= 1.0:
                t = t_out if last else t + step
                norm = 0.0
                for i in range(n):
                    c[i] = cn[i]
                    k1[i] = k7[i]
                    norm += c[i].real * c[i].real + c[i].imag * c[i].imag
                d = abs(norm - 1.0)
                if d > drift:
                    drift = d
                n_acc += 1
                if not fixed and not last:
                    if err == 0.0:
                        fac = FAC_MAX
                    else:
                        fac = SAFETY * err ** (-K_I) * err_prev ** K_P
                    h = step * min(FAC_MAX, max(FAC_MIN, fac))
                    err_prev = max(err, 1e-4)
            else:
                n_rej += 1
                h = step * max(FAC_MIN, SAFETY * err ** -0.2)
                if h < h_min:
                    return states, STATUS_UNDERFLOW, n_acc, n_rej, drift
        for i in range(n):
            states[j, i] = c[i]
    return states, STATUS_OK, n_acc, n_rej, drift
