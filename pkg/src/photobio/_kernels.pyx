# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled per-step kernels, signature-compatible with _kernels_py.

Same flux forms and per-element operation order as the numpy reference,
so the backends agree to rounding; see _kernels_py for the telescoping
argument that pins total mass.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def optical_depth(n, double dz):
    n = np.ascontiguousarray(n, dtype=np.float64)
    cdef double[:, ::1] nv = n
    cdef Py_ssize_t Nx = nv.shape[0], K = nv.shape[1]
    tau_arr = np.empty((Nx, K))
    cdef double[:, ::1] tau = tau_arr
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(Nx):
        acc = 0.0
        tau[i, K - 1] = 0.0
        for j in range(K - 2, -1, -1):
            acc = acc + 0.5 * (nv[i, j + 1] + nv[i, j]) * dz
            tau[i, j] = acc
    return tau_arr


def n_tendency(n, u, w_total, double dx, double dz):
    n = np.ascontiguousarray(n, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    w_total = np.ascontiguousarray(w_total, dtype=np.float64)
    cdef double[:, ::1] nv = n, uv = u, wv = w_total
    cdef Py_ssize_t Nx = nv.shape[0], K = nv.shape[1]
    out_arr = np.empty((Nx, K))
    cdef double[:, ::1] out = out_arr
    F_arr = np.empty((Nx, K))
    cdef double[:, ::1] F = F_arr
    cdef Py_ssize_t i, j, ip, im
    cdef double dFdx, G_lo, G_hi, half = 0.5 * dz

    for i in range(Nx):
        ip = i + 1 if i + 1 < Nx else 0
        for j in range(K):
            F[i, j] = (0.5 * (nv[i, j] + nv[ip, j])) \
                * (0.5 * (uv[i, j] + uv[ip, j]))

    for i in range(Nx):
        im = i - 1 if i > 0 else Nx - 1
        # bottom half-cell: only the face above carries flux
        G_hi = (0.5 * (nv[i, 1] + nv[i, 0])) * (0.5 * (wv[i, 1] + wv[i, 0]))
        out[i, 0] = -((F[i, 0] - F[im, 0]) / dx + G_hi / half)
        for j in range(1, K - 1):
            G_lo = G_hi
            G_hi = (0.5 * (nv[i, j + 1] + nv[i, j])) \
                * (0.5 * (wv[i, j + 1] + wv[i, j]))
            out[i, j] = -((F[i, j] - F[im, j]) / dx + (G_hi - G_lo) / dz)
        out[i, K - 1] = -((F[i, K - 1] - F[im, K - 1]) / dx - G_hi / half)
    return out_arr


def zeta_tendency(zeta, u, w, n, double ScR, double dx, double dz):
    zeta = np.ascontiguousarray(zeta, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    n = np.ascontiguousarray(n, dtype=np.float64)
    cdef double[:, ::1] zv = zeta, uv = u, wv = w, nv = n
    cdef Py_ssize_t Nx = zv.shape[0], K = zv.shape[1]
    out_arr = np.zeros((Nx, K))
    cdef double[:, ::1] out = out_arr
    F_arr = np.empty((Nx, K))
    cdef double[:, ::1] F = F_arr
    cdef Py_ssize_t i, j, ip, im
    cdef double G_lo, G_hi, dndx

    for i in range(Nx):
        ip = i + 1 if i + 1 < Nx else 0
        for j in range(K):
            F[i, j] = (0.5 * (zv[i, j] + zv[ip, j])) \
                * (0.5 * (uv[i, j] + uv[ip, j]))

    for i in range(Nx):
        ip = i + 1 if i + 1 < Nx else 0
        im = i - 1 if i > 0 else Nx - 1
        G_hi = (0.5 * (zv[i, 1] + zv[i, 0])) * (0.5 * (wv[i, 1] + wv[i, 0]))
        for j in range(1, K - 1):
            G_lo = G_hi
            G_hi = (0.5 * (zv[i, j + 1] + zv[i, j])) \
                * (0.5 * (wv[i, j + 1] + wv[i, j]))
            dndx = (nv[ip, j] - nv[im, j]) / (2.0 * dx)
            out[i, j] = -((F[i, j] - F[im, j]) / dx + (G_hi - G_lo) / dz) \
                - ScR * dndx
    return out_arr


def velocity_from_psi(psi, double dx, double dz):
    psi = np.ascontiguousarray(psi, dtype=np.float64)
    cdef double[:, ::1] pv = psi
    cdef Py_ssize_t Nx = pv.shape[0], K = pv.shape[1]
    u_arr = np.empty((Nx, K))
    w_arr = np.empty((Nx, K))
    cdef double[:, ::1] uo = u_arr, wo = w_arr
    cdef Py_ssize_t i, j, ip, im

    for i in range(Nx):
        uo[i, 0] = (-3.0 * pv[i, 0] + 4.0 * pv[i, 1] - pv[i, 2]) / (2.0 * dz)
        for j in range(1, K - 1):
            uo[i, j] = (pv[i, j + 1] - pv[i, j - 1]) / (2.0 * dz)
        uo[i, K - 1] = (3.0 * pv[i, K - 1] - 4.0 * pv[i, K - 2]
                        + pv[i, K - 3]) / (2.0 * dz)
    for i in range(Nx):
        ip = i + 1 if i + 1 < Nx else 0
        im = i - 1 if i > 0 else Nx - 1
        for j in range(K):
            wo[i, j] = (pv[im, j] - pv[ip, j]) / (2.0 * dx)
    return u_arr, w_arr


def tridiag_solve(dl, d, du, rhs):
    """Thomas solve of M independent tridiagonal systems; no pivoting.

    Bands are real (M, K); rhs may be real or complex and is not
    mutated.  Same recurrence as the reference implementation.
    """
    dl = np.ascontiguousarray(dl, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    du = np.ascontiguousarray(du, dtype=np.float64)
    if np.iscomplexobj(rhs):
        return _tridiag_c(dl, d, du,
                          np.ascontiguousarray(rhs, dtype=np.complex128))
    return _tridiag_r(dl, d, du, np.ascontiguousarray(rhs, dtype=np.float64))


cdef _tridiag_r(double[:, ::1] dl, double[:, ::1] d, double[:, ::1] du,
                double[:, ::1] rhs):
    cdef Py_ssize_t M = d.shape[0], K = d.shape[1]
    x_arr = np.empty((M, K))
    cp_arr = np.empty(K)
    cdef double[:, ::1] x = x_arr
    cdef double[::1] cp = cp_arr
    cdef Py_ssize_t m, j
    cdef double denom
    for m in range(M):
        denom = d[m, 0]
        x[m, 0] = rhs[m, 0] / denom
        for j in range(1, K):
            cp[j - 1] = du[m, j - 1] / denom
            denom = d[m, j] - dl[m, j] * cp[j - 1]
            x[m, j] = (rhs[m, j] - dl[m, j] * x[m, j - 1]) / denom
        for j in range(K - 2, -1, -1):
            x[m, j] = x[m, j] - cp[j] * x[m, j + 1]
    return x_arr


cdef _tridiag_c(double[:, ::1] dl, double[:, ::1] d, double[:, ::1] du,
                double complex[:, ::1] rhs):
    cdef Py_ssize_t M = d.shape[0], K = d.shape[1]
    x_arr = np.empty((M, K), dtype=np.complex128)
    cp_arr = np.empty(K)
    cdef double complex[:, ::1] x = x_arr
    cdef double[::1] cp = cp_arr
    cdef Py_ssize_t m, j
    cdef double denom
    for m in range(M):
        denom = d[m, 0]
        x[m, 0] = rhs[m, 0] / denom
        for j in range(1, K):
            cp[j - 1] = du[m, j - 1] / denom
            denom = d[m, j] - dl[m, j] * cp[j - 1]
            x[m, j] = (rhs[m, j] - dl[m, j] * x[m, j - 1]) / denom
        for j in range(K - 2, -1, -1):
            x[m, j] = x[m, j] - cp[j] * x[m, j + 1]
    return x_arr
