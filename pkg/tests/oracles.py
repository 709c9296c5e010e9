"""Independent reference implementations used by the tests.

Nothing here calls the FFT path or the Sherman-Morrison elimination: operators
are assembled as dense matrices from explicit complex exponentials, and each
time step is solved as one monolithic linear system in ``(u, v, R)``.
"""

import numpy as np


def dense_frac_laplacian(nx, bounds, beta):
    """Dense matrix of ``(-Δ)^beta`` acting on ``u.ravel()`` (C order, ``u[i, j]``)."""
    xmin, xmax, ymin, ymax = bounds
    lx, ly = xmax - xmin, ymax - ymin
    s = np.arange(-nx // 2, nx // 2)
    j = np.arange(nx)
    kx = 2 * np.pi * s / lx
    ky = 2 * np.pi * s / ly
    # phase offsets from xmin/ymin cancel in F^H diag F
    fx = np.exp(-1j * np.outer(kx, j * lx / nx))
    fy = np.exp(-1j * np.outer(ky, j * ly / nx))
    f2 = np.kron(fx, fy)
    k2 = (kx[:, None] ** 2 + ky[None, :] ** 2).ravel()
    if beta == 0:
        sym = np.ones_like(k2)
    else:
        sym = np.where(k2 == 0, 0.0, np.abs(k2) ** beta)
    mat = f2.conj().T @ (sym[:, None] * f2) / nx**2
    assert np.max(np.abs(mat.imag)) < 1e-10
    return mat.real


class DenseScheme:
    """Monolithic dense solve of the start-up and main step equations."""

    def __init__(self, nx, bounds, alpha, kappa, gamma1, gamma2, F, dF, c0):
        self.nx = nx
        self.m = nx * nx
        xmin, xmax, ymin, ymax = bounds
        self.w = (xmax - xmin) * (ymax - ymin) / self.m
        self.L = dense_frac_laplacian(nx, bounds, alpha / 2)
        self.kappa, self.g1, self.g2 = kappa, gamma1, gamma2
        self.F, self.dF, self.c0 = F, dF, c0

    def energy(self, u):
        return self.w * np.sum(self.F(u)) + self.c0

    def _solve(self, u0, v0, r0, ut, dt, centred):
        """One step of length ``dt`` with nonlinearity frozen at ``ut``.

        ``centred`` selects midpoint averages (main step) versus implicit end
        values (start-up step).
        """
        m, L, eye = self.m, self.L, np.eye(self.m)
        e = self.energy(ut)
        d = self.dF(ut).ravel()
        b = d / np.sqrt(e)
        u0, v0 = u0.ravel(), v0.ravel()
        a = 0.5 if centred else 1.0
        c = 0.5 if centred else 0.0
        n = 2 * m + 1
        M = np.zeros((n, n))
        rhs = np.zeros(n)
        # (u1 - u0)/dt = a v1 + c v0
        M[:m, :m] = eye / dt
        M[:m, m : 2 * m] = -a * eye
        rhs[:m] = u0 / dt + c * v0
        # (v1 - v0)/dt + κL(a u1 + c u0) + (γ1 L + γ2)(a v1 + c v0) + (a R1 + c R0) b = 0
        damp = self.g1 * L + self.g2 * eye
        M[m : 2 * m, :m] = a * self.kappa * L
        M[m : 2 * m, m : 2 * m] = eye / dt + a * damp
        M[m : 2 * m, 2 * m] = a * b
        rhs[m : 2 * m] = v0 / dt - c * self.kappa * (L @ u0) - c * (damp @ v0) - c * r0 * b
        # (R1 - R0)/dt = (w / (2 sqrt(E))) Σ dF (u1 - u0)/dt
        coef = self.w / (2 * np.sqrt(e) * dt)
        M[2 * m, :m] = -coef * d
        M[2 * m, 2 * m] = 1 / dt
        rhs[2 * m] = r0 / dt - coef * d @ u0
        x = np.linalg.solve(M, rhs)
        shape = (self.nx, self.nx)
        return x[:m].reshape(shape), x[m : 2 * m].reshape(shape), float(x[2 * m])

    def predictor(self, u0, v0, r0, tau):
        return self._solve(u0, v0, r0, u0, tau / 2, centred=False)

    def step(self, u0, v0, r0, ut, tau):
        return self._solve(u0, v0, r0, ut, tau, centred=True)

    def trajectory(self, u0, v0, tau, steps):
        """``[(u, v, R)]`` for ``n = 0 .. steps`` plus the start-up triple."""
        r0 = float(np.sqrt(self.energy(u0)))
        half = self.predictor(u0, v0, r0, tau)
        out = [(u0, v0, r0)]
        u_prev = None
        u, v, r = u0, v0, r0
        for n in range(steps):
            ut = half[0] if n == 0 else 1.5 * u - 0.5 * u_prev
            u_prev = u
            u, v, r = self.step(u, v, r, ut, tau)
            out.append((u, v, r))
        return half, out


def smooth_random_field(grid, rng, max_mode=2, amplitude=1.0):
    """Real trigonometric polynomial with random coefficients on low modes."""
    x, y = grid.mesh()
    out = np.zeros(grid.shape)
    for s in range(max_mode + 1):
        for l in range(-max_mode, max_mode + 1):
            a, b = rng.normal(size=2)
            phase = 2 * np.pi * (s * (x - grid.xmin) / grid.lx + l * (y - grid.ymin) / grid.ly)
            out += a * np.cos(phase) + b * np.sin(phase)
    return amplitude * out / np.max(np.abs(out))
