"""Torus-invariant potentials in logarithmic coordinates x_i = ln|z_i|^2.

For a finite exponent set A the potential u_A(x) = ln sum_a exp(x.a) is the
log-sum-exp; its gradient is the moment map and its Hessian is the covariance
of the Gibbs weights on A.  Symplectic volume uses the convention
int omega^n = n! * (Lebesgue volume of the moment image), with
omega = dd^c phi and dd^c = (i/2pi) d dbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from oklab.errors import DimensionError, InputError, NumericFailure
from oklab.polytope import RatPolytope, convex_hull
from oklab.quadrature import cubature


class MomentModel:
    """Exponent multiset A with evaluators for u_A, its gradient and Hessian."""

    def __init__(self, exponents: Iterable[Sequence[int]]):
        A = np.array([tuple(a) for a in exponents], dtype=float)
        if A.ndim != 2 or len(A) == 0:
            raise InputError("a moment model needs a nonempty set of exponents")
        self.A = A
        self.n = A.shape[1]
        self._hull = None

    @classmethod
    def from_leading_set(cls, leading) -> "MomentModel":
        return cls(leading.exponents)

    @property
    def hull(self) -> RatPolytope:
        if self._hull is None:
            self._hull = convex_hull([tuple(int(x) for x in a) for a in self.A])
        return self._hull

    def _x(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise DimensionError(f"x has {x.shape[-1]} coordinates, model has n={self.n}")
        return x

    def _weights(self, x):
        s = x @ self.A.T
        s = s - s.max(axis=-1, keepdims=True)
        w = np.exp(s)
        return w / w.sum(axis=-1, keepdims=True)


def potential(model: MomentModel, x) -> np.ndarray:
    x = model._x(x)
    s = x @ model.A.T
    top = s.max(axis=-1)
    return top + np.log(np.exp(s - top[..., None]).sum(axis=-1))


def moment_map(model: MomentModel, x) -> np.ndarray:
    x = model._x(x)
    return model._weights(x) @ model.A


def hessian(model: MomentModel, x) -> np.ndarray:
    x = model._x(x)
    w = model._weights(x)
    mean = w @ model.A
    second = np.einsum("...k,ki,kj->...ij", w, model.A, model.A)
    return second - mean[..., :, None] * mean[..., None, :]


@dataclass(frozen=True)
class Box:
    """Axis-parallel box in x-coordinates; bounds may be infinite."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if len(self.lo) != len(self.hi):
            raise DimensionError("box bounds of different length")
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise InputError(f"empty box {self.lo} .. {self.hi}")

    @classmethod
    def cube(cls, center, half_width) -> "Box":
        c = np.asarray(center, dtype=float)
        return cls(tuple(c - half_width), tuple(c + half_width))

    @property
    def n(self) -> int:
        return len(self.lo)

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(self.lo)) and all(np.isfinite(self.hi))

    def contains(self, x, strict=False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = np.array(self.lo), np.array(self.hi)
        if strict:
            return np.all((x > lo) & (x < hi), axis=-1)
        return np.all((x >= lo) & (x <= hi), axis=-1)

    def inside(self, other: "Box") -> bool:
        """Strict inclusion of the closed box in the interior of ``other``."""
        return all(a > c for a, c in zip(self.lo, other.lo)) and all(b < d for b, d in zip(self.hi, other.hi))

    def grid(self, resolution: int) -> np.ndarray:
        if not self.bounded:
            raise InputError("cannot grid an unbounded box")
        axes = [np.linspace(a, b, resolution) for a, b in zip(self.lo, self.hi)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.n)

    def boundary_grid(self, resolution: int) -> np.ndarray:
        g = self.grid(resolution)
        on = np.zeros(len(g), dtype=bool)
        for i in range(self.n):
            on |= np.isclose(g[:, i], self.lo[i]) | np.isclose(g[:, i], self.hi[i])
        return g[on]

    def expanded(self, amount: float) -> "Box":
        return Box(tuple(a - amount for a in self.lo), tuple(b + amount for b in self.hi))


def _require_full_dimensional(model: MomentModel):
    if not model.hull.full_dimensional:
        raise InputError("Conv(A) is not full-dimensional; the symplectic volume degenerates")


def symplectic_volume(model: MomentModel, region: Box | str = "all", rtol: float = 1e-3, atol: float = 1e-8) -> float:
    """Integral of det Hess(u_A) over an x-region: the Lebesgue volume of its moment image.

    Multiply by n! for the omega^n mass of the corresponding torus-invariant set.
    """
    _require_full_dimensional(model)
    if isinstance(region, str):
        if region != "all":
            raise InputError(f"unknown region {region!r}")
        region = Box((-np.inf,) * model.n, (np.inf,) * model.n)
    if region.n != model.n:
        raise DimensionError("region and model dimensions differ")
    value, _ = cubature(lambda x: np.linalg.det(hessian(model, x)), region.lo, region.hi, rtol=rtol, atol=atol)
    return value


def omega_mass(model: MomentModel, region: Box | str = "all", **kw) -> float:
    """n! times :func:`symplectic_volume`."""
    return math.factorial(model.n) * symplectic_volume(model, region, **kw)


def inverse_moment_map(model: MomentModel, y, tol: float = 1e-10, max_iter: int = 200):
    """Legendre inversion: x with grad u_A(x) = y, by damped Newton on u_A(x) - y.x.

    Works on a batch of targets (converged targets are frozen); returns (x, converged mask).
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x = np.zeros_like(y)
    active = np.arange(len(y))

    def objective(xx, yy):
        return potential(model, xx) - np.sum(xx * yy, axis=-1)

    for _ in range(max_iter):
        xa, ya = x[active], y[active]
        g = moment_map(model, xa) - ya
        moving = np.linalg.norm(g, axis=-1) >= tol
        active, xa, ya, g = active[moving], xa[moving], ya[moving], g[moving]
        if len(active) == 0:
            break
        H = hessian(model, xa) + 1e-14 * np.eye(model.n)
        step = -np.linalg.solve(H, g[..., None])[..., 0]
        f0 = objective(xa, ya)
        chosen = np.zeros(len(active))
        for t in (1.0, 0.5, 0.25, 0.125, 1 / 16, 1 / 64, 1 / 256):
            ok = (chosen == 0) & (objective(xa + t * step, ya) < f0 - 1e-16 * np.abs(f0))
            chosen[ok] = t
        chosen[chosen == 0] = 1 / 256
        x[active] = xa + chosen[:, None] * step
    g = moment_map(model, x) - y
    return x, np.linalg.norm(g, axis=-1) < 1e-8


def _box_boundary_curve(model: MomentModel, box: Box, gap: float) -> np.ndarray:
    """Moment image of the boundary of a bounded box, refined until consecutive images are within ``gap``."""
    if model.n == 1:
        return moment_map(model, np.array([[box.lo[0]], [box.hi[0]]]))
    if model.n != 2:
        raise DimensionError("image_hausdorff supports n <= 2")
    (a0, a1), (b0, b1) = box.lo, box.hi
    corners = [(a0, a1), (b0, a1), (b0, b1), (a0, b1), (a0, a1)]
    out = []
    for p, q in zip(corners, corners[1:]):
        t = np.linspace(0.0, 1.0, 2001)
        for _ in range(30):
            pts = np.array(p) + t[:, None] * (np.array(q) - np.array(p))
            img = moment_map(model, pts)
            jumps = np.linalg.norm(np.diff(img, axis=0), axis=1)
            bad = np.nonzero(jumps > gap)[0]
            if len(bad) == 0:
                break
            t = np.sort(np.concatenate([t, (t[bad] + t[bad + 1]) / 2]))
        out.append(img)
    return np.concatenate(out)


def _polygon_boundary_samples(P: RatPolytope, spacing: float) -> np.ndarray:
    verts = np.array([[float(c) for c in v] for v in P.vertices])
    if P.n == 1:
        return verts
    pts = [verts]
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            u, w = P.vertices[i], P.vertices[j]
            shared = [f for f in P.facets if sum(a * b for a, b in zip(f[0], u)) == f[1]
                      and sum(a * b for a, b in zip(f[0], w)) == f[1]]
            if not shared:
                continue
            m = max(2, int(np.linalg.norm(verts[i] - verts[j]) / spacing) + 1)
            t = np.linspace(0, 1, m)[:, None]
            pts.append(verts[i] + t * (verts[j] - verts[i]))
    return np.concatenate(pts)


def image_hausdorff(model: MomentModel, R: float, spacing: float = 4e-3, interior_step: float = 0.05) -> float:
    """Hausdorff distance between grad u_A([-R, R]^n) and Conv(A), for n <= 2.

    Targets in Conv(A) are tested for membership in the image by Legendre
    inversion; the remaining ones are measured against the refined image of the
    box boundary.  The estimate is accurate to about ``spacing``.
    """
    from scipy.spatial import cKDTree

    _require_full_dimensional(model)
    box = Box((-R,) * model.n, (R,) * model.n)
    P = model.hull
    curve = _box_boundary_curve(model, box, spacing / 2)
    tree = cKDTree(curve)

    facets = [(np.array(nrm, dtype=float), float(off)) for nrm, off in P.facets]
    inner = moment_map(model, box.grid(41))
    outside = max(
        float(np.max((inner @ g - c) / np.linalg.norm(g))) for g, c in facets
    )
    forward = max(0.0, outside)

    boundary = _polygon_boundary_samples(P, spacing)
    lo = np.array([float(min(v[i] for v in P.vertices)) for i in range(P.n)])
    hi = np.array([float(max(v[i] for v in P.vertices)) for i in range(P.n)])
    axes = [np.arange(a, b + interior_step, interior_step) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.n)
    depth = np.min([c - grid @ g for g, c in facets], axis=0)
    # boundary samples pushed toward the vertex barycenter cover the collar
    centre = np.array([float(sum(v[i] for v in P.vertices)) / len(P.vertices) for i in range(P.n)])
    d = centre - boundary
    d = d / np.maximum(np.linalg.norm(d, axis=1, keepdims=True), 1e-300)
    band = [boundary + off * d for off in spacing * np.array([1, 2, 4, 8, 16, 32])]
    interior = np.concatenate([grid[depth > 0]] + band)
    norms = [np.linalg.norm(g) for g, _ in facets]
    strictly = np.all([interior @ g < c - 1e-12 * nm for (g, c), nm in zip(facets, norms)], axis=0)
    interior = interior[strictly]
    x, ok = inverse_moment_map(model, interior)
    covered = ok & box.contains(x)
    missing = interior[~covered]
    targets = np.concatenate([boundary, missing]) if len(missing) else boundary
    backward = float(tree.query(targets)[0].max())
    return max(forward, backward)


# ----------------------------------------------------------- regularized max


@dataclass(frozen=True)
class RegMax:
    """Smooth convex max: (x + y + m(x - y)) / 2 with m an even C^2 quartic equal to |t| for |t| >= delta."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise InputError(f"regularization width must be positive, got {self.delta}")

    def m(self, t):
        t = np.asarray(t, dtype=float)
        d = self.delta
        inner = 3 * d / 8 + 3 * t**2 / (4 * d) - t**4 / (8 * d**3)
        return np.where(np.abs(t) >= d, np.abs(t), inner)

    def dm(self, t):
        t = np.asarray(t, dtype=float)
        d = self.delta
        return np.where(np.abs(t) >= d, np.sign(t), 3 * t / (2 * d) - t**3 / (2 * d**3))

    def d2m(self, t):
        t = np.asarray(t, dtype=float)
        d = self.delta
        return np.where(np.abs(t) >= d, 0.0, 3 / (2 * d) * (1 - t**2 / d**2))

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        t = x - y
        exact = np.maximum(x, y)
        return np.where(np.abs(t) >= self.delta, exact, (x + y + self.m(t)) / 2)

    def combine(self, f, grad_f, hess_f, g, grad_g, hess_g):
        """Value, gradient and Hessian of reg_max(f, g) by the chain rule."""
        t = f - g
        dm, d2m = self.dm(t), self.d2m(t)
        a = ((1 + dm) / 2)[..., None]
        b = ((1 - dm) / 2)[..., None]
        value = self(f, g)
        grad = a * grad_f + b * grad_g
        diff = grad_f - grad_g
        hess = (a[..., None] * hess_f + b[..., None] * hess_g
                + (d2m / 2)[..., None, None] * diff[..., :, None] * diff[..., None, :])
        return value, grad, hess


def reg_max(spec: RegMax | float, x, y):
    spec = spec if isinstance(spec, RegMax) else RegMax(spec)
    return spec(x, y)


# ---------------------------------------------------------- capped potential


class PotentialField:
    """phi' = reg_max(phi_cap + C + delta, u_A), phi_cap a Legendre-capped version of sum exp(x_i).

    phi_cap(x) = sup { p.x - v(p) - b(p) : p in K }, with v(p) = sum p_i ln p_i - p_i
    the Legendre transform of sum exp(x_i), K an open box around the gradient
    box G of U, and b a separable C^2 barrier vanishing on G and blowing up at
    the sides of K.  So phi_cap equals sum exp(x_i) on U, is strictly convex
    everywhere, and its gradient stays inside K.
    """

    def __init__(self, model: MomentModel, U: Box, shift: float, delta: float, k_lo, k_hi):
        self.model = model
        self.U = U
        self.shift = shift
        self.regmax = RegMax(delta)
        self.g_lo = np.exp(np.array(U.lo))
        self.g_hi = np.exp(np.array(U.hi))
        self.k_lo = np.asarray(k_lo, dtype=float)
        self.k_hi = np.asarray(k_hi, dtype=float)

    @property
    def delta(self) -> float:
        return self.regmax.delta

    def _barrier(self, p):
        """b, b', b'' of the separable barrier at p (inside K)."""
        b = np.zeros_like(p)
        db = np.zeros_like(p)
        d2b = np.zeros_like(p)
        for side in ("hi", "lo"):
            if side == "hi":
                u = np.maximum(p - self.g_hi, 0.0)
                w = self.k_hi - p
                sign = 1.0
            else:
                u = np.maximum(self.g_lo - p, 0.0)
                w = p - self.k_lo
                sign = -1.0
            w = np.maximum(w, 1e-300)
            b += u**3 / w
            db += sign * (3 * u**2 / w + u**3 / w**2)
            d2b += 6 * u / w + 6 * u**2 / w**2 + 2 * u**3 / w**3
        return b, db, d2b

    def _argmax(self, x):
        """Maximizer p(x) of p.x - v(p) - b(p), i.e. ln p + b'(p) = x, per axis by bisection."""
        e = np.exp(np.clip(x, -700, 700))
        inside = (e >= self.g_lo) & (e <= self.g_hi)
        lo = np.broadcast_to(self.k_lo, x.shape).copy()
        hi = np.broadcast_to(self.k_hi, x.shape).copy()
        for _ in range(200):
            mid = (lo + hi) / 2
            f = np.log(mid) + self._barrier(mid)[1] - x
            lo = np.where(f < 0, mid, lo)
            hi = np.where(f < 0, hi, mid)
        return np.where(inside, e, (lo + hi) / 2), inside

    def cap(self, x):
        x = np.asarray(x, dtype=float)
        p, inside = self._argmax(x)
        b, _, d2b = self._barrier(p)
        value = np.where(inside, p, p * x - p * np.log(p) + p - b).sum(axis=-1)
        hess = np.zeros(x.shape + (x.shape[-1],))
        idx = np.arange(x.shape[-1])
        hess[..., idx, idx] = 1.0 / (1.0 / p + d2b)
        return value, p, hess

    def euclidean(self, x):
        return np.exp(np.asarray(x, dtype=float)).sum(axis=-1)

    def evaluate(self, x):
        """(value, gradient, Hessian) of phi' at points x of shape (N, n)."""
        x = np.asarray(x, dtype=float)
        cv, cg, ch = self.cap(x)
        lift = self.shift + self.delta
        return self.regmax.combine(
            cv + lift, cg, ch,
            potential(self.model, x), moment_map(self.model, x), hessian(self.model, x),
        )

    def value(self, x):
        return self.evaluate(x)[0]

    def correction(self, x):
        """g = phi' - u_A."""
        return self.value(x) - potential(self.model, x)

    def support_window(self, resolution: int = 41, growth: float = 1.0, max_steps: int = 60) -> Box:
        """Smallest tested box around U on whose boundary the correction g vanishes."""
        window = self.U
        for _ in range(max_steps):
            window = window.expanded(growth)
            if np.all(self.correction(window.boundary_grid(resolution)) == 0.0):
                return window
        raise NumericFailure("correction does not vanish on any tested window")

    def verify(self, resolution: int = 1000) -> dict:
        """Grid evidence for: equals exp-sum + C + delta on U, equals u_A off a window, convex."""
        n = self.model.n
        per_axis = max(2, int(round(resolution ** (1 / n))))
        u_pts = self.U.grid(per_axis)
        on_u = self.value(u_pts) - (self.euclidean(u_pts) + self.shift + self.delta)
        window = self.support_window()
        outer = window.expanded(2.0).grid(per_axis)
        inside_window = window.contains(outer)
        g_out = self.correction(outer[~inside_window])
        all_pts = np.concatenate([u_pts, outer])
        eig = np.linalg.eigvalsh(self.evaluate(all_pts)[2]).min()
        g_all = self.correction(outer)
        return {
            "equal_on_U": float(np.max(np.abs(on_u))),
            "window": window,
            "max_outside_window": float(np.max(np.abs(g_out))) if len(g_out) else 0.0,
            "max_abs_correction": float(np.max(np.abs(g_all))),
            "min_hessian_eigenvalue": float(eig),
        }


def shrunk_facets(P: RatPolytope, margin: float):
    """Non-coordinate facets moved inward by ``margin`` (Euclidean distance)."""
    out = []
    for nrm, off in P.facets:
        if off == 0 and sum(1 for a in nrm if a) == 1 and min(nrm) == -1:
            continue
        g = np.array(nrm, dtype=float)
        out.append((g, float(off) - margin * np.linalg.norm(g)))
    return out


def _box_fits(lo, hi, facets) -> bool:
    n = len(lo)
    for bits in range(2**n):
        corner = np.where([(bits >> i) & 1 for i in range(n)], hi, lo)
        if any(corner @ g >= c for g, c in facets):
            return False
    return True


def capped_potential(model: MomentModel, U: Box, margin: float, delta: float = 0.5) -> PotentialField:
    """Potential equal to sum exp(x_i) + const on U and to u_A off a compact set.

    The gradient box of U must lie in Conv(A)^ess pulled in by ``margin`` from
    every non-coordinate facet; otherwise InputError names the offending corner.
    """
    if margin is None or not margin >= 0:
        raise InputError("capped_potential needs an explicit nonnegative margin")
    _require_full_dimensional(model)
    if U.n != model.n or not U.bounded:
        raise InputError("U must be a bounded box of the model's dimension")
    lo, hi = np.exp(np.array(U.lo)), np.exp(np.array(U.hi))
    facets = shrunk_facets(model.hull, margin)
    for bits in range(2**model.n):
        corner = np.where([(bits >> i) & 1 for i in range(model.n)], hi, lo)
        for g, c in facets:
            if corner @ g >= c:
                err = InputError(
                    f"gradient point {tuple(float(v) for v in corner)} of U is not inside "
                    f"Conv(A)^ess shrunk by {margin}"
                )
                err.point = tuple(float(v) for v in corner)
                raise err
    # widen G to the barrier box K, still inside the shrunk body
    step_lo, step_hi = 0.0, 1.0
    for _ in range(60):
        mid = (step_lo + step_hi) / 2
        if _box_fits(lo / (1 + mid), hi + mid, facets):
            step_lo = mid
        else:
            step_hi = mid
    ext = step_lo / 2
    k_lo, k_hi = lo / (1 + ext), hi + ext
    # u_A and the exp-sum both increase in every x_i, so corners bound u_A - exp-sum on U
    shift = float(potential(model, np.array(U.hi)) - np.exp(np.array(U.lo)).sum()) + 1e-9
    return PotentialField(model, U, shift, delta, k_lo, k_hi)


# ----------------------------------------------------- standard-form volumes


def ellipsoid_symplectic_volume(a: Sequence[float], epsabs: float = 1e-10, epsrel: float = 1e-8) -> float:
    """omega_st^n mass of {sum |z_i|^2 / a_i < 1} by iterated adaptive quadrature in x.

    Integrates det Hess(sum exp(x_i)) = exp(sum x_i) over sum exp(x_i)/a_i < 1
    and multiplies by n!.
    """
    a = [float(v) for v in a]
    n = len(a)
    if n == 0 or any(v <= 0 for v in a):
        raise InputError("ellipsoid parameters must be positive")

    def integrand(*xs):
        return math.exp(sum(xs))

    def bound(i):
        def limits(*outer):
            used = sum(math.exp(x) / a[j] for j, x in enumerate(reversed(outer)))
            rest = max(1.0 - used, 1e-300)
            return (-np.inf, math.log(a[i] * rest))
        return limits

    ranges = [bound(i) for i in reversed(range(n))]
    val, _ = integrate.nquad(integrand, ranges, opts={"epsabs": epsabs, "epsrel": epsrel})
    return math.factorial(n) * val


def levi_density(phi: Callable[[np.ndarray], np.ndarray], z: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Density of (dd^c phi)^n against Lebesgue measure on C^n = R^2n.

    ``z`` has shape (N, 2n) laid out as (x_1, y_1, ..., x_n, y_n); the complex
    Hessian is assembled from central differences of the real one.
    """
    z = np.asarray(z, dtype=float)
    N, m = z.shape
    n = m // 2
    H = np.zeros((N, m, m))
    f0 = phi(z)
    for i in range(m):
        ei = np.zeros(m)
        ei[i] = h
        H[:, i, i] = (phi(z + ei) - 2 * f0 + phi(z - ei)) / h**2
        for j in range(i + 1, m):
            ej = np.zeros(m)
            ej[j] = h
            val = (phi(z + ei + ej) - phi(z + ei - ej) - phi(z - ei + ej) + phi(z - ei - ej)) / (4 * h * h)
            H[:, i, j] = H[:, j, i] = val
    xs, ys = np.arange(0, m, 2), np.arange(1, m, 2)
    real = (H[:, xs][:, :, xs] + H[:, ys][:, :, ys]) / 4
    imag = (H[:, xs][:, :, ys] - H[:, ys][:, :, xs]) / 4
    levi = real + 1j * imag
    det = np.linalg.det(levi).real
    return math.factorial(n) / math.pi**n * det


def monte_carlo_omega_mass(
    phi: Callable[[np.ndarray], np.ndarray],
    inside: Callable[[np.ndarray], np.ndarray],
    radius: float,
    n: int,
    samples: int = 400_000,
    seed: int = 0,
    batch: int = 100_000,
) -> tuple[float, float]:
    """Monte-Carlo integral of (dd^c phi)^n over {inside(z)} within the cube [-radius, radius]^2n.

    Returns (estimate, standard error).
    """
    rng = np.random.default_rng(seed)
    cube = (2 * radius) ** (2 * n)
    total, total_sq, count = 0.0, 0.0, 0
    while count < samples:
        k = min(batch, samples - count)
        z = rng.uniform(-radius, radius, size=(k, 2 * n))
        mask = inside(z)
        vals = np.zeros(k)
        if mask.any():
            vals[mask] = levi_density(phi, z[mask])
        total += vals.sum()
        total_sq += (vals**2).sum()
        count += k
    mean = total / count
    var = max(total_sq / count - mean**2, 0.0)
    return cube * mean, cube * math.sqrt(var / count)


def log_coordinates(z: np.ndarray) -> np.ndarray:
    """x_i = ln|z_i|^2 for z laid out as (x_1, y_1, ..., x_n, y_n)."""
    z = np.asarray(z, dtype=float)
    return np.log(z[:, 0::2] ** 2 + z[:, 1::2] ** 2)
