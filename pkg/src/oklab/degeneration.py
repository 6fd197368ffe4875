"""The tau^gamma degeneration of a distinguished basis and the gluing certificate.

Substituting z -> tau^gamma z = (tau^g1 z_1, ..., tau^gn z_n) and dividing by
tau^(alpha.gamma) turns s_alpha into

    r_alpha(z) = z^alpha + sum_{beta > alpha} a_beta tau^((beta - alpha).gamma) z^beta,

and a separating weight makes every tau-power a positive integer, so r_alpha
tends to the monomial z^alpha as tau -> 0.

The certificate works on the torus-invariant slice in logarithmic coordinates
x_i = ln|z_i|^2 and glues the toric potential phi_A = ln sum exp(x.alpha) to
psi_tau = ln sum |r_alpha|^2 with a regularized maximum.  Phases are handled
by triangle-inequality envelopes:

    psi_lo(x) = ln sum (|z^alpha| - E_alpha)_+^2  <=  psi_tau  <=  ln sum (|z^alpha| + E_alpha)^2 = psi_hi(x),

with E_alpha = sum |a_beta| tau^e |z^beta|.  So band inequalities certified
against the envelopes hold on whole torus orbits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from oklab.errors import DimensionError, InputError, NumericFailure, PropertyViolation
from oklab.moment import Box, MomentModel, RegMax, hessian, inverse_moment_map, moment_map, potential
from oklab.order import separating_weight, verify_separation
from oklab.sections import LeadingSet, PolySection

EIGEN_FLOOR = 1e-9
TAU_FLOOR = 1e-9
MAX_DELTA_HALVINGS = 20


class SeparationError(InputError):
    """The weight does not separate the basis; ``certificate`` names the offending pair."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class CertificateFailure(PropertyViolation):
    """No admissible tau, or an unstable grid; ``report`` holds the binding condition."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class RescaledTerm:
    exponent: tuple[int, ...]
    coefficient: Fraction
    tau_power: int


@dataclass(frozen=True)
class RescaledSection:
    """r_alpha with tau kept symbolic: the leading monomial plus (beta, a_beta, e_beta) terms."""

    alpha: tuple[int, ...]
    corrections: tuple[RescaledTerm, ...]

    def at(self, tau) -> PolySection:
        tau = Fraction(tau)
        terms = {self.alpha: Fraction(1)}
        for t in self.corrections:
            terms[t.exponent] = t.coefficient * tau**t.tau_power
        return PolySection(len(self.alpha), terms)


def _support_exponents(basis: LeadingSet) -> list[tuple[int, ...]]:
    out = set(basis.exponents)
    for s in basis.distinguished:
        out.update(s.terms)
    return sorted(out)


@dataclass(frozen=True)
class DegenerationRun:
    basis: LeadingSet
    gamma: tuple[int, ...]
    tau: Fraction
    ball_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(int(g) for g in self.gamma))
        object.__setattr__(self, "tau", Fraction(self.tau))
        if not 0 < self.tau < 1:
            raise InputError(f"tau must lie in (0, 1), got {self.tau}")
        if len(self.gamma) != self.basis.n:
            raise DimensionError(f"weight {self.gamma} does not match n={self.basis.n}")
        if not self.ball_radius > 0:
            raise InputError("ball radius must be positive")

    @classmethod
    def for_basis(cls, basis: LeadingSet, tau, ball_radius: float = 1.0) -> "DegenerationRun":
        """Run with the separating weight of all exponents occurring in the basis."""
        return cls(basis, separating_weight(_support_exponents(basis), basis.order), tau, ball_radius)


def rescaled_terms(run: DegenerationRun) -> list[RescaledSection]:
    """Exact symbolic form of every r_alpha; raises SeparationError if a tau-power is not positive."""
    support = _support_exponents(run.basis)
    bound = max(3 * (1 + max(sum(a) for a in run.basis.exponents)), max(sum(b) for b in support))
    if not verify_separation(run.basis.exponents, run.gamma, bound=bound, order=run.basis.order):
        raise SeparationError(
            f"weight {run.gamma} does not separate the leading exponents in order {run.basis.order}",
            certificate={"gamma": run.gamma, "bound": bound},
        )
    out = []
    for alpha, s in zip(run.basis.exponents, run.basis.distinguished):
        if s.terms.get(alpha) != 1:
            raise InputError(f"section of exponent {alpha} does not have leading coefficient 1")
        a_dot = sum(a * g for a, g in zip(alpha, run.gamma))
        corrections = []
        for beta, coef in sorted(s.terms.items()):
            if beta == alpha:
                continue
            e = sum(b * g for b, g in zip(beta, run.gamma)) - a_dot
            if e < 1:
                raise SeparationError(
                    f"term {beta} of the section with leading exponent {alpha} gets tau-power {e}",
                    certificate={"alpha": alpha, "beta": beta, "power": e, "gamma": run.gamma},
                )
            corrections.append(RescaledTerm(beta, coef, e))
        out.append(RescaledSection(alpha, tuple(corrections)))
    return out


def rescale_basis(run: DegenerationRun) -> list[PolySection]:
    """r_alpha(z) = tau^(-alpha.gamma) s_alpha(tau^gamma z), exact in the rational tau."""
    return [r.at(run.tau) for r in rescaled_terms(run)]


def audited_constant(run: DegenerationRun) -> float:
    """C = max_alpha sum |a_beta| rho^|beta|, so that degeneration_error <= C * tau."""
    rho = run.ball_radius
    return max(
        (sum(abs(float(t.coefficient)) * rho ** sum(t.exponent) for t in r.corrections) for r in rescaled_terms(run)),
        default=0.0,
    )


def degeneration_error(run: DegenerationRun) -> float:
    """Bound on max_alpha sup |r_alpha - z^alpha| over the polydisk |z_i| <= ball_radius."""
    rho, tau = run.ball_radius, float(run.tau)
    return max(
        (
            sum(abs(float(t.coefficient)) * tau**t.tau_power * rho ** sum(t.exponent) for t in r.corrections)
            for r in rescaled_terms(run)
        ),
        default=0.0,
    )


# ------------------------------------------------------------------ potentials on the real slice


class RescaledField:
    """psi_tau and its phase envelopes, evaluated at x = ln|z|^2 with tau numeric."""

    def __init__(self, sections: Sequence[RescaledSection], tau: float):
        self.n = len(sections[0].alpha)
        self.alpha = np.array([r.alpha for r in sections], dtype=float)
        rows, exps, coefs = [], [], []
        for i, r in enumerate(sections):
            for t in r.corrections:
                rows.append(i)
                exps.append(t.exponent)
                coefs.append(float(t.coefficient) * tau**t.tau_power)
        self.rows = np.array(rows, dtype=int)
        self.beta = np.array(exps, dtype=float).reshape(-1, self.n)
        self.coef = np.array(coefs, dtype=float)

    def _parts(self, x):
        """Leading moduli |z^alpha| and correction values, both as exp(.) of half-weights."""
        lead = np.exp(x @ self.alpha.T / 2)
        corr = self.coef * np.exp(x @ self.beta.T / 2)
        return lead, corr

    def _per_section(self, values):
        out = np.zeros(values.shape[:-1] + (len(self.alpha),))
        if values.shape[-1]:
            np.add.at(out.T, self.rows, values.T)
        return out

    def envelopes(self, x):
        """(psi_lo, psi_hi) at x; psi_lo is -inf where every leading term can be cancelled."""
        lead, corr = self._parts(x)
        err = self._per_section(np.abs(corr))
        lo = np.maximum(lead - err, 0.0)
        with np.errstate(divide="ignore"):
            return np.log((lo**2).sum(axis=-1)), np.log(((lead + err) ** 2).sum(axis=-1))

    def slice_value(self, x):
        """Value, gradient and Levi form (in w = log z) of psi_tau at the real point z = exp(x/2).

        For psi = ln |F|^2 with F(w) = (r_alpha(e^w)) the Levi form is the
        Fubini-Study pull-back (|F|^2 <F', F'> - <F', F><F, F'>) / |F|^4,
        which is the x-Hessian whenever psi is torus-invariant.
        """
        lead, corr = self._parts(x)
        F = lead + self._per_section(corr)
        dlead = lead[..., :, None] * self.alpha
        dcorr = corr[..., :, None] * self.beta
        dF = dlead.copy()
        for j in range(self.n):
            dF[..., j] += self._per_section(dcorr[..., j])
        norm = (F**2).sum(axis=-1)
        proj = np.einsum("...a,...aj->...j", F, dF)
        gram = np.einsum("...ai,...aj->...ij", dF, dF)
        value = np.log(norm)
        grad = proj / norm[..., None]
        levi = gram / norm[..., None, None] - grad[..., :, None] * grad[..., None, :]
        return value, grad, levi


# ------------------------------------------------------------------ cutoff


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (10 - 15 * u + 6 * u**2), 30 * u**2 * (1 - u) ** 2, 60 * u * (1 - u) * (1 - 2 * u)


class Cutoff:
    """f = 1 - prod_i (1 - S_i(x_i)): zero on U, one off the inner box K', quintic smoothstep between."""

    def __init__(self, U: Box, inner: Box):
        if not U.inside(inner):
            raise InputError("the cutoff needs U strictly inside the inner box")
        self.U, self.inner = U, inner

    def _axis(self, x, i):
        a, b = self.U.lo[i], self.U.hi[i]
        c, d = self.inner.lo[i], self.inner.hi[i]
        below, above = x < a, x > b
        u = np.where(below, (a - x) / (a - c), np.where(above, (x - b) / (d - b), 0.0))
        s, ds, d2s = _smoothstep(u)
        du = np.where(below, -1 / (a - c), np.where(above, 1 / (d - b), 0.0))
        return s, ds * du, d2s * du**2

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        parts = [self._axis(x[..., i], i) for i in range(n)]
        one_minus = np.stack([1 - p[0] for p in parts], axis=-1)

        def prod_except(*skip):
            keep = [i for i in range(n) if i not in skip]
            return np.prod(one_minus[..., keep], axis=-1) if keep else np.ones(x.shape[:-1])

        value = 1 - np.prod(one_minus, axis=-1)
        grad = np.stack([parts[i][1] * prod_except(i) for i in range(n)], axis=-1)
        hess = np.zeros(x.shape + (n,))
        for i in range(n):
            hess[..., i, i] = parts[i][2] * prod_except(i)
            for j in range(i + 1, n):
                hess[..., i, j] = hess[..., j, i] = -parts[i][1] * parts[j][1] * prod_except(i, j)
        return value, grad, hess


# ------------------------------------------------------------------ boxes


def _ess_facets(model: MomentModel):
    """Non-coordinate facets (normal, offset) of Conv(A) as floats."""
    out = []
    for nrm, off in model.hull.facets:
        coordinate = off == 0 and sum(1 for a in nrm if a) == 1 and min(nrm) == -1
        if not coordinate:
            out.append((np.array(nrm, dtype=float), float(off)))
    return out


def shrink_box(model: MomentModel, s: float, resolution: int = 17) -> Box:
    """Largest cube around mu^{-1}(b) whose moment image stays in b + s (Conv(A) - b).

    b is the vertex average of Conv(A).  Cubes are nested and mu is a
    diffeomorphism onto the interior, so testing the image of the cube's
    boundary grid decides the inclusion up to the grid.
    """
    if not 0 < s < 1:
        raise InputError(f"shrink factor must lie in (0, 1), got {s}; s >= 1 touches the boundary")
    hull = model.hull
    if not hull.full_dimensional:
        raise InputError("Conv(A) is not full-dimensional")
    b = np.array([[float(c) for c in v] for v in hull.vertices]).mean(axis=0)
    centers, ok = inverse_moment_map(model, b[None, :])
    if not ok[0]:
        raise NumericFailure("could not invert the moment map at the barycenter")
    center = centers[0]
    facets = [(np.array(nrm, dtype=float), float(off)) for nrm, off in hull.facets]
    bounds = [(g, g @ b + s * (c - g @ b)) for g, c in facets]

    def fits(h):
        pts = moment_map(model, Box.cube(center, h).boundary_grid(resolution))
        return all(np.all(pts @ g < c) for g, c in bounds)

    lo, hi = 0.0, 1.0
    while fits(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e6:
            raise InputError("shrunk body admits arbitrarily large cubes")
    for _ in range(50):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if fits(mid) else (lo, mid)
    if lo == 0:
        raise InputError("no cube around the barycenter fits the shrunk body")
    return Box.cube(center, lo)


# ------------------------------------------------------------------ certificate


@dataclass
class GluingCertificate:
    delta: float
    tau: float
    tau_exponent: int
    U: Box
    K: Box
    collar_width: tuple[float, ...]
    resolution: int
    margin_U: np.ndarray = field(repr=False)
    margin_collar: np.ndarray = field(repr=False)
    ball_margin: float = 0.0
    min_eig_phi: float = 0.0
    min_eig_glued: float = 0.0
    identity_U: float = 0.0
    identity_collar: float = 0.0
    delta_halvings: int = 0
    stable: bool = True
    refined: dict | None = None

    @property
    def min_margin_U(self) -> float:
        return float(self.margin_U.min())

    @property
    def min_margin_collar(self) -> float:
        return float(self.margin_collar.min())

    def report(self) -> str:
        lines = [
            "gluing certificate: OK",
            f"tau=2^-{self.tau_exponent}={self.tau:.6g}",
            f"delta={self.delta:.6g} (halved {self.delta_halvings} times)",
            f"U={_fmt_box(self.U)}",
            f"K={_fmt_box(self.K)}",
            f"collar width={', '.join(f'{w:.6g}' for w in self.collar_width)}",
            f"grid={self.resolution}^{self.U.n}",
            f"margin on U (phi - psi_hi + delta): min={self.min_margin_U:.6g} over {self.margin_U.size} points",
            f"margin near dK (psi_lo - 3 delta - phi): min={self.min_margin_collar:.6g} over {self.margin_collar.size} points",
            f"ball margin (1 - |tau^gamma z|^2 on K): {self.ball_margin:.6g}",
            f"min eigenvalue of phi=phi_A-4 delta f: {self.min_eig_phi:.6g}",
            f"min eigenvalue of glued potential: {self.min_eig_glued:.6g}",
            f"eigenvalue floor: {EIGEN_FLOOR:g}",
            f"glued - phi on U: {self.identity_U:.3g}",
            f"glued - (psi - 2 delta) near dK: {self.identity_collar:.3g}",
        ]
        if self.refined is not None:
            r = self.refined
            lines.append(
                f"grid {r['resolution']}^{self.U.n}: margin on U min={r['margin_U']:.6g}, "
                f"near dK min={r['margin_collar']:.6g}, min eigenvalue={r['min_eig']:.6g}, "
                f"signs preserved: {'yes' if self.stable else 'no'}"
            )
        return "\n".join(lines) + "\n"


def _fmt_box(b: Box) -> str:
    return " x ".join(f"[{a:.6g}, {c:.6g}]" for a, c in zip(b.lo, b.hi))


def _cell(K: Box, resolution: int) -> np.ndarray:
    return (np.array(K.hi) - np.array(K.lo)) / (resolution - 1)


def _inner(K: Box, width) -> Box:
    return Box(tuple(np.array(K.lo) + width), tuple(np.array(K.hi) - width))


def _collar_points(K: Box, resolution: int, width):
    """Grid points of K within ``width`` of its boundary."""
    pts = K.grid(resolution)
    near = np.zeros(len(pts), dtype=bool)
    for i in range(K.n):
        tol = 1e-9 * width[i]
        near |= (pts[:, i] <= K.lo[i] + width[i] + tol) | (pts[:, i] >= K.hi[i] - width[i] - tol)
    return pts[near]


class _Gluing:
    def __init__(self, basis: LeadingSet, gamma, U: Box, K: Box):
        self.basis = basis
        self.gamma = np.array(gamma, dtype=float)
        self.model = MomentModel(basis.exponents)
        self.U, self.K = U, K
        run = DegenerationRun(basis, gamma, Fraction(1, 2))
        self.sections = rescaled_terms(run)

    def phi(self, x, cutoff: Cutoff, delta: float):
        f, gf, hf = cutoff.evaluate(x)
        return (potential(self.model, x) - 4 * delta * f,
                moment_map(self.model, x) - 4 * delta * gf,
                hessian(self.model, x) - 4 * delta * hf)

    def evidence(self, resolution: int, delta: float, tau: float, width):
        """All pointwise quantities of the certificate on a grid; the collar width is fixed."""
        collar = _collar_points(self.K, resolution, width)
        inner = _inner(self.K, width)
        cutoff = Cutoff(self.U, inner)
        field_ = RescaledField(self.sections, tau)
        u_pts = self.U.grid(resolution)
        k_pts = self.K.grid(resolution)

        phi_u = self.phi(u_pts, cutoff, delta)[0]
        margin_u = phi_u - (field_.envelopes(u_pts)[1] - delta)
        phi_c = self.phi(collar, cutoff, delta)[0]
        margin_c = (field_.envelopes(collar)[0] - 3 * delta) - phi_c
        ball = 1 - float(np.sum(tau ** (2 * self.gamma) * np.exp(np.array(self.K.hi))))

        regmax = RegMax(delta)
        pv, pg, ph = self.phi(k_pts, cutoff, delta)
        eig_phi = float(np.linalg.eigvalsh(ph).min())
        sv, sg, sh = field_.slice_value(k_pts)
        glued = regmax.combine(pv, pg, ph, sv - 2 * delta, sg, sh)
        eig_glued = float(np.linalg.eigvalsh(glued[2]).min())

        on_u = self.U.contains(k_pts)
        in_collar = ~inner.contains(k_pts, strict=True)
        ident_u = float(np.max(np.abs(glued[0][on_u] - pv[on_u]), initial=0.0))
        ident_c = float(np.max(np.abs(glued[0][in_collar] - (sv[in_collar] - 2 * delta)), initial=0.0))
        return {
            "margin_U": margin_u, "margin_collar": margin_c, "ball": ball,
            "eig_phi": eig_phi, "eig_glued": eig_glued,
            "identity_U": ident_u, "identity_collar": ident_c,
        }


def _first_violation(ev) -> tuple[str, float] | None:
    checks = [
        ("(a) phi > psi_hi - delta on U", float(ev["margin_U"].min())),
        ("(b) phi < psi_lo - 3 delta near dK", float(ev["margin_collar"].min())),
        ("(c) tau^gamma z in B_1 on K", ev["ball"]),
    ]
    for name, value in checks:
        if not value > 0:
            return name, value
    return None


def gluing_certificate(
    A: LeadingSet,
    gamma: Sequence[int] | None,
    U: Box,
    K: Box,
    delta: float,
    grid: int = 64,
) -> GluingCertificate:
    """Search tau = 2^-1, 2^-2, ... for the two band inequalities and certify the glued potential.

    Raises InputError on a failed precondition and CertificateFailure when no
    tau above 1e-9 works or when doubling the grid flips a sign.
    """
    if grid < 3:
        raise InputError("grid resolution must be at least 3")
    if not delta > 0:
        raise InputError("delta must be positive")
    if U.n != A.n or K.n != A.n:
        raise DimensionError("boxes and basis have different dimensions")
    if not (U.bounded and K.bounded):
        raise InputError("U and K must be bounded boxes; an unbounded side touches the boundary of Conv(A)")
    model = MomentModel(A.exponents)
    if not model.hull.full_dimensional:
        raise InputError("Conv(A) is not full-dimensional")
    if not U.inside(K):
        raise InputError("U must lie strictly inside K")
    width = _cell(K, grid)
    if np.any(2 * width >= np.array(K.hi) - np.array(K.lo)) or not U.inside(_inner(K, width)):
        raise InputError("U reaches into the collar of K at this grid resolution")
    images = moment_map(model, U.grid(grid))
    for g, c in _ess_facets(model):
        if np.any(images @ g >= c):
            raise InputError("moment image of U is not strictly inside Conv(A)^ess")
    if gamma is None:
        gamma = separating_weight(_support_exponents(A), A.order)
    glue = _Gluing(A, gamma, U, K)

    halvings = 0
    while True:
        cutoff = Cutoff(U, _inner(K, width))
        eig = float(np.linalg.eigvalsh(glue.phi(K.grid(grid), cutoff, delta)[2]).min())
        if eig >= EIGEN_FLOOR:
            break
        if halvings == MAX_DELTA_HALVINGS:
            raise CertificateFailure(
                "phi_A - 4 delta f is not strictly convex for any tried delta",
                {"condition": "strict psh of phi", "delta": delta, "min_eigenvalue": eig},
            )
        delta /= 2
        halvings += 1

    binding = None
    j = 1
    while 2.0**-j >= TAU_FLOOR:
        tau = 2.0**-j
        ev = glue.evidence(grid, delta, tau, width)
        binding = _first_violation(ev)
        if binding is None:
            break
        j += 1
    else:
        raise CertificateFailure(
            f"no admissible tau above {TAU_FLOOR:g}; binding condition {binding[0]}",
            {"condition": binding[0], "margin": binding[1], "tau": 2.0 ** -(j - 1), "delta": delta},
        )

    if ev["eig_glued"] < EIGEN_FLOOR:
        raise CertificateFailure(
            "glued potential is not strictly convex on the grid",
            {"condition": "strict psh of glued potential", "min_eigenvalue": ev["eig_glued"], "tau": tau},
        )
    fine = glue.evidence(2 * grid - 1, delta, tau, width)
    stable = (_first_violation(fine) is None) and fine["eig_glued"] >= EIGEN_FLOOR and fine["eig_phi"] >= EIGEN_FLOOR
    cert = GluingCertificate(
        delta=delta, tau=tau, tau_exponent=j, U=U, K=K,
        collar_width=tuple(float(v) for v in width), resolution=grid,
        margin_U=ev["margin_U"], margin_collar=ev["margin_collar"], ball_margin=ev["ball"],
        min_eig_phi=ev["eig_phi"], min_eig_glued=ev["eig_glued"],
        identity_U=ev["identity_U"], identity_collar=ev["identity_collar"],
        delta_halvings=halvings, stable=stable,
        refined={
            "resolution": 2 * grid - 1,
            "margin_U": float(fine["margin_U"].min()),
            "margin_collar": float(fine["margin_collar"].min()),
            "min_eig": min(fine["eig_glued"], fine["eig_phi"]),
        },
    )
    if not stable:
        raise CertificateFailure("doubling the grid flips a certified sign", {"condition": "grid stability", "certificate": cert})
    return cert
