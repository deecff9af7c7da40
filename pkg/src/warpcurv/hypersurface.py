"""Discretized graph hypersurfaces t = u(x) inside a warped product.

A graph over a fiber chart carries the induced metric

    g_ij = u_i u_j + rho(u)^2 ghat_ij,

normal chosen so that a constant graph has N = -d/dt and Theta = -1.
Everything downstream (shape operator, principal curvatures, Newton
tensors, operator identities) is evaluated on the whole grid at once.

Frames.  Most curvature algebra happens in an orthonormal tangent frame
obtained from the Cholesky factor L of g (g = L L^T):

* frame components of grad f are ``L^{-1} @ (chart partials of f)``;
* a bilinear form F becomes ``L^{-1} F L^{-T}``;
* the shape operator in the frame is ``A~ = L^{-1} II L^{-T}``, which is
  symmetric and has the principal curvatures as eigenvalues.

Finite differencing wraps periodically; on non-periodic axes a margin of
cells is excluded from every audit.  The margin is sized for the deepest
differencing chain in the package (a divergence of a flux whose
potential already contains second derivatives: four nested stencils).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import symfun
from ._grid import diff, gradient, hessian, interior_mask, stencil_radius
from .ambient import WarpedProduct, warping_eval


@dataclass(frozen=True)
class DiscretizationConfig:
    """Stencil order, tolerances, and refinement depth for grid audits."""

    order: int = 4
    eigen_tol: float = 1e-10
    identity_tol: float = 1e-8
    refine_levels: int = 3
    # deepest stencil nesting is 4 (divergence-of-flux identities), so
    # audits stay this many stencil radii away from non-periodic edges
    margin_factor: int = 4

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")
        if self.refine_levels < 1:
            raise ValueError("need at least one refinement level")

    @property
    def margin_cells(self) -> int:
        return self.margin_factor * stencil_radius(self.order)


def _axes_from_box(box, shape, periodic):
    """Per-axis coordinates and spacing: periodic axes drop the endpoint."""
    axes, spacing = [], []
    for (lo, hi), n_pts, per in zip(box, shape, periodic):
        if per:
            h = (hi - lo) / n_pts
            axes.append(lo + h * np.arange(n_pts))
        else:
            h = (hi - lo) / (n_pts - 1)
            axes.append(lo + h * np.arange(n_pts))
        spacing.append(h)
    return axes, tuple(spacing)


@dataclass
class GraphImmersion:
    """A height field over a fiber chart, with grid metadata.

    ``orientation`` flips the unit normal: +1 gives Theta = -1/W < 0
    (the slice convention), -1 the opposite normal.  ``periodic`` may
    override the chart default per axis, e.g. to treat a non-periodic
    height patch on a torus chart.
    """

    W: WarpedProduct
    u: np.ndarray
    box: tuple
    periodic: tuple
    orientation: int = 1
    fn: callable = field(default=None, repr=False)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        n = self.W.fiber.n
        if self.u.ndim != n:
            raise ValueError(f"height grid must have {n} axes")
        if any(s < 8 for s in self.u.shape):
            raise ValueError("grid resolution must be at least 8 per axis")
        if len(self.box) != n or len(self.periodic) != n:
            raise ValueError("need one box range and periodic flag per axis")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        p = self.W.profile
        if np.min(self.u) < p.t_min or np.max(self.u) > p.t_max:
            raise ValueError("height field exits the profile interval")

    @classmethod
    def from_function(cls, W: WarpedProduct, fn, shape, box=None,
                      periodic=None, orientation: int = 1) -> "GraphImmersion":
        if isinstance(shape, int):
            shape = (shape,) * W.fiber.n
        if box is None:
            box = W.fiber.default_box()
        if periodic is None:
            periodic = W.fiber.periodic
        axes, _ = _axes_from_box(box, shape, periodic)
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        u = np.asarray(fn(mesh), dtype=float)
        return cls(W=W, u=u, box=tuple(tuple(b) for b in box),
                   periodic=tuple(bool(p) for p in periodic),
                   orientation=orientation, fn=fn)

    @property
    def shape(self):
        return self.u.shape

    @property
    def spacing(self):
        return _axes_from_box(self.box, self.shape, self.periodic)[1]

    def axes(self):
        return _axes_from_box(self.box, self.shape, self.periodic)[0]

    def mesh(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def refined(self, factor: int = 2) -> "GraphImmersion":
        """Dyadic refinement; requires the generating function."""
        if self.fn is None:
            raise ValueError("refinement needs an immersion built from a function")
        shape = tuple(s * factor if per else (s - 1) * factor + 1
                      for s, per in zip(self.shape, self.periodic))
        return GraphImmersion.from_function(
            self.W, self.fn, shape, box=self.box, periodic=self.periodic,
            orientation=self.orientation)


# ---------------------------------------------------------------------------
# geometry evaluation
# ---------------------------------------------------------------------------

@dataclass
class GeometryGrid:
    """All per-node geometric fields of a graph immersion.

    Index conventions: grid axes first, then tensor indices.  ``newton``
    stacks the frame Newton tensors ``P~_k`` as ``newton[..., k, :, :]``
    for k = 0..n-1; ``H`` holds H_0..H_n along the last axis.
    """

    imm: GraphImmersion
    cfg: DiscretizationConfig
    x: np.ndarray            # fiber chart mesh (..., n)
    u: np.ndarray
    du: np.ndarray           # chart partials u_i (..., n)
    hess_u: np.ndarray       # raw second partials of u (..., n, n)
    ghat: np.ndarray
    ghat_inv: np.ndarray
    gammahat: np.ndarray     # fiber Christoffels, analytic (..., k, i, j)
    rho: np.ndarray
    drho: np.ndarray
    d2rho: np.ndarray
    hcal: np.ndarray
    dhcal: np.ndarray
    sigma: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    L: np.ndarray
    L_inv: np.ndarray
    sqrt_det_g: np.ndarray
    w_factor: np.ndarray
    theta: np.ndarray
    normal: np.ndarray       # ambient components (..., n+1), index 0 along T
    a: np.ndarray            # frame components of grad h (..., n)
    grad_h_chart: np.ndarray
    II: np.ndarray           # second fundamental form, chart (..., n, n)
    shape_frame: np.ndarray  # A~ = L^-1 II L^-T (..., n, n)
    kappas: np.ndarray       # ascending principal curvatures (..., n)
    S: np.ndarray            # S_0..S_n (..., n+1)
    H: np.ndarray            # H_0..H_n (..., n+1)
    c: np.ndarray            # c_0..c_{n-1}
    newton: np.ndarray       # frame P~ stack (..., n, n, n)
    christoffel: np.ndarray  # induced-metric symbols, differenced
    interior: np.ndarray     # mask excluding differencing margins

    # -- conversions -------------------------------------------------------
    @property
    def n(self) -> int:
        return self.imm.W.fiber.n

    @property
    def spacing(self):
        return self.imm.spacing

    def grad_chart(self, f: np.ndarray) -> np.ndarray:
        """Chart components of grad f (indices up)."""
        df = gradient(f, self.spacing, self.cfg.order)
        return np.einsum("...ij,...j->...i", self.g_inv, df)

    def grad_frame(self, f: np.ndarray) -> np.ndarray:
        """Orthonormal-frame components of grad f."""
        df = gradient(f, self.spacing, self.cfg.order)
        return np.einsum("...ij,...j->...i", self.L_inv, df)

    def hess_covariant(self, f: np.ndarray) -> np.ndarray:
        """Covariant Hessian of f on the hypersurface (chart, differenced)."""
        df = gradient(f, self.spacing, self.cfg.order)
        return hessian(f, self.spacing, self.cfg.order) - np.einsum(
            "...kij,...k->...ij", self.christoffel, df)

    def form_to_frame(self, F: np.ndarray) -> np.ndarray:
        """Frame components of a (0,2) tensor: L^-1 F L^-T."""
        return np.einsum("...ij,...jk,...lk->...il", self.L_inv, F, self.L_inv)

    def frame_vector_to_chart(self, w: np.ndarray) -> np.ndarray:
        """Chart components of a tangent vector given in the frame."""
        return np.einsum("...ji,...j->...i", self.L_inv, w)

    def chart_vector_to_frame(self, v: np.ndarray) -> np.ndarray:
        return np.einsum("...ji,...j->...i", self.L, v)

    def ambient_components(self, v_chart: np.ndarray) -> np.ndarray:
        """Ambient (T, fiber) components of a tangent vector in chart form."""
        t_comp = np.einsum("...i,...i->...", v_chart, self.du)
        return np.concatenate([t_comp[..., None], v_chart], axis=-1)

    def divergence(self, Y_chart: np.ndarray) -> np.ndarray:
        """div Y = (det g)^{-1/2} d_i( (det g)^{1/2} Y^i ), differenced."""
        out = np.zeros(self.u.shape)
        for i in range(self.n):
            flux = self.sqrt_det_g * Y_chart[..., i]
            out += diff(flux, i, self.spacing[i], self.cfg.order)
        return out / self.sqrt_det_g

    def H_safe(self, j: int) -> np.ndarray:
        """H_j, with H_j = 0 for j > n."""
        if j > self.n:
            return np.zeros(self.u.shape)
        return self.H[..., j]

    # -- analytic Hessian forms (frame) -------------------------------------
    def height_hessian_frame(self) -> np.ndarray:
        """Closed-form Hessian of the height: hcal (I - a a^T) + Theta A~."""
        eye = np.eye(self.n)
        outer = self.a[..., :, None] * self.a[..., None, :]
        return (self.hcal[..., None, None] * (eye - outer)
                + self.theta[..., None, None] * self.shape_frame)

    def sigma_hessian_frame(self) -> np.ndarray:
        """Closed-form Hessian of sigma(h): rho' a a^T + rho Hess h."""
        outer = self.a[..., :, None] * self.a[..., None, :]
        return (self.drho[..., None, None] * outer
                + self.rho[..., None, None] * self.height_hessian_frame())


def evaluate_geometry(imm: GraphImmersion, cfg: DiscretizationConfig = None) -> GeometryGrid:
    """Evaluate the induced geometry of a graph on its whole grid."""
    if cfg is None:
        cfg = DiscretizationConfig()
    fiber = imm.W.fiber
    n = fiber.n
    x = imm.mesh()
    u = imm.u
    spacing = imm.spacing
    data = warping_eval(imm.W, u)
    rho, drho = np.asarray(data.rho), np.asarray(data.drho)

    du = gradient(u, spacing, cfg.order)
    hess_u = hessian(u, spacing, cfg.order)
    ghat = fiber.metric(x)
    ghat_inv = fiber.inverse_metric(x)
    gammahat = fiber.christoffel(x)

    g = du[..., :, None] * du[..., None, :] + (rho * rho)[..., None, None] * ghat
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise ValueError("singular induced metric on the grid")
    eye = np.eye(n)
    L_inv = np.linalg.solve(L, np.broadcast_to(eye, g.shape).copy())
    g_inv = np.einsum("...ki,...kj->...ij", L_inv, L_inv)
    sqrt_det_g = np.prod(np.diagonal(L, axis1=-2, axis2=-1), axis=-1)

    du_hat_sq = np.einsum("...ij,...i,...j->...", ghat_inv, du, du)
    w_factor = np.sqrt(1.0 + du_hat_sq / (rho * rho))
    sgn = float(imm.orientation)
    theta = -sgn / w_factor

    # N = sgn/W * (-d/dt + rho^-2 ghat^{jk} u_k d/dx^j)
    n_fiber = (sgn / (w_factor * rho * rho))[..., None] * np.einsum(
        "...jk,...k->...j", ghat_inv, du)
    normal = np.concatenate([theta[..., None], n_fiber], axis=-1)

    a = np.einsum("...ij,...j->...i", L_inv, du)
    # Sherman-Morrison: g^{-1} du = ghat^{-1} du / (rho^2 W^2)
    grad_h_chart = np.einsum("...ij,...j->...i", ghat_inv, du) / (
        rho * rho * w_factor * w_factor)[..., None]

    hess_u_fiber = hess_u - np.einsum("...kij,...k->...ij", gammahat, du)
    II = (sgn / w_factor)[..., None, None] * (
        -hess_u_fiber
        + (rho * drho)[..., None, None] * ghat
        + 2.0 * data.hcal[..., None, None] * du[..., :, None] * du[..., None, :])

    shape_frame = np.einsum("...ij,...jk,...lk->...il", L_inv, II, L_inv)
    shape_frame = 0.5 * (shape_frame + np.swapaxes(shape_frame, -1, -2))
    kappas = np.linalg.eigvalsh(shape_frame)

    S = symfun.elementary_symmetric_batch(kappas)
    H = symfun.h_from_s(S)
    c = np.array([symfun.trace_coefficient(n, k) for k in range(n)], dtype=float)
    newton = symfun.newton_family_batch(shape_frame, S)

    dg = np.stack([diff(g, axis_i, spacing[axis_i], cfg.order) for axis_i in range(n)],
                  axis=-3)
    christoffel = 0.5 * (
        np.einsum("...kl,...ilj->...kij", g_inv, dg)
        + np.einsum("...kl,...jil->...kij", g_inv, dg)
        - np.einsum("...kl,...lij->...kij", g_inv, dg))

    interior = interior_mask(u.shape, imm.periodic, cfg.margin_cells)

    return GeometryGrid(
        imm=imm, cfg=cfg, x=x, u=u, du=du, hess_u=hess_u,
        ghat=ghat, ghat_inv=ghat_inv, gammahat=gammahat,
        rho=rho, drho=drho, d2rho=np.asarray(data.d2rho),
        hcal=np.asarray(data.hcal), dhcal=np.asarray(data.dhcal),
        sigma=np.asarray(data.sigma),
        g=g, g_inv=g_inv, L=L, L_inv=L_inv, sqrt_det_g=sqrt_det_g,
        w_factor=w_factor, theta=theta, normal=normal,
        a=a, grad_h_chart=grad_h_chart,
        II=II, shape_frame=shape_frame, kappas=kappas,
        S=S, H=H, c=c, newton=newton,
        christoffel=christoffel, interior=interior,
    )


@dataclass(frozen=True)
class PointGeometry:
    """Per-node package; ``grad_h`` and ``newton`` live in the orthonormal
    frame, the shape operator ``A`` is the chart-mixed g^{-1} II."""

    h: float
    grad_h: np.ndarray
    Theta: float
    N: np.ndarray
    g: np.ndarray
    A: np.ndarray
    kappas: np.ndarray
    newton: symfun.NewtonFamily


def point_geometry(geom: GeometryGrid, idx) -> PointGeometry:
    """Extract one node, rebuilding its algebra through the per-point
    (Jacobi-based) route rather than the batched sweeps."""
    idx = tuple(idx)
    A_frame = geom.shape_frame[idx]
    fam = symfun.newton_family(A_frame)
    A_chart = np.einsum("ij,jk->ik", geom.g_inv[idx], geom.II[idx])
    return PointGeometry(
        h=float(geom.u[idx]),
        grad_h=geom.a[idx].copy(),
        Theta=float(geom.theta[idx]),
        N=geom.normal[idx].copy(),
        g=geom.g[idx].copy(),
        A=A_chart,
        kappas=symfun.jacobi_eigenvalues(A_frame),
        newton=fam,
    )


# ---------------------------------------------------------------------------
# structure identities
# ---------------------------------------------------------------------------

def _masked_max(resid: np.ndarray, mask: np.ndarray) -> float:
    return float(np.max(np.abs(resid[mask]))) if np.any(mask) else 0.0


def structure_identities(geom: GeometryGrid) -> dict:
    """Pointwise residuals of the gradient/Hessian structure of the height.

    * ``unit-decomposition``: |grad h|^2 + Theta^2 - 1 (algebraic).
    * ``gradient-decomposition``: chart components of grad h against the
      tangential part of T - Theta N (algebraic).
    * ``height-hessian``: covariant differenced Hessian of h against the
      closed form hcal (g - dh x dh) + Theta II (converges at stencil
      order).
    * ``sigma-hessian``: same discipline for sigma(h).
    """
    mask = geom.interior
    out = {}

    unit = np.einsum("...i,...i->...", geom.a, geom.a) + geom.theta ** 2 - 1.0
    out["unit-decomposition"] = {"grid": unit, "max": _masked_max(unit, mask)}

    tang = -geom.theta[..., None] * geom.normal[..., 1:]
    gdec = geom.grad_h_chart - tang
    out["gradient-decomposition"] = {"grid": gdec, "max": _masked_max(gdec, mask)}

    hess_fd = geom.hess_covariant(geom.u)
    outer = geom.du[..., :, None] * geom.du[..., None, :]
    hess_closed = geom.hcal[..., None, None] * (geom.g - outer) \
        + geom.theta[..., None, None] * geom.II
    hh = hess_fd - hess_closed
    out["height-hessian"] = {"grid": hh, "max": _masked_max(hh, mask)}

    sig_fd = geom.hess_covariant(geom.sigma)
    sig_closed = geom.drho[..., None, None] * outer \
        + geom.rho[..., None, None] * hess_closed
    sh = sig_fd - sig_closed
    out["sigma-hessian"] = {"grid": sh, "max": _masked_max(sh, mask)}
    return out


# ---------------------------------------------------------------------------
# extrinsic distance probe
# ---------------------------------------------------------------------------

def extrinsic_gamma_probe(imm: GraphImmersion, origin, cfg: DiscretizationConfig = None,
                          geom: GeometryGrid = None) -> dict:
    """Squared fiber distance pulled back to the graph, with its bounds.

    Checks pointwise that |grad gamma| <= 2 sqrt(gamma)/rho(h), and the
    Hessian decomposition

        Hess_Sigma gamma_ij = HessP gammahat_ij
            - hcal (dgamma_i u_j + u_i dgamma_j) + <grad~ gamma~, N> II_ij

    as a residual that converges at the stencil order (the left side
    covariantly differenced with the induced-metric symbols).
    """
    if geom is None:
        geom = evaluate_geometry(imm, cfg)
    cfg = geom.cfg
    fiber = imm.W.fiber
    gamma, dgamma, hessP, window = fiber.gamma_hat_data(geom.x, origin)
    mask = geom.interior & window

    grad_frame = np.einsum("...ij,...j->...i", geom.L_inv, dgamma)
    grad_norm = np.sqrt(np.einsum("...i,...i->...", grad_frame, grad_frame))
    bound = 2.0 * np.sqrt(np.maximum(gamma, 0.0)) / geom.rho
    margin = bound - grad_norm

    # left side: d^2 gamma - Gamma^Sigma d gamma, with the chart second
    # partials reconstructed from the closed fiber Hessian
    d2gamma = hessP + np.einsum("...kij,...k->...ij", geom.gammahat, dgamma)
    lhs = d2gamma - np.einsum("...kij,...k->...ij", geom.christoffel, dgamma)

    normal_fiber_inner = np.einsum("...i,...i->...", dgamma, geom.normal[..., 1:])
    rhs = hessP \
        - geom.hcal[..., None, None] * (dgamma[..., :, None] * geom.du[..., None, :]
                                        + geom.du[..., :, None] * dgamma[..., None, :]) \
        + normal_fiber_inner[..., None, None] * geom.II
    resid = lhs - rhs

    return {
        "gamma": gamma,
        "grad_norm": grad_norm,
        "bound": bound,
        "min_margin": float(np.min(margin[mask])) if np.any(mask) else float("nan"),
        "gradient_bound_holds": bool(np.all(margin[mask] >= -1e-10)) if np.any(mask) else True,
        "hessian_residual": resid,
        "hessian_max": _masked_max(resid, mask),
        "window": window,
        "mask": mask,
    }


# ---------------------------------------------------------------------------
# sectional curvature audit
# ---------------------------------------------------------------------------

def sectional_bound_report(imm: GraphImmersion, cfg: DiscretizationConfig = None,
                           geom: GeometryGrid = None, tol: float = 1e-10) -> dict:
    """Gauss-equation sectional curvatures over orthonormal frame pairs.

    For each frame pair (E_i, E_j):

        K_Sigma = K_amb + A~_ii A~_jj - A~_ij^2,
        K_amb   = (kappa/rho^2)(1 - a_i^2 - a_j^2) - hcal^2 - hcal'(a_i^2+a_j^2),

    with a_i = <E_i, grad h>.  The report asserts the chain
    K_Sigma >= K_amb - 2|A|^2 and the fiber-term bound
    (kappa/rho^2) wedge >= -|kappa|/rho^2 pointwise, and returns the
    realized global lower bounds.
    """
    if geom is None:
        geom = evaluate_geometry(imm, cfg)
    n = geom.n
    kappa = imm.W.fiber.kappa
    mask = geom.interior
    a2 = geom.a ** 2
    rho2 = geom.rho ** 2
    norm_A_sq = np.einsum("...ij,...ij->...", geom.shape_frame, geom.shape_frame)

    k_sigma_min = np.inf
    k_amb_min = np.inf
    chain_ok = True
    fiber_ok = True
    pair_mins = {}
    for i in range(n):
        for j in range(i + 1, n):
            wedge = 1.0 - a2[..., i] - a2[..., j]
            fiber_term = kappa / rho2 * wedge
            k_amb = fiber_term - geom.hcal ** 2 \
                - geom.dhcal * (a2[..., i] + a2[..., j])
            k_sig = k_amb + geom.shape_frame[..., i, i] * geom.shape_frame[..., j, j] \
                - geom.shape_frame[..., i, j] ** 2
            m = mask
            k_sigma_min = min(k_sigma_min, float(np.min(k_sig[m])))
            k_amb_min = min(k_amb_min, float(np.min(k_amb[m])))
            chain_ok &= bool(np.all(k_sig[m] >= (k_amb - 2.0 * norm_A_sq)[m] - tol))
            fiber_ok &= bool(np.all(fiber_term[m] >= -abs(kappa) / rho2[m] - tol))
            pair_mins[f"K({i},{j})"] = float(np.min(k_sig[m]))

    return {
        "sectional_min": k_sigma_min,
        "ambient_min": k_amb_min,
        "lower_bound_constant": k_sigma_min,
        "chain_holds": chain_ok,
        "fiber_bound_holds": fiber_ok,
        "pair_minima": pair_mins,
        "norm_A_sq_max": float(np.max(norm_A_sq[mask])),
    }


# ---------------------------------------------------------------------------
# refinement windows
# ---------------------------------------------------------------------------

def audit_window(imm: GraphImmersion, trim) -> np.ndarray:
    """Mask of nodes at physical distance >= trim[i] from non-periodic edges.

    Convergence studies fix the trim from the coarsest level so every
    refinement audits the same physical window.
    """
    axes = imm.axes()
    mask = np.ones(imm.shape, dtype=bool)
    for i, (per, ax) in enumerate(zip(imm.periodic, axes)):
        if per:
            continue
        lo, hi = imm.box[i]
        good = (ax >= lo + trim[i] - 1e-12) & (ax <= hi - trim[i] + 1e-12)
        shape = [1] * len(imm.shape)
        shape[i] = ax.size
        mask &= good.reshape(shape)
    return mask


def coarsest_trim(imm: GraphImmersion, cfg: DiscretizationConfig):
    """Physical trim widths implied by the margins at this resolution."""
    return tuple(0.0 if per else cfg.margin_cells * h
                 for per, h in zip(imm.periodic, imm.spacing))
