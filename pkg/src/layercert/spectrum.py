"""Conforming Q1 finite elements for the layer Dirichlet form.

The layer is meshed in chart coordinates (s, v) times the normal offset u
on a tensor grid. Trilinear elements with 2x2x2 Gauss quadrature and the
exact pullback metric at the quadrature points give a conforming discrete
form, so by min-max every discrete eigenvalue sits above its continuum
counterpart and a discrete value below the slab threshold is trustworthy
evidence, not an artifact.

Boundary handling: homogeneous Dirichlet walls at u = +-a, at the outer
truncation v = v_max, at the inner closure v = v_min, and at both ends of
the s window unless the chart is periodic. Walls only shrink the trial
space, so they push eigenvalues up, never below the threshold by accident.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import kernels
from .certify import cutoff_j, ground_mode, plateau_psi
from .charts import _coefficient_samples, metric_terms_from_samples
from .errors import NoConvergence
from .surfaces import LayerModel, layer_terms_from_metric, radial_layer_terms

# local corner l = 4*ds + 2*dv + du, matching the kernel reference tables
_CORNERS = [(ds, dv, du) for ds in (0, 1) for dv in (0, 1) for du in (0, 1)]
_GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)
_DENSE_CUTOFF = 600


@dataclass(frozen=True)
class MeshSpec:
    """Tensor mesh: cell counts per direction plus coordinate windows.

    n_s, n_v, n_u are cell counts, at least 4 each. v spans (v_min, v_max)
    with optional geometric grading: grade is the ratio of the widest cell
    to the narrowest, widths increasing with v, so grade > 1 concentrates
    resolution near the inner wall. s spans the full chart period when
    bc_s == "periodic", otherwise the explicit s_span window.
    """

    n_s: int
    n_v: int
    n_u: int
    v_max: float
    bc_s: str = "periodic"
    s_span: tuple | None = None
    v_min: float | None = None
    grade: float = 1.0

    def __post_init__(self):
        for n in (self.n_s, self.n_v, self.n_u):
            if int(n) != n or n < 4:
                raise ValueError("mesh needs at least 4 cells per direction")
        if self.bc_s not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown s boundary condition {self.bc_s!r}")
        if self.grade <= 0:
            raise ValueError("grade must be positive")
        if self.v_min is not None and not self.v_min < self.v_max:
            raise ValueError("v_min must lie below v_max")


def _graded_nodes(lo: float, hi: float, n: int, grade: float) -> np.ndarray:
    if grade == 1.0:
        return np.linspace(lo, hi, n + 1)
    ratio = grade ** (1.0 / (n - 1))
    w = ratio ** np.arange(n)
    w *= (hi - lo) / w.sum()
    nodes = np.concatenate(([lo], lo + np.cumsum(w)))
    nodes[-1] = hi  # kill cumsum round-off at the far wall
    return nodes


@dataclass(frozen=True)
class AssembledForms:
    """Stiffness/mass pair over the free (non-wall) grid nodes.

    s_nodes holds the distinct s coordinates (the duplicate endpoint of a
    periodic chart is dropped); v_nodes and u_nodes include the wall nodes.
    free_shape = (Ns, Nv, Nu) counts free dofs per direction and the global
    index of node (fs, fv, fu) is (fs*Nv + fv)*Nu + fu.
    """

    layer: LayerModel
    mesh: MeshSpec
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    s_nodes: np.ndarray
    v_nodes: np.ndarray
    u_nodes: np.ndarray
    free_shape: tuple

    @property
    def n_free(self) -> int:
        return self.stiffness.shape[0]

    @property
    def threshold(self) -> float:
        return self.layer.threshold

    def node_maps(self):
        """Free index (or -1 on walls) per node, aligned with the node arrays."""
        ns_free, nv_free, nu_free = self.free_shape
        if self.mesh.bc_s == "periodic":
            sid = np.arange(len(self.s_nodes))
        else:
            sid = np.full(len(self.s_nodes), -1, dtype=np.int64)
            sid[1:-1] = np.arange(ns_free)
        vid = np.full(len(self.v_nodes), -1, dtype=np.int64)
        vid[1:-1] = np.arange(nv_free)
        uid = np.full(len(self.u_nodes), -1, dtype=np.int64)
        uid[1:-1] = np.arange(nu_free)
        return sid, vid, uid


def assemble(layer: LayerModel, mesh: MeshSpec) -> AssembledForms:
    """Assemble the Dirichlet energy and L2 mass of the layer on the mesh.

    Both matrices act on grid functions vanishing on the Dirichlet walls.
    The stiffness integrand is the full inverse layer metric contracted
    with the gradient (the u fiber is orthonormal), weighted by the volume
    density; no lumping anywhere, so the pair stays symmetric to round-off
    and the generalized eigenvalues are conforming upper bounds.
    """
    surface = layer.surface
    chart = surface.chart
    a = layer.a
    n_s, n_v, n_u = mesh.n_s, mesh.n_v, mesh.n_u

    s_lo, s_hi = chart.s_range
    if mesh.bc_s == "periodic":
        if not chart.periodic:
            raise ValueError("periodic s mesh on a non-periodic chart")
        span = (s_lo, s_hi)
    else:
        span = mesh.s_span if mesh.s_span is not None else (s_lo, s_hi)
        if span[0] < s_lo - 1e-9 or span[1] > s_hi + 1e-9:
            raise ValueError("s_span outside the chart range")
    if not span[1] > span[0]:
        raise ValueError("empty s span")

    v_lo_chart, v_hi_chart = chart.v_range
    v_min = mesh.v_min if mesh.v_min is not None else max(v_lo_chart, -mesh.v_max)
    if not (v_lo_chart - 1e-9 <= v_min < mesh.v_max <= v_hi_chart + 1e-9):
        raise ValueError("v window outside the chart range")

    s_all = np.linspace(span[0], span[1], n_s + 1)
    v_nodes = _graded_nodes(float(v_min), float(mesh.v_max), n_v, mesh.grade)
    u_nodes = np.linspace(-a, a, n_u + 1)
    hs, hv, hu = np.diff(s_all), np.diff(v_nodes), np.diff(u_nodes)

    if mesh.bc_s == "periodic":
        s_nodes = s_all[:-1]
        sid = np.arange(n_s + 1, dtype=np.int64) % n_s
        ns_free = n_s
    else:
        s_nodes = s_all
        sid = np.concatenate(([-1], np.arange(n_s - 1), [-1])).astype(np.int64)
        ns_free = n_s - 1
    vid = np.concatenate(([-1], np.arange(n_v - 1), [-1])).astype(np.int64)
    uid = np.concatenate(([-1], np.arange(n_u - 1), [-1])).astype(np.int64)
    nv_free, nu_free = n_v - 1, n_u - 1
    n_free = ns_free * nv_free * nu_free

    # quadrature coordinates: s and u are shared by every v slab
    sq = 0.5 * (s_all[:-1] + s_all[1:])[:, None] + 0.5 * hs[:, None] * _GAUSS
    uq = 0.5 * (u_nodes[:-1] + u_nodes[1:])[:, None] + 0.5 * hu[:, None] * _GAUSS
    flat = sq.ravel()
    samples = tuple(
        np.broadcast_to(np.asarray(c, dtype=float), flat.shape)
        .reshape(n_s, 1, 2, 1, 1)
        for c in _coefficient_samples(chart, flat))

    # coefficient cloud axes: (es, eu, qs, qv, qu)
    u_b = uq.reshape(1, n_u, 1, 1, 2)
    hs_b = hs.reshape(n_s, 1, 1, 1, 1)
    hu_b = hu.reshape(1, n_u, 1, 1, 1)
    shape = (n_s, n_u, 2, 2, 2)
    n_elem = n_s * n_u

    fs_c = np.stack([sid[:-1], sid[1:]])  # corner ds -> free s index per element
    fu_c = np.stack([uid[:-1], uid[1:]])

    rows_acc, cols_acc, sval_acc, mval_acc = [], [], [], []
    for ev in range(n_v):
        vq = 0.5 * (v_nodes[ev] + v_nodes[ev + 1]) + 0.5 * hv[ev] * _GAUSS
        terms = metric_terms_from_samples(samples, vq.reshape(1, 1, 1, 2, 1))
        lt = layer_terms_from_metric(terms, u_b)
        rho = np.broadcast_to(lt["density"], shape)
        jac = hs_b * (0.125 * hv[ev]) * hu_b
        wgt = rho * jac
        css = np.broadcast_to(lt["inv_ss"] * wgt * (4.0 / hs_b ** 2), shape)
        csv = np.broadcast_to(lt["inv_sv"] * wgt * (4.0 / (hs_b * hv[ev])), shape)
        cvv = np.broadcast_to(lt["inv_vv"] * wgt * (4.0 / hv[ev] ** 2), shape)
        cuu = np.broadcast_to(wgt * (4.0 / hu_b ** 2), shape)
        cm = np.broadcast_to(wgt, shape)
        stiff_loc, mass_loc = kernels.local_matrices(
            css.reshape(n_elem, 8), csv.reshape(n_elem, 8),
            cvv.reshape(n_elem, 8), cuu.reshape(n_elem, 8),
            cm.reshape(n_elem, 8))

        gid = np.empty((n_s, n_u, 8), dtype=np.int64)
        for l, (ds, dv, du) in enumerate(_CORNERS):
            fs = fs_c[ds][:, None]
            fu = fu_c[du][None, :]
            fv = vid[ev + dv]
            full = (fs * nv_free + fv) * nu_free + fu
            gid[:, :, l] = np.where((fs < 0) | (fu < 0) | (fv < 0), -1, full)
        gid = gid.reshape(n_elem, 8)
        r2 = np.broadcast_to(gid[:, :, None], (n_elem, 8, 8))
        c2 = np.broadcast_to(gid[:, None, :], (n_elem, 8, 8))
        ok = (r2 >= 0) & (c2 >= 0)
        rows_acc.append(r2[ok])
        cols_acc.append(c2[ok])
        sval_acc.append(stiff_loc[ok])
        mval_acc.append(mass_loc[ok])

    rows = np.concatenate(rows_acc)
    cols = np.concatenate(cols_acc)
    stiffness = sp.coo_matrix(
        (np.concatenate(sval_acc), (rows, cols)), shape=(n_free, n_free)).tocsr()
    mass = sp.coo_matrix(
        (np.concatenate(mval_acc), (rows, cols)), shape=(n_free, n_free)).tocsr()
    return AssembledForms(layer=layer, mesh=mesh, stiffness=stiffness,
                          mass=mass, s_nodes=s_nodes, v_nodes=v_nodes,
                          u_nodes=u_nodes,
                          free_shape=(ns_free, nv_free, nu_free))


@dataclass(frozen=True)
class RadialMeshSpec:
    """Axisymmetric tensor mesh in (geodesic radius, normal offset).

    For rotationally symmetric surfaces the layer problem restricted to
    axisymmetric functions is two dimensional; that restriction is a
    subspace of the full form domain, so its eigenvalues sit above the true
    ones and stay safe in the certification direction. Unlike the chart
    mesh this one reaches through the core down to r = 0 (free/natural
    there), which matters when the ground state hugs the core. grade > 1
    widens cells with growing r.
    """

    n_r: int
    n_u: int
    r_max: float
    grade: float = 1.0

    def __post_init__(self):
        for n in (self.n_r, self.n_u):
            if int(n) != n or n < 4:
                raise ValueError("mesh needs at least 4 cells per direction")
        if not self.r_max > 0:
            raise ValueError("r_max must be positive")
        if self.grade <= 0:
            raise ValueError("grade must be positive")


def _radial_nodes(profile, r_max: float, n_r: int, grade: float) -> np.ndarray:
    """Radial nodes from 0 to r_max, splitting at profile breaks.

    Interior breaks (core/tail joins) land exactly on nodes so the metric
    kinks never sit inside a cell; a quarter of the cells goes to each
    inner segment, the rest to the graded tail.
    """
    inner = sorted(b for b in profile.breaks if 0.0 < b < r_max)
    if not inner:
        return _graded_nodes(0.0, float(r_max), n_r, grade)
    pieces = []
    lo = 0.0
    n_in = max(4, n_r // (4 * len(inner)))
    for b in inner:
        pieces.append(np.linspace(lo, b, n_in + 1)[:-1])
        lo = b
    n_tail = max(4, n_r - n_in * len(inner))
    pieces.append(_graded_nodes(lo, float(r_max), n_tail, grade))
    return np.concatenate(pieces[:-1] + [pieces[-1]])


@dataclass(frozen=True)
class AssembledRadialForms:
    """Axisymmetric stiffness/mass pair over the free (r, u) nodes.

    All r nodes are free except the Dirichlet wall at r_max; the pole or
    waist at r = 0 takes the natural condition (the even sector, which
    contains the ground state of a rotationally symmetric layer). Global
    index of node (fr, fu) is fr*Nu + fu.
    """

    layer: LayerModel
    mesh: RadialMeshSpec
    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    r_nodes: np.ndarray
    u_nodes: np.ndarray
    free_shape: tuple

    @property
    def n_free(self) -> int:
        return self.stiffness.shape[0]

    @property
    def threshold(self) -> float:
        return self.layer.threshold


def _reference_tables_2d():
    # node l = 2*dr + du, quadrature point q = 2*qr + qu
    pts = np.array([-1.0, 1.0]) / np.sqrt(3.0)
    n_tab = np.empty((4, 4))
    dr_tab = np.empty((4, 4))
    du_tab = np.empty((4, 4))
    for l, (dr, du) in enumerate((a, b) for a in (0, 1) for b in (0, 1)):
        for q, (qr, qu) in enumerate((a, b) for a in (0, 1) for b in (0, 1)):
            xr, xu = pts[qr], pts[qu]
            fr = 0.5 * (1.0 + (2 * dr - 1) * xr)
            fu = 0.5 * (1.0 + (2 * du - 1) * xu)
            n_tab[l, q] = fr * fu
            dr_tab[l, q] = 0.5 * (2 * dr - 1) * fu
            du_tab[l, q] = fr * 0.5 * (2 * du - 1)
    return n_tab, dr_tab, du_tab


_N2, _DR2, _DU2 = _reference_tables_2d()


def assemble_radial(layer: LayerModel, mesh: RadialMeshSpec) -> AssembledRadialForms:
    """Assemble the axisymmetric layer form on bilinear (r, u) elements.

    The integrand carries the full circumference density, so these forms
    are the exact restriction of the 3D forms to rotationally invariant
    functions; eigenvalues bound the 3D ones from above.
    """
    profile = layer.surface.radial
    if profile is None:
        raise ValueError(
            f"surface {layer.surface.label!r} has no radial structure; "
            "use the chart mesh")
    if mesh.r_max > profile.r_max_valid:
        raise ValueError("r_max beyond the radial profile's validity")
    a = layer.a
    r_nodes = _radial_nodes(profile, mesh.r_max, mesh.n_r, mesh.grade)
    u_nodes = np.linspace(-a, a, mesh.n_u + 1)
    n_r, n_u = len(r_nodes) - 1, mesh.n_u
    hr, hu = np.diff(r_nodes), np.diff(u_nodes)

    rid = np.concatenate((np.arange(n_r, dtype=np.int64), [-1]))
    uid = np.concatenate(([-1], np.arange(n_u - 1), [-1])).astype(np.int64)
    nr_free, nu_free = n_r, n_u - 1
    n_free = nr_free * nu_free

    rq = 0.5 * (r_nodes[:-1] + r_nodes[1:])[:, None] + 0.5 * hr[:, None] * _GAUSS
    uq = 0.5 * (u_nodes[:-1] + u_nodes[1:])[:, None] + 0.5 * hu[:, None] * _GAUSS
    terms = radial_layer_terms(profile, rq[:, None, :, None], uq[None, :, None, :])
    shape = (n_r, n_u, 2, 2)
    rho = np.broadcast_to(terms["density"], shape)
    hr_b = hr.reshape(n_r, 1, 1, 1)
    hu_b = hu.reshape(1, n_u, 1, 1)
    jac = 0.25 * hr_b * hu_b
    crr = np.broadcast_to(terms["inv_rr"] * rho * jac * (4.0 / hr_b ** 2), shape)
    cuu = np.broadcast_to(rho * jac * (4.0 / hu_b ** 2), shape)
    cm = np.broadcast_to(rho * jac, shape)

    n_elem = n_r * n_u
    crr = crr.reshape(n_elem, 4)
    cuu = cuu.reshape(n_elem, 4)
    cm = cm.reshape(n_elem, 4)
    a_rr = np.einsum("lq,mq->lmq", _DR2, _DR2)
    a_uu = np.einsum("lq,mq->lmq", _DU2, _DU2)
    a_m = np.einsum("lq,mq->lmq", _N2, _N2)
    stiff_loc = (np.einsum("eq,lmq->elm", crr, a_rr)
                 + np.einsum("eq,lmq->elm", cuu, a_uu))
    mass_loc = np.einsum("eq,lmq->elm", cm, a_m)

    gid = np.empty((n_r, n_u, 4), dtype=np.int64)
    for l, (dr, du) in enumerate((x, y) for x in (0, 1) for y in (0, 1)):
        fr = rid[dr:dr + n_r][:, None]
        fu = uid[du:du + n_u][None, :]
        gid[:, :, l] = np.where((fr < 0) | (fu < 0), -1, fr * nu_free + fu)
    gid = gid.reshape(n_elem, 4)
    r2 = np.broadcast_to(gid[:, :, None], (n_elem, 4, 4))
    c2 = np.broadcast_to(gid[:, None, :], (n_elem, 4, 4))
    ok = (r2 >= 0) & (c2 >= 0)
    stiffness = sp.coo_matrix(
        (stiff_loc[ok], (r2[ok], c2[ok])), shape=(n_free, n_free)).tocsr()
    mass = sp.coo_matrix(
        (mass_loc[ok], (r2[ok], c2[ok])), shape=(n_free, n_free)).tocsr()
    return AssembledRadialForms(layer=layer, mesh=mesh, stiffness=stiffness,
                                mass=mass, r_nodes=r_nodes, u_nodes=u_nodes,
                                free_shape=(nr_free, nu_free))


def lowest_eigenvalues(stiffness, mass, k: int = 6, *, tol: float = 0.0,
                       seed: int = 7):
    """k smallest eigenpairs of the generalized problem (stiffness, mass).

    Deterministic for fixed seed: the Lanczos start vector comes from a
    seeded generator, and small problems are solved densely. Returns
    (values, vectors, residuals) with values ascending and residuals the
    relative defects |A x - lam M x| / |A x|.
    """
    A = sp.csr_matrix(stiffness)
    M = sp.csr_matrix(mass)
    n = A.shape[0]
    k = int(min(k, n))
    if k < 1:
        raise ValueError("need at least one eigenvalue")
    if n <= _DENSE_CUTOFF or k >= n - 1:
        w, vecs = scipy.linalg.eigh(A.toarray(), M.toarray())
        w, vecs = w[:k], vecs[:, :k]
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            w, vecs = eigsh(A, k=k, M=M, sigma=0.0, which="LM", v0=v0,
                            tol=tol, maxiter=max(1000, 40 * n))
        except ArpackNoConvergence as exc:
            raise NoConvergence(f"shift-invert Lanczos stalled: {exc}") from exc
        order = np.argsort(w)
        w, vecs = w[order], vecs[:, order]
    residuals = np.empty(k)
    for i in range(k):
        x = vecs[:, i]
        ax = A @ x
        residuals[i] = (np.linalg.norm(ax - w[i] * (M @ x))
                        / max(np.linalg.norm(ax), 1e-300))
    return w, vecs, residuals


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalue summary of one mesh against the slab threshold."""

    eigenvalues: tuple
    threshold: float
    count_below_threshold: int
    mesh: object  # MeshSpec or RadialMeshSpec
    residuals: tuple

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.size > 1 and np.any(np.diff(ev) < -1e-9 * np.abs(ev[:-1])):
            raise ValueError("eigenvalues must be ascending")
        if ev.size and ev[0] < -1e-9 * max(1.0, abs(self.threshold)):
            raise ValueError("negative eigenvalue from a nonnegative form")

    def to_dict(self) -> dict:
        mesh = dataclasses.asdict(self.mesh)
        mesh = {k: list(v) if isinstance(v, tuple) else v
                for k, v in mesh.items()}
        mesh["kind"] = type(self.mesh).__name__
        return {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "threshold": float(self.threshold),
            "count_below_threshold": int(self.count_below_threshold),
            "residuals": [float(x) for x in self.residuals],
            "mesh": mesh,
        }


def spectral_report(layer: LayerModel, mesh, k: int = 6, *,
                    tol: float = 0.0, seed: int = 7) -> SpectralReport:
    """Assemble (either mesh kind), solve for the k lowest modes, summarize."""
    if isinstance(mesh, RadialMeshSpec):
        forms = assemble_radial(layer, mesh)
    else:
        forms = assemble(layer, mesh)
    w, _, res = lowest_eigenvalues(forms.stiffness, forms.mass, k,
                                   tol=tol, seed=seed)
    thr = layer.threshold
    return SpectralReport(
        eigenvalues=tuple(float(x) for x in w), threshold=float(thr),
        count_below_threshold=int(np.count_nonzero(w < thr)), mesh=mesh,
        residuals=tuple(float(x) for x in res))


def threshold_scan(layer: LayerModel, meshes, *, tol: float = 0.0,
                   seed: int = 7) -> dict:
    """Ground eigenvalue across a mesh ladder plus Richardson extrapolation.

    With three or more meshes (each refining the last by a factor 2 per
    direction) the observed convergence order comes from the last three
    values, the limit from the matching geometric tail, and the quoted
    extrapolation error is the gap between limit and finest value. Items
    may be chart MeshSpec or axisymmetric RadialMeshSpec instances; the
    radial kind reaches through the core and is the right tool when the
    ground state lives there.
    """
    lams = []
    for mesh in meshes:
        if isinstance(mesh, RadialMeshSpec):
            forms = assemble_radial(layer, mesh)
        else:
            forms = assemble(layer, mesh)
        w, _, _ = lowest_eigenvalues(forms.stiffness, forms.mass, 1,
                                     tol=tol, seed=seed)
        lams.append(float(w[0]))
    if not lams:
        raise ValueError("threshold_scan needs at least one mesh")
    out = {"lambda1": lams, "threshold": float(layer.threshold)}
    d2 = lams[-1] - lams[-2] if len(lams) >= 2 else 0.0
    if len(lams) >= 3:
        d1 = lams[-2] - lams[-3]
        if d1 * d2 > 0 and abs(d2) < abs(d1):
            rate = d1 / d2
            out["observed_order"] = float(np.log2(rate))
            lam_inf = lams[-1] + d2 / (rate - 1.0)
            out["extrapolated"] = float(lam_inf)
            out["extrapolation_error"] = float(abs(lam_inf - lams[-1]))
        else:  # not in the asymptotic regime, fall back to the last gap
            out["observed_order"] = float("nan")
            out["extrapolated"] = lams[-1]
            out["extrapolation_error"] = abs(d2)
    else:
        out["observed_order"] = float("nan")
        out["extrapolated"] = lams[-1]
        out["extrapolation_error"] = abs(d2)
    out["below_threshold"] = bool(out["extrapolated"] < out["threshold"])
    return out


def radial_ladder(r_max: float, levels: int = 3, n_r: int = 32, n_u: int = 8,
                  grade: float = 1.0) -> list:
    """Refinement ladder of axisymmetric meshes, doubling both directions."""
    return [RadialMeshSpec(n_r=n_r * 2 ** k, n_u=n_u * 2 ** k,
                           r_max=r_max, grade=grade)
            for k in range(levels)]


def transverse_interval_eigenvalue(a: float, n: int = 64) -> float:
    """Lowest Dirichlet eigenvalue of -d2/du2 on (-a, a) with P1 elements.

    Consistent mass keeps the discrete value above (pi/2a)^2, mirroring the
    transverse factor of the 3D assembly on a flat chart.
    """
    h = 2.0 * a / n
    m = n - 1
    stiff = (np.diag(np.full(m, 2.0)) - np.diag(np.ones(m - 1), 1)
             - np.diag(np.ones(m - 1), -1)) / h
    mass = (np.diag(np.full(m, 4.0)) + np.diag(np.ones(m - 1), 1)
            + np.diag(np.ones(m - 1), -1)) * (h / 6.0)
    return float(scipy.linalg.eigh(stiff, mass, eigvals_only=True)[0])


def certificate_rayleigh_on_mesh(forms: AssembledForms, cert) -> float:
    """Rayleigh quotient of the certificate trial function on the mesh.

    The nodal interpolant, zeroed on the walls, lives in the discrete trial
    space, so the lowest discrete eigenvalue can never exceed this value;
    comparing the two cross-checks certificate and matrix assembly against
    each other.
    """
    layer = forms.layer
    surface = layer.surface
    p = cert.params
    if p is None:
        raise ValueError("certificate carries no test function parameters")
    mix = 0.0 if p.epsilon is None else float(p.epsilon)
    plateau = plateau_psi(surface, p.r1, p.r2, p.r3, p.r4)
    cut = cutoff_j(surface.chart, p, surface=surface)

    grid_s, grid_v = np.meshgrid(forms.s_nodes, forms.v_nodes, indexing="ij")
    radii = surface.chart_radius(grid_s, grid_v)
    psi = plateau.value(radii)
    win = cut.value(grid_s, grid_v)
    u = forms.u_nodes
    g = ground_mode(u, layer.a)
    phi = psi[:, :, None] * g + mix * win[:, :, None] * (u * g)

    sid, vid, uid = forms.node_maps()
    fs, fv, fu = np.meshgrid(sid, vid, uid, indexing="ij")
    ok = (fs >= 0) & (fv >= 0) & (fu >= 0)
    _, nv_free, nu_free = forms.free_shape
    x = np.zeros(forms.n_free)
    x[((fs * nv_free + fv) * nu_free + fu)[ok]] = phi[ok]
    den = float(x @ (forms.mass @ x))
    if den <= 0:
        raise ValueError("trial function vanishes on this mesh")
    return float(x @ (forms.stiffness @ x)) / den


def eigenfunction_slice(forms: AssembledForms, vector, u_index: int | None = None):
    """Constant-u slice of a free-node eigenvector on the (s, v) node grid.

    Returns (s_nodes, v_nodes, values) with wall nodes filled by zeros;
    u_index counts free u planes and defaults to the middle one.
    """
    ns_free, nv_free, nu_free = forms.free_shape
    grid = np.asarray(vector, dtype=float).reshape(ns_free, nv_free, nu_free)
    if u_index is None:
        u_index = nu_free // 2
    sid, vid, _ = forms.node_maps()
    out = np.zeros((len(forms.s_nodes), len(forms.v_nodes)))
    si = np.flatnonzero(sid >= 0)
    vi = np.flatnonzero(vid >= 0)
    out[np.ix_(si, vi)] = grid[np.ix_(sid[si], vid[vi], [u_index])][:, :, 0]
    return forms.s_nodes, forms.v_nodes, out
