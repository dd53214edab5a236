"""Embedding criteria and closed-form one-parameter semigroups.

For each normal form this module decides whether the map embeds into a
continuous one-parameter semigroup of self-maps, returning an
:class:`EmbeddingCertificate` with named numeric margins, and builds
the closed-form family :class:`SemigroupFamily` when the verdict is
positive.

Verdict semantics: the elliptic criteria are if-and-only-if (up to the
documented branch-search bound), so a failed margin yields
``condition_fails``.  The parabolic and hyperbolic criteria are
sufficient only; failed hypotheses yield ``inconclusive`` - the map may
still embed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BranchError, DomainError, NumericError
from .linalg import (
    hermitian_part,
    is_dissipative,
    mat_exp,
    mat_log_principal,
    schur_form,
)
from .maps import (
    BallMap,
    ELLIPTIC,
    PARABOLIC,
    SiegelMap,
    classify,
    unitary_index,
)
from .normal_forms import (
    FORM_ELLIPTIC_SPLIT,
    FORM_ELLIPTIC_U0,
    FORM_HYPERBOLIC,
    FORM_PARABOLIC,
    Condition,
    NormalForm,
    elliptic_split,
    elliptic_u0,
    hyperbolic_normal_form,
    parabolic_normal_form,
)

EMBEDDABLE = "embeddable"
CONDITION_FAILS = "condition_fails"
INCONCLUSIVE = "inconclusive"

#: margin at or above which a criterion counts as satisfied
MARGIN_TOL = 1e-12

#: default per-eigenvalue branch bound for matrix-log searches
BRANCH_BOUND = 3


def _expm1c(z: complex) -> complex:
    """exp(z) - 1 without cancellation for small |z| (complex z)."""
    x, y = z.real, z.imag
    em = math.expm1(x)
    ex = em + 1.0
    return complex(em - ex * 2.0 * math.sin(y / 2.0) ** 2, ex * math.sin(y))


def _expm1c_vec(z: np.ndarray) -> np.ndarray:
    return np.array([_expm1c(complex(v)) for v in np.atleast_1d(z)], dtype=complex)


# ---------------------------------------------------------------------------
# scalar bound functions


def scalar_h_parabolic(u: float, v: float, t: float) -> float:
    """|1 - exp(t(-u+iv))|^2 / ((1 - exp(-2tu)) t).

    Bounded above by (u^2 + v^2) / (2u), the t -> 0+ limit.
    """
    if u <= 0 or t <= 0 or v < 0:
        raise DomainError("scalar_h_parabolic needs u > 0, v >= 0, t > 0")
    num = abs(_expm1c(complex(-u * t, v * t))) ** 2
    den = -math.expm1(-2.0 * t * u) * t
    return num / den


def scalar_h_hyperbolic(lam: float, u: float, v: float, t: float) -> float:
    """|exp(t(u+iv)) - 1|^2 / ((1 - exp(-lam t))(1 - exp((lam+2u) t))).

    Bounded above by -(u^2 + v^2) / (lam (2u + lam)), the t -> 0+ limit;
    requires lam > 0, u < 0, lam + 2u < 0, v >= 0.
    """
    if lam <= 0 or u >= 0 or lam + 2 * u >= 0 or v < 0 or t <= 0:
        raise DomainError(
            "scalar_h_hyperbolic needs lam > 0, u < 0, lam + 2u < 0, v >= 0, t > 0"
        )
    num = abs(_expm1c(complex(u * t, v * t))) ** 2
    den = (-math.expm1(-lam * t)) * (-math.expm1((lam + 2 * u) * t))
    return num / den


def _log_polar(lam: complex):
    """(u, v) with lam = exp(-u + iv), u > 0, v in [0, 2pi).

    Arguments within rounding of the positive real axis snap to v = 0
    rather than wrapping to 2pi.
    """
    mod = abs(lam)
    if mod >= 1.0:
        raise DomainError(f"eigenvalue {lam} is not a strict contraction")
    if mod == 0.0:
        raise DomainError("zero eigenvalue admits no logarithm")
    u = -math.log(mod)
    v = math.atan2(lam.imag, lam.real) % (2.0 * math.pi)
    if v >= 2.0 * math.pi - 1e-9:
        v = 0.0
    return u, v


def _log_principal(lam: complex) -> complex:
    """Principal logarithm -u + iv, v in (-pi, pi]; the branch used for
    the constructed paths (its theta weight never exceeds the reported
    [0, 2pi)-branch weight, so certificates stay sufficient)."""
    u, _ = _log_polar(lam)
    return complex(-u, math.atan2(lam.imag, lam.real))


def theta_parabolic(contraction_eigs) -> np.ndarray:
    """Diagonal weights (u_j^2 + v_j^2) / (2 u_j |1 - lam_j|^2)."""
    eigs = np.atleast_1d(np.asarray(contraction_eigs, dtype=complex))
    out = np.zeros(len(eigs))
    for j, lam in enumerate(eigs):
        u, v = _log_polar(lam)
        out[j] = (u * u + v * v) / (2.0 * u * abs(1.0 - lam) ** 2)
    return out


def theta_hyperbolic(lam: float, contraction_eigs) -> np.ndarray:
    """Diagonal weights
    (lam-1)/(2 u_j ln lam) * ((ln(lam)/2 + u_j)^2 + v_j^2) / |lam - sqrt(lam) lam_j|^2.
    """
    if lam <= 1.0:
        raise DomainError("hyperbolic dilation must exceed 1")
    eigs = np.atleast_1d(np.asarray(contraction_eigs, dtype=complex))
    log_lam = math.log(lam)
    out = np.zeros(len(eigs))
    for j, mu in enumerate(eigs):
        u, v = _log_polar(mu)
        out[j] = (
            (lam - 1.0)
            / (2.0 * u * log_lam)
            * ((log_lam / 2.0 + u) ** 2 + v * v)
            / abs(lam - math.sqrt(lam) * mu) ** 2
        )
    return out


#: weight of a resonant translation entry (sqrt(lam) lam_j = 1), the
#: sharp budget sup_t (lam-1) t^2 lam^t / (lam^t - 1)^2 = (lam-1)/ln(lam)^2
def resonant_translation_weight(lam: float) -> float:
    if lam <= 1.0:
        raise DomainError("hyperbolic dilation must exceed 1")
    return (lam - 1.0) / math.log(lam) ** 2


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class EmbeddingCertificate:
    verdict: str
    criterion_id: str
    margins: list
    generator_data: Optional[dict]
    target: Optional[object] = None  # the map the built family reproduces at t = 1
    notes: str = ""


@dataclass(frozen=True)
class SemigroupFamily:
    """Closed-form one-parameter family; ``at(t)`` materializes the map."""

    case_kind: str
    parameters: dict
    domain: str
    target: Optional[object] = None

    def at(self, t: float):
        return _family_at(self, float(t))

    def generator_matrix_free(self):
        return generator(self)


# ---------------------------------------------------------------------------
# matrix-log branch search


def log_candidates(a: np.ndarray, bound: int = BRANCH_BOUND, max_candidates: int = 4096):
    """Matrix logarithms of *a*, principal branch first, then eigenvalue
    shifts by 2 pi i k (|k| <= bound) applied per distinct eigenvalue.

    Every candidate is verified by exponentiation before being returned;
    the search is complete only within the branch bound.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    eigs = schur_form(a).eigenvalues
    if np.min(np.abs(eigs)) <= 1e-12 * max(1.0, float(np.max(np.abs(eigs)))):
        raise DomainError("singular matrix admits no logarithm")
    norm_a = max(1.0, float(np.linalg.norm(a)))

    def verified(m):
        return float(np.linalg.norm(mat_exp(m) - a)) <= 1e-8 * norm_a

    candidates = []
    seen = set()

    def push(m):
        key = (round(float(np.trace(m).real), 8), round(float(np.trace(m).imag), 8),
               round(float(np.linalg.norm(m)), 8))
        if key in seen:
            return
        if verified(m):
            seen.add(key)
            candidates.append(m)

    base = None
    try:
        base = mat_log_principal(a)
    except BranchError:
        base = None
    vals, vecs = np.linalg.eig(a)
    cond = np.linalg.cond(vecs)
    if cond < 1e8:
        # per-cluster branch assignments through the eigenbasis
        clusters = []
        assigned = np.full(n, -1)
        for i in range(n):
            if assigned[i] >= 0:
                continue
            members = np.nonzero(np.abs(vals - vals[i]) <= 1e-8 * max(1.0, abs(vals[i])))[0]
            assigned[members] = len(clusters)
            clusters.append(members)
        base_logs = np.log(vals)
        ks = sorted(range(-bound, bound + 1), key=abs)
        inv_vecs = np.linalg.inv(vecs)
        for tried, combo in enumerate(itertools.product(ks, repeat=len(clusters))):
            if tried >= 20000 or len(candidates) >= max_candidates:
                break
            shift = np.zeros(n, dtype=complex)
            for cluster, k in zip(clusters, combo):
                shift[cluster] = 2j * np.pi * k
            push(vecs @ np.diag(base_logs + shift) @ inv_vecs)
    elif base is not None:
        for k in sorted(range(-bound, bound + 1), key=abs):
            push(base + 2j * np.pi * k * np.eye(n))
    if base is not None:
        push(base)
    if not candidates:
        raise NumericError("no verifiable logarithm candidate found")
    return candidates


# ---------------------------------------------------------------------------
# quadratic minimization on the unit sphere


def sphere_quadratic_min(g_herm: np.ndarray, g_lin: np.ndarray):
    """Global minimum of x^H G x + Re(<x, g>) over the unit sphere.

    G hermitian.  Returns (value, argmin).  Solved by the trust-region
    secular equation in the eigenbasis of G.
    """
    w, v = np.linalg.eigh(hermitian_part(g_herm))
    b = v.conj().T @ np.asarray(g_lin, dtype=complex)
    mags = np.abs(b)
    lam_min = float(w[0])
    scale = max(1.0, float(np.max(np.abs(w))), float(np.max(mags)))
    active = mags > 1e-14 * scale

    def rho(mu):
        denom = np.where(active, 2.0 * (w - mu), 1.0)
        return np.where(active, mags / denom, 0.0)

    def norm2(mu):
        return float(np.sum(rho(mu) ** 2))

    phases = np.where(active, b / np.where(active, mags, 1.0), 0.0)
    min_active = bool(np.any(active & (np.abs(w - lam_min) <= 1e-12 * scale)))
    hard_norm = norm2(lam_min) if not min_active else np.inf
    if not min_active and hard_norm <= 1.0:
        # interior (hard) case: pad with the bottom eigenvector
        r = rho(lam_min)
        pad = math.sqrt(max(0.0, 1.0 - float(np.sum(r ** 2))))
        x = (-r * phases).astype(complex)
        x[int(np.argmin(w))] += pad
    else:
        lo = lam_min - 0.5 * float(np.sum(mags)) - 1.0
        hi = lam_min - 1e-18 * scale
        for _ in range(300):
            mid = 0.5 * (lo + hi)
            if norm2(mid) < 1.0:
                lo = mid
            else:
                hi = mid
        mu = 0.5 * (lo + hi)
        r = rho(mu)
        nrm = math.sqrt(float(np.sum(r ** 2)))
        r = r / nrm if nrm > 0 else r
        x = (-r * phases).astype(complex)
    value = float((x.conj() @ (w * x)).real + np.vdot(b, x).real)
    return value, v @ x


# ---------------------------------------------------------------------------
# elliptic criteria


def embed_elliptic_split(nf: NormalForm, branch_search: int = BRANCH_BOUND) -> EmbeddingCertificate:
    """Exponential-of-dissipative criterion for the (Lambda, A1) form."""
    _expect_form(nf, FORM_ELLIPTIC_SPLIT)
    lam = nf.parameters["Lambda"]
    a1 = nf.parameters["A1"]
    theta = np.angle(lam).real.astype(float)
    if a1.size == 0:
        data = {"theta": theta, "M": np.zeros((0, 0), dtype=complex), "u": len(theta)}
        return EmbeddingCertificate(
            EMBEDDABLE, "elliptic_split_dissipative_log",
            [Condition("unitary_part", 0.0, True)], data, nf.normal_map,
        )
    candidates = log_candidates(a1, branch_search)
    margins = []
    for idx, m in enumerate(candidates):
        res = is_dissipative(m)
        left = float(np.max(np.linalg.eigvals(m).real))
        margins.append(Condition(f"dissipativity[candidate {idx}]", -res.margin,
                                 res.margin <= 1e-10))
        if res.margin <= 1e-10 and left < 0:
            data = {"theta": theta, "M": m, "u": len(theta)}
            return EmbeddingCertificate(
                EMBEDDABLE, "elliptic_split_dissipative_log", margins, data,
                nf.normal_map,
                notes=f"dissipative logarithm found (candidate {idx})",
            )
    return EmbeddingCertificate(
        CONDITION_FAILS, "elliptic_split_dissipative_log", margins, None, nf.normal_map,
        notes=f"no dissipative logarithm among {len(candidates)} candidates "
              f"(branch bound {branch_search})",
    )


def _u0_condition_margins(m: np.ndarray, delta: float):
    """Exact margins of Re[delta <Mz,e1> |z|^2 - <Mz,z>] >= 0 on the ball.

    The expression restricted to z = r*zeta is linear in r, so the
    infimum sits at r -> 0 (a pure hermitian-part condition) or r = 1
    (a sphere-constrained quadratic, solved exactly).
    """
    n = m.shape[0]
    herm = hermitian_part(m)
    quad_margin = -float(np.max(np.linalg.eigvalsh(herm)))
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    # on the sphere the r = 1 slice reads
    # delta Re(Mz)_1 - Re<Mz,z> = z^H (-H) z + Re<z, delta M^H e1>
    mixed_margin, zeta = sphere_quadratic_min(-herm, delta * (m.conj().T @ e1))
    return quad_margin, mixed_margin, zeta


def embed_elliptic_u0(nf: NormalForm, sampler=None,
                      branch_search: int = BRANCH_BOUND) -> EmbeddingCertificate:
    """Generator-positivity criterion for the (Ahat, delta) form.

    For each logarithm candidate M the condition
    Re[delta <Mz,e1> |z|^2 - <Mz,z>] >= 0 on the closed ball is decided
    by the exact two-radius reduction plus seeded sampling; a negative
    sample is kept as a witness.
    """
    _expect_form(nf, FORM_ELLIPTIC_U0)
    ahat = nf.parameters["Ahat"]
    delta = float(nf.parameters["delta"])
    candidates = log_candidates(ahat, branch_search)
    points = _sampler_points(sampler, ahat.shape[0])
    margins = []
    best_witness = None
    for idx, m in enumerate(candidates):
        quad_margin, mixed_margin, zeta = _u0_condition_margins(m, delta)
        sample_vals = _u0_expression(m, delta, points)
        sample_margin = float(np.min(sample_vals)) if len(sample_vals) else np.inf
        margin = min(quad_margin, mixed_margin, sample_margin)
        margins.append(Condition(f"generator_positivity[candidate {idx}]", margin,
                                 margin >= -1e-10))
        if margin >= -1e-10:
            data = {"M": m, "delta": delta}
            return EmbeddingCertificate(
                EMBEDDABLE, "elliptic_u0_generator_positivity", margins, data,
                nf.normal_map,
                notes=f"candidate {idx}: min condition margin {margin:.3e}",
            )
        witness = _u0_witness(m, delta, zeta, quad_margin, mixed_margin, points, sample_vals)
        if witness is not None:
            best_witness = witness
    notes = f"all {len(candidates)} logarithm candidates violate the condition " \
            f"(branch bound {branch_search})"
    if best_witness is not None:
        notes += f"; witness z = {np.array2string(best_witness, precision=6)}"
    return EmbeddingCertificate(
        CONDITION_FAILS, "elliptic_u0_generator_positivity", margins, None,
        nf.normal_map, notes=notes,
    )


def _u0_expression(m: np.ndarray, delta: float, zs: np.ndarray) -> np.ndarray:
    if len(zs) == 0:
        return np.zeros(0)
    mz = zs @ m.T
    norms2 = np.sum(np.abs(zs) ** 2, axis=1)
    return (delta * mz[:, 0] * norms2 - np.einsum("ij,ij->i", mz, zs.conj())).real


def _u0_witness(m, delta, zeta, quad_margin, mixed_margin, points, sample_vals):
    if len(sample_vals) and np.min(sample_vals) < -1e-10:
        return points[int(np.argmin(sample_vals))]
    if mixed_margin < quad_margin:
        cand = zeta
        if _u0_expression(m, delta, cand[None, :])[0] < 0:
            return cand
    top = np.linalg.eigh(hermitian_part(m))[1][:, -1]
    for r in (0.05, 0.2, 0.5, 0.9):
        cand = r * top
        if _u0_expression(m, delta, cand[None, :])[0] < 0:
            return cand
    return None


def _sampler_points(sampler, dim: int) -> np.ndarray:
    from .maps import sample_ball_points

    if sampler is None:
        return sample_ball_points(dim, 2000)
    return sampler.points(dim)


# ---------------------------------------------------------------------------
# parabolic and hyperbolic criteria


def _diagonalize_normal(a: np.ndarray, tol: float = 1e-10):
    """Unitary V with V^H a V diagonal, or None when a is not normal."""
    if a.size == 0 or np.allclose(a, np.diag(np.diag(a)), atol=1e-14):
        return np.eye(a.shape[0], dtype=complex), np.diag(a).copy() if a.size else np.zeros(0, dtype=complex)
    if np.linalg.norm(a @ a.conj().T - a.conj().T @ a) > tol * max(1.0, np.linalg.norm(a) ** 2):
        return None
    form = schur_form(a)
    t = form.upper_triangular
    if np.max(np.abs(t - np.diag(np.diag(t)))) > 1e-8 * max(1.0, np.linalg.norm(a)):
        return None
    # a = U^H T U, so V = U^H gives V^H a V = T
    return form.unitary.conj().T, np.diag(t).copy()


def embed_parabolic(nf: NormalForm) -> EmbeddingCertificate:
    """Translation-budget criterion Im b - |a|^2 >= <Theta c, c> for the
    parabolic normal form with a normal contraction block."""
    _expect_form(nf, FORM_PARABOLIC)
    p, q, r = nf.parameters["block_split"]
    a_vec = nf.parameters["a"]
    d_diag = np.atleast_1d(nf.parameters["D"]) if q else np.zeros(0, dtype=complex)
    a_block = nf.parameters["A"]
    c_vec = nf.parameters["c"]
    b = complex(nf.parameters["b"])
    target = nf.normal_map
    if r:
        diag = _diagonalize_normal(a_block)
        if diag is None:
            return EmbeddingCertificate(
                INCONCLUSIVE, "parabolic_theta_budget",
                [Condition("contraction_block_normal", -1.0, False)], None, target,
                notes="contraction block is not normal; the sufficient criterion "
                      "does not apply",
            )
        v, lam_diag = diag
        c_vec = v.conj().T @ c_vec
        target = _rebuild_parabolic_map(p, q, r, a_vec, d_diag, lam_diag, c_vec, b)
    else:
        lam_diag = np.zeros(0, dtype=complex)
    theta = theta_parabolic(lam_diag) if r else np.zeros(0)
    budget = float(b.imag - np.vdot(a_vec, a_vec).real - np.sum(theta * np.abs(c_vec) ** 2))
    margins = [Condition("translation_budget", budget, budget >= -MARGIN_TOL)]
    if budget < -MARGIN_TOL:
        return EmbeddingCertificate(
            INCONCLUSIVE, "parabolic_theta_budget", margins, None, target,
            notes="sufficient condition fails; the map may still be embeddable",
        )
    data = {
        "a": a_vec,
        "theta_D": np.angle(d_diag).astype(float),
        "m_diag": np.array([_log_principal(mu) for mu in lam_diag], dtype=complex)
        if r else np.zeros(0, dtype=complex),
        "c": c_vec,
        "alpha": complex(b.real, b.imag - float(np.vdot(a_vec, a_vec).real)),
        "split": (p, q, r),
    }
    return EmbeddingCertificate(EMBEDDABLE, "parabolic_theta_budget", margins, data, target)


def _rebuild_parabolic_map(p, q, r, a_vec, d_diag, lam_diag, c_vec, b) -> SiegelMap:
    k = p + q + r
    m = np.zeros((k, k), dtype=complex)
    m[:p, :p] = np.eye(p)
    m[p:p + q, p:p + q] = np.diag(d_diag)
    m[p + q:, p + q:] = np.diag(lam_diag)
    return SiegelMap(
        1.0,
        np.concatenate([a_vec, np.zeros(q), c_vec]),
        b,
        m,
        np.concatenate([a_vec, np.zeros(q + r)]),
        block_split=(p, q, r),
    )


def embed_hyperbolic(nf: NormalForm) -> EmbeddingCertificate:
    """Coefficient-budget criterion Im b >= <Theta c, c> (+ resonant
    translation weights) for the hyperbolic normal form."""
    _expect_form(nf, FORM_HYPERBOLIC)
    p, q, r = nf.parameters["block_split"]
    lam = float(nf.parameters["lam"])
    d_diag = np.atleast_1d(nf.parameters["D"]) if q else np.zeros(0, dtype=complex)
    a_block = nf.parameters["A"]
    c_vec = nf.parameters["c"]
    c_res = nf.parameters["c_res"]
    b = complex(nf.parameters["b"])
    target = nf.normal_map
    if r:
        diag = _diagonalize_normal(a_block)
        if diag is None:
            return EmbeddingCertificate(
                INCONCLUSIVE, "hyperbolic_theta_budget",
                [Condition("contraction_block_normal", -1.0, False)], None, target,
                notes="contraction block is not normal; the sufficient criterion "
                      "does not apply",
            )
        v, lam_diag = diag
        c_vec = v.conj().T @ c_vec
        c_res = v.conj().T @ c_res
        target = _rebuild_hyperbolic_map(p, q, r, lam, d_diag, lam_diag, c_vec, c_res, b)
    else:
        lam_diag = np.zeros(0, dtype=complex)
    theta = theta_hyperbolic(lam, lam_diag) if r else np.zeros(0)
    budget = float(
        b.imag
        - np.sum(theta * np.abs(c_vec) ** 2)
        - resonant_translation_weight(lam) * float(np.sum(np.abs(c_res) ** 2))
    )
    margins = [Condition("coefficient_budget", budget, budget >= -MARGIN_TOL)]
    if budget < -MARGIN_TOL:
        return EmbeddingCertificate(
            INCONCLUSIVE, "hyperbolic_theta_budget", margins, None, target,
            notes="sufficient condition fails; the map may still be embeddable",
        )
    data = {
        "lam": lam,
        "theta_D": np.angle(d_diag).astype(float),
        "m_diag": np.array([_log_principal(mu) for mu in lam_diag], dtype=complex)
        if r else np.zeros(0, dtype=complex),
        "c": c_vec,
        "c_res": c_res,
        "b": b,
        "split": (p, q, r),
    }
    return EmbeddingCertificate(EMBEDDABLE, "hyperbolic_theta_budget", margins, data, target)


def _rebuild_hyperbolic_map(p, q, r, lam, d_diag, lam_diag, c_vec, c_res, b) -> SiegelMap:
    k = p + q + r
    m = np.zeros((k, k), dtype=complex)
    m[:p, :p] = np.eye(p)
    m[p:p + q, p:p + q] = np.diag(d_diag)
    m[p + q:, p + q:] = np.diag(lam_diag)
    return SiegelMap(
        lam,
        np.concatenate([np.zeros(p + q), c_vec]),
        b,
        math.sqrt(lam) * m,
        np.concatenate([np.zeros(p + q), c_res]),
        block_split=(p, q, r),
    )


# ---------------------------------------------------------------------------
# dimension 2 and automorphisms


def embed_dim2(f: BallMap) -> EmbeddingCertificate:
    """Embedding decision for self-maps of the two-dimensional ball,
    dispatching on the catalogue of normal forms (scalar w-block)."""
    if f.dim != 2:
        raise DomainError("embed_dim2 expects a map of the two-dimensional ball")
    cls = classify(f)
    if cls.kind == ELLIPTIC:
        cert = embed_map(f)
        return cert
    if cls.kind == PARABOLIC:
        nf = parabolic_normal_form(f)
        cert = embed_parabolic(nf)
        p, q, r = nf.parameters["block_split"]
        if r == 1:
            label = "dim2_parabolic_psi1"
        elif q == 1:
            label = "dim2_parabolic_psi2"
        else:
            label = "dim2_parabolic_psi3"
        return _relabel(cert, label)
    nf = hyperbolic_normal_form(f)
    cert = embed_hyperbolic(nf)
    _, _, r = nf.parameters["block_split"]
    if r == 1 and abs(nf.parameters["c_res"][0]) > 0:
        label = "dim2_hyperbolic_psi2"
    else:
        label = "dim2_hyperbolic_psi1"
    return _relabel(cert, label)


def _relabel(cert: EmbeddingCertificate, criterion_id: str) -> EmbeddingCertificate:
    return EmbeddingCertificate(cert.verdict, criterion_id, cert.margins,
                                cert.generator_data, cert.target, cert.notes)


def is_automorphism(f: BallMap, tol: float = 1e-8, count: int = 200) -> bool:
    """Numerical automorphism test: the unit sphere maps onto itself."""
    from .maps import sample_ball_points

    dirs = sample_ball_points(f.dim, count, seed=909090)
    dirs = dirs / np.linalg.norm(dirs, axis=1)[:, None]
    img = f.eval_many(dirs)
    return bool(np.max(np.abs(np.linalg.norm(img, axis=1) - 1.0)) <= tol)


def embed_automorphism(f: BallMap) -> EmbeddingCertificate:
    """Automorphisms always embed; chooses the constructor by class."""
    if not is_automorphism(f):
        raise DomainError("map is not an automorphism of the ball")
    cert = embed_map(f)
    if cert.verdict != EMBEDDABLE:
        raise NumericError(
            f"automorphism unexpectedly failed its criterion: {cert.notes}"
        )
    return _relabel(cert, "automorphism_" + cert.criterion_id)


def embed_map(f: BallMap):
    """Classify, normalize and run the matching embedding criterion."""
    cls = classify(f)
    if cls.kind == ELLIPTIC:
        u = unitary_index(f, fixed_point=cls.interior_fixed_points[0])
        if u >= 1:
            return embed_elliptic_split(elliptic_split(f))
        return embed_elliptic_u0(elliptic_u0(f))
    if cls.kind == PARABOLIC:
        return embed_parabolic(parabolic_normal_form(f))
    return embed_hyperbolic(hyperbolic_normal_form(f))


# ---------------------------------------------------------------------------
# semigroup construction


def build_semigroup(cert: EmbeddingCertificate) -> SemigroupFamily:
    """Materialize the closed-form family licensed by an embeddable
    certificate; ``at(1)`` reproduces the certificate's target map."""
    if cert.verdict != EMBEDDABLE or cert.generator_data is None:
        raise DomainError("build_semigroup requires an embeddable certificate")
    data = cert.generator_data
    if cert.criterion_id.endswith("elliptic_split_dissipative_log"):
        return SemigroupFamily("elliptic_split", dict(data), "ball", cert.target)
    if cert.criterion_id.endswith("elliptic_u0_generator_positivity"):
        return SemigroupFamily("elliptic_u0", dict(data), "ball", cert.target)
    if "parabolic" in cert.criterion_id:
        return SemigroupFamily("parabolic", dict(data), "siegel", cert.target)
    if "hyperbolic" in cert.criterion_id:
        return SemigroupFamily("hyperbolic", dict(data), "siegel", cert.target)
    raise DomainError(f"certificate {cert.criterion_id} carries no constructor")


def _family_at(sg: SemigroupFamily, t: float):
    d = sg.parameters
    if sg.case_kind == "elliptic_split":
        theta, m = d["theta"], d["M"]
        u = len(theta)
        n = u + m.shape[0]
        amat = np.zeros((n, n), dtype=complex)
        amat[:u, :u] = np.diag(np.exp(1j * t * theta))
        if m.size:
            amat[u:, u:] = mat_exp(t * m)
        return BallMap(amat, np.zeros(n), np.zeros(n), 1.0)
    if sg.case_kind == "elliptic_u0":
        m, delta = d["M"], d["delta"]
        n = m.shape[0]
        at = mat_exp(t * m)
        e1 = np.zeros(n, dtype=complex)
        e1[0] = 1.0
        c = delta * ((at.conj().T - np.eye(n)) @ e1)
        return BallMap(at, np.zeros(n), c, 1.0)
    if sg.case_kind == "parabolic":
        a, theta_d, m_diag, c, alpha = d["a"], d["theta_D"], d["m_diag"], d["c"], d["alpha"]
        p, q, r = d["split"]
        c_path = _cocycle_ratio(np.conj(m_diag), t) * c if r else np.zeros(0, dtype=complex)
        a_coef = np.concatenate([t * a, np.zeros(q), c_path])
        b_t = t * alpha + 1j * t * t * float(np.vdot(a, a).real)
        mm = _diag_blocks(np.ones(p), np.exp(1j * t * theta_d), np.exp(t * m_diag))
        trans = np.concatenate([t * a, np.zeros(q + r)])
        return SiegelMap(1.0, a_coef, b_t, mm, trans, block_split=(p, q, r))
    if sg.case_kind == "hyperbolic":
        lam = d["lam"]
        theta_d, m_diag, c, c_res, b = d["theta_D"], d["m_diag"], d["c"], d["c_res"], d["b"]
        p, q, r = d["split"]
        log_lam = math.log(lam)
        lam_t = math.exp(t * log_lam)
        sq = math.sqrt(lam)
        sq_t = math.exp(0.5 * t * log_lam)
        if r:
            a_factor = (lam_t - sq_t * np.exp(t * np.conj(m_diag))) / (lam - sq * np.exp(np.conj(m_diag)))
            a_path = a_factor * c
            res_path = _cocycle_ratio(0.5 * log_lam + m_diag, t) * c_res
        else:
            a_path = np.zeros(0, dtype=complex)
            res_path = np.zeros(0, dtype=complex)
        a_coef = np.concatenate([np.zeros(p + q), a_path])
        b_t = (_expm1c(complex(t * log_lam)) / _expm1c(complex(log_lam))).real * b
        mm = sq_t * _diag_blocks(np.ones(p), np.exp(1j * t * theta_d), np.exp(t * m_diag))
        trans = np.concatenate([np.zeros(p + q), res_path])
        return SiegelMap(lam_t, a_coef, b_t, mm, trans, block_split=(p, q, r))
    raise DomainError(f"unknown family kind {sg.case_kind}")


def _cocycle_ratio(eps: np.ndarray, t: float) -> np.ndarray:
    """(exp(t eps) - 1) / (exp(eps) - 1) entrywise, with the t limit at
    eps = 0 (the resonant translation path)."""
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    out = np.full(len(eps), complex(t))
    big = np.abs(eps) >= 1e-13
    if np.any(big):
        out[big] = _expm1c_vec(t * eps[big]) / _expm1c_vec(eps[big])
    return out


def _cocycle_rate(eps: np.ndarray) -> np.ndarray:
    """d/dt at t=0 of the cocycle ratio: eps / (exp(eps) - 1), 1 at 0."""
    eps = np.atleast_1d(np.asarray(eps, dtype=complex))
    out = np.ones(len(eps), dtype=complex)
    big = np.abs(eps) >= 1e-13
    if np.any(big):
        out[big] = eps[big] / _expm1c_vec(eps[big])
    return out


def _diag_blocks(*parts) -> np.ndarray:
    vals = np.concatenate([np.atleast_1d(np.asarray(p, dtype=complex)) for p in parts])
    return np.diag(vals)


# ---------------------------------------------------------------------------
# infinitesimal generators


def generator(sg: SemigroupFamily):
    """Closed-form infinitesimal generator G with d(phi_t)/dt = G o phi_t."""
    d = sg.parameters
    if sg.case_kind == "elliptic_split":
        theta, m = d["theta"], d["M"]
        u = len(theta)
        n = u + m.shape[0]
        gen = np.zeros((n, n), dtype=complex)
        gen[:u, :u] = np.diag(1j * theta)
        if m.size:
            gen[u:, u:] = m
        return lambda z: gen @ np.asarray(z, dtype=complex)
    if sg.case_kind == "elliptic_u0":
        m, delta = d["M"], d["delta"]

        def gen_u0(z):
            z = np.asarray(z, dtype=complex)
            mz = m @ z
            return mz - delta * mz[0] * z

        return gen_u0
    if sg.case_kind == "parabolic":
        a, theta_d, m_diag, c, alpha = d["a"], d["theta_D"], d["m_diag"], d["c"], d["alpha"]
        p, q, r = d["split"]
        cdot0 = (_cocycle_rate(np.conj(m_diag)) * c) if r else np.zeros(0, dtype=complex)

        def gen_parabolic(z):
            z = np.asarray(z, dtype=complex)
            u_part = z[1:1 + p]
            v_part = z[1 + p:1 + p + q]
            w_part = z[1 + p + q:]
            gz = alpha + 2j * (np.vdot(a, u_part) if p else 0.0) \
                + 2j * (np.vdot(cdot0, w_part) if r else 0.0)
            return np.concatenate([[gz], a, 1j * theta_d * v_part, m_diag * w_part])

        return gen_parabolic
    if sg.case_kind == "hyperbolic":
        lam = d["lam"]
        theta_d, m_diag, c, c_res, b = d["theta_D"], d["m_diag"], d["c"], d["c_res"], d["b"]
        p, q, r = d["split"]
        log_lam = math.log(lam)
        if r:
            adot0 = (log_lam / 2.0 - np.conj(m_diag)) / (lam - math.sqrt(lam) * np.exp(np.conj(m_diag))) * c
            resdot0 = _cocycle_rate(0.5 * log_lam + m_diag) * c_res
        else:
            adot0 = np.zeros(0, dtype=complex)
            resdot0 = np.zeros(0, dtype=complex)
        bdot0 = log_lam / (lam - 1.0) * b

        def gen_hyperbolic(z):
            z = np.asarray(z, dtype=complex)
            u_part = z[1:1 + p]
            v_part = z[1 + p:1 + p + q]
            w_part = z[1 + p + q:]
            gz = log_lam * z[0] + (2j * np.vdot(adot0, w_part) if r else 0.0) + bdot0
            return np.concatenate([
                [gz],
                0.5 * log_lam * u_part,
                (0.5 * log_lam + 1j * theta_d) * v_part,
                (0.5 * log_lam + m_diag) * w_part + resdot0,
            ])

        return gen_hyperbolic
    raise DomainError(f"unknown family kind {sg.case_kind}")


def _expect_form(nf: NormalForm, kind: str) -> None:
    if nf.form_kind != kind:
        raise DomainError(f"expected a {kind} normal form, got {nf.form_kind}")
