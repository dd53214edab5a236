"""Constructive reduction of classified maps to their normal forms.

Each reduction returns a :class:`NormalForm` carrying the simplified
map, the named parameters the embedding criteria consume, and the
explicit conjugation chain that transports the input onto the normal
map.  Chains are lists of :class:`~lfmsemi.maps.ProjMap`; their
composition s (first element applied first) satisfies
``normal_map = s o f o s^-1`` pointwise.

Block conventions on the Siegel side: the w-coordinates of an affine
self-map split into a u-block (block matrix eigenvalue 1), a v-block
(unimodular eigenvalues != 1, diagonal D) and a w-block (strict
contraction A), any of which may be empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, WrongFormError
from .linalg import (
    UNIMODULAR_TOL,
    hermitian_part,
    pinv,
    schur_form,
    spectral_norm,
    spectral_radius,
    unitary_with_first_column,
)
from .maps import (
    BallMap,
    ELLIPTIC,
    HYPERBOLIC,
    PARABOLIC,
    ProjMap,
    SiegelMap,
    ball_automorphism,
    cayley_to_siegel,
    classify,
    conjugate,
    fixed_points,
    heisenberg_map,
    pointwise_distance,
    sample_ball_points,
    sample_siegel_points,
    siegel_unitary_map,
    to_proj,
    unitary_ball_map,
    unitary_index,
)

FORM_ELLIPTIC_SPLIT = "elliptic_unitary_split"
FORM_ELLIPTIC_U0 = "elliptic_u0"
FORM_PARABOLIC = "parabolic_siegel"
FORM_HYPERBOLIC = "hyperbolic_siegel"

#: structural residuals (quantities the theory forces to vanish) must
#: stay below this before they are snapped to exact zeros
SNAP_TOL = 1e-7

#: |1 - sqrt(lam) * A_jj| at or below this marks a resonant contraction
#: eigenvalue whose translation component cannot be rotated away
RESONANCE_TOL = 1e-6


@dataclass(frozen=True)
class Condition:
    """One checked normal-form condition with its numeric margin."""

    name: str
    margin: float
    passed: bool


@dataclass(frozen=True)
class NormalForm:
    form_kind: str
    normal_map: BallMap | SiegelMap
    conjugations: list
    parameters: dict


@dataclass(frozen=True)
class SiegelReduction:
    map: SiegelMap
    report: list
    conjugations: list


def chain_map(conjugations: list) -> ProjMap:
    """Compose a conjugation chain into a single map (first applied first)."""
    total = conjugations[0] if conjugations else None
    if total is None:
        raise DomainError("empty conjugation chain")
    total = to_proj(total)
    for step in conjugations[1:]:
        total = total.then(to_proj(step))
    return total


def conjugation_residual(nf: NormalForm, f: BallMap, count: int = 100) -> float:
    """Pointwise distance between chain o f o chain^-1 and the normal map."""
    if not nf.conjugations:
        zs = sample_ball_points(f.dim, count)
        return pointwise_distance(f, nf.normal_map, zs)
    total = chain_map(nf.conjugations)
    g = conjugate(f, total)
    sampler = sample_ball_points if total.codomain == "ball" else sample_siegel_points
    zs = sampler(f.dim, count)
    return pointwise_distance(g, nf.normal_map, zs)


def _require(value: float, tol: float, what: str) -> None:
    if value > tol:
        raise NumericError(f"{what} = {value:.3e} exceeds tolerance {tol:.1e}")


# ---------------------------------------------------------------------------
# elliptic forms


def _centered(f: BallMap):
    """Move an interior fixed point to the origin; returns (map, chain)."""
    interior, _ = fixed_points(f)
    if not interior:
        raise DomainError("map has no interior fixed point")
    z0 = interior[0]
    if np.linalg.norm(z0) < 1e-12:
        return f, []
    mover = ball_automorphism(z0)
    return conjugate(f, mover), [to_proj(mover)]


def elliptic_split(f: BallMap) -> NormalForm:
    """Reduce an elliptic map with unitary index >= 1 to its linear
    (diagonal-unitary, contraction) block form."""
    g, chain = _centered(f)
    u = unitary_index(g, fixed_point=np.zeros(f.dim))
    if u == 0:
        raise WrongFormError("unitary index is 0; use elliptic_u0 instead")
    _require(float(np.linalg.norm(g.B)), SNAP_TOL, "residual translation after centering")
    _require(float(np.linalg.norm(g.C)), SNAP_TOL,
             "denominator part of a unitary-index >= 1 elliptic map")
    a = g.A
    form = schur_form(a, sort=lambda lam: abs(abs(lam) - 1) <= UNIMODULAR_TOL)
    t = form.upper_triangular
    _require(float(np.max(np.abs(t[:u, u:]), initial=0.0)), SNAP_TOL,
             "coupling between unitary and contraction blocks")
    lam_block = t[:u, :u]
    _require(float(np.max(np.abs(lam_block - np.diag(np.diag(lam_block))), initial=0.0)),
             SNAP_TOL, "off-diagonal part of the unitary block")
    lam = np.diag(lam_block).copy()
    lam /= np.abs(lam)  # snap to exactly unimodular
    a1 = t[u:, u:]
    if a1.size:
        if spectral_radius(a1) >= 1.0 - 1e-9:
            raise NumericError("contraction block has spectral radius too close to 1")
        if spectral_norm(a1) > 1.0 + 1e-10:
            raise NumericError("contraction block has operator norm above 1")
    rot = unitary_ball_map(form.unitary)
    chain = chain + [to_proj(rot)]
    n = f.dim
    amat = np.zeros((n, n), dtype=complex)
    amat[:u, :u] = np.diag(lam)
    amat[u:, u:] = a1
    normal_map = BallMap(amat, np.zeros(n), np.zeros(n), 1.0)
    return NormalForm(
        FORM_ELLIPTIC_SPLIT,
        normal_map,
        chain,
        {"Lambda": lam, "A1": a1, "u": u},
    )


def elliptic_u0(f: BallMap) -> NormalForm:
    """Reduce an elliptic map with unique fixed point and unitary index 0
    to the (Ahat, delta) denominator form."""
    g, chain = _centered(f)
    u = unitary_index(g, fixed_point=np.zeros(f.dim))
    if u > 0:
        raise WrongFormError("unitary index is positive; use elliptic_split instead")
    _require(float(np.linalg.norm(g.B)), SNAP_TOL, "residual translation after centering")
    a = g.A
    eigs = np.linalg.eigvals(a)
    if np.min(np.abs(eigs - 1.0)) <= 1e-9:
        raise DomainError(
            "1 is an eigenvalue of the differential, contradicting a unique fixed point"
        )
    v = np.linalg.solve(a.conj().T - np.eye(f.dim), g.C)
    delta = float(np.linalg.norm(v))
    if delta > 1.0 + 1e-9:
        raise NumericError(f"normal-form delta = {delta} exceeds 1")
    if delta < 1e-12:
        rot_mat = np.eye(f.dim)
        delta = 0.0
    else:
        rot_mat = unitary_with_first_column(v).conj().T
    ahat = rot_mat @ a @ rot_mat.conj().T
    if spectral_radius(ahat) >= 1.0 - 1e-9:
        raise NumericError("contraction matrix has spectral radius too close to 1")
    rot = unitary_ball_map(rot_mat)
    chain = chain + [to_proj(rot)]
    e1 = np.zeros(f.dim)
    e1[0] = 1.0
    c = min(delta, 1.0) * ((ahat.conj().T - np.eye(f.dim)) @ e1)
    normal_map = BallMap(ahat, np.zeros(f.dim), c, 1.0)
    return NormalForm(
        FORM_ELLIPTIC_U0,
        normal_map,
        chain,
        {"Ahat": ahat, "delta": min(delta, 1.0)},
    )


# ---------------------------------------------------------------------------
# Siegel reduction and the self-map conditions


def siegel_conditions(s: SiegelMap, tol: float = 1e-8) -> list:
    """The three affine self-map conditions with numeric margins.

    P1: lam I - M^H M hermitian positive semi-definite (lam real),
    P2: Im b - |c|^2 >= <Q+ (M^H c - a), M^H c - a>,
    P3: Q Q+ (M^H c - a) = M^H c - a.
    """
    lam, m, a, b, c = s.lam, s.M, s.a, s.b, s.c
    k = m.shape[0]
    q = hermitian_part(lam.real * np.eye(k) - m.conj().T @ m) if k else np.zeros((0, 0))
    if abs(lam.imag) > tol:
        margin1 = -abs(lam.imag)
    elif k:
        margin1 = float(np.min(np.linalg.eigvalsh(q)))
    else:
        margin1 = float(lam.real)
    x = (m.conj().T @ c - a) if k else np.zeros(0)
    if k:
        qp = pinv(q)
        margin2 = float(b.imag - np.vdot(c, c).real - np.vdot(x, qp @ x).real)
        margin3 = -float(np.linalg.norm(q @ qp @ x - x))
    else:
        margin2 = float(b.imag)
        margin3 = 0.0
    return [
        Condition("P1", margin1, margin1 >= -tol),
        Condition("P2", margin2, margin2 >= -tol),
        Condition("P3", margin3, margin3 >= -tol),
    ]


def siegel_reduce(f: BallMap, tol: float = 1e-8) -> SiegelReduction:
    """Transport a non-elliptic map to its affine Siegel form and report
    the self-map conditions."""
    cls = classify(f)
    if cls.kind == ELLIPTIC:
        raise DomainError("siegel_reduce expects a non-elliptic map")
    s, chain = cayley_to_siegel(f, dw_point=cls.dw_point, with_chain=True)
    return SiegelReduction(s, siegel_conditions(s, tol), chain)


# ---------------------------------------------------------------------------
# block splitting of the w-part


def _split_blocks(m: np.ndarray, one_tol: float = 1e-8):
    """Unitary W with W M W^H = blockdiag(I_p, D, A); returns
    (W, p, q, r, d_diag, a_block)."""
    k = m.shape[0]
    if k == 0:
        return np.eye(0, dtype=complex), 0, 0, 0, np.zeros(0, dtype=complex), np.zeros((0, 0), dtype=complex)
    form = schur_form(m, sort=lambda lam: abs(abs(lam) - 1) <= UNIMODULAR_TOL)
    t = form.upper_triangular
    eigs = np.diag(t)
    nuni = int(np.sum(np.abs(np.abs(eigs) - 1.0) <= UNIMODULAR_TOL))
    _require(float(np.max(np.abs(t[:nuni, nuni:]), initial=0.0)), SNAP_TOL,
             "coupling between unimodular and contraction blocks")
    uni_block = t[:nuni, :nuni]
    _require(float(np.max(np.abs(uni_block - np.diag(np.diag(uni_block))), initial=0.0)),
             SNAP_TOL, "off-diagonal part of the unimodular block")
    uni = np.diag(uni_block).copy()
    uni /= np.abs(uni)
    ones = [j for j in range(nuni) if abs(uni[j] - 1.0) <= one_tol]
    others = [j for j in range(nuni) if abs(uni[j] - 1.0) > one_tol]
    perm = ones + others + list(range(nuni, k))
    pmat = np.zeros((k, k), dtype=complex)
    for new, old in enumerate(perm):
        pmat[new, old] = 1.0
    w = pmat @ form.unitary
    p, q = len(ones), len(others)
    d_diag = uni[others]
    a_block = t[nuni:, nuni:]
    r = k - nuni
    if a_block.size and spectral_radius(a_block) >= 1.0 - 1e-9:
        raise NumericError("contraction block has spectral radius too close to 1")
    return w, p, q, r, d_diag, a_block


def _block_matrix(p: int, d_diag: np.ndarray, a_block: np.ndarray) -> np.ndarray:
    k = p + len(d_diag) + a_block.shape[0]
    m = np.zeros((k, k), dtype=complex)
    m[:p, :p] = np.eye(p)
    m[p:p + len(d_diag), p:p + len(d_diag)] = np.diag(d_diag)
    m[p + len(d_diag):, p + len(d_diag):] = a_block
    return m


# ---------------------------------------------------------------------------
# parabolic normal form


def parabolic_normal_form(f: BallMap) -> NormalForm:
    """Reduce a parabolic map to
    (z + 2i<u,a> + 2i<w,c> + b, u + a, D v, A w)."""
    cls = classify(f)
    if cls.kind != PARABOLIC:
        raise DomainError(f"parabolic_normal_form expects a parabolic map, got {cls.kind}")
    s, chain = cayley_to_siegel(f, dw_point=cls.dw_point, with_chain=True)
    _require(abs(s.lam - 1.0), 1e-6, "parabolic Siegel dilation minus 1")
    w, p, q, r, d_diag, a_block = _split_blocks(s.M)
    if s.M.shape[0]:
        rot = siegel_unitary_map(w)
        s = _as_siegel(conjugate(s, rot))
        chain = chain + [to_proj(rot)]
    # remove the v- and w-translations (I - D and I - A are invertible)
    gamma = np.zeros(p + q + r, dtype=complex)
    if q:
        gamma[p:p + q] = -np.linalg.solve(np.eye(q) - np.diag(d_diag), s.c[p:p + q])
    if r:
        gamma[p + q:] = -np.linalg.solve(np.eye(r) - a_block, s.c[p + q:])
    if q or r:
        tau = heisenberg_map(gamma, 1j * float(np.vdot(gamma, gamma).real))
        s = _as_siegel(conjugate(s, tau))
        chain = chain + [to_proj(tau)]
    # structural zeros forced by the self-map conditions
    _require(float(np.max(np.abs(s.c[p:]), initial=0.0)), SNAP_TOL,
             "v/w translations after elimination")
    _require(float(np.max(np.abs(s.a[p:p + q]), initial=0.0)), SNAP_TOL,
             "v-part of the translation pairing")
    a_vec = s.c[:p].copy()
    if p:
        _require(float(np.max(np.abs(s.a[:p] - a_vec))), SNAP_TOL,
                 "mismatch between u-translation and its pairing coefficient")
    c_vec = s.a[p + q:].copy()
    b = complex(s.b)
    m_clean = _block_matrix(p, d_diag, a_block)
    normal_map = SiegelMap(
        1.0,
        np.concatenate([a_vec, np.zeros(q), c_vec]),
        b,
        m_clean,
        np.concatenate([a_vec, np.zeros(q + r)]),
        block_split=(p, q, r),
    )
    params = {"a": a_vec, "D": d_diag, "A": a_block, "c": c_vec, "b": b,
              "block_split": (p, q, r)}
    return NormalForm(FORM_PARABOLIC, normal_map, chain, params)


def parabolic_conditions(nf: NormalForm, tol: float = 1e-8) -> list:
    """Margins of the four parabolic normal-form conditions."""
    d_diag = np.atleast_1d(nf.parameters["D"])
    a_block = nf.parameters["A"]
    a_vec = nf.parameters["a"]
    c_vec = nf.parameters["c"]
    b = nf.parameters["b"]
    margin1 = float(np.min(np.abs(d_diag - 1.0))) if d_diag.size else 1.0
    if a_block.size:
        qmat = hermitian_part(np.eye(a_block.shape[0]) - a_block.conj().T @ a_block)
        margin2 = float(np.min(np.linalg.eigvalsh(qmat)))
        qp = pinv(qmat)
        margin3 = float(b.imag - np.vdot(a_vec, a_vec).real - np.vdot(c_vec, qp @ c_vec).real)
        margin4 = -float(np.linalg.norm(qmat @ qp @ c_vec - c_vec))
    else:
        margin2 = 0.0
        margin3 = float(b.imag - np.vdot(a_vec, a_vec).real)
        margin4 = 0.0
    return [
        Condition("D_spectrum_avoids_1", margin1, margin1 > UNIMODULAR_TOL),
        Condition("Q_psd", margin2, margin2 >= -tol),
        Condition("translation_budget", margin3, margin3 >= -tol),
        Condition("c_in_range_of_Q", margin4, margin4 >= -tol),
    ]


# ---------------------------------------------------------------------------
# hyperbolic normal form


def hyperbolic_normal_form(f: BallMap) -> NormalForm:
    """Reduce a hyperbolic map to
    (lam z + 2i<w,c> + b, sqrt(lam) u, sqrt(lam) D v, sqrt(lam) A w [+ c_res]).

    The w-block translation is rotated into the z-row coefficient c
    wherever 1 - sqrt(lam) A_jj is nonsingular; resonant eigenvalues
    (|1 - sqrt(lam) A_jj| <= RESONANCE_TOL, only possible with a
    diagonal contraction block) keep their translation component,
    reported separately as c_res.
    """
    cls = classify(f)
    if cls.kind != HYPERBOLIC:
        raise DomainError(f"hyperbolic_normal_form expects a hyperbolic map, got {cls.kind}")
    s, chain = cayley_to_siegel(f, dw_point=cls.dw_point, with_chain=True)
    _require(abs(s.lam.imag), 1e-8, "imaginary part of the hyperbolic dilation")
    lam = float(s.lam.real)
    if lam <= 1.0 + 1e-9:
        raise NumericError(f"hyperbolic Siegel dilation {lam} is not > 1")
    sq = np.sqrt(lam)
    w, p, q, r, d_diag, a_block = _split_blocks(s.M / sq)
    if s.M.shape[0]:
        rot = siegel_unitary_map(w)
        s = _as_siegel(conjugate(s, rot))
        chain = chain + [to_proj(rot)]
    # first Heisenberg move: kill the u- and v-translations
    gamma = np.zeros(p + q + r, dtype=complex)
    if p:
        gamma[:p] = s.c[:p] / (sq - 1.0)
    if q:
        gamma[p:p + q] = np.linalg.solve(sq * np.diag(d_diag) - np.eye(q), s.c[p:p + q])
    if p or q:
        tau = heisenberg_map(gamma, 1j * float(np.vdot(gamma, gamma).real))
        s = _as_siegel(conjugate(s, tau))
        chain = chain + [to_proj(tau)]
    _require(float(np.max(np.abs(s.a[:p + q]), initial=0.0)), SNAP_TOL,
             "u/v coefficients after translation removal")
    # second Heisenberg move on the w-block: convert the translation into
    # the z-row coefficient; resonant entries instead drop their z-row
    # coefficient and keep the translation
    c_res = np.zeros(r, dtype=complex)
    if r:
        if _is_diagonal(a_block):
            diag = np.diag(a_block)
            res = np.abs(1.0 - sq * diag) <= RESONANCE_TOL
        else:
            diag = None
            res = np.zeros(r, dtype=bool)
            if np.min(np.abs(1.0 - sq * np.linalg.eigvals(a_block))) <= RESONANCE_TOL:
                raise NumericError(
                    "resonant non-diagonal contraction block; cannot normalize"
                )
        gamma3 = np.zeros(r, dtype=complex)
        nonres = ~res
        if np.any(nonres):
            if diag is not None:
                gamma3[nonres] = s.c[p + q:][nonres] / (sq * diag[nonres] - 1.0)
            else:
                gamma3 = np.linalg.solve(sq * a_block - np.eye(r), s.c[p + q:])
        if np.any(res):
            # kill the z-row coefficient on the resonant entries instead
            denom = sq * np.conj(diag[res]) - lam
            gamma3[res] = s.a[p + q:][res] / (-denom)
        full = np.concatenate([np.zeros(p + q, dtype=complex), gamma3])
        tau2 = heisenberg_map(full, 1j * float(np.vdot(full, full).real))
        s = _as_siegel(conjugate(s, tau2))
        chain = chain + [to_proj(tau2)]
        c_res[res] = s.c[p + q:][res]
        _require(float(np.max(np.abs(s.c[p + q:][nonres]), initial=0.0)), SNAP_TOL,
                 "w-translation after conversion")
        _require(float(np.max(np.abs(s.a[p + q:][res]), initial=0.0)), SNAP_TOL,
                 "z-row coefficient on resonant entries")
    c_vec = s.a[p + q:].copy()
    if r:
        c_vec[res] = 0.0
    b = complex(s.b)
    m_clean = sq * _block_matrix(p, d_diag, a_block)
    normal_map = SiegelMap(
        lam,
        np.concatenate([np.zeros(p + q), c_vec]),
        b,
        m_clean,
        np.concatenate([np.zeros(p + q), c_res]),
        block_split=(p, q, r),
    )
    params = {"lam": lam, "b": b, "c": c_vec, "c_res": c_res, "D": d_diag,
              "A": a_block, "block_split": (p, q, r)}
    return NormalForm(FORM_HYPERBOLIC, normal_map, chain, params)


def hyperbolic_conditions(nf: NormalForm, tol: float = 1e-8) -> list:
    """Margins of the hyperbolic normal-form conditions.

    Structural checks (D avoids 1, both I - A^H A and I - A A^H psd, the
    residual translation lies in the range the contraction admits) plus
    the generic affine self-map conditions of the normal map itself.
    """
    d_diag = np.atleast_1d(nf.parameters["D"])
    a_block = nf.parameters["A"]
    c_res = nf.parameters["c_res"]
    margin1 = float(np.min(np.abs(d_diag - 1.0))) if d_diag.size else 1.0
    if a_block.size:
        r = a_block.shape[0]
        qmat = hermitian_part(np.eye(r) - a_block.conj().T @ a_block)
        pmat = hermitian_part(np.eye(r) - a_block @ a_block.conj().T)
        margin2 = float(min(np.min(np.linalg.eigvalsh(qmat)), np.min(np.linalg.eigvalsh(pmat))))
        x = a_block.conj().T @ c_res
        qp = pinv(qmat)
        margin4 = -float(np.linalg.norm(qmat @ qp @ x - x))
    else:
        margin2 = 0.0
        margin4 = 0.0
    out = [
        Condition("D_spectrum_avoids_1", margin1, margin1 > UNIMODULAR_TOL),
        Condition("Q_and_P_psd", margin2, margin2 >= -tol),
        Condition("AHc_in_range_of_Q", margin4, margin4 >= -tol),
    ]
    return out + siegel_conditions(nf.normal_map, tol)


# ---------------------------------------------------------------------------
# helpers


def _as_siegel(m) -> SiegelMap:
    if isinstance(m, SiegelMap):
        return m
    from .maps import siegel_map_from_proj

    return siegel_map_from_proj(to_proj(m))


def _is_diagonal(m: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(m - np.diag(np.diag(m))), initial=0.0) <= tol)
