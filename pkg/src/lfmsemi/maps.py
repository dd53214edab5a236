"""Linear fractional map values on the unit ball and the Siegel half-plane.

A map z -> (Az + B) / (<z, C> + D) is stored either as a
:class:`BallMap` (self-map of the unit ball B_N, denominator normalized
to D = 1), a :class:`SiegelMap` (affine self-map of the half-plane
H^N = {(z1, w) : Im z1 > |w|^2} fixing infinity), or a raw
:class:`ProjMap` carrying just the homogeneous (N+1)x(N+1) matrix with
domain tags.  ProjMap is the common currency for composition, inversion
and Cayley transport; the typed wrappers add validation.

Inner products are hermitian with conjugation on the second slot:
<z, c> = sum_j z_j * conj(c_j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    FormError,
    NotInvertibleError,
    NumericError,
    PoleError,
)
from .linalg import UNIMODULAR_TOL, as_matrix, as_vector

BALL = "ball"
SIEGEL = "siegel"

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"

#: |delta - 1| at or below this classifies as parabolic
PARABOLIC_DELTA_TOL = 1e-6

#: seed of the fixed sample used for constructor checks and map equality
DEFAULT_SAMPLE_SEED = 20250808

_SELF_MAP_SLACK = 1e-9
_POLE_TOL = 1e-14


# ---------------------------------------------------------------------------
# sampling


def sample_ball_points(dim: int, count: int = 1000, seed: int = DEFAULT_SAMPLE_SEED,
                       radii=None) -> np.ndarray:
    """Deterministic sample of B_N: uniform directions on radius shells.

    Returns a read-only cached array; copy before mutating.
    """
    if dim < 1 or count < 1:
        raise DimensionError("dim and count must be positive")
    if radii is None:
        radii = (0.1, 0.25, 0.4, 0.55, 0.7, 0.8, 0.9, 0.95)
    return _ball_sample_cached(dim, count, seed, tuple(float(r) for r in np.atleast_1d(radii)))


@lru_cache(maxsize=64)
def _ball_sample_cached(dim: int, count: int, seed: int, radii: tuple) -> np.ndarray:
    rng = np.random.default_rng(seed)
    rad = np.asarray(radii, dtype=float)
    dirs = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    pts = dirs * rad[np.arange(count) % len(rad), None]
    pts.setflags(write=False)
    return pts


def sample_siegel_points(dim: int, count: int = 1000,
                         seed: int = DEFAULT_SAMPLE_SEED, radii=None) -> np.ndarray:
    """Deterministic sample of H^N: Cayley image of the ball sample."""
    zs = sample_ball_points(dim, count, seed, radii)
    return np.stack([_cayley_point(z) for z in zs])


def _cayley_point(z: np.ndarray) -> np.ndarray:
    z1, zp = z[0], z[1:]
    den = 1.0 - z1
    return np.concatenate(([1j * (1.0 + z1) / den], 1j * zp / den))


def _inv_cayley_point(u: np.ndarray) -> np.ndarray:
    u1, up = u[0], u[1:]
    den = u1 + 1j
    return np.concatenate([[(u1 - 1j) / den], 2.0 * up / den])


def domain_margin(z: np.ndarray, domain: str) -> float:
    """Positive inside the domain: 1 - |z| on the ball, Im z1 - |w|^2 on H^N."""
    z = as_vector(z)
    if domain == BALL:
        return float(1.0 - np.linalg.norm(z))
    if domain == SIEGEL:
        return float(z[0].imag - np.linalg.norm(z[1:]) ** 2)
    raise DomainError(f"unknown domain {domain!r}")


def _check_in_domain(z: np.ndarray, domain: str, slack: float = _SELF_MAP_SLACK) -> None:
    if domain_margin(z, domain) < -slack:
        raise DomainError(f"point {z} lies outside the {domain} domain")


# ---------------------------------------------------------------------------
# homogeneous-matrix maps


@dataclass(frozen=True)
class ProjMap:
    """Linear fractional map given by its homogeneous matrix.

    Acts on points by mat @ (z, 1); the last homogeneous coordinate is
    the denominator.  No domain membership checks are performed here.
    """

    mat: np.ndarray
    domain: str = BALL
    codomain: str = BALL

    def __post_init__(self):
        m = as_matrix(self.mat, square=True)
        scale = np.linalg.norm(m) / np.sqrt(m.shape[0])
        if scale == 0:
            raise NotInvertibleError("zero homogeneous matrix")
        object.__setattr__(self, "mat", m / scale)

    @property
    def dim(self) -> int:
        return self.mat.shape[0] - 1

    def __call__(self, z) -> np.ndarray:
        z = as_vector(z)
        if len(z) != self.dim:
            raise DimensionError(f"point has dimension {len(z)}, map expects {self.dim}")
        hom = self.mat @ np.concatenate([z, [1.0]])
        den = hom[-1]
        if abs(den) < _POLE_TOL * max(1.0, float(np.max(np.abs(hom)))):
            raise PoleError(f"denominator vanished at {z}")
        return hom[:-1] / den

    def inverse(self) -> "ProjMap":
        try:
            inv = np.linalg.inv(self.mat)
        except np.linalg.LinAlgError as exc:
            raise NotInvertibleError(str(exc)) from exc
        if not np.all(np.isfinite(inv)):
            raise NotInvertibleError("homogeneous matrix is singular")
        return ProjMap(inv, domain=self.codomain, codomain=self.domain)

    def then(self, other: "ProjMap") -> "ProjMap":
        """other after self (other o self)."""
        if other.domain != self.codomain:
            raise DomainError(
                f"cannot compose: {self.codomain} output into {other.domain} input"
            )
        return ProjMap(other.mat @ self.mat, domain=self.domain, codomain=other.codomain)


def cayley_transform(dim: int) -> ProjMap:
    """The biholomorphism B_N -> H^N, e1 -> infinity.

    sigma(z1, z') = (i (1+z1)/(1-z1), i z'/(1-z1)).
    """
    n = dim
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[0, 0] = 1j
    m[0, n] = 1j
    for j in range(1, n):
        m[j, j] = 1j
    m[n, 0] = -1.0
    m[n, n] = 1.0
    return ProjMap(m, domain=BALL, codomain=SIEGEL)


# ---------------------------------------------------------------------------
# ball maps


@dataclass(frozen=True)
class BallMap:
    """Self-map (Az + B) / (<z, C> + 1) of the unit ball.

    The constructor normalizes D to 1, requires |C| < 1 so the
    denominator cannot vanish on the closed ball, and verifies the
    self-map property on a fixed deterministic sample.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: complex = 1.0

    def __post_init__(self):
        a = as_matrix(self.A, square=True)
        b = as_vector(self.B)
        c = as_vector(self.C)
        d = complex(self.D)
        n = a.shape[0]
        if len(b) != n or len(c) != n:
            raise DimensionError("A, B, C dimensions disagree")
        if abs(d) < _POLE_TOL:
            raise DomainError("denominator vanishes at the origin (D = 0)")
        a, b, c, d = a / d, b / d, c / np.conj(d), 1.0 + 0.0j
        if np.linalg.norm(c) >= 1.0 - 1e-12:
            raise DomainError(
                "denominator invariant violated: need |C| < |D| so that "
                "<z, C> + D cannot vanish on the closed ball"
            )
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)
        object.__setattr__(self, "D", d)
        worst = self.self_map_margin()
        if worst < -_SELF_MAP_SLACK:
            raise DomainError(f"not a self-map of the ball (margin {worst:.3e})")

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def self_map_margin(self, count: int = 1000) -> float:
        """min over the fixed sample of 1 - |phi(z)|."""
        zs = sample_ball_points(self.dim, count)
        img = self.eval_many(zs)
        return float(np.min(1.0 - np.linalg.norm(img, axis=1)))

    def denominator(self, z) -> complex:
        return complex(np.vdot(self.C, as_vector(z)) + self.D)

    def __call__(self, z) -> np.ndarray:
        z = as_vector(z)
        if len(z) != self.dim:
            raise DimensionError(f"point has dimension {len(z)}, map expects {self.dim}")
        _check_in_domain(z, BALL)
        den = self.denominator(z)
        if abs(den) < _POLE_TOL:
            raise PoleError(f"denominator vanished at {z}")
        return (self.A @ z + self.B) / den

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on a (K, N) array of points."""
        den = zs @ np.conj(self.C) + self.D
        return (zs @ self.A.T + self.B) / den[:, None]

    def to_proj(self) -> ProjMap:
        n = self.dim
        m = np.zeros((n + 1, n + 1), dtype=complex)
        m[:n, :n] = self.A
        m[:n, n] = self.B
        m[n, :n] = np.conj(self.C)
        m[n, n] = self.D
        return ProjMap(m, domain=BALL, codomain=BALL)

    def differential(self, z) -> np.ndarray:
        """Jacobi matrix of the map at z."""
        z = as_vector(z)
        den = self.denominator(z)
        return (self.A - np.outer(self(z), np.conj(self.C))) / den


def ball_map_from_proj(p: ProjMap) -> BallMap:
    if not (p.domain == BALL and p.codomain == BALL):
        raise DomainError("homogeneous matrix is not tagged as a ball self-map")
    n = p.dim
    m = p.mat
    return BallMap(A=m[:n, :n], B=m[:n, n], C=np.conj(m[n, :n]), D=m[n, n])


def identity_ball_map(dim: int) -> BallMap:
    return BallMap(np.eye(dim), np.zeros(dim), np.zeros(dim), 1.0)


def unitary_ball_map(u) -> BallMap:
    u = as_matrix(u, square=True)
    n = u.shape[0]
    return BallMap(u, np.zeros(n), np.zeros(n), 1.0)


def ball_automorphism(a) -> BallMap:
    """The involutive automorphism of B_N exchanging 0 and the point a."""
    a = as_vector(a)
    n = len(a)
    norm2 = float(np.vdot(a, a).real)
    if norm2 >= 1.0:
        raise DomainError("automorphism center must lie inside the ball")
    if norm2 == 0.0:
        return identity_ball_map(n)
    s = np.sqrt(1.0 - norm2)
    proj = np.outer(a, np.conj(a)) / norm2
    amat = -(proj + s * (np.eye(n) - proj))
    return BallMap(A=amat, B=a.copy(), C=-a.copy(), D=1.0)


# ---------------------------------------------------------------------------
# Siegel maps


@dataclass(frozen=True)
class SiegelMap:
    """Affine self-map of H^N fixing infinity.

    (z, w) -> (lam * z + 2i <w, a> + b, M @ w + c)

    ``block_split`` optionally records sizes (p, q, r) of the u/v/w
    sub-blocks when M is in split form.
    """

    lam: complex
    a: np.ndarray
    b: complex
    M: np.ndarray
    c: np.ndarray
    block_split: Optional[tuple] = field(default=None)

    def __post_init__(self):
        k = np.asarray(self.M).shape[0] if np.asarray(self.M).size else len(as_vector(self.a))
        m = np.asarray(self.M, dtype=complex).reshape(k, k)
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        a = as_vector(self.a) if k else np.zeros(0, dtype=complex)
        c = as_vector(self.c) if k else np.zeros(0, dtype=complex)
        if len(a) != k or len(c) != k:
            raise DimensionError("a, c, M dimensions disagree")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "M", m)
        object.__setattr__(self, "c", c)
        if self.block_split is not None:
            p, q, r = self.block_split
            if p + q + r != k or min(p, q, r) < 0:
                raise DimensionError("block_split does not tile the w-block")

    @property
    def dim(self) -> int:
        return self.M.shape[0] + 1

    def __call__(self, z) -> np.ndarray:
        z = as_vector(z)
        if len(z) != self.dim:
            raise DimensionError(f"point has dimension {len(z)}, map expects {self.dim}")
        _check_in_domain(z, SIEGEL)
        z1, w = z[0], z[1:]
        top = self.lam * z1 + 2j * np.vdot(self.a, w) + self.b
        return np.concatenate([[top], self.M @ w + self.c])

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        z1 = zs[:, 0]
        w = zs[:, 1:]
        top = self.lam * z1 + 2j * (w @ np.conj(self.a)) + self.b
        return np.concatenate([top[:, None], w @ self.M.T + self.c], axis=1)

    def to_proj(self) -> ProjMap:
        n = self.dim
        m = np.zeros((n + 1, n + 1), dtype=complex)
        m[0, 0] = self.lam
        m[0, 1:n] = 2j * np.conj(self.a)
        m[0, n] = self.b
        m[1:n, 1:n] = self.M
        m[1:n, n] = self.c
        m[n, n] = 1.0
        return ProjMap(m, domain=SIEGEL, codomain=SIEGEL)


def siegel_map_from_proj(p: ProjMap, tol: float = 1e-8) -> SiegelMap:
    """Read the affine (z, w) form off a homogeneous matrix.

    Raises :class:`FormError` when the map does not fix infinity, i.e.
    when the denominator row or the z-column of the w-rows is not
    negligible.
    """
    if not (p.domain == SIEGEL and p.codomain == SIEGEL):
        raise DomainError("homogeneous matrix is not tagged as a Siegel self-map")
    n = p.dim
    m = p.mat
    scale = float(np.max(np.abs(m)))
    if abs(m[n, n]) < tol * scale:
        raise FormError("map does not fix infinity (constant denominator absent)")
    m = m / m[n, n]
    stray = float(max(np.max(np.abs(m[n, :n])), np.max(np.abs(m[1:n, 0]), initial=0.0)))
    if stray > tol * max(1.0, float(np.max(np.abs(m)))):
        raise FormError(
            f"map is not in affine Siegel form (stray coefficient {stray:.3e}); "
            "only non-elliptic maps with Denjoy-Wolff point at e1 qualify"
        )
    return SiegelMap(
        lam=m[0, 0],
        a=np.conj(m[0, 1:n] / 2j),
        b=m[0, n],
        M=m[1:n, 1:n],
        c=m[1:n, n],
    )


def identity_siegel_map(dim: int) -> SiegelMap:
    k = dim - 1
    return SiegelMap(1.0, np.zeros(k), 0.0, np.eye(k), np.zeros(k))


def heisenberg_map(gamma, beta) -> SiegelMap:
    """(z, w) -> (z + 2i <w, gamma> + beta, w + gamma).

    An automorphism of H^N exactly when Im beta = |gamma|^2.
    """
    gamma = as_vector(gamma)
    k = len(gamma)
    return SiegelMap(1.0, gamma.copy(), beta, np.eye(k), gamma.copy())


def siegel_unitary_map(v) -> SiegelMap:
    """(z, w) -> (z, V w) for unitary V on the w-block."""
    v = as_matrix(v, square=True)
    k = v.shape[0]
    return SiegelMap(1.0, np.zeros(k), 0.0, v, np.zeros(k))


# ---------------------------------------------------------------------------
# generic operations

Map = BallMap | SiegelMap | ProjMap


def to_proj(f: Map) -> ProjMap:
    return f if isinstance(f, ProjMap) else f.to_proj()


def _wrap_like(p: ProjMap) -> Map:
    if p.domain == p.codomain == BALL:
        return ball_map_from_proj(p)
    if p.domain == p.codomain == SIEGEL:
        try:
            return siegel_map_from_proj(p)
        except FormError:
            return p
    return p


def compose(f: Map, g: Map) -> Map:
    """f after g.  Same-type operands return the same type."""
    p = to_proj(g).then(to_proj(f))
    if type(f) is type(g) and isinstance(f, (BallMap, SiegelMap)):
        return _wrap_like(p)
    return p


def inverse(f: Map) -> Map:
    p = to_proj(f).inverse()
    if isinstance(f, (BallMap, SiegelMap)):
        return _wrap_like(p)
    return p


def conjugate(f: Map, s: Map) -> Map:
    """s o f o s^-1 (transports f along the change of variable s)."""
    sp = to_proj(s)
    p = sp.inverse().then(to_proj(f)).then(sp)
    return _wrap_like(p)


def map_points(f: Map, zs: np.ndarray) -> np.ndarray:
    if isinstance(f, (BallMap, SiegelMap)):
        return f.eval_many(np.asarray(zs, dtype=complex))
    return np.stack([f(z) for z in np.asarray(zs, dtype=complex)])


def maps_agree(f: Map, g: Map, points: np.ndarray, tol: float = 1e-10) -> bool:
    return pointwise_distance(f, g, points) <= tol


def pointwise_distance(f: Map, g: Map, points: np.ndarray) -> float:
    fa = map_points(f, points)
    ga = map_points(g, points)
    return float(np.max(np.linalg.norm(fa - ga, axis=1)))


def is_identity(f: Map, tol: float = 1e-12) -> bool:
    p = to_proj(f)
    zs = (sample_ball_points if p.domain == BALL else sample_siegel_points)(p.dim, 64)
    return pointwise_distance(f, _identity_like(p), zs) <= tol


def _identity_like(p: ProjMap) -> Map:
    return identity_ball_map(p.dim) if p.domain == BALL else identity_siegel_map(p.dim)


# ---------------------------------------------------------------------------
# Cayley transport


def cayley_to_ball(g: SiegelMap) -> BallMap:
    """sigma^-1 o g o sigma as a validated ball self-map."""
    sigma = cayley_transform(g.dim)
    p = sigma.then(g.to_proj()).then(sigma.inverse())
    return ball_map_from_proj(p)


def cayley_to_siegel(f: BallMap, dw_point: Optional[np.ndarray] = None,
                     with_chain: bool = False):
    """Transport a non-elliptic ball map to its affine Siegel form.

    The Denjoy-Wolff point is first rotated to e1 by a unitary so the
    transported map fixes infinity (a no-op when it already sits at e1,
    making the round trip with :func:`cayley_to_ball` exact); elliptic
    maps raise :class:`FormError`.  When *dw_point* is given,
    classification is skipped and that boundary point is used.

    With ``with_chain=True`` also returns the list of conjugating maps
    [rotation, cayley] whose composition s satisfies
    result = s o f o s^-1.
    """
    if dw_point is None:
        cls = classify(f)
        if cls.kind == ELLIPTIC:
            raise FormError("elliptic maps have no affine Siegel form fixing infinity")
        dw_point = cls.dw_point
    rot = _rotation_to_e1(dw_point)
    if np.linalg.norm(rot - np.eye(f.dim)) < 1e-9:
        rot = np.eye(f.dim)
    rot_map = unitary_ball_map(rot)
    rotated = conjugate(f, rot_map)
    sigma = cayley_transform(f.dim)
    q = sigma.inverse().then(to_proj(rotated)).then(sigma)
    result = siegel_map_from_proj(q)
    if with_chain:
        return result, [to_proj(rot_map), sigma]
    return result


def _rotation_to_e1(p: np.ndarray) -> np.ndarray:
    from .linalg import unitary_with_first_column

    p = as_vector(p)
    return unitary_with_first_column(p).conj().T


# ---------------------------------------------------------------------------
# fixed points and classification


@dataclass(frozen=True)
class Classification:
    """Elliptic/hyperbolic/parabolic verdict with fixed-point data."""

    kind: str
    interior_fixed_points: list
    boundary_fixed_points: list
    dw_point: Optional[np.ndarray] = None
    delta: Optional[float] = None
    notes: str = ""


def fixed_points(f: BallMap, tol: float = 1e-9):
    """Fixed points of f in the closed ball.

    Eigenvectors (v, tau) of the homogeneous matrix with tau != 0
    project to fixed points v / tau; they are grouped by eigenvalue
    cluster so defective (parabolic-type) eigenvalues still produce one
    accurate representative.  Returns (interior, boundary) lists.
    """
    from .linalg import schur_form

    m = to_proj(f).mat
    n = m.shape[0]
    eigs = schur_form(m).eigenvalues
    scale = float(np.max(np.abs(eigs)))
    candidates = []
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i] or abs(eigs[i]) <= 1e-12 * scale:
            continue
        # adaptive Jordan clustering: a defective eigenvalue splits by
        # ~eps^(1/k) in floating point, but the cluster MEAN stays
        # eps-accurate, so (m - mean I) is numerically singular exactly
        # when the prefix is a true cluster.  Grow greedily from the
        # largest prefix of nearest eigenvalues.
        order = np.argsort(np.abs(eigs - eigs[i]))
        kernel = None
        for k in range(n, 0, -1):
            idx = order[:k]
            if np.any(used[idx]):
                continue
            lam_bar = np.mean(eigs[idx])
            _, svals, vh = np.linalg.svd(m - lam_bar * np.eye(n))
            if svals[-1] <= 1e-10 * max(1.0, svals[0]):
                kernel = [vh[j].conj() for j in range(n)
                          if svals[j] <= 1e-8 * max(1.0, svals[0])]
                used[idx] = True
                break
        if kernel is None:
            used[i] = True
            continue
        candidates.extend(kernel)
        if len(kernel) >= 2:
            rep = _nearest_kernel_point(np.column_stack(kernel))
            if rep is not None:
                candidates.append(rep)
    interior, boundary = [], []
    for v in candidates:
        tau = v[-1]
        if abs(tau) <= 1e-9 * np.max(np.abs(v)):
            continue  # fixed point at infinity, not a ball point
        p = v[:-1] / tau
        r = float(np.linalg.norm(p))
        if r >= 1.0 + tol:
            continue
        if np.linalg.norm(f(p) - p) > tol:
            continue
        if any(np.linalg.norm(p - q_) <= 1e-7 for q_ in interior + boundary):
            continue
        (interior if r < 1.0 - tol else boundary).append(p)
    if not interior and not boundary:
        raise NumericError("no fixed point found in the closed ball")
    key = lambda p: tuple(np.round(np.concatenate([p.real, p.imag]), 10))
    return sorted(interior, key=key), sorted(boundary, key=key)


def _nearest_kernel_point(basis: np.ndarray):
    """Point of the affine fixed set {v/tau : v in span(basis)} nearest 0."""
    b_top, b_tau = basis[:-1, :], basis[-1, :]
    if np.max(np.abs(b_tau)) < 1e-12:
        return None
    sol, *_ = np.linalg.lstsq(
        np.vstack([b_top, 1e6 * b_tau[None, :]]),
        np.concatenate([np.zeros(basis.shape[0] - 1), [1e6]]),
        rcond=None,
    )
    v = basis @ sol
    if abs(v[-1]) < 1e-9 * max(1.0, float(np.max(np.abs(v)))):
        return None
    return v


def classify(f: BallMap, parabolic_tol: float = PARABOLIC_DELTA_TOL) -> Classification:
    """Denjoy-Wolff classification of a non-identity ball self-map."""
    if is_identity(f):
        raise DomainError("the identity map is excluded from classification")
    interior, boundary = fixed_points(f)
    if interior:
        return Classification(ELLIPTIC, interior, boundary)
    if not boundary:
        raise NumericError("map without interior fixed points has no boundary fixed point")
    dw = boundary[0] if len(boundary) == 1 else _dw_by_iteration(f, boundary)
    delta = boundary_dilation(f, dw)
    margin = abs(delta - 1.0)
    if margin <= parabolic_tol:
        return Classification(PARABOLIC, [], boundary, dw_point=dw, delta=delta,
                              notes=f"|delta-1| = {margin:.3e}")
    if not 0.0 < delta < 1.0:
        raise NumericError(f"dilation coefficient {delta} outside (0, 1]")
    return Classification(HYPERBOLIC, [], boundary, dw_point=dw, delta=delta)


def _dw_by_iteration(f: BallMap, boundary: list) -> np.ndarray:
    """Pick the boundary fixed point that attracts iteration from 0."""
    m = to_proj(f).mat
    power = m.copy()
    for _ in range(40):  # m^(2^40) with rescaling
        power = power @ power
        power /= np.max(np.abs(power))
    hom = power @ np.concatenate([np.zeros(f.dim), [1.0]])
    if abs(hom[-1]) < 1e-13 * np.max(np.abs(hom)):
        limit = hom[:-1] / np.linalg.norm(hom[:-1])
    else:
        limit = hom[:-1] / hom[-1]
    dists = [np.linalg.norm(limit - p) for p in boundary]
    return boundary[int(np.argmin(dists))]


def boundary_dilation(f: BallMap, w: np.ndarray, levels: int = 15) -> float:
    """Radial limit of (1 - |f(z)|^2) / (1 - |z|^2) at the boundary point w.

    Evaluated along z = (1 - eps) w on a halving eps-schedule starting
    at 1e-2, then Richardson-extrapolated to eps -> 0.
    """
    w = as_vector(w) / np.linalg.norm(w)
    eps = 1e-2 / 2.0 ** np.arange(levels)
    vals = []
    for e in eps:
        z = (1.0 - e) * w
        img = f(z)
        vals.append((1.0 - float(np.vdot(img, img).real)) / (e * (2.0 - e)))
    table = np.array(vals)
    for order in range(1, 4):
        table = (2.0 ** order * table[1:] - table[:-1]) / (2.0 ** order - 1.0)
    return float(table[-1])


def unitary_index(f: BallMap, fixed_point: Optional[np.ndarray] = None,
                  tol: float = UNIMODULAR_TOL) -> int:
    """Total multiplicity of unimodular eigenvalues of the differential
    at an interior fixed point."""
    if fixed_point is None:
        interior, _ = fixed_points(f)
        if not interior:
            raise DomainError("unitary index requires an interior fixed point")
        fixed_point = interior[0]
    d = f.differential(fixed_point)
    eigs = np.linalg.eigvals(d)
    return int(np.sum(np.abs(np.abs(eigs) - 1.0) <= tol))
