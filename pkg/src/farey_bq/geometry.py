"""SL(2,C) matrices as isometries of the upper half-space H^3.

Ideal points are complex numbers or ``INF``.  An oriented geodesic is stored
together with its traceless, determinant-one lift (the half-turn about it);
negating the lift reverses the orientation.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .freegroup import Word

INF = math.inf
TAU_CLS = 1e-9
RENORMALIZE_EVERY = 32


class GeometryError(ValueError):
    """Degenerate configuration (parabolic input, coincident endpoints, ...)."""


class ReducibleError(GeometryError):
    """The representation fixes a point of P^1(C) (commutator trace 2)."""


def is_inf(z):
    return isinstance(z, float) and math.isinf(z) or (isinstance(z, complex) and cmath.isinf(z))


class Mat2:
    """2x2 complex matrix [[a, b], [c, d]]."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = complex(a), complex(b), complex(c), complex(d)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=complex)
        return cls(arr[0, 0], arr[0, 1], arr[1, 0], arr[1, 1])

    def to_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o):
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __mul__(self, k):
        return Mat2(self.a * k, self.b * k, self.c * k, self.d * k)

    __rmul__ = __mul__

    def __add__(self, o):
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o):
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def tr(self):
        return self.a + self.d

    def inv(self):
        """Inverse assuming det = 1 (the adjugate)."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def norm(self):
        return math.sqrt(abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2)

    def normalized(self):
        det = self.det()
        if det == 0:
            raise GeometryError("singular matrix")
        return self * (1 / cmath.sqrt(det))

    def dist(self, o):
        return (self - o).norm()

    def projective_dist(self, o):
        """Distance in PSL(2,C): min over the two lifts of ``o``."""
        return min((self - o).norm(), (self + o).norm())

    def mobius(self, z):
        if is_inf(z):
            return INF if self.c == 0 else self.a / self.c
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}, {self.c}, {self.d})"


ID = Mat2.identity()


def renormalize(M, safe_norm=1e6):
    """Rescale to det 1, but only while the entries are small enough for
    ``det()`` to be computed without cancellation."""
    if M.norm() > safe_norm:
        return M
    return M.normalized()


# -- classification and lengths --------------------------------------------


class Kind(enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    LOXODROMIC = "loxodromic"


def is_non_loxodromic_trace(t, tol=TAU_CLS):
    """Trace real (within ``tol``) and in [-2, 2]."""
    return abs(t.imag) <= tol and abs(t.real) <= 2 + tol


def classify(M, tol=TAU_CLS):
    t = M.tr()
    if not is_non_loxodromic_trace(t, tol):
        return Kind.LOXODROMIC
    if abs(abs(t.real) - 2) <= tol:
        if M.projective_dist(ID) <= math.sqrt(tol):
            return Kind.IDENTITY
        return Kind.PARABOLIC
    return Kind.ELLIPTIC


@dataclass(frozen=True)
class ComplexLength:
    ell: float
    theta: float

    @property
    def value(self):
        return complex(self.ell, self.theta)


def _wrap(theta):
    """Wrap into (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t == -math.pi else t


def complex_length(M, tol=TAU_CLS):
    kind = classify(M, tol)
    if kind in (Kind.PARABOLIC, Kind.IDENTITY):
        raise GeometryError(f"{kind.value} element has no complex translation length")
    lam = 2 * cmath.acosh(M.tr() / 2)
    return ComplexLength(max(lam.real, 0.0), _wrap(lam.imag))


def translation_length(M):
    """Real translation length; 0 for elliptic, parabolic and identity."""
    return max(2 * cmath.acosh(M.tr() / 2).real, 0.0)


def parallel_angle(h):
    """The angle ``alpha`` with ``sin(alpha) cosh(h) = 1``."""
    if not h > 0:
        raise ValueError("parallel angle needs h > 0")
    return math.asin(1 / math.cosh(h))


# -- oriented geodesics and half-turns --------------------------------------


@dataclass(frozen=True)
class OrientedGeodesic:
    """Geodesic running from ideal point ``u`` to ``u2`` with its half-turn lift."""

    u: complex
    u2: complex
    lift: Mat2

    def reversed(self):
        return OrientedGeodesic(self.u2, self.u, -self.lift)

    def endpoints(self):
        return self.u, self.u2


def half_turn_matrix(u, u2):
    """Traceless det-1 lift of the half-turn about the oriented geodesic ``u -> u2``.

    The orientation convention is the one under which the hexagon amplitude
    satisfies ``am = -i sinh(eta_X) sinh(eta_Y) sinh(eta_Q)``; ``(0, INF)``
    gives ``diag(i, -i)``.
    """
    if is_inf(u) and is_inf(u2):
        raise GeometryError("coincident endpoints")
    if is_inf(u2):
        return Mat2(1j, -2j * u, 0, -1j)
    if is_inf(u):
        return Mat2(-1j, 2j * u2, 0, 1j)
    if abs(u - u2) <= 1e-14 * max(1.0, abs(u), abs(u2)):
        raise GeometryError("coincident endpoints")
    k = 1j / (u2 - u)
    s = u + u2
    return Mat2(k * s, -2 * k * u * u2, 2 * k, -k * s)


def half_turn_from_endpoints(u, u2):
    return OrientedGeodesic(u, u2, half_turn_matrix(u, u2))


def _ratio(num, den):
    if den == 0 or (abs(den) <= 1e-15 * abs(num)):
        return INF
    return num / den


def geodesic_from_lift(H):
    """Oriented geodesic of a traceless det-1 matrix (inverse of ``half_turn_matrix``)."""
    H = renormalize(H)
    if abs(H.tr()) > 1e-7 * max(1.0, H.norm()):
        raise GeometryError("not a half-turn lift")
    al, be, ga = H.a, H.b, H.c
    # endpoints solve ga z^2 - 2 al z - be = 0; pick the form that avoids cancellation
    um, up = al - 1j, al + 1j
    if abs(um) >= abs(up):
        u, u2 = _ratio(um, ga), _ratio(-be, um)
    else:
        u, u2 = _ratio(-be, up), _ratio(up, ga)
    return OrientedGeodesic(u, u2, H)


def fixed_points(M):
    """Fixed points ``(repelling, attracting)`` of a non-parabolic Mobius map.

    For elliptics both multipliers have modulus one; the order is then fixed
    deterministically by the eigenvalue formula.
    """
    tr = M.tr()
    s = cmath.sqrt(tr * tr - 4)
    l1, l2 = (tr + s) / 2, (tr - s) / 2
    if abs(l1 - l2) <= 1e-12 * max(1.0, abs(l1)):
        raise GeometryError("parabolic or identity element has no axis")
    pts = []
    for lam in (l1, l2):
        v1 = (M.b, lam - M.a)
        v2 = (lam - M.d, M.c)
        v = v1 if abs(v1[0]) + abs(v1[1]) >= abs(v2[0]) + abs(v2[1]) else v2
        pts.append(_ratio(v[0], v[1]))
    if abs(l1) >= abs(l2):
        return pts[1], pts[0]
    return pts[0], pts[1]


def axis(M, tol=TAU_CLS):
    kind = classify(M, tol)
    if kind in (Kind.PARABOLIC, Kind.IDENTITY):
        raise GeometryError(f"{kind.value} element has no axis")
    rep, att = fixed_points(M)
    return half_turn_from_endpoints(rep, att)


def common_perpendicular(X, Y):
    """Half-turn lift about the common perpendicular of the axes of X and Y.

    Proportional to ``XY - YX``.  It is computed as the bracket of the axis
    half-turns, which differs from ``XY - YX`` by a scalar but stays accurate
    when X and Y are long products whose axes nearly coincide.  Conjugation by
    the result inverts X and Y.
    """
    Xs, Ys = X * (1 / X.norm()), Y * (1 / Y.norm())
    if (Xs @ Ys - Ys @ Xs).norm() < 1e-10 and _shares_endpoint(X, Y):
        raise ReducibleError("degenerate bracket: X and Y commute")
    gx, gy = axis(X), axis(Y)
    if _shared_endpoint(gx, gy, 1e-13):
        raise ReducibleError("degenerate bracket: axes share a fixed point")
    HX, HY = gx.lift, gy.lift
    K = HX @ HY - HY @ HX
    kn = K.norm()
    if kn < 1e-14:
        raise ReducibleError("degenerate bracket: coincident axes")
    K = K * (1 / kn)
    return geodesic_from_lift(K * (1 / cmath.sqrt(K.det())))


def _shares_endpoint(X, Y):
    try:
        return _shared_endpoint(axis(X), axis(Y), 1e-9)
    except GeometryError:
        return True


def _shared_endpoint(g1, g2, tol):
    for e in g1.endpoints():
        for f in g2.endpoints():
            if is_inf(e) or is_inf(f):
                if is_inf(e) and is_inf(f):
                    return True
            elif abs(e - f) <= tol * max(1.0, abs(e), abs(f)):
                return True
    return False


# -- representations ---------------------------------------------------------


def fricke_kappa(x, y, z):
    return x * x + y * y + z * z - x * y * z - 2


class Representation:
    """A lifted pair ``(A, B)`` in SL(2,C), images of ``a`` and ``b``."""

    def __init__(self, A, B):
        self.A = A.normalized() if abs(A.det() - 1) > 1e-12 else A
        self.B = B.normalized() if abs(B.det() - 1) > 1e-12 else B
        self._gens = {1: self.A, -1: self.A.inv(), 2: self.B, -2: self.B.inv()}

    @property
    def kappa(self):
        A, B = self.A, self.B
        return (A @ B @ A.inv() @ B.inv()).tr()

    def traces(self):
        return self.A.tr(), self.B.tr(), (self.A @ self.B).tr()

    def is_irreducible(self, tol=1e-9):
        return abs(self.kappa - 2) > tol

    def evaluate(self, w):
        M = ID
        for i, x in enumerate(w.letters, 1):
            M = M @ self._gens[x]
            if i % RENORMALIZE_EVERY == 0:
                M = renormalize(M)
        return M

    def trace(self, w):
        return self.evaluate(w).tr()

    def __repr__(self):
        return f"Representation({self.A!r}, {self.B!r})"

    def to_json(self):
        return {"matrices": {"a": [_pair(x) for x in self.A.entries()], "b": [_pair(x) for x in self.B.entries()]}}

    @classmethod
    def from_json(cls, obj):
        """Accept ``{"matrices": {"a": [[re, im] x 4], "b": ...}}`` or
        ``{"traces": {"x": [re, im], "y": ..., "z": ...}}``."""
        if "matrices" in obj:
            m = obj["matrices"]
            A = Mat2(*[_complex(v) for v in m["a"]])
            B = Mat2(*[_complex(v) for v in m["b"]])
            if A.det() == 0 or B.det() == 0:
                raise GeometryError("singular generator matrix")
            return cls(A, B)
        if "traces" in obj:
            t = obj["traces"]
            return representation_from_traces(_complex(t["x"]), _complex(t["y"]), _complex(t["z"]))
        raise ValueError("representation JSON needs 'matrices' or 'traces'")


def _pair(z):
    return [z.real, z.imag]


def _complex(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if len(v) != 2:
        raise ValueError(f"complex number must be [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def representation_from_traces(x, y, z):
    """Fricke normalization ``A = [[x, -1], [1, 0]]``, ``B = [[0, t], [-1/t, y]]``.

    ``t + 1/t = z`` with ``|t| >= 1``.
    """
    x, y, z = complex(x), complex(y), complex(z)
    s = cmath.sqrt(z * z - 4)
    t1, t2 = (z + s) / 2, (z - s) / 2
    t = t1 if abs(t1) >= abs(t2) else t2
    return Representation(Mat2(x, -1, 1, 0), Mat2(0, t, -1 / t, y))


def evaluate(rep, w):
    return rep.evaluate(w)


def _basis_images(rep, basis_words):
    x, y = basis_words
    if isinstance(x, Word):
        X, Y = rep.evaluate(x), rep.evaluate(y)
    else:
        X, Y = x, y
    return renormalize(X), renormalize(Y)


def coxeter_extension(rep, basis_words, tol=TAU_CLS):
    """Half-turns ``(P, Q, R)`` with ``X = -PQ`` and ``Y = -QR``.

    ``basis_words`` is a pair of Words (or already evaluated matrices).
    """
    if not rep.is_irreducible():
        raise ReducibleError("reducible representation (kappa = 2)")
    X, Y = _basis_images(rep, basis_words)
    for name, M in (("X", X), ("Y", Y)):
        if classify(M, tol) is not Kind.LOXODROMIC:
            raise GeometryError(f"{name} is not loxodromic")
    Q = common_perpendicular(X, Y).lift
    P = X @ Q
    R = Q @ Y
    return geodesic_from_lift(P), geodesic_from_lift(Q), geodesic_from_lift(R)


@dataclass(frozen=True)
class Hexagon:
    P: OrientedGeodesic
    Q: OrientedGeodesic
    R: OrientedGeodesic
    X: Mat2
    Y: Mat2
    etaX: complex
    etaY: complex
    etaZ: complex
    etaQ: complex
    amplitude: complex

    @property
    def theta(self):
        return abs(self.etaQ.imag)

    def cosine_law_residual(self):
        lhs = cmath.cosh(self.etaZ)
        rhs = cmath.cosh(self.etaX) * cmath.cosh(self.etaY) + cmath.sinh(self.etaX) * cmath.sinh(
            self.etaY
        ) * cmath.cosh(self.etaQ)
        return abs(lhs - rhs)

    def amplitude_residual(self):
        rhs = -1j * cmath.sinh(self.etaX) * cmath.sinh(self.etaY) * cmath.sinh(self.etaQ)
        return abs(self.amplitude - rhs)

    def kappa_residual(self, kappa):
        return abs(kappa - (2 - 4 * self.amplitude**2))


def _normalizer(g):
    """A det-1 Mobius map sending ``g.u -> 0`` and ``g.u2 -> INF``."""
    u, u2 = g.u, g.u2
    if is_inf(u2):
        M = Mat2(1, -u, 0, 1)
    elif is_inf(u):
        M = Mat2(0, 1, -1, u2)
    else:
        M = Mat2(1, -u, 1, -u2)
    return M.normalized()


def width_along(g, h1, h2):
    """Complex width from oriented geodesic ``h1`` to ``h2`` along ``g``.

    Both must be orthogonal to ``g``; the result is ``log`` of the ratio of
    their forward endpoints after normalizing ``g`` to ``0 -> INF``.
    """
    T = _normalizer(g)
    s1, s2 = T.mobius(h1.u2), T.mobius(h2.u2)
    if is_inf(s1) or is_inf(s2) or s1 == 0 or s2 == 0:
        raise GeometryError("geodesic shares an endpoint with the reference axis")
    return cmath.log(s2 / s1)


def hexagon(rep, basis_words, tol=TAU_CLS):
    P, Q, R = coxeter_extension(rep, basis_words, tol)
    X, Y = _basis_images(rep, basis_words)
    if classify(X @ Y, tol) is not Kind.LOXODROMIC:
        raise GeometryError("XY is not loxodromic")
    etaX = cmath.acosh(X.tr() / 2)
    etaY = cmath.acosh(Y.tr() / 2)
    etaZ = cmath.acosh((X @ Y).tr() / 2)
    etaQ = width_along(Q, axis(Y), axis(X))
    am = -(P.lift @ Q.lift @ R.lift).tr() / 2
    return Hexagon(P, Q, R, X, Y, etaX, etaY, etaZ, etaQ, am)


def angle_theta(rep, basis_words, tol=TAU_CLS):
    """``|Im eta_Q|`` in [0, pi], computed by normalizing the perpendicular to 0 -> INF.

    Only Q and the two axes are needed, so this avoids the long products
    P = XQ and R = QY of the full hexagon.
    """
    if not rep.is_irreducible():
        raise ReducibleError("reducible representation (kappa = 2)")
    X, Y = _basis_images(rep, basis_words)
    for name, M in (("X", X), ("Y", Y)):
        if classify(M, tol) is not Kind.LOXODROMIC:
            raise GeometryError(f"{name} is not loxodromic")
    Q = common_perpendicular(X, Y)
    return abs(width_along(Q, axis(Y), axis(X)).imag)


def theta_from_traces(tx, ty, tz, kappa, tw=None):
    """Angle from traces alone, well conditioned even when the axes nearly coincide.

    With ``tz = tr XY``, ``tw = tr X^-1 Y`` and ``kappa`` the commutator trace,
    ``sinh^2 eta_Q = (kappa - 2) / (4 sinh^2 eta_X sinh^2 eta_Y)`` and
    ``cosh eta_Q = (tz - tw) / (4 sinh eta_X sinh eta_Y)``; the second fixes the
    theta / pi - theta branch left open by the first.
    """
    if tw is None:
        tw = tx * ty - tz
    sx = cmath.sinh(cmath.acosh(tx / 2))
    sy = cmath.sinh(cmath.acosh(ty / 2))
    den = 2 * sx * sy
    if den == 0:
        raise GeometryError("X or Y is parabolic")
    S = cmath.sqrt(kappa - 2) / den
    C = (tz - tw) / (2 * den)
    e1 = cmath.asinh(S)
    e2 = 1j * math.pi - e1
    eta = e1 if abs(cmath.cosh(e1) - C) <= abs(cmath.cosh(e2) - C) else e2
    return abs(math.remainder(eta.imag, 2 * math.pi))


def angle_theta_arccosh(rep, basis_words, tol=TAU_CLS):
    """Same angle from ``arccosh(-tr(H_X H_Y) / 2)`` with natural half-turn lifts."""
    X, Y = _basis_images(rep, basis_words)
    HX, HY = axis(X, tol).lift, axis(Y, tol).lift
    return abs(cmath.acosh(-(HX @ HY).tr() / 2).imag)


def angle_theta_cosine_law(rep, basis_words):
    """Angle from the law of cosines alone."""
    X, Y = _basis_images(rep, basis_words)
    eX, eY = cmath.acosh(X.tr() / 2), cmath.acosh(Y.tr() / 2)
    eZ = cmath.acosh((X @ Y).tr() / 2)
    c = (cmath.cosh(eZ) - cmath.cosh(eX) * cmath.cosh(eY)) / (cmath.sinh(eX) * cmath.sinh(eY))
    return abs(cmath.acosh(c).imag)


# -- points of H^3 ------------------------------------------------------------


@dataclass(frozen=True)
class H3Point:
    z: complex
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("H3Point needs t > 0")


ORIGIN = H3Point(0j, 1.0)


def apply_isometry(M, p):
    """Poincare extension of the Mobius map ``M`` (det 1) acting on ``p``."""
    a, b, c, d = M.entries()
    z, t = p.z, p.t
    cz_d = c * z + d
    den = abs(cz_d) ** 2 + abs(c) ** 2 * t * t
    znew = ((a * z + b) * cz_d.conjugate() + a * c.conjugate() * t * t) / den
    return H3Point(znew, t / den)


def hyperbolic_distance(p, q):
    num = abs(p.z - q.z) ** 2 + (p.t - q.t) ** 2
    return 2 * math.asinh(math.sqrt(num) / (2 * math.sqrt(p.t * q.t)))


def point_on(g, s):
    """Point of ``g`` at signed parameter ``s`` (``s = 0`` is an arbitrary base point)."""
    Tinv = _normalizer(g).inv()
    return apply_isometry(Tinv, H3Point(0j, math.exp(s)))


def project(p, g):
    """Nearest point of ``g`` to ``p``."""
    T = _normalizer(g)
    q = apply_isometry(T, p)
    return apply_isometry(T.inv(), H3Point(0j, math.hypot(abs(q.z), q.t)))


def distance_to_geodesic(p, g):
    T = _normalizer(g)
    q = apply_isometry(T, p)
    return math.asinh(abs(q.z) / q.t)


def complex_distance(g1, g2):
    """``d + i phi`` with ``cosh(d + i phi) = -tr(H1 H2) / 2``, ``d >= 0``."""
    return cmath.acosh(-(g1.lift @ g2.lift).tr() / 2)


@dataclass(frozen=True)
class LineMeet:
    p1: H3Point
    p2: H3Point
    dist: float
    angle: float


def line_meet(g1, g2):
    """Feet of the common perpendicular of two geodesics and their distance.

    ``angle`` is the angle between the lines measured along the
    perpendicular, folded into [0, pi].  Intersecting lines give
    ``dist ~ 0`` and ``p1 ~ p2``.  Coincident lines give ``dist = 0`` with
    both feet at the projection of ``ORIGIN``.
    """
    if same_geodesic(g1, g2, tol=1e-12):
        p = project(ORIGIN, g1)
        return LineMeet(p, p, 0.0, 0.0)
    for e in g2.endpoints():
        for f in g1.endpoints():
            if (is_inf(e) and is_inf(f)) or (not is_inf(e) and not is_inf(f) and abs(e - f) < 1e-12):
                raise GeometryError("geodesics share an ideal endpoint")
    p1 = _foot(g1, g2)
    p2 = _foot(g2, g1)
    cd = complex_distance(g1, g2)
    dist = abs(cd.real)
    if abs(hyperbolic_distance(p1, p2) - dist) > 1e-8 * max(1.0, dist):
        p1, p2, dist = _meet_by_minimization(g1, g2)
    return LineMeet(p1, p2, dist, abs(cd.imag))


def _foot(g, h):
    T = _normalizer(g)
    v1, v2 = T.mobius(h.u), T.mobius(h.u2)
    if is_inf(v1) or is_inf(v2):
        # h runs to INF: the perpendicular from the vertical axis is horizontal
        # through the finite endpoint's modulus
        v = v2 if is_inf(v1) else v1
        r = abs(v)
    else:
        r = math.sqrt(abs(v1 * v2))
    if r == 0:
        raise GeometryError("geodesics share an ideal endpoint")
    return apply_isometry(T.inv(), H3Point(0j, r))


def _meet_by_minimization(g1, g2):
    res = minimize_scalar(lambda s: distance_to_geodesic(point_on(g1, s), g2), bracket=(-1.0, 1.0), tol=1e-12)
    p1 = point_on(g1, res.x)
    res2 = minimize_scalar(lambda s: distance_to_geodesic(point_on(g2, s), g1), bracket=(-1.0, 1.0), tol=1e-12)
    p2 = point_on(g2, res2.x)
    return p1, p2, hyperbolic_distance(p1, p2)


def same_geodesic(g1, g2, tol=1e-6):
    """Whether the unoriented geodesics coincide (endpoints equal as sets)."""

    def close(x, y):
        if is_inf(x) or is_inf(y):
            return is_inf(x) and is_inf(y)
        return abs(x - y) <= tol * max(1.0, abs(x))

    a, b = g1.endpoints()
    c, d = g2.endpoints()
    return (close(a, c) and close(b, d)) or (close(a, d) and close(b, c))
