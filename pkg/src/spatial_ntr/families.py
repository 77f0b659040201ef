"""Jump laws on (0, 1] and the scalar functionals built from them.

A jump law is a Levy density ``rho`` on (0, 1] for the jumps of the
cumulative hazard, normalised so that ``u * rho(u)`` is a probability
density.  Equivalently it is described by ``tau``, the Levy density of the
jumps ``y = -log(1 - u)`` of the log-survival process.  Every formula in
the package is expressed through three functionals::

    phi(w)      = int (1 - (1 - u)**w) rho(du)
    psi(i, k)   = int (1 - (1 - u)**i) (1 - u)**k rho(du) = phi(i + k) - phi(k)
    kappa(m, r) = int u**m (1 - u)**r rho(du)

Built-in families carry closed forms; all of them can also be evaluated by
adaptive quadrature, which is the only route for :class:`CustomDensity`.
"""

from __future__ import annotations

import functools
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, ClassVar

from scipy import integrate, special

from .errors import ConfigurationError, ConvergenceError, DomainError

__all__ = [
    "JumpLawFamily",
    "BetaProcess",
    "GeneralizedGamma",
    "TwoParamPD",
    "DirichletGenerating",
    "CustomDensity",
    "BetaSchedule",
    "ExponentialSchedule",
    "phi",
    "psi",
    "kappa",
    "log_kappa",
    "convert_rho_tau",
    "inhomogeneous_functionals",
    "family_from_spec",
    "parse_family",
]

# Alternating sums keep at least 40 of 52 significand bits.
_MAX_CANCELLATION_BITS = 12


def _quad(f, a, b, epsabs, epsrel):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            return integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=400)
        except integrate.IntegrationWarning:
            pass
    # Retry quietly and judge the returned error bound ourselves.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=400)
    if err > max(1e3 * epsabs, 1e-8 * abs(val)):
        raise ConvergenceError(
            f"quadrature error bound {err:.3g} exceeds tolerance", estimate=val, error=err
        )
    return val, err


def levy_integral(tau, g, *, g_at_infinity=0.0, atom=0.0, epsabs=1e-12, epsrel=1e-12):
    """Return ``int_0^inf g(y) tau(y) dy + atom * g_at_infinity``.

    The half line is split at ``y = 1``.  On ``(0, 1]`` the substitution
    ``y = v**2`` absorbs the ``y**(-1-alpha)`` blow-up of infinite-activity
    laws; on ``[1, inf)`` the substitution ``y = s**-2`` turns polynomial
    tails (stable laws) into bounded integrands on ``(0, 1]``.

    ``atom`` is a point mass of ``tau`` at ``y = inf`` (a jump of size one
    for the hazard).
    """

    def near(v):
        if v <= 0.0:
            return 0.0
        y = v * v
        val = g(y) * tau(y)
        return 0.0 if val == 0.0 else 2.0 * v * val

    def far(s):
        if s <= 0.0:
            return 0.0
        y = 1.0 / (s * s)
        if y > 1e300:
            return 0.0
        val = g(y) * tau(y)
        return 0.0 if val == 0.0 else 2.0 * y * math.sqrt(y) * val

    a, _ = _quad(near, 0.0, 1.0, epsabs, epsrel)
    b, _ = _quad(far, 0.0, 1.0, epsabs, epsrel)
    return a + b + atom * g_at_infinity


def _check_omega(omega):
    if not omega >= 0:
        raise DomainError(f"phi requires omega >= 0, got {omega!r}")


def _check_mr(m, r):
    if int(m) != m or m < 1:
        raise DomainError(f"kappa requires an integer m >= 1, got {m!r}")
    if int(r) != r or r < 0:
        raise DomainError(f"kappa requires an integer r >= 0, got {r!r}")


def _is_integer(x):
    return float(x).is_integer()


@dataclass(frozen=True)
class JumpLawFamily:
    """Base class for homogeneous jump laws.

    Subclasses implement :meth:`tau` (and :meth:`rho`) plus whichever closed
    forms they have.  Evaluation methods accept ``method`` in
    ``{"auto", "closed", "quadrature"}``; :meth:`kappa` additionally accepts
    ``"difference"`` (finite differences of :meth:`phi`).
    """

    kind: ClassVar[str] = ""
    quad_tol: ClassVar[float] = 1e-12

    # -- densities -----------------------------------------------------------
    def tau(self, y):
        raise NotImplementedError

    def rho(self, u):
        if not 0.0 < u < 1.0:
            raise DomainError(f"rho is defined on (0, 1), got {u!r}")
        return self.tau(-math.log1p(-u)) / (1.0 - u)

    @property
    def atom_at_one(self):
        """Mass of ``rho`` sitting exactly at ``u = 1`` (zero for most laws)."""
        return 0.0

    # -- closed forms (None when unavailable) ----------------------------------
    def _phi_closed(self, omega):
        return None

    def _log_kappa_closed(self, m, r):
        return None

    # -- quadrature --------------------------------------------------------
    def _phi_quadrature(self, omega):
        if omega == 0:
            return 0.0
        return levy_integral(
            self.tau,
            lambda y: -math.expm1(-omega * y),
            g_at_infinity=1.0,
            atom=self.atom_at_one,
            epsabs=self.quad_tol,
        )

    def _kappa_quadrature(self, m, r):
        kwargs = dict(
            g=lambda y: (-math.expm1(-y)) ** m * math.exp(-r * y),
            g_at_infinity=1.0 if r == 0 else 0.0,
            atom=self.atom_at_one,
        )
        val = levy_integral(self.tau, epsabs=self.quad_tol, **kwargs)
        if 0.0 < val < 1.0:
            # small values: a second pass with a tolerance relative to the value
            val = levy_integral(self.tau, epsabs=self.quad_tol * val, **kwargs)
        return val

    def _kappa_difference(self, m, r):
        """Alternating sum ``sum_l (-1)**(l+1) C(m, l) phi(r + l)``.

        Returns ``(value, lost_bits)`` where ``lost_bits`` measures the
        cancellation.
        """
        terms = [(-1) ** (l + 1) * math.comb(m, l) * self.phi(r + l) for l in range(m + 1)]
        value = math.fsum(terms)
        scale = math.fsum(abs(t) for t in terms)
        if value <= 0.0:
            return value, math.inf
        return value, math.log2(scale / value)

    # -- public functionals --------------------------------------------------
    def phi(self, omega, method="auto"):
        """Levy exponent ``phi(omega)``; ``phi(0) = 0`` and ``phi(1) = 1``."""
        _check_omega(omega)
        if method in ("auto", "closed"):
            val = self._phi_closed(omega)
            if val is not None:
                return val
            if method == "closed":
                raise ConfigurationError(f"{self.kind}: no closed form for phi({omega})")
        elif method != "quadrature":
            raise ValueError(f"unknown method {method!r}")
        return _cached(self, "phi_q", float(omega))

    def psi(self, i, k, method="auto"):
        """``psi(i, k) = phi(i + k) - phi(k)``."""
        if int(i) != i or i < 1:
            raise DomainError(f"psi requires an integer i >= 1, got {i!r}")
        if int(k) != k or k < 0:
            raise DomainError(f"psi requires an integer k >= 0, got {k!r}")
        return self.phi(i + k, method) - self.phi(k, method)

    def kappa(self, m, r, method="auto"):
        """``kappa(m, r) = int u**m (1-u)**r rho(du)``; ``kappa(1, 0) = 1``."""
        return math.exp(self.log_kappa(m, r, method))

    def log_kappa(self, m, r, method="auto"):
        _check_mr(m, r)
        m, r = int(m), int(r)
        if method in ("auto", "closed"):
            val = self._log_kappa_closed(m, r)
            if val is not None:
                return val
        if method in ("auto", "closed", "difference") and self._phi_closed(1.0) is not None:
            value, lost = self._kappa_difference(m, r)
            if method in ("closed", "difference") and value > 0:
                return math.log(value)
            if lost <= _MAX_CANCELLATION_BITS:
                return math.log(value)
            if method in ("closed", "difference"):
                raise ConvergenceError(f"{self.kind}: kappa({m},{r}) lost all precision")
        elif method in ("closed", "difference"):
            raise ConfigurationError(f"{self.kind}: no closed form for kappa")
        elif method not in ("auto", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        return math.log(_cached(self, "kappa_q", m, r))

    def check_normalization(self, tol=1e-8):
        """Raise :class:`ConfigurationError` unless ``kappa(1, 0) == 1``."""
        mass = self.kappa(1, 0, method="quadrature")
        if abs(mass - 1.0) > tol:
            raise ConfigurationError(
                f"{self.kind}: int u rho(du) = {mass:.12g}, expected 1 (tol {tol:g})"
            )
        return mass

    def to_spec(self):
        """JSON-serialisable record with a ``kind`` tag."""
        raise NotImplementedError

    def __str__(self):
        params = ",".join(f"{k}={v:g}" for k, v in self.to_spec().items() if k != "kind")
        return f"{self.kind}:{params}"


@functools.lru_cache(maxsize=65536)
def _cached(family, what, *args):
    if what == "phi_q":
        return family._phi_quadrature(*args)
    return family._kappa_quadrature(*args)


@dataclass(frozen=True)
class BetaProcess(JumpLawFamily):
    """Homogeneous beta process, ``rho(u) = theta u**-1 (1-u)**(theta-1)``."""

    theta: float = 1.0
    kind: ClassVar[str] = "beta_process"

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigurationError(f"beta_process requires theta > 0, got {self.theta}")

    def tau(self, y):
        return self.theta * math.exp(-self.theta * y) / -math.expm1(-y)

    def rho(self, u):
        if not 0.0 < u < 1.0:
            raise DomainError(f"rho is defined on (0, 1), got {u!r}")
        return self.theta / u * (1.0 - u) ** (self.theta - 1.0)

    def _phi_closed(self, omega):
        th = self.theta
        if _is_integer(omega) and omega <= 10_000:
            return math.fsum(th / (th + l) for l in range(int(omega)))
        return th * (special.digamma(th + omega) - special.digamma(th))

    def _log_kappa_closed(self, m, r):
        return math.log(self.theta) + special.betaln(m, self.theta + r)

    def to_spec(self):
        return {"kind": self.kind, "theta": self.theta}


@dataclass(frozen=True)
class GeneralizedGamma(JumpLawFamily):
    """Generalized gamma subordinator with index ``alpha`` and tilt ``b``.

    ``tau(y) = C y**(-alpha-1) exp(-b y)`` where ``C`` makes
    ``phi(1) = 1``.  Admissible parameters are ``0 < alpha < 1, b >= 0`` or
    ``alpha <= 0, b > 0``; ``b = 0`` is the stable law, ``alpha = 0`` the
    gamma process and ``alpha < 0`` a compound Poisson law.
    """

    alpha: float = 0.5
    b: float = 0.0
    kind: ClassVar[str] = "generalized_gamma"

    def __post_init__(self):
        a, b = self.alpha, self.b
        if not ((0 < a < 1 and b >= 0) or (a <= 0 and b > 0)):
            raise ConfigurationError(
                "generalized_gamma requires 0 < alpha < 1, b >= 0 or alpha <= 0, b > 0; "
                f"got alpha={a}, b={b}"
            )

    def _power_diff(self, w):
        """``(w + b)**alpha - b**alpha`` (``log(1 + w/b)`` when alpha = 0).

        For ``alpha < 0`` the value is divided by ``b**alpha``, which may
        overflow for tiny ``b``.  For ``alpha > 0`` the expm1 form is used
        only while ``alpha log(1 + w/b) <= 1``; beyond that it would amplify
        the rounding of the logarithm and the direct difference loses less
        than one bit.
        """
        a, b = self.alpha, self.b
        if b == 0.0:
            return w**a
        q = w / b
        lg = math.log1p(q) if math.isfinite(q) else math.log(w) - math.log(b)
        if a == 0.0:
            return lg
        x = a * lg
        if a < 0.0:
            return math.expm1(x)
        if x <= 1.0:
            return b**a * math.expm1(x)
        return (w + b) ** a - b**a

    @functools.cached_property
    def _norm(self):
        return self._power_diff(1.0)

    @functools.cached_property
    def _log_tau_const(self):
        # tau(y) = C y**(-alpha-1) e^{-b y} with phi(1) = 1
        a, b = self.alpha, self.b
        if a == 0.0:
            return -math.log(self._norm)
        log_scale = a * math.log(b) if a < 0 else 0.0
        return math.log(a / (self._norm * special.gamma(1.0 - a))) - log_scale

    def tau(self, y):
        return math.exp(self._log_tau_const + (-self.alpha - 1.0) * math.log(y) - self.b * y)

    def rho(self, u):
        if not 0.0 < u < 1.0:
            raise DomainError(f"rho is defined on (0, 1), got {u!r}")
        y = -math.log1p(-u)
        return math.exp(self._log_tau_const + (-self.alpha - 1.0) * math.log(y) + (self.b - 1.0) * math.log1p(-u))

    def _phi_closed(self, omega):
        if omega == 0:
            return 0.0
        return self._power_diff(omega) / self._norm

    def to_spec(self):
        return {"kind": self.kind, "alpha": self.alpha, "b": self.b}


@dataclass(frozen=True)
class TwoParamPD(JumpLawFamily):
    """Jump law whose mark marginal is a two-parameter Poisson-Dirichlet law.

    Its tail is ``int_u^1 rho = K u**-alpha (1-u)**theta`` with
    ``K = Gamma(theta+2-alpha) / (Gamma(1-alpha) Gamma(1+theta))``.  For
    ``theta = 0`` the tail does not vanish at ``u = 1``: the law then has an
    atom of mass ``K`` at one.
    """

    alpha: float = 0.0
    theta: float = 1.0
    kind: ClassVar[str] = "two_param_pd"

    def __post_init__(self):
        if not (0 <= self.alpha < 1 and self.theta >= 0):
            raise ConfigurationError(
                f"two_param_pd requires 0 <= alpha < 1, theta >= 0; got {self.alpha}, {self.theta}"
            )
        if self.alpha == 0 and self.theta == 0:
            raise ConfigurationError("two_param_pd with alpha = theta = 0 is degenerate")

    @functools.cached_property
    def _log_K(self):
        a, th = self.alpha, self.theta
        return special.gammaln(th + 2 - a) - special.gammaln(1 - a) - special.gammaln(1 + th)

    @property
    def atom_at_one(self):
        return math.exp(self._log_K) if self.theta == 0 else 0.0

    def tail(self, u):
        """``int_u^1 rho(dv)``, including the atom at one."""
        if not 0.0 < u < 1.0:
            raise DomainError(f"tail is defined for u in (0, 1), got {u!r}")
        return math.exp(self._log_K) * u ** (-self.alpha) * (1.0 - u) ** self.theta

    def tau(self, y):
        a, th = self.alpha, self.theta
        u = -math.expm1(-y)
        val = a * u ** (-a - 1.0) * math.exp(-(th + 1.0) * y)
        if th > 0:
            val += th * u ** (-a) * math.exp(-th * y)
        return math.exp(self._log_K) * val

    def rho(self, u):
        if not 0.0 < u < 1.0:
            raise DomainError(f"rho is defined on (0, 1), got {u!r}")
        a, th = self.alpha, self.theta
        val = a * u ** (-a - 1.0) * (1.0 - u) ** th
        if th > 0:
            val += th * u ** (-a) * (1.0 - u) ** (th - 1.0)
        return math.exp(self._log_K) * val

    def _phi_closed(self, omega):
        if omega == 0:
            return 0.0
        a, th = self.alpha, self.theta
        return omega * math.exp(
            special.gammaln(th + omega)
            + special.gammaln(th + 2 - a)
            - special.gammaln(th + 1)
            - special.gammaln(th - a + omega + 1)
        )

    def _log_kappa_terms(self, m, r):
        """Log weights of the two beta components of ``u**m (1-u)**r rho``."""
        a, th = self.alpha, self.theta
        logs = []
        if a > 0:
            logs.append(self._log_K + math.log(a) + special.betaln(m - a, r + th + 1))
        # theta * B(m-a+1, r+theta), continuous as theta -> 0 (atom at one).
        if th > 0:
            logs.append(self._log_K + math.log(th) + special.betaln(m - a + 1, r + th))
        elif r == 0:
            logs.append(self._log_K)
        return logs

    def _log_kappa_closed(self, m, r):
        return special.logsumexp(self._log_kappa_terms(m, r))

    def to_spec(self):
        return {"kind": self.kind, "alpha": self.alpha, "theta": self.theta}


@dataclass(frozen=True)
class DirichletGenerating(TwoParamPD):
    """``TwoParamPD(alpha=0, theta)``: ``rho(u) = theta (theta+1) (1-u)**(theta-1)``.

    Its mark marginal is a Dirichlet process with total mass ``theta``.
    """

    alpha: float = field(default=0.0, init=False)
    theta: float = 1.0
    kind: ClassVar[str] = "dirichlet_gen"

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigurationError(f"dirichlet_gen requires theta > 0, got {self.theta}")

    def _phi_closed(self, omega):
        th = self.theta
        return omega * (th + 1.0) / (th + omega)

    def _log_kappa_closed(self, m, r):
        th = self.theta
        return math.log(th) + math.log(th + 1.0) + special.betaln(m + 1, th + r)

    def to_spec(self):
        return {"kind": self.kind, "theta": self.theta}


@dataclass(frozen=True, eq=False)
class CustomDensity(JumpLawFamily):
    """User supplied Levy density ``rho`` on (0, 1).

    Every functional is computed by adaptive quadrature with absolute
    tolerance ``tol``.  ``tau`` may be supplied directly when it is known in
    closed form; otherwise it is derived from ``rho``, which loses relative
    accuracy for jumps within ~1e-16 of one.  Normalisation is checked on
    construction.
    """

    density: Callable[[float], float] = None
    tol: float = 1e-10
    tau_density: Callable[[float], float] | None = None
    kind: ClassVar[str] = "custom"

    # Identity semantics: two wrappers of different callables must not share
    # cache entries.
    __eq__ = object.__eq__
    __hash__ = object.__hash__

    def __post_init__(self):
        if self.density is None and self.tau_density is None:
            raise ConfigurationError("custom family needs a density")
        self.check_normalization(tol=max(1e-8, 100 * self.tol))

    @property
    def quad_tol(self):
        return self.tol

    def tau(self, y):
        if self.tau_density is not None:
            return self.tau_density(y)
        return math.exp(-y) * self.density(-math.expm1(-y))

    def rho(self, u):
        if not 0.0 < u < 1.0:
            raise DomainError(f"rho is defined on (0, 1), got {u!r}")
        if self.density is not None:
            return self.density(u)
        return self.tau_density(-math.log1p(-u)) / (1.0 - u)

    def to_spec(self):
        raise ConfigurationError("custom densities cannot be serialised")

    def __str__(self):
        return f"custom:{self.density!r}"


# -- functional front ends ---------------------------------------------------


def phi(family, omega, method="auto"):
    """Levy exponent of ``family`` at ``omega >= 0``."""
    return family.phi(omega, method)


def psi(family, i, k, method="auto"):
    return family.psi(i, k, method)


def kappa(family, m, r, method="auto"):
    return family.kappa(m, r, method)


def log_kappa(family, m, r, method="auto"):
    return family.log_kappa(m, r, method)


def convert_rho_tau(density, direction="rho_to_tau"):
    """Map a Levy density between the hazard and log-survival scales.

    ``rho_to_tau`` returns ``y -> exp(-y) rho(1 - exp(-y))`` on (0, inf);
    ``tau_to_rho`` returns ``u -> tau(-log(1 - u)) / (1 - u)`` on (0, 1).
    The two maps are mutually inverse.
    """
    if direction == "rho_to_tau":

        def tau(y):
            if not 0.0 < y < math.inf:
                raise DomainError(f"tau is defined on (0, inf), got {y!r}")
            return math.exp(-y) * density(-math.expm1(-y))

        return tau
    if direction == "tau_to_rho":

        def rho(u):
            if not 0.0 < u < 1.0:
                raise DomainError(f"rho is defined on (0, 1), got {u!r}")
            return density(-math.log1p(-u)) / (1.0 - u)

        return rho
    raise ValueError(f"direction must be 'rho_to_tau' or 'tau_to_rho', got {direction!r}")


# -- inhomogeneous beta schedules ---------------------------------------------


def _harmonic_block(c, i, k):
    """``c * sum_{l=k+1}^{k+i} 1 / (c + l - 1)``."""
    # the l = 1 term c / c is exactly one, also when c underflows
    return math.fsum(1.0 if l == 1 else c / (c + l - 1) for l in range(k + 1, k + i + 1))


@dataclass(frozen=True, eq=False)
class BetaSchedule:
    """Time-modulated beta law ``rho(du|s) = c(s) u**-1 (1-u)**(c(s)-1) du``.

    ``c`` must be positive; it is assumed piecewise smooth so that time
    integrals of the functionals can be computed by quadrature.
    """

    c: Callable[[float], float]

    def value(self, s):
        cs = self.c(s)
        if not cs > 0:
            raise DomainError(f"schedule must be positive, c({s}) = {cs}")
        return cs

    def kappa(self, m, r, s):
        _check_mr(m, r)
        cs = self.value(s)
        return cs * math.exp(special.betaln(m, cs + r))

    def psi(self, i, k, s):
        if i < 1 or k < 0:
            raise DomainError(f"psi requires i >= 1, k >= 0; got {i}, {k}")
        return _harmonic_block(self.value(s), int(i), int(k))

    def integrated_psi(self, i, k, t, hazard_density=None):
        """``int_0^t psi(i, k | s) lambda0(s) ds`` by quadrature.

        ``hazard_density`` is the density of the baseline hazard (defaults
        to one, the identity hazard).
        """
        if t <= 0:
            return 0.0
        dens = hazard_density or (lambda s: 1.0)
        val, _ = _quad(lambda s: self.psi(i, k, s) * dens(s), 0.0, t, 1e-13, 1e-11)
        return val


@dataclass(frozen=True, eq=False)
class ExponentialSchedule(BetaSchedule):
    """``c(s) = theta * exp(-s)``.

    With the identity hazard this is ``theta * S0(s-)``, the schedule under
    which the beta-Stacy construction reduces to a Dirichlet process.
    """

    c: Callable[[float], float] = field(default=None, init=False)
    theta: float = 1.0

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigurationError(f"theta must be positive, got {self.theta}")
        th = self.theta
        object.__setattr__(self, "c", lambda s: th * math.exp(-s))

    def integrated_psi(self, i, k, t, hazard_density=None):
        if hazard_density is not None:
            return super().integrated_psi(i, k, t, hazard_density)
        if t <= 0:
            return 0.0
        th = self.theta
        # int_0^t th e^{-s} / (th e^{-s} + a) ds = log((th + a) / (th e^{-t} + a)), a > 0
        total = 0.0
        for l in range(k + 1, k + i + 1):
            a = l - 1
            if a == 0:
                total += t
            else:
                total += math.log1p(th / a) - math.log1p(th * math.exp(-t) / a)
        return total


def inhomogeneous_functionals(schedule, m, r, s):
    """Return ``(kappa(m, r | s), psi(m, r | s))`` for a beta schedule."""
    return schedule.kappa(m, r, s), schedule.psi(m, r, s)


# -- serialisation -------------------------------------------------------------

_KINDS = {
    "beta_process": (BetaProcess, ("theta",)),
    "beta": (BetaProcess, ("theta",)),
    "generalized_gamma": (GeneralizedGamma, ("alpha", "b")),
    "gg": (GeneralizedGamma, ("alpha", "b")),
    "two_param_pd": (TwoParamPD, ("alpha", "theta")),
    "pd": (TwoParamPD, ("alpha", "theta")),
    "dirichlet_gen": (DirichletGenerating, ("theta",)),
    "dirichlet": (DirichletGenerating, ("theta",)),
}


def family_from_spec(spec):
    """Build a family from a ``{"kind": ..., <params>}`` record."""
    if isinstance(spec, JumpLawFamily):
        return spec
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _KINDS:
        raise ConfigurationError(f"unknown family kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls, names = _KINDS[kind]
    unknown = set(spec) - set(names)
    if unknown:
        raise ConfigurationError(f"{kind}: unexpected parameters {sorted(unknown)}")
    try:
        return cls(**{k: float(v) for k, v in spec.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{kind}: {exc}") from exc


def parse_family(text):
    """Parse a family from JSON or the shorthand ``name:key=val,...``."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return family_from_spec(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad family JSON: {exc}") from exc
    name, _, rest = text.partition(":")
    spec = {"kind": name.strip()}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigurationError(f"bad family parameter {item!r}; expected key=value")
        spec[key.strip()] = val.strip()
    return family_from_spec(spec)
