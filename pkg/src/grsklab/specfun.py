"""Complex special functions used by the contour formulas.

Everything here is self-contained (no scipy): log-gamma via a Lanczos
approximation with explicitly listed coefficients, digamma/polygamma via
recurrence + Bernoulli asymptotics, the Airy function via its wedge-contour
representation, the Sklyanin density, and small-rank Whittaker (Givental)
integrals with the Stade identity check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .quadrature import QuadratureSpec, gl_nodes

# ---------------------------------------------------------------------------
# log-gamma (Lanczos, g = 607/128, 15 coefficients), vectorized over ndarrays
# ---------------------------------------------------------------------------

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array(
    [
        0.99999999999999709182,
        57.156235665862923517,
        -59.597960355475491248,
        14.136097974741747174,
        -0.49191381609762019978,
        0.33994649984811888699e-4,
        0.46523628927048575665e-4,
        -0.98374475304879564677e-4,
        0.15808870322491248884e-3,
        -0.21026444172410488319e-3,
        0.21743961811521264320e-3,
        -0.16431810653676389022e-3,
        0.84418223983852743293e-4,
        -0.26190838401581408670e-4,
        0.36899182659531622704e-5,
    ]
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_right(z: np.ndarray) -> np.ndarray:
    """log Gamma for Re z >= 0.5 (no reflection needed)."""
    zm1 = z - 1.0
    s = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        s = s + _LANCZOS_C[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(s)


def log_gamma(z):
    """Principal-branch log Gamma, complex, >= 12 significant digits on the
    working range.  Reflection formula for Re z < 0.5; note that after
    reflection the result is only guaranteed modulo 2*pi*i (all callers
    exponentiate or use integer-coefficient combinations).
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    on_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(on_pole):
        raise ValueError("log_gamma pole at non-positive integer")
    out = np.empty_like(z)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_right(z[right])
    if np.any(~right):
        zr = z[~right]
        # log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z)
        out[~right] = (
            math.log(math.pi) - _log_sin_pi(zr) - _lanczos_right(1.0 - zr)
        )
    return out[0] if scalar else out


def _log_sin_pi(z: np.ndarray) -> np.ndarray:
    """log(sin(pi z)) computed overflow-safely for large |Im z|.

    Factor out the exponentially dominant half of
    sin(pi z) = (e^{i pi z} - e^{-i pi z}) / (2i):
      Im z > 0:  sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i)
      Im z <= 0: sin(pi z) = e^{ i pi z} (1 - e^{-2 i pi z}) / (2i)
    """
    ipz = 1j * math.pi * z
    upper = z.imag > 0
    big = np.where(upper, -ipz, ipz)
    decaying = np.exp(np.where(upper, 2 * ipz, -2 * ipz))  # always |.| <= 1
    rest = np.where(upper, decaying - 1.0, 1.0 - decaying)
    return big + np.log(rest / 2j)


def gamma(z):
    return np.exp(log_gamma(z))


# ---------------------------------------------------------------------------
# digamma / polygamma
# ---------------------------------------------------------------------------

# Bernoulli numbers B_2, B_4, ..., B_14
_BERN = [1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6]


def digamma(z):
    """Psi(z) = (log Gamma)'(z); real or complex, poles at 0, -1, -2, ..."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise ValueError("digamma pole at non-positive integer")
    acc = 0.0 + 0.0j
    while abs(z) < 15 or z.real < 15:
        acc -= 1.0 / z
        z += 1.0
    zi = 1.0 / z
    zi2 = zi * zi
    val = np.log(z) - 0.5 * zi
    p = zi2
    for n, b in enumerate(_BERN, start=1):
        val -= b / (2 * n) * p
        p *= zi2
    val += acc
    return val.real if abs(val.imag) < 1e-14 else val


def polygamma(k: int, z):
    """Psi^(k)(z) for k in {0, 1, 2}."""
    if k == 0:
        return digamma(z)
    if k not in (1, 2):
        raise ValueError("polygamma implemented for k <= 2 only")
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise ValueError("polygamma pole at non-positive integer")
    acc = 0.0 + 0.0j
    while abs(z) < 15 or z.real < 15:
        acc += (1.0 / z**2) if k == 1 else (-2.0 / z**3)
        z += 1.0
    zi = 1.0 / z
    zi2 = zi * zi
    if k == 1:
        # 1/z + 1/(2 z^2) + sum B_2n / z^{2n+1}
        val = zi + 0.5 * zi2
        p = zi * zi2
        for b in _BERN:
            val += b * p
            p *= zi2
    else:
        # -1/z^2 - 1/z^3 - sum (2n+1) B_2n / z^{2n+2}
        val = -zi2 - zi * zi2
        p = zi2 * zi2
        for n, b in enumerate(_BERN, start=1):
            val -= (2 * n + 1) * b * p
            p *= zi2
    val += acc
    return val.real if abs(val.imag) < 1e-14 else val


# ---------------------------------------------------------------------------
# Sklyanin density
# ---------------------------------------------------------------------------


def sklyanin(lam: Sequence[complex]):
    """s_n(lambda) = (2 pi i)^{-n} (n!)^{-1} prod_{i != j} Gamma(l_i - l_j)^{-1}.

    Vectorized: each lambda_k may be an ndarray (broadcastable); returns the
    density evaluated elementwise.
    """
    lam = [np.asarray(l, dtype=complex) for l in lam]
    n = len(lam)
    log_inv = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                log_inv = log_inv + log_gamma(lam[i] - lam[j])
    pref = (2j * math.pi) ** (-n) / math.factorial(n)
    return pref * np.exp(-log_inv)


# ---------------------------------------------------------------------------
# Airy function via the wedge contour
# ---------------------------------------------------------------------------

_AIRY_RAY_LENGTH = 8.0
_AIRY_RAY_NODES = 400


def airy_ai(x, ray_length: float = _AIRY_RAY_LENGTH, n_nodes: int = _AIRY_RAY_NODES):
    """Ai(x) from the contour integral over the two rays at angles +-pi/3:

        Ai(x) = (1/pi) * Im  int_0^R  e^{i pi/3} exp(-t^3/3 - x t e^{i pi/3}) dt

    Supported range x in [-10, 10] (the spec'd desk-scale window); vectorized.
    """
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xv = np.atleast_1d(xa)
    if np.any(np.abs(xv) > 10.0 + 1e-12):
        raise ValueError("airy_ai supported for |x| <= 10")
    t, w = gl_nodes(0.0, ray_length, n_nodes)
    phase = np.exp(1j * math.pi / 3.0)
    # integrand on the upper ray; the lower ray is its conjugate
    expo = -(t**3) / 3.0 - np.multiply.outer(xv, t) * phase
    vals = np.exp(expo) * (w * phase)
    out = vals.sum(axis=-1).imag / math.pi
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# scaling constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingConstants:
    f_gamma: float
    c1: float
    c2: float
    c3: float
    Gppp: float
    Fpp: float


def scaling_constants(gamma_: float) -> ScalingConstants:
    """Constants of the KPZ scaling window for the (0, gamma) polymer.

    With G(z) = log Gamma(z) - log Gamma(gamma - z) + f_gamma z and
    F(z) = log Gamma(z) + log Gamma(gamma - z):
      f_gamma   = -2 Psi(gamma/2)
      G'''(gamma/2) = 2 Psi''(gamma/2)   (< 0)
      F''(gamma/2)  = 2 Psi'(gamma/2)    (> 0)
      c1 = (-G'''/2)^{-1/3},  c2 = -c1 F''^2 / (2 G'''),  c3 = -F''/G'''.
    G'(gamma/2) = G''(gamma/2) = 0 is asserted numerically.
    """
    if gamma_ <= 0:
        raise ValueError("gamma must be positive")
    half = gamma_ / 2.0
    f_gamma = -2.0 * float(np.real(digamma(half)))
    Gppp = 2.0 * float(np.real(polygamma(2, half)))
    Fpp = 2.0 * float(np.real(polygamma(1, half)))
    if not (Gppp < 0 < Fpp):
        raise ArithmeticError("sign assumptions on G''' and F'' violated")
    # numeric assertion that gamma/2 is the degenerate critical point
    h = 1e-4

    def G(z):
        return float(
            np.real(log_gamma(z) - log_gamma(gamma_ - z)) + f_gamma * z
        )

    G1 = (G(half + h) - G(half - h)) / (2 * h)
    G2 = (G(half + h) - 2 * G(half) + G(half - h)) / h**2
    if abs(G1) > 1e-6 or abs(G2) > 1e-4:
        raise ArithmeticError("G'(gamma/2) or G''(gamma/2) failed to vanish")
    c1 = (-Gppp / 2.0) ** (-1.0 / 3.0)
    c2 = -c1 * Fpp**2 / (2.0 * Gppp)
    c3 = -Fpp / Gppp
    return ScalingConstants(f_gamma, c1, c2, c3, Gppp, Fpp)


# ---------------------------------------------------------------------------
# Whittaker functions at small rank (Givental integral)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WhittakerArg:
    alpha: Tuple[complex, ...]
    x: Tuple[float, ...]

    def __post_init__(self):
        if len(self.alpha) != len(self.x):
            raise ValueError("rank mismatch between parameters and base point")
        if len(self.alpha) > 3:
            raise ValueError("rank capped at 3")
        if any(xi <= 0 for xi in self.x):
            raise ValueError("base point must be positive")

    @property
    def rank(self) -> int:
        return len(self.alpha)


def whittaker_givental(arg: WhittakerArg, quad: QuadratureSpec | None = None,
                       expensive: bool = False):
    """Psi^{(n)}_alpha(x) by quadrature of the Givental integral, rank <= 3.

    Integration variables z_ij (1 <= j <= i <= n-1) are substituted
    z = e^y with y on [-L, L]; the pattern potential couples consecutive
    rows, top row fixed to x.  Rank 3 is a 3-D tensor quadrature and must be
    requested with expensive=True.
    """
    if quad is None:
        quad = QuadratureSpec(nodes_per_unit=200.0 / 24.0, truncation=12.0)
    n = arg.rank
    if n == 3 and not expensive:
        raise ValueError("rank 3 is behind the expensive flag")
    if n == 1:
        return complex(arg.x[0] ** (-np.asarray(arg.alpha[0], dtype=complex)))
    L = quad.truncation
    n_nodes = quad.n_nodes(2 * L)
    y, wy = gl_nodes(-L, L, n_nodes)
    z = np.exp(y)  # dz/z = dy
    a = np.asarray(arg.alpha, dtype=complex)
    if n == 2:
        x1, x2 = arg.x
        z11 = z
        vals = (
            z11 ** (-a[0])
            * (x1 * x2 / z11) ** (-a[1])
            * np.exp(-(z11 / x1 + x2 / z11))
        )
        return complex(np.sum(vals * wy))
    # rank 3: variables z11 (row 1), z21, z22 (row 2); top row = x
    x1, x2, x3 = arg.x
    z11 = z[:, None, None]
    z21 = z[None, :, None]
    z22 = z[None, None, :]
    w3 = wy[:, None, None] * wy[None, :, None] * wy[None, None, :]
    r1 = z11
    r2 = z21 * z22
    pref = r1 ** (-a[0]) * (r2 / r1) ** (-a[1]) * ((x1 * x2 * x3) / r2) ** (-a[2])
    pot = (
        z11 / z21
        + z22 / z11
        + z21 / x1
        + x2 / z21
        + z22 / x2
        + x3 / z22
    )
    vals = pref * np.exp(-pot)
    return complex(np.sum(vals * w3))


def stade_check(n: int, nu, lam, r: float,
                quad: QuadratureSpec | None = None):
    """Evaluate both sides of the gamma-product pairing identity

        int e^{-r x_1} Psi_{-nu}(x) Psi_{-lam}(x) prod dx_i/x_i
          = r^{-sum(nu_i + lam_i)} prod_{ij} Gamma(nu_i + lam_j)

    for rank n <= 2; returns (lhs, rhs, relerr).
    """
    if n > 2:
        raise ValueError("stade_check capped at n <= 2")
    nu = np.atleast_1d(np.asarray(nu, dtype=complex))
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if len(nu) != n or len(lam) != n:
        raise ValueError("parameter length mismatch")
    for ni in nu:
        for lj in lam:
            if (ni + lj).real <= 0:
                raise ValueError("need Re(nu_i + lam_j) > 0")
    if quad is None:
        quad = QuadratureSpec(nodes_per_unit=120.0 / 24.0, truncation=12.0)
    rhs = r ** (-float(np.sum(nu + lam).real)) * np.prod(
        [gamma(ni + lj) for ni in nu for lj in lam]
    )
    L = quad.truncation
    m = quad.n_nodes(2 * L)
    y, wy = gl_nodes(-L, L, m)
    x = np.exp(y)
    if n == 1:
        vals = np.exp(-r * x) * x ** (nu[0] + lam[0])
        lhs = np.sum(vals * wy)
    else:
        # Psi^{(2)}_{-mu}(x1,x2) = int z^{mu1} (x1 x2 / z)^{mu2}
        #                              e^{-(z/x1 + x2/z)} dz/z
        zi, wz = gl_nodes(-L, L, m)
        z = np.exp(zi)

        def psi2(mu):
            x1 = x[:, None, None]
            x2 = x[None, :, None]
            zz = z[None, None, :]
            vals = (
                zz ** mu[0]
                * (x1 * x2 / zz) ** mu[1]
                * np.exp(-(zz / x1 + x2 / zz))
            )
            return np.sum(vals * wz, axis=-1)

        P = psi2(nu) * psi2(lam)
        outer = np.exp(-r * x)[:, None] * P
        lhs = np.einsum("i,j,ij->", wy, wy, outer)
    lhs = complex(lhs)
    rhs = complex(rhs)
    relerr = abs(lhs - rhs) / abs(rhs)
    return lhs, rhs, relerr
