"""Bessel kernels J0, J1, Y0, Y1 and the outgoing Hankel function H0^(1).

Scalar kernels follow the classic Cephes construction (Stephen L. Moshier,
Cephes Math Library Release 2.8, public domain): a rational minimax fit on
[0, 5] and Hankel-style asymptotic modulus/phase expansions beyond, giving
near machine-precision accuracy over the argument range this pipeline
produces (0, 1000].  Reference values for the test suite come from an
independent arbitrary-precision script (tools/gen_specfun_oracle.py).

Everything here is pure and stateless.  The ``*_pair_fill`` functions are
the hot path: they evaluate J and Y together, sharing the phase/modulus
work of the asymptotic branch, and release the GIL so callers can run them
from worker threads.  ``_j0y0`` / ``_j1y1`` are numba-inlinable scalar
cores reused by the field-synthesis and indicator kernels.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DomainError

__all__ = [
    "KernelArgRange",
    "PIPELINE_ARG_RANGE",
    "bessel_j",
    "bessel_y",
    "hankel1_0",
    "j0_values",
    "j1_values",
    "y0_values",
    "y1_values",
    "j0y0_pair_fill",
    "j1y1_pair_fill",
]


@dataclass(frozen=True)
class KernelArgRange:
    """Argument interval a caller promises to stay within."""

    min_arg: float
    max_arg: float

    def __post_init__(self):
        if not (0.0 < self.min_arg < self.max_arg):
            raise DomainError(
                f"need 0 < min_arg < max_arg, got ({self.min_arg}, {self.max_arg})"
            )

    def covers(self, x: float) -> bool:
        return self.min_arg <= x <= self.max_arg


# With sensors at radius <= 5, sampling inside the |z| <= 3*sqrt(2) square
# and wavenumbers <= 50, every kernel argument k|x - y| the pipeline
# produces lands in this interval; the accuracy contract is validated on it.
PIPELINE_ARG_RANGE = KernelArgRange(1e-6, 1000.0)

# ---------------------------------------------------------------------------
# Cephes coefficient sets (Moshier, public domain)
# ---------------------------------------------------------------------------
_SQRT2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
_PIO4 = 0.7853981633974483096            # pi/4
_THPIO4 = 2.35619449019234492885         # 3*pi/4
_TWOOPI = 0.6366197723675813430755       # 2/pi

_J0_RP = np.array([
    -4.79443220978201773821e9, 1.95617491946556577543e12,
    -2.49248344360967716204e14, 9.70862251047306323952e15,
])
_J0_RQ = np.array([
    4.99563147152651017219e2, 1.73785401676374683123e5,
    4.84409658339962045305e7, 1.11855537045356834862e10,
    2.11277520115489217587e12, 3.10518229857422583814e14,
    3.18121955943204943306e16, 1.71086294081043136091e18,
])
_J0_DR1 = 5.78318596294678452118e0
_J0_DR2 = 3.04712623436620863991e1

_J0_PP = np.array([
    7.96936729297347051624e-4, 8.28352392107440799803e-2,
    1.23953371646414299388e0, 5.44725003058768775090e0,
    8.74716500199817011941e0, 5.30324038235394892183e0,
    9.99999999999999997821e-1,
])
_J0_PQ = np.array([
    9.24408810558863637013e-4, 8.56288474354474431428e-2,
    1.25352743901058953537e0, 5.47097740330417105182e0,
    8.76190883237069594232e0, 5.30605288235394617618e0,
    1.00000000000000000218e0,
])
_J0_QP = np.array([
    -1.13663838898469149931e-2, -1.28252718670509318512e0,
    -1.95539544257735972385e1, -9.32060152123768231369e1,
    -1.77681167980488050595e2, -1.47077505154951170175e2,
    -5.14105326766599330220e1, -6.05014350600728481186e0,
])
_J0_QQ = np.array([
    6.43178256118178023184e1, 8.56430025976980587198e2,
    3.88240183605401609683e3, 7.24046774195652478189e3,
    5.93072701187316984827e3, 2.06209331660327847417e3,
    2.42005740240291393179e2,
])
_J0_YP = np.array([
    1.55924367855235737965e4, -1.46639295903971606143e7,
    5.43526477051876500413e9, -9.82136065717911466409e11,
    8.75906394395366999549e13, -3.46628303384729719441e15,
    4.42733268572569800351e16, -1.84950800436986690637e16,
])
_J0_YQ = np.array([
    1.04128353664259848412e3, 6.26107330137134956842e5,
    2.68919633393814121987e8, 8.64002487103935000337e10,
    2.02979612750105546709e13, 3.17157752842975028269e15,
    2.50596256172653059228e17,
])

_J1_RP = np.array([
    -8.99971225705559398224e8, 4.52228297998194034323e11,
    -7.27494245221818276015e13, 3.68295732863852883286e15,
])
_J1_RQ = np.array([
    6.20836478118054335476e2, 2.56987256757748830383e5,
    8.35146791431949253037e7, 2.21511595479792499675e10,
    4.74914122079991414898e12, 7.84369607876235854894e14,
    8.95222336184627338078e16, 5.32278620332680085395e18,
])
_J1_Z1 = 1.46819706421238932572e1
_J1_Z2 = 4.92184563216946036703e1

_J1_PP = np.array([
    7.62125616208173112003e-4, 7.31397056940917570436e-2,
    1.12719608129684925192e0, 5.11207951146807644818e0,
    8.42404590141772420927e0, 5.21451598682361504063e0,
    1.00000000000000000254e0,
])
_J1_PQ = np.array([
    5.71323128072548699714e-4, 6.88455908754495404082e-2,
    1.10514232634061696926e0, 5.07386386128601488557e0,
    8.39985554327604159757e0, 5.20982848682361821619e0,
    9.99999999999999997461e-1,
])
_J1_QP = np.array([
    5.10862594750176621635e-2, 4.98213872951233449420e0,
    7.58238284132545283818e1, 3.66779609360150777800e2,
    7.10856304998926107277e2, 5.97489612400613639965e2,
    2.11688757100572135698e2, 2.52070205858023719784e1,
])
_J1_QQ = np.array([
    7.42373277035675149943e1, 1.05644886038262816351e3,
    4.98641058337653607651e3, 9.56231892404756170795e3,
    7.99704160447350683650e3, 2.82619278517639096600e3,
    3.36093607810698293419e2,
])
_J1_YP = np.array([
    1.26320474790178026440e9, -6.47355876379160291031e11,
    1.14509511541823727583e14, -8.12770255501325109621e15,
    2.02439475713594898196e17, -7.78877196265950026825e17,
])
_J1_YQ = np.array([
    5.94301592346128195359e2, 2.35564092943068577943e5,
    7.34811944459721705660e7, 1.87601316108706159478e10,
    3.88231277496238566008e12, 6.20557727146953693363e14,
    6.87141087355300489866e16, 3.97270608116560655612e18,
])


@njit(cache=True, inline="always")
def _polevl(x, coef):
    ans = coef[0]
    for i in range(1, coef.shape[0]):
        ans = ans * x + coef[i]
    return ans


@njit(cache=True, inline="always")
def _p1evl(x, coef):
    # Like _polevl with an implicit leading coefficient of 1.
    ans = x + coef[0]
    for i in range(1, coef.shape[0]):
        ans = ans * x + coef[i]
    return ans


# ---------------------------------------------------------------------------
# Scalar cores.  Arguments are assumed nonnegative (positive for Y).
# ---------------------------------------------------------------------------
@njit(cache=True, inline="always")
def _j0(x):
    if x <= 5.0:
        z = x * x
        if x < 1.0e-5:
            return 1.0 - z / 4.0
        p = (z - _J0_DR1) * (z - _J0_DR2)
        return p * _polevl(z, _J0_RP) / _p1evl(z, _J0_RQ)
    w = 5.0 / x
    z = 25.0 / (x * x)
    p = _polevl(z, _J0_PP) / _polevl(z, _J0_PQ)
    q = _polevl(z, _J0_QP) / _p1evl(z, _J0_QQ)
    xn = x - _PIO4
    return (p * math.cos(xn) - w * q * math.sin(xn)) * _SQRT2OPI / math.sqrt(x)


@njit(cache=True, inline="always")
def _y0(x):
    if x <= 5.0:
        z = x * x
        w = _polevl(z, _J0_YP) / _p1evl(z, _J0_YQ)
        return w + _TWOOPI * math.log(x) * _j0(x)
    w = 5.0 / x
    z = 25.0 / (x * x)
    p = _polevl(z, _J0_PP) / _polevl(z, _J0_PQ)
    q = _polevl(z, _J0_QP) / _p1evl(z, _J0_QQ)
    xn = x - _PIO4
    return (p * math.sin(xn) + w * q * math.cos(xn)) * _SQRT2OPI / math.sqrt(x)


@njit(cache=True, inline="always")
def _j1(x):
    if x <= 5.0:
        z = x * x
        w = _polevl(z, _J1_RP) / _p1evl(z, _J1_RQ)
        return w * x * (z - _J1_Z1) * (z - _J1_Z2)
    w = 5.0 / x
    z = w * w
    p = _polevl(z, _J1_PP) / _polevl(z, _J1_PQ)
    q = _polevl(z, _J1_QP) / _p1evl(z, _J1_QQ)
    xn = x - _THPIO4
    return (p * math.cos(xn) - w * q * math.sin(xn)) * _SQRT2OPI / math.sqrt(x)


@njit(cache=True, inline="always")
def _y1(x):
    if x <= 5.0:
        z = x * x
        w = x * (_polevl(z, _J1_YP) / _p1evl(z, _J1_YQ))
        return w + _TWOOPI * (_j1(x) * math.log(x) - 1.0 / x)
    w = 5.0 / x
    z = w * w
    p = _polevl(z, _J1_PP) / _polevl(z, _J1_PQ)
    q = _polevl(z, _J1_QP) / _p1evl(z, _J1_QQ)
    xn = x - _THPIO4
    return (p * math.sin(xn) + w * q * math.cos(xn)) * _SQRT2OPI / math.sqrt(x)


@njit(cache=True, inline="always")
def _j0y0(x):
    """J0 and Y0 together; the asymptotic branch shares all phase work."""
    if x <= 5.0:
        z = x * x
        if x < 1.0e-5:
            j = 1.0 - z / 4.0
        else:
            p = (z - _J0_DR1) * (z - _J0_DR2)
            j = p * _polevl(z, _J0_RP) / _p1evl(z, _J0_RQ)
        y = _polevl(z, _J0_YP) / _p1evl(z, _J0_YQ) + _TWOOPI * math.log(x) * j
        return j, y
    w = 5.0 / x
    z = 25.0 / (x * x)
    p = _polevl(z, _J0_PP) / _polevl(z, _J0_PQ)
    q = _polevl(z, _J0_QP) / _p1evl(z, _J0_QQ)
    xn = x - _PIO4
    sn = math.sin(xn)
    cs = math.cos(xn)
    amp = _SQRT2OPI / math.sqrt(x)
    return (p * cs - w * q * sn) * amp, (p * sn + w * q * cs) * amp


@njit(cache=True, inline="always")
def _j1y1(x):
    """J1 and Y1 together; same sharing as _j0y0."""
    if x <= 5.0:
        z = x * x
        j = _polevl(z, _J1_RP) / _p1evl(z, _J1_RQ) * x * (z - _J1_Z1) * (z - _J1_Z2)
        y = x * (_polevl(z, _J1_YP) / _p1evl(z, _J1_YQ)) + _TWOOPI * (j * math.log(x) - 1.0 / x)
        return j, y
    w = 5.0 / x
    z = w * w
    p = _polevl(z, _J1_PP) / _polevl(z, _J1_PQ)
    q = _polevl(z, _J1_QP) / _p1evl(z, _J1_QQ)
    xn = x - _THPIO4
    sn = math.sin(xn)
    cs = math.cos(xn)
    amp = _SQRT2OPI / math.sqrt(x)
    return (p * cs - w * q * sn) * amp, (p * sn + w * q * cs) * amp


# ---------------------------------------------------------------------------
# Array fillers (GIL released; safe from worker threads)
# ---------------------------------------------------------------------------
@njit(cache=True, nogil=True)
def j0y0_pair_fill(x, out_j, out_y):
    for i in range(x.shape[0]):
        j, y = _j0y0(x[i])
        out_j[i] = j
        out_y[i] = y


@njit(cache=True, nogil=True)
def j1y1_pair_fill(x, out_j, out_y):
    for i in range(x.shape[0]):
        j, y = _j1y1(x[i])
        out_j[i] = j
        out_y[i] = y


@njit(cache=True, nogil=True)
def _j0_fill(x, out):
    for i in range(x.shape[0]):
        out[i] = _j0(x[i])


@njit(cache=True, nogil=True)
def _j1_fill(x, out):
    for i in range(x.shape[0]):
        out[i] = _j1(x[i])


@njit(cache=True, nogil=True)
def _y0_fill(x, out):
    for i in range(x.shape[0]):
        out[i] = _y0(x[i])


@njit(cache=True, nogil=True)
def _y1_fill(x, out):
    for i in range(x.shape[0]):
        out[i] = _y1(x[i])


def _values(fill, x, positive_only):
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64).ravel())
    if not np.all(np.isfinite(x)):
        raise DomainError("bessel argument must be finite")
    if positive_only:
        if np.any(x <= 0.0):
            raise DomainError("Neumann functions require strictly positive arguments")
    elif np.any(x < 0.0):
        raise DomainError("bessel_j arguments must be nonnegative")
    out = np.empty_like(x)
    fill(x, out)
    return out


def j0_values(x):
    """Elementwise J0 over a nonnegative array."""
    return _values(_j0_fill, x, positive_only=False)


def j1_values(x):
    """Elementwise J1 over a nonnegative array."""
    return _values(_j1_fill, x, positive_only=False)


def y0_values(x):
    """Elementwise Y0 over a strictly positive array."""
    return _values(_y0_fill, x, positive_only=True)


def y1_values(x):
    """Elementwise Y1 over a strictly positive array."""
    return _values(_y1_fill, x, positive_only=True)


# ---------------------------------------------------------------------------
# Scalar public contract
# ---------------------------------------------------------------------------
def bessel_j(order: int, x: float) -> float:
    """J_order(x) for order 0 or 1 and finite x >= 0."""
    if order not in (0, 1):
        raise DomainError(f"bessel_j supports orders 0 and 1, got {order!r}")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_j argument must be finite, got {x!r}")
    if x < 0.0:
        raise DomainError(f"bessel_j argument must be nonnegative, got {x!r}")
    return float(_j0(x)) if order == 0 else float(_j1(x))


def bessel_y(order: int, x: float) -> float:
    """Y_order(x) for order 0 or 1 and x > 0 (logarithmic singularity at 0)."""
    if order not in (0, 1):
        raise DomainError(f"bessel_y supports orders 0 and 1, got {order!r}")
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"bessel_y requires a finite argument > 0, got {x!r}")
    return float(_y0(x)) if order == 0 else float(_y1(x))


def hankel1_0(x: float) -> complex:
    """H0^(1)(x) = J0(x) + i*Y0(x), componentwise identical to the two calls."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"hankel1_0 requires a finite argument > 0, got {x!r}")
    return complex(bessel_j(0, x), bessel_y(0, x))
