"""Bessel function J0, its derivative, and its positive zeros.

The evaluator mirrors the Cephes rational approximations (Moshier, 1989):
on [0, 5] a degree-3/8 rational form with the first two zeros factored out,
beyond 5 the Hankel asymptotic form with 6/6 and 7/7 rational corrections.
Peak absolute error is about 4.2e-16 over [0, 30].

Zeros use a 20-entry table continued by the high-order McMahon-type
expansion (Bogaert, SISC 2014), accurate to full double precision for
indices above the table.
"""

from __future__ import annotations

import numpy as np

_SQ2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
_PIO4 = 7.85398163397448309616e-1  # pi/4

_PP = np.array([
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
])
_PQ = np.array([
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
])
_RP = np.array([
    -4.79443220978201773821e9,
    1.95617491946556577543e12,
    -2.49248344360967716204e14,
    9.70862251047306323952e15,
])
_RQ = np.array([  # leading coefficient 1 is implicit
    4.99563147152651017219e2,
    1.73785401676374683123e5,
    4.84409658339962045305e7,
    1.11855537045356834862e10,
    2.11277520115489217587e12,
    3.10518229857422583814e14,
    3.18121955943204943306e16,
    1.71086294081043136091e18,
])
_QP = np.array([
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
])
_QQ = np.array([  # leading coefficient 1 is implicit
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
])
_DR1 = 5.78318596294678452118e0
_DR2 = 3.04712623436620863991e1

# J1 small-argument rational form (same source), used for the derivative
# J0'(x) = -J1(x).
_J1_RP = np.array([
    -8.99971225705559398224e8,
    4.52228297998194034323e11,
    -7.27494245221818276015e13,
    3.68295732863852883286e15,
])
_J1_RQ = np.array([  # leading coefficient 1 is implicit
    6.20836478118054335476e2,
    2.56987256757748830383e5,
    8.35146791431949253037e7,
    2.21511595479792499675e10,
    4.74914122079991414898e12,
    7.84369607876235854894e14,
    8.95222336184627338078e16,
    5.32278620332680085395e18,
])
_J1_PP = np.array([
    7.62125616208173112003e-4,
    7.31397056940917570436e-2,
    1.12719608129684925192e0,
    5.11207951146807644818e0,
    8.42404590141772420927e0,
    5.21451598682361504063e0,
    1.00000000000000000254e0,
])
_J1_PQ = np.array([
    5.71323128072548699714e-4,
    6.88455908754495404082e-2,
    1.10514232634061696926e0,
    5.07386386128601488557e0,
    8.39985554327604159757e0,
    5.20982848682361821619e0,
    9.99999999999999997461e-1,
])
_J1_QP = np.array([
    5.10862594750176621635e-2,
    4.98213872951233449420e0,
    7.58238284132545283818e1,
    3.66779609360150777800e2,
    7.10856304998926107277e2,
    5.97489612400613639965e2,
    2.11688757100572135698e2,
    2.52070205858023719784e1,
])
_J1_QQ = np.array([  # leading coefficient 1 is implicit
    7.42373277035675149943e1,
    1.05644886038262816351e3,
    4.98641058337653607651e3,
    9.56231892404756170795e3,
    7.99704160447350683650e3,
    2.82619278517639096600e3,
    3.36093607810698293419e2,
])
_J1_Z1 = 1.46819706421238932572e1
_J1_Z2 = 4.92184563216946036703e1
_THPIO4 = 2.35619449019234492885  # 3*pi/4

_JZ_TABLE = np.array([
    2.40482555769577276862163187933e0,
    5.52007811028631064959660411281e0,
    8.65372791291101221695419871266e0,
    11.7915344390142816137430449119e0,
    14.9309177084877859477625939974e0,
    18.0710639679109225431478829756e0,
    21.2116366298792589590783933505e0,
    24.3524715307493027370579447632e0,
    27.4934791320402547958772882346e0,
    30.6346064684319751175495789269e0,
    33.7758202135735686842385463467e0,
    36.9170983536640439797694930633e0,
    40.0584257646282392947993073740e0,
    43.1997917131767303575240727287e0,
    46.3411883716618140186857888791e0,
    49.4826098973978171736027615332e0,
    52.6240518411149960292512853804e0,
    55.7655107550199793116834927735e0,
    58.9069839260809421328344066346e0,
    62.0484691902271698828525002646e0,
])


def _polevl(x, coef):
    ans = np.full_like(x, coef[0])
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def j0(x):
    """Bessel function of the first kind, order zero, vectorized."""
    x = np.abs(np.asarray(x, dtype=float))
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)

    tiny = x < 1e-5
    small = ~tiny & (x <= 5.0)
    large = x > 5.0

    if tiny.any():
        z = x[tiny]
        out[tiny] = 1.0 - z * z / 4.0
    if small.any():
        z = x[small] ** 2
        p = (z - _DR1) * (z - _DR2)
        out[small] = p * _polevl(z, _RP) / _p1evl(z, _RQ)
    if large.any():
        xx = x[large]
        w = 5.0 / xx
        q = 25.0 / (xx * xx)
        p = _polevl(q, _PP) / _polevl(q, _PQ)
        qq = _polevl(q, _QP) / _p1evl(q, _QQ)
        xn = xx - _PIO4
        out[large] = _SQ2OPI * (p * np.cos(xn) - w * qq * np.sin(xn)) / np.sqrt(xx)
    return out[0] if scalar else out


def j1(x):
    """Bessel function of the first kind, order one, vectorized."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    sign = np.sign(x)
    ax = np.abs(x)
    out = np.empty_like(ax)

    small = ax <= 5.0
    large = ~small

    if small.any():
        z = ax[small] ** 2
        w = _polevl(z, _J1_RP) / _p1evl(z, _J1_RQ)
        out[small] = w * ax[small] * (z - _J1_Z1) * (z - _J1_Z2)
    if large.any():
        xx = ax[large]
        w = 5.0 / xx
        z = w * w
        p = _polevl(z, _J1_PP) / _polevl(z, _J1_PQ)
        q = _polevl(z, _J1_QP) / _p1evl(z, _J1_QQ)
        xn = xx - _THPIO4
        out[large] = _SQ2OPI * (p * np.cos(xn) - w * q * np.sin(xn)) / np.sqrt(xx)
    out = out * sign
    return out[0] if scalar else out


def j0_prime(x):
    """Derivative of j0 (equals -j1)."""
    return -j1(x)


def j0_zero(k: int) -> float:
    """k-th positive zero of J0 (k >= 1)."""
    if k < 1:
        raise ValueError("zero index must be >= 1")
    if k <= _JZ_TABLE.size:
        return float(_JZ_TABLE[k - 1])
    x = np.pi * (k - 0.25)
    r = 1.0 / x
    r2 = r * r
    return float(
        x
        + r * (0.125
        + r2 * (-0.807291666666666666666666666667e-1
        + r2 * (0.246028645833333333333333333333e0
        + r2 * (-0.182443876720610119047619047619e1
        + r2 * (0.253364147973439050099206349206e2
        + r2 * (-0.567644412135183381139802038240e3
        + r2 * (0.186904765282320653831636345064e5
        + r2 * (-0.849353580299148769921876983660e6
        + r2 * 0.509225462402226769498681286758e8))))))))
    )


def j0_zeros(n: int) -> np.ndarray:
    """First n positive zeros of J0."""
    return np.array([j0_zero(k) for k in range(1, n + 1)])
