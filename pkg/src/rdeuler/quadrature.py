"""Quadrature rules used by the assembly kernels.

Triangle rules are symmetric Gauss rules in barycentric form with weights
normalised to sum to one (integrals get multiplied by the element area).
Edge rules are Gauss-Legendre on [0, 1].
"""

import numpy as np

# Degree-4 rule, 6 points: two symmetric orbits.
_TRI4_ORBITS = [
    (0.223381589678011, 0.108103018168070, 0.445948490915965),
    (0.109951743655322, 0.816847572980459, 0.091576213509771),
]

# Degree-6 rule, 12 points: two 3-point orbits and one 6-point orbit.
_TRI6_ORBITS = [
    (0.116786275726379, 0.501426509658179, 0.249286745170910),
    (0.050844906370207, 0.873821971016996, 0.063089014491502),
]
_TRI6_FULL = (0.082851075618374, 0.053145049844816, 0.310352451033785, 0.636502499121399)


def _orbit3(a, b):
    return [(a, b, b), (b, a, b), (b, b, a)]


def _orbit6(a, b, c):
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def triangle_rule(degree):
    """Barycentric points and unit weights for polynomial exactness `degree`.

    Returns (bary, w) with bary of shape (nq, 3) and w summing to 1.
    """
    if degree <= 4:
        pts, w = [], []
        for wt, a, b in _TRI4_ORBITS:
            pts += _orbit3(a, b)
            w += [wt] * 3
    elif degree <= 6:
        pts, w = [], []
        for wt, a, b in _TRI6_ORBITS:
            pts += _orbit3(a, b)
            w += [wt] * 3
        wt, a, b, c = _TRI6_FULL
        pts += _orbit6(a, b, c)
        w += [wt] * 6
    else:
        raise ValueError(f"no triangle rule tabulated for degree {degree}")
    return np.array(pts), np.array(w)


def edge_rule(npts):
    """Gauss-Legendre points/weights on [0, 1], weights summing to 1."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def quad_rule(npts=3):
    """Tensor Gauss rule on the [0,1]^2 reference square.

    Returns (xi, w) with xi of shape (npts*npts, 2); weights sum to 1.
    """
    g, gw = edge_rule(npts)
    xi = np.array([(a, b) for b in g for a in g])
    w = np.array([wa * wb for wb in gw for wa in gw])
    return xi, w
