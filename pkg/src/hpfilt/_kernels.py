"""Compiled inner loop of the incremental HP recursion."""
import numba
import numpy as np


@numba.njit(cache=True)
def incremental_pass(y, eta):
    """
    Run the Woodbury recursion over ``y`` (length >= 3) keeping only what
    the trend update needs: the trend itself and the last two columns of
    ``S_t^{-1}``.

    Returns ``(trend, endpoints)`` where ``trend`` is the full-sample HP trend and
    ``endpoints[t-1]`` is the last entry of the trend fitted to ``y[:t]``
    (``t >= 3``; the first two slots are left as ``y[0], y[1]``).

    Work is O(t) per appended point, O(l^2) in total.
    """
    l = y.shape[0]
    g = np.empty(l)
    ends = np.empty(l)
    ends[0] = y[0]
    ends[1] = y[1]
    # horizon 3: g = y - w*[1, -2, 1], same as S_3^{-1} y
    w = eta * (y[0] - 2.0 * y[1] + y[2]) / (6.0 * eta + 1.0)
    g[0] = y[0] - w
    g[1] = y[1] + 2.0 * w
    g[2] = y[2] - w
    ends[2] = g[2]

    # a = second-to-last column, b = last column of S_t^{-1}
    a = np.empty(l)
    b = np.empty(l)
    q = np.empty(l)
    d = 6.0 * eta + 1.0
    a[0] = 2.0 * eta / d
    a[1] = (2.0 * eta + 1.0) / d
    a[2] = 2.0 * eta / d
    b[0] = -eta / d
    b[1] = 2.0 * eta / d
    b[2] = (5.0 * eta + 1.0) / d

    for t in range(4, l + 1):
        m = t - 1  # size of the previous horizon
        for i in range(m):
            q[i] = a[i] - 2.0 * b[i]
        q[m] = 1.0
        if eta == 0.0:
            delta = 0.0
        else:
            ptq = q[m - 2] - 2.0 * q[m - 1] + q[m]
            delta = 1.0 / (1.0 / eta + ptq)

        s = g[m - 2] - 2.0 * g[m - 1] + y[m]
        g[m] = y[m]
        ds = delta * s
        for i in range(t):
            g[i] -= ds * q[i]
        ends[m] = g[m]

        # new columns t-1 and t of S_t^{-1}
        qa = delta * q[m - 1]
        qb = delta * q[m]
        for i in range(m):
            a[i] = b[i] - qa * q[i]
            b[i] = -qb * q[i]
        a[m] = -qa * q[m]
        b[m] = 1.0 - qb * q[m]
    return g, ends
