"""Compiled inner loop for closed-loop arm rollouts.

Scalarized so numba emits a tight loop; the pure-python fallback
(`arm_rollout_kernel.py_func`) is used by tests as a reference and keeps the
module importable when compilation is unavailable.
"""

import math

from numba import njit


@njit(cache=True)
def arm_rollout_kernel(theta, q1, q2, qd1, qd2, l1, l2, m1, m2, grav,
                       dt, n_steps, cap, stride, out):
    """Simulate the force-controlled arm under a 5-feature linear policy.

    The commanded end-effector force is ``clip(theta @ (x, y, xd, yd, 1))``
    and is applied on top of exact gravity compensation, so joint torque is
    ``J' u + g(q)`` and gravity cancels from the acceleration. Integration is
    semi-implicit Euler. Every ``stride``-th pre-step sample plus the final
    state is written to ``out`` rows (x, y, xd, yd, ux, uy); returns the
    final joint state.
    """
    t11, t12, t13, t14, t15 = theta[0, 0], theta[0, 1], theta[0, 2], theta[0, 3], theta[0, 4]
    t21, t22, t23, t24, t25 = theta[1, 0], theta[1, 1], theta[1, 2], theta[1, 3], theta[1, 4]
    k = 0
    for i in range(n_steps + 1):
        c1 = math.cos(q1)
        s1 = math.sin(q1)
        c12 = math.cos(q1 + q2)
        s12 = math.sin(q1 + q2)
        x = l1 * c1 + l2 * c12
        y = l1 * s1 + l2 * s12
        j11 = -l1 * s1 - l2 * s12
        j12 = -l2 * s12
        j21 = l1 * c1 + l2 * c12
        j22 = l2 * c12
        xd = j11 * qd1 + j12 * qd2
        yd = j21 * qd1 + j22 * qd2
        ux = t11 * x + t12 * y + t13 * xd + t14 * yd + t15
        uy = t21 * x + t22 * y + t23 * xd + t24 * yd + t25
        un = math.sqrt(ux * ux + uy * uy)
        if un > cap:
            ux *= cap / un
            uy *= cap / un
        if i % stride == 0 or i == n_steps:
            out[k, 0] = x
            out[k, 1] = y
            out[k, 2] = xd
            out[k, 3] = yd
            out[k, 4] = ux
            out[k, 5] = uy
            k += 1
        if i == n_steps:
            break
        c2 = math.cos(q2)
        s2 = math.sin(q2)
        m11 = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2.0 * m2 * l1 * l2 * c2
        m12 = m2 * l2 * l2 + m2 * l1 * l2 * c2
        m22 = m2 * l2 * l2
        h = m2 * l1 * l2 * s2
        cc1 = -h * qd2 * qd1 - h * (qd1 + qd2) * qd2
        cc2 = h * qd1 * qd1
        tau1 = j11 * ux + j21 * uy
        tau2 = j12 * ux + j22 * uy
        r1 = tau1 - cc1
        r2 = tau2 - cc2
        det = m11 * m22 - m12 * m12
        qdd1 = (m22 * r1 - m12 * r2) / det
        qdd2 = (m11 * r2 - m12 * r1) / det
        qd1 += qdd1 * dt
        qd2 += qdd2 * dt
        q1 += qd1 * dt
        q2 += qd2 * dt
    return q1, q2, qd1, qd2, k
