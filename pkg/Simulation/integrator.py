from typing import Callable, Tuple

import numpy as np


def rk4_step(f: Callable[[np.ndarray], Tuple[np.ndarray, object]], y: np.ndarray, h: float):
    """
    One classical Runge-Kutta step of the autonomous ODE y' = f(y).

    f returns (derivative, aux); the aux value of the first stage (taken at y
    itself) is handed back so callers can record e.g. the control at y.
    Returns (y_next, aux_at_y).
    """
    k1, aux = f(y)
    k2, _ = f(y + 0.5 * h * k1)
    k3, _ = f(y + 0.5 * h * k2)
    k4, _ = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), aux
