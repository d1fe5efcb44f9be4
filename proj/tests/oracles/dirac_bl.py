"""Bounded-Lipschitz distance between two Dirac masses on the line.

Closed form 2D/(2+D), checked against a linear program over piecewise-linear
test functions: maximize psi(x) - psi(y) subject to |psi| <= S,
|psi'| <= G, S + G <= 1.
"""
import numpy as np
from scipy.optimize import linprog


def lp_value(D, h=0.01, pad=3.0):
    x0, x1 = -pad, D + pad
    n = int(round((x1 - x0) / h)) + 1
    grid = np.linspace(x0, x1, n)
    ix, iy = 0, 0
    ix = int(np.argmin(abs(grid - 0.0)))
    iy = int(np.argmin(abs(grid - D)))
    # variables: psi_0..psi_{n-1}, S, G
    c = np.zeros(n + 2)
    c[ix] = -1.0
    c[iy] = 1.0
    rows, b = [], []
    for i in range(n):
        for sgn in (1, -1):
            r = np.zeros(n + 2); r[i] = sgn; r[n] = -1; rows.append(r); b.append(0)
    hh = grid[1] - grid[0]
    for i in range(n - 1):
        for sgn in (1, -1):
            r = np.zeros(n + 2); r[i + 1] = sgn; r[i] = -sgn; r[n + 1] = -hh; rows.append(r); b.append(0)
    r = np.zeros(n + 2); r[n] = 1; r[n + 1] = 1; rows.append(r); b.append(1)
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(b), bounds=[(None, None)] * n + [(0, 1), (0, 1)])
    return -res.fun


for D in [0.1, 1.0, 5.0]:
    print(D, 2 * D / (2 + D), lp_value(D))
