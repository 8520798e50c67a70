"""Minimum of the exact normal-return CVaR portfolio objective.

Reads Sigma from `bagbound dev-oracle --mode covariance --d 5` and prints the
optimal value and (c, x_1..x_5) at full double precision.

usage: derive_portfolio_truth.py PATH_TO_BAGBOUND
"""
import json
import subprocess
import sys

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm

MU = np.arange(1.0, 6.0)
ALPHA = 0.05
TARGET = 3.0


def main():
    out = subprocess.run([sys.argv[1], "dev-oracle", "--mode", "covariance", "--d", "5"],
                         check=True, capture_output=True, text=True).stdout
    sigma = np.array(json.loads(out))
    kappa = norm.pdf(norm.ppf(1 - ALPHA)) / ALPHA

    def f(x):
        return -MU @ x + kappa * np.sqrt(x @ sigma @ x)

    def grad(x):
        return -MU + kappa * sigma @ x / np.sqrt(x @ sigma @ x)

    cons = [{"type": "eq", "fun": lambda x: x.sum() - 1.0, "jac": lambda x: np.ones(5)},
            {"type": "ineq", "fun": lambda x: MU @ x - TARGET, "jac": lambda x: MU}]
    best = None
    for start in np.eye(5)[2:].tolist() + [np.full(5, 0.2).tolist()]:
        res = minimize(f, np.array(start), jac=grad, bounds=[(0, None)] * 5, constraints=cons,
                       method="SLSQP", options={"ftol": 1e-15, "maxiter": 1000})
        if res.success and (best is None or res.fun < best.fun):
            best = res
    x = np.clip(best.x, 0, None)
    x /= x.sum()
    # Newton polish on the face of the active nonnegativity constraints, with
    # the budget constraint eliminated through a null-space basis.
    active = x > 1e-9
    idx = np.flatnonzero(active)
    z = np.eye(len(idx))[:, 1:] - np.eye(len(idx))[:, [0]]
    for _ in range(20):
        s = np.sqrt(x @ sigma @ x)
        sx = sigma @ x
        g = grad(x)[idx]
        h = kappa * (sigma / s - np.outer(sx, sx) / s**3)[np.ix_(idx, idx)]
        step = z @ np.linalg.solve(z.T @ h @ z, -z.T @ g)
        x[idx] += step
    x[~active] = 0.0
    # Optimal c is the value-at-risk of the loss -xi^T x.
    c = -MU @ x + norm.ppf(1 - ALPHA) * np.sqrt(x @ sigma @ x)
    print(repr(float(f(x))))
    print(json.dumps([float(c)] + [float(v) for v in x]))


if __name__ == "__main__":
    main()
