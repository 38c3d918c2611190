"""Axiom checks and tangent operations on Euclidean space.

Euclidean space with dil(eps, x, y) = x + eps*(y - x) is the calibration
case: every limit the package estimates numerically has a closed form
here, so the estimates can be compared digit by digit.
"""

import numpy as np

from dilatlab import (check_A0_A1, check_A2, check_conical_group,
                      derive_sigma_inv, estimate_dx, euclidean,
                      halving_schedule)


def sample_pairs(ds, rng, count):
    pairs = []
    for _ in range(count):
        x = 0.6 * rng.standard_normal(ds.space.dim)
        y = x + 0.5 * rng.standard_normal(ds.space.dim)
        pairs.append((x, y))
    return pairs


def example_axioms():
    ds = euclidean(2)
    rng = np.random.default_rng(0)
    sched = halving_schedule(0.5, 8)

    rep = check_A0_A1(ds, sample_pairs(ds, rng, 25), sched)
    print("A0/A1 (identity, fixed point, invertibility, contraction):",
          "passed" if rep.passed else "FAILED")
    print("  worst residual %.2e" % rep.max_residual)

    rep = check_A2(ds, sample_pairs(ds, rng, 25), [(0.5, 0.5), (0.7, 0.2)])
    print("A2 (composition dil(e, x, dil(m, x, u)) = dil(e*m, x, u)):",
          "passed" if rep.passed else "FAILED")
    print("  worst residual %.2e" % rep.max_residual)


def example_tangent_distance():
    # the rescaled-limit distance d^x(u, v) is plain |u - v| here, with no
    # dependence on the scale at which it is probed
    ds = euclidean(3)
    rng = np.random.default_rng(1)
    x = np.array([0.2, -0.1, 0.4])
    pts = [x + 0.5 * rng.standard_normal(3) for _ in range(6)]
    td, worst = estimate_dx(ds, x, pts, halving_schedule(0.5, 8))
    print("tangent distance at x =", x)
    gap = max(abs(td.dx(u, v) - np.linalg.norm(u - v))
              for i, u in enumerate(pts) for v in pts[i + 1:])
    print("  max |dx(u,v) - |u-v||  %.2e" % gap)
    print("  worst limit error      %.2e" % worst.error)


def example_tangent_operations():
    # difference, sum, and inverse extrapolate to x+v-u, u+v-x, 2x-u
    ds = euclidean(2)
    x = np.array([0.3, -0.2])
    u = np.array([0.5, 0.1])
    v = np.array([-0.1, 0.2])
    td = derive_sigma_inv(ds, x, halving_schedule(0.5, 8))
    print("tangent operations at x =", x)
    print("  diff(u,v)  %s  expected %s" % (np.round(td.delta_op(u, v), 9), x + v - u))
    print("  add(u,v)   %s  expected %s" % (np.round(td.sigma_op(u, v), 9), u + v - x))
    print("  inv(u)     %s  expected %s" % (np.round(td.inv_op(u), 9), 2 * x - u))
    print("  consistency diff(u, add(u,v)) = v residual %.2e"
          % td.consistency_residual(u, v))


def example_group_structure():
    # the extrapolated operations form a group with dilatations as
    # automorphisms; check_conical_group verifies the identities numerically
    ds = euclidean(2)
    rng = np.random.default_rng(2)
    x = np.zeros(2)
    td = derive_sigma_inv(ds, x, halving_schedule(0.5, 8))
    samples = [x + 0.4 * rng.standard_normal(2) for _ in range(9)]
    rep = check_conical_group(td, ds, samples, mus=(0.5, 0.25))
    print("conical group check:", "passed" if rep.passed else "FAILED")
    print("  worst identity residual %.2e" % rep.max_residual)


if __name__ == "__main__":
    example_axioms()
    print()
    example_tangent_distance()
    print()
    example_tangent_operations()
    print()
    example_group_structure()
