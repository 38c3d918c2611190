"""Richardson extrapolation on halving schedules.

Every limit in this package (tangent distances, difference and sum
operations, rescaling gaps) is estimated the same way: evaluate along a
geometric schedule of scales, extrapolate the first-order error away, and
report a verdict with an error estimate. This script shows the mechanics
on sequences where the true limit is known.
"""

import numpy as np

from dilatlab import halving_schedule, richardson_limit


def example_first_order():
    # f(eps) = L + c*eps + smaller terms; the extrapolant kills the c*eps term
    eps = halving_schedule(0.5, 10)
    values = 3.0 + 0.7 * eps + 0.05 * eps**2
    est = richardson_limit(eps, values)
    print("first-order sequence")
    print("  raw last value   %.10f" % values[-1])
    print("  extrapolated     %.10f  (true limit 3)" % est.extrapolated)
    print("  error estimate   %.2e" % est.error)
    print("  converged        %s" % est.converged)


def example_vector_limit():
    # vector sequences extrapolate componentwise
    eps = halving_schedule(0.5, 8)
    values = np.stack([[1.0 + e, 2.0 - 3.0 * e] for e in eps])
    est = richardson_limit(eps, values)
    print("vector sequence")
    print("  limit            %s" % np.round(est.extrapolated, 10))
    print("  converged        %s" % est.converged)


def example_honest_failure():
    # an oscillating sequence has no limit along the schedule; the verdict
    # must say so instead of returning a number with false confidence
    eps = halving_schedule(0.5, 10)
    values = np.cos(1.0 / eps)
    est = richardson_limit(eps, values)
    print("oscillating sequence")
    print("  converged        %s" % est.converged)
    print("  error estimate   %.2e" % est.error)


def example_noise_floor():
    # once the sequence sits below measurement noise the estimator reports
    # convergence at the floor rather than chasing the jitter
    rng = np.random.default_rng(7)
    eps = halving_schedule(0.5, 12)
    values = 1.0 + 1e-14 * rng.standard_normal(eps.size)
    est = richardson_limit(eps, values)
    print("flat sequence with float jitter")
    print("  limit            %.12f" % est.extrapolated)
    print("  converged        %s" % est.converged)


if __name__ == "__main__":
    example_first_order()
    print()
    example_vector_limit()
    print()
    example_honest_failure()
    print()
    example_noise_floor()
