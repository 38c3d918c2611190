"""Deformed metrics and snowflake powers from the structure registry.

Pushing Euclidean space through a diffeomorphism phi gives a dilatation
structure whose tangent distance at x is the norm deformed by the Jacobian
of phi. Raising the metric to a power a in (0, 1) gives a snowflake, whose
dilatations run at eps**(1/a) so that the powered metric still scales
linearly.
"""

import numpy as np

from dilatlab import (DiffeoPair, build_structure, estimate_dx, euclidean,
                      halving_schedule, riemannian_diffeo, shear_quadratic,
                      snowflake_structure, structure_names)


def example_registry():
    print("registered structures:")
    for name in structure_names():
        ds = build_structure(name)
        print("  %-26s dim %d" % (name, ds.space.dim))


def example_deformed_tangent_norm():
    # variant 1 deforms the metric (d(p,q) = |phi(p) - phi(q)|) and keeps
    # affine dilatations, so dx(u, v) = |Dphi(x) (v - u)|
    pair = shear_quadratic()
    ds = riemannian_diffeo(pair, variant=1)
    rng = np.random.default_rng(3)
    x = np.array([0.2, -0.3])
    J = pair.dphi(x)

    print("deformed tangent norm at x =", x)
    pts = [x + 0.4 * rng.standard_normal(2) for _ in range(5)]
    td, _ = estimate_dx(ds, x, pts, halving_schedule(0.125, 10))
    for u, v in zip(pts, pts[1:]):
        got = td.dx(u, v)
        want = np.linalg.norm(J @ (v - u))
        print("  dx %.9f   |Dphi(x)(v-u)| %.9f   rel gap %.1e"
              % (got, want, abs(got - want) / want))


def example_diffeo_validation():
    # DiffeoPair.validate probes the inverse and the Jacobian numerically
    pair = shear_quadratic()
    probes = 0.8 * np.random.default_rng(4).standard_normal((20, 2))
    worst = pair.validate(probes)
    print("shear diffeomorphism validated, worst probe gap %.1e" % worst)


def example_snowflake_scaling():
    base = euclidean(2)
    a = 0.5
    ds = snowflake_structure(base, a)
    p = np.array([0.0, 0.0])
    q = np.array([0.3, 0.4])

    print("snowflake exponent a = %.1f" % a)
    print("  d(p,q)            %.6f  (= 0.5**%.1f)" % (ds.space.distance(p, q), a))

    # dil(eps) contracts the powered metric by exactly eps, which means the
    # underlying Euclidean contraction runs at eps**(1/a)
    for eps in (0.5, 0.25):
        m = ds.dil(eps, p, q)
        ratio = ds.space.distance(p, m) / ds.space.distance(p, q)
        print("  eps %.2f  dil point %s  metric ratio %.6f"
              % (eps, np.round(m, 6), ratio))


if __name__ == "__main__":
    example_registry()
    print()
    example_deformed_tangent_norm()
    print()
    example_diffeo_validation()
    print()
    example_snowflake_scaling()
