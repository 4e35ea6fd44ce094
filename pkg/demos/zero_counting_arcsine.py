"""Watch truncation eigenvalues fill out the arcsine distribution.

Eigenvalues of the size-N free truncation are 2 cos(k pi / (N+1)).  Their
normalized counting measure converges weakly to the equilibrium measure of
[-2, 2], whose density is 1 / (pi sqrt(4 - x^2)).  The Wasserstein-1
distance makes the convergence quantitative and roughly halves with each
doubling of N.
"""

from opspectra import (JacobiParams, equilibrium_measure, w1_distance,
                       zero_counting)


def main():
    ref = equilibrium_measure((-2.0, 2.0))
    free = JacobiParams.free()

    print("W1 distance between the zero counting measure and arcsine:")
    prev = None
    for N in (50, 100, 200, 400, 800, 1600):
        w = w1_distance(zero_counting(free, N), ref)
        ratio = "" if prev is None else f"  ratio {w / prev:.3f}"
        print(f"  N={N:5d}  W1={w:.6f}{ratio}")
        prev = w

    print()
    print("low moments of the reference measure (central binomials):")
    for k in (2, 4, 6):
        print(f"  moment {k}: {ref.moment(k):.12f}")


if __name__ == "__main__":
    main()
