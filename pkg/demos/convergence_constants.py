"""The contraction factor of the weighted greedy iteration and its threshold.

Tabulates rho(delta) = sqrt(2 d^2 (1 + 3 d^2) / (1 - d^2)), locates the
largest isometry constant with rho < 1 (the positive root of
6 t^4 + 3 t^2 - 1), and shows how the worst-case error bound decays per
iteration for a small constant.
"""

from subrec.analysis import (
    convergence_factor,
    delta_for_rate,
    delta_threshold,
    error_bound,
)


def main():
    thr = delta_threshold()
    print(f"convergence threshold: delta < {thr:.6f}")
    print(f"rho at the threshold:  {convergence_factor(thr):.12f}")
    print(f"delta for rate 0.5:    {delta_for_rate(0.5):.6f} "
          f"(its square is {delta_for_rate(0.5)**2:.6f})")
    print()

    print(f"{'delta':>7s} {'rho':>9s}")
    for delta in (0.02, 0.04, 0.1, 0.2, 0.3, 0.4, thr, 0.6):
        print(f"{delta:7.4f} {convergence_factor(delta):9.4f}")

    print("\nnoiseless worst-case error bound, delta = 0.04, unit initial error:")
    for k in (0, 1, 2, 4, 8):
        print(f"  after {k:2d} iterations: {error_bound(0.04, k, 1.0, 0.0, 0.0):.3e}")

    print("\nwith measurement noise the bound floors at the two noise terms:")
    floor = error_bound(0.04, 50, 1.0, 1e-3, 1e-3)
    print(f"  after 50 iterations with 1e-3 noise norms: {floor:.3e}")


if __name__ == "__main__":
    main()
