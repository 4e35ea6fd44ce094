"""Sparse perturbations that leave the root test alone but are easy to see.

Setting a_n = 1/2 at the powers of two (and 1 elsewhere) perturbs the
Jacobi data on a density-zero set.  The geometric mean of the a_n over a
window of length N then differs from 1 only by O(log N / N), so the root
test still converges to the capacity of [-2, 2] normalized to 1, and the
Cesaro average of the deviations dies at the same rate.  The analogous
circle construction plants Verblunsky bumps of modulus 1/2 at powers of
two and reads off the product of the complementary rho_j.
"""

from opspectra import cn_stat_oprl, cn_stat_opuc, root_test
from opspectra.scenarios import sparse_bump_jacobi, sparse_bump_verblunsky

LADDER = (64, 256, 1024, 4096)


def main():
    J = sparse_bump_jacobi(0.5)
    root = root_test(J, LADDER)
    cn = cn_stat_oprl(J, LADDER)
    print("line case, a_n = 1/2 at n in {2, 4, 8, ...}:")
    for N, r, c in zip(LADDER, root.values, cn.values):
        print(f"  N={N:5d}  root test={r:.6f}  cesaro dev={c:.6f}")
    bumps = sum(1 for k in range(1, 13) if 2 ** k <= LADDER[-1])
    print(f"  ({bumps} bumps inside the last window; both columns drift to"
          " their clean-case limits)")

    print()
    V = sparse_bump_verblunsky(0.5)
    root_c = root_test(V, LADDER)
    cn_c = cn_stat_opuc(V, LADDER)
    print("circle case, alpha_j = 1/2 at j in {1, 2, 4, 8, ...}:")
    for N, r, c in zip(LADDER, root_c.values, cn_c.values):
        print(f"  N={N:5d}  rho geo mean={r:.6f}  cesaro avg={c:.6f}")


if __name__ == "__main__":
    main()
