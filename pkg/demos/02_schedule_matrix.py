"""
From attempt probabilities to a slot schedule
=============================================

An attempt vector alpha says what fraction of an interval's T slots each
RSU transmits in.  ``build_matrix`` places floor(alpha_i * T) ones in row
i while keeping at most M transmitters per slot.
"""
import numpy as np

from divsched.schedule import build_matrix, verify_matrix

# five RSUs, two channels, sixteen slots; the capacity M*T is used exactly
alpha = [1 / 8, 3 / 8, 1 / 2, 1, 0]
sched = build_matrix(alpha, T=16, M=2, rng=np.random.default_rng(1))
for i, row in enumerate(sched.Q):
    print(f"RSU{i + 1} " + "".join("#" if q else "." for q in row))
print("row sums   ", sched.Q.sum(axis=1).tolist())
print("column sums", sched.Q.sum(axis=0).tolist())
print("violations ", verify_matrix(sched), " iterations", sched.iterations)

# with no search budget the deterministic wrap-around layout is used
fallback = build_matrix(np.full(10, 0.5), T=20, M=5, max_iters=0)
print("\nfallback used:", fallback.used_fallback, " violations:", verify_matrix(fallback))
for row in fallback.Q[:4]:
    print("".join("#" if q else "." for q in row))
