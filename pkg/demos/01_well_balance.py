"""Holding a hydrostatic atmosphere still.

An isothermal atmosphere rho = p = exp(-x) sits in a constant gravity
field. The continuous equations keep it at rest forever. A classical RKDG
scheme does not: the discrete flux divergence and the discrete source
cancel only up to truncation error, so the state drifts by O(h^(k+1)).
The well-balanced scheme evolves the deviation from the equilibrium and
cancels the balance exactly, so the drift is pure rounding.
"""

from wbdg import RunConfig, run_single

print(f"{'scheme':8s} {'N':>4s} {'L1(rho) at T=10':>18s} {'steps':>6s}")
for scheme, order in [("DG", 2), ("DG", 3), ("WBDG", 2), ("WBDG", 3)]:
    for N in (8, 32):
        snap, report = run_single(RunConfig(case="hydro1d", scheme=scheme, order=order, N=N))
        print(f"{report.label:8s} {N:4d} {report.errors['rho']:18.3e} {report.steps:6d}")

# The same holds for a genuinely moving steady flow: rho = e^-x, v = e^x.
print()
for scheme in ("DG", "WBDG"):
    _, report = run_single(RunConfig(case="moving1d", scheme=scheme, order=2, N=32))
    print(f"moving1d {report.label:6s} N=32  L1(v) = {report.errors['vx']:.3e}")
