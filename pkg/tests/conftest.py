import numpy as np
import pytest

from wbdg.dg import Discretization
from wbdg.equilibria import get_case
from wbdg.grid import build_mesh

BACKENDS = ["numba", "numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def make_disc(case, N, degree, backend=None, **kw):
    spec = get_case(case) if isinstance(case, str) else case
    mesh = build_mesh(spec.dimension, spec.bounds, N)
    return spec, Discretization(mesh, degree, spec.gamma, backend=backend, **kw)


def smooth_delta(disc, rng, amp=1e-3, modes=3):
    """Random smooth perturbation coefficients (decaying modal spectrum)."""
    U = amp * rng.standard_normal(disc.shape)
    P = disc.P
    decay = 0.5 ** np.arange(P)
    if disc.dim == 1:
        U *= decay
    else:
        U *= decay[:, None] * decay[None, :]
    return U


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    """Log one acceptance line; it is repeated in the terminal summary."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
