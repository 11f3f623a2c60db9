import os
from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

from dyndtw import Curve

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=300,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

small_ints = st.integers(-20, 20)
rationals = st.builds(Fraction, st.integers(-40, 40), st.sampled_from([1, 2, 3, 4]))


def curves(min_len=1, max_len=12, dim=1, coords=rationals):
    pt = st.tuples(*[coords] * dim)
    return st.lists(pt, min_size=min_len, max_size=max_len).map(lambda ps: Curve.of(ps))


def curve_pairs(min_len=1, max_len=12, dim=1, coords=rationals):
    return st.tuples(curves(min_len, max_len, dim, coords), curves(min_len, max_len, dim, coords))


def random_monge(rng, nrows, ncols, terms=None, scale=20):
    """Integer Monge matrix: row and column offsets plus non-negative multiples
    of staircase indicators [i >= a][j <= b] (each one Monge)."""
    import numpy as np
    i = np.arange(nrows)[:, None]
    j = np.arange(ncols)[None, :]
    A = np.array([rng.randint(0, scale) for _ in range(nrows)])[:, None] \
        + np.array([rng.randint(0, scale) for _ in range(ncols)])[None, :]
    for _ in range(terms if terms is not None else nrows + ncols):
        a, b = rng.randrange(nrows), rng.randrange(ncols)
        A = A + rng.randint(0, scale) * ((i >= a) & (j <= b))
    return A.astype(np.int64)


# -- acceptance report -------------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
