import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascadeinv.errors import DegenerateInputError, InputError
from cascadeinv.stability import (REFERENCE_INPUTS, TABLE_GAMMAS, StabilityInputs,
                                  admissible_time_bound, beta1, stability_constant, stability_table,
                                  t_star)

EXAMPLE1_ROWS = [(5.0528e-5, 4.4722), (5.0528e-6, 14.1422), (5.0528e-7, 44.7214),
          (5.0528e-8, 141.4214), (5.0528e-9, 447.2136), (5.0528e-10, 1414.2)]
EXAMPLE2_ROWS = [(1.9987e-5, 4.4722), (1.9987e-6, 14.1421), (1.9987e-7, 44.7214),
          (1.9987e-8, 141.4214), (1.9987e-9, 447.2136), (1.9987e-10, 1414.2)]


def sig4(a, b):
    return f"{a:.3e}" == f"{b:.3e}"


def test_t_star_examples():
    assert sig4(t_star(REFERENCE_INPUTS[1]), 5.0528e-5)
    assert sig4(t_star(REFERENCE_INPUTS[2]), 1.9987e-5)


def test_t_star_linear_in_gamma():
    inp = REFERENCE_INPUTS[1]
    assert t_star(inp.with_gamma(2e-5)) == pytest.approx(2 * t_star(inp), rel=1e-14)


def test_t_star_degenerate():
    with pytest.raises(DegenerateInputError):
        t_star(StabilityInputs(1e-5, 1e4, 0, 0, 0, 0))


def test_stability_constant_examples():
    assert sig4(stability_constant(5.0528e-5, 1e-5, 1e4), 4.4722)
    assert sig4(stability_constant(5.0528e-10, 1e-10, 1e4), 1414.2)
    assert stability_constant(0.0, 1e-3, 2.0) == pytest.approx(math.sqrt(2 / (1e-3 * 2.0)), rel=1e-15)
    with pytest.raises(InputError):
        stability_constant(-1.0, 1e-5, 1e4)


@pytest.mark.parametrize("key,table", [(1, EXAMPLE1_ROWS), (2, EXAMPLE2_ROWS)])
def test_tables_reproduced(key, table):
    rows = stability_table(TABLE_GAMMAS, REFERENCE_INPUTS[key])
    assert len(rows) == 6
    for row, (ts, ell) in zip(rows, table):
        assert sig4(row.t_star, ts) and sig4(row.constant, ell)


def test_single_row_asymptotics():
    (row,) = stability_table([1e-7], REFERENCE_INPUTS[1])
    assert row.constant == pytest.approx(math.sqrt(2 / (1e-7 * 1e4)), rel=1e-6)
    with pytest.raises(InputError):
        stability_table([], REFERENCE_INPUTS[1])


def test_input_validation():
    with pytest.raises(InputError):
        StabilityInputs(0.0, 1e4, 0, 0, 0, 0)
    with pytest.raises(InputError):
        StabilityInputs(1e-5, 1e4, -1, 0, 0, 0)


def test_beta1_requires_constant():
    with pytest.raises(InputError):
        beta1(0.1, REFERENCE_INPUTS[1])


def test_beta1_zero_norms():
    assert beta1(0.7, StabilityInputs(1e-5, 1e4, 0, 0, 0, 0, ehrling_c=1.0)) == 0.0


def test_admissible_bound_respects_time_bound():
    inp = StabilityInputs(1e-5, 1e4, 0.0, 0.0, 0.0, 1e-3, ehrling_c=1.0)
    sup = admissible_time_bound(inp)
    assert sup is not None and 0 < sup <= t_star(inp)
    assert beta1(sup, inp) / inp.gamma <= 0.5 < beta1(sup * 1.001, inp) / inp.gamma


def test_reference_inputs_admit_no_time_for_unit_constant():
    inp = StabilityInputs(1e-5, 1e4, 0.0, 0.1963, 7.3947e-4, 7.5540, ehrling_c=1.0)
    assert beta1(0.0, inp) / inp.gamma > 0.5
    assert admissible_time_bound(inp) is None


@given(st.floats(0, 3), st.floats(0, 3), st.floats(0, 2))
def test_beta1_monotone(t1, t2, c):
    inp = StabilityInputs(1e-5, 1e4, 0.0, 0.1963, 7.3947e-4, 7.5540, ehrling_c=c)
    lo, hi = sorted((t1, t2))
    assert beta1(lo, inp) <= beta1(hi, inp)


@given(st.floats(0, 5), st.floats(1e-9, 1e-3), st.floats(1, 1e5))
def test_constant_scales_as_inverse_root_gamma(t, gamma, a0):
    ratio = stability_constant(t, gamma / 100, a0) / stability_constant(t, gamma, a0)
    assert ratio == pytest.approx(10.0, rel=1e-12)


def test_t_star_increasing_on_table_grid():
    base = REFERENCE_INPUTS[1]
    ts = [t_star(base.with_gamma(g)) for g in sorted(TABLE_GAMMAS)]
    assert all(a < b for a, b in zip(ts, ts[1:]))
    alphas = np.logspace(2, 6, 9)
    ta = [t_star(StabilityInputs(1e-5, a, 0, 0.1963, 7.3947e-4, 7.554)) for a in alphas]
    assert all(a < b for a, b in zip(ta, ta[1:]))
