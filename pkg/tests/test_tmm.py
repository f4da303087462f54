"""Transfer-matrix oracle: closed forms, conservation, defect resonances."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nanocav.tmm import (
    LayerStack,
    defect_stack,
    fresnel_normal,
    quarter_wave_mirror_reflectance,
    quarter_wave_stack,
    stack_resonance,
    stack_rt,
)


def test_empty_stack_is_transparent():
    stack = LayerStack(n_in=1.0, n_out=1.0)
    r, t = stack_rt(stack, 637.0)
    assert r == pytest.approx(0.0, abs=1e-15)
    assert t == pytest.approx(1.0, abs=1e-15)


def test_single_interface_fresnel():
    # a half-infinite medium is a stack with n_out = n2 and no layers
    stack = LayerStack(n_in=1.0, n_out=2.4)
    r, t = stack_rt(stack, 637.0)
    assert r == pytest.approx(fresnel_normal(1.0, 2.4), abs=1e-15)
    assert r == pytest.approx((1.4 / 3.4) ** 2, abs=1e-15)


def test_quarter_wave_single_pair_closed_form():
    # one high-index quarter-wave pair against air on both sides:
    # R = ((1 - n^2)/(1 + n^2))^2, which is 0.49582 for n = 2.4
    n = 2.4
    stack = quarter_wave_stack(n, 1.0, 637.0, pairs=1)
    r, _ = stack_rt(stack, 637.0)
    expected = ((1.0 - n**2) / (1.0 + n**2)) ** 2
    assert r == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.4958160, abs=1e-6)
    assert r == pytest.approx(
        quarter_wave_mirror_reflectance(1.0, n, 1.0, 1.0, 1), abs=1e-12
    )


@pytest.mark.parametrize("pairs", [1, 2, 3, 4, 6, 8])
def test_quarter_wave_mirror_closed_form(pairs):
    stack = quarter_wave_stack(2.4, 1.0, 637.0, pairs=pairs)
    r, t = stack_rt(stack, 637.0)
    assert r == pytest.approx(
        quarter_wave_mirror_reflectance(1.0, 2.4, 1.0, 1.0, pairs), abs=1e-12
    )
    assert r + t == pytest.approx(1.0, abs=1e-12)


def test_mirror_reflectance_grows_with_pairs():
    rs = [
        stack_rt(quarter_wave_stack(2.4, 1.0, 637.0, p), 637.0)[0]
        for p in range(1, 9)
    ]
    assert all(b > a for a, b in zip(rs, rs[1:]))
    assert rs[-1] > 0.999


@given(
    lam=st.floats(min_value=450.0, max_value=900.0),
    nh=st.floats(min_value=1.2, max_value=3.5),
    d1=st.floats(min_value=30.0, max_value=300.0),
    d2=st.floats(min_value=30.0, max_value=300.0),
)
@settings(max_examples=60, deadline=None)
def test_energy_conservation_property(lam, nh, d1, d2):
    stack = LayerStack(n_in=1.0, n_out=1.5, layers=((nh, d1), (1.33, d2)))
    r, t = stack_rt(stack, lam)
    assert 0.0 <= r <= 1.0
    assert 0.0 <= t <= 1.0
    assert r + t == pytest.approx(1.0, abs=1e-10)


def test_reciprocity_of_transmittance():
    # T is direction independent for lossless reciprocal stacks
    layers = ((2.4, 70.0), (1.0, 120.0), (1.8, 55.0))
    fwd = LayerStack(n_in=1.0, n_out=1.5, layers=layers)
    rev = LayerStack(n_in=1.5, n_out=1.0, layers=layers[::-1])
    for lam in (500.0, 637.0, 800.0):
        assert stack_rt(fwd, lam)[1] == pytest.approx(stack_rt(rev, lam)[1], abs=1e-12)


def test_half_wave_layer_is_absentee():
    # a half-wave layer at its design wavelength leaves R unchanged
    bare = LayerStack(n_in=1.0, n_out=1.5)
    with_hw = LayerStack(n_in=1.0, n_out=1.5, layers=((2.0, 637.0 / 4.0),))
    r0, _ = stack_rt(bare, 637.0)
    r1, _ = stack_rt(with_hw, 637.0 / 2.0)  # 637/4 nm of n=2 is lam/2 at 318.5
    assert r1 == pytest.approx(r0, abs=1e-12)


def test_defect_stack_resonates_at_design_wavelength():
    stack = defect_stack(2.4, 1.0, 637.0, pairs_per_side=4)
    lam, q = stack_resonance(stack, (600.0, 680.0))
    assert lam == pytest.approx(637.0, abs=0.01)
    _, t_res = stack_rt(stack, lam)
    assert t_res == pytest.approx(1.0, abs=1e-6)  # symmetric lossless cavity
    assert q > 100.0


def test_defect_q_scales_with_mirror_strength():
    # each extra mirror pair divides the transmitted amplitude by
    # (n_h/n_l)^2, so Q gains a factor (n_h/n_l)^4 per two added pairs
    _, q4 = stack_resonance(defect_stack(2.4, 1.0, 637.0, 4), (620.0, 660.0))
    _, q6 = stack_resonance(defect_stack(2.4, 1.0, 637.0, 6), (630.0, 645.0))
    assert q6 / q4 == pytest.approx(2.4**4, rel=0.15)


def test_stack_resonance_band_edge_error():
    stack = defect_stack(2.4, 1.0, 637.0, pairs_per_side=4)
    with pytest.raises(ValueError):
        stack_resonance(stack, (700.0, 800.0))  # resonance outside the band


def test_invalid_inputs():
    with pytest.raises(ValueError):
        LayerStack(n_in=0.5, n_out=1.0)
    with pytest.raises(ValueError):
        LayerStack(n_in=1.0, n_out=1.0, layers=((1.5, -3.0),))
    with pytest.raises(ValueError):
        stack_rt(LayerStack(n_in=1.0, n_out=1.0), -600.0)
