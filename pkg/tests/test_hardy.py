"""Discrete half-line transform machinery.

The heavy oracles: the one-sided operator with symbol 1/(2-s) maps e^{-t}
to e^{-t}/3 exactly in the continuum, and the L2 norm of e^{-t} is
sqrt(1/2).  Both are checked at fixed grids with frozen tolerances.
"""

import math

import numpy as np
import pytest

from hardycalc.hardy import (
    GridSpec,
    SampledSignal,
    WraparoundError,
    discrete_multiplier,
    l2_norm,
    project_causal,
    shift,
    times,
    toeplitz_apply,
)
from hardycalc.symbols import Constant, Delay, add, atom, hinf_norm, multiply


def _exp_signal(grid, rate=1.0):
    t = times(grid)
    return SampledSignal(grid, np.exp(-rate * t).astype(complex))


class TestGridSpec:
    def test_horizon(self):
        assert GridSpec(16, 0.25).horizon == 4.0

    def test_times(self):
        t = times(GridSpec(8, 0.5))
        assert np.allclose(t, np.arange(8) * 0.5)

    def test_rejects_bad_sizes(self):
        for n in (24, 4, 0, -8):
            with pytest.raises(ValueError):
                GridSpec(n, 0.25)
        with pytest.raises(ValueError):
            GridSpec(16, 0.0)


class TestSampledSignal:
    def test_length_check(self):
        with pytest.raises(ValueError):
            SampledSignal(GridSpec(16, 0.25), np.ones(10))

    def test_finite_check(self):
        with pytest.raises(ValueError):
            SampledSignal(GridSpec(16, 0.25), np.array([np.nan] + [0.0] * 15))

    def test_vector_valued_shape(self):
        grid = GridSpec(16, 0.25)
        sig = SampledSignal(grid, np.zeros((16, 3), dtype=complex))
        assert sig.values.shape == (16, 3)


class TestL2Norm:
    def test_zero(self):
        assert l2_norm(SampledSignal(GridSpec(8, 0.5), np.zeros(8))) == 0.0

    def test_impulse(self):
        grid = GridSpec(8, 0.25)
        v = np.zeros(8)
        v[0] = 1.0
        assert l2_norm(SampledSignal(grid, v)) == pytest.approx(0.5)

    def test_exponential_oracle(self):
        # integral of e^{-2t} over (0, inf) is 1/2; measured error 8.6e-5
        grid = GridSpec(2 ** 16, 2.0 ** -12)
        val = l2_norm(_exp_signal(grid))
        assert abs(val - math.sqrt(0.5)) < 1e-4

    def test_vector_valued_matches_stacked(self):
        grid = GridSpec(64, 0.125)
        rng = np.random.default_rng(4)
        v = rng.normal(size=(64, 2))
        ref = math.sqrt(l2_norm(SampledSignal(grid, v[:, 0])) ** 2
                        + l2_norm(SampledSignal(grid, v[:, 1])) ** 2)
        assert l2_norm(SampledSignal(grid, v)) == pytest.approx(ref, rel=1e-12)


class TestShift:
    def test_grid_shift(self):
        grid = GridSpec(16, 0.25)
        f = SampledSignal(grid, np.arange(16.0))
        out = shift(f, 0.5)
        assert np.allclose(out.values[:14].real, np.arange(2.0, 16.0))
        assert np.allclose(out.values[14:], 0.0)

    def test_zero_is_identity(self):
        grid = GridSpec(16, 0.25)
        f = _exp_signal(grid)
        assert np.array_equal(shift(f, 0.0).values, f.values)

    def test_rejects_off_grid_and_negative(self):
        f = _exp_signal(GridSpec(16, 0.25))
        for tau in (0.3, -0.25):
            with pytest.raises(ValueError):
                shift(f, tau)


class TestProjectCausal:
    def test_keeps_causal_window(self):
        grid = GridSpec(8, 0.5)
        full = np.arange(16.0)
        out = project_causal(full, grid)
        assert np.allclose(out.values.real, np.arange(8.0, 16.0))


class TestDiscreteMultiplier:
    def test_constant_bins(self):
        grid = GridSpec(64, 0.125)
        m = discrete_multiplier(Constant(0.7), grid)
        assert m.shape == (128,)
        assert np.allclose(m, 0.7)

    def test_delay_phase(self):
        grid = GridSpec(64, 0.125)
        m = discrete_multiplier(Delay(0.5), grid)
        omega = 2.0 * math.pi * np.fft.fftfreq(128, d=0.125)
        assert np.allclose(m, np.exp(1j * omega * 0.5))

    def test_atom_matches_boundary_to_fourth_order(self):
        # the discrete symbol approximates c/(alpha - i w) with O(dt^4) error
        # at moderate frequencies
        alpha, c = 2.0, 1.0
        errs = []
        for k in (6, 7):
            grid = GridSpec(2 ** k, 2.0 ** -k)
            m = discrete_multiplier(atom(c, alpha), grid)
            omega = 2.0 * math.pi * np.fft.fftfreq(2 ** (k + 1), d=grid.dt)
            keep = np.abs(omega) < 8.0
            ref = c / (alpha - 1j * omega[keep])
            errs.append(float(np.max(np.abs(m[keep] - ref))))
        assert errs[1] < errs[0] / 8.0


class TestToeplitzApply:
    def test_constant_one_is_identity(self):
        grid = GridSpec(1024, 2.0 ** -6)
        f = _exp_signal(grid, rate=2.0)
        out = toeplitz_apply(Constant(1.0), f)
        assert np.max(np.abs(out.values - f.values)) < 1e-12

    def test_atom_oracle(self):
        # continuum identity: symbol 1/(2-s) acting on e^{-t} gives e^{-t}/3;
        # measured max error 1.6e-10 at this grid
        grid = GridSpec(8192, 2.0 ** -8)
        f = _exp_signal(grid)
        out = toeplitz_apply(atom(1.0, 2.0), f)
        ref = f.values / 3.0
        assert np.max(np.abs(out.values - ref)) < 1e-8

    def test_delay_matches_shift(self):
        grid = GridSpec(1024, 2.0 ** -6)
        f = _exp_signal(grid, rate=2.0)
        tau = 8 * grid.dt
        d1 = toeplitz_apply(Delay(tau), f)
        d2 = shift(f, tau)
        assert l2_norm(SampledSignal(grid, d1.values - d2.values)) < 1e-12

    def test_wraparound_guard_constant_signal(self):
        grid = GridSpec(1024, 2.0 ** -6)
        f = SampledSignal(grid, np.ones(1024, dtype=complex))
        with pytest.raises(WraparoundError):
            toeplitz_apply(atom(1.0, 1.0), f)

    def test_wraparound_guard_slow_decay(self):
        # e^{-t/2} on horizon 16 has tail ratio e^{-6} ~ 2.5e-3
        grid = GridSpec(1024, 2.0 ** -6)
        f = _exp_signal(grid, rate=0.5)
        with pytest.raises(WraparoundError):
            toeplitz_apply(atom(1.0, 1.0), f)

    def test_zero_signal_passes(self):
        grid = GridSpec(1024, 2.0 ** -6)
        f = SampledSignal(grid, np.zeros(1024, dtype=complex))
        out = toeplitz_apply(atom(1.0, 1.0), f)
        assert np.max(np.abs(out.values)) == 0.0

    def test_norm_bound_property(self):
        # l2(M_g f) <= hinf(g) l2(f) (1 + 1e-6) over a seeded family
        grid = GridSpec(1024, 2.0 ** -6)
        t = times(grid)
        rng = np.random.default_rng(6)
        syms = (atom(1.0, 1.0), Constant(0.7), Delay(0.5),
                add(atom(0.4, 2.0), Constant(0.5)))
        for _ in range(4):
            rate = rng.uniform(1.5, 3.0)
            phase = rng.uniform(0.0, 4.0)
            f = SampledSignal(grid, np.exp(-rate * t) * np.cos(phase * t))
            for g in syms:
                lhs = l2_norm(toeplitz_apply(g, f))
                rhs = hinf_norm(g) * l2_norm(f)
                assert lhs <= rhs * (1.0 + 1e-6)

    def test_multiplicativity_refines_fourth_order(self):
        g1, g2 = atom(1.0, 1.0), atom(1.0, 3.0)
        prod = multiply(g1, g2)
        resids = []
        for n, dt in ((512, 2.0 ** -5), (1024, 2.0 ** -6)):
            grid = GridSpec(n, dt)
            f = _exp_signal(grid, rate=2.0)
            lhs = toeplitz_apply(prod, f)
            rhs = toeplitz_apply(g1, toeplitz_apply(g2, f))
            resids.append(l2_norm(SampledSignal(grid, lhs.values - rhs.values)))
        assert resids[1] < resids[0] / 4.0

    def test_vector_valued_signal(self):
        grid = GridSpec(1024, 2.0 ** -6)
        t = times(grid)
        vals = np.stack([np.exp(-2.0 * t), np.exp(-3.0 * t)], axis=1).astype(complex)
        out = toeplitz_apply(Constant(0.5), SampledSignal(grid, vals))
        assert np.max(np.abs(out.values - 0.5 * vals)) < 1e-12
