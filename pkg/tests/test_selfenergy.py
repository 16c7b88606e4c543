import warnings

import numpy as np
import pytest

from sshqed.band import SSHParams, dispersion
from sshqed.coupling import CouplingConfig, Geometry, enumerate_all, mirror, parse_config
from sshqed.selfenergy import (
    BranchAmbiguityError,
    KernelKind,
    NearBandEdgeWarning,
    OutOfBandError,
    SingularSumError,
    kernel_closed,
    kernel_finite,
    poles,
    rates_and_shifts,
    sigma,
)

P3 = SSHParams(xi=1.0, delta=0.3)


def test_pole_product_is_unity():
    rng = np.random.default_rng(11)
    for _ in range(100):
        delta = float(rng.uniform(-0.9, 0.9))
        z = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        yp, ym = poles(z, SSHParams(xi=1.0, delta=delta))
        assert abs(yp * ym - 1.0) < 1e-12


def test_poles_hand_value_at_zero_dimerization():
    # z = sqrt(2) xi, delta = 0: discriminant is -4 xi^4, principal root 2i,
    # so y_+/- = (2 - 2 +/- 2i)/2 = +/- i
    yp, ym = poles(np.sqrt(2.0), SSHParams(xi=1.0, delta=0.0))
    assert yp == pytest.approx(1j, abs=1e-14)
    assert ym == pytest.approx(-1j, abs=1e-14)


def test_exactly_one_pole_inside_for_in_band_energies():
    for delta in (0.3, -0.3):
        p = SSHParams(xi=1.0, delta=delta)
        for D in np.linspace(0.65, 1.95, 40):
            yp, ym = poles(complex(D, 1e-8), p)
            assert (abs(yp) < 1.0) != (abs(ym) < 1.0)


def test_branch_ambiguity_on_the_band():
    # exactly on the band the poles sit on the unit circle
    with pytest.raises(BranchAmbiguityError):
        kernel_closed(KernelKind.A, 0, 1.0 + 0.0j, P3)


def test_closed_matches_finite_sum_in_band():
    rng = np.random.default_rng(12)
    for _ in range(60):
        kind = list(KernelKind)[rng.integers(3)]
        n = int(rng.integers(-6, 7))
        delta = float(rng.choice([0.3, -0.3]))
        p = SSHParams(xi=1.0, delta=delta)
        D = float(rng.uniform(2 * abs(delta) + 0.1, 2.0 - 0.1))
        z = complex(D, 5e-3)
        ref = kernel_finite(kind, n, z, p, 4096)
        val = kernel_closed(kind, n, z, p)
        assert abs(val - ref) / abs(ref) < 1e-3


def test_closed_matches_finite_sum_off_band():
    for kind in KernelKind:
        for n in (0, 1, -1, 3):
            ref = kernel_finite(kind, n, 3.0 + 0.0j, P3, 4096)
            val = kernel_closed(kind, n, 3.0 + 0.0j, P3)
            assert abs(val - ref) / abs(ref) < 1e-6


def test_finite_sum_converges_with_lattice_size():
    z = complex(1.0, 2e-3)
    ref = kernel_closed(KernelKind.B, 3, z, P3)
    errs = [abs(kernel_finite(KernelKind.B, 3, z, P3, L) - ref) / abs(ref)
            for L in (512, 1024, 2048, 4096)]
    assert all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3


def test_kernels_vanish_without_coupling():
    for kind in KernelKind:
        assert kernel_closed(kind, 2, 1.0 + 1e-8j, P3, g=0.0) == 0.0
        assert kernel_finite(kind, 2, 1.0 + 1e-8j, P3, 64, g=0.0) == 0.0


def test_b_and_c_coincide_at_zero_distance():
    z = 1.0 + 1e-8j
    assert kernel_closed(KernelKind.B, 0, z, P3) == kernel_closed(KernelKind.C, 0, z, P3)
    # finite sums: same terms in different order; near-resonant terms make the
    # comparison meaningful only relative to the sum's magnitude
    b0 = kernel_finite(KernelKind.B, 0, z, P3, 1024)
    c0 = kernel_finite(KernelKind.C, 0, z, P3, 1024)
    assert abs(b0 - c0) < 1e-9 * abs(b0)
    # off the band at real z both are real, hence conjugates of each other
    b0r = kernel_closed(KernelKind.B, 0, 2.7 + 0.0j, P3)
    c0r = kernel_closed(KernelKind.C, 0, 2.7 + 0.0j, P3)
    assert c0r == pytest.approx(np.conj(b0r), abs=1e-15)


def test_a_kernel_even_in_distance():
    z = 1.3 + 1e-6j
    for n in (1, 2, 5):
        assert kernel_closed(KernelKind.A, n, z, P3) == kernel_closed(KernelKind.A, -n, z, P3)


def test_b_at_negative_distance_equals_c():
    # k -> -k symmetry of the momentum sums, honored by the |n +/- 1| exponents
    z = 1.1 + 1e-7j
    for n in (1, 2, 4):
        assert kernel_closed(KernelKind.B, -n, z, P3) == pytest.approx(
            kernel_closed(KernelKind.C, n, z, P3), rel=1e-14)
        fb = kernel_finite(KernelKind.B, -n, z, P3, 512)
        fc = kernel_finite(KernelKind.C, n, z, P3, 512)
        assert fb == pytest.approx(fc, rel=1e-12)


def test_imaginary_part_sign_gives_positive_decay():
    for D in np.linspace(0.7, 1.9, 25):
        a0 = kernel_closed(KernelKind.A, 0, complex(D, 1e-8), P3)
        assert a0.imag < 0


def test_finite_sum_singular_guard():
    p = SSHParams(xi=1.0, delta=0.3)
    k1 = 2 * np.pi * 1 / 8
    z = complex(float(dispersion(k1, p)), 0.0)
    with pytest.raises(SingularSumError):
        kernel_finite(KernelKind.A, 0, z, p, 8)


def test_sigma_reciprocity_and_aaaa_bbbb_degeneracy():
    z = 1.0 + 1e-8j
    for label in enumerate_all():
        c = parse_config(label, Geometry(d=2), g=0.05)
        S = sigma(c, z, P3)
        assert abs(S[0, 1] - S[1, 0]) <= 1e-14 * abs(S[0, 1])
    Sa = sigma(parse_config("AAAA", Geometry(d=1), g=0.05), z, P3)
    Sb = sigma(parse_config("BBBB", Geometry(d=1), g=0.05), z, P3)
    assert np.max(np.abs(Sa - Sb)) < 1e-12 * np.max(np.abs(Sa))
    assert abs(Sa[0, 0] - Sa[1, 1]) < 1e-12 * abs(Sa[0, 0])


def test_sigma_mirror_pair_relations():
    z = 1.0 + 1e-8j
    for d in (1, 2):
        a = sigma(parse_config("AAAB", Geometry(d=d), g=0.05), z, P3)
        b = sigma(parse_config("ABBB", Geometry(d=d), g=0.05), z, P3)
        assert a[0, 0] == pytest.approx(b[1, 1], rel=1e-12)
        assert a[1, 1] == pytest.approx(b[0, 0], rel=1e-12)
        assert a[0, 1] == pytest.approx(b[0, 1], rel=1e-12)


def test_sigma_translation_invariance():
    z = 1.0 + 1e-8j
    base = sigma(parse_config("ABBA", Geometry(d=2), g=0.05), z, P3)
    shifted = sigma(parse_config("ABBA", Geometry(d=2, n1=5), g=0.05), z, P3)
    assert np.max(np.abs(base - shifted)) == 0.0


def test_sigma_finite_L_option_agrees():
    z = complex(1.0, 5e-3)
    c = parse_config("ABBA", Geometry(d=1), g=0.05)
    S_closed = sigma(c, z, P3)
    S_finite = sigma(c, z, P3, L=4096)
    assert np.max(np.abs(S_closed - S_finite)) / np.max(np.abs(S_closed)) < 1e-3


def test_rates_quadruple_when_g_doubles():
    se1 = rates_and_shifts(parse_config("ABAB", Geometry(d=1), g=0.02), 1.0, P3)
    se2 = rates_and_shifts(parse_config("ABAB", Geometry(d=1), g=0.04), 1.0, P3)
    for name in ("J11", "J22", "J12", "G11", "G22", "G12"):
        assert getattr(se2, name) == pytest.approx(4 * getattr(se1, name), rel=1e-12)


def test_aaaa_rates_blind_to_dimerization_sign():
    for d in (1, 2):
        sp = rates_and_shifts(parse_config("AAAA", Geometry(d=d), g=0.05), 1.0,
                              SSHParams(xi=1.0, delta=0.3))
        sm = rates_and_shifts(parse_config("AAAA", Geometry(d=d), g=0.05), 1.0,
                              SSHParams(xi=1.0, delta=-0.3))
        for name in ("J11", "J22", "J12", "G11", "G22", "G12"):
            assert getattr(sp, name) == getattr(sm, name)


def test_dissipation_matrix_psd_all_configs():
    for label in enumerate_all():
        for d in (1, 2):
            for delta in (0.3, -0.3):
                p = SSHParams(xi=1.0, delta=delta)
                se = rates_and_shifts(parse_config(label, Geometry(d=d), g=0.05), 1.0, p)
                scaled = se.scaled(1.0, 0.05)
                assert scaled.G11 >= -1e-8
                assert scaled.G22 >= -1e-8
                assert abs(scaled.G12) <= np.sqrt(scaled.G11 * scaled.G22) + 1e-8
                assert np.linalg.eigvalsh(scaled.dissipation_matrix())[0] >= -1e-8


def test_eps_robustness():
    c = parse_config("AABA", Geometry(d=1), g=0.05)
    a = rates_and_shifts(c, 1.0, P3, eps=1e-8)
    b = rates_and_shifts(c, 1.0, P3, eps=5e-9)
    for name in ("J11", "J22", "J12", "G11", "G22", "G12"):
        va, vb = getattr(a, name), getattr(b, name)
        assert abs(va - vb) / max(abs(va), 1e-30) < 1e-6


def test_mirror_swaps_atom_labels_in_rates():
    for label in enumerate_all():
        c = parse_config(label, Geometry(d=2), g=0.05)
        a = rates_and_shifts(c, 1.0, P3)
        b = rates_and_shifts(mirror(c), 1.0, P3)
        scale = max(abs(a.J11), abs(a.J22), abs(a.G11), 1e-30)
        assert abs(a.J11 - b.J22) / scale < 1e-10
        assert abs(a.J22 - b.J11) / scale < 1e-10
        assert abs(a.G11 - b.G22) / scale < 1e-10
        assert abs(a.G22 - b.G11) / scale < 1e-10
        assert abs(a.J12 - b.J12) / scale < 1e-10
        assert abs(a.G12 - b.G12) / scale < 1e-10


def test_out_of_band_error_and_edge_warning():
    c = parse_config("AABB", Geometry(d=1), g=0.05)
    with pytest.raises(OutOfBandError):
        rates_and_shifts(c, 2.5, P3)
    with pytest.raises(OutOfBandError):
        rates_and_shifts(c, 0.3, P3)
    with pytest.warns(NearBandEdgeWarning):
        rates_and_shifts(c, 1.95, P3)
    with pytest.warns(NearBandEdgeWarning):
        rates_and_shifts(c, 0.7, P3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rates_and_shifts(c, 1.0, P3)


def test_scaled_values_are_g_independent():
    a = rates_and_shifts(parse_config("ABBA", Geometry(d=2), g=0.02), 1.0, P3).scaled(1.0, 0.02)
    b = rates_and_shifts(parse_config("ABBA", Geometry(d=2), g=0.05), 1.0, P3).scaled(1.0, 0.05)
    for name in ("J11", "J22", "J12", "G11", "G22", "G12"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-12)
