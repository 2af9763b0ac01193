import cmath

import numpy as np
import pytest

from premodular import families
from premodular.fusion import full_subcategory
from premodular.modular import (
    PremodularityError,
    Twist,
    centralizer,
    check_minimal_extension,
    is_modular,
    muger_center,
    premodular_from_twists,
    sprime_from_balancing,
    verify_premodular,
    verlinde_multiplicities,
)


class TestTwist:
    def test_rational_powers_are_exact(self):
        t = Twist.from_turns(1, 3)
        assert t.power(-2) == pytest.approx(cmath.exp(2j * cmath.pi / 3), abs=1e-15)
        assert (t * t * t).value == pytest.approx(1.0, abs=1e-15)
        assert t.conjugate().value == pytest.approx(t.value.conjugate(), abs=1e-15)

    def test_non_unit_modulus_rejected(self):
        with pytest.raises(PremodularityError):
            Twist.from_complex(2.0)


class TestBalancing:
    def test_unit_row_is_dimension_vector(self, suite):
        for name, p in suite:
            assert np.abs(p.sprime[p.unit] - p.dims).max() < 1e-12, name

    def test_fibonacci_hopf_value(self):
        # oracle: e^{-8 pi i/5} (1 + phi e^{4 pi i/5})
        phi = (1 + np.sqrt(5)) / 2
        expect = cmath.exp(-8j * cmath.pi / 5) * (1 + phi * cmath.exp(4j * cmath.pi / 5))
        p = families.fibonacci()
        assert abs(p.sprime[1, 1] - expect) < 1e-12
        assert abs(p.sprime[1, 1] - (-1.0)) < 1e-12

    def test_semion_hopf_value(self):
        p = families.semion()
        assert abs(p.sprime[1, 1] - (1 / 1j**2)) < 1e-12

    @pytest.mark.parametrize("k", range(1, 7))
    def test_su2_matches_sine_formula(self, k):
        p = families.su2(k)
        oracle = np.array(
            [
                [np.sin((a + 1) * (b + 1) * np.pi / (k + 2)) / np.sin(np.pi / (k + 2))
                 for b in range(k + 1)]
                for a in range(k + 1)
            ]
        )
        assert np.abs(p.sprime - oracle).max() < 1e-11

    def test_unrealisable_twists_rejected(self):
        fib = families.fibonacci().fusion
        with pytest.raises(PremodularityError, match="row multiplicativity"):
            sprime_from_balancing(fib, np.array([1.0, (1 + np.sqrt(5)) / 2]), [Twist.one(), Twist.from_turns(1, 4)])
        z2 = families.semion().fusion
        with pytest.raises(PremodularityError):
            sprime_from_balancing(z2, np.ones(2), [Twist.one(), Twist.from_turns(1, 6)])

    def test_explicit_sprime_cross_validated(self):
        p = families.su2(2)
        ok = premodular_from_twists(p.fusion, p.theta, dims=p.dims, sprime=p.sprime)
        assert np.abs(ok.sprime - p.sprime).max() == 0
        bad = p.sprime.copy()
        bad[1, 1] += 0.3
        with pytest.raises(PremodularityError, match="deviates"):
            premodular_from_twists(p.fusion, p.theta, dims=p.dims, sprime=bad)


class TestVerifyPremodular:
    def test_su2_3_passes(self):
        report = verify_premodular(families.su2(3))
        assert report.passed
        assert max(c.residual for c in report.checks) < 1e-9

    def test_pointed_z3_quadratic_form_passes(self):
        assert verify_premodular(families.pointed_cyclic(3, 2)).passed

    def test_bad_twist_fails_with_residual(self):
        # theta_tau = i on the Fibonacci ring is not realisable
        fib = families.fibonacci().fusion
        d = np.array([1.0, (1 + np.sqrt(5)) / 2])
        sp = sprime_from_balancing(fib, d, [Twist.one(), Twist.from_turns(1, 4)], validate=False)
        from premodular.modular import PremodularData

        p = PremodularData(fusion=fib, dims=d, theta=(Twist.one(), Twist.from_turns(1, 4)), sprime=sp)
        report = verify_premodular(p)
        assert not report.passed
        bad = report["sprime:row_multiplicative"]
        assert not bad.passed and bad.residual > 1e-3


class TestIsModular:
    def test_su2_4_relations(self, su2_4):
        r = is_modular(su2_4)
        assert r.modular and r.residual < 1e-9
        n = su2_4.rank
        assert np.abs(r.s @ r.s.conj().T - np.eye(n)).max() < 1e-9
        st = r.s @ r.t
        assert np.abs(st @ st @ st - r.c).max() < 1e-9

    def test_integer_spin_part_not_modular(self, even_su2_4):
        r = is_modular(even_su2_4)
        assert not r.modular
        assert r.kernel is not None
        # rank 2: rows of the unit and the simple current coincide
        sv = np.linalg.svd(even_su2_4.sprime, compute_uv=False)
        assert sv[2] < 1e-9 * sv[0] and sv[1] > 1e-3

    def test_trivial_category(self):
        r = is_modular(families.trivial())
        assert r.modular
        assert np.allclose(r.s, [[1.0]]) and np.allclose(np.abs(r.t), [[1.0]])

    def test_modular_builtins_relations(self, suite):
        for name, p in suite:
            r = is_modular(p)
            if r.modular:
                assert r.residual < 1e-9, name


class TestVerlinde:
    def test_reconstruction_matches_stored_tensor(self, suite):
        for name, p in suite:
            r = is_modular(p)
            if not r.modular:
                continue
            nver = verlinde_multiplicities(r.s, p.unit)
            assert np.abs(nver - p.fusion.tensor).max() < 1e-6, name


class TestGaussSums:
    def test_identity_on_modular_builtins(self, suite):
        for name, p in suite:
            if not p.sprime_invertible():
                continue
            g = p.gauss_sums()
            assert abs(g.delta_plus * g.delta_minus - g.dim) < 1e-9 * g.dim, name
            assert abs(abs(g.delta_plus) - g.total) < 1e-9 * g.total, name

    def test_degenerate_data_skips_gauss(self, even_su2_4):
        report = verify_premodular(even_su2_4)
        assert report.passed
        assert report["gauss:product"].witness == "skipped: S' singular"


class TestMugerCenter:
    def test_su2_4_center_trivial(self, su2_4):
        assert muger_center(su2_4).degenerate == (0,)

    def test_integer_spins_center(self, even_su2_4):
        c = muger_center(even_su2_4)
        # restricted labels (0, 2) are the source labels 0 and 4
        assert c.degenerate == (0, 2)
        assert c.is_even and c.is_pointed
        assert c.group_table.tolist() == [[0, 1], [1, 0]]

    def test_semion_center_trivial(self):
        assert muger_center(families.semion()).degenerate == (0,)


class TestCentralizer:
    def test_whole_category_gives_center(self, su2_4):
        whole = full_subcategory(su2_4.fusion, range(su2_4.rank))
        assert centralizer(su2_4, whole) == muger_center(su2_4).degenerate

    def test_unit_gives_everything(self, su2_4):
        assert centralizer(su2_4, [0]) == tuple(range(su2_4.rank))

    def test_integer_spins(self, su2_4):
        cent = centralizer(su2_4, [0, 2, 4])
        assert cent == (0, 4)
        assert float(np.sum(su2_4.dims[list(cent)] ** 2)) == pytest.approx(2.0, abs=1e-9)

    def test_antitone(self, su2_4):
        small = set(centralizer(su2_4, [0, 2, 4]))
        big = set(centralizer(su2_4, [0, 4]))
        assert small <= big

    def test_product_diagonal(self, su2_4):
        prod = families.product(su2_4, families.conjugate(su2_4))
        cent = centralizer(prod, [0, 4 * 5 + 4])
        assert len(cent) == 13
        assert float(np.sum(prod.dims[list(cent)] ** 2)) == pytest.approx(72.0, abs=1e-8)

    def test_product_of_modular_with_conjugate_has_trivial_center(self):
        for name in ("su2:3", "ising"):
            p = families.builtin(name)
            prod = families.product(p, families.conjugate(p))
            assert muger_center(prod).degenerate == (prod.unit,)


class TestMinimalExtension:
    def test_su2_4_integer_spins_minimal(self, su2_4):
        r = check_minimal_extension(su2_4, [0, 2, 4])
        assert r.minimal and r.dim_identity_ok
        assert r.dim_total == pytest.approx(12.0, abs=1e-9)
        assert r.dim_sub == pytest.approx(6.0, abs=1e-9)
        assert r.dim_center == pytest.approx(2.0, abs=1e-9)
        assert r.center_even and r.center_pointed

    def test_whole_category_minimal_with_trivial_center(self, su2_4):
        r = check_minimal_extension(su2_4, range(5))
        assert r.passed and r.degenerate_labels == (0,)

    def test_su2_2_even_part_fails_evenness(self):
        p = families.su2(2)
        r = check_minimal_extension(p, [0, 2])
        # the set equality and dimension identity hold, but the transparent
        # part carries twist -1, so the condensation pipeline must reject it
        assert set(r.centralizer_labels) == {0, 2} == set(r.degenerate_labels)
        assert r.dim_identity_ok
        assert not r.center_even
        assert abs(p.theta_values[2] - (-1.0)) < 1e-12


class TestBuiltins:
    def test_su2_1_twist(self):
        p = families.su2(1)
        assert p.rank == 2
        assert np.allclose(p.dims, [1.0, 1.0])
        assert abs(p.theta_values[1] - 1j) < 1e-12

    def test_su2_4_twists(self, su2_4):
        assert abs(su2_4.theta_values[4] - 1.0) < 1e-12
        assert abs(su2_4.theta_values[2] - cmath.exp(2j * cmath.pi / 3)) < 1e-12

    def test_pointed_2_1_is_semion(self):
        p = families.pointed_cyclic(2, 1)
        assert abs(p.theta_values[1] - 1j) < 1e-12
        assert abs(p.sprime[1, 1] + 1.0) < 1e-12

    def test_conjugate_su2_3_still_verifies(self):
        p = families.builtin("conj(su2:3)")
        assert verify_premodular(p).passed
        q = families.su2(3)
        assert np.abs(p.sprime - q.sprime.conj()).max() < 1e-12
        assert all(abs(a.value - b.value.conjugate()) < 1e-12 for a, b in zip(p.theta, q.theta))

    def test_inadmissible_quadratic_exponent(self):
        with pytest.raises(ValueError, match="inadmissible"):
            families.pointed_cyclic(3, 1)

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            families.su2(0)
        with pytest.raises(ValueError):
            families.builtin("su2")
        with pytest.raises(ValueError):
            families.builtin("prod(su2:2)")


class TestDegenerateRows:
    def test_integer_spin_rows_of_transparent_pair_coincide(self, even_su2_4):
        # the unit row and the simple-current row of S' are equal, so the
        # restricted matrix has rank 2
        assert np.abs(even_su2_4.sprime[0] - even_su2_4.sprime[2]).max() < 1e-12
