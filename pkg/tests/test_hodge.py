"""DHR numbers, volume polynomials, Lorentzian and Kähler verification,
characteristic polynomials, star factorization."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from chowmat import ChowElement, sample_ample, uniform
from chowmat._linalg import rank_exact_fraction, signature
from chowmat.chow import normal_form, ring_for
from chowmat.errors import (
    EmptySetMember,
    LoopyMatroid,
    NotAProperFlat,
    NotDegreeOne,
    WrongArity,
    WrongGrade,
)
from chowmat.hodge import (
    VolumePolynomial,
    chain_terminates_loopless,
    char_poly,
    dhr_check,
    dhr_degree,
    dhr_triple_report,
    hr_form,
    kahler_check,
    log_concavity_report,
    lorentzian_check,
    mconvex_support,
    mu_via_degrees,
    sample_nabla_cone,
    star_factorization_check,
    truncation_hessian,
    ultra_log_concave,
    volume_polynomial,
)

from conftest import fano, k4, random_truncation_corpus, small_corpus

U33 = uniform(3, 3)
U34 = uniform(3, 4)
E3 = 0b111
E4 = 0b1111


# -- DHR -----------------------------------------------------------------------


def test_dhr_check_examples():
    assert dhr_check(U33, [E3, E3])
    assert not dhr_check(U33, [0b011, 0b011])
    assert dhr_check(U34, [0b0011])
    with pytest.raises(EmptySetMember):
        dhr_check(U33, [0, E3])


def test_dhr_degree_examples():
    assert dhr_degree(U33, [0b011, 0b101]) == 1
    assert dhr_degree(U33, [0b011, 0b011]) == 0
    with pytest.raises(WrongArity):
        dhr_degree(U33, [E3])


def test_dhr_equals_chain_termination():
    flats = [f for f in U34.lattice().flats if U34.rank(f) >= 2]
    for multiset in itertools.combinations_with_replacement(flats, 2):
        assert dhr_degree(U34, list(multiset)) == (
            1 if chain_terminates_loopless(U34, list(multiset)) else 0
        )


def test_dhr_triple_report_small():
    for m in [U34, k4(), fano(), random_truncation_corpus()[5]]:
        report = dhr_triple_report(m)
        assert report.ok
        assert report.live_leaves + report.dead_counted == report.total_multisets
    assert dhr_triple_report(U33).boundary_checked > 0


def test_triple_scan_batched_matches_plain_reference():
    """The numpy-batched scanner agrees with the straightforward recursion."""
    from chowmat.hodge import _triple_scan_batched, _triple_scan_plain

    for m in [U33, U34, uniform(4, 5), k4(), random_truncation_corpus()[2]]:
        fast = _triple_scan_batched(m)
        slow = _triple_scan_plain(m)
        assert fast.ok and slow.ok
        assert fast.total_multisets == slow.total_multisets
        assert fast.live_leaves == slow.live_leaves
        assert fast.dead_counted == slow.dead_counted


# -- volume polynomial ------------------------------------------------------------


def test_volume_u33_pinned():
    vp = volume_polynomial(U33)
    a, b, c = 0b011, 0b101, 0b110
    assert vp.terms == {
        (E3, E3): 1,
        (a, E3): 2,
        (b, E3): 2,
        (c, E3): 2,
        (a, b): 2,
        (a, c): 2,
        (b, c): 2,
    }


def test_volume_u23():
    assert volume_polynomial(uniform(2, 3)).terms == {(E3,): 1}


def test_volume_rank_one_constant():
    assert volume_polynomial(uniform(1, 3)).terms == {(): 1}


def test_volume_rejects_loops():
    with pytest.raises(LoopyMatroid):
        volume_polynomial(uniform(0, 2))


def test_volume_coefficient_is_multinomial():
    vp = volume_polynomial(uniform(4, 4))
    for mono, coeff in vp.terms.items():
        counts = {}
        for f in mono:
            counts[f] = counts.get(f, 0) + 1
        expected = 1
        rem = len(mono)
        import math

        for c in counts.values():
            expected *= math.comb(rem, c)
            rem -= c
        assert coeff == expected


def test_volume_total_equals_ordered_tuples():
    """Sum of multinomials equals the number of ordered DHR tuples."""
    m = U34
    vp = volume_polynomial(m)
    flats = [f for f in m.lattice().flats if m.rank(f) >= 2]
    ordered = sum(
        1
        for tup in itertools.product(flats, repeat=2)
        if dhr_check(m, list(tup))
    )
    assert sum(vp.terms.values()) == ordered


def test_mconvex_small():
    assert mconvex_support(volume_polynomial(U33))
    assert mconvex_support(volume_polynomial(U34))
    assert mconvex_support(volume_polynomial(uniform(4, 5)))


def test_mconvex_detects_hole():
    vp = volume_polynomial(U33)
    broken = dict(vp.terms)
    del broken[(0b011, E3)]
    assert not mconvex_support(VolumePolynomial(U33, 2, broken))


def test_mconvex_two_point_fixture():
    fixture = VolumePolynomial(U33, 2, {(E3, E3): 1, (0b011, 0b101): 1})
    assert not mconvex_support(fixture)


def test_bivariate_ultra_log_concave():
    for name, m in small_corpus(5):
        if not m.is_loopless():
            continue
        vp = volume_polynomial(m)
        full = m.full_mask
        for f in m.lattice().flats:
            if m.rank(f) < 2 or f == full:
                continue
            seq = vp.restrict_to_pair(f, full)
            assert ultra_log_concave(seq), (name, f, seq)


def test_ultra_log_concave_rejects():
    assert not ultra_log_concave([1, 0, 1])  # internal zero
    assert not ultra_log_concave([1, 1, 5])


# -- characteristic polynomial -----------------------------------------------------


def test_char_poly_values():
    cp = char_poly(uniform(2, 3))
    assert cp.reduced_coeffs == [1, -2]
    assert cp.mu == [1, 2]
    cp34 = char_poly(U34)
    assert cp34.reduced_coeffs == [1, -3, 3]
    assert cp34.mu == [1, 3, 3]


def test_char_poly_leading_coefficient():
    for name, m in small_corpus():
        if m.is_loopless():
            assert char_poly(m).mu[0] == 1, name


def test_mu_via_degrees_agrees():
    for m in [uniform(2, 3), U34, k4(), random_truncation_corpus()[7]]:
        assert mu_via_degrees(m) == char_poly(m).mu


def test_log_concavity_report():
    assert log_concavity_report([1, 3, 3])
    assert log_concavity_report([1, 2])
    assert not log_concavity_report([1, 1, 5])


# -- Lorentzian ---------------------------------------------------------------------


def test_u33_hessian_pinned():
    gens, hess = truncation_hessian(U33)
    assert gens == [0b011, 0b101, 0b110, E3]
    expected = 2 * np.array(
        [[0, 1, 1, 1], [1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 1]]
    )
    assert (hess == expected).all()
    sig = signature([[Fraction(int(v)) for v in row] for row in hess])
    assert sig == (1, 3, 0)


def test_lorentzian_small():
    for m in [U33, U34, k4()]:
        report = lorentzian_check(m)
        assert report.ok
        assert report.mconvex_mode == "exhaustive"
    # K4 has rank 3, so there is exactly one Hessian to check.
    assert lorentzian_check(k4()).hessians_checked == 1


def test_lorentzian_crosscheck_runs():
    report = lorentzian_check(uniform(4, 5))
    assert report.ok
    assert report.crosschecked_entries > 0


# -- Hodge-Riemann forms --------------------------------------------------------------


def test_hr_form_degree_zero_positive():
    amp = sample_ample(U34)
    rep = hr_form(U34, amp.x_form, 0)
    assert len(rep.matrix) == 1
    assert rep.matrix[0][0] > 0
    assert rep.signature == (1, 0, 0)


def test_hr_form_rank3_is_pairing():
    from chowmat import poincare_pairing

    amp = sample_ample(U33)
    rep = hr_form(U33, amp.x_form, 1)
    assert rep.matrix == poincare_pairing(U33, 1)
    assert rep.signature == (1, 3, 0)


def test_hr_form_zero_divisor():
    rep = hr_form(U34, ChowElement.zero("x"), 0)
    assert rep.matrix == [[Fraction(0)]]
    assert rep.signature == (0, 0, 1)


def test_hr_form_rejects_wrong_degree():
    with pytest.raises(WrongGrade):
        hr_form(uniform(2, 3), sample_ample(uniform(2, 3)).x_form, 1)
    with pytest.raises(NotDegreeOne):
        hr_form(U34, ChowElement.variable("h", E4, 2), 0)


def test_hr_form_rational_divisor():
    amp = sample_ample(U34)
    scaled = Fraction(1, 3) * amp.x_form
    rep = hr_form(U34, scaled, 1)
    assert rep.signature == (1, 6, 0)


def test_kahler_check_sample_ample_u34():
    rep = kahler_check(U34, sample_ample(U34).x_form)
    assert rep.ok
    assert rep.q1_signature == (1, 6, 0)
    assert rep.top_power > 0


def test_kahler_check_k4_sum_of_generators():
    m = k4()
    flats = [f for f in m.lattice().flats if m.rank(f) >= 2]
    ell = ChowElement("h", {((f, 1),): Fraction(1) for f in flats})
    rep = kahler_check(m, ell)
    assert rep.ok


def test_groebner_degree_agrees_on_multisets_with_atoms():
    """Multisets containing rank-1 flats vanish in all routes (h_a = 0)."""
    for m in [U34, k4()]:
        ring = ring_for(m)
        atoms = m.lattice().by_rank[1]
        others = [f for f in m.lattice().flats if m.rank(f) >= 2]
        for a in atoms[:2]:
            for g in others:
                multiset = [a, g]
                assert dhr_degree(m, multiset) == 0
                assert ring.h_monomial_degree(multiset) == 0
                assert not chain_terminates_loopless(m, multiset)


def test_kahler_check_rejects_boundary_nef_class():
    """A single simplicial generator is nef but not ample; HR0 must fail."""
    ell = ChowElement.variable("h", 0b0011)
    rep = kahler_check(U34, ell)
    assert rep.top_power == 0
    assert not rep.ok


def test_kahler_check_rank2_vacuous():
    m = uniform(2, 4)
    rep = kahler_check(m, sample_ample(m).x_form)
    assert rep.ok and rep.degree_one_vacuous
    assert rep.q1_signature is None


def test_kahler_seeded_samples():
    m = U34
    for ell in sample_nabla_cone(m, 5, seed=1):
        rep = kahler_check(m, ell)
        assert rep.ok
        assert rep.q1_signature == (1, 6, 0)


def test_sample_nabla_cone_deterministic():
    a = sample_nabla_cone(U34, 3, seed=7)
    b = sample_nabla_cone(U34, 3, seed=7)
    assert a == b


def test_q1_signature_invariant_under_basis_change():
    """Recompute Q^1 in a basis extracted from the x-variables."""
    for m in [U34, k4()]:
        ring = ring_for(m)
        ell = sample_ample(m).x_form
        rep = hr_form(m, ell, 1)
        n1 = len(ring.nested[1])
        # Coordinates of each x_F in the nested h-basis of degree 1.
        cols = []
        for f in ring.flats_nonempty:
            if f == m.full_mask:
                continue
            nf = normal_form(m, ChowElement.variable("x", f))
            cols.append([nf.terms.get(mono, Fraction(0)) for mono in ring.nested[1]])
        # Greedily extract a basis among the columns.
        chosen: list[list[Fraction]] = []
        for col in cols:
            trial = chosen + [col]
            if rank_exact_fraction(trial) == len(trial):
                chosen.append(col)
            if len(chosen) == n1:
                break
        assert len(chosen) == n1
        b = [[chosen[j][i] for j in range(n1)] for i in range(n1)]
        q = rep.matrix
        q_new = [
            [
                sum(
                    b[r][i] * q[r][s] * b[s][j]
                    for r in range(n1)
                    for s in range(n1)
                )
                for j in range(n1)
            ]
            for i in range(n1)
        ]
        assert signature(q_new) == rep.signature


# -- star factorization -----------------------------------------------------------------


def test_star_factorization_u34():
    f = 0b0011
    rep = star_factorization_check(U34, f)
    assert rep.ok
    assert rep.quotient_dims == rep.tensor_dims == [1, 1]
    assert rep.degree_probe == 1
    assert rep.tensor_degree_probe == 1


def test_star_factorization_rank_one_flat():
    m = U34
    rep = star_factorization_check(m, 0b0001)
    # M|F is trivial, so the quotient dims match those of A(M/F).
    from chowmat import contract, hilbert_function

    quotient = contract(m, 0b0001).matroid
    assert rep.quotient_dims == hilbert_function(quotient)
    assert rep.ok


def test_star_factorization_all_proper_flats_small():
    for name, m in small_corpus(5):
        if not m.is_loopless() or m.rank_full < 2:
            continue
        for f in m.lattice().flats:
            if f in (0, m.full_mask):
                continue
            rep = star_factorization_check(m, f)
            assert rep.ok, (name, f)


def test_star_factorization_k4_triangle():
    m = k4()
    triangle = m.closure(0b000011)  # edges 01, 02 close up with 12
    rep = star_factorization_check(m, triangle)
    assert rep.ok
    assert rep.quotient_dims == rep.tensor_dims


def test_star_factorization_errors():
    with pytest.raises(NotAProperFlat):
        star_factorization_check(U34, 0)
    with pytest.raises(NotAProperFlat):
        star_factorization_check(U34, E4)
    with pytest.raises(NotAProperFlat):
        star_factorization_check(uniform(2, 4), 0b0011)


# -- signatures ------------------------------------------------------------------------


def test_signature_basics():
    assert signature([[Fraction(2)]]) == (1, 0, 0)
    assert signature([[Fraction(0)]]) == (0, 0, 1)
    hyper = [[Fraction(0), Fraction(1)], [Fraction(1), Fraction(0)]]
    assert signature(hyper) == (1, 1, 0)


def test_signature_matches_numpy_on_random_integer_matrices():
    rng = np.random.default_rng(0)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        a = rng.integers(-4, 5, size=(n, n))
        sym = a + a.T
        sig = signature([[Fraction(int(v)) for v in row] for row in sym])
        eig = np.linalg.eigvalsh(sym.astype(float))
        pos = int((eig > 1e-9).sum())
        neg = int((eig < -1e-9).sum())
        zero = n - pos - neg
        assert sig == (pos, neg, zero)
