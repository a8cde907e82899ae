import pytest
from hypothesis import given, settings, strategies as st

from tamexp import ff, synth
from tamexp.errors import (BadExponent, BudgetExceeded,
                           ClashingMinimalPolynomials, NotInvertible,
                           ValueOutsideSubfield)
from tamexp.synth import (GammaElem, gamma_comm, gamma_identity, gamma_inv,
                          gamma_op, gamma_structure, interpolate, p_elem,
                          verify_gamma_commutator_formula, y_elem)
from tamexp.tame import GroupParams, Transvection, Word, apply_word

from conftest import all_points


def test_gamma_op_examples():
    c, p = 2, 5
    ident = gamma_identity(c, p)
    g = GammaElem(c, p, (1, 2, 3), 4)
    assert gamma_op(ident, g) == g and gamma_op(g, ident) == g
    assert gamma_op(g, gamma_inv(g)) == ident
    # [P_0(1), y(1)] in Gamma_{2,F_5} is the polynomial 2x + 1
    comm = gamma_comm(p_elem(c, p, 0, 1), y_elem(c, p, 1))
    assert comm == GammaElem(c, p, (1, 2, 0), 0)
    # the translation subgroup is abelian: y(r) y(s) = y(r+s)
    assert gamma_op(y_elem(c, p, 2), y_elem(c, p, 4)) == y_elem(c, p, 1)


@pytest.mark.parametrize("c,p", [(c, p) for c in range(4) for p in (5, 7)])
def test_commutator_formula_exhaustive(c, p):
    assert verify_gamma_commutator_formula(c, p)


def test_gamma_structure_values():
    r = gamma_structure(2, 5)
    assert (r.order, r.nilpotency_class, r.center_order) == (625, 3, 5)
    assert r.center_is_Xc and r.generated_by_X0_Y
    r = gamma_structure(0, 3)
    assert (r.order, r.nilpotency_class) == (9, 1)
    r = gamma_structure(3, 5)
    assert r.nilpotency_class == 4
    with pytest.raises(BudgetExceeded):
        gamma_structure(6, 31)


def test_embedding_is_homomorphism():
    params = GroupParams(5, 3, (1, 1, 2))
    emb = synth.embed_gamma(1, 2, 3, 2, 1, params)
    F5 = ff.make_field(5, 1)
    assert synth.check_embedding_homomorphism(emb, 2, 5, F5, 3, pairs=60, seed=3)


def test_embedding_images():
    # y(s) image acts as a_2 += -s a_3; P_0(r) image is the tau letter
    params = GroupParams(5, 3, (1, 1, 2))
    emb = synth.embed_gamma(1, 2, 3, 1, 1, params)
    F5 = ff.make_field(5, 1)
    w = emb.elem_word(y_elem(1, 5, 2))
    for pt in all_points(5, 3):
        assert apply_word(w, pt, F5) == (pt[0], F5.sub(pt[1], F5.mul(2, pt[2])), pt[2])
    w = emb.elem_word(p_elem(1, 5, 0, 3))
    assert w == Word.of(Transvection(1, 2, 1, 3))


def test_embedded_center_is_central():
    # the image of P_c(r) commutes with the images of both letter families
    params = GroupParams(5, 3, (1, 1, 2))
    emb = synth.embed_gamma(1, 2, 3, 2, 1, params)
    F5 = ff.make_field(5, 1)
    center = emb.elem_word(p_elem(2, 5, 2, 3))
    for other in (emb.elem_word(p_elem(2, 5, 0, 1)),
                  emb.elem_word(y_elem(2, 5, 1))):
        uv = center + other
        vu = other + center
        for pt in all_points(5, 3):
            assert apply_word(uv, pt, F5) == apply_word(vu, pt, F5)


def test_embed_gamma_requires_invertibility():
    params = GroupParams(3, 3, (1, 1, 2))
    with pytest.raises(NotInvertible):
        synth.embed_gamma(1, 2, 3, 3, 1, params)


def test_synth_single_letter():
    params = GroupParams(5, 3, (1, 1, 2))
    cert = synth.synth_transvection(1, 2, 1, 3, params)
    assert cert.word == Word.of(Transvection(1, 2, 1, 3))
    assert cert.verified and cert.mode == "exhaustive"


def test_synth_cubic_target():
    params = GroupParams(5, 3, (1, 1, 2))
    cert = synth.synth_transvection(1, 2, 3, 1, params)
    assert cert.verified
    # independent check on all 125 points of F_5^3
    F5 = ff.make_field(5, 1)
    for pt in all_points(5, 3):
        want = (F5.add(pt[0], F5.pow(pt[1], 3)),) + pt[1:]
        assert apply_word(cert.word, pt, F5) == want


def test_synth_bad_exponent_and_preconditions():
    params = GroupParams(23, 3, (2, 2, 2))
    with pytest.raises(BadExponent):
        synth.synth_transvection(1, 2, 3, 1, params)  # 3 != 2 mod 7
    with pytest.raises(BadExponent):
        synth.synth_transvection(1, 2, 1, 1, params)  # below t_ij
    with pytest.raises(NotInvertible):
        synth.synth_transvection(1, 2, 4, 1, GroupParams(2, 3, (2, 1, 1)))
    with pytest.raises(BadExponent):
        synth.synth_transvection(1, 2, 2, 1, GroupParams(5, 3, (1, 1, 1)))


def test_synth_step4_target_2_2_2():
    params = GroupParams(23, 3, (2, 2, 2))
    cert = synth.synth_transvection(1, 2, 9, 1, params)  # C_1 = e_1 + (E-1)
    assert cert.verified


def test_synth_poly_transvection():
    params = GroupParams(5, 3, (1, 1, 2))
    assert synth.synth_poly_transvection(1, 2, (), params).word == Word()
    cert = synth.synth_poly_transvection(1, 2, (3,), params)
    assert cert.word == synth.synth_transvection(1, 2, 1, 3, params).word
    cert = synth.synth_poly_transvection(1, 2, (1, 1), params)
    assert cert.verified
    F5 = ff.make_field(5, 1)
    for pt in all_points(5, 3):
        want = (F5.add(pt[0], F5.mul(pt[1], F5.add(1, pt[1]))),) + pt[1:]
        assert apply_word(cert.word, pt, F5) == want


def test_synth_commuting_targets():
    # words for the same (i, j) and different t commute as permutations
    params = GroupParams(5, 3, (1, 1, 2))
    F25 = ff.make_field(5, 2)
    w2 = synth.synth_transvection(1, 2, 2, 1, params).word
    w3 = synth.synth_transvection(1, 2, 3, 2, params).word
    import random
    rng = random.Random(0)
    for _ in range(200):
        pt = tuple(rng.randrange(25) for _ in range(3))
        assert apply_word(w2 + w3, pt, F25) == apply_word(w3 + w2, pt, F25)


def test_elementary_abelian_witness():
    params = GroupParams(5, 3, (1, 1, 2))
    words, order = synth.elementary_abelian_witness(params, 1)
    assert order == 5 and len(words) == 1
    words, order = synth.elementary_abelian_witness(params, 3)
    assert order == 125
    # pairwise commuting and of order p on a separating grid
    F25 = ff.make_field(5, 2)
    import random
    rng = random.Random(1)
    for _ in range(50):
        pt = tuple(rng.randrange(25) for _ in range(3))
        for a in words:
            for b in words:
                assert apply_word(a + b, pt, F25) == apply_word(b + a, pt, F25)
        for a in words:
            wp = Word(a.letters * 5)
            assert apply_word(wp, pt, F25) == pt


def test_interpolate_examples():
    F5 = ff.make_field(5, 1)
    f = interpolate([2], [3], F5)
    assert synth._field_poly_eval(F5, f, 2) == 3
    f = interpolate([1, 2], [3, 4], F5)
    assert synth._field_poly_eval(F5, f, 1) == 3
    assert synth._field_poly_eval(F5, f, 2) == 4
    F9 = ff.make_field(3, 2)
    t = F9.element((0, 1))
    f = interpolate([t, 2], [F9.add(t, 1), 0], F9)
    assert synth._field_poly_eval(F9, f, t) == F9.add(t, 1)
    assert synth._field_poly_eval(F9, f, 2) == 0
    assert all(c < 3 for c in f)  # coefficients in the prime field


def test_interpolate_lagrange_oracle():
    # over a prime field the Lagrange interpolant is unique for deg < k
    F7 = ff.make_field(7, 1)
    mus, nus = [1, 3, 5], [2, 0, 6]
    f = interpolate(mus, nus, F7)
    for mu, nu in zip(mus, nus):
        assert synth._field_poly_eval(F7, f, mu) == nu


def test_interpolate_errors():
    F9 = ff.make_field(3, 2)
    t = F9.element((0, 1))
    with pytest.raises(ClashingMinimalPolynomials):
        interpolate([t, F9.frobenius(t)], [1, 1], F9)
    with pytest.raises(ValueOutsideSubfield):
        interpolate([2], [t], F9)  # t not in F_3 = F_3(2)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_interpolate_random_instances(data):
    p, ell = data.draw(st.sampled_from([(3, 2), (5, 2), (3, 3)]))
    ctx = ff.make_field(p, ell)
    k = data.draw(st.integers(1, 3))
    mus, keys = [], set()
    tries = 0
    while len(mus) < k and tries < 50:
        tries += 1
        mu = data.draw(st.integers(0, ctx.q - 1))
        key = ff.minimal_polynomial(ctx, mu)
        if key in keys:
            continue
        keys.add(key)
        mus.append(mu)
    nus = []
    for mu in mus:
        d = ctx.subfield_degree(mu)
        acc, power = 0, 1
        for _ in range(d):
            acc = ctx.add(acc, ctx.mul(data.draw(st.integers(0, p - 1)), power))
            power = ctx.mul(power, mu)
        nus.append(acc)
    f = interpolate(mus, nus, ctx)
    assert all(c < p for c in f)
    for mu, nu in zip(mus, nus):
        assert synth._field_poly_eval(ctx, f, mu) == nu


def test_embedded_beta_letter_closed_forms():
    # each P_ell image of an embedding acts as its closed-form beta letter
    params = GroupParams(5, 3, (1, 1, 2))
    F5 = ff.make_field(5, 1)
    emb = synth.embed_gamma(1, 2, 3, 2, 1, params)
    for ell in (0, 1, 2):
        for r in (1, 3):
            w = emb.p_ell_word(ell, r)
            letter = synth.embedded_beta_letter(1, 2, 3, 2, 1, ell, r)
            for pt in all_points(5, 3):
                assert apply_word(w, pt, F5) == \
                    apply_word(Word.of(letter), pt, F5), (ell, r, pt)


def test_step5_family_closed_form():
    # beta5 word for (2,2,2): adds r * a_3 * a_2^(e_1 - E/e_2 + E - 1)
    params = GroupParams(23, 3, (2, 2, 2))
    F23 = ff.make_field(23, 1)
    s = synth.TransvectionSynthesizer(params)
    w = s._beta5_family(1)(7)
    kexp = 2 - 4 + 7  # e_1 - E/e_2 + (E-1) = 5
    import random
    rng = random.Random(2)
    for _ in range(400):
        pt = tuple(rng.randrange(23) for _ in range(3))
        delta = F23.mul(7, F23.mul(pt[2], F23.pow(pt[1], kexp)))
        assert apply_word(w, pt, F23) == (F23.add(pt[0], delta),) + pt[1:]


@pytest.mark.parametrize("p,e", [(7, (1, 2, 2)), (11, (2, 1, 2))])
def test_synth_other_exponent_shapes(p, e):
    import itertools
    params = GroupParams(p, 3, e)
    s = synth.TransvectionSynthesizer(params)
    E = params.E
    for i, j in itertools.permutations((1, 2, 3), 2):
        tij = params.tij(i, j)
        for m in (0, 1):
            cert = synth.synth_transvection(i, j, tij + m * (E - 1), 2,
                                            params, synthesizer=s)
            assert cert.verified, (i, j, m)
