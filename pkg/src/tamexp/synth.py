"""Constructive machinery: the nilpotent groups Gamma_{c,F_p}, their word
embeddings into the tame groups, synthesis of derived transvections, and
prime-field interpolation with prescribed values.

Gamma_{c,R} is R[x]_{<=c} x| R with the shift action; we store an element
as (poly, shift) with poly a coefficient tuple of length c+1 (low-to-high)
and use the product

    (P, a) * (Q, b) = (P(x + b) + Q, a + b),

under which [P_{c-n}(r), y(s)] = sum_i C(n,i) P_{c-n+i}(r s^i), the
commutator relation all the word constructions rest on.

Word synthesis follows a double induction: distance-1 targets at level m
come from a class-1 embedding whose translation part is a distance-2
family at level m-1, and distance propagation at fixed level runs through
class-1 embeddings with the step-3 bi-transvection words.  Every produced
word is verified against the closed-form action on a grid.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import (BadExponent, BoundViolated, BudgetExceeded,
                     ClashingMinimalPolynomials, NotInvertible, RankTooLarge,
                     ValueOutsideSubfield)
from .ff import (make_field, minimal_polynomial, poly_add, poly_mul,
                 poly_trim, solve_mod_p)
from .tame import (BiTransvection, Transvection, Word, apply_word,
                   apply_word_arrays, letter_endo,
                   poly_transvection_letter, tau, word_to_endo)

# ---------------------------------------------------------------------------
# the nilpotent group Gamma_{c,F_p}


@dataclass(frozen=True)
class GammaElem:
    c: int
    p: int
    poly: tuple  # c+1 residues, low-to-high
    shift: int

    def __post_init__(self):
        assert len(self.poly) == self.c + 1


def gamma_identity(c, p):
    return GammaElem(c, p, (0,) * (c + 1), 0)


def p_elem(c, p, ell, r):
    """P_ell(r) = r x^(c-ell) as a group element."""
    poly = [0] * (c + 1)
    poly[c - ell] = r % p
    return GammaElem(c, p, tuple(poly), 0)


def y_elem(c, p, s):
    return GammaElem(c, p, (0,) * (c + 1), s % p)


def _shift_poly(poly, b, p):
    """Coefficients of P(x + b)."""
    c = len(poly) - 1
    out = [0] * (c + 1)
    for v, pv in enumerate(poly):
        if pv:
            bb = 1
            for u in range(v, -1, -1):
                out[u] = (out[u] + comb(v, v - u) * bb * pv) % p
                bb = bb * b % p
    return tuple(out)


def gamma_op(a, b):
    if (a.c, a.p) != (b.c, b.p):
        raise ValueError("mismatched Gamma contexts")
    p = a.p
    poly = tuple((x + y) % p for x, y in zip(_shift_poly(a.poly, b.shift, p), b.poly))
    return GammaElem(a.c, p, poly, (a.shift + b.shift) % p)


def gamma_inv(a):
    p = a.p
    poly = tuple((-x) % p for x in _shift_poly(a.poly, (-a.shift) % p, p))
    return GammaElem(a.c, p, poly, (-a.shift) % p)


def gamma_comm(a, b):
    return gamma_op(gamma_op(gamma_inv(a), gamma_inv(b)), gamma_op(a, b))


def verify_gamma_commutator_formula(c, p):
    """Exhaustive check of [P_{c-n}(r), y(s)] = sum_i C(n,i) P_{c-n+i}(r s^i)."""
    for n in range(c + 1):
        for r in range(p):
            for s in range(p):
                lhs = gamma_comm(p_elem(c, p, c - n, r), y_elem(c, p, s))
                rhs = gamma_identity(c, p)
                for i in range(1, n + 1):
                    rhs = gamma_op(rhs, p_elem(c, p, c - n + i,
                                               comb(n, i) * r * pow(s, i, p)))
                if lhs != rhs:
                    return False
    return True


@dataclass
class GammaStructureReport:
    c: int
    p: int
    order: int
    nilpotency_class: int
    center_order: int
    center_is_Xc: bool
    generated_by_X0_Y: bool


def gamma_structure(c, p, budget=10**7):
    """Brute-force structure of Gamma_{c,F_p}.

    The lower central series lives in the abelian polynomial part, where
    subgroups are F_p-subspaces, so each term is a span of explicit
    shift-difference vectors.
    """
    order = p ** (c + 2)
    if order > budget:
        raise BudgetExceeded(f"group order {order} exceeds budget {budget}")

    def span_dim(vectors):
        basis = []
        for v in vectors:
            v = list(v)
            for b in basis:
                lead = next((i for i, x in enumerate(b) if x), None)
                if lead is not None and v[lead]:
                    f = v[lead] * pow(b[lead], p - 2, p) % p
                    v = [(x - f * y) % p for x, y in zip(v, b)]
            if any(v):
                basis.append(v)
        return basis

    # gamma_2 = span of (x+s)^v - x^v
    gens = []
    for v in range(c + 1):
        mono = [0] * (c + 1)
        mono[v] = 1
        for s in range(1, p):
            shifted = _shift_poly(tuple(mono), s, p)
            gens.append(tuple((a - b) % p for a, b in zip(shifted, mono)))
    series = [None]  # gamma_1 = G, marked by None
    basis = span_dim(gens)
    series.append(basis)
    while series[-1]:
        prev = series[-1]
        nxt = []
        for q in prev:
            for s in range(1, p):
                shifted = _shift_poly(tuple(q), s, p)
                nxt.append(tuple((a - b) % p for a, b in zip(shifted, q)))
        series.append(span_dim(nxt))
    # series = [G, gamma_2, ..., gamma_k = 0]; class = index of last nonzero
    nilpotency_class = len(series) - 1 if len(series) > 2 or series[1] else 1
    if not series[1]:
        nilpotency_class = 1
    else:
        nilpotency_class = 1 + max(i for i in range(1, len(series)) if series[i])

    # center by scan: (Q, b) commutes with all (x^v, 0) and with y(1)
    center = []
    for poly in itertools.product(range(p), repeat=c + 1):
        if _shift_poly(poly, 1, p) != poly:
            continue
        center.append((poly, 0))
        if c == 0:
            for b in range(1, p):
                center.append((poly, b))
    center_order = len(center)
    xc = {tuple([r] + [0] * c) for r in range(p)}
    center_is_Xc = {pt for pt, b in center if b == 0} == xc and all(
        b == 0 for _, b in center) if c >= 1 else (center_order == p * p)

    # closure of <X_0(1), y(1)>
    g1 = p_elem(c, p, 0, 1)
    g2 = y_elem(c, p, 1)
    gens4 = [g1, g2, gamma_inv(g1), gamma_inv(g2)]
    seen = {gamma_identity(c, p)}
    frontier = [gamma_identity(c, p)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens4:
                y = gamma_op(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    generated = len(seen) == order

    report = GammaStructureReport(c, p, order, nilpotency_class,
                                  center_order, center_is_Xc, generated)
    if p > c:
        expect_class = c + 1 if c >= 1 else 1
        if (report.nilpotency_class != expect_class
                or report.center_order != (p if c >= 1 else p * p)
                or (c >= 1 and not center_is_Xc) or not generated):
            raise BoundViolated(f"Gamma structure contradicts theory: {report}")
    return report


# ---------------------------------------------------------------------------
# word embeddings of Gamma


class GammaWordEmbedding:
    """Words realizing a copy of Gamma_{c,F_p} inside a tame group.

    x0_family(r) must be a word acting as the image of P_0(r); y_family(s)
    a word adding s times the relevant power to the translated coordinate.
    The image of y(s) is y_family(-s): the point-action convention flips
    the sign of the translation part, and with that twist the commutator
    relations match the Gamma product above.  Images of P_ell(r) come from
    solving sum_t v_t (x+t)^c = x^(c-ell), which needs c! invertible.
    """

    def __init__(self, p, c, x0_family, y_family, budget=10**6):
        if p <= c:
            raise NotInvertible(f"need p > c, got p={p}, c={c}")
        self.p = p
        self.c = c
        self.x0 = x0_family
        self.budget = budget
        self._pre = {t: y_family(t % p) for t in range(1, c + 1)}
        self._post = {t: y_family((-t) % p) for t in range(1, c + 1)}
        self._y = y_family
        self._unit = {}

    def _node_matrix(self):
        # column t = coefficients of (x+t)^c
        return [[comb(self.c, u) * pow(t, self.c - u, self.p) % self.p
                 for t in range(self.c + 1)] for u in range(self.c + 1)]

    def _solve(self, target):
        v = solve_mod_p(self._node_matrix(), target, self.p)
        if v is None:
            raise NotInvertible("interpolation nodes degenerate")
        return v

    def poly_word(self, poly):
        """Word for the element (poly, 0)."""
        key = tuple(poly)
        v = self._solve(list(key))
        out = Word()
        for t in range(self.c + 1):
            coeff = v[t]
            if coeff == 0:
                continue
            if t == 0:
                out = out + self.x0(coeff)
            else:
                out = out + self._pre[t] + self.x0(coeff) + self._post[t]
            if len(out) > self.budget:
                raise BudgetExceeded("synthesized word exceeds length budget")
        return out

    def p_ell_word(self, ell, r):
        r %= self.p
        if r == 0:
            return Word()
        target = [0] * (self.c + 1)
        target[self.c - ell] = r
        return self.poly_word(target)

    def elem_word(self, elem):
        """Word for (Q, b): the translation image goes first, since
        A(-b) B(Q) = B(Q(x+b)) A(-b) mirrors (P,a)(Q,b) = (P(x+b)+Q, a+b)."""
        out = Word()
        if elem.shift:
            out = self._y((-elem.shift) % self.p)
        return out + self.poly_word(elem.poly)


def embed_gamma(i, j, k, c, d, params):
    """Embedding of Gamma_{c,F_p} with P_ell(r) -> B(i;j,k, c-ell, d*ell, r)
    and the translation part acting on coordinate j from source k."""
    if len({i, j, k}) != 3:
        raise ValueError("indices must be pairwise distinct")
    p = params.p
    x0 = lambda r: Word.of(Transvection(i, j, c, r % p))
    y = lambda s: Word.of(Transvection(j, k, d, s % p))
    return GammaWordEmbedding(p, c, x0, y)


def embedded_beta_letter(i, j, k, c, d, ell, r):
    """Closed form of the image of P_ell under embed_gamma, as one letter."""
    cexp, dexp = c - ell, d * ell
    if dexp == 0:
        return Transvection(i, j, cexp, r)
    if cexp == 0:
        return Transvection(i, k, dexp, r)
    return BiTransvection(i, j, k, cexp, dexp, r)


def check_embedding_homomorphism(embedding, c, p, ctx, n, pairs=100, seed=0):
    """Semantic homomorphism check on random element pairs: the word of a
    product acts like the concatenation of the factor words on all of
    ctx^n (exhaustive when small, sampled otherwise)."""
    rng = random.Random(seed)
    if ctx.q ** n <= 4096:
        pts = list(itertools.product(range(ctx.q), repeat=n))
    else:
        pts = [tuple(rng.randrange(ctx.q) for _ in range(n)) for _ in range(500)]
    for _ in range(pairs):
        a = GammaElem(c, p, tuple(rng.randrange(p) for _ in range(c + 1)),
                      rng.randrange(p))
        b = GammaElem(c, p, tuple(rng.randrange(p) for _ in range(c + 1)),
                      rng.randrange(p))
        w_ab = embedding.elem_word(gamma_op(a, b))
        w_a_b = embedding.elem_word(a) + embedding.elem_word(b)
        for pt in pts:
            if apply_word(w_ab, pt, ctx) != apply_word(w_a_b, pt, ctx):
                return False
    return True


# ---------------------------------------------------------------------------
# Theorem-level synthesis of derived transvections


class TransvectionSynthesizer:
    """Builds words for the derived transvections a_i += r a_j^t with
    t = t_{i,j} + m (E-1), memoizing one embedding per family."""

    def __init__(self, params, budget=10**6):
        self.params = params
        self.budget = budget
        if params.E < 2:
            raise BadExponent("need E >= 2")
        if params.p <= max(params.e):
            raise NotInvertible("need p > max e_i")
        self._alpha = {}
        self._b3 = {}
        self._b43 = {}
        self._b5 = {}

    def _nxt(self, i):
        return i % self.params.n + 1

    def _e(self, i):
        return self.params.e[i - 1]

    def _alpha_family(self, i, j, m):
        key = (i, j, m)
        fam = self._alpha.get(key)
        if fam is not None:
            return fam
        params = self.params
        if m == 0 and j == self._nxt(i):
            fam = lambda r: Word.of(tau(params, i, r))
        elif m == 0:
            emb = GammaWordEmbedding(
                params.p, self._e(i),
                x0_family=lambda r: Word.of(tau(params, i, r)),
                y_family=self._alpha_family(self._nxt(i), j, 0),
                budget=self.budget)
            ell = self._e(i)
            fam = lambda r: emb.p_ell_word(ell, r)
        elif j == self._nxt(i):
            i2 = self._nxt(self._nxt(i))
            emb = GammaWordEmbedding(
                params.p, 1,
                x0_family=self._beta5_family(i),
                y_family=self._alpha_family(i2, j, m - 1),
                budget=self.budget)
            fam = lambda r: emb.p_ell_word(1, r)
        else:
            emb = GammaWordEmbedding(
                params.p, 1,
                x0_family=self._beta3_family(i, j),
                y_family=self._alpha_family(self._nxt(i), j, m),
                budget=self.budget)
            fam = lambda r: emb.p_ell_word(1, r)
        self._alpha[key] = fam
        return fam

    def _beta3_family(self, i, j):
        """beta^(1, (e_i - 1) t_{i+1,j})_{i; i+1, j}; collapses to tau_i
        when e_i = 1."""
        key = (i, j)
        fam = self._b3.get(key)
        if fam is None:
            params = self.params
            emb = GammaWordEmbedding(
                params.p, self._e(i),
                x0_family=lambda r: Word.of(tau(params, i, r)),
                y_family=self._alpha_family(self._nxt(i), j, 0),
                budget=self.budget)
            ell = self._e(i) - 1
            fam = lambda r: emb.p_ell_word(ell, r)
            self._b3[key] = fam
        return fam

    def _beta43_family(self, i):
        """beta^(e_{i+1}, e_i - 1)_{i; i+2, i+1} via the step-2 embedding
        toward j = i+2 at ell = 1."""
        fam = self._b43.get(i)
        if fam is None:
            params = self.params
            i2 = self._nxt(self._nxt(i))
            emb = GammaWordEmbedding(
                params.p, self._e(i),
                x0_family=lambda r: Word.of(tau(params, i, r)),
                y_family=self._alpha_family(self._nxt(i), i2, 0),
                budget=self.budget)
            fam = lambda r: emb.p_ell_word(1, r)
            self._b43[i] = fam
        return fam

    def _beta5_family(self, i):
        """beta^(1, e_i - E/e_{i+1} + E - 1)_{i; i+2, i+1}."""
        fam = self._b5.get(i)
        if fam is None:
            params = self.params
            i1 = self._nxt(i)
            emb = GammaWordEmbedding(
                params.p, self._e(i1),
                x0_family=self._beta43_family(i),
                y_family=self._alpha_family(self._nxt(i1), i1, 0),
                budget=self.budget)
            ell = self._e(i1) - 1
            fam = lambda r: emb.p_ell_word(ell, r)
            self._b5[i] = fam
        return fam

    def alpha_word(self, i, j, m, r):
        w = self._alpha_family(i, j, m)(r)
        if len(w) > self.budget:
            raise BudgetExceeded("synthesized word exceeds length budget")
        return w


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SynthCert:
    target: str
    word: Word
    verified: bool
    mode: str  # "exhaustive" or "sampled"
    symbolic_checked: bool
    grid: str
    points_checked: int

    @property
    def length(self):
        return len(self.word)


def _grid_ctx(params, degree, grid_cap):
    m = 1
    while params.p**m <= degree + 1:
        m += 1
    ctx = make_field(params.p, m)
    exhaustive = ctx.q ** params.n <= grid_cap
    return ctx, exhaustive


def _all_coords(ctx, n):
    codes = np.arange(ctx.q**n, dtype=np.int64)
    out = []
    for _ in range(n):
        out.append(codes % ctx.q)
        codes = codes // ctx.q
    return out


def _verify_word_letter(word, letter, params, grid_cap=10**6, samples=10**4,
                        seed=0, force_symbolic=False):
    if isinstance(letter, Transvection):
        degree = letter.e
    else:
        degree = letter.t + letter.nexp * max(
            (m for m, c in enumerate(letter.coeffs) if c), default=0)
    ctx, exhaustive = _grid_ctx(params, degree, grid_cap)
    n = params.n
    symbolic = False
    if exhaustive:
        coords = _all_coords(ctx, n)
        got = apply_word_arrays(word, [c.copy() for c in coords], ctx)
        want = apply_word_arrays(Word.of(letter), [c.copy() for c in coords], ctx)
        ok = all(np.array_equal(a, b) for a, b in zip(got, want))
        npts = ctx.q**n
        mode = "exhaustive"
    else:
        rng = random.Random(seed)
        ok = True
        for _ in range(samples):
            pt = tuple(rng.randrange(ctx.q) for _ in range(n))
            if apply_word(word, pt, ctx) != apply_word(Word.of(letter), pt, ctx):
                ok = False
                break
        npts = samples
        mode = "sampled"
        force_symbolic = True
    if force_symbolic and ok:
        endo = word_to_endo(word, ctx, n)
        ok = endo == letter_endo(letter, +1, ctx, n)
        symbolic = True
    return ok, mode, symbolic, ctx, npts


def synth_transvection(i, j, t, r, params, budget=10**6, grid_cap=10**6,
                       synthesizer=None, force_symbolic=False):
    """Word in the standard generators acting as a_i += r a_j^t, verified.

    t must satisfy t = t_{i,j} mod (E-1) with t >= t_{i,j}; this congruence
    cannot be removed, since every generator preserves the grading.
    """
    params_tij = params.tij(i, j)
    E = params.E
    if E < 2:
        raise BadExponent("synthesis needs E >= 2")
    if params.p <= max(params.e):
        raise NotInvertible("need p > max e_i")
    if t < params_tij or (t - params_tij) % (E - 1) != 0:
        raise BadExponent(
            f"t={t} violates t = t_ij + m(E-1) with t_ij={params_tij}, E-1={E - 1}")
    m = (t - params_tij) // (E - 1)
    synth = synthesizer or TransvectionSynthesizer(params, budget)
    word = synth.alpha_word(i, j, m, r % params.p)
    letter = Transvection(i, j, t, r % params.p)
    ok, mode, symbolic, ctx, npts = _verify_word_letter(
        word, letter, params, grid_cap, force_symbolic=force_symbolic)
    return SynthCert(f"T({i},{j},{t},{r % params.p})", word, ok, mode,
                     symbolic, ctx.serialize(), npts)


def synth_poly_transvection(i, j, coeffs, params, budget=10**6, grid_cap=10**6,
                            synthesizer=None):
    """Word acting as a_i += a_j^{t_ij} P(a_j^{E-1}), one transvection word
    per nonzero monomial of P (they commute)."""
    coeffs = tuple(c % params.p for c in coeffs)
    synth = synthesizer or TransvectionSynthesizer(params, budget)
    tij = params.tij(i, j)
    word = Word()
    for m, c in enumerate(coeffs):
        if c:
            word = word + synth.alpha_word(i, j, m, c)
            if len(word) > budget:
                raise BudgetExceeded("synthesized word exceeds length budget")
    letter = poly_transvection_letter(params, i, j, coeffs)
    ok, mode, symbolic, ctx, npts = _verify_word_letter(
        word, letter, params, grid_cap)
    return SynthCert(f"P({i},{j},{list(coeffs)})", word, ok, mode, symbolic,
                     ctx.serialize(), npts)


def elementary_abelian_witness(params, rank, grid_cap=10**7):
    """rank pairwise-commuting words of order p generating a permutation
    group of order p^rank, realized as a_1 += a_2^(t_12 + m(E-1)) for
    m = 0..rank-1 and certified on a separating grid."""
    from . import permgrp

    if max(params.e) < 2:
        raise BadExponent("need max e_i > 1")
    if params.p <= max(params.e):
        raise NotInvertible("need p > max e_i")
    synth = TransvectionSynthesizer(params)
    E = params.E
    tmax = params.tij(1, 2) + (rank - 1) * (E - 1)
    m = 1
    while params.p**m - 1 <= tmax:
        m += 1
    ctx = make_field(params.p, m)
    if ctx.q ** params.n > grid_cap:
        raise RankTooLarge(
            f"separating grid {ctx.q}^{params.n} exceeds cap {grid_cap}")
    words = [synth.alpha_word(1, 2, k, 1) for k in range(rank)]
    coords0 = _all_coords(ctx, params.n)
    perms = []
    for w in words:
        imgs = apply_word_arrays(w, [c.copy() for c in coords0], ctx)
        code = sum(imgs[k] * ctx.q**k for k in range(params.n))
        perms.append(np.asarray(code, dtype=np.int64))
    chain = permgrp.schreier_sims(perms)
    if chain.order != params.p**rank:
        raise BoundViolated(
            f"witness group has order {chain.order}, expected {params.p**rank}")
    return words, chain.order


# ---------------------------------------------------------------------------
# interpolation with prescribed values (constructive, per the recursion)


def interpolate(mus, nus, ctx):
    """Polynomial f over F_p with f(mu_i) = nu_i, given pairwise distinct
    minimal polynomials of the mu_i and nu_i in F_p(mu_i).

    Returns a low-to-high coefficient tuple.  Base case expands nu in the
    power basis of F_p(mu); the step is f = f_k*phi + f_1...f_{k-1}*psi.
    """
    if len(mus) != len(nus):
        raise ValueError("need equally many nodes and values")
    k = len(mus)
    if k == 0:
        return ()
    minpolys = [minimal_polynomial(ctx, mu) for mu in mus]
    if len(set(minpolys)) != k:
        raise ClashingMinimalPolynomials(
            "minimal polynomials of the nodes must be pairwise distinct")
    return _interpolate_rec(list(mus), list(nus), minpolys, ctx)


def _field_poly_eval(ctx, f, x):
    acc = 0
    for c in reversed(f):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def _interpolate_rec(mus, nus, minpolys, ctx):
    p = ctx.p
    k = len(mus)
    if k == 1:
        mu, nu = mus[0], nus[0]
        d = ctx.subfield_degree(mu)
        # solve sum_t c_t mu^t = nu over F_p in the power basis of F_p(mu)
        cols = []
        x = 1
        for _ in range(d):
            cols.append(ctx.coeffs(x))
            x = ctx.mul(x, mu)
        rows = [[cols[t][u] for t in range(d)] for u in range(ctx.ell)]
        rhs = list(ctx.coeffs(nu))
        sol = solve_mod_p(rows, rhs, p)
        if sol is None:
            raise ValueOutsideSubfield(f"value not in F_p(node): {nu}")
        return poly_trim(sol)
    fk = minpolys[-1]
    phi_targets = []
    for i in range(k - 1):
        denom = _field_poly_eval(ctx, fk, mus[i])
        phi_targets.append(ctx.mul(nus[i], ctx.inv(denom)))
    phi = _interpolate_rec(mus[:-1], phi_targets, minpolys[:-1], ctx)
    denom = 1
    for i in range(k - 1):
        denom = ctx.mul(denom, _field_poly_eval(ctx, minpolys[i], mus[-1]))
    psi = _interpolate_rec([mus[-1]], [ctx.mul(nus[-1], ctx.inv(denom))],
                           [fk], ctx)
    prod_rest = (1,)
    for i in range(k - 1):
        prod_rest = poly_mul(prod_rest, minpolys[i], p)
    f = poly_add(poly_mul(fk, phi, p), poly_mul(prod_rest, psi, p), p)
    for mu, nu in zip(mus, nus):
        if _field_poly_eval(ctx, f, mu) != nu:
            raise BoundViolated("interpolation failed its evaluation check")
    return f
