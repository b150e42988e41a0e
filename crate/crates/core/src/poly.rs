//! Exact multivariate polynomials in the coordinates `z`, `zbar`, `w`,
//! `wbar`, `u` (with `u = Re w`), and their parametric variant whose
//! coefficients are affine expressions over a set of real unknowns.
//!
//! The parametric variant is what turns "this identity holds for all z and
//! u" into a finite rational linear system: every monomial coefficient must
//! vanish, and each complex coefficient contributes one real and one
//! imaginary row.

use crate::linalg::RatMatrix;
use crate::scalar::{cconj, czero, CRat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::ops::Neg;

/// Variable layout for a fixed `(n, k)`: indices `0..n` are `z`, then `zbar`,
/// `w`, `wbar`, and finally the real coordinates `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarLayout {
    pub n: usize,
    pub k: usize,
}

impl VarLayout {
    pub fn new(n: usize, k: usize) -> Self {
        VarLayout { n, k }
    }

    pub fn len(&self) -> usize {
        2 * self.n + 3 * self.k
    }

    pub fn z(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        i
    }

    pub fn zbar(&self, i: usize) -> usize {
        debug_assert!(i < self.n);
        self.n + i
    }

    pub fn w(&self, j: usize) -> usize {
        debug_assert!(j < self.k);
        2 * self.n + j
    }

    pub fn wbar(&self, j: usize) -> usize {
        debug_assert!(j < self.k);
        2 * self.n + self.k + j
    }

    pub fn u(&self, j: usize) -> usize {
        debug_assert!(j < self.k);
        2 * self.n + 2 * self.k + j
    }

    /// Swaps the exponent blocks exchanged by complex conjugation.
    fn conj_mono(&self, mono: &[u8]) -> Vec<u8> {
        let mut out = mono.to_vec();
        for i in 0..self.n {
            out.swap(self.z(i), self.zbar(i));
        }
        for j in 0..self.k {
            out.swap(self.w(j), self.wbar(j));
        }
        out
    }
}

pub type Mono = Vec<u8>;

fn mono_mul(a: &[u8], b: &[u8]) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn mono_degree(m: &[u8]) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Concrete polynomial with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CPoly {
    pub layout: VarLayout,
    terms: BTreeMap<Mono, CRat>,
}

impl CPoly {
    pub fn zero(layout: VarLayout) -> Self {
        CPoly {
            layout,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(layout: VarLayout, c: CRat) -> Self {
        let mut p = Self::zero(layout);
        p.add_term(vec![0; layout.len()], c);
        p
    }

    pub fn var(layout: VarLayout, idx: usize) -> Self {
        let mut mono = vec![0u8; layout.len()];
        mono[idx] = 1;
        let mut p = Self::zero(layout);
        p.add_term(mono, crate::scalar::cone());
        p
    }

    pub fn add_term(&mut self, mono: Mono, c: CRat) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(mono.len(), self.layout.len());
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.layout, other.layout);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = Self::zero(self.layout);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.layout);
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.clone().neg());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.layout, other.layout);
        let mut out = Self::zero(self.layout);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(mono_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u8) -> Self {
        let mut out = Self::constant(self.layout, crate::scalar::cone());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Complex conjugate: swaps `z <-> zbar`, `w <-> wbar`, conjugates
    /// coefficients; `u` is real and stays fixed.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.layout);
        for (m, c) in &self.terms {
            out.add_term(self.layout.conj_mono(m), cconj(c));
        }
        out
    }

    /// Substitutes `replacement` for the variable at `idx`.
    pub fn substitute(&self, idx: usize, replacement: &Self) -> Self {
        debug_assert_eq!(self.layout, replacement.layout);
        let mut powers: Vec<CPoly> = vec![Self::constant(self.layout, crate::scalar::cone())];
        let mut out = Self::zero(self.layout);
        for (m, c) in &self.terms {
            let e = m[idx] as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().mul(replacement);
                powers.push(next);
            }
            let mut stripped = m.clone();
            stripped[idx] = 0;
            let mut base = Self::zero(self.layout);
            base.add_term(stripped, c.clone());
            out = out.add(&base.mul(&powers[e]));
        }
        out
    }
}

/// Exact affine expression `constant + sum coeff_i * x_i` over real unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub constant: CRat,
    linear: BTreeMap<usize, CRat>,
}

impl Affine {
    pub fn zero() -> Self {
        Affine {
            constant: czero(),
            linear: BTreeMap::new(),
        }
    }

    pub fn constant(c: CRat) -> Self {
        Affine {
            constant: c,
            linear: BTreeMap::new(),
        }
    }

    /// The real unknown `x_idx`.
    pub fn unknown(idx: usize) -> Self {
        let mut linear = BTreeMap::new();
        linear.insert(idx, crate::scalar::cone());
        Affine {
            constant: czero(),
            linear,
        }
    }

    /// The complex unknown `x_re + i x_im` over two real unknowns.
    pub fn complex_unknown(re_idx: usize, im_idx: usize) -> Self {
        Affine::unknown(re_idx).add(&Affine::unknown(im_idx).scale(&crate::scalar::ci()))
    }

    pub fn coeff_of(&self, idx: usize) -> CRat {
        self.linear.get(&idx).cloned().unwrap_or_else(czero)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (&usize, &CRat)> {
        self.linear.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.linear.values().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant = out.constant + other.constant.clone();
        for (i, c) in &other.linear {
            let entry = out.linear.entry(*i).or_insert_with(czero);
            *entry = entry.clone() + c.clone();
            if entry.is_zero() {
                out.linear.remove(i);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&(czero() - crate::scalar::cone()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &CRat) -> Self {
        if c.is_zero() {
            return Affine::zero();
        }
        Affine {
            constant: self.constant.clone() * c.clone(),
            linear: self
                .linear
                .iter()
                .map(|(i, v)| (*i, v.clone() * c.clone()))
                .collect(),
        }
    }

    /// Conjugate: valid because the unknowns are real.
    pub fn conj(&self) -> Self {
        Affine {
            constant: cconj(&self.constant),
            linear: self.linear.iter().map(|(i, v)| (*i, cconj(v))).collect(),
        }
    }
}

/// Polynomial identity whose monomial coefficients are affine in a fixed set
/// of real unknowns. The encoding of conditions like (`for all z, u`) before
/// they are compiled to a linear system.
#[derive(Debug, Clone)]
pub struct ParametricPolynomial {
    pub layout: VarLayout,
    pub n_unknowns: usize,
    terms: BTreeMap<Mono, Affine>,
}

impl ParametricPolynomial {
    pub fn zero(layout: VarLayout, n_unknowns: usize) -> Self {
        ParametricPolynomial {
            layout,
            n_unknowns,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, mono: Mono, a: Affine) {
        if a.is_zero() {
            return;
        }
        debug_assert_eq!(mono.len(), self.layout.len());
        let entry = self
            .terms
            .entry(mono.clone())
            .or_insert_with(Affine::zero);
        *entry = entry.clone().add(&a);
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    /// Adds `p * a` where `p` is concrete and `a` is one affine coefficient.
    pub fn add_cpoly_times(&mut self, p: &CPoly, a: &Affine) {
        for (m, c) in p.terms() {
            self.add_term(m.clone(), a.scale(c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n_unknowns, other.n_unknowns);
        let mut out = self.clone();
        for (m, a) in &other.terms {
            out.add_term(m.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&(czero() - crate::scalar::cone())))
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = Self::zero(self.layout, self.n_unknowns);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.scale(c));
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.layout, self.n_unknowns);
        for (m, a) in &self.terms {
            out.add_term(self.layout.conj_mono(m), a.conj());
        }
        out
    }

    /// Pointwise real part: `(p + conj p) / 2`.
    pub fn re(&self) -> Self {
        let half = CRat::new(Rat::new(1.into(), 2.into()), Rat::zero());
        self.add(&self.conj()).scale(&half)
    }

    /// Pointwise imaginary part: `(p - conj p) / 2i`.
    pub fn im(&self) -> Self {
        let half_over_i = CRat::new(Rat::zero(), Rat::new((-1).into(), 2.into()));
        self.sub(&self.conj()).scale(&half_over_i)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Monomials in graded-lexicographic order, the row order of the
    /// compiled linear system.
    fn ordered_monomials(&self) -> Vec<Mono> {
        let mut monos: Vec<Mono> = self.terms.keys().cloned().collect();
        monos.sort_by(|a, b| (mono_degree(a), a).cmp(&(mono_degree(b), b)));
        monos
    }

    /// Evaluates the identity at a concrete unknown assignment, producing the
    /// resulting concrete polynomial.
    pub fn instantiate(&self, assignment: &[Rat]) -> CPoly {
        assert_eq!(assignment.len(), self.n_unknowns);
        let mut out = CPoly::zero(self.layout);
        for (m, a) in &self.terms {
            let mut c = a.constant.clone();
            for (i, coeff) in a.linear_terms() {
                c = c + coeff.clone() * CRat::new(assignment[*i].clone(), Rat::zero());
            }
            out.add_term(m.clone(), c);
        }
        out
    }
}

/// Compiles the identity `p == 0 for all coordinate values` into a rational
/// matrix whose nullspace is the set of unknown assignments that make every
/// monomial coefficient vanish.
///
/// Rows come in (re, im) pairs per monomial, monomials in graded-lex order;
/// columns are the unknowns. Constant parts are not encoded here (see
/// [`constant_column`]); an identity with a nonzero constant term has an
/// inconsistent augmented system but a well-defined homogeneous part.
pub fn match_coefficients(p: &ParametricPolynomial) -> RatMatrix {
    let monos = p.ordered_monomials();
    let mut rows = Vec::with_capacity(2 * monos.len());
    for m in &monos {
        let a = &p.terms[m];
        let mut re_row = vec![Rat::zero(); p.n_unknowns];
        let mut im_row = vec![Rat::zero(); p.n_unknowns];
        for (i, c) in a.linear_terms() {
            re_row[*i] = c.re.clone();
            im_row[*i] = c.im.clone();
        }
        rows.push(re_row);
        rows.push(im_row);
    }
    if rows.is_empty() {
        RatMatrix::zeros(0, p.n_unknowns)
    } else {
        RatMatrix::from_rows(rows)
    }
}

/// Constant parts of the identity in the same row order as
/// [`match_coefficients`].
pub fn constant_column(p: &ParametricPolynomial) -> Vec<Rat> {
    let mut out = Vec::new();
    for m in p.ordered_monomials() {
        let a = &p.terms[&m];
        out.push(a.constant.re.clone());
        out.push(a.constant.im.clone());
    }
    out
}

/// Stacks the systems of several identities (e.g. one per form component).
pub fn match_many(ps: &[ParametricPolynomial]) -> RatMatrix {
    assert!(!ps.is_empty());
    let n_unknowns = ps[0].n_unknowns;
    let mut acc = RatMatrix::zeros(0, n_unknowns);
    for p in ps {
        assert_eq!(p.n_unknowns, n_unknowns);
        acc = RatMatrix::vstack(&acc, &match_coefficients(p));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ci, cone, crat_int, rat_int};

    #[test]
    fn vacuous_identity_has_full_nullspace() {
        let p = ParametricPolynomial::zero(VarLayout::new(1, 1), 3);
        let m = match_coefficients(&p);
        assert_eq!(m.rows(), 0);
        assert_eq!(m.nullspace().len(), 3);
    }

    #[test]
    fn heisenberg_level_zero_identity() {
        // 2 Re(C) |z|^2 - s |z|^2 with unknowns (Re C, Im C, s).
        let layout = VarLayout::new(1, 1);
        let mut zzbar = vec![0u8; layout.len()];
        zzbar[layout.z(0)] = 1;
        zzbar[layout.zbar(0)] = 1;

        let c = Affine::complex_unknown(0, 1);
        let s = Affine::unknown(2);
        let mut p = ParametricPolynomial::zero(layout, 3);
        p.add_term(zzbar.clone(), c.add(&c.conj()).sub(&s));

        let m = match_coefficients(&p);
        let basis = m.nullspace();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            // s = 2 Re C on every solution
            assert_eq!(v[2], rat_int(2) * v[0].clone());
            let inst = p.instantiate(v);
            assert!(inst.is_zero());
        }
    }

    #[test]
    fn inconsistent_constant_term() {
        let layout = VarLayout::new(1, 1);
        let mut p = ParametricPolynomial::zero(layout, 2);
        p.add_term(vec![0; layout.len()], Affine::constant(cone()));
        let m = match_coefficients(&p);
        let c = constant_column(&p);
        let negated: Vec<_> = c.into_iter().map(|v| -v).collect();
        assert!(m.solve(&negated).is_none());
        assert_eq!(m.nullspace().len(), 2);
    }

    #[test]
    fn conj_and_parts() {
        let layout = VarLayout::new(1, 0);
        let z = CPoly::var(layout, layout.z(0));
        let p = z.scale(&ci());
        // conj(i z) = -i zbar
        let q = p.conj();
        let zbar = CPoly::var(layout, layout.zbar(0));
        assert_eq!(q, zbar.scale(&(czero() - ci())));
    }

    #[test]
    fn substitution_expands_powers() {
        // (w)^2 with w -> u + i z zbar
        let layout = VarLayout::new(1, 1);
        let w = CPoly::var(layout, layout.w(0));
        let u = CPoly::var(layout, layout.u(0));
        let zz = CPoly::var(layout, layout.z(0)).mul(&CPoly::var(layout, layout.zbar(0)));
        let repl = u.add(&zz.scale(&ci()));
        let out = w.pow(2).substitute(layout.w(0), &repl);
        assert_eq!(out, repl.mul(&repl));
        // u^2 + 2i u z zbar - (z zbar)^2
        let expected = u
            .mul(&u)
            .add(&u.mul(&zz).scale(&crat_int(0, 2)))
            .add(&zz.mul(&zz).scale(&crat_int(-1, 0)));
        assert_eq!(out, expected);
    }
}
