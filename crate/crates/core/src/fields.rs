//! Polynomial vector fields on `C^{n+k}` with holomorphic coefficients,
//! the formal Lie bracket, the weight grading (`z` weight 1, `w` weight 2),
//! and the tangency oracle deciding membership in the symmetry algebra of a
//! quadric independently of any constraint solving.

use crate::forms::HermitianFormPack;
use crate::poly::{CPoly, VarLayout};
use crate::scalar::{czero, CRat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Coordinate direction of a vector-field term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Dz(usize),
    Dw(usize),
}

/// Monomial `z^a w^b` of a holomorphic coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FieldMono {
    pub z: Vec<u8>,
    pub w: Vec<u8>,
}

impl FieldMono {
    pub fn unit(n: usize, k: usize) -> Self {
        FieldMono {
            z: vec![0; n],
            w: vec![0; k],
        }
    }

    pub fn z_var(n: usize, k: usize, i: usize) -> Self {
        let mut m = Self::unit(n, k);
        m.z[i] = 1;
        m
    }

    pub fn w_var(n: usize, k: usize, j: usize) -> Self {
        let mut m = Self::unit(n, k);
        m.w[j] = 1;
        m
    }

    fn mul(&self, other: &Self) -> Self {
        FieldMono {
            z: self.z.iter().zip(&other.z).map(|(a, b)| a + b).collect(),
            w: self.w.iter().zip(&other.w).map(|(a, b)| a + b).collect(),
        }
    }

    fn degree_weighted(&self) -> i32 {
        let dz: i32 = self.z.iter().map(|&e| e as i32).sum();
        let dw: i32 = self.w.iter().map(|&e| e as i32).sum();
        dz + 2 * dw
    }
}

type Coeffs = BTreeMap<FieldMono, CRat>;

fn coeffs_add_term(c: &mut Coeffs, mono: FieldMono, v: CRat) {
    if v.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match c.entry(mono) {
        Entry::Occupied(mut e) => {
            let s = e.get().clone() + v;
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
        Entry::Vacant(e) => {
            e.insert(v);
        }
    }
}

/// Partial derivative of a holomorphic coefficient polynomial.
fn coeffs_derive(c: &Coeffs, by: Target) -> Coeffs {
    let mut out = Coeffs::new();
    for (m, v) in c {
        let (exp, mut stripped) = match by {
            Target::Dz(i) => (m.z[i], m.clone()),
            Target::Dw(j) => (m.w[j], m.clone()),
        };
        if exp == 0 {
            continue;
        }
        match by {
            Target::Dz(i) => stripped.z[i] -= 1,
            Target::Dw(j) => stripped.w[j] -= 1,
        }
        let factor = CRat::new(Rat::from_integer((exp as i64).into()), Rat::zero());
        coeffs_add_term(&mut out, stripped, v.clone() * factor);
    }
    out
}

/// A polynomial vector field `sum f_i dz_i + sum g_j dw_j` with holomorphic
/// polynomial coefficients in `(z, w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    n: usize,
    k: usize,
    terms: BTreeMap<(Target, FieldMono), CRat>,
}

impl PolyVectorField {
    pub fn zero(n: usize, k: usize) -> Self {
        PolyVectorField {
            n,
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn add_term(&mut self, target: Target, mono: FieldMono, c: CRat) {
        if c.is_zero() {
            return;
        }
        assert_eq!(mono.z.len(), self.n);
        assert_eq!(mono.w.len(), self.k);
        match target {
            Target::Dz(i) => assert!(i < self.n),
            Target::Dw(j) => assert!(j < self.k),
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((target, mono)) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Target, FieldMono), &CRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.n, self.k), (other.n, other.k), "dimension mismatch");
        let mut out = self.clone();
        for ((t, m), c) in &other.terms {
            out.add_term(*t, m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = Self::zero(self.n, self.k);
        if c.is_zero() {
            return out;
        }
        for ((t, m), v) in &self.terms {
            out.terms.insert((*t, m.clone()), v.clone() * c.clone());
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> Self {
        self.scale(&CRat::new(c.clone(), Rat::zero()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&crate::scalar::crat_int(-1, 0)))
    }

    /// Coefficient polynomial of one coordinate direction.
    fn coeff_of(&self, target: Target) -> Coeffs {
        let mut out = Coeffs::new();
        for ((t, m), c) in &self.terms {
            if *t == target {
                out.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Applies the field as a derivation to a holomorphic polynomial.
    fn apply(&self, poly: &Coeffs) -> Coeffs {
        let mut out = Coeffs::new();
        let mut derivatives: BTreeMap<Target, Coeffs> = BTreeMap::new();
        for ((t, m), c) in &self.terms {
            let d = derivatives
                .entry(*t)
                .or_insert_with(|| coeffs_derive(poly, *t));
            for (dm, dv) in d.iter() {
                coeffs_add_term(&mut out, m.mul(dm), c.clone() * dv.clone());
            }
        }
        out
    }

    /// Common weight of all terms if the field is weight-homogeneous, where
    /// `z` has weight 1, `w` weight 2, `d/dz` weight -1, `d/dw` weight -2.
    /// The zero field has no weight.
    pub fn weight_of(&self) -> Option<i32> {
        let mut weight = None;
        for ((t, m), _) in &self.terms {
            let target_weight = match t {
                Target::Dz(_) => 1,
                Target::Dw(_) => 2,
            };
            let w = m.degree_weighted() - target_weight;
            match weight {
                None => weight = Some(w),
                Some(prev) if prev != w => return None,
                _ => {}
            }
        }
        weight
    }
}

/// Formal commutator `[X, Y] = X(Y) - Y(X)`, computed by exact polynomial
/// differentiation. Bilinear and antisymmetric. Panics on mismatched `(n,k)`.
pub fn bracket(x: &PolyVectorField, y: &PolyVectorField) -> PolyVectorField {
    assert_eq!(
        (x.n, x.k),
        (y.n, y.k),
        "bracket requires fields on the same space"
    );
    let mut out = PolyVectorField::zero(x.n, x.k);
    let targets = (0..x.n)
        .map(Target::Dz)
        .chain((0..x.k).map(Target::Dw));
    for t in targets {
        let xy = x.apply(&y.coeff_of(t));
        let yx = y.apply(&x.coeff_of(t));
        for (m, c) in xy {
            out.add_term(t, m, c);
        }
        for (m, c) in yx {
            out.add_term(t, m, czero() - c);
        }
    }
    out
}

/// Decides whether the real part of `x` is tangent to the quadric `Q_H`.
///
/// For each defining function `rho_j = (w_j - wbar_j)/2i - H^j(z,z)` the
/// residue `2 Re(x rho_j)` is expanded as a polynomial in `(z, zbar, u)`
/// after substituting `w = u + i H(z,z)`; the field is tangent iff every
/// residue is identically zero.
pub fn tangency_check(x: &PolyVectorField, pack: &HermitianFormPack) -> bool {
    assert_eq!(
        (x.n, x.k),
        (pack.n(), pack.k()),
        "field and pack dimensions must agree"
    );
    let n = x.n;
    let k = x.k;
    let layout = VarLayout::new(n, k);

    let to_cpoly = |coeffs: &Coeffs| -> CPoly {
        let mut p = CPoly::zero(layout);
        for (m, c) in coeffs {
            let mut mono = vec![0u8; layout.len()];
            for (i, &e) in m.z.iter().enumerate() {
                mono[layout.z(i)] = e;
            }
            for (j, &e) in m.w.iter().enumerate() {
                mono[layout.w(j)] = e;
            }
            p.add_term(mono, c.clone());
        }
        p
    };

    // H^l(z,z) as a polynomial in (z, zbar).
    let h_poly = |l: usize| -> CPoly {
        let mut p = CPoly::zero(layout);
        for a in 0..n {
            for b in 0..n {
                let c = pack.mat(l).at(a, b);
                if c.is_zero() {
                    continue;
                }
                let mut mono = vec![0u8; layout.len()];
                mono[layout.zbar(a)] = 1;
                mono[layout.z(b)] += 1;
                p.add_term(mono, c.clone());
            }
        }
        p
    };

    let minus_half_i = CRat::new(Rat::zero(), Rat::new((-1).into(), 2.into()));
    let f: Vec<CPoly> = (0..n).map(|i| to_cpoly(&x.coeff_of(Target::Dz(i)))).collect();
    let g: Vec<CPoly> = (0..k).map(|j| to_cpoly(&x.coeff_of(Target::Dw(j)))).collect();

    for j in 0..k {
        // x(rho_j) = g_j / (2i) - H^j(f, z), with H^j(f, z) = sum_b f_b * (z^H H^j)_b.
        let mut applied = g[j].scale(&minus_half_i);
        for b in 0..n {
            if f[b].is_zero() {
                continue;
            }
            let mut row = CPoly::zero(layout);
            for a in 0..n {
                let c = pack.mat(j).at(a, b);
                if c.is_zero() {
                    continue;
                }
                let mut mono = vec![0u8; layout.len()];
                mono[layout.zbar(a)] = 1;
                row.add_term(mono, c.clone());
            }
            applied = applied.sub(&f[b].mul(&row));
        }
        let mut residue = applied.add(&applied.conj());
        // Substitute w = u + i H(z,z), wbar = u - i H(z,z).
        for l in 0..k {
            let u = CPoly::var(layout, layout.u(l));
            let h = h_poly(l);
            let iih = h.scale(&crate::scalar::ci());
            residue = residue.substitute(layout.w(l), &u.add(&iih));
            residue = residue.substitute(layout.wbar(l), &u.sub(&iih));
        }
        if !residue.is_zero() {
            return false;
        }
    }
    true
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((t, m), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", crate::scalar::format_crat(c))?;
            for (i, &e) in m.z.iter().enumerate() {
                if e == 1 {
                    write!(f, "*z{}", i + 1)?;
                } else if e > 1 {
                    write!(f, "*z{}^{}", i + 1, e)?;
                }
            }
            for (j, &e) in m.w.iter().enumerate() {
                if e == 1 {
                    write!(f, "*w{}", j + 1)?;
                } else if e > 1 {
                    write!(f, "*w{}^{}", j + 1, e)?;
                }
            }
            match t {
                Target::Dz(i) => write!(f, " d/dz{}", i + 1)?,
                Target::Dw(j) => write!(f, " d/dw{}", j + 1)?,
            }
        }
        Ok(())
    }
}
