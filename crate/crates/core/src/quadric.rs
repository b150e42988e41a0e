//! Direct construction of the graded symmetry algebra
//! `g = g^{-2} + g^{-1} + g^0 + g^1 + g^2` of a non-degenerate quadric:
//! the negative levels from their explicit parametrization, the nonnegative
//! levels by compiling the defining polynomial identities to exact linear
//! systems, plus structure constants, Jacobi audits, and the weight-3
//! solvability check.

use crate::fields::{bracket, FieldMono, PolyVectorField, Target};
use crate::forms::{check_nondegenerate, HermitianFormPack, NondegeneracyVerdict};
use crate::linalg::{GaussMatrix, RatMatrix};
use crate::poly::{match_many, Affine, CPoly, ParametricPolynomial, VarLayout};
use crate::scalar::{czero, crat_int, CRat, Rat};
use num_traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("degenerate form pack: independent={} trivial_kernel={}", .0.independent, .0.trivial_kernel)]
    Degenerate(NondegeneracyVerdict),
    #[error("bracket of basis {i} (level {level_a}) and basis {j} (level {level_b}) not in graded span")]
    ClosureFailure {
        level_a: i32,
        level_b: i32,
        i: usize,
        j: usize,
    },
}

fn require_nondegenerate(pack: &HermitianFormPack) -> Result<(), AlgebraError> {
    let verdict = check_nondegenerate(pack);
    if verdict.passes() {
        Ok(())
    } else {
        Err(AlgebraError::Degenerate(verdict))
    }
}

/// Index into the packed upper triangle `(a <= b)` of a `dim x dim` symmetric
/// coefficient array.
fn tri_index(dim: usize, a: usize, b: usize) -> usize {
    debug_assert!(a <= b && b < dim);
    a * dim - a * (a + 1) / 2 + b
}

fn tri_count(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// `H^l(z,z)` as a concrete polynomial in `(z, zbar)`.
fn hzz_poly(pack: &HermitianFormPack, layout: VarLayout, l: usize) -> CPoly {
    let mut p = CPoly::zero(layout);
    for a in 0..pack.n() {
        for b in 0..pack.n() {
            let c = pack.mat(l).at(a, b);
            if c.is_zero() {
                continue;
            }
            let mut mono = vec![0u8; layout.len()];
            mono[layout.zbar(a)] += 1;
            mono[layout.z(b)] += 1;
            p.add_term(mono, c.clone());
        }
    }
    p
}

/// `(H^j z)_i` as a polynomial in `z`.
fn hz_row(pack: &HermitianFormPack, layout: VarLayout, j: usize, i: usize) -> CPoly {
    let mut p = CPoly::zero(layout);
    for b in 0..pack.n() {
        let c = pack.mat(j).at(i, b);
        if c.is_zero() {
            continue;
        }
        let mut mono = vec![0u8; layout.len()];
        mono[layout.z(b)] += 1;
        p.add_term(mono, c.clone());
    }
    p
}

/// Element `q d/dw` of level -2, `q` real.
#[derive(Debug, Clone)]
pub struct GMinus2Element {
    pub q: Vec<Rat>,
}

/// Element `p d/dz + 2i H(z,p) d/dw` of level -1, `p` complex.
#[derive(Debug, Clone)]
pub struct GMinus1Element {
    pub p: Vec<CRat>,
}

/// Element `C z d/dz + s w d/dw` of level 0.
#[derive(Debug, Clone)]
pub struct G0Element {
    pub c_mat: GaussMatrix,
    pub s_mat: RatMatrix,
}

/// Element `(a w + A(z,z)) d/dz + 2i H(z, a wbar) d/dw` of level 1.
/// `a_form` holds the packed symmetric coefficients `A^i_{bc}`, `b <= c`.
#[derive(Debug, Clone)]
pub struct G1Element {
    pub a_mat: GaussMatrix,
    pub a_form: Vec<CRat>,
}

/// Element `B(z,w) d/dz + r(w,w) d/dw` of level 2. `b_form` holds `B^i_{bl}`
/// row-major; `r_form` the packed symmetric coefficients `r^j_{lm}`, `l <= m`.
#[derive(Debug, Clone)]
pub struct G2Element {
    pub b_form: Vec<CRat>,
    pub r_form: Vec<CRat>,
}

impl GMinus2Element {
    pub fn realize(&self, n: usize, k: usize) -> PolyVectorField {
        let mut x = PolyVectorField::zero(n, k);
        for (j, q) in self.q.iter().enumerate() {
            x.add_term(
                Target::Dw(j),
                FieldMono::unit(n, k),
                CRat::new(q.clone(), Rat::zero()),
            );
        }
        x
    }
}

impl GMinus1Element {
    pub fn realize(&self, pack: &HermitianFormPack) -> PolyVectorField {
        let (n, k) = (pack.n(), pack.k());
        let mut x = PolyVectorField::zero(n, k);
        for (i, p) in self.p.iter().enumerate() {
            x.add_term(Target::Dz(i), FieldMono::unit(n, k), p.clone());
        }
        // 2i H^j(z, p) = 2i sum_{a,b} conj(p_a) H^j_{ab} z_b
        for j in 0..k {
            for b in 0..n {
                let mut c = czero();
                for a in 0..n {
                    c = c + crate::scalar::cconj(&self.p[a]) * pack.mat(j).at(a, b).clone();
                }
                x.add_term(Target::Dw(j), FieldMono::z_var(n, k, b), crat_int(0, 2) * c);
            }
        }
        x
    }
}

impl G0Element {
    pub fn realize(&self, n: usize, k: usize) -> PolyVectorField {
        let mut x = PolyVectorField::zero(n, k);
        for i in 0..n {
            for b in 0..n {
                x.add_term(
                    Target::Dz(i),
                    FieldMono::z_var(n, k, b),
                    self.c_mat.at(i, b).clone(),
                );
            }
        }
        for j in 0..k {
            for l in 0..k {
                x.add_term(
                    Target::Dw(j),
                    FieldMono::w_var(n, k, l),
                    CRat::new(self.s_mat.at(j, l).clone(), Rat::zero()),
                );
            }
        }
        x
    }
}

impl G1Element {
    pub fn realize(&self, pack: &HermitianFormPack) -> PolyVectorField {
        let (n, k) = (pack.n(), pack.k());
        let mut x = PolyVectorField::zero(n, k);
        for i in 0..n {
            for l in 0..k {
                x.add_term(
                    Target::Dz(i),
                    FieldMono::w_var(n, k, l),
                    self.a_mat.at(i, l).clone(),
                );
            }
            for b in 0..n {
                for c in b..n {
                    let coeff = self.a_form[i * tri_count(n) + tri_index(n, b, c)].clone();
                    let mut mono = FieldMono::unit(n, k);
                    mono.z[b] += 1;
                    mono.z[c] += 1;
                    let mult = if b == c { crat_int(1, 0) } else { crat_int(2, 0) };
                    x.add_term(Target::Dz(i), mono, coeff * mult);
                }
            }
        }
        // 2i H^j(z, a wbar): coefficient of w_l z_b is 2i sum_c conj(a_{cl}) H^j_{cb}
        for j in 0..k {
            for l in 0..k {
                for b in 0..n {
                    let mut c = czero();
                    for cc in 0..n {
                        c = c
                            + crate::scalar::cconj(self.a_mat.at(cc, l))
                                * pack.mat(j).at(cc, b).clone();
                    }
                    let mut mono = FieldMono::unit(n, k);
                    mono.z[b] += 1;
                    mono.w[l] += 1;
                    x.add_term(Target::Dw(j), mono, crat_int(0, 2) * c);
                }
            }
        }
        x
    }
}

impl G2Element {
    pub fn realize(&self, n: usize, k: usize) -> PolyVectorField {
        let mut x = PolyVectorField::zero(n, k);
        for i in 0..n {
            for b in 0..n {
                for l in 0..k {
                    let coeff = self.b_form[i * n * k + b * k + l].clone();
                    let mut mono = FieldMono::unit(n, k);
                    mono.z[b] += 1;
                    mono.w[l] += 1;
                    x.add_term(Target::Dz(i), mono, coeff);
                }
            }
        }
        for j in 0..k {
            for l in 0..k {
                for m in l..k {
                    let coeff = self.r_form[j * tri_count(k) + tri_index(k, l, m)].clone();
                    let mut mono = FieldMono::unit(n, k);
                    mono.w[l] += 1;
                    mono.w[m] += 1;
                    let mult = if l == m { crat_int(1, 0) } else { crat_int(2, 0) };
                    x.add_term(Target::Dw(j), mono, coeff * mult);
                }
            }
        }
        x
    }
}

/// The `k` translation generators `e_j d/dw` and the `2n` generators for
/// `p in {e_1..e_n, i e_1..i e_n}`.
pub fn build_negative_basis(
    pack: &HermitianFormPack,
) -> Result<(Vec<GMinus2Element>, Vec<GMinus1Element>), AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());
    let minus2 = (0..k)
        .map(|j| {
            let mut q = vec![Rat::zero(); k];
            q[j] = Rat::from_integer(1.into());
            GMinus2Element { q }
        })
        .collect();
    let mut minus1 = Vec::with_capacity(2 * n);
    for unit in [crat_int(1, 0), crat_int(0, 1)] {
        for i in 0..n {
            let mut p = vec![czero(); n];
            p[i] = unit.clone();
            minus1.push(GMinus1Element { p });
        }
    }
    Ok((minus2, minus1))
}

/// Column indices of the realified unknowns of each solver. Complex unknown
/// number `t` occupies columns `2t` (re) and `2t+1` (im); trailing real
/// unknowns occupy one column each.
struct G0Columns {
    n: usize,
    k: usize,
}

impl G0Columns {
    fn total(&self) -> usize {
        2 * self.n * self.n + self.k * self.k
    }
    fn c(&self, i: usize, b: usize) -> Affine {
        let base = 2 * (i * self.n + b);
        Affine::complex_unknown(base, base + 1)
    }
    fn s(&self, j: usize, l: usize) -> Affine {
        Affine::unknown(2 * self.n * self.n + j * self.k + l)
    }
}

/// Basis of the solution space of `2 Re H(Cz, z) = s H(z,z)`.
pub fn solve_g0(pack: &HermitianFormPack) -> Result<Vec<G0Element>, AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());
    let layout = VarLayout::new(n, k);
    let cols = G0Columns { n, k };

    let mut identities = Vec::with_capacity(k);
    for j in 0..k {
        let mut lhs = ParametricPolynomial::zero(layout, cols.total());
        for alpha in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let h = pack.mat(j).at(alpha, c);
                    if h.is_zero() {
                        continue;
                    }
                    let mut mono = vec![0u8; layout.len()];
                    mono[layout.zbar(alpha)] += 1;
                    mono[layout.z(b)] += 1;
                    lhs.add_term(mono, cols.c(c, b).scale(h));
                }
            }
        }
        let mut identity = lhs.add(&lhs.conj());
        for l in 0..k {
            identity.add_cpoly_times(&hzz_poly(pack, layout, l), &cols.s(j, l).neg());
        }
        identities.push(identity);
    }

    let system = match_many(&identities);
    let basis = system.nullspace();
    Ok(basis
        .into_iter()
        .map(|v| {
            let mut c_mat = GaussMatrix::zeros(n, n);
            for i in 0..n {
                for b in 0..n {
                    let base = 2 * (i * n + b);
                    *c_mat.at_mut(i, b) = CRat::new(v[base].clone(), v[base + 1].clone());
                }
            }
            let mut s_mat = RatMatrix::zeros(k, k);
            for j in 0..k {
                for l in 0..k {
                    *s_mat.at_mut(j, l) = v[2 * n * n + j * k + l].clone();
                }
            }
            G0Element { c_mat, s_mat }
        })
        .collect())
}

struct G1Columns {
    n: usize,
    k: usize,
}

impl G1Columns {
    fn total(&self) -> usize {
        2 * self.n * self.k + 2 * self.n * tri_count(self.n)
    }
    fn a(&self, i: usize, l: usize) -> Affine {
        let base = 2 * (i * self.k + l);
        Affine::complex_unknown(base, base + 1)
    }
    fn a_form(&self, i: usize, b: usize, c: usize) -> Affine {
        let (b, c) = if b <= c { (b, c) } else { (c, b) };
        let base = 2 * self.n * self.k + 2 * (i * tri_count(self.n) + tri_index(self.n, b, c));
        Affine::complex_unknown(base, base + 1)
    }
}

/// Basis of the solution space of `H(A(z,z), z) = 2i H(z, a H(z,z))` with
/// `A` symmetric.
pub fn solve_g1(pack: &HermitianFormPack) -> Result<Vec<G1Element>, AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());
    let layout = VarLayout::new(n, k);
    let cols = G1Columns { n, k };

    let mut identities = Vec::with_capacity(k);
    for j in 0..k {
        let mut lhs = ParametricPolynomial::zero(layout, cols.total());
        for alpha in 0..n {
            for i in 0..n {
                let h = pack.mat(j).at(alpha, i);
                if h.is_zero() {
                    continue;
                }
                for b in 0..n {
                    for c in 0..n {
                        let mut mono = vec![0u8; layout.len()];
                        mono[layout.zbar(alpha)] += 1;
                        mono[layout.z(b)] += 1;
                        mono[layout.z(c)] += 1;
                        lhs.add_term(mono, cols.a_form(i, b, c).scale(h));
                    }
                }
            }
        }
        let mut rhs = ParametricPolynomial::zero(layout, cols.total());
        for i in 0..n {
            for l in 0..k {
                let cpoly = hzz_poly(pack, layout, l).mul(&hz_row(pack, layout, j, i));
                rhs.add_cpoly_times(&cpoly, &cols.a(i, l).conj());
            }
        }
        identities.push(lhs.sub(&rhs.scale(&crat_int(0, 2))));
    }

    let system = match_many(&identities);
    Ok(system
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut a_mat = GaussMatrix::zeros(n, k);
            for i in 0..n {
                for l in 0..k {
                    let base = 2 * (i * k + l);
                    *a_mat.at_mut(i, l) = CRat::new(v[base].clone(), v[base + 1].clone());
                }
            }
            let a_form = (0..n * tri_count(n))
                .map(|t| {
                    let base = 2 * n * k + 2 * t;
                    CRat::new(v[base].clone(), v[base + 1].clone())
                })
                .collect();
            G1Element { a_mat, a_form }
        })
        .collect())
}

struct G2Columns {
    n: usize,
    k: usize,
}

impl G2Columns {
    fn total(&self) -> usize {
        2 * self.n * self.n * self.k + 2 * self.k * tri_count(self.k)
    }
    fn b(&self, i: usize, b: usize, l: usize) -> Affine {
        let base = 2 * (i * self.n * self.k + b * self.k + l);
        Affine::complex_unknown(base, base + 1)
    }
    fn r(&self, j: usize, l: usize, m: usize) -> Affine {
        let (l, m) = if l <= m { (l, m) } else { (m, l) };
        let base =
            2 * self.n * self.n * self.k + 2 * (j * tri_count(self.k) + tri_index(self.k, l, m));
        Affine::complex_unknown(base, base + 1)
    }
}

/// Basis of the simultaneous solution space of
/// `Re H(B(z,u), z) = r(H(z,z), u)` and `Im H(B(z,H(z,z)), z) = 0`
/// with `r` symmetric.
pub fn solve_g2(pack: &HermitianFormPack) -> Result<Vec<G2Element>, AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());
    let layout = VarLayout::new(n, k);
    let cols = G2Columns { n, k };

    let mut identities = Vec::with_capacity(2 * k);
    for j in 0..k {
        // Re H^j(B(z,u), z) - r^j(H(z,z), u)
        let mut p = ParametricPolynomial::zero(layout, cols.total());
        for alpha in 0..n {
            for i in 0..n {
                let h = pack.mat(j).at(alpha, i);
                if h.is_zero() {
                    continue;
                }
                for b in 0..n {
                    for l in 0..k {
                        let mut mono = vec![0u8; layout.len()];
                        mono[layout.zbar(alpha)] += 1;
                        mono[layout.z(b)] += 1;
                        mono[layout.u(l)] += 1;
                        p.add_term(mono, cols.b(i, b, l).scale(h));
                    }
                }
            }
        }
        let mut identity = p.re();
        for l in 0..k {
            for m in 0..k {
                let cpoly = hzz_poly(pack, layout, l).mul(&CPoly::var(layout, layout.u(m)));
                identity.add_cpoly_times(&cpoly, &cols.r(j, l, m).neg());
            }
        }
        identities.push(identity);
    }
    for j in 0..k {
        // Im H^j(B(z, H(z,z)), z)
        let mut p = ParametricPolynomial::zero(layout, cols.total());
        for alpha in 0..n {
            for i in 0..n {
                let h = pack.mat(j).at(alpha, i);
                if h.is_zero() {
                    continue;
                }
                for b in 0..n {
                    for l in 0..k {
                        let cpoly = CPoly::var(layout, layout.zbar(alpha))
                            .mul(&CPoly::var(layout, layout.z(b)))
                            .mul(&hzz_poly(pack, layout, l))
                            .scale(h);
                        p.add_cpoly_times(&cpoly, &cols.b(i, b, l));
                    }
                }
            }
        }
        identities.push(p.im());
    }

    let system = match_many(&identities);
    Ok(system
        .nullspace()
        .into_iter()
        .map(|v| {
            let b_form = (0..n * n * k)
                .map(|t| CRat::new(v[2 * t].clone(), v[2 * t + 1].clone()))
                .collect();
            let r_form = (0..k * tri_count(k))
                .map(|t| {
                    let base = 2 * n * n * k + 2 * t;
                    CRat::new(v[base].clone(), v[base + 1].clone())
                })
                .collect();
            G2Element { b_form, r_form }
        })
        .collect())
}

/// Expresses fields exactly in a fixed basis of fields, by realified
/// coefficient matching over the union of the basis supports.
pub struct FieldSpan {
    slots: Vec<(Target, FieldMono)>,
    matrix: RatMatrix,
}

impl FieldSpan {
    pub fn new(basis: &[PolyVectorField]) -> Self {
        let mut slot_set: BTreeMap<(Target, FieldMono), usize> = BTreeMap::new();
        for f in basis {
            for (key, _) in f.terms() {
                let next = slot_set.len();
                slot_set.entry(key.clone()).or_insert(next);
            }
        }
        let slots: Vec<(Target, FieldMono)> = {
            let mut v: Vec<_> = slot_set.keys().cloned().collect();
            v.sort();
            v
        };
        let index: BTreeMap<_, _> = slots.iter().cloned().zip(0..).collect();
        let mut matrix = RatMatrix::zeros(2 * slots.len(), basis.len());
        for (col, f) in basis.iter().enumerate() {
            for (key, c) in f.terms() {
                let row = 2 * index[key];
                *matrix.at_mut(row, col) = c.re.clone();
                *matrix.at_mut(row + 1, col) = c.im.clone();
            }
        }
        FieldSpan { slots, matrix }
    }

    /// Real coordinates of `field` in the basis, or `None` if it is outside
    /// the span.
    pub fn express(&self, field: &PolyVectorField) -> Option<Vec<Rat>> {
        let index: BTreeMap<_, _> = self.slots.iter().cloned().zip(0..self.slots.len()).collect();
        let mut rhs = vec![Rat::zero(); 2 * self.slots.len()];
        for (key, c) in field.terms() {
            let slot = index.get(key)?;
            rhs[2 * slot] = c.re.clone();
            rhs[2 * slot + 1] = c.im.clone();
        }
        self.matrix.solve(&rhs)
    }
}

/// Basis fields per level (-2..=2), structure constants over the
/// concatenated basis, and per-level dimensions.
#[derive(Debug, Clone)]
pub struct GradedAlgebraTable {
    pack: HermitianFormPack,
    level_fields: [Vec<PolyVectorField>; 5],
    dims: [usize; 5],
    offsets: [usize; 5],
    total: usize,
    constants: Vec<Vec<Vec<Rat>>>,
}

fn level_slot(level: i32) -> usize {
    debug_assert!((-2..=2).contains(&level));
    (level + 2) as usize
}

impl GradedAlgebraTable {
    pub fn pack(&self) -> &HermitianFormPack {
        &self.pack
    }

    /// Per-level dimensions for levels -2..=2.
    pub fn dims(&self) -> &[usize; 5] {
        &self.dims
    }

    pub fn dim_level(&self, level: i32) -> usize {
        self.dims[level_slot(level)]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn offset(&self, level: i32) -> usize {
        self.offsets[level_slot(level)]
    }

    pub fn fields_at(&self, level: i32) -> &[PolyVectorField] {
        &self.level_fields[level_slot(level)]
    }

    pub fn level_of_index(&self, idx: usize) -> i32 {
        for level in -2..=2 {
            let s = self.offset(level);
            if idx >= s && idx < s + self.dim_level(level) {
                return level;
            }
        }
        unreachable!("index out of range")
    }

    pub fn basis_field(&self, idx: usize) -> &PolyVectorField {
        let level = self.level_of_index(idx);
        &self.fields_at(level)[idx - self.offset(level)]
    }

    /// Structure constants of `[e_i, e_j]` over the concatenated basis.
    pub fn constant(&self, i: usize, j: usize) -> &[Rat] {
        &self.constants[i][j]
    }

    /// `[x, y]` for coordinate vectors over the concatenated basis.
    pub fn bracket_coords(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.total];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                for (m, c) in self.constants[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[m] = out[m].clone() + xi.clone() * yj.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    /// The bracket pairing `level -1 x level -1 -> level -2` is onto.
    pub fn negative_bracket_surjective(&self) -> bool {
        let m1 = self.dim_level(-1);
        let k = self.dim_level(-2);
        let off = self.offset(-1);
        let mut cols = Vec::new();
        for i in 0..m1 {
            for j in (i + 1)..m1 {
                let c = &self.constants[off + i][off + j];
                cols.push(c[..k].to_vec());
            }
        }
        if cols.is_empty() {
            return k == 0;
        }
        let mut m = RatMatrix::zeros(k, cols.len());
        for (col, v) in cols.iter().enumerate() {
            for (row, e) in v.iter().enumerate() {
                *m.at_mut(row, col) = e.clone();
            }
        }
        m.rank() == k
    }
}

/// Realizes all five levels as vector fields, computes every pairwise
/// bracket, and expresses each bracket in the graded basis.
///
/// Fails with [`AlgebraError::ClosureFailure`] if any bracket falls outside
/// the span of its target level (or is nonzero when the target level is
/// empty); that would signal an implementation bug, never a property of a
/// non-degenerate pack.
pub fn assemble_table(pack: &HermitianFormPack) -> Result<GradedAlgebraTable, AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());

    let (minus2, minus1) = build_negative_basis(pack)?;
    let level_fields: [Vec<PolyVectorField>; 5] = [
        minus2.iter().map(|e| e.realize(n, k)).collect(),
        minus1.iter().map(|e| e.realize(pack)).collect(),
        solve_g0(pack)?.iter().map(|e| e.realize(n, k)).collect(),
        solve_g1(pack)?.iter().map(|e| e.realize(pack)).collect(),
        solve_g2(pack)?.iter().map(|e| e.realize(n, k)).collect(),
    ];

    let dims: [usize; 5] = std::array::from_fn(|s| level_fields[s].len());
    let mut offsets = [0usize; 5];
    for s in 1..5 {
        offsets[s] = offsets[s - 1] + dims[s - 1];
    }
    let total = offsets[4] + dims[4];

    let spans: Vec<FieldSpan> = level_fields.iter().map(|f| FieldSpan::new(f)).collect();

    let mut constants = vec![vec![vec![Rat::zero(); total]; total]; total.max(1)];
    constants.truncate(total);

    let flat: Vec<(usize, i32, &PolyVectorField)> = (-2..=2)
        .flat_map(|level| {
            let s = level_slot(level);
            level_fields[s]
                .iter()
                .enumerate()
                .map(move |(i, f)| (offsets[s] + i, level, f))
                .collect::<Vec<_>>()
        })
        .collect();

    for a in 0..flat.len() {
        for b in (a + 1)..flat.len() {
            let (i, level_a, fa) = flat[a];
            let (j, level_b, fb) = flat[b];
            let br = bracket(fa, fb);
            let target = level_a + level_b;
            let coords = if (-2..=2).contains(&target) {
                let local = spans[level_slot(target)].express(&br).ok_or(
                    AlgebraError::ClosureFailure {
                        level_a,
                        level_b,
                        i,
                        j,
                    },
                )?;
                let mut full = vec![Rat::zero(); total];
                let off = offsets[level_slot(target)];
                for (t, c) in local.into_iter().enumerate() {
                    full[off + t] = c;
                }
                full
            } else {
                if !br.is_zero() {
                    return Err(AlgebraError::ClosureFailure {
                        level_a,
                        level_b,
                        i,
                        j,
                    });
                }
                vec![Rat::zero(); total]
            };
            constants[j][i] = coords.iter().map(|c| -c.clone()).collect();
            constants[i][j] = coords;
        }
    }

    Ok(GradedAlgebraTable {
        pack: pack.clone(),
        level_fields,
        dims,
        offsets,
        total,
        constants,
    })
}

/// Exact Jacobi audit of a structure-constant table: antisymmetry plus the
/// cyclic identity on every basis triple.
pub fn jacobi_check(table: &GradedAlgebraTable) -> bool {
    let d = table.total;
    for i in 0..d {
        if table.constants[i][i].iter().any(|c| !c.is_zero()) {
            return false;
        }
        for j in (i + 1)..d {
            for m in 0..d {
                if table.constants[i][j][m] != -table.constants[j][i][m].clone() {
                    return false;
                }
            }
        }
    }
    // with antisymmetry verified, triples with repeats are automatic
    let ad = |coords: &[Rat], l: usize| -> Vec<Rat> {
        let mut out = vec![Rat::zero(); d];
        for (e, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (m, v) in table.constants[e][l].iter().enumerate() {
                if !v.is_zero() {
                    out[m] = out[m].clone() + c.clone() * v.clone();
                }
            }
        }
        out
    };
    for i in 0..d {
        for j in (i + 1)..d {
            for l in (j + 1)..d {
                let t1 = ad(&table.constants[i][j], l);
                let t2 = ad(&table.constants[j][l], i);
                let t3 = ad(&table.constants[l][i], j);
                for m in 0..d {
                    if !(t1[m].clone() + t2[m].clone() + t3[m].clone()).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Builds the weight-3 linear system in the unknowns `(D', t')` and returns
/// `true` iff its nullspace is `{0}`: no weight-3 field of the admissible
/// shape is tangent to the quadric.
pub fn weight3_nullcheck(pack: &HermitianFormPack) -> Result<bool, AlgebraError> {
    require_nondegenerate(pack)?;
    let (n, k) = (pack.n(), pack.k());
    let layout = VarLayout::new(n, k);
    let t_n = tri_count(n);
    let t_k = tri_count(k);
    let n_unknowns = 2 * n * t_n * k + 2 * n * t_k;
    let d_idx = |i: usize, a: usize, b: usize, l: usize| -> Affine {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let base = 2 * ((i * t_n + tri_index(n, a, b)) * k + l);
        Affine::complex_unknown(base, base + 1)
    };
    let t_idx = |i: usize, l: usize, m: usize| -> Affine {
        let (l, m) = if l <= m { (l, m) } else { (m, l) };
        let base = 2 * n * t_n * k + 2 * (i * t_k + tri_index(k, l, m));
        Affine::complex_unknown(base, base + 1)
    };

    let mut identities = Vec::with_capacity(2 * k);
    for j in 0..k {
        // H^j(D'(z,z,u), z) - 4i H^j(z, t'(u, H(z,z)))
        let mut lhs = ParametricPolynomial::zero(layout, n_unknowns);
        for alpha in 0..n {
            for i in 0..n {
                let h = pack.mat(j).at(alpha, i);
                if h.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        for l in 0..k {
                            let mut mono = vec![0u8; layout.len()];
                            mono[layout.zbar(alpha)] += 1;
                            mono[layout.z(a)] += 1;
                            mono[layout.z(b)] += 1;
                            mono[layout.u(l)] += 1;
                            lhs.add_term(mono, d_idx(i, a, b, l).scale(h));
                        }
                    }
                }
            }
        }
        let mut rhs = ParametricPolynomial::zero(layout, n_unknowns);
        for i in 0..n {
            for l in 0..k {
                for m in 0..k {
                    let cpoly = CPoly::var(layout, layout.u(l))
                        .mul(&hzz_poly(pack, layout, m))
                        .mul(&hz_row(pack, layout, j, i));
                    rhs.add_cpoly_times(&cpoly, &t_idx(i, l, m).conj());
                }
            }
        }
        identities.push(lhs.sub(&rhs.scale(&crat_int(0, 4))));
    }
    for j in 0..k {
        // H^j(D'(z,z,H(z,z)), z)
        let mut p = ParametricPolynomial::zero(layout, n_unknowns);
        for alpha in 0..n {
            for i in 0..n {
                let h = pack.mat(j).at(alpha, i);
                if h.is_zero() {
                    continue;
                }
                for a in 0..n {
                    for b in 0..n {
                        for l in 0..k {
                            let cpoly = CPoly::var(layout, layout.zbar(alpha))
                                .mul(&CPoly::var(layout, layout.z(a)))
                                .mul(&CPoly::var(layout, layout.z(b)))
                                .mul(&hzz_poly(pack, layout, l))
                                .scale(h);
                            p.add_cpoly_times(&cpoly, &d_idx(i, a, b, l));
                        }
                    }
                }
            }
        }
        identities.push(p);
    }

    let system = match_many(&identities);
    Ok(system.nullspace().is_empty())
}
