//! R^k-valued Hermitian form packs: the data defining a quadric
//! `Q_H = { Im w = H(z,z) }`, their JSON serialization, the two
//! non-degeneracy conditions, and the builtin test catalog.
//!
//! Convention: `H^j(z, z')` is linear in `z` and conjugate-linear in `z'`,
//! i.e. `H^j(z, z') = (z')^H M_j z` for the stored Hermitian matrix `M_j`.

use crate::linalg::{GaussMatrix, RatMatrix};
use crate::scalar::{cconj, czero, format_rat, parse_rat, CRat, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("invalid form pack JSON: {0}")]
    Json(String),
    #[error("invalid rational entry {text:?} in form {form} at ({row},{col})")]
    BadEntry {
        form: usize,
        row: usize,
        col: usize,
        text: String,
    },
    #[error("form {form} is not Hermitian: entry ({row},{col}) != conj(entry ({col},{row}))")]
    NonHermitian { form: usize, row: usize, col: usize },
    #[error("dimension mismatch: declared n={n}, k={k} but form {form} has shape {got_rows}x{got_cols}")]
    DimensionMismatch {
        n: usize,
        k: usize,
        form: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("declared k={k} but {got} matrices were provided")]
    FormCountMismatch { k: usize, got: usize },
    #[error("unknown catalog name {0:?}")]
    UnknownCatalog(String),
}

/// A pack of `k` Hermitian `n x n` matrices, one R^k-valued Hermitian form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianFormPack {
    n: usize,
    k: usize,
    mats: Vec<GaussMatrix>,
}

impl HermitianFormPack {
    pub fn new(n: usize, k: usize, mats: Vec<GaussMatrix>) -> Result<Self, FormError> {
        if mats.len() != k {
            return Err(FormError::FormCountMismatch { k, got: mats.len() });
        }
        for (j, m) in mats.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(FormError::DimensionMismatch {
                    n,
                    k,
                    form: j,
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                });
            }
            if let Some((row, col)) = m.hermitian_defect() {
                return Err(FormError::NonHermitian { form: j, row, col });
            }
        }
        Ok(HermitianFormPack { n, k, mats })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mats(&self) -> &[GaussMatrix] {
        &self.mats
    }

    pub fn mat(&self, j: usize) -> &GaussMatrix {
        &self.mats[j]
    }

    /// `H^j z` as a column vector.
    pub fn mat_vec(&self, j: usize, z: &[CRat]) -> Vec<CRat> {
        self.mats[j].mul_vec(z)
    }

    /// `H^j(z, z') = (z')^H M_j z`.
    pub fn eval(&self, j: usize, z: &[CRat], z_prime: &[CRat]) -> CRat {
        let mz = self.mat_vec(j, z);
        let mut acc = czero();
        for (a, b) in z_prime.iter().zip(mz.iter()) {
            acc = acc + cconj(a) * b.clone();
        }
        acc
    }

    /// Replaces the pack by `(T H)_j = sum_l T[j][l] H^l`. Used to probe
    /// invariance of non-degeneracy under real recombination.
    pub fn recombine(&self, t: &RatMatrix) -> Result<Self, FormError> {
        assert_eq!(t.rows(), self.k);
        assert_eq!(t.cols(), self.k);
        let mut mats = Vec::with_capacity(self.k);
        for j in 0..self.k {
            let mut m = GaussMatrix::zeros(self.n, self.n);
            for l in 0..self.k {
                let c = t.at(j, l);
                if c.is_zero() {
                    continue;
                }
                for a in 0..self.n {
                    for b in 0..self.n {
                        let cur = m.at(a, b).clone();
                        *m.at_mut(a, b) = cur
                            + CRat::new(c.clone(), Rat::zero()) * self.mats[l].at(a, b).clone();
                    }
                }
            }
            mats.push(m);
        }
        HermitianFormPack::new(self.n, self.k, mats)
    }

    /// Scales every form by a positive rational.
    pub fn scale(&self, lambda: &Rat) -> Self {
        let mut t = RatMatrix::zeros(self.k, self.k);
        for j in 0..self.k {
            *t.at_mut(j, j) = lambda.clone();
        }
        self.recombine(&t).expect("scaling preserves validity")
    }
}

/// Wire format: `{"n":., "k":., "mats":[k][n][n] of ["re","im"]}` with
/// rational strings `p/q`.
#[derive(Debug, Serialize, Deserialize)]
struct PackDoc {
    n: usize,
    k: usize,
    mats: Vec<Vec<Vec<[String; 2]>>>,
}

pub fn parse_form_pack(text: &str) -> Result<HermitianFormPack, FormError> {
    let doc: PackDoc = serde_json::from_str(text).map_err(|e| FormError::Json(e.to_string()))?;
    pack_from_doc(&doc)
}

fn pack_from_doc(doc: &PackDoc) -> Result<HermitianFormPack, FormError> {
    if doc.mats.len() != doc.k {
        return Err(FormError::FormCountMismatch {
            k: doc.k,
            got: doc.mats.len(),
        });
    }
    let mut mats = Vec::with_capacity(doc.k);
    for (j, rows) in doc.mats.iter().enumerate() {
        if rows.len() != doc.n || rows.iter().any(|r| r.len() != doc.n) {
            return Err(FormError::DimensionMismatch {
                n: doc.n,
                k: doc.k,
                form: j,
                got_rows: rows.len(),
                got_cols: rows.first().map_or(0, Vec::len),
            });
        }
        let mut entries = Vec::with_capacity(doc.n * doc.n);
        for (r, row) in rows.iter().enumerate() {
            for (c, [re, im]) in row.iter().enumerate() {
                let parse = |s: &str| {
                    parse_rat(s).map_err(|_| FormError::BadEntry {
                        form: j,
                        row: r,
                        col: c,
                        text: s.to_string(),
                    })
                };
                entries.push(CRat::new(parse(re)?, parse(im)?));
            }
        }
        mats.push(GaussMatrix::new(doc.n, doc.n, entries));
    }
    HermitianFormPack::new(doc.n, doc.k, mats)
}

impl HermitianFormPack {
    fn to_doc(&self) -> PackDoc {
        PackDoc {
            n: self.n,
            k: self.k,
            mats: self
                .mats
                .iter()
                .map(|m| {
                    (0..self.n)
                        .map(|r| {
                            (0..self.n)
                                .map(|c| {
                                    let e = m.at(r, c);
                                    [format_rat(&e.re), format_rat(&e.im)]
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Canonical JSON (sorted keys, rationals as `p/q` strings).
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self.to_doc()).expect("pack serialization");
        serde_json::to_string_pretty(&value).expect("pack serialization")
    }

    /// The pack as a JSON value for embedding in reports.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("pack serialization")
    }
}

/// Evidence that a pack fails a non-degeneracy condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NondegeneracyWitness {
    /// Nonzero real coefficients `c` with `sum_j c_j H^j = 0` (condition (i)).
    DependentCombination(Vec<Rat>),
    /// Nonzero `z` with `H^j z = 0` for every `j` (condition (ii)).
    KernelVector(Vec<CRat>),
}

impl NondegeneracyWitness {
    /// Re-evaluates the witness against the pack and confirms it actually
    /// violates the condition it claims to violate.
    pub fn confirms_violation(&self, pack: &HermitianFormPack) -> bool {
        match self {
            NondegeneracyWitness::DependentCombination(c) => {
                if c.len() != pack.k() || c.iter().all(Zero::is_zero) {
                    return false;
                }
                for a in 0..pack.n() {
                    for b in 0..pack.n() {
                        let mut acc = czero();
                        for (j, cj) in c.iter().enumerate() {
                            acc = acc
                                + CRat::new(cj.clone(), Rat::zero()) * pack.mat(j).at(a, b).clone();
                        }
                        if !acc.is_zero() {
                            return false;
                        }
                    }
                }
                true
            }
            NondegeneracyWitness::KernelVector(z) => {
                if z.len() != pack.n() || z.iter().all(Zero::is_zero) {
                    return false;
                }
                (0..pack.k()).all(|j| pack.mat_vec(j, z).iter().all(Zero::is_zero))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondegeneracyVerdict {
    /// Condition (i): the k scalar forms are linearly independent over R.
    pub independent: bool,
    /// Condition (ii): `H(z,z') = 0` for all `z'` only when `z = 0`.
    pub trivial_kernel: bool,
    pub witness: Option<NondegeneracyWitness>,
}

impl NondegeneracyVerdict {
    pub fn passes(&self) -> bool {
        self.independent && self.trivial_kernel
    }
}

/// Decides both non-degeneracy conditions exactly.
///
/// Condition (i) is the real rank of the vectorized matrices; condition (ii)
/// is the complex rank of the stacked `kn x n` matrix `[H^1; ...; H^k]`.
pub fn check_nondegenerate(pack: &HermitianFormPack) -> NondegeneracyVerdict {
    let n = pack.n();
    let k = pack.k();

    // (i): columns are the realified vectorizations of the forms.
    let mut vectorized = RatMatrix::zeros(2 * n * n, k);
    for j in 0..k {
        for a in 0..n {
            for b in 0..n {
                let e = pack.mat(j).at(a, b);
                *vectorized.at_mut(2 * (a * n + b), j) = e.re.clone();
                *vectorized.at_mut(2 * (a * n + b) + 1, j) = e.im.clone();
            }
        }
    }
    let dependency = vectorized.nullspace();
    let independent = dependency.is_empty();

    // (ii): stacked complex matrix has full column rank n.
    let mut stacked = GaussMatrix::zeros(k * n, n);
    for j in 0..k {
        for a in 0..n {
            for b in 0..n {
                *stacked.at_mut(j * n + a, b) = pack.mat(j).at(a, b).clone();
            }
        }
    }
    let kernel = stacked.nullspace();
    let trivial_kernel = kernel.is_empty();

    let witness = if !independent {
        Some(NondegeneracyWitness::DependentCombination(
            dependency.into_iter().next().expect("nonempty"),
        ))
    } else if !trivial_kernel {
        Some(NondegeneracyWitness::KernelVector(
            kernel.into_iter().next().expect("nonempty"),
        ))
    } else {
        None
    };

    NondegeneracyVerdict {
        independent,
        trivial_kernel,
        witness,
    }
}

/// A named pack from the builtin catalog.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub pack: HermitianFormPack,
}

fn diag_pack(signs: &[i64]) -> HermitianFormPack {
    let n = signs.len();
    let mut m = GaussMatrix::zeros(n, n);
    for (i, &s) in signs.iter().enumerate() {
        *m.at_mut(i, i) = crate::scalar::crat_int(s, 0);
    }
    HermitianFormPack::new(n, 1, vec![m]).expect("diagonal pack is valid")
}

fn diag_single(n: usize, hot: usize) -> GaussMatrix {
    let mut m = GaussMatrix::zeros(n, n);
    *m.at_mut(hot, hot) = crate::scalar::cone();
    m
}

fn offdiag_single(n: usize, a: usize, b: usize) -> GaussMatrix {
    let mut m = GaussMatrix::zeros(n, n);
    *m.at_mut(a, b) = crate::scalar::cone();
    *m.at_mut(b, a) = crate::scalar::cone();
    m
}

/// The builtin test corpus. Every returned pack is non-degenerate.
pub fn builtin_catalog(name: &str) -> Result<Vec<CatalogEntry>, FormError> {
    let heisenberg = || {
        (1..=3)
            .map(|n| CatalogEntry {
                name: format!("heisenberg-n{n}"),
                pack: diag_pack(&vec![1; n]),
            })
            .collect::<Vec<_>>()
    };
    let hyperquadric = || {
        vec![
            CatalogEntry {
                name: "hyperquadric-n2-pp".into(),
                pack: diag_pack(&[1, 1]),
            },
            CatalogEntry {
                name: "hyperquadric-n2-pm".into(),
                pack: diag_pack(&[1, -1]),
            },
            CatalogEntry {
                name: "hyperquadric-n3-ppp".into(),
                pack: diag_pack(&[1, 1, 1]),
            },
            CatalogEntry {
                name: "hyperquadric-n3-ppm".into(),
                pack: diag_pack(&[1, 1, -1]),
            },
        ]
    };
    let diagonal_codim2 = || {
        vec![
            CatalogEntry {
                name: "diagonal-n2-k2".into(),
                pack: HermitianFormPack::new(2, 2, vec![diag_single(2, 0), diag_single(2, 1)])
                    .expect("valid pack"),
            },
            CatalogEntry {
                name: "diagonal-n2-k3".into(),
                pack: HermitianFormPack::new(
                    2,
                    3,
                    vec![diag_single(2, 0), diag_single(2, 1), offdiag_single(2, 0, 1)],
                )
                .expect("valid pack"),
            },
        ]
    };

    match name {
        "heisenberg" => Ok(heisenberg()),
        "hyperquadric" => Ok(hyperquadric()),
        "diagonal-codim2" => Ok(diagonal_codim2()),
        "full-suite" => {
            let mut all = heisenberg();
            all.extend(hyperquadric());
            all.extend(diagonal_codim2());
            Ok(all)
        }
        other => Err(FormError::UnknownCatalog(other.to_string())),
    }
}
