//! The canonical map from the directly-built symmetry algebra into the
//! Tanaka prolongation, and the exact certification that it is a graded Lie
//! algebra isomorphism: identity on nonpositive levels, `X -> [X, .]` on
//! level 1, `X -> [[X, .], .]` on level 2.

use crate::fields::bracket;
use crate::forms::HermitianFormPack;
use crate::linalg::RatMatrix;
use crate::prolong::{
    run_to_termination, ProlongCertificate, ProlongError, ProlongationState,
};
use crate::quadric::{
    assemble_table, jacobi_check, weight3_nullcheck, AlgebraError, FieldSpan, GradedAlgebraTable,
};
use crate::scalar::Rat;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error("image of level-{level} basis element {index} is not in the prolonged level span")]
    ImageNotInSpan { level: i32, index: usize },
}

/// Any failure along the two-pipeline certification.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
}

/// Matrices of the canonical map on the chosen bases. Levels -2..0 are the
/// identity; `level1` and `level2` express images in the prolonged bases.
#[derive(Debug, Clone)]
pub struct PhiMap {
    pub level1: RatMatrix,
    pub level2: RatMatrix,
}

impl PhiMap {
    /// Applies the per-level block to coordinates within one direct level.
    pub fn apply(&self, level: i32, coords: &[Rat]) -> Vec<Rat> {
        match level {
            -2..=0 => coords.to_vec(),
            1 => self.level1.mul_vec(coords),
            2 => self.level2.mul_vec(coords),
            _ => Vec::new(),
        }
    }
}

/// Computes the value map of `[x -> [field, x]]` in the level-0 basis.
fn value_map_into_g0(
    table: &GradedAlgebraTable,
    g0_span: &FieldSpan,
    field: &crate::fields::PolyVectorField,
) -> Option<RatMatrix> {
    let m1 = table.dim_level(-1);
    let d0 = table.dim_level(0);
    let mut value = RatMatrix::zeros(d0, m1);
    for (i, x) in table.fields_at(-1).iter().enumerate() {
        let coords = g0_span.express(&bracket(field, x))?;
        for (r, c) in coords.into_iter().enumerate() {
            *value.at_mut(r, i) = c;
        }
    }
    Some(value)
}

/// Builds the canonical map: bracket data computed with the vector-field
/// engine, images expressed in the prolonged level bases by exact solves.
/// Fails loudly if an image is outside the constructed span.
pub fn build_phi(
    table: &GradedAlgebraTable,
    state: &ProlongationState,
) -> Result<PhiMap, TheoremError> {
    let m1 = table.dim_level(-1);
    let g0_span = FieldSpan::new(table.fields_at(0));

    let d1 = table.dim_level(1);
    let mut level1 = RatMatrix::zeros(state.dim(1), d1);
    for (idx, f) in table.fields_at(1).iter().enumerate() {
        let value = value_map_into_g0(table, &g0_span, f)
            .ok_or(TheoremError::ImageNotInSpan { level: 1, index: idx })?;
        let coords = state
            .express_value_map(1, &value)
            .ok_or(TheoremError::ImageNotInSpan { level: 1, index: idx })?;
        for (r, c) in coords.into_iter().enumerate() {
            *level1.at_mut(r, idx) = c;
        }
    }

    let d2 = table.dim_level(2);
    let mut level2 = RatMatrix::zeros(state.dim(2), d2);
    for (idx, f) in table.fields_at(2).iter().enumerate() {
        // column i: [[f, x_i], .] expressed as an element of the prolonged
        // level 1, then the whole map expressed in level 2
        let mut value = RatMatrix::zeros(state.dim(1), m1);
        for (i, x) in table.fields_at(-1).iter().enumerate() {
            let inner = bracket(f, x);
            let inner_value = value_map_into_g0(table, &g0_span, &inner)
                .ok_or(TheoremError::ImageNotInSpan { level: 2, index: idx })?;
            let gamma = state
                .express_value_map(1, &inner_value)
                .ok_or(TheoremError::ImageNotInSpan { level: 2, index: idx })?;
            for (r, c) in gamma.into_iter().enumerate() {
                *value.at_mut(r, i) = c;
            }
        }
        let coords = state
            .express_value_map(2, &value)
            .ok_or(TheoremError::ImageNotInSpan { level: 2, index: idx })?;
        for (r, c) in coords.into_iter().enumerate() {
            *level2.at_mut(r, idx) = c;
        }
    }

    Ok(PhiMap { level1, level2 })
}

/// Everything the theorem certification measures, serializable as a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Levels -2..=2 of the direct construction.
    pub dims_direct: [usize; 5],
    /// Levels -2..=2 of the prolongation tower.
    pub dims_prolonged: [usize; 5],
    /// Tower dimensions for levels 1.. including the terminating zero.
    pub tower_dims: Vec<usize>,
    pub termination_level: Option<usize>,
    /// The total map has full column rank.
    pub injective: bool,
    /// Per-level dimension equality for levels 1, 2 and a vanished level 3.
    pub surjective: bool,
    /// Bracket preservation on every basis pair, both sides exact.
    pub homomorphism: bool,
    pub jacobi_direct: bool,
    pub certificate: ProlongCertificate,
    pub weight3_trivial: bool,
    pub overall_pass: bool,
}

/// Certifies the isomorphism claim. Failures are recorded verdicts, never
/// errors: a corrupted input yields `overall_pass = false`.
pub fn verify_isomorphism(
    phi: &PhiMap,
    table: &GradedAlgebraTable,
    state: &ProlongationState,
    certificate: &ProlongCertificate,
    weight3_trivial: bool,
) -> VerificationReport {
    let dims_direct = *table.dims();
    let dims_prolonged = [
        state.dim(-2),
        state.dim(-1),
        state.dim(0),
        state.dim(1),
        state.dim(2),
    ];

    let blocks_consistent = phi.level1.rows() == state.dim(1)
        && phi.level1.cols() == table.dim_level(1)
        && phi.level2.rows() == state.dim(2)
        && phi.level2.cols() == table.dim_level(2)
        && dims_direct[0] == dims_prolonged[0]
        && dims_direct[1] == dims_prolonged[1]
        && dims_direct[2] == dims_prolonged[2];

    let injective = blocks_consistent
        && phi.level1.rank() == phi.level1.cols()
        && phi.level2.rank() == phi.level2.cols();

    let surjective = blocks_consistent
        && certificate.termination_level.is_some()
        && state.dim(1) == table.dim_level(1)
        && state.dim(2) == table.dim_level(2)
        && state.dim(3) == 0
        && (3..=state.top_level()).all(|l| state.dim(l) == 0);

    let homomorphism = blocks_consistent && {
        let total = table.total_dim();
        let phi_of = |idx: usize| -> (i32, Vec<Rat>) {
            let level = table.level_of_index(idx);
            let local = idx - table.offset(level);
            let coords = match level {
                -2..=0 => {
                    let mut v = vec![Rat::zero(); table.dim_level(level)];
                    v[local] = Rat::from_integer(1.into());
                    v
                }
                1 => (0..phi.level1.rows())
                    .map(|r| phi.level1.at(r, local).clone())
                    .collect(),
                _ => (0..phi.level2.rows())
                    .map(|r| phi.level2.at(r, local).clone())
                    .collect(),
            };
            (level, coords)
        };
        let mut ok = true;
        'outer: for i in 0..total {
            let (level_i, phi_i) = phi_of(i);
            for j in 0..total {
                let (level_j, phi_j) = phi_of(j);
                let target = level_i + level_j;
                let target_dim = state.dim(target);

                // left side: the direct bracket pushed through the map
                let mut lhs = vec![Rat::zero(); target_dim];
                if (-2..=2).contains(&target) {
                    let off = table.offset(target);
                    let block = &table.constant(i, j)[off..off + table.dim_level(target)];
                    let mapped = phi.apply(target, block);
                    if mapped.len() != target_dim {
                        ok = false;
                        break 'outer;
                    }
                    lhs = mapped;
                }

                // right side: the prolongation's extended bracket
                let mut rhs = vec![Rat::zero(); target_dim];
                for (alpha, ca) in phi_i.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for (beta, cb) in phi_j.iter().enumerate() {
                        if cb.is_zero() {
                            continue;
                        }
                        let br = state.bracket_coords(level_i, alpha, level_j, beta);
                        if br.len() != target_dim {
                            if !br.is_empty() {
                                ok = false;
                                break 'outer;
                            }
                            continue;
                        }
                        for (slot, v) in br.iter().enumerate() {
                            rhs[slot] = rhs[slot].clone() + ca.clone() * cb.clone() * v.clone();
                        }
                    }
                }

                if lhs != rhs {
                    ok = false;
                    break 'outer;
                }
            }
        }
        ok
    };

    let jacobi_direct = jacobi_check(table);
    let identities = certificate.all_identities_hold();
    let overall_pass = injective
        && surjective
        && homomorphism
        && jacobi_direct
        && identities
        && weight3_trivial;

    VerificationReport {
        dims_direct,
        dims_prolonged,
        tower_dims: certificate.level_dims.clone(),
        termination_level: certificate.termination_level,
        injective,
        surjective,
        homomorphism,
        jacobi_direct,
        certificate: certificate.clone(),
        weight3_trivial,
        overall_pass,
    }
}

/// Output of the full two-pipeline run on one pack.
pub struct CertifiedRun {
    pub table: GradedAlgebraTable,
    pub state: ProlongationState,
    pub certificate: ProlongCertificate,
    pub report: VerificationReport,
}

/// Runs both pipelines on a pack and certifies the isomorphism.
pub fn certify_pack(
    pack: &HermitianFormPack,
    max_level: usize,
) -> Result<CertifiedRun, PipelineError> {
    let table = assemble_table(pack)?;
    let (state, certificate) = run_to_termination(table.truncation(), max_level)?;
    let phi = build_phi(&table, &state)?;
    let weight3 = weight3_nullcheck(pack)?;
    let report = verify_isomorphism(&phi, &table, &state, &certificate, weight3);
    Ok(CertifiedRun {
        table,
        state,
        certificate,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::builtin_catalog;
    use crate::scalar::rat_int;
    use num_traits::Zero;

    fn run(suite: &str, idx: usize) -> CertifiedRun {
        let pack = builtin_catalog(suite).unwrap()[idx].pack.clone();
        certify_pack(&pack, 6).unwrap()
    }

    #[test]
    fn phi_is_identity_on_nonpositive_levels() {
        let r = run("heisenberg", 0);
        let phi = build_phi(&r.table, &r.state).unwrap();
        let unit = vec![rat_int(1)];
        assert_eq!(phi.apply(-2, &unit), unit);
        // linearity: zero maps to zero
        let zero = vec![rat_int(0), rat_int(0)];
        assert!(phi.apply(1, &zero).iter().all(Zero::is_zero));
    }

    #[test]
    fn phi_level1_is_invertible_for_heisenberg() {
        let r = run("heisenberg", 0);
        let phi = build_phi(&r.table, &r.state).unwrap();
        assert_eq!((phi.level1.rows(), phi.level1.cols()), (2, 2));
        assert_eq!(phi.level1.rank(), 2);
    }

    #[test]
    fn heisenberg_certifies() {
        let r = run("heisenberg", 0);
        assert_eq!(r.report.dims_direct, [1, 2, 2, 2, 1]);
        assert_eq!(r.report.dims_prolonged, [1, 2, 2, 2, 1]);
        assert!(r.report.overall_pass, "report: {:?}", r.report);
    }

    #[test]
    fn mixed_signature_hyperquadric_certifies() {
        let r = run("hyperquadric", 1); // diag(1,-1)
        assert_eq!(r.report.dims_direct.iter().sum::<usize>(), 15);
        assert_eq!(r.report.dims_prolonged.iter().sum::<usize>(), 15);
        assert!(r.report.overall_pass);
    }

    #[test]
    fn truncated_state_fails_surjectivity() {
        let r = run("heisenberg", 0);
        let phi = build_phi(&r.table, &r.state).unwrap();
        let mut corrupted = r.state.clone();
        corrupted.drop_top_level_for_audit();
        let report =
            verify_isomorphism(&phi, &r.table, &corrupted, &r.certificate, true);
        assert!(!report.surjective);
        assert!(!report.overall_pass);
    }

    #[test]
    fn report_is_deterministic() {
        let a = run("diagonal-codim2", 0).report;
        let b = run("diagonal-codim2", 0).report;
        assert_eq!(a, b);
        assert!(a.overall_pass);
    }
}
