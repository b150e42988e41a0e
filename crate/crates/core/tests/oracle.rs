//! Independent brute-force oracle for the constraint-solver dimensions.
//!
//! The library compiles each defining identity into a linear system by
//! polynomial coefficient matching. This oracle never expands a polynomial:
//! it evaluates the identities numerically at pseudo-random rational points
//! and computes the nullity of the sampled system. Sampling can only
//! enlarge the solution space, so equal dimensions certify the solver found
//! everything and nothing else.

use cr_quadric::forms::{builtin_catalog, HermitianFormPack};
use cr_quadric::linalg::RatMatrix;
use cr_quadric::quadric::{solve_g0, solve_g1, solve_g2, weight3_nullcheck};
use cr_quadric::scalar::{cconj, crat, czero, rat, CRat, Rat};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_z(rng: &mut ChaCha8Rng, n: usize) -> Vec<CRat> {
    (0..n)
        .map(|_| {
            crat(
                rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3)),
                rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3)),
            )
        })
        .collect()
}

fn random_u(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rat> {
    (0..k)
        .map(|_| rat(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=3)))
        .collect()
}

/// `(z^H H^j)_b`, the row vector pairing against holomorphic arguments.
fn h_row(pack: &HermitianFormPack, j: usize, z: &[CRat]) -> Vec<CRat> {
    let n = pack.n();
    (0..n)
        .map(|b| {
            let mut acc = czero();
            for a in 0..n {
                acc = acc + cconj(&z[a]) * pack.mat(j).at(a, b).clone();
            }
            acc
        })
        .collect()
}

fn hzz(pack: &HermitianFormPack, j: usize, z: &[CRat]) -> CRat {
    pack.eval(j, z, z)
}

fn re(v: &CRat) -> CRat {
    crat(v.re.clone(), Rat::zero())
}

fn im(v: &CRat) -> CRat {
    crat(v.im.clone(), Rat::zero())
}

/// Stack complex-valued rows (one complex coefficient per realified unknown)
/// into a rational matrix, splitting re/im.
fn realify_rows(rows: Vec<Vec<CRat>>, cols: usize) -> RatMatrix {
    let mut out = Vec::with_capacity(2 * rows.len());
    for row in rows {
        assert_eq!(row.len(), cols);
        out.push(row.iter().map(|c| c.re.clone()).collect::<Vec<_>>());
        out.push(row.iter().map(|c| c.im.clone()).collect::<Vec<_>>());
    }
    if out.is_empty() {
        RatMatrix::zeros(0, cols)
    } else {
        RatMatrix::from_rows(out)
    }
}

/// For a complex unknown with realification `x + i y`, the pair of complex
/// coefficients `(for x, for y)` given the coefficient of the unknown
/// itself (`of_value`) or of its conjugate (`of_conj`).
fn complex_coeff(of_value: Option<&CRat>, of_conj: Option<&CRat>) -> (CRat, CRat) {
    let i = crat(Rat::zero(), Rat::from_integer(1.into()));
    let mut for_x = czero();
    let mut for_y = czero();
    if let Some(c) = of_value {
        for_x = for_x + c.clone();
        for_y = for_y + c.clone() * i.clone();
    }
    if let Some(c) = of_conj {
        for_x = for_x + c.clone();
        for_y = for_y - c.clone() * i;
    }
    (for_x, for_y)
}

fn tri_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..dim {
        for b in a..dim {
            out.push((a, b));
        }
    }
    out
}

/// Sampled nullity of `2 Re H(Cz,z) = s H(z,z)`.
fn sampled_g0_nullity(pack: &HermitianFormPack, rng: &mut ChaCha8Rng) -> usize {
    let (n, k) = (pack.n(), pack.k());
    let n_unknowns = 2 * n * n + k * k;
    let samples = n_unknowns + 8;
    let mut rows = Vec::new();
    for _ in 0..samples {
        let z = random_z(rng, n);
        for j in 0..k {
            let m = h_row(pack, j, &z);
            let mut row = vec![czero(); n_unknowns];
            for a in 0..n {
                for b in 0..n {
                    // 2 Re(m_a z_b * C_ab): depends on C and conj(C)
                    let c = m[a].clone() * z[b].clone();
                    let (for_x, for_y) = complex_coeff(Some(&c), Some(&cconj(&c)));
                    row[2 * (a * n + b)] = for_x;
                    row[2 * (a * n + b) + 1] = for_y;
                }
            }
            for l in 0..k {
                row[2 * n * n + j * k + l] = czero() - hzz(pack, l, &z);
            }
            rows.push(row);
        }
    }
    realify_rows(rows, n_unknowns).nullspace().len()
}

/// Sampled nullity of `H(A(z,z),z) = 2i H(z, a H(z,z))`.
fn sampled_g1_nullity(pack: &HermitianFormPack, rng: &mut ChaCha8Rng) -> usize {
    let (n, k) = (pack.n(), pack.k());
    let pairs = tri_pairs(n);
    let n_unknowns = 2 * n * k + 2 * n * pairs.len();
    let samples = n_unknowns + 8;
    let two_i = crat(Rat::zero(), Rat::from_integer(2.into()));
    let mut rows = Vec::new();
    for _ in 0..samples {
        let z = random_z(rng, n);
        for j in 0..k {
            let m = h_row(pack, j, &z);
            let hz: Vec<CRat> = (0..n)
                .map(|i| {
                    let mut acc = czero();
                    for b in 0..n {
                        acc = acc + pack.mat(j).at(i, b).clone() * z[b].clone();
                    }
                    acc
                })
                .collect();
            let mut row = vec![czero(); n_unknowns];
            // a-part: -2i sum_l conj(a_il) H^l(z,z) (H^j z)_i
            for i in 0..n {
                for l in 0..k {
                    let base = czero()
                        - two_i.clone() * hzz(pack, l, &z) * hz[i].clone();
                    let (for_x, for_y) = complex_coeff(None, Some(&base));
                    row[2 * (i * k + l)] = for_x;
                    row[2 * (i * k + l) + 1] = for_y;
                }
            }
            // A-part: m_i * z_b z_c (doubled off the diagonal)
            for i in 0..n {
                for (t, &(b, c)) in pairs.iter().enumerate() {
                    let mut coeff = m[i].clone() * z[b].clone() * z[c].clone();
                    if b != c {
                        coeff = coeff.clone() + coeff;
                    }
                    let (for_x, for_y) = complex_coeff(Some(&coeff), None);
                    let base = 2 * n * k + 2 * (i * pairs.len() + t);
                    row[base] = for_x;
                    row[base + 1] = for_y;
                }
            }
            rows.push(row);
        }
    }
    realify_rows(rows, n_unknowns).nullspace().len()
}

/// Sampled nullity of the pair `Re H(B(z,u),z) = r(H(z,z),u)` and
/// `Im H(B(z,H(z,z)),z) = 0`.
fn sampled_g2_nullity(pack: &HermitianFormPack, rng: &mut ChaCha8Rng) -> usize {
    let (n, k) = (pack.n(), pack.k());
    let pairs_k = tri_pairs(k);
    let n_unknowns = 2 * n * n * k + 2 * k * pairs_k.len();
    let samples = n_unknowns + 8;
    let mut rows = Vec::new();
    for _ in 0..samples {
        let z = random_z(rng, n);
        let u = random_u(rng, k);
        for j in 0..k {
            let m = h_row(pack, j, &z);
            // Re H(B(z,u), z) - r(H(z,z), u)
            let mut row = vec![czero(); n_unknowns];
            for i in 0..n {
                for b in 0..n {
                    for l in 0..k {
                        let val = m[i].clone() * z[b].clone() * crat(u[l].clone(), Rat::zero());
                        let base = 2 * (i * n * k + b * k + l);
                        // Re(val * (x + i y)) = Re(val) x - Im(val) y
                        row[base] = re(&val);
                        row[base + 1] = czero() - im(&val);
                    }
                }
            }
            for (t, &(l, mm)) in pairs_k.iter().enumerate() {
                let mut coeff = hzz(pack, l, &z) * crat(u[mm].clone(), Rat::zero());
                if l != mm {
                    coeff = coeff + hzz(pack, mm, &z) * crat(u[l].clone(), Rat::zero());
                }
                let (for_x, for_y) = complex_coeff(Some(&(czero() - coeff)), None);
                let base = 2 * n * n * k + 2 * (j * pairs_k.len() + t);
                row[base] = for_x;
                row[base + 1] = for_y;
            }
            rows.push(row);

            // Im H(B(z, H(z,z)), z)
            let mut row2 = vec![czero(); n_unknowns];
            for i in 0..n {
                for b in 0..n {
                    for l in 0..k {
                        let val = m[i].clone() * z[b].clone() * hzz(pack, l, &z);
                        let base = 2 * (i * n * k + b * k + l);
                        // Im((vx + i vy)(x + i y)) = vy x + vx y
                        row2[base] = im(&val);
                        row2[base + 1] = re(&val);
                    }
                }
            }
            rows.push(row2);
        }
    }
    realify_rows(rows, n_unknowns).nullspace().len()
}

/// Sampled nullity of the weight-3 system (the pair of identities in
/// `(D', t')`).
fn sampled_weight3_nullity(pack: &HermitianFormPack, rng: &mut ChaCha8Rng) -> usize {
    let (n, k) = (pack.n(), pack.k());
    let pairs_n = tri_pairs(n);
    let pairs_k = tri_pairs(k);
    let n_unknowns = 2 * n * pairs_n.len() * k + 2 * n * pairs_k.len();
    let samples = n_unknowns + 8;
    let four_i = crat(Rat::zero(), Rat::from_integer(4.into()));
    let mut rows = Vec::new();
    for _ in 0..samples {
        let z = random_z(rng, n);
        let u = random_u(rng, k);
        for j in 0..k {
            let m = h_row(pack, j, &z);
            let hz: Vec<CRat> = (0..n)
                .map(|i| {
                    let mut acc = czero();
                    for b in 0..n {
                        acc = acc + pack.mat(j).at(i, b).clone() * z[b].clone();
                    }
                    acc
                })
                .collect();

            // H(D'(z,z,u), z) - 4i H(z, t'(u, H(z,z)))
            let mut row = vec![czero(); n_unknowns];
            for i in 0..n {
                for (t, &(a, b)) in pairs_n.iter().enumerate() {
                    for l in 0..k {
                        let mut val =
                            m[i].clone() * z[a].clone() * z[b].clone()
                                * crat(u[l].clone(), Rat::zero());
                        if a != b {
                            val = val.clone() + val;
                        }
                        let base = 2 * ((i * pairs_n.len() + t) * k + l);
                        let (for_x, for_y) = complex_coeff(Some(&val), None);
                        row[base] = for_x;
                        row[base + 1] = for_y;
                    }
                }
            }
            for i in 0..n {
                for (t, &(l, mm)) in pairs_k.iter().enumerate() {
                    let mut scalar =
                        crat(u[l].clone(), Rat::zero()) * hzz(pack, mm, &z);
                    if l != mm {
                        scalar = scalar + crat(u[mm].clone(), Rat::zero()) * hzz(pack, l, &z);
                    }
                    let base_coeff = czero() - four_i.clone() * scalar * hz[i].clone();
                    let (for_x, for_y) = complex_coeff(None, Some(&base_coeff));
                    let base = 2 * n * pairs_n.len() * k + 2 * (i * pairs_k.len() + t);
                    row[base] = row[base].clone() + for_x;
                    row[base + 1] = row[base + 1].clone() + for_y;
                }
            }
            rows.push(row);

            // H(D'(z,z,H(z,z)), z)
            let mut row2 = vec![czero(); n_unknowns];
            for i in 0..n {
                for (t, &(a, b)) in pairs_n.iter().enumerate() {
                    for l in 0..k {
                        let mut val =
                            m[i].clone() * z[a].clone() * z[b].clone() * hzz(pack, l, &z);
                        if a != b {
                            val = val.clone() + val;
                        }
                        let base = 2 * ((i * pairs_n.len() + t) * k + l);
                        let (for_x, for_y) = complex_coeff(Some(&val), None);
                        row2[base] = row2[base].clone() + for_x;
                        row2[base + 1] = row2[base + 1].clone() + for_y;
                    }
                }
            }
            rows.push(row2);
        }
    }
    realify_rows(rows, n_unknowns).nullspace().len()
}

#[test]
fn sampled_dimensions_match_the_solvers() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed);
    for entry in builtin_catalog("full-suite").unwrap() {
        let pack = &entry.pack;
        assert_eq!(
            sampled_g0_nullity(pack, &mut rng),
            solve_g0(pack).unwrap().len(),
            "level 0 dimension disagrees for {}",
            entry.name
        );
        assert_eq!(
            sampled_g1_nullity(pack, &mut rng),
            solve_g1(pack).unwrap().len(),
            "level 1 dimension disagrees for {}",
            entry.name
        );
        assert_eq!(
            sampled_g2_nullity(pack, &mut rng),
            solve_g2(pack).unwrap().len(),
            "level 2 dimension disagrees for {}",
            entry.name
        );
    }
}

#[test]
fn sampled_weight3_nullity_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bad_5eed ^ 3);
    for entry in builtin_catalog("full-suite").unwrap() {
        let nullity = sampled_weight3_nullity(&entry.pack, &mut rng);
        assert_eq!(nullity, 0, "sampled weight-3 nullity for {}", entry.name);
        assert!(weight3_nullcheck(&entry.pack).unwrap());
    }
}
