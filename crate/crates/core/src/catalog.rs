//! Named, reproducible test fields.
//!
//! Names and parameters here double as the CLI's field-description
//! language: `extremal`, `affine_equality`, `sharp_example`,
//! `polygauss_random` and `bump`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{make_extremal, OrthantSpec, SupportBox, TestField};
use crate::error::{Error, Result};
use crate::poly::{MultiIndex, PolyGauss, Polynomial};

/// Orthants covered by the random suites.
pub const SUITE_SPECS: [(usize, usize); 5] = [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)];

/// Random fields per orthant in the default suite.
pub const SUITE_SIZE: usize = 50;

/// Total-degree cap for random polynomial parts.
pub const MAX_RANDOM_DEGREE: u32 = 4;

pub const NAMES: [&str; 5] = ["extremal", "affine_equality", "sharp_example", "polygauss_random", "bump"];

/// Parameters for [`catalog_get`]; each entry reads only the ones it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CatalogParams {
    pub c: f64,
    pub beta: f64,
    /// Linear coefficients on the unweighted axes; empty means all ones.
    pub b: Vec<f64>,
    pub b0: f64,
    /// Gaussian rate `B` in `e^{-B|x|²}` for the affine family.
    pub big_b: f64,
    pub seed: u64,
    pub degree: u32,
    /// Power of the wall monomial; `None` picks 1 for random fields and 0 for bumps.
    pub wall_power: Option<u32>,
    pub lo: f64,
    pub hi: f64,
}

impl Default for CatalogParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            beta: 0.5,
            b: Vec::new(),
            b0: 1.0,
            big_b: 0.5,
            seed: 0,
            degree: MAX_RANDOM_DEGREE,
            wall_power: None,
            lo: 1.0,
            hi: 2.0,
        }
    }
}

/// Builds the named field on `spec`.
pub fn catalog_get(name: &str, spec: OrthantSpec, params: &CatalogParams) -> Result<TestField> {
    match name {
        "extremal" => make_extremal(spec, params.c, params.beta),
        "affine_equality" => {
            let b = if params.b.is_empty() { vec![1.0; spec.n() - spec.k()] } else { params.b.clone() };
            affine_equality(spec, &b, params.b0, params.big_b)
        }
        "sharp_example" => sharp_example(spec),
        "polygauss_random" => {
            polygauss_random(spec, params.seed, params.degree, params.wall_power.unwrap_or(1))
        }
        "bump" => bump(spec, params.lo, params.hi, params.wall_power.unwrap_or(0)),
        other => Err(Error::Catalog(format!("unknown field '{other}'; expected one of {}", NAMES.join(", ")))),
    }
}

/// `w · e^{-B|x|²} (b_0 + Σ b_i x_i)` with the sum over the unweighted axes.
pub fn affine_equality(spec: OrthantSpec, b: &[f64], b0: f64, big_b: f64) -> Result<TestField> {
    let free = spec.n() - spec.k();
    if b.len() != free {
        return Err(Error::Catalog(format!("affine_equality needs {free} linear coefficients, got {}", b.len())));
    }
    if !(big_b > 0.0) {
        return Err(Error::Parameter(format!("affine_equality needs B > 0, got {big_b}")));
    }
    let n = spec.n();
    let w = spec.wall_monomial();
    let mut terms = vec![(w.clone(), b0)];
    for (i, bi) in spec.free_axes().zip(b) {
        let mut m = w.clone();
        m[i] += 1;
        terms.push((m, *bi));
    }
    let u = PolyGauss::new(2.0 * big_b, Polynomial::from_terms(n, terms))?;
    Ok(TestField::from_polygauss(spec, w, u)?.with_label(format!("affine_equality(b={b:?},b0={b0},B={big_b})")))
}

/// `x_1 · w · e^{-|x|²/2}`, taken literally: when the first axis is a wall
/// the factor `x_1` multiplies into the wall monomial.
pub fn sharp_example(spec: OrthantSpec) -> Result<TestField> {
    let w = spec.wall_monomial();
    let mut m = w.clone();
    m[0] += 1;
    let u = PolyGauss::new(1.0, Polynomial::monomial(m, 1.0))?;
    Ok(TestField::from_polygauss(spec, w, u)?.with_label("sharp_example"))
}

fn multi_indices(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    let mut out = vec![vec![0u32; n]];
    for i in 0..n {
        let mut next = Vec::new();
        for m in &out {
            let used: u32 = m.iter().sum();
            for e in 1..=max_degree - used {
                let mut m2 = m.clone();
                m2[i] = e;
                next.push(m2);
            }
        }
        out.extend(next);
    }
    out.sort();
    out
}

/// `w^p · P(x) · e^{-s|x|²/2}` with `P` of total degree `≤ degree`, coefficients
/// uniform in `[-1, 1]` and `s ∈ {1, 2}`, all drawn from a seeded ChaCha stream.
pub fn polygauss_random(spec: OrthantSpec, seed: u64, degree: u32, wall_power: u32) -> Result<TestField> {
    let n = spec.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
    let wall: Vec<u32> = spec.wall_monomial().iter().map(|e| e * wall_power).collect();
    let terms: Vec<(MultiIndex, f64)> = multi_indices(n, degree)
        .into_iter()
        .map(|m| {
            let c = rng.gen_range(-1.0..=1.0);
            (m.iter().zip(&wall).map(|(a, b)| a + b).collect(), c)
        })
        .collect();
    let u = PolyGauss::new(rate, Polynomial::from_terms(n, terms))?;
    Ok(TestField::from_polygauss(spec, wall, u)?.with_label(format!("polygauss_random(seed={seed})")))
}

/// Polynomial in `n` variables of total degree `≤ degree` with coefficients
/// uniform in `[-1, 1]`.
pub fn random_polynomial(n: usize, degree: u32, seed: u64) -> Polynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Polynomial::from_terms(n, multi_indices(n, degree).into_iter().map(|m| (m, rng.gen_range(-1.0..=1.0))))
}

/// `w^p · ∏ exp(-1/(1 - t_i²))` on `[lo, hi]^n`.
pub fn bump(spec: OrthantSpec, lo: f64, hi: f64, wall_power: u32) -> Result<TestField> {
    let wall: Vec<u32> = spec.wall_monomial().iter().map(|e| e * wall_power).collect();
    let support = SupportBox::cube(spec.n(), lo, hi)?;
    Ok(TestField::bump(spec, wall, support)?.with_label(format!("bump([{lo},{hi}]^{})", spec.n())))
}

/// `count` random fields on `spec` with seeds `base_seed, base_seed + 1, …`.
pub fn random_suite(spec: OrthantSpec, count: usize, base_seed: u64) -> Result<Vec<TestField>> {
    (0..count as u64).map(|i| polygauss_random(spec, base_seed + i, MAX_RANDOM_DEGREE, 1)).collect()
}

/// First seed of the random suite on `spec`: `1000·(j+1)` for the `j`-th
/// entry of [`SUITE_SPECS`], and `1000·(10n+k)` elsewhere, so no two orthants
/// share a stream.
pub fn suite_seed(spec: OrthantSpec) -> u64 {
    match SUITE_SPECS.iter().position(|(n, k)| *n == spec.n() && *k == spec.k()) {
        Some(j) => 1000 * (j as u64 + 1),
        None => 1000 * (10 * spec.n() as u64 + spec.k() as u64),
    }
}

/// The default suite: [`SUITE_SIZE`] random fields per orthant in [`SUITE_SPECS`].
pub fn standard_suite(per_spec: usize) -> Result<Vec<TestField>> {
    let mut out = Vec::with_capacity(per_spec * SUITE_SPECS.len());
    for (n, k) in SUITE_SPECS {
        let spec = OrthantSpec::new(n, k)?;
        out.extend(random_suite(spec, per_spec, suite_seed(spec))?);
    }
    Ok(out)
}

/// Random full-space fields (`k = 0`) in dimensions 1 to 3.
pub fn full_space_suite(per_dim: usize) -> Result<Vec<TestField>> {
    let mut out = Vec::with_capacity(3 * per_dim);
    for n in 1..=3 {
        out.extend(random_suite(OrthantSpec::new(n, 0)?, per_dim, 9000 + 100 * n as u64)?);
    }
    Ok(out)
}

/// Parameters `(b, b_0, B)` of one member of the affine equality family.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMember {
    pub b: Vec<f64>,
    pub b0: f64,
    pub big_b: f64,
}

impl AffineMember {
    pub fn field(&self, spec: OrthantSpec) -> Result<TestField> {
        affine_equality(spec, &self.b, self.b0, self.big_b)
    }

    /// No linear part: the member is an extremal `c·w·e^{-B|x|²}`.
    pub fn is_flat(&self) -> bool {
        self.b.iter().all(|b| *b == 0.0)
    }
}

/// Parameters of the catalogued equality members on `spec`, at `B = 1/2` and
/// away from it. Without free axes only the distinct extremals remain.
pub fn equality_member_params(spec: OrthantSpec) -> Vec<AffineMember> {
    let free = spec.n() - spec.k();
    let mut out: Vec<AffineMember> = Vec::new();
    for (b0, slope, big_b) in [(1.0, 0.0, 0.5), (1.0, 1.0, 0.5), (0.0, 1.0, 0.5), (-0.7, 0.4, 0.5), (2.0, -1.5, 1.3), (0.5, 0.8, 0.2)] {
        let b: Vec<f64> = (0..free).map(|i| slope / (i + 1) as f64).collect();
        let m = AffineMember { b, b0, big_b };
        if (m.is_flat() && b0 == 0.0) || out.contains(&m) {
            continue;
        }
        out.push(m);
    }
    out
}

/// The fields of [`equality_member_params`].
pub fn equality_members(spec: OrthantSpec) -> Result<Vec<TestField>> {
    equality_member_params(spec).iter().map(|m| m.field(spec)).collect()
}
