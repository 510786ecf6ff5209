//! Numerical and exact checks of the volume theory on catalog data.
//!
//! Each numbered criterion is a self-contained experiment with a stated
//! tolerance. Values the optimizer produces are compared against oracles that
//! do not share its code: closed forms, brute-force grids, exact tensors and
//! polytope volumes.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::form::factorial;
use crate::algebra::{dot, eval_form, format_rat_vec, rat, rat_from_f64, rat_to_f64, ratio, Rat};
use crate::cones::{PolyhedralCone, SampleMode};
use crate::cycle_volume::{boundary_sweep, log_grid, mobility_constant, mobility_upper_bound, vol_hat};
use crate::divisor_volume::{m_invariant, vol, vol_via_duality};
use crate::error::{Error, Result};
use crate::optimize::{OptConfig, OptStatus};
use crate::toric::{polytope_volume, toric_variety, ToricFan};
use crate::varieties::{CatalogEntry, ClassVector, NumericalVariety};
use crate::zariski_surface::{check_trivial_decomposition, zariski_decompose};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, relation: Relation::AtMost, bound, passed: measured <= bound, detail: None }
    }

    fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, relation: Relation::AtLeast, bound, passed: measured >= bound, detail: None }
    }

    /// A count of failures that must be zero.
    fn none_failed(name: impl Into<String>, failures: usize, detail: Option<String>) -> Self {
        Self { detail, ..Self::at_most(name, failures as f64, 0.0) }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    /// Set when the variety filter left nothing to check.
    pub skipped: bool,
    pub warnings: Vec<String>,
    pub passed: bool,
}

pub const TITLES: [&str; 12] = [
    "Cutkosky intersection numbers and volume polynomial (exact)",
    "Cutkosky pairing formula (exact)",
    "curve volume on P1xP1 against the closed form 2xy",
    "curve volume on Cutkosky(1) against a brute-force grid",
    "curve volume of A^(n-1) equals vol(A)",
    "volume recovered by duality over movable curves",
    "concavity, positivity and continuity of the curve volume",
    "decay exponent of the curve volume at the boundary",
    "Zariski decomposition: exactness, idempotence, order invariance, volume",
    "trivial decompositions on P2 and P1xP1",
    "toric polytope volumes against the intersection tensor (exact)",
    "mobility bound constant",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Example31,
    Duality,
    Properties,
    Zariski,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "example31" => Suite::Example31,
            "duality" => Suite::Duality,
            "properties" => Suite::Properties,
            "zariski" => Suite::Zariski,
            "all" => Suite::All,
            _ => {
                return Err(Error::Argument(format!(
                    "unknown suite {s:?}; expected example31, duality, properties, zariski or all"
                )))
            }
        })
    }

    pub fn criteria(self) -> Vec<usize> {
        match self {
            Suite::Example31 => vec![1, 2, 4],
            Suite::Duality => vec![6],
            Suite::Properties => vec![3, 5, 7, 8, 11, 12],
            Suite::Zariski => vec![9, 10],
            Suite::All => (1..=12).collect(),
        }
    }
}

/// Settings shared by all criteria.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub opt: OptConfig,
    /// Restricts criteria to one catalog entry.
    pub filter: Option<CatalogEntry>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 0, opt: OptConfig::default(), filter: None }
    }
}

impl VerifyConfig {
    fn wants(&self, e: CatalogEntry) -> bool {
        self.filter.map_or(true, |f| f == e)
    }

    fn rng(&self, id: usize, part: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ ((id as u64) << 32 | part))
    }

    /// Optimizer settings for the large property sweeps.
    fn light(&self) -> OptConfig {
        OptConfig { starts: self.opt.starts.min(8), seed: self.seed, ..self.opt.clone() }
    }

    fn full(&self) -> OptConfig {
        OptConfig { seed: self.seed, ..self.opt.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionReport>,
    pub passed: bool,
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<SuiteReport> {
    let criteria = suite.criteria().into_iter().map(|id| run_criterion(id, config)).collect::<Result<Vec<_>>>()?;
    let passed = criteria.iter().all(|c| c.passed);
    Ok(SuiteReport { criteria, passed })
}

pub fn run_criterion(id: usize, config: &VerifyConfig) -> Result<CriterionReport> {
    let mut warnings = Vec::new();
    let checks = match id {
        1 => example_identities(config)?,
        2 => pairing_formula(config)?,
        3 => quadric_closed_form(config)?,
        4 => cutkosky_brute_force(config)?,
        5 => powers_of_ample(config)?,
        6 => duality(config)?,
        7 => properties(config)?,
        8 => boundary_exponent(config)?,
        9 => zariski_exactness(config)?,
        10 => trivial_decompositions(config)?,
        11 => toric_consistency(config)?,
        12 => mobility(config)?,
        _ => return Err(Error::Argument(format!("no criterion {id}; criteria are 1..12"))),
    };
    let skipped = checks.is_empty();
    if skipped {
        warnings.push(format!(
            "criterion {id} does not apply to {}; skipped",
            config.filter.map(|f| f.to_string()).unwrap_or_default()
        ));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(CriterionReport { id, title: TITLES[id - 1], checks, skipped, warnings, passed })
}

fn rel_gap(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        value.abs()
    } else {
        (value - reference).abs() / reference.abs()
    }
}

fn random_rat<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rat {
    ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn curve(c: Vec<Rat>) -> ClassVector {
    ClassVector::curve(c)
}

fn divisor(c: Vec<Rat>) -> ClassVector {
    ClassVector::divisor(c)
}

fn interior_samples<R: Rng>(cone: &PolyhedralCone, count: usize, rng: &mut R) -> Vec<Vec<Rat>> {
    cone.sample(count, rng, SampleMode::Interior).points.into_iter().filter(|p| cone.is_interior(p)).collect()
}

const CUTKOSKY_D: [i64; 4] = [1, 2, 3, 5];

fn example_identities(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for d in CUTKOSKY_D {
        let entry = CatalogEntry::Cutkosky(d);
        if !config.wants(entry) {
            continue;
        }
        let cat = entry.build()?;
        let toric = entry.toric_model().expect("toric entry").polarization_tensor()?;
        let expected = [
            (vec![0, 0, 0], rat(0), "pi*H^3"),
            (vec![0, 0, 1], rat(1), "pi*H^2.L"),
            (vec![0, 1, 1], rat(d - 1), "pi*H.L^2"),
            (vec![1, 1, 1], rat((d - 1) * (d - 1) + d), "L^3"),
        ];
        let mut bad = Vec::new();
        for (key, value, label) in &expected {
            for (source, form) in [("catalog", cat.intersection()), ("toric", &toric)] {
                if &form.get(key) != value {
                    bad.push(format!("{source} {label} = {} != {value}", form.get(key)));
                }
            }
        }
        checks.push(Check::none_failed(format!("Cutkosky({d}) intersection numbers"), bad.len(), (!bad.is_empty()).then(|| bad.join("; "))));
        let mut rng = config.rng(1, d as u64);
        let mut bad = 0;
        for _ in 0..25 {
            let a = random_rat(&mut rng, 30, 12);
            let b = random_rat(&mut rng, 30, 12);
            let alpha = vec![&a + &b, b.clone()];
            let dd = rat(d);
            let one = rat(1);
            let formula = &b * &b * &b * ((&dd - &one) * (&dd - &one) + &dd)
                + rat(3) * &b * &b * (&a + &b) * (&dd - &one)
                + rat(3) * (&a + &b) * (&a + &b) * &b;
            for form in [cat.intersection(), &toric] {
                if eval_form(form, &[&alpha, &alpha, &alpha])? != formula {
                    bad += 1;
                }
            }
        }
        checks.push(Check::none_failed(format!("Cutkosky({d}) volume polynomial on 25 rational (a,b)"), bad, None));
    }
    Ok(checks)
}

fn pairing_formula(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for d in CUTKOSKY_D {
        let entry = CatalogEntry::Cutkosky(d);
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let f = v.intersection();
        let h = vec![rat(1), rat(0)];
        let l = vec![rat(0), rat(1)];
        // dual-basis coordinates of pi*H^2 and pi*H.L, read off the tensor
        let units = [h.clone(), l.clone()];
        let hh: Vec<Rat> = units.iter().map(|e| eval_form(f, &[&h, &h, e])).collect::<Result<_>>()?;
        let hl: Vec<Rat> = units.iter().map(|e| eval_form(f, &[&h, &l, e])).collect::<Result<_>>()?;
        let mut rng = config.rng(2, d as u64);
        let mut bad = 0;
        for _ in 0..25 {
            let (a, b, x, y) = (
                random_rat(&mut rng, 30, 12),
                random_rat(&mut rng, 30, 12),
                random_rat(&mut rng, 30, 12),
                random_rat(&mut rng, 30, 12),
            );
            let alpha = vec![&a + &b, b.clone()];
            let gamma: Vec<Rat> = hh.iter().zip(&hl).map(|(p, q)| &x * p + &y * q).collect();
            let formula = (&a + &b) * &y + &b * &x + &b * &y * (rat(d) - rat(1));
            if dot(&alpha, &gamma) != formula {
                bad += 1;
            }
        }
        checks.push(Check::none_failed(format!("Cutkosky({d}) pairing on 25 rational tuples"), bad, None));
    }
    Ok(checks)
}

fn quadric_closed_form(config: &VerifyConfig) -> Result<Vec<Check>> {
    if !config.wants(CatalogEntry::P1xP1) {
        return Ok(vec![]);
    }
    let v = CatalogEntry::P1xP1.build()?;
    let mut rng = config.rng(3, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x = rat_from_f64(10.0 * (1.0 - rng.gen::<f64>()));
        let y = rat_from_f64(10.0 * (1.0 - rng.gen::<f64>()));
        let expected = 2.0 * rat_to_f64(&(&x * &y));
        let got = vol_hat(&v, &curve(vec![x, y]), &config.full())?.value;
        worst = worst.max(rel_gap(got, expected));
    }
    Ok(vec![Check::at_most("max relative gap to 2xy over 50 classes", worst, 1e-6)])
}

/// Minimum over `a, b >= 0` of `((a+b) y + b x) / (b^3 + 3 (a+b)^2 b)^(1/3)`, raised to 3/2.
///
/// A grid over the unit box of directions, refined around the best point.
pub fn cutkosky_one_brute_force(x: f64, y: f64) -> f64 {
    let ratio = |a: f64, b: f64| -> f64 {
        let v = b * b * b + 3.0 * (a + b) * (a + b) * b;
        if a < 0.0 || b <= 0.0 || v <= 0.0 {
            return f64::INFINITY;
        }
        ((a + b) * y + b * x) / v.cbrt()
    };
    let mut best = (f64::INFINITY, 0.0, 1.0);
    let n = 200;
    for i in 0..=n {
        for j in 1..=n {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            let r = ratio(a, b);
            if r < best.0 {
                best = (r, a, b);
            }
        }
    }
    let mut h = 1.0 / n as f64;
    for _ in 0..40 {
        let (_, a0, b0) = best;
        let m = 20;
        for i in -m..=m {
            for j in -m..=m {
                let a = (a0 + h * i as f64 / m as f64).max(0.0);
                let b = b0 + h * j as f64 / m as f64;
                let r = ratio(a, b);
                if r < best.0 {
                    best = (r, a, b);
                }
            }
        }
        h *= 0.5;
    }
    best.0.powf(1.5)
}

fn cutkosky_brute_force(config: &VerifyConfig) -> Result<Vec<Check>> {
    if !config.wants(CatalogEntry::Cutkosky(1)) {
        return Ok(vec![]);
    }
    let v = CatalogEntry::Cutkosky(1).build()?;
    let mut checks = Vec::new();
    for (x, y) in [(1, 1), (2, 1), (1, 3)] {
        // gamma(x, y) = x pi*H^2 + y pi*H.L has dual coordinates (y, x) when d = 1
        let got = vol_hat(&v, &curve(vec![rat(y), rat(x)]), &config.full())?.value;
        let reference = cutkosky_one_brute_force(x as f64, y as f64);
        checks.push(
            Check::at_most(format!("gamma({x},{y}) relative gap"), rel_gap(got, reference), 1e-4)
                .with_detail(format!("optimizer {got:.10}, grid {reference:.10}")),
        );
    }
    Ok(checks)
}

fn powers_of_ample(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, entry) in CatalogEntry::standard().into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let mut rng = config.rng(5, k as u64);
        let mut worst: f64 = 0.0;
        for a in interior_samples(v.nef(), 20, &mut rng) {
            let reference = rat_to_f64(&v.top_power(&a)?);
            let got = vol_hat(&v, &curve(v.curve_power(&a)?), &config.light())?.value;
            worst = worst.max(rel_gap(got, reference));
        }
        checks.push(Check::at_most(format!("{entry}: max relative gap over 20 ample A"), worst, 1e-4));
    }
    Ok(checks)
}

/// Each variety keeps its own sample stream, so filtering does not change the samples.
fn duality_varieties(config: &VerifyConfig) -> Result<Vec<(u64, String, NumericalVariety)>> {
    let mut out = Vec::new();
    for (k, entry) in [CatalogEntry::Hirzebruch(1), CatalogEntry::P1xP1].into_iter().enumerate() {
        if config.wants(entry) {
            out.push((k as u64, format!("{entry} (surface-zariski)"), entry.build()?));
        }
    }
    if config.wants(CatalogEntry::Hirzebruch(1)) {
        out.push((2, "Hirzebruch(1) from its fan (toric-polytope)".into(), toric_variety(ToricFan::hirzebruch(1), "Hirzebruch(1)-fan")?));
    }
    Ok(out)
}

fn duality(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, label, v) in duality_varieties(config)? {
        let n = v.dim() as f64;
        let mut rng = config.rng(6, k);
        let mut worst: f64 = 0.0;
        for a in interior_samples(v.psef(), 10, &mut rng) {
            let r = vol_via_duality(&v, &divisor(a), &config.full())?;
            worst = worst.max(r.relative_gap);
        }
        checks.push(Check::at_most(format!("{label}: max relative gap over 10 big classes"), worst, 1e-3));
        // pointwise inequality on all pairs of 60 movable curves and 56 classes
        let gammas = interior_samples(v.movable_curves(), 60, &mut rng);
        let ms: Vec<f64> = gammas
            .iter()
            .map(|g| m_invariant(&v, &curve(g.clone()), &config.light()).map(|m| m.value))
            .collect::<Result<_>>()?;
        let alphas = v.psef().sample(56, &mut rng, SampleMode::Interior).points;
        let vols: Vec<f64> = alphas.iter().map(|a| vol(&v, &divisor(a.clone())).map(|x| rat_to_f64(&x.value))).collect::<Result<_>>()?;
        let mut margin = f64::INFINITY;
        let mut pairs = 0;
        for (g, m) in gammas.iter().zip(&ms) {
            for (a, va) in alphas.iter().zip(&vols) {
                let lhs = rat_to_f64(&dot(a, g));
                margin = margin.min(lhs - va.powf(1.0 / n) * m.powf((n - 1.0) / n));
                pairs += 1;
            }
        }
        checks.push(Check::at_least(format!("{label}: min of <a,g> - vol(a)^(1/n) M(g)^((n-1)/n) over {pairs} pairs"), margin, -1e-9));
    }
    Ok(checks)
}

fn properties(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let opt = config.light();
    for (k, entry) in CatalogEntry::standard().into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let mori = v.mori();
        let e = (v.dim() - 1) as f64 / v.dim() as f64;
        let mut rng = config.rng(7, k as u64);
        let vh = |c: &[Rat]| vol_hat(&v, &curve(c.to_vec()), &opt);

        // superadditivity of vol_hat^((n-1)/n) on a pool of interior classes
        let pool = interior_samples(mori, 100, &mut rng);
        let pool_values: Vec<f64> = pool.iter().map(|c| vh(c).map(|r| r.value.powf(e))).collect::<Result<_>>()?;
        let mut margin = f64::INFINITY;
        for _ in 0..1000 {
            let (i, j) = (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()));
            let sum: Vec<Rat> = pool[i].iter().zip(&pool[j]).map(|(a, b)| a + b).collect();
            margin = margin.min(vh(&sum)?.value.powf(e) - pool_values[i] - pool_values[j]);
        }
        checks.push(Check::at_least(format!("{entry}: superadditivity margin over 1000 pairs"), margin, -1e-7));

        // positivity dichotomy
        let interior_zero = pool_values.iter().filter(|x| !(**x > 0.0)).count();
        checks.push(Check::none_failed(format!("{entry}: interior classes with vol_hat <= 0 ({} samples)", pool.len()), interior_zero, None));
        let boundary: Vec<Vec<Rat>> = if v.rank() == 1 {
            vec![vec![Rat::zero()]]
        } else {
            mori.sample(100, &mut rng, SampleMode::Boundary).points
        };
        let mut nonzero = 0;
        for c in &boundary {
            let r = vh(c)?;
            if r.value != 0.0 || r.opt.status != OptStatus::BoundaryZero {
                nonzero += 1;
            }
        }
        checks.push(Check::none_failed(format!("{entry}: boundary classes with vol_hat != 0 ({} samples)", boundary.len()), nonzero, None));

        // continuity: differences shrink along delta = 1e-1 .. 1e-4
        let mut violations = Vec::new();
        let starts: Vec<Vec<Rat>> = pool.iter().take(3).cloned().chain(boundary.iter().take(2).cloned()).collect();
        for (p, g) in starts.iter().enumerate() {
            let u = &interior_samples(mori, 1, &mut rng)[0];
            let base = vh(g)?.value;
            let mut prev = f64::INFINITY;
            for t in 1..=4 {
                let delta = ratio(1, 10i64.pow(t));
                let moved: Vec<Rat> = g.iter().zip(u).map(|(a, b)| a + &delta * b).collect();
                let diff = (vh(&moved)?.value - base).abs();
                if diff > prev + 1e-12 * base.abs().max(1.0) {
                    violations.push(format!("probe {p} at delta 1e-{t}: {diff:e} > {prev:e}"));
                }
                prev = diff;
            }
            if prev > 1e-2 * base.abs().max(1.0) {
                violations.push(format!("probe {p}: difference {prev:e} at delta 1e-4"));
            }
        }
        checks.push(Check::none_failed(
            format!("{entry}: continuity probes not shrinking ({} probes)", starts.len()),
            violations.len(),
            (!violations.is_empty()).then(|| violations.join("; ")),
        ));
    }
    Ok(checks)
}

fn boundary_exponent(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let grid = log_grid(1e-4, 1e-1, 12);
    if config.wants(CatalogEntry::Hirzebruch(1)) {
        let v = CatalogEntry::Hirzebruch(1).build()?;
        let e = curve(v.divisor_to_curve(&[rat(0), rat(1)])?);
        let s = boundary_sweep(&v, &e, &divisor(vec![rat(2), rat(-1)]), &grid, &config.full())?;
        checks.push(Check::at_least("F1: fitted slope, gamma = E, A = 2H - E", s.slope.unwrap_or(f64::NAN), 0.9));
    }
    if config.wants(CatalogEntry::Cutkosky(1)) {
        let v = CatalogEntry::Cutkosky(1).build()?;
        // pi*H^2 pairs to zero with pi*H; A = pi*H + (pi*H + L)
        let s = boundary_sweep(&v, &curve(vec![rat(0), rat(1)]), &divisor(vec![rat(2), rat(1)]), &grid, &config.full())?;
        checks.push(Check::at_least("Cutkosky(1): fitted slope, gamma = pi*H^2", s.slope.unwrap_or(f64::NAN), 0.45));
    }
    Ok(checks)
}

fn zariski_exactness(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if config.wants(CatalogEntry::Hirzebruch(1)) {
        let v = CatalogEntry::Hirzebruch(1).build()?;
        let z = zariski_decompose(&v, &divisor(vec![rat(1), rat(1)]))?;
        let exact = z.positive.coords == vec![rat(1), rat(0)] && z.negative == vec![("E".to_string(), rat(1))];
        checks.push(Check::none_failed("F1: H + E = H + 1*E", (!exact) as usize, (!exact).then(|| format!("{z:?}"))));
    }
    let surfaces = [
        CatalogEntry::Hirzebruch(1),
        CatalogEntry::Hirzebruch(2),
        CatalogEntry::Hirzebruch(3),
        CatalogEntry::BlowupP2(1),
        CatalogEntry::BlowupP2(2),
        CatalogEntry::BlowupP2(3),
    ];
    for (k, entry) in surfaces.into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let mut data = v.to_data();
        data.negative_curves.reverse();
        let reversed = NumericalVariety::new(data)?;
        let mut rng = config.rng(9, k as u64);
        let mut samples = v.psef().sample(50, &mut rng, SampleMode::Interior).points;
        samples.extend(v.psef().sample(50, &mut rng, SampleMode::Boundary).points);
        let (mut not_idempotent, mut order_dependent) = (0, 0);
        for g in &samples {
            let z = zariski_decompose(&v, &divisor(g.clone()))?;
            if !zariski_decompose(&v, &z.positive)?.negative.is_empty() {
                not_idempotent += 1;
            }
            let r = zariski_decompose(&reversed, &divisor(g.clone()))?;
            if r.positive != z.positive || r.negative_map() != z.negative_map() {
                order_dependent += 1;
            }
        }
        checks.push(Check::none_failed(format!("{entry}: positive parts with nonzero negative part ({} samples)", samples.len()), not_idempotent, None));
        checks.push(Check::none_failed(format!("{entry}: decompositions changed by reordering curves"), order_dependent, None));
    }
    for (k, entry) in [CatalogEntry::Hirzebruch(1), CatalogEntry::BlowupP2(2)].into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let mut rng = config.rng(9, 100 + k as u64);
        let mut worst: f64 = 0.0;
        for g in v.psef().sample(20, &mut rng, SampleMode::Interior).points {
            let z = zariski_decompose(&v, &divisor(g.clone()))?;
            let square = rat_to_f64(&v.top_power(&z.positive.coords)?);
            let got = vol_hat(&v, &curve(v.divisor_to_curve(&g)?), &config.full())?.value;
            worst = worst.max((got - square).abs() / square.max(1.0));
        }
        checks.push(Check::at_most(format!("{entry}: |vol_hat - Z^2| / max(1, Z^2) over 20 classes"), worst, 1e-4));
    }
    Ok(checks)
}

fn trivial_decompositions(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (k, entry) in [CatalogEntry::Projective(2), CatalogEntry::P1xP1].into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let ok = check_trivial_decomposition(&v, 100, config.seed.wrapping_add(k as u64))?;
        checks.push(Check::none_failed(format!("{entry}: nontrivial decompositions among 100 samples"), (!ok) as usize, None));
    }
    Ok(checks)
}

fn toric_consistency(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut entries = vec![CatalogEntry::Projective(2), CatalogEntry::Projective(3), CatalogEntry::P1xP1, CatalogEntry::P1xP1xP1];
    entries.extend((1..=3).map(CatalogEntry::Hirzebruch));
    entries.extend((1..=4).map(CatalogEntry::Cutkosky));
    let mut checks = Vec::new();
    for (k, entry) in entries.into_iter().enumerate() {
        if !config.wants(entry) {
            continue;
        }
        let v = entry.build()?;
        let model = entry.toric_model().expect("toric entry");
        let same = model.polarization_tensor()? == *v.intersection();
        let fact = rat(factorial(v.dim()) as i64);
        let mut rng = config.rng(11, k as u64);
        let mut bad = Vec::new();
        for _ in 0..20 {
            let mut x = vec![Rat::zero(); v.rank()];
            for g in v.nef().generators() {
                let w = ratio(rng.gen_range(0..40), rng.gen_range(1..9));
                for (xi, gi) in x.iter_mut().zip(g) {
                    *xi += &w * gi;
                }
            }
            let poly = polytope_volume(model.fan(), &model.lift(&x))?.volume * &fact;
            if poly != v.top_power(&x)? {
                bad.push(format_rat_vec(&x));
            }
        }
        checks.push(Check::none_failed(format!("{entry}: polarization tensor differs from catalog"), (!same) as usize, None));
        checks.push(Check::none_failed(
            format!("{entry}: nef points where n! vol(P) != A^n (20 samples)"),
            bad.len(),
            (!bad.is_empty()).then(|| bad.join(" ")),
        ));
    }
    Ok(checks)
}

fn mobility(config: &VerifyConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    if config.wants(CatalogEntry::Projective(3)) {
        let v = CatalogEntry::Projective(3).build()?;
        let b = mobility_upper_bound(&v, &curve(vec![rat(1)]), &config.full())?;
        checks.push(Check::at_most("P3 line: |bound - 49152|", (b.bound - 49152.0).abs(), 0.0));
    }
    let mut bad = Vec::new();
    for n in 2..=4usize {
        let reference = (1..=n as u128).product::<u128>() * 2u128.pow(4 * n as u32 + 1);
        let got = mobility_constant(n)?;
        if got != reference {
            bad.push(format!("n={n}: {got} != {reference}"));
        }
    }
    checks.push(Check::none_failed("n! 2^(4n+1) for n = 2, 3, 4", bad.len(), (!bad.is_empty()).then(|| bad.join("; "))));
    Ok(checks)
}

/// One line per criterion: `PASS`/`FAIL`/`SKIP`, id, title and the worst check.
pub fn summary_line(r: &CriterionReport) -> String {
    let tag = if r.skipped {
        "SKIP"
    } else if r.passed {
        "PASS"
    } else {
        "FAIL"
    };
    let worst = r.checks.iter().find(|c| !c.passed).or_else(|| r.checks.last());
    let tail = worst
        .map(|c| {
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
            };
            format!(" [{}: {:e} {rel} {:e}]", c.name, c.measured, c.bound)
        })
        .unwrap_or_default();
    format!("{tag} {:>2} {}{tail}", r.id, r.title)
}
