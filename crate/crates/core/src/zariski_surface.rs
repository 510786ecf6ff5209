//! Zariski decomposition of pseudo-effective classes on surfaces.
//!
//! Given the complete list of negative curves, the negative part is found by
//! the classical iteration: collect the curves the current positive part is
//! negative on, solve for coefficients making the positive part orthogonal to
//! every collected curve, repeat until nothing pairs negatively. The support
//! only grows, so the loop ends after at most one round per curve.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::linalg::{determinant, solve};
use crate::algebra::{dot, Field, Rat};
use crate::cones::SampleMode;
use crate::cycle_volume::vol_hat;
use crate::error::{Error, Result};
use crate::optimize::{OptConfig, VolumeEvaluator};
use crate::varieties::{ClassVector, NumericalVariety, Space};

#[derive(Clone, Debug, PartialEq)]
pub struct ZariskiResult {
    pub positive: ClassVector,
    /// `(curve label, coefficient)` in the order of the variety's curve list.
    pub negative: Vec<(String, Rat)>,
    pub support: Vec<String>,
}

impl ZariskiResult {
    pub fn negative_map(&self) -> BTreeMap<String, Rat> {
        self.negative.iter().cloned().collect()
    }
}

/// Curve data of a surface in a given numeric type.
struct SurfaceCurves<T> {
    classes: Vec<Vec<T>>,
    /// `functionals[c]` is `D -> D . C_c`.
    functionals: Vec<Vec<T>>,
}

impl<T: Field> SurfaceCurves<T> {
    fn new(v: &NumericalVariety) -> Result<Self> {
        let mut classes = Vec::new();
        let mut functionals = Vec::new();
        for c in v.negative_curves() {
            classes.push(c.class.iter().map(T::from_rat).collect());
            functionals.push(v.divisor_to_curve(&c.class)?.iter().map(T::from_rat).collect());
        }
        Ok(Self { classes, functionals })
    }

    fn gram(&self, support: &[usize]) -> Vec<Vec<T>> {
        support
            .iter()
            .map(|&i| support.iter().map(|&j| dot(&self.functionals[i], &self.classes[j])).collect())
            .collect()
    }
}

struct Decomposition<T> {
    positive: Vec<T>,
    coefficients: Vec<T>,
    support: Vec<usize>,
}

fn decompose<T: Field>(curves: &SurfaceCurves<T>, gamma: &[T]) -> Result<Decomposition<T>> {
    let k = curves.classes.len();
    let tol = T::zero_tol();
    let mut support: Vec<usize> = Vec::new();
    let mut coefficients = vec![T::zero(); k];
    let mut positive = gamma.to_vec();
    loop {
        let fresh: Vec<usize> = (0..k)
            .filter(|c| !support.contains(c))
            .filter(|&c| dot(&curves.functionals[c], &positive) < -tol.clone())
            .collect();
        if fresh.is_empty() {
            break;
        }
        support.extend(fresh);
        support.sort_unstable();
        let gram = curves.gram(&support);
        let rhs: Vec<T> = support.iter().map(|&c| dot(&curves.functionals[c], gamma)).collect();
        let nu = solve(&gram, &rhs).ok_or_else(|| {
            Error::Invariant("support curves have a singular intersection matrix".into())
        })?;
        coefficients = vec![T::zero(); k];
        for (&c, x) in support.iter().zip(nu) {
            coefficients[c] = x;
        }
        positive = gamma.to_vec();
        for &c in &support {
            for (p, ci) in positive.iter_mut().zip(&curves.classes[c]) {
                *p = p.clone() - coefficients[c].clone() * ci.clone();
            }
        }
    }
    Ok(Decomposition { positive, coefficients, support })
}

/// Sylvester's criterion applied to `-gram`.
fn negative_definite<T: Field>(gram: &[Vec<T>]) -> bool {
    (1..=gram.len()).all(|m| {
        let minor: Vec<Vec<T>> = gram[..m].iter().map(|r| r[..m].iter().map(|x| -x.clone()).collect()).collect();
        determinant(&minor) > T::zero_tol()
    })
}

/// Exact Zariski decomposition of a pseudo-effective class on a surface.
pub fn zariski_decompose(v: &NumericalVariety, gamma: &ClassVector) -> Result<ZariskiResult> {
    if v.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "Zariski decomposition is computed on surfaces only; {} has dimension {}",
            v.name(),
            v.dim()
        )));
    }
    if gamma.coords.len() != v.rank() {
        return Err(Error::Argument(format!("class must have {} coordinates", v.rank())));
    }
    if gamma.space == Space::Curve {
        return Err(Error::Argument("expected a divisor class".into()));
    }
    if !v.psef().contains(&gamma.coords) {
        return Err(Error::Argument(format!(
            "class {} is not pseudo-effective",
            crate::algebra::format_rat_vec(&gamma.coords)
        )));
    }
    let curves = SurfaceCurves::<Rat>::new(v)?;
    let d = decompose(&curves, &gamma.coords)?;
    if !negative_definite(&curves.gram(&d.support)) {
        return Err(Error::Invariant(
            "intersection matrix of the negative part is not negative definite".into(),
        ));
    }
    if let Some(c) = d.support.iter().find(|&&c| d.coefficients[c] < Rat::zero()) {
        return Err(Error::Invariant(format!(
            "negative coefficient on curve {}",
            v.negative_curves()[*c].label
        )));
    }
    let labels = |ids: &[usize]| -> Vec<String> {
        ids.iter().map(|&c| v.negative_curves()[c].label.clone()).collect()
    };
    Ok(ZariskiResult {
        positive: ClassVector::divisor(d.positive),
        negative: d
            .support
            .iter()
            .map(|&c| (v.negative_curves()[c].label.clone(), d.coefficients[c].clone()))
            .collect(),
        support: labels(&d.support),
    })
}

/// Surface volume `Z(gamma)^2`, exact; 0 outside the pseudo-effective cone.
pub fn surface_volume(v: &NumericalVariety, gamma: &[Rat]) -> Result<Rat> {
    if !v.psef().contains(gamma) {
        return Ok(Rat::zero());
    }
    let z = zariski_decompose(v, &ClassVector::divisor(gamma.to_vec()))?;
    v.top_power(&z.positive.coords)
}

/// Float surface volume used inside the optimizer.
pub struct ZariskiVolume {
    curves: SurfaceCurves<f64>,
    form: Vec<Vec<f64>>,
    psef_facets: Vec<Vec<f64>>,
    exact: NumericalVariety,
}

impl ZariskiVolume {
    pub fn new(v: &NumericalVariety) -> Result<Self> {
        if v.dim() != 2 {
            return Err(Error::Unsupported(format!("{} is not a surface", v.name())));
        }
        let rho = v.rank();
        let form = (0..rho)
            .map(|i| (0..rho).map(|j| v.intersection().get(&[i, j]).to_f64()).collect())
            .collect();
        Ok(Self {
            curves: SurfaceCurves::new(v)?,
            form,
            psef_facets: v.psef().facets_f64().to_vec(),
            exact: v.clone(),
        })
    }

    fn decompose(&self, x: &[f64]) -> Option<Decomposition<f64>> {
        let scale = x.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if self.psef_facets.iter().any(|f| crate::algebra::dot_f64(f, x) < -1e-12 * scale) {
            return None;
        }
        decompose(&self.curves, x).ok()
    }
}

impl VolumeEvaluator for ZariskiVolume {
    fn tag(&self) -> &'static str {
        "surface-zariski"
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self.decompose(x) {
            Some(d) => {
                let p = &d.positive;
                let q: f64 = (0..p.len())
                    .map(|i| (0..p.len()).map(|j| self.form[i][j] * p[i] * p[j]).sum::<f64>())
                    .sum();
                q.max(0.0)
            }
            None => 0.0,
        }
    }

    fn value_exact(&self, x: &[Rat]) -> Option<Rat> {
        surface_volume(&self.exact, x).ok()
    }

    fn chamber(&self, x: &[f64]) -> Option<Vec<usize>> {
        Some(match self.decompose(x) {
            Some(d) => d.support,
            None => vec![usize::MAX],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub vol_hat: f64,
    pub vol_hat_positive: f64,
    /// `Z(gamma)^2`, exact.
    pub positive_volume: f64,
    pub gap_projection: f64,
    pub gap_volume: f64,
}

/// Compares `vol_hat(gamma)`, `vol_hat(Z(gamma))` and `Z(gamma)^2` on a surface.
pub fn verify_projection_preserves_volhat(
    v: &NumericalVariety,
    gamma: &ClassVector,
    config: &OptConfig,
) -> Result<ProjectionReport> {
    let z = zariski_decompose(v, gamma)?;
    let as_curve = |d: &[Rat]| -> Result<ClassVector> { Ok(ClassVector::curve(v.divisor_to_curve(d)?)) };
    let whole = vol_hat(v, &as_curve(&gamma.coords)?, config)?.value;
    let positive = vol_hat(v, &as_curve(&z.positive.coords)?, config)?.value;
    let square = v.top_power(&z.positive.coords)?.to_f64();
    Ok(ProjectionReport {
        vol_hat: whole,
        vol_hat_positive: positive,
        positive_volume: square,
        gap_projection: (whole - positive).abs(),
        gap_volume: (whole - square).abs(),
    })
}

/// True iff every sampled pseudo-effective class has empty negative part.
///
/// Samples are drawn from the interior and from the boundary of the cone.
pub fn check_trivial_decomposition(v: &NumericalVariety, samples: usize, seed: u64) -> Result<bool> {
    if !v.nef_tangent_bundle() {
        return Err(Error::Argument(format!(
            "{} is not flagged as having nef tangent bundle",
            v.name()
        )));
    }
    if v.dim() != 2 {
        return Err(Error::Argument(format!("{} is not a surface", v.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let interior = v.psef().sample(samples - samples / 2, &mut rng, SampleMode::Interior);
    let boundary = v.psef().sample(samples / 2, &mut rng, SampleMode::Boundary);
    for p in interior.points.iter().chain(&boundary.points) {
        if !zariski_decompose(v, &ClassVector::divisor(p.clone()))?.negative.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}
