//! Volumes of divisor classes, the invariant `M` of curve classes, and the
//! recovery of the volume from `M` by duality over movable curves.

use std::cell::RefCell;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{dot, dot_f64, format_rat_vec, to_f64_vec, Rat};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::optimize::{
    minimize_ratio, min_pairing_on_slice, BoundaryRule, OptConfig, OptProblem, OptResult, OptStatus,
    PairingRatio, RatioObjective, TensorVolume, VolumeEvaluator,
};
use crate::toric::ToricEvaluator;
use crate::varieties::{BigVolumeOracle, ClassVector, NumericalVariety, Space};
use crate::zariski_surface::{surface_volume, ZariskiVolume};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeValue {
    #[serde(serialize_with = "crate::algebra::serialize_rat")]
    pub value: Rat,
    /// `tensor`, `surface-zariski`, `toric-polytope` or `outside-psef`.
    pub method: &'static str,
}

fn check_divisor(v: &NumericalVariety, alpha: &ClassVector) -> Result<()> {
    if alpha.space != Space::Divisor {
        return Err(Error::Argument("expected a divisor class".into()));
    }
    if alpha.coords.len() != v.rank() {
        return Err(Error::Argument(format!("class must have {} coordinates", v.rank())));
    }
    Ok(())
}

/// Exact volume of a divisor class.
pub fn vol(v: &NumericalVariety, alpha: &ClassVector) -> Result<VolumeValue> {
    check_divisor(v, alpha)?;
    let a = &alpha.coords;
    if !v.psef().contains(a) {
        return Ok(VolumeValue { value: Rat::zero(), method: "outside-psef" });
    }
    if v.nef().contains(a) {
        return Ok(VolumeValue { value: v.top_power(a)?, method: "tensor" });
    }
    match v.oracle() {
        BigVolumeOracle::SurfaceZariski => Ok(VolumeValue { value: surface_volume(v, a)?, method: "surface-zariski" }),
        BigVolumeOracle::ToricPolytope(model) => Ok(VolumeValue { value: model.volume(a)?, method: "toric-polytope" }),
        BigVolumeOracle::NefOnly => Err(Error::NefOnly { variety: v.name().to_string(), class: format_rat_vec(a) }),
    }
}

/// The float volume on the whole pseudo-effective cone.
pub fn big_volume_evaluator(v: &NumericalVariety) -> Result<Box<dyn VolumeEvaluator>> {
    match v.oracle() {
        BigVolumeOracle::SurfaceZariski => Ok(Box::new(ZariskiVolume::new(v)?)),
        BigVolumeOracle::ToricPolytope(model) => Ok(Box::new(ToricEvaluator::new((**model).clone())?)),
        BigVolumeOracle::NefOnly => Err(Error::Unsupported(format!(
            "{} has no big-volume oracle, so the pseudo-effective slice cannot be searched; \
             build the variety from a fan (--fan) to use the toric pipeline",
            v.name()
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MInvariant {
    pub value: f64,
    pub method: &'static str,
    /// Set when only the nef slice was searched, so `value` bounds `M` from above.
    pub upper_bound: bool,
    pub opt: OptResult,
}

fn check_curve(v: &NumericalVariety, gamma: &ClassVector) -> Result<()> {
    if gamma.space != Space::Curve || gamma.coords.len() != v.rank() {
        return Err(Error::Argument(format!("expected a curve class with {} coordinates", v.rank())));
    }
    if v.dim() < 2 {
        return Err(Error::Argument(format!("{} has dimension {}", v.name(), v.dim())));
    }
    Ok(())
}

fn raise(opt: &OptResult, n: usize) -> f64 {
    if opt.status == OptStatus::BoundaryZero {
        0.0
    } else {
        opt.value.max(0.0).powf(n as f64 / (n - 1) as f64)
    }
}

/// `M(gamma) = (inf over unit-volume psef beta of max(<beta,gamma>,0))^(n/(n-1))`.
pub fn m_invariant(v: &NumericalVariety, gamma: &ClassVector, config: &OptConfig) -> Result<MInvariant> {
    check_curve(v, gamma)?;
    let eval = big_volume_evaluator(v)?;
    let problem = OptProblem {
        cone: v.psef(),
        gamma: &gamma.coords,
        volume: eval.as_ref(),
        exponent: v.dim(),
        rule: BoundaryRule::TightWithVolume,
    };
    let opt = min_pairing_on_slice(&problem, config)?;
    Ok(MInvariant { value: raise(&opt, v.dim()), method: eval.tag(), upper_bound: false, opt })
}

/// The same infimum over the nef slice only: an upper bound for `M`.
pub fn m_invariant_nef_slice(v: &NumericalVariety, gamma: &ClassVector, config: &OptConfig) -> Result<MInvariant> {
    check_curve(v, gamma)?;
    let eval = TensorVolume::new(v.intersection());
    let problem = OptProblem {
        cone: v.nef(),
        gamma: &gamma.coords,
        volume: &eval,
        exponent: v.dim(),
        rule: BoundaryRule::TightWithVolume,
    };
    let opt = min_pairing_on_slice(&problem, config)?;
    Ok(MInvariant { value: raise(&opt, v.dim()), method: "tensor", upper_bound: true, opt })
}

/// `gamma -> <alpha,gamma> / M(gamma)^((n-1)/n)` with `M` solved by an inner optimization.
struct DualityRatio<'a> {
    alpha: Vec<f64>,
    psef: &'a PolyhedralCone,
    volume: &'a dyn VolumeEvaluator,
    n: usize,
    inner: OptConfig,
    cache: RefCell<Option<(Vec<f64>, Option<(f64, Vec<f64>)>)>>,
}

impl DualityRatio<'_> {
    /// `(log inf R, minimizer)` of the inner problem at `gamma`, memoized on the last point.
    fn inner_solve(&self, gamma: &[f64]) -> Option<(f64, Vec<f64>)> {
        if let Some((g, r)) = self.cache.borrow().as_ref() {
            if g.as_slice() == gamma {
                return r.clone();
            }
        }
        let r = if self.psef.generators_f64().iter().any(|g| dot_f64(g, gamma) <= 0.0) {
            None
        } else {
            let obj = PairingRatio { gamma: gamma.to_vec(), volume: self.volume, exponent: self.n, fd_step: self.inner.fd_step };
            minimize_ratio(self.psef.generators_f64(), self.psef.facets_f64(), &obj, &self.inner)
                .map(|(log_r, beta, _)| (log_r, beta))
        };
        *self.cache.borrow_mut() = Some((gamma.to_vec(), r.clone()));
        r
    }
}

impl RatioObjective for DualityRatio<'_> {
    fn log_ratio(&self, gamma: &[f64]) -> Option<f64> {
        let p = dot_f64(&self.alpha, gamma);
        if p <= 0.0 {
            return None;
        }
        let (log_m, _) = self.inner_solve(gamma)?;
        Some(p.ln() - log_m)
    }

    fn log_gradient(&self, gamma: &[f64]) -> Option<Vec<f64>> {
        let p = dot_f64(&self.alpha, gamma);
        let (_, beta) = self.inner_solve(gamma)?;
        let q = dot_f64(&beta, gamma);
        if p <= 0.0 || q <= 0.0 {
            return None;
        }
        Some(self.alpha.iter().zip(&beta).map(|(a, b)| a / p - b / q).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    /// `(inf over movable gamma of <alpha,gamma> / M(gamma)^((n-1)/n))^n`.
    pub value: f64,
    /// The exact volume, for side-by-side comparison.
    pub reference: VolumeValue,
    pub relative_gap: f64,
    pub outer: OptResult,
}

/// Volume recovered from `M` by optimizing over the movable cone.
pub fn vol_via_duality(v: &NumericalVariety, alpha: &ClassVector, config: &OptConfig) -> Result<DualityReport> {
    check_divisor(v, alpha)?;
    let eval = big_volume_evaluator(v)?;
    let reference = vol(v, alpha)?;
    let n = v.dim();
    let movable = v.movable_curves();
    let report = |value: f64, outer: OptResult| {
        let r = crate::algebra::rat_to_f64(&reference.value);
        let relative_gap = if r > 0.0 { (value - r).abs() / r } else { value.abs() };
        DualityReport { value, reference: reference.clone(), relative_gap, outer }
    };
    let zero = |note: String| OptResult {
        value: 0.0,
        argmin: vec![0.0; v.rank()],
        iterations: 0,
        starts_used: 0,
        kkt_gap: 0.0,
        status: OptStatus::BoundaryZero,
        trace: Vec::new(),
        diagnostics: vec![note],
    };
    let pairings: Vec<Rat> = movable.generators().iter().map(|g| dot(g, &alpha.coords)).collect();
    if let Some(i) = pairings.iter().position(|p| p.is_negative()) {
        return Ok(report(0.0, zero(format!("movable generator #{i} pairs negatively"))));
    }
    let inner = OptConfig { starts: (config.starts / 4).max(2), tol: config.tol.min(1e-10), ..config.clone() };
    let objective = DualityRatio {
        alpha: to_f64_vec(&alpha.coords),
        psef: v.psef(),
        volume: eval.as_ref(),
        n,
        inner,
        cache: RefCell::new(None),
    };
    let tight: Vec<usize> = (0..pairings.len()).filter(|&i| pairings[i].is_zero()).collect();
    if !tight.is_empty() {
        let mut face = vec![0.0; v.rank()];
        for &i in &tight {
            for (f, g) in face.iter_mut().zip(&movable.generators_f64()[i]) {
                *f += g;
            }
        }
        if objective.inner_solve(&face).is_some() {
            return Ok(report(0.0, zero(format!("movable generators {tight:?} are orthogonal to the class"))));
        }
    }
    // Inner solves are accurate to about 1e-10, which bounds how far the outer
    // gradient can be trusted; a few outer starts suffice for these low ranks.
    let outer = OptConfig { starts: (config.starts / 8).max(2), tol: config.tol.max(1e-6), ..config.clone() };
    match minimize_ratio(movable.generators_f64(), movable.facets_f64(), &objective, &outer) {
        Some((_, _, outer)) => Ok(report(outer.value.powi(n as i32), outer)),
        None => Err(Error::Invariant("the invariant M vanished at every outer start".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_vec};
    use crate::varieties::catalog;

    fn cfg() -> OptConfig {
        OptConfig::default().with_starts(4)
    }

    #[test]
    fn volumes() {
        let f1 = catalog("F1", None).unwrap();
        let d = |c: &[i64]| ClassVector::divisor(rat_vec(c));
        assert_eq!(vol(&f1, &d(&[1, 1])).unwrap(), VolumeValue { value: rat(1), method: "surface-zariski" });
        assert_eq!(vol(&f1, &d(&[2, -1])).unwrap().value, rat(3));
        assert_eq!(vol(&f1, &d(&[0, 0])).unwrap().value, rat(0));
        assert_eq!(vol(&f1, &d(&[0, -1])).unwrap().method, "outside-psef");
        let c = catalog("Cutkosky(1)", None).unwrap();
        // a pi*H + b (pi*H + L) with a = 1, b = 2: b^3 + 3 (a+b)^2 b = 8 + 54
        assert_eq!(vol(&c, &d(&[3, 2])).unwrap().value, rat(62));
    }

    #[test]
    fn m_on_plane_and_quadric() {
        let p2 = catalog("P2", None).unwrap();
        let m = m_invariant(&p2, &ClassVector::curve(rat_vec(&[3])), &cfg()).unwrap();
        assert!((m.value - 9.0).abs() < 1e-9);
        let q = catalog("P1xP1", None).unwrap();
        let m = m_invariant(&q, &ClassVector::curve(rat_vec(&[2, 3])), &cfg()).unwrap();
        assert!((m.value - 12.0).abs() < 1e-7, "{}", m.value);
        let ub = m_invariant_nef_slice(&q, &ClassVector::curve(rat_vec(&[2, 3])), &cfg()).unwrap();
        assert!(ub.upper_bound && ub.value >= m.value - 1e-9);
    }

    #[test]
    fn duality_small_cases() {
        let p2 = catalog("P2", None).unwrap();
        let r = vol_via_duality(&p2, &ClassVector::divisor(rat_vec(&[2])), &cfg()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-9);
        let f1 = catalog("F1", None).unwrap();
        let r = vol_via_duality(&f1, &ClassVector::divisor(rat_vec(&[2, -1])), &cfg()).unwrap();
        assert!(r.relative_gap < 1e-3, "{r:?}");
        let out = vol_via_duality(&f1, &ClassVector::divisor(rat_vec(&[0, -1])), &cfg()).unwrap();
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn nef_only_errors() {
        let text = crate::varieties::write_variety(&catalog("P3", None).unwrap());
        let v = crate::varieties::parse_variety(&text).unwrap();
        assert!(m_invariant(&v, &ClassVector::curve(rat_vec(&[1])), &cfg()).is_err());
        assert_eq!(vol(&v, &ClassVector::divisor(rat_vec(&[2]))).unwrap().value, rat(8));
    }
}
