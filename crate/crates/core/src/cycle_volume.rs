//! The volume of curve classes and the functionals built around it.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{dot, format_rat_vec, linalg, rat_from_f64, Rat};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::optimize::{
    min_pairing_on_slice, BoundaryRule, OptConfig, OptProblem, OptResult, OptStatus, TensorVolume,
    VolumeEvaluator,
};
use crate::varieties::{ClassVector, NumericalVariety, Space};

#[derive(Clone, Debug, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub method: &'static str,
    pub opt: OptResult,
}

/// `inf { <x*, y>^q : y in C, u(y) = 1 }` with `1/p + 1/q = 1`.
///
/// `u` must be positive and `p`-homogeneous on the cone interior; this is
/// checked on a few interior samples before optimizing.
pub fn dual_functional(
    cone: &PolyhedralCone,
    u: &dyn VolumeEvaluator,
    p: usize,
    x_star: &[Rat],
    config: &OptConfig,
    rule: BoundaryRule,
) -> Result<FunctionalValue> {
    if p < 2 {
        return Err(Error::Argument(format!("homogeneity degree must exceed 1, got {p}")));
    }
    check_homogeneity(cone, u, p, config.seed)?;
    let problem = OptProblem { cone, gamma: x_star, volume: u, exponent: p, rule };
    let opt = min_pairing_on_slice(&problem, config)?;
    let q = p as f64 / (p - 1) as f64;
    let value = if opt.status == OptStatus::BoundaryZero { 0.0 } else { opt.value.max(0.0).powf(q) };
    Ok(FunctionalValue { value, method: "optimizer", opt })
}

fn check_homogeneity(cone: &PolyhedralCone, u: &dyn VolumeEvaluator, p: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for y in cone.sample_f64(4, &mut rng) {
        let a = u.value(&y);
        if !(a > 0.0) {
            return Err(Error::Argument(format!("function is not positive on the cone interior (value {a})")));
        }
        let y2: Vec<f64> = y.iter().map(|c| 2.0 * c).collect();
        let measured = (u.value(&y2) / a).log2();
        if (measured - p as f64).abs() > 1e-6 {
            return Err(Error::Argument(format!(
                "function is not homogeneous of degree {p}: measured exponent {measured:.9}"
            )));
        }
    }
    Ok(())
}

fn check_curve(v: &NumericalVariety, gamma: &ClassVector) -> Result<()> {
    if gamma.space != Space::Curve {
        return Err(Error::Argument("expected a curve class".into()));
    }
    if gamma.coords.len() != v.rank() {
        return Err(Error::Argument(format!("class must have {} coordinates", v.rank())));
    }
    if v.dim() < 2 {
        return Err(Error::Argument(format!(
            "{} has dimension {}; the curve volume needs dimension at least 2",
            v.name(),
            v.dim()
        )));
    }
    Ok(())
}

/// `(inf over unit-volume ample beta of max(<beta,gamma>, 0))^(n/(n-1))`.
pub fn vol_hat(v: &NumericalVariety, gamma: &ClassVector, config: &OptConfig) -> Result<FunctionalValue> {
    check_curve(v, gamma)?;
    let vol = TensorVolume::new(v.intersection());
    dual_functional(v.nef(), &vol, v.dim(), &gamma.coords, config, BoundaryRule::AnyTight)
}

/// `sum_i |<alpha_i, eta>|` for ample classes `alpha_i` forming a basis.
pub fn geometric_norm(v: &NumericalVariety, ample_basis: &[ClassVector], eta: &ClassVector) -> Result<Rat> {
    let rho = v.rank();
    if eta.space != Space::Curve || eta.coords.len() != rho {
        return Err(Error::Argument(format!("expected a curve class with {rho} coordinates")));
    }
    if ample_basis.len() != rho {
        return Err(Error::Argument(format!("basis must have {rho} members, got {}", ample_basis.len())));
    }
    for (i, a) in ample_basis.iter().enumerate() {
        if a.space != Space::Divisor || a.coords.len() != rho {
            return Err(Error::Argument(format!("basis member #{i} is not a divisor class")));
        }
        if !v.nef().is_interior(&a.coords) {
            return Err(Error::Argument(format!(
                "basis member #{i} {} is not ample",
                format_rat_vec(&a.coords)
            )));
        }
    }
    let rows: Vec<Vec<Rat>> = ample_basis.iter().map(|a| a.coords.clone()).collect();
    if linalg::rank(&rows) < rho {
        return Err(Error::Argument("ample classes do not span the divisor space".into()));
    }
    Ok(ample_basis.iter().map(|a| dot(&a.coords, &eta.coords).abs()).fold(Rat::zero(), |s, x| s + x))
}

/// `n! * 2^(4n+1)`.
pub fn mobility_constant(n: usize) -> Result<u128> {
    let mut c: u128 = 1;
    for k in 2..=n as u128 {
        c = c.checked_mul(k).ok_or_else(|| Error::Argument(format!("dimension {n} too large")))?;
    }
    let shift = 4 * n as u32 + 1;
    if shift >= 128 || c.leading_zeros() <= shift {
        return Err(Error::Argument(format!("dimension {n} too large")));
    }
    Ok(c << shift)
}

#[derive(Clone, Debug, Serialize)]
pub struct MobilityBound {
    pub constant: u128,
    pub vol_hat: f64,
    pub bound: f64,
    pub status: OptStatus,
}

/// Upper bound `n! 2^(4n+1) vol_hat(gamma)` for the mobility of `gamma`.
pub fn mobility_upper_bound(v: &NumericalVariety, gamma: &ClassVector, config: &OptConfig) -> Result<MobilityBound> {
    let constant = mobility_constant(v.dim())?;
    let vh = vol_hat(v, gamma, config)?;
    Ok(MobilityBound { constant, vol_hat: vh.value, bound: constant as f64 * vh.value, status: vh.opt.status })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub value: f64,
    pub status: OptStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub slope: Option<f64>,
    /// Exponent `1/(n-1)` of the proven decay bound.
    pub bound_exponent: f64,
    pub flag: Option<String>,
}

/// `k` logarithmically spaced values from `a` to `b`.
pub fn log_grid(a: f64, b: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![a],
        _ => (0..k).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (k - 1) as f64).exp()).collect(),
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ols_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `vol_hat(gamma + eps A^{n-1})` along a grid, with the fitted log-log slope.
pub fn boundary_sweep(
    v: &NumericalVariety,
    gamma: &ClassVector,
    ample: &ClassVector,
    eps_grid: &[f64],
    config: &OptConfig,
) -> Result<Sweep> {
    check_curve(v, gamma)?;
    if ample.space != Space::Divisor || ample.coords.len() != v.rank() {
        return Err(Error::Argument("expected an ample divisor class".into()));
    }
    let mori = v.mori();
    if let Some(j) = mori.facets().iter().position(|f| dot(f, &gamma.coords).is_negative()) {
        return Err(Error::Argument(format!(
            "curve {} is outside the Mori cone: violates facet #{j} {}",
            format_rat_vec(&gamma.coords),
            format_rat_vec(&mori.facets()[j])
        )));
    }
    if mori.tight_facets(&gamma.coords).is_empty() {
        return Err(Error::Argument(format!(
            "curve {} is interior to the Mori cone: no tight facet",
            format_rat_vec(&gamma.coords)
        )));
    }
    if !v.nef().is_interior(&ample.coords) {
        return Err(Error::Argument(format!("class {} is not ample", format_rat_vec(&ample.coords))));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::Argument("grid values must be positive".into()));
    }
    let direction = v.curve_power(&ample.coords)?;
    let mut grid = eps_grid.to_vec();
    grid.sort_by(|a, b| a.total_cmp(b));
    let mut points = Vec::new();
    for &eps in &grid {
        let e = rat_from_f64(eps);
        let coords: Vec<Rat> = gamma.coords.iter().zip(&direction).map(|(g, d)| g + &e * d).collect();
        let r = vol_hat(v, &ClassVector::curve(coords), config)?;
        points.push(SweepPoint { eps, value: r.value, status: r.opt.status });
    }
    let bound_exponent = 1.0 / (v.dim() - 1) as f64;
    if points.len() < 2 {
        return Ok(Sweep { points, slope: None, bound_exponent, flag: Some("grid has a single point; slope undefined".into()) });
    }
    let usable: Vec<(f64, f64)> =
        points.iter().filter(|p| p.value > 0.0).map(|p| (p.eps.ln(), p.value.ln())).collect();
    let fit: &[(f64, f64)] = if usable.len() >= 4 { &usable[..usable.len() - 2] } else { &usable };
    let slope = ols_slope(fit);
    let flag = slope.is_none().then(|| "fewer than two positive values; slope undefined".to_string());
    Ok(Sweep { points, slope, bound_exponent, flag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_vec};
    use crate::cones::PolyhedralCone;
    use crate::optimize::FnVolume;
    use crate::varieties::catalog;

    #[test]
    fn quadric_closed_form() {
        let v = catalog("P1xP1", None).unwrap();
        let r = vol_hat(&v, &ClassVector::curve(rat_vec(&[2, 3])), &OptConfig::default()).unwrap();
        assert!((r.value - 12.0).abs() < 1e-9);
    }

    #[test]
    fn orthant_am_gm() {
        let cone = PolyhedralCone::orthant(2);
        let u = FnVolume { f: |y: &[f64]| y[0] * y[1] };
        let r = dual_functional(&cone, &u, 2, &rat_vec(&[1, 1]), &OptConfig::default(), BoundaryRule::AnyTight).unwrap();
        assert!((r.value - 4.0).abs() < 1e-9, "{}", r.value);
        let bad = FnVolume { f: |y: &[f64]| y[0] * y[1] * y[1] };
        let err = dual_functional(&cone, &bad, 2, &rat_vec(&[1, 1]), &OptConfig::default(), BoundaryRule::AnyTight);
        assert!(err.unwrap_err().to_string().contains("measured exponent 3"));
    }

    #[test]
    fn rank_one_dual() {
        let cone = PolyhedralCone::orthant(1);
        let u = FnVolume { f: |y: &[f64]| y[0].powi(3) };
        let r = dual_functional(&cone, &u, 3, &rat_vec(&[4]), &OptConfig::default(), BoundaryRule::AnyTight).unwrap();
        assert!((r.value - 4f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn norms() {
        let v = catalog("F1", None).unwrap();
        let basis = [ClassVector::divisor(rat_vec(&[2, -1])), ClassVector::divisor(rat_vec(&[3, -1]))];
        let e = ClassVector::curve(v.divisor_to_curve(&rat_vec(&[0, 1])).unwrap());
        assert_eq!(geometric_norm(&v, &basis, &e).unwrap(), rat(2));
        assert_eq!(geometric_norm(&v, &basis, &ClassVector::curve(rat_vec(&[0, 0]))).unwrap(), rat(0));
        let h = [ClassVector::divisor(rat_vec(&[2, -1])), ClassVector::divisor(rat_vec(&[1, 0]))];
        assert!(geometric_norm(&v, &h, &e).is_err(), "H is not ample on F1");
    }

    #[test]
    fn mobility_constants() {
        assert_eq!(mobility_constant(2).unwrap(), 2 * 512);
        assert_eq!(mobility_constant(3).unwrap(), 49152);
        assert_eq!(mobility_constant(4).unwrap(), 24 * (1 << 17));
        let v = catalog("P3", None).unwrap();
        let b = mobility_upper_bound(&v, &ClassVector::curve(rat_vec(&[1])), &OptConfig::default()).unwrap();
        assert_eq!(b.bound, 49152.0);
        let q = catalog("P1xP1", None).unwrap();
        let b = mobility_upper_bound(&q, &ClassVector::curve(rat_vec(&[1, 1])), &OptConfig::default()).unwrap();
        assert!((b.bound - 2048.0).abs() < 1e-6);
    }

    #[test]
    fn sweep_rejects_interior_and_single_point() {
        let v = catalog("F1", None).unwrap();
        let a = ClassVector::divisor(rat_vec(&[2, -1]));
        let inside = ClassVector::curve(rat_vec(&[2, 1]));
        assert!(boundary_sweep(&v, &inside, &a, &[0.1], &OptConfig::default()).is_err());
        let e = ClassVector::curve(v.divisor_to_curve(&rat_vec(&[0, 1])).unwrap());
        let s = boundary_sweep(&v, &e, &a, &[0.1], &OptConfig::default()).unwrap();
        assert!(s.slope.is_none() && s.flag.is_some());
        assert_eq!(log_grid(1e-4, 1e-1, 4).len(), 4);
    }
}
