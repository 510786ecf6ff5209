//! Infimum of a linear pairing over the volume-one slice of a cone.
//!
//! The constrained problem `inf { <beta, gamma> : beta in C, vol(beta) = 1 }` is
//! solved through the scale-invariant ratio `R(beta) = <beta,gamma> / vol(beta)^(1/n)`,
//! parameterized by convex weights on the cone generators. Each start runs a
//! barrier phase followed by a plain phase of projected gradient descent with
//! Barzilai–Borwein steps and Armijo backtracking on `log R`.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::algebra::{dot, dot_f64, DenseForm, Rat, SymmetricForm};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptConfig {
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    /// Relative step of central differences for oracle volumes.
    pub fd_step: f64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self { starts: 16, max_iter: 500, tol: 1e-8, seed: 0, fd_step: 1e-5 }
    }
}

impl OptConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, starts: usize) -> Self {
        self.starts = starts;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptStatus {
    Converged,
    MaxIter,
    BoundaryZero,
}

impl OptStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            OptStatus::Converged => "converged",
            OptStatus::MaxIter => "max_iter",
            OptStatus::BoundaryZero => "boundary_zero",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptResult {
    /// Best ratio found; callers apply their exponent.
    pub value: f64,
    /// Minimizer, scaled to volume one when its volume is positive.
    pub argmin: Vec<f64>,
    pub iterations: usize,
    pub starts_used: usize,
    pub kkt_gap: f64,
    pub status: OptStatus,
    /// Ratio at each accepted iterate of the winning start.
    #[serde(skip)]
    pub trace: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

/// A volume function on the ambient divisor space.
pub trait VolumeEvaluator {
    fn tag(&self) -> &'static str;

    fn value(&self, x: &[f64]) -> f64;

    /// Exact value on rational input when the evaluator can provide one.
    fn value_exact(&self, _x: &[Rat]) -> Option<Rat> {
        None
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Combinatorial chamber of `x` for piecewise-polynomial volumes.
    fn chamber(&self, _x: &[f64]) -> Option<Vec<usize>> {
        None
    }
}

/// `beta -> beta^n` through the intersection tensor.
pub struct TensorVolume {
    exact: SymmetricForm<Rat>,
    dense: DenseForm,
}

impl TensorVolume {
    pub fn new(form: &SymmetricForm<Rat>) -> Self {
        Self { exact: form.clone(), dense: DenseForm::new(form) }
    }
}

impl VolumeEvaluator for TensorVolume {
    fn tag(&self) -> &'static str {
        "tensor"
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.dense.power(x)
    }

    fn value_exact(&self, x: &[Rat]) -> Option<Rat> {
        self.exact.eval_power(x).ok()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.dense.power_gradient(x))
    }
}

/// Any closure, used by the generic cone-dual transform.
pub struct FnVolume<F: Fn(&[f64]) -> f64> {
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64> VolumeEvaluator for FnVolume<F> {
    fn tag(&self) -> &'static str {
        "function"
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// A degree-zero homogeneous objective, given through its logarithm.
pub trait RatioObjective {
    /// `log R(x)`, or `None` where `R` is infinite or undefined.
    fn log_ratio(&self, x: &[f64]) -> Option<f64>;

    /// Gradient of `log R`; `None` when it cannot be trusted.
    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>>;
}

/// Central differences of `vol`, refusing steps that cross a chamber wall.
pub fn fd_gradient(vol: &dyn VolumeEvaluator, x: &[f64], rel_step: f64) -> Option<Vec<f64>> {
    let scale = x.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let here = vol.chamber(x);
    let mut out = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for i in 0..x.len() {
        let mut h = rel_step * scale;
        let mut found = None;
        for _ in 0..=8 {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            let stable = here.is_none() || (vol.chamber(&xp) == here && vol.chamber(&xm) == here);
            if stable {
                found = Some((vol.value(&xp) - vol.value(&xm)) / (2.0 * h));
                break;
            }
            h *= 0.5;
        }
        xp[i] = x[i];
        xm[i] = x[i];
        out.push(found?);
    }
    Some(out)
}

/// `R(beta) = <beta,gamma> / vol(beta)^(1/n)`.
pub struct PairingRatio<'a> {
    pub gamma: Vec<f64>,
    pub volume: &'a dyn VolumeEvaluator,
    pub exponent: usize,
    pub fd_step: f64,
}

impl RatioObjective for PairingRatio<'_> {
    fn log_ratio(&self, x: &[f64]) -> Option<f64> {
        let p = dot_f64(&self.gamma, x);
        let v = self.volume.value(x);
        (p > 0.0 && v > 0.0 && p.is_finite() && v.is_finite())
            .then(|| p.ln() - v.ln() / self.exponent as f64)
    }

    fn log_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let p = dot_f64(&self.gamma, x);
        let v = self.volume.value(x);
        if p <= 0.0 || v <= 0.0 {
            return None;
        }
        let dv = match self.volume.gradient(x) {
            Some(g) => g,
            None => fd_gradient(self.volume, x, self.fd_step)?,
        };
        let n = self.exponent as f64;
        Some(self.gamma.iter().zip(&dv).map(|(g, d)| g / p - d / (n * v)).collect())
    }
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(z: &[f64]) -> Vec<f64> {
    let mut u = z.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    z.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// The ambient point with weights `w` on the generators.
fn combine(gens: &[Vec<f64>], w: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; gens[0].len()];
    for (g, wi) in gens.iter().zip(w) {
        for (xj, gj) in x.iter_mut().zip(g) {
            *xj += wi * gj;
        }
    }
    x
}

fn pull_back(gens: &[Vec<f64>], gx: &[f64]) -> Vec<f64> {
    gens.iter().map(|g| dot_f64(g, gx)).collect()
}

fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Log-barrier on the facets, normalized to be degree-zero homogeneous.
struct Barrier<'a> {
    facets: &'a [Vec<f64>],
    mu: f64,
}

impl Barrier<'_> {
    fn value(&self, x: &[f64]) -> Option<f64> {
        if self.mu == 0.0 || self.facets.is_empty() {
            return Some(0.0);
        }
        let slacks: Vec<f64> = self.facets.iter().map(|f| dot_f64(f, x)).collect();
        let total: f64 = slacks.iter().sum();
        if slacks.iter().any(|&s| s <= 0.0) || total <= 0.0 {
            return None;
        }
        Some(-self.mu * slacks.iter().map(|s| (s / total).ln()).sum::<f64>())
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        if self.mu == 0.0 || self.facets.is_empty() {
            return g;
        }
        let m = self.facets.len() as f64;
        let slacks: Vec<f64> = self.facets.iter().map(|f| dot_f64(f, x)).collect();
        let total: f64 = slacks.iter().sum();
        for (f, s) in self.facets.iter().zip(&slacks) {
            for (gj, fj) in g.iter_mut().zip(f) {
                *gj += self.mu * (m * fj / total - fj / s);
            }
        }
        g
    }
}

struct StartOutcome {
    log_value: f64,
    w: Vec<f64>,
    iterations: usize,
    kkt_gap: f64,
    converged: bool,
    trace: Vec<f64>,
}

struct Runner<'a> {
    gens: &'a [Vec<f64>],
    facets: &'a [Vec<f64>],
    objective: &'a dyn RatioObjective,
    config: &'a OptConfig,
}

impl Runner<'_> {
    fn log_r(&self, w: &[f64]) -> Option<f64> {
        self.objective.log_ratio(&combine(self.gens, w))
    }

    fn phase_value(&self, barrier: &Barrier, w: &[f64]) -> Option<(f64, f64)> {
        let x = combine(self.gens, w);
        let r = self.objective.log_ratio(&x)?;
        Some((r + barrier.value(&x)?, r))
    }

    fn phase_gradient(&self, barrier: &Barrier, w: &[f64]) -> Option<Vec<f64>> {
        let x = combine(self.gens, w);
        let mut g = self.objective.log_gradient(&x)?;
        for (gi, bi) in g.iter_mut().zip(barrier.gradient(&x)) {
            *gi += bi;
        }
        Some(pull_back(self.gens, &g))
    }

    fn run(&self, start: usize) -> Option<StartOutcome> {
        let k = self.gens.len();
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed.wrapping_add(start as u64));
        let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mut log_r = self.log_r(&w)?;
        let mut trace = vec![log_r.exp()];
        if k == 1 {
            return Some(StartOutcome { log_value: log_r, w, iterations: 0, kkt_gap: 0.0, converged: true, trace });
        }
        let budget = self.config.max_iter.max(1);
        let phases = [(1e-4, budget / 4, 1e-6), (0.0, budget - budget / 4, self.config.tol)];
        let mut iterations = 0;
        let mut gap = f64::INFINITY;
        let mut converged = false;
        for (mu, limit, tol) in phases {
            let barrier = Barrier { facets: self.facets, mu };
            let final_phase = mu == 0.0;
            let Some((mut f, _)) = self.phase_value(&barrier, &w) else { continue };
            let mut g = match self.phase_gradient(&barrier, &w) {
                Some(g) => g,
                None if final_phase => {
                    let nm = self.nelder_mead(&mut w, &mut log_r, &mut trace, limit);
                    iterations += nm.0;
                    gap = nm.1;
                    converged = gap <= self.config.tol;
                    break;
                }
                None => continue,
            };
            let mut step = 1.0;
            let mut phase_iters = 0;
            loop {
                gap = inf_norm_diff(&w, &project_simplex(&sub_scaled(&w, &g, 1.0)));
                if gap <= tol {
                    converged = final_phase;
                    break;
                }
                if phase_iters >= limit {
                    break;
                }
                phase_iters += 1;
                iterations += 1;
                let mut accepted = None;
                let mut t = step;
                for _ in 0..60 {
                    let cand = project_simplex(&sub_scaled(&w, &g, t));
                    let d: Vec<f64> = cand.iter().zip(&w).map(|(a, b)| a - b).collect();
                    let decrease = dot_f64(&g, &d);
                    if let Some((fc, rc)) = self.phase_value(&barrier, &cand) {
                        let slack = 1e-15 * f.abs().max(1.0);
                        if fc <= f + 1e-4 * decrease + slack && rc <= log_r {
                            accepted = Some((cand, fc, rc));
                            break;
                        }
                    }
                    t *= 0.5;
                }
                let Some((cand, fc, rc)) = accepted else { break };
                let g_new = match self.phase_gradient(&barrier, &cand) {
                    Some(g) => g,
                    None => {
                        w = cand;
                        log_r = rc;
                        trace.push(rc.exp());
                        if final_phase {
                            let nm = self.nelder_mead(&mut w, &mut log_r, &mut trace, limit - phase_iters);
                            iterations += nm.0;
                            gap = nm.1;
                            converged = gap <= self.config.tol;
                        }
                        break;
                    }
                };
                let s: Vec<f64> = cand.iter().zip(&w).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot_f64(&s, &y);
                step = if sy > 0.0 { dot_f64(&s, &s) / sy } else { t * 2.0 };
                step = step.clamp(1e-12, 1e12);
                w = cand;
                f = fc;
                log_r = rc;
                g = g_new;
                trace.push(rc.exp());
            }
            if final_phase {
                break;
            }
        }
        Some(StartOutcome { log_value: log_r, w, iterations, kkt_gap: gap, converged, trace })
    }

    /// Derivative-free polish on `log R`; returns (iterations, final simplex size).
    fn nelder_mead(&self, w: &mut Vec<f64>, log_r: &mut f64, trace: &mut Vec<f64>, limit: usize) -> (usize, f64) {
        let k = w.len();
        let eval = |z: &[f64]| self.log_r(&project_simplex(z)).unwrap_or(f64::INFINITY);
        let mut pts: Vec<(Vec<f64>, f64)> = vec![(w.clone(), *log_r)];
        for i in 0..k {
            let mut z = w.clone();
            z[i] += 0.05;
            let fz = eval(&z);
            pts.push((z, fz));
        }
        let mut size = f64::INFINITY;
        let mut iters = 0;
        while iters < limit {
            pts.sort_by(|a, b| a.1.total_cmp(&b.1));
            size = pts[1..].iter().map(|p| inf_norm_diff(&p.0, &pts[0].0)).fold(0.0, f64::max);
            if size <= self.config.tol {
                break;
            }
            iters += 1;
            let worst = pts[k].clone();
            let centroid: Vec<f64> = (0..k).map(|j| pts[..k].iter().map(|p| p.0[j]).sum::<f64>() / k as f64).collect();
            let along = |c: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(m, x)| m + c * (m - x)).collect() };
            let refl = along(1.0);
            let fr = eval(&refl);
            if fr < pts[0].1 {
                let exp = along(2.0);
                let fe = eval(&exp);
                pts[k] = if fe < fr { (exp, fe) } else { (refl, fr) };
            } else if fr < pts[k - 1].1 {
                pts[k] = (refl, fr);
            } else {
                let con = along(-0.5);
                let fc = eval(&con);
                if fc < worst.1 {
                    pts[k] = (con, fc);
                } else {
                    let best = pts[0].0.clone();
                    for p in pts.iter_mut().skip(1) {
                        p.0 = p.0.iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect();
                        p.1 = eval(&p.0);
                    }
                }
            }
            let best = pts.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
            if best.1 < *log_r {
                *log_r = best.1;
                *w = project_simplex(&best.0);
                trace.push(log_r.exp());
            }
        }
        (iters, size)
    }
}

fn sub_scaled(w: &[f64], g: &[f64], t: f64) -> Vec<f64> {
    w.iter().zip(g).map(|(a, b)| a - t * b).collect()
}

/// Multi-start minimization of a ratio objective over the cone spanned by `gens`.
///
/// Returns `None` when every start was discarded.
pub fn minimize_ratio(
    gens: &[Vec<f64>],
    facets: &[Vec<f64>],
    objective: &dyn RatioObjective,
    config: &OptConfig,
) -> Option<(f64, Vec<f64>, OptResult)> {
    let runner = Runner { gens, facets, objective, config };
    let mut best: Option<StartOutcome> = None;
    let mut used = 0;
    for s in 0..config.starts.max(1) {
        let Some(out) = runner.run(s) else { continue };
        used += 1;
        if best.as_ref().map_or(true, |b| out.log_value < b.log_value) {
            best = Some(out);
        }
    }
    let best = best?;
    let x = combine(gens, &best.w);
    let value = best.log_value.exp();
    let result = OptResult {
        value,
        argmin: x.clone(),
        iterations: best.iterations,
        starts_used: used,
        kkt_gap: best.kkt_gap,
        status: if best.converged { OptStatus::Converged } else { OptStatus::MaxIter },
        trace: best.trace,
        diagnostics: Vec::new(),
    };
    Some((best.log_value, x, result))
}

/// How exact zero pairings with generators are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRule {
    /// Any generator orthogonal to `gamma` forces the infimum to 0.
    AnyTight,
    /// Only when the orthogonal face carries positive volume.
    TightWithVolume,
}

pub struct OptProblem<'a> {
    pub cone: &'a PolyhedralCone,
    pub gamma: &'a [Rat],
    pub volume: &'a dyn VolumeEvaluator,
    pub exponent: usize,
    pub rule: BoundaryRule,
}

fn boundary_result(argmin: Vec<f64>, note: String) -> OptResult {
    OptResult {
        value: 0.0,
        argmin,
        iterations: 0,
        starts_used: 0,
        kkt_gap: 0.0,
        status: OptStatus::BoundaryZero,
        trace: Vec::new(),
        diagnostics: vec![note],
    }
}

/// Exact decision whether the infimum is 0 because of the generators' pairings.
pub fn detect_boundary_zero(problem: &OptProblem) -> Option<OptResult> {
    let gens = problem.cone.generators();
    let pairings: Vec<Rat> = gens.iter().map(|g| dot(g, problem.gamma)).collect();
    if let Some(i) = pairings.iter().position(|p| p.is_negative()) {
        return Some(boundary_result(
            crate::algebra::to_f64_vec(&gens[i]),
            format!("generator #{i} pairs negatively"),
        ));
    }
    let tight: Vec<usize> = (0..gens.len()).filter(|&i| pairings[i].is_zero()).collect();
    if tight.is_empty() {
        return None;
    }
    let mut face = vec![Rat::zero(); problem.cone.rank()];
    for &i in &tight {
        for (f, g) in face.iter_mut().zip(&gens[i]) {
            *f += g;
        }
    }
    let face_f64 = crate::algebra::to_f64_vec(&face);
    let positive = match problem.rule {
        BoundaryRule::AnyTight => true,
        BoundaryRule::TightWithVolume => match problem.volume.value_exact(&face) {
            Some(v) => v.is_positive(),
            None => problem.volume.value(&face_f64) > 1e-12,
        },
    };
    positive.then(|| boundary_result(face_f64, format!("generators {tight:?} are orthogonal to the class")))
}

/// `inf R` over the cone interior, or 0 with status `boundary_zero`.
pub fn min_pairing_on_slice(problem: &OptProblem, config: &OptConfig) -> Result<OptResult> {
    let rho = problem.cone.rank();
    if problem.gamma.len() != rho {
        return Err(Error::Argument(format!("class must have {rho} coordinates")));
    }
    if problem.exponent == 0 {
        return Err(Error::Argument("exponent must be positive".into()));
    }
    if let Some(r) = detect_boundary_zero(problem) {
        return Ok(r);
    }
    let objective = PairingRatio {
        gamma: crate::algebra::to_f64_vec(problem.gamma),
        volume: problem.volume,
        exponent: problem.exponent,
        fd_step: config.fd_step,
    };
    let gens = problem.cone.generators_f64();
    let facets = problem.cone.facets_f64();
    match minimize_ratio(gens, facets, &objective, config) {
        Some((_, x, mut result)) => {
            let v = problem.volume.value(&x);
            if v > 0.0 {
                let s = v.powf(-1.0 / problem.exponent as f64);
                result.argmin = x.iter().map(|c| c * s).collect();
            }
            Ok(result)
        }
        None => Ok(OptResult {
            value: f64::INFINITY,
            argmin: vec![0.0; rho],
            iterations: 0,
            starts_used: 0,
            kkt_gap: f64::INFINITY,
            status: OptStatus::MaxIter,
            trace: Vec::new(),
            diagnostics: vec!["volume vanished at every start".into()],
        }),
    }
}

/// True iff `gamma` and `beta^{n-1}` are parallel up to angle `tol`.
pub fn certify_interior_optimum(form: &SymmetricForm<Rat>, beta: &[f64], gamma: &[f64], tol: f64) -> bool {
    let c = DenseForm::new(form).power_gradient(beta);
    let nc = dot_f64(&c, &c).sqrt();
    let ng = dot_f64(gamma, gamma).sqrt();
    if nc == 0.0 || ng == 0.0 {
        return false;
    }
    let cos = (dot_f64(&c, gamma) / (nc * ng)).clamp(-1.0, 1.0);
    cos.acos() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_vec, to_f64_vec};
    use crate::varieties::catalog;

    fn solve(name: &str, gamma: &[i64], rule: BoundaryRule) -> OptResult {
        let v = catalog(name, None).unwrap();
        let vol = TensorVolume::new(v.intersection());
        let g = rat_vec(gamma);
        let p = OptProblem { cone: v.nef(), gamma: &g, volume: &vol, exponent: v.dim(), rule };
        min_pairing_on_slice(&p, &OptConfig::default()).unwrap()
    }

    #[test]
    fn quadric_closed_form() {
        let r = solve("P1xP1", &[2, 3], BoundaryRule::AnyTight);
        assert!((r.value - 12f64.sqrt()).abs() < 1e-10, "{r:?}");
        assert_eq!(r.status, OptStatus::Converged);
        assert!(r.kkt_gap <= 1e-8);
    }

    #[test]
    fn rank_one_is_trivial() {
        let r = solve("P3", &[1], BoundaryRule::AnyTight);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn boundary_detected_exactly() {
        let v = catalog("F1", None).unwrap();
        let e = v.divisor_to_curve(&rat_vec(&[0, 1])).unwrap();
        let vol = TensorVolume::new(v.intersection());
        let p = OptProblem { cone: v.nef(), gamma: &e, volume: &vol, exponent: 2, rule: BoundaryRule::TightWithVolume };
        let r = min_pairing_on_slice(&p, &OptConfig::default()).unwrap();
        assert_eq!(r.status, OptStatus::BoundaryZero);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn deterministic_and_monotone() {
        let a = solve("Cutkosky(1)", &[2, 3], BoundaryRule::AnyTight);
        let b = solve("Cutkosky(1)", &[2, 3], BoundaryRule::AnyTight);
        assert_eq!(a, b);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn certificate() {
        let v = catalog("P1xP1", None).unwrap();
        assert!(certify_interior_optimum(v.intersection(), &[0.7, 0.7], &[1.0, 1.0], 1e-9));
        assert!(!certify_interior_optimum(v.intersection(), &[0.7, 0.7], &[1.0, 4.0], 1e-3));
        let p3 = catalog("P3", None).unwrap();
        assert!(certify_interior_optimum(p3.intersection(), &[2.0], &[5.0], 1e-12));
    }

    #[test]
    fn optimum_certifies_on_quadric() {
        let r = solve("P1xP1", &[1, 4], BoundaryRule::AnyTight);
        let v = catalog("P1xP1", None).unwrap();
        assert!(certify_interior_optimum(v.intersection(), &r.argmin, &[1.0, 4.0], 1e-6));
        assert!((r.value - 8f64.sqrt()).abs() < 1e-10);
        assert_eq!(to_f64_vec(&rat_vec(&[1])), vec![1.0]);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
    }
}
