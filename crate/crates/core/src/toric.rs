//! Smooth complete toric varieties: divisor polytopes, their exact volumes,
//! and the numerical data (cones and intersection tensor) they determine.
//!
//! A torus-invariant divisor `D = sum a_i D_i` has polytope
//! `P_a = { m : <m, v_i> >= -a_i }`, and `vol(D) = n! * vol_n(P_a)` for every
//! such divisor, nef or not. The intersection tensor is recovered from
//! volumes alone by inclusion-exclusion over sums of nef classes.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::form::factorial;
use crate::algebra::linalg::{determinant, inverse, rank, solve};
use crate::algebra::{dot, format_rat_vec, rat, Field, Rat, SymmetricForm};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::optimize::VolumeEvaluator;
use crate::varieties::{BigVolumeOracle, NumericalVariety, VarietyData};

#[derive(Clone, Debug, PartialEq)]
pub struct ToricFan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl ToricFan {
    /// Validates smoothness, primitivity and completeness.
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Fan("dimension must be positive".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::Fan(format!("ray #{i} has length {} != {dim}", r.len())));
            }
            let g = r.iter().fold(0i64, |acc, &x| gcd(acc, x));
            if g != 1 {
                return Err(Error::Fan(format!("ray #{i} {r:?} is not primitive")));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.iter().enumerate() {
            let mut cone = cone.clone();
            cone.sort_unstable();
            cone.dedup();
            if cone.len() != dim || cone.iter().any(|&i| i >= rays.len()) {
                return Err(Error::Fan(format!(
                    "cone #{c} {cone:?} must list {dim} distinct ray indices"
                )));
            }
            let m: Vec<Vec<Rat>> = cone.iter().map(|&i| int_row(&rays[i])).collect();
            let det = determinant(&m);
            if det.abs() != Rat::one() {
                return Err(Error::Fan(format!(
                    "cone #{c} {cone:?} is not smooth (determinant {det})"
                )));
            }
            cones.push(cone);
        }
        for i in 0..rays.len() {
            if !cones.iter().any(|c| c.contains(&i)) {
                return Err(Error::Fan(format!("ray #{i} lies in no maximal cone")));
            }
        }
        let fan = Self { dim, rays, max_cones: cones };
        fan.check_complete()?;
        Ok(fan)
    }

    fn check_complete(&self) -> Result<()> {
        // every codimension-one face of a maximal cone is shared by exactly two maximal cones
        let mut faces: HashMap<Vec<usize>, usize> = HashMap::new();
        for cone in &self.max_cones {
            for skip in 0..cone.len() {
                let mut f = cone.clone();
                f.remove(skip);
                *faces.entry(f).or_default() += 1;
            }
        }
        if let Some((face, count)) = faces.iter().find(|(_, &c)| c != 2) {
            return Err(Error::Fan(format!(
                "not complete: wall {face:?} belongs to {count} maximal cone(s)"
            )));
        }
        // generic probe directions must land in exactly one maximal cone
        const PRIMES: [i64; 8] = [1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049];
        let inverses: Vec<Vec<Vec<Rat>>> = self
            .max_cones
            .iter()
            .map(|c| {
                let m: Vec<Vec<Rat>> = c.iter().map(|&i| int_row(&self.rays[i])).collect();
                inverse(&crate::algebra::linalg::transpose(&m)).expect("smooth cone")
            })
            .collect();
        let total = 3usize.pow(self.dim as u32);
        for code in 0..total {
            let mut c = code;
            let probe: Vec<Rat> = (0..self.dim)
                .map(|k| {
                    let s = (c % 3) as i64 - 1;
                    c /= 3;
                    rat(s) + Rat::new(1.into(), PRIMES[k % PRIMES.len()].into())
                })
                .collect();
            let mut hits = 0;
            for inv in &inverses {
                let coeffs = crate::algebra::linalg::mat_vec(inv, &probe);
                if coeffs.iter().all(|x| x.is_positive()) {
                    hits += 1;
                }
            }
            if hits != 1 {
                return Err(Error::Fan(format!(
                    "not complete: probe direction {} lies in {hits} maximal cones",
                    format_rat_vec(&probe)
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn picard_rank(&self) -> usize {
        self.rays.len() - self.dim
    }

    /// Projective space: rays `e_1..e_n, -sum e_i`, all `n`-subsets as cones.
    pub fn projective_space(n: usize) -> Self {
        let mut rays: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        rays.push(vec![-1; n]);
        let cones = (0..=n)
            .map(|skip| (0..=n).filter(|&i| i != skip).collect())
            .collect();
        Self::new(n, rays, cones).expect("projective space fan")
    }

    /// Product of `n` projective lines: ray `2i` is `+e_i`, ray `2i+1` is `-e_i`.
    pub fn product_of_lines(n: usize) -> Self {
        let mut rays = Vec::new();
        for i in 0..n {
            for s in [1, -1] {
                rays.push((0..n).map(|j| if i == j { s } else { 0 }).collect());
            }
        }
        let cones = (0..1usize << n)
            .map(|mask| (0..n).map(|i| 2 * i + ((mask >> i) & 1)).collect())
            .collect();
        Self::new(n, rays, cones).expect("product of lines fan")
    }

    /// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Self {
        Self::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .expect("Hirzebruch fan")
    }

    /// `P(O + O(-k))` over the plane: base rays `(1,0,0), (0,1,0), (-1,-1,k)`
    /// and fibre rays `(0,0,1), (0,0,-1)`.
    pub fn plane_bundle(k: i64) -> Self {
        let rays = vec![
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![-1, -1, k],
            vec![0, 0, 1],
            vec![0, 0, -1],
        ];
        let mut cones = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            cones.push(vec![i, j, 3]);
            cones.push(vec![i, j, 4]);
        }
        Self::new(3, rays, cones).expect("plane bundle fan")
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn int_row(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| rat(x)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeVolume<T> {
    pub volume: T,
    pub empty: bool,
}

/// Exact (or float) Euclidean volume of `P_a = { m : <m, v_i> >= -a_i }`.
///
/// Vertices come from exhaustive `n`-subsets of the inequalities; the volume
/// from a pulling triangulation built on the vertex/facet incidences.
pub fn polytope_volume<T: Field>(fan: &ToricFan, a: &[T]) -> Result<PolytopeVolume<T>> {
    let n = fan.dim;
    if a.len() != fan.rays.len() {
        return Err(Error::Argument(format!(
            "{} ray coefficients given for a fan with {} rays",
            a.len(),
            fan.rays.len()
        )));
    }
    let rays: Vec<Vec<T>> = fan
        .rays
        .iter()
        .map(|r| r.iter().map(|&x| T::from_i64(x)).collect())
        .collect();
    let tol = if T::is_exact() {
        T::zero()
    } else {
        let scale = a
            .iter()
            .map(|x| x.to_f64().abs())
            .fold(1.0f64, f64::max);
        T::from_rat(&crate::algebra::rat_from_f64(1e-10 * scale))
    };
    let slack = |m: &[T], i: usize| dot(m, &rays[i]) + a[i].clone();

    let mut vertices: Vec<Vec<T>> = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let lhs: Vec<Vec<T>> = subset.iter().map(|&i| rays[i].clone()).collect();
        let rhs: Vec<T> = subset.iter().map(|&i| -a[i].clone()).collect();
        if let Some(m) = solve(&lhs, &rhs) {
            let feasible = (0..rays.len()).all(|i| slack(&m, i) >= -tol.clone());
            let seen = vertices.iter().any(|v| {
                v.iter()
                    .zip(&m)
                    .all(|(x, y)| (x.clone() - y.clone()).abs_val() <= tol.clone())
            });
            if feasible && !seen {
                vertices.push(m);
            }
        }
        if !next_subset(&mut subset, rays.len()) {
            break;
        }
    }
    if vertices.is_empty() {
        return Ok(PolytopeVolume { volume: T::zero(), empty: true });
    }
    if affine_dim(&vertices, &(0..vertices.len()).collect::<Vec<_>>()) < n {
        return Ok(PolytopeVolume { volume: T::zero(), empty: false });
    }
    let tight: Vec<Vec<bool>> = vertices
        .iter()
        .map(|v| (0..rays.len()).map(|i| slack(v, i).abs_val() <= tol.clone()).collect())
        .collect();
    let all: Vec<usize> = (0..vertices.len()).collect();
    let simplices = pulling_triangulation(&vertices, &tight, &all, n);
    let mut volume = T::zero();
    for s in simplices {
        let rows: Vec<Vec<T>> = s[1..]
            .iter()
            .map(|&v| {
                vertices[v]
                    .iter()
                    .zip(&vertices[s[0]])
                    .map(|(x, y)| x.clone() - y.clone())
                    .collect()
            })
            .collect();
        volume = volume + determinant(&rows).abs_val();
    }
    Ok(PolytopeVolume {
        volume: volume / T::from_i64(factorial(n) as i64),
        empty: false,
    })
}

fn next_subset(s: &mut [usize], m: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < m - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn affine_dim<T: Field>(vertices: &[Vec<T>], ids: &[usize]) -> usize {
    if ids.len() <= 1 {
        return 0;
    }
    let base = &vertices[ids[0]];
    let diffs: Vec<Vec<T>> = ids[1..]
        .iter()
        .map(|&i| {
            vertices[i]
                .iter()
                .zip(base)
                .map(|(x, y)| x.clone() - y.clone())
                .collect()
        })
        .collect();
    rank(&diffs)
}

/// Simplices (vertex index lists) of a pulling triangulation of the face
/// spanned by `ids`, which has dimension `dim`.
fn pulling_triangulation<T: Field>(
    vertices: &[Vec<T>],
    tight: &[Vec<bool>],
    ids: &[usize],
    dim: usize,
) -> Vec<Vec<usize>> {
    if dim == 0 {
        return vec![vec![ids[0]]];
    }
    let apex = ids[0];
    let ineqs = tight[0].len();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for i in 0..ineqs {
        let sub: Vec<usize> = ids.iter().copied().filter(|&v| tight[v][i]).collect();
        if sub.len() < dim || sub.len() == ids.len() || sub.contains(&apex) {
            continue;
        }
        if facets.contains(&sub) || affine_dim(vertices, &sub) != dim - 1 {
            continue;
        }
        facets.push(sub);
    }
    let mut out = Vec::new();
    for f in facets {
        for mut s in pulling_triangulation(vertices, tight, &f, dim - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

/// A fan together with ray-coefficient lifts of a chosen divisor basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ToricModel {
    fan: ToricFan,
    /// `lifts[k]` is a ray-coefficient vector representing basis class `k`.
    lifts: Vec<Vec<Rat>>,
    /// Inverse of the reduced lift matrix, mapping reduced coefficients to basis coordinates.
    reduce_inverse: Vec<Vec<Rat>>,
    /// Per maximal cone: inverse of the matrix whose rows are the cone's rays.
    cone_inverses: Vec<Vec<Vec<Rat>>>,
}

impl ToricModel {
    pub fn new(fan: ToricFan, lifts: Vec<Vec<Rat>>) -> Result<Self> {
        let rho = fan.picard_rank();
        if lifts.len() != rho {
            return Err(Error::Argument(format!(
                "{} basis lifts given but the Picard rank is {rho}",
                lifts.len()
            )));
        }
        if let Some(l) = lifts.iter().find(|l| l.len() != fan.rays.len()) {
            return Err(Error::Argument(format!(
                "lift {} does not have one coefficient per ray",
                format_rat_vec(l)
            )));
        }
        let cone_inverses: Vec<Vec<Vec<Rat>>> = fan
            .max_cones
            .iter()
            .map(|c| {
                let m: Vec<Vec<Rat>> = c.iter().map(|&i| int_row(&fan.rays[i])).collect();
                inverse(&m).expect("smooth cone")
            })
            .collect();
        let mut model = Self { fan, lifts, reduce_inverse: Vec::new(), cone_inverses };
        let columns: Vec<Vec<Rat>> = model.lifts.iter().map(|l| model.reduce(l)).collect();
        let rows = crate::algebra::linalg::transpose(&columns);
        model.reduce_inverse = inverse(&rows).ok_or_else(|| {
            Error::Argument("basis lifts are linearly dependent in the class group".into())
        })?;
        Ok(model)
    }

    /// Default basis: the classes of the rays outside the first maximal cone.
    pub fn with_default_basis(fan: ToricFan) -> Result<(Self, Vec<String>)> {
        let first = fan.max_cones[0].clone();
        let others: Vec<usize> = (0..fan.rays.len()).filter(|i| !first.contains(i)).collect();
        let lifts = others
            .iter()
            .map(|&i| (0..fan.rays.len()).map(|j| rat((i == j) as i64)).collect())
            .collect();
        let labels = others.iter().map(|i| format!("D{i}")).collect();
        Ok((Self::new(fan, lifts)?, labels))
    }

    pub fn fan(&self) -> &ToricFan {
        &self.fan
    }

    pub fn lifts(&self) -> &[Vec<Rat>] {
        &self.lifts
    }

    pub fn rank(&self) -> usize {
        self.lifts.len()
    }

    /// `m_sigma` with `<m, v_i> = -a_i` on the rays of maximal cone `c`.
    fn cone_vertex<T: Field>(&self, c: usize, a: &[T]) -> Vec<T> {
        let inv = &self.cone_inverses[c];
        let rhs: Vec<T> = self.fan.max_cones[c].iter().map(|&i| -a[i].clone()).collect();
        inv.iter()
            .map(|row| {
                row.iter()
                    .zip(&rhs)
                    .fold(T::zero(), |acc, (x, y)| acc + T::from_rat(x) * y.clone())
            })
            .collect()
    }

    /// Adds the principal divisor of `m` to the coefficient vector.
    fn translate<T: Field>(&self, a: &[T], m: &[T]) -> Vec<T> {
        a.iter()
            .zip(&self.fan.rays)
            .map(|(ai, v)| {
                let r: Vec<T> = v.iter().map(|&x| T::from_i64(x)).collect();
                ai.clone() + dot(m, &r)
            })
            .collect()
    }

    /// Coefficients on the rays outside the first cone after making those inside zero.
    fn reduce(&self, a: &[Rat]) -> Vec<Rat> {
        let m = self.cone_vertex(0, a);
        let t = self.translate(a, &m);
        let first = &self.fan.max_cones[0];
        (0..t.len()).filter(|i| !first.contains(i)).map(|i| t[i].clone()).collect()
    }

    /// Basis coordinates of the class of the ray-coefficient vector `a`.
    pub fn class_of(&self, a: &[Rat]) -> Vec<Rat> {
        crate::algebra::linalg::mat_vec(&self.reduce_inverse, &self.reduce(a))
    }

    /// The plain lift `sum x_k lifts[k]`.
    pub fn lift<T: Field>(&self, x: &[T]) -> Vec<T> {
        let mut a = vec![T::zero(); self.fan.rays.len()];
        for (xk, l) in x.iter().zip(&self.lifts) {
            for (ai, li) in a.iter_mut().zip(l) {
                *ai = ai.clone() + xk.clone() * T::from_rat(li);
            }
        }
        a
    }

    /// Lift with the fewest negative coefficients, ties broken lexicographically.
    ///
    /// Candidates are the plain lift and its translates vanishing on each maximal cone.
    pub fn canonical_lift(&self, x: &[Rat]) -> Vec<Rat> {
        let base = self.lift(x);
        let mut best = base.clone();
        let negatives = |v: &[Rat]| v.iter().filter(|c| c.is_negative()).count();
        for c in 0..self.fan.max_cones.len() {
            let m = self.cone_vertex(c, &base);
            let cand = self.translate(&base, &m);
            let key = (negatives(&cand), &cand);
            if key < (negatives(&best), &best) {
                best = cand;
            }
        }
        best
    }

    /// `vol = n! * vol_n(P)` for the class with basis coordinates `x`.
    pub fn volume(&self, x: &[Rat]) -> Result<Rat> {
        let a = self.canonical_lift(x);
        let v = polytope_volume(&self.fan, &a)?;
        Ok(v.volume * rat(factorial(self.fan.dim) as i64))
    }

    pub fn volume_f64(&self, x: &[f64]) -> f64 {
        let a = self.lift(x);
        polytope_volume(&self.fan, &a)
            .map(|v| v.volume * factorial(self.fan.dim) as f64)
            .unwrap_or(0.0)
    }

    /// Linear functionals (in basis coordinates) whose nonnegativity characterizes nef classes:
    /// for each maximal cone `sigma` and ray `j` outside it, `<m_sigma, v_j> + a_j >= 0`.
    pub fn nef_inequalities(&self) -> Vec<Vec<Rat>> {
        let mut out = Vec::new();
        let r = self.fan.rays.len();
        for (c, cone) in self.fan.max_cones.iter().enumerate() {
            for j in 0..r {
                if cone.contains(&j) {
                    continue;
                }
                // coefficient vector on rays: e_j - (v_j^T M_sigma^{-1}) on sigma
                let vj = int_row(&self.fan.rays[j]);
                let inv = &self.cone_inverses[c];
                let mut coeff = vec![Rat::zero(); r];
                coeff[j] = Rat::one();
                for (pos, &i) in cone.iter().enumerate() {
                    let w: Rat = (0..self.fan.dim).map(|k| &vj[k] * &inv[k][pos]).sum();
                    coeff[i] -= w;
                }
                let functional: Vec<Rat> = self
                    .lifts
                    .iter()
                    .map(|l| dot(&coeff, l))
                    .collect();
                if functional.iter().any(|x| !x.is_zero()) {
                    out.push(functional);
                }
            }
        }
        out
    }

    pub fn psef_generators(&self) -> Vec<Vec<Rat>> {
        let r = self.fan.rays.len();
        (0..r)
            .map(|i| {
                let e: Vec<Rat> = (0..r).map(|j| rat((i == j) as i64)).collect();
                self.class_of(&e)
            })
            .collect()
    }

    pub fn nef_cone(&self) -> Result<PolyhedralCone> {
        PolyhedralCone::from_inequalities(self.rank(), &self.nef_inequalities())
    }

    pub fn psef_cone(&self) -> Result<PolyhedralCone> {
        PolyhedralCone::from_generators(self.rank(), &self.psef_generators())
    }

    /// Intersection tensor in the lift basis, recovered from polytope volumes.
    ///
    /// For nef `K_1..K_n`, `K_1 ... K_n = sum over nonempty T of
    /// (-1)^(n-|T|) vol_n(P_{sum_{i in T} K_i})`, evaluated on independent nef
    /// generators and then rewritten in the basis.
    pub fn polarization_tensor(&self) -> Result<SymmetricForm<Rat>> {
        let n = self.fan.dim;
        let rho = self.rank();
        let nef = self.nef_cone()?;
        let mut spanning: Vec<Vec<Rat>> = Vec::new();
        for g in nef.generators() {
            let mut trial = spanning.clone();
            trial.push(g.clone());
            if rank(&trial) == trial.len() {
                spanning = trial;
            }
        }
        if spanning.len() != rho {
            return Err(Error::Invariant("nef cone does not span the class group".into()));
        }
        let mut cache: HashMap<Vec<Rat>, Rat> = HashMap::new();
        let mut vol_of = |x: Vec<Rat>| -> Result<Rat> {
            if let Some(v) = cache.get(&x) {
                return Ok(v.clone());
            }
            let v = polytope_volume(&self.fan, &self.lift(&x))?.volume;
            cache.insert(x, v.clone());
            Ok(v)
        };
        let mut in_nef_basis = SymmetricForm::new(n, rho);
        for idx in SymmetricForm::<Rat>::sorted_indices(n, rho) {
            let mut total = Rat::zero();
            for mask in 1u32..(1 << n) {
                let mut sum = vec![Rat::zero(); rho];
                for (pos, &k) in idx.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        for (s, g) in sum.iter_mut().zip(&spanning[k]) {
                            *s += g;
                        }
                    }
                }
                let v = vol_of(sum)?;
                if (n - mask.count_ones() as usize) % 2 == 0 {
                    total += v;
                } else {
                    total -= v;
                }
            }
            in_nef_basis.set(&idx, total)?;
        }
        // basis vector j has coordinates (M^{-1})_{., j} over the spanning nef classes
        let m = crate::algebra::linalg::transpose(&spanning);
        let minv = inverse(&m).expect("independent nef classes");
        let columns: Vec<Vec<Rat>> = (0..rho)
            .map(|j| minv.iter().map(|row| row[j].clone()).collect())
            .collect();
        in_nef_basis.change_basis(&columns)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToricVolume {
    pub value: Rat,
    /// Set when the class is not pseudo-effective (value is then 0).
    pub outside: bool,
}

/// Numerical variety of a smooth complete fan in its default basis.
pub fn toric_variety(fan: ToricFan, name: &str) -> Result<NumericalVariety> {
    let (model, labels) = ToricModel::with_default_basis(fan)?;
    toric_variety_with_basis(model, name, labels, false)
}

/// Numerical variety of a toric model, keeping the model's basis.
pub fn toric_variety_with_basis(
    model: ToricModel,
    name: &str,
    basis: Vec<String>,
    nef_tangent_bundle: bool,
) -> Result<NumericalVariety> {
    if model.rank() > 6 {
        return Err(Error::Argument(format!(
            "Picard rank {} exceeds the supported maximum of 6",
            model.rank()
        )));
    }
    let nef = model.nef_cone()?;
    let psef = model.psef_cone()?;
    let intersection = model.polarization_tensor()?;
    NumericalVariety::new(VarietyData {
        name: name.to_string(),
        dim: model.fan().dim(),
        basis,
        intersection,
        nef_generators: nef.generators().to_vec(),
        psef_generators: psef.generators().to_vec(),
        negative_curves: Vec::new(),
        oracle: BigVolumeOracle::ToricPolytope(Box::new(model)),
        nef_tangent_bundle,
    })
}

/// Volume of a pseudo-effective class from its polytope.
pub fn vol_big_toric(v: &NumericalVariety, alpha: &[Rat]) -> Result<ToricVolume> {
    let BigVolumeOracle::ToricPolytope(model) = v.oracle() else {
        return Err(Error::Argument(format!(
            "{} was not built from a fan",
            v.name()
        )));
    };
    if !v.psef().contains(alpha) {
        return Ok(ToricVolume { value: Rat::zero(), outside: true });
    }
    Ok(ToricVolume { value: model.volume(alpha)?, outside: false })
}

/// Polytope volume as an optimizer evaluator; 0 outside the pseudo-effective cone.
pub struct ToricEvaluator {
    model: ToricModel,
    psef: PolyhedralCone,
}

impl ToricEvaluator {
    pub fn new(model: ToricModel) -> Result<Self> {
        let psef = model.psef_cone()?;
        Ok(Self { model, psef })
    }
}

impl VolumeEvaluator for ToricEvaluator {
    fn tag(&self) -> &'static str {
        "toric-polytope"
    }

    fn value(&self, x: &[f64]) -> f64 {
        let scale = x.iter().map(|c| c.abs()).fold(0.0, f64::max);
        if !self.psef.contains_f64(x, 1e-12 * scale) {
            return 0.0;
        }
        self.model.volume_f64(x).max(0.0)
    }

    fn value_exact(&self, x: &[Rat]) -> Option<Rat> {
        if !self.psef.contains(x) {
            return Some(Rat::zero());
        }
        self.model.volume(x).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat_vec, ratio};

    #[test]
    fn simplex_and_box_volumes() {
        let p2 = ToricFan::projective_space(2);
        for k in 1..4 {
            let v = polytope_volume(&p2, &rat_vec(&[k, 0, 0])).unwrap();
            assert_eq!(v.volume, ratio(k * k, 2));
        }
        let q = ToricFan::product_of_lines(2);
        // [0,s] x [0,t]: <m,e1> >= 0, <m,-e1> >= -s, ...
        let v = polytope_volume(&q, &rat_vec(&[0, 3, 0, 5])).unwrap();
        assert_eq!(v.volume, rat(15));
        let p3 = ToricFan::projective_space(3);
        let v = polytope_volume(&p3, &rat_vec(&[0, 0, 0, 1])).unwrap();
        assert_eq!(v.volume, ratio(1, 6));
    }

    #[test]
    fn empty_and_degenerate_polytopes() {
        let p2 = ToricFan::projective_space(2);
        let v = polytope_volume(&p2, &rat_vec(&[-1, 0, 0])).unwrap();
        assert!(v.empty);
        assert_eq!(v.volume, rat(0));
        let v = polytope_volume(&p2, &rat_vec(&[0, 0, 0])).unwrap();
        assert!(!v.empty);
        assert_eq!(v.volume, rat(0));
    }

    #[test]
    fn float_volume_agrees() {
        let fan = ToricFan::plane_bundle(3);
        let a = [0.3, 0.7, 1.1, 0.4, 2.0];
        let exact: Vec<Rat> = a.iter().map(|&x| crate::algebra::rat_from_f64(x)).collect();
        let ve = polytope_volume(&fan, &exact).unwrap().volume.to_f64();
        let vf = polytope_volume(&fan, &a).unwrap().volume;
        assert!((ve - vf).abs() < 1e-9 * ve.max(1.0), "{ve} vs {vf}");
    }

    #[test]
    fn rejects_bad_fans() {
        let err = ToricFan::new(2, vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap_err();
        assert!(err.to_string().contains("not primitive"));
        let err = ToricFan::new(
            2,
            vec![vec![1, 0], vec![1, 2], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not smooth"), "{err}");
        // a fan missing one quadrant
        let err = ToricFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not complete"), "{err}");
    }

    #[test]
    fn projective_plane_data() {
        let v = toric_variety(ToricFan::projective_space(2), "P2").unwrap();
        assert_eq!(v.rank(), 1);
        assert_eq!(v.intersection().get(&[0, 0]), rat(1));
        assert_eq!(v.nef().generators(), &[rat_vec(&[1])]);
        assert_eq!(v.psef().generators(), &[rat_vec(&[1])]);
    }

    #[test]
    fn first_hirzebruch_big_volumes() {
        let fan = ToricFan::hirzebruch(1);
        // basis (H, E) = (D3, D1)
        let lifts = vec![rat_vec(&[0, 0, 0, 1]), rat_vec(&[0, 1, 0, 0])];
        let model = ToricModel::new(fan, lifts).unwrap();
        let v = toric_variety_with_basis(model, "F1", vec!["H".into(), "E".into()], false).unwrap();
        assert_eq!(vol_big_toric(&v, &rat_vec(&[1, 0])).unwrap().value, rat(1));
        assert_eq!(vol_big_toric(&v, &rat_vec(&[1, 1])).unwrap().value, rat(1));
        assert_eq!(vol_big_toric(&v, &rat_vec(&[0, 1])).unwrap().value, rat(0));
        let out = vol_big_toric(&v, &rat_vec(&[0, -1])).unwrap();
        assert!(out.outside);
        assert_eq!(v.nef().generators(), &[rat_vec(&[1, -1]), rat_vec(&[1, 0])]);
        assert_eq!(v.psef().generators(), &[rat_vec(&[0, 1]), rat_vec(&[1, -1])]);
    }

    #[test]
    fn canonical_lift_prefers_nonnegative() {
        let fan = ToricFan::hirzebruch(1);
        let model = ToricModel::new(fan, vec![rat_vec(&[0, 0, 0, 1]), rat_vec(&[0, 1, 0, 0])]).unwrap();
        let a = model.canonical_lift(&rat_vec(&[2, -1]));
        assert!(a.iter().all(|c| !c.is_negative()), "{a:?}");
        assert_eq!(model.class_of(&a), rat_vec(&[2, -1]));
    }
}
