//! Closed convex polyhedral cones with generator and facet descriptions.
//!
//! Both descriptions are kept irredundant and stored as primitive integer
//! vectors (as rationals), so two cones are equal as sets exactly when their
//! sorted generator lists agree. Conversion between the descriptions is the
//! incremental double description method in exact arithmetic.

use num_traits::{Signed, Zero};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::algebra::linalg::rank;
use crate::algebra::{dot, format_rat_vec, primitive, rat_to_f64, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PolyhedralCone {
    rank: usize,
    generators: Vec<Vec<Rat>>,
    facets: Vec<Vec<Rat>>,
    generators_f64: Vec<Vec<f64>>,
    facets_f64: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub points: Vec<Vec<Rat>>,
    /// Set when boundary sampling degenerated to returning generator rays.
    pub rays_only: bool,
}

impl PolyhedralCone {
    /// Cone spanned by `generators`. Must be pointed and full-dimensional.
    pub fn from_generators(rank: usize, generators: &[Vec<Rat>]) -> Result<Self> {
        check_lengths(rank, generators, "generator")?;
        let gens = normalize_set(generators);
        if rank == 0 {
            return Err(Error::Cone("ambient rank must be positive".into()));
        }
        if rank_of(&gens) != rank {
            return Err(Error::Cone(format!(
                "empty interior: generators span a space of dimension {} < {rank}",
                rank_of(&gens)
            )));
        }
        let facets = extreme_rays(rank, &gens)
            .ok_or_else(|| Error::Cone("double description failed".into()))?;
        if rank_of(&facets) != rank {
            return Err(Error::Cone("not pointed: cone contains a line".into()));
        }
        let gens = prune(rank, &gens, &facets);
        Ok(Self::assemble(rank, gens, facets))
    }

    /// Cone `{x : <f, x> >= 0 for every f in inequalities}`. Must be pointed and full-dimensional.
    pub fn from_inequalities(rank: usize, inequalities: &[Vec<Rat>]) -> Result<Self> {
        check_lengths(rank, inequalities, "inequality")?;
        let ineqs = normalize_set(inequalities);
        if rank == 0 {
            return Err(Error::Cone("ambient rank must be positive".into()));
        }
        if rank_of(&ineqs) != rank {
            return Err(Error::Cone("not pointed: cone contains a line".into()));
        }
        let gens = extreme_rays(rank, &ineqs)
            .ok_or_else(|| Error::Cone("double description failed".into()))?;
        if rank_of(&gens) != rank {
            return Err(Error::Cone(format!(
                "empty interior: cone spans a space of dimension {} < {rank}",
                rank_of(&gens)
            )));
        }
        let facets = prune(rank, &ineqs, &gens);
        Ok(Self::assemble(rank, gens, facets))
    }

    /// Nonnegative orthant.
    pub fn orthant(rank: usize) -> Self {
        let gens: Vec<Vec<Rat>> = (0..rank)
            .map(|i| (0..rank).map(|j| Rat::from_integer(((i == j) as i64).into())).collect())
            .collect();
        Self::assemble(rank, gens.clone(), gens)
    }

    fn assemble(rank: usize, mut generators: Vec<Vec<Rat>>, mut facets: Vec<Vec<Rat>>) -> Self {
        generators.sort();
        facets.sort();
        let to_f = |v: &Vec<Vec<Rat>>| -> Vec<Vec<f64>> {
            v.iter().map(|x| x.iter().map(rat_to_f64).collect()).collect()
        };
        Self {
            rank,
            generators_f64: to_f(&generators),
            facets_f64: to_f(&facets),
            generators,
            facets,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Extreme rays, primitive and sorted.
    pub fn generators(&self) -> &[Vec<Rat>] {
        &self.generators
    }

    /// Facet normals, primitive and sorted.
    pub fn facets(&self) -> &[Vec<Rat>] {
        &self.facets
    }

    pub fn generators_f64(&self) -> &[Vec<f64>] {
        &self.generators_f64
    }

    pub fn facets_f64(&self) -> &[Vec<f64>] {
        &self.facets_f64
    }

    /// `{y : <x, y> >= 0 for all x in self}` under the coordinate pairing.
    pub fn dual(&self) -> Self {
        Self {
            rank: self.rank,
            generators: self.facets.clone(),
            facets: self.generators.clone(),
            generators_f64: self.facets_f64.clone(),
            facets_f64: self.generators_f64.clone(),
        }
    }

    /// Exact membership.
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|f| !dot(f, x).is_negative())
    }

    /// Exact interiority: every facet pairing strictly positive.
    pub fn is_interior(&self, x: &[Rat]) -> bool {
        self.facets.iter().all(|f| dot(f, x).is_positive())
    }

    /// Float membership: all facet pairings `>= -tol`.
    pub fn contains_f64(&self, x: &[f64], tol: f64) -> bool {
        self.facets_f64.iter().all(|f| crate::algebra::dot_f64(f, x) >= -tol)
    }

    /// Float interiority: all facet pairings `>= tol * |x|`, and `x != 0`.
    pub fn is_interior_f64(&self, x: &[f64], tol: f64) -> bool {
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        norm > 0.0
            && self
                .facets_f64
                .iter()
                .all(|f| crate::algebra::dot_f64(f, x) > tol * norm)
    }

    /// Indices of facets on which `x` pairs to zero.
    pub fn tight_facets(&self, x: &[Rat]) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&j| dot(&self.facets[j], x).is_zero())
            .collect()
    }

    /// True when `x` is in the cone but not in its interior.
    pub fn on_boundary(&self, x: &[Rat]) -> bool {
        self.contains(x) && !self.is_interior(x)
    }

    /// Same set, compared through the canonical irredundant descriptions.
    pub fn same_set(&self, other: &Self) -> bool {
        self.rank == other.rank && self.generators == other.generators
    }

    /// Seeded random points of the cone.
    ///
    /// Interior mode draws unit-exponential weights, normalizes them to sum 1
    /// and combines all generators. Boundary mode picks a random facet and
    /// combines only the generators lying on it, so that facet pairs to zero.
    pub fn sample<R: Rng>(&self, count: usize, rng: &mut R, mode: SampleMode) -> Samples {
        let mut points = Vec::with_capacity(count);
        let rays_only = mode == SampleMode::Boundary && self.rank == 1;
        for _ in 0..count {
            let pool: Vec<&Vec<Rat>> = match mode {
                SampleMode::Interior => self.generators.iter().collect(),
                SampleMode::Boundary if rays_only => self.generators.iter().collect(),
                SampleMode::Boundary => {
                    let f = &self.facets[rng.gen_range(0..self.facets.len())];
                    self.generators
                        .iter()
                        .filter(|g| dot(f, g).is_zero())
                        .collect()
                }
            };
            if rays_only {
                points.push(pool[rng.gen_range(0..pool.len())].clone());
                continue;
            }
            let weights: Vec<Rat> = pool.iter().map(|_| exp_weight(rng)).collect();
            let total = weights.iter().fold(Rat::zero(), |a, w| a + w);
            let mut p = vec![Rat::zero(); self.rank];
            for (g, w) in pool.iter().zip(&weights) {
                let w = w / &total;
                for (pi, gi) in p.iter_mut().zip(g.iter()) {
                    *pi += &w * gi;
                }
            }
            points.push(p);
        }
        Samples { points, rays_only }
    }

    /// Float sampling of interior points (weights as in [`Self::sample`]).
    pub fn sample_f64<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..count)
            .map(|_| {
                let w: Vec<f64> = self.generators.iter().map(|_| Exp1.sample(rng)).collect();
                let total: f64 = w.iter().sum();
                let mut p = vec![0.0; self.rank];
                for (g, wi) in self.generators_f64.iter().zip(&w) {
                    for (pi, gi) in p.iter_mut().zip(g) {
                        *pi += wi / total * gi;
                    }
                }
                p
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        let g: Vec<String> = self.generators.iter().map(|v| format_rat_vec(v)).collect();
        format!("cone<{}>", g.join(","))
    }
}

/// `dual_cone`.
pub fn dual_cone(c: &PolyhedralCone) -> PolyhedralCone {
    c.dual()
}

/// Unit-exponential weight rounded to a positive dyadic rational.
fn exp_weight<R: Rng>(rng: &mut R) -> Rat {
    let e: f64 = Exp1.sample(rng);
    let scaled = ((e * 65536.0).round() as i64).max(1);
    Rat::new(scaled.into(), 65536.into())
}

fn check_lengths(rank: usize, vs: &[Vec<Rat>], what: &str) -> Result<()> {
    if vs.is_empty() {
        return Err(Error::Cone(format!("no {what}s given")));
    }
    for (k, v) in vs.iter().enumerate() {
        if v.len() != rank {
            return Err(Error::Cone(format!(
                "{what} #{k} has length {} but the ambient rank is {rank}",
                v.len()
            )));
        }
    }
    Ok(())
}

fn normalize_set(vs: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut out: Vec<Vec<Rat>> = vs
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .map(|v| primitive(v))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn rank_of(vs: &[Vec<Rat>]) -> usize {
    rank(vs)
}

/// Keeps the members of `vs` that are extreme with respect to `dual_desc`:
/// `v` is extreme iff the dual vectors vanishing on it have rank `rank - 1`.
fn prune(rank: usize, vs: &[Vec<Rat>], dual_desc: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    vs.iter()
        .filter(|v| {
            let tight: Vec<Vec<Rat>> = dual_desc
                .iter()
                .filter(|d| dot(d, v).is_zero())
                .cloned()
                .collect();
            rank_of(&tight) == rank - 1
        })
        .cloned()
        .collect()
}

/// Extreme rays of `{y : <a, y> >= 0 for all rows a}`; rows must have full rank.
fn extreme_rays(rank: usize, rows: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    // greedy choice of `rank` independent rows for the initial simplicial cone
    let mut basis: Vec<usize> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut trial: Vec<Vec<Rat>> = basis.iter().map(|&b| rows[b].clone()).collect();
        trial.push(r.clone());
        if rank_of(&trial) == trial.len() {
            basis.push(i);
            if basis.len() == rank {
                break;
            }
        }
    }
    if basis.len() < rank {
        return None;
    }
    let a_b: Vec<Vec<Rat>> = basis.iter().map(|&b| rows[b].clone()).collect();
    let inv = crate::algebra::linalg::inverse(&a_b)?;
    // columns of the inverse are the initial rays
    let mut rays: Vec<Vec<Rat>> = (0..rank)
        .map(|j| primitive(&inv.iter().map(|row| row[j].clone()).collect::<Vec<_>>()))
        .collect();
    let mut processed: Vec<usize> = basis.clone();

    for (i, a) in rows.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| dot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            processed.push(i);
            continue;
        }
        let zero_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| {
                processed
                    .iter()
                    .copied()
                    .filter(|&p| dot(&rows[p], r).is_zero())
                    .collect()
            })
            .collect();
        let mut next: Vec<Vec<Rat>> = (0..rays.len())
            .filter(|&k| !vals[k].is_negative())
            .map(|k| rays[k].clone())
            .collect();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = zero_sets[p]
                    .iter()
                    .copied()
                    .filter(|z| zero_sets[n].contains(z))
                    .collect();
                if common.len() + 2 < rank {
                    continue;
                }
                let sub: Vec<Vec<Rat>> = common.iter().map(|&c| rows[c].clone()).collect();
                if rank_of(&sub) != rank - 2 {
                    continue;
                }
                let combo: Vec<Rat> = rays[n]
                    .iter()
                    .zip(&rays[p])
                    .map(|(rn, rp)| &vals[p] * rn - &vals[n] * rp)
                    .collect();
                next.push(primitive(&combo));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(i);
    }
    Some(rays)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_vec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cone(gens: &[&[i64]]) -> PolyhedralCone {
        let g: Vec<Vec<Rat>> = gens.iter().map(|v| rat_vec(v)).collect();
        PolyhedralCone::from_generators(g[0].len(), &g).unwrap()
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = cone(&[&[1, 0], &[0, 1]]);
        assert!(c.dual().same_set(&c));
        assert_eq!(c, PolyhedralCone::orthant(2));
    }

    #[test]
    fn first_hirzebruch_nef_dual_is_mori_cone() {
        // divisor basis (H, E); curve coordinates are pairings with (H, E)
        // H . E = 0, E . E = -1 so the E-curve is (0, -1); (H - E) . (H, E) = (1, 1)
        let nef = cone(&[&[1, 0], &[1, -1]]);
        let mori = dual_cone(&nef);
        assert_eq!(mori.generators(), &[rat_vec(&[0, -1]), rat_vec(&[1, 1])]);
        assert!(dual_cone(&mori).same_set(&nef));
    }

    #[test]
    fn rank_one_duality() {
        let c = cone(&[&[3]]);
        assert_eq!(c.generators(), &[rat_vec(&[1])]);
        assert_eq!(c.dual().generators(), &[rat_vec(&[1])]);
    }

    #[test]
    fn membership_and_interiority() {
        let mori = cone(&[&[0, -1], &[1, 1]]);
        let e = rat_vec(&[0, -1]);
        assert!(mori.contains(&e));
        assert!(!mori.is_interior(&e));
        // E + (H - E) curve = (1, 0)
        let h = rat_vec(&[1, 0]);
        assert!(mori.is_interior(&h));
        let zero = rat_vec(&[0, 0]);
        assert!(mori.contains(&zero));
        assert!(!mori.is_interior(&zero));
        assert!(!mori.is_interior_f64(&[0.0, 0.0], 1e-12));
        assert!(mori.contains_f64(&[0.0, -1.0], 0.0));
    }

    #[test]
    fn rejects_non_pointed_and_flat_input() {
        let line = vec![rat_vec(&[1, 0]), rat_vec(&[-1, 0]), rat_vec(&[0, 1])];
        let err = PolyhedralCone::from_generators(2, &line).unwrap_err();
        assert!(err.to_string().contains("not pointed"), "{err}");
        let flat = vec![rat_vec(&[1, 0]), rat_vec(&[2, 0])];
        let err = PolyhedralCone::from_generators(2, &flat).unwrap_err();
        assert!(err.to_string().contains("empty interior"), "{err}");
    }

    #[test]
    fn redundant_generators_are_pruned() {
        let c = cone(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[1, 1, 1], &[2, 0, 0]]);
        assert_eq!(c.generators().len(), 3);
        assert_eq!(c.facets().len(), 3);
    }

    #[test]
    fn square_pyramid_needs_combinations() {
        // 4 generators in rank 3: non-simplicial cone with 4 facets
        let c = cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(c.facets().len(), 4);
        assert!(dual_cone(&dual_cone(&c)).same_set(&c));
        for g in c.generators() {
            assert_eq!(c.tight_facets(g).len(), 2);
        }
    }

    #[test]
    fn from_inequalities_matches_generators() {
        let ineq = vec![rat_vec(&[1, 0]), rat_vec(&[1, 1]), rat_vec(&[2, 1])];
        let c = PolyhedralCone::from_inequalities(2, &ineq).unwrap();
        assert_eq!(c.facets(), &[rat_vec(&[1, 0]), rat_vec(&[1, 1])]);
        assert_eq!(c.generators(), &[rat_vec(&[0, 1]), rat_vec(&[1, -1])]);
    }

    #[test]
    fn sampling() {
        let c = PolyhedralCone::orthant(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = c.sample(3, &mut rng, SampleMode::Interior);
        assert_eq!(s.points.len(), 3);
        assert!(s.points.iter().all(|p| p.iter().all(|x| x > &rat(0))));
        assert!(c.sample(0, &mut rng, SampleMode::Interior).points.is_empty());

        let mori = cone(&[&[0, -1], &[1, 1]]);
        let nef = mori.dual();
        let b = mori.sample(20, &mut rng, SampleMode::Boundary);
        for p in &b.points {
            assert!(mori.contains(p));
            assert!(nef.generators().iter().any(|g| dot(g, p).is_zero()));
        }

        let r1 = cone(&[&[1]]);
        let s = r1.sample(2, &mut rng, SampleMode::Boundary);
        assert!(s.rays_only);
        assert_eq!(s.points, vec![rat_vec(&[1]), rat_vec(&[1])]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = cone(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let a = c.sample(5, &mut ChaCha8Rng::seed_from_u64(11), SampleMode::Interior);
        let b = c.sample(5, &mut ChaCha8Rng::seed_from_u64(11), SampleMode::Interior);
        assert_eq!(a, b);
    }
}
