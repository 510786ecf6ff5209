//! Symmetric multilinear forms stored by sorted multi-index.

use std::collections::BTreeMap;

use super::scalar::{Field, Rat};
use crate::error::{Error, Result};

/// Totally symmetric degree-`degree` form on a rank-`rank` space.
///
/// Only sorted multi-indices are stored, so symmetry holds by construction.
/// Missing entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricForm<T> {
    degree: usize,
    rank: usize,
    entries: BTreeMap<Vec<usize>, T>,
}

impl<T: Field> SymmetricForm<T> {
    pub fn new(degree: usize, rank: usize) -> Self {
        Self { degree, rank, entries: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Sets the entry at `indices` (any order). Zero values are dropped.
    pub fn set(&mut self, indices: &[usize], value: T) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::Argument(format!(
                "form of degree {} given {} indices",
                self.degree,
                indices.len()
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.rank) {
            return Err(Error::Argument(format!(
                "index {bad} out of range for rank {}",
                self.rank
            )));
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    pub fn get(&self, indices: &[usize]) -> T {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(T::zero)
    }

    /// Nonzero entries keyed by sorted multi-index.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &T)> {
        self.entries.iter()
    }

    /// All sorted multi-indices of length `degree` over `0..rank`.
    pub fn sorted_indices(degree: usize, rank: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, left: usize, rank: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..rank {
                cur.push(i);
                rec(i, left - 1, rank, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, degree, rank, &mut Vec::new(), &mut out);
        out
    }

    fn check_arg(&self, v: &[T]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::Argument(format!(
                "vector of length {} for a form of rank {}",
                v.len(),
                self.rank
            )));
        }
        Ok(())
    }

    /// Multilinear evaluation `F(args[0], ..., args[n-1])`.
    pub fn eval(&self, args: &[&[T]]) -> Result<T> {
        if args.len() != self.degree {
            return Err(Error::Argument(format!(
                "form of degree {} evaluated on {} arguments",
                self.degree,
                args.len()
            )));
        }
        for a in args {
            self.check_arg(a)?;
        }
        let mut total = T::zero();
        for (key, coeff) in &self.entries {
            let mut perm_sum = T::zero();
            for_each_distinct_permutation(key, |perm| {
                let mut prod = T::one();
                for (slot, &idx) in perm.iter().enumerate() {
                    prod = prod * args[slot][idx].clone();
                }
                perm_sum = perm_sum.clone() + prod;
            });
            total = total + coeff.clone() * perm_sum;
        }
        Ok(total)
    }

    /// `F(beta, ..., beta)`.
    pub fn eval_power(&self, beta: &[T]) -> Result<T> {
        self.check_arg(beta)?;
        let mut total = T::zero();
        for (key, coeff) in &self.entries {
            let mut term = coeff.clone() * T::from_i64(multinomial(key) as i64);
            for &i in key {
                term = term * beta[i].clone();
            }
            total = total + term;
        }
        Ok(total)
    }

    /// Partial evaluation at `k` copies of `beta`, giving a form of degree `degree - k`.
    pub fn power_contract(&self, beta: &[T], k: usize) -> Result<SymmetricForm<T>> {
        if k > self.degree {
            return Err(Error::Argument(format!(
                "cannot contract {k} times a form of degree {}",
                self.degree
            )));
        }
        self.check_arg(beta)?;
        if k == 0 {
            return Ok(self.clone());
        }
        let m = self.degree - k;
        let mut out = SymmetricForm::new(m, self.rank);
        let mut tuple = vec![0usize; k];
        for j in Self::sorted_indices(m, self.rank) {
            let mut acc = T::zero();
            // sum over all ordered k-tuples u of F_{sort(u ∪ j)} * prod beta[u]
            tuple.iter_mut().for_each(|t| *t = 0);
            loop {
                let mut weight = T::one();
                for &u in &tuple {
                    weight = weight * beta[u].clone();
                }
                if !weight.is_zero() {
                    let mut key: Vec<usize> = j.iter().chain(tuple.iter()).copied().collect();
                    key.sort_unstable();
                    if let Some(c) = self.entries.get(&key) {
                        acc = acc + c.clone() * weight;
                    }
                }
                if !advance(&mut tuple, self.rank) {
                    break;
                }
            }
            out.set(&j, acc)?;
        }
        Ok(out)
    }

    /// Coefficients of a degree-1 form.
    pub fn linear_coefficients(&self) -> Result<Vec<T>> {
        if self.degree != 1 {
            return Err(Error::Argument(format!(
                "form of degree {} is not linear",
                self.degree
            )));
        }
        Ok((0..self.rank).map(|i| self.get(&[i])).collect())
    }

    /// The curve class `beta^{n-1}` as a linear functional on divisors.
    pub fn curve_power(&self, beta: &[T]) -> Result<Vec<T>> {
        if self.degree == 0 {
            return Err(Error::Argument("form of degree 0 has no curve power".into()));
        }
        self.power_contract(beta, self.degree - 1)?.linear_coefficients()
    }

    /// Rewrites the form in a new basis whose `j`-th vector has old coordinates `columns[j]`.
    pub fn change_basis(&self, columns: &[Vec<T>]) -> Result<SymmetricForm<T>> {
        let rank = columns.len();
        let mut out = SymmetricForm::new(self.degree, rank);
        for j in Self::sorted_indices(self.degree, rank) {
            let args: Vec<&[T]> = j.iter().map(|&c| columns[c].as_slice()).collect();
            out.set(&j, self.eval(&args)?)?;
        }
        Ok(out)
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> SymmetricForm<U> {
        SymmetricForm {
            degree: self.degree,
            rank: self.rank,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), f(v)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }
}

impl SymmetricForm<Rat> {
    pub fn to_f64(&self) -> SymmetricForm<f64> {
        self.map(|r| r.to_f64())
    }
}

/// Number of distinct orderings of a sorted multi-index.
pub fn multinomial(key: &[usize]) -> u64 {
    let mut total = factorial(key.len());
    let mut i = 0;
    while i < key.len() {
        let j = key[i..].iter().take_while(|&&x| x == key[i]).count();
        total /= factorial(j);
        i += j;
    }
    total
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn advance(tuple: &mut [usize], rank: usize) -> bool {
    for t in tuple.iter_mut().rev() {
        *t += 1;
        if *t < rank {
            return true;
        }
        *t = 0;
    }
    false
}

/// Calls `f` once per distinct permutation of the sorted slice `key`.
fn for_each_distinct_permutation(key: &[usize], mut f: impl FnMut(&[usize])) {
    let mut p = key.to_vec();
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (0..p.len().saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return;
        };
        let j = (i + 1..p.len()).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

/// Full dense copy of a form for fast repeated float evaluation.
#[derive(Clone, Debug)]
pub struct DenseForm {
    degree: usize,
    rank: usize,
    /// Sorted index tuples with coefficients pre-multiplied by their multinomial weight.
    terms: Vec<(Vec<usize>, f64)>,
    /// Gradient terms: `(i, sorted tail of degree n-1, weight)` such that
    /// `d/d beta_i F(beta^n) = sum weight * prod beta[tail]`.
    grad_terms: Vec<(usize, Vec<usize>, f64)>,
}

impl DenseForm {
    pub fn new(form: &SymmetricForm<Rat>) -> Self {
        let mut terms = Vec::new();
        let mut grad_terms = Vec::new();
        for (key, c) in form.entries() {
            let c = c.to_f64();
            let w = c * multinomial(key) as f64;
            terms.push((key.clone(), w));
            // derivative of prod beta[key] wrt beta_i = (mult of i) * prod beta[key minus one i]
            let mut seen = Vec::new();
            for (pos, &i) in key.iter().enumerate() {
                if seen.contains(&i) {
                    continue;
                }
                seen.push(i);
                let mult = key.iter().filter(|&&x| x == i).count() as f64;
                let mut tail = key.clone();
                tail.remove(pos);
                grad_terms.push((i, tail, w * mult));
            }
        }
        Self { degree: form.degree(), rank: form.rank(), terms, grad_terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn power(&self, beta: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, w)| w * k.iter().map(|&i| beta[i]).product::<f64>())
            .sum()
    }

    /// Gradient of `beta -> F(beta^n)`, which is `n * beta^{n-1}`.
    pub fn power_gradient(&self, beta: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.rank];
        for (i, tail, w) in &self.grad_terms {
            g[*i] += w * tail.iter().map(|&j| beta[j]).product::<f64>();
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, rat_vec};

    fn p1xp1() -> SymmetricForm<Rat> {
        let mut f = SymmetricForm::new(2, 2);
        f.set(&[0, 1], rat(1)).unwrap();
        f
    }

    #[test]
    fn eval_on_quadric() {
        let f = p1xp1();
        let a = rat_vec(&[2, 3]);
        let b = rat_vec(&[5, 7]);
        // (2 f1 + 3 f2)(5 f1 + 7 f2) = 14 + 15
        assert_eq!(f.eval(&[&a, &b]).unwrap(), rat(29));
        assert_eq!(f.eval_power(&a).unwrap(), rat(12));
        assert_eq!(f.eval(&[&a, &rat_vec(&[0, 0])]).unwrap(), rat(0));
    }

    #[test]
    fn contraction_examples() {
        let f = p1xp1();
        let c = f.power_contract(&rat_vec(&[1, 1]), 1).unwrap();
        assert_eq!(c.linear_coefficients().unwrap(), rat_vec(&[1, 1]));
        assert_eq!(f.power_contract(&rat_vec(&[1, 1]), 0).unwrap(), f);

        let mut p3 = SymmetricForm::new(3, 1);
        p3.set(&[0, 0, 0], rat(1)).unwrap();
        assert_eq!(p3.curve_power(&rat_vec(&[2])).unwrap(), rat_vec(&[4]));
        assert!(p3.power_contract(&rat_vec(&[1]), 4).is_err());
    }

    #[test]
    fn argument_checks() {
        let f = p1xp1();
        assert!(f.eval(&[&rat_vec(&[1, 2])]).is_err());
        assert!(f.eval(&[&rat_vec(&[1]), &rat_vec(&[1, 2])]).is_err());
        let mut g = SymmetricForm::<Rat>::new(2, 2);
        assert!(g.set(&[0, 2], rat(1)).is_err());
        assert!(g.set(&[0], rat(1)).is_err());
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[0, 0, 1]), 3);
        assert_eq!(multinomial(&[0, 1, 2]), 6);
        assert_eq!(multinomial(&[1, 1, 1]), 1);
        assert_eq!(multinomial(&[]), 1);
    }

    #[test]
    fn dense_form_matches_exact() {
        let mut f = SymmetricForm::new(3, 2);
        f.set(&[0, 0, 1], rat(1)).unwrap();
        f.set(&[0, 1, 1], rat(1)).unwrap();
        f.set(&[1, 1, 1], rat(3)).unwrap();
        let d = DenseForm::new(&f);
        let beta = [0.7, 1.3];
        let exact = f.to_f64().eval_power(&beta).unwrap();
        assert!((d.power(&beta) - exact).abs() < 1e-12);
        let curve = f.to_f64().curve_power(&beta).unwrap();
        let g = d.power_gradient(&beta);
        for i in 0..2 {
            assert!((g[i] - 3.0 * curve[i]).abs() < 1e-12);
        }
    }
}
