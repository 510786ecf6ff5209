use num_traits::{Signed, Zero};
use numvol::algebra::{dot, eval_form, power_contract, rat, rat_to_f64, ratio, Rat, SymmetricForm};
use numvol::cones::SampleMode;
use numvol::cycle_volume::{geometric_norm, vol_hat};
use numvol::divisor_volume::{m_invariant, vol};
use numvol::optimize::{OptConfig, PairingRatio, RatioObjective, TensorVolume};
use numvol::varieties::{CatalogEntry, ClassVector, NumericalVariety};
use numvol::zariski_surface::zariski_decompose;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn entries() -> Vec<CatalogEntry> {
    CatalogEntry::standard()
}

fn surfaces_with_curves() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry::Hirzebruch(1),
        CatalogEntry::Hirzebruch(2),
        CatalogEntry::Hirzebruch(3),
        CatalogEntry::BlowupP2(1),
        CatalogEntry::BlowupP2(2),
        CatalogEntry::BlowupP2(3),
    ]
}

/// Every standard entry carries a big-volume oracle.
fn with_oracle() -> Vec<CatalogEntry> {
    entries()
}

fn build(e: CatalogEntry) -> NumericalVariety {
    e.build().unwrap()
}

fn one(cone: &numvol::cones::PolyhedralCone, rng: &mut ChaCha8Rng) -> Vec<Rat> {
    loop {
        let p = cone.sample(1, rng, SampleMode::Interior).points.remove(0);
        if cone.is_interior(&p) {
            return p;
        }
    }
}

fn cfg() -> OptConfig {
    OptConfig::default().with_starts(6)
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
}

fn form_and_args() -> impl Strategy<Value = (SymmetricForm<Rat>, Vec<Vec<Rat>>)> {
    let keys = SymmetricForm::<Rat>::sorted_indices(3, 3);
    (prop::collection::vec(-5i64..=5, keys.len()), prop::collection::vec(prop::collection::vec(small_rat(), 3), 3))
        .prop_map(move |(coeffs, args)| {
            let mut f = SymmetricForm::new(3, 3);
            for (k, c) in keys.iter().zip(coeffs) {
                f.set(k, rat(c)).unwrap();
            }
            (f, args)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_form_is_symmetric((f, args) in form_and_args(), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        let a: Vec<&[Rat]> = args.iter().map(|v| v.as_slice()).collect();
        let p: Vec<&[Rat]> = perm.iter().map(|&i| args[i].as_slice()).collect();
        prop_assert_eq!(eval_form(&f, &a).unwrap(), eval_form(&f, &p).unwrap());
    }

    #[test]
    fn contraction_matches_evaluation((f, args) in form_and_args()) {
        let b = &args[0];
        let c = power_contract(&f, b, 2).unwrap();
        let lin = eval_form(&c, &[b.as_slice()]).unwrap();
        prop_assert_eq!(lin, f.eval_power(b).unwrap());
    }

    #[test]
    fn cutkosky_volume_polynomial(d in 1i64..6, a in small_rat(), b in small_rat()) {
        let v = build(CatalogEntry::Cutkosky(d));
        let alpha = vec![&a + &b, b.clone()];
        let dd = rat(d);
        let expected = &b * &b * &b * ((&dd - rat(1)) * (&dd - rat(1)) + &dd)
            + rat(3) * &b * &b * (&a + &b) * (&dd - rat(1))
            + rat(3) * (&a + &b) * (&a + &b) * &b;
        prop_assert_eq!(v.top_power(&alpha).unwrap(), expected);
    }

    #[test]
    fn dual_cones_pair_nonnegatively(i in 0usize..14, seed in any::<u64>()) {
        let v = build(entries()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (c, d) in [(v.nef(), v.mori()), (v.psef(), v.movable_curves())] {
            let xs = c.sample(20, &mut rng, SampleMode::Interior).points;
            let ys = d.sample(20, &mut rng, SampleMode::Boundary).points;
            for x in &xs {
                prop_assert!(c.is_interior(x) || c.rank() == 0);
                for y in &ys {
                    prop_assert!(!dot(x, y).is_negative());
                }
            }
        }
    }

    #[test]
    fn zariski_idempotent_and_order_free(i in 0usize..6, seed in any::<u64>()) {
        let v = build(surfaces_with_curves()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = v.to_data();
        data.negative_curves.shuffle(&mut rng);
        let shuffled = NumericalVariety::new(data).unwrap();
        let g = v.psef().sample(1, &mut rng, SampleMode::Interior).points.remove(0);
        let z = zariski_decompose(&v, &ClassVector::divisor(g.clone())).unwrap();
        prop_assert!(zariski_decompose(&v, &z.positive).unwrap().negative.is_empty());
        let s = zariski_decompose(&shuffled, &ClassVector::divisor(g.clone())).unwrap();
        prop_assert_eq!(&s.positive, &z.positive);
        prop_assert_eq!(s.negative_map(), z.negative_map());
        // gamma = P + sum nu C and P is orthogonal to its support
        let mut back = z.positive.coords.clone();
        for (label, nu) in &z.negative {
            let c = v.negative_curves().iter().find(|c| &c.label == label).unwrap();
            prop_assert!(!nu.is_negative());
            prop_assert!(v.surface_product(&z.positive.coords, &c.class).unwrap().is_zero());
            for (b, x) in back.iter_mut().zip(&c.class) {
                *b += nu * x;
            }
        }
        prop_assert_eq!(back, g);
    }

    #[test]
    fn negative_parts_are_subadditive(i in 0usize..6, seed in any::<u64>()) {
        let v = build(surfaces_with_curves()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = v.psef().sample(2, &mut rng, SampleMode::Interior).points;
        let sum: Vec<Rat> = pts[0].iter().zip(&pts[1]).map(|(a, b)| a + b).collect();
        let n = |g: &[Rat]| zariski_decompose(&v, &ClassVector::divisor(g.to_vec())).unwrap().negative_map();
        let (n0, n1, ns) = (n(&pts[0]), n(&pts[1]), n(&sum));
        for (label, c) in &ns {
            let bound = n0.get(label).cloned().unwrap_or_default() + n1.get(label).cloned().unwrap_or_default();
            prop_assert!(c <= &bound, "{} {} > {}", label, c, bound);
        }
    }

    #[test]
    fn big_volume_monotone_and_homogeneous(i in 0usize..14, seed in any::<u64>(), l in 1i64..5) {
        let e = with_oracle()[i];
        let v = build(e);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = v.psef().sample(1, &mut rng, SampleMode::Interior).points.remove(0);
        let h = v.nef().sample(1, &mut rng, SampleMode::Interior).points.remove(0);
        let vol_of = |x: &[Rat]| vol(&v, &ClassVector::divisor(x.to_vec())).unwrap().value;
        let sum: Vec<Rat> = a.iter().zip(&h).map(|(x, y)| x + y).collect();
        prop_assert!(vol_of(&sum) >= vol_of(&a));
        let scaled: Vec<Rat> = a.iter().map(|x| x * rat(l)).collect();
        let mut factor = rat(1);
        for _ in 0..v.dim() {
            factor *= rat(l);
        }
        prop_assert_eq!(vol_of(&scaled), vol_of(&a) * factor);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ratio_is_scale_invariant(i in 0usize..14, seed in any::<u64>(), lambda in 0.01f64..100.0) {
        let v = build(entries()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = numvol::algebra::to_f64_vec(&one(v.mori(), &mut rng));
        let b = numvol::algebra::to_f64_vec(&one(v.nef(), &mut rng));
        let vol = TensorVolume::new(v.intersection());
        let r = PairingRatio { gamma: g, volume: &vol, exponent: v.dim(), fd_step: 1e-5 };
        let scaled: Vec<f64> = b.iter().map(|x| x * lambda).collect();
        let (x, y) = (r.log_ratio(&b).unwrap().exp(), r.log_ratio(&scaled).unwrap().exp());
        prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn optimizer_beats_its_samples(i in 0usize..14, seed in any::<u64>()) {
        let v = build(entries()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = one(v.mori(), &mut rng);
        let n = v.dim() as f64;
        let r = vol_hat(&v, &ClassVector::curve(g.clone()), &cfg()).unwrap();
        let best = r.opt.value;
        for b in v.nef().sample(200, &mut rng, SampleMode::Interior).points {
            let p = rat_to_f64(&dot(&b, &g));
            let vb = rat_to_f64(&v.top_power(&b).unwrap());
            prop_assert!(p / vb.powf(1.0 / n) >= best - 1e-9 * best.max(1.0));
        }
        prop_assert!(r.opt.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn vol_hat_homogeneous(i in 0usize..14, seed in any::<u64>(), l in 2i64..6) {
        let v = build(entries()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = one(v.mori(), &mut rng);
        let n = v.dim() as f64;
        let a = vol_hat(&v, &ClassVector::curve(g.clone()), &cfg()).unwrap().value;
        let scaled: Vec<Rat> = g.iter().map(|x| x * rat(l)).collect();
        let b = vol_hat(&v, &ClassVector::curve(scaled), &cfg()).unwrap().value;
        let expected = a * (l as f64).powf(n / (n - 1.0));
        prop_assert!((b - expected).abs() <= 1e-6 * expected, "{} vs {}", b, expected);
    }

    #[test]
    fn norms_bound_vol_hat(i in 0usize..14, seed in any::<u64>()) {
        let v = build(entries()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = one(v.mori(), &mut rng);
        let n = v.dim() as f64;
        let basis: Vec<ClassVector> = loop {
            let b: Vec<Vec<Rat>> = (0..v.rank()).map(|_| one(v.nef(), &mut rng)).collect();
            if numvol::algebra::linalg::rank(&b) == v.rank() {
                break b.into_iter().map(ClassVector::divisor).collect();
            }
        };
        let total: Vec<Rat> = (0..v.rank()).map(|j| basis.iter().fold(Rat::zero(), |s, b| s + &b.coords[j])).collect();
        let norm = rat_to_f64(&geometric_norm(&v, &basis, &ClassVector::curve(g.clone())).unwrap());
        let scale = rat_to_f64(&v.top_power(&total).unwrap()).powf(1.0 / n);
        let vh = vol_hat(&v, &ClassVector::curve(g), &cfg()).unwrap().value;
        prop_assert!(vh.powf((n - 1.0) / n) <= norm / scale + 1e-9);
    }

    #[test]
    fn khovanskii_teissier(i in 0usize..14, seed in any::<u64>()) {
        let v = build(with_oracle()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = v.dim() as f64;
        let beta = v.psef().sample(1, &mut rng, SampleMode::Interior).points.remove(0);
        let omega = one(v.nef(), &mut rng);
        let lhs = rat_to_f64(&dot(&beta, &v.curve_power(&omega).unwrap()));
        let vb = rat_to_f64(&vol(&v, &ClassVector::divisor(beta)).unwrap().value);
        let vo = rat_to_f64(&v.top_power(&omega).unwrap());
        prop_assert!(lhs >= vb.powf(1.0 / n) * vo.powf((n - 1.0) / n) - 1e-9);
    }

    #[test]
    fn m_invariant_properties(i in 0usize..14, seed in any::<u64>()) {
        let v = build(with_oracle()[i]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = v.dim() as f64;
        let e = (n - 1.0) / n;
        let m = |g: &[Rat]| m_invariant(&v, &ClassVector::curve(g.to_vec()), &cfg()).unwrap().value;
        let g1 = one(v.movable_curves(), &mut rng);
        let g2 = one(v.movable_curves(), &mut rng);
        let sum: Vec<Rat> = g1.iter().zip(&g2).map(|(a, b)| a + b).collect();
        let (m1, m2, ms) = (m(&g1), m(&g2), m(&sum));
        prop_assert!(m1 > 0.0 && m2 > 0.0);
        prop_assert!(ms.powf(e) >= m1.powf(e) + m2.powf(e) - 1e-7);
        let vh = vol_hat(&v, &ClassVector::curve(g1.clone()), &cfg()).unwrap().value;
        prop_assert!(m1 <= vh + 1e-7 * vh.max(1.0), "M {} > vol_hat {}", m1, vh);
        let omega = one(v.nef(), &mut rng);
        let vo = rat_to_f64(&v.top_power(&omega).unwrap());
        let mo = m(&v.curve_power(&omega).unwrap());
        prop_assert!((mo - vo).abs() <= 1e-4 * vo, "M(w^(n-1)) {} vs vol {}", mo, vo);
    }
}

#[test]
fn kleiman_and_double_duality() {
    for e in entries() {
        let v = build(e);
        assert!(v.mori().dual().same_set(v.nef()), "{e}");
        for a in v.nef().generators() {
            for c in v.mori().generators() {
                assert!(!dot(a, c).is_negative(), "{e}");
            }
        }
        // every dual generator is tight on rank-1 independent generators
        for y in v.mori().generators() {
            let tight: Vec<Vec<Rat>> = v.nef().generators().iter().filter(|x| dot(*x, y).is_zero()).cloned().collect();
            assert!(numvol::algebra::linalg::rank(&tight) + 1 >= v.rank(), "{e}");
        }
    }
}
