//! Curated exact catalog.

use std::fmt;

use crate::algebra::{dot, rat, rat_vec, Rat, SymmetricForm};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::toric::{ToricFan, ToricModel};

use super::{BigVolumeOracle, NegativeCurve, NumericalVariety, VarietyData};

const VALID: &str = "Pn(n=1..4), P1xP1, P1xP1xP1, Hirzebruch(a=1..3), BlkP2(k=1..3), Cutkosky(d>=1)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CatalogEntry {
    Projective(usize),
    P1xP1,
    P1xP1xP1,
    Hirzebruch(i64),
    BlowupP2(usize),
    Cutkosky(i64),
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogEntry::Projective(n) => write!(f, "P{n}"),
            CatalogEntry::P1xP1 => f.write_str("P1xP1"),
            CatalogEntry::P1xP1xP1 => f.write_str("P1xP1xP1"),
            CatalogEntry::Hirzebruch(a) => write!(f, "Hirzebruch({a})"),
            CatalogEntry::BlowupP2(k) => write!(f, "BlkP2({k})"),
            CatalogEntry::Cutkosky(d) => write!(f, "Cutkosky({d})"),
        }
    }
}

impl CatalogEntry {
    /// Resolves a name and optional integer parameter.
    ///
    /// Accepts `Pn` with a parameter, `P2`-style shorthands, `F1`/`Bl2P2`
    /// aliases, and the parameter inline as `Cutkosky(2)`.
    pub fn resolve(name: &str, param: Option<i64>) -> Result<Self> {
        let name = name.trim();
        let (base, inline) = match name.split_once('(') {
            Some((b, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| unknown(name))?;
                let p = inner.trim().trim_start_matches(|c: char| c.is_ascii_alphabetic() || c == '=');
                (b.trim(), Some(p.parse::<i64>().map_err(|_| unknown(name))?))
            }
            None => (name, None),
        };
        if inline.is_some() && param.is_some() && inline != param {
            return Err(Error::Argument(format!("conflicting parameters for {name}")));
        }
        let param = inline.or(param);
        let need = |p: Option<i64>| p.ok_or_else(|| Error::Argument(format!("{base} needs a parameter; valid entries: {VALID}")));
        let lower = base.to_ascii_lowercase();
        let entry = match lower.as_str() {
            "pn" => CatalogEntry::Projective(need(param)?.try_into().map_err(|_| unknown(name))?),
            "p1xp1" => CatalogEntry::P1xP1,
            "p1xp1xp1" => CatalogEntry::P1xP1xP1,
            "hirzebruch" | "fa" => CatalogEntry::Hirzebruch(need(param)?),
            "blkp2" => CatalogEntry::BlowupP2(need(param)?.try_into().map_err(|_| unknown(name))?),
            "cutkosky" => CatalogEntry::Cutkosky(need(param)?),
            s if s.len() > 1 && s.starts_with('p') && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                CatalogEntry::Projective(s[1..].parse().map_err(|_| unknown(name))?)
            }
            s if s.len() > 1 && s.starts_with('f') && s[1..].chars().all(|c| c.is_ascii_digit()) => {
                CatalogEntry::Hirzebruch(s[1..].parse().map_err(|_| unknown(name))?)
            }
            s if s.starts_with("bl") && s.ends_with("p2") && s.len() > 4 => {
                CatalogEntry::BlowupP2(s[2..s.len() - 2].parse().map_err(|_| unknown(name))?)
            }
            _ => return Err(unknown(name)),
        };
        entry.check()?;
        Ok(entry)
    }

    fn check(&self) -> Result<()> {
        let ok = match *self {
            CatalogEntry::Projective(n) => (1..=4).contains(&n),
            CatalogEntry::Hirzebruch(a) => (1..=3).contains(&a),
            CatalogEntry::BlowupP2(k) => (1..=3).contains(&k),
            CatalogEntry::Cutkosky(d) => d >= 1,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(unknown(&self.to_string()))
        }
    }

    /// Every entry with dimension at least two and small parameters.
    pub fn standard() -> Vec<CatalogEntry> {
        vec![
            CatalogEntry::Projective(2),
            CatalogEntry::Projective(3),
            CatalogEntry::Projective(4),
            CatalogEntry::P1xP1,
            CatalogEntry::P1xP1xP1,
            CatalogEntry::Hirzebruch(1),
            CatalogEntry::Hirzebruch(2),
            CatalogEntry::Hirzebruch(3),
            CatalogEntry::BlowupP2(1),
            CatalogEntry::BlowupP2(2),
            CatalogEntry::BlowupP2(3),
            CatalogEntry::Cutkosky(1),
            CatalogEntry::Cutkosky(2),
            CatalogEntry::Cutkosky(3),
        ]
    }

    /// Fan and basis lifts reproducing this entry's basis, for toric entries.
    pub fn toric_model(&self) -> Option<ToricModel> {
        let unit = |len: usize, i: usize| -> Vec<Rat> { (0..len).map(|j| rat((i == j) as i64)).collect() };
        let (fan, lifts) = match *self {
            CatalogEntry::Projective(n) => (ToricFan::projective_space(n), vec![unit(n + 1, n)]),
            CatalogEntry::P1xP1 => (ToricFan::product_of_lines(2), vec![unit(4, 0), unit(4, 2)]),
            CatalogEntry::P1xP1xP1 => (
                ToricFan::product_of_lines(3),
                vec![unit(6, 0), unit(6, 2), unit(6, 4)],
            ),
            // basis (P, S): P the positive section D3, S the negative section D1
            CatalogEntry::Hirzebruch(a) => (ToricFan::hirzebruch(a), vec![unit(4, 3), unit(4, 1)]),
            CatalogEntry::BlowupP2(1) => (ToricFan::hirzebruch(1), vec![unit(4, 3), unit(4, 1)]),
            CatalogEntry::BlowupP2(_) => return None,
            // pi*H = D0 and L = D3 + d D0, where D3 is the negative section
            CatalogEntry::Cutkosky(d) => {
                let mut l = unit(5, 3);
                l[0] = rat(d);
                (ToricFan::plane_bundle(d + 1), vec![unit(5, 0), l])
            }
        };
        Some(ToricModel::new(fan, lifts).expect("catalog toric model"))
    }

    pub fn build(&self) -> Result<NumericalVariety> {
        self.check()?;
        let name = self.to_string();
        let data = match *self {
            CatalogEntry::Projective(n) => {
                let mut f = SymmetricForm::new(n, 1);
                f.set(&vec![0; n], rat(1))?;
                VarietyData {
                    name,
                    dim: n,
                    basis: vec!["H".into()],
                    intersection: f,
                    nef_generators: vec![rat_vec(&[1])],
                    psef_generators: vec![rat_vec(&[1])],
                    negative_curves: vec![],
                    oracle: self.default_oracle(),
                    nef_tangent_bundle: true,
                }
            }
            CatalogEntry::P1xP1 | CatalogEntry::P1xP1xP1 => {
                let n = if *self == CatalogEntry::P1xP1 { 2 } else { 3 };
                let mut f = SymmetricForm::new(n, n);
                f.set(&(0..n).collect::<Vec<_>>(), rat(1))?;
                VarietyData {
                    name,
                    dim: n,
                    basis: (1..=n).map(|i| format!("f{i}")).collect(),
                    intersection: f,
                    nef_generators: PolyhedralCone::orthant(n).generators().to_vec(),
                    psef_generators: PolyhedralCone::orthant(n).generators().to_vec(),
                    negative_curves: vec![],
                    oracle: self.default_oracle(),
                    nef_tangent_bundle: true,
                }
            }
            CatalogEntry::Hirzebruch(a) => {
                let mut f = SymmetricForm::new(2, 2);
                f.set(&[0, 0], rat(a))?;
                f.set(&[1, 1], rat(-a))?;
                let basis = if a == 1 { ["H", "E"] } else { ["P", "S"] };
                VarietyData {
                    name,
                    dim: 2,
                    basis: basis.iter().map(|s| s.to_string()).collect(),
                    intersection: f,
                    // P = S + aF and the fibre F is proportional to P - S
                    nef_generators: vec![rat_vec(&[1, 0]), rat_vec(&[1, -1])],
                    psef_generators: vec![rat_vec(&[0, 1]), rat_vec(&[1, -1])],
                    negative_curves: vec![NegativeCurve {
                        label: basis[1].to_string(),
                        class: rat_vec(&[0, 1]),
                    }],
                    oracle: BigVolumeOracle::SurfaceZariski,
                    nef_tangent_bundle: false,
                }
            }
            CatalogEntry::BlowupP2(k) => blowup_p2(k, name)?,
            CatalogEntry::Cutkosky(d) => {
                let mut f = SymmetricForm::new(3, 2);
                f.set(&[0, 0, 0], rat(0))?;
                f.set(&[0, 0, 1], rat(1))?;
                f.set(&[0, 1, 1], rat(d - 1))?;
                f.set(&[1, 1, 1], rat((d - 1) * (d - 1) + d))?;
                VarietyData {
                    name,
                    dim: 3,
                    basis: vec!["pi*H".into(), "L".into()],
                    intersection: f,
                    nef_generators: vec![rat_vec(&[1, 0]), rat_vec(&[1, 1])],
                    psef_generators: vec![rat_vec(&[1, 0]), rat_vec(&[-d, 1])],
                    negative_curves: vec![],
                    oracle: self.default_oracle(),
                    nef_tangent_bundle: false,
                }
            }
        };
        NumericalVariety::new(data)
    }

    fn default_oracle(&self) -> BigVolumeOracle {
        match *self {
            CatalogEntry::Projective(2) | CatalogEntry::P1xP1 => BigVolumeOracle::SurfaceZariski,
            CatalogEntry::Hirzebruch(_) | CatalogEntry::BlowupP2(_) => BigVolumeOracle::SurfaceZariski,
            _ => match self.toric_model() {
                Some(m) => BigVolumeOracle::ToricPolytope(Box::new(m)),
                None => BigVolumeOracle::NefOnly,
            },
        }
    }
}

fn unknown(name: &str) -> Error {
    Error::Argument(format!("unknown catalog entry {name:?}; valid entries: {VALID}"))
}

/// Blow-up of the plane in `k` general points, basis `(H, E1..Ek)`.
///
/// The negative curves are the exceptional curves and, for `k >= 2`, the strict
/// transforms of lines through two blown-up points; these generate the
/// pseudo-effective cone, and the nef cone is its dual under the form.
fn blowup_p2(k: usize, name: String) -> Result<VarietyData> {
    let rho = k + 1;
    let mut f = SymmetricForm::new(2, rho);
    f.set(&[0, 0], rat(1))?;
    for i in 1..rho {
        f.set(&[i, i], rat(-1))?;
    }
    let unit = |i: usize| -> Vec<Rat> { (0..rho).map(|j| rat((i == j) as i64)).collect() };
    let mut negative_curves: Vec<NegativeCurve> = (1..rho)
        .map(|i| NegativeCurve { label: format!("E{i}"), class: unit(i) })
        .collect();
    for i in 1..rho {
        for j in i + 1..rho {
            let mut c = unit(0);
            c[i] = rat(-1);
            c[j] = rat(-1);
            negative_curves.push(NegativeCurve { label: format!("L{i}{j}"), class: c });
        }
    }
    let mut psef: Vec<Vec<Rat>> = negative_curves.iter().map(|c| c.class.clone()).collect();
    if k == 1 {
        let mut fibre = unit(0);
        fibre[1] = rat(-1);
        psef.push(fibre);
    }
    let functionals: Vec<Vec<Rat>> = psef
        .iter()
        .map(|c| f.curve_power(c))
        .collect::<Result<_>>()?;
    let nef = PolyhedralCone::from_inequalities(rho, &functionals)?;
    debug_assert!(nef
        .generators()
        .iter()
        .all(|g| psef.iter().all(|c| dot(&f.curve_power(g).unwrap(), c) >= rat(0))));
    Ok(VarietyData {
        name,
        dim: 2,
        basis: std::iter::once("H".to_string())
            .chain((1..rho).map(|i| format!("E{i}")))
            .collect(),
        intersection: f,
        nef_generators: nef.generators().to_vec(),
        psef_generators: psef,
        negative_curves,
        oracle: BigVolumeOracle::SurfaceZariski,
        nef_tangent_bundle: false,
    })
}

/// `catalog(name, params)`.
pub fn catalog(name: &str, param: Option<i64>) -> Result<NumericalVariety> {
    CatalogEntry::resolve(name, param)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutkosky_two_numbers() {
        let v = catalog("Cutkosky", Some(2)).unwrap();
        let f = v.intersection();
        assert_eq!(f.get(&[1, 1, 1]), rat(3));
        assert_eq!(f.get(&[0, 1, 1]), rat(1));
        assert_eq!(f.get(&[0, 0, 1]), rat(1));
        assert_eq!(f.get(&[0, 0, 0]), rat(0));
        let l = rat_vec(&[0, 1]);
        assert_eq!(f.eval(&[&l, &l, &l]).unwrap(), rat(3));
    }

    #[test]
    fn quadric_data() {
        let v = catalog("P1xP1", None).unwrap();
        assert_eq!(v.intersection().get(&[0, 0]), rat(0));
        assert_eq!(v.intersection().get(&[1, 1]), rat(0));
        assert_eq!(v.intersection().get(&[0, 1]), rat(1));
        assert!(v.nef().same_set(&PolyhedralCone::orthant(2)));
        assert!(v.psef().same_set(&PolyhedralCone::orthant(2)));
        assert!(v.nef_tangent_bundle());
    }

    #[test]
    fn first_hirzebruch() {
        let v = catalog("Hirzebruch", Some(1)).unwrap();
        assert_eq!(v.basis(), &["H".to_string(), "E".to_string()]);
        let f = v.intersection();
        assert_eq!((f.get(&[0, 0]), f.get(&[1, 1]), f.get(&[0, 1])), (rat(1), rat(-1), rat(0)));
        assert_eq!(v.nef().generators(), &[rat_vec(&[1, -1]), rat_vec(&[1, 0])]);
        assert_eq!(v.psef().generators(), &[rat_vec(&[0, 1]), rat_vec(&[1, -1])]);
        assert_eq!(v.negative_curves().len(), 1);
        assert_eq!(v.negative_curves()[0].class, rat_vec(&[0, 1]));
        assert!(!v.nef_tangent_bundle());
        assert_eq!(catalog("F1", None).unwrap(), v);
        assert_eq!(catalog("Hirzebruch(1)", None).unwrap(), v);
    }

    #[test]
    fn blowups_have_expected_cones() {
        let v = catalog("BlkP2", Some(2)).unwrap();
        assert_eq!(v.negative_curves().len(), 3);
        let mut nef = v.nef().generators().to_vec();
        nef.sort();
        assert_eq!(nef, vec![rat_vec(&[1, -1, 0]), rat_vec(&[1, 0, -1]), rat_vec(&[1, 0, 0])]);
        let v3 = catalog("Bl3P2", None).unwrap();
        assert_eq!(v3.negative_curves().len(), 6);
        assert!(v3.nef().contains(&rat_vec(&[2, -1, -1, -1])));
        // Bl_1 P^2 coincides with F_1 numerically
        let b1 = catalog("BlkP2", Some(1)).unwrap();
        let f1 = catalog("F1", None).unwrap();
        assert!(b1.nef().same_set(f1.nef()) && b1.psef().same_set(f1.psef()));
    }

    #[test]
    fn unknown_entries_list_valid_names() {
        let err = catalog("Grassmannian", None).unwrap_err();
        assert!(err.to_string().contains("valid entries"), "{err}");
        assert!(catalog("Pn", Some(7)).is_err());
        assert!(catalog("Hirzebruch", None).is_err());
        assert!(catalog("Cutkosky", Some(0)).is_err());
    }

    #[test]
    fn tangent_bundle_flags() {
        for e in CatalogEntry::standard() {
            let v = e.build().unwrap();
            let expect = matches!(e, CatalogEntry::Projective(_) | CatalogEntry::P1xP1 | CatalogEntry::P1xP1xP1);
            assert_eq!(v.nef_tangent_bundle(), expect, "{e}");
        }
    }
}
