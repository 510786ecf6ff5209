//! Numerical profiles of varieties: intersection form, positivity cones and
//! the optional big-volume oracle.
//!
//! Curve classes are written in the basis dual to the divisor basis, so the
//! pairing of a divisor and a curve is the coordinate dot product.

mod catalog;
mod format;

pub use catalog::{catalog, CatalogEntry};
pub use format::{load_fan, load_variety, parse_fan, parse_variety, write_variety};

use num_traits::Signed;
use serde::Serialize;

use crate::algebra::{dot, format_rat_vec, parse_rat, Rat, SymmetricForm};
use crate::cones::PolyhedralCone;
use crate::error::{Error, Result};
use crate::toric::ToricModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Divisor,
    Curve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassVector {
    pub space: Space,
    pub coords: Vec<Rat>,
}

impl ClassVector {
    pub fn divisor(coords: Vec<Rat>) -> Self {
        Self { space: Space::Divisor, coords }
    }

    pub fn curve(coords: Vec<Rat>) -> Self {
        Self { space: Space::Curve, coords }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        crate::algebra::to_f64_vec(&self.coords)
    }

    /// Parses `"c1,...,c_rho"`; errors name the 1-based column of the bad entry.
    pub fn parse(space: Space, s: &str, rank: usize) -> Result<Self> {
        let mut coords = Vec::new();
        let mut column = 1;
        for part in s.split(',') {
            let lead = part.len() - part.trim_start().len();
            let value = parse_rat(part).map_err(|_| {
                Error::Parse(format!(
                    "malformed coordinate {:?} at column {}",
                    part.trim(),
                    column + lead
                ))
            })?;
            coords.push(value);
            column += part.len() + 1;
        }
        if coords.len() != rank {
            return Err(Error::Parse(format!(
                "expected {rank} coordinates, found {}",
                coords.len()
            )));
        }
        Ok(Self { space, coords })
    }
}

/// Named curve of negative self-intersection on a surface (divisor coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct NegativeCurve {
    pub label: String,
    pub class: Vec<Rat>,
}

/// How volumes of big classes outside the nef cone are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum BigVolumeOracle {
    NefOnly,
    SurfaceZariski,
    ToricPolytope(Box<ToricModel>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleTag {
    NefOnly,
    SurfaceZariski,
    ToricPolytope,
}

impl BigVolumeOracle {
    pub fn tag(&self) -> OracleTag {
        match self {
            BigVolumeOracle::NefOnly => OracleTag::NefOnly,
            BigVolumeOracle::SurfaceZariski => OracleTag::SurfaceZariski,
            BigVolumeOracle::ToricPolytope(_) => OracleTag::ToricPolytope,
        }
    }
}

impl OracleTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleTag::NefOnly => "nef-only",
            OracleTag::SurfaceZariski => "surface-zariski",
            OracleTag::ToricPolytope => "toric-polytope",
        }
    }
}

/// Raw data from which a [`NumericalVariety`] is validated.
#[derive(Clone, Debug)]
pub struct VarietyData {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub intersection: SymmetricForm<Rat>,
    pub nef_generators: Vec<Vec<Rat>>,
    pub psef_generators: Vec<Vec<Rat>>,
    pub negative_curves: Vec<NegativeCurve>,
    pub oracle: BigVolumeOracle,
    pub nef_tangent_bundle: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericalVariety {
    name: String,
    dim: usize,
    basis: Vec<String>,
    intersection: SymmetricForm<Rat>,
    nef: PolyhedralCone,
    psef: PolyhedralCone,
    mori: PolyhedralCone,
    movable_curves: PolyhedralCone,
    negative_curves: Vec<NegativeCurve>,
    oracle: BigVolumeOracle,
    nef_tangent_bundle: bool,
}

impl NumericalVariety {
    pub fn new(data: VarietyData) -> Result<Self> {
        let rho = data.basis.len();
        if data.dim == 0 || rho == 0 {
            return Err(Error::Invariant("dimension and rank must be positive".into()));
        }
        if data.intersection.degree() != data.dim || data.intersection.rank() != rho {
            return Err(Error::Invariant(format!(
                "intersection form has degree {} and rank {}, expected {} and {rho}",
                data.intersection.degree(),
                data.intersection.rank(),
                data.dim
            )));
        }
        let nef = PolyhedralCone::from_generators(rho, &data.nef_generators)
            .map_err(|e| Error::Invariant(format!("nef cone: {e}")))?;
        let psef = PolyhedralCone::from_generators(rho, &data.psef_generators)
            .map_err(|e| Error::Invariant(format!("psef cone: {e}")))?;
        for (k, g) in data.nef_generators.iter().enumerate() {
            if let Some(j) = psef.facets().iter().position(|f| dot(f, g).is_negative()) {
                return Err(Error::Invariant(format!(
                    "nef generator #{k} violates psef facet #{j}"
                )));
            }
        }
        let mori = nef.dual();
        let movable_curves = psef.dual();
        if !mori.dual().same_set(&nef) || !movable_curves.dual().same_set(&psef) {
            return Err(Error::Invariant("double duality failed".into()));
        }
        for (k, g) in nef.generators().iter().enumerate() {
            if data.intersection.eval_power(g)?.is_negative() {
                return Err(Error::Invariant(format!(
                    "nef generator {} has negative top self-intersection (#{k})",
                    format_rat_vec(g)
                )));
            }
        }
        if !data.negative_curves.is_empty() && data.dim != 2 {
            return Err(Error::Invariant("negative curves are only supported on surfaces".into()));
        }
        for c in &data.negative_curves {
            if c.class.len() != rho {
                return Err(Error::Invariant(format!(
                    "negative curve {} has {} coordinates, expected {rho}",
                    c.label,
                    c.class.len()
                )));
            }
            let self_int = data.intersection.eval_power(&c.class)?;
            if !self_int.is_negative() {
                return Err(Error::Invariant(format!(
                    "curve {} has self-intersection {self_int}, not negative",
                    c.label
                )));
            }
            if !psef.contains(&c.class) {
                return Err(Error::Invariant(format!(
                    "negative curve {} is not pseudo-effective",
                    c.label
                )));
            }
        }
        match &data.oracle {
            BigVolumeOracle::SurfaceZariski if data.dim != 2 => {
                return Err(Error::Invariant("surface-zariski oracle needs dimension 2".into()));
            }
            BigVolumeOracle::ToricPolytope(m) if m.rank() != rho || m.fan().dim() != data.dim => {
                return Err(Error::Invariant("toric model does not match the variety".into()));
            }
            _ => {}
        }
        Ok(Self {
            name: data.name,
            dim: data.dim,
            basis: data.basis,
            intersection: data.intersection,
            nef,
            psef,
            mori,
            movable_curves,
            negative_curves: data.negative_curves,
            oracle: data.oracle,
            nef_tangent_bundle: data.nef_tangent_bundle,
        })
    }

    /// The raw data this variety was validated from.
    pub fn to_data(&self) -> VarietyData {
        VarietyData {
            name: self.name.clone(),
            dim: self.dim,
            basis: self.basis.clone(),
            intersection: self.intersection.clone(),
            nef_generators: self.nef.generators().to_vec(),
            psef_generators: self.psef.generators().to_vec(),
            negative_curves: self.negative_curves.clone(),
            oracle: self.oracle.clone(),
            nef_tangent_bundle: self.nef_tangent_bundle,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn intersection(&self) -> &SymmetricForm<Rat> {
        &self.intersection
    }

    pub fn nef(&self) -> &PolyhedralCone {
        &self.nef
    }

    pub fn psef(&self) -> &PolyhedralCone {
        &self.psef
    }

    pub fn mori(&self) -> &PolyhedralCone {
        &self.mori
    }

    pub fn movable_curves(&self) -> &PolyhedralCone {
        &self.movable_curves
    }

    pub fn negative_curves(&self) -> &[NegativeCurve] {
        &self.negative_curves
    }

    pub fn oracle(&self) -> &BigVolumeOracle {
        &self.oracle
    }

    pub fn nef_tangent_bundle(&self) -> bool {
        self.nef_tangent_bundle
    }

    pub fn is_surface(&self) -> bool {
        self.dim == 2
    }

    /// Top self-intersection `alpha^n`.
    pub fn top_power(&self, alpha: &[Rat]) -> Result<Rat> {
        self.intersection.eval_power(alpha)
    }

    /// The curve class `beta^{n-1}` in dual-basis coordinates.
    pub fn curve_power(&self, beta: &[Rat]) -> Result<Vec<Rat>> {
        self.intersection.curve_power(beta)
    }

    /// On a surface, the curve class of a divisor under `N^1 = N_1`.
    pub fn divisor_to_curve(&self, alpha: &[Rat]) -> Result<Vec<Rat>> {
        if self.dim != 2 {
            return Err(Error::Argument(format!(
                "{} is not a surface; divisors are not curves",
                self.name
            )));
        }
        self.intersection.curve_power(alpha)
    }

    /// Exact intersection of two divisors on a surface.
    pub fn surface_product(&self, a: &[Rat], b: &[Rat]) -> Result<Rat> {
        if self.dim != 2 {
            return Err(Error::Argument(format!("{} is not a surface", self.name)));
        }
        self.intersection.eval(&[a, b])
    }
}

/// Canonical pairing of a divisor class with a curve class.
pub fn pair(v: &NumericalVariety, alpha: &ClassVector, gamma: &ClassVector) -> Result<Rat> {
    if alpha.space != Space::Divisor || gamma.space != Space::Curve {
        return Err(Error::Argument(format!(
            "pairing expects (divisor, curve), got ({:?}, {:?})",
            alpha.space, gamma.space
        )));
    }
    let rho = v.rank();
    if alpha.coords.len() != rho || gamma.coords.len() != rho {
        return Err(Error::Argument(format!("classes must have {rho} coordinates")));
    }
    Ok(dot(&alpha.coords, &gamma.coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_vec};

    #[test]
    fn pairing_checks_tags() {
        let v = catalog("Hirzebruch", Some(1)).unwrap();
        let h = ClassVector::divisor(rat_vec(&[1, 0]));
        let e_curve = ClassVector::curve(v.divisor_to_curve(&rat_vec(&[0, 1])).unwrap());
        assert_eq!(pair(&v, &h, &e_curve).unwrap(), rat(0));
        assert!(pair(&v, &e_curve, &h).is_err());
        let zero = ClassVector::divisor(rat_vec(&[0, 0]));
        assert_eq!(pair(&v, &zero, &e_curve).unwrap(), rat(0));
    }

    #[test]
    fn coordinate_parsing_reports_columns() {
        let c = ClassVector::parse(Space::Divisor, "1, 1/2,-3", 3).unwrap();
        assert_eq!(c.coords[1], crate::algebra::ratio(1, 2));
        let err = ClassVector::parse(Space::Divisor, "1,x,3", 3).unwrap_err();
        assert!(err.to_string().contains("column 3"), "{err}");
        let err = ClassVector::parse(Space::Divisor, "1,2", 3).unwrap_err();
        assert!(err.to_string().contains("expected 3"), "{err}");
    }

    #[test]
    fn rejects_nef_outside_psef() {
        let mut q = SymmetricForm::new(2, 2);
        q.set(&[0, 1], rat(1)).unwrap();
        let err = NumericalVariety::new(VarietyData {
            name: "bad".into(),
            dim: 2,
            basis: vec!["a".into(), "b".into()],
            intersection: q,
            nef_generators: vec![rat_vec(&[1, 0]), rat_vec(&[1, -1])],
            psef_generators: vec![rat_vec(&[1, 0]), rat_vec(&[0, 1])],
            negative_curves: vec![],
            oracle: BigVolumeOracle::NefOnly,
            nef_tangent_bundle: false,
        })
        .unwrap_err();
        assert_eq!(err.to_string(), "invariant violation: nef generator #1 violates psef facet #0");
    }
}
