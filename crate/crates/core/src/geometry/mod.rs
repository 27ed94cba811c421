//! Bounded simulation domains: polygons, Koch snowflake prefractals, planar
//! domains times an interval, and the corridor domain.
//!
//! Points are passed as coordinate slices of length `ambient_dim` (2 or 3).

pub mod corridor;
pub mod koch;
pub mod planar;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
pub use planar::{Capped, PlanarRegion, Point2, Probe};

/// Slack used when deciding closure membership.
pub const CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainKind {
    Polygon,
    Snowflake { level: u32 },
    Product { base: Box<DomainKind>, height: f64 },
    Corridor { generations: u32, width_exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn side(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

/// Nearest-boundary information for an n-dimensional point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainProbe {
    pub dist: f64,
    pub inside: bool,
    pub nearest: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DomainDoc", into = "DomainDoc")]
pub struct DomainSpec {
    ambient_dim: usize,
    kind: DomainKind,
    vertices: Vec<Point2>,
    interval: Option<[f64; 2]>,
    analytic_boundary_dim: Option<f64>,
    bounding_box: BoundingBox,
    region: Arc<PlanarRegion>,
}

/// Serialized form of a domain; geometry is rebuilt from it on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DomainDoc {
    ambient_dim: usize,
    kind: DomainKind,
    vertices: Vec<[f64; 2]>,
    interval: Option<[f64; 2]>,
    analytic_boundary_dim: Option<f64>,
    bounding_box: BoundingBox,
}

impl From<DomainSpec> for DomainDoc {
    fn from(d: DomainSpec) -> Self {
        Self {
            ambient_dim: d.ambient_dim,
            kind: d.kind,
            vertices: d.vertices.iter().map(|p| [p.x, p.y]).collect(),
            interval: d.interval,
            analytic_boundary_dim: d.analytic_boundary_dim,
            bounding_box: d.bounding_box,
        }
    }
}

impl TryFrom<DomainDoc> for DomainSpec {
    type Error = Error;

    fn try_from(doc: DomainDoc) -> Result<Self> {
        let vertices: Vec<Point2> = doc.vertices.iter().map(|v| Point2::new(v[0], v[1])).collect();
        let planar = |kind: &DomainKind| -> Result<DomainSpec> {
            match kind {
                DomainKind::Polygon => DomainSpec::polygon(vertices.clone(), None),
                DomainKind::Snowflake { level } => make_koch_snowflake(*level),
                DomainKind::Corridor {
                    generations,
                    width_exponent,
                } => make_corridor_domain(*generations, *width_exponent),
                DomainKind::Product { .. } => Err(Error::Construction("nested product domain".into())),
            }
        };
        let mut d = match &doc.kind {
            DomainKind::Product { base, height } => make_product(&planar(base)?, *height)?,
            k => planar(k)?,
        };
        if doc.kind == DomainKind::Polygon {
            d.analytic_boundary_dim = doc.analytic_boundary_dim;
        }
        if d.ambient_dim != doc.ambient_dim || d.vertices.len() != vertices.len() {
            return Err(Error::Construction("document does not match its rebuilt geometry".into()));
        }
        Ok(d)
    }
}

pub fn make_square(side: f64) -> Result<DomainSpec> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(invalid("side", format!("must be positive, got {side}")));
    }
    DomainSpec::polygon(
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(side, 0.0),
            Point2::new(side, side),
            Point2::new(0.0, side),
        ],
        Some(1.0),
    )
}

pub const MAX_SNOWFLAKE_LEVEL: u32 = 9;

pub fn make_koch_snowflake(level: u32) -> Result<DomainSpec> {
    if level > MAX_SNOWFLAKE_LEVEL {
        return Err(invalid("level", format!("must be in 0..={MAX_SNOWFLAKE_LEVEL}, got {level}")));
    }
    let vertices = koch::snowflake_vertices(level);
    let region = PlanarRegion::new(&[vertices.clone()], &[])?;
    Ok(DomainSpec::from_parts(
        2,
        DomainKind::Snowflake { level },
        vertices,
        None,
        Some(koch::koch_dimension()),
        region,
    ))
}

pub fn make_product(planar: &DomainSpec, height: f64) -> Result<DomainSpec> {
    if planar.ambient_dim != 2 {
        return Err(invalid("planar", format!("expected a 2-D domain, got dimension {}", planar.ambient_dim)));
    }
    if !(height > 0.0 && height.is_finite()) {
        return Err(invalid("height", format!("must be positive, got {height}")));
    }
    let mut bb = planar.bounding_box.clone();
    bb.min.push(0.0);
    bb.max.push(height);
    Ok(DomainSpec {
        ambient_dim: 3,
        kind: DomainKind::Product {
            base: Box::new(planar.kind.clone()),
            height,
        },
        vertices: planar.vertices.clone(),
        interval: Some([0.0, height]),
        analytic_boundary_dim: planar.analytic_boundary_dim.map(|d| d + 1.0),
        bounding_box: bb,
        region: planar.region.clone(),
    })
}

pub const MAX_CORRIDOR_GENERATIONS: u32 = 6;

pub fn make_corridor_domain(generations: u32, width_exponent: f64) -> Result<DomainSpec> {
    if !(1..=MAX_CORRIDOR_GENERATIONS).contains(&generations) {
        return Err(invalid(
            "generations",
            format!("must be in 1..={MAX_CORRIDOR_GENERATIONS}, got {generations}"),
        ));
    }
    if !(width_exponent >= 1.0 && width_exponent.is_finite()) {
        return Err(invalid("width_exponent", format!("must be >= 1, got {width_exponent}")));
    }
    let layout = corridor::build(generations, width_exponent)?;
    let mut rings = vec![layout.outer.clone()];
    rings.extend(layout.holes);
    let region = PlanarRegion::new(&rings, &layout.walls)?;
    Ok(DomainSpec::from_parts(
        2,
        DomainKind::Corridor {
            generations,
            width_exponent,
        },
        layout.outer,
        None,
        None,
        region,
    ))
}

impl DomainSpec {
    /// Simple counterclockwise polygon.
    pub fn polygon(vertices: Vec<Point2>, analytic_boundary_dim: Option<f64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(invalid("vertices", "polygon needs at least 3 vertices"));
        }
        if !planar::is_simple(&vertices) {
            return Err(invalid("vertices", "polygon is not simple"));
        }
        if planar::signed_area(&vertices) <= 0.0 {
            return Err(invalid("vertices", "polygon must be counterclockwise"));
        }
        if let Some(d) = analytic_boundary_dim {
            if !(1.0..2.0).contains(&d) {
                return Err(invalid("analytic_boundary_dim", format!("{d} not in [1, 2)")));
            }
        }
        let region = PlanarRegion::new(&[vertices.clone()], &[])?;
        Ok(Self::from_parts(2, DomainKind::Polygon, vertices, None, analytic_boundary_dim, region))
    }

    fn from_parts(
        ambient_dim: usize,
        kind: DomainKind,
        vertices: Vec<Point2>,
        interval: Option<[f64; 2]>,
        analytic_boundary_dim: Option<f64>,
        region: PlanarRegion,
    ) -> Self {
        let bounding_box = BoundingBox {
            min: vec![region.lo.x, region.lo.y],
            max: vec![region.hi.x, region.hi.y],
        };
        Self {
            ambient_dim,
            kind,
            vertices,
            interval,
            analytic_boundary_dim,
            bounding_box,
            region: Arc::new(region),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn interval(&self) -> Option<[f64; 2]> {
        self.interval
    }

    pub fn analytic_boundary_dim(&self) -> Option<f64> {
        self.analytic_boundary_dim
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bounding_box
    }

    pub fn planar(&self) -> &PlanarRegion {
        &self.region
    }

    /// Number of boundary edges of the planar cross-section (walls included).
    pub fn edge_count(&self) -> usize {
        self.region.edge_count()
    }

    /// Short human-readable identifier.
    pub fn label(&self) -> String {
        fn kind_label(k: &DomainKind, nv: usize) -> String {
            match k {
                DomainKind::Polygon => format!("polygon[{nv}]"),
                DomainKind::Snowflake { level } => format!("snowflake(level={level})"),
                DomainKind::Product { base, height } => format!("product({}, height={height})", kind_label(base, nv)),
                DomainKind::Corridor {
                    generations,
                    width_exponent,
                } => format!("corridor(generations={generations}, width_exponent={width_exponent})"),
            }
        }
        kind_label(&self.kind, self.vertices.len())
    }

    pub fn centroid(&self) -> Vec<f64> {
        let c = match self.kind {
            DomainKind::Corridor { .. } => Point2::new(0.5, 0.5),
            _ => self.region.centroid(),
        };
        match self.interval {
            Some([a, b]) => vec![c.x, c.y, 0.5 * (a + b)],
            None => vec![c.x, c.y],
        }
    }

    pub fn diameter(&self) -> f64 {
        self.bounding_box.diagonal()
    }

    fn check_dim(&self, p: &[f64]) {
        assert_eq!(p.len(), self.ambient_dim, "point dimension does not match domain");
    }

    /// True iff `p` lies in the open domain.
    pub fn contains(&self, p: &[f64]) -> bool {
        self.check_dim(p);
        let inside_planar = self.region.contains(Point2::new(p[0], p[1]));
        match self.interval {
            Some([a, b]) => inside_planar && p[2] > a && p[2] < b,
            None => inside_planar,
        }
    }

    /// Distance to the boundary together with the nearest boundary point and an
    /// inside flag.
    pub fn probe(&self, p: &[f64]) -> DomainProbe {
        self.check_dim(p);
        let pr = self.region.probe(Point2::new(p[0], p[1]));
        self.lift_probe(p, pr)
    }

    pub(crate) fn lift_probe(&self, p: &[f64], pr: Probe) -> DomainProbe {
        match self.interval {
            None => DomainProbe {
                dist: pr.dist,
                inside: pr.inside,
                nearest: [pr.nearest.x, pr.nearest.y, 0.0],
            },
            Some([a, b]) => {
                let z = p[2];
                let (dz, face) = if z - a <= b - z { (z - a, a) } else { (b - z, b) };
                let inside = pr.inside && dz > 0.0;
                if pr.inside && dz >= 0.0 && dz < pr.dist {
                    DomainProbe {
                        dist: dz,
                        inside,
                        nearest: [p[0], p[1], face],
                    }
                } else if pr.inside && dz >= 0.0 {
                    DomainProbe {
                        dist: pr.dist,
                        inside,
                        nearest: [pr.nearest.x, pr.nearest.y, z],
                    }
                } else {
                    // outside: distance to the closure rather than to the boundary
                    let zc = z.clamp(a, b);
                    let (px, py) = if pr.inside { (p[0], p[1]) } else { (pr.nearest.x, pr.nearest.y) };
                    let d = ((p[0] - px).powi(2) + (p[1] - py).powi(2) + (z - zc).powi(2)).sqrt();
                    DomainProbe {
                        dist: d,
                        inside: false,
                        nearest: [px, py, zc],
                    }
                }
            }
        }
    }

    /// Euclidean distance from a closure point to the boundary.
    pub fn dist_to_boundary(&self, p: &[f64]) -> Result<f64> {
        let pr = self.probe(p);
        if !pr.inside && pr.dist > CLOSURE_TOL {
            return Err(Error::OutsideDomain {
                point: p.to_vec(),
                distance: -pr.dist,
            });
        }
        Ok(if pr.inside { pr.dist } else { 0.0 })
    }

    pub fn nearest_boundary_point(&self, p: &[f64]) -> Vec<f64> {
        let pr = self.probe(p);
        pr.nearest[..self.ambient_dim].to_vec()
    }

    /// One reflected move from `cur` (in the closure) toward `prop`.
    pub fn reflect_step(&self, cur: &[f64], prop: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim];
        self.reflect_step_into(cur, prop, &mut out);
        out
    }

    pub fn reflect_step_into(&self, cur: &[f64], prop: &[f64], out: &mut [f64]) {
        self.check_dim(cur);
        self.check_dim(prop);
        let q = self
            .region
            .reflect(Point2::new(cur[0], cur[1]), Point2::new(prop[0], prop[1]));
        out[0] = q.x;
        out[1] = q.y;
        if let Some([a, b]) = self.interval {
            out[2] = crate::rbm::fold_1d(prop[2], a, b).expect("non-degenerate interval");
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_basics() {
        let d = make_square(1.0).unwrap();
        assert_eq!(d.vertices().len(), 4);
        assert_eq!(d.analytic_boundary_dim(), Some(1.0));
        assert_eq!(d.bounding_box().min, vec![0.0, 0.0]);
        assert_eq!(d.bounding_box().max, vec![1.0, 1.0]);
        assert!(make_square(0.0).is_err());
        assert!(make_square(-1.0).is_err());
    }

    #[test]
    fn snowflake_level_three() {
        let d = make_koch_snowflake(3).unwrap();
        assert_eq!(d.edge_count(), 192);
        let side = 3f64.sqrt();
        for w in d.vertices().windows(2) {
            assert!((w[0].dist(w[1]) - side / 27.0).abs() < 1e-12);
        }
        assert!(make_koch_snowflake(10).is_err());
    }

    #[test]
    fn product_dims() {
        let sq = make_square(1.0).unwrap();
        let p = make_product(&sq, 1.0).unwrap();
        assert_eq!(p.analytic_boundary_dim(), Some(2.0));
        assert_eq!(p.bounding_box().max, vec![1.0, 1.0, 1.0]);
        assert!(make_product(&p, 1.0).is_err());
        let sf = make_product(&make_koch_snowflake(2).unwrap(), 1.0).unwrap();
        assert!((sf.analytic_boundary_dim().unwrap() - (1.0 + 4f64.ln() / 3f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn product_queries() {
        let p = make_product(&make_square(1.0).unwrap(), 1.0).unwrap();
        assert!(p.contains(&[0.5, 0.5, 0.5]));
        assert!(!p.contains(&[0.5, 0.5, 1.2]));
        assert!((p.dist_to_boundary(&[0.5, 0.4, 0.05]).unwrap() - 0.05).abs() < 1e-15);
        assert!((p.dist_to_boundary(&[0.1, 0.4, 0.5]).unwrap() - 0.1).abs() < 1e-15);
        assert!(p.dist_to_boundary(&[0.5, 0.5, 1.5]).is_err());
        let r = p.reflect_step(&[0.5, 0.5, 0.98], &[0.5, 1.02, 1.03]);
        assert!((r[1] - 0.98).abs() < 1e-12 && (r[2] - 0.97).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        for d in [
            make_square(2.0).unwrap(),
            make_koch_snowflake(2).unwrap(),
            make_product(&make_koch_snowflake(1).unwrap(), 0.5).unwrap(),
            make_corridor_domain(2, 3.0).unwrap(),
        ] {
            let s = d.to_json().unwrap();
            let back = DomainSpec::from_json(&s).unwrap();
            assert_eq!(back.to_json().unwrap(), s);
        }
    }

    #[test]
    fn outside_point_is_an_error() {
        let d = make_square(1.0).unwrap();
        assert!(matches!(d.dist_to_boundary(&[1.5, 0.5]), Err(Error::OutsideDomain { .. })));
        assert_eq!(d.dist_to_boundary(&[1.0, 0.5]).unwrap(), 0.0);
    }
}
