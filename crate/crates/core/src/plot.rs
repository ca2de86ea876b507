//! SVG rendering of two-dimensional instances.
//!
//! A scene collects exact geometry: hull polyhedra, removed cells,
//! solution sets, and marked points. Rendering enumerates polygon
//! vertices by intersecting constraint pairs in exact arithmetic, sorts
//! them angularly with exact comparisons, and converts to floating point
//! only when writing coordinates. Unbounded polyhedra are clipped to the
//! viewport box first, so every drawn element is a polygon, segment, or
//! point.

use crate::affine::{LinearConstraint, Relation};
use crate::error::Error;
use crate::linalg::{solve_linear_system, LinearSolution};
use crate::opt::DiffSet;
use crate::rat::{dot, point_display, rat_int, Rat, RatVec};
use crate::sets::{Cell, Polyhedron};
use num::{BigRational, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt::Write as _;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Hull,
    Removed,
    Solution,
    SolutionRemoved,
}

#[derive(Debug, Clone)]
struct Region {
    rows: Vec<LinearConstraint>,
    role: Role,
}

#[derive(Debug, Clone)]
struct Marker {
    at: RatVec,
    label: String,
    certified: bool,
}

/// An exact two-dimensional scene, rendered to SVG on demand.
#[derive(Debug, Clone, Default)]
pub struct PlotScene {
    regions: Vec<Region>,
    markers: Vec<Marker>,
}

impl PlotScene {
    /// Starts an empty scene for a problem of the given dimension; only
    /// dimension 2 can be drawn.
    pub fn new(dim: usize) -> Result<Self, Error> {
        if dim != 2 {
            return Err(Error::UnsupportedShape(format!(
                "plotting supports dimension 2 only, not {dim}"
            )));
        }
        Ok(PlotScene::default())
    }

    pub fn hull(&mut self, hull: &Polyhedron) {
        self.regions.push(Region { rows: hull.rows().to_vec(), role: Role::Hull });
    }

    pub fn removed_cells(&mut self, cells: &[Cell]) {
        for cell in cells {
            self.regions.push(Region { rows: cell.rows().to_vec(), role: Role::Removed });
        }
    }

    pub fn solutions(&mut self, set: &DiffSet) {
        self.regions.push(Region { rows: set.base.rows().to_vec(), role: Role::Solution });
        for cell in &set.removed {
            self.regions
                .push(Region { rows: cell.rows().to_vec(), role: Role::SolutionRemoved });
        }
    }

    pub fn solution_polyhedron(&mut self, set: &Polyhedron) {
        self.regions.push(Region { rows: set.rows().to_vec(), role: Role::Solution });
    }

    pub fn point(&mut self, at: &[Rat], label: &str, certified: bool) {
        self.markers.push(Marker { at: at.to_vec(), label: label.into(), certified });
    }

    pub fn render(&self) -> Result<String, Error> {
        let (lo, hi) = self.bounds()?;
        let clip = clip_rows(&lo, &hi);
        let mut shapes: Vec<(Vec<RatVec>, Role)> = Vec::new();
        for region in &self.regions {
            let verts = polygon_vertices(&region.rows, &clip)?;
            if !verts.is_empty() {
                shapes.push((verts, region.role));
            }
        }

        let to_px = |x: &Rat, axis: usize| -> f64 {
            let span = (&hi[axis] - &lo[axis]).to_f64().unwrap_or(1.0).max(1e-9);
            let t = (x - &lo[axis]).to_f64().unwrap_or(0.0) / span;
            let scaled = MARGIN + t * (CANVAS - 2.0 * MARGIN);
            if axis == 1 { CANVAS - scaled } else { scaled }
        };
        let fmt = |v: f64| -> String { format!("{v:.2}") };

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">",
            c = CANVAS
        );
        let _ = writeln!(svg, "<rect width=\"{c}\" height=\"{c}\" fill=\"white\"/>", c = CANVAS);

        let zero = rat_int(0);
        if lo[0] <= zero && zero <= hi[0] {
            let x = fmt(to_px(&zero, 0));
            let _ = writeln!(
                svg,
                "<line x1=\"{x}\" y1=\"0\" x2=\"{x}\" y2=\"{c}\" stroke=\"#ddd\"/>",
                c = CANVAS
            );
        }
        if lo[1] <= zero && zero <= hi[1] {
            let y = fmt(to_px(&zero, 1));
            let _ = writeln!(
                svg,
                "<line x1=\"0\" y1=\"{y}\" x2=\"{c}\" y2=\"{y}\" stroke=\"#ddd\"/>",
                c = CANVAS
            );
        }

        let draw_order = [Role::Hull, Role::Solution, Role::Removed, Role::SolutionRemoved];
        for role in draw_order {
            for (verts, r) in &shapes {
                if *r != role {
                    continue;
                }
                let coords: Vec<String> = verts
                    .iter()
                    .map(|v| format!("{},{}", fmt(to_px(&v[0], 0)), fmt(to_px(&v[1], 1))))
                    .collect();
                let style = match role {
                    Role::Hull => {
                        "fill=\"#cfe2f3\" fill-opacity=\"0.6\" stroke=\"#1c4587\" stroke-width=\"1.5\""
                    }
                    Role::Solution => {
                        "fill=\"#b6d7a8\" fill-opacity=\"0.7\" stroke=\"#38761d\" stroke-width=\"2\""
                    }
                    Role::Removed => {
                        "fill=\"none\" stroke=\"#cc0000\" stroke-width=\"2.5\" stroke-dasharray=\"6 4\""
                    }
                    Role::SolutionRemoved => {
                        "fill=\"none\" stroke=\"#990000\" stroke-width=\"2.5\" stroke-dasharray=\"2 3\""
                    }
                };
                match verts.len() {
                    1 => {
                        let stroke = if role == Role::Hull { "#1c4587" } else { "#cc0000" };
                        let _ = writeln!(
                            svg,
                            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"white\" stroke=\"{stroke}\" stroke-width=\"2\"/>",
                            fmt(to_px(&verts[0][0], 0)),
                            fmt(to_px(&verts[0][1], 1)),
                        );
                    }
                    2 => {
                        let _ = writeln!(
                            svg,
                            "<polyline points=\"{}\" {style}/>",
                            coords.join(" ")
                        );
                    }
                    _ => {
                        let _ = writeln!(
                            svg,
                            "<polygon points=\"{}\" {style}/>",
                            coords.join(" ")
                        );
                    }
                }
            }
        }

        for marker in &self.markers {
            let cx = fmt(to_px(&marker.at[0], 0));
            let cy = fmt(to_px(&marker.at[1], 1));
            let fill = if marker.certified { "#38761d" } else { "#cc0000" };
            let _ = writeln!(svg, "<circle cx=\"{cx}\" cy=\"{cy}\" r=\"5\" fill=\"{fill}\"/>");
            let text = if marker.label.is_empty() {
                point_display(&marker.at)
            } else {
                format!("{} {}", marker.label, point_display(&marker.at))
            };
            let _ = writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" fill=\"#333\">{}</text>",
                to_px(&marker.at[0], 0) + 8.0,
                to_px(&marker.at[1], 1) - 6.0,
                xml_escape(&text),
            );
        }

        svg.push_str("</svg>\n");
        Ok(svg)
    }

    /// Viewport bounds: the spread of all natural vertices and markers,
    /// padded, with a unit default when nothing is bounded.
    fn bounds(&self) -> Result<(RatVec, RatVec), Error> {
        let mut coords: Vec<RatVec> = self.markers.iter().map(|m| m.at.clone()).collect();
        for region in &self.regions {
            coords.extend(polygon_vertices(&region.rows, &[])?);
        }
        let (mut lo, mut hi) = (vec![rat_int(-1); 2], vec![rat_int(1); 2]);
        if let Some(first) = coords.first() {
            lo = first.clone();
            hi = first.clone();
            for p in &coords {
                for axis in 0..2 {
                    if p[axis] < lo[axis] {
                        lo[axis] = p[axis].clone();
                    }
                    if p[axis] > hi[axis] {
                        hi[axis] = p[axis].clone();
                    }
                }
            }
        }
        for axis in 0..2 {
            let span = &hi[axis] - &lo[axis];
            let pad = if span.is_zero() { rat_int(1) } else { span / rat_int(4) };
            lo[axis] -= &pad;
            hi[axis] += &pad;
        }
        Ok((lo, hi))
    }
}

fn clip_rows(lo: &[Rat], hi: &[Rat]) -> Vec<LinearConstraint> {
    vec![
        LinearConstraint::le(vec![rat_int(-1), rat_int(0)], -lo[0].clone()),
        LinearConstraint::le(vec![rat_int(1), rat_int(0)], hi[0].clone()),
        LinearConstraint::le(vec![rat_int(0), rat_int(-1)], -lo[1].clone()),
        LinearConstraint::le(vec![rat_int(0), rat_int(1)], hi[1].clone()),
    ]
}

/// All vertices of the closed region cut out by `rows` and `clip`,
/// ordered counterclockwise. Strict rows are drawn as their closures.
pub(crate) fn polygon_vertices(
    rows: &[LinearConstraint],
    clip: &[LinearConstraint],
) -> Result<Vec<RatVec>, Error> {
    let all: Vec<&LinearConstraint> = rows.iter().chain(clip.iter()).collect();
    let mut verts: Vec<RatVec> = Vec::new();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let eqs = [
                (all[i].form.coeffs.clone(), -all[i].form.constant.clone()),
                (all[j].form.coeffs.clone(), -all[j].form.constant.clone()),
            ];
            let LinearSolution::Unique(x) = solve_linear_system(2, &eqs)? else {
                continue;
            };
            if all.iter().all(|row| satisfied_closed(row, &x)) && !verts.contains(&x) {
                verts.push(x);
            }
        }
    }
    if verts.len() > 2 {
        let n = rat_int(verts.len() as i64);
        let mut center = vec![rat_int(0), rat_int(0)];
        for v in &verts {
            center[0] += &v[0];
            center[1] += &v[1];
        }
        center[0] /= &n;
        center[1] /= &n;
        verts.sort_by(|a, b| angular_order(&center, a, b));
    }
    Ok(verts)
}

fn satisfied_closed(row: &LinearConstraint, x: &[Rat]) -> bool {
    let val = dot(&row.form.coeffs, x) + &row.form.constant;
    match row.rel {
        Relation::Le | Relation::Lt => !val.is_positive(),
        Relation::Eq => val.is_zero(),
    }
}

/// Counterclockwise order around `center`, decided exactly: upper
/// half-turn before lower, ties broken by the cross product.
fn angular_order(center: &[Rat], a: &[Rat], b: &[Rat]) -> Ordering {
    let da = (&a[0] - &center[0], &a[1] - &center[1]);
    let db = (&b[0] - &center[0], &b[1] - &center[1]);
    let upper = |d: &(BigRational, BigRational)| -> u8 {
        if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
            0
        } else {
            1
        }
    };
    match upper(&da).cmp(&upper(&db)) {
        Ordering::Equal => {
            let cross = &da.0 * &db.1 - &da.1 * &db.0;
            if cross.is_positive() {
                Ordering::Less
            } else if cross.is_negative() {
                Ordering::Greater
            } else {
                Ordering::Equal
            }
        }
        other => other,
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use crate::sets::CarvedPolyhedron;

    fn le(coeffs: &[i64], rhs: i64) -> LinearConstraint {
        LinearConstraint::le(coeffs.iter().map(|&v| rat_int(v)).collect(), rat_int(rhs))
    }

    fn unit_box() -> Polyhedron {
        Polyhedron::new(
            2,
            vec![le(&[-1, 0], 0), le(&[1, 0], 1), le(&[0, -1], 0), le(&[0, 1], 1)],
        )
        .unwrap()
    }

    #[test]
    fn only_planar_scenes_are_accepted() {
        assert!(matches!(PlotScene::new(1), Err(Error::UnsupportedShape(_))));
        assert!(matches!(PlotScene::new(3), Err(Error::UnsupportedShape(_))));
        assert!(PlotScene::new(2).is_ok());
    }

    #[test]
    fn box_vertices_come_out_in_order() {
        let verts = polygon_vertices(unit_box().rows(), &[]).unwrap();
        assert_eq!(verts.len(), 4);
        let mut area2 = rat_int(0);
        for i in 0..4 {
            let (a, b) = (&verts[i], &verts[(i + 1) % 4]);
            area2 += &a[0] * &b[1] - &a[1] * &b[0];
        }
        assert_eq!(area2, rat_int(2));
    }

    #[test]
    fn unbounded_regions_are_clipped_to_the_viewport() {
        let halfplane = Polyhedron::new(2, vec![le(&[-1, 0], 0)]).unwrap();
        let mut scene = PlotScene::new(2).unwrap();
        scene.hull(&halfplane);
        scene.point(&[rat_int(2), rat_int(2)], "probe", true);
        let svg = scene.render().unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("probe (2, 2)"));
    }

    #[test]
    fn notched_box_scene_draws_every_layer() {
        let notch = Cell::new(
            2,
            vec![
                LinearConstraint::eq(vec![rat_int(0), rat_int(1)], rat_int(0)),
                LinearConstraint::lt(vec![rat_int(-1), rat_int(0)], rat(-1, 4)),
                LinearConstraint::lt(vec![rat_int(1), rat_int(0)], rat(2, 3)),
            ],
        )
        .unwrap();
        let carved = CarvedPolyhedron::new(unit_box(), vec![notch]).unwrap();
        let segment = Polyhedron::new(
            2,
            vec![
                LinearConstraint::eq(vec![rat_int(2), rat_int(0)], rat_int(1)),
                le(&[0, -1], 0),
                le(&[0, 1], 1),
            ],
        )
        .unwrap();
        let mut scene = PlotScene::new(2).unwrap();
        scene.hull(carved.hull());
        scene.removed_cells(carved.removed());
        scene.solution_polyhedron(&segment);
        scene.point(&[rat(1, 2), rat(1, 2)], "", true);
        let svg = scene.render().unwrap();
        assert!(svg.contains("<polygon"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("(1/2, 1/2)"));
    }

    #[test]
    fn single_point_regions_render_as_open_circles() {
        let spike = Cell::new(
            2,
            vec![
                LinearConstraint::eq(vec![rat_int(1), rat_int(0)], rat_int(0)),
                LinearConstraint::eq(vec![rat_int(0), rat_int(1)], rat_int(0)),
            ],
        )
        .unwrap();
        let mut scene = PlotScene::new(2).unwrap();
        scene.hull(&unit_box());
        scene.removed_cells(&[spike]);
        let svg = scene.render().unwrap();
        assert!(svg.contains("fill=\"white\" stroke=\"#cc0000\""));
    }
}
