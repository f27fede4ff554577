//! Reconstructions of the classical worked examples: circle and stick,
//! circle and three tangents, the elliptope, the cylinder over a nodal
//! cubic, the helmet, a determinantal quartic and the Lorentz cone.

use crate::body::{Body, BodySpec, Constraint, Rep};
use crate::error::{Error, Result};
use crate::poly::{det_pencil, int, rat, Matrix, Polynomial, Rational};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

pub const NAMES: [&str; 7] =
    ["bellows", "three_tangents", "elliptope", "nodal_cylinder", "helmet", "hyperb_quartic", "lorentz"];

/// Whether a recorded fact is a claim about the example or a value this
/// implementation observed and pins for regression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Claimed,
    Computed,
    Observed,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fact {
    pub key: String,
    pub value: Value,
    pub basis: Basis,
    pub anchor: String,
}

fn fact(key: &str, value: Value, basis: Basis, anchor: &str) -> Fact {
    Fact { key: key.into(), value, basis, anchor: anchor.into() }
}

#[derive(Clone, Debug)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub body: Body,
    /// Components of the algebraic boundary.
    pub defining_polys: Vec<Polynomial>,
    pub facts: Vec<Fact>,
}

impl GalleryEntry {
    pub fn fact(&self, key: &str) -> Option<&Value> {
        self.facts.iter().find(|f| f.key == key).map(|f| &f.value)
    }

    pub fn facts_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert(
            "defining_polys".into(),
            Value::Array(self.defining_polys.iter().map(|p| json!(p.to_string())).collect()),
        );
        for f in &self.facts {
            m.insert(f.key.clone(), json!({"value": f.value, "basis": f.basis, "anchor": f.anchor}));
        }
        Value::Object(m)
    }
}

pub fn gallery_list() -> Vec<GalleryEntry> {
    NAMES.iter().map(|n| entry(n).expect("gallery entries build")).collect()
}

pub fn entry(name: &str) -> Result<GalleryEntry> {
    match name {
        "bellows" => bellows(),
        "three_tangents" => three_tangents(),
        "elliptope" => elliptope(),
        "nodal_cylinder" => nodal_cylinder(),
        "helmet" => helmet(),
        "hyperb_quartic" => hyperb_quartic(),
        "lorentz" => lorentz(),
        "unit_ball" => unit_ball_entry(3),
        _ => Err(Error::InvalidInput(format!("unknown gallery entry '{name}'"))),
    }
}

/// Boundary sample feeding the patch pipeline: the generators for the
/// bellows (a hull of a curve and two points), rays from the interior
/// point otherwise.
pub fn patch_sample(e: &GalleryEntry, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if e.name == "bellows" {
        Ok(bellows_generators(n, seed))
    } else {
        crate::patch::boundary_sample(&e.body, n, seed)
    }
}

fn p(s: &str, n: usize) -> Polynomial {
    Polynomial::parse_with_nvars(s, n).expect("gallery polynomial parses")
}

fn sublevel(name: &str, cons: Vec<Constraint>, dim: usize, comps: &[Polynomial], bbox: Option<Vec<[f64; 2]>>) -> Result<Body> {
    Body::new(BodySpec {
        name: Some(name.into()),
        rep: Rep::SublevelSet { constraints: cons, selector: vec![0.0; dim], bbox },
        interior_point: None,
        components: Some(comps.iter().cloned().map(Constraint::Poly).collect()),
    })
}

pub fn unit_ball(dim: usize) -> Body {
    unit_ball_entry(dim).unwrap().body
}

fn unit_ball_entry(dim: usize) -> Result<GalleryEntry> {
    let s: Vec<String> = (0..dim).map(|i| format!("x{i}^2")).collect();
    let f = p(&format!("{} - 1", s.join(" + ")), dim);
    let body = sublevel("unit_ball", vec![Constraint::Poly(f.clone())], dim, std::slice::from_ref(&f), None)?;
    Ok(GalleryEntry { name: "unit_ball", body, defining_polys: vec![f], facts: vec![fact("patch_count", json!(1), Basis::Computed, "smooth boundary")] })
}

/// Convex hull of the unit circle in `z = 0` and the segment from
/// `(-1,0,-1)` to `(-1,0,1)`.
pub fn bellows() -> Result<GalleryEntry> {
    let cone1 = p("x0^2 - 2*x0*x2 + x1^2 - 2*x2 - 1", 3); // (x-z)^2 + y^2 - (z+1)^2
    let cone2 = p("x0^2 + 2*x0*x2 + x1^2 + 2*x2 - 1", 3); // (x+z)^2 + y^2 - (z-1)^2
    let cons = vec![Constraint::Poly(cone1.clone()), Constraint::Poly(cone2.clone())];
    let body = sublevel("bellows", cons, 3, &[cone1.clone(), cone2.clone()], Some(vec![[-2.0, 2.0], [-2.0, 2.0], [-1.0, 1.0]]))?;
    let facts = vec![
        fact("patch_count", json!(2), Basis::Claimed, "two primal patches, one for each quadratic cone"),
        fact("face_dims", json!([1, 1]), Basis::Claimed, "each cone patch is a family of edges"),
        fact("stick", json!([[-1, 0, -1], [-1, 0, 1]]), Basis::Claimed, "interval parallel to the z-axis"),
        fact("dual_ovals_meet", json!([1, 0, 0]), Basis::Claimed, "the two ovals of the bellows meet in (1,0,0)"),
    ];
    Ok(GalleryEntry { name: "bellows", body, defining_polys: vec![cone1, cone2], facts })
}

/// Seeded generator set: `n` jittered circle points (one per arc of
/// length `2 pi / n`) plus the two stick endpoints.
pub fn bellows_generators(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t: f64 = std::f64::consts::TAU * (i as f64 + rng.random::<f64>()) / n as f64;
            vec![t.cos(), t.sin(), 0.0]
        })
        .collect();
    pts.push(vec![-1.0, 0.0, -1.0]);
    pts.push(vec![-1.0, 0.0, 1.0]);
    pts
}

/// Convex hull of the unit circle and the points `(-1, -1)`, `(-1, 1)`.
pub fn three_tangents() -> Result<GalleryEntry> {
    let circle = p("x0^2 + x1^2 - 1", 2);
    let lower = p("x1 + 1", 2);
    let upper = p("x1 - 1", 2);
    let left = p("x0 + 1", 2);
    let cons = vec![
        Constraint::Piecewise { selector: p("x0", 2), below: p("x1^2 - 1", 2), above: circle.clone() },
        Constraint::Poly(p("-x0 - 1", 2)),
    ];
    let comps = [circle.clone(), lower.clone(), upper.clone(), left.clone()];
    let body = sublevel("three_tangents", cons, 2, &comps, None)?;
    let facts = vec![
        fact("patch_count", json!(5), Basis::Claimed, "five primal patches"),
        fact(
            "patches",
            json!([
                {"x": "(t,-1)", "ell": [0, 1], "range": "-1<t<0", "face_dim": 1},
                {"x": "(t,1)", "ell": [0, -1], "range": "-1<t<0", "face_dim": 1},
                {"x": "(-1,t)", "ell": [1, 0], "range": "-1<t<0", "face_dim": 1},
                {"x": "(-1,t)", "ell": [1, 0], "range": "0<t<1", "face_dim": 1},
                {"x": "x^2+y^2=1, x>0", "ell": "unit normal", "face_dim": 0}
            ]),
            Basis::Claimed,
            "the primal patches of K are",
        ),
        fact("face_dims", json!([0, 1, 1, 1, 1]), Basis::Claimed, "four segment families and one arc of exposed points"),
        fact("singular_points", json!([[-1, 0], [0, -1], [0, 1]]), Basis::Claimed, "points of tangency of the lines to the circle"),
    ];
    Ok(GalleryEntry { name: "three_tangents", body, defining_polys: comps.to_vec(), facts })
}

pub fn cayley() -> Polynomial {
    p("x0^2 + x1^2 + x2^2 - 2*x0*x1*x2 - 1", 3)
}

/// `w(x^2+y^2+z^2) - 2xyz - w^3` with `w` first.
pub fn cayley_cone() -> Polynomial {
    cayley().homogenize(0).unwrap()
}

pub fn elliptope_vertices() -> Vec<[i64; 3]> {
    vec![[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
}

/// Component of the origin in `{f <= 0}` for the Cayley cubic `f`; the
/// box makes the vertices constraint-qualified.
pub fn elliptope() -> Result<GalleryEntry> {
    let f = cayley();
    let body = sublevel("elliptope", vec![Constraint::Poly(f.clone())], 3, std::slice::from_ref(&f), Some(vec![[-1.0, 1.0]; 3]))?;
    let facts = vec![
        fact("patch_count", json!(4), Basis::Claimed, "four areas resembling the interiors of the sides of a tetrahedron"),
        fact("face_dims", json!([0, 0, 0, 0]), Basis::Claimed, "every other proper face is an exposed point"),
        fact("singular_points", json!(elliptope_vertices()), Basis::Claimed, "a=(1,1,1), b=(1,-1,-1), c=(-1,1,-1), d=(-1,-1,1)"),
        fact("vertex_halfspace_value", json!(3), Basis::Claimed, "<x, l> <= 3 for x in {a,b,c,d}"),
        fact("edges", json!(6), Basis::Claimed, "every pair of distinct vertices spans an exposed edge"),
    ];
    Ok(GalleryEntry { name: "elliptope", body, defining_polys: vec![f], facts })
}

/// Cylinder over the loop of `y^2 = (x+1)(x-1)^2`.
pub fn nodal_cylinder() -> Result<GalleryEntry> {
    let g = p("x1^2 - x0^3 + x0^2 + x0 - 1", 3);
    let top = p("x2 - 1", 3);
    let bottom = p("x2 + 1", 3);
    let cons = vec![Constraint::Poly(g.clone()), Constraint::Poly(p("x0 - 1", 3))];
    let body = sublevel("nodal_cylinder", cons, 3, &[g.clone(), top.clone(), bottom.clone()], Some(vec![[-2.0, 2.0], [-2.0, 2.0], [-1.0, 1.0]]))?;
    let facts = vec![
        fact("segment_face", json!([[1, 0, -1], [1, 0, 1]]), Basis::Claimed, "the 1-dimensional face (1,0) x [-1,1]"),
        fact("node", json!([1, 0]), Basis::Claimed, "node of the cubic curve"),
        fact(
            "uncovered_product",
            json!("pairs over the segment face with functional in the dual segment lie in no closed patch"),
            Basis::Claimed,
            "not in the closure of the union of all closed patches",
        ),
    ];
    Ok(GalleryEntry { name: "nodal_cylinder", body, defining_polys: vec![g, top, bottom], facts })
}

/// `sqrt(1 - (7/10)^2)`
pub fn helmet_a() -> f64 {
    0.51f64.sqrt()
}

/// Unit ball together with the half-cylinder `y >= 0, x^2 + z^2 <= 1`,
/// cut by `f = x^2/2 + y - 7/10 <= 0` and `z <= a`.
pub fn helmet() -> Result<GalleryEntry> {
    let sphere = p("x0^2 + x1^2 + x2^2 - 1", 3);
    let cyl = p("x0^2 + x2^2 - 1", 3);
    let f = p("1/2*x0^2 + x1 - 7/10", 3);
    let cap = Constraint::Piecewise { selector: p("x2", 3), below: p("-x2^2 - 51/100", 3), above: p("x2^2 - 51/100", 3) };
    let cons = vec![
        Constraint::Piecewise { selector: p("x1", 3), below: sphere.clone(), above: cyl.clone() },
        Constraint::Poly(f.clone()),
        cap.clone(),
    ];
    let mut body = sublevel("helmet", cons, 3, &[], None)?;
    let mut spec = body.spec().clone();
    spec.components = Some(vec![
        Constraint::Poly(sphere.clone()),
        Constraint::Poly(cyl.clone()),
        Constraint::Poly(f.clone()),
        cap,
    ]);
    body = Body::new(spec)?;
    let facts = vec![
        fact("cut_patches", json!(2), Basis::Claimed, "two open patches associated to f"),
        fact("middle_functional", json!([0.0, -10.0 / 7.0, 0.0]), Basis::Claimed, "the face cut out by l=(0,-10/7,0)"),
        fact("a", json!(helmet_a()), Basis::Claimed, "a = sqrt(1-(7/10)^2)"),
        fact("open_patch_continuous", json!(false), Basis::Claimed, "faces of P do not vary continuously in the Hausdorff metric"),
        fact("closed_patch_continuous", json!(true), Basis::Claimed, "the discontinuity disappears for the closed patch"),
    ];
    Ok(GalleryEntry { name: "helmet", body, defining_polys: vec![sphere, cyl, f, p("x2^2 - 51/100", 3)], facts })
}

/// `z_o(x)`, where the plane section `x = const` of the f-surface leaves
/// the closed patch interior: `z_o^2 = 51/100 - 3/10 x^2 - x^4/4`.
pub fn helmet_oval(x: f64) -> f64 {
    (0.51 - 0.3 * x * x - x.powi(4) / 4.0).max(0.0).sqrt()
}

/// Exact pairs on the f-surface patch along the lines `x = const` for each
/// `x` in `xs`, with `z`-spacing at most `h`.  On a line the open patch is
/// `(-sqrt(1-x^2), -z_o) ∪ (z_o, a)`, sampled at interval midpoints so that
/// every nonempty interval is hit; the closed patch adds the endpoints.
pub fn helmet_patch_pairs(xs: &[f64], h: f64, closed: bool) -> Vec<crate::normal_cycle::NormalCyclePair> {
    let a = helmet_a();
    let mut out = Vec::new();
    for &x in xs {
        let zo = helmet_oval(x);
        let y = 0.7 - x * x / 2.0;
        let s = 0.7 + x * x / 2.0;
        let ell = vec![-x / s, -1.0 / s, 0.0];
        for (lo, hi) in [(-(1.0 - x * x).sqrt(), -zo), (zo, a)] {
            let len = hi - lo;
            let count = ((len / h).ceil() as usize).max(1);
            let w = len / count as f64;
            let zs: Vec<f64> = if closed {
                (0..=count).map(|k| lo + k as f64 * w).collect()
            } else if len > 0.0 {
                (0..count).map(|k| lo + (k as f64 + 0.5) * w).collect()
            } else {
                vec![]
            };
            for z in zs {
                out.push(crate::normal_cycle::NormalCyclePair { x: vec![x, y, z], ell: ell.clone(), residual: 0.0 });
            }
        }
    }
    out
}

/// The four pencil matrices `M_0 .. M_3`.
pub fn quartic_pencil() -> Vec<Matrix<Rational>> {
    let m0 = Matrix::identity(4);
    let m1 = Matrix::from_int_rows(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 0]]).unwrap();
    let m2 = Matrix::from_rows(vec![
        vec![int(0), int(1), int(0), int(-3)],
        vec![int(1), rat(4, 9), int(0), rat(-4, 3)],
        vec![int(0), int(0), rat(-1, 4), int(1)],
        vec![int(-3), rat(-4, 3), int(1), int(0)],
    ])
    .unwrap();
    let m3 = Matrix::from_rows(vec![
        vec![int(0), int(0), int(0), int(0)],
        vec![int(0), rat(-10, 3), int(0), int(5)],
        vec![int(0), int(0), int(0), int(0)],
        vec![int(0), int(5), int(0), int(0)],
    ])
    .unwrap();
    vec![m0, m1, m2, m3]
}

/// The quartic as printed, term by term.
pub fn quartic_printed() -> Polynomial {
    p(
        "x0^4 + 3*x0^3*x1 + 3*x0^2*x1^2 + x0*x1^3 + 7/36*x0^3*x2 + 7/18*x0^2*x1*x2 + 7/36*x0*x1^2*x2 \
         - 116/9*x0^2*x2^2 - 74/3*x0*x1*x2^2 - 106/9*x1^2*x2^2 + 13/2*x0*x2^3 + 25/4*x1*x2^3 \
         - 10/3*x0^3*x3 - 20/3*x0^2*x1*x3 - 10/3*x0*x1^2*x3 + 85/6*x0^2*x2*x3 + 55/2*x0*x1*x2*x3 \
         + 40/3*x1^2*x2*x3 - 25*x0^2*x3^2 - 50*x0*x1*x3^2 - 25*x1^2*x3^2 + 25/4*x0*x2*x3^2 \
         + 25/4*x1*x2*x3^2",
        4,
    )
}

pub fn hyperb_quartic() -> Result<GalleryEntry> {
    let f = det_pencil(&quartic_pencil())?;
    let body = Body::new(BodySpec {
        name: Some("hyperb_quartic".into()),
        rep: Rep::Hyperbolic { p: f.clone(), e: vec![1.0, 0.0, 0.0, 0.0] },
        interior_point: None,
        components: None,
    })?;
    let facts = vec![
        fact("terms", json!(23), Basis::Computed, "number of terms in the printed expansion of f"),
        fact("hyperbolic_direction", json!([1, 0, 0, 0]), Basis::Claimed, "f is hyperbolic with respect to e_0"),
        fact("boundary_point", json!([0, 1, 0, 0]), Basis::Claimed, "p = e_1 lies on the boundary"),
        fact("hessian_rank_at_e1", json!(4), Basis::Claimed, "has rank 4"),
        fact("complex_witness", json!({"a": ["0", "0", "1", "i"], "grad": ["1/4", "0", "0", "0"]}), Basis::Claimed, "f(a) = 0 and grad f_a = e_0/4"),
    ];
    Ok(GalleryEntry { name: "hyperb_quartic", body, defining_polys: vec![f], facts })
}

pub fn lorentz_poly() -> Polynomial {
    p("x0^2 - x1^2 - x2^2", 3)
}

pub fn lorentz() -> Result<GalleryEntry> {
    let f = lorentz_poly();
    let body = Body::new(BodySpec {
        name: Some("lorentz".into()),
        rep: Rep::Hyperbolic { p: f.clone(), e: vec![1.0, 0.0, 0.0] },
        interior_point: None,
        components: None,
    })?;
    let facts = vec![fact("boundary_face_dim", json!(1), Basis::Computed, "every boundary ray is extreme")];
    Ok(GalleryEntry { name: "lorentz", body, defining_polys: vec![f], facts })
}

/// Named polynomials accepted wherever a polynomial is expected.
pub fn poly_alias(name: &str) -> Option<Polynomial> {
    match name {
        "lorentz" => Some(lorentz_poly()),
        "cayley" => Some(cayley_cone()),
        "cayley_affine" => Some(cayley()),
        "hyperb_quartic" => Some(quartic_printed()),
        _ => None,
    }
}
