//! SVG picture of a rank-2 momentum image with its critical values.

use std::fmt::Write;

use normsq_core::critical::CriticalComponent;
use normsq_core::exactlin::{rat_to_f64, Rat, RatVec};
use normsq_core::weights::ActionSpec;
use num_traits::{Signed, Zero};

const SIZE: f64 = 480.0;

type P2 = [f64; 2];

/// Distinct ray directions among the weights (positive multiples merged).
fn ray_directions(spec: &ActionSpec) -> Vec<RatVec> {
    let mut dirs: Vec<RatVec> = Vec::new();
    for w in spec.weight_vectors() {
        if w.is_zero() {
            continue;
        }
        let same = dirs
            .iter()
            .any(|d| cross(d, &w).is_zero() && d.dot(&w).is_positive());
        if !same {
            dirs.push(w);
        }
    }
    dirs
}

fn cross(a: &RatVec, b: &RatVec) -> Rat {
    let (a, b) = (a.entries(), b.entries());
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Inward normals of the facets of the cone spanned by the weights. No
/// facets means the cone is the whole plane (or there are no weights).
fn facet_normals(dirs: &[RatVec]) -> Vec<RatVec> {
    let mut normals: Vec<RatVec> = Vec::new();
    for d in dirs {
        let e = d.entries();
        for n in [
            RatVec::new(vec![-e[1].clone(), e[0].clone()]),
            RatVec::new(vec![e[1].clone(), -e[0].clone()]),
        ] {
            if dirs.iter().all(|w| !n.dot(w).is_negative()) && !normals.contains(&n) {
                normals.push(n);
            }
        }
    }
    normals
}

/// Sutherland–Hodgman clip of a convex polygon to `⟨n, x − base⟩ ≥ 0`.
fn clip(poly: &[P2], n: P2, base: P2) -> Vec<P2> {
    let side = |p: &P2| n[0] * (p[0] - base[0]) + n[1] * (p[1] - base[1]);
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sa, sb) = (side(&a), side(&b));
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

struct Viewport {
    min: P2,
    scale: f64,
    offset: P2,
}

impl Viewport {
    fn fit(points: &[P2]) -> (Viewport, [P2; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        for k in 0..2 {
            if hi[k] - lo[k] < 2.0 {
                let mid = 0.5 * (hi[k] + lo[k]);
                lo[k] = mid - 1.0;
                hi[k] = mid + 1.0;
            }
            let pad = 0.1 * (hi[k] - lo[k]);
            lo[k] -= pad;
            hi[k] += pad;
        }
        let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
        let scale = SIZE / w.max(h);
        let vp = Viewport {
            min: lo,
            scale,
            offset: [0.5 * (SIZE - w * scale), 0.5 * (SIZE - h * scale)],
        };
        (vp, [lo, hi])
    }

    /// Pixel coordinates, y pointing down.
    fn map(&self, p: P2) -> P2 {
        [
            (p[0] - self.min[0]) * self.scale + self.offset[0],
            SIZE - ((p[1] - self.min[1]) * self.scale + self.offset[1]),
        ]
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn to_p2(v: &RatVec) -> P2 {
    [rat_to_f64(&v.entries()[0]), rat_to_f64(&v.entries()[1])]
}

/// Distance from `from` along `dir` to the boundary of the box.
fn exit_time(from: P2, dir: P2, lo: P2, hi: P2) -> f64 {
    let mut t = f64::INFINITY;
    for k in 0..2 {
        if dir[k] > 0.0 {
            t = t.min((hi[k] - from[k]) / dir[k]);
        } else if dir[k] < 0.0 {
            t = t.min((lo[k] - from[k]) / dir[k]);
        }
    }
    t.max(0.0)
}

/// Renders the image `β + cone(W)`, the rays `β + cone(μ)`, and a dot at
/// each critical value. Only rank 2 is supported; the caller checks.
pub fn render_svg(spec: &ActionSpec, components: &[CriticalComponent]) -> String {
    assert_eq!(spec.rank(), 2, "plot needs rank 2");
    let beta = to_p2(spec.shift());
    let dirs = ray_directions(spec);
    let mut anchors = vec![beta];
    anchors.extend(components.iter().map(|c| to_p2(&c.value)));
    anchors.extend(dirs.iter().map(|d| {
        let d = to_p2(d);
        [beta[0] + d[0], beta[1] + d[1]]
    }));
    let (vp, [lo, hi]) = Viewport::fit(&anchors);

    let mut image: Vec<P2> = if dirs.is_empty() {
        vec![beta]
    } else {
        vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]]
    };
    if !dirs.is_empty() {
        for n in facet_normals(&dirs) {
            image = clip(&image, to_p2(&n), beta);
        }
    }

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE
    )
    .unwrap();
    writeln!(
        svg,
        r##"<rect width="100%" height="100%" fill="#ffffff"/>"##
    )
    .unwrap();
    let pts: Vec<String> = image
        .iter()
        .map(|&p| {
            let q = vp.map(p);
            format!("{},{}", num(q[0]), num(q[1]))
        })
        .collect();
    writeln!(
        svg,
        r##"<polygon id="momentum-image" points="{}" fill="#c8d7ea" stroke="#7f9cc0" stroke-width="1"/>"##,
        pts.join(" ")
    )
    .unwrap();
    for (i, d) in dirs.iter().enumerate() {
        let d = to_p2(d);
        let t = exit_time(beta, d, lo, hi);
        let a = vp.map(beta);
        let b = vp.map([beta[0] + t * d[0], beta[1] + t * d[1]]);
        writeln!(
            svg,
            r##"<line id="critical-ray-{i}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1f3b5c" stroke-width="1.5"/>"##,
            num(a[0]),
            num(a[1]),
            num(b[0]),
            num(b[1])
        )
        .unwrap();
    }
    for (i, c) in components.iter().enumerate() {
        let p = vp.map(to_p2(&c.value));
        writeln!(
            svg,
            r##"<circle id="critical-dot-{i}" cx="{}" cy="{}" r="5" fill="#b22222"><title>{}</title></circle>"##,
            num(p[0]),
            num(p[1]),
            c.value
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use normsq_core::critical::enumerate_critical_components;

    #[test]
    fn facets_of_example_cone() {
        let spec = ActionSpec::from_ints(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, -1], 1)], &[-3, 1]);
        let normals = facet_normals(&ray_directions(&spec));
        assert_eq!(
            normals,
            vec![RatVec::from_ints(&[1, 0]), RatVec::from_ints(&[1, 1])]
        );
    }

    #[test]
    fn clip_square_by_diagonal() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let half = clip(&square, [1.0, -1.0], [0.0, 0.0]);
        assert_eq!(half.len(), 3);
    }

    #[test]
    fn opposite_rays_and_plane() {
        let spec = ActionSpec::from_ints(
            2,
            &[(&[1, 0], 1), (&[-1, 0], 1), (&[0, 1], 1), (&[0, -1], 1)],
            &[0, 0],
        );
        assert!(facet_normals(&ray_directions(&spec)).is_empty());
        let comps = enumerate_critical_components(&spec, &RatVec::from_ints(&[0, 0])).unwrap();
        let svg = render_svg(&spec, &comps);
        assert_eq!(svg.matches("critical-ray-").count(), 4);
    }
}
