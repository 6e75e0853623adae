use serde::{Deserialize, Serialize};

use crate::numerics::fd;

/// Result of representing L over W as the graph of a vector field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub is_graph: bool,
    /// Discrete C^{k0} norm of the graphing field (infinite when not a graph).
    pub c: f64,
    pub k0: usize,
    /// True when no sample of L fell inside the region.
    pub empty: bool,
    pub reason: Option<String>,
}

impl GraphReport {
    fn fail(k0: usize, reason: String) -> Self {
        Self {
            is_graph: false,
            c: f64::INFINITY,
            k0,
            empty: false,
            reason: Some(reason),
        }
    }
}

/// Affine line in C = R^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: [f64; 2],
    /// Unit direction.
    pub direction: [f64; 2],
}

impl Line {
    pub fn through_origin(angle: f64) -> Self {
        Self {
            point: [0.0, 0.0],
            direction: [angle.cos(), angle.sin()],
        }
    }

    fn coords(&self, p: [f64; 2]) -> (f64, f64) {
        let dx = p[0] - self.point[0];
        let dy = p[1] - self.point[1];
        let [ux, uy] = self.direction;
        (dx * ux + dy * uy, -dx * uy + dy * ux)
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        self.coords(p).1.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { center: [f64; 2], radius: f64 },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

impl Region {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::Ball { center, radius } => dist(p, center) < radius,
            Region::Annulus { center, inner, outer } => {
                let d = dist(p, center);
                d > inner && d < outer
            }
        }
    }

    pub fn outer_radius(&self) -> f64 {
        match *self {
            Region::Ball { radius, .. } => radius,
            Region::Annulus { outer, .. } => outer,
        }
    }

    /// Parameter intervals of `line` inside the region.
    fn line_pieces(&self, line: &Line) -> Vec<(f64, f64)> {
        let (c, outer, inner) = match *self {
            Region::Ball { center, radius } => (center, radius, None),
            Region::Annulus { center, inner, outer } => (center, outer, Some(inner)),
        };
        let (sc, vc) = line.coords(c);
        let chord = |r: f64| -> Option<f64> {
            let h2 = r * r - vc * vc;
            (h2 > 0.0).then(|| h2.sqrt())
        };
        let Some(ho) = chord(outer) else {
            return vec![];
        };
        match inner.and_then(chord) {
            Some(hi) => vec![(sc - ho, sc - hi), (sc + hi, sc + ho)],
            None => vec![(sc - ho, sc + ho)],
        }
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Represent the curve components inside `region` as normal graphs over
/// the nearest reference line and measure the discrete C^{k0} norm.
pub fn c_graph_fit(components: &[&[[f64; 2]]], lines: &[Line], region: &Region, k0: usize) -> GraphReport {
    assert!(!lines.is_empty(), "need at least one reference line");
    // runs: (line index, s samples, v samples, typical spacing)
    let mut runs: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut any_inside = false;
    for comp in components {
        let mut current: Option<(usize, Vec<f64>, Vec<f64>)> = None;
        for &p in comp.iter() {
            if !region.contains(p) {
                if let Some(r) = current.take() {
                    runs.push(r);
                }
                continue;
            }
            any_inside = true;
            let (j, _) = lines
                .iter()
                .enumerate()
                .map(|(j, l)| (j, l.distance(p)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("lines non-empty");
            let (s, v) = lines[j].coords(p);
            match current.as_mut() {
                Some((cj, ss, vs)) if *cj == j => {
                    ss.push(s);
                    vs.push(v);
                }
                _ => {
                    if let Some(r) = current.take() {
                        runs.push(r);
                    }
                    current = Some((j, vec![s], vec![v]));
                }
            }
        }
        if let Some(r) = current.take() {
            runs.push(r);
        }
    }
    if !any_inside {
        return GraphReport {
            is_graph: false,
            c: f64::INFINITY,
            k0,
            empty: true,
            reason: Some("no samples inside the region".into()),
        };
    }

    // each run must project injectively onto its line
    for (j, s, _) in &runs {
        if s.len() < 2 {
            continue;
        }
        let sign = (s[1] - s[0]).signum();
        if sign == 0.0 || s.windows(2).any(|w| (w[1] - w[0]).signum() != sign) {
            return GraphReport::fail(k0, format!("projection onto line {j} folds back"));
        }
    }
    // distinct runs over the same line must not overlap
    for j in 0..lines.len() {
        let mut iv: Vec<(f64, f64)> = runs
            .iter()
            .filter(|r| r.0 == j && r.1.len() >= 2)
            .map(|r| {
                let a = r.1.first().copied().unwrap();
                let b = r.1.last().copied().unwrap();
                (a.min(b), a.max(b))
            })
            .collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in iv.windows(2) {
            if w[1].0 < w[0].1 {
                return GraphReport::fail(k0, format!("two sheets project onto line {j}"));
            }
        }
        // every piece of the line inside the region needs a sheet over it
        for (a, b) in region.line_pieces(&lines[j]) {
            let covered = iv.iter().any(|&(lo, hi)| lo < b && hi > a);
            if !covered {
                return GraphReport::fail(k0, format!("line {j} uncovered on [{a:.3}, {b:.3}]"));
            }
        }
    }

    let mut c: f64 = 0.0;
    for (_, s, v) in &runs {
        let (mut s, mut v) = (s.clone(), v.clone());
        if s.len() >= 2 && s[1] < s[0] {
            s.reverse();
            v.reverse();
        }
        c = c.max(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        let mut d = v;
        for _ in 0..k0 {
            if s.len() < 3 {
                break;
            }
            d = fd::derivative(&s, &d);
            c = c.max(d.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        }
    }
    GraphReport {
        is_graph: true,
        c,
        k0,
        empty: false,
        reason: None,
    }
}
