//! Planar linear classifiers `1(b_0 + b_1 x_1 + b_2 x_2 > 0)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linear2d {
    pub bias: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Linear2d {
    pub fn new(bias: f64, w1: f64, w2: f64) -> Self {
        Self { bias, w1, w2 }
    }

    fn score(&self, x: [f64; 2]) -> f64 {
        self.bias + self.w1 * x[0] + self.w2 * x[1]
    }

    pub fn evaluate(&self, x: [f64; 2]) -> bool {
        self.score(x) > 0.0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledSample2d {
    pub points: Vec<([f64; 2], bool)>,
}

impl LabeledSample2d {
    pub fn new(points: Vec<([f64; 2], bool)>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn empirical_risk_2d(h: &Linear2d, sample: &LabeledSample2d) -> Result<super::EmpiricalRisk> {
    if sample.is_empty() {
        return Err(Error::Argument("empirical risk of an empty sample".into()));
    }
    Ok(super::EmpiricalRisk {
        errors: count_errors(h, &sample.points),
        n: sample.len(),
    })
}

fn count_errors(h: &Linear2d, points: &[([f64; 2], bool)]) -> usize {
    points.iter().filter(|&&(x, y)| h.evaluate(x) != y).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear2dFit {
    pub hypothesis: Linear2d,
    pub errors: usize,
}

/// Exact empirical risk minimiser, `O(n^3)`.
///
/// Any halfspace labelling of a finite set is reproduced by a line through
/// two sample points, nudged so that the points on it are split by a
/// threshold along the line. Every pair, orientation and split is tried,
/// after the two constant classifiers.
pub fn erm_linear2d(sample: &LabeledSample2d) -> Result<Linear2dFit> {
    if sample.is_empty() {
        return Err(Error::Argument("ERM on an empty sample".into()));
    }
    if let Some((x, _)) = sample
        .points
        .iter()
        .find(|(x, _)| !(x[0].is_finite() && x[1].is_finite()))
    {
        return Err(Error::Argument(format!("non-finite sample point {x:?}")));
    }
    let pts = &sample.points;
    let mut best = {
        let zero = Linear2d::new(-1.0, 0.0, 0.0);
        let one = Linear2d::new(1.0, 0.0, 0.0);
        let (ez, eo) = (count_errors(&zero, pts), count_errors(&one, pts));
        if eo < ez {
            Linear2dFit {
                hypothesis: one,
                errors: eo,
            }
        } else {
            Linear2dFit {
                hypothesis: zero,
                errors: ez,
            }
        }
    };

    let mut on_line: Vec<(f64, bool)> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (p, q) = (pts[i].0, pts[j].0);
            let d = [q[0] - p[0], q[1] - p[1]];
            if d == [0.0, 0.0] {
                continue;
            }
            for orient in [1.0, -1.0] {
                let normal = [-d[1] * orient, d[0] * orient];
                let side = |x: [f64; 2]| normal[0] * (x[0] - p[0]) + normal[1] * (x[1] - p[1]);
                let along = |x: [f64; 2]| d[0] * (x[0] - p[0]) + d[1] * (x[1] - p[1]);
                on_line.clear();
                let mut min_off = f64::INFINITY;
                for &(x, y) in pts {
                    let s = side(x);
                    if s == 0.0 {
                        on_line.push((along(x), y));
                    } else {
                        min_off = min_off.min(s.abs());
                    }
                }
                let split = best_split(&mut on_line);
                let t_span = on_line
                    .iter()
                    .map(|&(t, _)| (t - split.tau).abs())
                    .fold(0.0, f64::max);
                let eps = if min_off.is_finite() {
                    0.25 * min_off / (t_span + 1.0)
                } else {
                    1.0
                };
                // score(x) = side(x) + eps * (sigma * (along(x) - tau) or +-1).
                let (a, c) = match split.sigma {
                    Some(sigma) => (eps * sigma, -eps * sigma * split.tau),
                    None => (0.0, if split.positive { eps } else { -eps }),
                };
                let w1 = normal[0] + a * d[0];
                let w2 = normal[1] + a * d[1];
                let bias =
                    -normal[0] * p[0] - normal[1] * p[1] - a * (d[0] * p[0] + d[1] * p[1]) + c;
                let h = Linear2d::new(bias, w1, w2);
                let errors = count_errors(&h, pts);
                if errors < best.errors {
                    best = Linear2dFit {
                        hypothesis: h,
                        errors,
                    };
                }
            }
        }
    }
    Ok(best)
}

struct Split {
    /// `Some(+1)`: positive above `tau`; `Some(-1)`: positive below it.
    sigma: Option<f64>,
    tau: f64,
    /// Constant label when `sigma` is `None`.
    positive: bool,
}

/// Best threshold labelling of collinear points given by their position `t`.
fn best_split(points: &mut [(f64, bool)]) -> Split {
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let ones = points.iter().filter(|p| p.1).count();
    let zeros = points.len() - ones;
    let mut best = if ones >= zeros {
        (
            zeros,
            Split {
                sigma: None,
                tau: 0.0,
                positive: true,
            },
        )
    } else {
        (
            ones,
            Split {
                sigma: None,
                tau: 0.0,
                positive: false,
            },
        )
    };
    let (mut ones_left, mut zeros_left) = (0, 0);
    for i in 0..points.len() {
        if points[i].1 {
            ones_left += 1;
        } else {
            zeros_left += 1;
        }
        if i + 1 < points.len() && points[i + 1].0 > points[i].0 {
            let tau = 0.5 * (points[i].0 + points[i + 1].0);
            // Positive on the right: mistakes are left ones and right zeros.
            let up = ones_left + (zeros - zeros_left);
            let down = zeros_left + (ones - ones_left);
            if up < best.0 {
                best = (
                    up,
                    Split {
                        sigma: Some(1.0),
                        tau,
                        positive: true,
                    },
                );
            }
            if down < best.0 {
                best = (
                    down,
                    Split {
                        sigma: Some(-1.0),
                        tau,
                        positive: true,
                    },
                );
            }
        }
    }
    best.1
}
