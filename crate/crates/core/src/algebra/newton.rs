//! Newton polygons: the lower convex hull of coefficient valuations. Segment
//! slopes are exact rationals; the horizontal length of the slope-a segment
//! is the multiplicity d(·, a) of eigenvalues of slope a.

use alloc::vec::Vec;

use super::rational::Rational;
use super::trunc::TruncVal;
use super::AlgebraError;

/// Lower convex hull of a finite set of integer points, as segments of
/// strictly increasing slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    segments: Vec<(Rational, usize)>,
    /// Index of the first finite-valuation coefficient.
    start_index: usize,
    /// Index of the last finite-valuation coefficient.
    end_index: usize,
    /// Hull vertices, left to right.
    vertices: Vec<(usize, u64)>,
}

impl NewtonPolygon {
    pub fn segments(&self) -> &[(Rational, usize)] {
        &self.segments
    }

    pub fn vertices(&self) -> &[(usize, u64)] {
        &self.vertices
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    pub fn end_index(&self) -> usize {
        self.end_index
    }

    /// Total horizontal length (= end − start).
    pub fn total_length(&self) -> usize {
        self.segments.iter().map(|&(_, l)| l).sum()
    }

    /// Horizontal length of the slope-a segment; 0 when absent.
    pub fn multiplicity(&self, a: Rational) -> usize {
        self.segments
            .iter()
            .find(|&&(s, _)| s == a)
            .map(|&(_, l)| l)
            .unwrap_or(0)
    }

    /// All slopes, repeated with multiplicity.
    pub fn slopes_with_multiplicity(&self) -> Vec<(Rational, usize)> {
        self.segments.clone()
    }
}

/// Hull of the given (index, valuation) points (indices strictly increasing).
pub fn newton_polygon_from_points(points: &[(usize, u64)]) -> NewtonPolygon {
    assert!(!points.is_empty(), "no finite points");
    let mut hull: Vec<(usize, u64)> = Vec::new();
    for &(x, y) in points {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Keep (x2, y2) only if it lies strictly below the segment
            // (x1,y1)→(x,y): cross product test.
            let lhs = (y2 as i128 - y1 as i128) * (x as i128 - x1 as i128);
            let rhs = (y as i128 - y1 as i128) * (x2 as i128 - x1 as i128);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let mut segments = Vec::new();
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        let slope = Rational::new(y2 as i64 - y1 as i64, (x2 - x1) as i64);
        segments.push((slope, x2 - x1));
    }
    NewtonPolygon {
        segments,
        start_index: points[0].0,
        end_index: points[points.len() - 1].0,
        vertices: hull,
    }
}

/// Certified prefix of a Newton polygon from truncated valuations.
///
/// `points[l]` is the (possibly saturated) valuation of coefficient l of a
/// reciprocal characteristic polynomial (so point 0 must be exactly 0). All
/// saturated flags must sit strictly above slope·max_index for every slope
/// below `bound`; then the returned segments with slope < bound agree with
/// those of the exact polygon. Errors with `PrecisionExhausted` when the
/// working precision cannot certify the prefix.
pub fn newton_prefix_below(
    points: &[TruncVal],
    bound: Rational,
) -> Result<Vec<(Rational, usize)>, AlgebraError> {
    if points.is_empty() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if points[0] != TruncVal::Exact(0) {
        return Err(AlgebraError::Invalid(
            "reciprocal charpoly must have unit constant term".into(),
        ));
    }
    let max_index = (points.len() - 1) as i64;
    let mut finite = Vec::new();
    for (l, v) in points.iter().enumerate() {
        match v {
            TruncVal::Exact(v) => finite.push((l, *v as u64)),
            TruncVal::AtLeast(c) => {
                // Need c > bound · max_index so the omitted point lies above
                // every admissible prefix line.
                if (*c as i64) * bound.den() <= bound.num() * max_index {
                    return Err(AlgebraError::PrecisionExhausted);
                }
            }
        }
    }
    let np = newton_polygon_from_points(&finite);
    Ok(np
        .segments
        .into_iter()
        .take_while(|&(s, _)| s < bound)
        .collect())
}
