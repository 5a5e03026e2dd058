use std::collections::HashMap;

use crate::geometry::Point4;

/// Uniform hash grid for near-coincidence queries at a fixed radius.
#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    buckets: HashMap<[i64; 4], Vec<usize>>,
    points: Vec<Point4>,
}

impl PointIndex {
    /// `cell` must exceed every query radius.
    pub fn new(cell: f64) -> Self {
        PointIndex { cell, buckets: HashMap::new(), points: Vec::new() }
    }

    fn key(&self, p: &Point4) -> [i64; 4] {
        [0, 1, 2, 3].map(|k| (p[k] / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, p: Point4) -> usize {
        let id = self.points.len();
        self.buckets.entry(self.key(&p)).or_default().push(id);
        self.points.push(p);
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest stored point within `radius`, as `(id, distance)`.
    pub fn nearest_within(&self, p: &Point4, radius: f64) -> Option<(usize, f64)> {
        debug_assert!(radius < self.cell);
        let k = self.key(p);
        let mut best: Option<(usize, f64)> = None;
        for off in 0..81usize {
            let d = [off % 3, off / 3 % 3, off / 9 % 3, off / 27].map(|v| v as i64 - 1);
            let key = [k[0] + d[0], k[1] + d[1], k[2] + d[2], k[3] + d[3]];
            if let Some(ids) = self.buckets.get(&key) {
                for &id in ids {
                    let dd = (self.points[id] - p).norm();
                    if dd <= radius && best.is_none_or(|(_, b)| dd < b) {
                        best = Some((id, dd));
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_across_cell_faces() {
        let mut idx = PointIndex::new(1e-6);
        let a = Point4::new(1e-6 - 1e-12, 0.0, 0.0, 0.0);
        idx.insert(a);
        let q = Point4::new(1e-6 + 1e-12, 0.0, 0.0, 0.0);
        assert_eq!(idx.nearest_within(&q, 1e-9).map(|h| h.0), Some(0));
        assert!(idx.nearest_within(&Point4::new(1.0, 0.0, 0.0, 0.0), 1e-9).is_none());
    }
}
