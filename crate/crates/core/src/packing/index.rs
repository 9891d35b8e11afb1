use std::collections::HashMap;

use super::Packing;

/// Uniform grid over axis bounding boxes. Two axes whose boxes, grown by
/// `margin`, overlap share at least one cell; axes closer than `2 * margin`
/// are therefore always reported as a candidate pair.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    cell: f64,
    cells: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl SpatialIndex {
    pub fn build(p: &Packing, margin: f64) -> SpatialIndex {
        let cell = 2.0 + p.t.max(0.0) / 4.0;
        let mut cells: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (idx, c) in p.cylinders.iter().enumerate() {
            let (lo, hi) = cell_range(c.axis.p0.to_array(), c.axis.p1.to_array(), margin, cell);
            for i in lo[0]..=hi[0] {
                for j in lo[1]..=hi[1] {
                    for k in lo[2]..=hi[2] {
                        cells.entry((i, j, k)).or_default().push(idx);
                    }
                }
            }
        }
        SpatialIndex { cell, cells }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Sorted, deduplicated pairs `(i, j)` with `i < j` sharing a cell.
    pub fn candidate_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for members in self.cells.values() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    pairs.push((i.min(j), i.max(j)));
                }
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

fn cell_range(a: [f64; 3], b: [f64; 3], margin: f64, cell: f64) -> ([i64; 3], [i64; 3]) {
    let mut lo = [0i64; 3];
    let mut hi = [0i64; 3];
    for d in 0..3 {
        lo[d] = ((a[d].min(b[d]) - margin) / cell).floor() as i64;
        hi[d] = ((a[d].max(b[d]) + margin) / cell).floor() as i64;
    }
    (lo, hi)
}
