//! Static k-d tree used for nearest-representative queries.

/// Nearest-neighbour lookup among a fixed set of points, excluding the query
/// point itself. Implementations must break distance ties by the smaller tie
/// key so that results are deterministic.
pub trait SpatialIndex {
    /// Returns the index and squared euclidean distance of the point closest
    /// to point `query`, or `None` when the index holds a single point.
    fn nearest_other(&self, query: usize) -> Option<(usize, f64)>;
}

/// Balanced k-d tree stored implicitly: the node of a slice `order[lo..hi]`
/// is its midpoint, with the left and right halves as children.
pub struct KdTree<'a> {
    points: &'a [f64],
    dim: usize,
    tie_keys: &'a [usize],
    order: Vec<usize>,
    axes: Vec<usize>,
}

impl<'a> KdTree<'a> {
    /// `points` is a row-major `m x dim` buffer; `tie_keys[i]` orders points
    /// at equal distance.
    pub fn build(points: &'a [f64], dim: usize, tie_keys: &'a [usize]) -> Self {
        assert!(dim > 0, "points need at least one coordinate");
        let m = points.len() / dim;
        assert_eq!(tie_keys.len(), m);
        let mut tree = KdTree {
            points,
            dim,
            tie_keys,
            order: (0..m).collect(),
            axes: vec![0; m],
        };
        tree.split(0, m);
        tree
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    fn coord(&self, p: usize, axis: usize) -> f64 {
        self.points[p * self.dim + axis]
    }

    #[inline]
    fn point(&self, p: usize) -> &[f64] {
        &self.points[p * self.dim..(p + 1) * self.dim]
    }

    fn split(&mut self, lo: usize, hi: usize) {
        if hi - lo <= 1 {
            return;
        }
        let axis = self.widest_axis(lo, hi);
        let mid = (lo + hi) / 2;
        let points = self.points;
        let dim = self.dim;
        self.order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            points[a * dim + axis].total_cmp(&points[b * dim + axis])
        });
        self.axes[mid] = axis;
        self.split(lo, mid);
        self.split(mid + 1, hi);
    }

    fn widest_axis(&self, lo: usize, hi: usize) -> usize {
        let mut best = (0, f64::NEG_INFINITY);
        for axis in 0..self.dim {
            let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
            for &p in &self.order[lo..hi] {
                let c = self.coord(p, axis);
                min = min.min(c);
                max = max.max(c);
            }
            if max - min > best.1 {
                best = (axis, max - min);
            }
        }
        best.0
    }

    fn search(&self, query: usize, lo: usize, hi: usize, best: &mut Option<(f64, usize, usize)>) {
        if lo >= hi {
            return;
        }
        let mid = (lo + hi) / 2;
        let p = self.order[mid];
        if p != query {
            let d2 = squared_euclidean(self.point(query), self.point(p));
            let key = self.tie_keys[p];
            let better = match *best {
                None => true,
                Some((bd, bk, _)) => d2 < bd || (d2 == bd && key < bk),
            };
            if better {
                *best = Some((d2, key, p));
            }
        }
        let axis = self.axes[mid];
        let diff = self.coord(query, axis) - self.coord(p, axis);
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(query, near.0, near.1, best);
        let bound = best.map_or(f64::INFINITY, |b| b.0);
        if diff * diff <= bound {
            self.search(query, far.0, far.1, best);
        }
    }
}

impl SpatialIndex for KdTree<'_> {
    fn nearest_other(&self, query: usize) -> Option<(usize, f64)> {
        let mut best = None;
        self.search(query, 0, self.order.len(), &mut best);
        best.map(|(d2, _, p)| (p, d2))
    }
}

/// Sum of squared coordinate differences, accumulated in coordinate order.
#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        acc += t * t;
    }
    acc
}
