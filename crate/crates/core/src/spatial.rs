//! Three-dimensional k-d tree for nearest-neighbor and k-NN queries over
//! point clouds. Built once, queried many times; queries never allocate
//! beyond their result buffers.

use nalgebra::Vector3;

#[derive(Debug, Clone)]
struct Node {
    /// Index into the point array.
    point: u32,
    /// Split axis (0..3); leaves use the axis of their parent split.
    axis: u8,
    left: i32,
    right: i32,
}

const NIL: i32 = -1;

/// Static k-d tree over 3D points. Node order is deterministic for a given
/// input (median split with index tie-breaking).
#[derive(Debug, Clone)]
pub struct KdTree {
    points: Vec<Vector3<f64>>,
    nodes: Vec<Node>,
    root: i32,
}

impl KdTree {
    pub fn build(points: &[Vector3<f64>]) -> Self {
        let mut indices: Vec<u32> = (0..points.len() as u32).collect();
        let mut tree = KdTree {
            points: points.to_vec(),
            nodes: Vec::with_capacity(points.len()),
            root: NIL,
        };
        tree.root = tree.build_recursive(&mut indices, 0);
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, idx: usize) -> &Vector3<f64> {
        &self.points[idx]
    }

    fn build_recursive(&mut self, indices: &mut [u32], depth: usize) -> i32 {
        if indices.is_empty() {
            return NIL;
        }
        let axis = (depth % 3) as u8;
        let mid = indices.len() / 2;
        indices.select_nth_unstable_by(mid, |&a, &b| {
            let pa = self.points[a as usize][axis as usize];
            let pb = self.points[b as usize][axis as usize];
            pa.partial_cmp(&pb).unwrap().then(a.cmp(&b))
        });
        let point = indices[mid];
        let (left_slice, rest) = indices.split_at_mut(mid);
        let right_slice = &mut rest[1..];
        let left = self.build_recursive(left_slice, depth + 1);
        let right = self.build_recursive(right_slice, depth + 1);
        self.nodes.push(Node {
            point,
            axis,
            left,
            right,
        });
        (self.nodes.len() - 1) as i32
    }

    /// Nearest neighbor: `(point index, squared distance)`.
    pub fn nearest(&self, query: &Vector3<f64>) -> Option<(usize, f64)> {
        if self.root == NIL {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_recursive(self.root, query, &mut best);
        (best.0 != usize::MAX).then_some(best)
    }

    fn nearest_recursive(&self, node_idx: i32, query: &Vector3<f64>, best: &mut (usize, f64)) {
        let node = &self.nodes[node_idx as usize];
        let p = &self.points[node.point as usize];
        let d2 = (p - query).norm_squared();
        if d2 < best.1 {
            *best = (node.point as usize, d2);
        }
        let delta = query[node.axis as usize] - p[node.axis as usize];
        let (near, far) = if delta < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if near != NIL {
            self.nearest_recursive(near, query, best);
        }
        if far != NIL && delta * delta < best.1 {
            self.nearest_recursive(far, query, best);
        }
    }

    /// K nearest neighbors sorted by ascending distance:
    /// `(point index, squared distance)` pairs.
    pub fn knn(&self, query: &Vector3<f64>, k: usize) -> Vec<(usize, f64)> {
        if self.root == NIL || k == 0 {
            return Vec::new();
        }
        let mut heap: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.knn_recursive(self.root, query, k, &mut heap);
        heap.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        heap.into_iter().map(|(d2, i)| (i, d2)).collect()
    }

    fn knn_recursive(
        &self,
        node_idx: i32,
        query: &Vector3<f64>,
        k: usize,
        heap: &mut Vec<(f64, usize)>,
    ) {
        let node = &self.nodes[node_idx as usize];
        let p = &self.points[node.point as usize];
        let d2 = (p - query).norm_squared();
        let worst = heap.iter().map(|(d, _)| *d).fold(f64::NEG_INFINITY, f64::max);
        if heap.len() < k {
            heap.push((d2, node.point as usize));
        } else if d2 < worst {
            let worst_pos = heap
                .iter()
                .enumerate()
                .max_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            heap[worst_pos] = (d2, node.point as usize);
        }
        let delta = query[node.axis as usize] - p[node.axis as usize];
        let (near, far) = if delta < 0.0 {
            (node.left, node.right)
        } else {
            (node.right, node.left)
        };
        if near != NIL {
            self.knn_recursive(near, query, k, heap);
        }
        let worst = heap.iter().map(|(d, _)| *d).fold(f64::NEG_INFINITY, f64::max);
        if far != NIL && (heap.len() < k || delta * delta < worst) {
            self.knn_recursive(far, query, k, heap);
        }
    }
}
