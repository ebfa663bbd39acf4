use crate::error::{Error, Result};
use crate::geometry::{Aabb, BROADPHASE_PAD};

#[derive(Debug, Clone)]
enum Node {
    Leaf { aabb: Aabb, item: u32 },
    Inner { aabb: Aabb, left: u32, right: u32 },
}

impl Node {
    fn aabb(&self) -> &Aabb {
        match self {
            Node::Leaf { aabb, .. } | Node::Inner { aabb, .. } => aabb,
        }
    }
}

/// Static bounding-volume hierarchy over boxed items, one item per leaf.
///
/// Built top-down by splitting at the median centroid along the longest axis
/// of the centroid bounds. Leaf boxes are padded by [`BROADPHASE_PAD`].
#[derive(Debug, Clone)]
pub struct AabbTree<T> {
    nodes: Vec<Node>,
    payload: Vec<T>,
}

impl<T: Copy> AabbTree<T> {
    pub fn build(items: Vec<(Aabb, T)>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyTree);
        }
        let boxes: Vec<Aabb> = items.iter().map(|(b, _)| b.padded(BROADPHASE_PAD)).collect();
        let centroids: Vec<_> = boxes.iter().map(Aabb::center).collect();
        let mut order: Vec<u32> = (0..items.len() as u32).collect();
        let mut tree = Self {
            nodes: Vec::with_capacity(2 * items.len()),
            payload: items.into_iter().map(|(_, t)| t).collect(),
        };
        tree.build_range(&boxes, &centroids, &mut order);
        Ok(tree)
    }

    fn build_range(&mut self, boxes: &[Aabb], centroids: &[crate::geometry::Vec3], order: &mut [u32]) -> u32 {
        let id = self.nodes.len() as u32;
        if let [item] = order {
            self.nodes.push(Node::Leaf {
                aabb: boxes[*item as usize],
                item: *item,
            });
            return id;
        }
        let cb = Aabb::from_points(order.iter().map(|&i| &centroids[i as usize]));
        let ext = cb.extent();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        order.sort_unstable_by(|&a, &b| {
            centroids[a as usize][axis]
                .total_cmp(&centroids[b as usize][axis])
                .then(a.cmp(&b))
        });
        // Placeholder, patched once both children exist.
        self.nodes.push(Node::Leaf {
            aabb: Aabb::EMPTY,
            item: 0,
        });
        let mid = order.len() / 2;
        let (lo, hi) = order.split_at_mut(mid);
        let left = self.build_range(boxes, centroids, lo);
        let right = self.build_range(boxes, centroids, hi);
        let aabb = self.nodes[left as usize].aabb().union(self.nodes[right as usize].aabb());
        self.nodes[id as usize] = Node::Inner { aabb, left, right };
        id
    }

    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }

    pub fn root_aabb(&self) -> &Aabb {
        self.nodes[0].aabb()
    }

    /// Calls `f` with the payload of every leaf whose box overlaps `q`.
    pub fn for_each_overlap(&self, q: &Aabb, mut f: impl FnMut(T)) {
        let mut stack = vec![0u32];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            if !node.aabb().overlaps(q) {
                continue;
            }
            match node {
                Node::Leaf { item, .. } => f(self.payload[*item as usize]),
                Node::Inner { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
    }

    pub fn query(&self, q: &Aabb) -> Vec<T> {
        let mut out = Vec::new();
        self.for_each_overlap(q, |t| out.push(t));
        out
    }

    /// Checks that every inner box contains its children's boxes.
    pub fn is_well_formed(&self) -> bool {
        self.nodes.iter().all(|n| match n {
            Node::Leaf { .. } => true,
            Node::Inner { aabb, left, right } => {
                aabb.contains(self.nodes[*left as usize].aabb()) && aabb.contains(self.nodes[*right as usize].aabb())
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_box(rng: &mut ChaCha8Rng, span: f64, size: f64) -> Aabb {
        let c = Vec3::new(rng.gen_range(-span..span), rng.gen_range(-span..span), rng.gen_range(-span..span));
        let h = Vec3::new(rng.gen_range(0.0..size), rng.gen_range(0.0..size), rng.gen_range(0.0..size));
        Aabb::new(c - h, c + h)
    }

    #[test]
    fn empty_and_single() {
        assert!(matches!(AabbTree::<u32>::build(vec![]), Err(Error::EmptyTree)));
        let b = Aabb::new(Vec3::ZERO, Vec3::splat(1.0));
        let t = AabbTree::build(vec![(b, 7u32)]).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.query(&b), vec![7]);
        assert!(t.query(&Aabb::new(Vec3::splat(5.0), Vec3::splat(6.0))).is_empty());
    }

    #[test]
    fn matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(1..400);
            let items: Vec<(Aabb, u32)> = (0..n).map(|i| (random_box(&mut rng, 10.0, 2.0), i)).collect();
            let tree = AabbTree::build(items.clone()).unwrap();
            assert!(tree.is_well_formed());
            let mut shuffled = items.clone();
            shuffled.shuffle(&mut rng);
            let tree2 = AabbTree::build(shuffled).unwrap();
            let all = tree.query(&Aabb::new(Vec3::splat(-100.0), Vec3::splat(100.0)));
            assert_eq!(all.len(), n as usize);
            for _ in 0..50 {
                let q = random_box(&mut rng, 12.0, 4.0);
                let mut expect: Vec<u32> = items
                    .iter()
                    .filter(|(b, _)| b.padded(BROADPHASE_PAD).overlaps(&q))
                    .map(|(_, i)| *i)
                    .collect();
                expect.sort_unstable();
                for t in [&tree, &tree2] {
                    let mut got = t.query(&q);
                    got.sort_unstable();
                    assert_eq!(got, expect);
                }
            }
            for (b, i) in &items {
                assert!(tree.query(b).contains(i));
            }
        }
    }
}
