use crate::error::{Error, Result};
use crate::geometry::{sat_corners, Aabb, Corners, Obb, Vec3};

/// Default per-cell capacity.
pub const DEFAULT_CELL_CAPACITY: usize = 1024;

/// Upper bound on the cell count while sizing.
const MAX_CELLS: usize = 1 << 22;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cell {
    /// Up to `capacity` component ids, ascending.
    pub ids: Vec<u32>,
    /// Ids beyond the capacity, ascending.
    pub overflow: Vec<u32>,
}

/// One-level uniform grid over component boxes.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    origin: Vec3,
    cell_size: Vec3,
    dims: [usize; 3],
    capacity: usize,
    cells: Vec<Cell>,
    components: usize,
}

fn axis_range(lo: f64, hi: f64, origin: f64, size: f64, dim: usize) -> Option<(usize, usize)> {
    let cell_min = |i: usize| origin + size * i as f64;
    let cell_max = |i: usize| origin + size * (i + 1) as f64;
    if hi < cell_min(0) || lo > cell_max(dim - 1) {
        return None;
    }
    let mut a = (((lo - origin) / size).floor().max(0.0) as usize).min(dim - 1);
    while a > 0 && cell_max(a - 1) >= lo {
        a -= 1;
    }
    while a + 1 < dim && cell_max(a) < lo {
        a += 1;
    }
    let mut b = (((hi - origin) / size).floor().max(0.0) as usize).min(dim - 1);
    while b + 1 < dim && cell_min(b + 1) <= hi {
        b += 1;
    }
    while b > a && cell_min(b) > hi {
        b -= 1;
    }
    Some((a, b))
}

impl SpatialGrid {
    /// Sizes and fills the grid. Cells start at a quarter of the region
    /// extent per axis; the longest cell axis is halved until the mean
    /// occupancy of nonempty cells is at most `capacity` or the next halving
    /// would make cells narrower than twice the widest component box.
    pub fn build(component_aabbs: &[Aabb], bounds: &Aabb, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidParameter("cell capacity must be at least 1".into()));
        }
        let region = component_aabbs.iter().fold(*bounds, |r, b| r.union(b));
        let widest = component_aabbs
            .iter()
            .fold(Vec3::ZERO, |w, b| w.max(b.extent()));
        let extent = region.extent().max(Vec3::splat(1e-9));
        let mut grid = Self {
            origin: region.min,
            cell_size: extent * 0.25,
            dims: [4; 3],
            capacity,
            cells: Vec::new(),
            components: component_aabbs.len(),
        };
        loop {
            grid.dims = std::array::from_fn(|k| ((extent[k] / grid.cell_size[k]).ceil() as usize).max(1));
            let (members, nonempty) = grid.occupancy(component_aabbs);
            if nonempty == 0 || members as f64 / nonempty as f64 <= capacity as f64 {
                break;
            }
            let axis = (0..3).max_by(|&a, &b| grid.cell_size[a].total_cmp(&grid.cell_size[b])).unwrap();
            let halved = grid.cell_size[axis] * 0.5;
            let next_cells = grid.cell_count() * 2;
            if halved < 2.0 * widest[axis] || next_cells > MAX_CELLS {
                break;
            }
            let mut size = grid.cell_size.to_array();
            size[axis] = halved;
            grid.cell_size = Vec3::from_array(size);
        }
        grid.fill(component_aabbs);
        Ok(grid)
    }

    fn cell_count(&self) -> usize {
        self.dims.iter().product()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    fn ranges(&self, b: &Aabb) -> Option<[(usize, usize); 3]> {
        let x = axis_range(b.min.x, b.max.x, self.origin.x, self.cell_size.x, self.dims[0])?;
        let y = axis_range(b.min.y, b.max.y, self.origin.y, self.cell_size.y, self.dims[1])?;
        let z = axis_range(b.min.z, b.max.z, self.origin.z, self.cell_size.z, self.dims[2])?;
        Some([x, y, z])
    }

    fn for_cells(&self, b: &Aabb, mut f: impl FnMut(usize, usize, usize)) {
        if let Some([x, y, z]) = self.ranges(b) {
            for k in z.0..=z.1 {
                for j in y.0..=y.1 {
                    for i in x.0..=x.1 {
                        f(i, j, k);
                    }
                }
            }
        }
    }

    fn occupancy(&self, aabbs: &[Aabb]) -> (usize, usize) {
        let mut counts = vec![0u32; self.cell_count()];
        let mut members = 0;
        for b in aabbs {
            self.for_cells(b, |i, j, k| {
                counts[self.index(i, j, k)] += 1;
                members += 1;
            });
        }
        (members, counts.iter().filter(|&&c| c > 0).count())
    }

    fn fill(&mut self, aabbs: &[Aabb]) {
        let mut cells = vec![Cell::default(); self.cell_count()];
        for (id, b) in aabbs.iter().enumerate() {
            self.for_cells(b, |i, j, k| {
                let cell = &mut cells[self.index(i, j, k)];
                if cell.ids.len() < self.capacity {
                    cell.ids.push(id as u32);
                } else {
                    cell.overflow.push(id as u32);
                }
            });
        }
        self.cells = cells;
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cell_size(&self) -> Vec3 {
        self.cell_size
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn cell(&self, i: usize, j: usize, k: usize) -> &Cell {
        &self.cells[self.index(i, j, k)]
    }

    pub fn cell_box(&self, i: usize, j: usize, k: usize) -> Aabb {
        let idx = [i, j, k];
        let lo: [f64; 3] = std::array::from_fn(|a| self.origin[a] + self.cell_size[a] * idx[a] as f64);
        let hi: [f64; 3] = std::array::from_fn(|a| self.origin[a] + self.cell_size[a] * (idx[a] + 1) as f64);
        Aabb::new(Vec3::from_array(lo), Vec3::from_array(hi))
    }

    /// Mean number of ids over nonempty cells.
    pub fn mean_occupancy(&self) -> f64 {
        let (sum, nonempty) = self
            .cells
            .iter()
            .map(|c| c.ids.len() + c.overflow.len())
            .filter(|&n| n > 0)
            .fold((0, 0), |(s, n), x| (s + x, n + 1));
        if nonempty == 0 {
            0.0
        } else {
            sum as f64 / nonempty as f64
        }
    }

    pub fn nonempty_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.ids.is_empty() || !c.overflow.is_empty()).count()
    }

    fn collect(&self, q: &Aabb, mut keep: impl FnMut(usize, usize, usize) -> bool) -> Vec<u32> {
        let mut seen = vec![0u64; self.components.div_ceil(64)];
        let mut out = Vec::new();
        self.for_cells(q, |i, j, k| {
            if !keep(i, j, k) {
                return;
            }
            let cell = &self.cells[self.index(i, j, k)];
            for &id in cell.ids.iter().chain(&cell.overflow) {
                let (w, bit) = (id as usize / 64, 1u64 << (id % 64));
                if seen[w] & bit == 0 {
                    seen[w] |= bit;
                    out.push(id);
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// Ids, ascending, in every cell whose box overlaps `q`.
    pub fn candidates(&self, q: &Aabb) -> Vec<u32> {
        self.collect(q, |_, _, _| true)
    }

    /// Like [`Self::candidates`] for the box with corners `obstacle`, but cells
    /// that pass the bounding-box test must also pass the separating axis
    /// test against the box itself.
    pub fn candidates_sat(&self, obstacle: &Corners) -> Vec<u32> {
        let q = crate::geometry::aabb_of_corners(obstacle);
        self.collect(&q, |i, j, k| {
            let cell = Obb::from_aabb(&self.cell_box(i, j, k)).corners();
            sat_corners(&cell, obstacle)
        })
    }
}
