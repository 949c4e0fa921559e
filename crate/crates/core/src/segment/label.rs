//! Two-pass connected-component labeling with union-find equivalence merging.

use crate::raster::{BinaryImage, Connectivity};

/// Component labels for every pixel; 0 is background, components are `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    n_components: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn n_components(&self) -> u32 {
        self.n_components
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    /// Pixel count per component, indexed by `label - 1`.
    pub fn areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.n_components as usize];
        for &l in &self.labels {
            if l != 0 {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // Slot 0 is background and never merged.
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Keeps the smaller root so provisional order is preserved.
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Labels foreground components. Component ids follow the raster-scan order of
/// each component's first pixel, so the output is fully determined by the input.
pub fn label_components(img: &BinaryImage, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (img.width(), img.height());
    let mut labels = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    // Already-visited neighbors in raster order.
    let back: &[(isize, isize)] = match connectivity {
        Connectivity::Four => &[(0, -1), (-1, 0)],
        Connectivity::Eight => &[(0, -1), (-1, -1), (-1, 0), (-1, 1)],
    };

    for row in 0..h {
        for col in 0..w {
            if !img.get(row, col) {
                continue;
            }
            let mut current = 0u32;
            for &(dr, dc) in back {
                let (r, c) = (row as isize + dr, col as isize + dc);
                if r < 0 || c < 0 || c as usize >= w {
                    continue;
                }
                let l = labels[r as usize * w + c as usize];
                if l == 0 {
                    continue;
                }
                if current == 0 {
                    current = l;
                } else {
                    uf.union(current, l);
                }
            }
            if current == 0 {
                current = uf.make();
            }
            labels[row * w + col] = current;
        }
    }

    // Provisional labels are created in raster order and roots are the minimum
    // of their class, so numbering roots by first appearance gives raster order.
    let mut remap = vec![0u32; uf.parent.len()];
    let mut next = 0u32;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = uf.find(*l) as usize;
        if remap[root] == 0 {
            next += 1;
            remap[root] = next;
        }
        *l = remap[root];
    }

    LabelMap {
        width: w,
        height: h,
        labels,
        n_components: next,
    }
}
