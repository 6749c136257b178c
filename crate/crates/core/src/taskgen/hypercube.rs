//! Axis-aligned labelled hypercubes on a shared coordinate grid.

use rand::seq::index::sample;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed::Rng;
use crate::subset::FeatureSet;

/// Per-axis bookkeeping of grid slots already claimed by some cube.
///
/// Slot `k` on an axis sits at `(k - (slots - 1) / 2) * sigma`, so the grid
/// is centred on 0 and any two slots are at least `sigma` apart.
#[derive(Clone, Debug)]
pub struct Occupancy {
    sigma: f64,
    used: Vec<Vec<bool>>,
}

impl Occupancy {
    pub fn new(n: usize, slots_per_axis: usize, sigma: f64) -> Self {
        Self { sigma, used: vec![vec![false; slots_per_axis]; n] }
    }

    pub fn dim(&self) -> usize {
        self.used.len()
    }

    pub fn slots_per_axis(&self) -> usize {
        self.used.first().map_or(0, Vec::len)
    }

    pub fn slot_value(&self, slot: usize) -> f64 {
        (slot as f64 - (self.slots_per_axis() as f64 - 1.0) / 2.0) * self.sigma
    }

    pub fn free_slots(&self, axis: usize) -> Vec<usize> {
        self.used[axis].iter().enumerate().filter(|(_, &u)| !u).map(|(k, _)| k).collect()
    }

    pub fn is_used(&self, axis: usize, slot: usize) -> bool {
        self.used[axis][slot]
    }

    fn set(&mut self, cube: &Hypercube, value: bool) {
        for (axis, slots) in cube.slots.iter().enumerate() {
            for &s in slots {
                debug_assert!(self.used[axis][s] != value);
                self.used[axis][s] = value;
            }
        }
    }

    /// Returns the cube's slots to the free pool.
    pub fn release(&mut self, cube: &Hypercube) {
        self.set(cube, false);
    }
}

/// A hypercube spanning `axes`, with every other coordinate pinned.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypercube {
    pub axes: FeatureSet,
    /// `[low, high]` coordinate for each axis of `axes`, ascending axis order.
    pub anchor_coords: Vec<[f64; 2]>,
    /// Coordinate on every axis outside `axes` (entries on cube axes hold the low anchor).
    pub fixed_coords: Vec<f64>,
    /// Flips which colour class carries label 1.
    pub parity: bool,
    slots: Vec<Vec<usize>>,
}

/// A cube vertex. Bit `k` of `corner` selects the high anchor on the
/// `k`-th cube axis.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeVertex {
    pub corner: u32,
    pub coords: Vec<f64>,
    pub label: u8,
}

/// A vertex that survived erosion, with the axes along which a neighbour
/// also survived.
#[derive(Clone, Debug, PartialEq)]
pub struct ErodedVertex {
    pub vertex: CubeVertex,
    pub neighbor_axes: FeatureSet,
}

impl ErodedVertex {
    pub fn is_isolated(&self) -> bool {
        self.neighbor_axes.is_empty()
    }
}

impl Hypercube {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis_list(&self) -> Vec<usize> {
        self.axes.iter().collect()
    }

    /// Two-colouring of the cube graph: adjacent corners get opposite labels.
    pub fn label(&self, corner: u32) -> u8 {
        ((corner.count_ones() & 1) as u8) ^ u8::from(self.parity)
    }

    pub fn vertex(&self, corner: u32) -> CubeVertex {
        let mut coords = self.fixed_coords.clone();
        for (k, axis) in self.axes.iter().enumerate() {
            coords[axis] = self.anchor_coords[k][usize::from(corner >> k & 1 == 1)];
        }
        CubeVertex { corner, coords, label: self.label(corner) }
    }

    pub fn vertices(&self) -> Vec<CubeVertex> {
        (0..1u32 << self.dim()).map(|c| self.vertex(c)).collect()
    }

    /// Global axis index of local cube axis `k`.
    pub fn axis(&self, k: usize) -> usize {
        self.axes.iter().nth(k).expect("local axis in range")
    }
}

/// Places a cube spanning `axes` on free grid slots and registers them.
///
/// Each cube axis receives two distinct free slots, every other axis one.
/// No slot is shared with a previously registered cube, so vertices of
/// different cubes differ on every coordinate.
pub fn build_hypercube(
    n: usize,
    axes: FeatureSet,
    occupancy: &mut Occupancy,
    rng: &mut Rng,
) -> Result<(Hypercube, Vec<CubeVertex>)> {
    assert_eq!(axes.dim(), n);
    assert_eq!(occupancy.dim(), n);
    assert!(!axes.is_empty(), "a hypercube needs at least one axis");
    let mut slots = Vec::with_capacity(n);
    for axis in 0..n {
        let need = if axes.contains(axis) { 2 } else { 1 };
        let free = occupancy.free_slots(axis);
        if free.len() < need {
            return Err(Error::Capacity { axis: axis + 1 });
        }
        let mut chosen: Vec<usize> = sample(rng, free.len(), need).into_iter().map(|i| free[i]).collect();
        chosen.sort_unstable();
        slots.push(chosen);
    }
    let fixed_coords: Vec<f64> = slots.iter().map(|s| occupancy.slot_value(s[0])).collect();
    let anchor_coords = axes
        .iter()
        .map(|a| [occupancy.slot_value(slots[a][0]), occupancy.slot_value(slots[a][1])])
        .collect();
    let cube = Hypercube { axes, anchor_coords, fixed_coords, parity: rng.random(), slots };
    occupancy.set(&cube, true);
    let vertices = cube.vertices();
    Ok((cube, vertices))
}

/// Deletes each vertex independently with probability `erosion_prob` and
/// recomputes, for every survivor, the axes along which a neighbour survived.
pub fn erode(
    cube: &Hypercube,
    vertices: &[CubeVertex],
    erosion_prob: f64,
    rng: &mut Rng,
) -> Vec<ErodedVertex> {
    assert!((0.0..1.0).contains(&erosion_prob), "erosion probability must lie in [0, 1)");
    let d = cube.dim();
    let mut alive = vec![false; 1 << d];
    let mut kept = Vec::new();
    for v in vertices {
        if rng.random::<f64>() >= erosion_prob {
            alive[v.corner as usize] = true;
            kept.push(v.clone());
        }
    }
    let n = cube.axes.dim();
    kept.into_iter()
        .map(|vertex| {
            let mut neighbor_axes = FeatureSet::empty(n);
            for k in 0..d {
                if alive[(vertex.corner ^ (1 << k)) as usize] {
                    neighbor_axes = neighbor_axes.with(cube.axis(k));
                }
            }
            ErodedVertex { vertex, neighbor_axes }
        })
        .collect()
}

/// Uniformly random subset of `[n]` with `size` elements.
pub(crate) fn random_axes(n: usize, size: usize, rng: &mut Rng) -> FeatureSet {
    FeatureSet::from_indices(n, sample(rng, n, size)).expect("sampled indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn square_is_xor() {
        let mut rng = rng_from_seed(7);
        let mut occ = Occupancy::new(2, 4, 0.25);
        let (cube, verts) = build_hypercube(2, FeatureSet::full(2), &mut occ, &mut rng).unwrap();
        assert_eq!(verts.len(), 4);
        let grid = [-0.375, -0.125, 0.125, 0.375];
        for [lo, hi] in &cube.anchor_coords {
            assert!(grid.contains(lo) && grid.contains(hi) && lo < hi);
        }
        for a in &verts {
            for b in &verts {
                if (a.corner ^ b.corner).count_ones() == 1 {
                    assert_ne!(a.label, b.label);
                }
                if (a.corner ^ b.corner).count_ones() == 2 {
                    assert_eq!(a.label, b.label);
                }
            }
        }
    }

    #[test]
    fn segment_has_opposite_labels() {
        let mut rng = rng_from_seed(1);
        let mut occ = Occupancy::new(3, 6, 0.25);
        let axes = FeatureSet::from_indices(3, [1]).unwrap();
        let (cube, verts) = build_hypercube(3, axes, &mut occ, &mut rng).unwrap();
        assert_eq!(verts.len(), 2);
        assert_ne!(verts[0].label, verts[1].label);
        assert_eq!(verts[0].coords[0], verts[1].coords[0]);
        assert_eq!(verts[0].coords[2], verts[1].coords[2]);
        assert!(verts[0].coords[1] < verts[1].coords[1]);
        assert_eq!(cube.dim(), 1);
    }

    #[test]
    fn occupancy_is_exclusive_and_exhaustible() {
        let mut rng = rng_from_seed(3);
        let mut occ = Occupancy::new(2, 4, 0.25);
        let (a, _) = build_hypercube(2, FeatureSet::full(2), &mut occ, &mut rng).unwrap();
        let (_b, _) = build_hypercube(2, FeatureSet::full(2), &mut occ, &mut rng).unwrap();
        assert!(occ.free_slots(0).is_empty());
        let err = build_hypercube(2, FeatureSet::from_indices(2, [0]).unwrap(), &mut occ, &mut rng);
        assert!(matches!(err, Err(Error::Capacity { .. })));
        occ.release(&a);
        assert_eq!(occ.free_slots(0).len(), 2);
    }

    #[test]
    fn every_vertex_has_dim_flipped_neighbours() {
        let mut rng = rng_from_seed(11);
        let mut occ = Occupancy::new(5, 10, 0.5);
        let axes = FeatureSet::from_indices(5, [0, 2, 3]).unwrap();
        let (cube, verts) = build_hypercube(5, axes, &mut occ, &mut rng).unwrap();
        for v in &verts {
            let neighbours: Vec<_> = verts
                .iter()
                .filter(|w| {
                    v.coords.iter().zip(&w.coords).filter(|(a, b)| a != b).count() == 1
                })
                .collect();
            assert_eq!(neighbours.len(), cube.dim());
            assert!(neighbours.iter().all(|w| w.label != v.label));
        }
    }

    #[test]
    fn no_erosion_keeps_full_neighbourhoods() {
        let mut rng = rng_from_seed(5);
        let mut occ = Occupancy::new(4, 8, 0.25);
        let axes = FeatureSet::from_indices(4, [1, 3]).unwrap();
        let (cube, verts) = build_hypercube(4, axes, &mut occ, &mut rng).unwrap();
        let eroded = erode(&cube, &verts, 0.0, &mut rng);
        assert_eq!(eroded.len(), 4);
        assert!(eroded.iter().all(|e| e.neighbor_axes == axes));
    }
}
