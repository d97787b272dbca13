//! Toric-code and surface-code geometry.
//!
//! Every lattice lives in a doubled coordinate frame `(x, y)`: vertices sit at
//! (even, even), faces at (odd, odd) and qubits on edges where `x + y` is odd.
//! Stars (`A_s`, Z-type) are attached to vertices and plaquettes (`B_p`,
//! X-type) to faces. A second "grid" frame rotates the edges onto a square
//! array of qubits, which is how the device layout and the entropy blocks are
//! described.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2;
use crate::pauli::{Pauli, PauliString};

pub type Coord = (i32, i32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// All four boundaries of the same (smooth) type: unique ground state.
    Matching,
    /// Alternating boundary types: the rotated surface code with one logical qubit.
    Mixed,
}

/// Geometry of a planar toric-code patch.
///
/// Qubit indices follow a canonical row-major order: over `edge_coords` for
/// [`Boundary::Matching`] and over `grid_coords` for [`Boundary::Mixed`].
/// For `Mixed` lattices `plaquette_rows == plaquette_cols == d`, the code distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub plaquette_rows: usize,
    pub plaquette_cols: usize,
    pub boundary: Boundary,
    pub qubit_count: usize,
    pub edge_coords: Vec<Coord>,
    pub grid_coords: Vec<Coord>,
    pub stars: Vec<Vec<usize>>,
    pub star_centers: Vec<Coord>,
    pub plaquettes: Vec<Vec<usize>>,
    pub plaquette_centers: Vec<Coord>,
    pub representative: Vec<usize>,
    pub logical_z_support: Vec<usize>,
    pub logical_x_support: Vec<usize>,
    #[serde(skip)]
    index: HashMap<Coord, usize>,
}

pub fn build_lattice(rows: usize, cols: usize, boundary: Boundary) -> Result<LatticeSpec> {
    if rows < 1 || cols < 1 {
        return Err(Error::InvalidLattice(format!(
            "rows and cols must be >= 1 (got {rows}x{cols})"
        )));
    }
    match boundary {
        Boundary::Matching => Ok(build_matching(rows, cols)),
        Boundary::Mixed => build_mixed(rows, cols),
    }
}

/// Distance-`d` surface code, shorthand for `build_lattice(d, d, Mixed)`.
pub fn surface_code(d: usize) -> Result<LatticeSpec> {
    build_lattice(d, d, Boundary::Mixed)
}

fn build_matching(r: usize, c: usize) -> LatticeSpec {
    let (ri, ci) = (r as i32, c as i32);
    let mut coords = Vec::new();
    for x in 0..=2 * ri {
        for y in 0..=2 * ci {
            if (x + y) % 2 == 1 {
                coords.push((x, y));
            }
        }
    }
    let grid: Vec<Coord> = coords
        .iter()
        .map(|&(x, y)| ((x + y - 1) / 2, (y - x - 1) / 2 + ri))
        .collect();
    let index: HashMap<Coord, usize> = coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let around = |(x, y): Coord| -> Vec<usize> {
        let mut v: Vec<usize> = [(x - 1, y), (x, y - 1), (x, y + 1), (x + 1, y)]
            .iter()
            .filter_map(|p| index.get(p).copied())
            .collect();
        v.sort_unstable();
        v
    };

    let mut plaquettes = Vec::new();
    let mut plaquette_centers = Vec::new();
    let mut representative = Vec::new();
    for i in 0..ri {
        for j in 0..ci {
            let f = (2 * i + 1, 2 * j + 1);
            plaquettes.push(around(f));
            plaquette_centers.push(f);
            representative.push(index[&(2 * i, 2 * j + 1)]);
        }
    }
    // Every vertex carries a star; their product is the identity, so the
    // bottom-right corner star is dropped to keep the generators independent.
    let mut stars = Vec::new();
    let mut star_centers = Vec::new();
    for i in 0..=ri {
        for j in 0..=ci {
            if i == ri && j == ci {
                continue;
            }
            let v = (2 * i, 2 * j);
            stars.push(around(v));
            star_centers.push(v);
        }
    }
    LatticeSpec {
        plaquette_rows: r,
        plaquette_cols: c,
        boundary: Boundary::Matching,
        qubit_count: coords.len(),
        edge_coords: coords,
        grid_coords: grid,
        stars,
        star_centers,
        plaquettes,
        plaquette_centers,
        representative,
        logical_z_support: Vec::new(),
        logical_x_support: Vec::new(),
        index,
    }
}

/// One weight-4 or weight-2 stabilizer of the rotated code, in grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tile {
    /// Square with top-left corner at (r, c).
    Square(i32, i32),
    /// Horizontal pair (r, c), (r, c + 1).
    HPair(i32, i32),
    /// Vertical pair (r, c), (r + 1, c).
    VPair(i32, i32),
}

impl Tile {
    pub(crate) fn cells(self) -> Vec<Coord> {
        match self {
            Tile::Square(r, c) => vec![(r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)],
            Tile::HPair(r, c) => vec![(r, c), (r, c + 1)],
            Tile::VPair(r, c) => vec![(r, c), (r + 1, c)],
        }
    }

    /// Vertex or face in the doubled frame. A boundary pair is completed to a
    /// square by two cells just outside the patch.
    pub(crate) fn center(self, d: i32) -> Coord {
        let (r, c) = match self {
            Tile::Square(r, c) => (r, c),
            Tile::HPair(r, c) => (if r == 0 { -1 } else { r }, c),
            Tile::VPair(r, c) => (r, if c == 0 { -1 } else { c }),
        };
        (r + c + 1, c - r + d)
    }
}

/// X-type tiles of the distance-`d` rotated code, ordered by (row, col).
pub(crate) fn mixed_plaquette_tiles(d: i32) -> Vec<Tile> {
    let mut t = Vec::new();
    for c in (1..d - 1).step_by(2) {
        t.push(Tile::HPair(0, c));
    }
    for r in 0..d - 1 {
        for c in 0..d - 1 {
            if (r + c) % 2 == 0 {
                t.push(Tile::Square(r, c));
            }
        }
    }
    for c in (0..d - 1).step_by(2) {
        t.push(Tile::HPair(d - 1, c));
    }
    t
}

/// Z-type tiles of the distance-`d` rotated code, ordered by (row, col).
pub(crate) fn mixed_star_tiles(d: i32) -> Vec<Tile> {
    let mut t = Vec::new();
    for r in 0..d - 1 {
        if r % 2 == 0 {
            t.push(Tile::VPair(r, 0));
        }
        for c in 0..d - 1 {
            if (r + c) % 2 == 1 {
                t.push(Tile::Square(r, c));
            }
        }
        if r % 2 == 1 {
            t.push(Tile::VPair(r, d - 1));
        }
    }
    t
}

/// Representative of an X-type tile: the top cell in the column farther from the
/// centre column (the centre column itself is never used).
pub(crate) fn mixed_tile_rep(tile: Tile, d: i32) -> Coord {
    let ctr = d / 2;
    match tile {
        Tile::Square(r, c) | Tile::HPair(r, c) => {
            let outer = if c < ctr { c } else { c + 1 };
            (r, outer)
        }
        Tile::VPair(..) => unreachable!("vertical pairs are Z-type"),
    }
}

fn build_mixed(rows: usize, cols: usize) -> Result<LatticeSpec> {
    if rows != cols || rows < 3 || rows % 2 == 0 {
        return Err(Error::InvalidLattice(format!(
            "mixed-boundary lattices must be square with odd distance >= 3 (got {rows}x{cols})"
        )));
    }
    let d = rows as i32;
    let grid: Vec<Coord> = (0..d).flat_map(|r| (0..d).map(move |c| (r, c))).collect();
    let coords: Vec<Coord> = grid.iter().map(|&(r, c)| (r + c, c - r + d)).collect();
    let gidx = |(r, c): Coord| (r * d + c) as usize;
    let mut plaquettes = Vec::new();
    let mut plaquette_centers = Vec::new();
    let mut representative = Vec::new();
    for tile in mixed_plaquette_tiles(d) {
        let cells = tile.cells();
        let mut q: Vec<usize> = cells.iter().map(|&p| gidx(p)).collect();
        q.sort_unstable();
        plaquettes.push(q);
        plaquette_centers.push(tile.center(d));
        representative.push(gidx(mixed_tile_rep(tile, d)));
    }
    let mut stars = Vec::new();
    let mut star_centers = Vec::new();
    for tile in mixed_star_tiles(d) {
        let cells = tile.cells();
        let mut q: Vec<usize> = cells.iter().map(|&p| gidx(p)).collect();
        q.sort_unstable();
        stars.push(q);
        star_centers.push(tile.center(d));
    }
    let ctr = d / 2;
    let logical_z_support = (0..d).map(|c| gidx((ctr, c))).collect();
    let logical_x_support = (0..d).map(|r| gidx((r, ctr))).collect();
    let index = coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    Ok(LatticeSpec {
        plaquette_rows: rows,
        plaquette_cols: cols,
        boundary: Boundary::Mixed,
        qubit_count: (d * d) as usize,
        edge_coords: coords,
        grid_coords: grid,
        stars,
        star_centers,
        plaquettes,
        plaquette_centers,
        representative,
        logical_z_support,
        logical_x_support,
        index,
    })
}

impl LatticeSpec {
    /// Code distance of a mixed-boundary lattice.
    pub fn distance(&self) -> Option<usize> {
        (self.boundary == Boundary::Mixed).then_some(self.plaquette_rows)
    }

    pub fn qubit_at(&self, c: Coord) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn qubit_at_grid(&self, g: Coord) -> Option<usize> {
        self.grid_coords.iter().position(|&p| p == g)
    }

    pub fn star_at(&self, v: Coord) -> Option<usize> {
        self.star_centers.iter().position(|&p| p == v)
    }

    pub fn plaquette_at(&self, f: Coord) -> Option<usize> {
        self.plaquette_centers.iter().position(|&p| p == f)
    }

    pub fn star_operator(&self, i: usize) -> PauliString {
        PauliString::uniform(self.stars[i].iter().copied(), Pauli::Z)
    }

    pub fn plaquette_operator(&self, i: usize) -> PauliString {
        PauliString::uniform(self.plaquettes[i].iter().copied(), Pauli::X)
    }

    /// All stabilizer generators: stars first, then plaquettes.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.stars.len())
            .map(|i| self.star_operator(i))
            .chain((0..self.plaquettes.len()).map(|i| self.plaquette_operator(i)))
            .collect()
    }

    pub fn logical_z(&self) -> PauliString {
        PauliString::uniform(self.logical_z_support.iter().copied(), Pauli::Z)
    }

    pub fn logical_x(&self) -> PauliString {
        PauliString::uniform(self.logical_x_support.iter().copied(), Pauli::X)
    }

    /// Toric-code energy `-Σ A_s - Σ B_p` given an expectation oracle.
    pub fn energy<F: FnMut(&PauliString) -> f64>(&self, mut expect: F) -> f64 {
        -self.stabilizers().iter().map(&mut expect).sum::<f64>()
    }

    /// The two vertex endpoints of an edge qubit.
    pub fn endpoints(&self, q: usize) -> [Coord; 2] {
        let (x, y) = self.edge_coords[q];
        if x % 2 == 0 {
            [(x, y - 1), (x, y + 1)]
        } else {
            [(x - 1, y), (x + 1, y)]
        }
    }

    /// The two face positions adjacent to an edge qubit (may lie outside the patch).
    pub fn faces(&self, q: usize) -> [Coord; 2] {
        let (x, y) = self.edge_coords[q];
        if x % 2 == 0 {
            [(x - 1, y), (x + 1, y)]
        } else {
            [(x, y - 1), (x, y + 1)]
        }
    }

    /// Rank of the stabilizer generators as binary symplectic vectors.
    pub fn stabilizer_rank(&self) -> usize {
        let n = self.qubit_count;
        let rows = self
            .stabilizers()
            .iter()
            .map(|p| {
                let mut row = vec![0u64; gf2::words(2 * n)];
                for (&q, &pl) in p.factors() {
                    let (x, z) = pl.bits();
                    gf2::set(&mut row, q, x);
                    gf2::set(&mut row, n + q, z);
                }
                row
            })
            .collect();
        gf2::rank(rows, 2 * n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lattice serializes")
    }
}

/// Analytic second Rényi entropy (in units of ln 2) of a region of the
/// matching-boundary ground state.
///
/// For a region `A` the value is `k + 1 - c(A) - c(Ā)`, where `k` counts the
/// vertices touched by edges on both sides of the cut and `c(·)` is the number
/// of connected components of the edges on that side (edges sharing a vertex).
/// For a connected region with connected complement this is `k - 1`.
#[allow(clippy::needless_range_loop)]
pub fn expected_entropy(lattice: &LatticeSpec, subsystem: &[usize]) -> Result<i64> {
    if subsystem.is_empty() {
        return Err(Error::EmptySubsystem);
    }
    if lattice.boundary != Boundary::Matching {
        return Err(Error::UnsupportedBoundary {
            op: "expected_entropy",
            detail: "only matching boundaries have a unique ground state".into(),
        });
    }
    let n = lattice.qubit_count;
    let mut in_a = vec![false; n];
    for &q in subsystem {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
        in_a[q] = true;
    }
    let mut touch: HashMap<Coord, (bool, bool)> = HashMap::new();
    for q in 0..n {
        for v in lattice.endpoints(q) {
            let e = touch.entry(v).or_default();
            if in_a[q] {
                e.0 = true;
            } else {
                e.1 = true;
            }
        }
    }
    let k = touch.values().filter(|(a, b)| *a && *b).count() as i64;
    let comps = |side: bool| -> i64 {
        let edges: Vec<usize> = (0..n).filter(|&q| in_a[q] == side).collect();
        components(lattice, &edges) as i64
    };
    Ok(k + 1 - comps(true) - comps(false))
}

fn components(lattice: &LatticeSpec, edges: &[usize]) -> usize {
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut by_vertex: HashMap<Coord, usize> = HashMap::new();
    for (i, &q) in edges.iter().enumerate() {
        for v in lattice.endpoints(q) {
            if let Some(&j) = by_vertex.get(&v) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            } else {
                by_vertex.insert(v, i);
            }
        }
    }
    (0..edges.len()).filter(|&i| find(&mut parent, i) == i).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockShape {
    #[serde(rename = "2x2")]
    S2x2,
    #[serde(rename = "2x3")]
    S2x3,
    #[serde(rename = "3x3")]
    S3x3,
}

impl std::str::FromStr for BlockShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2x2" => Ok(BlockShape::S2x2),
            "2x3" => Ok(BlockShape::S2x3),
            "3x3" => Ok(BlockShape::S3x3),
            other => Err(Error::UnsupportedShape(other.to_string())),
        }
    }
}

impl std::fmt::Display for BlockShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlockShape::S2x2 => "2x2",
            BlockShape::S2x3 => "2x3",
            BlockShape::S3x3 => "3x3",
        })
    }
}

/// Three disjoint regions tiling a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemPartition {
    pub region_a: Vec<usize>,
    pub region_b: Vec<usize>,
    pub region_c: Vec<usize>,
    pub orientation_id: usize,
}

impl SubsystemPartition {
    pub fn union(&self) -> Vec<usize> {
        let mut u: Vec<usize> = self
            .region_a
            .iter()
            .chain(&self.region_b)
            .chain(&self.region_c)
            .copied()
            .collect();
        u.sort_unstable();
        u
    }
}

/// A rectangular block of qubits in grid coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAnchor {
    /// Grid coordinate of the top-left cell.
    pub origin: Coord,
    pub height: usize,
    pub width: usize,
    /// Qubits in row-major block order.
    pub qubits: Vec<usize>,
}

type LocalShape = [Vec<Coord>; 3];

fn base_partition(h: usize, w: usize) -> LocalShape {
    match (h, w) {
        (2, 2) => [vec![(0, 0), (0, 1)], vec![(1, 0)], vec![(1, 1)]],
        (2, 3) => [vec![(0, 0), (0, 1)], vec![(0, 2), (1, 2)], vec![(1, 0), (1, 1)]],
        (3, 2) => [vec![(0, 0), (1, 0)], vec![(2, 0), (2, 1)], vec![(0, 1), (1, 1)]],
        (3, 3) => [
            vec![(0, 0), (0, 1), (0, 2)],
            vec![(1, 0), (1, 1), (2, 0)],
            vec![(1, 2), (2, 1), (2, 2)],
        ],
        _ => unreachable!(),
    }
}

/// Distinct (unlabelled) images of the base partition under the symmetries
/// of the h×w rectangle.
fn orientations(h: usize, w: usize) -> Vec<LocalShape> {
    let (hi, wi) = (h as i32, w as i32);
    let mut maps: Vec<Box<dyn Fn(Coord) -> Coord>> = vec![
        Box::new(|p| p),
        Box::new(move |(a, b)| (hi - 1 - a, wi - 1 - b)),
        Box::new(move |(a, b)| (a, wi - 1 - b)),
        Box::new(move |(a, b)| (hi - 1 - a, b)),
    ];
    if h == w {
        maps.push(Box::new(|(a, b)| (b, a)));
        maps.push(Box::new(move |(a, b)| (b, hi - 1 - a)));
        maps.push(Box::new(move |(a, b)| (wi - 1 - b, a)));
        maps.push(Box::new(move |(a, b)| (wi - 1 - b, hi - 1 - a)));
    }
    let base = base_partition(h, w);
    let mut seen: BTreeSet<Vec<Vec<Coord>>> = BTreeSet::new();
    let mut out = Vec::new();
    for m in &maps {
        let img: LocalShape = base.clone().map(|reg| {
            let mut r: Vec<Coord> = reg.into_iter().map(m).collect();
            r.sort_unstable();
            r
        });
        let mut key: Vec<Vec<Coord>> = img.to_vec();
        key.sort();
        if seen.insert(key) {
            out.push(img);
        }
    }
    out
}

/// Entropy blocks and their partition orientations on a matching lattice.
///
/// 2×2 blocks are the four-qubit star and plaquette cells (corner plaquettes
/// excluded); 2×3 blocks are all 2×3 and 3×2 grid rectangles that do not contain
/// a corner plaquette; 3×3 blocks are the grid squares centred on a
/// vertical-edge qubit.
pub fn enumerate_partitions(
    lattice: &LatticeSpec,
    shape: BlockShape,
) -> Result<Vec<(BlockAnchor, Vec<SubsystemPartition>)>> {
    if lattice.boundary != Boundary::Matching {
        return Err(Error::UnsupportedBoundary {
            op: "enumerate_partitions",
            detail: "partitions are defined for matching lattices".into(),
        });
    }
    let dims: &[(usize, usize)] = match shape {
        BlockShape::S2x2 => &[(2, 2)],
        BlockShape::S2x3 => &[(2, 3), (3, 2)],
        BlockShape::S3x3 => &[(3, 3)],
    };
    let grid: BTreeMap<Coord, usize> = lattice.grid_coords.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let (rr, cc) = (lattice.plaquette_rows as i32, lattice.plaquette_cols as i32);
    let corners: Vec<BTreeSet<usize>> = [(1, 1), (1, 2 * cc - 1), (2 * rr - 1, 1), (2 * rr - 1, 2 * cc - 1)]
        .iter()
        .filter_map(|&f| lattice.plaquette_at(f))
        .map(|p| lattice.plaquettes[p].iter().copied().collect())
        .collect();
    let (umax, wmax) = grid.keys().fold((0, 0), |(a, b), &(u, w)| (a.max(u), b.max(w)));

    let mut out = Vec::new();
    for &(h, w) in dims {
        let orients = orientations(h, w);
        for u0 in 0..=umax {
            for w0 in 0..=wmax {
                let cells: Option<Vec<usize>> = (0..h as i32)
                    .flat_map(|a| (0..w as i32).map(move |b| (u0 + a, w0 + b)))
                    .map(|g| grid.get(&g).copied())
                    .collect();
                let Some(qubits) = cells else { continue };
                let set: BTreeSet<usize> = qubits.iter().copied().collect();
                let keep = match shape {
                    BlockShape::S2x2 => !corners.contains(&set),
                    BlockShape::S2x3 => !corners.iter().any(|c| c.is_subset(&set)),
                    BlockShape::S3x3 => {
                        let centre = qubits[4];
                        lattice.edge_coords[centre].0 % 2 == 1
                    }
                };
                if !keep {
                    continue;
                }
                let parts = orients
                    .iter()
                    .enumerate()
                    .map(|(oid, regs)| {
                        let map = |reg: &Vec<Coord>| -> Vec<usize> {
                            let mut v: Vec<usize> =
                                reg.iter().map(|&(a, b)| qubits[a as usize * w + b as usize]).collect();
                            v.sort_unstable();
                            v
                        };
                        SubsystemPartition {
                            region_a: map(&regs[0]),
                            region_b: map(&regs[1]),
                            region_c: map(&regs[2]),
                            orientation_id: oid,
                        }
                    })
                    .collect();
                out.push((
                    BlockAnchor {
                        origin: (u0, w0),
                        height: h,
                        width: w,
                        qubits,
                    },
                    parts,
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_sizes() {
        let l = build_lattice(2, 2, Boundary::Matching).unwrap();
        assert_eq!((l.qubit_count, l.plaquettes.len()), (12, 4));
        let l = build_lattice(3, 4, Boundary::Matching).unwrap();
        assert_eq!((l.qubit_count, l.plaquettes.len()), (31, 12));
        assert_eq!(l.stars.len() + l.plaquettes.len(), 31);
        assert_eq!(l.stabilizer_rank(), 31);
    }

    #[test]
    fn mixed_sizes() {
        let l = surface_code(3).unwrap();
        assert_eq!((l.qubit_count, l.plaquettes.len(), l.stars.len()), (9, 4, 4));
        let l = surface_code(5).unwrap();
        assert_eq!((l.qubit_count, l.plaquettes.len(), l.stars.len()), (25, 12, 12));
        assert_eq!(l.stabilizer_rank(), 24);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_lattice(0, 2, Boundary::Matching).is_err());
        assert!(build_lattice(3, 5, Boundary::Mixed).is_err());
        assert!(build_lattice(4, 4, Boundary::Mixed).is_err());
    }

    #[test]
    fn mixed_stabilizer_centres_are_on_the_frame() {
        let l = surface_code(5).unwrap();
        for &(x, y) in &l.star_centers {
            assert_eq!((x.rem_euclid(2), y.rem_euclid(2)), (0, 0));
        }
        for &(x, y) in &l.plaquette_centers {
            assert_eq!((x.rem_euclid(2), y.rem_euclid(2)), (1, 1));
        }
        for (i, s) in l.stars.iter().enumerate() {
            for &q in s {
                assert!(l.endpoints(q).contains(&l.star_centers[i]));
            }
        }
        for (i, p) in l.plaquettes.iter().enumerate() {
            for &q in p {
                assert!(l.faces(q).contains(&l.plaquette_centers[i]));
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let l = build_lattice(3, 4, Boundary::Matching).unwrap();
        let corner = l.plaquette_at((1, 1)).unwrap();
        assert_eq!(expected_entropy(&l, &l.plaquettes[corner]).unwrap(), 2);
        let bulk = l.plaquette_at((3, 3)).unwrap();
        assert_eq!(expected_entropy(&l, &l.plaquettes[bulk]).unwrap(), 3);
        let all: Vec<usize> = (0..31).collect();
        assert_eq!(expected_entropy(&l, &all).unwrap(), 0);
        assert_eq!(expected_entropy(&l, &[0]).unwrap(), 1);
        assert!(expected_entropy(&l, &[]).is_err());
    }

    #[test]
    fn partition_counts() {
        let l = build_lattice(3, 4, Boundary::Matching).unwrap();
        for (shape, blocks, orient) in [
            (BlockShape::S2x2, 14, 4),
            (BlockShape::S2x3, 20, 2),
            (BlockShape::S3x3, 3, 8),
        ] {
            let parts = enumerate_partitions(&l, shape).unwrap();
            assert_eq!(parts.len(), blocks, "{shape}");
            for (anchor, ps) in &parts {
                assert_eq!(ps.len(), orient, "{shape}");
                for p in ps {
                    let mut u = anchor.qubits.clone();
                    u.sort_unstable();
                    assert_eq!(p.union(), u);
                }
            }
        }
    }

    #[test]
    fn json_has_coordinates() {
        let l = build_lattice(2, 2, Boundary::Matching).unwrap();
        let v: serde_json::Value = serde_json::from_str(&l.to_json()).unwrap();
        assert_eq!(v["qubit_count"], 12);
        assert_eq!(v["edge_coords"].as_array().unwrap().len(), 12);
    }
}
