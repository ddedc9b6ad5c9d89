use std::collections::VecDeque;

use super::gate::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub row: usize,
    pub col: usize,
}

impl Site {
    pub fn manhattan(self, other: Site) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

/// Placement of qubits on a `rows × cols` nearest-neighbour grid. Sites
/// without a qubit are not routed through.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeLayout {
    rows: usize,
    cols: usize,
    sites: Vec<Site>,
    occupant: Vec<Option<usize>>,
}

impl LatticeLayout {
    /// Row-major fill of a `rows × cols` grid.
    pub fn new(rows: usize, cols: usize, n_qubits: usize) -> Result<Self> {
        let sites = (0..n_qubits)
            .map(|q| Site {
                row: q / cols.max(1),
                col: q % cols.max(1),
            })
            .collect();
        Self::with_placement(rows, cols, sites)
    }

    /// Near-square grid: `cols = ⌈√n⌉`, `rows = ⌈n / cols⌉`, filled row-major.
    pub fn for_qubits(n_qubits: usize) -> Self {
        let cols = (n_qubits as f64).sqrt().ceil().max(1.0) as usize;
        let rows = n_qubits.div_ceil(cols).max(1);
        Self::new(rows, cols, n_qubits).expect("grid large enough by construction")
    }

    pub fn with_placement(rows: usize, cols: usize, sites: Vec<Site>) -> Result<Self> {
        if rows * cols < sites.len() {
            return Err(Error::LayoutTooSmall {
                sites: rows * cols,
                n_qubits: sites.len(),
            });
        }
        let mut occupant = vec![None; rows * cols];
        for (q, s) in sites.iter().enumerate() {
            if s.row >= rows || s.col >= cols {
                return Err(Error::invalid("layout", format!("qubit {q} placed off-grid at {s:?}")));
            }
            let slot = &mut occupant[s.row * cols + s.col];
            if slot.is_some() {
                return Err(Error::invalid("layout", format!("site {s:?} used twice")));
            }
            *slot = Some(q);
        }
        Ok(Self {
            rows,
            cols,
            sites,
            occupant,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn site_of(&self, qubit: usize) -> Site {
        self.sites[qubit]
    }

    pub fn qubit_at(&self, site: Site) -> Option<usize> {
        if site.row < self.rows && site.col < self.cols {
            self.occupant[site.row * self.cols + site.col]
        } else {
            None
        }
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.sites[a].manhattan(self.sites[b])
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.distance(a, b) == 1
    }

    /// Nearest-neighbour qubit pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n_qubits() {
            for b in a + 1..self.n_qubits() {
                if self.adjacent(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Edges split into four groups of pairwise disjoint edges: horizontal
    /// from even / odd columns, vertical from even / odd rows.
    pub fn edge_colors(&self) -> [Vec<(usize, usize)>; 4] {
        let mut groups: [Vec<(usize, usize)>; 4] = Default::default();
        for (a, b) in self.edges() {
            let (sa, sb) = (self.sites[a], self.sites[b]);
            let color = if sa.row == sb.row {
                sa.col.min(sb.col) % 2
            } else {
                2 + sa.row.min(sb.row) % 2
            };
            groups[color].push((a, b));
        }
        groups
    }

    fn neighbours(&self, s: Site) -> impl Iterator<Item = Site> + '_ {
        let (r, c) = (s.row as isize, s.col as isize);
        [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .into_iter()
            .filter(|&(r, c)| r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols)
            .map(|(r, c)| Site {
                row: r as usize,
                col: c as usize,
            })
    }

    /// Shortest path of sites from `from` to `to`, both included, through
    /// occupied sites only. Tries row-first, then column-first, then BFS.
    fn path(&self, from: Site, to: Site) -> Vec<Site> {
        let l_path = |rows_first: bool| {
            let mut path = vec![from];
            let mut cur = from;
            let step = |a: usize, b: usize| if a < b { a + 1 } else { a - 1 };
            for phase in 0..2 {
                let vertical = (phase == 0) == rows_first;
                if vertical {
                    while cur.row != to.row {
                        cur.row = step(cur.row, to.row);
                        path.push(cur);
                    }
                } else {
                    while cur.col != to.col {
                        cur.col = step(cur.col, to.col);
                        path.push(cur);
                    }
                }
            }
            path
        };
        let clear = |p: &[Site]| p[1..p.len() - 1].iter().all(|&s| self.qubit_at(s).is_some());
        for rows_first in [true, false] {
            let p = l_path(rows_first);
            if clear(&p) {
                return p;
            }
        }
        self.bfs_path(from, to)
    }

    fn bfs_path(&self, from: Site, to: Site) -> Vec<Site> {
        let idx = |s: Site| s.row * self.cols + s.col;
        let mut prev: Vec<Option<Site>> = vec![None; self.rows * self.cols];
        let mut seen = vec![false; self.rows * self.cols];
        let mut queue = VecDeque::from([from]);
        seen[idx(from)] = true;
        while let Some(s) = queue.pop_front() {
            if s == to {
                break;
            }
            for nb in self.neighbours(s) {
                if !seen[idx(nb)] && (nb == to || self.qubit_at(nb).is_some()) {
                    seen[idx(nb)] = true;
                    prev[idx(nb)] = Some(s);
                    queue.push_back(nb);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = prev[idx(cur)] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoutingReport {
    pub two_qubit_gates: usize,
    /// Two-qubit gates whose operands were not adjacent.
    pub routed_gates: usize,
    pub swaps_inserted: usize,
    /// Sum over two-qubit gates of the operand separation on the lattice.
    pub total_distance: usize,
}

impl RoutingReport {
    pub fn mean_swaps_per_two_qubit_gate(&self) -> f64 {
        self.swaps_inserted as f64 / self.two_qubit_gates.max(1) as f64
    }

    pub fn mean_distance(&self) -> f64 {
        self.total_distance as f64 / self.two_qubit_gates.max(1) as f64
    }
}

/// Make every two-qubit gate nearest-neighbour.
///
/// For a gate on `(a, b)` at distance `d > 1`, the state of `b` is swapped
/// along a shortest path until it sits next to `a` (`d − 1` swaps), the gate
/// is applied there, and the chain is undone. The placement is therefore the
/// same before and after every logical gate.
pub fn route(circuit: &Circuit, layout: &LatticeLayout) -> Result<(Circuit, RoutingReport)> {
    if layout.n_qubits() < circuit.n_qubits() {
        return Err(Error::LayoutTooSmall {
            sites: layout.n_qubits(),
            n_qubits: circuit.n_qubits(),
        });
    }
    if layout.n_qubits() != circuit.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: layout.n_qubits(),
            right: circuit.n_qubits(),
        });
    }
    let mut out = Circuit::new(circuit.n_qubits());
    let mut report = RoutingReport::default();
    for gate in circuit.gates() {
        let (a, b) = match *gate {
            Gate::ControlledPhase(a, b, _) | Gate::Swap(a, b) => (a, b),
            g => {
                out.push(g)?;
                continue;
            }
        };
        report.two_qubit_gates += 1;
        let d = layout.distance(a, b);
        report.total_distance += d;
        if d <= 1 {
            out.push(*gate)?;
            continue;
        }
        report.routed_gates += 1;
        let path = layout.path(layout.site_of(b), layout.site_of(a));
        let slots: Vec<usize> = path[..path.len() - 1]
            .iter()
            .map(|&s| layout.qubit_at(s).expect("path through occupied sites"))
            .collect();
        let chain: Vec<Gate> = slots.windows(2).map(|w| Gate::Swap(w[0], w[1])).collect();
        let moved_to = *slots.last().expect("non-empty path");
        for g in &chain {
            out.push(*g)?;
        }
        out.push(match *gate {
            Gate::ControlledPhase(_, _, phi) => Gate::ControlledPhase(a, moved_to, phi),
            _ => Gate::Swap(a, moved_to),
        })?;
        for g in chain.iter().rev() {
            out.push(*g)?;
        }
        report.swaps_inserted += 2 * chain.len();
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three_has_twelve_edges() {
        let l = LatticeLayout::new(3, 3, 9).unwrap();
        assert_eq!(l.edges().len(), 12);
        let colors = l.edge_colors();
        assert_eq!(colors.iter().map(Vec::len).sum::<usize>(), 12);
        for group in &colors {
            let mut used = std::collections::HashSet::new();
            for &(a, b) in group {
                assert!(used.insert(a) && used.insert(b), "edges in a color overlap");
            }
        }
    }

    #[test]
    fn auto_shapes() {
        let shape = |n| {
            let l = LatticeLayout::for_qubits(n);
            (l.rows(), l.cols())
        };
        assert_eq!(shape(2), (1, 2));
        assert_eq!(shape(4), (2, 2));
        assert_eq!(shape(5), (2, 3));
        assert_eq!(shape(9), (3, 3));
        assert_eq!(shape(10), (3, 4));
        assert_eq!(shape(16), (4, 4));
    }

    #[test]
    fn rejects_small_or_overlapping_layouts() {
        assert!(matches!(LatticeLayout::new(2, 2, 5), Err(Error::LayoutTooSmall { .. })));
        let dup = vec![Site { row: 0, col: 0 }, Site { row: 0, col: 0 }];
        assert!(LatticeLayout::with_placement(1, 2, dup).is_err());
        let c = Circuit::new(5);
        assert!(matches!(
            route(&c, &LatticeLayout::new(2, 2, 4).unwrap()),
            Err(Error::LayoutTooSmall { .. })
        ));
    }

    #[test]
    fn adjacent_gates_pass_through() {
        let l = LatticeLayout::new(1, 2, 2).unwrap();
        let c = Circuit::from_gates(
            2,
            [Gate::Hadamard(0), Gate::ControlledPhase(0, 1, 0.4), Gate::Hadamard(1)],
        )
        .unwrap();
        let (routed, report) = route(&c, &l).unwrap();
        assert_eq!(routed, c);
        assert_eq!(report.swaps_inserted, 0);
    }

    #[test]
    fn corner_to_corner_on_three_by_three() {
        let l = LatticeLayout::new(3, 3, 9).unwrap();
        let c = Circuit::from_gates(9, [Gate::ControlledPhase(0, 8, 0.3)]).unwrap();
        let (routed, report) = route(&c, &l).unwrap();
        assert_eq!(report.swaps_inserted, 6);
        assert_eq!(routed.counts().swap, 6);
        for g in routed.gates() {
            if let Gate::ControlledPhase(a, b, _) | Gate::Swap(a, b) = *g {
                assert!(l.adjacent(a, b), "{g:?} not nearest-neighbour");
            }
        }
    }

    #[test]
    fn paths_skip_empty_sites() {
        // 2x3 with the last site empty: qubit 2 at (0,2) talking to 3 at (1,0)
        let l = LatticeLayout::new(2, 3, 5).unwrap();
        let c = Circuit::from_gates(5, [Gate::ControlledPhase(3, 2, 0.1)]).unwrap();
        let (routed, report) = route(&c, &l).unwrap();
        assert_eq!(report.swaps_inserted, 2 * (l.distance(2, 3) - 1));
        for g in routed.gates() {
            if let Gate::ControlledPhase(a, b, _) | Gate::Swap(a, b) = *g {
                assert!(l.adjacent(a, b));
            }
        }
    }
}
