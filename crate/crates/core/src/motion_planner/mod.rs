//! Grid path planning over the 2D workspace and the mapping from symbolic
//! states to poses.

mod grid;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::f64::consts::SQRT_2;
use std::sync::Mutex;

use thiserror::Error;

use crate::action_lang::{AtomId, GroundedDomain, State};

pub use grid::{Cell, DoorSides, MapError, OccupancyGrid, Pose};

/// Name of the action schema refined by the motion planner.
pub const NAVIGATION_ACTION: &str = "approach";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Error)]
pub enum Infeasible {
    #[error("no collision-free path")]
    NoPath,
    #[error("path endpoint is not in free space")]
    EndpointBlocked,
}

/// A collision-free path through cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub waypoints: Vec<Pose>,
    pub length: f64,
}

pub fn euclidean(a: Pose, b: Pose) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

// Neighbor offsets in fixed order: orthogonal first, then diagonal.
const STEPS: [(isize, isize); 8] = [
    (0, -1),
    (-1, 0),
    (1, 0),
    (0, 1),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
];

/// Path cost as counts of orthogonal and diagonal steps. Every sum
/// `a + b*sqrt(2)` is distinct for distinct counts, so comparing the
/// evaluated value is exact and independent of summation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cost {
    orth: u32,
    diag: u32,
}

impl Cost {
    fn value(self) -> f64 {
        self.orth as f64 + self.diag as f64 * SQRT_2
    }
}

#[derive(PartialEq)]
struct Entry {
    value: f64,
    cost: Cost,
    cell: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn neighbors(grid: &OccupancyGrid, cell: usize) -> impl Iterator<Item = (usize, bool)> + '_ {
    let (x, y) = ((cell % grid.width) as isize, (cell / grid.width) as isize);
    let free = move |cx: isize, cy: isize| {
        cx >= 0
            && cy >= 0
            && (cx as usize) < grid.width
            && (cy as usize) < grid.height
            && grid.cell(cx as usize, cy as usize).is_free()
    };
    STEPS.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x + dx, y + dy);
        if !free(nx, ny) {
            return None;
        }
        let diagonal = dx != 0 && dy != 0;
        if diagonal && !free(x + dx, y) && !free(x, y + dy) {
            return None;
        }
        Some((ny as usize * grid.width + nx as usize, diagonal))
    })
}

fn endpoint(grid: &OccupancyGrid, p: Pose) -> Result<usize, Infeasible> {
    match grid.cell_of(p) {
        Some((cx, cy)) if grid.cell(cx, cy).is_free() => Ok(cy * grid.width + cx),
        _ => Err(Infeasible::EndpointBlocked),
    }
}

fn dijkstra(grid: &OccupancyGrid, from: usize, to: usize) -> Option<(Cost, Vec<usize>)> {
    let n = grid.width * grid.height;
    let mut best: Vec<Option<Cost>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    let zero = Cost { orth: 0, diag: 0 };
    best[from] = Some(zero);
    heap.push(Entry {
        value: 0.0,
        cost: zero,
        cell: from,
    });
    while let Some(Entry { value, cost, cell }) = heap.pop() {
        if best[cell].is_some_and(|b| b.value() < value) {
            continue;
        }
        if cell == to {
            let mut path = vec![to];
            let mut c = to;
            while c != from {
                c = parent[c];
                path.push(c);
            }
            path.reverse();
            return Some((cost, path));
        }
        for (next, diagonal) in neighbors(grid, cell) {
            let nc = if diagonal {
                Cost {
                    diag: cost.diag + 1,
                    ..cost
                }
            } else {
                Cost {
                    orth: cost.orth + 1,
                    ..cost
                }
            };
            if best[next].is_none_or(|b| nc.value() < b.value()) {
                best[next] = Some(nc);
                parent[next] = cell;
                heap.push(Entry {
                    value: nc.value(),
                    cost: nc,
                    cell: next,
                });
            }
        }
    }
    None
}

/// Minimum-length 8-connected path between the cells containing `from` and `to`.
pub fn shortest_path(grid: &OccupancyGrid, from: Pose, to: Pose) -> Result<Trajectory, Infeasible> {
    let (a, b) = (endpoint(grid, from)?, endpoint(grid, to)?);
    let (cost, cells) = dijkstra(grid, a, b).ok_or(Infeasible::NoPath)?;
    Ok(Trajectory {
        waypoints: cells
            .iter()
            .map(|&c| grid.center(c % grid.width, c / grid.width))
            .collect(),
        length: cost.value() * grid.resolution,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no pose for state {0}")]
pub struct UnmappedState(pub String);

/// The function from symbolic states to poses.
///
/// `in(R)` with `near(D)` for a door `D` maps to `D`'s approach pose on
/// `R`'s side; `near(L)` for a point landmark maps to that landmark; `in(R)`
/// alone maps to the landmark named after region `R`.
#[derive(Debug, Clone)]
pub struct SymbolMap {
    regions: BTreeMap<String, Pose>,
    points: BTreeMap<String, Pose>,
    doors: BTreeMap<String, DoorSides>,
    in_atoms: HashMap<AtomId, String>,
    near_atoms: HashMap<AtomId, String>,
    in_mask: State,
    near_mask: State,
}

impl SymbolMap {
    pub fn new(grid: &OccupancyGrid, g: &GroundedDomain) -> Self {
        let mut in_atoms = HashMap::new();
        let mut near_atoms = HashMap::new();
        let mut in_mask = g.empty_state();
        let mut near_mask = g.empty_state();
        for (i, atom) in g.atoms().iter().enumerate() {
            let id = i as AtomId;
            match (atom.predicate.as_str(), atom.args.as_slice()) {
                ("in", [r]) => {
                    in_atoms.insert(id, r.clone());
                    in_mask.insert(id);
                }
                ("near", [x]) => {
                    near_atoms.insert(id, x.clone());
                    near_mask.insert(id);
                }
                _ => {}
            }
        }
        let region_names: std::collections::BTreeSet<&String> = in_atoms.values().collect();
        let (regions, points) = grid
            .landmarks
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .partition(|(k, _)| region_names.contains(k));
        SymbolMap {
            regions,
            points,
            doors: grid.doors.clone(),
            in_atoms,
            near_atoms,
            in_mask,
            near_mask,
        }
    }

    /// Pose for a region and an optional nearby location.
    pub fn lookup(&self, region: &str, near: Option<&str>) -> Option<Pose> {
        match near {
            None => self.regions.get(region).copied(),
            Some(x) => match self.doors.get(x) {
                Some(d) => d.pose_on(region),
                None => self.points.get(x).copied(),
            },
        }
    }

    /// Every (region, near) situation that has a pose, in sorted order.
    pub fn entries(&self) -> Vec<((String, Option<String>), Pose)> {
        let mut out: Vec<_> = self
            .regions
            .iter()
            .map(|(r, p)| ((r.clone(), None), *p))
            .collect();
        for (d, sides) in &self.doors {
            for (r, p) in sides.regions.iter().zip(sides.poses) {
                out.push(((r.clone(), Some(d.clone())), p));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn doors(&self) -> &BTreeMap<String, DoorSides> {
        &self.doors
    }

    /// The unique region and the optional near-location named by `s`.
    fn situation(&self, s: &State) -> Option<(&str, Option<&str>)> {
        let mut region = None;
        let mut near = None;
        for id in s.iter() {
            if self.in_mask.contains(id) {
                if region.is_some() {
                    return None;
                }
                region = Some(self.in_atoms[&id].as_str());
            } else if self.near_mask.contains(id) {
                if near.is_some() {
                    return None;
                }
                near = Some(self.near_atoms[&id].as_str());
            }
        }
        Some((region?, near))
    }
}

pub fn map_state(m: &SymbolMap, s: &State, g: &GroundedDomain) -> Result<Pose, UnmappedState> {
    m.situation(s)
        .and_then(|(r, x)| m.lookup(r, x))
        .ok_or_else(|| UnmappedState(g.format_state(s)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Refinement {
    Trajectory(Trajectory),
    /// Not a navigation action; the motion planner has nothing to evaluate.
    NotRefinable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error(transparent)]
    Unmapped(#[from] UnmappedState),
    #[error(transparent)]
    Infeasible(#[from] Infeasible),
}

pub fn refine_action(
    grid: &OccupancyGrid,
    m: &SymbolMap,
    g: &GroundedDomain,
    s: &State,
    a: usize,
    s2: &State,
) -> Result<Refinement, RefineError> {
    if g.action(a).name != NAVIGATION_ACTION {
        return Ok(Refinement::NotRefinable);
    }
    let from = map_state(m, s, g)?;
    let to = map_state(m, s2, g)?;
    Ok(Refinement::Trajectory(shortest_path(grid, from, to)?))
}

/// A grid and symbol map with memoized path lengths, shareable across threads.
#[derive(Debug)]
pub struct MotionPlanner {
    pub grid: OccupancyGrid,
    pub symbols: SymbolMap,
    lengths: Mutex<HashMap<(usize, usize), Result<f64, Infeasible>>>,
}

impl MotionPlanner {
    pub fn new(grid: OccupancyGrid, g: &GroundedDomain) -> Self {
        let symbols = SymbolMap::new(&grid, g);
        MotionPlanner {
            grid,
            symbols,
            lengths: Mutex::new(HashMap::new()),
        }
    }

    /// `Len(shortest_path(from, to))`, cached by endpoint cells.
    pub fn path_length(&self, from: Pose, to: Pose) -> Result<f64, Infeasible> {
        let key = (endpoint(&self.grid, from)?, endpoint(&self.grid, to)?);
        if let Some(r) = self.lengths.lock().expect("path cache").get(&key) {
            return *r;
        }
        let r = shortest_path(&self.grid, from, to).map(|t| t.length);
        self.lengths.lock().expect("path cache").insert(key, r);
        r
    }

    pub fn map_state(&self, s: &State, g: &GroundedDomain) -> Result<Pose, UnmappedState> {
        map_state(&self.symbols, s, g)
    }

    /// Motion length for transition `<s, a, s2>`, `None` for non-navigation actions.
    pub fn leg_length(
        &self,
        g: &GroundedDomain,
        s: &State,
        a: usize,
        s2: &State,
    ) -> Option<Result<f64, RefineError>> {
        if g.action(a).name != NAVIGATION_ACTION {
            return None;
        }
        Some((|| {
            let from = self.map_state(s, g)?;
            let to = self.map_state(s2, g)?;
            Ok(self.path_length(from, to)?)
        })())
    }
}
