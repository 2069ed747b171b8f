use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// A point in the workspace, meters. Orientation is carried but unused by path costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64) -> Self {
        Pose { x, y, theta: 0.0 }
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Free,
    Obstacle,
    /// A door cell; the digit from the map file. Doors always block motion.
    Door(u8),
}

impl Cell {
    pub fn is_free(self) -> bool {
        self == Cell::Free
    }
}

/// A door between two regions with one approach pose on each side.
#[derive(Debug, Clone, PartialEq)]
pub struct DoorSides {
    pub regions: [String; 2],
    pub poses: [Pose; 2],
}

impl DoorSides {
    /// The approach pose on `region`'s side.
    pub fn pose_on(&self, region: &str) -> Option<Pose> {
        self.regions
            .iter()
            .position(|r| r == region)
            .map(|i| self.poses[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: grid row has width {found}, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("map has no grid rows")]
    EmptyGrid,
    #[error("{what} `{name}` at {pose} is not on a free cell")]
    BlockedPose {
        what: &'static str,
        name: String,
        pose: String,
    },
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
}

/// 2D occupancy grid with named landmarks and door approach poses.
///
/// Cell `(cx, cy)` covers `[cx*res, (cx+1)*res) x [cy*res, (cy+1)*res)`;
/// rows run downward in `y`, as in the map file.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    pub resolution: f64,
    pub cells: Vec<Cell>,
    pub landmarks: BTreeMap<String, Pose>,
    pub doors: BTreeMap<String, DoorSides>,
}

impl OccupancyGrid {
    /// An all-free grid with no landmarks or doors.
    pub fn open(width: usize, height: usize, resolution: f64) -> Self {
        OccupancyGrid {
            width,
            height,
            resolution,
            cells: vec![Cell::Free; width * height],
            landmarks: BTreeMap::new(),
            doors: BTreeMap::new(),
        }
    }

    pub fn cell(&self, cx: usize, cy: usize) -> Cell {
        self.cells[cy * self.width + cx]
    }

    pub fn set(&mut self, cx: usize, cy: usize, c: Cell) {
        self.cells[cy * self.width + cx] = c;
    }

    /// The cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: Pose) -> Option<(usize, usize)> {
        let cx = (p.x / self.resolution).floor();
        let cy = (p.y / self.resolution).floor();
        if cx < 0.0 || cy < 0.0 || cx >= self.width as f64 || cy >= self.height as f64 {
            return None;
        }
        Some((cx as usize, cy as usize))
    }

    pub fn center(&self, cx: usize, cy: usize) -> Pose {
        Pose::new(
            (cx as f64 + 0.5) * self.resolution,
            (cy as f64 + 0.5) * self.resolution,
        )
    }

    fn pose_is_free(&self, p: Pose) -> bool {
        self.cell_of(p)
            .is_some_and(|(cx, cy)| self.cell(cx, cy).is_free())
    }

    /// Parses the map file format:
    ///
    /// ```text
    /// resolution 1.0
    /// landmark lm_start 2.5 2.5
    /// door d1 r_left r_right 3.5 1.5 5.5 1.5
    /// #######
    /// #..1..#
    /// #######
    /// ```
    pub fn parse(text: &str) -> Result<Self, MapError> {
        let mut resolution = None;
        let mut landmarks = BTreeMap::new();
        let mut doors = BTreeMap::new();
        let mut rows: Vec<(usize, &str)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('%').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let is_grid_row = content
                .chars()
                .all(|c| c == '.' || c == '#' || c.is_ascii_digit());
            if is_grid_row || !rows.is_empty() {
                if !is_grid_row {
                    return Err(MapError::Syntax {
                        line,
                        msg: format!("unexpected `{content}` inside the grid block"),
                    });
                }
                rows.push((line, content));
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let num = |s: &str| -> Result<f64, MapError> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| MapError::Syntax {
                        line,
                        msg: format!("expected a number, found `{s}`"),
                    })
            };
            match toks.as_slice() {
                ["resolution", v] => {
                    let r = num(v)?;
                    if r <= 0.0 {
                        return Err(MapError::Syntax {
                            line,
                            msg: "resolution must be positive".into(),
                        });
                    }
                    resolution = Some(r);
                }
                ["landmark", name, x, y] => {
                    if landmarks
                        .insert(name.to_string(), Pose::new(num(x)?, num(y)?))
                        .is_some()
                    {
                        return Err(MapError::Duplicate {
                            what: "landmark",
                            name: name.to_string(),
                        });
                    }
                }
                ["door", id, r1, r2, x1, y1, x2, y2] => {
                    let sides = DoorSides {
                        regions: [r1.to_string(), r2.to_string()],
                        poses: [Pose::new(num(x1)?, num(y1)?), Pose::new(num(x2)?, num(y2)?)],
                    };
                    if doors.insert(id.to_string(), sides).is_some() {
                        return Err(MapError::Duplicate {
                            what: "door",
                            name: id.to_string(),
                        });
                    }
                }
                _ => {
                    return Err(MapError::Syntax {
                        line,
                        msg: format!("unrecognized header line `{content}`"),
                    })
                }
            }
        }

        let resolution = resolution.ok_or(MapError::Syntax {
            line: 1,
            msg: "missing `resolution` line".into(),
        })?;
        let Some(&(_, first)) = rows.first() else {
            return Err(MapError::EmptyGrid);
        };
        let width = first.len();
        let mut cells = Vec::with_capacity(width * rows.len());
        for &(line, row) in &rows {
            if row.len() != width {
                return Err(MapError::RaggedRow {
                    line,
                    expected: width,
                    found: row.len(),
                });
            }
            cells.extend(row.bytes().map(|b| match b {
                b'.' => Cell::Free,
                b'#' => Cell::Obstacle,
                d => Cell::Door(d - b'0'),
            }));
        }
        let grid = OccupancyGrid {
            width,
            height: rows.len(),
            resolution,
            cells,
            landmarks,
            doors,
        };
        for (name, p) in &grid.landmarks {
            if !grid.pose_is_free(*p) {
                return Err(MapError::BlockedPose {
                    what: "landmark",
                    name: name.clone(),
                    pose: p.to_string(),
                });
            }
        }
        for (name, d) in &grid.doors {
            for p in &d.poses {
                if !grid.pose_is_free(*p) {
                    return Err(MapError::BlockedPose {
                        what: "door approach pose",
                        name: name.clone(),
                        pose: p.to_string(),
                    });
                }
            }
        }
        Ok(grid)
    }
}
