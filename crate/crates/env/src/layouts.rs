//! Maze layout registry.
//!
//! All layouts include their border walls. The desk pointmaze uses the six
//! named small layouts on an 8x8 grid; the antmaze XML emitter additionally
//! uses the numbered medium (8x8) and large (9x12) maps. Start is always the
//! bottom-left free cell and the goal the top-right free cell.

use crate::error::EnvError;

/// Occupancy grid. `grid[row][col]`, row 0 at the bottom; `true` is a wall.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub name: String,
    pub grid: Vec<Vec<bool>>,
}

impl Layout {
    fn from_rows(name: &str, rows_top_down: &[&str]) -> Self {
        let mut grid: Vec<Vec<bool>> = rows_top_down
            .iter()
            .map(|r| r.chars().map(|c| c == '#').collect())
            .collect();
        grid.reverse(); // store bottom-up
        let width = grid[0].len();
        assert!(grid.iter().all(|r| r.len() == width), "ragged layout {name}");
        Layout { name: name.to_owned(), grid }
    }

    pub fn rows(&self) -> usize {
        self.grid.len()
    }

    pub fn cols(&self) -> usize {
        self.grid[0].len()
    }

    pub fn is_wall(&self, row: usize, col: usize) -> bool {
        self.grid[row][col]
    }

    /// Bottom-left free cell (scanning rows bottom-up, columns left-right).
    pub fn start_cell(&self) -> (usize, usize) {
        for row in 0..self.rows() {
            for col in 0..self.cols() {
                if !self.grid[row][col] {
                    return (row, col);
                }
            }
        }
        unreachable!("layout `{}` has no free cell", self.name)
    }

    /// Top-right free cell (scanning rows top-down, columns right-left).
    pub fn goal_cell(&self) -> (usize, usize) {
        for row in (0..self.rows()).rev() {
            for col in (0..self.cols()).rev() {
                if !self.grid[row][col] {
                    return (row, col);
                }
            }
        }
        unreachable!("layout `{}` has no free cell", self.name)
    }

    /// True when the goal cell is reachable from the start cell.
    pub fn is_connected(&self) -> bool {
        let (rows, cols) = (self.rows(), self.cols());
        let start = self.start_cell();
        let goal = self.goal_cell();
        let mut seen = vec![vec![false; cols]; rows];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start.0][start.1] = true;
        while let Some((r, c)) = queue.pop_front() {
            if (r, c) == goal {
                return true;
            }
            let mut push = |nr: usize, nc: usize, seen: &mut Vec<Vec<bool>>| {
                if !self.grid[nr][nc] && !seen[nr][nc] {
                    seen[nr][nc] = true;
                    queue.push_back((nr, nc));
                }
            };
            if r > 0 {
                push(r - 1, c, &mut seen);
            }
            if r + 1 < rows {
                push(r + 1, c, &mut seen);
            }
            if c > 0 {
                push(r, c - 1, &mut seen);
            }
            if c + 1 < cols {
                push(r, c + 1, &mut seen);
            }
        }
        false
    }

    /// Rows rendered top-to-bottom as `#`/`.` strings.
    pub fn render(&self) -> Vec<String> {
        self.grid
            .iter()
            .rev()
            .map(|row| row.iter().map(|&w| if w { '#' } else { '.' }).collect())
            .collect()
    }
}

/// The six named small layouts shared by the desk pointmaze and the small
/// antmaze variants.
pub fn small_layout(name: &str) -> Result<Layout, EnvError> {
    let rows: &[&str] = match name {
        "empty" => &[
            "########",
            "#......#",
            "#......#",
            "#......#",
            "#......#",
            "#......#",
            "#......#",
            "########",
        ],
        "centerblock" => &[
            "########",
            "#......#",
            "#......#",
            "#..##..#",
            "#..##..#",
            "#......#",
            "#......#",
            "########",
        ],
        "lshape" => &[
            "########",
            "#......#",
            "#......#",
            "#.####.#",
            "#....#.#",
            "#....#.#",
            "#......#",
            "########",
        ],
        "zshape" => &[
            "########",
            "#......#",
            "#####..#",
            "#......#",
            "#......#",
            "#..#####",
            "#......#",
            "########",
        ],
        "reversel" => &[
            "########",
            "#......#",
            "#......#",
            "#.####.#",
            "#.#....#",
            "#.#....#",
            "#......#",
            "########",
        ],
        "reverseu" => &[
            "########",
            "#......#",
            "#.####.#",
            "#.#..#.#",
            "#.#..#.#",
            "#.#..#.#",
            "#......#",
            "########",
        ],
        _ => return Err(EnvError::UnknownLayout(name.to_owned())),
    };
    Ok(Layout::from_rows(name, rows))
}

/// Numbered medium maps (8x8), XML emission only.
pub fn medium_layout(index: &str) -> Result<Layout, EnvError> {
    let rows: &[&str] = match index {
        "1" => &[
            "########",
            "#......#",
            "#.##.#.#",
            "#....#.#",
            "#.##.#.#",
            "#.#..#.#",
            "#...#..#",
            "########",
        ],
        "2" => &[
            "########",
            "#....#.#",
            "#.##.#.#",
            "#.#....#",
            "#.#.####",
            "#.#....#",
            "#...##.#",
            "########",
        ],
        "3" => &[
            "########",
            "#......#",
            "####.###",
            "#......#",
            "#.######",
            "#......#",
            "######.#",
            "########",
        ],
        "4" => &[
            "########",
            "#.#....#",
            "#.#.##.#",
            "#.#.#..#",
            "#.#.#.##",
            "#.#.#..#",
            "#...##.#",
            "########",
        ],
        "5" => &[
            "########",
            "#......#",
            "#.####.#",
            "#.#....#",
            "#.#.##.#",
            "#.#..#.#",
            "#.##.#.#",
            "########",
        ],
        "6" => &[
            "########",
            "#..#...#",
            "##.#.#.#",
            "#..#.#.#",
            "#.##.#.#",
            "#..#.#.#",
            "##...#.#",
            "########",
        ],
        _ => return Err(EnvError::UnknownLayout(format!("medium-{index}"))),
    };
    Ok(Layout::from_rows(&format!("medium-{index}"), rows))
}

/// Numbered large maps (9x12), XML emission only.
pub fn large_layout(index: &str) -> Result<Layout, EnvError> {
    let rows: &[&str] = match index {
        "1" => &[
            "############",
            "#..........#",
            "#.########.#",
            "#.#......#.#",
            "#.#.####.#.#",
            "#.#....#.#.#",
            "#.####.#.#.#",
            "#......#...#",
            "############",
        ],
        "2" => &[
            "############",
            "#.....#....#",
            "###.#.#.##.#",
            "#...#.#..#.#",
            "#.###.##.#.#",
            "#.#....#.#.#",
            "#.#.##.#.#.#",
            "#...#....#.#",
            "############",
        ],
        "3" => &[
            "############",
            "#..........#",
            "##########.#",
            "#..........#",
            "#.##########",
            "#..........#",
            "##########.#",
            "#..........#",
            "############",
        ],
        "4" => &[
            "############",
            "#....#.....#",
            "#.##.#.###.#",
            "#.#......#.#",
            "#.#.####.#.#",
            "#.#.#....#.#",
            "#.#.#.####.#",
            "#...#......#",
            "############",
        ],
        "5" => &[
            "############",
            "#......#...#",
            "#.####.#.#.#",
            "#.#..#.#.#.#",
            "#.#..#.#.#.#",
            "#.#..#.#.#.#",
            "#.#..#...#.#",
            "#.#..#####.#",
            "############",
        ],
        "6" => &[
            "############",
            "#.....#....#",
            "#.###.#.##.#",
            "#...#.#.#..#",
            "###.#.#.#.##",
            "#...#.#.#..#",
            "#.###.#.##.#",
            "#..........#",
            "############",
        ],
        _ => return Err(EnvError::UnknownLayout(format!("large-{index}"))),
    };
    Ok(Layout::from_rows(&format!("large-{index}"), rows))
}
