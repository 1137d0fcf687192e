//! Cardinal-direction tiles for region pairs and the tile sets a connected
//! primary region can occupy.

/// Tile symbols; bit `i` of a direction set stands for `DIRECTION_TILES[i]`.
pub const DIRECTION_TILES: [&str; 9] = ["B", "N", "NW", "W", "SW", "S", "SE", "E", "NE"];

/// (column, row) of each tile in the 3×3 grid, row 0 being the north row.
const TILE_POS: [(i8, i8); 9] = [
    (1, 1), // B
    (1, 0), // N
    (0, 0), // NW
    (0, 1), // W
    (0, 2), // SW
    (1, 2), // S
    (2, 2), // SE
    (2, 1), // E
    (2, 0), // NE
];

/// The nine tiles together with the admissible tile sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionUniverse {
    valid_sets: Vec<u16>,
}

impl DirectionUniverse {
    pub fn tiles(&self) -> &'static [&'static str; 9] {
        &DIRECTION_TILES
    }

    /// Admissible sets as bitmasks over [`DIRECTION_TILES`], ascending.
    pub fn valid_sets(&self) -> &[u16] {
        &self.valid_sets
    }

    pub fn len(&self) -> usize {
        self.valid_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid_sets.is_empty()
    }

    pub fn position(&self, set: u16) -> Option<usize> {
        self.valid_sets.binary_search(&set).ok()
    }

    pub fn is_valid(&self, set: u16) -> bool {
        self.position(set).is_some()
    }

    /// Set names such as `B+N+NE`, one per valid set.
    pub fn symbols(&self) -> Vec<String> {
        self.valid_sets.iter().map(|&s| set_name(s)).collect()
    }

    pub fn tile(name: &str) -> Option<usize> {
        DIRECTION_TILES.iter().position(|&t| t == name)
    }

    /// Parses `B+N+NE` style names (tiles in any order).
    pub fn parse_set(name: &str) -> Option<u16> {
        let mut mask = 0u16;
        for part in name.split('+') {
            let bit = 1u16 << Self::tile(part)?;
            if mask & bit != 0 {
                return None;
            }
            mask |= bit;
        }
        Some(mask)
    }
}

/// Canonical name of a tile set, tiles joined by `+` in tile order.
pub fn set_name(set: u16) -> String {
    DIRECTION_TILES
        .iter()
        .enumerate()
        .filter(|(i, _)| set & (1 << i) != 0)
        .map(|(_, t)| *t)
        .collect::<Vec<_>>()
        .join("+")
}

fn edge_connected(set: u16) -> bool {
    let start = set.trailing_zeros() as usize;
    let mut reached = 1u16 << start;
    let mut frontier = vec![start];
    while let Some(t) = frontier.pop() {
        let (x, y) = TILE_POS[t];
        for (u, &(ux, uy)) in TILE_POS.iter().enumerate() {
            let bit = 1u16 << u;
            if set & bit != 0 && reached & bit == 0 && (x - ux).abs() + (y - uy).abs() == 1 {
                reached |= bit;
                frontier.push(u);
            }
        }
    }
    reached == set
}

/// Non-empty tile sets that are edge-connected in the 3×3 grid.
pub fn derive_valid_direction_sets() -> DirectionUniverse {
    let valid_sets: Vec<u16> = (1u16..512).filter(|&s| edge_connected(s)).collect();
    assert_eq!(valid_sets.len(), 218, "connectivity model does not give 218 tile sets");
    DirectionUniverse { valid_sets }
}
