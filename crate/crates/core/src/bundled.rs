//! Mazes and initial paths shipped with the crate.

use crate::env::{EnvError, GridMap, InitialPath};

pub const MAZE_SMALL: &str = include_str!("../assets/maze_small.txt");
pub const PATH_SMALL: &str = include_str!("../assets/path_small.txt");
pub const MAZE_MEDIUM: &str = include_str!("../assets/maze_medium.txt");
pub const PATH_MEDIUM: &str = include_str!("../assets/path_medium.txt");
pub const MAZE_MAIN: &str = include_str!("../assets/maze_main.txt");
pub const PATH_MAIN: &str = include_str!("../assets/path_main.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bundled {
    /// 5x5 desk check.
    Small,
    /// 40x25 with two barriers.
    Medium,
    /// 61x60 with 3277 free cells.
    Main,
}

impl Bundled {
    pub const ALL: [Bundled; 3] = [Bundled::Small, Bundled::Medium, Bundled::Main];

    pub fn name(self) -> &'static str {
        match self {
            Bundled::Small => "small",
            Bundled::Medium => "medium",
            Bundled::Main => "main",
        }
    }

    pub fn maze_text(self) -> &'static str {
        match self {
            Bundled::Small => MAZE_SMALL,
            Bundled::Medium => MAZE_MEDIUM,
            Bundled::Main => MAZE_MAIN,
        }
    }

    pub fn path_text(self) -> &'static str {
        match self {
            Bundled::Small => PATH_SMALL,
            Bundled::Medium => PATH_MEDIUM,
            Bundled::Main => PATH_MAIN,
        }
    }

    pub fn load(self) -> Result<(GridMap, InitialPath), EnvError> {
        let map = GridMap::parse(self.maze_text())?;
        let path = InitialPath::load(self.path_text(), &map)?;
        Ok((map, path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_load() {
        for b in Bundled::ALL {
            let (map, path) = b.load().unwrap();
            assert!(path.len() > map.shortest_path_length(), "{}", b.name());
            assert!(path.missing_actions(4).is_empty(), "{}", b.name());
        }
    }
}
