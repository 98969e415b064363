use serde::{Deserialize, Serialize};

use super::base::BaseCover;
use super::tile::{Tile, TileSearch};
use crate::error::{Error, Result};
use crate::semigroup::{ExpandingCover, GeneratorSystem};

/// Grid used to check that a family covers the circle.
pub const COVER_GRID: usize = 1024;

/// Closed pulled-back base balls with word lengths in `depth..=cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitaliFamily {
    pub depth: usize,
    pub cap: usize,
    pub tiles: Vec<Tile>,
    /// First test-grid point outside every tile, if any.
    pub uncovered_point: Option<f64>,
}

impl VitaliFamily {
    pub fn is_complete(&self) -> bool {
        self.uncovered_point.is_none()
    }
}

fn check_eps(cover: &ExpandingCover, base: &BaseCover) -> Result<()> {
    if !cover.all_full() && base.eps > cover.eta / 6.0 {
        return Err(Error::InvalidInput(format!(
            "base radius {} exceeds eta/6 = {}",
            base.eps,
            cover.eta / 6.0
        )));
    }
    Ok(())
}

/// Tiles lying inside the lifted interval `[lo, hi]`.
pub fn family_in(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    base: &BaseCover,
    (lo, hi): (f64, f64),
    depth: usize,
    cap: usize,
) -> Result<Vec<Tile>> {
    check_eps(cover, base)?;
    if depth == 0 {
        return Err(Error::InvalidInput("family depth must be at least 1".into()));
    }
    let search = TileSearch { system, cover, base };
    Ok(search.all_in(lo, hi, depth, cap))
}

/// The whole family over the circle, with a covering check on a grid.
pub fn build_vitali_family(
    system: &GeneratorSystem,
    cover: &ExpandingCover,
    base: &BaseCover,
    depth: usize,
    cap: usize,
) -> Result<VitaliFamily> {
    // search over [0, 2] so tiles straddling 0 are found; copies found
    // twice are merged below
    let mut tiles = family_in(system, cover, base, (0.0, 2.0), depth, cap)?;
    tiles.sort_by(|a, b| {
        a.word
            .len()
            .cmp(&b.word.len())
            .then_with(|| a.word.0.cmp(&b.word.0))
            .then_with(|| a.arc.lo.total_cmp(&b.arc.lo))
            .then_with(|| a.image.cmp(&b.image))
    });
    tiles.dedup_by(|a, b| a.word == b.word && a.image == b.image && (a.arc.lo - b.arc.lo).abs() < 1e-12);
    let uncovered_point = first_uncovered(&tiles);
    Ok(VitaliFamily {
        depth,
        cap,
        tiles,
        uncovered_point,
    })
}

fn first_uncovered(tiles: &[Tile]) -> Option<f64> {
    let mut iv: Vec<(f64, f64)> = tiles
        .iter()
        .flat_map(|t| [(t.arc.lo, t.arc.hi()), (t.arc.lo - 1.0, t.arc.hi() - 1.0)])
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = Vec::with_capacity(iv.len());
    let mut m = f64::NEG_INFINITY;
    for &(_, hi) in &iv {
        m = m.max(hi);
        reach.push(m);
    }
    (0..COVER_GRID).map(|i| (i as f64 + 0.5) / COVER_GRID as f64).find(|&x| {
        let k = iv.partition_point(|&(lo, _)| lo < x);
        k == 0 || reach[k - 1] <= x
    })
}
