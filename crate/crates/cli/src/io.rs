use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use hasf::edt::SquaredDistanceMap;
use hasf::grid::BinaryImage;
use hasf::netpbm;

/// Reads a PBM or PGM file. Graymap samples above `threshold` are foreground.
pub fn read_image(path: &Path, threshold: u16) -> Result<BinaryImage> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    netpbm::decode_binary(&bytes, threshold).with_context(|| format!("cannot decode {}", path.display()))
}

/// Writes a binary image as raw PBM, or plain PBM when `plain` is set.
pub fn write_image(img: &BinaryImage, path: &Path, plain: bool) -> Result<()> {
    fs::write(path, netpbm::encode_pbm(img, plain)).with_context(|| format!("cannot write {}", path.display()))
}

/// Squared distances as CSV, one image row per line, `INF` where no target
/// is reachable.
pub fn distance_csv(map: &SquaredDistanceMap) -> String {
    let mut out = String::with_capacity(map.values().len() * 4);
    for r in 0..map.height() {
        for c in 0..map.width() {
            if c > 0 {
                out.push(',');
            }
            if map.is_inf(r, c) {
                out.push_str("INF");
            } else {
                let _ = write!(out, "{}", map.get(r, c));
            }
        }
        out.push('\n');
    }
    out
}

/// Writes a distance map: CSV of squared distances for `.csv` paths,
/// otherwise a 16-bit PGM of rounded-down distances.
pub fn write_distance_map(map: &SquaredDistanceMap, path: &Path) -> Result<()> {
    let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let bytes = if csv {
        distance_csv(map).into_bytes()
    } else {
        netpbm::encode_distance_pgm(map)
    };
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}
