use std::ops::Range;

/// Minimum zone height. Two 3-row sub-bands per zone keep the bands scanned
/// in the same wave at least three rows apart.
pub const MIN_ZONE_ROWS: usize = 6;

/// One worker's row band, cut into a leading and a trailing sub-band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone {
    pub rows: Range<usize>,
    pub leading: Range<usize>,
    pub trailing: Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubBand {
    Leading,
    Trailing,
}

/// Disjoint row bands covering the image, one per worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonePlan {
    pub height: usize,
    pub zones: Vec<Zone>,
}

impl ZonePlan {
    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn zone_of(&self, row: usize) -> usize {
        self.zones
            .partition_point(|z| z.rows.end <= row)
            .min(self.zones.len() - 1)
    }

    pub fn band_of(&self, row: usize) -> (usize, SubBand) {
        let z = self.zone_of(row);
        let band = if self.zones[z].leading.contains(&row) {
            SubBand::Leading
        } else {
            SubBand::Trailing
        };
        (z, band)
    }

    pub fn band(&self, zone: usize, band: SubBand) -> Range<usize> {
        match band {
            SubBand::Leading => self.zones[zone].leading.clone(),
            SubBand::Trailing => self.zones[zone].trailing.clone(),
        }
    }
}

/// Cuts `height` rows into `min(requested_workers, height / 6)` zones (at
/// least one) of near-equal size.
pub fn split(height: usize, requested_workers: usize) -> ZonePlan {
    let height = height.max(1);
    let count = requested_workers.max(1).min(height / MIN_ZONE_ROWS).max(1);
    let zones = super::partition(height, count)
        .into_iter()
        .map(|rows| {
            let mid = rows.start + rows.len() / 2;
            Zone {
                leading: rows.start..mid,
                trailing: mid..rows.end,
                rows,
            }
        })
        .collect();
    ZonePlan { height, zones }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighteen_rows_three_workers() {
        let plan = split(18, 3);
        assert_eq!(plan.len(), 3);
        for (i, z) in plan.zones.iter().enumerate() {
            assert_eq!(z.rows, 6 * i..6 * i + 6);
            assert_eq!(z.leading.len(), 3);
            assert_eq!(z.trailing.len(), 3);
        }
    }

    #[test]
    fn short_image_gets_one_zone() {
        let plan = split(5, 8);
        assert_eq!(plan.len(), 1);
        assert_eq!(plan.zones[0].rows, 0..5);
    }

    #[test]
    fn equal_partition() {
        let plan = split(100, 4);
        assert!(plan.zones.iter().all(|z| z.rows.len() == 25));
        assert_eq!(plan.zone_of(0), 0);
        assert_eq!(plan.zone_of(49), 1);
        assert_eq!(plan.zone_of(99), 3);
        assert_eq!(plan.band_of(50), (2, SubBand::Leading));
        assert_eq!(plan.band_of(63), (2, SubBand::Trailing));
    }

    #[test]
    fn zone_count_capped_by_height() {
        let plan = split(40, 16);
        assert_eq!(plan.len(), 6);
        assert!(plan.zones.iter().all(|z| z.rows.len() >= MIN_ZONE_ROWS));
    }
}
