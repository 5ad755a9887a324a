//! Invariant checks for a smoothing run on a concrete input.

use std::sync::Mutex;

use crate::edt::{meijster, SquaredDistanceMap, Target};
use crate::error::Result;
use crate::grid::{topology_of, BinaryImage, ConnectivityPair, TopologySignature};
use crate::homotopy::{addable_pixels, deletable_pixels, hasf_with, Engine, SmoothingParams};
use crate::morph::asf;
use crate::runtime::ParallelEngine;

/// Verdict of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl Verdict {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name,
            ok,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageKind {
    Thin,
    Thicken,
}

/// What [`AuditedEngine`] saw after one stability loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageAudit {
    pub kind: StageKind,
    /// Pixels that could still be deleted (thin) or added (thicken).
    pub leftover: usize,
    pub before: TopologySignature,
    pub after: TopologySignature,
}

impl StageAudit {
    pub fn ok(&self) -> bool {
        self.leftover == 0 && self.before == self.after
    }
}

/// Engine wrapper that rescans the result of every thin and thicken call for
/// remaining flippable pixels and recounts components on both sides.
#[derive(Debug)]
pub struct AuditedEngine<E> {
    inner: E,
    audits: Mutex<Vec<StageAudit>>,
}

impl<E: Engine> AuditedEngine<E> {
    pub fn new(inner: E) -> Self {
        AuditedEngine {
            inner,
            audits: Mutex::new(Vec::new()),
        }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn take_audits(&self) -> Vec<StageAudit> {
        std::mem::take(&mut *self.audits.lock().expect("audit log poisoned"))
    }

    fn record(&self, audit: StageAudit) {
        self.audits.lock().expect("audit log poisoned").push(audit);
    }
}

impl<E: Engine> Engine for AuditedEngine<E> {
    fn distance_map(&self, img: &BinaryImage, target: Target) -> SquaredDistanceMap {
        self.inner.distance_map(img, target)
    }

    fn thin(
        &self,
        z: &BinaryImage,
        w: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let out = self.inner.thin(z, w, dmap, conn, max_iter);
        self.record(StageAudit {
            kind: StageKind::Thin,
            leftover: deletable_pixels(&out, w, conn).map_or(usize::MAX, |p| p.len()),
            before: topology_of(z, conn),
            after: topology_of(&out, conn),
        });
        out
    }

    fn thicken(
        &self,
        y: &BinaryImage,
        v: &BinaryImage,
        dmap: &SquaredDistanceMap,
        conn: ConnectivityPair,
        max_iter: Option<usize>,
    ) -> BinaryImage {
        let out = self.inner.thicken(y, v, dmap, conn, max_iter);
        self.record(StageAudit {
            kind: StageKind::Thicken,
            leftover: addable_pixels(&out, v, conn).map_or(usize::MAX, |p| p.len()),
            before: topology_of(y, conn),
            after: topology_of(&out, conn),
        });
        out
    }
}

/// Independent exact oracle: exact column distances, then for every pixel a
/// minimum over all columns of its row. O(width² · height).
pub fn edt_row_oracle(img: &BinaryImage, target: Target) -> SquaredDistanceMap {
    let (w, h) = (img.width(), img.height());
    let inf = SquaredDistanceMap::inf_for(w, h);
    let mut col = vec![None::<u64>; w * h];
    for c in 0..w {
        let rows: Vec<usize> = (0..h).filter(|&r| target.selects(img.pixel(r, c))).collect();
        for r in 0..h {
            col[r * w + c] = rows.iter().map(|&t| t.abs_diff(r) as u64).min();
        }
    }
    let mut values = vec![inf; w * h];
    for r in 0..h {
        for c in 0..w {
            let best = (0..w)
                .filter_map(|k| col[r * w + k].map(|g| g * g + (k.abs_diff(c) as u64).pow(2)))
                .min();
            if let Some(d) = best {
                values[r * w + c] = d;
            }
        }
    }
    SquaredDistanceMap::from_values(w, h, values)
}

/// Checks the distance maps of `img` in both polarities: parallel equals
/// sequential bit for bit, and both equal the row oracle.
pub fn verify_edt(img: &BinaryImage, workers: usize) -> Vec<Verdict> {
    let mut out = Vec::new();
    let mut exact = Vec::new();
    let mut determinism = Vec::new();
    for target in [Target::Foreground, Target::Background] {
        let seq = meijster(img, target, 1);
        let par = meijster(img, target, workers);
        let oracle = edt_row_oracle(img, target);
        if seq != oracle {
            exact.push(format!("{target:?}: max error {:?}", seq.max_abs_diff(&oracle)));
        }
        if seq != par {
            determinism.push(format!("{target:?}: {workers} workers differ"));
        }
    }
    out.push(Verdict::new(
        "edt-exact",
        exact.is_empty(),
        if exact.is_empty() {
            "matches the oracle".into()
        } else {
            exact.join("; ")
        },
    ));
    out.push(Verdict::new(
        "edt-deterministic",
        determinism.is_empty(),
        if determinism.is_empty() {
            format!("1 and {workers} workers agree")
        } else {
            determinism.join("; ")
        },
    ));
    out
}

/// Runs the whole check suite for smoothing `x` with `params`.
///
/// `inject_fault` swaps the homotopic filter for the plain morphological one,
/// which is expected to fail the topology check on noisy inputs.
pub fn run_verify(x: &BinaryImage, params: &SmoothingParams, inject_fault: bool) -> Result<Report> {
    if let Some(c) = &params.constraints {
        c.validate(x)?;
    }
    let mut report = Report {
        verdicts: verify_edt(x, params.workers.max(1)),
    };

    let engine = AuditedEngine::new(ParallelEngine::new(params.workers.max(1)));
    let smoothed = if inject_fault {
        asf(x, params.radius)
    } else {
        hasf_with(&engine, x, params)?
    };
    let audits = engine.take_audits();

    let before = topology_of(x, params.conn);
    let after = topology_of(&smoothed, params.conn);
    report.verdicts.push(Verdict::new(
        "topology",
        before == after,
        format!(
            "{} connectivity: components {}/{} -> {}/{} (foreground/background)",
            params.conn, before.foreground, before.background, after.foreground, after.background
        ),
    ));

    let unstable: Vec<_> = audits.iter().filter(|a| a.leftover > 0).collect();
    report.verdicts.push(Verdict::new(
        "stability",
        unstable.is_empty(),
        format!("{} loops, {} left flippable pixels", audits.len(), unstable.len()),
    ));

    let broken = audits.iter().filter(|a| a.before != a.after).count();
    report.verdicts.push(Verdict::new(
        "stage-topology",
        broken == 0,
        format!("{} loops, {broken} changed topology", audits.len()),
    ));

    if let Some(c) = &params.constraints {
        let ok = c.keep.is_subset_of(&smoothed)? && c.exclude.is_disjoint_from(&smoothed)?;
        report
            .verdicts
            .push(Verdict::new("constraints", ok, "C kept and D avoided"));
    }
    Ok(report)
}
