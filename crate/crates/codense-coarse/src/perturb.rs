use crate::error::CoarseError;
use crate::gamma::{gamma_prefix, GammaImage};
use codense_core::{FiniteBitSet, PartialSeq, Rational};
use codense_layout::{LayoutSchedule, SymbolicSet};
use num::{BigInt, One};
use rand::Rng;
use std::fmt::Write;

/// Per-row comparison of the images of a sequence and its perturbation.
///
/// `window_density` is the exact windowed upper density of the image
/// symmetric difference over the row's coding interval; `bound_holds` records
/// whether it stays strictly below the coded fraction plus the row's error
/// budget `2^{-b}`.
#[derive(Clone, Debug)]
pub struct RowReport {
    pub row: usize,
    pub n: u32,
    pub s: u32,
    /// Fraction of the row's source interval touched by the perturbation.
    pub interval_fraction: Rational,
    /// Fraction of payload bits that changed.
    pub code_fraction: Rational,
    pub window_density: Rational,
    pub bound_holds: bool,
}

#[derive(Clone, Debug, Default)]
pub struct PerturbReport {
    pub rows: Vec<RowReport>,
}

impl PerturbReport {
    pub fn all_bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.bound_holds)
    }

    /// One line per row, rationals reduced and printed as `num/den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "row,n_i,s_i,interval_fraction,code_fraction,window_density_num,window_density_den,bound_holds\n",
        );
        for r in &self.rows {
            let iv = r.interval_fraction.reduced();
            let cf = r.code_fraction.reduced();
            let wd = r.window_density.reduced();
            writeln!(
                out,
                "{},{},{},{}/{},{}/{},{},{},{}",
                r.row,
                r.n,
                r.s,
                iv.numer(),
                iv.denom(),
                cf.numer(),
                cf.denom(),
                wd.numer(),
                wd.denom(),
                r.bound_holds
            )
            .expect("string writes are infallible");
        }
        out
    }
}

/// Rewrites `f` at every listed site to a fresh value drawn uniformly from
/// `[0, max_value)` minus the old value. Every site must be defined and
/// `max_value` must leave an alternative.
pub fn perturb_seq(
    f: &PartialSeq,
    sites: &FiniteBitSet,
    max_value: u64,
    rng: &mut impl Rng,
) -> Result<PartialSeq, CoarseError> {
    assert!(max_value >= 2, "a perturbation needs at least two values to choose from");
    let mut out = f.clone();
    for x in sites.iter_ones() {
        let old = f.get(x).ok_or(CoarseError::PerturbSiteUndefined(x as u64))?;
        let v = if old < max_value {
            let v = rng.gen_range(0..max_value - 1);
            if v >= old {
                v + 1
            } else {
                v
            }
        } else {
            rng.gen_range(0..max_value)
        };
        out.set(x, Some(v));
    }
    Ok(out)
}

/// Compares the images of `f` and an already-derived `f_prime` row by row.
///
/// The image difference vanishes on every fallow gap and repeats the payload
/// difference on every coding interval, so it is itself a laid-out set and
/// its row densities are computed exactly. Rows whose interval ends exceed
/// every representable magnitude cannot be measured and err.
pub fn compare_images(
    f: &PartialSeq,
    f_prime: &PartialSeq,
    sites: &FiniteBitSet,
    schedule: &LayoutSchedule,
    rows: usize,
) -> Result<PerturbReport, CoarseError> {
    let a = gamma_prefix(f, schedule, rows)?;
    let b = gamma_prefix(f_prime, schedule, rows)?;
    let diff_payloads: Vec<FiniteBitSet> = a
        .set()
        .payloads()
        .iter()
        .zip(b.set().payloads())
        .map(|(p, q)| p.symdiff(q))
        .collect();
    let diff = SymbolicSet::assemble(diff_payloads, schedule)?;
    let mut report = PerturbReport::default();
    for i in 0..rows {
        report.rows.push(row_report(&a, &b, &diff, sites, i)?);
    }
    Ok(report)
}

fn row_report(
    a: &GammaImage,
    b: &GammaImage,
    diff: &SymbolicSet,
    sites: &FiniteBitSet,
    i: usize,
) -> Result<RowReport, CoarseError> {
    let row = &a.set().rows()[i];
    let width = row.width();
    let lo = width; // I_n = [2^n, 2^{n+1}) and the payload width is 2^n
    let touched = sites.count_range(lo.min(sites.len()), (2 * width).min(sites.len()));
    let changed = a.set().payloads()[i].symdiff_card(&b.set().payloads()[i]);
    let window_density = diff.window_density_row(i)?;
    let budget = Rational::new(BigInt::one(), BigInt::one() << row.b);
    let code_fraction = Rational::new(changed.into(), width.into());
    let bound_holds = window_density < code_fraction.clone() + budget;
    Ok(RowReport {
        row: i,
        n: row.n,
        s: row.s,
        interval_fraction: Rational::new(touched.into(), width.into()),
        code_fraction,
        window_density,
        bound_holds,
    })
}

/// Draws a perturbation of `f` on `sites` and compares the two images.
pub fn perturb_experiment(
    f: &PartialSeq,
    sites: &FiniteBitSet,
    schedule: &LayoutSchedule,
    rows: usize,
    max_value: u64,
    rng: &mut impl Rng,
) -> Result<PerturbReport, CoarseError> {
    let f_prime = perturb_seq(f, sites, max_value, rng)?;
    compare_images(f, &f_prime, sites, schedule, rows)
}
