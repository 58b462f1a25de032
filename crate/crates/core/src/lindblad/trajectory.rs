use rayon::prelude::*;

use super::dicke::{dicke_measures, DickeState};
use super::integrate::Evolution;
use crate::error::Result;
use crate::macromeasure::{measure_f, measure_i, Convention, OptimizeOptions};
use crate::numfmt::csv_row;
use crate::spincore::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub purity: f64,
    pub i: f64,
    pub f: f64,
}

/// Measures along an evolution.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub dt: f64,
    pub dicke: bool,
}

impl Trajectory {
    /// Header `t,purity,I,F`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,purity,I,F\n");
        for p in &self.points {
            s.push_str(&csv_row(&[p.t, p.purity, p.i, p.f]));
            s.push('\n');
        }
        s
    }

    /// Point with the smallest ℐ.
    pub fn min_i(&self) -> Option<&TrajectoryPoint> {
        self.points.iter().min_by(|a, b| a.i.total_cmp(&b.i))
    }
}

pub fn dicke_trajectory(
    ev: &Evolution<DickeState>,
    convention: Convention,
    opts: &OptimizeOptions,
) -> Result<Trajectory> {
    let points = ev
        .times
        .par_iter()
        .zip(ev.states.par_iter())
        .map(|(&t, s)| {
            let (i, f) = dicke_measures(s, convention, opts)?;
            Ok(TrajectoryPoint { t, purity: s.purity(), i, f })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { points, dt: ev.dt, dicke: true })
}

/// Full-space measures with the general optimizer.
pub fn full_trajectory(
    ev: &Evolution<DensityMatrix>,
    convention: Convention,
    opts: &OptimizeOptions,
) -> Result<Trajectory> {
    let points = ev
        .times
        .iter()
        .zip(&ev.states)
        .map(|(&t, s)| {
            let i = measure_i(s, convention, opts)?.value;
            let f = measure_f(s, convention, opts)?.value;
            Ok(TrajectoryPoint { t, purity: s.purity(), i, f })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { points, dt: ev.dt, dicke: false })
}
