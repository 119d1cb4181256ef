//! Closed-form energy per input for the wake-up system.
//!
//! Mean energy per classified input is
//! `E_avg = E_FE(V_DD) + P_mon(V_DD) * T_s + p_wake * E_service`, where
//! `p_wake = pi * p_wake|abn + (1 - pi) * p_wake|N` reweights the class
//! conditional wake rates to the deployment prior. Monitoring power splits
//! into a static part linear in `V_DD` and a dynamic part quadratic in
//! `V_DD`; front-end energy is quadratic unless a measured curve is given.
//!
//! Everything here is generic over [`Scalar`] so identities can be checked
//! exactly in [`crate::Rational`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::interp::Curve;
use crate::{Error, Result, Scalar};

/// Class-conditional wake probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WakeRates<T> {
    pub p_wake_abn: T,
    pub p_wake_n: T,
}

impl<T: Scalar> WakeRates<T> {
    pub fn new(p_wake_abn: T, p_wake_n: T) -> Result<Self> {
        let unit = |p: T| p >= T::zero() && p <= T::one();
        if !unit(p_wake_abn) || !unit(p_wake_n) {
            return Err(Error::InvalidInput(format!(
                "wake rates must lie in [0, 1], got {p_wake_abn:?}, {p_wake_n:?}"
            )));
        }
        Ok(Self { p_wake_abn, p_wake_n })
    }
}

/// Per-input wake probability under abnormal prior `pi`.
pub fn p_wake<T: Scalar>(rates: &WakeRates<T>, pi: T) -> T {
    pi * rates.p_wake_abn + (T::one() - pi) * rates.p_wake_n
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    default,
    deny_unknown_fields,
    bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>")
)]
pub struct EnergyParams<T: Scalar> {
    /// Front-end inference energy at `vdd_nominal` (J).
    pub e_fe_nominal: T,
    /// One wake-up service episode (J).
    pub e_service: T,
    /// Monitoring power at `vdd_nominal` (W).
    pub p_mon_nominal: T,
    pub static_frac: T,
    pub vdd_nominal: T,
    /// Abnormal-input probability.
    pub pi: T,
    /// Monitoring period (s).
    pub t_s: T,
    /// Measured `(vdd, joules)` front-end curve; overrides quadratic scaling.
    #[serde(default)]
    pub e_fe_curve: Option<Curve<T>>,
}

impl<T: Scalar> Default for EnergyParams<T> {
    /// 2.0 nJ front end, 3.2 uJ service, 2.9 uW monitoring (55 % static) at
    /// 1.2 V, pi = 0.01, T_s = 2 ms.
    fn default() -> Self {
        Self {
            e_fe_nominal: T::ratio(2, 1_000_000_000),
            e_service: T::ratio(32, 10_000_000),
            p_mon_nominal: T::ratio(29, 10_000_000),
            static_frac: T::ratio(55, 100),
            vdd_nominal: T::ratio(12, 10),
            pi: T::ratio(1, 100),
            t_s: T::ratio(2, 1000),
            e_fe_curve: None,
        }
    }
}

/// The three additive terms of the mean energy per input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown<T> {
    pub p_wake: T,
    pub front_end: T,
    pub monitoring: T,
    pub service: T,
    pub total: T,
}

impl<T: Scalar> EnergyParams<T> {
    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        let positive = [self.e_fe_nominal, self.e_service, self.p_mon_nominal, self.vdd_nominal];
        if positive.iter().any(|&v| !(v > z)) {
            return Err(Error::Config("energies, powers and vdd_nominal must be positive".into()));
        }
        let unit = |v: T| v >= z && v <= T::one();
        if !unit(self.pi) || !unit(self.static_frac) || self.t_s < z {
            return Err(Error::Config("pi and static_frac must lie in [0, 1], t_s >= 0".into()));
        }
        Ok(())
    }

    pub fn with_t_s(&self, t_s: T) -> Self {
        Self { t_s, ..self.clone() }
    }

    /// Monitoring power: static share linear in `vdd`, dynamic share quadratic.
    pub fn p_mon(&self, vdd: T) -> T {
        let r = vdd / self.vdd_nominal;
        self.p_mon_nominal * (self.static_frac * r + (T::one() - self.static_frac) * r * r)
    }

    /// Front-end inference energy; errors outside a supplied curve's range.
    pub fn e_fe(&self, vdd: T) -> Result<T> {
        match &self.e_fe_curve {
            Some(curve) => curve.eval_strict(vdd),
            None => {
                let r = vdd / self.vdd_nominal;
                Ok(self.e_fe_nominal * r * r)
            }
        }
    }

    pub fn e_mon(&self, vdd: T) -> T {
        self.p_mon(vdd) * self.t_s
    }

    pub fn e_avg(&self, vdd: T, rates: &WakeRates<T>) -> Result<EnergyBreakdown<T>> {
        let p = p_wake(rates, self.pi);
        Ok(self.e_avg_at(vdd, p)?)
    }

    /// Mean energy for a given per-input wake probability.
    pub fn e_avg_at(&self, vdd: T, p_wake: T) -> Result<EnergyBreakdown<T>> {
        let front_end = self.e_fe(vdd)?;
        let monitoring = self.e_mon(vdd);
        let service = p_wake * self.e_service;
        Ok(EnergyBreakdown {
            p_wake,
            front_end,
            monitoring,
            service,
            total: front_end + monitoring + service,
        })
    }

    /// Always-on baseline: the back end serves every input, monitoring at `vdd`.
    pub fn e_baseline(&self, vdd: T) -> T {
        self.e_service + self.e_mon(vdd)
    }
}

/// Supplies wake rates at a supply voltage, from a fixture or a simulation.
pub trait RatesSource<T: Scalar> {
    fn rates_at(&mut self, vdd: T) -> std::result::Result<WakeRates<T>, String>;
}

impl<T: Scalar, F> RatesSource<T> for F
where
    F: FnMut(T) -> std::result::Result<WakeRates<T>, String>,
{
    fn rates_at(&mut self, vdd: T) -> std::result::Result<WakeRates<T>, String> {
        self(vdd)
    }
}

/// One row of the rates fixture CSV `vdd,vddr,p_wake_abn,p_wake_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatesRow {
    pub vdd: f64,
    pub vddr: f64,
    pub p_wake_abn: f64,
    pub p_wake_n: f64,
}

/// Wake-rate fixture shipped with the crate: regimes A (1.2 V, 2.4 V),
/// B (1.2 V, 1.5 V) and C (0.8 V, 2.4 V), plus a `vdd` sweep at 2.4 V.
pub const SHIPPED_RATES_CSV: &str = include_str!("../fixtures/regime_rates.csv");

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatesTable {
    pub rows: Vec<RatesRow>,
    /// Restrict lookups to this programming condition.
    pub vddr: Option<f64>,
}

const VOLT_TOL: f64 = 1e-9;

impl RatesTable {
    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["vdd", "vddr", "p_wake_abn", "p_wake_n"] {
            return Err(Error::Parse {
                offset: 0,
                message: "rates CSV header must be vdd,vddr,p_wake_abn,p_wake_n".into(),
            });
        }
        let mut rows = Vec::new();
        for rec in r.deserialize() {
            let row: RatesRow = rec?;
            WakeRates::new(row.p_wake_abn, row.p_wake_n)?;
            rows.push(row);
        }
        Ok(Self { rows, vddr: None })
    }

    pub fn shipped() -> Self {
        Self::from_csv_reader(SHIPPED_RATES_CSV.as_bytes()).expect("shipped fixture parses")
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(f)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn for_vddr(mut self, vddr: f64) -> Self {
        self.vddr = Some(vddr);
        self
    }

    pub fn lookup(&self, vdd: f64, vddr: Option<f64>) -> std::result::Result<WakeRates<f64>, String> {
        let vddr = vddr.or(self.vddr);
        let hits: Vec<&RatesRow> = self
            .rows
            .iter()
            .filter(|r| (r.vdd - vdd).abs() < VOLT_TOL)
            .filter(|r| vddr.map_or(true, |v| (r.vddr - v).abs() < VOLT_TOL))
            .collect();
        match hits.as_slice() {
            [row] => Ok(WakeRates {
                p_wake_abn: row.p_wake_abn,
                p_wake_n: row.p_wake_n,
            }),
            [] => Err(format!("no rates for vdd={vdd} vddr={vddr:?}")),
            _ => Err(format!("ambiguous rates for vdd={vdd}: give a vddr")),
        }
    }
}

impl RatesSource<f64> for RatesTable {
    fn rates_at(&mut self, vdd: f64) -> std::result::Result<WakeRates<f64>, String> {
        self.lookup(vdd, None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint<T> {
    pub breakdown: EnergyBreakdown<T>,
    pub e_baseline: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub vdd: T,
    pub t_s: T,
    /// `Err` marks a grid point whose rates or energy could not be computed.
    pub outcome: std::result::Result<SweepPoint<T>, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable<T> {
    pub rows: Vec<SweepRow<T>>,
    /// Per `t_s` value, the row index of the lowest `e_avg` (lowest `vdd`
    /// index on ties), or `None` when every point failed.
    pub argmin: Vec<(T, Option<usize>)>,
}

/// Evaluates `e_avg` and the always-on baseline over a `vdd x t_s` grid.
/// Rates are requested once per `vdd`; failures mark points and the sweep
/// continues.
pub fn sweep<T: Scalar, S: RatesSource<T> + ?Sized>(
    params: &EnergyParams<T>,
    vdd_grid: &[T],
    t_s_grid: &[T],
    source: &mut S,
) -> Result<SweepTable<T>> {
    if vdd_grid.is_empty() || t_s_grid.is_empty() {
        return Err(Error::Config("sweep grids must be non-empty".into()));
    }
    let rates: Vec<_> = vdd_grid.iter().map(|&v| source.rates_at(v)).collect();
    let mut rows = Vec::with_capacity(vdd_grid.len() * t_s_grid.len());
    let mut argmin = Vec::with_capacity(t_s_grid.len());
    for &t_s in t_s_grid {
        let p = params.with_t_s(t_s);
        let mut best: Option<(usize, T)> = None;
        for (&vdd, r) in vdd_grid.iter().zip(&rates) {
            let outcome = r.clone().and_then(|r| {
                let breakdown = p.e_avg(vdd, &r).map_err(|e| e.to_string())?;
                Ok(SweepPoint {
                    breakdown,
                    e_baseline: p.e_baseline(vdd),
                })
            });
            if let Ok(pt) = &outcome {
                if best.map_or(true, |(_, e)| pt.breakdown.total < e) {
                    best = Some((rows.len(), pt.breakdown.total));
                }
            }
            rows.push(SweepRow { vdd, t_s, outcome });
        }
        argmin.push((t_s, best.map(|(i, _)| i)));
    }
    Ok(SweepTable { rows, argmin })
}

impl<T: Scalar> SweepTable<T> {
    /// CSV `vdd,t_s,p_wake,e_fe,e_mon,e_service_term,e_avg,e_baseline`;
    /// failed points carry `nan`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vdd,t_s,p_wake,e_fe,e_mon,e_service_term,e_avg,e_baseline\n");
        for row in &self.rows {
            let head = format!("{},{}", row.vdd.to_f64_lossy(), row.t_s.to_f64_lossy());
            match &row.outcome {
                Ok(pt) => {
                    let b = &pt.breakdown;
                    let vals = [b.p_wake, b.front_end, b.monitoring, b.service, b.total, pt.e_baseline];
                    let vals: Vec<String> = vals.iter().map(|v| v.to_f64_lossy().to_string()).collect();
                    s.push_str(&format!("{head},{}\n", vals.join(",")));
                }
                Err(_) => s.push_str(&format!("{head},nan,nan,nan,nan,nan,nan\n")),
            }
        }
        s
    }

    pub fn best(&self, t_s_index: usize) -> Option<&SweepRow<T>> {
        self.argmin.get(t_s_index)?.1.map(|i| &self.rows[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn p_wake_mixing() {
        let r = WakeRates::new(0.998f64, 0.0188).unwrap();
        assert_eq!(p_wake(&r, 0.0), 0.0188);
        assert!((p_wake(&r, 0.01) - 0.028592).abs() < 1e-12);
        let b = WakeRates::new(1.0f64, 0.225).unwrap();
        assert!((p_wake(&b, 0.01) - 0.23275).abs() < 1e-12);
    }

    #[test]
    fn monitoring_power_scaling() {
        let p = EnergyParams::<f64>::default();
        assert!(close(p.p_mon(1.2), 2.9e-6, 1e-12));
        assert!(close(p.p_mon(0.6), 1.12375e-6, 1e-12));
        assert!(p.p_mon(1e-9) < 1e-14);
    }

    #[test]
    fn front_end_energy_models() {
        let p = EnergyParams::<f64>::default();
        assert!(close(p.e_fe(1.2).unwrap(), 2.0e-9, 1e-12));
        assert!(close(p.e_fe(0.6).unwrap(), 0.5e-9, 1e-12));
        let mut q = p.clone();
        q.e_fe_curve = Some(Curve::new(vec![(0.8, 1.0e-9), (1.2, 2.0e-9)]).unwrap());
        assert!(close(q.e_fe(1.0).unwrap(), 1.5e-9, 1e-12));
        assert!(matches!(q.e_fe(0.7), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn e_avg_decomposition_sums_exactly() {
        let p = EnergyParams::<f64>::default();
        let b = p.e_avg(1.2, &WakeRates::new(0.998, 0.0188).unwrap()).unwrap();
        assert_eq!(b.front_end + b.monitoring + b.service, b.total);
        assert!(close(b.total, 99.2944e-9, 1e-9), "{}", b.total);
    }

    #[test]
    fn front_end_only_when_nothing_else_costs() {
        let p = EnergyParams::<f64>::default().with_t_s(0.0);
        let b = p.e_avg_at(1.2, 0.0).unwrap();
        assert_eq!(b.total, b.front_end);
    }

    #[test]
    fn rational_slopes_are_exact() {
        let p = EnergyParams::<Rational>::default();
        let vdd = Rational::new(11, 10);
        let a = p.e_avg_at(vdd, Rational::new(3, 100)).unwrap().total;
        let b = p.e_avg_at(vdd, Rational::new(4, 100)).unwrap().total;
        assert_eq!(b - a, Rational::new(32, 1_000_000_000));
        let t1 = p.with_t_s(Rational::new(1, 1)).e_avg_at(vdd, Rational::new(0, 1)).unwrap().total;
        let t0 = p.with_t_s(Rational::new(0, 1)).e_avg_at(vdd, Rational::new(0, 1)).unwrap().total;
        assert_eq!(t1 - t0, p.p_mon(vdd));
    }

    #[test]
    fn ideal_floor() {
        let r = WakeRates::new(1.0, 0.0).unwrap();
        assert_eq!(p_wake(&r, 0.01), 0.01);
    }

    #[test]
    fn energy_increases_with_vdd() {
        let p = EnergyParams::<f64>::default();
        let r = WakeRates::new(0.9, 0.05).unwrap();
        let mut prev = 0.0;
        for i in 0..=14 {
            let e = p.e_avg(0.5 + 0.05 * i as f64, &r).unwrap().total;
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn shipped_fixture_lookup() {
        let t = RatesTable::shipped();
        assert!(t.lookup(1.2, None).is_err(), "two vddr rows at 1.2 V");
        let a = t.lookup(1.2, Some(2.4)).unwrap();
        assert_eq!((a.p_wake_abn, a.p_wake_n), (0.998, 0.0188));
        assert!(t.lookup(0.5, Some(2.4)).is_err());
    }

    #[test]
    fn sweep_marks_failures_and_continues() {
        let p = EnergyParams::<f64>::default();
        let mut src = |v: f64| {
            if v < 0.75 {
                Err("no data".to_string())
            } else {
                Ok(WakeRates { p_wake_abn: 1.0, p_wake_n: 0.02 })
            }
        };
        let t = sweep(&p, &[0.7, 0.8, 1.2], &[2e-3], &mut src).unwrap();
        assert!(t.rows[0].outcome.is_err());
        assert_eq!(t.argmin[0].1, Some(1));
        assert!(t.to_csv().lines().nth(1).unwrap().ends_with("nan"));
    }

    #[test]
    fn empty_grid_is_rejected() {
        let p = EnergyParams::<f64>::default();
        assert!(sweep(&p, &[], &[1.0], &mut RatesTable::shipped()).is_err());
    }
}
