//! Reduction of crease bending tests to torsional stiffness.
//!
//! A specimen is clamped on one facet and loaded at the end of the other.
//! The load component perpendicular to the facet times its arm, divided by
//! the change in fold angle, gives the crease's torsional stiffness; dividing
//! by the crease length gives the per-unit-length value used by the bellow
//! model.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest fold-angle change that still gives a usable stiffness, rad.
pub const MIN_DEFLECTION: f64 = 1e-6;

/// One bending measurement. Angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreaseMeasurement {
    pub f_perp: f64,
    pub d_perp: f64,
    pub theta0: f64,
    pub theta_l: f64,
    pub sample_length: f64,
    /// Groups measurements taken on the same specimen.
    pub specimen: Option<String>,
}

impl CreaseMeasurement {
    pub fn new(f_perp: f64, d_perp: f64, theta0: f64, theta_l: f64, sample_length: f64) -> Self {
        Self {
            f_perp,
            d_perp,
            theta0,
            theta_l,
            sample_length,
            specimen: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMeasurement(msg));
        let values = [
            self.f_perp,
            self.d_perp,
            self.theta0,
            self.theta_l,
            self.sample_length,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return bad("non-finite value".into());
        }
        if !(self.d_perp > 0.0) {
            return bad(format!("moment arm {} m must be positive", self.d_perp));
        }
        if !(self.sample_length > 0.0) {
            return bad(format!(
                "sample length {} m must be positive",
                self.sample_length
            ));
        }
        if !(self.theta_l < self.theta0) {
            return bad(format!(
                "loaded angle {} rad must be below the resting angle {} rad",
                self.theta_l, self.theta0
            ));
        }
        Ok(())
    }
}

/// Torsional stiffness `F_perp d_perp / (theta0 - theta_l)`, N m/rad.
pub fn torsional_stiffness(meas: &CreaseMeasurement) -> Result<f64> {
    let deflection = meas.theta0 - meas.theta_l;
    if !(deflection > MIN_DEFLECTION) {
        return Err(Error::DegenerateDeflection(deflection));
    }
    meas.validate()?;
    Ok(meas.f_perp * meas.d_perp / deflection)
}

/// Stiffness per unit crease length, N/rad.
pub fn per_unit_length(k_theta: f64, sample_length: f64) -> f64 {
    k_theta / sample_length
}

/// How stiffness varies with the loaded angle across a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StiffnessTrend {
    /// All values equal.
    Flat,
    /// Stiffness rises as the crease closes (loaded angle falls).
    Stiffening,
    /// Stiffness falls as the crease closes.
    Softening,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessRecord {
    #[serde(rename = "theta_l_deg")]
    pub theta_l_deg: f64,
    #[serde(rename = "k_theta_Nm_per_rad")]
    pub k_theta: f64,
    #[serde(rename = "k_hat_N_per_rad")]
    pub k_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecimenReport {
    pub specimen: Option<String>,
    /// Absent for a single measurement.
    pub trend: Option<StiffnessTrend>,
    /// Sorted by increasing loaded angle.
    pub records: Vec<StiffnessRecord>,
}

/// Relative tolerance below which neighbouring stiffness values count as
/// equal when classifying a trend.
const TREND_TOL: f64 = 1e-9;

fn classify(records: &[StiffnessRecord]) -> StiffnessTrend {
    let (mut up, mut down) = (false, false);
    for w in records.windows(2) {
        let scale = w[0].k_theta.abs().max(w[1].k_theta.abs());
        let diff = w[1].k_theta - w[0].k_theta;
        if diff > TREND_TOL * scale {
            up = true;
        } else if diff < -TREND_TOL * scale {
            down = true;
        }
    }
    match (up, down) {
        (false, false) => StiffnessTrend::Flat,
        // Records run toward larger angles, so falling k means stiffening.
        (false, true) => StiffnessTrend::Stiffening,
        (true, false) => StiffnessTrend::Softening,
        (true, true) => StiffnessTrend::Mixed,
    }
}

/// Stiffness against loaded angle for one specimen's measurements.
pub fn stiffness_vs_angle_report(measurements: &[CreaseMeasurement]) -> Result<SpecimenReport> {
    if measurements.len() < 2 {
        return Err(Error::InvalidMeasurement(
            "a stiffness series needs at least two measurements".into(),
        ));
    }
    let mut records = measurements
        .iter()
        .map(|m| {
            let k_theta = torsional_stiffness(m)?;
            Ok(StiffnessRecord {
                theta_l_deg: m.theta_l.to_degrees(),
                k_theta,
                k_hat: per_unit_length(k_theta, m.sample_length),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| a.theta_l_deg.total_cmp(&b.theta_l_deg));
    Ok(SpecimenReport {
        specimen: measurements[0].specimen.clone(),
        trend: Some(classify(&records)),
        records,
    })
}

/// Full reduction of a measurement file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaleoReport {
    pub specimens: Vec<SpecimenReport>,
}

/// Groups measurements by specimen label, keeping first-appearance order,
/// and reports each group. A single-measurement group gets no trend.
pub fn reduce_measurements(measurements: &[CreaseMeasurement]) -> Result<PaleoReport> {
    let mut groups: Vec<(Option<String>, Vec<CreaseMeasurement>)> = Vec::new();
    for m in measurements {
        match groups.iter_mut().find(|(label, _)| *label == m.specimen) {
            Some((_, members)) => members.push(m.clone()),
            None => groups.push((m.specimen.clone(), vec![m.clone()])),
        }
    }
    let specimens = groups
        .into_iter()
        .map(|(label, members)| {
            if members.len() >= 2 {
                return stiffness_vs_angle_report(&members);
            }
            let m = &members[0];
            let k_theta = torsional_stiffness(m)?;
            Ok(SpecimenReport {
                specimen: label,
                trend: None,
                records: vec![StiffnessRecord {
                    theta_l_deg: m.theta_l.to_degrees(),
                    k_theta,
                    k_hat: per_unit_length(k_theta, m.sample_length),
                }],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if specimens.is_empty() {
        return Err(Error::InvalidMeasurement("no measurements".into()));
    }
    Ok(PaleoReport { specimens })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CsvRow {
    #[serde(rename = "F_perp_N")]
    f_perp: f64,
    #[serde(rename = "d_perp_m")]
    d_perp: f64,
    theta0_deg: f64,
    theta_l_deg: f64,
    length_m: f64,
    #[serde(default)]
    specimen: Option<String>,
}

/// Reads measurements from CSV with header
/// `F_perp_N,d_perp_m,theta0_deg,theta_l_deg,length_m` and an optional
/// trailing `specimen` column.
pub fn read_measurements_csv<R: Read>(reader: R) -> Result<Vec<CreaseMeasurement>> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in csv.deserialize::<CsvRow>().enumerate() {
        let row = row.map_err(|e| Error::InvalidMeasurement(format!("row {}: {e}", i + 1)))?;
        let meas = CreaseMeasurement {
            f_perp: row.f_perp,
            d_perp: row.d_perp,
            theta0: row.theta0_deg.to_radians(),
            theta_l: row.theta_l_deg.to_radians(),
            sample_length: row.length_m,
            specimen: row.specimen.filter(|s| !s.is_empty()),
        };
        meas.validate()
            .map_err(|e| Error::InvalidMeasurement(format!("row {}: {e}", i + 1)))?;
        out.push(meas);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn unit_and_linear_cases() {
        let m = CreaseMeasurement::new(1.0, 1.0, 1.5, 0.5, 1.0);
        assert_eq!(torsional_stiffness(&m).unwrap(), 1.0);
        let m2 = CreaseMeasurement::new(2.0, 1.0, 1.5, 0.5, 1.0);
        assert_eq!(torsional_stiffness(&m2).unwrap(), 2.0);
        assert_eq!(per_unit_length(0.37, 1.0), 0.37);
    }

    #[test]
    fn degenerate_and_invalid() {
        let m = CreaseMeasurement::new(1.0, 0.05, FRAC_PI_2, FRAC_PI_2 - 5e-7, 0.06);
        assert!(matches!(
            torsional_stiffness(&m),
            Err(Error::DegenerateDeflection(_))
        ));
        let m = CreaseMeasurement::new(1.0, 0.0, FRAC_PI_2, 1.0, 0.06);
        assert!(matches!(
            torsional_stiffness(&m),
            Err(Error::InvalidMeasurement(_))
        ));
        assert!(
            stiffness_vs_angle_report(&[CreaseMeasurement::new(1.0, 0.05, 1.5, 1.0, 0.06)])
                .is_err()
        );
    }

    #[test]
    fn trend_flags() {
        let same = CreaseMeasurement::new(0.1, 0.05, FRAC_PI_2, 1.2, 0.06);
        let r = stiffness_vs_angle_report(&[same.clone(), same]).unwrap();
        assert_eq!(r.trend, Some(StiffnessTrend::Flat));
        assert_eq!(r.records[0], r.records[1]);

        // k = 0.0146, 0.0270, 0.0526 N m/rad as the crease closes.
        let series: Vec<_> = [(0.05, 1.4), (0.20, 1.2), (0.60, 1.0)]
            .iter()
            .map(|&(f, th)| CreaseMeasurement::new(f, 0.05, FRAC_PI_2, th, 0.06))
            .collect();
        let r = stiffness_vs_angle_report(&series).unwrap();
        assert_eq!(r.trend, Some(StiffnessTrend::Stiffening));
        assert!(r
            .records
            .windows(2)
            .all(|w| w[0].theta_l_deg < w[1].theta_l_deg));
    }

    #[test]
    fn csv_input() {
        let text = "F_perp_N,d_perp_m,theta0_deg,theta_l_deg,length_m,specimen\n\
                    0.1,0.05,90,80,0.06,soft\n\
                    0.2,0.05,90,70,0.06,soft\n\
                    0.5,0.05,90,80,0.06,stiff\n";
        let ms = read_measurements_csv(text.as_bytes()).unwrap();
        assert_eq!(ms.len(), 3);
        assert!((ms[0].theta0 - FRAC_PI_2).abs() < 1e-15);
        let report = reduce_measurements(&ms).unwrap();
        assert_eq!(report.specimens.len(), 2);
        assert_eq!(report.specimens[0].specimen.as_deref(), Some("soft"));
        assert_eq!(report.specimens[1].records.len(), 1);
        assert_eq!(report.specimens[1].trend, None);

        let plain = "F_perp_N,d_perp_m,theta0_deg,theta_l_deg,length_m\n0.1,0.05,90,80,0.06\n";
        assert_eq!(
            read_measurements_csv(plain.as_bytes()).unwrap()[0].specimen,
            None
        );

        let bad = "F_perp_N,d_perp_m,theta0_deg,theta_l_deg\n0.1,0.05,90,80\n";
        assert!(read_measurements_csv(bad.as_bytes()).is_err());
        let inverted = "F_perp_N,d_perp_m,theta0_deg,theta_l_deg,length_m\n0.1,0.05,80,90,0.06\n";
        assert!(read_measurements_csv(inverted.as_bytes()).is_err());
    }
}
