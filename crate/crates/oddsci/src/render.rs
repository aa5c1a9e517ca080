//! Text, JSON and CSV renderings of intervals, distributions, coverage
//! curves and minimal sample sizes.

use serde::Serialize;

use oddsci_core::{
    ConfidenceLevel, CoverageCurve, ExtendedOddsRatio, Method, OrInterval, OutcomeDistribution,
    Sidedness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::Standard => "standard",
    }
}

fn sided_name(s: Sidedness) -> &'static str {
    match s {
        Sidedness::TwoSided => "two_sided",
        Sidedness::LeftOpenAtZero => "left_open_at_zero",
        Sidedness::RightOpenAtInfinity => "right_open_at_infinity",
        Sidedness::Unbounded => "unbounded",
    }
}

fn fixed(x: f64, decimals: usize) -> String {
    if x.is_infinite() {
        "Inf".to_string()
    } else {
        format!("{x:.decimals$}")
    }
}

/// An interval together with the table it was computed from.
#[derive(Debug, Clone, Copy)]
pub struct IntervalReport {
    pub method: Method,
    pub interval: OrInterval,
    pub level: ConfidenceLevel,
    pub or_hat: ExtendedOddsRatio,
    pub n_a: u32,
    pub n_b: u32,
}

#[derive(Serialize)]
struct IntervalJson {
    method: &'static str,
    left: f64,
    right: Option<f64>,
    sided: &'static str,
    level: f64,
    or_hat: Option<f64>,
    n_a: u32,
    n_b: u32,
}

impl IntervalReport {
    /// Two lines: the interval and the sample odds ratio. Exact ends use 5
    /// decimals, standard ends 4.
    pub fn text(&self) -> String {
        let (prefix, decimals) = match self.method {
            Method::Exact => ("Confidence interval", 5),
            Method::Standard => ("Standard confidence interval", 4),
        };
        format!(
            "{prefix} for odds ratio ({},{}) at the confidence level {}\n\
             Sample odds ratio equals {}; n1={}, n2={}\n",
            fixed(self.interval.left(), decimals),
            fixed(self.interval.right(), decimals),
            self.level.get(),
            fixed(self.or_hat.value(), 4),
            self.n_a,
            self.n_b,
        )
    }

    pub fn json(&self) -> String {
        let j = IntervalJson {
            method: method_name(self.method),
            left: self.interval.left(),
            right: finite(self.interval.right()),
            sided: sided_name(self.interval.sided()),
            level: self.level.get(),
            or_hat: finite(self.or_hat.value()),
            n_a: self.n_a,
            n_b: self.n_b,
        };
        to_json(&j)
    }

    pub fn csv(&self) -> String {
        format!(
            "method,left,right,level,or_hat,n_a,n_b\n{},{},{},{},{},{},{}\n",
            method_name(self.method),
            self.interval.left(),
            csv_num(self.interval.right()),
            self.level.get(),
            csv_num(self.or_hat.value()),
            self.n_a,
            self.n_b,
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Json => self.json(),
            Format::Csv => self.csv(),
        }
    }
}

/// Infinite values are left empty in CSV.
fn csv_num(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct AtomJson {
    or_hat: Option<f64>,
    prob: f64,
    cdf: f64,
    cdf_strict: f64,
}

#[derive(Serialize)]
struct DistributionJson {
    r: f64,
    n_a: u32,
    n_b: u32,
    total: f64,
    support: Vec<AtomJson>,
}

fn atoms(dist: &OutcomeDistribution) -> impl Iterator<Item = AtomJson> + '_ {
    dist.cdf_table()
        .zip(dist.support())
        .map(|((t, f, g), (_, mass))| AtomJson {
            or_hat: finite(t.value()),
            prob: mass,
            cdf: f,
            cdf_strict: g,
        })
}

/// One row per support point of the estimator with its probability and the
/// two cumulative sums `P(OR̂ <= t)` and `P(OR̂ < t)`.
pub fn distribution(dist: &OutcomeDistribution, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!(
                "Distribution of the sample odds ratio at r = {} (n1={}, n2={})\n{:>12} {:>14} {:>14} {:>14}\n",
                dist.r(),
                dist.n_a(),
                dist.n_b(),
                "or_hat",
                "prob",
                "cdf",
                "cdf_strict"
            );
            for a in atoms(dist) {
                let t = a.or_hat.map_or("Inf".to_string(), |v| format!("{v:.6}"));
                s += &format!(
                    "{t:>12} {:>14.10} {:>14.10} {:>14.10}\n",
                    a.prob, a.cdf, a.cdf_strict
                );
            }
            s
        }
        Format::Json => to_json(&DistributionJson {
            r: dist.r(),
            n_a: dist.n_a(),
            n_b: dist.n_b(),
            total: dist.total(),
            support: atoms(dist).collect(),
        }),
        Format::Csv => {
            let mut s = String::from("or_hat,prob,cdf,cdf_strict\n");
            for a in atoms(dist) {
                let t = a.or_hat.map_or(String::new(), |v| v.to_string());
                s += &format!("{t},{},{},{}\n", a.prob, a.cdf, a.cdf_strict);
            }
            s
        }
    }
}

#[derive(Serialize)]
struct PointJson {
    r: f64,
    coverage: f64,
}

#[derive(Serialize)]
struct CurveJson {
    method: &'static str,
    n_a: u32,
    n_b: u32,
    level: f64,
    points: Vec<PointJson>,
}

/// CSV with header `r,coverage` at full precision; text adds a title line.
pub fn curve(curve: &CoverageCurve, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = format!(
                "Coverage of the {} interval at level {} (n1={}, n2={})\n{:>12} {:>12}\n",
                method_name(curve.method),
                curve.level.get(),
                curve.n_a,
                curve.n_b,
                "r",
                "coverage"
            );
            for p in &curve.points {
                s += &format!("{:>12.6} {:>12.6}\n", p.r, p.coverage);
            }
            s
        }
        Format::Json => to_json(&CurveJson {
            method: method_name(curve.method),
            n_a: curve.n_a,
            n_b: curve.n_b,
            level: curve.level.get(),
            points: curve
                .points
                .iter()
                .map(|p| PointJson {
                    r: p.r,
                    coverage: p.coverage,
                })
                .collect(),
        }),
        Format::Csv => {
            let mut s = String::from("r,coverage\n");
            for p in &curve.points {
                s += &format!("{},{}\n", p.r, p.coverage);
            }
            s
        }
    }
}

#[derive(Serialize)]
struct MinSizeJson {
    level: f64,
    minimal_n_a: u64,
}

pub fn minimal_size(level: ConfidenceLevel, n: u64, format: Format) -> String {
    match format {
        Format::Text => format!("{n}\n"),
        Format::Json => to_json(&MinSizeJson {
            level: level.get(),
            minimal_n_a: n,
        }),
        Format::Csv => format!("level,minimal_n_a\n{},{n}\n", level.get()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use oddsci_core::{Grid, Model};

    fn report(left: f64, right: f64, or_hat: ExtendedOddsRatio) -> IntervalReport {
        IntervalReport {
            method: Method::Exact,
            interval: OrInterval::new(left, right).unwrap(),
            level: ConfidenceLevel::new(0.95).unwrap(),
            or_hat,
            n_a: 60,
            n_b: 70,
        }
    }

    #[test]
    fn interval_text_layout() {
        let r = report(
            0.000613811,
            0.576348,
            ExtendedOddsRatio::ratio(7 * 7, 53 * 63).unwrap(),
        );
        assert_eq!(
            r.text(),
            "Confidence interval for odds ratio (0.00061,0.57635) at the confidence level 0.95\n\
             Sample odds ratio equals 0.0147; n1=60, n2=70\n"
        );
        let r = report(1.5, f64::INFINITY, ExtendedOddsRatio::Infinite);
        assert!(r
            .text()
            .starts_with("Confidence interval for odds ratio (1.50000,Inf)"));
        assert!(r.text().contains("equals Inf;"));
    }

    #[test]
    fn interval_json_uses_null_for_infinity() {
        let r = report(0.0, f64::INFINITY, ExtendedOddsRatio::ONE);
        let v: serde_json::Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(v["left"], 0.0);
        assert!(v["right"].is_null());
        assert_eq!(v["sided"], "unbounded");
        assert_eq!(v["or_hat"], 1.0);
        assert!(r
            .csv()
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("exact,0,,0.95,1,"));
    }

    #[test]
    fn distribution_csv_rows_match_support() {
        let d = Model::new(2, 3).unwrap().compute(1.5).unwrap();
        let csv = distribution(&d, Format::Csv);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "or_hat,prob,cdf,cdf_strict");
        assert_eq!(lines.len(), d.support_len() + 1);
        assert!(lines[1].starts_with("0,"));
        assert!(lines.last().unwrap().starts_with(','));
        let last: Vec<f64> = lines.last().unwrap()[1..]
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((last[1] - 1.0).abs() < 1e-9);
        let v: serde_json::Value = serde_json::from_str(&distribution(&d, Format::Json)).unwrap();
        assert_eq!(v["support"].as_array().unwrap().len(), d.support_len());
    }

    #[test]
    fn curve_csv_round_trips() {
        let m = Model::new(3, 3).unwrap();
        let lv = ConfidenceLevel::new(0.9).unwrap();
        let grid = Grid::Linear {
            min: 0.1,
            max: 2.0,
            points: 4,
        };
        let c = oddsci_core::coverage_curve(&m, Method::Standard, lv, &grid).unwrap();
        let csv = curve(&c, Format::Csv);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r,coverage"));
        for (line, p) in lines.zip(&c.points) {
            let (r, cov) = line.split_once(',').unwrap();
            assert_eq!(r.parse::<f64>().unwrap(), p.r);
            assert_eq!(cov.parse::<f64>().unwrap(), p.coverage);
        }
    }

    #[test]
    fn minimal_size_formats() {
        let lv = ConfidenceLevel::new(0.99).unwrap();
        assert_eq!(minimal_size(lv, 200, Format::Text), "200\n");
        let v: serde_json::Value =
            serde_json::from_str(&minimal_size(lv, 200, Format::Json)).unwrap();
        assert_eq!(v["minimal_n_a"], 200);
    }
}
