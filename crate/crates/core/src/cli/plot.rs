//! Static SVG line charts of a result table.
//!
//! One polyline per `(arm, dist, k, snr_db)` series with `me` on the x axis.
//! Output depends only on the rows, so plotting the same CSV twice yields the
//! same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::results::ResultRow;
use crate::evaluation::Arm;
use crate::{Error, Result};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 260.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const DASHES: [&str; 6] = ["", "6,3", "2,3", "10,4,2,4", "1,5", "12,6"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    RecoveryProb,
    AvgMse,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::RecoveryProb => "recovery_prob",
            Metric::AvgMse => "avg_mse",
        }
    }

    fn value(self, row: &ResultRow) -> f64 {
        match self {
            Metric::RecoveryProb => row.recovery_prob,
            Metric::AvgMse => row.avg_mse,
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "recovery_prob" => Ok(Metric::RecoveryProb),
            "avg_mse" => Ok(Metric::AvgMse),
            other => Err(format!(
                "unknown metric `{other}` (expected recovery_prob|avg_mse)"
            )),
        }
    }
}

fn arm_color(arm: Arm) -> &'static str {
    match arm {
        Arm::TraditionalShort => "#d62728",
        Arm::Proposed => "#1f77b4",
        Arm::BoundLong => "#2ca02c",
    }
}

fn fmt_snr(snr: f64) -> String {
    if snr.is_infinite() {
        "inf".into()
    } else {
        format!("{snr}")
    }
}

type SeriesKey<'a> = (&'a str, &'a str, usize, u64);

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.max(self.lo).log10() } else { v };
        let (lo, hi) = if self.log {
            (self.lo.log10(), self.hi.log10())
        } else {
            (self.lo, self.hi)
        };
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

fn y_axis(metric: Metric, values: &[f64]) -> Axis {
    match metric {
        Metric::RecoveryProb => Axis {
            lo: 0.0,
            hi: 1.0,
            log: false,
        },
        Metric::AvgMse => {
            let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
            let (lo, hi) = if positive.is_empty() {
                (1e-6, 1.0)
            } else {
                let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
                let max = positive.iter().copied().fold(0.0, f64::max);
                let lo = 10f64.powf(min.log10().floor());
                let mut hi = 10f64.powf(max.log10().ceil());
                if hi <= lo {
                    hi = lo * 10.0;
                }
                (lo, hi)
            };
            Axis { lo, hi, log: true }
        }
    }
}

/// Renders the rows; returns the SVG text and the number of series drawn.
pub fn render_svg(rows: &[ResultRow], metric: Metric) -> Result<(String, usize)> {
    if rows.is_empty() {
        return Err(Error::Plot("no data rows to plot".into()));
    }

    let mut series: BTreeMap<SeriesKey, Vec<(usize, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry((r.arm.label(), r.dist.label(), r.k, r.snr_db.to_bits()))
            .or_default()
            .push((r.me, metric.value(r)));
    }
    for points in series.values_mut() {
        points.sort_by_key(|&(me, _)| me);
    }

    let me_min = rows.iter().map(|r| r.me).min().expect("non-empty") as f64;
    let mut me_max = rows.iter().map(|r| r.me).max().expect("non-empty") as f64;
    if me_max <= me_min {
        me_max = me_min + 1.0;
    }
    let x_axis = Axis {
        lo: me_min,
        hi: me_max,
        log: false,
    };
    let values: Vec<f64> = rows.iter().map(|r| metric.value(r)).collect();
    let y = y_axis(metric, &values);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |me: f64| LEFT + plot_w * x_axis.frac(me);
    let py = |v: f64| TOP + plot_h * (1.0 - y.frac(v));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // x ticks at every distinct me
    let mut mes: Vec<usize> = rows.iter().map(|r| r.me).collect();
    mes.sort_unstable();
    mes.dedup();
    for me in &mes {
        let x = px(*me as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{me}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
    }

    let y_ticks: Vec<(f64, String)> = if y.log {
        let (a, b) = (y.lo.log10().round() as i32, y.hi.log10().round() as i32);
        (a..=b).map(|e| (10f64.powi(e), format!("1e{e}"))).collect()
    } else {
        (0..=5)
            .map(|i| (i as f64 * 0.2, format!("{:.1}", i as f64 * 0.2)))
            .collect()
    };
    for (v, label) in &y_ticks {
        let yy = py(*v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            yy + 4.0
        );
    }

    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">extracted training length me</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.label()
    );

    let mut per_arm: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, ((arm, dist, k, snr_bits), points)) in series.iter().enumerate() {
        let arm_value: Arm = arm.parse().map_err(Error::Plot)?;
        let nth = per_arm.entry(arm).or_insert(0);
        let dash = DASHES[*nth % DASHES.len()];
        *nth += 1;
        let color = arm_color(arm_value);
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };

        let coords: Vec<String> = points
            .iter()
            .map(|&(me, v)| format!("{:.2},{:.2}", px(me as f64), py(v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash_attr} points="{}"/>"#,
            coords.join(" ")
        );

        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let label = format!(
            "{arm} {dist} K={k} SNR={} dB",
            fmt_snr(f64::from_bits(*snr_bits))
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash_attr}/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 25.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok((svg, series.len()))
}
