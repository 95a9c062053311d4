//! Report rows and their CSV / JSON-lines serialization.
//!
//! Reals are written with 12 significant digits in `%.12g` style so golden
//! files stay stable across platforms; absent values are empty in CSV and
//! `null` in JSON.

use std::io::{self, Write};

use crate::config::OutputFormat;

pub const CSV_HEADER: [&str; 13] = [
    "scenario",
    "composition_label",
    "observable_label",
    "n",
    "epsilon",
    "exact_expectation",
    "exact_fluctuation",
    "mc_mean",
    "mc_std",
    "mc_stderr",
    "rounds",
    "seed",
    "entanglement_census",
];

const SIGNIFICANT_DIGITS: usize = 12;

/// One (composition, observable) result.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub composition_label: String,
    pub observable_label: String,
    pub n: u64,
    pub epsilon: Option<f64>,
    pub exact_expectation: f64,
    pub exact_fluctuation: f64,
    pub mc_mean: Option<f64>,
    pub mc_std: Option<f64>,
    pub mc_stderr: Option<f64>,
    /// Monte Carlo rounds behind the `mc_*` fields; `0` when they are absent.
    pub rounds: u64,
    pub seed: u64,
    pub entanglement_census: Option<f64>,
}

enum Field {
    Text(String),
    Int(u64),
    Real(Option<f64>),
}

impl ReportRow {
    fn fields(&self) -> [Field; 13] {
        [
            Field::Text(self.scenario.clone()),
            Field::Text(self.composition_label.clone()),
            Field::Text(self.observable_label.clone()),
            Field::Int(self.n),
            Field::Real(self.epsilon),
            Field::Real(Some(self.exact_expectation)),
            Field::Real(Some(self.exact_fluctuation)),
            Field::Real(self.mc_mean),
            Field::Real(self.mc_std),
            Field::Real(self.mc_stderr),
            Field::Int(self.rounds),
            Field::Int(self.seed),
            Field::Real(self.entanglement_census),
        ]
    }
}

/// `printf("%.12g")`: shortest of fixed or exponent notation at 12
/// significant digits, trailing zeros removed, `-0` printed as `0`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.fields().iter().map(|f| match f {
            Field::Text(s) => s.clone(),
            Field::Int(v) => v.to_string(),
            Field::Real(Some(v)) => format_real(*v),
            Field::Real(None) => String::new(),
        }))?;
    }
    w.flush()
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_real(x)
    } else {
        "null".into()
    }
}

pub fn write_json_lines<W: Write>(rows: &[ReportRow], mut out: W) -> io::Result<()> {
    for row in rows {
        let body: Vec<String> = CSV_HEADER
            .iter()
            .zip(row.fields())
            .map(|(key, f)| {
                let value = match f {
                    Field::Text(s) => serde_json::to_string(&s).expect("strings serialize"),
                    Field::Int(v) => v.to_string(),
                    Field::Real(Some(v)) => json_number(v),
                    Field::Real(None) => "null".into(),
                };
                format!("\"{key}\":{value}")
            })
            .collect();
        writeln!(out, "{{{}}}", body.join(","))?;
    }
    out.flush()
}

pub fn write_rows<W: Write>(rows: &[ReportRow], format: OutputFormat, out: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::JsonLines => write_json_lines(rows, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row() -> ReportRow {
        ReportRow {
            scenario: "despagnat".into(),
            composition_label: "x_basis_mixture".into(),
            observable_label: "sigma_z".into(),
            n: 100,
            epsilon: None,
            exact_expectation: 0.0,
            exact_fluctuation: 10.0,
            mc_mean: None,
            mc_std: None,
            mc_stderr: None,
            rounds: 0,
            seed: 0,
            entanglement_census: None,
        }
    }

    #[test]
    fn format_like_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (10.0, "10"),
            (0.1, "0.1"),
            (800f64.sqrt(), "28.2842712475"),
            (1.0 / 3.0, "0.333333333333"),
            (1e-5, "1e-05"),
            (1.5e-4, "0.00015"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-2.5, "-2.5"),
            (1e100, "1e+100"),
            (0.99999999999951, "1"),
            (0.9999999999951, "0.999999999995"),
            (0.999999999999951, "1"),
        ];
        for (x, s) in cases {
            assert_eq!(format_real(x), s, "{x:e}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "despagnat,x_basis_mixture,sigma_z,100,,0,10,,,,0,0,");
        assert!(lines.next().is_none());
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        let mut r = row();
        r.epsilon = Some(0.1);
        write_json_lines(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let v: serde_json::Value = serde_json::from_str(text.trim_end()).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        let mut sorted = CSV_HEADER.to_vec();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        assert_eq!(v["epsilon"], serde_json::json!(0.1));
        assert!(v["mc_mean"].is_null());
        assert!(text.starts_with("{\"scenario\":\"despagnat\","));
    }

    proptest! {
        #[test]
        fn twelve_digit_round_trip(x in proptest::num::f64::NORMAL) {
            let s = format_real(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-12 * x.abs());
            prop_assert_eq!(format_real(back), s);
        }
    }
}
