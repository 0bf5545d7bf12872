//! CSV rendering for scans, figures and reports.

use std::fmt::Write;

use triality_core::verification::{ScanRecord, VerificationReport};

pub const SCAN_HEADER: &str = "tau,x,S,D,V,V0,pKbar,V2,D2,S2,sum,slack_triality,slack_fvg,ratio_appendix";

/// Fixed twelve decimals; `-0` prints as `0` so output does not depend on roundoff sign.
pub fn num(v: f64) -> String {
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_owned(),
        _ => s,
    }
}

fn table(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = String::with_capacity(4096);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn scan_csv(records: &[ScanRecord]) -> String {
    table(
        SCAN_HEADER,
        records.iter().map(|r| {
            let b = &r.bundle;
            vec![
                b.tau,
                b.x,
                b.entropy_s,
                b.disting_d,
                b.visibility_v,
                b.strangeness_v0,
                b.antikaon_prob,
                b.v2(),
                b.d2(),
                b.s2(),
                b.triality_sum,
                r.slack_triality,
                r.slack_fvg,
                r.ratio_appendix,
            ]
        }),
    )
}

pub fn figure_csv(which: u8, records: &[ScanRecord]) -> String {
    let bundles = records.iter().map(|r| r.bundle);
    match which {
        1 => table(
            "tau,D2_plus_S2,V2,D,S",
            bundles.map(|b| vec![b.tau, b.d2() + b.s2(), b.v2(), b.disting_d, b.entropy_s]),
        ),
        2 => table("tau,sum,bound", bundles.map(|b| vec![b.tau, b.triality_sum, 1.0])),
        3 => table(
            "tau,V2,one_minus_D2,one_minus_D2_minus_S2",
            bundles.map(|b| vec![b.tau, b.v2(), 1.0 - b.d2(), 1.0 - b.d2() - b.s2()]),
        ),
        _ => unreachable!("figure selector is validated by the argument parser"),
    }
}

pub fn report_csv(report: &VerificationReport) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in report.to_key_values() {
        let _ = writeln!(out, "{k},{v}");
    }
    out
}
