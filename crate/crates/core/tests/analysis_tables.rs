mod support;

use fraglead_core::analysis::{
    display_log, emit_plot, fit_trend, log_transform, threshold_length, PlotOptions, ResultRow,
    ResultTable, TrendFit,
};
use proptest::prelude::*;
use support::{PrintedRow, MIDAZOLAM_TABLE, NELARABINE_TABLE};

/// Table of the printed log column, taken as given.
fn printed(rows: &[PrintedRow]) -> ResultTable {
    ResultTable {
        rows: rows
            .iter()
            .map(|r| ResultRow {
                log_size: Some(r.log),
                ..ResultRow::new(r.fragment, r.symbols, r.size as u64)
            })
            .collect(),
    }
}

/// Normal-equation OLS from raw sums.
fn ols_by_sums(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

#[test]
fn fits_to_printed_tables() {
    // frozen from an independent least-squares run over the printed logs
    let expected = [
        (&NELARABINE_TABLE, -0.359417, 8.429722),
        (&MIDAZOLAM_TABLE, -0.386833, 8.883889),
    ];
    for (rows, slope, intercept) in expected {
        let fit = fit_trend(&printed(rows)).unwrap();
        let points: Vec<_> = rows.iter().map(|r| (r.symbols as f64, r.log)).collect();
        let (s, i) = ols_by_sums(&points);
        assert!((fit.slope - s).abs() < 1e-9 && (fit.intercept - i).abs() < 1e-9);
        assert!((fit.slope - slope).abs() < 1e-6, "{}", fit.slope);
        assert!(
            (fit.intercept - intercept).abs() < 1e-6,
            "{}",
            fit.intercept
        );
        assert!(fit.slope < 0.0);
        assert!((0.0..=1.0).contains(&fit.r_squared));
        assert_eq!(fit.points_used, 9);
        assert_eq!(threshold_length(&fit, 1000).unwrap(), 16);
    }
}

#[test]
fn rounded_fit_thresholds() {
    for (slope, intercept) in [(-0.359, 8.43), (-0.387, 8.88)] {
        let fit = TrendFit {
            slope,
            intercept,
            r_squared: 0.5,
            points_used: 9,
            excluded_zero_rows: 0,
        };
        assert_eq!(threshold_length(&fit, 1000).unwrap(), 16);
    }
}

#[test]
fn printed_logs_agree_with_sizes() {
    for (name, rows) in [
        ("nelarabine", &NELARABINE_TABLE),
        ("midazolam", &MIDAZOLAM_TABLE),
    ] {
        for (i, r) in rows.iter().enumerate() {
            let diff = (r.size.log10() - r.log).abs();
            if name == "midazolam" && i == 2 {
                assert!(diff > 3.9, "row 3 is known to disagree by four decades");
            } else {
                assert!(
                    diff <= 0.01,
                    "{name} row {}: {} vs {}",
                    i + 1,
                    r.size.log10(),
                    r.log
                );
            }
        }
    }
}

#[test]
fn display_rounding() {
    let t = log_transform([("a", 2, 772_000u64), ("b", 10, 9_140), ("c", 18, 7)]);
    let shown: Vec<_> = t
        .rows
        .iter()
        .map(|r| display_log(r.log_size.unwrap()))
        .collect();
    assert_eq!(shown, ["5.89", "3.96", "0.85"]);
}

#[test]
fn csv_of_nine_rows() {
    let table = printed(&NELARABINE_TABLE);
    let fit = fit_trend(&table).unwrap();
    let csv = table.to_csv(Some(&fit));
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 10);
    assert_eq!(lines.iter().filter(|l| l.starts_with('#')).count(), 2);
    assert_eq!(lines[0], "fragment,symbols,result_set_size,log10_size");
    assert_eq!(lines[8], "(N)=NC2=C1N=CN2C,16,165,2.22");
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    let back = ResultTable::from_csv(&csv).unwrap();
    assert_eq!(fit_trend(&back).unwrap().slope, fit.slope);
}

#[test]
fn plot_is_well_formed() {
    let table = printed(&NELARABINE_TABLE);
    let fit = fit_trend(&table).unwrap();
    let svg = emit_plot(
        &table,
        Some(&fit),
        PlotOptions {
            width: 800,
            height: 500,
        },
    )
    .unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("width"), Some("800"));
    let points = doc
        .descendants()
        .filter(|n| n.attribute("class") == Some("point"))
        .count();
    let lines = doc.descendants().filter(|n| n.has_tag_name("line")).count();
    assert_eq!((points, lines), (9, 1));
    let text: String = doc.descendants().filter_map(|n| n.text()).collect();
    assert!(text.contains("# symbols"));
    assert!(text.contains("log(result set size)"));
}

proptest! {
    #[test]
    fn residuals_are_orthogonal(points in prop::collection::vec((1usize..40, 1u64..1_000_000_000), 2..30)) {
        let table = log_transform(points.iter().map(|&(x, n)| ("f", x, n)));
        prop_assume!(points.iter().any(|p| p.0 != points[0].0));
        let fit = fit_trend(&table).unwrap();
        let residuals: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| (r.symbols as f64, r.log_size.unwrap() - fit.predict(r.symbols as f64)))
            .collect();
        let sum: f64 = residuals.iter().map(|r| r.1).sum();
        let weighted: f64 = residuals.iter().map(|r| r.0 * r.1).sum();
        prop_assert!(sum.abs() < 1e-9, "{}", sum);
        prop_assert!(weighted.abs() < 1e-9, "{}", weighted);
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
    }

    #[test]
    fn threshold_is_monotone(slope in -3.0f64..-0.01, intercept in -2.0f64..12.0, a in 1u64..1_000_000, b in 1u64..1_000_000) {
        let fit = TrendFit { slope, intercept, r_squared: 1.0, points_used: 2, excluded_zero_rows: 0 };
        let (lo, hi) = (a.min(b), a.max(b));
        let l_lo = threshold_length(&fit, lo).unwrap();
        let l_hi = threshold_length(&fit, hi).unwrap();
        prop_assert!(l_hi <= l_lo);
        prop_assert!(fit.predict(l_lo as f64) <= (lo as f64).log10());
        prop_assert!(l_lo == 1 || fit.predict((l_lo - 1) as f64) > (lo as f64).log10());
    }

    #[test]
    fn log_column_invariant(size in 0u64..u64::MAX / 2) {
        let row = ResultRow::new("x", 1, size);
        match row.log_size {
            Some(v) => prop_assert!(size > 0 && (v - (size as f64).log10()).abs() <= 0.005),
            None => prop_assert_eq!(size, 0),
        }
    }
}
