//! Result tables, log-linear trend fitting and CSV/SVG output.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("need at least 2 rows with a nonzero result set, found {0}")]
    InsufficientPoints(usize),
    #[error("all fitted rows have the same symbol count")]
    DegenerateAbscissa,
    #[error("trend slope {0} is not negative; no threshold exists")]
    NonDecreasingTrend(f64),
    #[error("manageable result-set size must be at least 1")]
    InvalidManageable,
    #[error("table has no rows with a nonzero result set")]
    NoPlottablePoints,
    #[error("malformed table: {0}")]
    MalformedTable(String),
}

impl AnalysisError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::InsufficientPoints(_) => "InsufficientPoints",
            AnalysisError::DegenerateAbscissa => "DegenerateAbscissa",
            AnalysisError::NonDecreasingTrend(_) => "NonDecreasingTrend",
            AnalysisError::InvalidManageable => "InvalidManageable",
            AnalysisError::NoPlottablePoints => "NoPlottablePoints",
            AnalysisError::MalformedTable(_) => "MalformedTable",
        }
    }
}

pub const CSV_HEADER: [&str; 4] = ["fragment", "symbols", "result_set_size", "log10_size"];

/// One fragment query and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub fragment: String,
    pub symbols: usize,
    pub size: u64,
    /// `log10(size)` at full precision; `None` for empty result sets and
    /// failed queries.
    pub log_size: Option<f64>,
    /// Set when the query for this row failed; `size` is then meaningless.
    pub error: Option<String>,
}

impl ResultRow {
    pub fn new(fragment: impl Into<String>, symbols: usize, size: u64) -> Self {
        ResultRow {
            fragment: fragment.into(),
            symbols,
            size,
            log_size: (size > 0).then(|| (size as f64).log10()),
            error: None,
        }
    }

    pub fn failed(fragment: impl Into<String>, symbols: usize, error: impl Into<String>) -> Self {
        ResultRow {
            fragment: fragment.into(),
            symbols,
            size: 0,
            log_size: None,
            error: Some(error.into()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.error.is_none() && self.size == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Build a table from `(fragment, symbols, size)` triples.
pub fn log_transform<I, S>(rows: I) -> ResultTable
where
    I: IntoIterator<Item = (S, usize, u64)>,
    S: Into<String>,
{
    ResultTable {
        rows: rows
            .into_iter()
            .map(|(f, symbols, size)| ResultRow::new(f, symbols, size))
            .collect(),
    }
}

/// Two-decimal rendering used in tables.
pub fn display_log(value: f64) -> String {
    format!("{value:.2}")
}

impl ResultTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn points(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.log_size.map(|y| (r.symbols as f64, y)))
            .collect()
    }

    /// CSV with header `fragment,symbols,result_set_size,log10_size`. Fit
    /// parameters and failed rows follow as `#` comment lines.
    pub fn to_csv(&self, fit: Option<&TrendFit>) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("write to Vec");
        for row in &self.rows {
            let (size, log) = if row.error.is_some() {
                (String::new(), String::new())
            } else {
                (
                    row.size.to_string(),
                    row.log_size.map(display_log).unwrap_or_default(),
                )
            };
            w.write_record([row.fragment.as_str(), &row.symbols.to_string(), &size, &log])
                .expect("write to Vec");
        }
        let mut out = String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8 input");
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(e) = &row.error {
                let _ = writeln!(out, "# error row {}: {}", i + 1, e.replace('\n', " "));
            }
        }
        if let Some(fit) = fit {
            let _ = writeln!(
                out,
                "# fit slope={:.6} intercept={:.6}",
                fit.slope, fit.intercept
            );
            let _ = writeln!(
                out,
                "# fit r_squared={:.6} points_used={} excluded_zero_rows={}",
                fit.r_squared, fit.points_used, fit.excluded_zero_rows
            );
        }
        out
    }

    /// Read a table written by [`to_csv`](Self::to_csv). A present log
    /// column is kept as written; a blank one is recomputed from the size.
    pub fn from_csv(text: &str) -> Result<Self, AnalysisError> {
        let bad = |m: String| AnalysisError::MalformedTable(m);
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().ne(CSV_HEADER) {
            return Err(bad(format!(
                "expected header {:?}, got {:?}",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| bad(e.to_string()))?;
            let line = i + 2;
            let symbols = record[1]
                .trim()
                .parse::<usize>()
                .map_err(|_| bad(format!("line {line}: bad symbol count {:?}", &record[1])))?;
            let size_field = record[2].trim();
            if size_field.is_empty() {
                rows.push(ResultRow::failed(&record[0], symbols, "no result"));
                continue;
            }
            let size = size_field
                .parse::<u64>()
                .map_err(|_| bad(format!("line {line}: bad result set size {size_field:?}")))?;
            let mut row = ResultRow::new(&record[0], symbols, size);
            let log_field = record[3].trim();
            if !log_field.is_empty() && size > 0 {
                row.log_size = Some(
                    log_field
                        .parse::<f64>()
                        .map_err(|_| bad(format!("line {line}: bad log value {log_field:?}")))?,
                );
            }
            rows.push(row);
        }
        Ok(ResultTable { rows })
    }
}

/// Least-squares line through `(symbols, log10 size)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit {
    /// Decades of result-set size per added symbol.
    pub slope: f64,
    /// log10 size extrapolated to zero symbols.
    pub intercept: f64,
    pub r_squared: f64,
    pub points_used: usize,
    /// Rows without a log value (empty result sets or failed queries).
    pub excluded_zero_rows: usize,
}

impl TrendFit {
    pub fn predict(&self, symbols: f64) -> f64 {
        self.intercept + self.slope * symbols
    }
}

/// Ordinary least squares of `log_size` on `symbols` over rows that have
/// a log value.
pub fn fit_trend(table: &ResultTable) -> Result<TrendFit, AnalysisError> {
    let points = table.points();
    if points.len() < 2 {
        return Err(AnalysisError::InsufficientPoints(points.len()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateAbscissa);
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(TrendFit {
        slope,
        intercept,
        r_squared,
        points_used: points.len(),
        excluded_zero_rows: table.rows.len() - points.len(),
    })
}

/// Smallest fragment length `L >= 1` whose fitted log size is at most
/// `log10(manageable)`.
pub fn threshold_length(fit: &TrendFit, manageable: u64) -> Result<usize, AnalysisError> {
    if fit.slope.is_nan() || fit.slope >= 0.0 {
        return Err(AnalysisError::NonDecreasingTrend(fit.slope));
    }
    if manageable == 0 {
        return Err(AnalysisError::InvalidManageable);
    }
    let target = (manageable as f64).log10();
    let ok = |l: usize| fit.predict(l as f64) <= target;
    let estimate = ((target - fit.intercept) / fit.slope).ceil();
    let mut l = if estimate.is_finite() && estimate > 1.0 {
        estimate as usize
    } else {
        1
    };
    while l > 1 && ok(l - 1) {
        l -= 1;
    }
    while !ok(l) {
        l += 1;
    }
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions {
            width: 640,
            height: 420,
        }
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Standalone SVG scatter of `(symbols, log10 size)` with blue square
/// markers and, when `fit` is given, the fitted line in black across the
/// plotted symbol range.
pub fn emit_plot(
    table: &ResultTable,
    fit: Option<&TrendFit>,
    options: PlotOptions,
) -> Result<String, AnalysisError> {
    let points = table.points();
    if points.is_empty() {
        return Err(AnalysisError::NoPlottablePoints);
    }
    let (w, h) = (
        f64::from(options.width.max(120)),
        f64::from(options.height.max(120)),
    );
    let (left, right, top, bottom) = (64.0, 20.0, 28.0, 52.0);

    let x_lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    if let Some(fit) = fit {
        ys.push(fit.predict(x_lo));
        ys.push(fit.predict(x_hi));
    }
    let y_lo = ys
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .floor()
        .min(0.0);
    let y_hi = ys
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .ceil()
        .max(y_lo + 1.0);
    let (x_min, x_max) = ((x_lo - 1.0).max(0.0), x_hi + 1.0);

    let sx = |x: f64| left + (x - x_min) / (x_max - x_min) * (w - left - right);
    let sy = |y: f64| h - bottom - (y - y_lo) / (y_hi - y_lo) * (h - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);

    // axes and ticks as one path
    let mut axes = format!(
        "M{:.1},{:.1} V{:.1} H{:.1}",
        left,
        top,
        h - bottom,
        w - right
    );
    let mut labels = String::new();
    let x_step = if x_max - x_min > 12.0 { 2 } else { 1 };
    let mut x = x_min.ceil() as i64;
    while (x as f64) <= x_max {
        if x % x_step == 0 {
            let px = sx(x as f64);
            let _ = write!(axes, " M{px:.1},{:.1} v5", h - bottom);
            let _ = writeln!(
                labels,
                r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#,
                h - bottom + 18.0
            );
        }
        x += 1;
    }
    for y in (y_lo as i64)..=(y_hi as i64) {
        let py = sy(y as f64);
        let _ = write!(axes, " M{left:.1},{py:.1} h-5");
        let _ = writeln!(
            labels,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y}</text>"#,
            left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="{axes}" stroke="black" fill="none"/>"#
    );
    svg.push_str(&labels);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        left + (w - left - right) / 2.0,
        h - 12.0,
        escape("# symbols")
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">log(result set size)</text>"#,
        top + (h - top - bottom) / 2.0,
        top + (h - top - bottom) / 2.0
    );

    match fit {
        Some(fit) => {
            let _ = writeln!(
                svg,
                r#"<line class="fit" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black" stroke-width="1.5"/>"#,
                sx(x_lo),
                sy(fit.predict(x_lo)),
                sx(x_hi),
                sy(fit.predict(x_hi))
            );
        }
        None => {
            let _ = writeln!(
                svg,
                r#"<text class="notice" x="{:.1}" y="{:.1}" text-anchor="end">no fitted line: fewer than two fit points</text>"#,
                w - right,
                top - 8.0
            );
        }
    }
    for row in &table.rows {
        let Some(y) = row.log_size else { continue };
        let x = row.symbols as f64;
        let _ = writeln!(
            svg,
            r##"<rect class="point" x="{:.1}" y="{:.1}" width="8" height="8" fill="#1f5fd0"><title>{}</title></rect>"##,
            sx(x) - 4.0,
            sy(y) - 4.0,
            escape(&format!(
                "{}: {} symbols, log {}",
                row.fragment,
                row.symbols,
                display_log(y)
            ))
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
