//! Deterministic JSON and CSV renderings of reports, the matching CSV parsers,
//! and gnuplot scripts that read the CSV.
//!
//! Floats in CSV are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64`. Footer lines start with `# ` and carry the fitted
//! order and the metadata as one-line JSON, so a parsed CSV rebuilds the report
//! exactly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fucik1d::{CurvePoint, Partition, Sign};
use crate::rates::{noise_floor, FucikSweep, RateRecord, SweepMetadata, SweepReport};

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), num)
}

fn parse_num(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::invalid(field, format!("not a number: {s:?}")))
}

/// Rows of a CSV document whose header starts with `header`, plus its
/// `# key=value` footers.
struct Parsed {
    rows: Vec<csv::StringRecord>,
    footer: Vec<(String, String)>,
}

impl Parsed {
    fn new(text: &str, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let head = reader.headers().map_err(csv_error)?.clone();
        if head.len() < header.len() || head.iter().zip(header).any(|(a, b)| a != *b) {
            return Err(Error::invalid(
                "csv",
                format!("unexpected header {:?}", head.as_slice()),
            ));
        }
        let rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(csv_error)?;
        let mut footer = Vec::new();
        for line in text.lines().filter_map(|l| l.strip_prefix("# ")) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid("csv", format!("bad footer {line:?}")))?;
            footer.push((k.to_string(), v.to_string()));
        }
        Ok(Parsed { rows, footer })
    }

    fn get(&self, key: &str) -> Result<&str> {
        self.footer
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::invalid("csv", format!("missing footer {key:?}")))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::invalid("csv", e.to_string())
}

/// Writes `header` and `rows` as CSV; the footers are appended by the caller.
fn table<I, R>(header: &[String], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid("csv", e.to_string()))
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

const EIGEN_HEADER: [&str; 4] = ["eps", "gap", "bound", "ratio"];

/// CSV of an eigenvalue (or single-quantity) sweep.
pub fn sweep_csv(report: &SweepReport) -> Result<String> {
    let mut out = table(
        &strings(&EIGEN_HEADER),
        report
            .records
            .iter()
            .map(|r| [num(r.eps), num(r.measured_gap), num(r.bound), num(r.ratio)]),
    )?;
    let _ = writeln!(out, "# quantity={}", report.quantity);
    let _ = writeln!(out, "# fitted_order={}", opt_num(report.fitted_order));
    let _ = writeln!(
        out,
        "# metadata={}",
        serde_json::to_string(&report.metadata)?
    );
    Ok(out)
}

fn rebuild(
    quantity: &str,
    rows: &[(f64, f64, f64, Option<f64>)],
    metadata: SweepMetadata,
) -> SweepReport {
    let floor = noise_floor(metadata.tol, metadata.limit);
    let records = rows
        .iter()
        .map(|&(eps, gap, bound, stated)| {
            let mut r = RateRecord::new(eps, gap, bound, floor);
            r.stated_bound = stated;
            r
        })
        .collect();
    SweepReport::assemble(quantity, records, metadata)
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepReport> {
    let parsed = Parsed::new(text, &EIGEN_HEADER)?;
    let rows = parsed
        .rows
        .iter()
        .map(|r| {
            Ok((
                parse_num("eps", &r[0])?,
                parse_num("gap", &r[1])?,
                parse_num("bound", &r[2])?,
                None,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let metadata: SweepMetadata = serde_json::from_str(parsed.get("metadata")?)?;
    Ok(rebuild(parsed.get("quantity")?, &rows, metadata))
}

const FUCIK_HEADER: [&str; 9] = [
    "eps",
    "gap_alpha",
    "bound_alpha",
    "ratio_alpha",
    "gap_beta",
    "bound_beta",
    "ratio_beta",
    "stated_bound_alpha",
    "stated_bound_beta",
];

/// CSV of paired α/β sweeps; rows are matched by ε.
pub fn fucik_csv(sweep: &FucikSweep) -> Result<String> {
    if sweep.alpha.records.len() != sweep.beta.records.len() {
        return Err(Error::invalid(
            "sweep",
            "alpha and beta reports differ in length",
        ));
    }
    let rows = sweep
        .alpha
        .records
        .iter()
        .zip(&sweep.beta.records)
        .map(|(a, b)| {
            [
                num(a.eps),
                num(a.measured_gap),
                num(a.bound),
                num(a.ratio),
                num(b.measured_gap),
                num(b.bound),
                num(b.ratio),
                opt_num(a.stated_bound),
                opt_num(b.stated_bound),
            ]
        });
    let mut out = table(&strings(&FUCIK_HEADER), rows)?;
    let _ = writeln!(
        out,
        "# fitted_order_alpha={}",
        opt_num(sweep.alpha.fitted_order)
    );
    let _ = writeln!(
        out,
        "# fitted_order_beta={}",
        opt_num(sweep.beta.fitted_order)
    );
    let _ = writeln!(out, "# stated_bound_held={}", sweep.stated_bound_held);
    let _ = writeln!(
        out,
        "# metadata_alpha={}",
        serde_json::to_string(&sweep.alpha.metadata)?
    );
    let _ = writeln!(
        out,
        "# metadata_beta={}",
        serde_json::to_string(&sweep.beta.metadata)?
    );
    Ok(out)
}

fn parse_opt(field: &str, s: &str) -> Result<Option<f64>> {
    if s == "none" {
        Ok(None)
    } else {
        parse_num(field, s).map(Some)
    }
}

pub fn parse_fucik_csv(text: &str) -> Result<FucikSweep> {
    let parsed = Parsed::new(text, &FUCIK_HEADER)?;
    let mut alpha = Vec::with_capacity(parsed.rows.len());
    let mut beta = Vec::with_capacity(parsed.rows.len());
    for r in &parsed.rows {
        let eps = parse_num("eps", &r[0])?;
        alpha.push((
            eps,
            parse_num("gap_alpha", &r[1])?,
            parse_num("bound_alpha", &r[2])?,
            parse_opt("stated_bound_alpha", &r[7])?,
        ));
        beta.push((
            eps,
            parse_num("gap_beta", &r[4])?,
            parse_num("bound_beta", &r[5])?,
            parse_opt("stated_bound_beta", &r[8])?,
        ));
    }
    let stated_bound_held = match parsed.get("stated_bound_held")? {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::invalid(
                "stated_bound_held",
                format!("not a bool: {other:?}"),
            ))
        }
    };
    Ok(FucikSweep {
        alpha: rebuild(
            "alpha",
            &alpha,
            serde_json::from_str(parsed.get("metadata_alpha")?)?,
        ),
        beta: rebuild(
            "beta",
            &beta,
            serde_json::from_str(parsed.get("metadata_beta")?)?,
        ),
        stated_bound_held,
    })
}

const CURVE_HEADER: [&str; 4] = ["s", "alpha", "beta", "c"];

/// CSV of a traced curve: one row per slope, breakpoints `t_0 … t_{k+1}` last.
pub fn curve_csv(points: &[CurvePoint], p: f64) -> Result<String> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("points", "empty curve"))?;
    if points
        .iter()
        .any(|pt| pt.k != first.k || pt.sign != first.sign)
    {
        return Err(Error::invalid("points", "curve mixes k or sign"));
    }
    let mut header = strings(&CURVE_HEADER);
    header.extend((0..first.partition.breakpoints().len()).map(|i| format!("t{i}")));
    let rows = points.iter().map(|pt| {
        let mut row = vec![num(pt.s), num(pt.alpha), num(pt.beta), num(pt.c)];
        row.extend(pt.partition.breakpoints().iter().map(|t| num(*t)));
        row
    });
    let mut out = table(&header, rows)?;
    let _ = writeln!(out, "# k={}", first.k);
    let _ = writeln!(
        out,
        "# sign={}",
        serde_json::to_string(&first.sign)?.trim_matches('"')
    );
    let _ = writeln!(out, "# p={}", num(p));
    Ok(out)
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<CurvePoint>> {
    let parsed = Parsed::new(text, &CURVE_HEADER)?;
    let k: u32 = parsed
        .get("k")?
        .parse()
        .map_err(|_| Error::invalid("k", "not an integer"))?;
    let sign: Sign = serde_json::from_str(&format!("\"{}\"", parsed.get("sign")?))?;
    let p = parse_num("p", parsed.get("p")?)?;
    parsed
        .rows
        .iter()
        .map(|r| {
            let breakpoints = r
                .iter()
                .skip(CURVE_HEADER.len())
                .map(|t| parse_num("breakpoint", t))
                .collect::<Result<Vec<_>>>()?;
            Ok(CurvePoint {
                k,
                sign,
                s: parse_num("s", &r[0])?,
                c: parse_num("c", &r[3])?,
                alpha: parse_num("alpha", &r[1])?,
                beta: parse_num("beta", &r[2])?,
                partition: Partition::new(breakpoints, sign)?,
                outside_stated_validity: p < 2.0,
            })
        })
        .collect()
}

/// Log-log plot of gap and bound against ε for a single-quantity sweep.
pub fn sweep_plot(csv: &str, report: &SweepReport) -> String {
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set logscale xy\n\
         set key top left\n\
         set xlabel 'eps'\n\
         set ylabel 'gap'\n\
         set title '{q}: fitted order {o}'\n\
         plot '{csv}' every ::1 using 1:2 with linespoints title 'measured gap', \\\n     \
         '{csv}' every ::1 using 1:3 with lines title 'bound'\n",
        q = report.quantity,
        o = opt_num(report.fitted_order),
    )
}

pub fn fucik_plot(csv: &str, sweep: &FucikSweep) -> String {
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set logscale xy\n\
         set key top left\n\
         set xlabel 'eps'\n\
         set ylabel 'gap'\n\
         set title 'fitted order alpha {oa}, beta {ob}'\n\
         plot '{csv}' every ::1 using 1:2 with linespoints title 'alpha gap', \\\n     \
         '{csv}' every ::1 using 1:3 with lines title 'alpha bound', \\\n     \
         '{csv}' every ::1 using 1:5 with linespoints title 'beta gap', \\\n     \
         '{csv}' every ::1 using 1:6 with lines title 'beta bound'\n",
        oa = opt_num(sweep.alpha.fitted_order),
        ob = opt_num(sweep.beta.fitted_order),
    )
}

/// β against α.
pub fn curve_plot(csv: &str, points: &[CurvePoint]) -> String {
    let (k, sign) = points.first().map_or((0, "plus"), |p| {
        (
            p.k,
            if p.sign == Sign::Plus {
                "plus"
            } else {
                "minus"
            },
        )
    });
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set xlabel 'alpha'\n\
         set ylabel 'beta'\n\
         set title 'C_{k} {sign}'\n\
         plot '{csv}' every ::1 using 2:3 with linespoints title 'curve'\n",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::run_sweep_eigen;
    use crate::weights::{Interval, PeriodicWeight};

    fn small_sweep() -> SweepReport {
        let w = PeriodicWeight::piecewise(vec![0.5], vec![1.0, 3.0]).unwrap();
        run_sweep_eigen(&w, &Interval::unit(), 2.0, &[0.5, 0.25, 0.125], 1e-8).unwrap()
    }

    #[test]
    fn eigen_csv_roundtrip() {
        let rep = small_sweep();
        let csv = sweep_csv(&rep).unwrap();
        assert!(csv.starts_with("eps,gap,bound,ratio\n"));
        assert!(csv.contains("# fitted_order="));
        assert_eq!(parse_sweep_csv(&csv).unwrap(), rep);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn json_is_stable() {
        let rep = small_sweep();
        assert_eq!(to_json(&rep).unwrap(), to_json(&rep).unwrap());
        let back: SweepReport = serde_json::from_str(&to_json(&rep).unwrap()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn rejects_foreign_csv() {
        assert!(parse_sweep_csv("a,b\n1,2\n").is_err());
        assert!(parse_sweep_csv("").is_err());
        let rep = small_sweep();
        let csv = sweep_csv(&rep)
            .unwrap()
            .replace("# metadata=", "# metadatum=");
        assert!(parse_sweep_csv(&csv).is_err());
    }

    #[test]
    fn plot_reads_the_csv() {
        let rep = small_sweep();
        let gp = sweep_plot("report.csv", &rep);
        assert!(gp.contains("'report.csv'"));
        assert!(gp.contains("set logscale xy"));
    }
}
