use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use chrono::{DateTime, Datelike, NaiveDate, Utc};
use serde::Serialize;

use super::TextLabeling;
use crate::corpus::Message;
use crate::dimension::Dimension;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineBucket {
    pub week_start: NaiveDate,
    pub messages: usize,
    pub labeled: usize,
    pub fraction: f64,
    pub zscore: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineSeries {
    /// Dimension name, or another series label such as `sentiment`.
    pub label: String,
    pub buckets: Vec<TimelineBucket>,
    /// The weekly fractions had zero variance; all z-scores are 0.
    pub degenerate: bool,
    /// Messages skipped for lack of a timestamp.
    pub untimed: usize,
}

/// Monday (UTC) of the week containing `t`.
pub fn week_start(t: DateTime<Utc>) -> NaiveDate {
    let d = t.date_naive();
    d - chrono::Duration::days(d.weekday().num_days_from_monday() as i64)
}

/// Standard scores with the population SD. A constant series gives zeros
/// and `true`.
pub fn zscores(values: &[f64]) -> (Vec<f64>, bool) {
    if values.is_empty() {
        return (Vec::new(), true);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    if sd <= 1e-12 * mean.abs().max(1.0) {
        return (vec![0.0; values.len()], true);
    }
    (values.iter().map(|v| (v - mean) / sd).collect(), false)
}

/// Weekly share of messages satisfying `is_labeled`, as z-scores over the
/// weeks that have messages.
pub fn timeline_by<F>(label: &str, messages: &[Message], is_labeled: F) -> Result<TimelineSeries>
where
    F: Fn(&Message) -> bool,
{
    let mut weeks: BTreeMap<NaiveDate, (usize, usize)> = BTreeMap::new();
    let mut untimed = 0;
    for m in messages {
        let Some(t) = m.timestamp else {
            untimed += 1;
            continue;
        };
        let w = weeks.entry(week_start(t)).or_default();
        w.0 += 1;
        if is_labeled(m) {
            w.1 += 1;
        }
    }
    if weeks.is_empty() && !messages.is_empty() {
        return Err(Error::Invalid("timeline needs timestamped messages".into()));
    }
    let fractions: Vec<f64> = weeks.values().map(|&(n, l)| l as f64 / n as f64).collect();
    let (z, degenerate) = zscores(&fractions);
    let buckets = weeks
        .into_iter()
        .zip(fractions.into_iter().zip(z))
        .map(|((week_start, (messages, labeled)), (fraction, zscore))| TimelineBucket {
            week_start,
            messages,
            labeled,
            fraction,
            zscore,
        })
        .collect();
    Ok(TimelineSeries { label: label.to_string(), buckets, degenerate, untimed })
}

/// Weekly z-scored fraction of messages labeled with `dimension`. Messages
/// without a labeling count as unlabeled.
pub fn timeline(messages: &[Message], labelings: &[TextLabeling], dimension: Dimension) -> Result<TimelineSeries> {
    let labeled: HashMap<&str, bool> =
        labelings.iter().map(|l| (l.message_id.as_str(), l.labeled.contains(&dimension))).collect();
    timeline_by(dimension.name(), messages, |m| labeled.get(m.id.as_str()).copied().unwrap_or(false))
}

/// `week_start,dimension,f,zscore`.
pub fn write_timeline_csv<W: Write>(series: &[TimelineSeries], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["week_start", "dimension", "f", "zscore"])?;
    for s in series {
        for b in &s.buckets {
            w.write_record([
                b.week_start.to_string(),
                s.label.clone(),
                format!("{:.6}", b.fraction),
                format!("{:.6}", b.zscore),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("timeline csv", e))?;
    Ok(())
}
