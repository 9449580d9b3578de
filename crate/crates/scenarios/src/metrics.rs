//! Time series sampled from traces, and their CSV form.

use std::io;
use std::path::Path;

use xc_core::LocalValue;
use xc_netsim::Trace;

use crate::message::Message;

/// Values sampled every `dt` seconds starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at the sample closest to `t`.
    pub fn at(&self, t: f64) -> Option<f64> {
        let i = self
            .times
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))?
            .0;
        Some(self.values[i])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Pointwise mean of series with equal sample times.
    pub fn mean(series: &[TimeSeries]) -> Option<TimeSeries> {
        let first = series.first()?;
        let n = series.len() as f64;
        let values = (0..first.len())
            .map(|i| series.iter().map(|s| s.values[i]).sum::<f64>() / n)
            .collect();
        Some(TimeSeries {
            times: first.times.clone(),
            values,
        })
    }
}

/// Sample times `0, dt, 2dt, ...` up to `end`.
pub fn sample_times(end: f64, dt: f64) -> Vec<f64> {
    let n = (end / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}

/// Mean over devices of `f` applied to each device's latest result at or
/// before every sample time. Devices that have not run yet, or whose latest
/// round failed, count as 0.
pub fn sample_mean<F>(trace: &Trace, devices: usize, end: f64, dt: f64, f: F) -> TimeSeries
where
    F: Fn(&LocalValue) -> f64,
{
    let times = sample_times(end, dt);
    let mut current = vec![0.0; devices];
    let mut sum = 0.0;
    let mut events = trace.events().iter().peekable();
    let mut values = Vec::with_capacity(times.len());
    for &t in &times {
        while let Some(e) = events.next_if(|e| e.time <= t) {
            let v = trace.value(e.id).map_or(0.0, |w| f(w.default_value()));
            let d = e.device.0 as usize;
            sum += v - current[d];
            current[d] = v;
        }
        values.push(if devices == 0 {
            0.0
        } else {
            sum / devices as f64
        });
    }
    TimeSeries { times, values }
}

/// Number of process instances in a `spawn` result.
pub fn active_processes(v: &LocalValue) -> f64 {
    match v {
        LocalValue::Map(m) => m.len() as f64,
        _ => 0.0,
    }
}

/// Average number of active processes per device.
pub fn aproc(trace: &Trace, devices: usize, end: f64, dt: f64) -> TimeSeries {
    sample_mean(trace, devices, end, dt, active_processes)
}

/// Component `index` of a right-nested tuple `pair(a, pair(b, ...))`.
pub fn component(v: &LocalValue, index: usize) -> Option<&LocalValue> {
    let mut cur = v;
    for _ in 0..index {
        match cur {
            LocalValue::Pair(p) => cur = &p.1,
            _ => return None,
        }
    }
    match cur {
        LocalValue::Pair(p) => Some(&p.0),
        last => Some(last),
    }
}

/// Fraction of devices whose output has a true component `index`.
pub fn truth_fraction(
    trace: &Trace,
    devices: usize,
    index: usize,
    end: f64,
    dt: f64,
) -> TimeSeries {
    sample_mean(trace, devices, end, dt, |v| {
        f64::from(u8::from(matches!(
            component(v, index),
            Some(LocalValue::Bool(true))
        )))
    })
}

/// Mean numeric output, skipping nothing: non-numbers count as 0 and
/// infinities are kept.
pub fn mean_output(trace: &Trace, devices: usize, end: f64, dt: f64) -> TimeSeries {
    sample_mean(trace, devices, end, dt, |v| match v {
        LocalValue::Int(i) => *i as f64,
        LocalValue::Real(r) => *r,
        LocalValue::Bool(b) => f64::from(u8::from(*b)),
        LocalValue::Map(m) => m.len() as f64,
        _ => 0.0,
    })
}

/// Time of the first round of the destination that runs the message's
/// process.
pub fn delivery_time(trace: &Trace, message: &Message) -> Option<f64> {
    let key = message.key();
    trace
        .events()
        .iter()
        .filter(|e| e.device == message.to)
        .find(|e| match trace.value(e.id).map(|w| w.default_value()) {
            Some(LocalValue::Map(m)) => m.contains_key(&key),
            _ => false,
        })
        .map(|e| e.time)
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("series have different sample times")]
    Mismatch,
}

/// Writes `time,<name1>,<name2>,...` and one row per sample.
pub fn write_csv<W: io::Write>(series: &[(&str, &TimeSeries)], out: W) -> Result<(), CsvError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["time"];
    header.extend(series.iter().map(|(n, _)| *n));
    w.write_record(&header)?;
    if let Some((_, first)) = series.first() {
        if series.iter().any(|(_, s)| s.times != first.times) {
            return Err(CsvError::Mismatch);
        }
        for (i, t) in first.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(series.iter().map(|(_, s)| s.values[i].to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(series: &[(&str, &TimeSeries)], path: &Path) -> Result<(), CsvError> {
    let file = std::fs::File::create(path)?;
    write_csv(series, io::BufWriter::new(file))
}

/// Reads a file written by [`write_csv`] back into named series.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<(String, TimeSeries)>, CsvError> {
    let mut r = csv::Reader::from_reader(input);
    let names: Vec<String> = r.headers()?.iter().skip(1).map(String::from).collect();
    let mut out: Vec<(String, TimeSeries)> = names
        .into_iter()
        .map(|n| {
            (
                n,
                TimeSeries {
                    times: vec![],
                    values: vec![],
                },
            )
        })
        .collect();
    for rec in r.records() {
        let rec = rec?;
        let nums: Vec<f64> = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        for (i, (_, s)) in out.iter_mut().enumerate() {
            s.times.push(nums[0]);
            s.values.push(nums[i + 1]);
        }
    }
    Ok(out)
}
