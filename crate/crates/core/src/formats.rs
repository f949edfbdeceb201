// SPDX-License-Identifier: Apache-2.0

//! Line-oriented text files exchanged between the tools.
//!
//! ```text
//! # key file            # guess file          # lock report
//! keyinput0=1           keyinput0=X           key=0 strategy=S1 group=0 mux=lockmux0 ...
//! keyinput1=0           keyinput1=1
//! ```
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::locking::{LockRecord, Provenance, Strategy};
use crate::metrics::{KeyBit, KeyGuess};
use crate::netlist::{key_index, key_input_name};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// `keyinput<i>=<v>` lines into a dense vector indexed by key number.
fn parse_assignments<T: Copy>(
    text: &str,
    value: impl Fn(&str) -> Option<T>,
    what: &str,
) -> Result<Vec<T>, FormatError> {
    let mut slots: BTreeMap<usize, T> = BTreeMap::new();
    let mut last = 0;
    for (no, line) in content_lines(text) {
        last = no;
        let (name, v) = line
            .split_once('=')
            .ok_or_else(|| err(no, "expected keyinput<i>=<value>"))?;
        let idx = key_index(name.trim())
            .ok_or_else(|| err(no, format!("{} is not a key input name", name.trim())))?;
        let v = value(v.trim()).ok_or_else(|| err(no, format!("bad {what} value {}", v.trim())))?;
        if slots.insert(idx, v).is_some() {
            return Err(err(no, format!("duplicate {}", name.trim())));
        }
    }
    // Indices are distinct, so they are dense exactly when the i-th
    // smallest one is i.
    if let Some(gap) = slots
        .keys()
        .enumerate()
        .find(|(i, k)| i != *k)
        .map(|(i, _)| i)
    {
        return Err(err(last, format!("missing {}", key_input_name(gap))));
    }
    Ok(slots.into_values().collect())
}

pub fn parse_key_file(text: &str) -> Result<Vec<bool>, FormatError> {
    parse_assignments(
        text,
        |v| match v {
            "0" => Some(false),
            "1" => Some(true),
            _ => None,
        },
        "key",
    )
}

pub fn write_key_file(bits: &[bool]) -> String {
    bits.iter()
        .enumerate()
        .map(|(i, &b)| format!("{}={}\n", key_input_name(i), b as u8))
        .collect()
}

pub fn parse_guess_file(text: &str) -> Result<KeyGuess, FormatError> {
    parse_assignments(
        text,
        |v| match v {
            "0" => Some(KeyBit::Zero),
            "1" => Some(KeyBit::One),
            "X" | "x" => Some(KeyBit::X),
            _ => None,
        },
        "guess",
    )
    .map(KeyGuess)
}

pub fn write_guess_file(guess: &KeyGuess) -> String {
    guess
        .0
        .iter()
        .enumerate()
        .map(|(i, b)| format!("{}={}\n", key_input_name(i), b.symbol()))
        .collect()
}

const REPORT_FIELDS: [&str; 10] = [
    "key",
    "strategy",
    "group",
    "mux",
    "gate",
    "pin",
    "true",
    "false",
    "value",
    "provenance",
];

pub fn write_lock_report(records: &[LockRecord]) -> String {
    records
        .iter()
        .map(|r| {
            format!(
                "key={} strategy={} group={} mux={} gate={} pin={} true={} false={} value={} provenance={}\n",
                r.key_index,
                r.strategy,
                r.group,
                r.mux,
                r.gate,
                r.pin,
                r.true_src,
                r.false_src,
                r.key_value as u8,
                r.provenance
            )
        })
        .collect()
}

pub fn parse_lock_report(text: &str) -> Result<Vec<LockRecord>, FormatError> {
    let mut out = Vec::new();
    for (no, line) in content_lines(text) {
        let mut fields: [Option<&str>; 10] = [None; 10];
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| err(no, format!("expected key=value, got {tok}")))?;
            let pos = REPORT_FIELDS
                .iter()
                .position(|f| *f == k)
                .ok_or_else(|| err(no, format!("unknown field {k}")))?;
            if fields[pos].replace(v).is_some() {
                return Err(err(no, format!("duplicate field {k}")));
            }
        }
        let get = |i: usize| {
            fields[i].ok_or_else(|| err(no, format!("missing field {}", REPORT_FIELDS[i])))
        };
        let num = |i: usize| -> Result<usize, FormatError> {
            get(i)?
                .parse()
                .map_err(|_| err(no, format!("{} is not a number", REPORT_FIELDS[i])))
        };
        let name = |i: usize| -> Result<String, FormatError> {
            let v = get(i)?;
            if v.is_empty() {
                return Err(err(no, format!("empty {}", REPORT_FIELDS[i])));
            }
            Ok(v.to_string())
        };
        out.push(LockRecord {
            key_index: num(0)?,
            strategy: get(1)?
                .parse::<Strategy>()
                .map_err(|e| err(no, e.to_string()))?,
            group: num(2)?,
            mux: name(3)?,
            gate: name(4)?,
            pin: num(5)?,
            true_src: name(6)?,
            false_src: name(7)?,
            key_value: match get(8)? {
                "0" => false,
                "1" => true,
                v => return Err(err(no, format!("bad value {v}"))),
            },
            provenance: get(9)?
                .parse::<Provenance>()
                .map_err(|e| err(no, e.to_string()))?,
        });
    }
    Ok(out)
}
