//! Line-oriented plan text: one `dx dy` command per line, `#` lines name
//! the phase that starts at the next command.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kinematic::{MoveCommand, MoveSequence};

/// Decimal places written per coordinate.
pub const PLAN_DECIMALS: usize = 12;

pub fn write_plan(seq: &MoveSequence) -> String {
    let mut out = String::new();
    let mut labels = seq.annotations().iter().peekable();
    for (i, c) in seq.commands().iter().enumerate() {
        while let Some((_, label)) = labels.next_if(|(at, _)| *at == i) {
            let _ = writeln!(out, "# {label}");
        }
        let d = c.displacement();
        let _ = writeln!(out, "{:.*} {:.*}", PLAN_DECIMALS, d.x, PLAN_DECIMALS, d.y);
    }
    for (_, label) in labels {
        let _ = writeln!(out, "# {label}");
    }
    out
}

pub fn parse_plan(text: &str) -> Result<MoveSequence> {
    let mut seq = MoveSequence::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(label) = line.strip_prefix('#') {
            seq.annotate(label.trim());
            continue;
        }
        let err = |msg: &str| Error::PlanParse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let mut parts = line.split_whitespace();
        let mut coord = || -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| err("expected two numbers"))?
                .parse::<f64>()
                .map_err(|e| err(&e.to_string()))
        };
        let (dx, dy) = (coord()?, coord()?);
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
        seq.push(MoveCommand::new(dx, dy).map_err(|_| err("non-finite command"))?);
    }
    Ok(seq)
}
