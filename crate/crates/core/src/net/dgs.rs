//! The DGS1 schedule file format.
//!
//! ```text
//! DGS1 <n> <horizon> <mode>
//! R <t>
//! E <u> <v>        (u < v, ascending by (u, v))
//! I <node> <token> (ascending by (node, token))
//! ```
//!
//! Rounds run `1..=horizon`. A leading `R 0` block holding only `I` lines is
//! written when the schedule has round-0 insertions. Every line, including
//! the last, ends in `\n`.

use std::fmt::Write as _;
use std::sync::Arc;

use super::{AdversarySchedule, InsertionEvent, Mode, NetworkSnapshot, NodeId, Round, ScheduleError, TokenId};
use crate::adversaries::ScheduleMetadata;

#[derive(Debug, thiserror::Error)]
pub enum DgsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ScheduleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Renders a schedule in canonical DGS1 form.
pub fn export_schedule(schedule: &AdversarySchedule) -> String {
    let mut out = String::new();
    writeln!(out, "DGS1 {} {} {}", schedule.n, schedule.horizon(), schedule.mode.as_str()).unwrap();
    let initial = schedule.insertions_at(0);
    if !initial.is_empty() {
        out.push_str("R 0\n");
        write_insertions(&mut out, initial);
    }
    for (i, snap) in schedule.snapshots.iter().enumerate() {
        let round = i as Round + 1;
        writeln!(out, "R {round}").unwrap();
        for &(u, v) in snap.edges() {
            writeln!(out, "E {u} {v}").unwrap();
        }
        write_insertions(&mut out, schedule.insertions_at(round));
    }
    out
}

fn write_insertions(out: &mut String, events: &[InsertionEvent]) {
    for ev in events {
        writeln!(out, "I {} {}", ev.node, ev.token).unwrap();
    }
}

pub fn write_schedule(schedule: &AdversarySchedule, path: &std::path::Path) -> Result<(), DgsError> {
    std::fs::write(path, export_schedule(schedule))?;
    Ok(())
}

pub fn read_schedule(path: &std::path::Path) -> Result<AdversarySchedule, DgsError> {
    import_schedule(&std::fs::read_to_string(path)?)
}

fn parse_err(line: usize, message: impl Into<String>) -> DgsError {
    DgsError::Parse {
        line,
        message: message.into(),
    }
}

fn fields<const N: usize>(line_no: usize, rest: &str) -> Result<[u32; N], DgsError> {
    let mut out = [0u32; N];
    let mut parts = rest.split(' ');
    for slot in out.iter_mut() {
        let part = parts
            .next()
            .ok_or_else(|| parse_err(line_no, format!("expected {N} integers")))?;
        if part.is_empty() || (part.len() > 1 && part.starts_with('0')) || !part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(line_no, format!("`{part}` is not a canonical decimal integer")));
        }
        *slot = part
            .parse()
            .map_err(|_| parse_err(line_no, format!("`{part}` out of range")))?;
    }
    if parts.next().is_some() {
        return Err(parse_err(line_no, format!("expected exactly {N} integers")));
    }
    Ok(out)
}

/// Parses a DGS1 document. Connectivity of every round is re-validated;
/// the error for a disconnected round names that round.
pub fn import_schedule(text: &str) -> Result<AdversarySchedule, DgsError> {
    if !text.ends_with('\n') {
        return Err(parse_err(text.lines().count().max(1), "missing trailing newline"));
    }
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut head = header.split(' ');
    if head.next() != Some("DGS1") {
        return Err(parse_err(1, "header must start with `DGS1`"));
    }
    let n: usize = head
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(1, "bad node count"))?;
    let horizon: usize = head
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(1, "bad horizon"))?;
    let mode: Mode = head
        .next()
        .ok_or_else(|| parse_err(1, "missing mode"))?
        .parse()
        .map_err(|e: String| parse_err(1, e))?;
    if head.next().is_some() {
        return Err(parse_err(1, "trailing fields in header"));
    }

    let mut snapshots: Vec<Arc<NetworkSnapshot>> = Vec::with_capacity(horizon);
    let mut insertions = Vec::new();
    let mut round: Option<Round> = None;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut last_insertion: Option<(u32, u32)> = None;

    let close_round = |round: Option<Round>, edges: &mut Vec<(NodeId, NodeId)>, snapshots: &mut Vec<Arc<NetworkSnapshot>>| {
        if let Some(r) = round {
            if r > 0 {
                let snap = NetworkSnapshot::new(n, edges.drain(..));
                match snapshots.last() {
                    Some(prev) if **prev == snap => snapshots.push(prev.clone()),
                    _ => snapshots.push(Arc::new(snap)),
                }
            }
        }
    };

    for (line_no, line) in lines {
        let (tag, rest) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(line_no, format!("malformed line `{line}`")))?;
        match tag {
            "R" => {
                let [t] = fields::<1>(line_no, rest)?;
                let expected = match round {
                    None if t == 0 => 0,
                    None => 1,
                    Some(r) => r + 1,
                };
                if t != expected {
                    return Err(parse_err(line_no, format!("expected round {expected}, found {t}")));
                }
                close_round(round, &mut edges, &mut snapshots);
                round = Some(t);
                last_insertion = None;
            }
            "E" => {
                let r = round.ok_or_else(|| parse_err(line_no, "edge before first round"))?;
                if r == 0 {
                    return Err(parse_err(line_no, "round 0 carries insertions only"));
                }
                if last_insertion.is_some() {
                    return Err(parse_err(line_no, "edge after insertion lines"));
                }
                let [u, v] = fields::<2>(line_no, rest)?;
                if u >= v {
                    return Err(parse_err(line_no, format!("edge ({u}, {v}) must have u < v")));
                }
                if v as usize >= n {
                    return Err(parse_err(line_no, format!("node {v} outside 0..{n}")));
                }
                let e = (NodeId(u), NodeId(v));
                if edges.last().is_some_and(|&last| last >= e) {
                    return Err(parse_err(line_no, "edges not in strictly ascending order"));
                }
                edges.push(e);
            }
            "I" => {
                let r = round.ok_or_else(|| parse_err(line_no, "insertion before first round"))?;
                let [node, token] = fields::<2>(line_no, rest)?;
                if node as usize >= n {
                    return Err(parse_err(line_no, format!("node {node} outside 0..{n}")));
                }
                if last_insertion.is_some_and(|last| last >= (node, token)) {
                    return Err(parse_err(line_no, "insertions not in strictly ascending order"));
                }
                last_insertion = Some((node, token));
                insertions.push(InsertionEvent {
                    round: r,
                    node: NodeId(node),
                    token: TokenId(token),
                });
            }
            other => return Err(parse_err(line_no, format!("unknown line tag `{other}`"))),
        }
    }
    close_round(round, &mut edges, &mut snapshots);
    if snapshots.len() != horizon {
        return Err(parse_err(
            text.lines().count(),
            format!("header declares {horizon} rounds, file has {}", snapshots.len()),
        ));
    }
    let schedule = AdversarySchedule::new(n, snapshots, insertions, mode, ScheduleMetadata::imported(n))?;
    Ok(schedule)
}
