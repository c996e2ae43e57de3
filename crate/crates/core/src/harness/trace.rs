//! The GTR1 run trace: initial holdings plus the new arrivals of every
//! executed round.
//!
//! ```text
//! GTR1 <n> <universe>
//! S <node> <token>...           (initial holdings, nodes with tokens only)
//! R <round> <node>:<token>...   (one line per executed round, ascending)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::net::{NodeId, Round, RoundObserver, RoundRecord, TokenId, TokenState};
use crate::token_set::TokenSet;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub n: usize,
    pub universe: usize,
    pub initial: Vec<Vec<TokenId>>,
    /// `rounds[i]` holds the arrivals of round `i + 1`.
    pub rounds: Vec<Vec<(NodeId, TokenId)>>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn bad(line: usize, message: impl Into<String>) -> TraceError {
    TraceError::Parse {
        line,
        message: message.into(),
    }
}

impl Trace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "GTR1 {} {}", self.n, self.universe).unwrap();
        for (v, tokens) in self.initial.iter().enumerate() {
            if tokens.is_empty() {
                continue;
            }
            write!(out, "S {v}").unwrap();
            for t in tokens {
                write!(out, " {t}").unwrap();
            }
            out.push('\n');
        }
        for (i, arrivals) in self.rounds.iter().enumerate() {
            write!(out, "R {}", i + 1).unwrap();
            for (v, t) in arrivals {
                write!(out, " {v}:{t}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Trace, TraceError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty trace"))?;
        let head: Vec<&str> = header.split(' ').collect();
        if head.len() != 3 || head[0] != "GTR1" {
            return Err(bad(1, "expected `GTR1 <n> <universe>`"));
        }
        let num = |line: usize, s: &str| s.parse::<u32>().map_err(|_| bad(line, format!("`{s}` is not an integer")));
        let n = num(1, head[1])? as usize;
        let universe = num(1, head[2])? as usize;
        let mut trace = Trace {
            n,
            universe,
            initial: vec![Vec::new(); n],
            rounds: Vec::new(),
        };
        for (line, text) in lines {
            let mut parts = text.split(' ');
            match parts.next() {
                Some("S") => {
                    let v = num(line, parts.next().unwrap_or(""))? as usize;
                    if v >= n || !trace.rounds.is_empty() {
                        return Err(bad(line, "misplaced initial holdings"));
                    }
                    for p in parts {
                        let t = num(line, p)?;
                        if t as usize >= universe {
                            return Err(bad(line, format!("token {t} outside the universe")));
                        }
                        trace.initial[v].push(TokenId(t));
                    }
                }
                Some("R") => {
                    let round = num(line, parts.next().unwrap_or(""))? as usize;
                    if round != trace.rounds.len() + 1 {
                        return Err(bad(line, format!("expected round {}", trace.rounds.len() + 1)));
                    }
                    let mut arrivals = Vec::new();
                    for p in parts {
                        let (v, t) = p.split_once(':').ok_or_else(|| bad(line, format!("`{p}` is not node:token")))?;
                        let (v, t) = (num(line, v)?, num(line, t)?);
                        if v as usize >= n || t as usize >= universe {
                            return Err(bad(line, format!("`{p}` out of range")));
                        }
                        arrivals.push((NodeId(v), TokenId(t)));
                    }
                    trace.rounds.push(arrivals);
                }
                _ => return Err(bad(line, "expected an `S` or `R` line")),
            }
        }
        Ok(trace)
    }

    pub fn write(&self, path: &Path) -> Result<(), TraceError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Trace, TraceError> {
        Trace::parse(&std::fs::read_to_string(path)?)
    }

    /// Calls `f` with the holdings after every round, starting at round 0.
    pub fn replay(&self, mut f: impl FnMut(Round, &[TokenSet])) {
        let mut holdings: Vec<TokenSet> = self
            .initial
            .iter()
            .map(|ts| TokenSet::from_tokens(self.universe, ts.iter().copied()))
            .collect();
        f(0, &holdings);
        for (i, arrivals) in self.rounds.iter().enumerate() {
            for &(v, t) in arrivals {
                holdings[v.index()].insert(t);
            }
            f(i as Round + 1, &holdings);
        }
    }
}

/// Records a [`Trace`] while the engine runs.
#[derive(Default)]
pub struct TraceRecorder {
    pub trace: Trace,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }
}

impl RoundObserver for TraceRecorder {
    fn on_start(&mut self, state: &TokenState) {
        self.trace = Trace {
            n: state.n(),
            universe: state.universe(),
            initial: state.all_holdings().iter().map(|h| h.iter().collect()).collect(),
            rounds: Vec::new(),
        };
    }

    fn on_round(&mut self, record: &RoundRecord<'_>) {
        let mut arrivals = record.arrivals.to_vec();
        arrivals.sort_unstable();
        self.trace.rounds.push(arrivals);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        let trace = Trace {
            n: 3,
            universe: 2,
            initial: vec![vec![TokenId(0), TokenId(1)], vec![], vec![]],
            rounds: vec![vec![(NodeId(1), TokenId(0))], vec![]],
        };
        let text = trace.render();
        assert_eq!(text, "GTR1 3 2\nS 0 0 1\nR 1 1:0\nR 2\n");
        assert_eq!(Trace::parse(&text).unwrap(), trace);
        assert!(Trace::parse("GTR1 3 2\nR 2\n").is_err());
    }
}
