//! Plain-text sequence files.
//!
//! ```text
//! n=5 k=3
//! 0,1,2
//! 1,2,3
//! ```
//!
//! One query per line, spike IDs ascending and comma separated. Every line,
//! the header included, ends with `\n`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::scene::{ProblemParams, Query, QuerySequence};

pub fn write_sequence<W: Write>(seq: &QuerySequence, mut out: W) -> io::Result<()> {
    let p = seq.params();
    writeln!(out, "n={} k={}", p.n(), p.k())?;
    for q in seq {
        writeln!(out, "{q}")?;
    }
    Ok(())
}

pub fn sequence_to_string(seq: &QuerySequence) -> String {
    let mut buf = Vec::new();
    write_sequence(seq, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("sequence text is ASCII")
}

pub fn parse_sequence(text: &str) -> Result<QuerySequence> {
    let mut lines = text.split('\n').enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let params = parse_header(header)?;
    let mut queries = Vec::new();
    let mut ended = false;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if ended {
            return Err(parse_err(lineno - 1, "blank line inside sequence"));
        }
        if line.is_empty() {
            ended = true;
            continue;
        }
        queries.push(parse_query(line, params, lineno)?);
    }
    if !ended {
        return Err(parse_err(queries.len() + 1, "missing trailing newline"));
    }
    QuerySequence::new(params, queries)
}

fn parse_header(line: &str) -> Result<ProblemParams> {
    let mut parts = line.split(' ');
    let n = parts
        .next()
        .and_then(|s| s.strip_prefix("n="))
        .ok_or_else(|| parse_err(1, "header must be `n=<n> k=<k>`"))?;
    let k = parts
        .next()
        .and_then(|s| s.strip_prefix("k="))
        .ok_or_else(|| parse_err(1, "header must be `n=<n> k=<k>`"))?;
    if parts.next().is_some() {
        return Err(parse_err(1, "trailing text after header"));
    }
    let n = parse_number(n, 1)?;
    let k = parse_number(k, 1)?;
    let params = ProblemParams::new(n, k)?;
    params.require_mask_width()?;
    Ok(params)
}

fn parse_query(line: &str, params: ProblemParams, lineno: usize) -> Result<Query> {
    let mut ids = Vec::with_capacity(params.k() as usize);
    for field in line.split(',') {
        let id = parse_number(field, lineno)?;
        if let Some(&prev) = ids.last() {
            if id <= prev {
                return Err(parse_err(lineno, "spike IDs must be strictly ascending"));
            }
        }
        if id >= params.n() {
            return Err(parse_err(
                lineno,
                &format!("spike ID {id} is not below n={}", params.n()),
            ));
        }
        ids.push(id);
    }
    if ids.len() != params.k() as usize {
        return Err(parse_err(
            lineno,
            &format!("expected {} spike IDs, found {}", params.k(), ids.len()),
        ));
    }
    Query::from_elements(&ids)
}

fn parse_number(s: &str, line: usize) -> Result<u32> {
    // reject forms like "+1" or "01" that would not survive a round trip
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0'))
    {
        return Err(parse_err(
            line,
            &format!("`{s}` is not a canonical integer"),
        ));
    }
    s.parse()
        .map_err(|_| parse_err(line, &format!("`{s}` is out of range")))
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}
