//! Plain-text input formats.
//!
//! All formats ignore blank lines and lines starting with `#`.
//!
//! * Rankings: one permutation per line, objects most-preferred first,
//!   separated by whitespace (`4 3 1 2`).
//! * Adjacent weights / positional increments: one nonnegative decimal per
//!   line.
//! * Transposition weights: `a b w` per line, ranks 1-based.
//! * Generators: a permutation per line, optionally followed by `| w`
//!   (weight 1 when omitted).
//! * Networks: a first line with the agent count `m`, then `i j p` per edge
//!   with 1-based agents. `p` may be a decimal or a fraction `a/b`. When
//!   every edge line omits `p`, edges are equally likely.

use crate::aggregate::Profile;
use crate::distance::{AdjacentWeights, GeneratorSet, TranspositionWeights};
use crate::error::{Error, Result};
use crate::gossip::GossipNetwork;
use crate::perm::Permutation;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_number(line: usize, token: &str) -> Result<f64> {
    let value = match token.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| parse_err(line, format!("bad number {token:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| parse_err(line, format!("bad number {token:?}")))?;
            a / b
        }
        None => token.parse().map_err(|_| parse_err(line, format!("bad number {token:?}")))?,
    };
    if !value.is_finite() {
        return Err(parse_err(line, format!("{token:?} is not finite")));
    }
    Ok(value)
}

fn parse_index(line: usize, token: &str) -> Result<usize> {
    token.parse().map_err(|_| parse_err(line, format!("bad integer {token:?}")))
}

fn parse_permutation_tokens(line: usize, text: &str) -> Result<Permutation> {
    let entries = text
        .split_whitespace()
        .map(|t| parse_index(line, t))
        .collect::<Result<Vec<_>>>()?;
    Permutation::new(entries).map_err(|e| parse_err(line, e.to_string()))
}

pub fn parse_rankings(text: &str) -> Result<Vec<Permutation>> {
    content_lines(text).map(|(k, l)| parse_permutation_tokens(k, l)).collect()
}

pub fn parse_profile(text: &str) -> Result<Profile> {
    Profile::new(parse_rankings(text)?)
}

/// One decimal per line.
pub fn parse_weight_list(text: &str) -> Result<Vec<f64>> {
    content_lines(text)
        .map(|(k, l)| {
            let v = parse_number(k, l)?;
            if v < 0.0 {
                return Err(parse_err(k, format!("weight {v} is negative")));
            }
            Ok(v)
        })
        .collect()
}

pub fn parse_adjacent_weights(text: &str) -> Result<AdjacentWeights> {
    AdjacentWeights::new(parse_weight_list(text)?)
}

pub fn parse_transposition_weights(text: &str, n: usize) -> Result<TranspositionWeights> {
    let triples = content_lines(text)
        .map(|(k, l)| {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            match tokens.as_slice() {
                [a, b, w] => Ok((parse_index(k, a)?, parse_index(k, b)?, parse_number(k, w)?)),
                _ => Err(parse_err(k, "expected \"a b w\"")),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TranspositionWeights::from_triples(n, &triples)
}

pub fn parse_generators(text: &str) -> Result<GeneratorSet> {
    let gens = content_lines(text)
        .map(|(k, l)| {
            let (perm, weight) = match l.split_once('|') {
                Some((p, w)) => (p, parse_number(k, w.trim())?),
                None => (l, 1.0),
            };
            Ok((parse_permutation_tokens(k, perm)?, weight))
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(gens)
}

pub fn parse_network(text: &str) -> Result<GossipNetwork> {
    let mut lines = content_lines(text);
    let (k, first) = lines.next().ok_or_else(|| parse_err(1, "missing agent count"))?;
    let m = parse_index(k, first)?;
    let mut edges = Vec::new();
    let mut explicit = Vec::new();
    for (k, l) in lines {
        let tokens: Vec<&str> = l.split_whitespace().collect();
        let (i, j, p) = match tokens.as_slice() {
            [i, j] => (i, j, None),
            [i, j, p] => (i, j, Some(parse_number(k, p)?)),
            _ => return Err(parse_err(k, "expected \"i j p\"")),
        };
        let (i, j) = (parse_index(k, i)?, parse_index(k, j)?);
        if i == 0 || j == 0 {
            return Err(parse_err(k, "agents are numbered from 1"));
        }
        edges.push((i - 1, j - 1));
        explicit.push(p);
    }
    if explicit.iter().all(Option::is_none) {
        return GossipNetwork::uniform(m, edges);
    }
    if explicit.iter().any(Option::is_none) {
        return Err(Error::InvalidNetwork(
            "either every edge or no edge must carry a probability".into(),
        ));
    }
    GossipNetwork::new(
        m,
        edges.into_iter().zip(explicit).map(|((i, j), p)| (i, j, p.unwrap_or_default())).collect(),
    )
}

/// Renders a network in the file format above.
pub fn format_network(network: &GossipNetwork) -> String {
    let mut out = format!("{}\n", network.m());
    for (&(i, j), p) in network.edges().iter().zip(network.probs()) {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, p));
    }
    out
}

/// Rounds to `digits` significant digits, then prints the shortest decimal
/// that reads back to the rounded value.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("scientific notation parses");
    format!("{rounded}")
}
