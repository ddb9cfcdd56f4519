//! Checks model feedback against the three output constraints: a score line
//! plus exactly three corrections, high/low statements that agree with the
//! findings, and no numbers that were not in the prompt.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::grounding::{Finding, Verdict};
use crate::numeric::{same_at_two_decimals, scan_numbers, NumberToken};
use crate::prompt::PromptBundle;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub has_score_line: bool,
    pub score: Option<u8>,
    pub correction_count: usize,
    pub has_three_corrections: bool,
    pub directions_consistent: bool,
    pub direction_conflicts: Vec<String>,
    pub fabricated_numbers: Vec<String>,
    pub pass: bool,
}

/// Feature mentions, longest alias first.
const FEATURE_ALIASES: &[(&[&str], &[&str])] = &[
    (&["peak", "angular", "velocity"], &["peak_angular_velocity"]),
    (&["racket", "head", "speed"], &["racket_velocity_max"]),
    (&["kinetic", "chain", "timing"], &["kinetic_chain_pct"]),
    (&["racket", "velocity"], &["racket_velocity_max"]),
    (&["racket", "speed"], &["racket_velocity_max"]),
    (&["swing", "speed"], &["racket_velocity_max"]),
    (&["angular", "velocity"], &["peak_angular_velocity"]),
    (&["rotation", "range"], &["rotation_range_deg"]),
    (&["stroke", "duration"], &["stroke_duration_frames", "stroke_duration_s"]),
    (&["swing", "duration"], &["stroke_duration_frames", "stroke_duration_s"]),
    (&["impact", "timing"], &["impact_timing_pct"]),
    (&["contact", "timing"], &["impact_timing_pct"]),
    (&["peak", "power"], &["peak_power"]),
    (&["kinetic", "chain"], &["kinetic_chain_pct"]),
    (&["rotation"], &["rotation_range_deg"]),
    (&["duration"], &["stroke_duration_frames", "stroke_duration_s"]),
    (&["power"], &["peak_power"]),
];

/// Words that place a feature above its range: descriptions ("excessive") and
/// corrective verbs that only make sense for a high value ("reduce").
const HIGH_WORDS: &[&str] = &[
    "high", "higher", "highest", "excessive", "excessively", "excess", "above", "exceeds", "exceeding",
    "exceeded", "large", "larger", "long", "longer", "overly", "greater", "reduce", "reducing", "decrease",
    "decreasing", "shorten", "shortening", "limit", "minimize", "shrink",
];

const LOW_WORDS: &[&str] = &[
    "low", "lowest", "below", "reduced", "short", "shorter", "shortened", "insufficient", "insufficiently",
    "lacking", "limited", "small", "smaller", "slow", "slower", "weak", "weaker", "deficient", "inadequate",
    "increase", "increasing", "raise", "boost", "lengthen", "extend", "maximize",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    High,
    Low,
}

/// Byte span of the first non-empty line and its score, if it is a valid
/// `Overall Score: X/10` line.
fn score_line(text: &str) -> (Option<(usize, usize)>, Option<u8>) {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let start = offset;
        offset += line.len();
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let core = trimmed.trim_matches(|c: char| c == '*' || c == '#' || c.is_whitespace());
        let score = parse_score(core);
        return (score.map(|_| (start, offset)), score);
    }
    (None, None)
}

fn parse_score(line: &str) -> Option<u8> {
    const PREFIX: &str = "overall score:";
    if line.len() < PREFIX.len() || !line[..PREFIX.len()].eq_ignore_ascii_case(PREFIX) {
        return None;
    }
    let rest = line[PREFIX.len()..].trim_start();
    let (score, rest) = rest.split_once('/')?;
    let score = score.trim();
    if score.is_empty() || !score.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if rest.trim().trim_end_matches('.') != "10" {
        return None;
    }
    let score: u32 = score.parse().ok()?;
    u8::try_from(score).ok().filter(|s| *s <= 10)
}

/// An integer followed by `.` or `)` and whitespace, at a line start or after
/// whitespace, is a candidate list marker.
fn is_marker_candidate(text: &str, token: &NumberToken) -> bool {
    if token.text.contains('.') {
        return false;
    }
    let bytes = text.as_bytes();
    let after = bytes.get(token.end).copied();
    if !matches!(after, Some(b'.') | Some(b')')) {
        return false;
    }
    if !bytes.get(token.end + 1).is_none_or(|b| b.is_ascii_whitespace()) {
        return false;
    }
    token.start == 0 || bytes[token.start - 1].is_ascii_whitespace()
}

/// Markers forming 1, 2, 3, ... runs. Each run restarts at 1.
fn enumeration_markers(text: &str, tokens: &[NumberToken]) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    let mut expected = 1;
    for (i, token) in tokens.iter().enumerate() {
        if !is_marker_candidate(text, token) {
            continue;
        }
        let Ok(n) = token.text.parse::<u32>() else { continue };
        if n == 1 {
            expected = 2;
            out.push((i, 1));
        } else if n == expected {
            expected += 1;
            out.push((i, n));
        }
    }
    out
}

fn corrections_start(text: &str, from: usize) -> Option<usize> {
    let lower = text.to_lowercase();
    // to_lowercase keeps ASCII byte offsets; non-ASCII text is searched as is
    let haystack = if lower.len() == text.len() { lower.as_str() } else { text };
    haystack[from..].find("correction").map(|i| i + from)
}

fn count_corrections(text: &str, section_start: usize, tokens: &[NumberToken], markers: &[(usize, u32)]) -> usize {
    // the numbered run that starts inside the corrections section
    let mut numbered = 0;
    for &(i, n) in markers {
        if tokens[i].start < section_start {
            continue;
        }
        if n == 1 {
            numbered = 1;
        } else if n == numbered + 1 {
            numbered = n;
        }
    }
    if numbered > 0 {
        return numbered as usize;
    }
    text[section_start..]
        .lines()
        .filter(|line| {
            let t = line.trim_start();
            ["- ", "* ", "• ", "– "].iter().any(|b| t.starts_with(b))
        })
        .count()
}

fn sentences(text: &str) -> Vec<&str> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        let split = match c {
            '\n' | '!' | '?' | ';' | '•' => true,
            '.' => {
                let prev_digit = i > 0 && bytes[i - 1].is_ascii_digit();
                let next_digit = bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit());
                !(prev_digit && next_digit)
            }
            _ => false,
        };
        if split {
            out.push(&text[start..i]);
            start = i + c.len_utf8();
        }
    }
    out.push(&text[start..]);
    out.into_iter().filter(|s| !s.trim().is_empty()).collect()
}

fn words(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

fn direction_conflicts(text: &str, findings: &[Finding]) -> Vec<String> {
    let mut conflicts = Vec::new();
    for sentence in sentences(text) {
        let words = words(sentence);
        let cues: Vec<(usize, Direction)> = words
            .iter()
            .enumerate()
            .filter_map(|(i, w)| {
                if HIGH_WORDS.contains(&w.as_str()) {
                    Some((i, Direction::High))
                } else if LOW_WORDS.contains(&w.as_str()) {
                    Some((i, Direction::Low))
                } else {
                    None
                }
            })
            .collect();
        if cues.is_empty() {
            continue;
        }
        let mut i = 0;
        while i < words.len() {
            let hit = FEATURE_ALIASES.iter().find(|(alias, _)| {
                i + alias.len() <= words.len() && alias.iter().zip(&words[i..]).all(|(a, w)| *a == w)
            });
            let Some((alias, keys)) = hit else {
                i += 1;
                continue;
            };
            let (start, end) = (i, i + alias.len());
            i = end;
            // nearest cue; on equal distance the one before the mention wins
            let distance = |k: usize| if k < start { start - k } else { k + 1 - end };
            let Some(&(_, direction)) = cues.iter().min_by_key(|(k, _)| (distance(*k), *k >= start)) else {
                continue;
            };
            for finding in findings.iter().filter(|f| keys.contains(&f.feature.as_str())) {
                let expected = match finding.verdict {
                    Verdict::High => Direction::High,
                    Verdict::Low => Direction::Low,
                    Verdict::Ok | Verdict::Missing => continue,
                };
                if expected != direction {
                    conflicts.push(format!(
                        "'{}' described as {} but finding for {} is {}",
                        alias.join(" "),
                        if direction == Direction::High { "HIGH" } else { "LOW" },
                        finding.feature,
                        finding.verdict
                    ));
                }
            }
        }
    }
    conflicts
}

/// Validates `text` against the prompt it answered and the findings behind it.
pub fn check_feedback(text: &str, bundle: &PromptBundle, findings: &[Finding]) -> ComplianceReport {
    let (score_span, score) = score_line(text);
    let has_score_line = score.is_some();

    let tokens = scan_numbers(text);
    let markers = enumeration_markers(text, &tokens);
    let after_score = score_span.map_or(0, |(_, end)| end);
    let section = corrections_start(text, after_score).unwrap_or(after_score);
    let correction_count = count_corrections(text, section, &tokens, &markers);
    let has_three_corrections = correction_count == 3;

    let inputs: Vec<f64> = bundle.input_numbers.iter().filter_map(|n| n.parse().ok()).collect();
    let mut fabricated_numbers: Vec<String> = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        if score_span.is_some_and(|(s, e)| token.start >= s && token.end <= e) {
            continue;
        }
        if markers.iter().any(|(m, _)| *m == i) {
            continue;
        }
        if inputs.iter().any(|v| same_at_two_decimals(*v, token.value)) {
            continue;
        }
        if !fabricated_numbers.contains(&token.text) {
            fabricated_numbers.push(token.text.to_string());
        }
    }

    let body = &text[after_score..];
    let direction_conflicts = direction_conflicts(body, findings);
    let directions_consistent = direction_conflicts.is_empty();

    let pass = has_score_line && has_three_corrections && directions_consistent && fabricated_numbers.is_empty();
    ComplianceReport {
        has_score_line,
        score,
        correction_count,
        has_three_corrections,
        directions_consistent,
        direction_conflicts,
        fabricated_numbers,
        pass,
    }
}
