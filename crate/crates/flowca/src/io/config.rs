//! The run-config grammar.
//!
//! ```text
//! # Fig. 1 style run
//! [grid]
//! rows = 20
//! cols = 20
//! steps = 200
//! d = 3
//! seed = 1
//!
//! [inflow]
//! pattern = single      # single | alternate | all | list
//! column = 20
//!
//! [obstacle]
//! rect = 10 12 10 20    # r1 c1 r2 c2, inclusive
//! ```
//!
//! `alternate` takes an optional `offset = 1|2` for the starting column,
//! `list` takes `columns = j1,j2,...`.

use std::collections::HashMap;
use std::fmt;

use flowca_core::{validate, ConfigError, InflowPattern, Rect, SimConfig};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigIssue {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("section [{0}] appears twice")]
    DuplicateSection(String),
    #[error("unknown key `{key}` in [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("missing required key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("bad value for `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("key `{key}` is not used by pattern `{pattern}`")]
    UnusedKey { key: String, pattern: String },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

/// One problem with a config file, tied to a 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub issue: ConfigIssue,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.issue)
    }
}

/// All diagnostics of a rejected config, in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConfigErrors(pub Vec<Diagnostic>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Grid,
    Inflow,
    Obstacle,
}

impl Section {
    fn name(self) -> &'static str {
        match self {
            Section::Grid => "grid",
            Section::Inflow => "inflow",
            Section::Obstacle => "obstacle",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Grid => &["rows", "cols", "steps", "d", "seed"],
            Section::Inflow => &["pattern", "column", "columns", "offset"],
            Section::Obstacle => &["rect"],
        }
    }
}

#[derive(Default)]
struct Raw<'a> {
    headers: HashMap<Section, usize>,
    values: HashMap<(Section, &'a str), (usize, &'a str)>,
    rects: Vec<(usize, &'a str)>,
}

fn lex<'a>(text: &'a str, diags: &mut Vec<Diagnostic>) -> Raw<'a> {
    let mut raw = Raw::default();
    let mut current: Option<Section> = None;
    for (idx, line) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut err = |issue| diags.push(Diagnostic { line: lineno, issue });
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                err(ConfigIssue::Syntax(format!("unterminated section header `{line}`")));
                current = None;
                continue;
            };
            let name = name.trim();
            let section = match name {
                "grid" => Section::Grid,
                "inflow" => Section::Inflow,
                "obstacle" => Section::Obstacle,
                _ => {
                    err(ConfigIssue::UnknownSection(name.to_string()));
                    current = None;
                    continue;
                }
            };
            if raw.headers.insert(section, lineno).is_some() {
                err(ConfigIssue::DuplicateSection(name.to_string()));
            }
            current = Some(section);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            err(ConfigIssue::Syntax(format!("expected `key = value`, got `{line}`")));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = current else {
            err(ConfigIssue::Syntax(format!("`{key}` outside any section")));
            continue;
        };
        if !section.keys().contains(&key) {
            err(ConfigIssue::UnknownKey {
                section: section.name().to_string(),
                key: key.to_string(),
            });
            continue;
        }
        if section == Section::Obstacle {
            raw.rects.push((lineno, value));
        } else if raw.values.insert((section, key), (lineno, value)).is_some() {
            err(ConfigIssue::DuplicateKey(key.to_string()));
        }
    }
    raw
}

struct Fields<'r, 'a> {
    raw: &'r Raw<'a>,
    diags: &'r mut Vec<Diagnostic>,
    eof_line: usize,
}

impl Fields<'_, '_> {
    fn line_of(&self, section: Section, key: &str) -> usize {
        self.raw
            .values
            .get(&(section, key))
            .map(|&(l, _)| l)
            .or_else(|| self.raw.headers.get(&section).copied())
            .unwrap_or(self.eof_line)
    }

    fn parse<T: std::str::FromStr>(&mut self, section: Section, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw.values.get(&(section, key)) {
            None => None,
            Some(&(line, value)) => match value.parse::<T>() {
                Ok(v) => Some(v),
                Err(e) => {
                    self.diags.push(Diagnostic {
                        line,
                        issue: ConfigIssue::BadValue {
                            key: key.to_string(),
                            reason: format!("`{value}`: {e}"),
                        },
                    });
                    None
                }
            },
        }
    }

    fn require<T: std::str::FromStr>(&mut self, section: Section, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        if !self.raw.values.contains_key(&(section, key)) {
            let line = self.line_of(section, key);
            self.diags.push(Diagnostic {
                line,
                issue: ConfigIssue::MissingKey {
                    section: section.name().to_string(),
                    key: key.to_string(),
                },
            });
            return None;
        }
        self.parse(section, key)
    }

    fn reject_unused(&mut self, keys: &[&str], pattern: &str) {
        for &key in keys {
            if let Some(&(line, _)) = self.raw.values.get(&(Section::Inflow, key)) {
                self.diags.push(Diagnostic {
                    line,
                    issue: ConfigIssue::UnusedKey {
                        key: key.to_string(),
                        pattern: pattern.to_string(),
                    },
                });
            }
        }
    }
}

fn parse_rect(value: &str) -> Result<Rect, String> {
    let nums: Vec<usize> = value
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    match nums[..] {
        [r1, c1, r2, c2] => Ok(Rect::new(r1, c1, r2, c2)),
        _ => Err(format!("expected 4 integers `r1 c1 r2 c2`, got {}", nums.len())),
    }
}

fn parse_columns(value: &str) -> Result<Vec<usize>, String> {
    value
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>().map_err(|e| format!("`{t}`: {e}"))
        })
        .collect()
}

/// Parses and validates a config. Every diagnostic carries a line number;
/// problems with no line of their own point at their section header, or at
/// the last line when the section is absent.
pub fn parse_config(text: &str) -> Result<SimConfig, ConfigErrors> {
    let mut diags = Vec::new();
    let raw = lex(text, &mut diags);
    let eof_line = text.split('\n').count();
    for section in [Section::Grid, Section::Inflow] {
        if !raw.headers.contains_key(&section) {
            diags.push(Diagnostic {
                line: eof_line,
                issue: ConfigIssue::MissingSection(section.name().to_string()),
            });
        }
    }
    let mut fields = Fields {
        raw: &raw,
        diags: &mut diags,
        eof_line,
    };

    let rows = fields.require::<usize>(Section::Grid, "rows");
    let cols = fields.require::<usize>(Section::Grid, "cols");
    let steps = fields.require::<usize>(Section::Grid, "steps");
    let capacity = fields.require::<u32>(Section::Grid, "d");
    let seed = fields.require::<u64>(Section::Grid, "seed");

    let inflow = match fields.require::<String>(Section::Inflow, "pattern").as_deref() {
        None => None,
        Some("single") => {
            fields.reject_unused(&["columns", "offset"], "single");
            fields
                .require::<usize>(Section::Inflow, "column")
                .map(InflowPattern::single)
        }
        Some("alternate") => {
            fields.reject_unused(&["column", "columns"], "alternate");
            let offset = fields.parse::<usize>(Section::Inflow, "offset").unwrap_or(1);
            if !(1..=2).contains(&offset) {
                let line = fields.line_of(Section::Inflow, "offset");
                fields.diags.push(Diagnostic {
                    line,
                    issue: ConfigIssue::BadValue {
                        key: "offset".into(),
                        reason: format!("must be 1 or 2, got {offset}"),
                    },
                });
                None
            } else {
                cols.and_then(|m| InflowPattern::alternate(m, offset).ok())
            }
        }
        Some("all") => {
            fields.reject_unused(&["column", "columns", "offset"], "all");
            cols.and_then(|m| InflowPattern::all(m).ok())
        }
        Some("list") => {
            fields.reject_unused(&["column", "offset"], "list");
            fields
                .require::<String>(Section::Inflow, "columns")
                .and_then(|value| {
                    let line = fields.line_of(Section::Inflow, "columns");
                    let parsed = parse_columns(&value)
                        .map_err(|reason| ConfigIssue::BadValue {
                            key: "columns".into(),
                            reason,
                        })
                        .and_then(|cols| InflowPattern::new(cols).map_err(ConfigIssue::from));
                    parsed
                        .map_err(|issue| fields.diags.push(Diagnostic { line, issue }))
                        .ok()
                })
        }
        Some(other) => {
            let line = fields.line_of(Section::Inflow, "pattern");
            fields.diags.push(Diagnostic {
                line,
                issue: ConfigIssue::BadValue {
                    key: "pattern".into(),
                    reason: format!("`{other}` is not one of single, alternate, all, list"),
                },
            });
            None
        }
    };

    let mut obstacles = Vec::with_capacity(raw.rects.len());
    let mut rect_lines = Vec::with_capacity(raw.rects.len());
    for &(line, value) in &raw.rects {
        match parse_rect(value) {
            Ok(rect) => {
                obstacles.push(rect);
                rect_lines.push(line);
            }
            Err(reason) => fields.diags.push(Diagnostic {
                line,
                issue: ConfigIssue::BadValue {
                    key: "rect".into(),
                    reason,
                },
            }),
        }
    }

    if !diags.is_empty() {
        diags.sort_by_key(|d| d.line);
        return Err(ConfigErrors(diags));
    }
    let (Some(rows), Some(cols), Some(steps), Some(capacity), Some(seed), Some(inflow)) =
        (rows, cols, steps, capacity, seed, inflow)
    else {
        // Every None above pushed a diagnostic; an alternate/all pattern on
        // cols = 0 is the one case left, and validation reports it below.
        return validate_with_lines(
            SimConfig {
                rows: rows.unwrap_or(0),
                cols: cols.unwrap_or(0),
                steps: steps.unwrap_or(0),
                capacity: capacity.unwrap_or(0),
                seed: seed.unwrap_or(0),
                inflow: InflowPattern::none(),
                obstacles,
            },
            &raw,
            &rect_lines,
            eof_line,
        );
    };
    validate_with_lines(
        SimConfig {
            rows,
            cols,
            steps,
            capacity,
            seed,
            inflow,
            obstacles,
        },
        &raw,
        &rect_lines,
        eof_line,
    )
}

fn validate_with_lines(
    config: SimConfig,
    raw: &Raw<'_>,
    rect_lines: &[usize],
    eof_line: usize,
) -> Result<SimConfig, ConfigErrors> {
    let key_line = |section: Section, key: &str| {
        raw.values
            .get(&(section, key))
            .map(|&(l, _)| l)
            .or_else(|| raw.headers.get(&section).copied())
            .unwrap_or(eof_line)
    };
    let inflow_line = ["columns", "column", "pattern"]
        .iter()
        .find_map(|k| raw.values.get(&(Section::Inflow, *k)).map(|&(l, _)| l))
        .unwrap_or(eof_line);
    let rect_line = |rect: &Rect| {
        config
            .obstacles
            .iter()
            .position(|r| r == rect)
            .map(|i| rect_lines[i])
            .unwrap_or(eof_line)
    };
    validate(config.clone()).map_err(|errs| {
        let mut diags: Vec<Diagnostic> = errs
            .0
            .into_iter()
            .map(|e| {
                let line = match &e {
                    ConfigError::ZeroRows => key_line(Section::Grid, "rows"),
                    ConfigError::ZeroCols => key_line(Section::Grid, "cols"),
                    ConfigError::ZeroCapacity => key_line(Section::Grid, "d"),
                    ConfigError::EmptyInflow
                    | ConfigError::InflowNotIncreasing { .. }
                    | ConfigError::InflowOutOfRange { .. } => inflow_line,
                    ConfigError::InvertedRect { rect }
                    | ConfigError::RectOutOfBounds { rect, .. }
                    | ConfigError::InflowBlocked { rect, .. } => rect_line(rect),
                };
                Diagnostic {
                    line,
                    issue: ConfigIssue::Invalid(e),
                }
            })
            .collect();
        diags.sort_by_key(|d| d.line);
        ConfigErrors(diags)
    })
}

/// Renders a config back into the grammar accepted by [`parse_config`],
/// always as a `list` pattern.
pub fn write_config(config: &SimConfig) -> String {
    let columns: Vec<String> = config.inflow.columns().iter().map(|c| c.to_string()).collect();
    let mut out = format!(
        "[grid]\nrows = {}\ncols = {}\nsteps = {}\nd = {}\nseed = {}\n\n[inflow]\npattern = list\ncolumns = {}\n",
        config.rows,
        config.cols,
        config.steps,
        config.capacity,
        config.seed,
        columns.join(",")
    );
    if !config.obstacles.is_empty() {
        out.push_str("\n[obstacle]\n");
        for r in &config.obstacles {
            out.push_str(&format!("rect = {} {} {} {}\n", r.r1, r.c1, r.r2, r.c2));
        }
    }
    out
}
