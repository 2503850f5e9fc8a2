//! Plain-text problem instances.
//!
//! ```text
//! # comments run to the end of a line
//! w1 h1 w2 h2
//! x1 y1 x2 y2        one correspondence per line
//! ...
//! H:                 or F:, followed by 9 numbers, row-major (optional)
//! 1 0 0 0 1 0 0 0 1
//! L:                 one 0/1 inlier label per correspondence (optional)
//! 1 0 1 ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use magsac_core::{Correspondence, GroundTruth, ImageSizes, Model, ModelKind};
use nalgebra::Matrix3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub id: String,
    /// Known from a ground-truth section; otherwise supplied by the caller.
    pub kind: Option<ModelKind>,
    pub points: Vec<Correspondence>,
    pub sizes: ImageSizes,
    pub truth: Option<GroundTruth>,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl InstanceError {
    fn at(line: usize, reason: impl Into<String>) -> Self {
        InstanceError::Parse {
            line,
            reason: reason.into(),
        }
    }

    /// 1-based line of a parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            InstanceError::Parse { line, .. } => Some(*line),
            InstanceError::Io(_) => None,
        }
    }
}

/// Reads an instance; its id is the file stem.
pub fn parse_instance(path: &Path) -> Result<ProblemInstance, InstanceError> {
    let text = std::fs::read_to_string(path)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_str(&text, &id)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Rows,
    Model(ModelKind),
    Labels,
}

struct Block {
    section: Section,
    line: usize,
    tokens: Vec<(usize, String)>,
}

pub fn parse_str(text: &str, id: &str) -> Result<ProblemInstance, InstanceError> {
    let mut header: Option<ImageSizes> = None;
    let mut points = Vec::new();
    let mut blocks: Vec<Block> = Vec::new();
    let mut section = Section::Rows;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (marker, rest) = match content.split_once(':') {
            Some((m, rest)) => (Some(m.trim()), rest),
            None => (None, content),
        };
        if let Some(marker) = marker {
            let next = match marker {
                "H" => Section::Model(ModelKind::Homography),
                "F" => Section::Model(ModelKind::FundamentalMatrix),
                "L" => Section::Labels,
                other => return Err(InstanceError::at(line, format!("unknown section `{other}:`"))),
            };
            if header.is_none() {
                return Err(InstanceError::at(line, "section before the image-size header"));
            }
            if blocks.iter().any(|b| b.section == next)
                || (matches!(next, Section::Model(_)) && blocks.iter().any(|b| matches!(b.section, Section::Model(_))))
            {
                return Err(InstanceError::at(line, format!("duplicate `{marker}:` section")));
            }
            section = next;
            blocks.push(Block {
                section,
                line,
                tokens: Vec::new(),
            });
        }
        match section {
            Section::Rows => {
                let values = numbers(rest, line)?;
                if header.is_none() {
                    if values.len() != 4 {
                        return Err(InstanceError::at(
                            line,
                            format!("header needs 4 image sizes, found {}", values.len()),
                        ));
                    }
                    let sizes = ImageSizes::new(values[0], values[1], values[2], values[3]);
                    if !sizes.is_valid() {
                        return Err(InstanceError::at(line, "image sizes must be positive"));
                    }
                    header = Some(sizes);
                } else {
                    if values.len() != 4 {
                        return Err(InstanceError::at(
                            line,
                            format!("expected 4 coordinates, found {}", values.len()),
                        ));
                    }
                    points.push(Correspondence::new(values[0], values[1], values[2], values[3]));
                }
            }
            Section::Model(_) | Section::Labels => {
                let block = blocks.last_mut().expect("section block opened");
                block
                    .tokens
                    .extend(rest.split_whitespace().map(|t| (line, t.to_owned())));
            }
        }
    }

    let sizes = header.ok_or_else(|| InstanceError::at(1, "missing image-size header"))?;
    let mut model = None;
    let mut labels = None;
    for block in blocks {
        match block.section {
            Section::Model(kind) => {
                let mut values = Vec::with_capacity(9);
                for (line, token) in &block.tokens {
                    values.push(number(token, *line)?);
                }
                if values.len() != 9 {
                    return Err(InstanceError::at(
                        block.line,
                        format!("model needs 9 numbers, found {}", values.len()),
                    ));
                }
                let matrix = Matrix3::from_row_slice(&values);
                let m = Model::new(kind, matrix)
                    .map_err(|_| InstanceError::at(block.line, "model matrix is zero or non-finite"))?;
                model = Some(m);
            }
            Section::Labels => {
                let mut values = Vec::with_capacity(points.len());
                for (line, token) in &block.tokens {
                    values.push(match token.as_str() {
                        "0" => false,
                        "1" => true,
                        other => return Err(InstanceError::at(*line, format!("label `{other}` is not 0 or 1"))),
                    });
                }
                if values.len() != points.len() {
                    return Err(InstanceError::at(
                        block.line,
                        format!("{} labels for {} correspondences", values.len(), points.len()),
                    ));
                }
                labels = Some(values);
            }
            Section::Rows => unreachable!("rows never open a block"),
        }
    }

    let kind = model.as_ref().map(Model::kind);
    let truth = if model.is_some() || labels.is_some() {
        Some(GroundTruth::new(model, labels, sizes).expect("model or labels present"))
    } else {
        None
    };
    Ok(ProblemInstance {
        id: id.to_owned(),
        kind,
        points,
        sizes,
        truth,
    })
}

fn number(token: &str, line: usize) -> Result<f64, InstanceError> {
    let value: f64 = token
        .parse()
        .map_err(|_| InstanceError::at(line, format!("`{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(InstanceError::at(line, format!("`{token}` is not finite")));
    }
    Ok(value)
}

fn numbers(text: &str, line: usize) -> Result<Vec<f64>, InstanceError> {
    text.split_whitespace().map(|t| number(t, line)).collect()
}

/// Text form of an instance; numbers use the shortest representation that
/// parses back to the same value, so `parse_str(&serialize(i), &i.id) == i`.
pub fn serialize(instance: &ProblemInstance) -> String {
    let mut out = String::new();
    let s = &instance.sizes;
    let _ = writeln!(out, "# {}", instance.id);
    let _ = writeln!(out, "{} {} {} {}", s.width1, s.height1, s.width2, s.height2);
    for p in &instance.points {
        let _ = writeln!(out, "{} {} {} {}", p.u1, p.v1, p.u2, p.v2);
    }
    if let Some(truth) = &instance.truth {
        if let Some(model) = truth.model() {
            out.push_str(match model.kind() {
                ModelKind::Homography => "H:\n",
                ModelKind::FundamentalMatrix => "F:\n",
            });
            let m = model.matrix();
            for r in 0..3 {
                let _ = writeln!(out, "{} {} {}", m[(r, 0)], m[(r, 1)], m[(r, 2)]);
            }
        }
        if let Some(labels) = truth.labels() {
            out.push_str("L:\n");
            for chunk in labels.chunks(40) {
                let row: Vec<&str> = chunk.iter().map(|&l| if l { "1" } else { "0" }).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

pub fn write_instance(path: &Path, instance: &ProblemInstance) -> std::io::Result<()> {
    std::fs::write(path, serialize(instance))
}
