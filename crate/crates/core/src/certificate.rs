//! Decomposition witnesses and their text format.

use std::fmt;

use crate::densemat::ExactMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Nilpotent,
    SquareZero,
    /// No condition; used for the given divisor in a quotient certificate.
    Any,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Nilpotent => "nilpotent",
            Role::SquareZero => "square-zero",
            Role::Any => "any",
        })
    }
}

impl Role {
    fn parse(s: &str) -> Result<Role> {
        match s {
            "nilpotent" => Ok(Role::Nilpotent),
            "square-zero" => Ok(Role::SquareZero),
            "any" => Ok(Role::Any),
            _ => Err(Error::Parse(format!("unknown role '{}'", s))),
        }
    }

    pub fn holds(&self, m: &ExactMatrix) -> bool {
        match self {
            Role::Nilpotent => m.is_nilpotent(),
            Role::SquareZero => m.is_square_zero(),
            Role::Any => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub matrix: ExactMatrix,
    pub role: Role,
    pub rank: Option<usize>,
}

impl Part {
    pub fn new(matrix: ExactMatrix, role: Role) -> Part {
        let rank = Some(matrix.rank());
        Part { matrix, role, rank }
    }

    pub fn unranked(matrix: ExactMatrix, role: Role) -> Part {
        Part { matrix, role, rank: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    Product,
    Sum,
}

/// `input` equals the product (or sum) of the parts, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: Combine,
    pub input: ExactMatrix,
    pub parts: Vec<Part>,
    pub trail: Vec<String>,
}

pub type ProductCertificate = Certificate;
pub type SumCertificate = Certificate;

impl Certificate {
    pub fn product(input: ExactMatrix, parts: Vec<Part>, trail: Vec<String>) -> Certificate {
        Certificate { kind: Combine::Product, input, parts, trail }
    }

    pub fn sum(input: ExactMatrix, parts: Vec<Part>, trail: Vec<String>) -> Certificate {
        Certificate { kind: Combine::Sum, input, parts, trail }
    }

    pub fn matrices(&self) -> Vec<&ExactMatrix> {
        self.parts.iter().map(|p| &p.matrix).collect()
    }

    pub fn combined(&self) -> Result<ExactMatrix> {
        let mut it = self.parts.iter();
        let first = match it.next() {
            Some(p) => p.matrix.clone(),
            None => return Ok(ExactMatrix::zeros(self.input.field(), self.input.rows(), self.input.cols())),
        };
        it.try_fold(first, |acc, p| match self.kind {
            Combine::Product => acc.try_mul(&p.matrix),
            Combine::Sum => {
                if acc.rows() != p.matrix.rows() || acc.cols() != p.matrix.cols() || acc.field() != p.matrix.field() {
                    Err(Error::DimensionMismatch("summands differ in shape".into()))
                } else {
                    Ok(&acc + &p.matrix)
                }
            }
        })
    }

    pub fn with_step(mut self, step: impl Into<String>) -> Certificate {
        self.trail.insert(0, step.into());
        self
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "certificate {}\n",
            match self.kind {
                Combine::Product => "product",
                Combine::Sum => "sum",
            }
        );
        for t in &self.trail {
            s.push_str(&format!("trail {}\n", t));
        }
        s.push_str("input\n");
        s.push_str(&self.input.to_text());
        for p in &self.parts {
            match p.rank {
                Some(r) => s.push_str(&format!("part {} rank {}\n", p.role, r)),
                None => s.push_str(&format!("part {}\n", p.role)),
            }
            s.push_str(&p.matrix.to_text());
        }
        s.push_str("end\n");
        s
    }

    pub fn parse(text: &str) -> Result<Certificate> {
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty())
            .collect();
        let mut i = 0;
        let kind = match lines.first().copied() {
            Some("certificate product") => Combine::Product,
            Some("certificate sum") => Combine::Sum,
            other => return Err(Error::Parse(format!("expected certificate header, got {:?}", other))),
        };
        i += 1;
        let mut trail = Vec::new();
        while i < lines.len() && lines[i].starts_with("trail") {
            trail.push(lines[i]["trail".len()..].trim().to_string());
            i += 1;
        }
        let take_matrix = |i: &mut usize| -> Result<ExactMatrix> {
            let rows: usize = lines
                .get(*i + 1)
                .and_then(|d| d.split_whitespace().next())
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse("bad matrix block".into()))?;
            let end = *i + 2 + rows;
            if end > lines.len() {
                return Err(Error::Parse("truncated matrix block".into()));
            }
            let m = ExactMatrix::parse(&lines[*i..end].join("\n"))?;
            *i = end;
            Ok(m)
        };
        if lines.get(i).copied() != Some("input") {
            return Err(Error::Parse("missing input block".into()));
        }
        i += 1;
        let input = take_matrix(&mut i)?;
        let mut parts = Vec::new();
        loop {
            let line = lines.get(i).copied().ok_or_else(|| Error::Parse("missing 'end'".into()))?;
            if line == "end" {
                break;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let (role, rank) = match toks.as_slice() {
                ["part", role] => (Role::parse(role)?, None),
                ["part", role, "rank", r] => (Role::parse(role)?, Some(r.parse().map_err(|_| Error::Parse(format!("bad rank '{}'", r)))?)),
                _ => return Err(Error::Parse(format!("unexpected line '{}'", line))),
            };
            i += 1;
            parts.push(Part { matrix: take_matrix(&mut i)?, role, rank });
        }
        Ok(Certificate { kind, input, parts, trail })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;

    #[test]
    fn text_round_trip() {
        let q = FieldSpec::Rationals;
        let h = ExactMatrix::from_i64(q, &[vec![0, 0], vec![1, 0]]);
        let f = ExactMatrix::from_i64(q, &[vec![1, 2], vec![3, 4]]);
        let c = Certificate::product(&h * &f, vec![Part::new(h, Role::SquareZero), Part::unranked(f, Role::Any)], vec!["quotient".into()]);
        let back = Certificate::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.combined().unwrap(), c.input);
    }

    #[test]
    fn sum_combination() {
        let f = FieldSpec::PrimeField(2);
        let parts = vec![
            Part::new(ExactMatrix::from_i64(f, &[vec![1, 1], vec![1, 1]]), Role::SquareZero),
            Part::new(ExactMatrix::from_i64(f, &[vec![0, 1], vec![0, 0]]), Role::SquareZero),
            Part::new(ExactMatrix::from_i64(f, &[vec![0, 0], vec![1, 0]]), Role::SquareZero),
        ];
        let c = Certificate::sum(ExactMatrix::identity(f, 2), parts, vec![]);
        assert_eq!(c.combined().unwrap(), ExactMatrix::identity(f, 2));
        assert!(Certificate::parse("certificate sum\ninput\n").is_err());
    }
}
