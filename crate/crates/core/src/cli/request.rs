use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::exactalg::{parse_rational, PolynomialHamiltonian, Rational, SpectrumTarget};
use crate::oscillator::LevelIndex;

use super::CliError;

/// JSON dial request. Energies are strings so they parse exactly;
/// JSON numbers are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialRequest {
    pub targets: Vec<TargetEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop_powers: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub level: u32,
    pub energy: String,
}

impl DialRequest {
    pub fn to_target(&self) -> Result<SpectrumTarget, CliError> {
        let pairs = self
            .targets
            .iter()
            .map(|t| Ok((LevelIndex(t.level), parse_rational(&t.energy)?)))
            .collect::<Result<Vec<_>, ParseError>>()?;
        Ok(SpectrumTarget::new(pairs)?)
    }
}

fn split_list(text: &str) -> Vec<&str> {
    let t = text.trim();
    if t.is_empty() {
        Vec::new()
    } else {
        t.split(',').map(str::trim).collect()
    }
}

/// `E_0,E_1,...` (levels implied) or `n:E,m:E,...`.
pub fn parse_targets(text: &str) -> Result<SpectrumTarget, CliError> {
    let items = split_list(text);
    if items.is_empty() {
        return Err(CliError::Parse("no targets given".into()));
    }
    let keyed = items.iter().filter(|s| s.contains(':')).count();
    let pairs = if keyed == 0 {
        items
            .iter()
            .enumerate()
            .map(|(n, e)| Ok((LevelIndex(n as u32), parse_rational(e)?)))
            .collect::<Result<Vec<_>, CliError>>()?
    } else if keyed == items.len() {
        items
            .iter()
            .map(|item| {
                let (n, e) = item.split_once(':').expect("checked above");
                let n: u32 = n
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Parse(format!("invalid level in {item:?}")))?;
                Ok((LevelIndex(n), parse_rational(e)?))
            })
            .collect::<Result<Vec<_>, CliError>>()?
    } else {
        return Err(CliError::Parse("mix of level:energy pairs and bare energies".into()));
    };
    Ok(SpectrumTarget::new(pairs)?)
}

/// `a_1,a_2,...` or `j:a_j,...`; an empty list is the zero polynomial.
pub fn parse_coefficients(text: &str) -> Result<PolynomialHamiltonian, CliError> {
    let items = split_list(text);
    if items.iter().all(|s| !s.contains(':')) {
        let coeffs = items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<Rational>, _>>()?;
        return Ok(PolynomialHamiltonian::from_dense(coeffs));
    }
    let terms = items
        .iter()
        .map(|item| {
            let (p, a) = item
                .split_once(':')
                .ok_or_else(|| CliError::Parse("mix of power:coefficient pairs and bare coefficients".into()))?;
            let p: u32 = p
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("invalid power in {item:?}")))?;
            Ok((p, parse_rational(a)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(PolynomialHamiltonian::new(terms)?)
}

pub fn parse_drop_powers(text: &str) -> Result<Vec<u32>, CliError> {
    split_list(text)
        .into_iter()
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| CliError::Parse(format!("invalid power {s:?}")))
        })
        .collect()
}
