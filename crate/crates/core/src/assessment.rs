//! Impact scoring and priority ranking.
//!
//! Impact is the product of three normalized inputs: the type's severity
//! weight, the probability as a fraction, and a weight for the frequency
//! class. Priority ranks risks by impact, highest first.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::register::{validate_risk, FrequencyClass, Risk, RiskRegister, Violation};

#[derive(Debug, Error, PartialEq)]
pub enum AssessError {
    #[error("risk {id:?} is not valid for assessment: {}", render(.violations))]
    InvalidRisk {
        id: String,
        violations: Vec<Violation>,
    },
    #[error("risk {0:?} has no mitigation plan")]
    NoMitigation(String),
}

fn render(vs: &[Violation]) -> String {
    vs.iter().map(Violation::to_string).collect::<Vec<_>>().join("; ")
}

/// Frequency class weight: the midpoints of five equal bands of (0, 1).
pub fn frequency_weight(f: FrequencyClass) -> f64 {
    match f {
        FrequencyClass::Unlikely => 0.1,
        FrequencyClass::Seldom => 0.3,
        FrequencyClass::Occasional => 0.5,
        FrequencyClass::Likely => 0.7,
        FrequencyClass::Frequent => 0.9,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImpactScore {
    pub value: f64,
    pub type_weight: f64,
    pub probability_fraction: f64,
    pub frequency_weight: f64,
}

impl ImpactScore {
    pub fn from_components(type_weight: f64, probability_fraction: f64, frequency_weight: f64) -> Self {
        ImpactScore {
            value: type_weight * probability_fraction * frequency_weight,
            type_weight,
            probability_fraction,
            frequency_weight,
        }
    }
}

fn ensure_valid(risk: &Risk) -> Result<(), AssessError> {
    let violations = validate_risk(risk);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(AssessError::InvalidRisk {
            id: risk.id.clone(),
            violations,
        })
    }
}

fn score(risk: &Risk, frequency: FrequencyClass) -> ImpactScore {
    ImpactScore::from_components(
        risk.risk_type.severity_weight,
        risk.probability / 100.0,
        frequency_weight(frequency),
    )
}

/// Impact from type, probability and frequency. No other field is read.
pub fn impact(risk: &Risk) -> Result<ImpactScore, AssessError> {
    ensure_valid(risk)?;
    Ok(score(risk, risk.frequency))
}

/// Impact with the post-mitigation frequency substituted.
pub fn residual_impact(risk: &Risk) -> Result<ImpactScore, AssessError> {
    ensure_valid(risk)?;
    let plan = risk
        .mitigation
        .as_ref()
        .ok_or_else(|| AssessError::NoMitigation(risk.id.clone()))?;
    Ok(score(risk, plan.post_frequency))
}

/// Which impact drives the ranking.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RankBasis {
    #[default]
    Inherent,
    /// Residual impact where a mitigation exists, inherent impact otherwise.
    Residual,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment {
    pub risk_id: String,
    pub impact: ImpactScore,
    pub residual_impact: Option<ImpactScore>,
    /// 1 is the highest priority.
    pub priority: usize,
}

impl Assessment {
    /// Residual impact when present, otherwise the inherent impact.
    pub fn effective_impact(&self) -> &ImpactScore {
        self.residual_impact.as_ref().unwrap_or(&self.impact)
    }

    fn ranking_value(&self, basis: RankBasis) -> f64 {
        match basis {
            RankBasis::Inherent => self.impact.value,
            RankBasis::Residual => self.effective_impact().value,
        }
    }
}

/// Ranks every risk by impact descending; equal impacts fall back to
/// ascending risk id, so the result does not depend on register order.
pub fn prioritize(register: &RiskRegister) -> Result<Vec<Assessment>, AssessError> {
    prioritize_by(register, RankBasis::Inherent)
}

pub fn prioritize_by(register: &RiskRegister, basis: RankBasis) -> Result<Vec<Assessment>, AssessError> {
    let mut out = register
        .risks
        .iter()
        .map(|risk| {
            Ok(Assessment {
                risk_id: risk.id.clone(),
                impact: impact(risk)?,
                residual_impact: match risk.mitigation {
                    Some(_) => Some(residual_impact(risk)?),
                    None => None,
                },
                priority: 0,
            })
        })
        .collect::<Result<Vec<_>, AssessError>>()?;
    out.sort_by(|a, b| rank_order(a, b, basis));
    for (i, a) in out.iter_mut().enumerate() {
        a.priority = i + 1;
    }
    Ok(out)
}

fn rank_order(a: &Assessment, b: &Assessment, basis: RankBasis) -> Ordering {
    b.ranking_value(basis)
        .total_cmp(&a.ranking_value(basis))
        .then_with(|| a.risk_id.cmp(&b.risk_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::register::{Mitigation, RiskKind};

    fn risk(id: &str, p: f64, f: FrequencyClass) -> Risk {
        Risk::new(id, "", RiskKind::Schedule, p, f)
    }

    fn mitigate(mut r: Risk, post: FrequencyClass) -> Risk {
        r.mitigation = Some(Mitigation {
            description: String::new(),
            post_frequency: post,
            post_rate: None,
        });
        r
    }

    #[test]
    fn weights_increase_with_class() {
        assert_eq!(frequency_weight(FrequencyClass::Frequent), 0.9);
        assert_eq!(frequency_weight(FrequencyClass::Unlikely), 0.1);
        let ws: Vec<f64> = FrequencyClass::ALL.iter().map(|&f| frequency_weight(f)).collect();
        assert!(ws.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn impact_arithmetic() {
        let a = impact(&risk("R1", 50.0, FrequencyClass::Occasional)).unwrap();
        assert_eq!(a.value, 0.25);
        assert_eq!((a.type_weight, a.probability_fraction, a.frequency_weight), (1.0, 0.5, 0.5));
        let b = impact(&risk("R1", 50.0, FrequencyClass::Frequent)).unwrap();
        assert_eq!(b.value, 0.45);
        let mut weighted = risk("R", 50.0, FrequencyClass::Occasional);
        weighted.risk_type.severity_weight = 0.5;
        assert_eq!(impact(&weighted).unwrap().value, 0.125);
    }

    #[test]
    fn impact_rejects_invalid() {
        let err = impact(&risk("R", 100.0, FrequencyClass::Seldom)).unwrap_err();
        assert!(matches!(err, AssessError::InvalidRisk { .. }));
    }

    #[test]
    fn residual_examples() {
        let r = mitigate(risk("R", 40.0, FrequencyClass::Frequent), FrequencyClass::Occasional);
        let before = impact(&r).unwrap().value;
        let after = residual_impact(&r).unwrap().value;
        assert!((before - 0.36).abs() < 1e-15);
        assert!((after - 0.20).abs() < 1e-15);

        let same = mitigate(risk("R", 40.0, FrequencyClass::Likely), FrequencyClass::Likely);
        assert_eq!(residual_impact(&same).unwrap(), impact(&same).unwrap());

        assert_eq!(
            residual_impact(&risk("R", 40.0, FrequencyClass::Likely)),
            Err(AssessError::NoMitigation("R".into()))
        );
    }

    #[test]
    fn ranking_and_ties() {
        let reg = RiskRegister::new(
            "P",
            vec![
                risk("R1", 50.0, FrequencyClass::Occasional),
                risk("R2", 50.0, FrequencyClass::Frequent),
            ],
        );
        let ranked = prioritize(&reg).unwrap();
        assert_eq!(ranked[0].risk_id, "R2");
        assert_eq!(ranked[0].priority, 1);
        assert_eq!(ranked[1].risk_id, "R1");
        assert_eq!(ranked[1].priority, 2);

        let tie = RiskRegister::new(
            "P",
            vec![
                risk("RB", 60.0, FrequencyClass::Occasional),
                risk("RA", 60.0, FrequencyClass::Occasional),
            ],
        );
        let ranked = prioritize(&tie).unwrap();
        assert_eq!(ranked[0].risk_id, "RA");
        assert_eq!(ranked[0].impact.value, ranked[1].impact.value);

        assert!(prioritize(&RiskRegister::new("P", vec![])).unwrap().is_empty());
    }

    #[test]
    fn residual_basis_reorders() {
        let reg = RiskRegister::new(
            "P",
            vec![
                mitigate(risk("A", 50.0, FrequencyClass::Frequent), FrequencyClass::Unlikely),
                risk("B", 50.0, FrequencyClass::Likely),
            ],
        );
        let inherent = prioritize_by(&reg, RankBasis::Inherent).unwrap();
        assert_eq!(inherent[0].risk_id, "A");
        let residual = prioritize_by(&reg, RankBasis::Residual).unwrap();
        assert_eq!(residual[0].risk_id, "B");
        assert!(residual[1].residual_impact.is_some());
    }

    #[test]
    fn unrelated_fields_do_not_move_impact() {
        let base = mitigate(risk("R", 33.0, FrequencyClass::Likely), FrequencyClass::Seldom);
        let mut changed = base.clone();
        changed.title = "something else".into();
        changed.phase = Some("design".into());
        changed.mitigation.as_mut().unwrap().description = "different".into();
        assert_eq!(impact(&base).unwrap(), impact(&changed).unwrap());
    }
}
