//! Three criteria for comparing autonomy models: global/partial,
//! social/nonsocial, absolute/relative.

use std::fmt::Write as _;

use crate::choice::AttributeDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppliesTo {
    WholeAgent,
    PerPart,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDescriptor {
    pub name: String,
    pub applies_to: AppliesTo,
    pub requires_second_agent: bool,
    autonomy_levels: u32,
}

impl ModelDescriptor {
    /// `None` when `autonomy_levels` is zero.
    pub fn new(name: &str, applies_to: AppliesTo, requires_second_agent: bool, autonomy_levels: u32) -> Option<Self> {
        (autonomy_levels >= 1).then(|| Self {
            name: name.to_string(),
            applies_to,
            requires_second_agent,
            autonomy_levels,
        })
    }

    pub fn autonomy_levels(&self) -> u32 {
        self.autonomy_levels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Global,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sociality {
    Social,
    Nonsocial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gradation {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub scope: Scope,
    pub sociality: Sociality,
    pub gradation: Gradation,
}

impl Classification {
    pub fn labels(&self) -> [&'static str; 3] {
        [
            match self.scope {
                Scope::Global => "global",
                Scope::Partial => "partial",
            },
            match self.sociality {
                Sociality::Social => "social",
                Sociality::Nonsocial => "nonsocial",
            },
            match self.gradation {
                Gradation::Absolute => "absolute",
                Gradation::Relative => "relative",
            },
        ]
    }
}

pub fn classify(d: &ModelDescriptor) -> Classification {
    Classification {
        scope: match d.applies_to {
            AppliesTo::WholeAgent => Scope::Global,
            AppliesTo::PerPart => Scope::Partial,
        },
        sociality: if d.requires_second_agent {
            Sociality::Social
        } else {
            Sociality::Nonsocial
        },
        gradation: if d.autonomy_levels == 1 {
            Gradation::Absolute
        } else {
            Gradation::Relative
        },
    }
}

/// The three models of the reference comparison table. Barber's decision
/// framework has four autonomy levels, defined per goal and shared between
/// agents; Luck's goal-generation model has one level over the whole agent.
pub fn reference_models() -> Vec<ModelDescriptor> {
    vec![
        ModelDescriptor::new("Barber", AppliesTo::PerPart, true, 4).expect("levels >= 1"),
        ModelDescriptor::new("Luck", AppliesTo::WholeAgent, false, 1).expect("levels >= 1"),
        attribute_autonomy_model(),
    ]
}

/// Autonomy with regard to an attribute: per attribute, one level, no
/// second agent required.
pub fn attribute_autonomy_model() -> ModelDescriptor {
    ModelDescriptor::new("Sanchis", AppliesTo::PerPart, false, 1).expect("levels >= 1")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeVerdict {
    Autonomous,
    NonAutonomous,
}

impl AttributeVerdict {
    pub fn name(self) -> &'static str {
        match self {
            AttributeVerdict::Autonomous => "autonomous",
            AttributeVerdict::NonAutonomous => "non_autonomous",
        }
    }
}

/// Autonomous iff a choice module sits over more than one policy.
pub fn classify_attribute(a: &AttributeDescriptor) -> AttributeVerdict {
    if a.has_choice_module && a.policy_count() > 1 {
        AttributeVerdict::Autonomous
    } else {
        AttributeVerdict::NonAutonomous
    }
}

/// Tab-separated table of the reference models.
pub fn render_models(models: &[ModelDescriptor]) -> String {
    let mut out = String::from("model\tscope\tsociality\tgradation\n");
    for m in models {
        let [scope, sociality, gradation] = classify(m).labels();
        let _ = writeln!(out, "{}\t{scope}\t{sociality}\t{gradation}", m.name);
    }
    out
}

pub fn render_attributes(attrs: &[AttributeDescriptor]) -> String {
    let mut out = String::from("attribute\tpolicies\tchoice_module\tverdict\n");
    for a in attrs {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            a.id,
            a.policy_tags.join(","),
            if a.has_choice_module { "yes" } else { "no" },
            classify_attribute(a).name()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::AttributeId;

    #[test]
    fn reference_rows() {
        let rows: Vec<_> = reference_models().iter().map(|m| (m.name.clone(), classify(m).labels())).collect();
        assert_eq!(
            rows,
            vec![
                ("Barber".to_string(), ["partial", "social", "relative"]),
                ("Luck".to_string(), ["global", "nonsocial", "absolute"]),
                ("Sanchis".to_string(), ["partial", "nonsocial", "absolute"]),
            ]
        );
    }

    #[test]
    fn zero_levels_rejected() {
        assert!(ModelDescriptor::new("x", AppliesTo::PerPart, false, 0).is_none());
    }

    #[test]
    fn attribute_verdicts() {
        let mobility =
            AttributeDescriptor::with_choice_module(AttributeId::Mobility, vec!["random".into(), "circular".into()]).unwrap();
        assert_eq!(classify_attribute(&mobility), AttributeVerdict::Autonomous);
        let site = AttributeDescriptor::fixed(AttributeId::SitePerception, "site_snapshot");
        assert_eq!(classify_attribute(&site), AttributeVerdict::NonAutonomous);
        let no_module = AttributeDescriptor {
            id: AttributeId::Mobility,
            policy_tags: vec!["random".into(), "circular".into()],
            has_choice_module: false,
        };
        assert_eq!(classify_attribute(&no_module), AttributeVerdict::NonAutonomous);
    }

    #[test]
    fn table_rendering() {
        let text = render_models(&reference_models());
        assert!(text.contains("Luck\tglobal\tnonsocial\tabsolute\n"));
    }
}
