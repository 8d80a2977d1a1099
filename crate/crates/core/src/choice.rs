//! Attributes, static policy sets and the two-stage choice module.
//!
//! An attribute is autonomous when a choice module sits in front of its
//! policy set: a deterministic component that selects or maintains a policy,
//! followed by a nondeterministic component that keeps that policy, forces an
//! override policy, or inhibits it with the empty policy `P0`.

use std::fmt;

use crate::error::ConfigError;
use crate::rng::RngStream;

/// Tolerance on the sum of the three branch probabilities.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Index of a policy inside its set. `P0` is the empty policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolicyId(usize);

impl PolicyId {
    pub const EMPTY: PolicyId = PolicyId(0);

    pub fn new(index: usize) -> Self {
        PolicyId(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeId {
    Mobility,
    Replication,
    ClonePerception,
    SitePerception,
}

impl AttributeId {
    pub fn name(self) -> &'static str {
        match self {
            AttributeId::Mobility => "mobility",
            AttributeId::Replication => "replication",
            AttributeId::ClonePerception => "clone_perception",
            AttributeId::SitePerception => "site_perception",
        }
    }
}

impl fmt::Display for AttributeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopArity {
    MonoHop,
    MultiHop,
    SingleShot,
}

/// Attribute-specific policy kinds implement this to live in a [`PolicySet`].
pub trait PolicyKind: Clone + fmt::Debug {
    fn arity(&self) -> HopArity;
    fn tag(&self) -> &'static str;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDescriptor<K> {
    pub id: PolicyId,
    pub kind: K,
}

impl<K: PolicyKind> PolicyDescriptor<K> {
    pub fn arity(&self) -> HopArity {
        self.kind.arity()
    }
}

/// The static set `P1..PN` of an attribute. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySet<K> {
    attribute: AttributeId,
    policies: Vec<PolicyDescriptor<K>>,
}

impl<K: PolicyKind> PolicySet<K> {
    /// Numbers `kinds` as `P1..PN` in order.
    pub fn new(attribute: AttributeId, kinds: Vec<K>) -> Result<Self, ConfigError> {
        if kinds.is_empty() {
            return Err(ConfigError::EmptyPolicySet(attribute.to_string()));
        }
        let policies = kinds
            .into_iter()
            .enumerate()
            .map(|(i, kind)| PolicyDescriptor {
                id: PolicyId(i + 1),
                kind,
            })
            .collect();
        Ok(Self {
            attribute,
            policies,
        })
    }

    /// Like [`PolicySet::new`] but also requires `N > 1`.
    pub fn autonomous(attribute: AttributeId, kinds: Vec<K>) -> Result<Self, ConfigError> {
        let count = kinds.len();
        let set = Self::new(attribute, kinds)?;
        if count < 2 {
            return Err(ConfigError::TooFewPolicies {
                attribute: attribute.to_string(),
                count,
            });
        }
        Ok(set)
    }

    pub fn attribute(&self) -> AttributeId {
        self.attribute
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    pub fn policies(&self) -> &[PolicyDescriptor<K>] {
        &self.policies
    }

    pub fn get(&self, id: PolicyId) -> Option<&PolicyDescriptor<K>> {
        id.0.checked_sub(1).and_then(|i| self.policies.get(i))
    }

    pub fn kinds(&self) -> impl Iterator<Item = &K> {
        self.policies.iter().map(|p| &p.kind)
    }

    pub fn descriptor(&self) -> AttributeDescriptor {
        AttributeDescriptor {
            id: self.attribute,
            policy_tags: self.kinds().map(|k| k.tag().to_string()).collect(),
            has_choice_module: self.len() > 1,
        }
    }
}

/// Shape of one attribute as seen by classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDescriptor {
    pub id: AttributeId,
    pub policy_tags: Vec<String>,
    pub has_choice_module: bool,
}

impl AttributeDescriptor {
    /// An attribute with one use policy and no choice module.
    pub fn fixed(id: AttributeId, policy_tag: &str) -> Self {
        Self {
            id,
            policy_tags: vec![policy_tag.to_string()],
            has_choice_module: false,
        }
    }

    pub fn with_choice_module(id: AttributeId, policy_tags: Vec<String>) -> Result<Self, ConfigError> {
        if policy_tags.len() < 2 {
            return Err(ConfigError::TooFewPolicies {
                attribute: id.to_string(),
                count: policy_tags.len(),
            });
        }
        Ok(Self {
            id,
            policy_tags,
            has_choice_module: true,
        })
    }

    pub fn policy_count(&self) -> usize {
        self.policy_tags.len()
    }
}

/// Probabilities of the nondeterministic component's three branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiceWeights {
    pr_keep: f64,
    pr_override: f64,
    pr_empty: f64,
    override_target: PolicyId,
}

impl ChoiceWeights {
    pub fn new(
        pr_keep: f64,
        pr_override: f64,
        pr_empty: f64,
        override_target: PolicyId,
    ) -> Result<Self, ConfigError> {
        for (name, p) in [("pr_keep", pr_keep), ("pr_override", pr_override), ("pr_empty", pr_empty)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::InvalidWeights(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        let sum = pr_keep + pr_override + pr_empty;
        if (sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(ConfigError::InvalidWeights(format!("probabilities sum to {sum}, not 1")));
        }
        if override_target.is_empty() {
            return Err(ConfigError::OverrideOutOfRange { target: 0, count: 0 });
        }
        Ok(Self {
            pr_keep,
            pr_override,
            pr_empty,
            override_target,
        })
    }

    /// `(0.8, 0.1, 0.1)` overriding to `target`.
    pub fn default_for(target: PolicyId) -> Self {
        Self::new(0.8, 0.1, 0.1, target).expect("default weights are valid")
    }

    /// Keep with probability 1: the module degenerates to its deterministic part.
    pub fn always_keep() -> Self {
        Self::new(1.0, 0.0, 0.0, PolicyId(1)).expect("valid")
    }

    pub fn always_empty() -> Self {
        Self::new(0.0, 0.0, 1.0, PolicyId(1)).expect("valid")
    }

    pub fn pr_keep(&self) -> f64 {
        self.pr_keep
    }

    pub fn pr_override(&self) -> f64 {
        self.pr_override
    }

    pub fn pr_empty(&self) -> f64 {
        self.pr_empty
    }

    pub fn override_target(&self) -> PolicyId {
        self.override_target
    }

    pub fn check_against<K: PolicyKind>(&self, set: &PolicySet<K>) -> Result<(), ConfigError> {
        if self.override_target.0 > set.len() {
            return Err(ConfigError::OverrideOutOfRange {
                target: self.override_target.0,
                count: set.len(),
            });
        }
        Ok(())
    }

    pub fn probability(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Keep => self.pr_keep,
            Branch::Override => self.pr_override,
            Branch::Empty => self.pr_empty,
        }
    }
}

/// Outcome of the nondeterministic component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Keep,
    Override,
    Empty,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Keep, Branch::Override, Branch::Empty];

    pub fn name(self) -> &'static str {
        match self {
            Branch::Keep => "keep",
            Branch::Override => "override",
            Branch::Empty => "empty",
        }
    }
}

/// Deterministic-component bookkeeping for one attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChoiceState {
    current: Option<PolicyId>,
    finished: bool,
}

impl Default for ChoiceState {
    fn default() -> Self {
        Self {
            current: None,
            finished: true,
        }
    }
}

impl ChoiceState {
    pub fn new() -> Self {
        Self::default()
    }

    /// `current` running (`finished = false`) or completed.
    pub fn with_current(current: PolicyId, finished: bool) -> Self {
        debug_assert!(!current.is_empty());
        Self {
            current: Some(current),
            finished,
        }
    }

    pub fn current(&self) -> Option<PolicyId> {
        self.current
    }

    pub fn finished(&self) -> bool {
        self.finished
    }

    /// Records the policy finally elected by the choice module as running.
    pub fn commit(&mut self, policy: PolicyId) {
        debug_assert!(!policy.is_empty());
        self.current = Some(policy);
        self.finished = false;
    }

    pub fn mark_finished(&mut self) {
        self.finished = true;
    }
}

/// Keeps the running policy, or moves round-robin to the next one once it has
/// finished. The first selection is `P1`.
pub fn deterministic_choice<K: PolicyKind>(
    state: &ChoiceState,
    set: &PolicySet<K>,
) -> Result<PolicyId, ConfigError> {
    if set.is_empty() {
        return Err(ConfigError::EmptyPolicySet(set.attribute().to_string()));
    }
    Ok(match (state.current, state.finished) {
        (Some(current), false) => current,
        (Some(current), true) => PolicyId(current.0 % set.len() + 1),
        (None, _) => PolicyId(1),
    })
}

/// Draws the branch of the nondeterministic component. Consumes one draw.
pub fn draw_branch(weights: &ChoiceWeights, rng: &mut RngStream) -> Branch {
    let total = weights.pr_keep + weights.pr_override + weights.pr_empty;
    let u = rng.next_unit() * total;
    if u < weights.pr_keep {
        Branch::Keep
    } else if u < weights.pr_keep + weights.pr_override {
        Branch::Override
    } else {
        Branch::Empty
    }
}

pub fn resolve_branch(selected: PolicyId, weights: &ChoiceWeights, branch: Branch) -> PolicyId {
    match branch {
        Branch::Keep => selected,
        Branch::Override => weights.override_target,
        Branch::Empty => PolicyId::EMPTY,
    }
}

/// Keeps `selected`, forces the override target, or inhibits with `P0`.
pub fn nondeterministic_choice(selected: PolicyId, weights: &ChoiceWeights, rng: &mut RngStream) -> PolicyId {
    resolve_branch(selected, weights, draw_branch(weights, rng))
}

/// Result of one activation of a choice module, with both stages visible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub selected: PolicyId,
    pub branch: Branch,
    pub elected: PolicyId,
}

/// Runs the deterministic then the nondeterministic component. Does not
/// mutate `state`; the caller commits the elected policy.
pub fn autonomous_choice<K: PolicyKind>(
    state: &ChoiceState,
    set: &PolicySet<K>,
    weights: &ChoiceWeights,
    rng: &mut RngStream,
) -> Result<Decision, ConfigError> {
    let selected = deterministic_choice(state, set)?;
    let branch = draw_branch(weights, rng);
    Ok(Decision {
        selected,
        branch,
        elected: resolve_branch(selected, weights, branch),
    })
}
