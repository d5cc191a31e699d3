use rug::Float;

/// A named inequality `lhs ≤ rhs` evaluated in high precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Float,
    pub rhs: Float,
    /// `rhs − lhs`.
    pub slack: Float,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: Float, rhs: Float) -> Self {
        let bits = lhs.prec().max(rhs.prec());
        let slack = Float::with_val(bits, &rhs - &lhs);
        let satisfied = slack >= 0;
        Self { name: name.into(), lhs, rhs, slack, satisfied }
    }

    /// Strict variant: satisfied only when `lhs < rhs`.
    pub fn strict(name: impl Into<String>, lhs: Float, rhs: Float) -> Self {
        let mut c = Self::new(name, lhs, rhs);
        c.satisfied = c.slack > 0;
        c
    }
}

pub fn all_satisfied(checks: &[BoundCheck]) -> bool {
    checks.iter().all(|c| c.satisfied)
}
