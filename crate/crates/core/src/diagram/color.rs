use std::fmt;

use serde::{Deserialize, Serialize};

/// Which copy of a base variable a leg is labeled by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Plain,
    Dual,
    Translated,
    DualTranslated,
}

impl Flavor {
    pub fn dual(self) -> Flavor {
        match self {
            Flavor::Plain => Flavor::Dual,
            Flavor::Dual => Flavor::Plain,
            Flavor::Translated => Flavor::DualTranslated,
            Flavor::DualTranslated => Flavor::Translated,
        }
    }

    pub fn is_dual(self) -> bool {
        matches!(self, Flavor::Dual | Flavor::DualTranslated)
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Flavor> {
        [Flavor::Plain, Flavor::Dual, Flavor::Translated, Flavor::DualTranslated].get(code as usize).copied()
    }
}

/// A leg label: a base name together with its flavor (`x`, `∂x`, `x̄`, `∂x̄`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Color {
    pub base: String,
    pub flavor: Flavor,
}

impl Color {
    pub fn new(base: impl Into<String>, flavor: Flavor) -> Self {
        Self { base: base.into(), flavor }
    }

    pub fn plain(base: impl Into<String>) -> Self {
        Self::new(base, Flavor::Plain)
    }

    pub fn dual(base: impl Into<String>) -> Self {
        Self::new(base, Flavor::Dual)
    }

    pub fn translated(base: impl Into<String>) -> Self {
        Self::new(base, Flavor::Translated)
    }

    pub fn dual_translated(base: impl Into<String>) -> Self {
        Self::new(base, Flavor::DualTranslated)
    }

    /// The label this one is glued against by the pairing.
    pub fn dual_color(&self) -> Self {
        Self::new(self.base.clone(), self.flavor.dual())
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Self {
        Self::new(self.base.clone(), flavor)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.flavor {
            Flavor::Plain => write!(f, "{}", self.base),
            Flavor::Dual => write!(f, "d{}", self.base),
            Flavor::Translated => write!(f, "{}~", self.base),
            Flavor::DualTranslated => write!(f, "d{}~", self.base),
        }
    }
}
