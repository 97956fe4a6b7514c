//! Single-site faults that the verification campaigns must detect.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// First guard of the MAXVAL gadget uses `f(1, y…)` instead of `¬f(1, y…)`.
    GadgetPositiveGuard,
    /// The MAXVAL gadget omits its final, y-free guard `(x_m ∨ ¬f(x₁…x_{m−1}, 1))`.
    GadgetDropFinalGuard,
    /// `sat_to_maxval` disjoins `x₁` instead of `¬x₁`.
    SatToMaxvalPositiveGuard,
    /// `sat-via-val` keeps querying the unfixed input instead of the restriction.
    ValMachineSkipsFix,
    /// `usat-via-uval` fixes the complement of each oracle answer.
    UvalMachineFlipsBit,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::GadgetPositiveGuard,
        Mutation::GadgetDropFinalGuard,
        Mutation::SatToMaxvalPositiveGuard,
        Mutation::ValMachineSkipsFix,
        Mutation::UvalMachineFlipsBit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::GadgetPositiveGuard => "gadget-positive-guard",
            Mutation::GadgetDropFinalGuard => "gadget-drop-final-guard",
            Mutation::SatToMaxvalPositiveGuard => "sat-to-maxval-positive-guard",
            Mutation::ValMachineSkipsFix => "val-machine-skips-fix",
            Mutation::UvalMachineFlipsBit => "uval-machine-flips-bit",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Shape(format!("unknown mutation `{s}`")))
    }
}
