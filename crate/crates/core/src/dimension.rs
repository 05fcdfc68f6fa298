use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

/// One of the ten social dimensions of relationships.
///
/// The declaration order is the canonical order used for tie-breaks and
/// report layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Knowledge,
    Power,
    Status,
    Trust,
    Support,
    Romance,
    Similarity,
    Identity,
    Fun,
    Conflict,
}

impl Dimension {
    pub const ALL: [Dimension; 10] = [
        Dimension::Knowledge,
        Dimension::Power,
        Dimension::Status,
        Dimension::Trust,
        Dimension::Support,
        Dimension::Romance,
        Dimension::Similarity,
        Dimension::Identity,
        Dimension::Fun,
        Dimension::Conflict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Knowledge => "knowledge",
            Dimension::Power => "power",
            Dimension::Status => "status",
            Dimension::Trust => "trust",
            Dimension::Support => "support",
            Dimension::Romance => "romance",
            Dimension::Similarity => "similarity",
            Dimension::Identity => "identity",
            Dimension::Fun => "fun",
            Dimension::Conflict => "conflict",
        }
    }

    /// Position in [`Dimension::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn description(self) -> &'static str {
        match self {
            Dimension::Knowledge => "Exchange of ideas or information; learning, teaching",
            Dimension::Power => "Having power over the behavior and outcomes of another",
            Dimension::Status => "Conferring status, appreciation, gratitude, or admiration upon another",
            Dimension::Trust => "Will of relying on the actions or judgments of another",
            Dimension::Support => "Giving emotional or practical aid and companionship",
            Dimension::Romance => "Intimacy among people with a sentimental or sexual relationship",
            Dimension::Similarity => "Shared interests, motivations or outlooks",
            Dimension::Identity => "Shared sense of belonging to the same community or group",
            Dimension::Fun => "Experiencing leisure, laughter, and joy",
            Dimension::Conflict => "Contrast or diverging views",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    /// Case-insensitive match against the ten canonical names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Dimension::ALL
            .iter()
            .copied()
            .find(|d| d.name() == lower)
            .ok_or_else(|| Error::Invalid(format!("unknown dimension `{}`", s.trim())))
    }
}
