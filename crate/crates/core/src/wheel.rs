//! Plutchik wheel geometry.
//!
//! The 24 fine-grained emotions fold into 8 wheel groups. Each group sits at
//! a multiple of π/4 on the unit circle, and two emotions are scored by how
//! far apart their groups are: `|1 - |θa - θb| / π|`.
//!
//! Angles are held as whole eighth-turns so every score is an exact multiple
//! of 0.25.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of the 24 fine-grained emotions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emotion24 {
    Rage,
    Anger,
    Annoyance,
    Vigilance,
    Anticipation,
    Interest,
    Ecstasy,
    Joy,
    Serenity,
    Admiration,
    Trust,
    Acceptance,
    Terror,
    Fear,
    Apprehension,
    Amazement,
    Surprise,
    Distraction,
    Grief,
    Sadness,
    Pensiveness,
    Loathing,
    Disgust,
    Boredom,
}

/// One of the 8 wheel groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emotion8 {
    Aggressiveness,
    Optimism,
    Love,
    Submission,
    Awe,
    Disapproval,
    Remorse,
    Contempt,
}

/// Either granularity, as produced by [`parse_emotion`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Fine(Emotion24),
    Group(Emotion8),
}

impl Emotion24 {
    pub const ALL: [Emotion24; 24] = [
        Emotion24::Rage,
        Emotion24::Anger,
        Emotion24::Annoyance,
        Emotion24::Vigilance,
        Emotion24::Anticipation,
        Emotion24::Interest,
        Emotion24::Ecstasy,
        Emotion24::Joy,
        Emotion24::Serenity,
        Emotion24::Admiration,
        Emotion24::Trust,
        Emotion24::Acceptance,
        Emotion24::Terror,
        Emotion24::Fear,
        Emotion24::Apprehension,
        Emotion24::Amazement,
        Emotion24::Surprise,
        Emotion24::Distraction,
        Emotion24::Grief,
        Emotion24::Sadness,
        Emotion24::Pensiveness,
        Emotion24::Loathing,
        Emotion24::Disgust,
        Emotion24::Boredom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emotion24::Rage => "rage",
            Emotion24::Anger => "anger",
            Emotion24::Annoyance => "annoyance",
            Emotion24::Vigilance => "vigilance",
            Emotion24::Anticipation => "anticipation",
            Emotion24::Interest => "interest",
            Emotion24::Ecstasy => "ecstasy",
            Emotion24::Joy => "joy",
            Emotion24::Serenity => "serenity",
            Emotion24::Admiration => "admiration",
            Emotion24::Trust => "trust",
            Emotion24::Acceptance => "acceptance",
            Emotion24::Terror => "terror",
            Emotion24::Fear => "fear",
            Emotion24::Apprehension => "apprehension",
            Emotion24::Amazement => "amazement",
            Emotion24::Surprise => "surprise",
            Emotion24::Distraction => "distraction",
            Emotion24::Grief => "grief",
            Emotion24::Sadness => "sadness",
            Emotion24::Pensiveness => "pensiveness",
            Emotion24::Loathing => "loathing",
            Emotion24::Disgust => "disgust",
            Emotion24::Boredom => "boredom",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            Emotion24::Rage => "rage",
            Emotion24::Anger => "anger",
            Emotion24::Annoyance => "anyce",
            Emotion24::Vigilance => "vglnc",
            Emotion24::Anticipation => "antcp",
            Emotion24::Interest => "inrst",
            Emotion24::Ecstasy => "ecsty",
            Emotion24::Joy => "joy",
            Emotion24::Serenity => "srnty",
            Emotion24::Admiration => "admrn",
            Emotion24::Trust => "trust",
            Emotion24::Acceptance => "acptn",
            Emotion24::Terror => "trror",
            Emotion24::Fear => "fear",
            Emotion24::Apprehension => "aprhn",
            Emotion24::Amazement => "amzmt",
            Emotion24::Surprise => "srpse",
            Emotion24::Distraction => "dstrn",
            Emotion24::Grief => "grief",
            Emotion24::Sadness => "sadns",
            Emotion24::Pensiveness => "psvne",
            Emotion24::Loathing => "lthng",
            Emotion24::Disgust => "dsgst",
            Emotion24::Boredom => "brdom",
        }
    }

    /// The wheel group this emotion belongs to.
    pub fn group(self) -> Emotion8 {
        use Emotion24::*;
        match self {
            Rage | Anger | Annoyance => Emotion8::Aggressiveness,
            Vigilance | Anticipation | Interest => Emotion8::Optimism,
            Ecstasy | Joy | Serenity => Emotion8::Love,
            Admiration | Trust | Acceptance => Emotion8::Submission,
            Terror | Fear | Apprehension => Emotion8::Awe,
            Amazement | Surprise | Distraction => Emotion8::Disapproval,
            Grief | Sadness | Pensiveness => Emotion8::Remorse,
            Loathing | Disgust | Boredom => Emotion8::Contempt,
        }
    }
}

impl Emotion8 {
    pub const ALL: [Emotion8; 8] = [
        Emotion8::Aggressiveness,
        Emotion8::Optimism,
        Emotion8::Love,
        Emotion8::Submission,
        Emotion8::Awe,
        Emotion8::Disapproval,
        Emotion8::Remorse,
        Emotion8::Contempt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emotion8::Aggressiveness => "aggressiveness",
            Emotion8::Optimism => "optimism",
            Emotion8::Love => "love",
            Emotion8::Submission => "submission",
            Emotion8::Awe => "awe",
            Emotion8::Disapproval => "disapproval",
            Emotion8::Remorse => "remorse",
            Emotion8::Contempt => "contempt",
        }
    }

    pub fn abbrev(self) -> &'static str {
        match self {
            Emotion8::Aggressiveness => "agrsv",
            Emotion8::Optimism => "optsm",
            Emotion8::Love => "love",
            Emotion8::Submission => "sbmsn",
            Emotion8::Awe => "awe",
            Emotion8::Disapproval => "dspvl",
            Emotion8::Remorse => "rmrse",
            Emotion8::Contempt => "cntmp",
        }
    }

    /// Position on the wheel in eighth-turns (multiples of π/4), counterclockwise
    /// from awe. Disapproval lands on 7π/4.
    pub fn eighths(self) -> u8 {
        match self {
            Emotion8::Awe => 0,
            Emotion8::Submission => 1,
            Emotion8::Love => 2,
            Emotion8::Optimism => 3,
            Emotion8::Aggressiveness => 4,
            Emotion8::Contempt => 5,
            Emotion8::Remorse => 6,
            Emotion8::Disapproval => 7,
        }
    }

    pub fn radians(self) -> f64 {
        f64::from(self.eighths()) * PI / 4.0
    }

    /// The three member emotions, ordered high to low intensity.
    pub fn members(self) -> [Emotion24; 3] {
        let start = Emotion8::ALL.iter().position(|g| *g == self).unwrap() * 3;
        [
            Emotion24::ALL[start],
            Emotion24::ALL[start + 1],
            Emotion24::ALL[start + 2],
        ]
    }

    /// Middle-intensity member (e.g. anger for aggressiveness).
    pub fn representative(self) -> Emotion24 {
        self.members()[1]
    }

    pub fn opposite(self) -> Emotion8 {
        let target = (self.eighths() + 4) % 8;
        Emotion8::ALL
            .into_iter()
            .find(|g| g.eighths() == target)
            .unwrap()
    }
}

pub fn group_of(e: Emotion24) -> Emotion8 {
    e.group()
}

pub fn radians_of(g: Emotion8) -> f64 {
    g.radians()
}

/// Score two wheel positions given in eighth-turns, using the raw angular
/// difference exactly as the agreement formula does.
pub fn score_eighths(a: u8, b: u8) -> f64 {
    let diff = f64::from(a.abs_diff(b));
    // diff / 4 is |Δθ| / π when Δθ is measured in eighth-turns
    (1.0 - diff / 4.0).abs()
}

pub fn group_score(a: Emotion8, b: Emotion8) -> f64 {
    score_eighths(a.eighths(), b.eighths())
}

/// Agreement between two fine-grained emotions: 1 within a group, 0 across
/// the wheel, linear in between.
pub fn pair_score(a: Emotion24, b: Emotion24) -> f64 {
    group_score(a.group(), b.group())
}

/// Case-insensitive lookup of a full name or abbreviation. Fine-grained names
/// win when a string could be read either way.
pub fn parse_emotion(label: &str) -> Result<Label> {
    let folded = label.trim().to_lowercase();
    if let Some(e) = Emotion24::ALL
        .into_iter()
        .find(|e| e.name() == folded || e.abbrev() == folded)
    {
        return Ok(Label::Fine(e));
    }
    if let Some(g) = Emotion8::ALL
        .into_iter()
        .find(|g| g.name() == folded || g.abbrev() == folded)
    {
        return Ok(Label::Group(g));
    }
    Err(Error::UnknownLabel(label.to_string()))
}

impl FromStr for Emotion24 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_emotion(s)? {
            Label::Fine(e) => Ok(e),
            Label::Group(g) => Err(Error::NotFineGrained(g.name().to_string())),
        }
    }
}

impl FromStr for Emotion8 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_emotion(s)? {
            Label::Group(g) => Ok(g),
            Label::Fine(_) => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

impl fmt::Display for Emotion24 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Emotion8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Emotion24 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Emotion24 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for Emotion8 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Emotion8 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
