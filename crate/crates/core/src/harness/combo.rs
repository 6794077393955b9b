use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::calibration::PairSelection;
use crate::clustering::ClusteringMethod;
use crate::error::{Error, Result};
use crate::localization::{LocalizationMethod, WallSelection};

const CLUSTERING: [(char, ClusteringMethod); 2] = [('I', ClusteringMethod::Inversion), ('G', ClusteringMethod::Gnomonic)];
const AVERAGING: [(char, PairSelection); 3] = [
    ('A', PairSelection::AllPairs),
    ('D', PairSelection::DisjointPairs),
    ('O', PairSelection::OverlappingPairs),
];
const SELECTION: [(char, WallSelection); 3] = [
    ('L', WallSelection::LargestCluster),
    ('N', WallSelection::NarrowestCluster),
    ('U', WallSelection::UnweightedAverage),
];
const LOCALIZATION: [(char, LocalizationMethod); 5] = [
    ('C', LocalizationMethod::ClosestLines),
    ('E', LocalizationMethod::ClosestLinesExtended),
    ('M', LocalizationMethod::MapToNormal),
    ('R', LocalizationMethod::ReflectionGeometry),
    ('W', LocalizationMethod::WallDirection),
];

/// Every single-letter token, in row order of the membership table.
pub const TOKENS: [char; 13] = ['I', 'G', 'A', 'D', 'O', 'L', 'N', 'U', 'C', 'E', 'M', 'R', 'W'];

fn letter<T: PartialEq + Copy>(table: &[(char, T)], value: T) -> char {
    table.iter().find(|(_, v)| *v == value).map(|(c, _)| *c).expect("every variant has a letter")
}

fn lookup<T: Copy>(table: &[(char, T)], ch: char) -> Option<T> {
    table.iter().find(|(t, _)| *t == ch).map(|(_, v)| *v)
}

fn rank<T: PartialEq + Copy>(table: &[(char, T)], value: T) -> usize {
    table.iter().position(|(_, v)| *v == value).expect("every variant is listed")
}

/// One algorithm combination, written as four letters such as `IANC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComboId {
    pub clustering: ClusteringMethod,
    pub averaging: PairSelection,
    pub selection: WallSelection,
    pub localization: LocalizationMethod,
}

impl ComboId {
    /// Closest Lines Extended uses every wall, so it only pairs with Unweighted Average.
    pub fn is_valid(&self) -> bool {
        self.localization != LocalizationMethod::ClosestLinesExtended
            || self.selection == WallSelection::UnweightedAverage
    }

    pub fn letters(&self) -> [char; 4] {
        [
            letter(&CLUSTERING, self.clustering),
            letter(&AVERAGING, self.averaging),
            letter(&SELECTION, self.selection),
            letter(&LOCALIZATION, self.localization),
        ]
    }

    fn sort_key(&self) -> [usize; 4] {
        [
            rank(&CLUSTERING, self.clustering),
            rank(&AVERAGING, self.averaging),
            rank(&SELECTION, self.selection),
            rank(&LOCALIZATION, self.localization),
        ]
    }

    pub fn has_token(&self, token: char) -> bool {
        self.letters().contains(&token)
    }
}

impl Ord for ComboId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for ComboId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ComboId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.letters() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for ComboId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for ComboId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownComboToken(s.to_string());
        let chars: Vec<char> = s.trim().chars().collect();
        let [c, a, l, m] = chars[..] else { return Err(unknown()) };
        let combo = ComboId {
            clustering: lookup(&CLUSTERING, c).ok_or_else(unknown)?,
            averaging: lookup(&AVERAGING, a).ok_or_else(unknown)?,
            selection: lookup(&SELECTION, l).ok_or_else(unknown)?,
            localization: lookup(&LOCALIZATION, m).ok_or_else(unknown)?,
        };
        if !combo.is_valid() {
            return Err(unknown());
        }
        Ok(combo)
    }
}

/// Token filter over combinations: comma-separated single letters. Letters
/// of the same category are alternatives; categories must all match.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComboFilter {
    tokens: Vec<char>,
}

impl ComboFilter {
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        for raw in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let mut chars = raw.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if TOKENS.contains(&c.to_ascii_uppercase()) => {
                    tokens.push(c.to_ascii_uppercase())
                }
                _ => return Err(Error::UnknownComboToken(raw.to_string())),
            }
        }
        Ok(Self { tokens })
    }

    pub fn matches(&self, combo: &ComboId) -> bool {
        let [c, a, s, l] = combo.letters();
        let groups: [(&[char], char); 4] = [
            (&['I', 'G'], c),
            (&['A', 'D', 'O'], a),
            (&['L', 'N', 'U'], s),
            (&['C', 'E', 'M', 'R', 'W'], l),
        ];
        groups.iter().all(|(group, actual)| {
            let wanted: Vec<char> = self.tokens.iter().copied().filter(|t| group.contains(t)).collect();
            wanted.is_empty() || wanted.contains(actual)
        })
    }
}

/// All valid combinations in canonical order, optionally filtered.
pub fn enumerate_combos(filter: Option<&ComboFilter>) -> Vec<ComboId> {
    let mut out = Vec::with_capacity(78);
    for &(_, clustering) in &CLUSTERING {
        for &(_, averaging) in &AVERAGING {
            for &(_, selection) in &SELECTION {
                for &(_, localization) in &LOCALIZATION {
                    let combo = ComboId {
                        clustering,
                        averaging,
                        selection,
                        localization,
                    };
                    if combo.is_valid() && filter.is_none_or(|f| f.matches(&combo)) {
                        out.push(combo);
                    }
                }
            }
        }
    }
    out
}
