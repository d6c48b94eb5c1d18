use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Party subsets are bitmasks, so profiles are limited to this many parties.
pub const MAX_PARTIES: usize = 20;

/// A nonempty set of parties, as a bitmask over party indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PartySet(pub u32);

impl PartySet {
    pub fn from_indices(indices: &[usize]) -> Self {
        PartySet(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn all(n: usize) -> Self {
        PartySet(((1u64 << n) - 1) as u32)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Member indices in increasing order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(move |&i| self.contains(i))
    }
}

/// Vote weights `v_σ` over nonempty party subsets.
///
/// Canonical form: each set appears once (duplicates merged by adding weights), and entries are
/// ordered by their sorted member lists compared lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallotProfile {
    parties: Vec<String>,
    votes: Vec<(PartySet, f64)>,
}

/// On-disk profile document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub parties: Vec<String>,
    pub votes: Vec<VoteEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoteEntry {
    pub set: Vec<String>,
    pub weight: f64,
}

fn profile_err(msg: impl Into<String>) -> Error {
    Error::Profile(msg.into())
}

impl BallotProfile {
    /// Builds and validates a profile from index-based ballots.
    pub fn new(parties: Vec<String>, votes: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let n = parties.len();
        if n == 0 {
            return Err(profile_err("no parties"));
        }
        if n > MAX_PARTIES {
            return Err(profile_err(format!(
                "{n} parties exceeds the limit of {MAX_PARTIES}"
            )));
        }
        let mut seen = HashSet::new();
        for p in &parties {
            if p.is_empty() {
                return Err(profile_err("empty party name"));
            }
            if !seen.insert(p.as_str()) {
                return Err(profile_err(format!("duplicate party {p:?}")));
            }
        }
        let mut merged: BTreeMap<Vec<usize>, (PartySet, f64)> = BTreeMap::new();
        for (members, w) in votes {
            if !w.is_finite() || w < 0.0 {
                return Err(profile_err(format!("weight {w} must be finite and >= 0")));
            }
            if members.is_empty() {
                return Err(profile_err("empty ballot set"));
            }
            let mut m = members.clone();
            m.sort_unstable();
            if m.windows(2).any(|w| w[0] == w[1]) {
                return Err(profile_err(format!("repeated party in ballot {members:?}")));
            }
            if let Some(&i) = m.iter().find(|&&i| i >= n) {
                return Err(profile_err(format!("party index {i} out of range")));
            }
            let set = PartySet::from_indices(&m);
            merged.entry(m).or_insert((set, 0.0)).1 += w;
        }
        let votes: Vec<(PartySet, f64)> = merged.into_values().collect();
        let profile = Self { parties, votes };
        if !profile.votes.iter().any(|&(_, w)| w > 0.0) {
            return Err(profile_err("no positive vote weight"));
        }
        for i in 0..n {
            if profile.party_weight(i) <= 0.0 {
                return Err(profile_err(format!(
                    "party {:?} has no votes",
                    profile.parties[i]
                )));
            }
        }
        Ok(profile)
    }

    /// Single-character party names taken from the ballots, e.g. `[("AB", 9.0), ("C", 1.0)]`.
    /// Parties are ordered alphabetically.
    pub fn from_letters(votes: &[(&str, f64)]) -> Result<Self> {
        let mut letters: Vec<char> = votes.iter().flat_map(|(s, _)| s.chars()).collect();
        letters.sort_unstable();
        letters.dedup();
        let parties: Vec<String> = letters.iter().map(|c| c.to_string()).collect();
        let votes = votes
            .iter()
            .map(|(s, w)| {
                let idx = s
                    .chars()
                    .map(|c| letters.binary_search(&c).expect("letter collected above"))
                    .collect();
                (idx, *w)
            })
            .collect();
        Self::new(parties, votes)
    }

    pub fn from_file(file: ProfileFile) -> Result<Self> {
        let index: BTreeMap<&str, usize> = file
            .parties
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        let mut votes = Vec::with_capacity(file.votes.len());
        for v in &file.votes {
            let members = v
                .set
                .iter()
                .map(|name| {
                    index
                        .get(name.as_str())
                        .copied()
                        .ok_or_else(|| profile_err(format!("unknown party {name:?}")))
                })
                .collect::<Result<Vec<usize>>>()?;
            votes.push((members, v.weight));
        }
        Self::new(file.parties.clone(), votes)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProfileFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_file(&self) -> ProfileFile {
        ProfileFile {
            parties: self.parties.clone(),
            votes: self
                .votes
                .iter()
                .map(|(s, w)| VoteEntry {
                    set: s.members().map(|i| self.parties[i].clone()).collect(),
                    weight: *w,
                })
                .collect(),
        }
    }

    /// Canonical JSON, pretty-printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("profile serializes");
        s.push('\n');
        s
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn party_index(&self, name: &str) -> Option<usize> {
        self.parties.iter().position(|p| p == name)
    }

    /// Canonically ordered `(σ, v_σ)` pairs.
    pub fn votes(&self) -> &[(PartySet, f64)] {
        &self.votes
    }

    pub fn weight_of(&self, set: PartySet) -> f64 {
        self.votes
            .iter()
            .find(|(s, _)| *s == set)
            .map_or(0.0, |(_, w)| *w)
    }

    /// `W̄_i = Σ_{σ∋i} v_σ`.
    pub fn party_weight(&self, i: usize) -> f64 {
        self.votes
            .iter()
            .filter(|(s, _)| s.contains(i))
            .map(|(_, w)| w)
            .sum()
    }

    /// `V = Σ_σ v_σ`.
    pub fn total_weight(&self) -> f64 {
        self.votes.iter().map(|(_, w)| w).sum()
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(profile_err(format!("scale {c} must be positive")));
        }
        Ok(Self {
            parties: self.parties.clone(),
            votes: self.votes.iter().map(|&(s, w)| (s, w * c)).collect(),
        })
    }

    /// Weights divided by their total.
    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.total_weight())
            .expect("validated profiles have positive total")
    }

    /// Adds `weight` to ballot `set`, merging with an existing entry.
    pub fn with_ballot(&self, set: &[usize], weight: f64) -> Result<Self> {
        let mut votes: Vec<(Vec<usize>, f64)> = self
            .votes
            .iter()
            .map(|(s, w)| (s.members().collect(), *w))
            .collect();
        votes.push((set.to_vec(), weight));
        Self::new(self.parties.clone(), votes)
    }

    /// Sub-profile restricted to `parties` (ballots must lie inside the set).
    pub fn restrict(&self, parties: &[usize]) -> Result<Self> {
        let names = parties.iter().map(|&i| self.parties[i].clone()).collect();
        let pos = |i: usize| parties.iter().position(|&p| p == i);
        let mut votes = Vec::new();
        for (s, w) in &self.votes {
            let mapped: Option<Vec<usize>> = s.members().map(pos).collect();
            if let Some(m) = mapped {
                votes.push((m, *w));
            }
        }
        Self::new(names, votes)
    }
}

impl fmt::Display for BallotProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .votes
            .iter()
            .map(|(s, w)| {
                let names: Vec<&str> = s.members().map(|i| self.parties[i].as_str()).collect();
                format!("{w} {}", names.join(""))
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}
