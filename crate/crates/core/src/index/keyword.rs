//! Boolean keyword prefilter: AND across groups, OR within a group,
//! case-insensitive literals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::IndexError;
use crate::ingest::{Corpus, SentenceKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// Literal may occur inside a longer word ("rain" matches "rainfall").
    #[default]
    Substring,
    /// Literal must be delimited by non-alphanumerics or the text edges.
    WordBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordQuery {
    groups: Vec<Vec<String>>,
    mode: MatchMode,
}

impl KeywordQuery {
    pub fn new<G, L>(groups: G, mode: MatchMode) -> Result<Self, IndexError>
    where
        G: IntoIterator<Item = L>,
        L: IntoIterator,
        L::Item: AsRef<str>,
    {
        let groups: Vec<Vec<String>> = groups
            .into_iter()
            .map(|g| g.into_iter().map(|l| l.as_ref().trim().to_lowercase()).collect())
            .collect();
        let empty = groups.is_empty()
            || groups
                .iter()
                .any(|g: &Vec<String>| g.is_empty() || g.iter().any(String::is_empty));
        if empty {
            return Err(IndexError::EmptyQuery);
        }
        Ok(Self { groups, mode })
    }

    /// Parses `a,b+c`: `,` separates alternatives, `+` separates groups.
    pub fn parse(expr: &str, mode: MatchMode) -> Result<Self, IndexError> {
        Self::new(expr.split('+').map(|g| g.split(',')), mode)
    }

    pub fn groups(&self) -> &[Vec<String>] {
        &self.groups
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }

    pub fn with_group<L: AsRef<str>>(&self, group: &[L]) -> Result<Self, IndexError> {
        let mut groups = self.groups.clone();
        groups.push(group.iter().map(|l| l.as_ref().to_string()).collect());
        Self::new(groups, self.mode)
    }

    pub fn matches(&self, text: &str) -> bool {
        let lower = text.to_lowercase();
        self.groups
            .iter()
            .all(|alts| alts.iter().any(|lit| self.literal_matches(&lower, lit)))
    }

    fn literal_matches(&self, lower: &str, lit: &str) -> bool {
        match self.mode {
            MatchMode::Substring => lower.contains(lit),
            MatchMode::WordBoundary => lower.match_indices(lit).any(|(at, _)| {
                let before = lower[..at].chars().next_back();
                let after = lower[at + lit.len()..].chars().next();
                !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
            }),
        }
    }
}

/// Ascending sids of body sentences matching `query`.
pub fn keyword_filter(corpus: &Corpus, query: &KeywordQuery) -> Vec<u64> {
    corpus
        .records()
        .par_iter()
        .filter(|r| r.kind == SentenceKind::Body && query.matches(&r.text))
        .map(|r| r.sid)
        .collect()
}
