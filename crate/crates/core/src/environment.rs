//! The signed environment graph: countries, their total powers, and the
//! friend/adversary relations between them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Dense index of a country, `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountryId(pub usize);

impl CountryId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Friend,
    Adversary,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Friend => "friend",
            Relation::Adversary => "adversary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Country {
    pub label: String,
    pub power: Rational,
}

impl Country {
    pub fn new(label: impl Into<String>, power: Rational) -> Self {
        Country {
            label: label.into(),
            power,
        }
    }
}

/// An immutable environment. Mutating operations return a new value.
///
/// Relations are keyed by the unordered pair `(min, max)`; an absent key means
/// the two countries have no relationship. Every country is implicitly its own
/// friend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    countries: Vec<Country>,
    relations: BTreeMap<(usize, usize), Relation>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Environment {
    pub fn new(
        countries: Vec<Country>,
        relations: impl IntoIterator<Item = (CountryId, CountryId, Relation)>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (idx, c) in countries.iter().enumerate() {
            let location = format!("countries[{idx}]");
            if !seen.insert(c.label.as_str()) {
                return Err(Error::DuplicateLabel {
                    location,
                    label: c.label.clone(),
                });
            }
            if c.power.is_negative() {
                return Err(Error::NegativePower {
                    location,
                    label: c.label.clone(),
                    power: c.power.clone(),
                });
            }
        }
        let mut env = Environment {
            countries,
            relations: BTreeMap::new(),
        };
        for (idx, (a, b, sign)) in relations.into_iter().enumerate() {
            let location = format!("relations[{idx}]");
            env.check(a)?;
            env.check(b)?;
            if a == b {
                return Err(Error::SelfRelation {
                    location,
                    label: env.label(a).to_string(),
                });
            }
            if env.relations.insert(key(a.0, b.0), sign).is_some() {
                return Err(Error::DuplicatePair {
                    location,
                    a: env.label(a).to_string(),
                    b: env.label(b).to_string(),
                });
            }
        }
        Ok(env)
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = CountryId> {
        (0..self.len()).map(CountryId)
    }

    pub fn countries(&self) -> &[Country] {
        &self.countries
    }

    pub fn check(&self, id: CountryId) -> Result<()> {
        if id.0 < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownCountry(id.0))
        }
    }

    /// Panics on an unknown id; use [`Environment::check`] first for untrusted ids.
    pub fn label(&self, id: CountryId) -> &str {
        &self.countries[id.0].label
    }

    pub fn power(&self, id: CountryId) -> &Rational {
        &self.countries[id.0].power
    }

    pub fn powers(&self) -> impl Iterator<Item = &Rational> {
        self.countries.iter().map(|c| &c.power)
    }

    pub fn id_of(&self, label: &str) -> Option<CountryId> {
        self.countries
            .iter()
            .position(|c| c.label == label)
            .map(CountryId)
    }

    pub fn relation(&self, a: CountryId, b: CountryId) -> Option<Relation> {
        self.relations.get(&key(a.0, b.0)).copied()
    }

    /// All related pairs as `(a, b, sign)` with `a < b`.
    pub fn relations(&self) -> impl Iterator<Item = (CountryId, CountryId, Relation)> + '_ {
        self.relations
            .iter()
            .map(|(&(a, b), &r)| (CountryId(a), CountryId(b), r))
    }

    fn related(&self, i: CountryId, sign: Relation) -> impl Iterator<Item = CountryId> + '_ {
        self.ids()
            .filter(move |&j| j != i && self.relation(i, j) == Some(sign))
    }

    /// `F_i`: `i` together with every friend of `i`.
    pub fn friends_of(&self, i: CountryId) -> Result<BTreeSet<CountryId>> {
        self.check(i)?;
        Ok(std::iter::once(i)
            .chain(self.related(i, Relation::Friend))
            .collect())
    }

    /// `A_i`.
    pub fn adversaries_of(&self, i: CountryId) -> Result<BTreeSet<CountryId>> {
        self.check(i)?;
        Ok(self.related(i, Relation::Adversary).collect())
    }

    /// Friends other than `i` itself, in id order.
    pub fn proper_friends(&self, i: CountryId) -> Vec<CountryId> {
        self.related(i, Relation::Friend).collect()
    }

    pub fn adversaries(&self, i: CountryId) -> Vec<CountryId> {
        self.related(i, Relation::Adversary).collect()
    }

    /// Columns country `i` may allocate to: itself, its friends and its adversaries.
    pub fn allowed_columns(&self, i: CountryId) -> Vec<CountryId> {
        self.ids()
            .filter(|&j| j == i || self.relation(i, j).is_some())
            .collect()
    }

    /// Returns a copy with the pair `{i, j}` set to `sign` (or removed for `None`).
    pub fn with_relation(
        &self,
        i: CountryId,
        j: CountryId,
        sign: Option<Relation>,
    ) -> Result<Self> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::SameCountry);
        }
        let mut next = self.clone();
        match sign {
            Some(s) => {
                next.relations.insert(key(i.0, j.0), s);
            }
            None => {
                next.relations.remove(&key(i.0, j.0));
            }
        }
        Ok(next)
    }

    /// Returns a copy where `i` and `j` are friends. The pair must currently be
    /// absent or adversarial.
    pub fn add_friend(&self, i: CountryId, j: CountryId) -> Result<Self> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::SameCountry);
        }
        if self.relation(i, j) == Some(Relation::Friend) {
            return Err(Error::AlreadyFriends {
                a: self.label(i).to_string(),
                b: self.label(j).to_string(),
            });
        }
        self.with_relation(i, j, Some(Relation::Friend))
    }

    /// Same environment with countries reordered by label.
    pub fn canonicalized(&self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.countries[a].label.cmp(&self.countries[b].label));
        self.permuted(&order)
    }

    /// Reorders countries so that new id `k` is old id `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len(), "permutation length");
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        Environment {
            countries: order
                .iter()
                .map(|&old| self.countries[old].clone())
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|(&(a, b), &r)| (key(inverse[a], inverse[b]), r))
                .collect(),
        }
    }

    /// Relations that differ between `self` and `other`, as `(a, b, mine, theirs)`.
    pub fn relation_diff(
        &self,
        other: &Environment,
    ) -> Vec<(CountryId, CountryId, Option<Relation>, Option<Relation>)> {
        let keys: BTreeSet<_> = self
            .relations
            .keys()
            .chain(other.relations.keys())
            .collect();
        keys.into_iter()
            .filter_map(|&(a, b)| {
                let mine = self.relations.get(&(a, b)).copied();
                let theirs = other.relations.get(&(a, b)).copied();
                (mine != theirs).then_some((CountryId(a), CountryId(b), mine, theirs))
            })
            .collect()
    }
}
