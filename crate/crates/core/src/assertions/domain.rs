use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::semantics::{State, Value};
use crate::syntax::{Sort, SortEnv};

pub const DEFAULT_STATE_CAP: u64 = 1_000_000;

/// Enumerable range of values for one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarDomain {
    Int { lo: i64, hi: i64 },
    Bool,
    /// Lists of length `0..=max_len` with elements in `lo..=hi`.
    List { max_len: usize, lo: i64, hi: i64 },
}

impl VarDomain {
    pub fn sort(&self) -> Sort {
        match self {
            VarDomain::Int { .. } => Sort::Int,
            VarDomain::Bool => Sort::Bool,
            VarDomain::List { .. } => Sort::List,
        }
    }

    /// Number of values, saturating.
    pub fn size(&self) -> u128 {
        match *self {
            VarDomain::Int { lo, hi } => (hi as i128 - lo as i128 + 1) as u128,
            VarDomain::Bool => 2,
            VarDomain::List { max_len, lo, hi } => {
                let n = (hi as i128 - lo as i128 + 1) as u128;
                let mut total: u128 = 0;
                let mut pow: u128 = 1;
                for _ in 0..=max_len {
                    total = total.saturating_add(pow);
                    pow = pow.saturating_mul(n);
                }
                total
            }
        }
    }

    /// Position of `v` in [`VarDomain::values`] order.
    fn rank(&self, v: &Value) -> Option<usize> {
        let digit = |n: &BigInt, lo: i64, hi: i64| -> Option<usize> {
            let n = n.to_i64()?;
            (lo..=hi).contains(&n).then(|| (n - lo) as usize)
        };
        match (self, v) {
            (VarDomain::Int { lo, hi }, Value::Int(n)) => digit(n, *lo, *hi),
            (VarDomain::Bool, Value::Bool(b)) => Some(*b as usize),
            (VarDomain::List { max_len, lo, hi }, Value::List(items)) => {
                if items.len() > *max_len {
                    return None;
                }
                let base = (hi - lo + 1) as usize;
                let mut offset = 0;
                let mut pow = 1;
                for _ in 0..items.len() {
                    offset += pow;
                    pow *= base;
                }
                let mut lex = 0;
                for x in items {
                    lex = lex * base + digit(x, *lo, *hi)?;
                }
                Some(offset + lex)
            }
            _ => None,
        }
    }

    /// All values in ascending order; lists by length, then lexicographically.
    fn values(&self) -> Vec<Value> {
        match *self {
            VarDomain::Int { lo, hi } => (lo..=hi).map(Value::int).collect(),
            VarDomain::Bool => vec![Value::Bool(false), Value::Bool(true)],
            VarDomain::List { max_len, lo, hi } => {
                let mut out = vec![Value::List(Vec::new())];
                let mut layer: Vec<Vec<BigInt>> = vec![Vec::new()];
                for _ in 0..max_len {
                    let mut next = Vec::with_capacity(layer.len() * (hi - lo + 1) as usize);
                    for prefix in &layer {
                        for x in lo..=hi {
                            let mut l = prefix.clone();
                            l.push(BigInt::from(x));
                            next.push(l);
                        }
                    }
                    out.extend(next.iter().cloned().map(Value::List));
                    layer = next;
                }
                out
            }
        }
    }
}

impl fmt::Display for VarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarDomain::Int { lo, hi } => write!(f, "{lo}..{hi}"),
            VarDomain::Bool => f.write_str("bool"),
            VarDomain::List { max_len, lo, hi } => write!(f, "list(maxlen={max_len}, {lo}..{hi})"),
        }
    }
}

/// Per-variable enumerable domains plus a cap on the number of states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDomain {
    vars: IndexMap<String, VarDomain>,
    pub state_cap: u64,
}

impl Default for FiniteDomain {
    fn default() -> Self {
        FiniteDomain {
            vars: IndexMap::new(),
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl FiniteDomain {
    pub fn new() -> Self {
        FiniteDomain::default()
    }

    pub fn with(mut self, name: impl Into<String>, dom: VarDomain) -> Self {
        self.vars.insert(name.into(), dom);
        self
    }

    /// Adds a variable; `false` if it already had a domain.
    pub fn insert(&mut self, name: impl Into<String>, dom: VarDomain) -> bool {
        let name = name.into();
        if self.vars.contains_key(&name) {
            return false;
        }
        self.vars.insert(name, dom);
        true
    }

    /// Replaces the domain of an existing variable.
    pub fn set(&mut self, name: &str, dom: VarDomain) {
        if let Some(d) = self.vars.get_mut(name) {
            *d = dom;
        }
    }

    pub fn get(&self, name: &str) -> Option<&VarDomain> {
        self.vars.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &VarDomain)> {
        self.vars.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The sort environment the domain declares.
    pub fn sort_env(&self) -> SortEnv {
        self.vars.iter().map(|(n, d)| (n.clone(), d.sort())).collect()
    }

    /// Position of `s` in the enumeration order of `env` over this domain.
    pub fn index_of(&self, env: &SortEnv, s: &State) -> Option<usize> {
        let mut index: usize = 0;
        for (name, _) in env.iter() {
            let d = self.vars.get(name)?;
            let rank = d.rank(s.get(name)?)?;
            index = index.checked_mul(d.size() as usize)?.checked_add(rank)?;
        }
        Some(index)
    }

    /// Number of states over `env`'s variables, saturating.
    pub fn state_count(&self, env: &SortEnv) -> u128 {
        env.iter()
            .map(|(n, _)| self.vars.get(n).map_or(0, VarDomain::size))
            .fold(1u128, u128::saturating_mul)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("state space has {count} states, exceeding the cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("no domain declared for `{0}`")]
    Missing(String),
    #[error("domain of `{name}` has sort {found}, but the variable is declared {declared}")]
    SortMismatch {
        name: String,
        declared: Sort,
        found: Sort,
    },
}

/// Enumerates every state of the Cartesian product exactly once. Variables
/// vary in odometer order: the last declared variable changes fastest.
pub fn enumerate_states(env: &SortEnv, dom: &FiniteDomain) -> Result<States, DomainError> {
    let mut names = Vec::with_capacity(env.len());
    let mut values = Vec::with_capacity(env.len());
    for (name, sort) in env.iter() {
        let d = dom
            .get(name)
            .ok_or_else(|| DomainError::Missing(name.to_string()))?;
        if d.sort() != sort {
            return Err(DomainError::SortMismatch {
                name: name.to_string(),
                declared: sort,
                found: d.sort(),
            });
        }
        names.push(name.to_string());
        values.push(d.values());
    }
    let count = dom.state_count(env);
    if count > dom.state_cap as u128 {
        return Err(DomainError::CapExceeded {
            count,
            cap: dom.state_cap,
        });
    }
    Ok(States {
        names,
        values,
        digits: vec![0; env.len()],
        remaining: count as u64,
    })
}

/// Iterator over the states of a finite domain.
#[derive(Debug, Clone)]
pub struct States {
    names: Vec<String>,
    values: Vec<Vec<Value>>,
    digits: Vec<usize>,
    remaining: u64,
}

impl Iterator for States {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let state = self
            .names
            .iter()
            .zip(&self.digits)
            .zip(&self.values)
            .map(|((n, &d), vals)| (n.clone(), vals[d].clone()))
            .collect();
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.values[i].len() {
                break;
            }
            self.digits[i] = 0;
        }
        Some(state)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for States {}

#[cfg(test)]
mod tests {
    use super::*;

    fn env_of(dom: &FiniteDomain) -> SortEnv {
        dom.sort_env()
    }

    #[test]
    fn bool_domain_has_two_states() {
        let dom = FiniteDomain::new().with("x", VarDomain::Bool);
        assert_eq!(enumerate_states(&env_of(&dom), &dom).unwrap().count(), 2);
    }

    #[test]
    fn hotel_domain_has_sixteen_states() {
        let bit = VarDomain::Int { lo: 0, hi: 1 };
        let dom = FiniteDomain::new()
            .with("dk", bit.clone())
            .with("ck1", bit.clone())
            .with("ck2", bit)
            .with("acc", VarDomain::Bool);
        assert_eq!(enumerate_states(&env_of(&dom), &dom).unwrap().count(), 16);
    }

    #[test]
    fn lists_by_length_then_lexicographic() {
        let dom = FiniteDomain::new().with("L", VarDomain::List { max_len: 2, lo: 0, hi: 1 });
        let got: Vec<String> = enumerate_states(&env_of(&dom), &dom)
            .unwrap()
            .map(|s| s.get("L").unwrap().to_string())
            .collect();
        assert_eq!(got, ["[]", "[0]", "[1]", "[0, 0]", "[0, 1]", "[1, 0]", "[1, 1]"]);
    }

    #[test]
    fn last_variable_varies_fastest() {
        let dom = FiniteDomain::new()
            .with("a", VarDomain::Int { lo: 0, hi: 1 })
            .with("b", VarDomain::Bool);
        let got: Vec<String> = enumerate_states(&env_of(&dom), &dom)
            .unwrap()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            got,
            [
                "{a=0, b=false}",
                "{a=0, b=true}",
                "{a=1, b=false}",
                "{a=1, b=true}"
            ]
        );
    }

    #[test]
    fn index_of_matches_enumeration_position() {
        let dom = FiniteDomain::new()
            .with("a", VarDomain::Int { lo: -1, hi: 1 })
            .with("L", VarDomain::List { max_len: 2, lo: 0, hi: 2 })
            .with("b", VarDomain::Bool);
        let env = env_of(&dom);
        for (i, s) in enumerate_states(&env, &dom).unwrap().enumerate() {
            assert_eq!(dom.index_of(&env, &s), Some(i));
        }
        let outside = State::new()
            .with("a", Value::int(2))
            .with("L", Value::list([0]))
            .with("b", Value::Bool(true));
        assert_eq!(dom.index_of(&env, &outside), None);
    }

    #[test]
    fn empty_environment_has_one_state() {
        let dom = FiniteDomain::new();
        let states: Vec<State> = enumerate_states(&SortEnv::new(), &dom).unwrap().collect();
        assert_eq!(states, vec![State::new()]);
    }

    #[test]
    fn cap_is_enforced_with_the_count() {
        let mut dom = FiniteDomain::new()
            .with("x", VarDomain::Int { lo: 0, hi: 999 })
            .with("y", VarDomain::Int { lo: 0, hi: 999 })
            .with("z", VarDomain::Int { lo: 0, hi: 9 });
        dom.state_cap = 1_000_000;
        assert_eq!(
            enumerate_states(&env_of(&dom), &dom).unwrap_err(),
            DomainError::CapExceeded {
                count: 10_000_000,
                cap: 1_000_000
            }
        );
    }

    #[test]
    fn missing_or_mis_sorted_domains_are_rejected() {
        let env: SortEnv = [("x", Sort::Int)].into_iter().collect();
        assert_eq!(
            enumerate_states(&env, &FiniteDomain::new()).unwrap_err(),
            DomainError::Missing("x".into())
        );
        let dom = FiniteDomain::new().with("x", VarDomain::Bool);
        assert!(matches!(
            enumerate_states(&env, &dom),
            Err(DomainError::SortMismatch { .. })
        ));
    }
}
