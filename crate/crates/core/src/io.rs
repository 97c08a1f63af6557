//! Reading election and score-profile files.

use std::path::Path;

use crate::election::{Election, ElectionFile, ProfileFile, ScoreProfile};
use crate::error::{Error, Result};
use crate::scalar::Score;

/// Either kind of input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance<S> {
    Election(Election),
    Profile(ScoreProfile<S>),
}

impl<S: Score> Instance<S> {
    /// Accepts `{"m", "distinguished", "votes"}` or
    /// `{"m", "distinguished", "scores"}`. JSON syntax errors carry line and
    /// column.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidElection("top-level JSON value must be an object".into()))?;
        match (obj.contains_key("votes"), obj.contains_key("scores")) {
            (true, false) => {
                let f: ElectionFile = serde_json::from_value(value)?;
                Ok(Instance::Election(Election::new(f.m, f.distinguished, &f.votes)?))
            }
            (false, true) => {
                let f: ProfileFile<S> = serde_json::from_value(value)?;
                Ok(Instance::Profile(ScoreProfile::from_file(f)?))
            }
            _ => Err(Error::InvalidElection(
                "expected exactly one of \"votes\" or \"scores\"".into(),
            )),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn profile(&self) -> ScoreProfile<S> {
        match self {
            Instance::Election(e) => e.tally(),
            Instance::Profile(p) => p.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_kind() {
        let e = Instance::<i64>::from_json(r#"{"m":3,"distinguished":3,"votes":[[1,2,3]]}"#).unwrap();
        assert_eq!(e.profile().scores(), &[2, 1, 0]);
        let p = Instance::<i64>::from_json(r#"{"m":3,"distinguished":3,"scores":[2,1,0]}"#).unwrap();
        assert!(matches!(p, Instance::Profile(_)));
        assert_eq!(e.profile(), p.profile().with_voter_count(1));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = Instance::<i64>::from_json("{\n  \"m\": 3,\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("column"), "{msg}");
    }

    #[test]
    fn rejects_ambiguous_or_bad() {
        assert!(Instance::<i64>::from_json(r#"{"m":1,"distinguished":1}"#).is_err());
        assert!(Instance::<i64>::from_json(r#"[1,2]"#).is_err());
        assert!(Instance::<i64>::from_json(r#"{"m":2,"distinguished":1,"scores":[1]}"#).is_err());
        assert!(Instance::<i64>::from_json(r#"{"m":2,"distinguished":1,"votes":[[1,1]]}"#).is_err());
    }
}
