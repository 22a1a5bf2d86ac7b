//! Resource budgets shared by the constructors and the congestion counter.

use crate::error::{Error, Result};

pub const DEFAULT_VERTEX_BUDGET: u64 = 2_000_000;
pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;
pub const BUDGET_ENV: &str = "RTPROF_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Maximum number of vertices a constructor may materialize.
    pub vertices: u64,
    /// Maximum routing work (pair-segment operations) for congestion counting.
    pub work: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            vertices: DEFAULT_VERTEX_BUDGET,
            work: DEFAULT_WORK_BUDGET,
        }
    }
}

impl Budget {
    /// Reads `RTPROF_BUDGET`, falling back to the defaults when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => Budget::parse(&s),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Parses either a bare integer (applied to both budgets) or a
    /// comma-separated list of `vertices=N` / `work=N` overrides.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_num = |t: &str| {
            t.trim()
                .replace('_', "")
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad budget value {t:?}")))
        };
        if let Ok(n) = parse_num(s) {
            return Ok(Budget {
                vertices: n,
                work: n,
            });
        }
        let mut budget = Budget::default();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("bad budget entry {part:?}")))?;
            match key.trim() {
                "vertices" => budget.vertices = parse_num(value)?,
                "work" => budget.work = parse_num(value)?,
                other => return Err(Error::invalid(format!("unknown budget key {other:?}"))),
            }
        }
        Ok(budget)
    }

    pub(crate) fn check_vertices(&self, projected: u128) -> Result<()> {
        if projected > self.vertices as u128 {
            return Err(Error::Budget {
                what: "vertex",
                projected,
                budget: self.vertices as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_work(&self, projected: u128) -> Result<()> {
        if projected > self.work as u128 {
            return Err(Error::Budget {
                what: "work",
                projected,
                budget: self.work as u128,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(
            Budget::parse("500").unwrap(),
            Budget {
                vertices: 500,
                work: 500
            }
        );
        let b = Budget::parse("work=10_000").unwrap();
        assert_eq!(b.work, 10_000);
        assert_eq!(b.vertices, DEFAULT_VERTEX_BUDGET);
        assert!(Budget::parse("speed=3").is_err());
    }

    #[test]
    fn checks() {
        let b = Budget {
            vertices: 10,
            work: 5,
        };
        assert!(b.check_vertices(10).is_ok());
        assert!(b.check_vertices(11).unwrap_err().is_budget());
        assert!(b.check_work(6).is_err());
    }
}
