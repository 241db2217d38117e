use std::cmp::Ordering;

use t2v_core::compiler::{evaluate_query, Database, Relation};
use t2v_core::vql::{Axis, Direction, VqlQuery};

use crate::oracle::{oracle_evaluate, sorted_rows};

/// How the production evaluator and the oracle agreed on one query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    /// Same row multiset of this size, in an order ORDER BY allows.
    Rows(usize),
    /// Both rejected the query.
    BothFailed,
}

/// ORDER BY is respected; unordered output follows x ascending.
fn check_order(q: &VqlQuery, r: &Relation) -> Result<(), String> {
    let y = r.columns.len() - 1;
    for w in r.rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let ok = match q.order {
            // Bin labels sort by ordinal, which the cell order does not see.
            Some(o) if o.target == Axis::X && q.bin.is_some() => true,
            Some(o) => {
                let i = if o.target == Axis::X { 0 } else { y };
                let ord = a[i].total_cmp(&b[i]);
                match o.direction {
                    Direction::Asc => ord != Ordering::Greater,
                    Direction::Desc => ord != Ordering::Less,
                }
            }
            None if q.bin.is_none() => a[0].total_cmp(&b[0]) != Ordering::Greater,
            None => true,
        };
        if !ok {
            return Err(format!("{q}: {a:?} before {b:?}"));
        }
    }
    Ok(())
}

/// Run both evaluators on `q` and describe any disagreement.
pub fn compare_with_oracle(q: &VqlQuery, db: &Database) -> Result<Agreement, String> {
    match (evaluate_query(q, db), oracle_evaluate(q, db)) {
        (Ok(r), Ok(rows)) => {
            r.validate().map_err(|e| format!("{q}: invalid relation: {e}"))?;
            if sorted_rows(&r.rows) != sorted_rows(&rows) {
                return Err(format!("{q}\nevaluator {:?}\noracle {:?}", r.rows, rows));
            }
            check_order(q, &r)?;
            Ok(Agreement::Rows(rows.len()))
        }
        (Err(_), Err(_)) => Ok(Agreement::BothFailed),
        (got, want) => Err(format!("{q}\nevaluator {got:?}\noracle {want:?}")),
    }
}
