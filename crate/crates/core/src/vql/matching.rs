//! Tree matching and per-component matching of query pairs.

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::canonical::canonicalize;
use super::error::VqlError;
use crate::dataset::DatabaseSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DataMatch {
    #[serde(rename = "where")]
    pub where_: bool,
    pub join: bool,
    pub group: bool,
    pub binning: bool,
    pub order: bool,
}

impl DataMatch {
    pub fn all(&self) -> bool {
        self.where_ && self.join && self.group && self.binning && self.order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ComponentReport {
    pub vis_match: bool,
    pub axis_match: bool,
    pub data_match: DataMatch,
}

impl ComponentReport {
    pub fn all_match(&self) -> bool {
        self.vis_match && self.axis_match && self.data_match.all()
    }
}

/// True iff both queries canonicalize to the same tree.
pub fn tree_match(
    pred: &VqlQuery,
    gold: &VqlQuery,
    schema: &DatabaseSchema,
) -> Result<bool, VqlError> {
    Ok(canonicalize(pred, schema)? == canonicalize(gold, schema)?)
}

/// How a grouped or binned column relates to the select channels. GROUP BY
/// and BIN are compared through these roles so that a wrong axis column is
/// charged to the axis component only, not again to the data component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Role {
    X,
    Color,
    Other(ColumnRef),
}

fn role(q: &VqlQuery, c: &ColumnRef) -> Role {
    if *c == q.x {
        Role::X
    } else if q.color.as_ref() == Some(c) {
        Role::Color
    } else {
        Role::Other(c.clone())
    }
}

fn group_roles(q: &VqlQuery) -> Vec<Role> {
    let mut roles: Vec<Role> = q.group_by.iter().map(|c| role(q, c)).collect();
    roles.sort();
    roles.dedup();
    roles
}

fn bin_role(q: &VqlQuery) -> Option<(Role, BinUnit)> {
    q.bin.as_ref().map(|b| (role(q, &b.column), b.unit))
}

/// Compare two already-canonical queries component by component.
pub fn compare_canonical(pred: &VqlQuery, gold: &VqlQuery) -> ComponentReport {
    ComponentReport {
        vis_match: pred.chart == gold.chart,
        axis_match: pred.x == gold.x && pred.y == gold.y && pred.color == gold.color,
        data_match: DataMatch {
            where_: pred.filters == gold.filters,
            join: pred.from_table == gold.from_table && pred.joins == gold.joins,
            group: group_roles(pred) == group_roles(gold),
            binning: bin_role(pred) == bin_role(gold),
            order: pred.order == gold.order,
        },
    }
}

pub fn component_match(
    pred: &VqlQuery,
    gold: &VqlQuery,
    schema: &DatabaseSchema,
) -> Result<ComponentReport, VqlError> {
    Ok(compare_canonical(
        &canonicalize(pred, schema)?,
        &canonicalize(gold, schema)?,
    ))
}
