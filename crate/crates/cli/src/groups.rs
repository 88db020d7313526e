//! Group descriptions accepted in problem files.

use massey_core::cohom::FiniteGroup;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Named constructions or an explicit multiplication table (elements 0..k, identity 0).
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Quaternion,
    ElementaryAbelian(usize, usize),
    Product(Box<GroupSpec>, Box<GroupSpec>),
    Table {
        rows: Vec<Vec<u32>>,
        #[serde(default)]
        generators: Option<Vec<u32>>,
    },
}

/// Largest group order accepted from a problem file.
pub const MAX_ORDER: usize = 4096;

impl GroupSpec {
    pub fn order_hint(&self) -> Option<usize> {
        match self {
            GroupSpec::Cyclic(m) => Some(*m),
            GroupSpec::Dihedral(m) => m.checked_mul(2),
            GroupSpec::Quaternion => Some(8),
            GroupSpec::ElementaryAbelian(p, r) => p.checked_pow(*r as u32),
            GroupSpec::Product(a, b) => a.order_hint()?.checked_mul(b.order_hint()?),
            GroupSpec::Table { rows, .. } => Some(rows.len()),
        }
    }

    pub fn build(&self) -> Result<FiniteGroup, Failure> {
        match self.order_hint() {
            Some(o) if (1..=MAX_ORDER).contains(&o) => {}
            Some(o) => return Err(Failure::input(format!("group order {o} outside 1..={MAX_ORDER}"))),
            None => return Err(Failure::input("group order overflows")),
        }
        Ok(match self {
            GroupSpec::Cyclic(m) => FiniteGroup::cyclic(*m),
            GroupSpec::Dihedral(m) => {
                if *m < 1 {
                    return Err(Failure::input("dihedral needs m ≥ 1"));
                }
                FiniteGroup::dihedral(*m)
            }
            GroupSpec::Quaternion => FiniteGroup::quaternion(),
            GroupSpec::ElementaryAbelian(p, r) => {
                if !massey_core::modarith::is_prime(*p as u64) {
                    return Err(Failure::input(format!("elementary_abelian: {p} is not prime")));
                }
                FiniteGroup::elementary_abelian(*p, *r)
            }
            GroupSpec::Product(a, b) => FiniteGroup::product(&a.build()?, &b.build()?),
            GroupSpec::Table { rows, generators } => FiniteGroup::from_table(rows, generators.clone())?,
        })
    }
}
