use std::collections::HashMap;

use crate::graph::Graph;
use crate::Result;

/// Vertices sharing the open neighbourhood `neighborhood`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Class {
    pub members: u64,
    pub neighborhood: u64,
}

impl Class {
    /// u_l
    pub fn u(&self) -> u64 {
        self.members.count_ones() as u64
    }

    /// m_l
    pub fn m(&self) -> u64 {
        self.neighborhood.count_ones() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodPartition {
    pub classes: Vec<Class>,
}

fn group_by(n: usize, key: impl Fn(usize) -> u64) -> Vec<Class> {
    let mut slot: HashMap<u64, usize> = HashMap::new();
    let mut classes: Vec<Class> = Vec::new();
    for v in 0..n {
        let k = key(v);
        let i = *slot.entry(k).or_insert_with(|| {
            classes.push(Class { members: 0, neighborhood: k });
            classes.len() - 1
        });
        classes[i].members |= 1 << v;
    }
    classes
}

/// Groups vertices by open neighbourhood; classes ordered by least vertex.
pub fn partition(g: &Graph) -> NeighborhoodPartition {
    NeighborhoodPartition { classes: group_by(g.n(), |v| g.neighbors(v)) }
}

/// QFI under exp(-iθ Σ X_j / 2): the number of ordered pairs with equal open
/// neighbourhoods, Σ_l u_l².
pub fn qfi_x(g: &Graph) -> Result<u64> {
    g.require_no_isolated()?;
    Ok(partition(g).classes.iter().map(|c| c.u() * c.u()).sum())
}

/// QFI under exp(-iθ Σ Y_j / 2): ordered pairs with equal closed neighbourhoods.
pub fn qfi_y(g: &Graph) -> u64 {
    group_by(g.n(), |v| g.closed_neighbors(v)).iter().map(|c| c.u() * c.u()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bundle;

    #[test]
    fn partition_examples() {
        let p = partition(&Graph::star(5));
        assert_eq!(p.classes.len(), 2);
        assert_eq!(p.classes[0], Class { members: 1, neighborhood: 0b11110 });
        assert_eq!(p.classes[1], Class { members: 0b11110, neighborhood: 1 });
        assert_eq!(partition(&Graph::cycle(5)).classes.len(), 5);
        let c4 = partition(&Graph::cycle(4));
        assert_eq!(c4.classes.iter().map(|c| c.members).collect::<Vec<_>>(), vec![0b0101, 0b1010]);
    }

    #[test]
    fn closed_forms() {
        for n in 3..=8u64 {
            assert_eq!(qfi_x(&Graph::star(n as usize)).unwrap(), (n - 1) * (n - 1) + 1);
            assert_eq!(qfi_y(&Graph::complete(n as usize)), n * n);
        }
        assert_eq!(qfi_x(&Graph::cycle(6)).unwrap(), 6);
        assert_eq!(qfi_x(&Graph::path(2)).unwrap(), 2);
        assert_eq!(qfi_y(&Graph::star(5)), 5);
        assert_eq!(qfi_y(&Graph::empty(1)), 1);
        assert!(qfi_x(&Graph::empty(1)).is_err());
        assert_eq!(qfi_x(&bundle(&Graph::cycle(3), &[3, 4, 3]).unwrap()).unwrap(), 34);
    }
}
