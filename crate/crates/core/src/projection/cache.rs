use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::{split_distribution, IpfOptions, SplitResult};
use crate::distribution::JointDistribution;
use crate::error::Result;
use crate::lattice::ConstraintNode;

type Slot = Arc<OnceLock<Result<Arc<SplitResult>>>>;

/// Memoized split distributions of one true distribution.
///
/// Each node is projected at most once: concurrent requests for the same node
/// wait on a single computation, and readers only ever see finished results.
#[derive(Debug)]
pub struct SplitCache {
    p: JointDistribution,
    options: IpfOptions,
    slots: Mutex<HashMap<ConstraintNode, Slot>>,
}

impl SplitCache {
    pub fn new(p: JointDistribution, options: IpfOptions) -> Result<Self> {
        options.validate()?;
        Ok(Self {
            p,
            options,
            slots: Mutex::new(HashMap::new()),
        })
    }

    pub fn distribution(&self) -> &JointDistribution {
        &self.p
    }

    pub fn options(&self) -> &IpfOptions {
        &self.options
    }

    pub fn get(&self, node: &ConstraintNode) -> Result<Arc<SplitResult>> {
        let slot = {
            let mut slots = self.slots.lock().expect("cache lock poisoned");
            slots.entry(node.clone()).or_default().clone()
        };
        slot.get_or_init(|| split_distribution(&self.p, node, &self.options).map(Arc::new))
            .clone()
    }

    /// Projects all given nodes, in parallel when asked; the first error in
    /// node order is returned.
    pub fn prefill(&self, nodes: &[ConstraintNode], parallel: bool) -> Result<()> {
        if parallel {
            nodes.par_iter().for_each(|node| {
                let _ = self.get(node);
            });
        }
        nodes.iter().try_for_each(|node| self.get(node).map(|_| ()))
    }

    /// Number of nodes requested so far.
    pub fn len(&self) -> usize {
        self.slots.lock().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
