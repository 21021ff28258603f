use std::collections::BTreeMap;

use super::key::BlockingKeySpec;
use super::record::{Record, RecordId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub bkv: String,
    /// Member ids in ascending order.
    pub ids: Vec<RecordId>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Blocks in ascending BKV order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    blocks: Vec<Block>,
}

impl BlockIndex {
    pub fn build(records: &[Record], spec: &BlockingKeySpec) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::contract("cannot build a block index over zero records"));
        }
        let mut map: BTreeMap<String, Vec<RecordId>> = BTreeMap::new();
        for r in records {
            map.entry(spec.apply(r)?).or_default().push(r.id);
        }
        let blocks = map
            .into_iter()
            .map(|(bkv, mut ids)| {
                ids.sort_unstable();
                Block { bkv, ids }
            })
            .collect();
        Ok(BlockIndex { blocks })
    }

    /// Wraps pre-grouped blocks, sorting them by BKV and their members by id.
    pub fn from_blocks(mut blocks: Vec<Block>) -> Result<Self> {
        blocks.sort_by(|a, b| a.bkv.cmp(&b.bkv));
        for w in blocks.windows(2) {
            if w[0].bkv == w[1].bkv {
                return Err(Error::contract(format!("duplicate BKV `{}`", w[0].bkv)));
            }
        }
        for b in &mut blocks {
            b.ids.sort_unstable();
        }
        Ok(BlockIndex { blocks })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of distinct BKVs, `u`.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_records(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Block::len).collect()
    }

    pub fn block(&self, bkv: &str) -> Option<&Block> {
        self.blocks
            .binary_search_by(|b| b.bkv.as_str().cmp(bkv))
            .ok()
            .map(|i| &self.blocks[i])
    }

    /// The unordered SN baseline: BKV order, ties by ascending id.
    pub fn baseline_list(&self) -> Vec<RecordId> {
        self.blocks.iter().flat_map(|b| b.ids.iter().copied()).collect()
    }
}
