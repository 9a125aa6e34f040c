//! Partial entities and the operations the sieves run on them.
//!
//! Every mention starts as a singleton entity whose id equals the mention
//! id. Merging keeps the lower id, concatenates member lists in document
//! order and unions attribute lattices. Because surviving ids only ever
//! shrink, entity ids are deterministic for a fixed merge sequence.

use crate::attrs::AttributeLattice;
use crate::error::{Error, Result};
use crate::mention::Mention;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    /// Id of the entity == id of its earliest mention.
    pub id: usize,
    /// Member mention ids in document order.
    pub mentions: Vec<usize>,
    /// Union of the members' attribute lattices.
    pub attrs: AttributeLattice,
}

impl Entity {
    /// Earliest member (document order); equals `id` by construction.
    pub fn first_mention(&self) -> usize {
        self.mentions[0]
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }
}

/// The set of partial entities over one document's mentions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntityStore {
    /// mention id -> current entity id
    entity_of: Vec<usize>,
    /// live entities, keyed by id (deterministic iteration order)
    entities: BTreeMap<usize, Entity>,
}

impl EntityStore {
    /// One singleton entity per mention.
    pub fn new(mentions: &[Mention]) -> Self {
        let entities = mentions
            .iter()
            .map(|m| {
                (
                    m.id,
                    Entity {
                        id: m.id,
                        mentions: vec![m.id],
                        attrs: m.attrs,
                    },
                )
            })
            .collect();
        Self {
            entity_of: (0..mentions.len()).collect(),
            entities,
        }
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn mention_count(&self) -> usize {
        self.entity_of.len()
    }

    pub fn entity(&self, id: usize) -> &Entity {
        &self.entities[&id]
    }

    pub fn entity_of(&self, mention: usize) -> usize {
        self.entity_of[mention]
    }

    /// Live entities in ascending id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    /// Merges two entities; the lower id survives and is returned.
    pub fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        if a == b {
            return Err(Error::SameEntity(a));
        }
        let keep = a.min(b);
        let drop = a.max(b);
        let absorbed = self
            .entities
            .remove(&drop)
            .unwrap_or_else(|| panic!("entity {drop} is not live"));
        let target = self
            .entities
            .get_mut(&keep)
            .unwrap_or_else(|| panic!("entity {keep} is not live"));
        for m in &absorbed.mentions {
            self.entity_of[*m] = keep;
        }
        // Mention ids are document order, so a sorted merge keeps the
        // member list in document order.
        let mut merged = Vec::with_capacity(target.mentions.len() + absorbed.mentions.len());
        let (mut i, mut j) = (0, 0);
        while i < target.mentions.len() && j < absorbed.mentions.len() {
            if target.mentions[i] < absorbed.mentions[j] {
                merged.push(target.mentions[i]);
                i += 1;
            } else {
                merged.push(absorbed.mentions[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&target.mentions[i..]);
        merged.extend_from_slice(&absorbed.mentions[j..]);
        target.mentions = merged;
        target.attrs = target.attrs.union(absorbed.attrs);
        Ok(keep)
    }
}

/// Mentions eligible to *start* a sieve comparison: the earliest mention of
/// each entity, except the document's very first mention (nothing precedes
/// it, so it can only ever be an antecedent).
pub fn select_active_mentions(store: &EntityStore) -> Vec<usize> {
    let first = store.entities().map(|e| e.first_mention()).min();
    store
        .entities()
        .map(|e| e.first_mention())
        .filter(|m| Some(*m) != first)
        .collect()
}

/// Candidate entities for `mention`, nearest first.
///
/// An entity is a candidate when at least one member precedes the mention
/// within `window` sentences (`None` = unlimited). Entities are ranked by
/// their best member under (sentence distance, token distance, member id);
/// ties between entities break toward the smaller entity id. The mention's
/// own entity is never a candidate.
pub fn order_candidates(
    mention: usize,
    mentions: &[Mention],
    store: &EntityStore,
    window: Option<usize>,
) -> Vec<usize> {
    let target = &mentions[mention];
    let own = store.entity_of(mention);
    let mut ranked: Vec<((usize, usize, usize), usize)> = Vec::new();
    for entity in store.entities() {
        if entity.id == own {
            continue;
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for &mid in &entity.mentions {
            let m = &mentions[mid];
            if !m.precedes(target) {
                break; // members are in document order
            }
            let sent_dist = target.span.sent - m.span.sent;
            if let Some(w) = window {
                if sent_dist > w {
                    continue;
                }
            }
            let token_dist = target.start_doc.saturating_sub(m.start_doc);
            let key = (sent_dist, token_dist, mid);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        if let Some(key) = best {
            ranked.push((key, entity.id));
        }
    }
    ranked.sort();
    ranked.into_iter().map(|(_, id)| id).collect()
}
