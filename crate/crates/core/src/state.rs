//! Object-centric game frames.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A named object constant together with its category.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectRef {
    pub name: String,
    pub kind: String,
}

impl ObjectRef {
    pub fn new(name: impl Into<String>, kind: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: kind.into(),
        }
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Fixed list of objects in an environment. Names are unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roster {
    objects: Vec<ObjectRef>,
}

impl Roster {
    /// Panics if two objects share a name.
    pub fn new(objects: Vec<ObjectRef>) -> Self {
        for (i, a) in objects.iter().enumerate() {
            assert!(
                objects[..i].iter().all(|b| b.name != a.name),
                "duplicate object name {}",
                a.name
            );
        }
        Self { objects }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[ObjectRef] {
        &self.objects
    }

    pub fn get(&self, slot: usize) -> Option<&ObjectRef> {
        self.objects.get(slot)
    }

    pub fn slot_of(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }
}

/// Width and height of a game map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapExtent {
    pub width: f64,
    pub height: f64,
}

impl MapExtent {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    /// Length of the map diagonal; the distance normalizer.
    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectState {
    pub exists: bool,
    pub x: f64,
    pub y: f64,
}

impl ObjectState {
    pub fn at(x: f64, y: f64) -> Self {
        Self { exists: true, x, y }
    }

    pub fn absent() -> Self {
        Self {
            exists: false,
            x: 0.0,
            y: 0.0,
        }
    }
}

/// One game frame: existence flag and position for every roster slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogicalState {
    pub objects: Vec<ObjectState>,
    pub step_index: u32,
    pub map: MapExtent,
}

impl LogicalState {
    pub fn new(objects: Vec<ObjectState>, map: MapExtent) -> Self {
        Self {
            objects,
            step_index: 0,
            map,
        }
    }

    pub fn object(&self, slot: usize) -> Option<&ObjectState> {
        self.objects.get(slot)
    }
}
