use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::geometry::{Sphere, Vec3};

use super::TaskError;

pub const RING_COUNT: usize = 17;
/// Diameter of the ring the target centers lie on, meters.
pub const RING_DIAMETER: f64 = 0.60;
/// Target sphere diameter, meters.
pub const TARGET_WIDTH: f64 = 0.07;
/// Depth step between the left and right halves and the ring plane, meters.
pub const DEPTH_OFFSET: f64 = 0.07;
/// Height of the layout center above the floor, meters.
pub const LAYOUT_HEIGHT: f64 = 1.5;

/// Shannon index of difficulty in bits.
pub fn compute_id(movement_amplitude: f64, width: f64) -> Result<f64, TaskError> {
    if !(movement_amplitude > 0.0 && width > 0.0) || !movement_amplitude.is_finite() || !width.is_finite() {
        return Err(TaskError::InvalidIdInputs {
            amplitude: movement_amplitude,
            width,
        });
    }
    Ok((movement_amplitude / width + 1.0).log2())
}

/// Clockwise diametric skip pattern: every step jumps to the slot
/// roughly opposite the previous one. Returns sphere ids.
pub fn diametric_visit_order(n: usize) -> Vec<usize> {
    let step = n / 2 + n % 2;
    (0..n).map(|k| (k * step) % n + 1).collect()
}

/// Sphere 0 in the middle and `RING_COUNT` spheres on a ring, facing a
/// user at the origin who looks down `-z`. Ids `1..=17` run clockwise from
/// the top; spheres on the left half sit nearer to the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionLayout {
    pub distance: f64,
    pub center: Sphere,
    pub ring: Vec<Sphere>,
    pub depth_offsets: Vec<f64>,
    pub visit_order: Vec<usize>,
    pub id_bits: f64,
}

pub fn build_selection_layout(distance: f64) -> Result<SelectionLayout, TaskError> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(TaskError::NonPositiveDistance(distance));
    }
    let radius = TARGET_WIDTH / 2.0;
    let ring_radius = RING_DIAMETER / 2.0;
    let mut ring = Vec::with_capacity(RING_COUNT);
    let mut depth_offsets = Vec::with_capacity(RING_COUNT);
    for slot in 0..RING_COUNT {
        let angle = slot as f64 * TAU / RING_COUNT as f64;
        let x = ring_radius * angle.sin();
        let y = ring_radius * angle.cos();
        let offset = if x <= 1e-12 { -DEPTH_OFFSET } else { DEPTH_OFFSET };
        let center = Vec3::new(x, LAYOUT_HEIGHT + y, -(distance + offset));
        ring.push(Sphere { center, radius });
        depth_offsets.push(offset);
    }
    Ok(SelectionLayout {
        distance,
        center: Sphere {
            center: Vec3::new(0.0, LAYOUT_HEIGHT, -distance),
            radius,
        },
        ring,
        depth_offsets,
        visit_order: diametric_visit_order(RING_COUNT),
        id_bits: compute_id(RING_DIAMETER, TARGET_WIDTH)?,
    })
}

impl SelectionLayout {
    pub fn with_visit_order(mut self, order: Vec<usize>) -> Result<Self, TaskError> {
        let mut seen = vec![false; self.ring.len()];
        for &id in &order {
            if id == 0 || id > seen.len() || std::mem::replace(&mut seen[id - 1], true) {
                return Err(TaskError::InvalidVisitOrder(self.ring.len()));
            }
        }
        if order.len() != self.ring.len() {
            return Err(TaskError::InvalidVisitOrder(self.ring.len()));
        }
        self.visit_order = order;
        Ok(self)
    }

    pub fn sphere_count(&self) -> usize {
        self.ring.len() + 1
    }

    /// Sphere by id; 0 is the center.
    pub fn sphere(&self, id: usize) -> Option<&Sphere> {
        match id {
            0 => Some(&self.center),
            _ => self.ring.get(id - 1),
        }
    }

    /// Target ids in the order they are presented: the center, then the
    /// ring in visit order.
    pub fn sequence(&self) -> Vec<usize> {
        std::iter::once(0).chain(self.visit_order.iter().copied()).collect()
    }

    /// Whether the selection at `position` in [`sequence`](Self::sequence)
    /// enters the metrics.
    pub fn is_scored(&self, position: usize) -> bool {
        position >= 2
    }

    pub fn scored_per_set(&self) -> usize {
        self.ring.len().saturating_sub(1)
    }

    /// Distance from the previous target to the one at `position`.
    pub fn amplitude(&self, position: usize) -> f64 {
        let seq = self.sequence();
        if position == 0 || position >= seq.len() {
            return 0.0;
        }
        let a = self.sphere(seq[position - 1]).expect("valid id").center;
        let b = self.sphere(seq[position]).expect("valid id").center;
        a.distance(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighlightState {
    Neutral,
    Target,
    Hover,
}

/// Colour state of the spheres: one red target, at most one blue hover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereHighlight {
    count: usize,
    target: usize,
    hover: Option<usize>,
}

impl SphereHighlight {
    pub fn new(count: usize, target: usize) -> Self {
        Self {
            count,
            target: target.min(count.saturating_sub(1)),
            hover: None,
        }
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn hover(&self) -> Option<usize> {
        self.hover
    }

    /// Set from a ray hit or hand contact; `None` clears it.
    pub fn set_hover(&mut self, sphere: Option<usize>) {
        self.hover = sphere.filter(|&s| s < self.count);
    }

    pub fn set_target(&mut self, sphere: usize) {
        if sphere < self.count {
            self.target = sphere;
        }
    }

    pub fn state(&self, sphere: usize) -> HighlightState {
        if self.hover == Some(sphere) {
            HighlightState::Hover
        } else if sphere == self.target {
            HighlightState::Target
        } else {
            HighlightState::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionOutcome {
    Hit {
        target: usize,
        position: usize,
        clicks: u32,
        selection_time: f64,
        scored: bool,
    },
    Miss {
        target: usize,
        clicks_so_far: u32,
    },
    Complete,
}

/// Running state of one set of Task 1 selections.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRun {
    layout: SelectionLayout,
    sequence: Vec<usize>,
    position: usize,
    highlight: SphereHighlight,
    clicks: u32,
    last_selection: f64,
}

impl SelectionRun {
    pub fn start(layout: SelectionLayout, now: f64) -> Self {
        let sequence = layout.sequence();
        let highlight = SphereHighlight::new(layout.sphere_count(), sequence[0]);
        Self {
            layout,
            sequence,
            position: 0,
            highlight,
            clicks: 0,
            last_selection: now,
        }
    }

    pub fn layout(&self) -> &SelectionLayout {
        &self.layout
    }

    pub fn highlight(&self) -> &SphereHighlight {
        &self.highlight
    }

    pub fn highlight_mut(&mut self) -> &mut SphereHighlight {
        &mut self.highlight
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn current_target(&self) -> Option<usize> {
        self.sequence.get(self.position).copied()
    }

    pub fn is_complete(&self) -> bool {
        self.position >= self.sequence.len()
    }

    /// Registers a trigger click at `now` that hit `click_hit`, if any.
    pub fn advance_selection(&mut self, click_hit: Option<usize>, now: f64) -> SelectionOutcome {
        let Some(target) = self.current_target() else {
            return SelectionOutcome::Complete;
        };
        self.clicks += 1;
        if click_hit != Some(target) {
            return SelectionOutcome::Miss {
                target,
                clicks_so_far: self.clicks,
            };
        }
        let outcome = SelectionOutcome::Hit {
            target,
            position: self.position,
            clicks: self.clicks,
            selection_time: now - self.last_selection,
            scored: self.layout.is_scored(self.position),
        };
        self.position += 1;
        self.clicks = 0;
        self.last_selection = now;
        if let Some(next) = self.current_target() {
            self.highlight.set_target(next);
        }
        outcome
    }
}
