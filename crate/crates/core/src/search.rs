//! Row-major exact-cover engine over a sliding occupancy frontier.
//!
//! Cells are visited in row-major order. At each step the first undecided
//! cell is either already covered (skip it) or must be covered by a shape
//! whose first row-major cell is that cell, i.e. a shape anchored there. The
//! occupancy of the next `reach` cells fits in a `u128`, so the pair
//! `(position, frontier)` is a complete search state: counting merges equal
//! states layer by layer, and enumeration memoizes states that lead nowhere.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::count::{add_into, Count};
use crate::geometry::Region;

/// Largest frontier the engine supports, in cells.
pub(crate) const MAX_REACH: usize = 128;

/// Layers with fewer states than this are processed on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EngineError {
    FrontierTooWide { reach: usize },
    Overflow,
}

/// A shape given by offsets from its anchor. The anchor must be covered and
/// must be the shape's first cell in row-major order.
pub(crate) struct Shape {
    pub offsets: Vec<(usize, usize)>,
}

struct Compiled {
    mask: u128,
    /// `fits[i]`: anchoring at cell `i` keeps every cell in the region and is
    /// permitted by the caller's filter.
    fits: Vec<bool>,
}

pub(crate) struct Engine {
    n: usize,
    reach: usize,
    blocked: Vec<bool>,
    shapes: Vec<Compiled>,
}

pub(crate) fn reach_for(width: usize, shapes: &[Shape]) -> usize {
    shapes
        .iter()
        .flat_map(|s| s.offsets.iter().map(|&(dr, dc)| dr * width + dc + 1))
        .max()
        .unwrap_or(1)
}

impl Engine {
    pub fn new(
        region: &Region,
        shapes: &[Shape],
        allowed: impl Fn(usize, usize) -> bool,
    ) -> Result<Self, EngineError> {
        let width = region.width();
        let n = width * region.height();
        let reach = reach_for(width, shapes);
        if reach > MAX_REACH {
            return Err(EngineError::FrontierTooWide { reach });
        }
        let blocked: Vec<bool> = (0..n)
            .map(|i| !region.contains(region.cell_at(i)))
            .collect();
        let compiled = shapes
            .iter()
            .enumerate()
            .map(|(si, shape)| {
                debug_assert_eq!(shape.offsets.iter().min(), Some(&(0, 0)));
                let mask = shape
                    .offsets
                    .iter()
                    .fold(0u128, |m, &(dr, dc)| m | 1u128 << (dr * width + dc));
                let fits = (0..n)
                    .map(|i| {
                        let anchor = region.cell_at(i);
                        allowed(si, i)
                            && shape.offsets.iter().all(|&(dr, dc)| {
                                let c =
                                    crate::geometry::Cell::new(anchor.row + dr, anchor.col + dc);
                                region.contains(c)
                            })
                    })
                    .collect();
                Compiled { mask, fits }
            })
            .collect();
        Ok(Self {
            n,
            reach,
            blocked,
            shapes: compiled,
        })
    }

    fn incoming(&self, i: usize) -> u128 {
        u128::from(i >= self.n || self.blocked[i])
    }

    fn initial(&self) -> u128 {
        (0..self.reach).fold(0, |s, j| s | self.incoming(j) << j)
    }

    fn advance(&self, pos: usize, state: u128) -> u128 {
        (state >> 1) | self.incoming(pos + self.reach) << (self.reach - 1)
    }

    /// Skips covered cells; returns the next undecided position (or `n`).
    fn normalize(&self, mut pos: usize, mut state: u128) -> (usize, u128) {
        while pos < self.n && state & 1 == 1 {
            state = self.advance(pos, state);
            pos += 1;
        }
        (pos, state)
    }

    fn options(&self, pos: usize, state: u128) -> impl Iterator<Item = (usize, u128)> + '_ {
        self.shapes.iter().enumerate().filter_map(move |(si, s)| {
            (s.fits[pos] && state & s.mask == 0).then_some((si, state | s.mask))
        })
    }

    /// Exact number of exact covers, merging equal frontier states.
    pub fn count<C: Count>(&self, threads: usize) -> Result<C, EngineError> {
        let mut layer: HashMap<u128, C> = HashMap::new();
        layer.insert(self.initial(), C::one());
        let pool = if threads > 1 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .ok()
        } else {
            None
        };
        for pos in 0..self.n {
            let step = |(state, count): (&u128, &C),
                        out: &mut HashMap<u128, C>|
             -> Result<(), EngineError> {
                let mut push = |next: u128| {
                    let next = self.advance(pos, next);
                    match out.get_mut(&next) {
                        Some(acc) => add_into(acc, count).ok_or(EngineError::Overflow),
                        None => {
                            out.insert(next, count.clone());
                            Ok(())
                        }
                    }
                };
                if state & 1 == 1 {
                    push(*state)
                } else {
                    for (_, next) in self.options(pos, *state) {
                        push(next)?;
                    }
                    Ok(())
                }
            };
            layer = match &pool {
                Some(pool) if layer.len() >= PARALLEL_THRESHOLD => pool.install(|| {
                    let entries: Vec<(&u128, &C)> = layer.iter().collect();
                    let chunk = entries.len().div_ceil(threads * 4);
                    entries
                        .par_chunks(chunk)
                        .map(|part| {
                            let mut out = HashMap::new();
                            for &entry in part {
                                step(entry, &mut out)?;
                            }
                            Ok(out)
                        })
                        .try_reduce(HashMap::new, |mut a, b| {
                            for (k, v) in b {
                                match a.get_mut(&k) {
                                    Some(acc) => add_into(acc, &v).ok_or(EngineError::Overflow)?,
                                    None => {
                                        a.insert(k, v);
                                    }
                                }
                            }
                            Ok(a)
                        })
                })?,
                _ => {
                    let mut out = HashMap::with_capacity(layer.len());
                    for entry in &layer {
                        step(entry, &mut out)?;
                    }
                    out
                }
            };
            if layer.is_empty() {
                return Ok(C::zero());
            }
        }
        let mut total = C::zero();
        for v in layer.values() {
            add_into(&mut total, v).ok_or(EngineError::Overflow)?;
        }
        Ok(total)
    }

    pub fn into_solutions(self) -> Solutions {
        let (pos, state) = self.normalize(0, self.initial());
        Solutions {
            engine: self,
            stack: vec![Frame {
                pos,
                state,
                next: 0,
                produced: false,
            }],
            path: Vec::new(),
            dead: HashSet::new(),
            started: false,
        }
    }
}

struct Frame {
    pos: usize,
    state: u128,
    next: usize,
    produced: bool,
}

/// Depth-first stream of solutions, each a list of `(shape index, anchor
/// cell index)` in placement order. Branches are tried in shape order at the
/// first undecided cell, which fixes the stream order.
pub(crate) struct Solutions {
    engine: Engine,
    stack: Vec<Frame>,
    path: Vec<(usize, usize)>,
    dead: HashSet<(usize, u128)>,
    started: bool,
}

impl Iterator for Solutions {
    type Item = Vec<(usize, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        let Solutions {
            engine,
            stack,
            path,
            dead,
            started,
        } = self;
        if !*started {
            *started = true;
            if stack.last().is_some_and(|root| root.pos == engine.n) {
                stack.clear();
                return Some(Vec::new());
            }
        }
        while let Some(top) = stack.last_mut() {
            let (pos, state) = (top.pos, top.state);
            let mut descended = None;
            while top.next < engine.shapes.len() {
                let si = top.next;
                top.next += 1;
                let s = &engine.shapes[si];
                if !s.fits[pos] || state & s.mask != 0 {
                    continue;
                }
                let (npos, nstate) = engine.normalize(pos, state | s.mask);
                if npos < engine.n && dead.contains(&(npos, nstate)) {
                    continue;
                }
                descended = Some((si, npos, nstate));
                break;
            }
            match descended {
                Some((si, npos, nstate)) => {
                    path.push((si, pos));
                    if npos == engine.n {
                        top.produced = true;
                        let out = path.clone();
                        path.pop();
                        return Some(out);
                    }
                    stack.push(Frame {
                        pos: npos,
                        state: nstate,
                        next: 0,
                        produced: false,
                    });
                }
                None => {
                    let frame = stack.pop().expect("non-empty");
                    if frame.produced {
                        if let Some(parent) = stack.last_mut() {
                            parent.produced = true;
                        }
                    } else {
                        dead.insert((frame.pos, frame.state));
                    }
                    path.pop();
                }
            }
        }
        None
    }
}
