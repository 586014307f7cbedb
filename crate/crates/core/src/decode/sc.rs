//! Successive-cancellation kernel shared by every decoder in this crate.
//!
//! Soft values and partial sums are stored per tree depth `d = 1..=n`
//! (depth `d` holds `N >> d` entries; depth 0 is the channel and is shared).
//! Each decoding path owns one slot per depth in a reference-counted pool, so
//! forking a path copies `2n` slot handles and a slot is only replaced when a
//! shared one is about to be overwritten. Every write covers a whole slot,
//! so no data is copied on fork.

use super::{CheckNode, LlrBlock};

struct Pool<T> {
    size: usize,
    data: Vec<T>,
    refs: Vec<u32>,
    free: Vec<u32>,
}

impl<T: Copy + Default> Pool<T> {
    fn new(size: usize) -> Self {
        Self {
            size,
            data: Vec::new(),
            refs: Vec::new(),
            free: Vec::new(),
        }
    }

    fn alloc(&mut self) -> u32 {
        if let Some(s) = self.free.pop() {
            self.refs[s as usize] = 1;
            return s;
        }
        let s = self.refs.len() as u32;
        self.refs.push(1);
        self.data.resize(self.data.len() + self.size, T::default());
        s
    }

    fn retain(&mut self, s: u32) {
        self.refs[s as usize] += 1;
    }

    fn release(&mut self, s: u32) {
        let r = &mut self.refs[s as usize];
        *r -= 1;
        if *r == 0 {
            self.free.push(s);
        }
    }

    /// Slot that may be overwritten by the holder of `s`.
    fn exclusive(&mut self, s: u32) -> u32 {
        if self.refs[s as usize] == 1 {
            s
        } else {
            self.release(s);
            self.alloc()
        }
    }

    fn get(&self, s: u32) -> &[T] {
        let start = s as usize * self.size;
        &self.data[start..start + self.size]
    }

    fn get_mut(&mut self, s: u32) -> &mut [T] {
        let start = s as usize * self.size;
        &mut self.data[start..start + self.size]
    }
}

/// Handles of one path's per-depth storage.
#[derive(Debug, Clone, Default)]
pub(crate) struct ScHandles {
    llr: Vec<u32>,
    ps: Vec<u32>,
}

/// Shared storage for every SC process of one decoding run.
pub(crate) struct ScKernel {
    n: usize,
    len: usize,
    check: CheckNode,
    llr: Vec<Pool<f64>>,
    ps: Vec<Pool<u8>>,
    scratch: Vec<u8>,
    scratch2: Vec<u8>,
    /// Soft values computed so far (one per check- or variable-node update).
    pub(crate) visits: u64,
}

#[inline]
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    sign * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

#[inline]
fn min_sum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * a.abs().min(b.abs())
}

impl ScKernel {
    pub(crate) fn new(len: usize, check: CheckNode) -> Self {
        let n = len.trailing_zeros() as usize;
        let llr = (0..=n).map(|d| Pool::new(len >> d)).collect();
        let ps = (0..=n).map(|d| Pool::new(len >> d)).collect();
        Self {
            n,
            len,
            check,
            llr,
            ps,
            scratch: Vec::with_capacity(len),
            scratch2: Vec::with_capacity(len),
            visits: 0,
        }
    }

    /// Fresh path with private storage.
    pub(crate) fn new_path(&mut self) -> ScHandles {
        let mut h = ScHandles {
            llr: vec![0; self.n + 1],
            ps: vec![0; self.n + 1],
        };
        for d in 1..=self.n {
            h.llr[d] = self.llr[d].alloc();
            h.ps[d] = self.ps[d].alloc();
        }
        h
    }

    pub(crate) fn fork(&mut self, h: &ScHandles) -> ScHandles {
        for d in 1..=self.n {
            self.llr[d].retain(h.llr[d]);
            self.ps[d].retain(h.ps[d]);
        }
        h.clone()
    }

    pub(crate) fn drop_path(&mut self, h: &ScHandles) {
        for d in 1..=self.n {
            self.llr[d].release(h.llr[d]);
            self.ps[d].release(h.ps[d]);
        }
    }

    /// Decision soft value of bit `i` given the partial sums already fed.
    pub(crate) fn bit_llr(&mut self, h: &mut ScHandles, channel: &LlrBlock, i: usize) -> f64 {
        let n = self.n;
        if n == 0 {
            return channel.values()[0];
        }
        let start = if i == 0 {
            1
        } else {
            n - (usize::BITS - 1 - (i ^ (i - 1)).leading_zeros()) as usize
        };
        for d in start..=n {
            let half = self.len >> d;
            let out_slot = self.llr[d].exclusive(h.llr[d]);
            h.llr[d] = out_slot;
            let right = d == start && i != 0;
            // Split borrows: depth d-1 input, depth d output.
            let (lower, upper) = self.llr.split_at_mut(d);
            let input: &[f64] = if d == 1 {
                channel.values()
            } else {
                lower[d - 1].get(h.llr[d - 1])
            };
            let out = upper[0].get_mut(out_slot);
            if right {
                let ps = self.ps[d].get(h.ps[d]);
                for k in 0..half {
                    let a = input[k];
                    let b = input[k + half];
                    out[k] = if ps[k] == 0 { b + a } else { b - a };
                }
            } else {
                match self.check {
                    CheckNode::Boxplus => {
                        for k in 0..half {
                            out[k] = boxplus(input[k], input[k + half]);
                        }
                    }
                    CheckNode::MinSum => {
                        for k in 0..half {
                            out[k] = min_sum(input[k], input[k + half]);
                        }
                    }
                }
            }
            self.visits += half as u64;
        }
        self.llr[n].get(h.llr[n])[0]
    }

    /// Feeds decided bit `u_i` into the partial sums.
    pub(crate) fn feed_bit(&mut self, h: &mut ScHandles, i: usize, bit: u8) {
        let n = self.n;
        let mut cur = std::mem::take(&mut self.scratch);
        let mut next = std::mem::take(&mut self.scratch2);
        cur.clear();
        cur.push(bit);
        for d in (1..=n).rev() {
            if (i >> (n - d)) & 1 == 0 {
                let slot = self.ps[d].exclusive(h.ps[d]);
                h.ps[d] = slot;
                self.ps[d].get_mut(slot).copy_from_slice(&cur);
                break;
            }
            let left = self.ps[d].get(h.ps[d]);
            next.clear();
            next.extend(left.iter().zip(&cur).map(|(a, b)| a ^ b));
            next.extend_from_slice(&cur);
            std::mem::swap(&mut cur, &mut next);
        }
        self.scratch = cur;
        self.scratch2 = next;
    }
}
