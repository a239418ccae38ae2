//! Clipped sliding-window extrema with a monotone deque.

use std::collections::VecDeque;

/// `out[c] = max src[max(0, c+1-win) ..= min(c, src.len()-1)]` for `c < src.len() + win - 1`.
///
/// With `src` the averages of windows of length `win` indexed by start position, `out[c]`
/// is the largest average over the windows covering position `c`.
pub fn sliding_max(src: &[f64], win: usize, out: &mut [f64]) {
    sliding(src, win, out, |a, b| a >= b)
}

/// As [`sliding_max`] with the minimum.
pub fn sliding_min(src: &[f64], win: usize, out: &mut [f64]) {
    sliding(src, win, out, |a, b| a <= b)
}

fn sliding(src: &[f64], win: usize, out: &mut [f64], dominates: impl Fn(f64, f64) -> bool) {
    debug_assert!(win >= 1 && !src.is_empty());
    debug_assert_eq!(out.len(), src.len() + win - 1);
    let mut dq: VecDeque<usize> = VecDeque::with_capacity(win.min(src.len()) + 1);
    for (c, slot) in out.iter_mut().enumerate() {
        if c < src.len() {
            while dq.back().is_some_and(|&j| dominates(src[c], src[j])) {
                dq.pop_back();
            }
            dq.push_back(c);
        }
        let oldest = (c + 1).saturating_sub(win);
        while dq.front().is_some_and(|&j| j < oldest) {
            dq.pop_front();
        }
        *slot = src[*dq.front().expect("window is never empty")];
    }
}
