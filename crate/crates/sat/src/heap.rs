//! Binary max-heap over variables keyed by activity.

use crate::lit::Var;

#[derive(Default, Debug, Clone)]
pub(crate) struct VarHeap {
    heap: Vec<Var>,
    // position of each variable in `heap`, or usize::MAX when absent
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VarHeap {
    pub fn grow(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, ABSENT);
        }
    }

    #[inline]
    pub fn contains(&self, v: Var) -> bool {
        self.pos.get(v.index()).is_some_and(|&p| p != ABSENT)
    }

    pub fn insert(&mut self, v: Var, act: &[f64]) {
        self.grow(v.index() + 1);
        if self.contains(v) {
            return;
        }
        self.pos[v.index()] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    pub fn pop(&mut self, act: &[f64]) -> Option<Var> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        self.pos[top.index()] = ABSENT;
        if !self.heap.is_empty() {
            self.pos[self.heap[0].index()] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    /// Restore heap order after the activity of `v` increased.
    pub fn increased(&mut self, v: Var, act: &[f64]) {
        if let Some(&p) = self.pos.get(v.index()) {
            if p != ABSENT {
                self.sift_up(p, act);
            }
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !better(v, p, act) {
                break;
            }
            self.heap[i] = p;
            self.pos[p.index()] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && better(self.heap[r], self.heap[l], act) { r } else { l };
            let c = self.heap[child];
            if !better(c, v, act) {
                break;
            }
            self.heap[i] = c;
            self.pos[c.index()] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }
}

// Higher activity first; ties broken towards lower index for determinism.
#[inline]
fn better(a: Var, b: Var, act: &[f64]) -> bool {
    let (x, y) = (act[a.index()], act[b.index()]);
    x > y || (x == y && a.0 < b.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_activity_order() {
        let act = vec![1.0, 5.0, 3.0, 5.0];
        let mut h = VarHeap::default();
        for i in 0..4 {
            h.insert(Var(i), &act);
        }
        let order: Vec<u32> = std::iter::from_fn(|| h.pop(&act)).map(|v| v.0).collect();
        assert_eq!(order, vec![1, 3, 2, 0]);
    }

    #[test]
    fn increase_moves_up() {
        let mut act = vec![1.0, 2.0, 3.0];
        let mut h = VarHeap::default();
        for i in 0..3 {
            h.insert(Var(i), &act);
        }
        act[0] = 10.0;
        h.increased(Var(0), &act);
        assert_eq!(h.pop(&act), Some(Var(0)));
    }
}
