//! The operators evaluated on a single basis tensor.
//!
//! Each routine takes a multi-index `t = (i_0, …, i_n)` and pushes the image
//! into an accumulator indexed by the flat basis of the target degree.

use crate::algebra::FiniteAlgebra;
use crate::chains::Cochain;
use crate::exactnum::{Acc, Scalar, SparseVec};

/// One tensor slot of an output term.
pub(crate) enum Slot<'a, S> {
    Basis(usize),
    Vector(&'a SparseVec<S>),
}

impl<S> Clone for Slot<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for Slot<'_, S> {}

/// Pushes `coef · (s_0 ⊗ s_1 ⊗ …)` expanded multilinearly.
pub(crate) fn emit<S: Scalar>(acc: &mut Acc<S>, d: usize, slots: &[Slot<'_, S>], coef: &S) {
    fn rec<S: Scalar>(acc: &mut Acc<S>, d: usize, slots: &[Slot<'_, S>], idx: usize, c: &S) {
        match slots.split_first() {
            None => acc.push(idx, c.clone()),
            Some((Slot::Basis(i), rest)) => rec(acc, d, rest, idx * d + i, c),
            Some((Slot::Vector(v), rest)) => {
                for (i, x) in v.iter() {
                    rec(acc, d, rest, idx * d + i, &c.mul(x));
                }
            }
        }
    }
    if coef.is_zero() {
        return;
    }
    rec(acc, d, slots, 0, coef)
}

fn sign<S: Scalar>(odd: bool) -> S {
    S::one().signed(odd)
}

fn push_basis<S>(slots: &mut Vec<Slot<'_, S>>, t: &[usize]) {
    slots.extend(t.iter().map(|&i| Slot::Basis(i)));
}

pub(crate) struct Elementary<'a, S> {
    pub alg: &'a FiniteAlgebra<S>,
}

impl<'a, S: Scalar> Elementary<'a, S> {
    fn d(&self) -> usize {
        self.alg.dim()
    }

    /// Hochschild boundary, `n ≥ 1`.
    pub fn b(&self, t: &[usize], acc: &mut Acc<S>) {
        let n = t.len() - 1;
        let d = self.d();
        let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(n);
        for j in 0..n {
            slots.clear();
            push_basis(&mut slots, &t[..j]);
            slots.push(Slot::Vector(self.alg.plus_product(t[j], t[j + 1])));
            push_basis(&mut slots, &t[j + 2..]);
            emit(acc, d, &slots, &sign(j % 2 == 1));
        }
        slots.clear();
        slots.push(Slot::Vector(self.alg.plus_product(t[n], t[0])));
        push_basis(&mut slots, &t[1..n]);
        emit(acc, d, &slots, &sign(n % 2 == 1));
    }

    /// Connes' operator; kills tensors starting with `e`.
    pub fn connes_b(&self, t: &[usize], acc: &mut Acc<S>) {
        let n = t.len() - 1;
        let d = self.d();
        if t[0] == d {
            return;
        }
        let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(n + 2);
        for j in 0..=n {
            slots.clear();
            slots.push(Slot::Basis(d));
            push_basis(&mut slots, &t[j..]);
            push_basis(&mut slots, &t[..j]);
            emit(acc, d, &slots, &sign(j * n % 2 == 1));
        }
    }

    /// Lie derivative along a `k`-cochain, `k ≥ 1`; target degree `n − k + 1`.
    pub fn lie(&self, dc: &Cochain<S>, t: &[usize], acc: &mut Acc<S>) {
        let n = t.len() - 1;
        let k = dc.order();
        let d = self.d();
        if n + 1 < k {
            return;
        }
        let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(n + 1);
        for i in 0..=(n + 1 - k) {
            let Some(v) = dc.eval(self.alg, &t[i..i + k]) else { continue };
            slots.clear();
            push_basis(&mut slots, &t[..i]);
            slots.push(Slot::Vector(v));
            push_basis(&mut slots, &t[i + k..]);
            emit(acc, d, &slots, &sign(i * (k - 1) % 2 == 1));
        }
        let mut args = Vec::with_capacity(k);
        for i in 1..k {
            args.clear();
            args.extend_from_slice(&t[n + 1 - i..]);
            args.extend_from_slice(&t[..k - i]);
            let Some(v) = dc.eval(self.alg, &args) else { continue };
            slots.clear();
            slots.push(Slot::Vector(v));
            push_basis(&mut slots, &t[k - i..=n - i]);
            emit(acc, d, &slots, &sign(i * n % 2 == 1));
        }
    }

    /// `ι_D`, target degree `n − k`.
    pub fn iota(&self, dc: &Cochain<S>, t: &[usize], acc: &mut Acc<S>) {
        let n = t.len() - 1;
        let k = dc.order();
        if n < k {
            return;
        }
        let Some(v) = dc.eval(self.alg, &t[1..=k]) else { return };
        let prod = self.alg.mul_plus(&SparseVec::unit(t[0]), v);
        let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(n - k + 1);
        slots.push(Slot::Vector(&prod));
        push_basis(&mut slots, &t[k + 1..]);
        emit(acc, self.d(), &slots, &sign((k + 1) % 2 == 1));
    }

    /// `S_D`, target degree `n − k + 2`; zero on tensors starting with `e`.
    pub fn cyclic_s(&self, dc: &Cochain<S>, t: &[usize], acc: &mut Acc<S>) {
        let n = t.len() - 1;
        let k = dc.order();
        let d = self.d();
        if t[0] == d || n < k {
            return;
        }
        let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(n + 3);
        for i in 1..=(n + 1 - k) {
            let Some(v) = dc.eval(self.alg, &t[i..i + k]) else { continue };
            for j in 0..=(n + 1 - i - k) {
                slots.clear();
                slots.push(Slot::Basis(d));
                push_basis(&mut slots, &t[n + 1 - j..]);
                push_basis(&mut slots, &t[..i]);
                slots.push(Slot::Vector(v));
                push_basis(&mut slots, &t[i + k..=n - j]);
                let e = i * (k - 1) + j * (n + 1 - k);
                emit(acc, d, &slots, &sign(e % 2 == 1));
            }
        }
    }
}
