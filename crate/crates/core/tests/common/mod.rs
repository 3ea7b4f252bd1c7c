//! High-precision oracles shared by the integration tests.
#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};

pub const PREC: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

pub struct Oracle {
    consts: Consts,
}

impl Oracle {
    pub fn new() -> Self {
        Self { consts: Consts::new().expect("constant cache") }
    }

    pub fn f(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, PREC)
    }

    pub fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(PREC, RM, &mut self.consts)
    }

    pub fn ln(&mut self, x: &BigFloat) -> BigFloat {
        x.ln(PREC, RM, &mut self.consts)
    }

    pub fn pow(&mut self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.pow(y, PREC, RM, &mut self.consts)
    }

    pub fn to_f64(&self, x: &BigFloat) -> f64 {
        x.to_string().parse().expect("decimal rendering")
    }

    /// `Σ_{n≥1} p_n e^{−un}` for the exact-power law
    /// `p_n = (n)^{−β} − (n+1)^{−β}`, summed until the terms are negligible.
    pub fn exact_power_lambda(&mut self, beta: f64, u: f64) -> BigFloat {
        let mb = self.f(-beta);
        let q = self.exp(&self.f(-u));
        let mut e = q.clone();
        let mut sum = self.f(0.0);
        let mut prev = self.f(1.0);
        let cutoff = (60.0 / u) as u64 + 100;
        for n in 1..=cutoff {
            let m = BigFloat::from_u64(n + 1, PREC);
            let next = if beta == 0.5 {
                self.f(1.0).div(&m.sqrt(PREC, RM), PREC, RM)
            } else {
                self.pow(&m, &mb)
            };
            let p = prev.sub(&next, PREC, RM);
            sum = sum.add(&p.mul(&e, PREC, RM), PREC, RM);
            e = e.mul(&q, PREC, RM);
            prev = next;
        }
        sum
    }

    /// `1 − λ(u)` in full precision.
    pub fn exact_power_deficit(&mut self, beta: f64, u: f64) -> f64 {
        let l = self.exact_power_lambda(beta, u);
        let d = self.f(1.0).sub(&l, PREC, RM);
        self.to_f64(&d)
    }

    /// `F(u, s) − 1` and `∂_u F` for the exact-power law at `β = ½` with
    /// `ψ̄(n) = C′ − √n`, summed to `e^{−un} < e^{−80}`.
    pub fn sqrt_potential_partition(&mut self, u: f64, s: f64, c_prime: f64) -> (f64, f64) {
        let one = self.f(1.0);
        let q = self.exp(&self.f(-u));
        let shift = self.exp(&self.f(s * c_prime));
        let ms = self.f(-s);
        let mut e = q.clone();
        let (mut f, mut df) = (self.f(0.0), self.f(0.0));
        let mut prev = one.clone();
        let mut root = one.clone();
        let cutoff = (80.0 / u) as u64 + 100;
        for n in 1..=cutoff {
            let next_root = BigFloat::from_u64(n + 1, PREC).sqrt(PREC, RM);
            let next = one.div(&next_root, PREC, RM);
            let p = prev.sub(&next, PREC, RM);
            let damp = self.exp(&ms.mul(&root, PREC, RM));
            let term = p.mul(&e, PREC, RM).mul(&damp, PREC, RM);
            df = df.sub(&term.mul(&BigFloat::from_u64(n, PREC), PREC, RM), PREC, RM);
            f = f.add(&term, PREC, RM);
            e = e.mul(&q, PREC, RM);
            prev = next;
            root = next_root;
        }
        let f = f.mul(&shift, PREC, RM);
        let df = df.mul(&shift, PREC, RM);
        let excess = f.sub(&one, PREC, RM);
        (self.to_f64(&excess), self.to_f64(&df))
    }
}
