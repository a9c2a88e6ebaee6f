//! Use-bound functions and the `(ℓ_k, λ_k)` boundary recurrence.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kv::KvSpec;

/// Values wider than this many bits are refused as horizon-too-deep.
pub const MAX_BITS: u64 = 1 << 16;

/// A total computable bound `f` on oracle use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UseBound {
    /// `n`
    Identity,
    /// `n + 1`
    Successor,
    /// `n²`
    Square,
    /// `a·n + b`
    Linear { a: u64, b: u64 },
    /// `⌊√n⌋ + 1`
    IsqrtPlusOne,
    /// `2^n`
    Exp2,
    /// `f(i) = values[i]`, constant at the last entry beyond the table.
    Table(Arc<[u64]>),
}

impl UseBound {
    /// `f(n)` for machine-width arguments; saturates at `u64::MAX`.
    pub fn eval(&self, n: u64) -> u64 {
        match self {
            UseBound::Identity => n,
            UseBound::Successor => n.saturating_add(1),
            UseBound::Square => n.saturating_mul(n),
            UseBound::Linear { a, b } => a.saturating_mul(n).saturating_add(*b),
            UseBound::IsqrtPlusOne => n.isqrt() + 1,
            UseBound::Exp2 => {
                if n < 64 {
                    1 << n
                } else {
                    u64::MAX
                }
            }
            UseBound::Table(t) => t
                .get(n as usize)
                .or(t.last())
                .copied()
                .unwrap_or(0),
        }
    }

    /// `g(n) = max{f(i) : i ≤ n}` on big integers.
    pub fn running_max(&self, n: &BigUint) -> Result<BigUint> {
        let too_deep = |what: &str| Error::HorizonTooDeep(format!("{what} at argument of {} bits", n.bits()));
        let v = match self {
            UseBound::Identity => n.clone(),
            UseBound::Successor => n + 1u32,
            UseBound::Square => n * n,
            UseBound::Linear { a, b } => n * *a + *b,
            UseBound::IsqrtPlusOne => n.sqrt() + 1u32,
            UseBound::Exp2 => {
                let e = n
                    .to_u64()
                    .filter(|&e| e < MAX_BITS)
                    .ok_or_else(|| too_deep("2^n"))?;
                BigUint::one() << e
            }
            UseBound::Table(t) => {
                let upto = n.to_usize().map_or(t.len(), |i| (i + 1).min(t.len()));
                BigUint::from(t[..upto].iter().copied().max().unwrap_or(0))
            }
        };
        if v.bits() > MAX_BITS {
            return Err(too_deep("use bound value"));
        }
        Ok(v)
    }

    /// Parses `identity`, `successor`, `square`, `isqrt+1`, `exp2`, `linear:a,b` or `table:v0,v1,…`.
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown use bound `{name}`"));
        Ok(match name {
            "identity" | "id" => UseBound::Identity,
            "successor" => UseBound::Successor,
            "square" => UseBound::Square,
            "isqrt+1" => UseBound::IsqrtPlusOne,
            "exp2" => UseBound::Exp2,
            _ => {
                let (head, args) = name.split_once(':').ok_or_else(bad)?;
                let nums = args
                    .split(',')
                    .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                match (head, nums.as_slice()) {
                    ("linear", &[a, b]) => UseBound::Linear { a, b },
                    ("table", xs) if !xs.is_empty() => UseBound::Table(xs.into()),
                    _ => return Err(bad()),
                }
            }
        })
    }

    pub fn from_kv(kv: &mut KvSpec, key: &str) -> Result<Self> {
        match kv.take_str(key) {
            Some(name) => Self::from_name(&name),
            None => Ok(UseBound::Identity),
        }
    }
}

impl fmt::Display for UseBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UseBound::Identity => write!(f, "identity"),
            UseBound::Successor => write!(f, "successor"),
            UseBound::Square => write!(f, "square"),
            UseBound::Linear { a, b } => write!(f, "linear:{a},{b}"),
            UseBound::IsqrtPlusOne => write!(f, "isqrt+1"),
            UseBound::Exp2 => write!(f, "exp2"),
            UseBound::Table(t) => {
                let items: Vec<String> = t.iter().map(u64::to_string).collect();
                write!(f, "table:{}", items.join(","))
            }
        }
    }
}

/// The sequences `ℓ_0…ℓ_K`, `λ_0…λ_K` and the bound values `g(λ_k)` used to produce them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllLambda {
    pub ell: Vec<BigUint>,
    pub lambda: Vec<BigUint>,
    /// `g(λ_k)` as used in the recurrence (unused at `k = 0`).
    pub g: Vec<BigUint>,
}

/// The least `2^{m²}` exceeding `v`.
fn next_square_power(v: &BigUint) -> Result<BigUint> {
    let bits = v.bits();
    let mut m = bits.isqrt();
    if m * m < bits {
        m += 1;
    }
    let exp = m * m;
    if exp > MAX_BITS {
        return Err(Error::HorizonTooDeep(format!("ℓ would need 2^{exp}")));
    }
    Ok(BigUint::one() << exp)
}

/// One step of the recurrence from `(ℓ_{k−1}, λ_{k−1})`.
///
/// The bound is raised to at least the identity so that `g(λ_k) ≥ λ_k`.
fn step(f: &UseBound, ell_prev: &BigUint, lambda_prev: &BigUint) -> Result<(BigUint, BigUint, BigUint)> {
    let lambda = lambda_prev + ell_prev;
    let g = f.running_max(&lambda)?.max(lambda.clone());
    let ell = next_square_power(&g)?;
    Ok((ell, lambda, g))
}

/// `ℓ_0 = λ_0 = 1`, `λ_k = λ_{k−1} + ℓ_{k−1}`, `ℓ_k = min{2^{m²} : g(λ_k) < 2^{m²}}`, for `k ≤ steps`.
pub fn ell_lambda(f: &UseBound, steps: usize) -> Result<EllLambda> {
    let mut out = EllLambda {
        ell: vec![BigUint::one()],
        lambda: vec![BigUint::one()],
        g: vec![BigUint::zero()],
    };
    for k in 1..=steps {
        let (ell, lambda, g) = step(f, &out.ell[k - 1], &out.lambda[k - 1])?;
        out.ell.push(ell);
        out.lambda.push(lambda);
        out.g.push(g);
    }
    Ok(out)
}

/// Extends the recurrence until `ℓ_k` exceeds `horizon`, then keeps going while the
/// values still fit in 64 bits. Returns the `ℓ_k` that fit.
pub fn ell_boundaries(f: &UseBound, horizon: u64) -> Result<Vec<u64>> {
    let mut seq = ell_lambda(f, 0)?;
    loop {
        let k = seq.ell.len();
        match step(f, &seq.ell[k - 1], &seq.lambda[k - 1]) {
            Ok((ell, lambda, g)) => {
                seq.ell.push(ell);
                seq.lambda.push(lambda);
                seq.g.push(g);
            }
            Err(e) => {
                let last = seq.ell.last().and_then(ToPrimitive::to_u64);
                if last.is_some_and(|l| l <= horizon) {
                    return Err(e);
                }
                break;
            }
        }
        if seq.ell.last().expect("nonempty").to_u64().is_none() {
            break;
        }
    }
    Ok(seq.ell.iter().map_while(ToPrimitive::to_u64).collect())
}

impl EllLambda {
    /// Checks `ℓ_k > g(λ_k) ≥ λ_k ≥ ℓ_{k−1}` for every computed `k ≥ 1`; returns the first failing `k`.
    pub fn check_inequalities(&self) -> std::result::Result<(), usize> {
        for k in 1..self.ell.len() {
            let ok = self.ell[k] > self.g[k] && self.g[k] >= self.lambda[k] && self.lambda[k] >= self.ell[k - 1];
            if !ok {
                return Err(k);
            }
        }
        Ok(())
    }

    /// Checks `ℓ_k ≥ 2^{n²}` whenever `ℓ_{k−1} = 2^{(n−1)²}`, which forces `ℓ_{k−1}/ℓ_k → 0`.
    pub fn check_ratio_bound(&self) -> std::result::Result<(), usize> {
        for k in 1..self.ell.len() {
            let prev_exp = self.ell[k - 1].bits() - 1;
            let n = prev_exp.isqrt() + 1;
            if self.ell[k].bits() - 1 < n * n {
                return Err(k);
            }
        }
        Ok(())
    }

    /// Checks that `ℓ_{k−1}/ℓ_k` strictly decreases; returns the first failing `k`.
    pub fn check_ratio_decreasing(&self) -> std::result::Result<(), usize> {
        // ℓ_{k−1}/ℓ_k > ℓ_k/ℓ_{k+1}  ⇔  ℓ_{k−1}·ℓ_{k+1} > ℓ_k²
        for k in 1..self.ell.len().saturating_sub(1) {
            if &self.ell[k - 1] * &self.ell[k + 1] <= &self.ell[k] * &self.ell[k] {
                return Err(k + 1);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(xs: &[BigUint]) -> Vec<u64> {
        xs.iter().map(|x| x.to_u64().unwrap()).collect()
    }

    #[test]
    fn identity_recurrence() {
        let s = ell_lambda(&UseBound::Identity, 3).unwrap();
        assert_eq!(nums(&s.ell), vec![1, 16, 512, 65536]);
        assert_eq!(nums(&s.lambda), vec![1, 2, 18, 530]);
        s.check_inequalities().unwrap();
        s.check_ratio_decreasing().unwrap();
        ell_lambda(&UseBound::Identity, 7).unwrap().check_ratio_decreasing().unwrap();
    }

    #[test]
    fn ratio_need_not_decrease_for_irregular_bounds() {
        // A large early value pushes ℓ_1 up, after which ℓ_2 only needs to pass λ_2.
        let s = ell_lambda(&UseBound::Table(vec![5, 2, 90, 4].into()), 2).unwrap();
        assert_eq!(nums(&s.ell), vec![1, 512, 65536]);
        assert_eq!(s.check_ratio_decreasing(), Err(2));
        s.check_ratio_bound().unwrap();
    }

    #[test]
    fn inequalities_for_several_bounds() {
        for f in [
            UseBound::Identity,
            UseBound::Successor,
            UseBound::Square,
            UseBound::Linear { a: 3, b: 7 },
            UseBound::IsqrtPlusOne,
            UseBound::Table(vec![5, 2, 90, 4].into()),
        ] {
            let s = ell_lambda(&f, 6).unwrap();
            s.check_inequalities().unwrap_or_else(|k| panic!("{f} fails at {k}"));
            s.check_ratio_bound().unwrap_or_else(|k| panic!("{f} fails at {k}"));
        }
    }

    #[test]
    fn fast_bounds_run_out_of_room() {
        assert!(matches!(ell_lambda(&UseBound::Exp2, 8), Err(Error::HorizonTooDeep(_))));
        assert!(ell_lambda(&UseBound::Exp2, 2).is_ok());
    }

    #[test]
    fn boundaries_past_horizon() {
        let b = ell_boundaries(&UseBound::Identity, 1 << 20).unwrap();
        assert_eq!(&b[..6], &[1, 16, 512, 65536, 1 << 25, 1 << 36]);
        assert!(ell_boundaries(&UseBound::Exp2, 1 << 20).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for name in ["identity", "successor", "square", "isqrt+1", "exp2", "linear:2,3", "table:1,4,9"] {
            assert_eq!(UseBound::from_name(name).unwrap().to_string(), name);
        }
        assert!(UseBound::from_name("cube").is_err());
        assert_eq!(UseBound::IsqrtPlusOne.eval(15), 4);
        assert_eq!(UseBound::IsqrtPlusOne.eval(16), 5);
    }
}
